//! Thread cap and a scoped parallel map for independent jobs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "CHEMOWAVE_THREADS";

/// Parses a thread-cap value; `None` means "use the hardware count".
pub fn parse_threads(value: Option<&str>) -> Result<usize> {
    match value {
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config {
                key: THREADS_ENV.into(),
                detail: format!("expected a positive integer, got {s:?}"),
            }),
        },
    }
}

/// Thread cap from the environment.
pub fn thread_cap() -> Result<usize> {
    parse_threads(std::env::var(THREADS_ENV).ok().as_deref())
}

/// Applies `f` to each item on at most `threads` workers, preserving order.
pub fn map<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let n = items.len();
    let workers = threads.max(1).min(n);
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let slots: Vec<Mutex<Option<T>>> = items.into_iter().map(|t| Mutex::new(Some(t))).collect();
    let results: Vec<Mutex<Option<R>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let item = slots[i].lock().expect("slot lock").take().expect("item taken once");
                let r = f(item);
                *results[i].lock().expect("result lock") = Some(r);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().expect("result lock").expect("every job ran"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cap() {
        assert_eq!(parse_threads(Some("3")).unwrap(), 3);
        assert!(parse_threads(Some("0")).is_err());
        assert!(parse_threads(Some("many")).is_err());
        assert!(parse_threads(None).unwrap() >= 1);
    }

    #[test]
    fn map_preserves_order() {
        for threads in [1, 2, 8] {
            let out = map((0..50).collect(), threads, |i: u64| i * i);
            assert_eq!(out, (0..50).map(|i| i * i).collect::<Vec<_>>());
        }
        let empty: Vec<u8> = map(Vec::<u8>::new(), 4, |x| x);
        assert!(empty.is_empty());
    }
}
