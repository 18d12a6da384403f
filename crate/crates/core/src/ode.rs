//! Adaptive Dormand–Prince 5(4) integrator for small autonomous-or-not systems.
//!
//! Error control is purely relative to the sup norm of the state, which suits
//! solutions that decay over many orders of magnitude.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// What the caller wants after an accepted step.
pub enum Control {
    Continue,
    Stop,
    Abort(Error),
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64) -> Self {
        Self {
            rtol,
            h_init: 1e-3,
            h_max: 0.5,
            max_steps: 1_000_000,
        }
    }

    /// Integrates from `(x0, y0)` until `x_end` or until `on_step` asks to stop.
    /// Returns every accepted node including the initial one.
    pub fn integrate<const N: usize, F, S>(
        &self,
        f: F,
        x0: f64,
        y0: [f64; N],
        x_end: f64,
        mut on_step: S,
    ) -> Result<Vec<(f64, [f64; N])>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &[f64; N]) -> Control,
    {
        let mut out = vec![(x0, y0)];
        let mut x = x0;
        let mut y = y0;
        let mut h = self.h_init.min(x_end - x0);
        let mut k0 = f(x, &y);
        let h_min = 1e-14 * x0.abs().max(1.0);
        for _ in 0..self.max_steps {
            if x >= x_end {
                return Ok(out);
            }
            h = h.min(x_end - x).min(self.h_max);
            let mut k = [[0.0; N]; 7];
            k[0] = k0;
            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for j in 0..s {
                        acc += A[s][j] * k[j][i];
                    }
                    *yi += h * acc;
                }
                k[s] = f(x + C[s] * h, &ys);
            }
            let mut y_new = y;
            let mut err = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..N {
                let mut acc = 0.0;
                let mut e = 0.0;
                for s in 0..7 {
                    acc += B[s] * k[s][i];
                    e += E[s] * k[s][i];
                }
                y_new[i] += h * acc;
                err = err.max((h * e).abs());
                scale = scale.max(y[i].abs()).max(y_new[i].abs());
            }
            let ratio = if scale > 0.0 { err / (self.rtol * scale) } else { 0.0 };
            if !ratio.is_finite() {
                h *= 0.25;
                if h < h_min {
                    return Err(Error::StepSizeUnderflow { xi: x });
                }
                continue;
            }
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            if ratio <= 1.0 {
                x += h;
                y = y_new;
                k0 = k[6];
                out.push((x, y));
                match on_step(x, &y) {
                    Control::Continue => {}
                    Control::Stop => return Ok(out),
                    Control::Abort(e) => return Err(e),
                }
                h *= factor;
            } else {
                h *= factor.min(1.0);
                if h < h_min {
                    return Err(Error::StepSizeUnderflow { xi: x });
                }
            }
        }
        Err(Error::StepSizeUnderflow { xi: x })
    }
}
