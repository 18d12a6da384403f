pub mod error;
pub mod model;
pub mod scalar_maps;

pub use error::{Error, Result};
pub use model::{DerivedQuantities, DiffusionFamily, DiffusionPerturbation, Model, ModelParams};
pub use scalar_maps::ScalarMapContext;
pub mod ode;
pub mod wave;
pub mod weights;
pub mod fd;
pub mod linearization;
pub mod spectrum;
pub mod fit;
pub mod simulator;
pub mod config;
pub mod io;
pub mod parallel;
pub mod cli;
