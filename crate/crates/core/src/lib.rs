pub mod condensate;
pub mod config;
pub mod dataio;
pub mod eigen;
pub mod error;
pub mod events;
pub mod potentials;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod synthetic;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
