pub mod cli;
pub mod error;
pub mod integrals;
pub mod linearized;
pub mod numerics;
pub mod params;
pub mod profiles;
pub mod tower;

pub use error::{Error, Result};
