pub mod error;
pub mod fixtures;
pub mod graycode;
pub mod markov;
pub mod metric;
pub mod ncube;
pub mod prng;
pub mod stats;
pub mod stoptime;

pub use error::{Error, Result};
