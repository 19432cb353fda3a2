pub mod angular;
pub mod cli;
pub mod error;
pub mod fano;
pub mod invariants;
pub mod multiaxial;
pub mod roots;
pub mod sampling;
pub mod states;

pub use error::{Error, Result};
