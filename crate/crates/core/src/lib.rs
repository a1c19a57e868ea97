pub mod cli;
pub mod error;
pub mod experiments;
pub mod homog;
pub mod ode;
pub mod ptrig;
pub mod quad;
pub mod shoot;
pub mod weight;

pub use error::{Error, Result};
