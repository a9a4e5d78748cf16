pub mod endo;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod matrix;
pub mod presentation;
pub mod returns;
pub mod stallings;
pub mod substitution;
pub mod words;

pub use error::{Error, Result};
