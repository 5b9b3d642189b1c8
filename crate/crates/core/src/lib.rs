pub mod arith;
pub mod branched_cover;
pub mod cli;
pub mod decimal;
pub mod error;
pub mod exact_linalg;
pub mod number_theory;
pub mod obstruction;
pub mod satellite;
pub mod seifert;

pub use error::{Error, Result};
