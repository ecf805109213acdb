//! Transvection random walk on invertible matrices over GF(2).

pub mod chain;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod funineq;
pub mod gf2;
pub mod protocol;
pub mod seeding;

pub use error::{Error, Result};
