//! Orthogonal polynomials whose generating function has the form
//! `1 / (u(z) (f(z) - x)^lambda)`: recurrences, measures, closed forms,
//! the Riccati equation behind them and the identities they rest on.

pub mod cli;
pub mod error;
pub mod genfun;
pub mod identities;
pub mod measures;
pub mod poly;
pub mod quad;
pub mod recurrence;
pub mod riccati;

pub use error::{Error, Result};
