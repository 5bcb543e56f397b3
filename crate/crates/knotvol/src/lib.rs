//! Quantum 6j state sums, saddle points and complex volumes for the
//! Borromean rings, twisted Whitehead links and double twist knots.

pub mod ado;
pub mod cli;
pub mod error;
pub mod holonomy;
pub mod jones;
pub mod mpsum;
pub mod potential;
pub mod qnum;
pub mod reduce;
pub mod specfun;
pub mod volume;

pub use error::{Error, Result};
