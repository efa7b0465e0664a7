//! Moments of randomly measured multi-qubit correlation functions, evaluated
//! exactly through spherical and unitary designs, with moment-based
//! entanglement criteria built on top.

pub mod criteria;
pub mod designs;
pub mod error;
pub mod figures;
pub mod moments;
pub mod qubit;
pub mod sampling;
pub mod states;

pub use error::{Error, Result};
