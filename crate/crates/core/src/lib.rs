//! Exact construction and verification of vertex (super)algebras from
//! generating fields and their correlation functions.

pub mod correlator;
pub mod error;
pub mod extend;
pub mod graded;
pub mod linalg;
pub mod modealg;
pub mod ratcalc;
pub mod report;
pub mod vertexop;

pub use error::{Error, ParseError, Result};
