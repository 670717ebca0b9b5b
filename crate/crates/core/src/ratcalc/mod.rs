//! Exact arithmetic over the Gaussian rationals: scalars, Laurent
//! polynomials and rational functions with linear-form denominators.

mod laurent;
mod rational;
mod scalar;

pub use laurent::{make_vars, union_vars, Exps, LaurentPoly, Vars};
pub use rational::{FormJson, LinearForm, RationalJson, ShiftTarget, SpecialRational, TermJson};
pub use scalar::Scalar;
