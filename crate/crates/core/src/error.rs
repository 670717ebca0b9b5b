use thiserror::Error;

/// Malformed textual input (scalars, words, weights, rational functions).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed scalar `{0}`")]
    Scalar(String),
    #[error("malformed weight `{0}`")]
    Weight(String),
    #[error("malformed word `{input}` at position {pos}: {msg}")]
    Word { input: String, pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed rational function: {0}")]
    Rational(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("substitution produces a non-linear denominator: {0}")]
    NonLinearDenominator(String),

    #[error("residue in `{var}` is undefined: denominator form `{form}` vanishes identically at {var}=0")]
    ResiduePrecondition { var: String, form: String },

    #[error("weight {weight} lies beyond the algebra cutoff {cutoff}")]
    BeyondCutoff { weight: String, cutoff: String },

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("weight-inconsistent data: {0}")]
    WeightInconsistent(String),

    #[error("locality bound too small for insertion pair ({p}, {q}): {detail}")]
    LocalityTooSmall { p: usize, q: usize, detail: String },

    #[error("fields `{i}` and `{j}` are not local up to order {ceiling} at cutoff {cutoff}")]
    NotLocal {
        i: String,
        j: String,
        ceiling: u32,
        cutoff: String,
    },

    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant { invariant: String, detail: String },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("no invariant form: {0}")]
    NoInvariantForm(String),

    #[error("invariant form is degenerate on the weight {weight} block")]
    Degenerate { weight: String },

    #[error("invariant form is not unique: {dim}-dimensional solution space remains")]
    AmbiguousForm { dim: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("grading violation: {0}")]
    Grading(String),
}

pub type Result<T> = std::result::Result<T, Error>;
