use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Shapes or axis sizes do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An argument is malformed (repeated axis, bad index, bad order...).
    #[error("argument error: {0}")]
    Argument(String),

    /// The input lies outside the domain of the operation (e.g. a
    /// non-Hermitian matrix handed to the Hermitian eigensolver).
    #[error("domain error: {0}")]
    Domain(String),

    /// A variable would be attached to more than two factor ports.
    #[error("variable {variable} already has two attachments")]
    Normality { variable: usize },

    /// A contraction or enumeration would exceed its configured budget.
    #[error("resource guard: {what} needs {needed} entries, budget is {budget}")]
    Resource {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    /// Conditioning on, or collapsing onto, an event of probability zero.
    #[error("conditioning on an event of zero probability ({0})")]
    ZeroProbability(String),

    /// A computed result violates an invariant the construction guarantees.
    /// This indicates a bug in a graph builder, never bad user input.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// Monte Carlo target has no mass.
    #[error("degenerate sampling target: |f| vanishes everywhere")]
    DegenerateTarget,

    /// Estimator and sample set disagree on the sampling scheme.
    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),

    /// The graph does not have the structure an operation requires.
    #[error("structure error: {0}")]
    Structure(String),
}
