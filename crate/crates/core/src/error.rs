//! Crate-wide error type. Payloads are carried as `f64` so the enum stays
//! non-generic while the kernels stay generic.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("immersion is degenerate at (u, v) = ({u}, {v}): det g = {det:e}")]
    DegenerateImmersion { u: f64, v: f64, det: f64 },

    #[error(
        "finite-difference derivatives unstable at (u, v) = ({u}, {v}): \
         step halving moved {which} by a relative {disagreement:e}"
    )]
    FiniteDifferenceUnstable {
        u: f64,
        v: f64,
        which: &'static str,
        disagreement: f64,
    },

    #[error("unknown catalog surface `{0}`")]
    UnknownCatalogName(String),

    #[error("bad parameter for catalog surface `{surface}`: {name}")]
    BadCatalogParameter { surface: String, name: String },

    #[error("{op} does not apply to this domain: {detail}")]
    DomainMismatch { op: &'static str, detail: String },

    #[error("mesh is not closed: undirected edge ({a}, {b}) borders {count} faces")]
    NotClosed { a: usize, b: usize, count: usize },

    #[error("mesh orientation is inconsistent: directed edge ({a}, {b}) appears {count} times")]
    NotOriented { a: usize, b: usize, count: usize },

    #[error("face {face} is degenerate: area {area:e} against mean {mean:e}")]
    DegenerateFace { face: usize, area: f64, mean: f64 },

    #[error("vector has zero (or non-finite) norm")]
    ZeroVector,

    #[error("factorization failed after {attempts} shift attempts (last shift {shift})")]
    FactorizationFailed { attempts: usize, shift: f64 },

    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("dense solve requested for dimension {n}, limit is {max}")]
    DenseTooLarge { n: usize, max: usize },

    #[error("invalid solver request: {0}")]
    BadSolveRequest(String),

    #[error("hypothesis 4a + b >= 0 violated: alpha = {alpha}, beta = {beta}")]
    HypothesisViolated { alpha: f64, beta: f64 },

    #[error("no comparison branch applies: {0}")]
    BranchNotApplicable(String),

    #[error("non-orientable surface has no FEM path here; a closed-form spectrum is required")]
    NonOrientableNeedsClosedForm,

    #[error("comparison gap still positive at alpha = {0}; no certification window found")]
    NotEventuallyNegative(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
