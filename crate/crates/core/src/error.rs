use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("arrows are not composable: s({left}) != r({right})")]
    NotComposable { left: String, right: String },

    #[error("arrow {0} does not belong to this groupoid")]
    UnknownArrow(String),

    #[error("unit {0} out of range")]
    UnknownUnit(usize),

    #[error("a truncation radius is required for an infinite backend")]
    MissingRadius,

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("action is not a homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),

    #[error("exhaustive validation is not available on an infinite backend")]
    ScopeUnsupported,

    #[error("group cocycle does not match the groupoid's group: {0}")]
    GroupMismatch(String),

    #[error("coboundary function is not 1 on unit {0}")]
    NotNormalized(String),

    #[error("elements belong to different algebras")]
    ParentMismatch,

    #[error("support explosion at n = {achieved}: {terms} terms exceeds cap {cap}")]
    SupportExplosion { achieved: usize, terms: usize, cap: usize },

    #[error("vector support is within {margin} of the truncation boundary; need {required}")]
    BoundaryViolation { margin: usize, required: usize },

    #[error("operation requires a finite backend")]
    InfiniteBackend,

    #[error("element is not self-adjoint (deviation {0:e})")]
    NotSelfAdjoint(f64),

    #[error("radius {radius} too small; need at least {required}")]
    RadiusTooSmall { radius: usize, required: usize },

    #[error("cocycle value {0} is not an n-th root of unity for the requested fiber")]
    NotRootOfUnity(String),

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("element is not supported in a single isotropy group")]
    NotInIsotropy,

    #[error("coefficient modulus {0} differs from 1/3")]
    ModulusViolation(f64),

    #[error("polynomial sup over the circle is {0}, not below 1")]
    NotContractivePolynomial(f64),

    #[error("matrix dimension {0} exceeds the dense limit")]
    DimensionTooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
