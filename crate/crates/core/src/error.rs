use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid Jacobi parameters: gamma = {gamma}, delta = {delta} (both must be > -1)")]
    InvalidJacobiParams { gamma: f64, delta: f64 },

    #[error("weight exponents must be >= 0 for path integrals: eta = {eta}, tau = {tau}")]
    NegativeWeightExponent { eta: f64, tau: f64 },

    #[error("evaluation point {point} outside domain [{lo}, {hi}]")]
    OutOfDomain { point: f64, lo: f64, hi: f64 },

    #[error("degree {degree} exceeds table range (n_max = {n_max})")]
    DegreeOutOfRange { degree: usize, n_max: usize },

    #[error("weight is singular at {point} (negative exponent at an endpoint)")]
    SingularWeight { point: f64 },

    #[error("the weighted basis requires parameters (1/2, -1/2), got ({gamma}, {delta})")]
    WeightedBasisParams { gamma: f64, delta: f64 },

    #[error("basis mismatch: {context}")]
    BasisMismatch { context: String },

    #[error("ln_gamma domain error: argument {x} is not a positive finite real")]
    GammaDomain { x: f64 },

    #[error("quadrature rule needs at least one node")]
    EmptyRule,

    #[error("eigenvalue iteration failed to converge at index {index} after {iterations} sweeps")]
    EigenNoConvergence { index: usize, iterations: usize },

    #[error("quadrature rule construction violated an invariant: {context}")]
    RuleInvariant { context: String },

    #[error("integrand not finite at node {node}")]
    NonFiniteIntegrand { node: f64 },

    #[error("stability index alpha = {alpha} outside [1, 2]")]
    InvalidAlpha { alpha: f64 },

    #[error("path grid must have at least one increment")]
    EmptyGrid,

    #[error("path domain [{path_lo}, {path_hi}] does not match the expected interval [{lo}, {hi}]")]
    PathDomainMismatch {
        path_lo: f64,
        path_hi: f64,
        lo: f64,
        hi: f64,
    },

    #[error("operation requires a Wiener (alpha = 2) path, got alpha = {alpha}")]
    NotWienerPath { alpha: f64 },

    #[error("degenerate fit: {context}")]
    DegenerateFit { context: String },

    #[error("invalid experiment configuration: {context}")]
    InvalidConfig { context: String },

    #[error("unknown catalog function `{id}`")]
    UnknownFunction { id: String },
}

pub type Result<T> = std::result::Result<T, Error>;
