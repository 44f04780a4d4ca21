use thiserror::Error;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum HyperError {
    /// A univariate polynomial handed to the real-rooted solver has roots
    /// with imaginary parts that survive the backward-error rescue.
    #[error("polynomial is not real-rooted (realness defect {defect:.3e})")]
    NotRealRooted { defect: f64 },

    /// Root iteration failed to reach the requested residual.
    #[error("root refinement did not converge (residual {residual:.3e}, tol {tol:.3e})")]
    NoConvergence { residual: f64, tol: f64 },

    /// The direction vector annihilates the top-degree part of the
    /// polynomial, so the line restriction drops degree.
    #[error("degenerate direction: |f(v)| = {fv:.3e} below tolerance {tol:.3e}")]
    DegenerateDirection { fv: f64, tol: f64 },

    /// A term's exponent sum disagrees with the declared total degree.
    #[error("term {term_index} has degree {found}, expected homogeneous degree {expected}")]
    NonHomogeneous {
        term_index: usize,
        found: usize,
        expected: usize,
    },

    /// The polynomial is identically zero where a nonzero one is required
    /// (singular pencils, localization of the zero polynomial).
    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    /// A matrix expected to be Hermitian is too far from its adjoint.
    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    /// A matrix expected to be symmetric is too far from its transpose.
    #[error("matrix is not symmetric (defect {defect:.3e} exceeds {tol:.3e})")]
    NotSymmetric { defect: f64, tol: f64 },

    /// A supplied matrix is not positive semidefinite where required.
    #[error("matrix {index} is not PSD (min eigenvalue {min_eig:.3e})")]
    NotPsd { index: usize, min_eig: f64 },

    /// Singular-value tracking hit a sample where the requested number of
    /// singular values is not above the rank tolerance.
    #[error("rank deficient at grid index {index}: sigma_{k} = {sigma:.3e} <= rank tol {tol:.3e}")]
    RankDeficient {
        index: usize,
        k: usize,
        sigma: f64,
        tol: f64,
    },

    /// Ky Fan index outside 1..=min(m,n).
    #[error("k = {k} out of range 1..={ell}")]
    BadK { k: usize, ell: usize },

    /// Pointwise root extraction failed somewhere along a curve.
    #[error("root extraction failed at grid index {index}: {source}")]
    TrackingFailure {
        index: usize,
        #[source]
        source: Box<HyperError>,
    },

    /// A refinement grid does not nest into the base grid.
    #[error("refinement size {requested} does not divide base grid size {base}")]
    RefinementMismatch { requested: usize, base: usize },

    /// Too few samples for the requested analysis.
    #[error("grid too coarse: {nsteps} steps, need at least {min}")]
    GridTooCoarse { nsteps: usize, min: usize },

    /// Mismatched dimensions between inputs (vectors, matrices, curves).
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// Malformed input data (non-finite values, empty inputs, bad ranges).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// File format problems (JSON schema, CSV layout).
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HyperError>;

/// Default numerical tolerance, overridable via the `HYPERLAB_TOL`
/// environment variable.
pub fn default_tol() -> f64 {
    std::env::var("HYPERLAB_TOL")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(1e-9)
}
