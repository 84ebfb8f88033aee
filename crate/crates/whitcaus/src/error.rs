use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("indeterminate: zero polynomial")]
    ZeroPolynomial,
    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: usize, max: usize },
    #[error("singular matrix")]
    Singular,
    #[error("matrix is not orthogonal (Frobenius deviation {0:.3e})")]
    NotOrthogonal(f64),
    #[error("t-form requires y1^2 + y2^2 < 1")]
    OutsideLightZone,
    #[error("x = 0 is a fixed point of the involution")]
    FixedPoint,
    #[error("tail not nonstationary: {0}")]
    TailNotNonstationary(String),
    #[error("quadrature did not converge (partial value {value}, error estimate {err:.3e})")]
    NoConvergence { value: Complex64, err: f64 },
    #[error("incomplete critical set: found {found}, expected {expected}")]
    IncompleteCriticalSet { found: usize, expected: usize },
    #[error("degenerate critical point present")]
    Degenerate,
    #[error("point outside the cusp window")]
    OutsideWindow,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
