use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scale {0}: |N| must be at least 2")]
    InvalidScale(i64),

    #[error("digit set has {digits} elements but frequency set has {frequencies}")]
    SizeMismatch { digits: usize, frequencies: usize },

    #[error("duplicate element {value} in {set} set")]
    DuplicateElement { set: &'static str, value: i64 },

    #[error("not a Hadamard triple: max unitarity deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotHadamard { deviation: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid range: p = {p} must be smaller than q = {q}")]
    InvalidRange { p: usize, q: usize },

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("depth {depth} too large: {reason}")]
    DepthTooLarge { depth: usize, reason: String },

    #[error("a singleton digit set has a mask of modulus one and no zeros")]
    SingletonMask,

    #[error("no admissible index within horizon {horizon} after m = {previous}")]
    HorizonExhausted { previous: usize, horizon: usize },

    #[error(
        "equi-positivity violated at level {level} (m = {index}): lambda = {lambda}, x = {x:.6}, best |transform| = {value:.3e} < epsilon = {epsilon:.1e}"
    )]
    EquiPositivityViolation {
        level: usize,
        index: usize,
        lambda: i64,
        x: f64,
        value: f64,
        epsilon: f64,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
