use crate::entropy::Family;

/// Errors raised by the entropy, imaging and analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid entropy order {order} for {family}")]
    InvalidOrder { family: Family, order: f64 },
    #[error("weights must be finite, nonnegative and have a positive sum")]
    InvalidWeights,
    #[error("probability table must have at least one row and one column")]
    EmptyTable,
    #[error("empty sample set")]
    EmptySamples,
    #[error("samples must all have the same nonzero dimension")]
    RaggedSamples,
    #[error("kernel bandwidth must be positive and finite, got {0}")]
    NonPositiveSigma(f64),

    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("truncated PGM payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("unsupported PGM maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("image dimensions must be positive and match the pixel buffer")]
    BadDimensions,
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("window {window} must be odd, at least 3 and at most the smaller image side")]
    BadWindow { window: usize },
    #[error("shift ({dx}, {dy}) exceeds image bounds")]
    ExcessiveShift { dx: i64, dy: i64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("histogram is degenerate: no threshold separates two nonempty classes")]
    DegenerateHistogram,
    #[error("overlap of {0} pixels is below the 64-pixel minimum")]
    EmptyOverlap(usize),
    #[error("at least one control point is required")]
    EmptyPoints,
    #[error("at least two clusters are required, got {0}")]
    TooFewClusters(usize),
    #[error("labeling does not match the feature set: {0}")]
    BadLabeling(String),

    #[error("label sequences differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("ground-truth mask has no foreground pixels")]
    EmptyForeground,
    #[error("elapsed time must be nonnegative, got {0}")]
    NegativeTime(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
