use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {point:?} is outside the {domain} domain")]
    OutsideDomain { point: Vec<f64>, domain: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid function has no value at sample point {0:?}")]
    MissingSample(Vec<f64>),

    #[error("grid function lists point {0:?} twice")]
    DuplicatePoint(Vec<f64>),

    #[error("kernel {kernel} cannot act on a {domain} measure")]
    DomainMismatch { kernel: &'static str, domain: &'static str },

    #[error("matrix kernel has no entry for point {0:?}")]
    MatrixLookup(Vec<f64>),

    #[error(
        "potential of σ is infinite at sample point {0:?}; use cell measures or a bounded kernel"
    )]
    InfinitePotential(Vec<f64>),

    #[error("no finite solution detected after {iterations} iterations; {context} likely fails")]
    Divergence { iterations: usize, context: &'static str },

    #[error("iteration {iteration} decreased the iterate by {drop:e} at sample {sample}")]
    NonMonotone { iteration: usize, sample: usize, drop: f64 },

    #[error("no subsolution seed found after {halvings} halvings of c0")]
    NoSubsolution { halvings: u32 },

    #[error("kernel column {0} vanishes, the measure is degenerate for this kernel")]
    Degenerate(usize),

    #[error("point atoms make the fractional maximal function infinite on their support; use cell measures")]
    PointAtomsInMaximal,

    #[error("{mode} is not available for this configuration (dimension {dim})")]
    ModeUnavailable { mode: &'static str, dim: usize },

    #[error("simplex did not terminate within {0} pivots")]
    PivotLimit(usize),
}
