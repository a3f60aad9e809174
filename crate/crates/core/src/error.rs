use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the domain of chart `{chart}`")]
    OutOfDomain { chart: String, point: Vec<f64> },
    #[error("metric is singular at {point:?} (determinant {determinant:e})")]
    SingularMetric { point: Vec<f64>, determinant: f64 },
    #[error("finite-difference stencil of step {step:e} leaves the domain of chart `{chart}`")]
    StepTooLarge { chart: String, step: f64 },
    #[error("expected dimension {expected}, chart has dimension {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("unknown chart id `{0}`")]
    UnknownChart(String),
    #[error("invalid chart definition: {0}")]
    InvalidChart(String),
    #[error("angle {name} = {value} is outside its chart range")]
    BadAngle { name: &'static str, value: f64 },
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("{name} = {value} is outside the admissible range [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("distance must be positive, got {0}")]
    ZeroDistance(f64),
    #[error("geodesic radius {r} is within the pole margin of a sphere of radius {radius}")]
    PoleSingularity { r: f64, radius: f64 },
    #[error("charge must be finite and nonzero, got {0}")]
    BadCharge(f64),
    #[error("charges cannot be neutralized by antipodal images: {0}")]
    NonNeutralizable(String),
    #[error("chart `{0}` is not a closed space")]
    NotClosed(String),
    #[error("contour parameter {0} is outside the open range allowed by the pole margins")]
    BadContour(f64),
    #[error("quadrature needs at least one node, got {0}")]
    BadQuadrature(usize),
    #[error("flux scans are not available on chart `{0}`")]
    UnsupportedChart(String),
    #[error("total charge on a closed space must be zero (monopole coefficient {monopole:e})")]
    NonNeutralSource { monopole: f64 },
    #[error("harmonic coefficient ({l}, {m}) is not part of this spectrum")]
    BadIndex { l: usize, m: i64 },
    #[error("coefficient ({l}, 0) of a real field must be real, got imaginary part {im:e}")]
    NotReal { l: usize, im: f64 },
    #[error("series tail {tail:e} exceeds tolerance {tolerance:e}")]
    NotConverged { tail: f64, tolerance: f64 },
    #[error("spectrum kind mismatch: expected {expected}")]
    WrongKind { expected: &'static str },
    #[error("malformed spectrum CSV at line {line}: {reason}")]
    SpectrumCsv { line: usize, reason: String },
}
