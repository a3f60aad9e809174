//! Metric charts and the curvature pipeline built on them.

mod chart;
mod curvature;
mod derivative;
mod tensor;

pub use chart::{
    ChartKind, Interval, MetricChart, MetricDerivativeFn, MetricFn, DOMAIN_MARGIN,
    SINGULAR_DETERMINANT,
};
pub use curvature::{
    christoffel_first, christoffel_second, curvature, gauss_curvature, independent_component_count,
    ricci_scalar, riemann, CurvatureReport,
};
pub use derivative::{
    partials_of_metric, DerivativeEngine, DEFAULT_FIRST_STEP, DEFAULT_SECOND_STEP,
};
pub use tensor::{SymMatrix, Tensor3, Tensor4};
