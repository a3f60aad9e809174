use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::tensor::SymMatrix;
use crate::error::{Error, Result};

/// Default width of the excluded band at every finite edge of a chart's
/// domain box (radians for angular coordinates).
pub const DOMAIN_MARGIN: f64 = 1e-3;

/// Metric determinants below this magnitude are treated as singular.
pub const SINGULAR_DETERMINANT: f64 = 1e-14;

pub type MetricFn = dyn Fn(&[f64]) -> SymMatrix + Send + Sync;

/// Evaluator for a family of metric derivatives. First derivatives return
/// `d` matrices (`[k]` holds `∂_k g`); second derivatives return `d * d`
/// matrices (`[a * d + b]` holds `∂_a ∂_b g`).
pub type MetricDerivativeFn = dyn Fn(&[f64]) -> Vec<SymMatrix> + Send + Sync;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn unbounded() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Strict containment after shrinking every finite end by `margin`.
    pub fn contains(&self, x: f64, margin: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let lo_ok = if self.lo.is_finite() {
            x > self.lo + margin
        } else {
            true
        };
        let hi_ok = if self.hi.is_finite() {
            x < self.hi - margin
        } else {
            true
        };
        lo_ok && hi_ok
    }
}

/// Which closed-form family a chart belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartKind {
    /// Constant metric `diag(signature)`.
    Flat,
    /// Flat 3-space in spherical coordinates `(r, θ, φ)`.
    Polar3,
    /// 2-sphere of the given radius, coordinates `(θ, φ)`.
    Sphere2 {
        radius: f64,
    },
    /// 3-sphere of the given radius, coordinates `(χ, θ, φ)`.
    Sphere3 {
        radius: f64,
    },
    /// Spatial slice of the FRW metric at frozen scale factor, coordinates `(r″, θ, φ)`.
    Frw {
        radius: f64,
        k: i8,
    },
    Custom,
}

/// A coordinate chart together with its metric.
///
/// Charts are immutable once built and cheap to clone.
#[derive(Clone)]
pub struct MetricChart {
    id: String,
    kind: ChartKind,
    coord_names: Vec<String>,
    domain: Vec<Interval>,
    margin: f64,
    signature: Vec<i8>,
    closed: bool,
    metric: Arc<MetricFn>,
    first: Option<Arc<MetricDerivativeFn>>,
    second: Option<Arc<MetricDerivativeFn>>,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("coord_names", &self.coord_names)
            .field("domain", &self.domain)
            .field("margin", &self.margin)
            .field("signature", &self.signature)
            .field("closed", &self.closed)
            .field("analytic_first", &self.first.is_some())
            .field("analytic_second", &self.second.is_some())
            .finish()
    }
}

fn check_radius(radius: f64) -> Result<f64> {
    if radius.is_finite() && radius > 0.0 {
        Ok(radius)
    } else {
        Err(Error::BadRadius(radius))
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl MetricChart {
    /// User-supplied chart. The metric closure is only asked for the upper
    /// triangle through [`SymMatrix::from_fn`] or similar; derivatives default
    /// to finite differences until registered.
    pub fn custom<F>(
        id: impl Into<String>,
        coord_names: Vec<String>,
        domain: Vec<Interval>,
        metric: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> SymMatrix + Send + Sync + 'static,
    {
        let d = coord_names.len();
        if d == 0 {
            return Err(Error::InvalidChart(
                "a chart needs at least one coordinate".into(),
            ));
        }
        if domain.len() != d {
            return Err(Error::InvalidChart(format!(
                "{} coordinate names but {} domain intervals",
                d,
                domain.len()
            )));
        }
        if domain.iter().any(|iv| !(iv.lo < iv.hi)) {
            return Err(Error::InvalidChart(
                "every domain interval needs lo < hi".into(),
            ));
        }
        Ok(Self {
            id: id.into(),
            kind: ChartKind::Custom,
            coord_names,
            domain,
            margin: DOMAIN_MARGIN,
            signature: vec![1; d],
            closed: false,
            metric: Arc::new(metric),
            first: None,
            second: None,
        })
    }

    pub fn with_first_derivatives<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<SymMatrix> + Send + Sync + 'static,
    {
        self.first = Some(Arc::new(f));
        self
    }

    pub fn with_second_derivatives<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<SymMatrix> + Send + Sync + 'static,
    {
        self.second = Some(Arc::new(f));
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin.max(0.0);
        self
    }

    pub fn with_signature(mut self, signature: Vec<i8>) -> Result<Self> {
        if signature.len() != self.dimension() || signature.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidChart(format!("bad signature {signature:?}")));
        }
        self.signature = signature;
        Ok(self)
    }

    pub fn closed(mut self, closed: bool) -> Self {
        self.closed = closed;
        self
    }

    /// Cartesian chart of dimension `d` with Euclidean signature.
    pub fn flat(d: usize) -> Self {
        Self::flat_with_signature(vec![1; d.max(1)]).expect("euclidean signature is always valid")
    }

    /// Cartesian chart with `g_ij = ±δ_ij`.
    pub fn flat_with_signature(signature: Vec<i8>) -> Result<Self> {
        let d = signature.len();
        if d == 0 || signature.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidChart(format!("bad signature {signature:?}")));
        }
        let diag: Vec<f64> = signature.iter().map(|&s| f64::from(s)).collect();
        let id = if signature.iter().all(|&s| s == 1) {
            format!("flat{d}")
        } else {
            let tags: String = signature
                .iter()
                .map(|&s| if s > 0 { '+' } else { '-' })
                .collect();
            format!("flat{d}:{tags}")
        };
        let coord_names = (1..=d).map(|i| format!("x{i}")).collect();
        let g = SymMatrix::diagonal(&diag);
        let mut chart = Self::custom(id, coord_names, vec![Interval::unbounded(); d], move |_| {
            g.clone()
        })?
        .with_first_derivatives(move |_| vec![SymMatrix::zeros(d); d])
        .with_second_derivatives(move |_| vec![SymMatrix::zeros(d); d * d]);
        chart.kind = ChartKind::Flat;
        chart.signature = signature;
        Ok(chart)
    }

    /// Flat 3-space in spherical coordinates: `diag(1, r², r² sin²θ)`.
    pub fn polar3() -> Self {
        let domain = vec![
            Interval::new(0.0, f64::INFINITY),
            Interval::new(0.0, PI),
            Interval::unbounded(),
        ];
        let mut chart = Self::custom("polar3", names(&["r", "theta", "phi"]), domain, |x| {
            let (r, s) = (x[0], x[1].sin());
            SymMatrix::diagonal(&[1.0, r * r, r * r * s * s])
        })
        .expect("static chart")
        .with_first_derivatives(|x| {
            let (r, t) = (x[0], x[1]);
            let s = t.sin();
            vec![
                SymMatrix::diagonal(&[0.0, 2.0 * r, 2.0 * r * s * s]),
                SymMatrix::diagonal(&[0.0, 0.0, r * r * (2.0 * t).sin()]),
                SymMatrix::zeros(3),
            ]
        })
        .with_second_derivatives(|x| {
            let (r, t) = (x[0], x[1]);
            let s = t.sin();
            let z = SymMatrix::zeros(3);
            let rr = SymMatrix::diagonal(&[0.0, 2.0, 2.0 * s * s]);
            let rt = SymMatrix::diagonal(&[0.0, 0.0, 2.0 * r * (2.0 * t).sin()]);
            let tt = SymMatrix::diagonal(&[0.0, 0.0, 2.0 * r * r * (2.0 * t).cos()]);
            vec![
                rr,
                rt.clone(),
                z.clone(),
                rt,
                tt,
                z.clone(),
                z.clone(),
                z.clone(),
                z,
            ]
        });
        chart.kind = ChartKind::Polar3;
        chart
    }

    /// 2-sphere of radius `R`: `R² diag(1, sin²θ)`.
    pub fn sphere2(radius: f64) -> Result<Self> {
        let r2 = check_radius(radius)?.powi(2);
        let domain = vec![Interval::new(0.0, PI), Interval::unbounded()];
        let mut chart = Self::custom(
            format!("sphere2:{radius}"),
            names(&["theta", "phi"]),
            domain,
            move |x| {
                let s = x[0].sin();
                SymMatrix::diagonal(&[r2, r2 * s * s])
            },
        )?
        .with_first_derivatives(move |x| {
            vec![
                SymMatrix::diagonal(&[0.0, r2 * (2.0 * x[0]).sin()]),
                SymMatrix::zeros(2),
            ]
        })
        .with_second_derivatives(move |x| {
            let z = SymMatrix::zeros(2);
            let tt = SymMatrix::diagonal(&[0.0, 2.0 * r2 * (2.0 * x[0]).cos()]);
            vec![tt, z.clone(), z.clone(), z]
        })
        .closed(true);
        chart.kind = ChartKind::Sphere2 { radius };
        Ok(chart)
    }

    /// 3-sphere of radius `R`: `R² diag(1, sin²χ, sin²χ sin²θ)`.
    pub fn sphere3(radius: f64) -> Result<Self> {
        let r2 = check_radius(radius)?.powi(2);
        let domain = vec![
            Interval::new(0.0, PI),
            Interval::new(0.0, PI),
            Interval::unbounded(),
        ];
        let mut chart = Self::custom(
            format!("sphere3:{radius}"),
            names(&["chi", "theta", "phi"]),
            domain,
            move |x| {
                let (sc, st) = (x[0].sin(), x[1].sin());
                SymMatrix::diagonal(&[r2, r2 * sc * sc, r2 * sc * sc * st * st])
            },
        )?
        .with_first_derivatives(move |x| {
            let (c, t) = (x[0], x[1]);
            let (sc, st) = (c.sin(), t.sin());
            let s2c = (2.0 * c).sin();
            vec![
                SymMatrix::diagonal(&[0.0, r2 * s2c, r2 * s2c * st * st]),
                SymMatrix::diagonal(&[0.0, 0.0, r2 * sc * sc * (2.0 * t).sin()]),
                SymMatrix::zeros(3),
            ]
        })
        .with_second_derivatives(move |x| {
            let (c, t) = (x[0], x[1]);
            let (sc, st) = (c.sin(), t.sin());
            let z = SymMatrix::zeros(3);
            let cc = SymMatrix::diagonal(&[
                0.0,
                2.0 * r2 * (2.0 * c).cos(),
                2.0 * r2 * (2.0 * c).cos() * st * st,
            ]);
            let ct = SymMatrix::diagonal(&[0.0, 0.0, r2 * (2.0 * c).sin() * (2.0 * t).sin()]);
            let tt = SymMatrix::diagonal(&[0.0, 0.0, 2.0 * r2 * sc * sc * (2.0 * t).cos()]);
            vec![
                cc,
                ct.clone(),
                z.clone(),
                ct,
                tt,
                z.clone(),
                z.clone(),
                z.clone(),
                z,
            ]
        })
        .closed(true);
        chart.kind = ChartKind::Sphere3 { radius };
        Ok(chart)
    }

    /// Spatial slice of the FRW metric with the scale factor frozen at `R`:
    /// `R² diag(1 / (1 - k r″²), r″², r″² sin²θ)`, `k ∈ {+1, 0, -1}`.
    pub fn frw(radius: f64, k: i8) -> Result<Self> {
        let r2 = check_radius(radius)?.powi(2);
        if !(-1..=1).contains(&k) {
            return Err(Error::InvalidChart(format!(
                "FRW curvature index must be -1, 0 or 1, got {k}"
            )));
        }
        let kf = f64::from(k);
        let upper = if k == 1 { 1.0 } else { f64::INFINITY };
        let domain = vec![
            Interval::new(0.0, upper),
            Interval::new(0.0, PI),
            Interval::unbounded(),
        ];
        let mut chart = Self::custom(
            format!("frw:{radius}:{k}"),
            names(&["r2", "theta", "phi"]),
            domain,
            move |x| {
                let (u, st) = (x[0], x[1].sin());
                SymMatrix::diagonal(&[r2 / (1.0 - kf * u * u), r2 * u * u, r2 * u * u * st * st])
            },
        )?
        .with_first_derivatives(move |x| {
            let (u, t) = (x[0], x[1]);
            let st = t.sin();
            let w = 1.0 - kf * u * u;
            vec![
                SymMatrix::diagonal(&[
                    r2 * 2.0 * kf * u / (w * w),
                    2.0 * r2 * u,
                    2.0 * r2 * u * st * st,
                ]),
                SymMatrix::diagonal(&[0.0, 0.0, r2 * u * u * (2.0 * t).sin()]),
                SymMatrix::zeros(3),
            ]
        })
        .with_second_derivatives(move |x| {
            let (u, t) = (x[0], x[1]);
            let st = t.sin();
            let w = 1.0 - kf * u * u;
            let z = SymMatrix::zeros(3);
            let uu = SymMatrix::diagonal(&[
                r2 * (2.0 * kf / (w * w) + 8.0 * kf * kf * u * u / (w * w * w)),
                2.0 * r2,
                2.0 * r2 * st * st,
            ]);
            let ut = SymMatrix::diagonal(&[0.0, 0.0, 2.0 * r2 * u * (2.0 * t).sin()]);
            let tt = SymMatrix::diagonal(&[0.0, 0.0, 2.0 * r2 * u * u * (2.0 * t).cos()]);
            vec![
                uu,
                ut.clone(),
                z.clone(),
                ut,
                tt,
                z.clone(),
                z.clone(),
                z.clone(),
                z,
            ]
        })
        .closed(k == 1);
        chart.kind = ChartKind::Frw { radius, k };
        Ok(chart)
    }

    /// Looks up a built-in chart by id: `flat2`, `flat3`, `polar3`,
    /// `sphere2:R`, `sphere3:R`, `frw:R:k`.
    pub fn from_id(id: &str) -> Result<Self> {
        let unknown = || Error::UnknownChart(id.to_string());
        let parse_radius = |s: &str| -> Result<f64> {
            let r: f64 = s.trim().parse().map_err(|_| unknown())?;
            check_radius(r)
        };
        let parts: Vec<&str> = id.trim().split(':').collect();
        match parts.as_slice() {
            ["flat2"] => Ok(Self::flat(2)),
            ["flat3"] => Ok(Self::flat(3)),
            ["polar3"] => Ok(Self::polar3()),
            ["sphere2", r] => Self::sphere2(parse_radius(r)?),
            ["sphere3", r] => Self::sphere3(parse_radius(r)?),
            ["frw", r, k] => {
                let k: i8 = k.trim().parse().map_err(|_| unknown())?;
                Self::frw(parse_radius(r)?, k)
            }
            _ => Err(unknown()),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.coord_names.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Radius of a sphere-like chart, if it has one.
    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            ChartKind::Sphere2 { radius }
            | ChartKind::Sphere3 { radius }
            | ChartKind::Frw { radius, .. } => Some(radius),
            _ => None,
        }
    }

    pub fn has_analytic_first(&self) -> bool {
        self.first.is_some()
    }

    pub fn has_analytic_second(&self) -> bool {
        self.second.is_some()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dimension()
            && self
                .domain
                .iter()
                .zip(point)
                .all(|(iv, &x)| iv.contains(x, self.margin))
    }

    /// Distance-to-boundary check for a stencil of half-width `reach`.
    pub(crate) fn stencil_fits(&self, point: &[f64], reach: f64) -> bool {
        self.domain.iter().zip(point).all(|(iv, &x)| {
            iv.contains(x - reach, self.margin) && iv.contains(x + reach, self.margin)
        })
    }

    pub(crate) fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: point.len(),
            });
        }
        if !self.contains(point) {
            return Err(Error::OutOfDomain {
                chart: self.id.clone(),
                point: point.to_vec(),
            });
        }
        Ok(())
    }

    /// Metric components at an interior point.
    pub fn metric_at(&self, point: &[f64]) -> Result<SymMatrix> {
        self.check_point(point)?;
        Ok((self.metric)(point))
    }

    /// Inverse metric `g^ij`; fails when `|det g| < 1e-14`.
    pub fn inverse_metric_at(&self, point: &[f64]) -> Result<SymMatrix> {
        let g = self.metric_at(point)?;
        invert_metric(&g, point)
    }

    pub(crate) fn eval_unchecked(&self, point: &[f64]) -> SymMatrix {
        (self.metric)(point)
    }

    pub(crate) fn analytic_first(&self) -> Option<&MetricDerivativeFn> {
        self.first.as_deref()
    }

    pub(crate) fn analytic_second(&self) -> Option<&MetricDerivativeFn> {
        self.second.as_deref()
    }
}

pub(crate) fn invert_metric(g: &SymMatrix, point: &[f64]) -> Result<SymMatrix> {
    let det = g.determinant();
    if !(det.abs() >= SINGULAR_DETERMINANT) {
        return Err(Error::SingularMetric {
            point: point.to_vec(),
            determinant: det,
        });
    }
    g.inverse().ok_or(Error::SingularMetric {
        point: point.to_vec(),
        determinant: det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_diag(m: &SymMatrix, diag: &[f64], tol: f64) {
        let expected = SymMatrix::diagonal(diag);
        for i in 0..diag.len() {
            for j in 0..diag.len() {
                assert!(
                    (m.get(i, j) - expected.get(i, j)).abs() <= tol,
                    "({i},{j}): {} vs {}",
                    m.get(i, j),
                    expected.get(i, j)
                );
            }
        }
    }

    #[test]
    fn sphere2_metric_at_equator() {
        let c = MetricChart::sphere2(1.0).unwrap();
        assert_diag(&c.metric_at(&[PI / 2.0, 0.3]).unwrap(), &[1.0, 1.0], 0.0);
    }

    #[test]
    fn flat3_metric_is_identity() {
        let c = MetricChart::flat(3);
        for p in [[0.0, 0.0, 0.0], [1e6, -3.0, 2.5]] {
            assert_eq!(c.metric_at(&p).unwrap(), SymMatrix::identity(3));
        }
    }

    #[test]
    fn sphere3_metric_by_hand() {
        let c = MetricChart::sphere3(2.0).unwrap();
        assert_diag(
            &c.metric_at(&[PI / 2.0, PI / 2.0, 1.0]).unwrap(),
            &[4.0, 4.0, 4.0],
            1e-15,
        );
    }

    #[test]
    fn lorentzian_flat_chart() {
        let c = MetricChart::flat_with_signature(vec![1, 1, 1, -1]).unwrap();
        assert_eq!(c.id(), "flat4:+++-");
        assert_diag(
            &c.metric_at(&[0.0; 4]).unwrap(),
            &[1.0, 1.0, 1.0, -1.0],
            0.0,
        );
        assert!(MetricChart::flat_with_signature(vec![1, 2]).is_err());
    }

    #[test]
    fn inverse_metric_examples() {
        let c = MetricChart::sphere2(1.0).unwrap();
        assert_diag(
            &c.inverse_metric_at(&[PI / 2.0, 0.0]).unwrap(),
            &[1.0, 1.0],
            1e-15,
        );
        let c = MetricChart::sphere2(2.0).unwrap();
        assert_diag(
            &c.inverse_metric_at(&[PI / 6.0, 0.0]).unwrap(),
            &[0.25, 1.0],
            1e-12,
        );
        let c = MetricChart::flat(2);
        assert_eq!(
            c.inverse_metric_at(&[1.0, 2.0]).unwrap(),
            SymMatrix::identity(2)
        );
    }

    #[test]
    fn pole_is_out_of_domain() {
        let c = MetricChart::sphere2(1.0).unwrap();
        for theta in [0.0, PI, 5e-4, PI - 5e-4, -0.1, f64::NAN] {
            assert!(matches!(
                c.metric_at(&[theta, 0.0]),
                Err(Error::OutOfDomain { .. })
            ));
        }
        assert!(c.metric_at(&[2e-3, 0.0]).is_ok());
    }

    #[test]
    fn wrong_dimension_is_reported() {
        let c = MetricChart::sphere2(1.0).unwrap();
        assert_eq!(
            c.metric_at(&[1.0]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 2,
                actual: 1
            }
        );
    }

    #[test]
    fn singular_custom_metric() {
        let c = MetricChart::custom(
            "degenerate",
            vec!["u".into(), "v".into()],
            vec![Interval::unbounded(); 2],
            |_| SymMatrix::diagonal(&[1.0, 1e-16]),
        )
        .unwrap();
        assert!(matches!(
            c.inverse_metric_at(&[0.0, 0.0]),
            Err(Error::SingularMetric { .. })
        ));
    }

    #[test]
    fn registry_round_trip() {
        for id in [
            "flat2",
            "flat3",
            "polar3",
            "sphere2:1",
            "sphere2:0.5",
            "sphere3:3",
            "frw:2:1",
            "frw:1:-1",
        ] {
            assert_eq!(MetricChart::from_id(id).unwrap().id(), id);
        }
        for bad in ["sphere2", "sphere2:-1", "sphere2:x", "frw:1:2", "torus"] {
            assert!(MetricChart::from_id(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn closed_flags() {
        assert!(MetricChart::from_id("sphere2:1").unwrap().is_closed());
        assert!(MetricChart::from_id("sphere3:1").unwrap().is_closed());
        assert!(MetricChart::from_id("frw:1:1").unwrap().is_closed());
        assert!(!MetricChart::from_id("frw:1:0").unwrap().is_closed());
        assert!(!MetricChart::from_id("flat3").unwrap().is_closed());
    }
}
