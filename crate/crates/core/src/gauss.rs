//! Gauss's-law flux quadrature over latitude circles on S², constant-χ
//! shells on S³, and circles/spheres in flat space.
//!
//! The normal points toward increasing θ (or χ, or r), away from the
//! north-pole charge, so the expected flux is `q / ε₀` of that charge on
//! every contour between the poles, including those past the equator.
//! Polar directions use Gauss–Legendre nodes; the periodic azimuth uses the
//! trapezoid rule.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::fields::{Charge, FieldLaw, Pole};
use crate::geometry::{ChartKind, MetricChart, DOMAIN_MARGIN};
use crate::table::{sig12, to_csv};

pub const DEFAULT_NODES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct FluxResult {
    /// Pole whose charge the contour encloses; `None` in flat space.
    pub enclosed: Option<Pole>,
    /// θ₀, χ₀ or flat radius.
    pub parameter: f64,
    /// Contour length or shell area.
    pub measure: f64,
    pub flux: f64,
    pub expected: f64,
}

impl FluxResult {
    pub fn deviation(&self) -> f64 {
        self.flux - self.expected
    }

    pub fn relative_deviation(&self) -> f64 {
        if self.expected == 0.0 {
            self.deviation().abs()
        } else {
            (self.deviation() / self.expected).abs()
        }
    }
}

fn nodes(n: usize) -> Result<NonZeroUsize> {
    NonZeroUsize::new(n).ok_or(Error::BadQuadrature(n))
}

fn check_angle(value: f64) -> Result<()> {
    if value > DOMAIN_MARGIN && value < PI - DOMAIN_MARGIN {
        Ok(())
    } else {
        Err(Error::BadContour(value))
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::BadRadius(radius))
    }
}

/// Trapezoid rule over one full period.
fn periodic<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> f64 {
    let h = TAU / n as f64;
    (0..n).map(|k| f(k as f64 * h)).sum::<f64>() * h
}

/// ∫₀^π ∫₀^{2π} f(θ) sinθ dφ dθ for an axisymmetric `f`, on a product rule.
fn unit_sphere_integral<F: Fn(f64) -> f64>(n_theta: usize, n_phi: usize, f: F) -> Result<f64> {
    let rule = GaussLegendre::new(nodes(n_theta)?);
    nodes(n_phi)?;
    Ok(rule.integrate(0.0, PI, |theta| periodic(n_phi, |_| f(theta)) * theta.sin()))
}

/// Flux of a radial field through the latitude circle `θ = θ₀` of a sphere
/// of radius `R`. `field` maps geodesic radius to the θ̂ component.
pub fn flux_latitude_s2<F>(
    field: F,
    charge: Charge,
    radius: f64,
    theta0: f64,
    n_nodes: usize,
) -> Result<FluxResult>
where
    F: Fn(f64) -> f64,
{
    check_radius(radius)?;
    check_angle(theta0)?;
    nodes(n_nodes)?;
    let rho = radius * theta0.sin();
    let flux = periodic(n_nodes, |_| field(radius * theta0) * rho);
    Ok(FluxResult {
        enclosed: Some(Pole::North),
        parameter: theta0,
        measure: TAU * rho,
        flux,
        expected: charge.flux(),
    })
}

/// Flux through the shell `χ = χ₀` of a 3-sphere, area element
/// `R² sin²χ₀ sinθ dθ dφ`.
pub fn flux_shell_s3<F>(
    field: F,
    charge: Charge,
    radius: f64,
    chi0: f64,
    n_theta: usize,
    n_phi: usize,
) -> Result<FluxResult>
where
    F: Fn(f64) -> f64,
{
    check_radius(radius)?;
    check_angle(chi0)?;
    let rho2 = (radius * chi0.sin()).powi(2);
    let flux = unit_sphere_integral(n_theta, n_phi, |_| field(radius * chi0))? * rho2;
    Ok(FluxResult {
        enclosed: Some(Pole::North),
        parameter: chi0,
        measure: 2.0 * TAU * rho2,
        flux,
        expected: charge.flux(),
    })
}

/// Flux through a flat-space circle of radius `r` around the charge.
pub fn flux_circle_flat2<F>(field: F, charge: Charge, r: f64, n_nodes: usize) -> Result<FluxResult>
where
    F: Fn(f64) -> f64,
{
    check_radius(r).map_err(|_| Error::BadContour(r))?;
    nodes(n_nodes)?;
    Ok(FluxResult {
        enclosed: None,
        parameter: r,
        measure: TAU * r,
        flux: periodic(n_nodes, |_| field(r) * r),
        expected: charge.flux(),
    })
}

/// Flux through a flat-space sphere of radius `r` around the charge.
pub fn flux_sphere_flat3<F>(
    field: F,
    charge: Charge,
    r: f64,
    n_theta: usize,
    n_phi: usize,
) -> Result<FluxResult>
where
    F: Fn(f64) -> f64,
{
    check_radius(r).map_err(|_| Error::BadContour(r))?;
    Ok(FluxResult {
        enclosed: None,
        parameter: r,
        measure: 2.0 * TAU * r * r,
        flux: unit_sphere_integral(n_theta, n_phi, |_| field(r))? * r * r,
        expected: charge.flux(),
    })
}

/// Flux results of a sweep over contour parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub chart: String,
    pub rows: Vec<FluxResult>,
}

impl ScanReport {
    pub fn max_abs_deviation(&self) -> f64 {
        self.rows
            .iter()
            .fold(0.0, |m, r| m.max(r.deviation().abs()))
    }

    pub fn max_relative_deviation(&self) -> f64 {
        self.rows
            .iter()
            .fold(0.0, |m, r| m.max(r.relative_deviation()))
    }

    /// Columns `parameter,measure,flux,expected,deviation`.
    pub fn to_csv(&self) -> String {
        to_csv(
            &["parameter", "measure", "flux", "expected", "deviation"],
            self.rows.iter().map(|r| {
                vec![
                    sig12(r.parameter),
                    sig12(r.measure),
                    sig12(r.flux),
                    sig12(r.expected),
                    sig12(r.deviation()),
                ]
            }),
        )
    }
}

/// Flux of the analytic field of `charge` through every contour in
/// `parameters` (θ₀ on S², χ₀ on S³, radius in flat space), using
/// [`DEFAULT_NODES`] per quadrature direction.
pub fn flux_invariance_scan(
    chart: &MetricChart,
    charge: Charge,
    parameters: &[f64],
) -> Result<ScanReport> {
    let law =
        FieldLaw::for_chart(chart).ok_or_else(|| Error::UnsupportedChart(chart.id().into()))?;
    let field = |r: f64| law.eval(charge, r);
    let n = DEFAULT_NODES;
    let rows = parameters
        .iter()
        .map(|&p| match (law, chart.kind()) {
            (FieldLaw::Sphere2 { radius }, _) => {
                check_angle(p)?;
                field(radius * p)?;
                flux_latitude_s2(|r| field(r).unwrap_or(f64::NAN), charge, radius, p, n)
            }
            (FieldLaw::Sphere3 { radius }, _) => {
                check_angle(p)?;
                field(radius * p)?;
                flux_shell_s3(|r| field(r).unwrap_or(f64::NAN), charge, radius, p, n, n)
            }
            (FieldLaw::Flat2, _) => {
                field(p).map_err(|_| Error::BadContour(p))?;
                flux_circle_flat2(|r| field(r).unwrap_or(f64::NAN), charge, p, n)
            }
            (FieldLaw::Flat3, ChartKind::Flat | ChartKind::Polar3) => {
                field(p).map_err(|_| Error::BadContour(p))?;
                flux_sphere_flat3(|r| field(r).unwrap_or(f64::NAN), charge, p, n, n)
            }
            _ => Err(Error::UnsupportedChart(chart.id().into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport {
        chart: chart.id().to_string(),
        rows,
    })
}
