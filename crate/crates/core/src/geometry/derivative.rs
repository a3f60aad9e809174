//! Metric derivative engine.
//!
//! Analytic derivatives registered on a chart take precedence unless the
//! engine is put in finite-difference mode. Finite differences are central
//! differences with one Richardson extrapolation step
//! (`(4 D(h/2) - D(h)) / 3`), so the stencil reaches at most `h` from the
//! point. Second derivatives are nested first differences.

use super::chart::MetricChart;
use super::tensor::{SymMatrix, Tensor3};
use crate::error::{Error, Result};

pub const DEFAULT_FIRST_STEP: f64 = 1e-4;
pub const DEFAULT_SECOND_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeEngine {
    pub first_step: f64,
    pub second_step: f64,
    pub prefer_analytic: bool,
}

impl Default for DerivativeEngine {
    fn default() -> Self {
        Self {
            first_step: DEFAULT_FIRST_STEP,
            second_step: DEFAULT_SECOND_STEP,
            prefer_analytic: true,
        }
    }
}

/// Central difference of a matrix-valued function along coordinate `k`,
/// Richardson-extrapolated.
fn central<F>(f: &F, point: &[f64], k: usize, h: f64) -> SymMatrix
where
    F: Fn(&[f64]) -> SymMatrix + ?Sized,
{
    let mut x = point.to_vec();
    let mut diff = |step: f64| {
        x[k] = point[k] + step;
        let mut plus = f(&x);
        x[k] = point[k] - step;
        let minus = f(&x);
        x[k] = point[k];
        plus.axpy(-1.0, &minus);
        plus.map(|v| v / (2.0 * step))
    };
    let coarse = diff(h);
    let mut fine = diff(0.5 * h);
    fine = fine.map(|v| 4.0 * v / 3.0);
    fine.axpy(-1.0 / 3.0, &coarse);
    fine
}

impl DerivativeEngine {
    /// Always differentiates numerically, ignoring registered derivatives.
    pub fn finite_difference() -> Self {
        Self {
            prefer_analytic: false,
            ..Self::default()
        }
    }

    pub fn with_steps(mut self, first_step: f64, second_step: f64) -> Self {
        self.first_step = first_step;
        self.second_step = second_step;
        self
    }

    fn require_stencil(&self, chart: &MetricChart, point: &[f64], step: f64) -> Result<()> {
        if !(step > 0.0 && step.is_finite()) || !chart.stencil_fits(point, 2.0 * step) {
            return Err(Error::StepTooLarge {
                chart: chart.id().to_string(),
                step,
            });
        }
        Ok(())
    }

    fn fd_first(&self, chart: &MetricChart, point: &[f64], step: f64) -> Vec<SymMatrix> {
        let g = |x: &[f64]| chart.eval_unchecked(x);
        (0..chart.dimension())
            .map(|k| central(&g, point, k, step))
            .collect()
    }

    /// `∂_k g_ij` for every `k`; element `[k]` of the result.
    pub fn metric_first(&self, chart: &MetricChart, point: &[f64]) -> Result<Vec<SymMatrix>> {
        chart.check_point(point)?;
        if self.prefer_analytic {
            if let Some(dg) = chart.analytic_first() {
                return Ok(dg(point));
            }
        }
        self.require_stencil(chart, point, self.first_step)?;
        Ok(self.fd_first(chart, point, self.first_step))
    }

    /// `∂_a ∂_b g_ij`; element `[a * d + b]`, symmetrized in `(a, b)`.
    pub fn metric_second(&self, chart: &MetricChart, point: &[f64]) -> Result<Vec<SymMatrix>> {
        chart.check_point(point)?;
        let d = chart.dimension();
        if self.prefer_analytic {
            if let Some(d2g) = chart.analytic_second() {
                return Ok(d2g(point));
            }
        }
        let analytic_first = chart.analytic_first().filter(|_| self.prefer_analytic);
        let reach = match analytic_first {
            Some(_) => self.second_step,
            None => self.second_step + 2.0 * self.first_step,
        };
        self.require_stencil(chart, point, reach)?;

        let mut out = vec![SymMatrix::zeros(d); d * d];
        for b in 0..d {
            let dg_b = |x: &[f64]| match analytic_first {
                Some(dg) => dg(x).swap_remove(b),
                None => central(&|y: &[f64]| chart.eval_unchecked(y), x, b, self.first_step),
            };
            for a in 0..d {
                let v = central(&dg_b, point, a, self.second_step);
                out[a * d + b].axpy(0.5, &v);
                out[b * d + a].axpy(0.5, &v);
            }
        }
        Ok(out)
    }
}

/// `∂_k g_ij` as a dense `[i][j][k]` array. Central differences with the
/// given step unless the chart registers analytic first derivatives, in
/// which case `step` is ignored.
pub fn partials_of_metric(chart: &MetricChart, point: &[f64], step: f64) -> Result<Tensor3> {
    let engine = DerivativeEngine {
        first_step: step,
        ..DerivativeEngine::default()
    };
    let dg = engine.metric_first(chart, point)?;
    let d = chart.dimension();
    let mut out = Tensor3::zeros(d);
    for (k, m) in dg.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                out[(i, j, k)] = m.get(i, j);
            }
        }
    }
    Ok(out)
}
