use super::chart::{invert_metric, MetricChart};
use super::derivative::DerivativeEngine;
use super::tensor::{SymMatrix, Tensor3, Tensor4};
use crate::error::{Error, Result};

/// Every curvature quantity of a chart at one point.
///
/// Index conventions:
/// * `gamma_first[(i, j, k)] = Γ_{i,jk}`
/// * `gamma_second[(i, j, k)] = Γ^i_{jk}`
/// * `riemann[(i, j, k, l)] = R^i_{jkl}`, `riemann_lowered[(i, j, k, l)] = R_{ijkl}`
/// * `ricci[(i, j)] = R^k_{ikj}`
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub point: Vec<f64>,
    pub metric: SymMatrix,
    pub inverse_metric: SymMatrix,
    pub gamma_first: Tensor3,
    pub gamma_second: Tensor3,
    pub riemann: Tensor4,
    pub riemann_lowered: Tensor4,
    pub ricci: SymMatrix,
    pub ricci_scalar: f64,
    /// `ricci_scalar / 2`, only for two-dimensional charts.
    pub gauss_curvature: Option<f64>,
    pub independent_count: u64,
}

/// Number of algebraically independent Riemann components in `d` dimensions.
pub fn independent_component_count(d: u64) -> u64 {
    let d2 = d * d;
    d2 * d2.saturating_sub(1) / 12
}

fn first_kind(dg: &[SymMatrix]) -> Tensor3 {
    let d = dg.len();
    let mut gamma = Tensor3::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                gamma[(i, j, k)] = 0.5 * (dg[k].get(i, j) + dg[j].get(k, i) - dg[i].get(j, k));
            }
        }
    }
    gamma
}

fn raise(ginv: &SymMatrix, lowered: &Tensor3) -> Tensor3 {
    let d = ginv.dim();
    let mut out = Tensor3::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                out[(i, j, k)] = (0..d).map(|l| ginv.get(i, l) * lowered[(l, j, k)]).sum();
            }
        }
    }
    out
}

impl DerivativeEngine {
    pub fn christoffel_first(&self, chart: &MetricChart, point: &[f64]) -> Result<Tensor3> {
        Ok(first_kind(&self.metric_first(chart, point)?))
    }

    pub fn christoffel_second(&self, chart: &MetricChart, point: &[f64]) -> Result<Tensor3> {
        let ginv = chart.inverse_metric_at(point)?;
        Ok(raise(&ginv, &self.christoffel_first(chart, point)?))
    }

    /// Full curvature pipeline at `point`.
    pub fn curvature(&self, chart: &MetricChart, point: &[f64]) -> Result<CurvatureReport> {
        let g = chart.metric_at(point)?;
        let ginv = invert_metric(&g, point)?;
        let dg = self.metric_first(chart, point)?;
        let d2g = self.metric_second(chart, point)?;
        let d = chart.dimension();

        let gamma_first = first_kind(&dg);
        let gamma_second = raise(&ginv, &gamma_first);

        // ∂_m g^{il} = -g^{ia} ∂_m g_{ab} g^{bl}
        let dginv: Vec<SymMatrix> = dg
            .iter()
            .map(|dgm| {
                SymMatrix::from_fn(d, |i, l| {
                    let mut s = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            s += ginv.get(i, a) * dgm.get(a, b) * ginv.get(b, l);
                        }
                    }
                    -s
                })
            })
            .collect();

        // dgamma[m][(i, j, k)] = ∂_m Γ^i_{jk}
        let dgamma: Vec<Tensor3> = (0..d)
            .map(|m| {
                let mut dfirst = Tensor3::zeros(d);
                for l in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            dfirst[(l, j, k)] = 0.5
                                * (d2g[m * d + k].get(l, j) + d2g[m * d + j].get(k, l)
                                    - d2g[m * d + l].get(j, k));
                        }
                    }
                }
                let mut out = raise(&ginv, &dfirst);
                let correction = raise(&dginv[m], &gamma_first);
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            out[(i, j, k)] += correction[(i, j, k)];
                        }
                    }
                }
                out
            })
            .collect();

        // R^i_{jkl} = ∂_k Γ^i_{lj} - ∂_l Γ^i_{kj} + Γ^m_{lj} Γ^i_{km} - Γ^m_{jk} Γ^i_{lm}
        let gs = &gamma_second;
        let mut riemann = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut v = dgamma[k][(i, l, j)] - dgamma[l][(i, k, j)];
                        for m in 0..d {
                            v += gs[(m, l, j)] * gs[(i, k, m)] - gs[(m, j, k)] * gs[(i, l, m)];
                        }
                        riemann[(i, j, k, l)] = v;
                    }
                }
            }
        }

        let mut riemann_lowered = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        riemann_lowered[(i, j, k, l)] =
                            (0..d).map(|m| g.get(i, m) * riemann[(m, j, k, l)]).sum();
                    }
                }
            }
        }

        // Contraction of the upper index with the third lower one gives a
        // positive scalar on the round sphere.
        let ricci_full: Vec<f64> = (0..d * d)
            .map(|n| {
                let (i, j) = (n / d, n % d);
                (0..d).map(|k| riemann[(k, i, k, j)]).sum()
            })
            .collect();
        let ricci = SymMatrix::from_fn(d, |i, j| {
            0.5 * (ricci_full[i * d + j] + ricci_full[j * d + i])
        });
        let ricci_scalar = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| ginv.get(i, j) * ricci_full[i * d + j])
            .sum::<f64>();

        Ok(CurvatureReport {
            point: point.to_vec(),
            metric: g,
            inverse_metric: ginv,
            gamma_first,
            gamma_second,
            riemann,
            riemann_lowered,
            ricci,
            ricci_scalar,
            gauss_curvature: (d == 2).then_some(0.5 * ricci_scalar),
            independent_count: independent_component_count(d as u64),
        })
    }

    pub fn riemann(&self, chart: &MetricChart, point: &[f64]) -> Result<(Tensor4, Tensor4)> {
        let r = self.curvature(chart, point)?;
        Ok((r.riemann, r.riemann_lowered))
    }

    pub fn ricci_scalar(&self, chart: &MetricChart, point: &[f64]) -> Result<f64> {
        Ok(self.curvature(chart, point)?.ricci_scalar)
    }

    pub fn gauss_curvature(&self, chart: &MetricChart, point: &[f64]) -> Result<f64> {
        if chart.dimension() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: chart.dimension(),
            });
        }
        Ok(0.5 * self.ricci_scalar(chart, point)?)
    }
}

pub fn christoffel_first(chart: &MetricChart, point: &[f64]) -> Result<Tensor3> {
    DerivativeEngine::default().christoffel_first(chart, point)
}

pub fn christoffel_second(chart: &MetricChart, point: &[f64]) -> Result<Tensor3> {
    DerivativeEngine::default().christoffel_second(chart, point)
}

/// Mixed `R^i_{jkl}` and lowered `R_{ijkl}` Riemann tensors.
pub fn riemann(chart: &MetricChart, point: &[f64]) -> Result<(Tensor4, Tensor4)> {
    DerivativeEngine::default().riemann(chart, point)
}

pub fn ricci_scalar(chart: &MetricChart, point: &[f64]) -> Result<f64> {
    DerivativeEngine::default().ricci_scalar(chart, point)
}

pub fn gauss_curvature(chart: &MetricChart, point: &[f64]) -> Result<f64> {
    DerivativeEngine::default().gauss_curvature(chart, point)
}

pub fn curvature(chart: &MetricChart, point: &[f64]) -> Result<CurvatureReport> {
    DerivativeEngine::default().curvature(chart, point)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    const TH: usize = 0;
    const PH: usize = 1;

    #[test]
    fn component_counts() {
        assert_eq!(independent_component_count(1), 0);
        assert_eq!(independent_component_count(2), 1);
        assert_eq!(independent_component_count(3), 6);
        assert_eq!(independent_component_count(4), 20);
    }

    #[test]
    fn sphere2_christoffel_first() {
        let c = MetricChart::sphere2(1.0).unwrap();
        let g = christoffel_first(&c, &[PI / 4.0, 0.0]).unwrap();
        assert!((g[(TH, PH, PH)] + 0.5).abs() < 1e-15);
        assert_eq!(g[(TH, TH, TH)], 0.0);
        assert!((g[(PH, TH, PH)] - 0.5).abs() < 1e-15);
        assert_eq!(g[(PH, TH, PH)], g[(PH, PH, TH)]);
        let g = christoffel_first(&c, &[2.2, 1.0]).unwrap();
        assert_eq!(g[(TH, TH, TH)], 0.0);
    }

    #[test]
    fn sphere2_christoffel_second() {
        let c = MetricChart::sphere2(1.0).unwrap();
        let g = christoffel_second(&c, &[PI / 4.0, 0.0]).unwrap();
        assert!((g[(TH, PH, PH)] + 0.5).abs() < 1e-12);
        assert!((g[(PH, TH, PH)] - 1.0).abs() < 1e-12);
        assert_eq!(g[(PH, TH, PH)], g[(PH, PH, TH)]);
    }

    #[test]
    fn flat_christoffels_vanish() {
        let c = MetricChart::flat(3);
        assert_eq!(
            christoffel_first(&c, &[1.0, 2.0, 3.0]).unwrap().max_abs(),
            0.0
        );
        assert_eq!(
            christoffel_second(&c, &[1.0, 2.0, 3.0]).unwrap().max_abs(),
            0.0
        );
    }

    #[test]
    fn sphere2_riemann_component() {
        let c = MetricChart::sphere2(1.0).unwrap();
        let (_, low) = riemann(&c, &[PI / 2.0, 0.0]).unwrap();
        assert!((low[(TH, PH, TH, PH)] - 1.0).abs() < 1e-6);
        let c = MetricChart::sphere2(2.0).unwrap();
        let (_, low) = riemann(&c, &[PI / 6.0, 0.0]).unwrap();
        assert!((low[(TH, PH, TH, PH)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_riemann_vanishes() {
        let (mixed, low) = riemann(&MetricChart::flat(2), &[0.0, 0.0]).unwrap();
        assert!(mixed.max_abs() <= 1e-9 && low.max_abs() <= 1e-9);
        let fd = DerivativeEngine::finite_difference();
        let (mixed, _) = fd
            .riemann(&MetricChart::polar3(), &[1.5, 1.0, 0.2])
            .unwrap();
        assert!(mixed.max_abs() <= 1e-6, "{}", mixed.max_abs());
    }

    #[test]
    fn gauss_curvature_examples() {
        let k = gauss_curvature(&MetricChart::sphere2(1.0).unwrap(), &[1.0, 0.0]).unwrap();
        assert!((k - 1.0).abs() < 1e-6);
        let k = gauss_curvature(&MetricChart::sphere2(3.0).unwrap(), &[0.4, 2.0]).unwrap();
        assert!((k - 1.0 / 9.0).abs() < 1e-6);
        let k = gauss_curvature(&MetricChart::flat(2), &[0.4, 2.0]).unwrap();
        assert!(k.abs() < 1e-9);
    }

    #[test]
    fn gauss_curvature_needs_two_dimensions() {
        let err = gauss_curvature(&MetricChart::flat(3), &[0.0; 3]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                actual: 3
            }
        );
    }

    #[test]
    fn three_sphere_and_frw_scalars() {
        for radius in [0.5, 1.0, 3.0] {
            let s3 = MetricChart::sphere3(radius).unwrap();
            let r = ricci_scalar(&s3, &[0.7, 1.1, 0.0]).unwrap();
            assert!((r - 6.0 / (radius * radius)).abs() < 1e-10);
            for k in [-1i8, 0, 1] {
                let frw = MetricChart::frw(radius, k).unwrap();
                let r = ricci_scalar(&frw, &[0.4, 1.1, 0.0]).unwrap();
                assert!(
                    (r - 6.0 * f64::from(k) / (radius * radius)).abs() < 1e-10,
                    "k={k}"
                );
            }
        }
    }

    #[test]
    fn polar3_is_flat() {
        let r = curvature(&MetricChart::polar3(), &[2.0, 0.8, 0.0]).unwrap();
        assert!(r.riemann.max_abs() < 1e-12);
        assert!(r.ricci_scalar.abs() < 1e-12);
        assert_eq!(r.gauss_curvature, None);
        assert_eq!(r.independent_count, 6);
    }
}
