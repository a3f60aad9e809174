//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Results cross the boundary as flat `Float64Array`s; the page knows the
//! row width of each one. The pure functions in [`compute`] carry the logic
//! so they can be tested natively.

use wasm_bindgen::prelude::*;

pub mod compute {
    use std::f64::consts::PI;

    use closed_coulomb::fields::{field_flat_3d, field_sphere2, field_sphere3, Charge};
    use closed_coulomb::geometry::{DerivativeEngine, MetricChart};
    use closed_coulomb::poisson::{expand_pole_pair, solve_poisson, Summation, Synthesis};

    fn err(e: closed_coulomb::Error) -> String {
        e.to_string()
    }

    /// Rows of `[r, E_S³, E_flat]` over `[0.01πR, 0.99πR]` with `q/(4πε₀) = 1`.
    pub fn field_curves(radius: f64, n: usize) -> Result<Vec<f64>, String> {
        if n < 2 {
            return Err(format!("need at least 2 points, got {n}"));
        }
        let q = Charge::from_scale_3d(1.0);
        let (lo, hi) = (0.01 * PI * radius, 0.99 * PI * radius);
        let mut out = Vec::with_capacity(3 * n);
        for i in 0..n {
            let r = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            out.extend([
                r,
                field_sphere3(q, r, radius).map_err(err)?,
                field_flat_3d(q, r).map_err(err)?,
            ]);
        }
        Ok(out)
    }

    /// `[K, Γ^θ_φφ, Γ^φ_θφ, R_θφθφ, Ricci scalar]` on the 2-sphere at θ.
    pub fn sphere2_curvature(
        radius: f64,
        theta: f64,
        finite_difference: bool,
    ) -> Result<Vec<f64>, String> {
        let chart = MetricChart::sphere2(radius).map_err(err)?;
        let engine = if finite_difference {
            DerivativeEngine::finite_difference()
        } else {
            DerivativeEngine::default()
        };
        let r = engine.curvature(&chart, &[theta, 0.0]).map_err(err)?;
        Ok(vec![
            r.gauss_curvature.unwrap_or(f64::NAN),
            r.gamma_second[(0, 1, 1)],
            r.gamma_second[(1, 0, 1)],
            r.riemann_lowered[(0, 1, 0, 1)],
            r.ricci_scalar,
        ])
    }

    /// Rows of `[θ, E_spectral, E_closed]` for a ± pole pair on the unit
    /// 2-sphere, θ over `[0.05, π - 0.05]`.
    pub fn spectral_profile(l_max: usize, n: usize, damped: bool) -> Result<Vec<f64>, String> {
        if n < 2 {
            return Err(format!("need at least 2 points, got {n}"));
        }
        let q = Charge::from_scale_2d(1.0);
        let pot = solve_poisson(&expand_pole_pair(q, 1.0, l_max).map_err(err)?).map_err(err)?;
        let synthesis = Synthesis {
            summation: if damped {
                Summation::Lanczos
            } else {
                Summation::Truncated
            },
            tail_tolerance: None,
        };
        let thetas: Vec<f64> = (0..n)
            .map(|i| 0.05 + (PI - 0.1) * i as f64 / (n - 1) as f64)
            .collect();
        let spectral = synthesis.field_theta(&pot, &thetas).map_err(err)?;
        let mut out = Vec::with_capacity(3 * n);
        for (&t, e) in thetas.iter().zip(spectral) {
            out.extend([t, e, field_sphere2(q, t, 1.0).map_err(err)?]);
        }
        Ok(out)
    }
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fieldCurves)]
pub fn field_curves(radius: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(compute::field_curves(radius, n))
}

#[wasm_bindgen(js_name = sphere2Curvature)]
pub fn sphere2_curvature(
    radius: f64,
    theta: f64,
    finite_difference: bool,
) -> Result<Vec<f64>, JsError> {
    js(compute::sphere2_curvature(radius, theta, finite_difference))
}

#[wasm_bindgen(js_name = spectralProfile)]
pub fn spectral_profile(l_max: usize, n: usize, damped: bool) -> Result<Vec<f64>, JsError> {
    js(compute::spectral_profile(l_max, n, damped))
}
