//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! its measured figure; the process fails if any criterion does.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::path::Path;
use std::process::{Command, ExitCode};

use closed_coulomb::fields::{field_flat_2d, field_sphere2, field_sphere2_within, Charge};
use closed_coulomb::gauss::flux_invariance_scan;
use closed_coulomb::geodesy::{geodesic_from_reduced, reduced_from_geodesic};
use closed_coulomb::geometry::{independent_component_count, DerivativeEngine, MetricChart};
use closed_coulomb::poisson::{
    expand_pole_pair, solve_poisson, HarmonicSpectrum, SpectrumKind, Synthesis,
};
use closed_coulomb::table::sig12;
use closed_coulomb::Error;
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn interior_theta(rng: &mut StdRng) -> f64 {
    rng.gen_range(0.1..PI - 0.1)
}

fn c1_gauss_curvature(rng: &mut StdRng) -> Outcome {
    let fd = DerivativeEngine::finite_difference();
    let mut worst = 0.0f64;
    for radius in [0.5, 1.0, 3.0] {
        let chart = MetricChart::sphere2(radius).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let p = [interior_theta(rng), rng.gen_range(0.0..2.0 * PI)];
            let k = fd.gauss_curvature(&chart, &p).map_err(|e| e.to_string())?;
            worst = worst.max((k - 1.0 / (radius * radius)).abs());
        }
    }
    check(
        worst <= 1e-6,
        format!("max |K - 1/R²| = {worst:.2e} (tol 1e-6)"),
    )
}

fn c2_christoffel(rng: &mut StdRng) -> Outcome {
    let fd = DerivativeEngine::finite_difference();
    let chart = MetricChart::sphere2(1.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let t = interior_theta(rng);
        let (s, c) = t.sin_cos();
        let g = fd
            .christoffel_second(&chart, &[t, 0.4])
            .map_err(|e| e.to_string())?;
        // (i, j, k) over (θ, φ)
        let table = [
            ((0, 0, 0), 0.0),
            ((0, 0, 1), 0.0),
            ((0, 1, 0), 0.0),
            ((0, 1, 1), -s * c),
            ((1, 0, 0), 0.0),
            ((1, 0, 1), c / s),
            ((1, 1, 0), c / s),
            ((1, 1, 1), 0.0),
        ];
        for (ix, v) in table {
            worst = worst.max((g[ix] - v).abs());
        }
    }
    check(
        worst <= 1e-8,
        format!("max |Γ - closed form| = {worst:.2e} over 8 components (tol 1e-8)"),
    )
}

fn c3_riemann(rng: &mut StdRng) -> Outcome {
    let fd = DerivativeEngine::finite_difference();
    let mut table = 0.0f64;
    for radius in [0.5, 1.0, 3.0] {
        let chart = MetricChart::sphere2(radius).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let t = interior_theta(rng);
            let r = fd.curvature(&chart, &[t, 1.0]).map_err(|e| e.to_string())?;
            table = table.max((r.riemann_lowered[(0, 1, 0, 1)] - (radius * t.sin()).powi(2)).abs());
        }
    }

    let mut sym = 0.0f64;
    for id in ["sphere2:1", "sphere3:2", "frw:1:1", "frw:2:-1", "polar3"] {
        let chart = MetricChart::from_id(id).map_err(|e| e.to_string())?;
        let d = chart.dimension();
        for _ in 0..5 {
            let p: Vec<f64> = chart
                .domain()
                .iter()
                .map(|iv| {
                    let lo = if iv.lo.is_finite() { iv.lo + 0.1 } else { -2.0 };
                    let hi = if iv.hi.is_finite() {
                        iv.hi - 0.1
                    } else {
                        lo + 3.0
                    };
                    rng.gen_range(lo..hi)
                })
                .collect();
            let r = fd.curvature(&chart, &p).map_err(|e| e.to_string())?;
            let t = &r.riemann_lowered;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let v = t[(i, j, k, l)];
                            sym = sym
                                .max((v + t[(j, i, k, l)]).abs())
                                .max((v + t[(i, j, l, k)]).abs())
                                .max((v - t[(k, l, i, j)]).abs());
                        }
                        // first Bianchi identity
                        let b = (0..d)
                            .map(|l| t[(i, j, k, l)] + t[(i, k, l, j)] + t[(i, l, j, k)])
                            .fold(0.0f64, |m, x| m.max(x.abs()));
                        sym = sym.max(b);
                    }
                }
            }
        }
    }

    let mut flat = 0.0f64;
    for id in ["flat2", "flat3"] {
        let chart = MetricChart::from_id(id).map_err(|e| e.to_string())?;
        let p = vec![0.3; chart.dimension()];
        let r = fd.curvature(&chart, &p).map_err(|e| e.to_string())?;
        flat = flat
            .max(r.riemann.max_abs())
            .max(r.ricci.max_abs())
            .max(r.ricci_scalar.abs());
    }
    check(
        table <= 1e-6 && sym <= 1e-8 && flat <= 1e-9,
        format!(
            "R_θφθφ err {table:.2e} (tol 1e-6), symmetry err {sym:.2e} (tol 1e-8), flat max {flat:.2e} (tol 1e-9)"
        ),
    )
}

fn c4_component_count() -> Outcome {
    let (two, four) = (
        independent_component_count(2),
        independent_component_count(4),
    );
    check(two == 1 && four == 20, format!("d=2 → {two}, d=4 → {four}"))
}

fn c5_flux() -> Outcome {
    let params: Vec<f64> = (0..50)
        .map(|n| 0.05 + (PI - 0.1) * n as f64 / 49.0)
        .collect();
    let mut worst = 0.0f64;
    for (id, charge) in [
        ("sphere2:1", Charge::new(1.0)),
        ("sphere2:3", Charge::with_permittivity(2.5, 0.7)),
        ("sphere3:1", Charge::new(1.0)),
        ("sphere3:0.5", Charge::with_permittivity(-1.5, 2.0)),
    ] {
        let chart = MetricChart::from_id(id).map_err(|e| e.to_string())?;
        let report = flux_invariance_scan(&chart, charge, &params).map_err(|e| e.to_string())?;
        if report.rows.len() != 50 {
            return Err(format!("{id}: {} contours", report.rows.len()));
        }
        worst = worst.max(report.max_relative_deviation());
    }
    check(
        worst <= 1e-8,
        format!("max relative flux deviation {worst:.2e} over 4×50 contours (tol 1e-8)"),
    )
}

fn read_profile(path: &Path) -> Result<Vec<(f64, f64, f64, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some("r,E_modified,E_coulomb") {
        return Err(format!("{}: bad header", path.display()));
    }
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            let num = |i: usize| cells[i].parse::<f64>().map_err(|e| e.to_string());
            Ok((num(0)?, num(1)?, num(2)?, cells[1].to_string()))
        })
        .collect()
}

fn run_figure3(dir: &Path, extra: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_closed-coulomb"))
        .args(["figure3", "--radius", "0.5,1,3", "--out"])
        .arg(dir)
        .args(extra)
        .status()
        .map_err(|e| e.to_string())?;
    check(status.success(), format!("figure3 exited with {status}")).map(|_| ())
}

fn c6_figure3() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let main = tmp.path().join("default");
    let near = tmp.path().join("near-pole");
    std::fs::create_dir_all(&main).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&near).map_err(|e| e.to_string())?;
    run_figure3(&main, &[])?;
    // The default grid starts at 0.01·πR; resolve r ≤ 0.01·R separately.
    run_figure3(
        &near,
        &[
            "--r-min-frac",
            "1e-4",
            "--r-max-frac",
            "0.01",
            "--grid-n",
            "50",
        ],
    )?;

    let (lo, hi) = (0.3, 1.2);
    let mut gaps = Vec::new();
    let mut notes = Vec::new();
    let mut ok = true;
    for radius in [0.5, 1.0, 3.0] {
        let name = format!("figure3_R{radius}.csv");
        let rows = read_profile(&main.join(&name))?;
        let near_rows = read_profile(&near.join(&name))?;

        let dominated = rows.iter().chain(&near_rows).all(|&(_, m, c, _)| m >= c);

        let small: Vec<_> = near_rows.iter().filter(|r| r.0 <= 0.01 * radius).collect();
        let ratio_err = small
            .iter()
            .fold(0.0f64, |m, r| m.max((r.1 / r.2 - 1.0).abs()));
        let flat_limit = !small.is_empty() && ratio_err <= 1e-3;

        let equator = rows
            .iter()
            .find(|r| (r.0 - 0.5 * PI * radius).abs() <= 1e-11 * radius)
            .map(|r| r.3.clone());
        let exact = equator.as_deref() == Some(sig12(1.0 / (radius * radius)).as_str());

        let gap = rows
            .iter()
            .filter(|r| r.0 >= lo && r.0 <= hi)
            .fold(0.0f64, |m, r| m.max(r.1 / r.2 - 1.0));
        gaps.push(gap);

        ok &= dominated && flat_limit && exact;
        notes.push(format!(
            "R={radius}: (a) {} (b) {} rows, max |ratio-1| {ratio_err:.1e} (c) E(πR/2)={}",
            if dominated { "ok" } else { "VIOLATED" },
            small.len(),
            equator.unwrap_or_else(|| "missing".into()),
        ));
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
    ok &= shrinking;
    notes.push(format!(
        "(d) max gap on r∈[{lo},{hi}]: {}",
        gaps.iter()
            .map(|g| format!("{g:.3e}"))
            .collect::<Vec<_>>()
            .join(" > ")
    ));
    check(ok, notes.join("; "))
}

fn c7_neutrality(rng: &mut StdRng) -> Outcome {
    let mut rejected = 0;
    for _ in 0..100 {
        let l_max = rng.gen_range(1..12);
        let mut s = HarmonicSpectrum::full(l_max, SpectrumKind::Source, rng.gen_range(0.1..10.0))
            .map_err(|e| e.to_string())?;
        let magnitude = 10f64.powf(rng.gen_range(-11.5..2.0));
        let monopole = if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        };
        s.set(0, 0, Complex64::new(monopole, 0.0))
            .map_err(|e| e.to_string())?;
        for l in 1..=l_max {
            s.set(l, 0, Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                .map_err(|e| e.to_string())?;
            for m in 1..=l as i64 {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                s.set(l, m, c).map_err(|e| e.to_string())?;
            }
        }
        match solve_poisson(&s) {
            Err(Error::NonNeutralSource { .. }) => rejected += 1,
            other => return Err(format!("monopole {monopole:e} not rejected: {other:?}")),
        }
    }
    let pair = expand_pole_pair(Charge::new(1.0), 1.0, 512).map_err(|e| e.to_string())?;
    let exact_zero = pair.monopole() == 0.0 && solve_poisson(&pair).is_ok();
    check(
        rejected == 100 && exact_zero,
        format!(
            "{rejected}/100 non-neutral spectra rejected; pole-pair monopole = {:e}",
            pair.monopole()
        ),
    )
}

fn spectral_error(l_max: usize, synthesis: Synthesis) -> Result<f64, String> {
    let radius = 1.0;
    let q = Charge::from_scale_2d(1.0);
    let pot = solve_poisson(&expand_pole_pair(q, radius, l_max).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let thetas: Vec<f64> = (0..=400)
        .map(|n| PI / 4.0 + PI / 2.0 * n as f64 / 400.0)
        .collect();
    let e = synthesis
        .field_theta(&pot, &thetas)
        .map_err(|e| e.to_string())?;
    thetas.iter().zip(e).try_fold(0.0f64, |m, (&t, v)| {
        let exact = field_sphere2(q, radius * t, radius).map_err(|e| e.to_string())?;
        Ok(m.max(((v - exact) / exact).abs()))
    })
}

fn c8_spectral() -> Outcome {
    let ls = [64, 128, 256, 512];
    let errs = ls
        .iter()
        .map(|&l| spectral_error(l, Synthesis::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let raw = ls
        .iter()
        .map(|&l| spectral_error(l, Synthesis::truncated()))
        .collect::<Result<Vec<_>, _>>()?;
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|e| format!("{e:.2e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    check(
        errs[3] <= 0.01 && errs.windows(2).all(|w| w[1] < w[0]),
        format!(
            "σ-summed max rel err at l_max 64/128/256/512: {} (tol 1e-2 at 512, monotone); plain partial sums: {}",
            fmt(&errs),
            fmt(&raw)
        ),
    )
}

fn c9_geodesy(rng: &mut StdRng) -> Outcome {
    let mut trip = 0.0f64;
    let mut quad = 0.0f64;
    let rule = GaussLegendre::new(NonZeroUsize::new(40).unwrap());
    for _ in 0..200 {
        let radius = 10f64.powf(rng.gen_range(-1.0..2.0));
        let r = rng.gen_range(0.0..=0.5 * PI * radius);
        let back = geodesic_from_reduced(
            reduced_from_geodesic(r, radius).map_err(|e| e.to_string())?,
            radius,
        )
        .map_err(|e| e.to_string())?;
        trip = trip.max((back - r).abs() / radius.max(1.0));

        // ∫₀^{r'} dx / sqrt(1 - x²/R²), panels graded toward the r' = R end
        let r_prime = rng.gen_range(0.0..0.999) * radius;
        let panels = 64;
        let integral: f64 = (0..panels)
            .map(|k| {
                let a = r_prime * (k as f64 / panels as f64);
                let b = r_prime * ((k + 1) as f64 / panels as f64);
                rule.integrate(a, b, |x| 1.0 / (1.0 - (x / radius).powi(2)).sqrt())
            })
            .sum();
        let closed = radius * (r_prime / radius).asin();
        quad = quad.max((integral - closed).abs() / radius.max(1.0));
    }
    check(
        trip <= 1e-10 && quad <= 1e-9,
        format!("round trip err {trip:.2e} (tol 1e-10), quadrature err {quad:.2e} (tol 1e-9)"),
    )
}

fn c10_series() -> Outcome {
    let q = Charge::from_scale_2d(1.0);
    let mut notes = Vec::new();
    let mut ok = true;
    for radius in [0.5, 1.0, 3.0] {
        let xs: Vec<f64> = (0..=20)
            .map(|k| 10f64.powf(-4.0 + 2.0 * k as f64 / 20.0))
            .collect();
        let ys = xs
            .iter()
            .map(|&x| {
                let r = x * radius;
                Ok(field_sphere2_within(q, r, radius, 1e-9)? / field_flat_2d(q, r)? - 1.0)
            })
            .collect::<Result<Vec<f64>, Error>>()
            .map_err(|e| e.to_string())?;
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
        let n = lx.len() as f64;
        let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
        let p = sxy / sxx;
        let c = (my - p * mx).exp();
        ok &= (p - 2.0).abs() <= 0.05 && (c * 6.0 - 1.0).abs() <= 0.02;
        notes.push(format!("R={radius}: exponent {p:.4}, coefficient {c:.5}"));
    }
    check(
        ok,
        format!("{} (targets 2 ± 0.05, 1/6 ± 2%)", notes.join("; ")),
    )
}

fn main() -> ExitCode {
    let mut rng = StdRng::seed_from_u64(0x5eed_c0de_u64);
    let criteria: Vec<(&str, Outcome)> = vec![
        (
            "1 finite-difference Gauss curvature",
            c1_gauss_curvature(&mut rng),
        ),
        ("2 Christoffel closed forms", c2_christoffel(&mut rng)),
        (
            "3 Riemann component, symmetries, flat charts",
            c3_riemann(&mut rng),
        ),
        ("4 independent component count", c4_component_count()),
        ("5 Gauss flux invariance", c5_flux()),
        ("6 three-radius field comparison CSVs", c6_figure3()),
        ("7 neutrality gate", c7_neutrality(&mut rng)),
        ("8 spectral solver vs closed form", c8_spectral()),
        ("9 reduced-radius geodesy", c9_geodesy(&mut rng)),
        ("10 flat-limit series", c10_series()),
    ];
    let mut failed = 0;
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
