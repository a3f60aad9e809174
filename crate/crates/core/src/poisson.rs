//! Spectral Poisson solver on the 2-sphere.
//!
//! Fields are expanded in orthonormal spherical harmonics `Y_lm`. The
//! Laplace–Beltrami operator acts diagonally with eigenvalue `-l(l+1)/R²`, so
//! `Δφ = -ρ/ε₀` is solved coefficient by coefficient. The `l = 0` mode has
//! eigenvalue zero: a source with a nonzero monopole (nonzero total charge)
//! has no solution, and [`solve_poisson`] rejects it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{Charge, ChargeSystem, Pole};
use crate::geometry::DOMAIN_MARGIN;
use crate::table::{sig12, to_csv};

/// Largest admissible `|c_00|` of a source spectrum.
pub const MONOPOLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Source,
    Potential,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// `c_{l,0}` only.
    Axisymmetric(Vec<Complex64>),
    /// `c_{l,m}` for `m >= 0`, packed at `l(l+1)/2 + m`.
    Full(Vec<Complex64>),
}

/// Coefficients of a real field on a sphere of radius `radius`.
///
/// Only `m >= 0` is stored; `c_{l,-m} = (-1)^m conj(c_{l,m})` is implied, so
/// conjugate symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSpectrum {
    l_max: usize,
    kind: SpectrumKind,
    radius: f64,
    epsilon0: f64,
    storage: Storage,
}

fn packed(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// `Y_l0` at the north pole.
fn y_l0_north(l: usize) -> f64 {
    ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()
}

impl HarmonicSpectrum {
    /// Zero spectrum restricted to `m = 0` modes.
    pub fn axisymmetric(l_max: usize, kind: SpectrumKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::BadRadius(radius));
        }
        Ok(Self {
            l_max,
            kind,
            radius,
            epsilon0: 1.0,
            storage: Storage::Axisymmetric(vec![Complex64::new(0.0, 0.0); l_max + 1]),
        })
    }

    /// Zero spectrum with room for every `(l, m)`.
    pub fn full(l_max: usize, kind: SpectrumKind, radius: f64) -> Result<Self> {
        let mut s = Self::axisymmetric(l_max, kind, radius)?;
        s.promote();
        Ok(s)
    }

    pub fn with_epsilon0(mut self, epsilon0: f64) -> Self {
        self.epsilon0 = epsilon0;
        self
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn epsilon0(&self) -> f64 {
        self.epsilon0
    }

    pub fn is_axisymmetric(&self) -> bool {
        match &self.storage {
            Storage::Axisymmetric(_) => true,
            Storage::Full(c) => (1..=self.l_max)
                .all(|l| (1..=l).all(|m| c[packed(l, m)] == Complex64::new(0.0, 0.0))),
        }
    }

    fn promote(&mut self) {
        if let Storage::Axisymmetric(c) = &self.storage {
            let mut full = vec![Complex64::new(0.0, 0.0); packed(self.l_max, self.l_max) + 1];
            for (l, v) in c.iter().enumerate() {
                full[packed(l, 0)] = *v;
            }
            self.storage = Storage::Full(full);
        }
    }

    fn check_index(&self, l: usize, m: i64) -> Result<()> {
        if l > self.l_max || m.unsigned_abs() as usize > l {
            return Err(Error::BadIndex { l, m });
        }
        Ok(())
    }

    /// `c_{l,m}` for `|m| <= l <= l_max`.
    pub fn get(&self, l: usize, m: i64) -> Result<Complex64> {
        self.check_index(l, m)?;
        let mp = m.unsigned_abs() as usize;
        let stored = match &self.storage {
            Storage::Axisymmetric(c) if mp == 0 => c[l],
            Storage::Axisymmetric(_) => Complex64::new(0.0, 0.0),
            Storage::Full(c) => c[packed(l, mp)],
        };
        Ok(if m >= 0 {
            stored
        } else if mp % 2 == 0 {
            stored.conj()
        } else {
            -stored.conj()
        })
    }

    /// Sets `c_{l,m}` and, through the implied symmetry, `c_{l,-m}`.
    pub fn set(&mut self, l: usize, m: i64, value: Complex64) -> Result<()> {
        self.check_index(l, m)?;
        let mp = m.unsigned_abs() as usize;
        if mp == 0 && value.im != 0.0 {
            return Err(Error::NotReal { l, im: value.im });
        }
        let stored = if m >= 0 {
            value
        } else if mp % 2 == 0 {
            value.conj()
        } else {
            -value.conj()
        };
        if mp != 0 {
            self.promote();
        }
        match &mut self.storage {
            Storage::Axisymmetric(c) => c[l] = stored,
            Storage::Full(c) => c[packed(l, mp)] = stored,
        }
        Ok(())
    }

    /// Real part of `c_{0,0}`.
    pub fn monopole(&self) -> f64 {
        self.get(0, 0).map(|c| c.re).unwrap_or(0.0)
    }

    /// `c_{l,0}` for `l = 0..=l_max`.
    pub fn zonal(&self) -> Vec<f64> {
        (0..=self.l_max)
            .map(|l| self.get(l, 0).map(|c| c.re).unwrap_or(0.0))
            .collect()
    }

    fn map_degrees(&self, kind: SpectrumKind, f: impl Fn(usize) -> f64) -> Self {
        let storage = match &self.storage {
            Storage::Axisymmetric(c) => {
                Storage::Axisymmetric(c.iter().enumerate().map(|(l, v)| v * f(l)).collect())
            }
            Storage::Full(c) => {
                let mut out = c.clone();
                for l in 0..=self.l_max {
                    for m in 0..=l {
                        out[packed(l, m)] *= f(l);
                    }
                }
                Storage::Full(out)
            }
        };
        Self {
            kind,
            storage,
            ..self.clone()
        }
    }

    /// Rows `l,m,re,im` for every `-l <= m <= l`.
    pub fn to_csv(&self) -> String {
        let rows = (0..=self.l_max).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)));
        to_csv(
            &["l", "m", "re", "im"],
            rows.map(|(l, m)| {
                let c = self.get(l, m).expect("index in range");
                vec![l.to_string(), m.to_string(), sig12(c.re), sig12(c.im)]
            }),
        )
    }

    /// Parses the output of [`to_csv`](Self::to_csv). Rows with `m < 0`
    /// must agree with the conjugate of their `m > 0` partner.
    pub fn from_csv(text: &str, kind: SpectrumKind, radius: f64) -> Result<Self> {
        let bad = |line: usize, reason: &str| Error::SpectrumCsv {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "l,m,re,im" => {}
            _ => return Err(bad(1, "expected header `l,m,re,im`")),
        }
        let mut entries = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(bad(i + 1, "expected 4 columns"));
            }
            let l: usize = f[0].parse().map_err(|_| bad(i + 1, "bad l"))?;
            let m: i64 = f[1].parse().map_err(|_| bad(i + 1, "bad m"))?;
            let re: f64 = f[2].parse().map_err(|_| bad(i + 1, "bad re"))?;
            let im: f64 = f[3].parse().map_err(|_| bad(i + 1, "bad im"))?;
            entries.push((i + 1, l, m, Complex64::new(re, im)));
        }
        let l_max = entries.iter().map(|e| e.1).max().unwrap_or(0);
        let mut s = Self::axisymmetric(l_max, kind, radius)?;
        for &(line, l, m, c) in entries.iter().filter(|e| e.2 >= 0) {
            s.set(l, m, c).map_err(|e| bad(line, &e.to_string()))?;
        }
        for &(line, l, m, c) in entries.iter().filter(|e| e.2 < 0) {
            let implied = s.get(l, m).map_err(|e| bad(line, &e.to_string()))?;
            if (implied - c).norm() > 1e-10 * (1.0 + c.norm()) {
                return Err(bad(line, "violates conjugate symmetry"));
            }
        }
        Ok(s)
    }
}

/// Surface-density spectrum of `+q` at the north pole and `-q` at the south
/// pole: `c_l0 = q sqrt((2l+1)/4π) (1 - (-1)^l) / R²`.
pub fn expand_pole_pair(charge: Charge, radius: f64, l_max: usize) -> Result<HarmonicSpectrum> {
    if l_max < 1 {
        return Err(Error::OutOfRange {
            name: "l_max",
            value: l_max as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let mut s = HarmonicSpectrum::axisymmetric(l_max, SpectrumKind::Source, radius)?
        .with_epsilon0(charge.epsilon0);
    let r2 = radius * radius;
    for l in (1..=l_max).step_by(2) {
        s.set(
            l,
            0,
            Complex64::new(2.0 * charge.q * y_l0_north(l) / r2, 0.0),
        )?;
    }
    Ok(s)
}

/// Delta projection of the pole charges of a system, images included.
/// Nothing forces neutrality here; that is [`solve_poisson`]'s job.
pub fn expand_charge_system(
    system: &ChargeSystem,
    radius: f64,
    l_max: usize,
) -> Result<HarmonicSpectrum> {
    let epsilon0 = system
        .all_charges()
        .next()
        .map_or(1.0, |c| c.charge.epsilon0);
    let mut s = HarmonicSpectrum::axisymmetric(l_max, SpectrumKind::Source, radius)?
        .with_epsilon0(epsilon0);
    let r2 = radius * radius;
    for l in 0..=l_max {
        let y = y_l0_north(l);
        let parity = if l % 2 == 0 { 1.0 } else { -1.0 };
        let c: f64 = system
            .all_charges()
            .map(|pc| match pc.pole {
                Pole::North => pc.charge.q * y,
                Pole::South => pc.charge.q * parity * y,
            })
            .sum();
        s.set(l, 0, Complex64::new(c / r2, 0.0))?;
    }
    Ok(s)
}

/// Inverts the Laplace–Beltrami operator: `c^φ_lm = R² c^ρ_lm / (ε₀ l(l+1))`
/// for `l >= 1`, zero-mean gauge for `l = 0`.
pub fn solve_poisson(source: &HarmonicSpectrum) -> Result<HarmonicSpectrum> {
    if source.kind != SpectrumKind::Source {
        return Err(Error::WrongKind { expected: "source" });
    }
    let c00 = source.get(0, 0)?;
    if !(c00.norm() <= MONOPOLE_TOLERANCE) {
        return Err(Error::NonNeutralSource { monopole: c00.re });
    }
    let r2 = source.radius * source.radius;
    let eps = source.epsilon0;
    Ok(source.map_degrees(SpectrumKind::Potential, |l| {
        if l == 0 {
            0.0
        } else {
            r2 / (eps * (l * (l + 1)) as f64)
        }
    }))
}

/// Forward operator `-ε₀ Δ`: maps a potential spectrum back to its source.
pub fn apply_laplacian(potential: &HarmonicSpectrum) -> Result<HarmonicSpectrum> {
    if potential.kind != SpectrumKind::Potential {
        return Err(Error::WrongKind {
            expected: "potential",
        });
    }
    let r2 = potential.radius * potential.radius;
    let eps = potential.epsilon0;
    Ok(potential.map_degrees(SpectrumKind::Source, |l| eps * (l * (l + 1)) as f64 / r2))
}

/// How the truncated zonal series is summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Summation {
    /// Plain partial sum up to `l_max`.
    Truncated,
    /// Partial sum with Lanczos σ-factors `sinc(l / (l_max + 1))`, which damp
    /// the oscillating tail of point-source series.
    #[default]
    Lanczos,
}

impl Summation {
    fn weights(self, l_max: usize) -> Vec<f64> {
        (0..=l_max)
            .map(|l| match self {
                Summation::Truncated => 1.0,
                Summation::Lanczos if l == 0 => 1.0,
                Summation::Lanczos => {
                    let x = PI * l as f64 / (l_max + 1) as f64;
                    x.sin() / x
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Synthesis {
    pub summation: Summation,
    /// Fail with `NotConverged` when `|S_L - S_{L/2}|` exceeds this.
    pub tail_tolerance: Option<f64>,
}

impl Synthesis {
    pub fn truncated() -> Self {
        Self {
            summation: Summation::Truncated,
            tail_tolerance: None,
        }
    }

    fn check_theta(theta: f64) -> Result<()> {
        if theta > DOMAIN_MARGIN && theta < PI - DOMAIN_MARGIN {
            Ok(())
        } else {
            Err(Error::BadAngle {
                name: "theta",
                value: theta,
            })
        }
    }

    /// Sums `Σ w_l c_l term_l(θ)`; returns the sum and its tail estimate.
    fn sum<T>(&self, potential: &HarmonicSpectrum, theta: f64, term: T) -> (f64, f64)
    where
        T: Fn(usize, f64, f64, f64, f64) -> f64,
    {
        let coeffs = potential.zonal();
        let w = self.summation.weights(potential.l_max);
        let (s, x) = (theta.sin(), theta.cos());
        let half = potential.l_max / 2;
        let (mut total, mut at_half) = (0.0, 0.0);
        let (mut p_prev, mut p) = (0.0, 1.0);
        for l in 0..=potential.l_max {
            let c = coeffs[l];
            if c != 0.0 {
                total += w[l] * c * y_l0_north(l) * term(l, x, s, p, p_prev);
            }
            if l == half {
                at_half = total;
            }
            let next = ((2 * l + 1) as f64 * x * p - l as f64 * p_prev) / (l + 1) as f64;
            p_prev = p;
            p = next;
        }
        (total, (total - at_half).abs())
    }

    fn evaluate<T>(&self, potential: &HarmonicSpectrum, thetas: &[f64], term: T) -> Result<Vec<f64>>
    where
        T: Fn(usize, f64, f64, f64, f64) -> f64 + Copy,
    {
        if potential.kind != SpectrumKind::Potential {
            return Err(Error::WrongKind {
                expected: "potential",
            });
        }
        thetas
            .iter()
            .map(|&theta| {
                Self::check_theta(theta)?;
                let (v, tail) = self.sum(potential, theta, term);
                match self.tail_tolerance {
                    Some(tol) if tail > tol => Err(Error::NotConverged {
                        tail,
                        tolerance: tol,
                    }),
                    _ => Ok(v),
                }
            })
            .collect()
    }

    /// Azimuthal mean of the potential, `Σ c_l0 Y_l0(θ)`.
    pub fn potential(&self, potential: &HarmonicSpectrum, thetas: &[f64]) -> Result<Vec<f64>> {
        self.evaluate(potential, thetas, |_, _, _, p, _| p)
    }

    /// θ̂ component of `E = -∇φ`, i.e. `-(1/R) ∂_θ φ`.
    pub fn field_theta(&self, potential: &HarmonicSpectrum, thetas: &[f64]) -> Result<Vec<f64>> {
        let inv_r = 1.0 / potential.radius;
        // ∂_θ P_l(cosθ) = -l (P_{l-1} - cosθ P_l) / sinθ
        self.evaluate(potential, thetas, move |l, x, s, p, p_prev| {
            if l == 0 {
                0.0
            } else {
                inv_r * l as f64 * (p_prev - x * p) / s
            }
        })
    }
}

/// [`Synthesis::potential`] with default options.
pub fn eval_theta_profile(potential: &HarmonicSpectrum, thetas: &[f64]) -> Result<Vec<f64>> {
    Synthesis::default().potential(potential, thetas)
}

/// [`Synthesis::field_theta`] with default options.
pub fn eval_field_theta(potential: &HarmonicSpectrum, thetas: &[f64]) -> Result<Vec<f64>> {
    Synthesis::default().field_theta(potential, thetas)
}
