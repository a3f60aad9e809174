//! Coordinate conversions on S² and S³: embeddings, reduced radii and
//! geodesic distances.
//!
//! The reduced radius `r' = R sin(r/R)` is two-to-one on the full sphere, so
//! everything downstream keys on the geodesic radius `r`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::BadRadius(radius))
    }
}

fn check_polar(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=PI).contains(&value) {
        Ok(())
    } else {
        Err(Error::BadAngle { name, value })
    }
}

/// Point of S² or S³ in Cartesian embedding coordinates `(x, y, z[, τ])`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingPoint {
    pub coords: Vec<f64>,
}

impl EmbeddingPoint {
    pub fn norm_squared(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    /// `|x|² - R²`.
    pub fn constraint_residual(&self, radius: f64) -> f64 {
        self.norm_squared() - radius * radius
    }
}

/// Polar/azimuthal angle pair with `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalAngles {
    theta: f64,
    phi: f64,
}

impl SphericalAngles {
    /// Normalizes any finite pair to the canonical ranges. A polar angle past
    /// a pole is reflected back and the azimuth rotated by π, so the point on
    /// the sphere is unchanged.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::BadAngle {
                name: "theta",
                value: theta,
            });
        }
        if !phi.is_finite() {
            return Err(Error::BadAngle {
                name: "phi",
                value: phi,
            });
        }
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        let mut p = p.rem_euclid(TAU);
        if p >= TAU {
            p = 0.0;
        }
        Ok(Self { theta: t, phi: p })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn north_pole() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn south_pole() -> Self {
        Self {
            theta: PI,
            phi: 0.0,
        }
    }

    fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Geodesic radius together with the derived radial coordinates of S³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialCoordinates {
    /// Geodesic distance from the north pole.
    pub r: f64,
    /// Reduced radius `R sin χ`.
    pub r_prime: f64,
    /// Dimensionless `r' / R`.
    pub r_dprime: f64,
    /// Polar angle `χ = r / R`.
    pub chi: f64,
}

impl RadialCoordinates {
    pub fn from_geodesic(r: f64, radius: f64) -> Result<Self> {
        let r_prime = reduced_from_geodesic(r, radius)?;
        Ok(Self {
            r,
            r_prime,
            r_dprime: r_prime / radius,
            chi: r / radius,
        })
    }

    pub fn from_chi(chi: f64, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        check_polar("chi", chi)?;
        Self::from_geodesic(radius * chi, radius)
    }
}

/// S² embedding `(R sinθ cosφ, R sinθ sinφ, R cosθ)`.
pub fn embed_s2(theta: f64, phi: f64, radius: f64) -> Result<EmbeddingPoint> {
    check_radius(radius)?;
    check_polar("theta", theta)?;
    if !phi.is_finite() {
        return Err(Error::BadAngle {
            name: "phi",
            value: phi,
        });
    }
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(EmbeddingPoint {
        coords: vec![radius * st * cp, radius * st * sp, radius * ct],
    })
}

/// S³ embedding with `z = R sinχ cosθ`, `x = R sinχ sinθ cosφ`,
/// `y = R sinχ sinθ sinφ`, `τ = R cosχ`; returned as `(x, y, z, τ)`.
pub fn embed_s3(chi: f64, theta: f64, phi: f64, radius: f64) -> Result<EmbeddingPoint> {
    check_radius(radius)?;
    check_polar("chi", chi)?;
    check_polar("theta", theta)?;
    if !phi.is_finite() {
        return Err(Error::BadAngle {
            name: "phi",
            value: phi,
        });
    }
    let (sc, cc) = chi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(EmbeddingPoint {
        coords: vec![
            radius * sc * st * cp,
            radius * sc * st * sp,
            radius * sc * ct,
            radius * cc,
        ],
    })
}

/// Geodesic radius from the reduced radius, `r = R arcsin(r'/R)`.
/// Only the northern hemisphere is reachable: `r ∈ [0, πR/2]`.
pub fn geodesic_from_reduced(r_prime: f64, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    if !(0.0..=radius).contains(&r_prime) {
        return Err(Error::OutOfRange {
            name: "r_prime",
            value: r_prime,
            lo: 0.0,
            hi: radius,
        });
    }
    Ok(radius * (r_prime / radius).asin())
}

/// Reduced radius `r' = R sin(r/R)` for `r ∈ [0, πR]`.
pub fn reduced_from_geodesic(r: f64, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    if !(0.0..=PI * radius).contains(&r) {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            lo: 0.0,
            hi: PI * radius,
        });
    }
    Ok(radius * (r / radius).sin())
}

/// Great-circle distance on a sphere of radius `R`, in `[0, πR]`.
///
/// Evaluated as `atan2(|a × b|, a · b)`, which equals
/// `arccos(cosθ₁cosθ₂ + sinθ₁sinθ₂cos(φ₁-φ₂))` without its loss of
/// precision for nearly coincident or antipodal points.
pub fn great_circle_distance(p1: SphericalAngles, p2: SphericalAngles, radius: f64) -> f64 {
    let a = p1.unit_vector();
    let b = p2.unit_vector();
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let sin = cross.iter().map(|c| c * c).sum::<f64>().sqrt();
    let cos: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    radius * sin.atan2(cos)
}
