//! Electric field laws in flat space and on closed spheres, plus the
//! antipodal-image bookkeeping that keeps a closed space neutral.
//!
//! Radial components are signed: positive `q` gives a field pointing away
//! from the north-pole charge.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{MetricChart, DOMAIN_MARGIN};

/// A charge together with the permittivity it is measured against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Charge {
    pub q: f64,
    pub epsilon0: f64,
}

impl Charge {
    /// Charge `q` with `ε₀ = 1`.
    pub fn new(q: f64) -> Self {
        Self { q, epsilon0: 1.0 }
    }

    pub fn with_permittivity(q: f64, epsilon0: f64) -> Self {
        Self { q, epsilon0 }
    }

    /// Charge for which `q / (2π ε₀)` equals `scale` (ε₀ = 1).
    pub fn from_scale_2d(scale: f64) -> Self {
        Self::new(2.0 * PI * scale)
    }

    /// Charge for which `q / (4π ε₀)` equals `scale` (ε₀ = 1).
    pub fn from_scale_3d(scale: f64) -> Self {
        Self::new(4.0 * PI * scale)
    }

    /// Total flux `q / ε₀` through any surface enclosing the charge.
    pub fn flux(&self) -> f64 {
        self.q / self.epsilon0
    }

    pub fn scale_2d(&self) -> f64 {
        self.q / (2.0 * PI * self.epsilon0)
    }

    pub fn scale_3d(&self) -> f64 {
        self.q / (4.0 * PI * self.epsilon0)
    }

    fn validate(&self) -> Result<()> {
        if self.q.is_finite() && self.q != 0.0 {
            Ok(())
        } else {
            Err(Error::BadCharge(self.q))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pole {
    North,
    South,
}

impl Pole {
    pub fn antipode(self) -> Self {
        match self {
            Pole::North => Pole::South,
            Pole::South => Pole::North,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCharge {
    pub charge: Charge,
    pub pole: Pole,
    pub chart: String,
}

/// Unit vector a sample's radial component refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Flat-space `r̂`.
    Radial,
    /// `θ̂` on S².
    Theta,
    /// `χ̂` on S³.
    Chi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    pub r: f64,
    /// Signed component along `direction`.
    pub radial: f64,
    pub direction: Direction,
    pub chart: String,
}

impl FieldSample {
    pub fn magnitude(&self) -> f64 {
        self.radial.abs()
    }
}

fn check_distance(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::ZeroDistance(r))
    }
}

fn check_sphere(r: f64, radius: f64, margin: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::BadRadius(radius));
    }
    let chi = r / radius;
    if !(chi > margin && chi < PI - margin) {
        return Err(Error::PoleSingularity { r, radius });
    }
    Ok(chi)
}

/// `q / (2π ε₀ r)`.
pub fn field_flat_2d(charge: Charge, r: f64) -> Result<f64> {
    check_distance(r)?;
    Ok(charge.scale_2d() / r)
}

/// `q / (4π ε₀ r²)`.
pub fn field_flat_3d(charge: Charge, r: f64) -> Result<f64> {
    check_distance(r)?;
    Ok(charge.scale_3d() / (r * r))
}

/// Field of a north-pole charge (with its south-pole image) on S² at
/// geodesic distance `r`: `q / (2π ε₀ R sin(r/R))`.
///
/// Fails within [`DOMAIN_MARGIN`] radians of either pole.
pub fn field_sphere2(charge: Charge, r: f64, radius: f64) -> Result<f64> {
    field_sphere2_within(charge, r, radius, DOMAIN_MARGIN)
}

/// [`field_sphere2`] with an explicit pole margin (radians of `r/R`).
pub fn field_sphere2_within(charge: Charge, r: f64, radius: f64, margin: f64) -> Result<f64> {
    let chi = check_sphere(r, radius, margin)?;
    Ok(charge.scale_2d() / (radius * chi.sin()))
}

/// Field on S³: `q / (4π ε₀ R² sin²(r/R))`.
pub fn field_sphere3(charge: Charge, r: f64, radius: f64) -> Result<f64> {
    field_sphere3_within(charge, r, radius, DOMAIN_MARGIN)
}

/// [`field_sphere3`] with an explicit pole margin.
pub fn field_sphere3_within(charge: Charge, r: f64, radius: f64, margin: f64) -> Result<f64> {
    let chi = check_sphere(r, radius, margin)?;
    let s = chi.sin();
    Ok(charge.scale_3d() / (radius * radius * s * s))
}

/// Potential on S² whose negative geodesic-radial derivative is
/// [`field_sphere2`]: `-(q / 2π ε₀) ln tan(r / 2R)`. Zero on the equator.
pub fn potential_sphere2(charge: Charge, r: f64, radius: f64) -> Result<f64> {
    let chi = check_sphere(r, radius, DOMAIN_MARGIN)?;
    Ok(-charge.scale_2d() * (0.5 * chi).tan().ln())
}

/// The four radial field laws, selectable at run time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldLaw {
    Flat2,
    Flat3,
    Sphere2 { radius: f64 },
    Sphere3 { radius: f64 },
}

impl FieldLaw {
    pub fn eval(&self, charge: Charge, r: f64) -> Result<f64> {
        match *self {
            FieldLaw::Flat2 => field_flat_2d(charge, r),
            FieldLaw::Flat3 => field_flat_3d(charge, r),
            FieldLaw::Sphere2 { radius } => field_sphere2(charge, r, radius),
            FieldLaw::Sphere3 { radius } => field_sphere3(charge, r, radius),
        }
    }

    pub fn chart_id(&self) -> String {
        match *self {
            FieldLaw::Flat2 => "flat2".into(),
            FieldLaw::Flat3 => "flat3".into(),
            FieldLaw::Sphere2 { radius } => format!("sphere2:{radius}"),
            FieldLaw::Sphere3 { radius } => format!("sphere3:{radius}"),
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            FieldLaw::Flat2 | FieldLaw::Flat3 => Direction::Radial,
            FieldLaw::Sphere2 { .. } => Direction::Theta,
            FieldLaw::Sphere3 { .. } => Direction::Chi,
        }
    }

    pub fn sample(&self, charge: Charge, r: f64) -> Result<FieldSample> {
        Ok(FieldSample {
            r,
            radial: self.eval(charge, r)?,
            direction: self.direction(),
            chart: self.chart_id(),
        })
    }

    /// The law that applies on a built-in chart, if any.
    pub fn for_chart(chart: &MetricChart) -> Option<Self> {
        use crate::geometry::ChartKind;
        match chart.kind() {
            ChartKind::Flat if chart.dimension() == 2 => Some(FieldLaw::Flat2),
            ChartKind::Flat if chart.dimension() == 3 => Some(FieldLaw::Flat3),
            ChartKind::Polar3 => Some(FieldLaw::Flat3),
            ChartKind::Sphere2 { radius } => Some(FieldLaw::Sphere2 { radius }),
            ChartKind::Sphere3 { radius } | ChartKind::Frw { radius, k: 1 } => {
                Some(FieldLaw::Sphere3 { radius })
            }
            _ => None,
        }
    }
}

/// Pole charges on one closed chart, with the images forced by closure.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeSystem {
    chart: String,
    charges: Vec<PointCharge>,
    implied_images: Vec<PointCharge>,
}

impl ChargeSystem {
    pub fn new(chart: &MetricChart) -> Result<Self> {
        if !chart.is_closed() {
            return Err(Error::NotClosed(chart.id().to_string()));
        }
        Ok(Self {
            chart: chart.id().to_string(),
            charges: Vec::new(),
            implied_images: Vec::new(),
        })
    }

    pub fn with_charge(mut self, pole: Pole, charge: Charge) -> Result<Self> {
        charge.validate()?;
        self.charges.push(PointCharge {
            charge,
            pole,
            chart: self.chart.clone(),
        });
        Ok(self)
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn charges(&self) -> &[PointCharge] {
        &self.charges
    }

    pub fn implied_images(&self) -> &[PointCharge] {
        &self.implied_images
    }

    pub fn all_charges(&self) -> impl Iterator<Item = &PointCharge> {
        self.charges.iter().chain(&self.implied_images)
    }

    /// Net charge sitting at `pole`, images included.
    pub fn pole_total(&self, pole: Pole) -> f64 {
        self.all_charges()
            .filter(|c| c.pole == pole)
            .map(|c| c.charge.q)
            .sum()
    }

    /// Sum over both poles; exactly zero after [`assert_neutral`].
    pub fn total_charge(&self) -> f64 {
        self.pole_total(Pole::North) + self.pole_total(Pole::South)
    }
}

/// Completes a closed-space charge system with antipodal images of opposite
/// sign so that the total charge vanishes.
pub fn assert_neutral(system: &ChargeSystem) -> Result<ChargeSystem> {
    let declared_at = |pole: Pole| system.charges.iter().filter(move |c| c.pole == pole);
    let has_north = declared_at(Pole::North).next().is_some();
    let has_south = declared_at(Pole::South).next().is_some();
    let north: f64 = declared_at(Pole::North).map(|c| c.charge.q).sum();
    let south: f64 = declared_at(Pole::South).map(|c| c.charge.q).sum();

    let mut out = ChargeSystem {
        chart: system.chart.clone(),
        charges: system.charges.clone(),
        implied_images: Vec::new(),
    };
    let image = |pole: Pole, q: f64| {
        let epsilon0 = declared_at(pole.antipode())
            .next()
            .map_or(1.0, |c| c.charge.epsilon0);
        PointCharge {
            charge: Charge::with_permittivity(-q, epsilon0),
            pole,
            chart: system.chart.clone(),
        }
    };
    match (has_north, has_south) {
        (false, false) => {}
        (true, false) if north != 0.0 => out.implied_images.push(image(Pole::South, north)),
        (false, true) if south != 0.0 => out.implied_images.push(image(Pole::North, south)),
        _ => {
            if north + south != 0.0 {
                return Err(Error::NonNeutralizable(format!(
                    "north carries {north}, south carries {south}; their images would conflict"
                )));
            }
        }
    }
    Ok(out)
}
