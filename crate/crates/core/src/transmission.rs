//! Sampled complex transmission of a plate in the thin-element model.
//!
//! Radial profiles sample ring centres `r_i = (i + 1/2) s`; lateral profiles
//! sample cell centres of a grid symmetric about `x = 0`. Each cell takes the
//! value of the half-zone containing its centre. Beyond the aperture the
//! plate is opaque.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::geometry::{CompoundZonePlate, GeometryKind, Region};
use crate::materials::OpticalConstants;

/// Fewest samples allowed across the narrowest half-zone.
pub const MIN_SAMPLES_PER_ZONE: f64 = 4.0;

/// Default samples across the narrowest half-zone.
pub const DEFAULT_SAMPLES_PER_ZONE: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Radial,
    Lateral,
}

impl From<GeometryKind> for ProfileKind {
    fn from(kind: GeometryKind) -> Self {
        match kind {
            GeometryKind::Circular => ProfileKind::Radial,
            GeometryKind::Linear => ProfileKind::Lateral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// Grid spacing; `None` picks `min zone width / DEFAULT_SAMPLES_PER_ZONE`.
    pub spacing: Option<f64>,
    /// Samples required across the narrowest half-zone.
    pub oversample_guard: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            spacing: None,
            oversample_guard: MIN_SAMPLES_PER_ZONE,
        }
    }
}

impl SamplingOptions {
    pub fn with_spacing(spacing: f64) -> Self {
        Self {
            spacing: Some(spacing),
            ..Self::default()
        }
    }

    fn resolve(&self, plate: &CompoundZonePlate) -> Result<f64> {
        let min_width = plate.min_zone_width();
        let guard = ensure_positive("oversample guard", self.oversample_guard)?;
        let required = min_width / guard;
        let spacing = match self.spacing {
            Some(s) => ensure_positive("profile spacing", s)?,
            None => min_width / DEFAULT_SAMPLES_PER_ZONE.max(guard),
        };
        if spacing > required * (1.0 + 1e-12) {
            return Err(Error::Sampling {
                what: "transmission profile (narrowest half-zone)",
                given: spacing,
                required,
            });
        }
        Ok(spacing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionProfile {
    kind: ProfileKind,
    spacing: f64,
    half_count: usize,
    aperture_radius: f64,
    wavelength: f64,
    energy_ev: Option<f64>,
    membrane_intensity: f64,
    samples: Vec<Complex64>,
    description: String,
}

impl TransmissionProfile {
    /// Samples `f(position)` on the grid for `kind`; zero beyond the aperture.
    pub fn from_fn<F>(
        kind: ProfileKind,
        spacing: f64,
        aperture_radius: f64,
        wavelength: f64,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        ensure_positive("profile spacing", spacing)?;
        ensure_positive("aperture radius", aperture_radius)?;
        ensure_positive("wavelength", wavelength)?;
        let half = (aperture_radius / spacing).ceil() as usize;
        let len = match kind {
            ProfileKind::Radial => half,
            ProfileKind::Lateral => 2 * half,
        };
        let mut profile = Self {
            kind,
            spacing,
            half_count: half,
            aperture_radius,
            wavelength,
            energy_ev: None,
            membrane_intensity: 1.0,
            samples: Vec::new(),
            description: String::new(),
        };
        profile.samples = (0..len)
            .into_par_iter()
            .map(|i| {
                let x = profile.position(i);
                if x.abs() > aperture_radius {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(x)
                }
            })
            .collect();
        Ok(profile)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn aperture_radius(&self) -> f64 {
        self.aperture_radius
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn energy_ev(&self) -> Option<f64> {
        self.energy_ev
    }

    /// Intensity transmission of the uniform membrane under the relief.
    pub fn membrane_intensity(&self) -> f64 {
        self.membrane_intensity
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Centre of cell `i` (radius, or signed lateral coordinate).
    pub fn position(&self, i: usize) -> f64 {
        let offset = match self.kind {
            ProfileKind::Radial => 0.0,
            ProfileKind::Lateral => self.half_count as f64,
        };
        (i as f64 + 0.5 - offset) * self.spacing
    }

    /// Cell `i` clipped to the aperture.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let c = self.position(i);
        let r = self.aperture_radius;
        let lo = (c - 0.5 * self.spacing).clamp(-r, r);
        let hi = (c + 0.5 * self.spacing).clamp(-r, r);
        match self.kind {
            ProfileKind::Radial => (lo.max(0.0), hi.max(0.0)),
            ProfileKind::Lateral => (lo, hi),
        }
    }

    /// Area of ring `i` (radial) or width of cell `i` (lateral).
    pub fn cell_measure(&self, i: usize) -> f64 {
        let (a, b) = self.cell(i);
        match self.kind {
            ProfileKind::Radial => std::f64::consts::PI * (b * b - a * a),
            ProfileKind::Lateral => b - a,
        }
    }

    /// Flux of a unit plane wave through the open aperture.
    pub fn incident_flux(&self) -> f64 {
        match self.kind {
            ProfileKind::Radial => std::f64::consts::PI * self.aperture_radius.powi(2),
            ProfileKind::Lateral => 2.0 * self.aperture_radius,
        }
    }

    pub fn transmitted_flux(&self) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, t)| t.norm_sqr() * self.cell_measure(i))
            .sum()
    }

    /// Aperture-averaged intensity transmission, membrane included.
    pub fn mean_intensity_transmission(&self) -> f64 {
        self.transmitted_flux() / self.incident_flux()
    }

    /// Zeroes every sample whose cell centre lies within `stop_radius` of the axis.
    pub fn apply_central_stop(&self, stop_radius: f64) -> Result<Self> {
        ensure_non_negative("stop radius", stop_radius)?;
        if stop_radius > self.aperture_radius {
            return Err(Error::OutOfRange {
                what: "stop radius (m)",
                value: stop_radius,
                min: 0.0,
                max: self.aperture_radius,
            });
        }
        let mut out = self.clone();
        for (i, t) in out.samples.iter_mut().enumerate() {
            if self.position(i).abs() < stop_radius {
                *t = Complex64::new(0.0, 0.0);
            }
        }
        out.description = format!(
            "{}; central stop r < {:.4} um",
            self.description,
            stop_radius * 1e6
        );
        Ok(out)
    }
}

fn region_profile<F>(
    plate: &CompoundZonePlate,
    opts: &SamplingOptions,
    value: F,
) -> Result<TransmissionProfile>
where
    F: Fn(Region) -> Complex64 + Sync,
{
    let spacing = opts.resolve(plate)?;
    TransmissionProfile::from_fn(
        plate.kind().into(),
        spacing,
        plate.aperture_radius(),
        plate.design().wavelength(),
        |x| plate.region_at(x).map_or(Complex64::new(0.0, 0.0), &value),
    )
}

fn describe(plate: &CompoundZonePlate) -> String {
    let parts: Vec<String> = plate
        .components()
        .iter()
        .map(|c| {
            format!(
                "m={} j={} n={}..{}",
                c.order(),
                c.offset(),
                c.n_first(),
                c.n_last()
            )
        })
        .collect();
    format!("{} plate [{}]", plate.kind(), parts.join(", "))
}

/// Membrane under everything, relief on the ridges, grooves etched through.
pub fn sample_profile(
    plate: &CompoundZonePlate,
    oc: &OpticalConstants,
    opts: &SamplingOptions,
) -> Result<TransmissionProfile> {
    let lam_plate = plate.design().wavelength();
    if ((oc.wavelength() - lam_plate) / lam_plate).abs() > 1e-6 {
        return Err(Error::Consistency(format!(
            "plate designed for {:.6e} m but optical constants are at {:.6e} m ({} eV)",
            lam_plate,
            oc.wavelength(),
            oc.energy_ev()
        )));
    }
    let membrane = oc.amplitude_transmission(plate.membrane_thickness())?;
    let ridge = membrane * oc.amplitude_transmission(plate.relief_height())?;
    let mut profile = region_profile(plate, opts, |region| match region {
        Region::Ridge => ridge,
        Region::Groove => membrane,
    })?;
    profile.energy_ev = Some(oc.energy_ev());
    profile.membrane_intensity = membrane.norm_sqr();
    profile.description = format!(
        "{}; {} relief {:.4} um, membrane {:.4} um at {:.2} eV",
        describe(plate),
        plate.material(),
        plate.relief_height() * 1e6,
        plate.membrane_thickness() * 1e6,
        oc.energy_ev()
    );
    Ok(profile)
}

/// Lossless reference: `|t| = 1`, phase 0 in grooves and pi on ridges.
pub fn ideal_phase_profile(
    plate: &CompoundZonePlate,
    opts: &SamplingOptions,
) -> Result<TransmissionProfile> {
    let mut profile = region_profile(plate, opts, |region| match region {
        Region::Ridge => Complex64::new(-1.0, 0.0),
        Region::Groove => Complex64::new(1.0, 0.0),
    })?;
    profile.description = format!("{}; ideal pi-phase", describe(plate));
    Ok(profile)
}

pub fn apply_central_stop(
    profile: &TransmissionProfile,
    stop_radius: f64,
) -> Result<TransmissionProfile> {
    profile.apply_central_stop(stop_radius)
}
