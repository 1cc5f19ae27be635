//! Scalar Fresnel propagation of transmission profiles, plus the focal-plane
//! measurements built on it: FWHM, knife-edge scans, encircled efficiency and
//! source-size blur.
//!
//! Fields are normalised to a unit-amplitude plane wave at the plate, so
//! `|U|^2 = 1` is the incident intensity and fluxes compare directly with the
//! open aperture.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::special::bessel_j0;
use crate::transmission::{ProfileKind, TransmissionProfile};

/// Default output samples per diffraction-limited spot `lambda z / 2R`.
pub const DEFAULT_SAMPLES_PER_SPOT: f64 = 16.0;
/// Default output half-extent in spots.
pub const DEFAULT_EXTENT_SPOTS: f64 = 64.0;
/// Coarsest allowed output grid, in samples per spot.
pub const MIN_SAMPLES_PER_SPOT: f64 = 8.0;
/// Default integration radius for `focal_efficiency`, in FWHMs.
pub const DEFAULT_RADIUS_FWHM: f64 = 5.0;

/// `2 sqrt(2 ln 2)`: FWHM of a unit-sigma Gaussian.
const GAUSS_FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Output samples at `i * spacing` for `i` in `0..=n` (radial) or `-n..=n`
/// (lateral), with `n = ceil(extent / spacing)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputGrid {
    pub spacing: f64,
    pub extent: f64,
}

impl OutputGrid {
    pub fn new(spacing: f64, extent: f64) -> Result<Self> {
        ensure_positive("output spacing", spacing)?;
        ensure_positive("output extent", extent)?;
        Ok(Self { spacing, extent })
    }

    /// Diffraction-limited spot `lambda z / 2R` for this profile and plane.
    pub fn spot(profile: &TransmissionProfile, z: f64) -> f64 {
        profile.wavelength() * z / (2.0 * profile.aperture_radius())
    }

    pub fn default_for(profile: &TransmissionProfile, z: f64) -> Result<Self> {
        ensure_positive("propagation distance", z)?;
        let spot = Self::spot(profile, z);
        Self::new(spot / DEFAULT_SAMPLES_PER_SPOT, spot * DEFAULT_EXTENT_SPOTS)
    }

    fn half_count(&self) -> usize {
        (self.extent / self.spacing - 1e-9).ceil() as usize
    }
}

/// Complex amplitude on an output grid at distance `z` behind the plate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    kind: ProfileKind,
    spacing: f64,
    half_count: usize,
    samples: Vec<Complex64>,
    distance: f64,
    wavelength: f64,
    incident_flux: f64,
    transmitted_flux: f64,
    membrane_intensity: f64,
}

impl ScalarField {
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Flux of the unit plane wave over the plate aperture.
    pub fn incident_flux(&self) -> f64 {
        self.incident_flux
    }

    /// Flux leaving the plate.
    pub fn transmitted_flux(&self) -> f64 {
        self.transmitted_flux
    }

    pub fn membrane_intensity(&self) -> f64 {
        self.membrane_intensity
    }

    pub fn position(&self, i: usize) -> f64 {
        match self.kind {
            ProfileKind::Radial => i as f64 * self.spacing,
            ProfileKind::Lateral => (i as f64 - self.half_count as f64) * self.spacing,
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| self.position(i)).collect()
    }

    /// Largest |position| on the grid.
    pub fn extent(&self) -> f64 {
        self.half_count as f64 * self.spacing
    }

    /// Intensity on the native grid (radius for radial fields).
    pub fn intensity(&self) -> IntensityCurve {
        IntensityCurve {
            positions: self.positions(),
            values: self.samples.iter().map(|u| u.norm_sqr()).collect(),
        }
    }

    /// Intensity along a full line through the axis: radial fields mirrored.
    pub fn line_intensity(&self) -> IntensityCurve {
        let curve = self.intensity();
        match self.kind {
            ProfileKind::Radial => curve.mirrored(),
            ProfileKind::Lateral => curve,
        }
    }

    /// Flux through output cell `i` clipped to `[lo, hi]` (radial: an annulus).
    fn cell_flux(&self, i: usize, lo: f64, hi: f64) -> f64 {
        let c = self.position(i);
        let h = 0.5 * self.spacing;
        let a = (c - h).max(lo);
        let b = (c + h).min(hi);
        if b <= a {
            return 0.0;
        }
        let measure = match self.kind {
            ProfileKind::Radial => PI * (b * b - a.max(0.0).powi(2)),
            ProfileKind::Lateral => b - a,
        };
        self.samples[i].norm_sqr() * measure
    }

    /// Total flux captured by the output grid.
    pub fn total_flux(&self) -> f64 {
        (0..self.samples.len())
            .map(|i| self.cell_flux(i, f64::NEG_INFINITY, f64::INFINITY))
            .sum()
    }

    /// Position of the intensity maximum.
    pub fn peak_position(&self) -> f64 {
        let i = argmax(
            &self
                .samples
                .iter()
                .map(|u| u.norm_sqr())
                .collect::<Vec<_>>(),
        );
        self.position(i)
    }

    pub fn peak_intensity(&self) -> f64 {
        self.samples
            .iter()
            .map(|u| u.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// FWHM of the line intensity through the axis.
    pub fn fwhm(&self) -> Result<f64> {
        fwhm(&self.line_intensity())
    }
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
            if v > best.1 {
                (i, v)
            } else {
                best
            }
        })
        .0
}

fn check_plane(profile: &TransmissionProfile, z: f64, grid: &OutputGrid) -> Result<()> {
    ensure_positive("propagation distance", z)?;
    let spot = OutputGrid::spot(profile, z);
    let required = spot / MIN_SAMPLES_PER_SPOT;
    if grid.spacing > required * (1.0 + 1e-12) {
        return Err(Error::Sampling {
            what: "output grid (focal spot)",
            given: grid.spacing,
            required,
        });
    }
    // phase of the kernel may advance at most a quarter turn per input cell
    let fringe = profile.wavelength() * z / (4.0 * (profile.aperture_radius() + grid.extent));
    if profile.spacing() > fringe * (1.0 + 1e-12) {
        return Err(Error::Sampling {
            what: "transmission profile (Fresnel fringes at this distance)",
            given: profile.spacing(),
            required: fringe,
        });
    }
    Ok(())
}

fn field_shell(
    profile: &TransmissionProfile,
    z: f64,
    grid: &OutputGrid,
    kind: ProfileKind,
) -> ScalarField {
    ScalarField {
        kind,
        spacing: grid.spacing,
        half_count: grid.half_count(),
        samples: Vec::new(),
        distance: z,
        wavelength: profile.wavelength(),
        incident_flux: profile.incident_flux(),
        transmitted_flux: profile.transmitted_flux(),
        membrane_intensity: profile.membrane_intensity(),
    }
}

/// Fresnel-Hankel integral of a radial profile. Each ring contributes its
/// exact chirp integral `int_a^b exp(i pi r^2 / lambda z) r dr` times the
/// Bessel factor at the ring centre.
pub fn propagate_radial(
    profile: &TransmissionProfile,
    z: f64,
    grid: &OutputGrid,
) -> Result<ScalarField> {
    if profile.kind() != ProfileKind::Radial {
        return Err(Error::Consistency(
            "propagate_radial needs a radial profile".into(),
        ));
    }
    check_plane(profile, z, grid)?;
    let lz = profile.wavelength() * z;
    let a = PI / lz;
    let rings: Vec<(f64, Complex64)> = (0..profile.len())
        .filter(|&i| profile.samples()[i] != Complex64::new(0.0, 0.0))
        .map(|i| {
            let (lo, hi) = profile.cell(i);
            let w = (Complex64::from_polar(1.0, a * hi * hi)
                - Complex64::from_polar(1.0, a * lo * lo))
                / Complex64::new(0.0, 2.0 * a);
            (0.5 * (lo + hi), profile.samples()[i] * w)
        })
        .collect();
    let mut field = field_shell(profile, z, grid, ProfileKind::Radial);
    let k = 2.0 * PI / lz;
    field.samples = (0..=field.half_count)
        .into_par_iter()
        .map(|i| {
            let rho = i as f64 * grid.spacing;
            let sum: Complex64 = rings
                .iter()
                .map(|&(r, tw)| tw * bessel_j0(k * r * rho))
                .sum();
            sum * k
        })
        .collect();
    Ok(field)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// One-dimensional Fresnel integral with kernel `exp(i pi (x - x')^2 / lambda z)
/// / sqrt(lambda z)`. Within each cell the kernel phase is linearised about the
/// cell centre and integrated exactly.
pub fn propagate_lateral(
    profile: &TransmissionProfile,
    z: f64,
    grid: &OutputGrid,
) -> Result<ScalarField> {
    if profile.kind() != ProfileKind::Lateral {
        return Err(Error::Consistency(
            "propagate_lateral needs a lateral profile".into(),
        ));
    }
    check_plane(profile, z, grid)?;
    let lz = profile.wavelength() * z;
    let a = PI / lz;
    let cells: Vec<(f64, f64, Complex64)> = (0..profile.len())
        .filter(|&i| profile.samples()[i] != Complex64::new(0.0, 0.0))
        .map(|i| {
            let (lo, hi) = profile.cell(i);
            (0.5 * (lo + hi), hi - lo, profile.samples()[i])
        })
        .filter(|c| c.1 > 0.0)
        .collect();
    let mut field = field_shell(profile, z, grid, ProfileKind::Lateral);
    let n = field.half_count as i64;
    let norm = 1.0 / lz.sqrt();
    field.samples = (-n..=n)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * grid.spacing;
            let sum: Complex64 = cells
                .iter()
                .map(|&(c, w, t)| {
                    let d = c - x;
                    t * Complex64::from_polar(w * sinc(a * d * w), a * d * d)
                })
                .sum();
            sum * norm
        })
        .collect();
    Ok(field)
}

/// Dispatches on the profile kind.
pub fn propagate(profile: &TransmissionProfile, z: f64, grid: &OutputGrid) -> Result<ScalarField> {
    match profile.kind() {
        ProfileKind::Radial => propagate_radial(profile, z, grid),
        ProfileKind::Lateral => propagate_lateral(profile, z, grid),
    }
}

/// Sampled intensity `values[i]` at `positions[i]` (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityCurve {
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
}

impl IntensityCurve {
    pub fn new(positions: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if positions.len() != values.len() || positions.len() < 3 {
            return Err(Error::Consistency(format!(
                "intensity curve needs matching positions and values, at least 3 (got {} and {})",
                positions.len(),
                values.len()
            )));
        }
        if positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Consistency(
                "intensity curve positions must increase".into(),
            ));
        }
        Ok(Self { positions, values })
    }

    /// Reflects a curve sampled from 0 outward onto negative positions.
    pub fn mirrored(&self) -> Self {
        let skip = usize::from(self.positions.first() == Some(&0.0));
        let mut positions: Vec<f64> = self.positions.iter().skip(skip).rev().map(|x| -x).collect();
        let mut values: Vec<f64> = self.values.iter().skip(skip).rev().copied().collect();
        positions.extend_from_slice(&self.positions);
        values.extend_from_slice(&self.values);
        Self { positions, values }
    }

    pub fn peak(&self) -> (f64, f64) {
        let i = argmax(&self.values);
        (self.positions[i], self.values[i])
    }

    fn spacing(&self) -> Result<f64> {
        let s = self.positions[1] - self.positions[0];
        let uniform = self
            .positions
            .windows(2)
            .all(|w| ((w[1] - w[0]) - s).abs() <= 1e-6 * s);
        if uniform {
            Ok(s)
        } else {
            Err(Error::Consistency(
                "operation needs a uniformly spaced curve".into(),
            ))
        }
    }
}

/// Full width at half maximum, from linear interpolation of the outermost
/// half-maximum crossings around the global maximum.
pub fn fwhm(curve: &IntensityCurve) -> Result<f64> {
    let v = &curve.values;
    let x = &curve.positions;
    let peak = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Domain {
            what: "curve maximum",
            requirement: "> 0",
            value: peak,
        });
    }
    let tops: Vec<usize> = (0..v.len()).filter(|&i| v[i] == peak).collect();
    let (first, last) = (tops[0], tops[tops.len() - 1]);
    if first == 0 || last == v.len() - 1 {
        return Err(Error::OutOfRange {
            what: "position of curve maximum",
            value: x[if first == 0 { first } else { last }],
            min: x[1],
            max: x[x.len() - 2],
        });
    }
    let half = 0.5 * peak;
    let cross = |i: usize, j: usize| x[i] + (half - v[i]) * (x[j] - x[i]) / (v[j] - v[i]);
    let left = (1..=first)
        .rev()
        .find(|&i| v[i - 1] < half)
        .map(|i| cross(i - 1, i));
    let right = (last..v.len() - 1)
        .find(|&i| v[i + 1] < half)
        .map(|i| cross(i, i + 1));
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::OutOfRange {
            what: "half-maximum crossing",
            value: half,
            min: 0.0,
            max: peak,
        }),
    }
}

/// First local minimum beyond the half-maximum point on the outward side of
/// the peak, refined by a parabola through the three neighbouring samples.
pub fn first_minimum(curve: &IntensityCurve) -> Result<f64> {
    let v = &curve.values;
    let x = &curve.positions;
    let p = argmax(v);
    let below_half = (p..v.len()).find(|&i| v[i] < 0.5 * v[p]).unwrap_or(v.len());
    let i = (below_half.max(1)..v.len() - 1)
        .find(|&i| v[i] < v[i - 1] && v[i] <= v[i + 1])
        .ok_or(Error::OutOfRange {
            what: "first intensity minimum (grid extent)",
            value: x[x.len() - 1],
            min: x[0],
            max: x[x.len() - 1],
        })?;
    let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom > 0.0 {
        0.5 * (a - c) / denom
    } else {
        0.0
    };
    Ok(x[i] + shift * (x[i + 1] - x[i]))
}

/// Flux transmitted past a straight edge as it moves across the focus.
#[derive(Debug, Clone, PartialEq)]
pub struct KnifeEdgeCurve {
    pub positions: Vec<f64>,
    /// Flux through the half-plane `x > position`.
    pub transmitted_flux: Vec<f64>,
    /// `-d flux / dx`: the line-spread function.
    pub derivative: Vec<f64>,
}

impl KnifeEdgeCurve {
    pub fn derivative_curve(&self) -> IntensityCurve {
        IntensityCurve {
            positions: self.positions.clone(),
            values: self.derivative.clone(),
        }
    }
}

/// Linear interpolation on a uniform grid starting at `x0`; 0 beyond the end.
fn interp_uniform(values: &[f64], x0: f64, step: f64, x: f64) -> f64 {
    let t = (x - x0) / step;
    if t < 0.0 {
        return values[0];
    }
    let i = t.floor() as usize;
    if i + 1 >= values.len() {
        return if i + 1 == values.len() && t == i as f64 {
            values[i]
        } else {
            0.0
        };
    }
    let f = t - i as f64;
    values[i] * (1.0 - f) + values[i + 1] * f
}

/// Marginal `M(x) = int I(x, y) dy` on the field's line grid. Radial
/// intensities are projected with `I(sqrt(x^2 + y^2))` interpolated linearly
/// in radius.
pub fn line_marginal(field: &ScalarField) -> IntensityCurve {
    match field.kind {
        ProfileKind::Lateral => field.intensity(),
        ProfileKind::Radial => {
            let radial = field.intensity();
            let s = field.spacing;
            let rmax = field.extent();
            let dy = 0.25 * s;
            let n = field.half_count as i64;
            let values: Vec<f64> = (-n..=n)
                .into_par_iter()
                .map(|k| {
                    let x = k as f64 * s;
                    let ymax = (rmax * rmax - x * x).max(0.0).sqrt();
                    let steps = (ymax / dy).ceil() as usize;
                    if steps == 0 {
                        return 0.0;
                    }
                    let h = ymax / steps as f64;
                    let g = |y: f64| interp_uniform(&radial.values, 0.0, s, (x * x + y * y).sqrt());
                    let inner: f64 = (1..steps).map(|m| g(m as f64 * h)).sum();
                    2.0 * h * (0.5 * g(0.0) + inner + 0.5 * g(ymax))
                })
                .collect();
            IntensityCurve {
                positions: (-n..=n).map(|k| k as f64 * s).collect(),
                values,
            }
        }
    }
}

/// Simulated knife-edge scan. Edge positions must lie on the field's line grid
/// span; the derivative uses central differences (one-sided at the ends).
pub fn knife_edge_scan(field: &ScalarField, positions: &[f64]) -> Result<KnifeEdgeCurve> {
    let marginal = line_marginal(field);
    let xs = &marginal.positions;
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    for &p in positions {
        if !(lo..=hi).contains(&p) {
            return Err(Error::OutOfRange {
                what: "knife-edge position (m)",
                value: p,
                min: lo,
                max: hi,
            });
        }
    }
    if positions.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Consistency(
            "knife-edge positions must increase".into(),
        ));
    }
    // tail[i] = flux beyond xs[i], trapezoid rule
    let s = field.spacing;
    let m = &marginal.values;
    let mut tail = vec![0.0; m.len()];
    for i in (0..m.len() - 1).rev() {
        tail[i] = tail[i + 1] + 0.5 * s * (m[i] + m[i + 1]);
    }
    let flux_at = |x: f64| {
        let t = ((x - lo) / s).clamp(0.0, (m.len() - 1) as f64);
        let i = (t.floor() as usize).min(m.len() - 2);
        let f = t - i as f64;
        // exact integral of the linear marginal over [x, xs[i+1]]
        let mx = m[i] * (1.0 - f) + m[i + 1] * f;
        tail[i + 1] + 0.5 * (1.0 - f) * s * (mx + m[i + 1])
    };
    let flux: Vec<f64> = positions.iter().map(|&x| flux_at(x)).collect();
    let n = flux.len();
    let derivative = (0..n)
        .map(|i| {
            if n < 2 {
                return 0.0;
            }
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            -(flux[b] - flux[a]) / (positions[b] - positions[a])
        })
        .collect();
    Ok(KnifeEdgeCurve {
        positions: positions.to_vec(),
        transmitted_flux: flux,
        derivative,
    })
}

/// Edge positions on the field's own line grid, within `half_width` of the axis.
pub fn knife_edge_positions(field: &ScalarField, half_width: f64) -> Vec<f64> {
    let n = ((half_width / field.spacing).floor() as i64).min(field.half_count as i64);
    (-n..=n).map(|k| k as f64 * field.spacing).collect()
}

/// Flux near the focus as a fraction of the flux incident on the aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalEfficiency {
    /// Membrane transmission divided out.
    pub relative: f64,
    pub absolute: f64,
    pub integration_radius: f64,
    pub peak_position: f64,
}

/// Flux within `radius` of the peak: a disk about the axis for radial fields,
/// a strip about the peak line for lateral ones. `None` uses 5 FWHM.
pub fn focal_efficiency(field: &ScalarField, radius: Option<f64>) -> Result<FocalEfficiency> {
    let peak_position = match field.kind {
        ProfileKind::Radial => 0.0,
        ProfileKind::Lateral => field.peak_position(),
    };
    let radius = match radius {
        Some(r) => ensure_non_negative("integration radius", r)?,
        None if field.peak_intensity() == 0.0 => 0.0,
        None => DEFAULT_RADIUS_FWHM * field.fwhm()?,
    };
    let reach = peak_position.abs() + radius;
    if reach > field.extent() {
        return Err(Error::OutOfRange {
            what: "integration radius (m)",
            value: radius,
            min: 0.0,
            max: field.extent() - peak_position.abs(),
        });
    }
    let (lo, hi) = match field.kind {
        ProfileKind::Radial => (0.0, radius),
        ProfileKind::Lateral => (peak_position - radius, peak_position + radius),
    };
    let flux: f64 = (0..field.samples.len())
        .map(|i| field.cell_flux(i, lo, hi))
        .sum();
    let absolute = flux / field.incident_flux;
    Ok(FocalEfficiency {
        relative: absolute / field.membrane_intensity,
        absolute,
        integration_radius: radius,
        peak_position,
    })
}

/// Geometric image of a Gaussian source through the lens: FWHM
/// `source_size * f / (L - f)`.
pub fn source_image_fwhm(source_size: f64, source_distance: f64, focal_length: f64) -> Result<f64> {
    ensure_non_negative("source size", source_size)?;
    ensure_positive("focal length", focal_length)?;
    if !(source_distance > focal_length) {
        return Err(Error::Domain {
            what: "source distance (m)",
            requirement: "> focal length",
            value: source_distance,
        });
    }
    Ok(source_size * focal_length / (source_distance - focal_length))
}

/// Convolves a uniformly sampled curve with the Gaussian source image. Kernel
/// weights are the Gaussian integrated over each grid cell, so a zero source
/// leaves the curve unchanged.
pub fn source_blur(
    curve: &IntensityCurve,
    source_size: f64,
    source_distance: f64,
    focal_length: f64,
) -> Result<IntensityCurve> {
    let width = source_image_fwhm(source_size, source_distance, focal_length)?;
    let s = curve.spacing()?;
    if width == 0.0 {
        return Ok(curve.clone());
    }
    let sigma = width / GAUSS_FWHM_PER_SIGMA;
    let reach = ((8.0 * sigma / s).ceil() as usize).min(curve.values.len());
    let cdf = |u: f64| 0.5 * libm::erf(u / (std::f64::consts::SQRT_2 * sigma));
    let kernel: Vec<f64> = (0..=reach)
        .map(|k| cdf((k as f64 + 0.5) * s) - cdf((k as f64 - 0.5) * s))
        .collect();
    let n = curve.values.len() as i64;
    let values = (0..n)
        .map(|i| {
            let lo = (i - reach as i64).max(0);
            let hi = (i + reach as i64).min(n - 1);
            (lo..=hi)
                .map(|j| curve.values[j as usize] * kernel[(i - j).unsigned_abs() as usize])
                .sum()
        })
        .collect();
    Ok(IntensityCurve {
        positions: curve.positions.clone(),
        values,
    })
}

/// Order whose focus lies nearest to `z`: `round(f / z)`.
pub fn nearest_focus_order(focal_length: f64, z: f64) -> u32 {
    (focal_length / z).round().max(0.0) as u32
}
