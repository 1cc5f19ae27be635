//! Half-zone geometry of compound Fresnel zone plates.
//!
//! A component working in diffraction order `m` with offset `j` has its
//! half-zone boundaries at
//!
//! ```text
//! r(m, n) = sigma * sqrt(m n - j)   n odd
//!         = sigma * sqrt(m n)       n even,     sigma = sqrt(lambda f)
//! ```
//!
//! Half-zone `n` spans `[r(n-1), r(n)]` with `r(0) = 0`. Odd half-zones are
//! the etched grooves, even half-zones the ridges; the groove fraction of
//! one local period is the slitness `S = (m - j) / 2m`.

use crate::error::{ensure_positive, Error, Result};
use crate::materials::wavelength_from_energy;

/// Default minimum printable half-zone width.
pub const DEFAULT_MIN_FEATURE: f64 = 0.4e-6;

/// Relative tolerance used when checking that components abut.
const ABUT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    /// Concentric rings, point focus.
    Circular,
    /// Strips mirrored about x = 0, line focus.
    Linear,
}

impl std::fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GeometryKind::Circular => "circular",
            GeometryKind::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Full relief height.
    Ridge,
    /// Etched through the relief.
    Groove,
}

impl Region {
    pub fn of_half_zone(n: u64) -> Self {
        if n % 2 == 1 {
            Region::Groove
        } else {
            Region::Ridge
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Ridge => "ridge",
            Region::Groove => "groove",
        }
    }
}

/// Wavelength, focal length, and the derived length scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    wavelength: f64,
    focal_length: f64,
    sigma: f64,
}

impl DesignParams {
    pub fn new(wavelength: f64, focal_length: f64) -> Result<Self> {
        let sigma = sigma(wavelength, focal_length)?;
        Ok(Self {
            wavelength,
            focal_length,
            sigma,
        })
    }

    pub fn from_energy(energy_ev: f64, focal_length: f64) -> Result<Self> {
        Self::new(wavelength_from_energy(energy_ev)?, focal_length)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn focal_length(&self) -> f64 {
        self.focal_length
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma_sq(&self) -> f64 {
        self.wavelength * self.focal_length
    }
}

/// `sqrt(lambda * f)`.
pub fn sigma(wavelength: f64, focal_length: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("focal length", focal_length)?;
    Ok((wavelength * focal_length).sqrt())
}

/// Boundary `n` in units of sigma^2 (no validation; `n = 0` gives 0).
fn boundary_u(m: u32, j: i32, n: u64) -> f64 {
    let mn = f64::from(m) * n as f64;
    if n % 2 == 1 {
        mn - f64::from(j)
    } else {
        mn
    }
}

fn check_order(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain {
            what: "diffraction order m",
            requirement: ">= 1",
            value: 0.0,
        });
    }
    Ok(())
}

fn check_index(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain {
            what: "half-zone index n",
            requirement: ">= 1",
            value: 0.0,
        });
    }
    Ok(())
}

/// Radius of half-zone boundary `n`.
pub fn zone_radius(d: &DesignParams, m: u32, j: i32, n: u64) -> Result<f64> {
    check_order(m)?;
    check_index(n)?;
    let u = boundary_u(m, j, n);
    if u < 1.0 {
        return Err(Error::Domain {
            what: "m*n - j (degenerate inner zone)",
            requirement: ">= 1",
            value: u,
        });
    }
    Ok(d.sigma() * u.sqrt())
}

/// Width of half-zone `n` in the large-`n` form:
/// `sigma (m -+ j) / (2 sqrt(m n))` for odd / even `n`.
pub fn zone_width(d: &DesignParams, m: u32, j: i32, n: u64) -> Result<f64> {
    check_order(m)?;
    check_index(n)?;
    let mf = f64::from(m);
    let jf = f64::from(j);
    let num = if n % 2 == 1 { mf - jf } else { mf + jf };
    Ok(d.sigma() * num / (2.0 * (mf * n as f64).sqrt()))
}

/// `S = (m - j) / 2m`, the groove fraction of a local period.
pub fn slitness(m: u32, j: i32) -> Result<f64> {
    check_order(m)?;
    if j.unsigned_abs() >= m {
        return Err(Error::Domain {
            what: "|j| (offset must satisfy |j| < m)",
            requirement: "< m",
            value: f64::from(j),
        });
    }
    Ok(f64::from(m as i32 - j) / (2.0 * f64::from(m)))
}

/// Outcome of the maximal-efficiency order-pair criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCheck {
    pub valid: bool,
    pub reason: String,
}

impl OrderCheck {
    pub fn into_result(self, m: u32, j: i32) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            Err(Error::InvalidOrderPair {
                m,
                j,
                reason: self.reason,
            })
        }
    }
}

/// Accepts `(m, j)` when `|j| < m` and `j` has the opposite parity to `m`
/// (even `j` for odd `m`, odd `j` for even `m`). These are exactly the
/// pairs for which order `m` reaches `4 / (pi m)^2`.
pub fn validate_order_pair(m: u32, j: i32) -> OrderCheck {
    let reject = |reason: String| OrderCheck {
        valid: false,
        reason,
    };
    if m == 0 {
        return reject("order m must be at least 1".into());
    }
    if j.unsigned_abs() >= m {
        return reject(format!("|j| < m violated (|{j}| >= {m})"));
    }
    let j_even = j % 2 == 0;
    let m_odd = m % 2 == 1;
    if m_odd && !j_even {
        return reject(format!("j must be even for odd m={m}"));
    }
    if !m_odd && j_even {
        return reject(format!("j must be odd for even m={m}"));
    }
    OrderCheck {
        valid: true,
        reason: "ok".into(),
    }
}

/// One half-zone of a plate, with absolute radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfZone {
    pub component: usize,
    pub n: u64,
    pub r_inner: f64,
    pub r_outer: f64,
    pub region: Region,
}

impl HalfZone {
    pub fn width(&self) -> f64 {
        self.r_outer - self.r_inner
    }
}

/// One annular (or strip) zone system working in a single order.
///
/// `r2_shift` records the abutment shift: every boundary radius is
/// `sqrt(sigma^2 u(n) - r2_shift)`, so the component still focuses at `f`
/// and its inner edge lands on the previous component's outer edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneComponent {
    order: u32,
    offset: i32,
    n_first: u64,
    n_last: u64,
    kind: GeometryKind,
    r2_shift: f64,
}

impl ZoneComponent {
    pub fn new(
        order: u32,
        offset: i32,
        n_first: u64,
        n_last: u64,
        kind: GeometryKind,
    ) -> Result<Self> {
        slitness(order, offset)?;
        check_index(n_first)?;
        if n_last < n_first {
            return Err(Error::Domain {
                what: "n_last (must not precede n_first)",
                requirement: ">= n_first",
                value: n_last as f64,
            });
        }
        Ok(Self {
            order,
            offset,
            n_first,
            n_last,
            kind,
            r2_shift: 0.0,
        })
    }

    fn with_r2_shift(mut self, r2_shift: f64) -> Self {
        self.r2_shift = r2_shift;
        self
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn offset(&self) -> i32 {
        self.offset
    }

    pub fn n_first(&self) -> u64 {
        self.n_first
    }

    pub fn n_last(&self) -> u64 {
        self.n_last
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    /// Abutment shift in m^2 (zero for an unshifted component).
    pub fn r2_shift(&self) -> f64 {
        self.r2_shift
    }

    pub fn half_zone_count(&self) -> u64 {
        self.n_last - self.n_first + 1
    }

    pub fn slitness(&self) -> f64 {
        f64::from(self.order as i32 - self.offset) / (2.0 * f64::from(self.order))
    }

    /// Radius of boundary `n`, including the abutment shift.
    pub fn boundary(&self, d: &DesignParams, n: u64) -> f64 {
        let r2 = d.sigma_sq() * boundary_u(self.order, self.offset, n) - self.r2_shift;
        r2.max(0.0).sqrt()
    }

    pub fn inner_radius(&self, d: &DesignParams) -> f64 {
        self.boundary(d, self.n_first - 1)
    }

    pub fn outer_radius(&self, d: &DesignParams) -> f64 {
        self.boundary(d, self.n_last)
    }

    /// Exact width of half-zone `n` (difference of consecutive boundaries).
    pub fn exact_width(&self, d: &DesignParams, n: u64) -> f64 {
        self.boundary(d, n) - self.boundary(d, n - 1)
    }

    /// Whether half-zone `n` has the widened parity. For `j > 0` the even
    /// (ridge) half-zones are the wide ones, for `j < 0` the odd ones, and
    /// for `j = 0` both parities are equally wide.
    pub fn is_critical(&self, n: u64) -> bool {
        match self.offset.signum() {
            0 => true,
            1 => n.is_multiple_of(2),
            _ => n % 2 == 1,
        }
    }

    /// Half-zone index containing radius `r`, or `None` outside the component.
    pub fn half_zone_at(&self, d: &DesignParams, r: f64) -> Option<u64> {
        if r < self.inner_radius(d) || r >= self.outer_radius(d) {
            return None;
        }
        let u = (r * r + self.r2_shift) / d.sigma_sq();
        // smallest n in [n_first, n_last] with boundary_u(n) > u
        let (mut lo, mut hi) = (self.n_first, self.n_last);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if boundary_u(self.order, self.offset, mid) > u {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }

    pub fn half_zones(
        &self,
        d: &DesignParams,
        component: usize,
    ) -> impl Iterator<Item = HalfZone> + '_ {
        let d = *d;
        (self.n_first..=self.n_last).map(move |n| HalfZone {
            component,
            n,
            r_inner: self.boundary(&d, n - 1),
            r_outer: self.boundary(&d, n),
            region: Region::of_half_zone(n),
        })
    }
}

pub fn component_inner_radius(d: &DesignParams, c: &ZoneComponent) -> f64 {
    c.inner_radius(d)
}

pub fn component_outer_radius(d: &DesignParams, c: &ZoneComponent) -> f64 {
    c.outer_radius(d)
}

/// Ordered, abutting components plus the layer stack.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundZonePlate {
    design: DesignParams,
    components: Vec<ZoneComponent>,
    kind: GeometryKind,
    relief_height: f64,
    membrane_thickness: f64,
    material: String,
}

impl CompoundZonePlate {
    pub fn new(design: DesignParams, components: Vec<ZoneComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Config("a plate needs at least one component".into()))?;
        let kind = first.kind();
        for pair in components.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if b.order() <= a.order() {
                return Err(Error::Ordering {
                    previous: a.order(),
                    next: b.order(),
                });
            }
            if b.kind() != kind {
                return Err(Error::Consistency(
                    "components mix circular and linear geometry".into(),
                ));
            }
            let (outer, inner) = (a.outer_radius(&design), b.inner_radius(&design));
            if (outer - inner).abs() > ABUT_TOLERANCE * outer {
                return Err(Error::Consistency(format!(
                    "components do not abut: outer radius {outer:.6e} m vs next inner radius {inner:.6e} m"
                )));
            }
        }
        if first.n_first() != 1 || first.r2_shift() != 0.0 {
            return Err(Error::Consistency(
                "the innermost component must start at the optical axis (n_first = 1)".into(),
            ));
        }
        Ok(Self {
            design,
            components,
            kind,
            relief_height: 0.0,
            membrane_thickness: 0.0,
            material: String::new(),
        })
    }

    /// A single-component plate with half-zones `1..=half_zones`.
    pub fn single(
        design: DesignParams,
        m: u32,
        j: i32,
        half_zones: u64,
        kind: GeometryKind,
    ) -> Result<Self> {
        Self::new(design, vec![ZoneComponent::new(m, j, 1, half_zones, kind)?])
    }

    pub fn with_relief_height(mut self, h: f64) -> Self {
        self.relief_height = h;
        self
    }

    pub fn with_membrane_thickness(mut self, t: f64) -> Self {
        self.membrane_thickness = t;
        self
    }

    pub fn with_material(mut self, name: impl Into<String>) -> Self {
        self.material = name.into();
        self
    }

    pub fn design(&self) -> &DesignParams {
        &self.design
    }

    pub fn components(&self) -> &[ZoneComponent] {
        &self.components
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn relief_height(&self) -> f64 {
        self.relief_height
    }

    pub fn membrane_thickness(&self) -> f64 {
        self.membrane_thickness
    }

    pub fn material(&self) -> &str {
        &self.material
    }

    pub fn aperture_radius(&self) -> f64 {
        self.components[self.components.len() - 1].outer_radius(&self.design)
    }

    /// Full aperture (diameter for circular plates, width for linear ones).
    pub fn aperture(&self) -> f64 {
        2.0 * self.aperture_radius()
    }

    pub fn half_zone_count(&self) -> u64 {
        self.components
            .iter()
            .map(ZoneComponent::half_zone_count)
            .sum()
    }

    pub fn half_zones(&self) -> Vec<HalfZone> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.half_zones(&self.design, i).collect::<Vec<_>>())
            .collect()
    }

    pub fn min_zone_width(&self) -> f64 {
        self.half_zones()
            .iter()
            .map(HalfZone::width)
            .fold(f64::INFINITY, f64::min)
    }

    /// Region containing radius `r` (|x| for linear plates), `None` outside.
    pub fn region_at(&self, r: f64) -> Option<Region> {
        let r = r.abs();
        self.components
            .iter()
            .find_map(|c| c.half_zone_at(&self.design, r).map(Region::of_half_zone))
    }

    /// Aperture divided by the first-order (j = 0) aperture reached at the
    /// same minimum feature size.
    pub fn aperture_extension_ratio(&self, min_feature: f64) -> Result<f64> {
        Ok(self.aperture() / first_order_limit_aperture(&self.design, min_feature)?)
    }
}

/// How far a plan entry extends outward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    /// A fixed number of half-zones.
    HalfZones(u64),
    /// The last boundary not beyond this radius (m).
    OuterRadius(f64),
    /// As far as the widened half-zones stay printable.
    FabricationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub order: u32,
    pub offset: i32,
    pub extent: Extent,
}

impl PlanEntry {
    pub fn new(order: u32, offset: i32, extent: Extent) -> Self {
        Self {
            order,
            offset,
            extent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub min_feature: f64,
    pub kind: GeometryKind,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            min_feature: DEFAULT_MIN_FEATURE,
            kind: GeometryKind::Circular,
        }
    }
}

/// Full aperture at which a first-order, `j = 0` plate's last half-zone
/// still meets `min_feature`.
pub fn first_order_limit_aperture(d: &DesignParams, min_feature: f64) -> Result<f64> {
    ensure_positive("minimum feature size", min_feature)?;
    let probe = ZoneComponent::new(1, 0, 1, 1, GeometryKind::Circular)?;
    let n = last_printable(d, &probe, min_feature).ok_or(Error::FabricationLimit {
        component: 0,
        zone: 1,
        width_um: probe.exact_width(d, 1) * 1e6,
        min_um: min_feature * 1e6,
    })?;
    Ok(2.0 * probe.boundary(d, n))
}

/// Largest `n >= n_first` such that every critical half-zone up to `n` is
/// at least `min_feature` wide.
fn last_printable(d: &DesignParams, c: &ZoneComponent, min_feature: f64) -> Option<u64> {
    let mut n = c.n_first;
    loop {
        if c.is_critical(n) && c.exact_width(d, n) < min_feature {
            return (n > c.n_first).then(|| n - 1);
        }
        n += 1;
    }
}

/// Builds a compound plate from a plan ordered by increasing order.
///
/// Each later component starts at the smallest half-zone whose unshifted
/// inner boundary is not inside the previous component, and is then shifted
/// (by a constant in r^2) so that its inner edge coincides with the
/// previous outer edge.
pub fn assemble_compound(
    d: &DesignParams,
    plan: &[PlanEntry],
    opts: &AssemblyOptions,
) -> Result<CompoundZonePlate> {
    if plan.is_empty() {
        return Err(Error::Config("component plan is empty".into()));
    }
    ensure_positive("minimum feature size", opts.min_feature)?;
    let mut components: Vec<ZoneComponent> = Vec::with_capacity(plan.len());
    for (index, entry) in plan.iter().enumerate() {
        validate_order_pair(entry.order, entry.offset).into_result(entry.order, entry.offset)?;
        if let Some(prev) = components.last() {
            if entry.order <= prev.order() {
                return Err(Error::Ordering {
                    previous: prev.order(),
                    next: entry.order,
                });
            }
        }
        let (m, j) = (entry.order, entry.offset);
        let (n_first, shift) = match components.last() {
            None => (1, 0.0),
            Some(prev) => {
                let r_prev = prev.outer_radius(d);
                let u_prev = r_prev * r_prev / d.sigma_sq();
                let mut n = 1u64;
                while boundary_u(m, j, n - 1) < u_prev * (1.0 - 1e-15) {
                    n += 1;
                }
                let shift = (d.sigma_sq() * boundary_u(m, j, n - 1) - r_prev * r_prev).max(0.0);
                (n, shift)
            }
        };
        let base = ZoneComponent::new(m, j, n_first, n_first, opts.kind)?.with_r2_shift(shift);
        let n_last = match entry.extent {
            Extent::HalfZones(count) => {
                if count == 0 {
                    return Err(Error::Config(format!(
                        "component {index} has zero half-zones"
                    )));
                }
                n_first + count - 1
            }
            Extent::OuterRadius(radius) => {
                ensure_positive("component outer radius", radius)?;
                let mut n = n_first;
                if base.boundary(d, n) > radius * (1.0 + 1e-9) {
                    return Err(Error::Consistency(format!(
                        "component {index}: outer radius {:.4} um leaves no room for a half-zone",
                        radius * 1e6
                    )));
                }
                while base.boundary(d, n + 1) <= radius * (1.0 + 1e-9) {
                    n += 1;
                }
                n
            }
            Extent::FabricationLimit => {
                last_printable(d, &base, opts.min_feature).ok_or(Error::FabricationLimit {
                    component: index,
                    zone: n_first,
                    width_um: base.exact_width(d, n_first) * 1e6,
                    min_um: opts.min_feature * 1e6,
                })?
            }
        };
        let component = ZoneComponent::new(m, j, n_first, n_last, opts.kind)?.with_r2_shift(shift);
        if let Some(zone) = (n_first..=n_last)
            .find(|&n| component.is_critical(n) && component.exact_width(d, n) < opts.min_feature)
        {
            return Err(Error::FabricationLimit {
                component: index,
                zone,
                width_um: component.exact_width(d, zone) * 1e6,
                min_um: opts.min_feature * 1e6,
            });
        }
        components.push(component);
    }
    CompoundZonePlate::new(*d, components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn spring8() -> DesignParams {
        DesignParams::new(1.5405e-10, 0.46).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert!(rel(sigma(1.5405e-10, 0.46).unwrap(), 8.418e-6) < 1e-4);
        assert_eq!(sigma(1.0, 1.0).unwrap(), 1.0);
        // sqrt(1.5405e-10) = 1.24117e-5 (1.24117^2 = 1.540503)
        assert!(rel(sigma(1.5405e-10, 1.0).unwrap(), 12.412e-6) < 1e-4);
        assert!(sigma(0.0, 1.0).is_err());
        assert!(sigma(1.0, -1.0).is_err());
        let d = spring8();
        assert!(rel(d.sigma() * d.sigma(), d.wavelength() * d.focal_length()) < 1e-12);
    }

    #[test]
    fn zone_radius_examples() {
        let d = spring8();
        assert!(rel(zone_radius(&d, 1, 0, 1).unwrap(), 8.418e-6) < 1e-4);
        let r112 = zone_radius(&d, 1, 0, 112).unwrap();
        assert!(rel(r112, 89.09e-6) < 1e-3, "{r112}");
        assert!(rel(2.0 * r112, 178.2e-6) < 1e-3);
        assert_eq!(zone_radius(&d, 3, 2, 1).unwrap(), d.sigma());
        assert!(zone_radius(&d, 2, 2, 1).is_err());
        assert!(zone_radius(&d, 1, 0, 0).is_err());
    }

    #[test]
    fn zone_width_examples() {
        let d = spring8();
        assert!(rel(zone_width(&d, 1, 0, 112).unwrap(), 0.398e-6) < 1e-3);
        assert_eq!(zone_width(&d, 1, 0, 1).unwrap(), d.sigma() / 2.0);
        let n = 1_000_001;
        let ratio = zone_width(&d, 3, 2, n).unwrap() / zone_width(&d, 3, 2, n + 1).unwrap();
        assert!((ratio - 0.2).abs() < 1e-6, "{ratio}");
    }

    #[test]
    fn slitness_examples() {
        assert_eq!(slitness(1, 0).unwrap(), 0.5);
        assert_eq!(slitness(2, 1).unwrap(), 0.25);
        assert!((slitness(3, -2).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!(slitness(3, 3).is_err());
        for m in 1..20 {
            assert_eq!(slitness(m, 0).unwrap(), 0.5);
        }
    }

    #[test]
    fn order_pair_examples() {
        assert!(validate_order_pair(1, 0).valid);
        let c = validate_order_pair(2, 0);
        assert!(!c.valid && c.reason.contains("odd"), "{}", c.reason);
        assert!(validate_order_pair(3, 2).valid);
        let c = validate_order_pair(3, 3);
        assert!(!c.valid && c.reason.contains("|j| < m"), "{}", c.reason);
        assert!(!validate_order_pair(0, 0).valid);
    }

    #[test]
    fn accepted_pairs_have_odd_m_minus_j() {
        for m in 1..=10u32 {
            for j in -(m as i32)..=(m as i32) {
                if validate_order_pair(m, j).valid {
                    assert_eq!((m as i32 - j).rem_euclid(2), 1, "m={m} j={j}");
                }
            }
        }
    }

    #[test]
    fn full_plate_inner_and_outer() {
        let d = spring8();
        let plate = CompoundZonePlate::single(d, 1, 0, 112, GeometryKind::Circular).unwrap();
        let c = plate.components()[0];
        assert_eq!(component_inner_radius(&d, &c), 0.0);
        assert!(rel(component_outer_radius(&d, &c), 89.09e-6) < 1e-3);
        let one = ZoneComponent::new(1, 0, 1, 1, GeometryKind::Circular).unwrap();
        assert_eq!(one.inner_radius(&d), 0.0);
        assert!(rel(one.outer_radius(&d), d.sigma()) < 1e-15);
    }

    #[test]
    fn third_order_component_abuts_first_order() {
        let d = spring8();
        let plan = [
            PlanEntry::new(1, 0, Extent::HalfZones(112)),
            PlanEntry::new(3, 2, Extent::HalfZones(50)),
        ];
        let opts = AssemblyOptions {
            min_feature: 0.05e-6,
            ..Default::default()
        };
        let plate = assemble_compound(&d, &plan, &opts).unwrap();
        let (a, b) = (plate.components()[0], plate.components()[1]);
        let r = a.outer_radius(&d);
        assert!(rel(b.inner_radius(&d), r) < 1e-9);
        // smallest boundary of (3, 2) not inside r = sigma*sqrt(112): u = 114 at n = 38
        assert_eq!(b.n_first(), 39);
        assert!(rel(b.r2_shift(), 2.0 * d.sigma_sq()) < 1e-12);
        let unshifted = zone_radius(&d, 3, 2, b.n_first() - 1).unwrap();
        assert!(unshifted >= r);
    }

    #[test]
    fn three_component_boundaries_are_monotone() {
        let d = spring8();
        let plan = [
            PlanEntry::new(1, 0, Extent::FabricationLimit),
            PlanEntry::new(2, 1, Extent::HalfZones(60)),
            PlanEntry::new(3, 2, Extent::FabricationLimit),
        ];
        let plate = assemble_compound(&d, &plan, &AssemblyOptions::default()).unwrap();
        let zones = plate.half_zones();
        for w in zones.windows(2) {
            assert!(w[0].r_outer > w[0].r_inner);
            assert!(rel(w[1].r_inner, w[0].r_outer) < 1e-9);
        }
        assert_eq!(plate.components().len(), 3);
    }

    #[test]
    fn aperture_extension_ratio_is_m_plus_abs_j() {
        let d = DesignParams::from_energy(8050.0, 0.46).unwrap();
        let plan = [
            PlanEntry::new(1, 0, Extent::FabricationLimit),
            PlanEntry::new(3, 2, Extent::FabricationLimit),
        ];
        let plate = assemble_compound(&d, &plan, &AssemblyOptions::default()).unwrap();
        let ratio = plate.aperture_extension_ratio(DEFAULT_MIN_FEATURE).unwrap();
        assert!((ratio - 5.0).abs() < 0.1, "{ratio}");
        // closed form: A_1 = lambda f / w
        let a1 = first_order_limit_aperture(&d, DEFAULT_MIN_FEATURE).unwrap();
        assert!(rel(a1, d.sigma_sq() / DEFAULT_MIN_FEATURE) < 0.01);
    }

    #[test]
    fn assembly_errors() {
        let d = spring8();
        let opts = AssemblyOptions::default();
        let bad = [PlanEntry::new(2, 0, Extent::HalfZones(10))];
        assert!(matches!(
            assemble_compound(&d, &bad, &opts),
            Err(Error::InvalidOrderPair { .. })
        ));
        let decreasing = [
            PlanEntry::new(3, 2, Extent::HalfZones(10)),
            PlanEntry::new(1, 0, Extent::HalfZones(10)),
        ];
        assert!(matches!(
            assemble_compound(&d, &decreasing, &opts),
            Err(Error::Ordering { .. })
        ));
        let too_far = [PlanEntry::new(1, 0, Extent::OuterRadius(150e-6))];
        match assemble_compound(&d, &too_far, &opts) {
            Err(Error::FabricationLimit { zone, .. }) => {
                assert!(zone > 100 && zone < 120, "{zone}")
            }
            other => panic!("expected fabrication limit, got {other:?}"),
        }
        assert!(matches!(
            assemble_compound(&d, &[], &opts),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn spring8_plan_reproduces_test_plate() {
        let d = DesignParams::from_energy(8050.0, 0.46).unwrap();
        let opts = AssemblyOptions {
            min_feature: 0.39e-6,
            ..Default::default()
        };
        let plate =
            assemble_compound(&d, &[PlanEntry::new(1, 0, Extent::HalfZones(112))], &opts).unwrap();
        assert_eq!(
            plate,
            CompoundZonePlate::single(d, 1, 0, 112, GeometryKind::Circular).unwrap()
        );
        assert!(rel(plate.aperture(), 178.2e-6) < 0.005);
        assert!(rel(plate.min_zone_width(), 0.40e-6) < 0.02);
        // the same plate by radius
        let by_radius = assemble_compound(
            &d,
            &[PlanEntry::new(1, 0, Extent::OuterRadius(89.1e-6))],
            &opts,
        )
        .unwrap();
        assert_eq!(by_radius.components()[0].n_last(), 112);
    }

    #[test]
    fn region_lookup_follows_parity() {
        let d = spring8();
        let plate = CompoundZonePlate::single(d, 1, 0, 10, GeometryKind::Circular).unwrap();
        assert_eq!(plate.region_at(0.0), Some(Region::Groove));
        assert_eq!(plate.region_at(0.99 * d.sigma()), Some(Region::Groove));
        assert_eq!(plate.region_at(1.01 * d.sigma()), Some(Region::Ridge));
        assert_eq!(plate.region_at(-1.01 * d.sigma()), Some(Region::Ridge));
        assert_eq!(plate.region_at(plate.aperture_radius() * 1.001), None);
    }

    #[test]
    fn exact_width_approaches_asymptotic_form() {
        let d = spring8();
        for (m, j) in [
            (1u32, 0i32),
            (2, 1),
            (2, -1),
            (3, 2),
            (3, -2),
            (3, 0),
            (5, 4),
            (4, -3),
        ] {
            let c = ZoneComponent::new(m, j, 1, 2000, GeometryKind::Circular).unwrap();
            for n in 50..2000 {
                let exact = c.exact_width(&d, n);
                let approx = zone_width(&d, m, j, n).unwrap();
                assert!(
                    ((exact - approx) / approx).abs() < 0.01,
                    "m={m} j={j} n={n}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn zone_radius_increases_with_n(m in 1u32..12, jraw in 0i32..24, n in 1u64..5000) {
            let j = jraw % (2 * m as i32 - 1) - (m as i32 - 1);
            let d = spring8();
            let a = zone_radius(&d, m, j, n).unwrap();
            let b = zone_radius(&d, m, j, n + 1).unwrap();
            prop_assert!(b > a);
        }

        #[test]
        fn plus_minus_j_swap_widths(m in 2u32..12, jraw in 1i32..11, n in 1u64..5000) {
            let j = 1 + (jraw - 1) % (m as i32 - 1);
            let d = spring8();
            // odd width with +j equals even width with -j once the common
            // 1/sqrt(n) factor is removed
            let odd = if n % 2 == 1 { n } else { n + 1 };
            let even = odd + 1;
            let w_plus = zone_width(&d, m, j, odd).unwrap() * (odd as f64).sqrt();
            let w_minus = zone_width(&d, m, -j, even).unwrap() * (even as f64).sqrt();
            prop_assert!(rel(w_plus, w_minus) < 1e-14);
            let e_plus = zone_width(&d, m, j, even).unwrap() * (even as f64).sqrt();
            let o_minus = zone_width(&d, m, -j, odd).unwrap() * (odd as f64).sqrt();
            prop_assert!(rel(e_plus, o_minus) < 1e-14);
        }
    }
}
