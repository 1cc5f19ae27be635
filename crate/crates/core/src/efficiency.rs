//! Local-grating model of diffraction-order efficiencies.
//!
//! Over a few half-zones a zone plate looks like a binary grating whose
//! period contains one groove (fraction `S`) and one ridge. Order `k` of
//! that grating feeds the `f/k` focus, and its Fourier coefficient, with the
//! groove centred on the origin, is
//!
//! ```text
//! c_0 = S t_groove + (1 - S) t_ridge
//! c_k = (t_groove - t_ridge) sin(pi k S) / (pi k)
//! ```
//!
//! For a lossless pi-phase grating (`t_groove = 1`, `t_ridge = -1`) and
//! `S = (m - j) / 2m` this gives `|c_m|^2 = 4 / (pi m)^2` whenever `m - j`
//! is odd and `|c_0|^2 = (j / m)^2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{validate_order_pair, ZoneComponent};
use crate::materials::OpticalConstants;

/// Passivity slack for `|t| <= 1` checks.
const PASSIVE_SLACK: f64 = 1e-12;

/// Two-level grating with arbitrary complex region transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingModel {
    t_ridge: Complex64,
    t_groove: Complex64,
    slitness: f64,
    design_order: u32,
}

impl GratingModel {
    pub fn new(
        t_ridge: Complex64,
        t_groove: Complex64,
        slitness: f64,
        design_order: u32,
    ) -> Result<Self> {
        for t in [t_ridge, t_groove] {
            if !(t.norm() <= 1.0 + PASSIVE_SLACK) {
                return Err(Error::Domain {
                    what: "|region transmission|",
                    requirement: "<= 1 (passive element)",
                    value: t.norm(),
                });
            }
        }
        if !(0.0..=1.0).contains(&slitness) {
            return Err(Error::Domain {
                what: "slitness",
                requirement: "within [0, 1]",
                value: slitness,
            });
        }
        Ok(Self {
            t_ridge,
            t_groove,
            slitness,
            design_order,
        })
    }

    /// Lossless binary pi-phase grating.
    pub fn lossless_phase(slitness: f64, design_order: u32) -> Result<Self> {
        Self::new(
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            slitness,
            design_order,
        )
    }

    pub fn with_regions(
        regions: &RegionTransmission,
        slitness: f64,
        design_order: u32,
    ) -> Result<Self> {
        Self::new(regions.ridge, regions.groove, slitness, design_order)
    }

    pub fn t_ridge(&self) -> Complex64 {
        self.t_ridge
    }

    pub fn t_groove(&self) -> Complex64 {
        self.t_groove
    }

    pub fn slitness(&self) -> f64 {
        self.slitness
    }

    pub fn design_order(&self) -> u32 {
        self.design_order
    }

    pub fn fourier_coefficient(&self, k: i64) -> Complex64 {
        let s = self.slitness;
        if k == 0 {
            return self.t_groove * s + self.t_ridge * (1.0 - s);
        }
        let kf = k as f64;
        (self.t_groove - self.t_ridge) * (sin_pi(kf * s) / (PI * kf))
    }

    pub fn order_efficiency(&self, k: i64) -> f64 {
        self.fourier_coefficient(k).norm_sqr()
    }

    /// Sum of all order efficiencies: `S |t_groove|^2 + (1 - S) |t_ridge|^2`.
    pub fn total_transmission(&self) -> f64 {
        self.slitness * self.t_groove.norm_sqr() + (1.0 - self.slitness) * self.t_ridge.norm_sqr()
    }
}

/// `sin(pi x)`, exactly zero at integers and exactly +-1 at half-integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r == 1.5 {
        -1.0
    } else {
        (PI * r).sin()
    }
}

/// Complex amplitude factors of the two regions plus the membrane's
/// intensity transmission, which multiplies every order uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionTransmission {
    pub ridge: Complex64,
    pub groove: Complex64,
    pub membrane_intensity: f64,
}

impl RegionTransmission {
    pub fn lossless() -> Self {
        Self {
            ridge: Complex64::new(-1.0, 0.0),
            groove: Complex64::new(1.0, 0.0),
            membrane_intensity: 1.0,
        }
    }

    /// Ridges carry the full relief, grooves are etched through it.
    pub fn from_material(
        oc: &OpticalConstants,
        relief_height: f64,
        membrane_thickness: f64,
    ) -> Result<Self> {
        Ok(Self {
            ridge: oc.amplitude_transmission(relief_height)?,
            groove: Complex64::new(1.0, 0.0),
            membrane_intensity: oc.intensity_transmission(membrane_thickness)?,
        })
    }
}

/// Efficiency of one component in its design order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentEfficiency {
    pub order: u32,
    pub offset: i32,
    pub slitness: f64,
    /// Membrane factored out.
    pub relative: f64,
    /// Including the membrane.
    pub absolute: f64,
    /// Lossless pi-phase grating at the same slitness.
    pub ideal: f64,
}

pub fn focusing_efficiency_of_component(
    c: &ZoneComponent,
    regions: &RegionTransmission,
) -> Result<ComponentEfficiency> {
    let (m, j) = (c.order(), c.offset());
    validate_order_pair(m, j).into_result(m, j)?;
    let s = c.slitness();
    let k = i64::from(m);
    let relative = GratingModel::with_regions(regions, s, m)?.order_efficiency(k);
    Ok(ComponentEfficiency {
        order: m,
        offset: j,
        slitness: s,
        relative,
        absolute: relative * regions.membrane_intensity,
        ideal: GratingModel::lossless_phase(s, m)?.order_efficiency(k),
    })
}

/// One row of an order table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderRow {
    pub k: i64,
    pub relative: f64,
    pub absolute: f64,
    pub ideal: f64,
}

pub fn order_table(
    model: &GratingModel,
    membrane_intensity: f64,
    orders: &[i64],
) -> Result<Vec<OrderRow>> {
    let ideal = GratingModel::lossless_phase(model.slitness(), model.design_order())?;
    Ok(orders
        .iter()
        .map(|&k| {
            let relative = model.order_efficiency(k);
            OrderRow {
                k,
                relative,
                absolute: relative * membrane_intensity,
                ideal: ideal.order_efficiency(k),
            }
        })
        .collect())
}

/// Efficiency of order `k` for each slitness in `grid`, as `(S, efficiency)`.
pub fn slitness_scan(
    design_order: u32,
    k: i64,
    grid: &[f64],
    regions: &RegionTransmission,
) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&s| {
            let g = GratingModel::with_regions(regions, s, design_order)?;
            Ok((s, g.order_efficiency(k)))
        })
        .collect()
}

/// Inclusive `lo:hi:step` grid, with the end point snapped onto the grid.
pub fn slitness_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::Config(format!(
            "bad slitness range {lo}:{hi}:{step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{slitness, GeometryKind};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lossless_half_slit_orders() {
        let g = GratingModel::lossless_phase(0.5, 1).unwrap();
        assert!((g.order_efficiency(1) - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!((g.order_efficiency(1) - 0.4053).abs() < 1e-4);
        assert_eq!(g.order_efficiency(2), 0.0);
        assert_eq!(g.order_efficiency(0), 0.0);
    }

    #[test]
    fn uniform_screen() {
        let t = c(0.3, -0.4);
        let g = GratingModel::new(c(0.9, 0.1), t, 1.0, 1).unwrap();
        assert_eq!(g.fourier_coefficient(0), t);
        for k in 1..20 {
            assert!(g.fourier_coefficient(k).norm() < 1e-16);
        }
    }

    #[test]
    fn third_order_pair() {
        let g = GratingModel::lossless_phase(slitness(3, 2).unwrap(), 3).unwrap();
        assert!((g.order_efficiency(3) - 4.0 / (9.0 * PI * PI)).abs() < 1e-15);
        assert!((g.order_efficiency(3) - 0.04503).abs() < 1e-5);
        assert!((g.order_efficiency(0) - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn realistic_first_order() {
        let tr = Complex64::from_polar(0.927, -1.037 * PI);
        let g = GratingModel::new(tr, c(1.0, 0.0), 0.5, 1).unwrap();
        // frozen from the FFT oracle in tests/grating_oracle.rs
        assert!((g.order_efficiency(1) - 0.374_971).abs() < 2e-6);
    }

    #[test]
    fn component_efficiencies() {
        let lossless = RegionTransmission::lossless();
        let comp = |m, j| ZoneComponent::new(m, j, 1, 10, GeometryKind::Circular).unwrap();
        let e = focusing_efficiency_of_component(&comp(1, 0), &lossless).unwrap();
        assert!((e.relative - 0.4053).abs() < 1e-4);
        let e = focusing_efficiency_of_component(&comp(2, 1), &lossless).unwrap();
        assert!((e.relative - 1.0 / (PI * PI)).abs() < 1e-15);
        let e = focusing_efficiency_of_component(&comp(3, 0), &lossless).unwrap();
        assert!((e.relative - 4.0 / (9.0 * PI * PI)).abs() < 1e-15);
        assert_eq!(e.relative, e.ideal);
        assert!(matches!(
            focusing_efficiency_of_component(&comp(2, 0), &lossless),
            Err(Error::InvalidOrderPair { .. })
        ));
    }

    #[test]
    fn membrane_scales_absolute_only() {
        let regions = RegionTransmission {
            membrane_intensity: 0.79,
            ..RegionTransmission::lossless()
        };
        let comp = ZoneComponent::new(1, 0, 1, 10, GeometryKind::Circular).unwrap();
        let e = focusing_efficiency_of_component(&comp, &regions).unwrap();
        assert!((e.absolute - 0.79 * e.relative).abs() < 1e-15);
    }

    #[test]
    fn second_order_scan() {
        let grid = [1e-9, 0.25, 0.5];
        let scan = slitness_scan(2, 2, &grid, &RegionTransmission::lossless()).unwrap();
        assert!(scan[0].1 < 1e-15);
        assert!((scan[1].1 - 1.0 / (PI * PI)).abs() < 1e-15);
        assert!((scan[1].1 - 0.1013).abs() < 1e-4);
        assert!(scan[2].1 < 1e-30);
    }

    #[test]
    fn grid_parsing() {
        let g = slitness_grid(0.1, 0.9, 0.1).unwrap();
        assert_eq!(g.len(), 9);
        assert!((g[4] - 0.5).abs() < 1e-15);
        assert!(slitness_grid(0.5, 0.1, 0.1).is_err());
        assert!(slitness_grid(0.1, 0.5, 0.0).is_err());
    }

    #[test]
    fn order_table_carries_ideal_column() {
        let tr = Complex64::from_polar(0.927, -1.037 * PI);
        let g = GratingModel::new(tr, c(1.0, 0.0), 0.5, 1).unwrap();
        let rows = order_table(&g, 0.79, &[0, 1, 2, 3]).unwrap();
        assert!((rows[1].ideal - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!(rows[1].relative < rows[1].ideal);
        assert_eq!(rows[2].relative, 0.0);
    }

    #[test]
    fn criterion_pairs_maximise_design_order() {
        for m in 1..=10u32 {
            let mi = m as i32;
            let effs: Vec<(i32, f64)> = (-(mi - 1)..mi)
                .map(|j| {
                    let g = GratingModel::lossless_phase(slitness(m, j).unwrap(), m).unwrap();
                    (j, g.order_efficiency(i64::from(m)))
                })
                .collect();
            let best = effs.iter().map(|e| e.1).fold(0.0, f64::max);
            for (j, e) in effs {
                let valid = validate_order_pair(m, j).valid;
                let at_max = (e - best).abs() < 1e-12;
                assert_eq!(valid, at_max, "m={m} j={j}");
                if valid {
                    let s = slitness(m, j).unwrap();
                    assert!(((PI * f64::from(m) * s).sin().abs() - 1.0).abs() < 1e-12);
                    assert!((e - 4.0 / (PI * PI * f64::from(m * m))).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_order_is_j_over_m_squared() {
        for m in 1..=10u32 {
            for j in -(m as i32 - 1)..(m as i32) {
                let g = GratingModel::lossless_phase(slitness(m, j).unwrap(), m).unwrap();
                let want = (f64::from(j) / f64::from(m)).powi(2);
                assert!((g.order_efficiency(0) - want).abs() < 1e-15, "m={m} j={j}");
            }
        }
    }

    fn arb_t() -> impl Strategy<Value = Complex64> {
        (0.0..=1.0f64, -PI..PI).prop_map(|(r, p)| Complex64::from_polar(r, p))
    }

    proptest! {
        #[test]
        fn parseval_holds_with_truncation(tr in arb_t(), tg in arb_t(), s in 0.01..0.99f64) {
            let g = GratingModel::new(tr, tg, s, 1).unwrap();
            let sum: f64 = (-1000..=1000).map(|k| g.order_efficiency(k)).sum();
            prop_assert!((sum - g.total_transmission()).abs() < 1e-3);
        }

        #[test]
        fn plus_minus_j_give_same_design_order(m in 2u32..12, jraw in 0i32..20) {
            let j = jraw % m as i32;
            let plus = GratingModel::lossless_phase(slitness(m, j).unwrap(), m).unwrap();
            let minus = GratingModel::lossless_phase(slitness(m, -j).unwrap(), m).unwrap();
            let k = i64::from(m);
            prop_assert!((plus.order_efficiency(k) - minus.order_efficiency(k)).abs() < 1e-15);
        }
    }
}
