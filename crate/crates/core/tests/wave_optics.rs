//! End-to-end wave-optics properties of sampled plates: higher-order foci,
//! agreement with the grating model, the +-j duality and knife-edge
//! consistency.

use num_complex::Complex64;
use zoneplate::efficiency::{GratingModel, RegionTransmission};
use zoneplate::geometry::{CompoundZonePlate, DesignParams, GeometryKind};
use zoneplate::materials::ConstantsTable;
use zoneplate::propagation::{
    fwhm, knife_edge_positions, knife_edge_scan, line_marginal, propagate, OutputGrid, ScalarField,
};
use zoneplate::transmission::{
    ideal_phase_profile, sample_profile, SamplingOptions, TransmissionProfile,
};

const F: f64 = 0.46;

fn design() -> DesignParams {
    DesignParams::from_energy(8050.0, F).unwrap()
}

fn ideal(m: u32, j: i32, n: u64, kind: GeometryKind) -> TransmissionProfile {
    let plate = CompoundZonePlate::single(design(), m, j, n, kind).unwrap();
    ideal_phase_profile(&plate, &SamplingOptions::default()).unwrap()
}

fn focus(p: &TransmissionProfile, z: f64) -> ScalarField {
    propagate(p, z, &OutputGrid::default_for(p, z).unwrap()).unwrap()
}

fn max_diff_over_peak(a: &ScalarField, b: &ScalarField) -> f64 {
    let peak = a.peak_intensity().max(b.peak_intensity());
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
        .fold(0.0, f64::max)
        / peak
}

#[test]
fn third_order_focus_of_first_order_plate() {
    let p = ideal(1, 0, 112, GeometryKind::Circular);
    let i1 = focus(&p, F).peak_intensity();
    // a third of the focal length: 1/9 of the efficiency into a spot of 1/9 the area
    let i3 = focus(&p, F / 3.0).peak_intensity();
    let ratio = i3 / i1;
    println!("I(f/3) / I(f) = {ratio:.4}");
    assert!((ratio - 1.0).abs() < 0.03, "{ratio}");
}

#[test]
fn wavefield_efficiency_matches_grating_model() {
    let oc = ConstantsTable::silicon().load_constants(8050.0).unwrap();
    let plate = CompoundZonePlate::single(design(), 1, 0, 112, GeometryKind::Circular)
        .unwrap()
        .with_relief_height(10.5e-6)
        .with_membrane_thickness(16e-6);
    let regions = RegionTransmission::from_material(&oc, 10.5e-6, 16e-6).unwrap();
    let cases = [
        (
            ideal_phase_profile(&plate, &SamplingOptions::default()).unwrap(),
            GratingModel::lossless_phase(0.5, 1).unwrap(),
        ),
        (
            sample_profile(&plate, &oc, &SamplingOptions::default()).unwrap(),
            GratingModel::with_regions(&regions, 0.5, 1).unwrap(),
        ),
    ];
    for (profile, model) in cases {
        let u = focus(&profile, F);
        let radius = 20.0 * u.fwhm().unwrap();
        let e = zoneplate::propagation::focal_efficiency(&u, Some(radius)).unwrap();
        let want = model.order_efficiency(1);
        println!("wavefield {:.4} vs grating {:.4}", e.relative, want);
        assert!(((e.relative - want) / want).abs() < 0.03);
    }
}

#[test]
fn plus_minus_j_focal_intensities_agree() {
    for (m, j) in [(2, 1), (3, 2)] {
        let plus = ideal(m, j, 400, GeometryKind::Circular);
        let minus = ideal(m, -j, 400, GeometryKind::Circular);
        assert!((plus.aperture_radius() - minus.aperture_radius()).abs() < 1e-12);
        let g = OutputGrid::default_for(&plus, F).unwrap();
        let (a, b) = (
            propagate(&plus, F, &g).unwrap(),
            propagate(&minus, F, &g).unwrap(),
        );
        let d = max_diff_over_peak(&a, &b);
        println!("(m={m}, j=+-{j}) radial duality {d:.5}");
        assert!(d < 0.005, "{d}");
    }
}

#[test]
fn lateral_duality_improves_with_zone_count() {
    // line foci converge more slowly in the zone count than circular ones
    let mut last = f64::INFINITY;
    for n in [60, 120, 240] {
        let plus = ideal(2, 1, n, GeometryKind::Linear);
        let minus = ideal(2, -1, n, GeometryKind::Linear);
        let g = OutputGrid::default_for(&plus, F).unwrap();
        let d = max_diff_over_peak(
            &propagate(&plus, F, &g).unwrap(),
            &propagate(&minus, F, &g).unwrap(),
        );
        println!("lateral duality N={n}: {d:.4}");
        assert!(d < last);
        last = d;
    }
}

#[test]
fn knife_edge_derivative_recovers_line_spread() {
    let p = ideal(1, 0, 112, GeometryKind::Circular);
    let u = focus(&p, F);
    let marginal = fwhm(&line_marginal(&u)).unwrap();
    let edge = knife_edge_scan(&u, &knife_edge_positions(&u, 3e-6)).unwrap();
    let lsf = fwhm(&edge.derivative_curve()).unwrap();
    println!(
        "psf {:.4} um, marginal {:.4} um, knife-edge {:.4} um",
        u.fwhm().unwrap() * 1e6,
        marginal * 1e6,
        lsf * 1e6
    );
    assert!(((lsf - marginal) / marginal).abs() < 0.02);
}

#[test]
fn membrane_only_lowers_absolute_efficiency() {
    let oc = ConstantsTable::silicon().load_constants(8050.0).unwrap();
    let base = CompoundZonePlate::single(design(), 1, 0, 112, GeometryKind::Circular)
        .unwrap()
        .with_relief_height(10.5e-6);
    let thin = sample_profile(&base, &oc, &SamplingOptions::default()).unwrap();
    let thick = sample_profile(
        &base.clone().with_membrane_thickness(16e-6),
        &oc,
        &SamplingOptions::default(),
    )
    .unwrap();
    let (a, b) = (focus(&thin, F), focus(&thick, F));
    let ea = zoneplate::propagation::focal_efficiency(&a, None).unwrap();
    let eb = zoneplate::propagation::focal_efficiency(&b, None).unwrap();
    assert!((ea.relative - eb.relative).abs() < 1e-9);
    assert!((eb.absolute / ea.absolute - thick.membrane_intensity()).abs() < 1e-9);
    assert_ne!(thick.samples()[0], Complex64::new(1.0, 0.0));
}
