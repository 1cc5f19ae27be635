//! The four subcommands. Each writes its files into `out` and returns the
//! text to print.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use zoneplate::efficiency::{
    order_table, slitness_grid, slitness_scan, GratingModel, RegionTransmission,
};
use zoneplate::export::{
    render_svg, write_knife_edge, write_order_table, write_psf, write_slitness_scan,
    write_zone_table, Metrics,
};
use zoneplate::geometry::{first_order_limit_aperture, GeometryKind};
use zoneplate::propagation::{
    first_minimum, focal_efficiency, fwhm, knife_edge_positions, knife_edge_scan, line_marginal,
    nearest_focus_order, propagate, OutputGrid,
};
use zoneplate::transmission::{
    ideal_phase_profile, sample_profile, SamplingOptions, TransmissionProfile,
};
use zoneplate::{Error, Result};

use crate::config::{RunConfig, Setup};

const UM: f64 = 1e6;

/// Orders listed when `--orders` is absent.
pub const DEFAULT_ORDERS: std::ops::RangeInclusive<i64> = -7..=7;

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(out)?;
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn written(files: &[PathBuf]) -> String {
    files
        .iter()
        .map(|f| format!("wrote {}\n", f.display()))
        .collect()
}

fn um(x: f64) -> String {
    format!("{:.6}", x * UM)
}

/// Human-readable design summary as `key = value` lines.
pub fn design_summary(setup: &Setup, min_feature: f64) -> Result<Metrics> {
    let Setup {
        design, oc, plate, ..
    } = setup;
    let mut s = Metrics::new();
    s.text("energy_kev", format!("{:.6}", oc.energy_ev() / 1e3))
        .text("wavelength_um", format!("{:.9}", design.wavelength() * UM))
        .text("focal_length_um", um(design.focal_length()))
        .text("geometry", plate.kind())
        .text("sigma_um", um(design.sigma()))
        .text("r1_um", um(plate.components()[0].boundary(design, 1)))
        .text("half_zones", plate.half_zone_count())
        .text("aperture_um", um(plate.aperture()))
        .text("min_zone_width_um", um(plate.min_zone_width()))
        .text("material", plate.material())
        .text("relief_height_um", um(plate.relief_height()))
        .text("pi_height_um", um(oc.pi_height()?))
        .text(
            "relief_phase_pi",
            format!(
                "{:.6}",
                oc.phase_shift(plate.relief_height())?.abs() / std::f64::consts::PI
            ),
        )
        .text("membrane_thickness_um", um(plate.membrane_thickness()))
        .text(
            "membrane_transmission",
            format!(
                "{:.6}",
                oc.intensity_transmission(plate.membrane_thickness())?
            ),
        )
        .text(
            "relief_average_transmission",
            format!(
                "{:.6}",
                oc.relief_average_transmission(plate.relief_height())?
            ),
        )
        .text("min_feature_um", um(min_feature));
    let a1 = first_order_limit_aperture(design, min_feature)?;
    for (i, c) in plate.components().iter().enumerate() {
        s.text(
            &format!("component_{i}"),
            format!(
                "m={} j={} n={}..{} r={}..{} um slitness={:.6}",
                c.order(),
                c.offset(),
                c.n_first(),
                c.n_last(),
                um(c.inner_radius(design)),
                um(c.outer_radius(design)),
                c.slitness()
            ),
        );
    }
    s.text("first_order_limit_aperture_um", um(a1)).text(
        "aperture_extension_ratio",
        format!("{:.6}", plate.aperture() / a1),
    );
    Ok(s)
}

pub fn design(cfg: &RunConfig, out: &Path) -> Result<String> {
    let setup = cfg.build()?;
    let summary = design_summary(&setup, cfg.min_feature)?;
    write_zone_table(&setup.plate, create(out, "zones.csv")?)?;
    fs::write(out.join("plate.svg"), render_svg(&setup.plate))?;
    summary.write(create(out, "summary.txt")?)?;
    let mut text = Vec::new();
    summary.write(&mut text)?;
    let files = ["zones.csv", "plate.svg", "summary.txt"].map(|f| out.join(f));
    Ok(String::from_utf8_lossy(&text).into_owned() + &written(&files))
}

pub struct EfficiencyOptions {
    pub orders: Option<Vec<i64>>,
    /// `(lo, hi, step)`.
    pub scan: Option<(f64, f64, f64)>,
    pub lossless: bool,
}

pub fn efficiency(cfg: &RunConfig, out: &Path, opts: &EfficiencyOptions) -> Result<String> {
    let setup = cfg.build()?;
    let plate = &setup.plate;
    let regions = if opts.lossless {
        RegionTransmission::lossless()
    } else {
        RegionTransmission::from_material(
            &setup.oc,
            plate.relief_height(),
            plate.membrane_thickness(),
        )?
    };
    let orders: Vec<i64> = opts
        .orders
        .clone()
        .unwrap_or_else(|| DEFAULT_ORDERS.collect());
    let mut text = String::new();
    let mut files = Vec::new();
    for c in plate.components() {
        let m = c.order();
        let model = GratingModel::with_regions(&regions, c.slitness(), m)?;
        let rows = order_table(&model, regions.membrane_intensity, &orders)?;
        let name = format!("orders_m{m}.csv");
        write_order_table(&rows, create(out, &name)?)?;
        files.push(out.join(name));
        let k = i64::from(m);
        text += &format!(
            "m={m} j={} S={:.6}: k={k} relative={:.6} absolute={:.6} ideal={:.6}; k=0 relative={:.6}\n",
            c.offset(),
            c.slitness(),
            model.order_efficiency(k),
            model.order_efficiency(k) * regions.membrane_intensity,
            GratingModel::lossless_phase(c.slitness(), m)?.order_efficiency(k),
            model.order_efficiency(0),
        );
        if let Some((lo, hi, step)) = opts.scan {
            let grid = slitness_grid(lo, hi, step)?;
            let scan = slitness_scan(m, k, &grid, &regions)?;
            let name = format!("slitness_scan_m{m}.csv");
            write_slitness_scan(&scan, create(out, &name)?)?;
            files.push(out.join(name));
        }
    }
    Ok(text + &written(&files))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plane {
    Focus,
    /// Metres behind the plate.
    Distance(f64),
}

pub struct SimulateOptions {
    pub plane: Plane,
    pub knife_edge: bool,
    pub lossless: bool,
}

fn sampling(cfg: &RunConfig) -> SamplingOptions {
    SamplingOptions {
        spacing: cfg.spacing,
        ..SamplingOptions::default()
    }
}

pub fn profile(cfg: &RunConfig, setup: &Setup, lossless: bool) -> Result<TransmissionProfile> {
    if lossless {
        ideal_phase_profile(&setup.plate, &sampling(cfg))
    } else {
        sample_profile(&setup.plate, &setup.oc, &sampling(cfg))
    }
}

pub fn output_grid(cfg: &RunConfig, profile: &TransmissionProfile, z: f64) -> Result<OutputGrid> {
    let default = OutputGrid::default_for(profile, z)?;
    OutputGrid::new(
        cfg.output_spacing.unwrap_or(default.spacing),
        cfg.output_extent.unwrap_or(default.extent),
    )
}

pub fn simulate(cfg: &RunConfig, out: &Path, opts: &SimulateOptions) -> Result<String> {
    let setup = cfg.build()?;
    let f = setup.design.focal_length();
    let z = match opts.plane {
        Plane::Focus => f,
        Plane::Distance(z) => z,
    };
    let profile = profile(cfg, &setup, opts.lossless)?;
    let grid = output_grid(cfg, &profile, z)?;
    let field = propagate(&profile, z, &grid)?;
    let width = field.fwhm()?;
    let eff = focal_efficiency(&field, None)?;
    let mut metrics = Metrics::new();
    metrics
        .number("distance_um", z * UM)
        .text("nearest_focus_order", nearest_focus_order(f, z))
        .number("fwhm_um", width * UM);
    if setup.plate.kind() == GeometryKind::Circular {
        match first_minimum(&field.intensity()) {
            Ok(rho) => metrics.number("first_minimum_um", rho * UM),
            Err(_) => metrics.text("first_minimum_um", "none"),
        };
    }
    metrics
        .number("efficiency_relative", eff.relative)
        .number("efficiency_absolute", eff.absolute)
        .number("integration_radius_um", eff.integration_radius * UM)
        .number("peak_intensity", field.peak_intensity())
        .number("peak_position_um", field.peak_position() * UM)
        .number(
            "transmitted_fraction",
            profile.mean_intensity_transmission(),
        )
        .number("profile_spacing_um", profile.spacing() * UM)
        .number("output_spacing_um", grid.spacing * UM)
        .number("output_extent_um", grid.extent * UM);
    write_psf(&field, create(out, "psf.csv")?)?;
    let mut files = vec![out.join("psf.csv")];
    if opts.knife_edge {
        let edge = knife_edge_scan(&field, &knife_edge_positions(&field, field.extent()))?;
        write_knife_edge(&edge, create(out, "knife_edge.csv")?)?;
        files.push(out.join("knife_edge.csv"));
        metrics
            .number("knife_edge_fwhm_um", fwhm(&edge.derivative_curve())? * UM)
            .number("line_spread_fwhm_um", fwhm(&line_marginal(&field))? * UM);
    }
    metrics.write(create(out, "metrics.txt")?)?;
    files.push(out.join("metrics.txt"));
    let mut text = Vec::new();
    metrics.write(&mut text)?;
    Ok(String::from_utf8_lossy(&text).into_owned() + &written(&files))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Svg,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            other => Err(Error::Config(format!(
                "unknown export format '{other}' (expected csv or svg)"
            ))),
        }
    }
}

pub fn export(cfg: &RunConfig, out: &Path, format: ExportFormat) -> Result<String> {
    let setup = cfg.build()?;
    let file = match format {
        ExportFormat::Csv => {
            write_zone_table(&setup.plate, create(out, "zones.csv")?)?;
            out.join("zones.csv")
        }
        ExportFormat::Svg => {
            fs::create_dir_all(out)?;
            fs::write(out.join("plate.svg"), render_svg(&setup.plate))?;
            out.join("plate.svg")
        }
    };
    Ok(written(&[file]))
}
