//! File formats: zone tables, SVG renderings, profile and field dumps,
//! efficiency tables and metrics. Lengths are written in micrometres.
//!
//! Every number goes through [`fmt_num`], so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;
use std::io::Write;

use crate::efficiency::OrderRow;
use crate::error::Result;
use crate::geometry::{CompoundZonePlate, GeometryKind, Region};
use crate::propagation::{IntensityCurve, KnifeEdgeCurve, ScalarField};
use crate::transmission::{ProfileKind, TransmissionProfile};

const UM: f64 = 1e6;

pub const ZONE_TABLE_HEADER: [&str; 6] = [
    "n",
    "r_inner_um",
    "r_outer_um",
    "width_um",
    "region",
    "component_index",
];

/// Fixed scientific notation with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// One row per half-zone, innermost first; `component_index` counts from 0.
pub fn write_zone_table<W: Write>(plate: &CompoundZonePlate, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(ZONE_TABLE_HEADER)?;
    for hz in plate.half_zones() {
        out.write_record([
            hz.n.to_string(),
            fmt_num(hz.r_inner * UM),
            fmt_num(hz.r_outer * UM),
            fmt_num(hz.width() * UM),
            hz.region.as_str().to_string(),
            hz.component.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_profile<W: Write>(profile: &TransmissionProfile, w: W) -> Result<()> {
    let mut out = writer(w);
    let axis = match profile.kind() {
        ProfileKind::Radial => "r_um",
        ProfileKind::Lateral => "x_um",
    };
    out.write_record([axis, "re_t", "im_t"])?;
    for (i, t) in profile.samples().iter().enumerate() {
        out.write_record([
            fmt_num(profile.position(i) * UM),
            fmt_num(t.re),
            fmt_num(t.im),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Intensity on the field's native grid: `rho_um` for radial fields, `x_um`
/// for lateral ones.
pub fn write_psf<W: Write>(field: &ScalarField, w: W) -> Result<()> {
    let axis = match field.kind() {
        ProfileKind::Radial => "rho_um",
        ProfileKind::Lateral => "x_um",
    };
    write_curve(&field.intensity(), axis, w)
}

pub fn write_curve<W: Write>(curve: &IntensityCurve, axis: &str, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record([axis, "intensity"])?;
    for (x, v) in curve.positions.iter().zip(&curve.values) {
        out.write_record([fmt_num(x * UM), fmt_num(*v)])?;
    }
    out.flush()?;
    Ok(())
}

/// Flux in the field's units (incident intensity x m or m^2); derivative per m.
pub fn write_knife_edge<W: Write>(curve: &KnifeEdgeCurve, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["x_um", "flux", "derivative"])?;
    for i in 0..curve.positions.len() {
        out.write_record([
            fmt_num(curve.positions[i] * UM),
            fmt_num(curve.transmitted_flux[i]),
            fmt_num(curve.derivative[i]),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_order_table<W: Write>(rows: &[OrderRow], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "k",
        "efficiency_relative",
        "efficiency_absolute",
        "efficiency_ideal",
    ])?;
    for r in rows {
        out.write_record([
            r.k.to_string(),
            fmt_num(r.relative),
            fmt_num(r.absolute),
            fmt_num(r.ideal),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_slitness_scan<W: Write>(scan: &[(f64, f64)], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["S", "efficiency"])?;
    for (s, e) in scan {
        out.write_record([fmt_num(*s), fmt_num(*e)])?;
    }
    out.flush()?;
    Ok(())
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    entries: Vec<(String, String)>,
}

impl Metrics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn number(&mut self, key: &str, value: f64) -> &mut Self {
        self.entries.push((key.to_string(), fmt_num(value)));
        self
    }

    pub fn text(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "{k} = {v}")?;
        }
        Ok(())
    }

    /// Parses the output of [`Metrics::write`].
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|line| line.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self { entries }
    }
}

/// Largest 1-2-5 length not exceeding `limit`.
fn nice_length(limit: f64) -> f64 {
    let decade = 10f64.powf(limit.log10().floor());
    [5.0, 2.0, 1.0]
        .into_iter()
        .map(|k| k * decade)
        .find(|&v| v <= limit)
        .unwrap_or(decade)
}

/// Plan view of the plate in micrometres. Grooves are drawn filled: rings as
/// stroked circles on the mid radius, strips as rectangles of the aperture's
/// full height. The view box spans the aperture with a 5% margin.
pub fn render_svg(plate: &CompoundZonePlate) -> String {
    let r = plate.aperture_radius() * UM;
    let half = 1.05 * r;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
        fmt_num(-half),
        fmt_num(-half),
        fmt_num(2.0 * half),
        fmt_num(2.0 * half)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{0}" y="{0}" width="{1}" height="{1}" fill="white"/>"#,
        fmt_num(-half),
        fmt_num(2.0 * half)
    );
    let _ = writeln!(svg, r#"<g fill="black" stroke="none">"#);
    for hz in plate
        .half_zones()
        .iter()
        .filter(|hz| hz.region == Region::Groove)
    {
        let (a, b) = (hz.r_inner * UM, hz.r_outer * UM);
        match plate.kind() {
            GeometryKind::Circular if a == 0.0 => {
                let _ = writeln!(svg, r#"<circle cx="0" cy="0" r="{}"/>"#, fmt_num(b));
            }
            GeometryKind::Circular => {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="0" cy="0" r="{}" fill="none" stroke="black" stroke-width="{}"/>"#,
                    fmt_num(0.5 * (a + b)),
                    fmt_num(b - a)
                );
            }
            GeometryKind::Linear => {
                for x in if a == 0.0 { vec![-b] } else { vec![a, -b] } {
                    let width = if a == 0.0 { 2.0 * b } else { b - a };
                    let _ = writeln!(
                        svg,
                        r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                        fmt_num(x),
                        fmt_num(-r),
                        fmt_num(width),
                        fmt_num(2.0 * r)
                    );
                }
            }
        }
    }
    let _ = writeln!(svg, "</g>");
    let bar = nice_length(0.4 * r);
    let (x0, y0) = (-r, 1.02 * r);
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" stroke-width="{}"/>"#,
        fmt_num(x0),
        fmt_num(y0),
        fmt_num(x0 + bar),
        fmt_num(y0),
        fmt_num(0.005 * r)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="{}" fill="red">{} um</text>"#,
        fmt_num(x0 + bar + 0.01 * r),
        fmt_num(y0 + 0.01 * r),
        fmt_num(0.03 * r),
        bar
    );
    svg.push_str("</svg>\n");
    svg
}
