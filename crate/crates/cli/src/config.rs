//! Run configuration: flat `key = value` text, one `component` line per plan
//! entry, `#` comments. Lengths in micrometres, energy in keV.
//!
//! ```text
//! energy_kev = 8.05
//! focal_length_um = 460000
//! component = 1,0,112      # m, j, half-zone count
//! component = 3,2,max      # ... or up to the fabrication limit
//! component = 5,4,400um    # ... or up to an outer radius
//! relief_height_um = 10.5
//! membrane_thickness_um = 16
//! ```

use std::path::{Path, PathBuf};

use zoneplate::geometry::{
    assemble_compound, AssemblyOptions, CompoundZonePlate, DesignParams, Extent, GeometryKind,
    PlanEntry, DEFAULT_MIN_FEATURE,
};
use zoneplate::materials::{
    energy_from_wavelength, wavelength_from_energy, ConstantsTable, OpticalConstants,
};
use zoneplate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    EnergyEv(f64),
    /// Metres.
    Wavelength(f64),
}

/// Parsed configuration, in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub focal_length: f64,
    pub plan: Vec<PlanEntry>,
    /// `None` selects the built-in silicon table.
    pub material_table: Option<PathBuf>,
    pub material: Option<String>,
    /// `None` selects the pi-height at the design energy.
    pub relief_height: Option<f64>,
    pub membrane_thickness: f64,
    pub min_feature: f64,
    pub geometry: GeometryKind,
    pub spacing: Option<f64>,
    pub output_extent: Option<f64>,
    pub output_spacing: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

fn config_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| config_err(line, format!("{key}: expected a number, got '{value}'")))
}

/// Parses a decimal number scaled by `10^exp`, shifting the exponent in the
/// text so that e.g. `10.5` um becomes exactly the literal `10.5e-6`.
fn parse_scaled(line: usize, key: &str, value: &str, exp: i32) -> Result<f64> {
    parse_f64(line, key, value)?;
    let (mantissa, e) = match value.split_once(['e', 'E']) {
        Some((m, e)) => (
            m,
            e.parse::<i32>()
                .map_err(|_| config_err(line, format!("{key}: bad exponent in '{value}'")))?,
        ),
        None => (value, 0),
    };
    parse_f64(line, key, &format!("{mantissa}e{}", e + exp))
}

fn parse_um(line: usize, key: &str, value: &str) -> Result<f64> {
    parse_scaled(line, key, value, -6)
}

fn parse_component(line: usize, value: &str) -> Result<PlanEntry> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(config_err(
            line,
            format!("component: expected 'm,j,extent', got '{value}'"),
        ));
    }
    let m = parts[0].parse::<u32>().map_err(|_| {
        config_err(
            line,
            format!("component order '{}' is not a positive integer", parts[0]),
        )
    })?;
    let j = parts[1].parse::<i32>().map_err(|_| {
        config_err(
            line,
            format!("component offset '{}' is not an integer", parts[1]),
        )
    })?;
    let extent = match parts[2] {
        "max" => Extent::FabricationLimit,
        s if s.ends_with("um") => Extent::OuterRadius(parse_um(
            line,
            "component radius",
            s.trim_end_matches("um").trim(),
        )?),
        s => Extent::HalfZones(s.parse::<u64>().map_err(|_| {
            config_err(
                line,
                format!("component extent '{s}' is not a count, radius (NNNum) or 'max'"),
            )
        })?),
    };
    Ok(PlanEntry::new(m, j, extent))
}

impl RunConfig {
    /// Parses config text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut energy = None;
        let mut wavelength = None;
        let mut focal_length = None;
        let mut plan = Vec::new();
        let mut cfg = RunConfig {
            source: Source::EnergyEv(0.0),
            focal_length: 0.0,
            plan: Vec::new(),
            material_table: None,
            material: None,
            relief_height: None,
            membrane_thickness: 0.0,
            min_feature: DEFAULT_MIN_FEATURE,
            geometry: GeometryKind::Circular,
            spacing: None,
            output_extent: None,
            output_spacing: None,
            output_dir: None,
        };
        let mut seen = std::collections::BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| {
                    config_err(line, format!("expected 'key = value', got '{content}'"))
                })?;
            if key != "component" && !seen.insert(key.to_string()) {
                return Err(config_err(line, format!("duplicate key '{key}'")));
            }
            match key {
                "energy_kev" => energy = Some(parse_scaled(line, key, value, 3)?),
                "wavelength_um" => wavelength = Some(parse_um(line, key, value)?),
                "focal_length_um" => focal_length = Some(parse_um(line, key, value)?),
                "component" => plan.push(parse_component(line, value)?),
                "material_table" => {
                    let path = base_dir.join(value);
                    if !path.is_file() {
                        return Err(config_err(
                            line,
                            format!("material table {} does not exist", path.display()),
                        ));
                    }
                    cfg.material_table = Some(path);
                }
                "material" => cfg.material = Some(value.to_string()),
                "relief_height_um" => cfg.relief_height = Some(parse_um(line, key, value)?),
                "membrane_thickness_um" => cfg.membrane_thickness = parse_um(line, key, value)?,
                "min_feature_um" => cfg.min_feature = parse_um(line, key, value)?,
                "geometry" => {
                    cfg.geometry = match value {
                        "circular" => GeometryKind::Circular,
                        "linear" => GeometryKind::Linear,
                        other => {
                            return Err(config_err(
                                line,
                                format!("geometry must be circular or linear, got '{other}'"),
                            ))
                        }
                    }
                }
                "spacing_um" => cfg.spacing = Some(parse_um(line, key, value)?),
                "output_extent_um" => cfg.output_extent = Some(parse_um(line, key, value)?),
                "output_spacing_um" => cfg.output_spacing = Some(parse_um(line, key, value)?),
                "output_dir" => cfg.output_dir = Some(base_dir.join(value)),
                other => return Err(config_err(line, format!("unknown key '{other}'"))),
            }
        }
        cfg.source = match (energy, wavelength) {
            (Some(e), None) => Source::EnergyEv(e),
            (None, Some(l)) => Source::Wavelength(l),
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give energy_kev or wavelength_um, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config("missing energy_kev or wavelength_um".into()))
            }
        };
        cfg.focal_length =
            focal_length.ok_or_else(|| Error::Config("missing focal_length_um".into()))?;
        if plan.is_empty() {
            return Err(Error::Config(
                "plan is empty: add at least one 'component = m,j,extent' line".into(),
            ));
        }
        cfg.plan = plan;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn energy_ev(&self) -> Result<f64> {
        match self.source {
            Source::EnergyEv(e) => Ok(e),
            Source::Wavelength(l) => energy_from_wavelength(l),
        }
    }

    pub fn wavelength(&self) -> Result<f64> {
        match self.source {
            Source::EnergyEv(e) => wavelength_from_energy(e),
            Source::Wavelength(l) => Ok(l),
        }
    }

    pub fn table(&self) -> Result<ConstantsTable> {
        match &self.material_table {
            Some(path) => ConstantsTable::from_csv_path(path),
            None => Ok(ConstantsTable::silicon()),
        }
    }

    /// Resolves the plan into a plate with its optical constants.
    pub fn build(&self) -> Result<Setup> {
        let table = self.table()?;
        let oc = table.load_constants(self.energy_ev()?)?;
        let design = DesignParams::new(self.wavelength()?, self.focal_length)?;
        let opts = AssemblyOptions {
            min_feature: self.min_feature,
            kind: self.geometry,
        };
        let relief = match self.relief_height {
            Some(h) => h,
            None => oc.pi_height()?,
        };
        let material = self
            .material
            .clone()
            .unwrap_or_else(|| table.material().to_string());
        let plate = assemble_compound(&design, &self.plan, &opts)?
            .with_relief_height(relief)
            .with_membrane_thickness(self.membrane_thickness)
            .with_material(material);
        Ok(Setup {
            design,
            table,
            oc,
            plate,
        })
    }
}

/// Everything derived from a config before any command runs.
#[derive(Debug, Clone)]
pub struct Setup {
    pub design: DesignParams,
    pub table: ConstantsTable,
    pub oc: OpticalConstants,
    pub plate: CompoundZonePlate,
}
