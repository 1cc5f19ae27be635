//! X-ray optical constants and the material quantities derived from them.
//!
//! The refractive index is written `n = 1 - delta + i*beta`. A thickness `t`
//! of material multiplies the wave by `exp(-2*pi*(beta + i*delta)*t/lambda)`,
//! so phase is retarded (negative) for positive `delta`.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Planck constant times speed of light, in eV * um.
pub const HC_EV_UM: f64 = 1.239_841_984_3;

/// Header expected on optical-constants CSV files.
pub const TABLE_HEADER: [&str; 3] = ["energy_eV", "delta", "beta"];

const SILICON_CSV: &str = include_str!("../data/si.csv");

/// Photon wavelength in meters for an energy in eV.
pub fn wavelength_from_energy(energy_ev: f64) -> Result<f64> {
    ensure_positive("photon energy", energy_ev)?;
    Ok(HC_EV_UM * 1e-6 / energy_ev)
}

/// Photon energy in eV for a wavelength in meters.
pub fn energy_from_wavelength(wavelength: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength)?;
    Ok(HC_EV_UM * 1e-6 / wavelength)
}

/// Refractive-index decrement of one material at one photon energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalConstants {
    energy_ev: f64,
    wavelength: f64,
    delta: f64,
    beta: f64,
}

impl OpticalConstants {
    pub fn new(energy_ev: f64, delta: f64, beta: f64) -> Result<Self> {
        let wavelength = wavelength_from_energy(energy_ev)?;
        if !delta.is_finite() || !beta.is_finite() {
            return Err(Error::Domain {
                what: "optical constant",
                requirement: "finite",
                value: if delta.is_finite() { beta } else { delta },
            });
        }
        Ok(Self {
            energy_ev,
            wavelength,
            delta,
            beta,
        })
    }

    pub fn energy_ev(&self) -> f64 {
        self.energy_ev
    }

    /// Wavelength in meters.
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Thickness giving a phase shift of exactly pi, `lambda / (2 delta)`.
    pub fn pi_height(&self) -> Result<f64> {
        ensure_positive("delta", self.delta)?;
        Ok(self.wavelength / (2.0 * self.delta))
    }

    /// 1/e intensity attenuation length, `lambda / (4 pi beta)`.
    pub fn attenuation_length(&self) -> Result<f64> {
        ensure_positive("beta", self.beta)?;
        Ok(self.wavelength / (4.0 * PI * self.beta))
    }

    /// Thin-element amplitude factor of a slab of the given thickness.
    pub fn amplitude_transmission(&self, thickness: f64) -> Result<Complex64> {
        ensure_non_negative("thickness", thickness)?;
        if thickness == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let k = 2.0 * PI * thickness / self.wavelength;
        Ok(Complex64::new(-k * self.beta, -k * self.delta).exp())
    }

    /// `|amplitude_transmission|^2`.
    pub fn intensity_transmission(&self, thickness: f64) -> Result<f64> {
        Ok(self.amplitude_transmission(thickness)?.norm_sqr())
    }

    /// Phase retardation of a slab, in radians (positive number).
    pub fn phase_shift(&self, thickness: f64) -> Result<f64> {
        ensure_non_negative("thickness", thickness)?;
        Ok(2.0 * PI * self.delta * thickness / self.wavelength)
    }

    /// Area-averaged intensity transmission of a binary relief with equal
    /// ridge and groove areas: `(1 + exp(-h/l)) / 2`.
    pub fn relief_average_transmission(&self, relief_height: f64) -> Result<f64> {
        Ok(0.5 * (1.0 + self.intensity_transmission(relief_height)?))
    }
}

/// One row of a tabulated optical-constants file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsRow {
    pub energy_ev: f64,
    pub delta: f64,
    pub beta: f64,
}

/// Tabulated `delta`, `beta` versus photon energy for one material.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsTable {
    material: String,
    rows: Vec<ConstantsRow>,
}

impl ConstantsTable {
    pub fn new(material: impl Into<String>, rows: Vec<ConstantsRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Format(format!(
                "need at least 2 rows, found {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let ok = |v: f64| v.is_finite() && v > 0.0;
            if !ok(row.energy_ev) || !ok(row.delta) || !ok(row.beta) {
                return Err(Error::Format(format!(
                    "row {}: energy, delta and beta must all be positive",
                    i + 1
                )));
            }
        }
        if let Some(w) = rows.windows(2).find(|w| w[1].energy_ev <= w[0].energy_ev) {
            return Err(Error::Format(format!(
                "energies must be strictly increasing, {} eV followed by {} eV",
                w[0].energy_ev, w[1].energy_ev
            )));
        }
        Ok(Self {
            material: material.into(),
            rows,
        })
    }

    /// Silicon (2.33 g/cm^3), 7-9 keV in 100 eV steps.
    pub fn silicon() -> Self {
        Self::from_csv_reader("Si", SILICON_CSV.as_bytes()).expect("bundled silicon table is valid")
    }

    /// Parses `energy_eV,delta,beta` CSV.
    pub fn from_csv_reader<R: Read>(material: impl Into<String>, reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = csv.headers()?.clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Format(format!("missing column `{name}`")))
        };
        let (ie, id, ib) = (
            column(TABLE_HEADER[0])?,
            column(TABLE_HEADER[1])?,
            column(TABLE_HEADER[2])?,
        );
        let mut rows = Vec::new();
        for (line, record) in csv.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                let raw = record.get(i).unwrap_or("");
                raw.parse::<f64>().map_err(|_| {
                    Error::Format(format!(
                        "data row {}: cannot parse `{raw}` as a number",
                        line + 1
                    ))
                })
            };
            rows.push(ConstantsRow {
                energy_ev: field(ie)?,
                delta: field(id)?,
                beta: field(ib)?,
            });
        }
        Self::new(material, rows)
    }

    /// Loads a CSV file; the material tag is the file stem.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let material = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(material, file)
    }

    pub fn material(&self) -> &str {
        &self.material
    }

    pub fn rows(&self) -> &[ConstantsRow] {
        &self.rows
    }

    pub fn energy_range(&self) -> (f64, f64) {
        (
            self.rows[0].energy_ev,
            self.rows[self.rows.len() - 1].energy_ev,
        )
    }

    /// Constants at `energy_ev`, interpolated linearly in log(value) versus
    /// log(energy) between the bracketing rows.
    pub fn load_constants(&self, energy_ev: f64) -> Result<OpticalConstants> {
        let (min, max) = self.energy_range();
        if !(energy_ev >= min && energy_ev <= max) {
            return Err(Error::OutOfRange {
                what: "photon energy (eV)",
                value: energy_ev,
                min,
                max,
            });
        }
        let upper = self
            .rows
            .partition_point(|r| r.energy_ev < energy_ev)
            .max(1);
        let (lo, hi) = (&self.rows[upper - 1], &self.rows[upper]);
        let (delta, beta) = if energy_ev == hi.energy_ev {
            (hi.delta, hi.beta)
        } else if energy_ev == lo.energy_ev {
            (lo.delta, lo.beta)
        } else {
            let t = (energy_ev.ln() - lo.energy_ev.ln()) / (hi.energy_ev.ln() - lo.energy_ev.ln());
            let lerp = |a: f64, b: f64| (a.ln() + t * (b.ln() - a.ln())).exp();
            (lerp(lo.delta, hi.delta), lerp(lo.beta, hi.beta))
        };
        OpticalConstants::new(energy_ev, delta, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn flat_table() -> ConstantsTable {
        let rows = vec![
            ConstantsRow {
                energy_ev: 8000.0,
                delta: 7.58e-6,
                beta: 1.8e-7,
            },
            ConstantsRow {
                energy_ev: 8100.0,
                delta: 7.58e-6,
                beta: 1.7e-7,
            },
        ];
        ConstantsTable::new("flat", rows).unwrap()
    }

    #[test]
    fn wavelength_matches_hc_over_e() {
        let lam = wavelength_from_energy(8050.0).unwrap();
        assert!(close(lam, 1.540_176_4e-10, 1e-16));
        assert!(close(energy_from_wavelength(lam).unwrap(), 8050.0, 1e-9));
    }

    #[test]
    fn flat_segment_interpolates_to_same_value() {
        let oc = flat_table().load_constants(8050.0).unwrap();
        assert!(close(oc.delta(), 7.58e-6, 1e-18));
    }

    #[test]
    fn node_request_returns_row_verbatim() {
        let table = ConstantsTable::silicon();
        let row = table.rows()[10];
        let oc = table.load_constants(row.energy_ev).unwrap();
        assert_eq!(oc.delta(), row.delta);
        assert_eq!(oc.beta(), row.beta);
        let first = table.rows()[0];
        assert_eq!(
            table.load_constants(first.energy_ev).unwrap().delta(),
            first.delta
        );
    }

    #[test]
    fn out_of_range_names_interval() {
        let err = ConstantsTable::silicon()
            .load_constants(10_000.0)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("7000") && msg.contains("9000"), "{msg}");
    }

    #[test]
    fn rejects_bad_tables() {
        let one = vec![ConstantsRow {
            energy_ev: 8000.0,
            delta: 1e-6,
            beta: 1e-8,
        }];
        assert!(matches!(
            ConstantsTable::new("x", one),
            Err(Error::Format(_))
        ));
        let unsorted = "energy_eV,delta,beta\n8000,1e-6,1e-8\n7000,2e-6,2e-8\n";
        assert!(matches!(
            ConstantsTable::from_csv_reader("x", unsorted.as_bytes()),
            Err(Error::Format(_))
        ));
        let missing = "energy_eV,delta\n8000,1e-6\n9000,2e-6\n";
        let err = ConstantsTable::from_csv_reader("x", missing.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("beta"));
        let empty = "energy_eV,delta,beta\n";
        assert!(ConstantsTable::from_csv_reader("x", empty.as_bytes()).is_err());
    }

    #[test]
    fn silicon_pi_height_at_8050_ev() {
        let oc = ConstantsTable::silicon().load_constants(8050.0).unwrap();
        let h = oc.pi_height().unwrap();
        assert!(close(h, 10.18e-6, 0.05e-6), "h = {h}");
        assert!(close(oc.delta(), 7.57e-6, 0.02e-6));
    }

    #[test]
    fn pi_height_scales_inversely_with_delta_and_energy() {
        let oc = OpticalConstants::new(8050.0, 7.565e-6, 1.75e-7).unwrap();
        let doubled = OpticalConstants::new(8050.0, 2.0 * 7.565e-6, 1.75e-7).unwrap();
        assert_eq!(oc.pi_height().unwrap() / 2.0, doubled.pi_height().unwrap());
        assert!(close(oc.pi_height().unwrap(), 10.18e-6, 0.05e-6));

        // h ~ 1/lambda when delta ~ lambda^2
        let si = ConstantsTable::silicon();
        let h800 = si.load_constants(8000.0).unwrap().pi_height().unwrap();
        let h805 = si.load_constants(8050.0).unwrap().pi_height().unwrap();
        assert!(
            close(h800, h805 * 8000.0 / 8050.0, 0.02e-6),
            "{h800} {h805}"
        );
        assert!(close(h800, 10.12e-6, 0.05e-6));
    }

    #[test]
    fn attenuation_length_and_membrane() {
        let oc = ConstantsTable::silicon().load_constants(8050.0).unwrap();
        let ell = oc.attenuation_length().unwrap();
        assert!(ell > 65e-6 && ell < 72e-6, "{ell}");
        assert!(close((-16e-6 / ell).exp(), 0.79, 0.02));
        assert!(close(oc.intensity_transmission(16e-6).unwrap(), 0.79, 0.02));
        let doubled = OpticalConstants::new(oc.energy_ev(), oc.delta(), 2.0 * oc.beta()).unwrap();
        assert!(close(
            doubled.attenuation_length().unwrap(),
            ell / 2.0,
            1e-18
        ));
    }

    #[test]
    fn relief_average_is_93_percent() {
        let oc = ConstantsTable::silicon().load_constants(8050.0).unwrap();
        assert!(close(
            oc.relief_average_transmission(10.5e-6).unwrap(),
            0.93,
            0.01
        ));
    }

    #[test]
    fn transmission_phase_at_pi_height() {
        let oc = ConstantsTable::silicon().load_constants(8050.0).unwrap();
        assert_eq!(
            oc.amplitude_transmission(0.0).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let t = oc.amplitude_transmission(oc.pi_height().unwrap()).unwrap();
        assert!(close(t.arg().abs(), PI, 1e-9), "{}", t.arg());
        let t = oc.amplitude_transmission(10.18e-6).unwrap();
        assert!(close(t.arg().abs(), PI, 0.01 * PI));
    }

    #[test]
    fn domain_errors() {
        let oc = OpticalConstants::new(8000.0, 0.0, 0.0).unwrap();
        assert!(matches!(oc.pi_height(), Err(Error::Domain { .. })));
        assert!(matches!(oc.attenuation_length(), Err(Error::Domain { .. })));
        assert!(oc.amplitude_transmission(-1e-6).is_err());
        assert!(OpticalConstants::new(-1.0, 1e-6, 1e-8).is_err());
    }

    proptest! {
        #[test]
        fn transmission_is_exponentially_additive(t1 in 0.0..50e-6f64, t2 in 0.0..50e-6f64, e in 7000.0..9000.0f64) {
            let oc = ConstantsTable::silicon().load_constants(e).unwrap();
            let joint = oc.amplitude_transmission(t1 + t2).unwrap();
            let split = oc.amplitude_transmission(t1).unwrap() * oc.amplitude_transmission(t2).unwrap();
            prop_assert!((joint - split).norm() <= 1e-12 * joint.norm());
        }

        #[test]
        fn pi_height_phase_is_minus_pi(e in 7000.0..9000.0f64) {
            let oc = ConstantsTable::silicon().load_constants(e).unwrap();
            let t = oc.amplitude_transmission(oc.pi_height().unwrap()).unwrap();
            // arg() folds -pi onto +pi; compare the unwrapped value
            let phase = -2.0 * PI * oc.delta() * oc.pi_height().unwrap() / oc.wavelength();
            prop_assert!((phase + PI).abs() < 1e-9);
            prop_assert!((t.arg().abs() - PI).abs() < 1e-9);
        }

        #[test]
        fn interpolation_stays_between_bracketing_rows(e in 7000.0..9000.0f64) {
            let table = ConstantsTable::silicon();
            let oc = table.load_constants(e).unwrap();
            let rows = table.rows();
            let i = rows.partition_point(|r| r.energy_ev <= e).clamp(1, rows.len() - 1);
            let (lo, hi) = (rows[i - 1], rows[i]);
            let (bmin, bmax) = (lo.beta.min(hi.beta), lo.beta.max(hi.beta));
            prop_assert!(oc.beta() >= bmin * (1.0 - 1e-12) && oc.beta() <= bmax * (1.0 + 1e-12));
            let (dmin, dmax) = (lo.delta.min(hi.delta), lo.delta.max(hi.delta));
            prop_assert!(oc.delta() >= dmin * (1.0 - 1e-12) && oc.delta() <= dmax * (1.0 + 1e-12));
        }
    }
}
