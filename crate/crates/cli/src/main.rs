use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zoneplate::{Error, Result};
use zoneplate_cli::commands::{self, EfficiencyOptions, ExportFormat, Plane, SimulateOptions};
use zoneplate_cli::config::RunConfig;
use zoneplate_cli::exit_code;

/// Design and simulate compound Fresnel zone plates.
#[derive(Parser)]
#[command(name = "zoneplate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: config `output_dir`, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Zone table, SVG rendering and summary.
    Design(Common),
    /// Grating-model order efficiencies per component.
    Efficiency {
        #[command(flatten)]
        common: Common,
        /// Comma-separated diffraction orders (default -7..7).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        orders: Option<Vec<i64>>,
        /// Slitness scan LO:HI:STEP of each component's design order.
        #[arg(long, value_name = "LO:HI:STEP")]
        scan_slitness: Option<String>,
        /// Lossless pi-phase plate instead of the configured material.
        #[arg(long)]
        lossless: bool,
    },
    /// Fresnel propagation to a plane; PSF, metrics and knife-edge scan.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Plane distance in micrometres, or `focus`.
        #[arg(long, default_value = "focus", allow_hyphen_values = true)]
        z: String,
        /// Also write the knife-edge scan.
        #[arg(long)]
        knife_edge: bool,
        /// Lossless pi-phase plate instead of the configured material.
        #[arg(long)]
        lossless: bool,
    },
    /// Fabrication hand-off files.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["csv", "svg"], default_value = "csv")]
        format: String,
    },
}

fn parse_scan(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("--scan-slitness expects LO:HI:STEP, got '{s}'")))?;
    match parts[..] {
        [lo, hi, step] => Ok((lo, hi, step)),
        _ => Err(Error::Config(format!(
            "--scan-slitness expects LO:HI:STEP, got '{s}'"
        ))),
    }
}

fn parse_plane(s: &str) -> Result<Plane> {
    if s == "focus" {
        return Ok(Plane::Focus);
    }
    s.parse::<f64>()
        .map(|z| Plane::Distance(z * 1e-6))
        .map_err(|_| {
            Error::Config(format!(
                "--z expects a distance in um or 'focus', got '{s}'"
            ))
        })
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let cfg = RunConfig::load(&common.config)?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Design(common) => {
            let (cfg, out) = load(&common)?;
            commands::design(&cfg, &out)
        }
        Command::Efficiency {
            common,
            orders,
            scan_slitness,
            lossless,
        } => {
            let (cfg, out) = load(&common)?;
            let scan = scan_slitness.as_deref().map(parse_scan).transpose()?;
            commands::efficiency(
                &cfg,
                &out,
                &EfficiencyOptions {
                    orders,
                    scan,
                    lossless,
                },
            )
        }
        Command::Simulate {
            common,
            z,
            knife_edge,
            lossless,
        } => {
            let plane = parse_plane(&z)?;
            let (cfg, out) = load(&common)?;
            commands::simulate(
                &cfg,
                &out,
                &SimulateOptions {
                    plane,
                    knife_edge,
                    lossless,
                },
            )
        }
        Command::Export { common, format } => {
            let format: ExportFormat = format.parse()?;
            let (cfg, out) = load(&common)?;
            commands::export(&cfg, &out, format)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
