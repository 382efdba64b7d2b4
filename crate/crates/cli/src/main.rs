//! Batch front end: spectra, degeneracies, wavefunction evaluation,
//! verification suites, and the ground-state-energy table. Users are
//! scripts and CI; all output is CSV or JSON on stdout (or --out).

use std::fs;
use std::io::{BufReader, Read, Write};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nbody_core::spectrum::{
    degeneracy_ground_d, energy_1d_bose, energy_1d_fermi, energy_d_excited, figure1_csv,
    figure1_table,
};
use nbody_core::verify::{run_suite, Suite};
use nbody_core::wavefn::{parse_points_csv, WavefunctionDescriptor};
use nbody_core::{Error, Statistics, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct UnitFlags {
    /// Planck constant (natural units by default)
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Particle mass
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Trap-less pair frequency omega
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

impl UnitFlags {
    fn params(&self, n: usize, dim: usize) -> Result<SystemParams, Error> {
        SystemParams::new(n, dim, self.mass, self.omega, self.hbar)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nbody",
    about = "Exact spectra and eigenfunctions of N-body systems with quadratic pair potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest levels of the chosen sector, energies in hbar*omega units
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        stat: String,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[command(flatten)]
        units: UnitFlags,
        #[arg(long)]
        out: Option<String>,
    },
    /// Ground-state degeneracy of the D-dimensional Fermi system
    Degeneracy {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<String>,
    },
    /// Evaluate a closed-form eigenfunction at configurations from a CSV
    /// file (one flattened N*D row per line; header optional)
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        stat: String,
        /// Excitation index (0 = ground state)
        #[arg(long, default_value_t = 0)]
        excitation: usize,
        /// Shell-K serial numbers for degenerate D >= 2 Fermi grounds,
        /// comma-separated, 1-based
        #[arg(long, value_delimiter = ',')]
        select: Option<Vec<usize>>,
        /// Points file; '-' reads stdin
        #[arg(long)]
        points: String,
        /// Emit the raw (unnormalized) closed form
        #[arg(long)]
        unnormalized: bool,
        /// Emit log_abs,sign instead of the value
        #[arg(long)]
        log_domain: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[command(flatten)]
        units: UnitFlags,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a verification suite and emit its JSON report
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Deliberately corrupt one comparison (harness self-test)
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Ground-state energies E0(N, D) as CSV (hbar*omega = 1)
    Figure1 {
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
        dims: Vec<usize>,
        #[arg(long)]
        out: Option<String>,
    },
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))
}

fn emit(out: &Option<String>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn spectrum_lines(
    stat: Statistics,
    levels: usize,
    params: &SystemParams,
) -> Result<Vec<nbody_core::SpectrumLine>, Error> {
    (0..levels)
        .map(|i| match (stat, params.dimension) {
            (Statistics::Bose, 1) => Ok(energy_1d_bose(i, params)),
            (Statistics::Fermi, 1) => Ok(energy_1d_fermi(i, params)),
            (Statistics::Fermi, _) => energy_d_excited(i, params),
            (Statistics::Bose, _) => Err(Error::Unsupported(
                "D >= 2 spectra are implemented for fermions only".into(),
            )),
        })
        .collect()
}

fn run() -> Result<(), Error> {
    if let Ok(threads) = std::env::var("NBODY_THREADS") {
        let threads: usize = threads
            .parse()
            .map_err(|_| Error::InvalidParams("NBODY_THREADS must be an integer".into()))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }

    match Cli::parse().command {
        Command::Spectrum {
            n,
            dim,
            stat,
            levels,
            format,
            units,
            out,
        } => {
            let params = units.params(n, dim)?;
            let stat = Statistics::from_str(&stat)?;
            let lines = spectrum_lines(stat, levels, &params)?;
            let content = match format {
                OutputFormat::Csv => {
                    let mut s = String::from("label,energy,degeneracy,vanishes\n");
                    for l in &lines {
                        let deg = l
                            .degeneracy
                            .map(|d| d.to_string())
                            .unwrap_or_default();
                        s.push_str(&format!(
                            "{},{:.16e},{},{}\n",
                            l.label, l.energy, deg, l.vanishes_identically
                        ));
                    }
                    s
                }
                OutputFormat::Json => format!("{}\n", to_json(&lines)?),
            };
            emit(&out, &content)
        }
        Command::Degeneracy { n, dim, format, out } => {
            SystemParams::natural(n, dim)?;
            let deg = degeneracy_ground_d(n, dim);
            let content = match format {
                OutputFormat::Csv => format!("n,dim,degeneracy\n{n},{dim},{deg}\n"),
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::json!({ "n": n, "dim": dim, "degeneracy": deg.to_string() })
                ),
            };
            emit(&out, &content)
        }
        Command::Eval {
            n,
            dim,
            stat,
            excitation,
            select,
            points,
            unnormalized,
            log_domain,
            format,
            units,
            out,
        } => {
            let params = units.params(n, dim)?;
            let stat = Statistics::from_str(&stat)?;
            let desc =
                WavefunctionDescriptor::new(stat, excitation, params, select, !unnormalized)?;
            let configs = if points == "-" {
                let mut buf = String::new();
                std::io::stdin().read_to_string(&mut buf)?;
                parse_points_csv(buf.as_bytes(), n, dim)?
            } else {
                parse_points_csv(BufReader::new(fs::File::open(&points)?), n, dim)?
            };
            let values: Result<Vec<_>, Error> =
                configs.iter().map(|c| desc.eval_log(c)).collect();
            let values = values?;
            let content = match (format, log_domain) {
                (OutputFormat::Csv, false) => {
                    let mut s = String::from("psi\n");
                    for v in &values {
                        s.push_str(&format!("{:.16e}\n", v.value()));
                    }
                    s
                }
                (OutputFormat::Csv, true) => {
                    let mut s = String::from("log_abs,sign\n");
                    for v in &values {
                        s.push_str(&format!("{:.16e},{}\n", v.log_abs, v.sign));
                    }
                    s
                }
                (OutputFormat::Json, _) => {
                    let rows: Vec<serde_json::Value> = values
                        .iter()
                        .map(|v| {
                            if log_domain {
                                serde_json::json!({ "log_abs": v.log_abs, "sign": v.sign })
                            } else {
                                serde_json::json!({ "psi": v.value() })
                            }
                        })
                        .collect();
                    format!("{}\n", to_json(&rows)?)
                }
            };
            emit(&out, &content)
        }
        Command::Verify {
            suite,
            seed,
            inject_fault,
            out,
        } => {
            let suite = Suite::from_str(&suite)?;
            let report = run_suite(suite, seed, inject_fault)?;
            emit(&out, &format!("{}\n", to_json(&report)?))?;
            if !report.passed {
                return Err(Error::Numeric("verification suite failed".into()));
            }
            Ok(())
        }
        Command::Figure1 { n_max, dims, out } => {
            if n_max < 2 {
                return Err(Error::InvalidParams("n-max must be >= 2".into()));
            }
            let rows = figure1_table(&(2..=n_max).collect::<Vec<_>>(), &dims);
            emit(&out, &figure1_csv(&rows))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
