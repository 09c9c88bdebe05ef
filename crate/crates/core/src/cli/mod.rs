//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage and validation errors, 3 when the
//! numerics fail (ill-conditioned fits, uncertainty violations).

mod output;
mod spec_file;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use output::{sci, Output};
pub use spec_file::{load_mode_spec, parse_mode_spec};

use crate::energy_cost::{build_n3, cost_breakdown, delta_e_swap_oracle, phi_sweep, LaurentConfig, Quantity};
use crate::error::Error;
use crate::harvest::{harvest, DeviceState};
use crate::lattice::{correlators, LatticeSpec};
use crate::modes::{mode_covariance, momentum_representation, standard_form};
use crate::partner::{
    check_locality, classify_partner, entanglement_entropy, partner_window, two_mode_covariance, DEFAULT_SUPPORT_TOL,
};
use output::matrix_value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "partner-harvest", version, about = "Partner modes and entanglement harvesting on a lattice field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; tables default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

/// Second moments `<q^2>,<p^2>,<{q,p}>/2` of a device.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Moments([f64; 3]);

fn parse_moments(s: &str) -> Result<Moments, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected q2,p2,qp, got {} values", parts.len()));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|_| format!("`{part}` is not a number"))?;
    }
    Ok(Moments(out))
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vacuum correlators Dq(d), Dp(d) of the ring.
    Vacuum {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        eta: f64,
    },
    /// Mixedness, standard form and plane-wave coefficients of a mode.
    Mode {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Partner windows and the two-mode covariance.
    Partner {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Swap the mode and its partner into two devices.
    Harvest {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "dev-a", value_parser = parse_moments)]
        dev_a: Option<Moments>,
        #[arg(long = "dev-b", value_parser = parse_moments)]
        dev_b: Option<Moments>,
    },
    /// Energy cost of the three-site protocol.
    Cost {
        #[arg(long, allow_negative_numbers = true)]
        eta: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long = "dev-a", value_parser = parse_moments)]
        dev_a: Option<Moments>,
        #[arg(long = "dev-b", value_parser = parse_moments)]
        dev_b: Option<Moments>,
    },
    /// Leading small-delta coefficients over phi = atan(eta).
    Sweep {
        #[arg(long)]
        points: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = LaurentConfig::default().delta0)]
        delta0: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = LaurentConfig::default().ratio)]
        ratio: f64,
        #[arg(long = "npoints-laurent", default_value_t = LaurentConfig::default().n_points)]
        npoints_laurent: usize,
        /// Comma-separated columns; all six by default.
        #[arg(long, value_delimiter = ',')]
        quantities: Vec<String>,
    },
}

/// An error together with the flag it is attributed to.
#[derive(Debug)]
struct Failure {
    flag: String,
    error: Error,
}

impl Failure {
    fn exit_code(&self) -> i32 {
        if self.error.is_numerical() {
            3
        } else {
            2
        }
    }
}

/// Attributes library errors to flags: validation errors by parameter name,
/// everything else to `default`.
fn flagged<T>(default: &str, r: crate::Result<T>) -> Result<T, Failure> {
    r.map_err(|error| {
        let flag = match &error {
            Error::InvalidParameter { name, .. } if name != "device" && name != "x" => name.replace('_', "-"),
            _ => default.to_string(),
        };
        Failure { flag, error }
    })
}

fn device(flag: &str, m: Option<Moments>) -> Result<DeviceState, Failure> {
    match m {
        None => Ok(DeviceState::vacuum()),
        Some(Moments([q2, p2, qp])) => flagged(flag, DeviceState::new(q2, p2, qp)),
    }
}

fn device_value(d: &DeviceState) -> Value {
    json!({"q2": d.q2, "p2": d.p2, "qp": d.qp})
}

fn windows_value(x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> Value {
    json!({"x": x, "y": y, "z": z, "w": w})
}

fn vacuum(n: usize, eta: f64) -> Result<Output, Failure> {
    let spec = flagged("n", LatticeSpec::new(n, eta))?;
    let corr = correlators(&spec);
    let rows = (0..n)
        .map(|d| vec![json!(d), json!(corr.dq(d as i64)), json!(corr.dp(d as i64))])
        .collect();
    Ok(Output::Table {
        columns: vec!["d".into(), "dq".into(), "dp".into()],
        rows,
    })
}

fn mode(path: &Path) -> Result<Output, Failure> {
    let (spec, window) = flagged("spec", load_mode_spec(path))?;
    let corr = correlators(&spec);
    let cov = flagged("spec", mode_covariance(&window, &corr))?;
    let std = flagged("spec", standard_form(&window, &corr))?;
    let mom = flagged("spec", momentum_representation(&std, &spec))?;
    let overlap = mom.overlap();
    Ok(Output::Document(json!({
        "n": spec.n_sites(),
        "eta": spec.eta(),
        "g": std.g,
        "s_ee": entanglement_entropy(std.g),
        "covariance": matrix_value(cov.matrix()),
        "standard_form": {
            "windows": windows_value(&std.big_x, &std.big_y, &std.big_z, &std.big_w),
            "prefactor": std.prefactor(),
            "theta": std.params.theta,
            "theta_prime": std.params.theta_prime,
            "sigma": std.params.sigma,
        },
        "momentum": {
            "q_norm": mom.q_norm(),
            "p_norm": mom.p_norm(),
            "overlap_re": overlap.re,
            "overlap_im": overlap.im,
        },
    })))
}

fn partner(path: &Path) -> Result<Output, Failure> {
    let (spec, window) = flagged("spec", load_mode_spec(path))?;
    let corr = correlators(&spec);
    let std = flagged("spec", standard_form(&window, &corr))?;
    let pair = flagged("spec", partner_window(&std, &corr))?;
    let m_ab = flagged("spec", two_mode_covariance(&pair, &corr))?;
    Ok(Output::Document(json!({
        "g": pair.g,
        "s_ee": entanglement_entropy(pair.g),
        "classification": classify_partner(&pair, DEFAULT_SUPPORT_TOL).as_str(),
        "residuals": check_locality(&pair),
        "b_windows": windows_value(&pair.b_x, &pair.b_y, &pair.b_z, &pair.b_w),
        "m_ab": matrix_value(m_ab.matrix()),
        "m_ab_order": ["Q_A", "Q_B", "P_A", "P_B"],
    })))
}

fn harvest_cmd(path: &Path, dev_a: Option<Moments>, dev_b: Option<Moments>) -> Result<Output, Failure> {
    let dev_a = device("dev-a", dev_a)?;
    let dev_b = device("dev-b", dev_b)?;
    let (spec, window) = flagged("spec", load_mode_spec(path))?;
    let corr = correlators(&spec);
    let std = flagged("spec", standard_form(&window, &corr))?;
    let pair = flagged("spec", partner_window(&std, &corr))?;
    let result = flagged("spec", harvest(&pair, &dev_a, &dev_b, &spec))?;
    let entropy = flagged("spec", result.device_entropy())?;
    Ok(Output::Document(json!({
        "device_covariance": matrix_value(result.device_covariance.matrix()),
        "device_order": ["q_A'", "q_B'", "p_A'", "p_B'"],
        "device_entropy": entropy,
        "field_mode_marginal": matrix_value(result.field_mode_marginal.matrix()),
        "field_mode_order": ["Q_A", "Q_B", "P_A", "P_B"],
        "spectrum_check": {
            "max_eigenvalue_change": result.spectrum_residual,
            "s_ee": entanglement_entropy(pair.g),
        },
    })))
}

fn cost(eta: f64, delta: f64, dev_a: Option<Moments>, dev_b: Option<Moments>) -> Result<Output, Failure> {
    let dev_a = device("dev-a", dev_a)?;
    let dev_b = device("dev-b", dev_b)?;
    let model = flagged("delta", build_n3(eta, delta))?;
    let b = cost_breakdown(&model, &dev_a, &dev_b);
    let oracle = flagged("delta", delta_e_swap_oracle(&model.spec, &model, &dev_a, &dev_b))?;
    let mut doc = serde_json::to_value(b.coefficients).expect("plain struct");
    let obj = doc.as_object_mut().expect("struct serializes to an object");
    for (k, v) in [
        ("eta", json!(eta)),
        ("delta", json!(delta)),
        ("g", json!(model.g)),
        ("kappa", json!(b.kappa)),
        ("zero_point_energy", json!(b.zero_point_energy)),
        ("delta_e_swap", json!(b.delta_e_swap)),
        ("delta_e_swap_oracle", json!(oracle)),
        ("dev_a", device_value(&b.dev_a)),
        ("dev_b", device_value(&b.dev_b)),
    ] {
        obj.insert(k.to_string(), v);
    }
    Ok(Output::Document(doc))
}

fn sweep(points: usize, config: LaurentConfig, quantities: &[String]) -> Result<Output, Failure> {
    let selected: Vec<Quantity> = if quantities.is_empty() {
        Quantity::ALL.to_vec()
    } else {
        quantities
            .iter()
            .map(|name| {
                Quantity::from_column(name).ok_or_else(|| Failure {
                    flag: "quantities".into(),
                    error: Error::invalid("quantities", format!("unknown column `{name}`")),
                })
            })
            .collect::<Result<_, _>>()?
    };
    let rows = flagged("quantities", phi_sweep(points, &selected, &config))?;
    let mut columns = vec!["phi".to_string()];
    columns.extend(selected.iter().map(|q| q.column().to_string()));
    Ok(Output::Table {
        columns,
        rows: rows
            .into_iter()
            .map(|r| std::iter::once(json!(r.phi)).chain(r.values.into_iter().map(|v| json!(v))).collect())
            .collect(),
    })
}

fn execute(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Vacuum { n, eta } => vacuum(n, eta),
        Command::Mode { spec } => mode(&spec),
        Command::Partner { spec } => partner(&spec),
        Command::Harvest { spec, dev_a, dev_b } => harvest_cmd(&spec, dev_a, dev_b),
        Command::Cost { eta, delta, dev_a, dev_b } => cost(eta, delta, dev_a, dev_b),
        Command::Sweep {
            points,
            delta0,
            ratio,
            npoints_laurent,
            quantities,
        } => sweep(
            points,
            LaurentConfig {
                delta0,
                ratio,
                n_points: npoints_laurent,
            },
            &quantities,
        ),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let output = match execute(cli.command) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: --{}: {}", f.flag, f.error);
            return f.exit_code();
        }
    };
    let format = cli.format.unwrap_or(match output {
        Output::Table { .. } => Format::Csv,
        Output::Document(_) => Format::Json,
    });
    let text = match format {
        Format::Csv => output.to_csv(),
        Format::Json => output.to_json(),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: --out: {e}");
            2
        }
    }
}
