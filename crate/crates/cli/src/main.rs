//! Command-line front end: dataset ingestion, pipeline runs, experiment
//! batches, and machine-readable exports.
//!
//! Exit codes: 0 on success, 1 when a verification fails (interpolation
//! error, nonnegativity dip, rejected membership), 2 on input errors
//! (malformed files, inconsistent dimensions, points outside the window).

mod dataset;
mod manifest;
mod selftest;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use dataset::Dataset;
use manifest::{sha256_hex, RunWriter};
use nninterp::czdecomp::{classify_and_anchor, cz_decompose, CubeType, DyadicRegion};
use nninterp::extension::{
    extend_jet_cm1, extend_jet_cm_at, interpolate_nonneg, Flavor, PipelineConfig,
};
use nninterp::feasibility::{finiteness_gap, gap_table_csv, min_norm, whitney_feasible, FeasConfig, FeasStatus};
use nninterp::gamma::{
    gamma0plus_member, gamma_prime_member, gamma_tilde0_member, GammaConfig,
    MembershipVerdict,
};
use nninterp::jets::Jet;
use nninterp::smoothfn::grid_csv;
use nninterp::whitney::WhitneyField;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "nninterp", version, about = "Nonnegative smooth interpolation of scattered data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlavorArg {
    /// Smooth flavor (series extension).
    Cm,
    /// Lipschitz flavor (closed-form extension); the default.
    Cm1,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Cm => Flavor::Cm,
            FlavorArg::Cm1 => Flavor::Cm1,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Cube decomposition of a dataset's points: JSON dump plus cube CSV.
    Decompose {
        #[arg(long)]
        dataset: PathBuf,
        /// Window bounds (two integers, applied per axis); default pads the
        /// data box by 6 units.
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        region: Option<Vec<i64>>,
        #[arg(long, default_value = "nninterp-run")]
        out: PathBuf,
    },
    /// Membership verdicts for a file of jets.
    GammaCheck {
        /// JSON array of jets.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "cm1")]
        flavor: FlavorArg,
        /// Norm level the jets are tested against.
        #[arg(long, default_value_t = 1.0)]
        level: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "nninterp-run")]
        out: PathBuf,
    },
    /// Extension of a single jet to a nonnegative function, with a grid CSV.
    Extend {
        /// JSON file holding one jet.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "cm1")]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 1.0)]
        level: f64,
        /// Grid points per axis for the CSV export.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long, default_value = "nninterp-run")]
        out: PathBuf,
    },
    /// Full pipeline: minimal level, jets, decomposition, glue, verify.
    Interpolate {
        #[arg(long)]
        dataset: PathBuf,
        /// Override the dataset's smoothness order (must agree if both given).
        #[arg(long)]
        m: Option<usize>,
        /// Override the dataset's dimension (must agree if both given).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "cm1")]
        flavor: FlavorArg,
        /// Verification grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Norm level; computed by minimal-norm search when absent.
        #[arg(long)]
        level: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "nninterp-run")]
        out: PathBuf,
    },
    /// Minimal-norm search or the subset-versus-global experiment.
    Feasibility {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        /// Run the finiteness experiment over subsets of this size.
        #[arg(long)]
        k_sharp: Option<usize>,
        /// Probe feasibility at this fixed level instead of searching.
        #[arg(long)]
        level: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "nninterp-run")]
        out: PathBuf,
    },
    /// Runs the built-in invariant suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Input(String),
    Verification(String),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Input(format!("{e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_dataset(path: &PathBuf) -> Result<(Dataset, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let ds: Dataset = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    ds.validate()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((ds, sha256_hex(&bytes)))
}

fn gamma_cfg(tol: Option<f64>) -> GammaConfig {
    let mut cfg = GammaConfig::default();
    if let Some(t) = tol {
        cfg.tol = t;
    }
    cfg
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Decompose { dataset, region, out } => decompose(dataset, region, out),
        Command::GammaCheck {
            dataset,
            m,
            flavor,
            level,
            tol,
            out,
        } => gamma_check(dataset, m, flavor, level, tol, out),
        Command::Extend {
            dataset,
            flavor,
            level,
            grid,
            out,
        } => extend(dataset, flavor, level, grid, out),
        Command::Interpolate {
            dataset,
            m,
            n,
            flavor,
            grid,
            level,
            tol,
            seed,
            out,
        } => interpolate(dataset, m, n, flavor, grid, level, tol, seed, out),
        Command::Feasibility {
            dataset,
            m,
            k_sharp,
            level,
            seed,
            out,
        } => feasibility(dataset, m, k_sharp, level, seed, out),
        Command::Selftest { seed, out } => selftest::run(seed, out),
    }
}

fn decompose(path: PathBuf, region: Option<Vec<i64>>, out: PathBuf) -> Result<(), CliError> {
    let started = Instant::now();
    let (ds, digest) = load_dataset(&path)?;
    let points = ds.points();
    let region = match &region {
        Some(bounds) => DyadicRegion::new(
            vec![bounds[0]; ds.n],
            vec![bounds[1]; ds.n],
        )
        .map_err(|e| CliError::Input(e.to_string()))?,
        None => DyadicRegion::padded_around(&points, ds.n, 6),
    };
    let dec = cz_decompose(&points, &region).map_err(|e| CliError::Input(e.to_string()))?;
    let dec = classify_and_anchor(dec, &points).map_err(|e| CliError::Input(e.to_string()))?;

    let mut writer = RunWriter::new(&out).context("create output directory")?;
    writer.write_json("cubes.json", &dec.dump_records())?;
    writer.write("cubes.csv", &dec.to_csv())?;
    let summary = json!({
        "cubes": dec.len(),
        "min_level": dec.min_level(),
        "type_counts": {
            "1": dec.types.iter().filter(|t| **t == CubeType::Type1).count(),
            "2": dec.types.iter().filter(|t| **t == CubeType::Type2).count(),
            "3": dec.types.iter().filter(|t| **t == CubeType::Type3).count(),
        },
    });
    writer.finish(
        "decompose",
        json!({"dataset": path.display().to_string(), "region": [region.lo, region.hi]}),
        Some(digest),
        summary,
        started,
    )?;
    Ok(())
}

fn gamma_check(
    path: PathBuf,
    m: usize,
    flavor: FlavorArg,
    level: f64,
    tol: Option<f64>,
    out: PathBuf,
) -> Result<(), CliError> {
    let started = Instant::now();
    let bytes = std::fs::read(&path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let jets: Vec<Jet> = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let cfg = gamma_cfg(tol);
    let mut verdicts: Vec<MembershipVerdict> = Vec::new();
    for (i, jet) in jets.iter().enumerate() {
        let v = match flavor {
            FlavorArg::Cm1 => {
                if jet.degree() != m - 1 {
                    return Err(CliError::Input(format!(
                        "jet {i}: degree {} does not match order m = {m} (expected {})",
                        jet.degree(),
                        m - 1
                    )));
                }
                gamma_prime_member(jet, &jet.base().to_vec(), level, None, &cfg)
            }
            FlavorArg::Cm => {
                // Coordinates are taken relative to the jet's own base point.
                let origin = vec![0.0; jet.dim()];
                let moved = Jet::from_coeffs(
                    &origin,
                    jet.degree(),
                    jet.scale(1.0 / level).coeffs().to_vec(),
                )
                .map_err(|e| CliError::Input(format!("jet {i}: {e}")))?;
                if jet.degree() == m {
                    gamma0plus_member(&moved, &cfg)
                } else if jet.degree() == m - 1 {
                    gamma_tilde0_member(&moved, &cfg)
                } else {
                    return Err(CliError::Input(format!(
                        "jet {i}: degree {} matches neither m = {m} nor m - 1",
                        jet.degree()
                    )));
                }
            }
        }
        .map_err(|e| CliError::Input(format!("jet {i}: {e}")))?;
        verdicts.push(v);
    }
    let members = verdicts.iter().filter(|v| v.is_member()).count();
    let all_member = members == verdicts.len();
    let mut writer = RunWriter::new(&out).context("create output directory")?;
    writer.write_json("verdicts.json", &verdicts)?;
    writer.finish(
        "gamma-check",
        json!({"dataset": path.display().to_string(), "m": m, "flavor": format!("{flavor:?}"), "level": level}),
        Some(sha256_hex(&bytes)),
        json!({"jets": verdicts.len(), "members": members}),
        started,
    )?;
    if all_member {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} jets rejected or undetermined",
            verdicts.len() - members,
            verdicts.len()
        )))
    }
}

fn extend(
    path: PathBuf,
    flavor: FlavorArg,
    level: f64,
    grid: usize,
    out: PathBuf,
) -> Result<(), CliError> {
    let started = Instant::now();
    let bytes = std::fs::read(&path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let jet: Jet = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let cfg = GammaConfig::default();
    let m = jet.degree() + 1;
    let base = jet.base().to_vec();
    let handle = match flavor {
        FlavorArg::Cm1 => extend_jet_cm1(&jet, &base, level, &cfg),
        FlavorArg::Cm => extend_jet_cm_at(&jet, &base, level, 34usize.div_ceil(m).max(20), &cfg),
    }
    .map_err(|e| CliError::Verification(e.to_string()))?;

    let window: Vec<(f64, f64)> = base.iter().map(|&c| (c - 1.5, c + 1.5)).collect();
    let per_axis = if jet.dim() == 1 { grid } else { grid.min(201) };
    let csv = grid_csv(&handle, &window, per_axis, m);
    let (min, min_arg) = nninterp::smoothfn::grid_min(&handle, &window, per_axis);
    let mut writer = RunWriter::new(&out).context("create output directory")?;
    writer.write("grid.csv", &csv)?;
    writer.finish(
        "extend",
        json!({"dataset": path.display().to_string(), "flavor": format!("{flavor:?}"), "level": level, "grid": grid}),
        Some(sha256_hex(&bytes)),
        json!({"m": m, "min_on_grid": min, "min_arg": min_arg}),
        started,
    )?;
    if min < -1e-10 {
        return Err(CliError::Verification(format!(
            "extension dips to {min} at {min_arg:?}"
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn interpolate(
    path: PathBuf,
    m_flag: Option<usize>,
    n_flag: Option<usize>,
    flavor: FlavorArg,
    grid: Option<usize>,
    level_flag: Option<f64>,
    tol: Option<f64>,
    seed: u64,
    out: PathBuf,
) -> Result<(), CliError> {
    let started = Instant::now();
    let (ds, digest) = load_dataset(&path)?;
    if let Some(m) = m_flag {
        if m != ds.m {
            return Err(CliError::Input(format!(
                "--m {m} disagrees with the dataset's m = {}",
                ds.m
            )));
        }
    }
    if let Some(n) = n_flag {
        if n != ds.n {
            return Err(CliError::Input(format!(
                "--n {n} disagrees with the dataset's n = {}",
                ds.n
            )));
        }
    }
    let points = ds.points();
    let values = ds.values();

    let feas = FeasConfig {
        gamma: gamma_cfg(tol),
        certificates: false,
        ..FeasConfig::default()
    };
    let (level, field) = match level_flag {
        Some(level) => {
            let r = whitney_feasible(&points, &values, ds.m, level, &feas)
                .map_err(|e| CliError::Input(e.to_string()))?;
            match (r.status, r.witness) {
                (FeasStatus::Feasible, Some(w)) => (level, w),
                (status, _) => {
                    return Err(CliError::Verification(format!(
                        "no admissible jet family at level {level} ({status:?}, margin {:.3e})",
                        r.margin
                    )));
                }
            }
        }
        None => {
            if points.is_empty() {
                (1.0, WhitneyField::empty())
            } else {
                let mn = min_norm(&points, &values, ds.m, &feas)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                if mn.level == 0.0 {
                    let jets = points.iter().map(|p| Jet::zero(ds.n, ds.m - 1, p)).collect();
                    (
                        1.0,
                        WhitneyField::new(points.clone(), jets)
                            .expect("validated dataset has distinct points"),
                    )
                } else {
                    (mn.level * 1.01, mn.witness)
                }
            }
        }
    };

    let mut cfg = PipelineConfig {
        gamma: gamma_cfg(tol),
        ..PipelineConfig::default()
    };
    cfg.verify_per_axis = grid;
    let (handle, report) = interpolate_nonneg(&points, &values, &field, level, flavor.into(), &cfg)
        .map_err(|e| CliError::Verification(e.to_string()))?;

    let window: Vec<(f64, f64)> = (0..ds.n)
        .map(|a| {
            let lo = points.iter().map(|p| p[a]).fold(0.0f64, f64::min);
            let hi = points.iter().map(|p| p[a]).fold(0.0f64, f64::max);
            (lo - cfg.window_pad, hi + cfg.window_pad)
        })
        .collect();
    let per_axis = cfg.verify_grid_for(ds.n).min(if ds.n == 1 { 20001 } else { 201 });
    let csv = grid_csv(&handle, &window, per_axis, ds.m);

    let mut writer = RunWriter::new(&out).context("create output directory")?;
    writer.write_json("report.json", &report)?;
    writer.write("grid.csv", &csv)?;
    writer.write_json("witness_field.json", &field)?;
    let summary = json!({
        "level": level,
        "interp_ok": report.interp_ok,
        "interp_error": report.interp_error,
        "min_on_grid": report.min_on_grid,
        "norm_ratio": report.norm_ratio,
        "localized": report.localized,
    });
    writer.finish(
        "interpolate",
        json!({
            "dataset": path.display().to_string(),
            "m": ds.m, "n": ds.n,
            "flavor": format!("{flavor:?}"),
            "grid": per_axis,
            "level_flag": level_flag,
            "tol": tol,
            "seed": seed,
        }),
        Some(digest),
        summary,
        started,
    )?;
    if !report.interp_ok {
        return Err(CliError::Verification(format!(
            "interpolation error {:.3e} exceeds 1e-8",
            report.interp_error
        )));
    }
    if report.min_on_grid < -1e-10 {
        return Err(CliError::Verification(format!(
            "interpolant dips to {:.3e}",
            report.min_on_grid
        )));
    }
    Ok(())
}

fn feasibility(
    path: PathBuf,
    m_flag: Option<usize>,
    k_sharp: Option<usize>,
    level: Option<f64>,
    seed: u64,
    out: PathBuf,
) -> Result<(), CliError> {
    let started = Instant::now();
    let (ds, digest) = load_dataset(&path)?;
    let m = m_flag.unwrap_or(ds.m);
    if m == 0 || m > dataset::MAX_ORDER {
        return Err(CliError::Input(format!("order m = {m} unsupported")));
    }
    let points = ds.points();
    let values = ds.values();
    let cfg = FeasConfig {
        certificates: false,
        ..FeasConfig::default()
    };
    let mut writer = RunWriter::new(&out).context("create output directory")?;
    let summary = match (k_sharp, level) {
        (Some(k), _) => {
            let report = finiteness_gap(&points, &values, m, k, &cfg)
                .map_err(|e| CliError::Input(e.to_string()))?;
            writer.write("subsets.csv", &gap_table_csv(&report))?;
            let summary = json!({
                "M_subset": report.m_subset,
                "M_global": report.m_global,
                "ratio": report.ratio,
                "k_sharp": report.k_sharp,
            });
            writer.write_json("summary.json", &summary)?;
            summary
        }
        (None, Some(level)) => {
            let r = whitney_feasible(&points, &values, m, level, &cfg)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let summary = json!({
                "level": level,
                "status": format!("{:?}", r.status),
                "margin": r.margin,
            });
            writer.write_json("summary.json", &summary)?;
            if let Some(w) = &r.witness {
                writer.write_json("witness_field.json", w)?;
            }
            summary
        }
        (None, None) => {
            let mn = min_norm(&points, &values, m, &cfg)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let summary = json!({
                "level": mn.level,
                "iterations": mn.iterations,
                "bracket": [mn.bracket.0, mn.bracket.1],
            });
            writer.write_json("summary.json", &summary)?;
            writer.write_json("witness_field.json", &mn.witness)?;
            summary
        }
    };
    writer.finish(
        "feasibility",
        json!({
            "dataset": path.display().to_string(),
            "m": m,
            "k_sharp": k_sharp,
            "level": level,
            "seed": seed,
        }),
        Some(digest),
        summary,
        started,
    )?;
    Ok(())
}
