//! Command-line front end for the CLM blowup laboratory: closed-form
//! snapshots, pole trajectories, scaling-exponent reports, spectral
//! cross-checks and profile verification, with CSV/JSON outputs and a run
//! manifest next to every artifact.

mod io;
mod manifest;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use clm_core::asymptotics::{
    extract_params, measure_scales, profile_error, scaling_snapshots, BulkCenter,
};
use clm_core::evolve::{deviation_from_exact, evolve, EvolverConfig, StopReason};
use clm_core::exact::{evaluate_grid, predict_blowup, InitialDatum};
use clm_core::numeric::fit_loglog;
use clm_core::poles::track_zeros;
use clm_core::presets::{all_presets, preset, Preset, PresetId};
use io::{datum_from_eta, load_datum_file, parse_grid, parse_window};
use manifest::RunManifest;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

fn preset_help() -> String {
    let mut s = String::from("Presets (expected blowup data):\n");
    for p in all_presets() {
        let t = p
            .notes
            .blowup_time
            .map(|t| format!("T = {t:.6}"))
            .unwrap_or_else(|| "no blowup".into());
        let exps = match (p.notes.c_omega, p.notes.c_l, p.notes.c_s) {
            (Some(o), Some(l), Some(c)) => format!("c_omega = {o}, c_l = {l}, c_s = {c}"),
            (Some(o), Some(l), None) => format!("c_omega = {o}, c_l = {l}"),
            _ => "-".into(),
        };
        s.push_str(&format!(
            "  {:8} {:14} {:42} {}\n",
            p.id.to_string(),
            t,
            exps,
            p.notes.description
        ));
    }
    s
}

#[derive(Parser)]
#[command(
    name = "clm",
    version,
    about = "Numerical laboratory for the 1D vortex-stretching model w_t = w H(w)",
    after_help = preset_help()
)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Output format for snapshot data.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form solution on a grid at one time.
    Exact {
        #[arg(long, conflicts_with = "datum_file")]
        preset: Option<String>,
        /// JSON datum file with an "eta0" rational generator.
        #[arg(long)]
        datum_file: Option<PathBuf>,
        #[arg(long)]
        t: f64,
        /// Evaluation grid lo:hi:npts.
        #[arg(long, default_value = "-20:20:2001", allow_hyphen_values = true)]
        grid: String,
        /// Output stem (defaults to exact_<preset>_t<t>).
        #[arg(long)]
        out: Option<String>,
    },
    /// Track the complex pole trajectories and their events.
    Poles {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Measure blowup scaling exponents from near-blowup snapshots.
    Scaling {
        #[arg(long)]
        preset: String,
        /// Window of T-t values, lo:hi.
        #[arg(long, default_value = "1e-5:1e-2")]
        window: String,
        /// Number of log-spaced snapshots.
        #[arg(long, default_value_t = 40)]
        points: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Integrate the model pseudo-spectrally and compare with the oracle.
    Evolve {
        #[arg(long, conflicts_with = "datum_file")]
        preset: Option<String>,
        /// JSON datum file with "eta0" or raw "samples".
        #[arg(long)]
        datum_file: Option<PathBuf>,
        #[arg(long)]
        t_end: f64,
        /// Grid size N (power of two, >= 256).
        #[arg(long, default_value_t = 4096)]
        n: usize,
        /// Domain half-width L.
        #[arg(long, default_value_t = 40.0)]
        l: f64,
        #[arg(long, default_value_t = 1.0 / 512.0)]
        dt: f64,
        /// Stop when max|w| exceeds this guard.
        #[arg(long, default_value_t = 1e6)]
        guard: f64,
        /// Store a snapshot every this many steps.
        #[arg(long, default_value_t = 0)]
        snapshots: usize,
        /// Apply 2/3-rule dealiasing to the quadratic term.
        #[arg(long)]
        dealias: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Verify the self-similar profile formulas at a list of times.
    ProfileCheck {
        #[arg(long)]
        preset: String,
        #[arg(long, value_enum)]
        theorem: Theorem,
        /// Degeneracy order for the general two-scale theorem.
        #[arg(long)]
        n: Option<u32>,
        /// Comma-separated list of T-t values.
        #[arg(long, default_value = "1e-2,1e-3,1e-4")]
        t_list: String,
        /// Bulk-centre path for the two-scale rescaling.
        #[arg(long, value_enum)]
        center: Option<Center>,
        #[arg(long)]
        out: Option<String>,
    },
    /// List the built-in presets and their expected blowup data.
    ListPresets,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Theorem {
    /// Exact one-scale self-similarity (errors at machine precision).
    Exact,
    /// Asymptotic one-scale blowup (error rate 1 in T-t).
    OneScale,
    /// Two-scale blowup with cubic degeneracy (rate 1/2).
    TwoScaleBasic,
    /// Two-scale blowup of general degeneracy (rate 1/2).
    TwoScaleGeneral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Center {
    /// Solve the implicit bulk-centre equation at every time.
    Implicit,
    /// Use the preset's affine centring law r0 + r1 (T-t).
    Affine,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2 on usage errors; the contract here is 1
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    std::fs::create_dir_all(&cli.out_dir)
        .with_context(|| format!("creating {}", cli.out_dir.display()))?;
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Exact {
            preset: pid,
            datum_file,
            t,
            grid,
            out,
        } => {
            let (datum, label, t_blowup) = resolve_datum(pid.as_deref(), datum_file.as_deref())?;
            if let Some(tb) = t_blowup {
                if *t >= tb {
                    bail!("t = {t} is not before the blowup time T = {tb}");
                }
            }
            let xs = parse_grid(grid).map_err(usage)?;
            let stem = out
                .clone()
                .unwrap_or_else(|| format!("exact_{}_t{}", label.replace(' ', "_"), t));
            let snap = evaluate_grid(&datum, &xs, *t, Some(label.clone()))?;
            let mut man = RunManifest::new(
                Some(label),
                json!({"t": t, "grid": grid, "format": if json { "json" } else { "csv" }}),
            );
            let path = io::write_snapshot(&snap, &cli.out_dir, &stem, json)?;
            man.record(&path);
            man.write(&cli.out_dir, &stem)?;
            if !cli.quiet {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Poles {
            preset: pid,
            t0,
            t1,
            dt,
            out,
        } => {
            let p = lookup_preset(pid)?;
            // a multiple initial pole branches instantly; seed just after
            let t0 = t0.unwrap_or(match p.id {
                PresetId::V => 1e-6,
                _ => 0.0,
            });
            let t1 = t1.unwrap_or_else(|| match p.notes.blowup_time {
                Some(tb) => tb + 0.01,
                None => 10.0,
            });
            let stem = out.clone().unwrap_or_else(|| format!("poles_{}", p.id));
            let trajs = track_zeros(&p.zeta0, t0, t1, *dt)?;
            let mut man = RunManifest::new(
                Some(p.id.to_string()),
                json!({"t0": t0, "t1": t1, "dt": dt}),
            );
            for (k, traj) in trajs.iter().enumerate() {
                let path = io::write_trajectory_csv(
                    traj,
                    k,
                    &cli.out_dir,
                    &format!("{stem}_branch{k}"),
                )?;
                man.record(&path);
                if !cli.quiet {
                    println!(
                        "branch {k}: {} samples, {} events -> {}",
                        traj.samples.len(),
                        traj.events.len(),
                        path.display()
                    );
                }
            }
            man.write(&cli.out_dir, &stem)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scaling {
            preset: pid,
            window,
            points,
            out,
        } => {
            let p = lookup_preset(pid)?;
            let t_blowup = p
                .notes
                .blowup_time
                .ok_or_else(|| anyhow!("preset {} does not blow up", p.id))?;
            let (lo, hi) = parse_window(window).map_err(usage)?;
            let datum = InitialDatum::from_preset(&p)?;
            let ss: Vec<f64> = (0..*points)
                .map(|k| lo * (hi / lo).powf(k as f64 / (*points - 1).max(1) as f64))
                .collect();
            let snaps = scaling_snapshots(&datum, t_blowup, &ss, 2048, Some(&p.id.to_string()))?;
            let report = measure_scales(&snaps, t_blowup)?;
            let stem = out.clone().unwrap_or_else(|| format!("scaling_{}", p.id));
            let mut man = RunManifest::new(
                Some(p.id.to_string()),
                json!({"window": window, "points": points}),
            );
            let report_path = cli.out_dir.join(format!("{stem}_report.json"));
            std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
            man.record(&report_path);
            let meas_path = cli.out_dir.join(format!("{stem}_measurements.csv"));
            let mut csv = String::from("T_minus_t,max_omega,x_peak,fwhm\n");
            for s in &report.samples {
                csv.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    s.t_minus_t, s.peak_magnitude, s.peak_location, s.fwhm
                ));
            }
            std::fs::write(&meas_path, csv)?;
            man.record(&meas_path);
            man.write(&cli.out_dir, &stem)?;
            if !cli.quiet {
                println!(
                    "c_omega = {:.4}, c_l = {:.4}, c_s = {:.4}{}, power-relation defect = {:+.5}",
                    report.c_omega,
                    report.c_l,
                    report.c_s,
                    if report.c_s_degenerate {
                        " (degenerate)"
                    } else {
                        ""
                    },
                    report.power_relation_defect
                );
                println!("wrote {} and {}", report_path.display(), meas_path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Evolve {
            preset: pid,
            datum_file,
            t_end,
            n,
            l,
            dt,
            guard,
            snapshots,
            dealias,
            out,
        } => {
            let cfg = EvolverConfig {
                domain_half_width: *l,
                grid_size: *n,
                dt: *dt,
                t_end: *t_end,
                blowup_guard: *guard,
                snapshot_every: *snapshots,
                dealias: *dealias,
            };
            let xs = cfg.grid();
            // initial samples plus the oracle datum when one exists
            let (w0, oracle, label): (Vec<f64>, Option<InitialDatum>, String) =
                match (pid, datum_file) {
                    (Some(pid), None) => {
                        let p = lookup_preset(pid)?;
                        if let Some(tb) = p.notes.blowup_time {
                            if *t_end >= 0.9 * tb {
                                bail!(
                                    "t_end = {t_end} is not safely before blowup (T = {tb}); keep t_end < 0.9 T"
                                );
                            }
                        }
                        let d = InitialDatum::from_preset(&p)?;
                        let w0 = xs.iter().map(|&x| d.omega0(x)).collect();
                        (w0, Some(d), p.id.to_string())
                    }
                    (None, Some(path)) => {
                        let file = load_datum_file(path)?;
                        if let Some(eta) = &file.eta0 {
                            let d = datum_from_eta(eta)?;
                            let w0 = xs.iter().map(|&x| d.omega0(x)).collect();
                            (w0, Some(d), "datum-file".into())
                        } else if let Some(samples) = &file.samples {
                            if samples.xs.len() != xs.len() {
                                bail!(
                                    "sample count {} does not match the grid size {}",
                                    samples.xs.len(),
                                    xs.len()
                                );
                            }
                            for (a, b) in samples.xs.iter().zip(&xs) {
                                if (a - b).abs() > 1e-9 * (1.0 + b.abs()) {
                                    bail!(
                                        "sample grid does not match -L + 2Lj/N for the given N, L"
                                    );
                                }
                            }
                            (samples.omega.clone(), None, "samples".into())
                        } else {
                            bail!("datum file needs either \"eta0\" or \"samples\"");
                        }
                    }
                    _ => bail!("provide exactly one of --preset or --datum-file"),
                };
            let run = evolve(&w0, &cfg)?;
            let stem = out.clone().unwrap_or_else(|| format!("evolve_{label}"));
            let mut man = RunManifest::new(
                pid.clone(),
                json!({
                    "t_end": t_end, "n": n, "l": l, "dt": dt, "guard": guard,
                    "snapshots": snapshots, "dealias": dealias
                }),
            );
            for (k, snap) in run.snapshots.iter().enumerate() {
                let path =
                    io::write_snapshot(snap, &cli.out_dir, &format!("{stem}_{k:03}"), json)?;
                man.record(&path);
            }
            // deviation-vs-oracle report when the closed form is available
            if let Some(d) = &oracle {
                let rows: Vec<serde_json::Value> = run
                    .snapshots
                    .iter()
                    .map(|s| {
                        let dev = deviation_from_exact(s, d, 10.0).unwrap_or(f64::NAN);
                        json!({"t": s.t, "rel_sup_deviation": dev})
                    })
                    .collect();
                let path = cli.out_dir.join(format!("{stem}_deviation.json"));
                std::fs::write(&path, serde_json::to_string_pretty(&rows)?)?;
                man.record(&path);
                if !cli.quiet {
                    println!("deviation vs oracle: {}", serde_json::to_string(&rows)?);
                }
            }
            man.write(&cli.out_dir, &stem)?;
            let final_t = run.final_snapshot().t;
            if run.stopped_reason == StopReason::GuardTripped && final_t < *t_end {
                if !cli.quiet {
                    println!("guard tripped at t = {final_t} before t_end = {t_end}");
                }
                return Ok(ExitCode::from(3));
            }
            if !cli.quiet {
                println!("reached t = {final_t} in {} snapshots", run.snapshots.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ProfileCheck {
            preset: pid,
            theorem,
            n,
            t_list,
            center,
            out,
        } => {
            let p = lookup_preset(pid)?;
            let datum = InitialDatum::from_preset(&p)?;
            let order = match theorem {
                Theorem::Exact | Theorem::OneScale => 0,
                Theorem::TwoScaleBasic => 1,
                Theorem::TwoScaleGeneral => n.unwrap_or(2),
            };
            let params = extract_params(&datum, order)?;
            let bulk = match center {
                Some(Center::Implicit) => BulkCenter::ImplicitEq,
                Some(Center::Affine) => affine_center(&p)?,
                None => match p.notes.bulk_center {
                    Some((r0, r1)) => BulkCenter::Affine { r0, r1 },
                    None => BulkCenter::ImplicitEq,
                },
            };
            let ss: Vec<f64> = t_list
                .split(',')
                .map(|s| s.trim().parse::<f64>().context("t-list entry"))
                .collect::<Result<_>>()
                .map_err(usage)?;
            let mut rows = Vec::new();
            for &s in &ss {
                let (ew, eh) = profile_error(&datum, &params, params.t_blowup - s, 10.0, bulk)?;
                rows.push((s, ew, eh));
            }
            let stem = out
                .clone()
                .unwrap_or_else(|| format!("profile_{}_{}", p.id, theorem_name(*theorem)));
            let mut man = RunManifest::new(
                Some(p.id.to_string()),
                json!({"theorem": theorem_name(*theorem), "n": order, "t_list": t_list}),
            );
            let csv_path = cli.out_dir.join(format!("{stem}.csv"));
            let mut csv = String::from("T_minus_t,err_omega,err_hilbert\n");
            for (s, ew, eh) in &rows {
                csv.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", s, ew, eh));
            }
            std::fs::write(&csv_path, csv)?;
            man.record(&csv_path);
            let fit = if rows.len() >= 2 && rows.iter().all(|r| r.1 > 1e-14) {
                let ssv: Vec<f64> = rows.iter().map(|r| r.0).collect();
                let ew: Vec<f64> = rows.iter().map(|r| r.1).collect();
                Some(fit_loglog(&ssv, &ew))
            } else {
                None
            };
            let fit_path = cli.out_dir.join(format!("{stem}_fit.json"));
            std::fs::write(
                &fit_path,
                serde_json::to_string_pretty(&json!({
                    "rows": rows.iter().map(|r| json!({"t_minus_t": r.0, "err_omega": r.1, "err_hilbert": r.2})).collect::<Vec<_>>(),
                    "error_decay_slope": fit.as_ref().map(|f| f.slope),
                }))?,
            )?;
            man.record(&fit_path);
            man.write(&cli.out_dir, &stem)?;
            if !cli.quiet {
                match &fit {
                    Some(f) => println!(
                        "max error {:.3e}; fitted error-decay slope {:.3}",
                        rows.iter().map(|r| r.1).fold(0.0f64, f64::max),
                        f.slope
                    ),
                    None => println!(
                        "max error {:.3e} (at machine precision; no slope fitted)",
                        rows.iter().map(|r| r.1).fold(0.0f64, f64::max)
                    ),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ListPresets => {
            print!("{}", preset_help());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn theorem_name(t: Theorem) -> &'static str {
    match t {
        Theorem::Exact => "exact",
        Theorem::OneScale => "one-scale",
        Theorem::TwoScaleBasic => "two-scale-basic",
        Theorem::TwoScaleGeneral => "two-scale-general",
    }
}

fn affine_center(p: &Preset) -> Result<BulkCenter> {
    match p.notes.bulk_center {
        Some((r0, r1)) => Ok(BulkCenter::Affine { r0, r1 }),
        None => bail!("preset {} has no affine centring law", p.id),
    }
}

fn lookup_preset(id: &str) -> Result<Preset> {
    let pid: PresetId = id.parse().map_err(|e: String| usage(anyhow!(e)))?;
    Ok(preset(pid))
}

/// Resolve a datum plus label and known blowup time.
fn resolve_datum(
    pid: Option<&str>,
    datum_file: Option<&std::path::Path>,
) -> Result<(InitialDatum, String, Option<f64>)> {
    match (pid, datum_file) {
        (Some(id), None) => {
            let p = lookup_preset(id)?;
            Ok((
                InitialDatum::from_preset(&p)?,
                p.id.to_string(),
                p.notes.blowup_time,
            ))
        }
        (None, Some(path)) => {
            let file = load_datum_file(path)?;
            let eta = file
                .eta0
                .ok_or_else(|| anyhow!("datum file needs an \"eta0\" generator"))?;
            let datum = datum_from_eta(&eta)?;
            let t_blowup = predict_blowup(&datum, (-30.0, 30.0))
                .ok()
                .map(|p| p.t_blowup);
            Ok((datum, "datum-file".into(), t_blowup))
        }
        _ => bail!("provide exactly one of --preset or --datum-file"),
    }
}

/// Usage-level errors exit with code 1 instead of 2.
fn usage(e: anyhow::Error) -> anyhow::Error {
    eprintln!("usage error: {e:#}");
    std::process::exit(1);
}
