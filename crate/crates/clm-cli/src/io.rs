//! Grid parsing, datum files, and the CSV/JSON writers shared by the
//! subcommands. All floating-point output uses 17 significant digits so
//! reruns are byte-identical.

use anyhow::{bail, Context, Result};
use clm_core::exact::{InitialDatum, SolutionSnapshot};
use clm_core::poles::{EventKind, PoleTrajectory};
use clm_core::rational::{Polynomial, RationalFunction};
use serde::Deserialize;
use std::path::Path;

/// Parse a `lo:hi:npts` grid specification.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid must be lo:hi:npts, got '{spec}'");
    }
    let lo: f64 = parts[0].parse().context("grid lo")?;
    let hi: f64 = parts[1].parse().context("grid hi")?;
    let n: usize = parts[2].parse().context("grid npts")?;
    if !(hi > lo) || n < 2 {
        bail!("grid needs hi > lo and npts >= 2");
    }
    Ok((0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect())
}

/// Parse a `lo:hi` window specification.
pub fn parse_window(spec: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        bail!("window must be lo:hi, got '{spec}'");
    }
    let lo: f64 = parts[0].parse().context("window lo")?;
    let hi: f64 = parts[1].parse().context("window hi")?;
    if !(hi > lo) || !(lo > 0.0) {
        bail!("window needs hi > lo > 0");
    }
    Ok((lo, hi))
}

/// Datum file: either a rational generator or raw samples.
#[derive(Debug, Deserialize)]
pub struct DatumFile {
    pub eta0: Option<EtaSpec>,
    pub samples: Option<SampleSpec>,
}

#[derive(Debug, Deserialize)]
pub struct EtaSpec {
    pub num: Polynomial,
    pub den: Polynomial,
    #[serde(default)]
    pub odd_symmetric: bool,
    #[serde(default)]
    pub sign_condition: bool,
}

#[derive(Debug, Deserialize)]
pub struct SampleSpec {
    pub xs: Vec<f64>,
    pub omega: Vec<f64>,
}

pub fn load_datum_file(path: &Path) -> Result<DatumFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading datum file {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn datum_from_eta(spec: &EtaSpec) -> Result<InitialDatum> {
    let eta = RationalFunction::new(spec.num.clone(), spec.den.clone())?;
    Ok(InitialDatum::new(
        &eta,
        spec.odd_symmetric,
        spec.sign_condition,
    )?)
}

/// Write a snapshot in the requested format; returns the final path.
pub fn write_snapshot(
    snap: &SolutionSnapshot,
    dir: &Path,
    stem: &str,
    json: bool,
) -> Result<std::path::PathBuf> {
    let path = dir.join(format!("{stem}.{}", if json { "json" } else { "csv" }));
    if json {
        std::fs::write(&path, serde_json::to_string_pretty(snap)?)?;
    } else {
        let mut buf = Vec::new();
        snap.write_csv(&mut buf)?;
        std::fs::write(&path, buf)?;
    }
    Ok(path)
}

/// Trajectory CSV: `t,re_Z,im_Z,branch_id,event` with one row per sample and
/// event markers on their own rows.
pub fn write_trajectory_csv(
    traj: &PoleTrajectory,
    branch_id: usize,
    dir: &Path,
    stem: &str,
) -> Result<std::path::PathBuf> {
    let path = dir.join(format!("{stem}.csv"));
    let mut out = String::from("t,re_Z,im_Z,branch_id,event\n");
    let mut events = traj.events.iter().peekable();
    for &(t, z) in &traj.samples {
        while let Some(e) = events.peek() {
            if e.t <= t {
                out.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},{},{}\n",
                    e.t,
                    e.re,
                    e.im,
                    branch_id,
                    event_name(e.kind)
                ));
                events.next();
            } else {
                break;
            }
        }
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{},\n",
            t, z.re, z.im, branch_id
        ));
    }
    for e in events {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{},{}\n",
            e.t,
            e.re,
            e.im,
            branch_id,
            event_name(e.kind)
        ));
    }
    std::fs::write(&path, out)?;
    Ok(path)
}

fn event_name(kind: EventKind) -> &'static str {
    match kind {
        EventKind::Branch => "branch",
        EventKind::Merge => "merge",
        EventKind::RealAxisTouch => "real_axis_touch",
    }
}
