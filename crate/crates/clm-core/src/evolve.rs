//! Pseudo-spectral time integrator for `w_t = w H(w)`: classical RK4 with
//! the tail-corrected FFT Hilbert transform applied at every stage. Used as
//! an independent cross-check of the closed form before blowup, and as the
//! only route for non-rational sampled data.

use crate::exact::{evaluate, ExactError, InitialDatum, SolutionSnapshot};
use crate::hilbert::{HilbertError, HilbertFft};
use crate::numeric::fit_loglog;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("bad evolver configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Discretisation and stopping parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolverConfig {
    /// Domain half-width L; the grid is `x_j = -L + 2Lj/N`.
    pub domain_half_width: f64,
    /// Number of grid points N (a power of two, at least 256).
    pub grid_size: usize,
    /// Base time step; halved automatically when `max|w| dt > 0.1`.
    pub dt: f64,
    pub t_end: f64,
    /// Stop when `max|w|` exceeds this guard.
    pub blowup_guard: f64,
    /// Store a snapshot every this many steps (0: only the final state).
    pub snapshot_every: usize,
    /// Optional 2/3-rule dealiasing of the quadratic term.
    pub dealias: bool,
}

impl Default for EvolverConfig {
    fn default() -> Self {
        EvolverConfig {
            domain_half_width: 40.0,
            grid_size: 4096,
            dt: 1.0 / 512.0,
            t_end: 0.5,
            blowup_guard: 1e6,
            snapshot_every: 0,
            dealias: false,
        }
    }
}

impl EvolverConfig {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_size;
        let l = self.domain_half_width;
        (0..n).map(|j| -l + 2.0 * l * j as f64 / n as f64).collect()
    }

    fn validate(&self) -> Result<(), EvolveError> {
        if self.grid_size < 256 || !self.grid_size.is_power_of_two() {
            return Err(EvolveError::BadConfig(format!(
                "grid_size must be a power of two >= 256, got {}",
                self.grid_size
            )));
        }
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) || !(self.domain_half_width > 0.0) {
            return Err(EvolveError::BadConfig(
                "dt, t_end and the domain half-width must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ReachedTEnd,
    GuardTripped,
}

/// Result of one integration: stored snapshots, the stop cause, and the
/// step-halving log `(t, dt)` recording every change of the step size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolverRun {
    pub snapshots: Vec<SolutionSnapshot>,
    pub stopped_reason: StopReason,
    pub step_log: Vec<(f64, f64)>,
}

impl EvolverRun {
    pub fn final_snapshot(&self) -> &SolutionSnapshot {
        self.snapshots.last().expect("at least the final snapshot")
    }
}

/// Integrate sampled initial data on the configured grid.
pub fn evolve(initial: &[f64], cfg: &EvolverConfig) -> Result<EvolverRun, EvolveError> {
    cfg.validate()?;
    let n = cfg.grid_size;
    if initial.len() != n {
        return Err(EvolveError::BadConfig(format!(
            "initial data has {} samples, the grid has {n}",
            initial.len()
        )));
    }
    let plan = HilbertFft::new(cfg.domain_half_width, n)?;
    let xs = cfg.grid();
    let dealias = if cfg.dealias {
        let mut planner = FftPlanner::new();
        Some((planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
    } else {
        None
    };

    let rhs = |w: &[f64]| -> Result<Vec<f64>, EvolveError> {
        let h = plan.transform(w)?.values;
        let mut prod: Vec<f64> = w.iter().zip(&h).map(|(a, b)| a * b).collect();
        if let Some((fwd, inv)) = &dealias {
            // 2/3-rule: drop the top third of the product spectrum
            let mut buf: Vec<Complex64> =
                prod.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fwd.process(&mut buf);
            let cut = n / 3;
            for (j, v) in buf.iter_mut().enumerate() {
                let k = if j <= n / 2 { j } else { n - j };
                if k > cut {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
            inv.process(&mut buf);
            for (p, b) in prod.iter_mut().zip(&buf) {
                *p = b.re / n as f64;
            }
        }
        Ok(prod)
    };

    let snapshot = |w: &[f64], t: f64| -> Result<SolutionSnapshot, EvolveError> {
        let h = plan.transform(w)?.values;
        Ok(SolutionSnapshot {
            t,
            xs: xs.clone(),
            omega: w.to_vec(),
            hilbert_omega: h,
            label: None,
        })
    };

    let mut w = initial.to_vec();
    let mut t = 0.0;
    let mut dt = cfg.dt;
    let mut snapshots = Vec::new();
    let mut step_log = vec![(0.0, dt)];
    let mut step_count = 0usize;
    let mut reason = StopReason::ReachedTEnd;
    while t < cfg.t_end {
        let maxw = w.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if maxw > cfg.blowup_guard {
            reason = StopReason::GuardTripped;
            break;
        }
        // CFL-like halving of the step near large amplitudes
        while maxw * dt > 0.1 {
            dt *= 0.5;
            step_log.push((t, dt));
        }
        let h = dt.min(cfg.t_end - t);
        let k1 = rhs(&w)?;
        let w2: Vec<f64> = w.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let k2 = rhs(&w2)?;
        let w3: Vec<f64> = w.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let k3 = rhs(&w3)?;
        let w4: Vec<f64> = w.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let k4 = rhs(&w4)?;
        for i in 0..n {
            w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
        step_count += 1;
        if cfg.snapshot_every > 0 && step_count % cfg.snapshot_every == 0 && t < cfg.t_end {
            snapshots.push(snapshot(&w, t)?);
        }
    }
    snapshots.push(snapshot(&w, t)?);
    Ok(EvolverRun {
        snapshots,
        stopped_reason: reason,
        step_log,
    })
}

/// Deviation of an evolver state from the closed form of `datum` at time
/// `t`, as a sup norm over `|x| <= window` relative to the exact sup.
pub fn deviation_from_exact(
    snap: &SolutionSnapshot,
    datum: &InitialDatum,
    window: f64,
) -> Result<f64, ExactError> {
    let mut dev = 0.0f64;
    let mut scale = 0.0f64;
    for (j, &x) in snap.xs.iter().enumerate() {
        if x.abs() <= window {
            let (we, _) = evaluate(datum, x, snap.t)?;
            dev = dev.max((snap.omega[j] - we).abs());
            scale = scale.max(we.abs());
        }
    }
    Ok(dev / scale.max(f64::MIN_POSITIVE))
}

/// Temporal and spatial refinement table against the closed-form oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceTable {
    /// `(dt, sup error at t_end over |x| <= 10)` rows, dt halving.
    pub temporal: Vec<(f64, f64)>,
    /// `(N, sup error)` rows at fixed small dt, N doubling.
    pub spatial: Vec<(usize, f64)>,
    /// Observed temporal order from a log-log fit on the rows clear of the
    /// spatial error floor.
    pub temporal_order: f64,
}

/// Run the refinement study for a rational datum (the exact oracle).
pub fn convergence_study(
    datum: &InitialDatum,
    cfg: &EvolverConfig,
    refinements: usize,
) -> Result<ConvergenceTable, EvolveError> {
    cfg.validate()?;
    let mut temporal = Vec::new();
    let mut dt = cfg.dt;
    for _ in 0..=refinements {
        let mut c = cfg.clone();
        c.dt = dt;
        c.snapshot_every = 0;
        let xs = c.grid();
        let w0: Vec<f64> = xs.iter().map(|&x| datum.omega0(x)).collect();
        let run = evolve(&w0, &c)?;
        let dev = sup_error(run.final_snapshot(), datum)?;
        temporal.push((dt, dev));
        dt *= 0.5;
    }
    let mut spatial = Vec::new();
    let mut n = 256;
    while n <= cfg.grid_size {
        let mut c = cfg.clone();
        c.grid_size = n;
        c.snapshot_every = 0;
        let xs = c.grid();
        let w0: Vec<f64> = xs.iter().map(|&x| datum.omega0(x)).collect();
        let run = evolve(&w0, &c)?;
        spatial.push((n, sup_error(run.final_snapshot(), datum)?));
        n *= 2;
    }
    // fit the temporal order on rows above the floor set by the last row
    let floor = temporal.last().map(|r| r.1).unwrap_or(0.0);
    let fitted: Vec<(f64, f64)> = temporal
        .iter()
        .copied()
        .filter(|&(_, e)| e > 10.0 * floor.max(1e-14))
        .collect();
    let temporal_order = if fitted.len() >= 2 {
        let dts: Vec<f64> = fitted.iter().map(|r| r.0).collect();
        let errs: Vec<f64> = fitted.iter().map(|r| r.1).collect();
        fit_loglog(&dts, &errs).slope
    } else if cfg.t_end == 0.0 {
        0.0
    } else {
        f64::NAN
    };
    Ok(ConvergenceTable {
        temporal,
        spatial,
        temporal_order,
    })
}

fn sup_error(snap: &SolutionSnapshot, datum: &InitialDatum) -> Result<f64, ExactError> {
    let mut dev = 0.0f64;
    for (j, &x) in snap.xs.iter().enumerate() {
        if x.abs() <= 10.0 {
            let (we, _) = evaluate(datum, x, snap.t)?;
            dev = dev.max((snap.omega[j] - we).abs());
        }
    }
    Ok(dev)
}
