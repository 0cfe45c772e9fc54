//! Complex pole dynamics: the zeros of `zeta(z,t) = zeta0(z) + i t/2`
//! (poles of `eta = 1/zeta`) tracked both algebraically, by re-rooting the
//! time-dependent polynomial, and by continuation of the motion law
//! `Z'(t) = -i / (2 zeta0'(Z))`. The solution on the real line blows up the
//! first time a zero touches the real axis.

use crate::numeric::{fit_loglog, golden_min};
use crate::rational::{Polynomial, RationalError, RationalFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A zero is deemed on the real axis when `Im >= -EPS_AXIS`.
pub const EPS_AXIS: f64 = 1e-10;
/// Manifold tolerance: samples satisfy `|zeta0(Z) + it/2| <= EPS_TRAJ`.
pub const EPS_TRAJ: f64 = 1e-10;
/// Two roots closer than this are treated as merging.
const MERGE_DISTANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PoleError {
    #[error("zeta0' vanishes at {z} (t = {t}): branch switch required")]
    DerivativeVanishes { t: f64, z: Complex64 },
    #[error("no real-axis touch up to t = {t_max}")]
    NoTouch { t_max: f64 },
    #[error("trajectory does not fit any known class: {0}")]
    Unclassifiable(String),
    #[error("zeta0 must have all zeros strictly below the real axis (zero at {zero})")]
    ZeroNotBelowAxis { zero: Complex64 },
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// The affinely-evolving function `zeta(z, t) = zeta0(z) + i t / 2`.
#[derive(Debug, Clone)]
pub struct ZetaState {
    pub zeta0: RationalFunction,
    pub t: f64,
}

impl ZetaState {
    pub fn new(zeta0: RationalFunction, t: f64) -> Self {
        ZetaState { zeta0, t }
    }

    /// Numerator polynomial of `zeta(., t)`: `num + (i t / 2) den`.
    pub fn zeta_poly(&self) -> Polynomial {
        let shift = Complex64::new(0.0, 0.5 * self.t);
        self.zeta0.num().add(&self.zeta0.den().scaled(shift))
    }
}

/// Zeros of `zeta(., t)` with multiplicities; roots cancelling against
/// denominator roots are excluded.
pub fn zeros_at_time(state: &ZetaState) -> Result<Vec<(Complex64, usize)>, PoleError> {
    let p = state.zeta_poly();
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let roots = p.roots()?;
    let den = state.zeta0.den();
    Ok(roots
        .into_iter()
        .filter(|(z, _)| den.eval(*z).norm() > 1e-8 * den.scale_at(*z))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// A multiple zero split into simple ones.
    Branch,
    /// Two zeros collided (the motion law breaks down there).
    Merge,
    /// The zero reached the real axis: blowup of the trace.
    RealAxisTouch,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub t: f64,
    pub kind: EventKind,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectorySource {
    Algebraic,
    Ode,
    Both,
}

/// Time-stamped positions of one tracked zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoleTrajectory {
    pub samples: Vec<(f64, Complex64)>,
    pub events: Vec<TrajectoryEvent>,
    pub source: TrajectorySource,
}

/// Integrate one zero by RK4 on `Z' = -i/(2 zeta0'(Z))` from `(t0, z0)` to
/// `t1`, polishing every accepted step back onto the algebraic manifold
/// `zeta0(Z) + i t/2 = 0`.
///
/// Stops early with a `RealAxisTouch` event when `Im Z >= -EPS_AXIS`;
/// fails with [`PoleError::DerivativeVanishes`] at merge points.
pub fn integrate_trajectory(
    zeta0: &RationalFunction,
    z0: Complex64,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<PoleTrajectory, PoleError> {
    let deriv = zeta0.derivative()?;
    let curv = deriv.derivative()?;
    let rhs = |z: Complex64| -> Result<Complex64, PoleError> {
        let d = deriv
            .eval(z)
            .map_err(|_| PoleError::DerivativeVanishes { t: f64::NAN, z })?;
        if d.norm() < 1e-9 {
            return Err(PoleError::DerivativeVanishes { t: f64::NAN, z });
        }
        Ok(Complex64::new(0.0, -0.5) / d)
    };
    // distance scale to the nearest critical point of zeta0; step
    // displacements must stay below it or the integrator hops over merges
    let crit_distance = |z: Complex64| -> f64 {
        let d1 = deriv.eval(z).map(|v| v.norm()).unwrap_or(0.0);
        let d2 = curv.eval(z).map(|v| v.norm()).unwrap_or(0.0);
        if d2 > 0.0 {
            d1 / d2
        } else {
            f64::INFINITY
        }
    };
    let polish = |mut z: Complex64, t: f64| -> Result<Complex64, PoleError> {
        for _ in 0..4 {
            let f = zeta0.eval(z).map_err(PoleError::from)? + Complex64::new(0.0, 0.5 * t);
            let d = deriv.eval(z).map_err(PoleError::from)?;
            if d.norm() < 1e-12 {
                break;
            }
            z -= f / d;
        }
        Ok(z)
    };

    let mut samples = vec![(t0, polish(z0, t0)?)];
    let mut events = Vec::new();
    let mut t = t0;
    let mut z = samples[0].1;
    while t < t1 {
        let speed = match rhs(z) {
            Ok(v) => v.norm(),
            Err(PoleError::DerivativeVanishes { .. }) => {
                return Err(PoleError::DerivativeVanishes { t, z });
            }
            Err(e) => return Err(e),
        };
        let remaining = t1 - t;
        if remaining <= 1e-14 * (1.0 + t) {
            break;
        }
        // displacement limiter: never hop further than a fraction of the
        // distance to the nearest critical point (merge candidate)
        let cap = (0.2 * crit_distance(z)).min(0.02);
        let mut h = dt.min(cap / (speed + 1e-300)).min(remaining);
        if h < 1e-14 * (1.0 + t) {
            // stalled against a vanishing derivative
            return Err(PoleError::DerivativeVanishes { t, z });
        }
        let step = |z: Complex64, h: f64| -> Result<Complex64, PoleError> {
            let k1 = rhs(z)?;
            let k2 = rhs(z + 0.5 * h * k1)?;
            let k3 = rhs(z + 0.5 * h * k2)?;
            let k4 = rhs(z + h * k3)?;
            Ok(z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        };
        let z_next = match step(z, h) {
            Ok(v) => v,
            Err(PoleError::DerivativeVanishes { .. }) => {
                h *= 0.25;
                match step(z, h) {
                    Ok(v) => v,
                    Err(_) => return Err(PoleError::DerivativeVanishes { t, z }),
                }
            }
            Err(e) => return Err(e),
        };
        let t_next = t + h;
        let z_next = polish(z_next, t_next)?;
        if z_next.im >= -EPS_AXIS {
            // refine the touch time by bisection over the last step
            let mut lo = t;
            let mut hi = t_next;
            let mut z_hi = z_next;
            for _ in 0..80 {
                if hi - lo <= 1e-13 * (1.0 + hi) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let zm = polish(z_hi, mid)?;
                if zm.im >= -EPS_AXIS {
                    hi = mid;
                    z_hi = zm;
                } else {
                    lo = mid;
                }
            }
            samples.push((hi, z_hi));
            events.push(TrajectoryEvent {
                t: hi,
                kind: EventKind::RealAxisTouch,
                re: z_hi.re,
                im: z_hi.im,
            });
            return Ok(PoleTrajectory {
                samples,
                events,
                source: TrajectorySource::Ode,
            });
        }
        t = t_next;
        z = z_next;
        samples.push((t, z));
    }
    Ok(PoleTrajectory {
        samples,
        events,
        source: TrajectorySource::Ode,
    })
}

/// First time any zero of `zeta(., t)` reaches the real axis, with the touch
/// locations; bisected to 1e-12 using the algebraic zeros.
pub fn first_touch(zeta0: &RationalFunction, t_max: f64) -> Result<(f64, Vec<f64>), PoleError> {
    for (z, _) in RationalFunction::zeros(zeta0)? {
        if z.im >= 0.0 {
            return Err(PoleError::ZeroNotBelowAxis { zero: z });
        }
    }
    let crossed = |t: f64| -> Result<bool, PoleError> {
        let zs = zeros_at_time(&ZetaState::new(zeta0.clone(), t))?;
        Ok(zs.iter().any(|(z, _)| z.im > EPS_AXIS))
    };
    // coarse scan for the first crossing
    let steps = 4096;
    let mut bracket = None;
    let mut prev = 0.0;
    for k in 1..=steps {
        let t = t_max * k as f64 / steps as f64;
        if crossed(t)? {
            bracket = Some((prev, t));
            break;
        }
        prev = t;
    }
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => return Err(PoleError::NoTouch { t_max }),
    };
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if crossed(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t_touch = 0.5 * (lo + hi);
    // touch locations just past the touch: emerged zeros hug the axis
    let probe = t_touch + 1e-10;
    let zs = zeros_at_time(&ZetaState::new(zeta0.clone(), probe))?;
    let mut points: Vec<f64> = zs
        .iter()
        .filter(|(z, _)| z.im.abs() <= 1e-4)
        .map(|(z, _)| z.re)
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-7);
    Ok((t_touch, points))
}

/// Fitted local exponents of a trajectory approaching the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalExponents {
    /// `|X| ~ (T-t)^alpha_x`; `None` when X stays pinned at the touch point.
    pub alpha_x: Option<f64>,
    /// `|Y| ~ (T-t)^alpha_y` (0 for a traveling pole).
    pub alpha_y: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    OneScale,
    TwoScale(u32),
    Traveling,
    Other,
}

/// Classify a trajectory from samples inside `T - t` in `[1e-6, 1e-2]`,
/// assuming the touch point is the origin.
pub fn local_exponents(
    traj: &PoleTrajectory,
    t_blowup: f64,
) -> Result<LocalExponents, PoleError> {
    let pts: Vec<(f64, Complex64)> = traj
        .samples
        .iter()
        .filter(|(t, _)| {
            let s = t_blowup - t;
            (1e-6..=1e-2).contains(&s)
        })
        .map(|&(t, z)| (t_blowup - t, z))
        .collect();
    if pts.len() < 6 {
        return Err(PoleError::Unclassifiable(format!(
            "only {} samples inside T-t in [1e-6, 1e-2]",
            pts.len()
        )));
    }
    let ys: Vec<f64> = pts.iter().map(|(_, z)| z.im.abs()).collect();
    let xs: Vec<f64> = pts.iter().map(|(_, z)| z.re.abs()).collect();
    let ss: Vec<f64> = pts.iter().map(|(s, _)| *s).collect();

    // traveling: the imaginary part never approaches the axis
    let y_min = ys.iter().fold(f64::MAX, |a, &b| a.min(b));
    let y_max = ys.iter().fold(f64::MIN, |a, &b| a.max(b));
    if y_min > 1e-3 && (y_max - y_min) <= 1e-6 * (1.0 + y_max) {
        return Ok(LocalExponents {
            alpha_x: None,
            alpha_y: 0.0,
            classification: Classification::Traveling,
        });
    }

    let fy = fit_loglog(&ss, &ys);
    let alpha_y = fy.slope;
    let x_pinned = xs.iter().all(|&x| x <= 1e-9);
    if x_pinned {
        let classification = if (alpha_y - 1.0).abs() <= 0.1 {
            Classification::OneScale
        } else {
            Classification::Other
        };
        return Ok(LocalExponents {
            alpha_x: None,
            alpha_y,
            classification,
        });
    }
    let fx = fit_loglog(&ss, &xs);
    let alpha_x = fx.slope;
    let n_guess = alpha_y.round();
    let classification = if (alpha_x - 0.5).abs() <= 0.1
        && n_guess >= 1.0
        && (alpha_y - n_guess).abs() <= 0.15
    {
        Classification::TwoScale(n_guess as u32)
    } else {
        Classification::Other
    };
    Ok(LocalExponents {
        alpha_x: Some(alpha_x),
        alpha_y,
        classification,
    })
}

/// Real/imaginary split of the motion law at `(x, y)`:
/// `X' = -B_x / (2(A_x^2+B_x^2))`, `Y' = -A_x / (2(A_x^2+B_x^2))` where
/// `A_x + i B_x = zeta0'(x + i y)`.
pub fn xy_ode_rhs(zeta0: &RationalFunction, x: f64, y: f64) -> Result<(f64, f64), PoleError> {
    let d = zeta0.derivative()?.eval(Complex64::new(x, y))?;
    let (ax, bx) = (d.re, d.im);
    let denom = 2.0 * (ax * ax + bx * bx);
    if denom < 1e-18 {
        return Err(PoleError::DerivativeVanishes {
            t: f64::NAN,
            z: Complex64::new(x, y),
        });
    }
    Ok((-bx / denom, -ax / denom))
}

/// Local expansion parameters in the general-analysis normalisation
/// `w0(x) = -c x^(2n+1) + ..., H(w0)(x) = a + b x^2 + ...`; this differs
/// from the theorem normalisation by `a = 2 a_thm`, `b = 2 b_thm`,
/// `c = 4 c_thm`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LocalExpansionParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub n: u32,
}

impl LocalExpansionParams {
    pub fn from_theorem(p: &crate::asymptotics::TheoremParams) -> Self {
        LocalExpansionParams {
            a: 2.0 * p.a,
            b: 2.0 * p.b.unwrap_or(0.0),
            c: 4.0 * p.c,
            n: p.n,
        }
    }
}

/// Shape-relation diagnostics of a two-scale trajectory near the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeRelationReport {
    /// Log-log slope of `|Y + (c/2b) X^(2n)|` against `|X|`
    /// (the expansion predicts `2n + 2`).
    pub shape_residual_slope: f64,
    /// Peak of `|Y + (c/2b) X^(2n)| / |X|^(2n+1)` over the samples.
    pub shape_residual_scale: f64,
    /// Log-log slope of `|X^2 - (a^2/2b)(T-t)|` against `T-t`
    /// (the expansion predicts 2).
    pub center_residual_slope: f64,
    /// Log-log slope of `|Y|` against `|X|` (the expansion predicts `2n`).
    pub y_vs_x_slope: f64,
}

/// Check the near-origin expansion `Y = -(c/2b) X^(2n) + h.o.t.` and
/// `X^2 = (a^2/2b)(T-t) + h.o.t.` on trajectory samples.
pub fn shape_relation_check(
    traj: &PoleTrajectory,
    params: &LocalExpansionParams,
    t_blowup: f64,
) -> Result<ShapeRelationReport, PoleError> {
    let pts: Vec<(f64, Complex64)> = traj
        .samples
        .iter()
        .filter(|&&(t, z)| t < t_blowup && z.re.abs() > 1e-9)
        .map(|&(t, z)| (t_blowup - t, z))
        .collect();
    if pts.len() < 6 {
        return Err(PoleError::Unclassifiable(
            "need at least 6 samples with X away from 0".into(),
        ));
    }
    let two_n = 2 * params.n as i32;
    let mut xs = Vec::new();
    let mut resid = Vec::new();
    let mut scale = 0.0f64;
    let mut ss = Vec::new();
    let mut center_resid = Vec::new();
    let mut ys = Vec::new();
    for &(s, z) in &pts {
        let x = z.re.abs();
        let y = z.im;
        let r = (y + params.c / (2.0 * params.b) * x.powi(two_n)).abs();
        xs.push(x);
        resid.push(r.max(1e-300));
        scale = scale.max(r / x.powi(two_n + 1));
        ss.push(s);
        center_resid.push(
            (x * x - params.a * params.a / (2.0 * params.b) * s)
                .abs()
                .max(1e-300),
        );
        ys.push(y.abs().max(1e-300));
    }
    Ok(ShapeRelationReport {
        shape_residual_slope: fit_loglog(&xs, &resid).slope,
        shape_residual_scale: scale,
        center_residual_slope: fit_loglog(&ss, &center_resid).slope,
        y_vs_x_slope: fit_loglog(&xs, &ys).slope,
    })
}

/// Track every zero over `[t0, t1]` algebraically with nearest-neighbour
/// branch matching, recording branch/merge/touch events. Branches stop at
/// their first real-axis touch.
pub fn track_zeros(
    zeta0: &RationalFunction,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<PoleTrajectory>, PoleError> {
    assert!(t1 > t0 && dt > 0.0);
    let state = |t: f64| ZetaState::new(zeta0.clone(), t);
    let expand = |zs: Vec<(Complex64, usize)>| -> Vec<Complex64> {
        let mut out = Vec::new();
        for (z, m) in zs {
            out.extend(std::iter::repeat(z).take(m));
        }
        out
    };
    let first = zeros_at_time(&state(t0))?;
    let mut trajectories: Vec<PoleTrajectory> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut positions: Vec<Complex64> = Vec::new();
    for (z, m) in &first {
        for _ in 0..*m {
            let mut events = Vec::new();
            if *m > 1 {
                events.push(TrajectoryEvent {
                    t: t0,
                    kind: EventKind::Branch,
                    re: z.re,
                    im: z.im,
                });
            }
            trajectories.push(PoleTrajectory {
                samples: vec![(t0, *z)],
                events,
                source: TrajectorySource::Algebraic,
            });
            active.push(trajectories.len() - 1);
            positions.push(*z);
        }
    }
    let nsteps = ((t1 - t0) / dt).ceil() as usize;
    let mut prev_min_dist = pairwise_min(&positions);
    let mut armed = true;
    for k in 1..=nsteps {
        let t = (t0 + dt * k as f64).min(t1);
        let roots = expand(zeros_at_time(&state(t))?);
        // greedy nearest-neighbour assignment of active branches to roots
        let mut used = vec![false; roots.len()];
        let mut new_positions = positions.clone();
        for (bi, &slot) in active.iter().enumerate() {
            let mut best = None;
            let mut best_d = f64::MAX;
            for (ri, &r) in roots.iter().enumerate() {
                if used[ri] {
                    continue;
                }
                let d = (r - positions[bi]).norm();
                if d < best_d {
                    best_d = d;
                    best = Some(ri);
                }
            }
            if let Some(ri) = best {
                used[ri] = true;
                new_positions[bi] = roots[ri];
                trajectories[slot].samples.push((t, roots[ri]));
            }
        }
        // merge detection: either the closest pair collapsed outright, or
        // the pairwise-distance dip just passed its minimum
        let min_dist = pairwise_min(&new_positions);
        let crossed = min_dist < MERGE_DISTANCE && prev_min_dist >= MERGE_DISTANCE;
        let passed_dip = armed && prev_min_dist < 0.08 && min_dist >= 0.999 * prev_min_dist;
        if crossed || passed_dip {
            let lo = (t - 3.0 * dt).max(t0);
            if let Ok((tm, loc)) = refine_merge(zeta0, lo, t) {
                // accept only if the pair genuinely collapses there
                let zs = zeros_at_time(&state(tm))?;
                let pair_gap = zs
                    .iter()
                    .map(|(z, _)| (z - loc).norm())
                    .fold(f64::MAX, f64::min);
                if pair_gap < MERGE_DISTANCE {
                    let gate = (3.0 * prev_min_dist).max(100.0 * MERGE_DISTANCE);
                    for &slot in &active {
                        let last = trajectories[slot].samples.last().unwrap().1;
                        if (last - loc).norm() < gate {
                            trajectories[slot].events.push(TrajectoryEvent {
                                t: tm,
                                kind: EventKind::Merge,
                                re: loc.re,
                                im: loc.im,
                            });
                        }
                    }
                    armed = false;
                }
            }
        }
        if min_dist > 0.16 {
            armed = true;
        }
        prev_min_dist = min_dist;
        positions = new_positions;
        // retire branches that reached the axis
        let mut keep = Vec::new();
        let mut keep_pos = Vec::new();
        for (bi, &slot) in active.iter().enumerate() {
            if positions[bi].im >= -EPS_AXIS {
                let z = positions[bi];
                trajectories[slot].events.push(TrajectoryEvent {
                    t,
                    kind: EventKind::RealAxisTouch,
                    re: z.re,
                    im: z.im,
                });
            } else {
                keep.push(slot);
                keep_pos.push(positions[bi]);
            }
        }
        active = keep;
        positions = keep_pos;
        if active.is_empty() {
            break;
        }
    }
    Ok(trajectories)
}

fn pairwise_min(zs: &[Complex64]) -> f64 {
    let mut best = f64::MAX;
    for i in 0..zs.len() {
        for j in 0..i {
            best = best.min((zs[i] - zs[j]).norm());
        }
    }
    best
}

fn closest_pair(zs: &[Complex64]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_d = f64::MAX;
    for i in 0..zs.len() {
        for j in 0..i {
            let d = (zs[i] - zs[j]).norm();
            if d < best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Merge time and location of the closest-approaching pair of zeros within
/// `[t_lo, t_hi]`, refined by golden-section on the minimum pairwise
/// distance.
pub fn refine_merge(
    zeta0: &RationalFunction,
    t_lo: f64,
    t_hi: f64,
) -> Result<(f64, Complex64), PoleError> {
    let z0c = zeta0.clone();
    let dist_at = move |tm: f64| -> f64 {
        match zeros_at_time(&ZetaState::new(z0c.clone(), tm)) {
            Ok(zs) => {
                let mut pos = Vec::new();
                for (z, m) in zs {
                    pos.extend(std::iter::repeat(z).take(m));
                }
                if pos.len() < 2 {
                    0.0
                } else {
                    pairwise_min(&pos)
                }
            }
            Err(_) => f64::MAX,
        }
    };
    let tm = golden_min(dist_at, t_lo, t_hi, 1e-15);
    let zs = zeros_at_time(&ZetaState::new(zeta0.clone(), tm))?;
    let mut pos = Vec::new();
    for (z, m) in zs {
        pos.extend(std::iter::repeat(z).take(m));
    }
    if pos.len() < 2 {
        // fully merged into a multiple root: it is its own location
        return Ok((tm, pos[0]));
    }
    let (i, j) = closest_pair(&pos);
    Ok((tm, 0.5 * (pos[i] + pos[j])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{preset, PresetId};

    fn zeta(id: PresetId) -> RationalFunction {
        preset(id).zeta0.clone()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeros_example_i() {
        // Z(t) = i(t-1)
        let zs = zeros_at_time(&ZetaState::new(zeta(PresetId::I), 0.5)).unwrap();
        assert_eq!(zs.len(), 1);
        assert!((zs[0].0 - c(0.0, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn zeros_example_iii() {
        // Z(t) = +/-sqrt(1-t^2) + i(t-1) at t = 0.6: +/-0.8 - 0.4i
        let zs = zeros_at_time(&ZetaState::new(zeta(PresetId::III), 0.6)).unwrap();
        assert_eq!(zs.len(), 2);
        let mut res: Vec<Complex64> = zs.iter().map(|(z, _)| *z).collect();
        res.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((res[0] - c(-0.8, -0.4)).norm() < 1e-10);
        assert!((res[1] - c(0.8, -0.4)).norm() < 1e-10);
    }

    #[test]
    fn zeros_example_ii_merge_point() {
        // double root -i/2 at t = 4/5
        let zs = zeros_at_time(&ZetaState::new(zeta(PresetId::II), 0.8)).unwrap();
        assert_eq!(zs.len(), 1, "{zs:?}");
        assert_eq!(zs[0].1, 2);
        assert!((zs[0].0 - c(0.0, -0.5)).norm() < 1e-7);
    }

    #[test]
    fn zero_count_constant_in_time() {
        for id in [
            PresetId::I,
            PresetId::II,
            PresetId::III,
            PresetId::IV,
            PresetId::V,
        ] {
            let z0 = zeta(id);
            let n0: usize = zeros_at_time(&ZetaState::new(z0.clone(), 0.01))
                .unwrap()
                .iter()
                .map(|(_, m)| m)
                .sum();
            for k in 1..=10 {
                let t = 0.09 * k as f64;
                let n: usize = zeros_at_time(&ZetaState::new(z0.clone(), t))
                    .unwrap()
                    .iter()
                    .map(|(_, m)| m)
                    .sum();
                assert_eq!(n, n0, "preset {id} at t = {t}");
            }
        }
    }

    #[test]
    fn symmetric_presets_have_mirror_zeros() {
        for id in [PresetId::II, PresetId::III, PresetId::IV, PresetId::V] {
            let z0 = zeta(id);
            for k in 1..=6 {
                let t = 0.12 * k as f64;
                let zs = zeros_at_time(&ZetaState::new(z0.clone(), t)).unwrap();
                for (z, _) in &zs {
                    let mirror = c(-z.re, z.im);
                    let found = zs.iter().any(|(w, _)| (w - mirror).norm() < 1e-8);
                    assert!(found, "preset {id}: no mirror of {z} at t = {t}");
                }
            }
        }
    }

    #[test]
    fn trajectory_example_i_vertical() {
        let traj = integrate_trajectory(&zeta(PresetId::I), c(0.0, -1.0), 0.0, 1.1, 1e-3).unwrap();
        for &(t, z) in &traj.samples {
            assert!((z - c(0.0, t - 1.0)).norm() < 1e-9, "t = {t}: {z}");
        }
        let touch = traj
            .events
            .iter()
            .find(|e| e.kind == EventKind::RealAxisTouch)
            .expect("touch event");
        assert!((touch.t - 1.0).abs() < 1e-9);
        assert!(touch.re.abs() < 1e-9);
    }

    #[test]
    fn trajectory_example_vi_horizontal() {
        let traj =
            integrate_trajectory(&zeta(PresetId::VI), c(0.0, -1.0), 0.0, 10.0, 1e-2).unwrap();
        for &(t, z) in &traj.samples {
            assert!((z - c(t, -1.0)).norm() < 1e-9, "t = {t}: {z}");
        }
        assert!(traj.events.is_empty());
    }

    #[test]
    fn trajectory_example_iii_matches_closed_form() {
        let traj =
            integrate_trajectory(&zeta(PresetId::III), c(1.0, -1.0), 0.0, 0.995, 1e-3).unwrap();
        for &(t, z) in &traj.samples {
            let want = c((1.0 - t * t).max(0.0).sqrt(), t - 1.0);
            assert!((z - want).norm() < 1e-8, "t = {t}: {z} vs {want}");
        }
    }

    #[test]
    fn trajectory_manifold_invariant() {
        let z0 = zeta(PresetId::III);
        let traj = integrate_trajectory(&z0, c(1.0, -1.0), 0.0, 0.9, 1e-3).unwrap();
        for &(t, z) in &traj.samples {
            let v = z0.eval(z).unwrap() + c(0.0, 0.5 * t);
            assert!(v.norm() <= EPS_TRAJ, "|zeta(Z,t)| = {} at t = {t}", v.norm());
        }
    }

    #[test]
    fn derivative_vanishes_at_example_ii_merge() {
        // starting from Z1(0) = 1/2 - i, the motion law breaks down at the
        // 4/5 merge
        match integrate_trajectory(&zeta(PresetId::II), c(0.5, -1.0), 0.0, 1.0, 1e-3) {
            Err(PoleError::DerivativeVanishes { t, .. }) => {
                assert!((t - 0.8).abs() < 0.05, "stopped at t = {t}");
            }
            other => panic!(
                "expected DerivativeVanishes, got {:?}",
                other.map(|t| t.samples.len())
            ),
        }
    }

    #[test]
    fn first_touch_examples() {
        let (t1, p1) = first_touch(&zeta(PresetId::I), 10.0).unwrap();
        assert!((t1 - 1.0).abs() < 1e-8, "{t1}");
        assert_eq!(p1.len(), 1);
        assert!(p1[0].abs() < 1e-8);

        let (t4, p4) = first_touch(&zeta(PresetId::IV), 10.0).unwrap();
        assert!((t4 - 1.0).abs() < 1e-8);
        assert_eq!(p4.len(), 2, "{p4:?}");
        assert!((p4[0] + 3.0f64.sqrt()).abs() < 1e-8);
        assert!((p4[1] - 3.0f64.sqrt()).abs() < 1e-8);

        let (t5, p5) = first_touch(&zeta(PresetId::V), 10.0).unwrap();
        assert!((t5 - 16.0 / 3.0).abs() < 1e-8, "{t5}");
        assert_eq!(p5.len(), 1, "{p5:?}");
        assert!(p5[0].abs() < 1e-8);

        match first_touch(&zeta(PresetId::VI), 100.0) {
            Err(PoleError::NoTouch { .. }) => {}
            other => panic!("expected NoTouch, got {other:?}"),
        }
    }

    #[test]
    fn xy_rhs_equals_complex_rhs() {
        // componentwise equality with -i/(2 zeta0') at Example III's zero
        let z0 = zeta(PresetId::III);
        let d = z0.derivative().unwrap();
        for &(x, y) in &[(0.8, -0.4), (0.3, -0.7), (-1.1, -0.2)] {
            let complex = c(0.0, -0.5) / d.eval(c(x, y)).unwrap();
            let (xp, yp) = xy_ode_rhs(&z0, x, y).unwrap();
            assert!((xp - complex.re).abs() < 1e-12);
            assert!((yp - complex.im).abs() < 1e-12);
        }
    }

    #[test]
    fn xy_rhs_paper_values() {
        // Example I at (0, -1/2): Z' = i; Example VI at (0, -1): Z' = 1
        let (xp, yp) = xy_ode_rhs(&zeta(PresetId::I), 0.0, -0.5).unwrap();
        assert!(xp.abs() < 1e-14 && (yp - 1.0).abs() < 1e-14);
        let (xp, yp) = xy_ode_rhs(&zeta(PresetId::VI), 0.0, -1.0).unwrap();
        assert!((xp - 1.0).abs() < 1e-14 && yp.abs() < 1e-14);
    }

    #[test]
    fn merge_refinement_example_ii() {
        let (tm, loc) = refine_merge(&zeta(PresetId::II), 0.7, 0.9).unwrap();
        assert!((tm - 0.8).abs() <= 1e-9, "merge t = {tm}");
        assert!((loc - c(0.0, -0.5)).norm() <= 1e-6, "merge at {loc}");
    }

    #[test]
    fn algebraic_and_ode_agree() {
        // preset III: both routes within 1e-8 wherever both are defined
        let z0 = zeta(PresetId::III);
        let traj = integrate_trajectory(&z0, c(1.0, -1.0), 0.0, 0.99, 1e-3).unwrap();
        for &(t, z) in traj.samples.iter().step_by(37) {
            let zs = zeros_at_time(&ZetaState::new(z0.clone(), t)).unwrap();
            let nearest = zs
                .iter()
                .map(|(w, _)| (w - z).norm())
                .fold(f64::MAX, f64::min);
            assert!(nearest < 1e-8, "t = {t}: nearest {nearest}");
        }
    }

    #[test]
    fn local_exponents_example_iii() {
        // algebraic samples of the right-hand zero near touch
        let z0 = zeta(PresetId::III);
        let mut samples = Vec::new();
        for k in 0..40 {
            let s = 1e-6 * (1e4f64).powf(k as f64 / 39.0);
            let t = 1.0 - s;
            let zs = zeros_at_time(&ZetaState::new(z0.clone(), t)).unwrap();
            let z = zs
                .iter()
                .map(|(w, _)| *w)
                .find(|w| w.re > 0.0)
                .expect("right-hand zero");
            samples.push((t, z));
        }
        let traj = PoleTrajectory {
            samples,
            events: vec![],
            source: TrajectorySource::Algebraic,
        };
        let le = local_exponents(&traj, 1.0).unwrap();
        let ax = le.alpha_x.unwrap();
        assert!((ax - 0.5).abs() <= 0.02, "alpha_x = {ax}");
        assert!((le.alpha_y - 1.0).abs() <= 0.05, "alpha_y = {}", le.alpha_y);
        assert_eq!(le.classification, Classification::TwoScale(1));
    }

    #[test]
    fn local_exponents_example_ii_second_phase() {
        // imaginary-axis phase: X = 0, |Y| ~ (1-t)
        let z0 = zeta(PresetId::II);
        let mut samples = Vec::new();
        for k in 0..30 {
            let s = 1e-6 * (1e4f64).powf(k as f64 / 29.0);
            let t = 1.0 - s;
            let zs = zeros_at_time(&ZetaState::new(z0.clone(), t)).unwrap();
            // the ascending zero is the one closest to the axis
            let z = zs
                .iter()
                .map(|(w, _)| *w)
                .max_by(|a, b| a.im.partial_cmp(&b.im).unwrap())
                .unwrap();
            samples.push((t, z));
        }
        let traj = PoleTrajectory {
            samples,
            events: vec![],
            source: TrajectorySource::Algebraic,
        };
        let le = local_exponents(&traj, 1.0).unwrap();
        assert!(le.alpha_x.is_none(), "{:?}", le.alpha_x);
        assert!((le.alpha_y - 1.0).abs() <= 0.05);
        assert_eq!(le.classification, Classification::OneScale);
    }

    #[test]
    fn track_zeros_example_ii_records_merge() {
        let trajs = track_zeros(&zeta(PresetId::II), 0.0, 1.0, 1e-3).unwrap();
        let merge = trajs
            .iter()
            .flat_map(|tr| tr.events.iter())
            .find(|e| e.kind == EventKind::Merge)
            .expect("merge event");
        assert!((merge.t - 0.8).abs() <= 1e-9, "merge t = {}", merge.t);
        assert!((merge.re).abs() <= 1e-6);
        assert!((merge.im + 0.5).abs() <= 1e-6);
    }

    #[test]
    fn track_zeros_example_v_branches() {
        // triple pole at -i branches into three; two reach the origin at 16/3
        let trajs = track_zeros(&zeta(PresetId::V), 1e-6, 5.34, 2e-3).unwrap();
        assert_eq!(trajs.len(), 3);
        let t_blowup = 16.0 / 3.0;
        let at_origin = trajs
            .iter()
            .filter(|tr| {
                tr.events.iter().any(|e| {
                    (e.t - t_blowup).abs() < 1e-2
                        && e.re.abs() < 1e-2
                        && matches!(e.kind, EventKind::Merge | EventKind::RealAxisTouch)
                })
            })
            .count();
        assert!(at_origin >= 2, "only {at_origin} branches reach the origin");
        // and the merge itself is located at the origin at T = 16/3
        let merge = trajs
            .iter()
            .flat_map(|tr| tr.events.iter())
            .find(|e| e.kind == EventKind::Merge)
            .expect("merge event");
        assert!((merge.t - t_blowup).abs() < 1e-6, "merge t = {}", merge.t);
        assert!(merge.re.abs() < 1e-4 && merge.im.abs() < 1e-4);
    }
}
