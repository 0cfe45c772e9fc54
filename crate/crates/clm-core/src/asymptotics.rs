//! Self-similar blowup asymptotics: local parameters `(a, b, c, n)` of the
//! datum at the origin, the one- and two-scale profiles, the implicit
//! bulk-location function `r(t)`, rescaled-profile errors, and the
//! extraction of the scaling exponents `(c_omega, c_l, c_s)` from
//! near-blowup snapshots.

use crate::exact::{evaluate, ExactError, InitialDatum, SolutionSnapshot};
use crate::numeric::{bisect, fit_loglog, golden_min, LineFit};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Step used by the finite-difference parameter extraction.
const FD_STEP: f64 = 1e-3;
/// Removable-singularity patch radius for `p` and `q`.
const PQ_PATCH: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("degeneracy order mismatch for n = {n}: {detail}")]
    WrongDegeneracy { n: u32, detail: String },
    #[error("no sign change for r(t) in (0, {hi:.6}] at t = {t}")]
    NoBracket { t: f64, hi: f64 },
    #[error("peak lies on the grid boundary (index {index} of {len})")]
    PeakOnBoundary { index: usize, len: usize },
    #[error("snapshots span {decades:.2} decades of T-t; need at least {need}")]
    InsufficientDecades { decades: f64, need: f64 },
    #[error("half-maximum crossing not contained in the grid")]
    WidthNotResolved,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Local parameters of the datum at the origin in the theorem normalisation:
/// `H(w0)(0) = 2a`, `H(w0)''(0) = 4b`, and
/// `w0'(0) = -2c` (n = 0) or `w0^(2n+1)(0) = -4c (2n+1)!` (n >= 1).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TheoremParams {
    pub a: f64,
    /// Present only for the two-scale case (n >= 1).
    pub b: Option<f64>,
    pub c: f64,
    pub n: u32,
    /// Blowup time `T = 1/a`.
    pub t_blowup: f64,
    /// Bulk location at blowup, `r(T) = a / sqrt(b)`; two-scale only.
    pub r_at_blowup: Option<f64>,
}

impl TheoremParams {
    pub fn new(a: f64, b: Option<f64>, c: f64, n: u32) -> Self {
        TheoremParams {
            a,
            b,
            c,
            n,
            t_blowup: 1.0 / a,
            r_at_blowup: b.map(|b| a / b.sqrt()),
        }
    }
}

/// Which closed-form profile a [`ProfileSpec`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// One-scale profile of the non-degenerate case (n = 0).
    Omega1,
    /// Two-scale profile of degeneracy order n >= 1.
    Omega2n,
}

/// A profile request; `Omega1` requires `n = 0`, `Omega2n` requires `n >= 1`
/// and a positive `b`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub params: TheoremParams,
}

impl ProfileSpec {
    pub fn new(kind: ProfileKind, params: TheoremParams) -> Result<Self, AsymptoticsError> {
        match kind {
            ProfileKind::Omega1 if params.n != 0 => Err(AsymptoticsError::WrongDegeneracy {
                n: params.n,
                detail: "Omega1 requires n = 0".into(),
            }),
            ProfileKind::Omega2n if params.n == 0 || params.b.is_none() => {
                Err(AsymptoticsError::WrongDegeneracy {
                    n: params.n,
                    detail: "Omega2n requires n >= 1 and b > 0".into(),
                })
            }
            _ => Ok(ProfileSpec { kind, params }),
        }
    }
}

/// Closed-form `(Omega, H(Omega))` at the rescaled coordinate `z`.
pub fn profile(spec: &ProfileSpec, z: f64) -> (f64, f64) {
    let p = &spec.params;
    match spec.kind {
        ProfileKind::Omega1 => {
            let a = p.a;
            let c = p.c;
            let den = a.powi(4) + c * c * z * z;
            (-2.0 * a * a * c * z / den, 2.0 * a.powi(4) / den)
        }
        ProfileKind::Omega2n => {
            let a = p.a;
            let b = p.b.expect("validated by ProfileSpec::new");
            let c = p.c;
            let n = p.n as i32;
            let den = a.powi(4 * n) * c * c + b.powi(2 * n + 2) * z * z;
            (
                -a.powi(2 * n + 1) * b.powf(n as f64 + 0.5) * c / den,
                -a * b.powf(2.0 * n as f64 + 1.5) * z / den,
            )
        }
    }
}

/// Extract `(a, b, c)` for degeneracy order `n` from the analytic trace.
///
/// Derivatives at the origin come from central differences with one
/// Richardson step; the degeneracy pattern of the requested `n` is verified
/// first.
pub fn extract_params(datum: &InitialDatum, n: u32) -> Result<TheoremParams, AsymptoticsError> {
    let a = 0.5 * datum.hilbert_omega0(0.0);
    if a <= 0.0 {
        return Err(AsymptoticsError::WrongDegeneracy {
            n,
            detail: format!("H(w0)(0) = {} is not positive", 2.0 * a),
        });
    }
    let top_order = (2 * n + 1) as usize;
    let d_top = crate::exact::trace_derivative_at_zero(datum, top_order, FD_STEP);
    let m_top = d_top.abs() / factorial(top_order);
    if m_top < 1e-6 * a.max(1.0) {
        return Err(AsymptoticsError::WrongDegeneracy {
            n,
            detail: format!(
                "w0^({top_order})(0) = {d_top:.3e} vanishes; the zero is more degenerate than n = {n}"
            ),
        });
    }
    // lower odd derivatives must vanish (even ones do by oddness)
    for k in (1..top_order).step_by(2) {
        let dk = crate::exact::trace_derivative_at_zero(datum, k, FD_STEP);
        let mk = dk.abs() / factorial(k);
        if mk > 1e-4 * m_top.max(1.0) {
            return Err(AsymptoticsError::WrongDegeneracy {
                n,
                detail: format!("w0^({k})(0) = {dk:.3e} does not vanish"),
            });
        }
    }
    let c = if n == 0 {
        -0.5 * d_top
    } else {
        -d_top / (4.0 * factorial(top_order))
    };
    if c <= 0.0 {
        return Err(AsymptoticsError::WrongDegeneracy {
            n,
            detail: format!("leading coefficient c = {c:.3e} is not positive"),
        });
    }
    let b = if n >= 1 {
        let h2 = crate::exact::hilbert_trace_derivative_at_zero(datum, 2, FD_STEP);
        let b = 0.25 * h2;
        if b <= 0.0 {
            return Err(AsymptoticsError::WrongDegeneracy {
                n,
                detail: format!("H(w0)''(0) = {h2:.3e} is not positive"),
            });
        }
        Some(b)
    } else {
        None
    };
    Ok(TheoremParams::new(a, b, c, n))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product::<f64>().max(1.0)
}

/// Normalised numerator expansion `p(x) = w0(x) / (-4c x^(2n+1))`
/// (or `/(-2cx)` for n = 0), with `p(0) = 1`.
pub fn p_function(datum: &InitialDatum, params: &TheoremParams, x: f64) -> f64 {
    if x.abs() < PQ_PATCH {
        return 1.0;
    }
    let denom = if params.n == 0 {
        -2.0 * params.c * x
    } else {
        -4.0 * params.c * x.powi(2 * params.n as i32 + 1)
    };
    datum.omega0(x) / denom
}

/// Normalised Hilbert expansion `q(x) = (H(w0)(x) - H(w0)(0)) / (2b x^2)`,
/// with `q(0) = 1`.
pub fn q_function(datum: &InitialDatum, params: &TheoremParams, x: f64) -> f64 {
    if x.abs() < PQ_PATCH {
        return 1.0;
    }
    let b = params.b.expect("q is defined for the two-scale case");
    (datum.hilbert_omega0(x) - datum.hilbert_omega0(0.0)) / (2.0 * b * x * x)
}

/// Solve `r(t)^2 q(r(t) sqrt(T-t)) = a/(b t)` for the bulk location `r(t)`,
/// on the branch continuous with `r(T) = a/sqrt(b)`.
pub fn r_of_t(
    datum: &InitialDatum,
    params: &TheoremParams,
    t: f64,
) -> Result<f64, AsymptoticsError> {
    let a = params.a;
    let b = params.b.expect("r(t) is defined for the two-scale case");
    let s = params.t_blowup - t;
    let target = a / (b * t);
    let g = |r: f64| r * r * q_function(datum, params, r * s.sqrt()) - target;
    let hi = 2.0 * a / b.sqrt();
    let lo = 1e-8;
    if g(lo) * g(hi) > 0.0 {
        return Err(AsymptoticsError::NoBracket { t, hi });
    }
    Ok(bisect(g, lo, hi, 1e-14))
}

/// Choice of the bulk-centre path used when rescaling a two-scale solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BulkCenter {
    /// Solve the implicit equation at every requested time (exact centring).
    ImplicitEq,
    /// Affine law `r(t) = r0 + r1 (T - t)`.
    Affine { r0: f64, r1: f64 },
}

impl BulkCenter {
    pub fn value(
        &self,
        datum: &InitialDatum,
        params: &TheoremParams,
        t: f64,
    ) -> Result<f64, AsymptoticsError> {
        match *self {
            BulkCenter::ImplicitEq => r_of_t(datum, params, t),
            BulkCenter::Affine { r0, r1 } => Ok(r0 + r1 * (params.t_blowup - t)),
        }
    }
}

/// Sup-norm distance between the rescaled solution and the closed-form
/// profile over `z` in `[-z_window, z_window]`, for both components.
///
/// For `n = 0` the rescaling is `x = (T-t) z` about the origin; for
/// `n >= 1` it is `x = r(t) sqrt(T-t) + (T-t)^n z` with the requested
/// bulk-centre path.
pub fn profile_error(
    datum: &InitialDatum,
    params: &TheoremParams,
    t: f64,
    z_window: f64,
    center: BulkCenter,
) -> Result<(f64, f64), AsymptoticsError> {
    let s = params.t_blowup - t;
    let n = params.n;
    let nz = 2001;
    let spec = if n == 0 {
        ProfileSpec::new(ProfileKind::Omega1, *params)?
    } else {
        ProfileSpec::new(ProfileKind::Omega2n, *params)?
    };
    let r = if n == 0 {
        0.0
    } else {
        center.value(datum, params, t)?
    };
    let power = if n == 0 {
        s
    } else {
        s.powf((2 * n + 1) as f64 / 2.0)
    };
    let mut err_w = 0.0f64;
    let mut err_h = 0.0f64;
    for k in 0..nz {
        let z = -z_window + 2.0 * z_window * k as f64 / (nz - 1) as f64;
        let x = if n == 0 {
            s * z
        } else {
            r * s.sqrt() + s.powi(n as i32) * z
        };
        let (w, h) = evaluate(datum, x, t)?;
        let (pw, ph) = profile(&spec, z);
        err_w = err_w.max((power * w - pw).abs());
        err_h = err_h.max((power * h - ph).abs());
    }
    Ok((err_w, err_h))
}

/// Per-snapshot peak measurements used by the exponent fits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScaleSample {
    pub t_minus_t: f64,
    pub peak_magnitude: f64,
    pub peak_location: f64,
    pub fwhm: f64,
}

/// Fitted scaling exponents with fit diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub c_omega: f64,
    pub c_l: f64,
    pub c_s: f64,
    /// True when the peak-location scale is indistinguishable from the
    /// width scale (one-scale blowup: no separate larger scale).
    pub c_s_degenerate: bool,
    /// `(min, max)` of `T - t` over the fitted snapshots.
    pub windows: (f64, f64),
    /// RMS log-log fit residuals for the `c_omega`, `c_l`, `c_s` fits.
    pub residuals: [f64; 3],
    /// `c_omega + c_l - c_s + 1` (zero for an exact two-scale power law).
    pub power_relation_defect: f64,
    pub samples: Vec<ScaleSample>,
}

/// Measure peak magnitude, location and width on each snapshot and fit the
/// three power laws in `T - t`.
///
/// Requires at least 6 snapshots spanning two decades of `T - t`, and a
/// positive-side peak interior to every grid.
pub fn measure_scales(
    snapshots: &[SolutionSnapshot],
    t_blowup: f64,
) -> Result<ScalingReport, AsymptoticsError> {
    let mut samples = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        samples.push(measure_one(snap, t_blowup)?);
    }
    if samples.len() < 6 {
        return Err(AsymptoticsError::InsufficientDecades {
            decades: 0.0,
            need: 2.0,
        });
    }
    let smin = samples.iter().map(|s| s.t_minus_t).fold(f64::MAX, f64::min);
    let smax = samples.iter().map(|s| s.t_minus_t).fold(f64::MIN, f64::max);
    let decades = (smax / smin).log10();
    if decades < 2.0 {
        return Err(AsymptoticsError::InsufficientDecades { decades, need: 2.0 });
    }
    let ss: Vec<f64> = samples.iter().map(|s| s.t_minus_t).collect();
    let fit = |vals: Vec<f64>| -> LineFit { fit_loglog(&ss, &vals) };
    let f_omega = fit(samples.iter().map(|s| s.peak_magnitude).collect());
    let f_s = fit(samples.iter().map(|s| s.peak_location).collect());
    let f_l = fit(samples.iter().map(|s| s.fwhm).collect());
    let c_omega = f_omega.slope;
    let c_s = f_s.slope;
    let c_l = f_l.slope;
    Ok(ScalingReport {
        c_omega,
        c_l,
        c_s,
        c_s_degenerate: (c_s - c_l).abs() < 0.1,
        windows: (smin, smax),
        residuals: [f_omega.rms, f_l.rms, f_s.rms],
        power_relation_defect: c_omega + c_l - c_s + 1.0,
        samples,
    })
}

fn measure_one(snap: &SolutionSnapshot, t_blowup: f64) -> Result<ScaleSample, AsymptoticsError> {
    let n = snap.xs.len();
    // positive-side peak of |omega|
    let mut imax = 0;
    let mut vmax = f64::MIN;
    for i in 0..n {
        if snap.xs[i] > 0.0 && snap.omega[i].abs() > vmax {
            vmax = snap.omega[i].abs();
            imax = i;
        }
    }
    if imax == 0 || imax == n - 1 {
        return Err(AsymptoticsError::PeakOnBoundary { index: imax, len: n });
    }
    // quadratic refinement through the three points around the maximum
    let (x0, x2) = (snap.xs[imax - 1], snap.xs[imax + 1]);
    let x1 = snap.xs[imax];
    let (y0, y1, y2) = (
        snap.omega[imax - 1].abs(),
        snap.omega[imax].abs(),
        snap.omega[imax + 1].abs(),
    );
    let curv = y0 - 2.0 * y1 + y2;
    let frac = if curv.abs() > 0.0 {
        (0.5 * (y0 - y2) / curv).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let hgrid = 0.5 * (x2 - x0);
    let x_peak = x1 + frac * hgrid;
    let peak = y1 - 0.25 * (y0 - y2) * frac;
    // half-maximum crossings by linear interpolation on the grid
    let half = 0.5 * peak;
    let mut left = None;
    for i in (1..=imax).rev() {
        let (a, b) = (snap.omega[i - 1].abs(), snap.omega[i].abs());
        if a < half && b >= half {
            let f = (half - a) / (b - a);
            left = Some(snap.xs[i - 1] + f * (snap.xs[i] - snap.xs[i - 1]));
            break;
        }
    }
    let mut right = None;
    for i in imax..n - 1 {
        let (a, b) = (snap.omega[i].abs(), snap.omega[i + 1].abs());
        if a >= half && b < half {
            let f = (a - half) / (a - b);
            right = Some(snap.xs[i] + f * (snap.xs[i + 1] - snap.xs[i]));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok(ScaleSample {
            t_minus_t: t_blowup - snap.t,
            peak_magnitude: peak,
            peak_location: x_peak,
            fwhm: r - l,
        }),
        _ => Err(AsymptoticsError::WidthNotResolved),
    }
}

/// Build snapshots adapted to the collapsing peak: for each `T - t` the grid
/// is centred on the positive peak with width a fixed multiple of the local
/// FWHM, so all scales stay resolved.
pub fn scaling_snapshots(
    datum: &InitialDatum,
    t_blowup: f64,
    t_minus_t: &[f64],
    points_per_snapshot: usize,
    label: Option<&str>,
) -> Result<Vec<SolutionSnapshot>, AsymptoticsError> {
    let mut out = Vec::with_capacity(t_minus_t.len());
    for &s in t_minus_t {
        let t = t_blowup - s;
        let absw = |x: f64| evaluate(datum, x, t).map(|(w, _)| w.abs()).unwrap_or(0.0);
        // coarse log-spaced bracket of the positive peak
        let mut best_x = 1e-9;
        let mut best_v = 0.0;
        let m = 2000;
        let ratio = (20.0f64 / 1e-9).powf(1.0 / (m - 1) as f64);
        for k in 0..m {
            let x = 1e-9 * ratio.powi(k as i32);
            let v = absw(x);
            if v > best_v {
                best_v = v;
                best_x = x;
            }
        }
        let x_peak = golden_min(|x| -absw(x), best_x / ratio, best_x * ratio, 1e-14);
        let peak = absw(x_peak);
        // half-maximum crossings pin the width
        let half = 0.5 * peak;
        let g = |x: f64| absw(x) - half;
        let x_left = bisect(g, 1e-12, x_peak, 1e-15 * (1.0 + x_peak));
        let x_right = bisect(g, x_peak, 40.0, 1e-15 * (1.0 + x_peak));
        let w = (x_right - x_left).max(f64::MIN_POSITIVE);
        let lo_grid = (x_peak - 8.0 * w).max(0.0);
        let hi_grid = x_peak + 8.0 * w;
        let xs: Vec<f64> = (0..points_per_snapshot)
            .map(|k| lo_grid + (hi_grid - lo_grid) * k as f64 / (points_per_snapshot - 1) as f64)
            .collect();
        out.push(crate::exact::evaluate_grid(
            datum,
            &xs,
            t,
            label.map(|s| s.to_string()),
        )?);
    }
    Ok(out)
}

/// Traveling-wave profile `f(x) = -2cr / (1 + c^2 x^2)`.
pub fn traveling_wave_profile(r: f64, c: f64, x: f64) -> f64 {
    -2.0 * c * r / (1.0 + c * c * x * x)
}

/// Residual of the traveling-wave profile equation `r f' = f H(f)` at `x`,
/// using the analytic transform of the Lorentzian pair.
pub fn traveling_wave_residual(r: f64, c: f64, x: f64) -> f64 {
    let den = 1.0 + c * c * x * x;
    let f = -2.0 * c * r / den;
    let fp = 4.0 * c.powi(3) * r * x / (den * den);
    let hf = -2.0 * c * c * r * x / den;
    r * fp - f * hf
}
