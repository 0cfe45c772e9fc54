//! Closed-form solution engine for `w_t = w H(w)`.
//!
//! From initial data `w0` with Hilbert transform `H(w0)`, the solution is
//!
//! ```text
//! w(x,t)    =  4 w0(x) / D(x,t)
//! H(w)(x,t) = (2 H(w0)(x) (2 - t H(w0)(x)) - 2 t w0(x)^2) / D(x,t)
//! D(x,t)    = (2 - t H(w0)(x))^2 + t^2 w0(x)^2
//! ```
//!
//! and it blows up at `T = 2 / sup { H(w0)(x) : w0(x) = 0, H(w0)(x) > 0 }`
//! when that set is non-empty.

use crate::numeric::{adaptive_simpson, bisect, central_derivative};
use crate::presets::Preset;
use crate::rational::{boundary_trace, BoundaryTrace, RationalError};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

/// Zeros of `w0` in the predictor are located with this many scan samples.
const SCAN_SAMPLES: usize = 10_000;
/// Zero refinement tolerance on the abscissa.
const ZERO_XTOL: f64 = 1e-12;
/// Blowup-point ties: everything within this slack of the sup counts.
const SUP_TIE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("evaluation at/after blowup: denominator {denom:.3e} at (x, t) = ({x}, {t})")]
    AtSingularity { x: f64, t: f64, denom: f64 },
    #[error("the set S is empty: no zero of w0 with H(w0) > 0 (global existence)")]
    EmptyS,
    #[error("quadrature failure: {0}")]
    QuadratureFail(String),
    #[error("sign/symmetry validation failed: {0}")]
    InvalidDatum(String),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// Initial datum carried as an exact boundary trace.
#[derive(Debug, Clone)]
pub struct InitialDatum {
    trace: BoundaryTrace,
    /// Largest k with `w0 in C^k` near 0, when known.
    pub smoothness_order: Option<u32>,
    pub odd_symmetric: bool,
    pub sign_condition: bool,
}

impl InitialDatum {
    /// Build from a rational generator `eta0`, validating upper-holomorphy
    /// and the declared symmetry/sign flags on a sample grid.
    pub fn new(
        eta0: &crate::rational::RationalFunction,
        odd_symmetric: bool,
        sign_condition: bool,
    ) -> Result<Self, ExactError> {
        let trace = boundary_trace(eta0)?;
        let datum = InitialDatum {
            trace,
            smoothness_order: None,
            odd_symmetric,
            sign_condition,
        };
        datum.validate_flags()?;
        Ok(datum)
    }

    pub fn from_preset(p: &Preset) -> Result<Self, ExactError> {
        Self::new(&p.eta0, p.odd_symmetric, p.sign_condition)
    }

    fn validate_flags(&self) -> Result<(), ExactError> {
        if !self.odd_symmetric && !self.sign_condition {
            return Ok(());
        }
        for k in 1..=64 {
            let x = 0.31 * k as f64;
            let w = self.omega0(x);
            let wm = self.omega0(-x);
            if self.odd_symmetric {
                let h = self.hilbert_omega0(x);
                let hm = self.hilbert_omega0(-x);
                if (w + wm).abs() > 1e-10 * (1.0 + w.abs())
                    || (h - hm).abs() > 1e-10 * (1.0 + h.abs())
                {
                    return Err(ExactError::InvalidDatum(format!(
                        "odd-symmetry flag violated near x = {x}"
                    )));
                }
            }
            if self.sign_condition && w >= 0.0 {
                return Err(ExactError::InvalidDatum(format!(
                    "sign condition violated at x = {x}: w0 = {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> &BoundaryTrace {
        &self.trace
    }

    pub fn omega0(&self, x: f64) -> f64 {
        self.trace.omega0(x)
    }

    pub fn hilbert_omega0(&self, x: f64) -> f64 {
        self.trace.hilbert_omega0(x)
    }
}

/// Solution values on a grid at one time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionSnapshot {
    pub t: f64,
    pub xs: Vec<f64>,
    pub omega: Vec<f64>,
    pub hilbert_omega: Vec<f64>,
    /// Optional provenance label carried into the CSV header.
    pub label: Option<String>,
}

impl SolutionSnapshot {
    /// CSV with a comment header carrying `t` and the label:
    /// `x,omega,hilbert_omega` at full double precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# t={:.17e} preset={}",
            self.t,
            self.label.as_deref().unwrap_or("-")
        )?;
        writeln!(w, "x,omega,hilbert_omega")?;
        for i in 0..self.xs.len() {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e}",
                self.xs[i], self.omega[i], self.hilbert_omega[i]
            )?;
        }
        Ok(())
    }
}

/// Blowup time and location prediction from the zero set of `w0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupPrediction {
    pub t_blowup: f64,
    pub points: Vec<f64>,
    /// `sup H(w0)` over the zero set S; `t_blowup = 2 / sup_h`.
    pub sup_h: f64,
}

/// Pointwise closed-form evaluation of `(w, H(w))` at `(x, t)`.
pub fn evaluate(datum: &InitialDatum, x: f64, t: f64) -> Result<(f64, f64), ExactError> {
    let w0 = datum.omega0(x);
    let h0 = datum.hilbert_omega0(x);
    let a = 2.0 - t * h0;
    let denom = a * a + t * t * w0 * w0;
    // Guard at the rounding floor of the denominator, not at a fixed
    // relative size: two-scale data legitimately drive it to t^2 w0^2,
    // which is far below 1e-13 deep in the asymptotic regime.
    let eps_den = 1e-28 * (1.0 + t * t).powi(2) * (1.0 + w0 * w0 + h0 * h0).powi(2);
    if denom <= eps_den {
        return Err(ExactError::AtSingularity { x, t, denom });
    }
    let w = 4.0 * w0 / denom;
    let h = (2.0 * h0 * a - 2.0 * t * w0 * w0) / denom;
    Ok((w, h))
}

/// Evaluate on a whole grid.
pub fn evaluate_grid(
    datum: &InitialDatum,
    xs: &[f64],
    t: f64,
    label: Option<String>,
) -> Result<SolutionSnapshot, ExactError> {
    let mut omega = Vec::with_capacity(xs.len());
    let mut hilbert = Vec::with_capacity(xs.len());
    for &x in xs {
        let (w, h) = evaluate(datum, x, t)?;
        omega.push(w);
        hilbert.push(h);
    }
    Ok(SolutionSnapshot {
        t,
        xs: xs.to_vec(),
        omega,
        hilbert_omega: hilbert,
        label,
    })
}

/// Predict the blowup time and points by locating the zero set of `w0` in
/// `interval` and taking the sup of `H(w0)` over it.
pub fn predict_blowup(
    datum: &InitialDatum,
    interval: (f64, f64),
) -> Result<BlowupPrediction, ExactError> {
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Err(ExactError::QuadratureFail("empty search interval".into()));
    }
    let mut zeros: Vec<f64> = Vec::new();
    let step = (hi - lo) / SCAN_SAMPLES as f64;
    let mut prev_x = lo;
    let mut prev_w = datum.omega0(prev_x);
    for k in 1..=SCAN_SAMPLES {
        let x = lo + step * k as f64;
        let w = datum.omega0(x);
        if prev_w == 0.0 {
            zeros.push(prev_x);
        } else if w != 0.0 && prev_w.signum() != w.signum() {
            let omega = |y: f64| datum.omega0(y);
            zeros.push(bisect(omega, prev_x, x, ZERO_XTOL));
        }
        prev_x = x;
        prev_w = w;
    }
    if prev_w == 0.0 {
        zeros.push(prev_x);
    }
    // keep zeros where H(w0) > 0: the set S
    let s_set: Vec<(f64, f64)> = zeros
        .iter()
        .map(|&x| (x, datum.hilbert_omega0(x)))
        .filter(|&(_, h)| h > 1e-12)
        .collect();
    if s_set.is_empty() {
        return Err(ExactError::EmptyS);
    }
    let sup_h = s_set.iter().fold(f64::MIN, |a, &(_, h)| a.max(h));
    let mut points: Vec<f64> = s_set
        .iter()
        .filter(|&&(_, h)| (h - sup_h).abs() <= SUP_TIE)
        .map(|&(x, _)| x)
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(BlowupPrediction {
        t_blowup: 2.0 / sup_h,
        points,
        sup_h,
    })
}

/// `(T - t) H(w)(0, t)`; equals 2 for data blowing up at the origin.
pub fn conserved_quantity(datum: &InitialDatum, t: f64, t_blowup: f64) -> Result<f64, ExactError> {
    let (_, h) = evaluate(datum, 0.0, t)?;
    Ok((t_blowup - t) * h)
}

/// `H(w0)(0)` recomputed as the principal-value integral
/// `-(1/pi) \int w0(y)/y dy` by adaptive quadrature plus a fitted tail.
pub fn hilbert_at_zero_integral(datum: &InitialDatum) -> Result<f64, ExactError> {
    let r = 400.0;
    // w0(y)/y is even for odd w0; integrate the symmetrised form either way
    let g = |y: f64| {
        if y.abs() < 1e-9 {
            // removable point: odd-part slope
            (datum.omega0(1e-6) - datum.omega0(-1e-6)) / 2e-6
        } else {
            0.5 * (datum.omega0(y) / y + datum.omega0(-y) / -y)
        }
    };
    let body = adaptive_simpson(&g, 0.0, r, 1e-12);
    // tail model w0 ~ a1/y + a3/y^3 from Richardson in 1/R^2
    let a_r = r * datum.omega0(r);
    let a_2r = 2.0 * r * datum.omega0(2.0 * r);
    let a1 = (4.0 * a_2r - a_r) / 3.0;
    let a3 = (a_r - a1) * r * r;
    let tail = a1 / r + a3 / (3.0 * r * r * r);
    let tail_err = a3.abs() / (r * r * r);
    if tail_err > 1e-6 {
        return Err(ExactError::QuadratureFail(format!(
            "tail estimate {tail_err:.3e} exceeds tolerance"
        )));
    }
    Ok(-(2.0 / std::f64::consts::PI) * (body + tail))
}

/// Fitted local parameters of `w0` at the origin (see `asymptotics`):
/// derivative of given order via central differences on the trace.
pub fn trace_derivative_at_zero(datum: &InitialDatum, order: usize, h: f64) -> f64 {
    let f = |x: f64| datum.omega0(x);
    central_derivative(&f, 0.0, order, h)
}

/// Same for `H(w0)`.
pub fn hilbert_trace_derivative_at_zero(datum: &InitialDatum, order: usize, h: f64) -> f64 {
    let f = |x: f64| datum.hilbert_omega0(x);
    central_derivative(&f, 0.0, order, h)
}
