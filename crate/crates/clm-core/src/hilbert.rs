//! Numerical Hilbert transform on a truncated domain, used as the
//! independent oracle against the analytic boundary-trace pairs.
//!
//! The FFT route subtracts a fitted rational tail model (whose transform is
//! known in closed form), applies the periodic multiplier `-i sgn(k)` to the
//! zero-padded residual, and corrects the leading periodisation images with
//! the residual's first two moments. With the default settings this yields
//! sup errors around 1e-8 on the reference data, far below the documented
//! O(1/L) truncation error of a bare periodic transform.
//!
//! The quadrature route integrates a piecewise-linear interpolant against
//! the principal-value kernel (exact per-cell antiderivatives) and accepts
//! graded grids.

use crate::numeric::LstsqPlan;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;
use thiserror::Error;

/// Zero-padding factor of the FFT route.
const PAD_FACTOR: usize = 8;
/// Fraction of samples (per side) used for the tail fit.
const FIT_FRACTION: f64 = 0.15;
/// Largest tolerated boundary magnitude relative to the peak.
const DECAY_THRESHOLD: f64 = 0.25;

#[derive(Debug, Error)]
pub enum HilbertError {
    #[error("domain too small: |f| at the boundary is {boundary:.3e} (> {threshold:.3e} * max|f|)")]
    DomainTooSmall { boundary: f64, threshold: f64 },
    #[error("bad grid: {0}")]
    BadGrid(String),
}

/// Requested discretisation of the principal-value integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HilbertMethod {
    /// Tail-corrected spectral multiplier on a uniform grid.
    Fft,
    /// Piecewise-linear principal-value quadrature; accepts graded grids.
    Quadrature,
}

/// Transform values together with a truncation-error estimate.
#[derive(Debug, Clone)]
pub struct HilbertEstimate {
    pub values: Vec<f64>,
    /// Bound on the neglected real-line tail of the fitted residual
    /// (`(4/3pi) * max |residual|` over the outermost samples), plus a
    /// rounding floor.
    pub truncation_error: f64,
}

/// Hilbert pairs used as the tail model. All are boundary traces of
/// `1/(y+i)^k`, so their transforms are exact:
/// odd basis  `y/d, -2y/d^2, 4(y-y^3)/d^4` with `d = 1+y^2`,
/// even basis `-1/d, (1-3y^2)/d^3`.
fn odd_basis(y: f64) -> [f64; 3] {
    let d = 1.0 + y * y;
    [y / d, -2.0 * y / (d * d), 4.0 * (y - y * y * y) / d.powi(4)]
}

fn odd_basis_h(y: f64) -> [f64; 3] {
    let d = 1.0 + y * y;
    [
        -1.0 / d,
        -(y * y - 1.0) / (d * d),
        -(y.powi(4) - 6.0 * y * y + 1.0) / d.powi(4),
    ]
}

fn even_basis(y: f64) -> [f64; 2] {
    let d = 1.0 + y * y;
    [-1.0 / d, (1.0 - 3.0 * y * y) / d.powi(3)]
}

fn even_basis_h(y: f64) -> [f64; 2] {
    let d = 1.0 + y * y;
    [-y / d, -(y * y * y - 3.0 * y) / d.powi(3)]
}

/// Reusable FFT-route plan for the symmetric uniform grid
/// `x_j = -L + 2L j / N`.
pub struct HilbertFft {
    n: usize,
    half_width: f64,
    xs: Vec<f64>,
    fit_idx: Vec<usize>,
    odd_plan: LstsqPlan,
    even_plan: LstsqPlan,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl HilbertFft {
    pub fn new(half_width: f64, n: usize) -> Result<Self, HilbertError> {
        if n < 16 || n % 2 != 0 {
            return Err(HilbertError::BadGrid(format!(
                "need an even grid of at least 16 points, got {n}"
            )));
        }
        if !(half_width > 0.0) {
            return Err(HilbertError::BadGrid("half width must be positive".into()));
        }
        let xs: Vec<f64> = (0..n)
            .map(|j| -half_width + 2.0 * half_width * j as f64 / n as f64)
            .collect();
        let m = ((n as f64) * FIT_FRACTION / 2.0) as usize;
        let mut fit_idx: Vec<usize> = (1..=m).collect();
        fit_idx.extend(n - m..n);
        let odd_cols: Vec<Vec<f64>> = (0..3)
            .map(|k| fit_idx.iter().map(|&j| odd_basis(xs[j])[k]).collect())
            .collect();
        let even_cols: Vec<Vec<f64>> = (0..2)
            .map(|k| fit_idx.iter().map(|&j| even_basis(xs[j])[k]).collect())
            .collect();
        let mut planner = FftPlanner::new();
        let npad = n * PAD_FACTOR;
        Ok(HilbertFft {
            n,
            half_width,
            xs,
            fit_idx,
            odd_plan: LstsqPlan::new(&odd_cols),
            even_plan: LstsqPlan::new(&even_cols),
            fft_fwd: planner.plan_fft_forward(npad),
            fft_inv: planner.plan_fft_inverse(npad),
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.xs
    }

    pub fn transform(&self, values: &[f64]) -> Result<HilbertEstimate, HilbertError> {
        let n = self.n;
        assert_eq!(values.len(), n, "value count must match the plan grid");
        check_decay(values)?;

        // odd/even split about x = 0 (j <-> n-j); j = 0 has no partner
        let mut odd = vec![0.0; n];
        let mut even = vec![0.0; n];
        even[0] = values[0];
        for j in 1..n {
            odd[j] = 0.5 * (values[j] - values[n - j]);
            even[j] = 0.5 * (values[j] + values[n - j]);
        }
        let odd_rhs: Vec<f64> = self.fit_idx.iter().map(|&j| odd[j]).collect();
        let even_rhs: Vec<f64> = self.fit_idx.iter().map(|&j| even[j]).collect();
        let co = self.odd_plan.solve(&odd_rhs);
        let ce = self.even_plan.solve(&even_rhs);

        // residual after removing the modelled tails
        let mut resid = vec![0.0; n];
        for j in 0..n {
            let ob = odd_basis(self.xs[j]);
            let eb = even_basis(self.xs[j]);
            let model =
                co[0] * ob[0] + co[1] * ob[1] + co[2] * ob[2] + ce[0] * eb[0] + ce[1] * eb[1];
            resid[j] = values[j] - model;
        }

        // spectral multiplier -i sgn(k) on the zero-padded residual
        let npad = n * PAD_FACTOR;
        let mut buf: Vec<Complex64> = (0..npad)
            .map(|j| {
                if j < n {
                    Complex64::new(resid[j], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        self.fft_fwd.process(&mut buf);
        for (j, v) in buf.iter_mut().enumerate() {
            let sgn = if j == 0 || 2 * j == npad {
                0.0
            } else if j < npad / 2 {
                1.0
            } else {
                -1.0
            };
            *v *= Complex64::new(0.0, -sgn);
        }
        self.fft_inv.process(&mut buf);
        let inv_n = 1.0 / npad as f64;

        // leading periodisation-image correction from the residual moments
        let h = 2.0 * self.half_width / n as f64;
        let m0: f64 = h * resid.iter().sum::<f64>();
        let m1: f64 = h * resid.iter().zip(&self.xs).map(|(r, x)| r * x).sum::<f64>();
        let period = 2.0 * self.half_width * PAD_FACTOR as f64;
        let img = std::f64::consts::PI / (3.0 * period * period);

        let mut out = vec![0.0; n];
        for j in 0..n {
            let x = self.xs[j];
            let oh = odd_basis_h(x);
            let eh = even_basis_h(x);
            let model_h =
                co[0] * oh[0] + co[1] * oh[1] + co[2] * oh[2] + ce[0] * eh[0] + ce[1] * eh[1];
            out[j] = buf[j].re * inv_n + img * (x * m0 - m1) + model_h;
        }

        let max_f = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let outer = 1 + n / 256;
        let mut rb = 0.0f64;
        for j in 1..=outer {
            rb = rb.max(resid[j].abs()).max(resid[n - j].abs());
        }
        let truncation_error = 4.0 / (3.0 * std::f64::consts::PI) * rb + 1e-15 * max_f;
        Ok(HilbertEstimate {
            values: out,
            truncation_error,
        })
    }
}

fn check_decay(values: &[f64]) -> Result<(), HilbertError> {
    let n = values.len();
    let max_f = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let boundary = values[0].abs().max(values[n - 1].abs());
    if max_f > 0.0 && boundary > DECAY_THRESHOLD * max_f {
        return Err(HilbertError::DomainTooSmall {
            boundary,
            threshold: DECAY_THRESHOLD,
        });
    }
    Ok(())
}

/// Principal-value Hilbert transform of sampled data.
///
/// `Fft` requires the symmetric uniform grid `x_j = -L + 2Lj/N`;
/// `Quadrature` accepts any strictly increasing grid.
pub fn hilbert_numeric(
    xs: &[f64],
    values: &[f64],
    method: HilbertMethod,
) -> Result<HilbertEstimate, HilbertError> {
    if xs.len() != values.len() || xs.len() < 16 {
        return Err(HilbertError::BadGrid(
            "need matching grids of at least 16 points".into(),
        ));
    }
    match method {
        HilbertMethod::Fft => {
            let n = xs.len();
            let l = -xs[0];
            let step = 2.0 * l / n as f64;
            for (j, &x) in xs.iter().enumerate() {
                let expect = -l + step * j as f64;
                if (x - expect).abs() > 1e-9 * (1.0 + l) {
                    return Err(HilbertError::BadGrid(
                        "fft route requires the symmetric uniform grid -L + 2Lj/N".into(),
                    ));
                }
            }
            HilbertFft::new(l, n)?.transform(values)
        }
        HilbertMethod::Quadrature => hilbert_quadrature(xs, values),
    }
}

/// Piecewise-linear PV quadrature with the same fitted tail model.
fn hilbert_quadrature(xs: &[f64], values: &[f64]) -> Result<HilbertEstimate, HilbertError> {
    let n = xs.len();
    for w in xs.windows(2) {
        if w[1] <= w[0] {
            return Err(HilbertError::BadGrid(
                "grid must be strictly increasing".into(),
            ));
        }
    }
    check_decay(values)?;

    // tail fit on the outer samples of both sides
    let m = (((n as f64) * FIT_FRACTION) as usize / 2).max(6);
    let fit_idx: Vec<usize> = (0..m).chain(n - m..n).collect();
    let cols: Vec<Vec<f64>> = (0..5)
        .map(|k| {
            fit_idx
                .iter()
                .map(|&j| {
                    let x = xs[j];
                    if k < 3 {
                        odd_basis(x)[k]
                    } else {
                        even_basis(x)[k - 3]
                    }
                })
                .collect()
        })
        .collect();
    let rhs: Vec<f64> = fit_idx.iter().map(|&j| values[j]).collect();
    let coef = LstsqPlan::new(&cols).solve(&rhs);
    let model = |x: f64| {
        let ob = odd_basis(x);
        let eb = even_basis(x);
        coef[0] * ob[0] + coef[1] * ob[1] + coef[2] * ob[2] + coef[3] * eb[0] + coef[4] * eb[1]
    };
    let model_h = |x: f64| {
        let oh = odd_basis_h(x);
        let eh = even_basis_h(x);
        coef[0] * oh[0] + coef[1] * oh[1] + coef[2] * oh[2] + coef[3] * eh[0] + coef[4] * eh[1]
    };
    let resid: Vec<f64> = xs.iter().zip(values).map(|(&x, &v)| v - model(x)).collect();

    // per-cell exact integrals of the linear interpolant against 1/(x-y);
    // the log singularity cancels between the two cells sharing the node
    let mut out = vec![0.0; n];
    for i in 0..n {
        let x = xs[i];
        let mut acc = 0.0;
        for j in 0..n - 1 {
            let slope = (resid[j + 1] - resid[j]) / (xs[j + 1] - xs[j]);
            // coefficient of the log terms: interpolant evaluated at y = x
            let a = resid[j] + slope * (x - xs[j]);
            if j != i {
                acc += a * (x - xs[j]).abs().ln();
            }
            if j + 1 != i {
                acc -= a * (x - xs[j + 1]).abs().ln();
            }
            acc -= slope * (xs[j + 1] - xs[j]);
        }
        out[i] = acc / std::f64::consts::PI + model_h(x);
    }

    let rb = resid[0]
        .abs()
        .max(resid[n - 1].abs())
        .max(resid[1].abs())
        .max(resid[n - 2].abs());
    let max_f = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    Ok(HilbertEstimate {
        values: out,
        truncation_error: 4.0 / (3.0 * std::f64::consts::PI) * rb + 1e-15 * max_f,
    })
}
