//! Small shared numerical toolbox: bracketed root finding, golden-section
//! search, least-squares power-law fits, adaptive quadrature and
//! finite-difference stencils.

/// Bisection on a bracketing interval, refined to `xtol` on the abscissa.
///
/// `f(a)` and `f(b)` must have opposite signs (zero counts as either sign).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    debug_assert!(fa * fb <= 0.0, "bisect: no sign change on [{a}, {b}]");
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    while (b - a).abs() > xtol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if (b - a).abs() <= xtol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Result of a least-squares straight-line fit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub rms: f64,
}

/// Least-squares line through `(x_i, y_i)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "fit_line needs at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>();
    LineFit {
        slope,
        intercept,
        rms: (ss / n).sqrt(),
    }
}

/// Power-law fit `y ~ C x^p` via least squares in log-log coordinates;
/// returns `p` as the slope. All `x`, `y` must be strictly positive.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> LineFit {
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    fit_line(&lx, &ly)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Thin QR (modified Gram-Schmidt with column scaling) of a small
/// column-major design matrix, reusable for repeated right-hand sides.
#[derive(Debug, Clone)]
pub struct LstsqPlan {
    q: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
    scale: Vec<f64>,
}

impl LstsqPlan {
    pub fn new(columns: &[Vec<f64>]) -> Self {
        let k = columns.len();
        let scale: Vec<f64> = columns
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300))
            .collect();
        let mut q: Vec<Vec<f64>> = columns
            .iter()
            .zip(&scale)
            .map(|(c, &s)| c.iter().map(|v| v / s).collect())
            .collect();
        let mut r = vec![vec![0.0; k]; k];
        for j in 0..k {
            // two MGS passes for orthogonality
            for _ in 0..2 {
                for i in 0..j {
                    let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
                    r[i][j] += dot;
                    let qi = q[i].clone();
                    for (v, u) in q[j].iter_mut().zip(&qi) {
                        *v -= dot * u;
                    }
                }
            }
            let nrm: f64 = q[j].iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            r[j][j] = nrm;
            for v in q[j].iter_mut() {
                *v /= nrm;
            }
        }
        LstsqPlan { q, r, scale }
    }

    /// Least-squares coefficients for the given right-hand side.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let k = self.q.len();
        let mut y: Vec<f64> = self
            .q
            .iter()
            .map(|qc| qc.iter().zip(rhs).map(|(a, b)| a * b).sum())
            .collect();
        // back substitution R c = y
        for j in (0..k).rev() {
            for i in j + 1..k {
                y[j] -= self.r[j][i] * y[i];
            }
            y[j] /= self.r[j][j];
        }
        y.iter().zip(&self.scale).map(|(c, s)| c / s).collect()
    }
}

/// Fornberg weights for the `order`-th derivative at `x0` from nodes `xs`.
///
/// Classic recursion (Fornberg 1988); exact for polynomials of degree
/// `xs.len() - 1`.
pub fn fornberg_weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > order, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// `order`-th derivative of `f` at `x0` by central differences on a
/// `2*half+1`-point stencil of spacing `h`, with one Richardson step
/// (combining `h` and `h/2`) to cancel the leading `O(h^2)` error.
pub fn central_derivative<F: Fn(f64) -> f64>(f: &F, x0: f64, order: usize, h: f64) -> f64 {
    let half = order / 2 + 1;
    let eval = |step: f64| -> f64 {
        let xs: Vec<f64> = (-(half as i64)..=half as i64)
            .map(|k| x0 + k as f64 * step)
            .collect();
        let w = fornberg_weights(x0, &xs, order);
        xs.iter().zip(&w).map(|(&x, &wk)| wk * f(x)).sum()
    };
    let d_h = eval(h);
    let d_h2 = eval(0.5 * h);
    (4.0 * d_h2 - d_h) / 3.0
}
