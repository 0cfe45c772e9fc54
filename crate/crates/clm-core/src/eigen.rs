//! Eigenvalues of a complex upper-Hessenberg matrix by the shifted QR
//! iteration (Wilkinson shift, exceptional shifts on stall, direct 2x2
//! deflation). Companion matrices arrive in Hessenberg form already, which is
//! all the polynomial root finder needs.

use num_complex::Complex64;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

type Mat = Vec<Vec<Complex64>>;

/// Eigenvalues of the upper-Hessenberg matrix `h` (consumed as workspace).
/// Returns `None` if the iteration fails to deflate within budget.
pub(crate) fn hessenberg_eigenvalues(h: &mut Mat) -> Option<Vec<Complex64>> {
    let n = h.len();
    let mut eigs = Vec::with_capacity(n);
    if n == 0 {
        return Some(eigs);
    }
    let mut hi = n - 1;
    let mut stall = 0usize;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut sweeps = 0usize;
    loop {
        // deflate negligible subdiagonals
        for k in 1..=hi {
            if h[k][k - 1].norm() <= f64::EPSILON * (h[k - 1][k - 1].norm() + h[k][k].norm()) {
                h[k][k - 1] = Complex64::new(0.0, 0.0);
            }
        }
        // peel converged eigenvalues off the bottom
        while hi > 0 && h[hi][hi - 1].norm() == 0.0 {
            eigs.push(h[hi][hi]);
            hi -= 1;
            stall = 0;
        }
        if hi == 0 {
            eigs.push(h[0][0]);
            return Some(eigs);
        }
        // active block [lo..=hi]
        let mut lo = hi;
        while lo > 0 && h[lo][lo - 1].norm() != 0.0 {
            lo -= 1;
        }
        if hi - lo == 1 {
            let (l1, l2) = eig2(h[lo][lo], h[lo][hi], h[hi][lo], h[hi][hi]);
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                return Some(eigs);
            }
            hi = lo - 1;
            stall = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > budget {
            return None;
        }
        let shift = if stall > 0 && stall % 12 == 0 {
            // exceptional shift breaks symmetric-spectrum cycling
            let mag = h[hi][hi - 1].norm() + h[hi - 1][hi - 2.min(hi - 1)].norm();
            h[hi][hi] + Complex64::new(0.75 * mag, 0.34 * mag)
        } else {
            wilkinson(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        qr_sweep(h, lo, hi, shift);
        stall += 1;
    }
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr2 = 0.5 * (a + d);
    let disc = (0.5 * (a - d)).powi(2) + b * c;
    let s = disc.sqrt();
    (tr2 + s, tr2 - s)
}

/// Wilkinson shift: the trailing-2x2 eigenvalue closest to `d`.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit single-shift QR sweep on the active block.
fn qr_sweep(h: &mut Mat, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[k][k] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        // rows k, k+1 over columns k..=hi
        for j in k..=hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = c * x + s * y;
            h[k + 1][j] = -s.conj() * x + c * y;
        }
        rots.push((c, s));
    }
    for (idx, (c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        // columns k, k+1 over rows lo..=min(k+2, hi) (stay Hessenberg)
        let rmax = (k + 2).min(hi);
        for row in h.iter_mut().take(rmax + 1).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = c * x + s.conj() * y;
            row[k + 1] = -s * x + c * y;
        }
    }
    for k in lo..=hi {
        h[k][k] += shift;
    }
}

/// Complex Givens rotation with real cosine: `G [a; b] = [r; 0]` for
/// `G = [[c, s], [-conj(s), c]]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let rho = (an * an + bn * bn).sqrt();
    let c = an / rho;
    let s = (a / an) * b.conj() / rho;
    (c, s)
}
