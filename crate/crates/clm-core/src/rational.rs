//! Complex rational functions and their boundary traces.
//!
//! A rational function `f = num/den` that is holomorphic on the closed upper
//! half-plane and decays at infinity has the defining property of a Hilbert
//! pair on the real line: `H(Re f)(x) = Im f(x)`. This module supplies the
//! polynomial arithmetic, a root finder (companion-matrix eigenvalues with an
//! Aberth-Ehrlich fallback), pole/zero bookkeeping, and the boundary-trace
//! construction those exact pairs come from.

use crate::eigen::hessenberg_eigenvalues;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative residual tolerance for accepting a computed root.
pub const EPS_ROOT: f64 = 1e-12;
/// Clustering radius for multiplicity detection.
pub const DELTA_CLUSTER: f64 = 1e-8;
/// Relative denominator-magnitude guard for evaluation near poles.
pub const EPS_DEN: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum RationalError {
    #[error("evaluation at or near a pole: |den({z})| = {den_mag:.3e}")]
    PoleHit { z: Complex64, den_mag: f64 },
    #[error("root finding did not converge for degree {degree}")]
    NoConvergence { degree: usize },
    #[error("not upper-holomorphic: pole at {pole} has Im >= 0")]
    NotUpperHolomorphic { pole: Complex64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

/// Complex polynomial, coefficients in ascending degree, trailing zeros
/// trimmed (the zero polynomial keeps a single zero coefficient).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    /// Polynomial with the given real coefficients.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots (with multiplicity), scaled by
    /// `leading`.
    pub fn from_roots(roots: &[Complex64], leading: Complex64) -> Self {
        let mut coeffs = vec![leading];
        for &r in roots {
            // multiply by (z - r), ascending order
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn zero() -> Self {
        Polynomial {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn one() -> Self {
        Polynomial {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    fn trim(&mut self) {
        // leading coefficients below 1e-13 of the largest one are treated as
        // cancellation residue from polynomial arithmetic
        let max_mag = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let cut = max_mag * 1e-13;
        while self.coeffs.len() > 1 {
            let last = self.coeffs.last().unwrap().norm();
            if last <= cut {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Natural magnitude scale of the polynomial at `z`: `sum |c_k| |z|^k`.
    pub fn scale_at(&self, z: Complex64) -> f64 {
        let az = z.norm();
        let mut pw = 1.0;
        let mut s = 0.0;
        for c in &self.coeffs {
            s += c.norm() * pw;
            pw *= az;
        }
        s.max(f64::MIN_POSITIVE)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scaled(&self, s: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Polynomial::new(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// All roots with multiplicities. Companion-matrix eigenvalues first,
    /// Newton-polished, then multiplicity-aware refinement and clustering at
    /// [`DELTA_CLUSTER`]; Aberth-Ehrlich as a fallback when the residual test
    /// fails.
    pub fn roots(&self) -> Result<Vec<(Complex64, usize)>, RationalError> {
        if self.degree() == 0 {
            return Err(RationalError::Degenerate(
                "roots of a constant polynomial".into(),
            ));
        }
        let raw = match self.companion_roots() {
            Some(r) if self.residuals_ok(&r) => r,
            _ => {
                let r = self.aberth_roots(1000, 1e-14);
                if !self.residuals_ok(&r) {
                    return Err(RationalError::NoConvergence {
                        degree: self.degree(),
                    });
                }
                r
            }
        };
        // An m-fold root scatters the eigenvalues over ~eps^(1/m), so gather
        // candidates at a coarse radius and re-solve p^(m-1) = 0 before the
        // final clustering.
        let mut refined: Vec<Complex64> = Vec::with_capacity(raw.len());
        for group in cluster_groups(&raw, 3e-5) {
            let m = group.len();
            if m == 1 {
                refined.push(group[0]);
                continue;
            }
            let centroid = group.iter().sum::<Complex64>() / m as f64;
            match self.refine_multiple(centroid, m) {
                Some(r) => refined.extend(std::iter::repeat(r).take(m)),
                None => refined.extend(group),
            }
        }
        let groups = cluster_groups(&refined, DELTA_CLUSTER);
        Ok(groups
            .into_iter()
            .map(|g| {
                let m = g.len();
                (g.iter().sum::<Complex64>() / m as f64, m)
            })
            .collect())
    }

    /// Polish a suspected m-fold root as a simple root of the (m-1)-th
    /// derivative, verifying the multiplicity pattern afterwards.
    fn refine_multiple(&self, start: Complex64, m: usize) -> Option<Complex64> {
        let mut dk = self.clone();
        for _ in 0..m - 1 {
            dk = dk.derivative();
        }
        let r = dk.newton_polish(start);
        if (r - start).norm() > 1e-3 * (1.0 + start.norm()) {
            return None;
        }
        // all derivatives below order m must vanish at r
        let mut p = self.clone();
        for _ in 0..m {
            if p.eval(r).norm() > 1e-7 * p.scale_at(r) {
                return None;
            }
            p = p.derivative();
        }
        Some(r)
    }

    fn residuals_ok(&self, roots: &[Complex64]) -> bool {
        roots.len() == self.degree()
            && roots
                .iter()
                .all(|&r| self.eval(r).norm() <= EPS_ROOT * self.scale_at(r) * 10.0)
    }

    fn companion_roots(&self) -> Option<Vec<Complex64>> {
        let n = self.degree();
        let lead = self.leading();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 1..n {
            m[i][i - 1] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            m[i][n - 1] = -self.coeffs[i] / lead;
        }
        let mut roots = hessenberg_eigenvalues(&mut m)?;
        for r in roots.iter_mut() {
            *r = self.newton_polish(*r);
        }
        Some(roots)
    }

    fn newton_polish(&self, mut z: Complex64) -> Complex64 {
        let dp = self.derivative();
        for _ in 0..80 {
            let pz = self.eval(z);
            let dz = dp.eval(z);
            if dz.norm() <= 1e-30 {
                break;
            }
            let step = pz / dz;
            z -= step;
            if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                break;
            }
        }
        z
    }

    /// Aberth-Ehrlich simultaneous iteration.
    fn aberth_roots(&self, max_iter: usize, tol: f64) -> Vec<Complex64> {
        let n = self.degree();
        let lead = self.leading();
        // Cauchy bound for the root radius
        let radius = 1.0
            + self
                .coeffs
                .iter()
                .take(n)
                .map(|c| (c / lead).norm())
                .fold(0.0f64, f64::max);
        let mut zs: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
                Complex64::from_polar(radius * 0.8, theta)
            })
            .collect();
        let dp = self.derivative();
        for _ in 0..max_iter {
            let mut moved = 0.0f64;
            for i in 0..n {
                let zi = zs[i];
                let p = self.eval(zi);
                let d = dp.eval(zi);
                if p.norm() == 0.0 {
                    continue;
                }
                let newt = if d.norm() > 0.0 { p / d } else { p };
                let mut s = Complex64::new(0.0, 0.0);
                for (j, &zj) in zs.iter().enumerate() {
                    if j != i {
                        s += 1.0 / (zi - zj);
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newt * s;
                let step = if denom.norm() > 1e-30 { newt / denom } else { newt };
                zs[i] = zi - step;
                moved = moved.max(step.norm());
            }
            if moved < tol {
                break;
            }
        }
        for z in zs.iter_mut() {
            *z = self.newton_polish(*z);
        }
        zs
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(de)?;
        Ok(Polynomial::new(
            pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        ))
    }
}

/// Greedy clustering of raw roots into groups of radius `delta` (relative to
/// the root magnitude).
fn cluster_groups(roots: &[Complex64], delta: f64) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![roots[i]];
        used[i] = true;
        for j in i + 1..roots.len() {
            if used[j] {
                continue;
            }
            let scale = 1.0 + roots[i].norm();
            if (roots[j] - roots[i]).norm() <= delta * scale {
                members.push(roots[j]);
                used[j] = true;
            }
        }
        out.push(members);
    }
    out
}

/// Reduced quotient of two polynomials.
///
/// `num/den` is kept with no common root (within [`DELTA_CLUSTER`]); the
/// reduction is performed by root matching rather than a symbolic GCD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::Degenerate("zero denominator".into()));
        }
        let mut f = RationalFunction { num, den };
        f.reduce()?;
        Ok(f)
    }

    pub fn constant(c: Complex64) -> Self {
        RationalFunction {
            num: Polynomial::new(vec![c]),
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    fn reduce(&mut self) -> Result<(), RationalError> {
        if self.num.is_zero() {
            self.den = Polynomial::one();
            return Ok(());
        }
        if self.num.degree() == 0 || self.den.degree() == 0 {
            // normalise constant denominators away
            if self.den.degree() == 0 {
                self.num = self.num.scaled(1.0 / self.den.leading());
                self.den = Polynomial::one();
            }
            return Ok(());
        }
        let mut nroots = expand(self.num.roots()?);
        let mut droots = expand(self.den.roots()?);
        let mut cancelled = false;
        let mut i = 0;
        while i < nroots.len() {
            let scale = 1.0 + nroots[i].norm();
            if let Some(j) = droots
                .iter()
                .position(|&d| (d - nroots[i]).norm() <= DELTA_CLUSTER * scale)
            {
                droots.remove(j);
                nroots.remove(i);
                cancelled = true;
            } else {
                i += 1;
            }
        }
        if cancelled {
            self.num = Polynomial::from_roots(&nroots, self.num.leading());
            self.den = Polynomial::from_roots(&droots, self.den.leading());
        }
        Ok(())
    }

    /// Evaluate `num(z)/den(z)`; near-pole arguments are rejected.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, RationalError> {
        let d = self.den.eval(z);
        let guard = EPS_DEN * self.den.scale_at(z);
        if d.norm() < guard {
            return Err(RationalError::PoleHit {
                z,
                den_mag: d.norm(),
            });
        }
        Ok(self.num.eval(z) / d)
    }

    /// Quotient-rule derivative, reduced.
    pub fn derivative(&self) -> Result<RationalFunction, RationalError> {
        let n = self.num.derivative().mul(&self.den);
        let m = self.num.mul(&self.den.derivative());
        let num = n.add(&m.scaled(Complex64::new(-1.0, 0.0)));
        let den = self.den.mul(&self.den);
        RationalFunction::new(num, den)
    }

    /// Poles (denominator roots not cancelled by the numerator).
    pub fn poles(&self) -> Result<Vec<(Complex64, usize)>, RationalError> {
        if self.den.degree() == 0 {
            return Ok(Vec::new());
        }
        self.den.roots()
    }

    /// Zeros (numerator roots).
    pub fn zeros(&self) -> Result<Vec<(Complex64, usize)>, RationalError> {
        if self.num.degree() == 0 {
            return Ok(Vec::new());
        }
        self.num.roots()
    }

    /// True when every pole lies strictly in the lower half-plane and the
    /// function decays at infinity.
    pub fn is_upper_holomorphic(&self) -> Result<bool, RationalError> {
        if self.num.is_zero() {
            return Ok(true);
        }
        if self.num.degree() >= self.den.degree() {
            return Ok(false);
        }
        Ok(self.poles()?.iter().all(|(p, _)| p.im < 0.0))
    }

    /// Sum with another rational function, reduced.
    pub fn add(&self, other: &RationalFunction) -> Result<RationalFunction, RationalError> {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        RationalFunction::new(num, self.den.mul(&other.den))
    }

    pub fn scaled(&self, s: Complex64) -> RationalFunction {
        RationalFunction {
            num: self.num.scaled(s),
            den: self.den.clone(),
        }
    }

    /// Reciprocal `den/num`.
    pub fn reciprocal(&self) -> Result<RationalFunction, RationalError> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }
}

/// Boundary trace of an upper-holomorphic rational function: the exact pair
/// `omega0(x) = Re f(x)`, `H(omega0)(x) = Im f(x)` on the real line.
///
/// Evaluation goes through real-coefficient polynomials for
/// `num(x) conj(den(x))` and `|den(x)|^2`, so the real and imaginary parts
/// keep full relative accuracy near their zeros (the complex quotient would
/// lose them to cancellation).
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    eta: RationalFunction,
    re_coeffs: Vec<f64>,
    im_coeffs: Vec<f64>,
    den2_coeffs: Vec<f64>,
}

impl BoundaryTrace {
    pub fn eta(&self) -> &RationalFunction {
        &self.eta
    }

    pub fn omega0(&self, x: f64) -> f64 {
        eval_real(&self.re_coeffs, x) / eval_real(&self.den2_coeffs, x)
    }

    pub fn hilbert_omega0(&self, x: f64) -> f64 {
        eval_real(&self.im_coeffs, x) / eval_real(&self.den2_coeffs, x)
    }

    pub fn eval_eta(&self, x: f64) -> Complex64 {
        Complex64::new(self.omega0(x), self.hilbert_omega0(x))
    }
}

fn eval_real(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Construct the boundary trace of `f`, verifying upper-holomorphy.
pub fn boundary_trace(f: &RationalFunction) -> Result<BoundaryTrace, RationalError> {
    if !f.is_upper_holomorphic()? {
        let pole = f
            .poles()?
            .into_iter()
            .map(|(p, _)| p)
            .find(|p| p.im >= 0.0)
            .unwrap_or_else(|| Complex64::new(f64::INFINITY, 0.0));
        return Err(RationalError::NotUpperHolomorphic { pole });
    }
    let conj_den = Polynomial::new(f.den().coeffs().iter().map(|c| c.conj()).collect());
    let prod = f.num().mul(&conj_den);
    let den2 = f.den().mul(&conj_den);
    Ok(BoundaryTrace {
        eta: f.clone(),
        re_coeffs: prod.coeffs().iter().map(|c| c.re).collect(),
        im_coeffs: prod.coeffs().iter().map(|c| c.im).collect(),
        den2_coeffs: den2.coeffs().iter().map(|c| c.re).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn example_iii_eta() -> RationalFunction {
        // 2/(1-i-z) - 2/(1+i+z) = (4z+4i)/(2-2iz-z^2)
        RationalFunction::new(
            Polynomial::new(vec![c(0.0, 4.0), c(4.0, 0.0)]),
            Polynomial::new(vec![c(2.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn eval_example_i_at_origin() {
        // eta0 = -2/(i+z) at z=0 -> 2i
        let f = RationalFunction::new(
            Polynomial::new(vec![c(-2.0, 0.0)]),
            Polynomial::new(vec![c(0.0, 1.0), c(1.0, 0.0)]),
        )
        .unwrap();
        let v = f.eval(c(0.0, 0.0)).unwrap();
        assert!((v - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_at_pole_is_rejected() {
        let f = RationalFunction::new(
            Polynomial::new(vec![c(-2.0, 0.0)]),
            Polynomial::new(vec![c(0.0, 1.0), c(1.0, 0.0)]),
        )
        .unwrap();
        match f.eval(c(0.0, -1.0)) {
            Err(RationalError::PoleHit { .. }) => {}
            other => panic!("expected PoleHit, got {other:?}"),
        }
    }

    #[test]
    fn eval_example_iii_oracle() {
        // independent complex arithmetic: 2/(-i) - 2/(2+i)
        let expect = c(2.0, 0.0) / c(0.0, -1.0) - c(2.0, 0.0) / c(2.0, 1.0);
        let v = example_iii_eta().eval(c(1.0, 0.0)).unwrap();
        assert!((v - expect).norm() < 1e-14, "{v} vs {expect}");
    }

    #[test]
    fn roots_of_z2_plus_1() {
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        let mut roots = p.roots().unwrap();
        roots.sort_by(|a, b| a.0.im.partial_cmp(&b.0.im).unwrap());
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 - c(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1].0 - c(0.0, 1.0)).norm() < 1e-12);
        assert!(roots.iter().all(|r| r.1 == 1));
    }

    #[test]
    fn triple_root_multiplicity() {
        // (z+i)^3, the Example V initial pole
        let p = Polynomial::from_roots(&[c(0.0, -1.0); 3], c(1.0, 0.0));
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 1, "roots: {roots:?}");
        assert_eq!(roots[0].1, 3);
        assert!((roots[0].0 - c(0.0, -1.0)).norm() < 1e-7);
    }

    #[test]
    fn quartic_backsubstitution_residual() {
        // 16z^4 + 24z^2 + 25, the Example II trace denominator
        let p = Polynomial::from_real(&[25.0, 0.0, 24.0, 0.0, 16.0]);
        let roots = p.roots().unwrap();
        assert_eq!(roots.iter().map(|r| r.1).sum::<usize>(), 4);
        for (r, _) in &roots {
            assert!(p.eval(*r).norm() <= 1e-10, "residual {}", p.eval(*r).norm());
        }
        // known factorisation: roots are +/-(1/2) +/- i
        for (r, _) in &roots {
            assert!((r.re.abs() - 0.5).abs() < 1e-10);
            assert!((r.im.abs() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn aberth_fallback_agrees() {
        let p = Polynomial::from_real(&[25.0, 0.0, 24.0, 0.0, 16.0]);
        let roots = p.aberth_roots(500, 1e-14);
        for r in &roots {
            assert!(p.eval(*r).norm() <= 1e-10);
        }
    }

    #[test]
    fn derivative_of_example_i_zeta() {
        // zeta0 = -(i+z)/2 -> constant -1/2
        let z0 = RationalFunction::new(
            Polynomial::new(vec![c(0.0, -0.5), c(-0.5, 0.0)]),
            Polynomial::one(),
        )
        .unwrap();
        let d = z0.derivative().unwrap();
        assert_eq!(d.num().degree(), 0);
        assert!((d.eval(c(3.0, -2.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = RationalFunction::constant(c(4.0, 1.0));
        let d = f.derivative().unwrap();
        assert!(d.num().is_zero());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let f = example_iii_eta();
        let d = f.derivative().unwrap();
        let pts = [
            c(0.3, 0.2),
            c(-1.1, 0.7),
            c(2.0, -0.2),
            c(0.05, 1.4),
            c(-0.6, -0.35),
        ];
        let h = 1e-5;
        for &z in &pts {
            let fd = (f.eval(z + c(h, 0.0)).unwrap() - f.eval(z - c(h, 0.0)).unwrap()) / (2.0 * h);
            assert!(
                (d.eval(z).unwrap() - fd).norm() < 1e-8,
                "at {z}: {} vs {fd}",
                d.eval(z).unwrap()
            );
        }
    }

    #[test]
    fn boundary_trace_example_i() {
        let f = RationalFunction::new(
            Polynomial::new(vec![c(-2.0, 0.0)]),
            Polynomial::new(vec![c(0.0, 1.0), c(1.0, 0.0)]),
        )
        .unwrap();
        let tr = boundary_trace(&f).unwrap();
        for &x in &[-3.0, -0.5, 0.0, 0.7, 11.0] {
            assert!((tr.omega0(x) - (-2.0 * x / (1.0 + x * x))).abs() < 1e-14);
            assert!((tr.hilbert_omega0(x) - 2.0 / (1.0 + x * x)).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_trace_example_vi() {
        // eta0 = 2i/(i+z) -> omega0 = 2/(1+x^2), H = 2x/(1+x^2)
        let f = RationalFunction::new(
            Polynomial::new(vec![c(0.0, 2.0)]),
            Polynomial::new(vec![c(0.0, 1.0), c(1.0, 0.0)]),
        )
        .unwrap();
        let tr = boundary_trace(&f).unwrap();
        for &x in &[-2.0, 0.0, 0.3, 5.0] {
            assert!((tr.omega0(x) - 2.0 / (1.0 + x * x)).abs() < 1e-14);
            assert!((tr.hilbert_omega0(x) - 2.0 * x / (1.0 + x * x)).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_trace_rejects_upper_pole() {
        let f = RationalFunction::new(
            Polynomial::one(),
            Polynomial::new(vec![c(0.0, -1.0), c(1.0, 0.0)]), // pole at +i
        )
        .unwrap();
        match boundary_trace(&f) {
            Err(RationalError::NotUpperHolomorphic { .. }) => {}
            other => panic!("expected NotUpperHolomorphic, got {other:?}"),
        }
    }

    #[test]
    fn reduce_cancels_common_root() {
        // (z-1)(z+2) / (z-1)(z+3) -> (z+2)/(z+3)
        let num = Polynomial::from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)], c(1.0, 0.0));
        let den = Polynomial::from_roots(&[c(1.0, 0.0), c(-3.0, 0.0)], c(1.0, 0.0));
        let f = RationalFunction::new(num, den).unwrap();
        assert_eq!(f.num().degree(), 1);
        assert_eq!(f.den().degree(), 1);
        let v = f.eval(c(2.0, 0.0)).unwrap();
        assert!((v - c(0.8, 0.0)).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn roots_roundtrip(res in proptest::collection::vec(-3.0f64..3.0, 1..6),
                           ims in proptest::collection::vec(-3.0f64..3.0, 1..6)) {
            let n = res.len().min(ims.len());
            let roots: Vec<Complex64> = (0..n).map(|k| c(res[k], ims[k])).collect();
            // keep roots pairwise separated so multiplicities stay 1
            let mut sep = true;
            for i in 0..n { for j in 0..i {
                if (roots[i]-roots[j]).norm() < 1e-3 { sep = false; }
            }}
            prop_assume!(sep);
            let p = Polynomial::from_roots(&roots, c(1.0, 0.0));
            let found = p.roots().unwrap();
            prop_assert_eq!(found.iter().map(|r| r.1).sum::<usize>(), n);
            for &r in &roots {
                let best = found.iter().map(|(z, _)| (z - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-6, "root {} missed by {}", r, best);
            }
        }

        #[test]
        fn derivative_is_linear(alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
            let f = example_iii_eta();
            let g = RationalFunction::new(
                Polynomial::new(vec![c(1.0, 0.0)]),
                Polynomial::new(vec![c(0.0, 2.0), c(1.0, 0.0)]),
            ).unwrap();
            let lhs = f.scaled(c(alpha, 0.0)).add(&g.scaled(c(beta, 0.0))).unwrap()
                .derivative().unwrap();
            let df = f.derivative().unwrap();
            let dg = g.derivative().unwrap();
            for &z in &[c(0.4, 0.3), c(-1.2, 0.8), c(2.2, -0.4)] {
                let want = df.eval(z).unwrap() * alpha + dg.eval(z).unwrap() * beta;
                let got = lhs.eval(z).unwrap();
                prop_assert!((want - got).norm() < 1e-9 * (1.0 + want.norm()));
            }
        }
    }
}

fn expand(grouped: Vec<(Complex64, usize)>) -> Vec<Complex64> {
    let mut out = Vec::new();
    for (z, m) in grouped {
        for _ in 0..m {
            out.push(z);
        }
    }
    out
}
