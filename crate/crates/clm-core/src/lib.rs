//! Numerical laboratory for the 1D Constantin–Lax–Majda vorticity model
//! `w_t = w H(w)`, where `H` is the Hilbert transform on the real line.
//!
//! The crate is organised around the closed-form solution of the model:
//!
//! * [`rational`] — complex rational functions, their roots, and boundary
//!   traces of upper-holomorphic functions (exact Hilbert pairs).
//! * [`hilbert`] — an independent numerical Hilbert transform (FFT and
//!   quadrature routes) used as a cross-check oracle.
//! * [`exact`] — the closed-form solution engine: pointwise evaluation,
//!   blowup prediction, and the conserved quantity at the blowup point.
//! * [`evolve`] — a pseudo-spectral RK4 integrator for the model, validated
//!   against the closed form.
//! * [`asymptotics`] — self-similar profiles, scaling-exponent extraction,
//!   the bulk-location function `r(t)`, and rescaled-profile errors.
//! * [`poles`] — complex pole dynamics: tracking the zeros of
//!   `zeta(z,t) = zeta0(z) + i t/2` algebraically and by ODE continuation.
//! * [`presets`] — the six reference initial data sets I–VI.

mod eigen;
pub mod asymptotics;
pub mod evolve;
pub mod exact;
pub mod hilbert;
pub mod numeric;
pub mod poles;
pub mod presets;
pub mod rational;

pub use num_complex::Complex64;
