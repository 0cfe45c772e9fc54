//! Reference initial data I-VI: rational generators `eta0 = w0 + i H(w0)`,
//! their reciprocals `zeta0 = 1/eta0`, and the expected blowup data each one
//! is known to produce.

use crate::rational::{Polynomial, RationalFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Identifier of a reference datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PresetId {
    I,
    II,
    III,
    /// Variant of III with the figure-caption amplitude `w0 = -2x^3/(4+x^4)`.
    IIIFig,
    IV,
    V,
    VI,
}

impl std::fmt::Display for PresetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PresetId::I => "I",
            PresetId::II => "II",
            PresetId::III => "III",
            PresetId::IIIFig => "III-fig",
            PresetId::IV => "IV",
            PresetId::V => "V",
            PresetId::VI => "VI",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for PresetId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "i" | "1" => Ok(PresetId::I),
            "II" | "ii" | "2" => Ok(PresetId::II),
            "III" | "iii" | "3" => Ok(PresetId::III),
            "III-fig" | "iii-fig" | "3-fig" => Ok(PresetId::IIIFig),
            "IV" | "iv" | "4" => Ok(PresetId::IV),
            "V" | "v" | "5" => Ok(PresetId::V),
            "VI" | "vi" | "6" => Ok(PresetId::VI),
            other => Err(format!("unknown preset '{other}'")),
        }
    }
}

/// Expected behaviour of a preset, used by tests and the CLI listing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresetNotes {
    /// Finite blowup time, if the solution blows up.
    pub blowup_time: Option<f64>,
    pub blowup_points: Vec<f64>,
    /// Degeneracy order at the origin when the blowup is origin-centred
    /// (0 = one-scale, n >= 1 = two-scale).
    pub degeneracy_n: Option<u32>,
    pub c_omega: Option<f64>,
    pub c_l: Option<f64>,
    pub c_s: Option<f64>,
    /// Affine bulk-centre law `r(t) = r0 + r1 (T-t)` where one is known.
    pub bulk_center: Option<(f64, f64)>,
    pub description: &'static str,
}

/// One reference datum.
#[derive(Debug, Clone)]
pub struct Preset {
    pub id: PresetId,
    pub eta0: RationalFunction,
    pub zeta0: RationalFunction,
    pub odd_symmetric: bool,
    /// `sgn(w0(x)) = -sgn(x)` away from the origin.
    pub sign_condition: bool,
    pub notes: PresetNotes,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rational(num: &[Complex64], den: &[Complex64]) -> RationalFunction {
    RationalFunction::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
        .expect("preset polynomials are well formed")
}

/// Look up a single preset.
pub fn preset(id: PresetId) -> Preset {
    match id {
        PresetId::I => Preset {
            id,
            // eta0 = -2/(i+z), zeta0 = -(i+z)/2
            eta0: rational(&[c(-2.0, 0.0)], &[c(0.0, 1.0), c(1.0, 0.0)]),
            zeta0: rational(&[c(0.0, -0.5), c(-0.5, 0.0)], &[c(1.0, 0.0)]),
            odd_symmetric: true,
            sign_condition: true,
            notes: PresetNotes {
                blowup_time: Some(1.0),
                blowup_points: vec![0.0],
                degeneracy_n: Some(0),
                c_omega: Some(-1.0),
                c_l: Some(1.0),
                c_s: None,
                bulk_center: None,
                description: "exact one-scale self-similar blowup, w0 = -2x/(1+x^2)",
            },
        },
        PresetId::II => Preset {
            id,
            // eta0 = (10z+10i)/(5-8iz-4z^2), zeta0 = (5/2-4iz-2z^2)/(5i+5z)
            eta0: rational(
                &[c(0.0, 10.0), c(10.0, 0.0)],
                &[c(5.0, 0.0), c(0.0, -8.0), c(-4.0, 0.0)],
            ),
            zeta0: rational(
                &[c(2.5, 0.0), c(0.0, -4.0), c(-2.0, 0.0)],
                &[c(0.0, 5.0), c(5.0, 0.0)],
            ),
            odd_symmetric: true,
            sign_condition: true,
            notes: PresetNotes {
                blowup_time: Some(1.0),
                blowup_points: vec![0.0],
                degeneracy_n: Some(0),
                c_omega: Some(-1.0),
                c_l: Some(1.0),
                c_s: None,
                bulk_center: None,
                description: "one-scale asymptotic blowup; the pole pair merges at -i/2 at t = 4/5",
            },
        },
        PresetId::III => Preset {
            id,
            // eta0 = (4z+4i)/(2-2iz-z^2), zeta0 = (2-2iz-z^2)/(4i+4z)
            eta0: rational(
                &[c(0.0, 4.0), c(4.0, 0.0)],
                &[c(2.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)],
            ),
            zeta0: rational(
                &[c(2.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)],
                &[c(0.0, 4.0), c(4.0, 0.0)],
            ),
            odd_symmetric: true,
            sign_condition: true,
            notes: PresetNotes {
                blowup_time: Some(1.0),
                blowup_points: vec![0.0],
                degeneracy_n: Some(1),
                c_omega: Some(-1.5),
                c_l: Some(1.0),
                c_s: Some(0.5),
                bulk_center: Some((std::f64::consts::SQRT_2, 0.0)),
                description: "two-scale blowup (n = 1), w0 = -4x^3/(4+x^4)",
            },
        },
        PresetId::IIIFig => Preset {
            id,
            // half-amplitude variant: eta0 = (2z+2i)/(2-2iz-z^2)
            eta0: rational(
                &[c(0.0, 2.0), c(2.0, 0.0)],
                &[c(2.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)],
            ),
            zeta0: rational(
                &[c(2.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)],
                &[c(0.0, 2.0), c(2.0, 0.0)],
            ),
            odd_symmetric: true,
            sign_condition: true,
            notes: PresetNotes {
                blowup_time: Some(2.0),
                blowup_points: vec![0.0],
                degeneracy_n: Some(1),
                c_omega: Some(-1.5),
                c_l: Some(1.0),
                c_s: Some(0.5),
                bulk_center: Some((std::f64::consts::SQRT_2, 0.0)),
                description: "two-scale blowup (n = 1), figure-caption amplitude w0 = -2x^3/(4+x^4)",
            },
        },
        PresetId::IV => Preset {
            id,
            // eta0 = (4z+4i)/(5-2iz-z^2), zeta0 = (5-2iz-z^2)/(4i+4z)
            eta0: rational(
                &[c(0.0, 4.0), c(4.0, 0.0)],
                &[c(5.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)],
            ),
            zeta0: rational(
                &[c(5.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)],
                &[c(0.0, 4.0), c(4.0, 0.0)],
            ),
            odd_symmetric: true,
            sign_condition: false,
            notes: PresetNotes {
                blowup_time: Some(1.0),
                blowup_points: vec![-(3.0f64.sqrt()), 3.0f64.sqrt()],
                degeneracy_n: None,
                c_omega: Some(-1.0),
                c_l: Some(1.0),
                c_s: None,
                bulk_center: None,
                description: "one-scale blowup away from the origin, simultaneous at x = +/-sqrt(3)",
            },
        },
        PresetId::V => Preset {
            id,
            // eta0 = (3-9iz-8z^2)/(8(i+z)^3), zeta0 reciprocal
            eta0: rational(
                &[c(3.0, 0.0), c(0.0, -9.0), c(-8.0, 0.0)],
                &[c(0.0, -8.0), c(-24.0, 0.0), c(0.0, 24.0), c(8.0, 0.0)],
            ),
            zeta0: rational(
                &[c(0.0, -8.0), c(-24.0, 0.0), c(0.0, 24.0), c(8.0, 0.0)],
                &[c(3.0, 0.0), c(0.0, -9.0), c(-8.0, 0.0)],
            ),
            odd_symmetric: true,
            sign_condition: true,
            notes: PresetNotes {
                blowup_time: Some(16.0 / 3.0),
                blowup_points: vec![0.0],
                degeneracy_n: Some(2),
                c_omega: Some(-2.5),
                c_l: Some(2.0),
                c_s: Some(0.5),
                bulk_center: Some((0.75, -9.0 / 16.0)),
                description: "two-scale blowup (n = 2), w0 = -x^5/(1+x^2)^3, T = 16/3",
            },
        },
        PresetId::VI => Preset {
            id,
            // eta0 = 2i/(i+z), zeta0 = (1 - iz)/2
            eta0: rational(&[c(0.0, 2.0)], &[c(0.0, 1.0), c(1.0, 0.0)]),
            zeta0: rational(&[c(0.5, 0.0), c(0.0, -0.5)], &[c(1.0, 0.0)]),
            odd_symmetric: false,
            sign_condition: false,
            notes: PresetNotes {
                blowup_time: None,
                blowup_points: vec![],
                degeneracy_n: None,
                c_omega: None,
                c_l: None,
                c_s: None,
                bulk_center: None,
                description: "non-blowup traveling wave, w0 = 2/(1+x^2), speed 1",
            },
        },
    }
}

/// All presets in listing order.
pub fn all_presets() -> Vec<Preset> {
    [
        PresetId::I,
        PresetId::II,
        PresetId::III,
        PresetId::IIIFig,
        PresetId::IV,
        PresetId::V,
        PresetId::VI,
    ]
    .into_iter()
    .map(preset)
    .collect()
}

/// The closed-form trace pair `(w0, H(w0))` of a preset, for oracle tests.
pub fn reference_trace(id: PresetId, x: f64) -> (f64, f64) {
    match id {
        PresetId::I => (-2.0 * x / (1.0 + x * x), 2.0 / (1.0 + x * x)),
        PresetId::II => {
            let d = 25.0 + 24.0 * x * x + 16.0 * x.powi(4);
            (-(30.0 * x + 40.0 * x.powi(3)) / d, (50.0 + 40.0 * x * x) / d)
        }
        PresetId::III => {
            let d = 4.0 + x.powi(4);
            (-4.0 * x.powi(3) / d, (8.0 + 4.0 * x * x) / d)
        }
        PresetId::IIIFig => {
            let d = 4.0 + x.powi(4);
            (-2.0 * x.powi(3) / d, (4.0 + 2.0 * x * x) / d)
        }
        PresetId::IV => {
            let d = 25.0 + x.powi(4) - 6.0 * x * x;
            ((12.0 * x - 4.0 * x.powi(3)) / d, (20.0 + 4.0 * x * x) / d)
        }
        PresetId::V => {
            let d = (1.0 + x * x).powi(3);
            (
                -x.powi(5) / d,
                (3.0 + 10.0 * x * x + 15.0 * x.powi(4)) / (8.0 * d),
            )
        }
        PresetId::VI => (2.0 / (1.0 + x * x), 2.0 * x / (1.0 + x * x)),
    }
}
