//! Closed integrable models and the level criterion `y(n) = |ΔE_n Δτ_n|`.
//!
//! `ΔE_n = (E_n − E_{n−1})/2` is the largest energy spread of a superposition
//! of two neighboring levels and `Δτ_n = (τ_n − τ_{n−1})/2` is the matching
//! spread of classical periods. A level is resolvable by timing the classical
//! motion only while `y(n) >= ħ/2`.
//!
//! Units: `ħ = 1`. Each model keeps its own energy and length scale, and `y`
//! comes out in units of `ħ`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::HALF_HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub mass: f64,
    pub omega: f64,
}

/// Particle in an infinite square well of width `width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxWell {
    pub mass: f64,
    pub width: f64,
}

/// One-electron atom in Gaussian units (`e²` carries energy × length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hydrogenoid {
    pub reduced_mass: f64,
    pub z: u32,
    pub charge: f64,
}

/// Morse oscillator `U(x) = D (e^{−2αx} − 2e^{−αx})`, s-wave levels
/// `E(n) = −D + ħω[(n+½) − (n+½)²/ζ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Morse {
    pub depth: f64,
    /// Range parameter, inverse length.
    pub alpha: f64,
    /// Anharmonicity `ζ` of the level formula.
    pub anharmonicity: f64,
    pub mass: f64,
    /// Length scale. The period only sees the dimensionless range `α·Ro`.
    pub ro: f64,
    pub omega: f64,
}

/// `Ĥ0 = ħω â†â + λħ² (â†â)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartic {
    pub omega: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Harmonic(Harmonic),
    Box(BoxWell),
    Hydrogenoid(Hydrogenoid),
    Morse(Morse),
    Quartic(Quartic),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be > 0, got {v}"
        )))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be >= 0, got {v}"
        )))
    }
}

impl Morse {
    pub fn energy_unchecked(&self, n: u32) -> f64 {
        let nu = f64::from(n) + 0.5;
        -self.depth + self.omega * (nu - nu * nu / self.anharmonicity)
    }

    /// Highest bound level: `E(n) < 0` and the ladder still rising.
    /// `None` if not even the ground state is bound.
    pub fn max_level(&self) -> Option<u32> {
        if self.energy_unchecked(0) >= 0.0 {
            return None;
        }
        let mut n = 0u32;
        loop {
            let next = n + 1;
            let e = self.energy_unchecked(next);
            if e >= 0.0 || e <= self.energy_unchecked(n) {
                return Some(n);
            }
            n = next;
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        let e = (-self.alpha * x).exp();
        self.depth * (e * e - 2.0 * e)
    }
}

impl ModelParams {
    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::Harmonic(_) => "harmonic",
            ModelParams::Box(_) => "box",
            ModelParams::Hydrogenoid(_) => "hydrogenoid",
            ModelParams::Morse(_) => "morse",
            ModelParams::Quartic(_) => "quartic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelParams::Harmonic(h) => {
                positive("mass", h.mass)?;
                positive("omega", h.omega)
            }
            ModelParams::Box(b) => {
                positive("mass", b.mass)?;
                positive("width", b.width)
            }
            ModelParams::Hydrogenoid(h) => {
                positive("reduced mass", h.reduced_mass)?;
                positive("charge", h.charge)?;
                if h.z == 0 {
                    return Err(Error::InvalidParameter("Z must be >= 1".into()));
                }
                Ok(())
            }
            ModelParams::Morse(m) => {
                positive("depth", m.depth)?;
                positive("alpha", m.alpha)?;
                positive("zeta", m.anharmonicity)?;
                positive("mass", m.mass)?;
                positive("ro", m.ro)?;
                positive("omega", m.omega)
            }
            ModelParams::Quartic(q) => {
                non_negative("omega", q.omega)?;
                non_negative("lambda", q.lambda)
            }
        }
    }

    /// Lowest quantum number of the model's spectrum.
    pub fn min_level(&self) -> u32 {
        match self {
            ModelParams::Box(_) | ModelParams::Hydrogenoid(_) => 1,
            _ => 0,
        }
    }

    /// Highest level, where the spectrum is finite.
    pub fn max_level(&self) -> Option<u32> {
        match self {
            ModelParams::Morse(m) => m.max_level(),
            _ => None,
        }
    }

    fn check_level(&self, n: u32) -> Result<()> {
        self.validate()?;
        let out = |reason: String| Error::IndexOutOfSpectrum {
            model: self.name(),
            n,
            reason,
        };
        if n < self.min_level() {
            return Err(out(format!("levels start at n={}", self.min_level())));
        }
        if let ModelParams::Morse(m) = self {
            match m.max_level() {
                None => return Err(out("the well has no bound levels".into())),
                Some(top) if n > top => {
                    return Err(out(format!(
                        "past dissociation, last bound level is n={top}"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Eigenvalue `E_n`.
pub fn energy(model: &ModelParams, n: u32) -> Result<f64> {
    model.check_level(n)?;
    let nf = f64::from(n);
    Ok(match *model {
        ModelParams::Harmonic(h) => h.omega * (nf + 0.5),
        ModelParams::Box(b) => nf * nf * PI * PI / (2.0 * b.mass * b.width * b.width),
        ModelParams::Hydrogenoid(h) => -rydberg_scale(&h) / (2.0 * nf * nf),
        ModelParams::Morse(m) => m.energy_unchecked(n),
        ModelParams::Quartic(q) => q.omega * nf + q.lambda * nf * nf,
    })
}

/// `μ Z² e⁴`.
fn rydberg_scale(h: &Hydrogenoid) -> f64 {
    let z = f64::from(h.z);
    let e2 = h.charge * h.charge;
    h.reduced_mass * z * z * e2 * e2
}

/// Classical period of the orbit with energy `E_n`.
pub fn period(model: &ModelParams, n: u32) -> Result<f64> {
    model.check_level(n)?;
    let nf = f64::from(n);
    Ok(match *model {
        ModelParams::Harmonic(h) => TAU / h.omega,
        ModelParams::Box(b) => 2.0 * b.width * b.width * b.mass / (nf * PI),
        // Kepler: τ ∝ n³.
        ModelParams::Hydrogenoid(h) => TAU * nf * nf * nf / rydberg_scale(&h),
        ModelParams::Morse(m) => {
            let e = m.energy_unchecked(n).abs();
            let range = m.alpha * m.ro;
            TAU * (m.mass * m.ro * m.ro / (2.0 * e * range * range)).sqrt()
        }
        ModelParams::Quartic(q) => {
            let f = q.omega + 2.0 * q.lambda * nf;
            if f <= 0.0 {
                return Err(Error::IndexOutOfSpectrum {
                    model: "quartic",
                    n,
                    reason: "classical frequency ω + 2λn vanishes, the period is infinite".into(),
                });
            }
            TAU / f
        }
    })
}

/// Mean kinetic energy from the quantization rule `∮p dq = 2πħn`:
/// `⟨K⟩ = πnħ/τ`.
pub fn quantized_mean_kinetic(n: u32, period: f64) -> f64 {
    PI * f64::from(n) / period
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Resolvable,
    Unresolvable,
    /// The period does not depend on the level.
    PeriodBlind,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Resolvable => "resolvable",
            Verdict::Unresolvable => "unresolvable",
            Verdict::PeriodBlind => "period-blind",
        }
    }
}

/// One row of a threshold scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionPoint {
    pub n: u32,
    pub energy: f64,
    pub period: f64,
    pub delta_e: f64,
    pub delta_tau: f64,
    /// `|ΔE_n Δτ_n|` in units of ħ.
    pub y: f64,
    pub resolvable: bool,
}

impl CriterionPoint {
    pub fn verdict(&self) -> Verdict {
        if self.resolvable {
            Verdict::Resolvable
        } else {
            Verdict::Unresolvable
        }
    }
}

/// Evaluates the criterion at level `n` from raw energy and period differences.
pub fn criterion_point(model: &ModelParams, n: u32) -> Result<CriterionPoint> {
    model.validate()?;
    if let ModelParams::Harmonic(_) = model {
        return Err(Error::DegeneratePeriod { model: "harmonic" });
    }
    if n <= model.min_level() {
        return Err(Error::IndexOutOfSpectrum {
            model: model.name(),
            n,
            reason: format!("needs a lower neighbor, use n >= {}", model.min_level() + 1),
        });
    }
    let e = energy(model, n)?;
    let e_prev = energy(model, n - 1)?;
    let tau = period(model, n)?;
    let tau_prev = period(model, n - 1)?;
    let delta_e = 0.5 * (e - e_prev);
    let delta_tau = 0.5 * (tau - tau_prev);
    if delta_tau == 0.0 {
        return Err(Error::DegeneratePeriod {
            model: model.name(),
        });
    }
    let y = (delta_e * delta_tau).abs();
    Ok(CriterionPoint {
        n,
        energy: e,
        period: tau,
        delta_e,
        delta_tau,
        y,
        resolvable: y >= HALF_HBAR,
    })
}

/// Closed-form `y(n)` for the models that have one, written directly from the
/// level and period formulas rather than by differencing.
pub fn closed_form_y(model: &ModelParams, n: u32) -> Option<f64> {
    let nf = f64::from(n);
    match *model {
        ModelParams::Box(_) => Some(box_y(nf)),
        ModelParams::Hydrogenoid(_) => Some(
            PI * (2.0 * nf - 1.0) * (3.0 * nf * nf - 3.0 * nf + 1.0)
                / (4.0 * nf * nf * (nf - 1.0) * (nf - 1.0)),
        ),
        ModelParams::Quartic(q) => {
            let (w, l) = (q.omega, q.lambda);
            Some(
                PI * l * (w + l * (2.0 * nf - 1.0))
                    / ((w + 2.0 * l * (nf - 1.0)) * (w + 2.0 * l * nf)),
            )
        }
        _ => None,
    }
}

fn box_y(n: f64) -> f64 {
    PI * (2.0 * n - 1.0) / (4.0 * (n - 1.0) * n)
}

/// Asymptotes of the quartic `y(n)`: `πλ/ω` for weak nonlinearity and the
/// infinite-well value `π(2n−1)/(4(n−1)n)` for strong nonlinearity.
pub fn quartic_limits(model: &Quartic, n: u32) -> (f64, f64) {
    (PI * model.lambda / model.omega, box_y(f64::from(n)))
}

/// Pure two-level superposition `a|E_n⟩ + b|E_{n−1}⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub a: Complex64,
    pub b: Complex64,
    pub n: u32,
}

impl SuperpositionSpec {
    pub const NORM_TOLERANCE: f64 = 1e-9;

    pub fn new(a: Complex64, b: Complex64, n: u32) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { a, b, n })
    }
}

/// Energy spread `|a||b|(E_n − E_{n−1})` of the superposition.
pub fn superposition_delta_e(model: &ModelParams, s: &SuperpositionSpec) -> Result<f64> {
    let norm = s.a.norm_sqr() + s.b.norm_sqr();
    if (norm - 1.0).abs() > SuperpositionSpec::NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    if s.n <= model.min_level() {
        return Err(Error::IndexOutOfSpectrum {
            model: model.name(),
            n: s.n,
            reason: "needs a lower neighbor".into(),
        });
    }
    let gap = energy(model, s.n)? - energy(model, s.n - 1)?;
    Ok(s.a.norm() * s.b.norm() * gap)
}

/// Resolution product `δpδq = ħ²/(4(ħ(n+½) + |pq|))` needed to pin the
/// oscillator energy to `ħω/2` from simultaneous `q`, `p` readings. `(q, p)`
/// should lie near the classical orbit of `E_n`; this is not checked.
pub fn harmonic_dpdq(_model: &Harmonic, n: u32, q: f64, p: f64) -> f64 {
    0.25 / (f64::from(n) + 0.5 + (p * q).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub points: Vec<CriterionPoint>,
    /// Smallest scanned `n` with `y(n) < ħ/2`.
    pub first_unresolvable: Option<u32>,
    /// Every `n` whose verdict differs from that of `n − 1`.
    pub crossings: Vec<u32>,
}

/// Criterion rows for `n_min..=n_max`. Monotonicity of `y` is not assumed.
pub fn threshold_scan(model: &ModelParams, n_min: u32, n_max: u32) -> Result<ThresholdScan> {
    if n_min > n_max {
        return Err(Error::InvalidParameter(format!(
            "empty scan range {n_min}..={n_max}"
        )));
    }
    let points = (n_min..=n_max)
        .map(|n| criterion_point(model, n))
        .collect::<Result<Vec<_>>>()?;
    let first_unresolvable = points.iter().find(|p| !p.resolvable).map(|p| p.n);
    let crossings = points
        .windows(2)
        .filter(|w| w[0].resolvable != w[1].resolvable)
        .map(|w| w[1].n)
        .collect();
    Ok(ThresholdScan {
        points,
        first_unresolvable,
        crossings,
    })
}

/// Threshold usually quoted for the hydrogenoid atom.
pub const HYDROGENOID_QUOTED_THRESHOLD: u32 = 9;

/// Explains a hydrogenoid scan whose first unresolvable level is not the
/// quoted one.
pub fn discrepancy_note(model: &ModelParams, scan: &ThresholdScan) -> Option<String> {
    let ModelParams::Hydrogenoid(_) = model else {
        return None;
    };
    let quoted = HYDROGENOID_QUOTED_THRESHOLD;
    let found = scan.first_unresolvable?;
    if found == quoted {
        return None;
    }
    let y_at = |n: u32| scan.points.iter().find(|p| p.n == n).map(|p| p.y);
    let mut note = format!("first unresolvable level is n={found}, not the quoted n={quoted}");
    if let Some(y) = y_at(quoted) {
        note.push_str(&format!("; y({quoted}) = {y:.4} >= 0.5"));
    }
    if let Some(y) = y_at(found) {
        note.push_str(&format!("; y({found}) = {y:.4} < 0.5"));
    }
    Some(note)
}
