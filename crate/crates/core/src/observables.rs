//! Time-dependent observables of the diffusive Fock evolution: survival,
//! neighbor fidelity, Fock and energy moments, and the environment-averaged
//! criterion `⟨y(b)⟩ = |⟨ΔE_b⟩⟨Δτ_b⟩|`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{kernel_n0_logs, log_factorial, sum_adaptive};
use crate::open_system::{distribution, moments, DiffusiveConfig, FockWeights, LogSumExp};

/// Logarithmically spaced grid in `κt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KtGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for KtGrid {
    fn default() -> Self {
        Self {
            start: 1e-3,
            stop: 1e2,
            points: 200,
        }
    }
}

impl KtGrid {
    pub fn log(start: f64, stop: f64, points: usize) -> Result<Self> {
        if !(start > 0.0 && start.is_finite() && stop.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must be positive and finite, got {start}..{stop}"
            )));
        }
        if points == 0 || (points > 1 && stop <= start) || (points == 1 && stop < start) {
            return Err(Error::InvalidParameter(format!(
                "grid needs start < stop and at least one point, got {start}..{stop} x {points}"
            )));
        }
        Ok(Self {
            start,
            stop,
            points,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let (a, b) = (self.start.log10(), self.stop.log10());
        let step = (b - a) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| match i {
                0 => self.start,
                i if i == self.points - 1 => self.stop,
                i => 10f64.powf(a + step * i as f64),
            })
            .collect()
    }
}

impl FromStr for KtGrid {
    type Err = Error;

    /// `log:START:STOP:POINTS`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!(
                "grid must look like log:START:STOP:POINTS, got {s:?}"
            ))
        };
        let mut parts = s.split(':');
        if parts.next() != Some("log") {
            return Err(bad());
        }
        let start = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let stop = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let points = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Self::log(start, stop, points)
    }
}

impl fmt::Display for KtGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "log:{}:{}:{}", self.start, self.stop, self.points)
    }
}

/// A `κt → value` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, kt: f64, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{}: non-finite value at kt={kt}",
                self.label
            )));
        }
        if let Some(&(last, _)) = self.points.last() {
            if kt <= last {
                return Err(Error::InvalidParameter(format!(
                    "{}: kt must increase, {kt} after {last}",
                    self.label
                )));
            }
        }
        self.points.push((kt, value));
        Ok(())
    }
}

fn check_neighbors(cfg_b: &DiffusiveConfig, cfg_bm1: &DiffusiveConfig) -> Result<()> {
    if cfg_b.b == 0 || cfg_bm1.b + 1 != cfg_b.b {
        return Err(Error::MismatchedConfig(format!(
            "initial indices {} and {} are not neighbors",
            cfg_b.b, cfg_bm1.b
        )));
    }
    for (name, x, y) in [
        ("kappa", cfg_b.kappa, cfg_bm1.kappa),
        ("omega", cfg_b.omega, cfg_bm1.omega),
        ("lambda", cfg_b.lambda, cfg_bm1.lambda),
    ] {
        if x != y {
            return Err(Error::MismatchedConfig(format!("{name}: {x} vs {y}")));
        }
    }
    Ok(())
}

/// `F(b,t) = Tr[ρ(t,b) ρ(t,b−1)] = Σ_n P_b(n,t) P_{b−1}(n,t)`.
///
/// Both states are diagonal, so the trace is a plain overlap of populations.
/// Both distributions are summed out to the larger of their cuts; what is
/// left is bounded by the product of the two tails.
pub fn fidelity_overlap(cfg_b: &DiffusiveConfig, cfg_bm1: &DiffusiveConfig, t: f64) -> Result<f64> {
    check_neighbors(cfg_b, cfg_bm1)?;
    let upper = distribution(cfg_b, t)?;
    let lower = distribution(cfg_bm1, t)?;
    let n_max = upper.n_cut.max(lower.n_cut);
    let fw_upper = FockWeights::new(cfg_b, t)?;
    let fw_lower = FockWeights::new(cfg_bm1, t)?;
    let at = |d: &crate::FockDistribution, fw: &FockWeights, n: usize| {
        d.weights
            .get(n)
            .copied()
            .unwrap_or_else(|| fw.weight(n).max(0.0))
    };
    let f: f64 = (0..=n_max)
        .map(|n| at(&upper, &fw_upper, n) * at(&lower, &fw_lower, n))
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Evaluates the triple sum
///
/// ```text
/// F(b,t) = Σ_{l≥0} Σ_{p=0}^{b} Σ_{p'=0}^{min(b−1,p+l)}
///     b((b−1)!)² ((p+l)!)² / ((p'!)² (p!)² l! (b−p)! (p+l−p')! (b−p'−1)!)
///     · γ^{2b+2l−2p'−1}(0,t) ζ^{2(p+p')+2}(0,t)
/// ```
///
/// term by term, with an adaptive cut in `l`. This is an independent route to
/// [`fidelity_overlap`] used to audit the expression.
pub fn fidelity_closed_form(cfg_b: &DiffusiveConfig, t: f64) -> Result<f64> {
    cfg_b.validate()?;
    let b = cfg_b.b;
    if b == 0 {
        return Err(Error::InvalidParameter("fidelity needs b >= 1".into()));
    }
    let (ln_g, ln_z) = kernel_n0_logs(cfg_b.kappa, t)?;
    let lf = |k: usize| log_factorial(k as u64);
    let head = (b as f64).ln() + 2.0 * lf(b - 1);
    let s = sum_adaptive(
        |l| {
            let mut acc = LogSumExp::default();
            for p in 0..=b {
                let common = head + 2.0 * lf(p + l) - 2.0 * lf(p) - lf(l) - lf(b - p);
                for q in 0..=(b - 1).min(p + l) {
                    let gamma_pow = (2 * b + 2 * l - 2 * q - 1) as f64;
                    let zeta_pow = (2 * (p + q) + 2) as f64;
                    acc.push(
                        common - 2.0 * lf(q) - lf(p + l - q) - lf(b - q - 1)
                            + gamma_pow * ln_g
                            + zeta_pow * ln_z,
                    );
                }
            }
            acc.value()
        },
        &cfg_b.tol,
    )?;
    Ok(s.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditVerdict {
    /// The triple sum reproduces the overlap.
    Matches,
    /// The triple sum disagrees; the overlap is authoritative.
    TypoFinding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityAudit {
    pub b: usize,
    pub kt: f64,
    pub overlap: f64,
    pub closed_form: f64,
    pub abs_diff: f64,
    pub verdict: AuditVerdict,
}

impl FidelityAudit {
    pub const TOLERANCE: f64 = 1e-8;
}

pub fn fidelity_audit(cfg_b: &DiffusiveConfig, t: f64) -> Result<FidelityAudit> {
    let overlap = fidelity_overlap(cfg_b, &cfg_b.lower_neighbor()?, t)?;
    let closed_form = fidelity_closed_form(cfg_b, t)?;
    let abs_diff = (overlap - closed_form).abs();
    Ok(FidelityAudit {
        b: cfg_b.b,
        kt: cfg_b.kappa * t,
        overlap,
        closed_form,
        abs_diff,
        verdict: if abs_diff <= FidelityAudit::TOLERANCE {
            AuditVerdict::Matches
        } else {
            AuditVerdict::TypoFinding
        },
    })
}

/// Probability `P_b(b,t)` of still finding the initial level.
pub fn survival(cfg: &DiffusiveConfig, t: f64) -> Result<f64> {
    Ok(FockWeights::new(cfg, t)?.weight(cfg.b))
}

/// `Σ_n P_b(n,t)²`.
pub fn purity(cfg: &DiffusiveConfig, t: f64) -> Result<f64> {
    Ok(distribution(cfg, t)?.purity())
}

/// `⟨N̂⟩ = Σ n P_b(n,t)`.
pub fn mean_n(cfg: &DiffusiveConfig, t: f64) -> Result<f64> {
    Ok(moments(cfg, t)?.mean_n)
}

/// `⟨Ĥ0⟩ = Σ (ωn + λn²) P_b(n,t)`.
pub fn mean_h0(cfg: &DiffusiveConfig, t: f64) -> Result<f64> {
    let m = moments(cfg, t)?;
    Ok(cfg.omega * m.mean_n + cfg.lambda * m.mean_n2)
}

/// `⟨τ⟩ ≈ 2π⟨N̂⟩/⟨Ĥ0⟩`.
pub fn mean_tau(cfg: &DiffusiveConfig, t: f64) -> Result<f64> {
    let m = moments(cfg, t)?;
    tau_from(cfg, m.mean_n, cfg.omega * m.mean_n + cfg.lambda * m.mean_n2)
}

fn tau_from(_cfg: &DiffusiveConfig, mean_n: f64, mean_h0: f64) -> Result<f64> {
    if mean_h0 <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    Ok(TAU * mean_n / mean_h0)
}

/// One point of the `⟨y(b)⟩` curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YMeanPoint {
    pub kt: f64,
    pub mean_n_b: f64,
    pub mean_n_bm1: f64,
    pub mean_h0_b: f64,
    pub mean_h0_bm1: f64,
    pub mean_tau_b: f64,
    pub mean_tau_bm1: f64,
    /// `(⟨Ĥ0(b)⟩ − ⟨Ĥ0(b−1)⟩)/2`
    pub delta_e: f64,
    /// `(⟨τ_b⟩ − ⟨τ_{b−1}⟩)/2`
    pub delta_tau: f64,
    /// `|ΔE · Δτ|` in units of ħ.
    pub y_mean: f64,
    /// `ΔE · Δτ` with its sign.
    pub y_signed: f64,
}

/// `⟨y(b)⟩` at a single `κt`.
pub fn mean_y_point(cfg_b: &DiffusiveConfig, kt: f64) -> Result<YMeanPoint> {
    let cfg_bm1 = cfg_b.lower_neighbor()?;
    let t = cfg_b.time_at(kt);
    let mb = moments(cfg_b, t)?;
    let mbm1 = moments(&cfg_bm1, t)?;
    let h0 =
        |m: &crate::open_system::FockMoments| cfg_b.omega * m.mean_n + cfg_b.lambda * m.mean_n2;
    let (h_b, h_bm1) = (h0(&mb), h0(&mbm1));
    let tau_b = tau_from(cfg_b, mb.mean_n, h_b)?;
    let tau_bm1 = tau_from(cfg_b, mbm1.mean_n, h_bm1)?;
    let delta_e = 0.5 * (h_b - h_bm1);
    let delta_tau = 0.5 * (tau_b - tau_bm1);
    let y_signed = delta_e * delta_tau;
    Ok(YMeanPoint {
        kt,
        mean_n_b: mb.mean_n,
        mean_n_bm1: mbm1.mean_n,
        mean_h0_b: h_b,
        mean_h0_bm1: h_bm1,
        mean_tau_b: tau_b,
        mean_tau_bm1: tau_bm1,
        delta_e,
        delta_tau,
        y_mean: y_signed.abs(),
        y_signed,
    })
}

/// `⟨y(b)⟩` over a `κt` grid.
pub fn mean_y_series(cfg_b: &DiffusiveConfig, grid: &KtGrid) -> Result<Vec<YMeanPoint>> {
    if cfg_b.b == 0 {
        return Err(Error::InvalidParameter(
            "the averaged criterion needs b >= 1".into(),
        ));
    }
    grid.values()
        .into_iter()
        .map(|kt| mean_y_point(cfg_b, kt))
        .collect()
}

/// First `κt` at which `⟨y⟩` has dropped to half of its value at the first
/// grid point, interpolated linearly in `log κt`.
pub fn half_decay_kt(series: &[YMeanPoint]) -> Option<f64> {
    let y0 = series.first()?.y_mean;
    let target = 0.5 * y0;
    let i = series.iter().position(|p| p.y_mean <= target)?;
    if i == 0 {
        return Some(series[0].kt);
    }
    let (a, b) = (&series[i - 1], &series[i]);
    let frac = (a.y_mean - target) / (a.y_mean - b.y_mean);
    let (la, lb) = (a.kt.ln(), b.kt.ln());
    Some((la + frac * (lb - la)).exp())
}
