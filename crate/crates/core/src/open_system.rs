//! Quartic oscillator prepared in a Fock state `|b⟩` and left in contact with
//! a diffusive bath.
//!
//! The evolved state stays diagonal in the Fock basis:
//!
//! ```text
//! ρ(t,b) = Σ_{l≥0} Σ_{p=0}^{b} b!(p+l)! / ((p!)² l! (b−p)!)
//!          · γ(0,t)^{b+l−p} ζ(0,t)^{2p+1} |p+l⟩⟨p+l|
//! ```
//!
//! Collecting `n = p + l` gives each population as a finite sum over `p`:
//!
//! ```text
//! P_b(n,t) = Σ_{p=0}^{min(b,n)} b! n! / ((p!)² (n−p)! (b−p)!) · γ^{b+n−2p} ζ^{2p+1}
//! ```
//!
//! with `γ = 2κt/(1+2κt)` and `ζ = 1/(1+2κt)`. Only `κt` enters; `ω` and `λ`
//! are carried for the energy observables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    kernel, kernel_n0_logs, log_factorial, sum_adaptive_bounded, SeriesTolerance,
};

/// Weights above this magnitude below zero are treated as a bug rather than
/// rounding.
const NEGATIVE_WEIGHT_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusiveConfig {
    /// Initial Fock index.
    pub b: usize,
    pub kappa: f64,
    pub omega: f64,
    pub lambda: f64,
    pub tol: SeriesTolerance,
}

impl DiffusiveConfig {
    pub fn new(b: usize, kappa: f64, omega: f64, lambda: f64) -> Result<Self> {
        let cfg = Self {
            b,
            kappa,
            omega,
            lambda,
            tol: SeriesTolerance::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tolerance(mut self, tol: SeriesTolerance) -> Result<Self> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    /// Same bath and Hamiltonian, initial index `b − 1`.
    pub fn lower_neighbor(&self) -> Result<Self> {
        if self.b == 0 {
            return Err(Error::InvalidParameter(
                "b = 0 has no lower neighbor".into(),
            ));
        }
        Ok(Self {
            b: self.b - 1,
            ..*self
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        for (name, v) in [("omega", self.omega), ("lambda", self.lambda)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        self.tol.validate()
    }

    /// Time for a given `κt`.
    pub fn time_at(&self, kt: f64) -> f64 {
        kt / self.kappa
    }
}

/// Fock populations `P_b(n,t)` for `n = 0..=n_cut`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDistribution {
    pub t: f64,
    /// Index `n` holds `P_b(n,t)`.
    pub weights: Vec<f64>,
    pub n_cut: usize,
    /// Bound on the probability carried by `n > n_cut`.
    pub tail_bound: f64,
    /// Number of tiny negative rounding residues that were set to zero.
    pub clipped: usize,
}

impl FockDistribution {
    pub fn weight(&self, n: usize) -> f64 {
        self.weights.get(n).copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn purity(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }
}

/// Streaming `ln Σ exp(v_i)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub(crate) fn push(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.max {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        } else {
            self.scaled += (v - self.max).exp();
        }
    }

    /// `Σ exp(v_i)`.
    pub(crate) fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            0.0
        } else {
            self.max.exp() * self.scaled
        }
    }
}

/// Log-space evaluator of `P_b(n,t)` at one fixed time.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FockWeights {
    b: usize,
    ln_gamma: f64,
    ln_zeta: f64,
    gamma: f64,
    ln_b_fact: f64,
}

impl FockWeights {
    pub(crate) fn new(cfg: &DiffusiveConfig, t: f64) -> Result<Self> {
        cfg.validate()?;
        // Real kernels at n = 0; logs taken from 2κt directly.
        let k = kernel(0, t, cfg.kappa, cfg.lambda)?;
        let (ln_gamma, ln_zeta) = kernel_n0_logs(cfg.kappa, t)?;
        Ok(Self {
            b: cfg.b,
            ln_gamma,
            ln_zeta,
            gamma: k.gamma.re,
            ln_b_fact: log_factorial(cfg.b as u64),
        })
    }

    pub(crate) fn weight(&self, n: usize) -> f64 {
        let b = self.b;
        let ln_n_fact = log_factorial(n as u64);
        let mut acc = LogSumExp::default();
        for p in 0..=b.min(n) {
            let gamma_pow = (b + n - 2 * p) as f64;
            let zeta_pow = (2 * p + 1) as f64;
            let mut v = self.ln_b_fact + ln_n_fact
                - 2.0 * log_factorial(p as u64)
                - log_factorial((n - p) as u64)
                - log_factorial((b - p) as u64)
                + zeta_pow * self.ln_zeta;
            // γ = 0 at t = 0; a zero power then contributes a factor of one.
            if gamma_pow > 0.0 {
                v += gamma_pow * self.ln_gamma;
            }
            acc.push(v);
        }
        acc.value()
    }

    /// Bound on `P(j+1)/P(j)` valid for all `j >= n`, once `n >= b`: every
    /// term of the `p`-sum grows by `γ(n+1)/(n+1−p) <= γ(n+1)/(n+1−b)`, and
    /// that factor decreases with `n`.
    pub(crate) fn ratio_bound(&self, n: usize) -> Option<f64> {
        if n < self.b {
            return None;
        }
        let r = self.gamma * (n + 1) as f64 / (n + 1 - self.b) as f64;
        (r < 1.0).then_some(r)
    }
}

/// Population `P_b(n,t)` of level `n` at time `t`.
pub fn fock_weight(cfg: &DiffusiveConfig, n: usize, t: f64) -> Result<f64> {
    Ok(FockWeights::new(cfg, t)?.weight(n))
}

/// All populations up to an adaptively chosen cut whose certified tail is at
/// most `cfg.tol.rel_eps`.
pub fn distribution(cfg: &DiffusiveConfig, t: f64) -> Result<FockDistribution> {
    let fw = FockWeights::new(cfg, t)?;
    let mut weights = Vec::with_capacity(cfg.b + 1);
    let mut clipped = 0usize;
    let sum = sum_adaptive_bounded(
        |n| {
            let mut w = fw.weight(n);
            if w < 0.0 {
                debug_assert!(w > -NEGATIVE_WEIGHT_SLACK);
                clipped += 1;
                w = 0.0;
            }
            weights.push(w);
            w
        },
        |n| fw.ratio_bound(n),
        &cfg.tol,
    )?;
    let n_cut = weights.len() - 1;
    debug_assert!(n_cut >= cfg.b);
    Ok(FockDistribution {
        t,
        weights,
        n_cut,
        tail_bound: sum.tail_bound,
        clipped,
    })
}

/// First and second Fock moments with certified tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockMoments {
    pub mean_n: f64,
    pub mean_n2: f64,
    pub tail_n: f64,
    pub tail_n2: f64,
}

/// `Σ n P_b(n,t)` and `Σ n² P_b(n,t)`.
pub fn moments(cfg: &DiffusiveConfig, t: f64) -> Result<FockMoments> {
    let fw = FockWeights::new(cfg, t)?;
    let first = moment(&fw, 1, &cfg.tol)?;
    let second = moment(&fw, 2, &cfg.tol)?;
    Ok(FockMoments {
        mean_n: first.0,
        mean_n2: second.0,
        tail_n: first.1,
        tail_n2: second.1,
    })
}

fn moment(fw: &FockWeights, power: i32, tol: &SeriesTolerance) -> Result<(f64, f64)> {
    let s = sum_adaptive_bounded(
        |n| (n as f64).powi(power) * fw.weight(n).max(0.0),
        |n| {
            if n == 0 {
                return None;
            }
            let growth = ((n + 1) as f64 / n as f64).powi(power);
            fw.ratio_bound(n).map(|r| r * growth).filter(|&r| r < 1.0)
        },
        tol,
    )?;
    Ok((s.value, s.tail_bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(b: usize) -> DiffusiveConfig {
        DiffusiveConfig::new(b, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn delta_at_time_zero() {
        for b in [0usize, 1, 4, 15] {
            let d = distribution(&cfg(b), 0.0).unwrap();
            assert_eq!(d.n_cut, b);
            for n in 0..=b + 3 {
                let expected = if n == b { 1.0 } else { 0.0 };
                assert!((fock_weight(&cfg(b), n, 0.0).unwrap() - expected).abs() < 1e-15);
            }
            assert_eq!(d.tail_bound, 0.0);
        }
    }

    #[test]
    fn vacuum_spreads_geometrically() {
        let c = cfg(0);
        for kt in [1e-3f64, 0.1, 1.0, 30.0] {
            let x = 2.0 * kt;
            let g: f64 = x / (1.0 + x);
            for n in [0usize, 1, 5, 40] {
                let expected = g.powi(n as i32) * (1.0 - g);
                let w = fock_weight(&c, n, kt).unwrap();
                assert!(
                    (w - expected).abs() <= 1e-13 * expected.max(1e-300),
                    "{kt} {n}"
                );
            }
            let d = distribution(&c, kt).unwrap();
            assert!((d.trace() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn early_survival_of_high_fock_state() {
        let d = distribution(&cfg(15), 1e-3).unwrap();
        assert!(d.weight(15) >= 0.9);
        assert!(d.n_cut >= 15);
    }

    #[test]
    fn long_time_depletes_initial_level() {
        let c = cfg(1);
        let w_mid = fock_weight(&c, 1, 1.0).unwrap();
        let w_late = fock_weight(&c, 1, 1e4).unwrap();
        assert!(w_late < w_mid);
        assert!(w_late < 1e-4);
    }

    #[test]
    fn mean_grows_linearly() {
        // Σ n P_b(n,t) = b + 2κt for this mixture.
        for b in [0usize, 1, 3, 10] {
            for kt in [0.0, 0.01, 0.5, 7.0] {
                let m = moments(&cfg(b), kt).unwrap();
                let expected = b as f64 + 2.0 * kt;
                assert!(
                    (m.mean_n - expected).abs() <= 1e-9 * expected.max(1.0),
                    "{b} {kt}"
                );
            }
        }
    }

    #[test]
    fn lower_neighbor() {
        assert_eq!(cfg(3).lower_neighbor().unwrap().b, 2);
        assert!(cfg(0).lower_neighbor().is_err());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(DiffusiveConfig::new(1, 0.0, 1.0, 1.0).is_err());
        assert!(DiffusiveConfig::new(1, 1.0, -1.0, 1.0).is_err());
        assert!(fock_weight(&cfg(1), 0, -1.0).is_err());
    }

    #[test]
    fn tight_cap_is_non_convergent() {
        let tol = SeriesTolerance::new(1e-10, 20, 0.999_999).unwrap();
        let c = cfg(2).with_tolerance(tol).unwrap();
        assert!(matches!(
            distribution(&c, 50.0),
            Err(Error::NonConvergent { .. })
        ));
    }
}
