use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this `|Δ t|` the kernels are evaluated from their small-argument
/// expansion instead of the hyperbolic quotient.
pub const SMALL_ARGUMENT: f64 = 1e-6;

/// The pair of time-dependent kernels that generate the Fock mixture, and the
/// rate `Δ = sqrt((iλn + 2κ)² − 4κ²)` they are built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub gamma: Complex64,
    pub zeta: Complex64,
    pub delta: Complex64,
}

fn check_inputs(t: f64, kappa: f64, lambda: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time must be >= 0, got {t}"
        )));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kappa must be > 0, got {kappa}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    Ok(())
}

/// `exp(w) - 1` without cancellation near `w = 0`.
fn expm1(w: Complex64) -> Complex64 {
    let half_sin = (0.5 * w.im).sin();
    let re = w.re.exp_m1() * w.im.cos() - 2.0 * half_sin * half_sin;
    let im = w.re.exp() * w.im.sin();
    Complex64::new(re, im)
}

/// Evaluates
///
/// ```text
/// γ(n,t) = 2κ sinh(Δt) / [Δ cosh(Δt) + (iλn + 2κ) sinh(Δt)]
/// ζ(n,t) = Δ          / [Δ cosh(Δt) + (iλn + 2κ) sinh(Δt)]
/// ```
///
/// Both kernels depend on `Δ` only through `Δ²` (the quotients are even in
/// `Δ`), so the branch of the square root is immaterial. For `|Δt|` below
/// [`SMALL_ARGUMENT`] the expansion `sinh(Δt)/Δ = t(1 + z²/6 + z⁴/120)`,
/// `cosh(Δt) = 1 + z²/2 + z⁴/24` with `z = Δt` is used; at `n = 0` this is
/// exactly `γ = 2κt/(1+2κt)`, `ζ = 1/(1+2κt)`.
pub fn kernel(n: u32, t: f64, kappa: f64, lambda: f64) -> Result<KernelValue> {
    check_inputs(t, kappa, lambda)?;
    let ln = lambda * f64::from(n);
    let c = Complex64::new(2.0 * kappa, ln);
    // (iλn + 2κ)² − 4κ² = iλn (iλn + 4κ), written out to avoid cancelling 4κ².
    let delta_sq = Complex64::new(-ln * ln, 4.0 * ln * kappa);
    let delta = delta_sq.sqrt();
    let z_sq = delta_sq * (t * t);
    if z_sq.norm() < SMALL_ARGUMENT * SMALL_ARGUMENT {
        let z4 = z_sq * z_sq;
        let sinh_over_delta = (1.0 + z_sq / 6.0 + z4 / 120.0) * t;
        let cosh = 1.0 + z_sq / 2.0 + z4 / 24.0;
        let den = cosh + c * sinh_over_delta;
        return Ok(KernelValue {
            gamma: 2.0 * kappa * sinh_over_delta / den,
            zeta: den.inv(),
            delta,
        });
    }
    Ok(quotient(delta, c, kappa, t))
}

/// Direct quotient for an explicitly supplied `Δ` and `c = iλn + 2κ`.
///
/// This is the branch [`kernel`] takes away from `Δt = 0`; it is exposed so the
/// switch between the two evaluation paths can be probed with a surrogate `Δ`.
pub fn kernel_from_delta(
    delta: Complex64,
    c: Complex64,
    kappa: f64,
    t: f64,
) -> Result<KernelValue> {
    check_inputs(t, kappa, 0.0)?;
    let delta = if delta.re < 0.0 { -delta } else { delta };
    Ok(quotient(delta, c, kappa, t))
}

/// Rescaled by `e^{-Δt}` so no intermediate overflows when `Re(Δ) t` is large.
/// Requires `Re(Δ) >= 0`.
fn quotient(delta: Complex64, c: Complex64, kappa: f64, t: f64) -> KernelValue {
    let z = delta * t;
    let one_minus_e = -expm1(-2.0 * z);
    let one_plus_e = 2.0 - one_minus_e;
    let den = delta * one_plus_e + c * one_minus_e;
    KernelValue {
        gamma: 2.0 * kappa * one_minus_e / den,
        zeta: 2.0 * delta * (-z).exp() / den,
        delta,
    }
}

/// `(ln γ(0,t), ln ζ(0,t))` for the real `n = 0` kernels, computed from
/// `x = 2κt` with `ln_1p` so early times keep full relative accuracy.
/// At `t = 0` the first entry is `-inf`.
pub fn kernel_n0_logs(kappa: f64, t: f64) -> Result<(f64, f64)> {
    check_inputs(t, kappa, 0.0)?;
    let x = 2.0 * kappa * t;
    let ln_1p = x.ln_1p();
    Ok((x.ln() - ln_1p, -ln_1p))
}
