use std::f64::consts::TAU;

const EXACT_FACTORIALS: [u64; 21] = [
    1,
    1,
    2,
    6,
    24,
    120,
    720,
    5040,
    40320,
    362880,
    3628800,
    39916800,
    479001600,
    6227020800,
    87178291200,
    1307674368000,
    20922789888000,
    355687428096000,
    6402373705728000,
    121645100408832000,
    2432902008176640000,
];

/// Natural logarithm of `k!`.
///
/// Exact table up to `k = 20`, Stirling series with four correction terms
/// above. The first omitted correction is below `1e-15` at `k = 21` and
/// shrinks as `k^-9`.
pub fn log_factorial(k: u64) -> f64 {
    if let Some(&f) = EXACT_FACTORIALS.get(k as usize) {
        return (f as f64).ln();
    }
    let x = k as f64;
    let inv = x.recip();
    let inv2 = inv * inv;
    let correction =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (TAU * x).ln() + correction
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}
