//! Checks against independent exact or high-precision evaluations.
//!
//! The mixture kernels at `n = 0` are rational whenever `κt` is, so the Fock
//! populations have exact rational values. The general-`n` kernels are even in
//! `Δ`, so `sinh(Δt)/Δ` and `cosh(Δt)` are power series in the rational
//! `Δ²t²` and can be summed exactly as well.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qclassical_core::numerics::{kernel, kernel_from_delta, log_factorial, sum_adaptive};
use qclassical_core::open_system::moments;
use qclassical_core::{fock_weight, DiffusiveConfig, SeriesTolerance};

use num_complex::Complex64;

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_u64().unwrap() as f64;
    }
    let shift = bits - 60;
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn log_factorial_matches_big_integer_factorials() {
    let mut worst = 0.0f64;
    for k in [
        2u64, 7, 20, 21, 22, 30, 50, 100, 170, 171, 500, 1000, 5000, 20000,
    ] {
        let f = factorial(k);
        let exact = if k <= 20 {
            (f.to_u64().unwrap() as f64).ln()
        } else {
            ln_big(&f)
        };
        let got = log_factorial(k);
        let rel = ((got - exact) / exact).abs();
        worst = worst.max(rel);
        assert!(rel <= 1e-12, "k={k}: {got} vs {exact} (rel {rel:e})");
    }
    // 170! is the largest factorial representable in f64.
    let direct = factorial(170).to_f64().unwrap().ln();
    assert!(((log_factorial(170) - direct) / direct).abs() <= 1e-12);
    println!("log_factorial worst relative error {worst:e}");
}

#[derive(Clone)]
struct CRat {
    re: BigRational,
    im: BigRational,
}

impl CRat {
    fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }
    fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }
    fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn scale(&self, s: &BigRational) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }
    fn div(&self, o: &Self) -> Self {
        let d = &o.re * &o.re + &o.im * &o.im;
        Self::new(
            (&self.re * &o.re + &self.im * &o.im) / &d,
            (&self.im * &o.re - &self.re * &o.im) / &d,
        )
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

/// γ and ζ from the hyperbolic quotient, with `sinh(Δt)/Δ` and `cosh(Δt)`
/// summed as exact power series in `Δ²t²`.
fn kernel_oracle(
    n: i64,
    t: BigRational,
    kappa: BigRational,
    lambda: BigRational,
) -> (Complex64, Complex64) {
    let two = rat(2, 1);
    let c = CRat::new(&two * &kappa, &lambda * BigRational::from_integer(n.into()));
    let four_k2 = CRat::real(rat(4, 1) * &kappa * &kappa);
    let delta_sq = c.mul(&c).add(&four_k2.scale(&rat(-1, 1)));
    let z2 = delta_sq.scale(&(&t * &t));
    let mut power = CRat::real(BigRational::one());
    let mut sinh_over = CRat::real(BigRational::zero());
    let mut cosh = CRat::real(BigRational::zero());
    let mut fact_even = BigRational::one();
    for k in 0..60i64 {
        if k > 0 {
            fact_even *= rat((2 * k - 1) * (2 * k), 1);
        }
        let fact_odd = &fact_even * rat(2 * k + 1, 1);
        cosh = cosh.add(&power.scale(&(BigRational::one() / &fact_even)));
        sinh_over = sinh_over.add(&power.scale(&(&t / &fact_odd)));
        power = power.mul(&z2);
    }
    let den = cosh.add(&c.mul(&sinh_over));
    let gamma = sinh_over.scale(&(&two * &kappa)).div(&den);
    let zeta = CRat::real(BigRational::one()).div(&den);
    (gamma.to_c64(), zeta.to_c64())
}

#[test]
fn kernel_matches_exact_series_for_n3() {
    let (g, z) = kernel_oracle(3, rat(7, 10), rat(1, 2), rat(1, 1));
    let k = kernel(3, 0.7, 0.5, 1.0).unwrap();
    println!(
        "n=3 t=0.7 kappa=0.5 lambda=1: gamma={} zeta={}",
        k.gamma, k.zeta
    );
    assert!(
        (k.gamma - g).norm() <= 1e-10 * g.norm(),
        "{} vs {g}",
        k.gamma
    );
    assert!((k.zeta - z).norm() <= 1e-10 * z.norm(), "{} vs {z}", k.zeta);
}

#[test]
fn kernel_matches_exact_series_elsewhere() {
    for &(n, tn, td, kn, kd, ln, ld) in &[
        (1i64, 3i64, 2i64, 1i64, 1i64, 2i64, 1i64),
        (5, 1, 10, 3, 1, 1, 2),
        (10, 2, 1, 1, 4, 1, 1),
        (0, 5, 1, 1, 1, 1, 1),
    ] {
        let (g, z) = kernel_oracle(n, rat(tn, td), rat(kn, kd), rat(ln, ld));
        let k = kernel(
            n as u32,
            tn as f64 / td as f64,
            kn as f64 / kd as f64,
            ln as f64 / ld as f64,
        )
        .unwrap();
        assert!(
            (k.gamma - g).norm() <= 1e-10 * g.norm(),
            "n={n}: {} vs {g}",
            k.gamma
        );
        assert!(
            (k.zeta - z).norm() <= 1e-10 * z.norm(),
            "n={n}: {} vs {z}",
            k.zeta
        );
    }
}

#[test]
fn kernel_branches_agree_near_zero_delta() {
    let kappa = 1.0;
    let c = Complex64::new(2.0 * kappa, 0.0);
    for kt in [0.01, 0.1, 1.0, 10.0] {
        let t = kt / kappa;
        let limit = kernel(0, t, kappa, 1.0).unwrap();
        let direct = kernel_from_delta(Complex64::new(1e-6 * kappa, 0.0), c, kappa, t).unwrap();
        assert!(
            (limit.gamma - direct.gamma).norm() <= 1e-8 * limit.gamma.norm(),
            "kt={kt}"
        );
        assert!(
            (limit.zeta - direct.zeta).norm() <= 1e-8 * limit.zeta.norm(),
            "kt={kt}"
        );
        // ζ/(1−γ) = 1 for the n = 0 kernels.
        let seed = limit.zeta.re / (1.0 - limit.gamma.re);
        assert!((seed - 1.0).abs() <= 1e-12, "kt={kt}");
    }
}

/// `ρ(t,b)` coefficient of `|n⟩⟨n|`, summing the (p, l) pairs with `p + l = n`.
fn population_oracle(b: u64, n: u64, x: &BigRational) -> BigRational {
    let gamma = x / (BigRational::one() + x);
    let zeta = BigRational::one() / (BigRational::one() + x);
    let fi = |k: u64| BigRational::from_integer(BigInt::from(factorial(k)));
    let pow = |base: &BigRational, e: u64| (0..e).fold(BigRational::one(), |acc, _| acc * base);
    let mut total = BigRational::zero();
    for p in 0..=b {
        for l in 0..=n {
            if p + l != n {
                continue;
            }
            let coeff = fi(b) * fi(p + l) / (fi(p) * fi(p) * fi(l) * fi(b - p));
            total += coeff * pow(&gamma, b + l - p) * pow(&zeta, 2 * p + 1);
        }
    }
    total
}

#[test]
fn populations_match_exact_rationals() {
    // κt ∈ {0.01, 0.1, 1}  ⇒  x = 2κt ∈ {1/50, 1/5, 2}.
    let grid = [(0.01, rat(1, 50)), (0.1, rat(1, 5)), (1.0, rat(2, 1))];
    let mut worst = 0.0f64;
    for b in 0..=5u64 {
        let cfg = DiffusiveConfig::new(b as usize, 1.0, 1.0, 1.0).unwrap();
        for (kt, x) in &grid {
            for n in 0..=20u64 {
                let exact = to_f64(&population_oracle(b, n, x));
                let got = fock_weight(&cfg, n as usize, *kt).unwrap();
                let rel = ((got - exact) / exact).abs();
                worst = worst.max(rel);
                assert!(rel <= 1e-10, "b={b} kt={kt} n={n}: {got} vs {exact}");
            }
        }
    }
    println!("population worst relative error {worst:e}");
}

#[test]
fn mean_number_matches_exact_partial_sum() {
    // b = 1, κt = 0.5 ⇒ γ = ζ = 1/2. The exact partial sum to n = 400 leaves
    // a tail below 1e-100.
    let x = rat(1, 1);
    let mut exact = BigRational::zero();
    for n in 0..=400u64 {
        exact += population_oracle(1, n, &x) * BigRational::from_integer(n.into());
    }
    let cfg = DiffusiveConfig::new(1, 1.0, 1.0, 1.0).unwrap();
    let got = moments(&cfg, 0.5).unwrap().mean_n;
    let exact = to_f64(&exact);
    assert!((got - exact).abs() <= 1e-10 * exact, "{got} vs {exact}");
    assert!((exact - 2.0).abs() < 1e-12);
}

#[test]
fn adaptive_sum_is_within_its_tail_of_a_longer_sum() {
    let tol = SeriesTolerance::default();
    let term = |l: usize| (l as f64 + 1.0) * 0.9f64.powi(l as i32);
    let s = sum_adaptive(term, &tol).unwrap();
    let long: f64 = (0..10 * s.terms_used).map(term).sum();
    assert!(
        (long - s.value).abs() <= s.tail_bound * (1.0 + 1e-9),
        "{s:?} vs {long}"
    );
    assert!((s.value - 100.0).abs() <= 100.0 * 1e-9);
    println!(
        "ratio->0.9 series: {} terms, tail {:e}",
        s.terms_used, s.tail_bound
    );
}

#[test]
fn vacuum_series_sums_to_one() {
    let tol = SeriesTolerance::default();
    for kt in [1e-3, 0.3, 5.0, 80.0] {
        let k = kernel(0, kt, 1.0, 1.0).unwrap();
        let (g, z) = (k.gamma.re, k.zeta.re);
        let s = sum_adaptive(|l| g.powi(l as i32) * z, &tol).unwrap();
        assert!((s.value - 1.0).abs() <= 1e-9, "kt={kt}: {}", s.value);
    }
}
