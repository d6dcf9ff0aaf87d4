use std::ops::Add;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping rule for infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTolerance {
    /// Relative size of the certified tail at which summation stops.
    pub rel_eps: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
    /// The terminal ratio must fall below this before a geometric tail bound
    /// is trusted.
    pub tail_ratio_guard: f64,
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            rel_eps: 1e-10,
            max_terms: 1_000_000,
            tail_ratio_guard: 0.999_999,
        }
    }
}

impl SeriesTolerance {
    pub fn new(rel_eps: f64, max_terms: usize, tail_ratio_guard: f64) -> Result<Self> {
        let tol = Self {
            rel_eps,
            max_terms,
            tail_ratio_guard,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn with_rel_eps(self, rel_eps: f64) -> Result<Self> {
        Self::new(rel_eps, self.max_terms, self.tail_ratio_guard)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_eps > 0.0 && self.rel_eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rel_eps must be positive, got {}",
                self.rel_eps
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParameter(
                "max_terms must be at least 1".into(),
            ));
        }
        if !(self.tail_ratio_guard > 0.0 && self.tail_ratio_guard < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_ratio_guard must lie in (0, 1), got {}",
                self.tail_ratio_guard
            )));
        }
        Ok(())
    }
}

/// Scalar types a series can be summed over.
pub trait SeriesValue: Copy + Add<Output = Self> + Default {
    fn magnitude(&self) -> f64;
}

impl SeriesValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl SeriesValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Partial sum together with a bound on everything that was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum<T> {
    pub value: T,
    pub terms_used: usize,
    pub tail_bound: f64,
}

fn geometric_tail(last: f64, ratio: f64) -> f64 {
    if last == 0.0 {
        0.0
    } else {
        last * ratio / (1.0 - ratio)
    }
}

/// Sums `term(0) + term(1) + ...` until a geometric tail estimate built from
/// the observed ratio of the last two terms is below `rel_eps * |S|`.
///
/// The estimate bounds the tail only once the term ratios are non-increasing,
/// so the rule also requires the last two observed ratios to be ordered that
/// way. Series whose ratio creeps up towards its limit from below need
/// [`sum_adaptive_bounded`] with an analytic ratio bound instead.
pub fn sum_adaptive<T, F>(mut term: F, tol: &SeriesTolerance) -> Result<SeriesSum<T>>
where
    T: SeriesValue,
    F: FnMut(usize) -> T,
{
    tol.validate()?;
    let mut sum = T::default();
    let mut prev_mag = f64::NAN;
    let mut prev_ratio = f64::INFINITY;
    let mut ratio = f64::NAN;
    for l in 0..tol.max_terms {
        let t = term(l);
        let mag = t.magnitude();
        if !mag.is_finite() {
            return Err(Error::NonConvergent {
                terms: l + 1,
                last_ratio: ratio,
            });
        }
        sum = sum + t;
        if l > 0 {
            ratio = if prev_mag == 0.0 {
                if mag == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                mag / prev_mag
            };
            if l > 1 && ratio < tol.tail_ratio_guard && ratio <= prev_ratio {
                let tail = geometric_tail(mag, ratio);
                if tail <= tol.rel_eps * sum.magnitude() {
                    return Ok(SeriesSum {
                        value: sum,
                        terms_used: l + 1,
                        tail_bound: tail,
                    });
                }
            }
            prev_ratio = ratio;
        }
        prev_mag = mag;
    }
    Err(Error::NonConvergent {
        terms: tol.max_terms,
        last_ratio: ratio,
    })
}

/// Like [`sum_adaptive`], but the caller supplies `ratio_bound(l)`: an upper
/// bound on `|term(j+1) / term(j)|` valid for every `j >= l`, or `None` while
/// no such bound is known. The resulting tail bound is rigorous.
pub fn sum_adaptive_bounded<T, F, R>(
    mut term: F,
    mut ratio_bound: R,
    tol: &SeriesTolerance,
) -> Result<SeriesSum<T>>
where
    T: SeriesValue,
    F: FnMut(usize) -> T,
    R: FnMut(usize) -> Option<f64>,
{
    tol.validate()?;
    let mut sum = T::default();
    let mut last_ratio = f64::NAN;
    for l in 0..tol.max_terms {
        let t = term(l);
        let mag = t.magnitude();
        if !mag.is_finite() {
            return Err(Error::NonConvergent {
                terms: l + 1,
                last_ratio,
            });
        }
        sum = sum + t;
        if let Some(r) = ratio_bound(l) {
            last_ratio = r;
            if r < tol.tail_ratio_guard {
                let tail = geometric_tail(mag, r);
                if tail <= tol.rel_eps * sum.magnitude() {
                    return Ok(SeriesSum {
                        value: sum,
                        terms_used: l + 1,
                        tail_bound: tail,
                    });
                }
            }
        }
    }
    Err(Error::NonConvergent {
        terms: tol.max_terms,
        last_ratio,
    })
}
