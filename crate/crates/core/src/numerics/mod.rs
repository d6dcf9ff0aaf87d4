//! Numerically stable primitives shared by the physics modules.

mod factorial;
mod kernel;
mod series;

pub use factorial::{log_binomial, log_factorial};
pub use kernel::{kernel, kernel_from_delta, kernel_n0_logs, KernelValue, SMALL_ARGUMENT};
pub use series::{sum_adaptive, sum_adaptive_bounded, SeriesSum, SeriesTolerance, SeriesValue};
