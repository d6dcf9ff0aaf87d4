//! Classical measurability of discrete energy spectra.
//!
//! The crate has two halves. [`spectra`] holds a catalog of closed, integrable
//! models (harmonic oscillator, particle in a box, hydrogenoid atom, Morse and
//! quartic oscillators) and evaluates the level criterion
//! `y(n) = |ΔE_n Δτ_n|`, the product of half the neighbor energy gap and half
//! the neighbor classical-period gap, against the time–energy bound `ħ/2`.
//!
//! [`open_system`] and [`observables`] follow an initial Fock state of the
//! quartic oscillator under a diffusive environment: Fock populations,
//! survival, neighbor fidelity and the environment-averaged criterion.
//!
//! All computations use `ħ = 1`. Actions are therefore reported in units of
//! `ħ`, and the resolvability threshold is `0.5`.

pub mod error;
pub mod numerics;
pub mod observables;
pub mod open_system;
pub mod presets;
pub mod spectra;

pub use error::{Error, Result};
pub use numerics::{kernel, log_factorial, sum_adaptive, KernelValue, SeriesSum, SeriesTolerance};
pub use observables::{
    fidelity_audit, fidelity_closed_form, fidelity_overlap, mean_h0, mean_n, mean_tau,
    mean_y_series, purity, survival, AuditVerdict, FidelityAudit, KtGrid, TimeSeries, YMeanPoint,
};
pub use open_system::{distribution, fock_weight, DiffusiveConfig, FockDistribution};
pub use presets::{Preset, UnitSystem};
pub use spectra::{
    criterion_point, energy, period, threshold_scan, CriterionPoint, ModelParams,
    SuperpositionSpec, ThresholdScan, Verdict,
};

/// The time–energy bound `ħ/2` in units of `ħ`.
pub const HALF_HBAR: f64 = 0.5;
