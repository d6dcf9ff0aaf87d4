use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level n={n} is outside the spectrum of the {model} model: {reason}")]
    IndexOutOfSpectrum {
        model: &'static str,
        n: u32,
        reason: String,
    },

    /// The classical period does not depend on the level, so the criterion is
    /// identically zero and carries no information.
    #[error("the {model} model is period-blind: its classical period is energy independent")]
    DegeneratePeriod { model: &'static str },

    #[error("superposition amplitudes are not normalized: |a|^2 + |b|^2 = {norm}")]
    NotNormalized { norm: f64 },

    #[error("series did not converge after {terms} terms ({})", describe_ratio(*.last_ratio))]
    NonConvergent { terms: usize, last_ratio: f64 },

    #[error("configurations differ in {0}")]
    MismatchedConfig(String),

    #[error("mean energy is zero, the mean period is undefined")]
    ZeroEnergy,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

fn describe_ratio(r: f64) -> String {
    if r.is_nan() {
        "no term ratio below 1 was reached".into()
    } else {
        format!("last ratio {r:.6}")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
