//! Model presets in a plain `key = value` text format.
//!
//! ```text
//! # comment
//! name  = h2
//! model = morse
//! units = ev-angstrom-amu
//! depth = 4.75
//! ...
//! ```
//!
//! Keys per model:
//!
//! | model         | keys                                         |
//! |---------------|----------------------------------------------|
//! | `harmonic`    | `mass`, `omega`                              |
//! | `box`         | `mass`, `width`                              |
//! | `hydrogenoid` | `mass` (reduced), `z`, `charge`              |
//! | `morse`       | `depth`, `alpha`, `zeta`, `mass`, `ro`, `omega` |
//! | `quartic`     | `omega`, `lambda`                            |
//!
//! `units` selects how the numbers are read; everything is converted to
//! `ħ = 1` with the unit system's energy and length as the base units.
//!
//! | units             | energy  | length | mass | frequency | charge | `lambda` |
//! |-------------------|---------|--------|------|-----------|--------|----------|
//! | `natural`         | as given, `ħ = 1` |||||
//! | `atomic`          | hartree | bohr   | m_e  | hartree/ħ | e      | hartree/ħ² |
//! | `ev-angstrom-amu` | eV      | Å      | u    | ħω in eV  | e      | λħ² in eV |
//! | `si`              | J       | m      | kg   | rad/s     | C      | 1/(J s²)  |

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{BoxWell, Harmonic, Hydrogenoid, ModelParams, Morse, Quartic};

const HBAR_SI: f64 = 1.054_571_817e-34;
const EV_SI: f64 = 1.602_176_634e-19;
const AMU_SI: f64 = 1.660_539_066_60e-27;
const ANGSTROM_SI: f64 = 1e-10;
/// `e²/(4πε0)` in eV·Å.
const COULOMB_EV_ANGSTROM: f64 = 14.399_645_478_42;
const EPSILON0_SI: f64 = 8.854_187_812_8e-12;

const BUNDLED: &[(&str, &str)] = &[
    ("h2", include_str!("../presets/h2.conf")),
    ("hydrogen", include_str!("../presets/hydrogen.conf")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitSystem {
    Natural,
    Atomic,
    EvAngstromAmu,
    Si,
}

#[derive(Debug, Clone, Copy)]
enum Dim {
    None,
    Energy,
    Length,
    InverseLength,
    Mass,
    Frequency,
    Charge,
    Lambda,
}

impl UnitSystem {
    fn factor(&self, dim: Dim) -> f64 {
        use UnitSystem::*;
        match (self, dim) {
            (_, Dim::None) | (Natural | Atomic, _) => 1.0,
            (EvAngstromAmu, Dim::Mass) => {
                AMU_SI * EV_SI * ANGSTROM_SI * ANGSTROM_SI / (HBAR_SI * HBAR_SI)
            }
            (EvAngstromAmu, Dim::Charge) => COULOMB_EV_ANGSTROM.sqrt(),
            (EvAngstromAmu, _) => 1.0,
            (Si, Dim::Mass) => 1.0 / (HBAR_SI * HBAR_SI),
            (Si, Dim::Frequency) => HBAR_SI,
            (Si, Dim::Lambda) => HBAR_SI * HBAR_SI,
            (Si, Dim::Charge) => 1.0 / (4.0 * std::f64::consts::PI * EPSILON0_SI).sqrt(),
            (Si, Dim::Energy | Dim::Length | Dim::InverseLength) => 1.0,
        }
    }

    /// Name of the energy unit results are reported in.
    pub fn energy_unit(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "E",
            UnitSystem::Atomic => "hartree",
            UnitSystem::EvAngstromAmu => "eV",
            UnitSystem::Si => "J",
        }
    }

    /// Name of the time unit results are reported in (`ħ` per energy unit).
    pub fn time_unit(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "hbar/E",
            UnitSystem::Atomic => "hbar/hartree",
            UnitSystem::EvAngstromAmu => "hbar/eV",
            UnitSystem::Si => "hbar/J",
        }
    }
}

impl FromStr for UnitSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(UnitSystem::Natural),
            "atomic" => Ok(UnitSystem::Atomic),
            "ev-angstrom-amu" => Ok(UnitSystem::EvAngstromAmu),
            "si" => Ok(UnitSystem::Si),
            other => Err(Error::InvalidParameter(format!(
                "unknown unit system {other:?}"
            ))),
        }
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitSystem::Natural => "natural",
            UnitSystem::Atomic => "atomic",
            UnitSystem::EvAngstromAmu => "ev-angstrom-amu",
            UnitSystem::Si => "si",
        })
    }
}

/// A model with its parameters already converted to `ħ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: Option<String>,
    pub units: UnitSystem,
    pub model: ModelParams,
}

impl Preset {
    /// A bundled preset by name, or a preset file on disk.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some(text) = bundled(name_or_path) {
            return text.parse();
        }
        Self::from_path(name_or_path)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        text.parse()
    }
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

struct Entries {
    items: Vec<(usize, String, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let i = self.items.iter().position(|(_, k, _)| k == key)?;
        let (line, _, v) = self.items.remove(i);
        Some((line, v))
    }

    fn number(&mut self, key: &str, units: UnitSystem, dim: Dim) -> Result<f64> {
        let (line, v) = self.take(key).ok_or_else(|| Error::Config {
            line: 0,
            message: format!("missing key {key:?}"),
        })?;
        let x: f64 = v.parse().map_err(|_| Error::Config {
            line,
            message: format!("{key}: not a number: {v:?}"),
        })?;
        let x = match dim {
            Dim::InverseLength => x / units.factor(Dim::Length),
            d => x * units.factor(d),
        };
        Ok(x)
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            let key = k.trim().to_string();
            if items.iter().any(|(_, existing, _)| *existing == key) {
                return Err(Error::Config {
                    line: i + 1,
                    message: format!("duplicate key {key:?}"),
                });
            }
            items.push((i + 1, key, v.trim().to_string()));
        }
        let mut e = Entries { items };
        let name = e.take("name").map(|(_, v)| v);
        let (_, model_name) = e.take("model").ok_or_else(|| Error::Config {
            line: 0,
            message: "missing key \"model\"".into(),
        })?;
        let units = match e.take("units") {
            Some((line, v)) => v.parse().map_err(|err: Error| Error::Config {
                line,
                message: err.to_string(),
            })?,
            None => UnitSystem::Natural,
        };
        let model = match model_name.as_str() {
            "harmonic" => ModelParams::Harmonic(Harmonic {
                mass: e.number("mass", units, Dim::Mass)?,
                omega: e.number("omega", units, Dim::Frequency)?,
            }),
            "box" => ModelParams::Box(BoxWell {
                mass: e.number("mass", units, Dim::Mass)?,
                width: e.number("width", units, Dim::Length)?,
            }),
            "hydrogenoid" => {
                let z = e.number("z", units, Dim::None)?;
                if z < 1.0 || z.fract() != 0.0 {
                    return Err(Error::Config {
                        line: 0,
                        message: format!("z must be a positive integer, got {z}"),
                    });
                }
                ModelParams::Hydrogenoid(Hydrogenoid {
                    reduced_mass: e.number("mass", units, Dim::Mass)?,
                    z: z as u32,
                    charge: e.number("charge", units, Dim::Charge)?,
                })
            }
            "morse" => ModelParams::Morse(Morse {
                depth: e.number("depth", units, Dim::Energy)?,
                alpha: e.number("alpha", units, Dim::InverseLength)?,
                anharmonicity: e.number("zeta", units, Dim::None)?,
                mass: e.number("mass", units, Dim::Mass)?,
                ro: e.number("ro", units, Dim::Length)?,
                omega: e.number("omega", units, Dim::Frequency)?,
            }),
            "quartic" => ModelParams::Quartic(Quartic {
                omega: e.number("omega", units, Dim::Frequency)?,
                lambda: e.number("lambda", units, Dim::Lambda)?,
            }),
            other => {
                return Err(Error::Config {
                    line: 0,
                    message: format!("unknown model {other:?}"),
                })
            }
        };
        if let Some((line, key, _)) = e.items.first() {
            return Err(Error::Config {
                line: *line,
                message: format!("unexpected key {key:?} for model {model_name}"),
            });
        }
        model.validate()?;
        Ok(Preset { name, units, model })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_presets_parse() {
        for name in bundled_names() {
            let p = Preset::load(name).unwrap();
            assert_eq!(p.name.as_deref(), Some(name));
        }
    }

    #[test]
    fn h2_conversion_is_consistent() {
        let p = Preset::load("h2").unwrap();
        let ModelParams::Morse(m) = p.model else {
            panic!("h2 is a Morse preset");
        };
        // Harmonic frequency of the well, α sqrt(2D/M), should sit close to
        // the tabulated ħω in eV.
        let hbar_omega0 = m.alpha * (2.0 * m.depth / m.mass).sqrt();
        assert!((hbar_omega0 - 0.5447).abs() < 2e-3, "{hbar_omega0}");
        assert_eq!(m.max_level(), Some(17));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = "model = box\nmass = 1\nwidth = oops\n"
            .parse::<Preset>()
            .unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                line: 3,
                message: "width: not a number: \"oops\"".into()
            }
        );
        assert!("model = box\nmass = 1\n".parse::<Preset>().is_err());
        assert!("model = box\nmass = 1\nwidth = 1\ncolor = red\n"
            .parse::<Preset>()
            .is_err());
        assert!("model = box\nmass = 1\nmass = 2\nwidth = 1"
            .parse::<Preset>()
            .is_err());
        assert!("model = box\nunits = imperial\nmass = 1\nwidth = 1"
            .parse::<Preset>()
            .is_err());
        assert!("model = box\nmass = -1\nwidth = 1"
            .parse::<Preset>()
            .is_err());
    }

    #[test]
    fn si_and_atomic_hydrogen_agree() {
        let atomic: Preset = "model = hydrogenoid\nunits = atomic\nmass = 1\nz = 1\ncharge = 1"
            .parse()
            .unwrap();
        let si: Preset = format!(
            "model = hydrogenoid\nunits = si\nmass = {}\nz = 1\ncharge = {}",
            9.1093837015e-31, EV_SI
        )
        .parse()
        .unwrap();
        // Ground state: -1/2 hartree = -13.6057 eV.
        let e_atomic = crate::spectra::energy(&atomic.model, 1).unwrap();
        let e_si_ev = crate::spectra::energy(&si.model, 1).unwrap() / EV_SI;
        assert_eq!(e_atomic, -0.5);
        assert!((e_si_ev + 13.605_693).abs() < 1e-4, "{e_si_ev}");
        // The criterion is dimensionless and must not care about units.
        let y_atomic = crate::spectra::criterion_point(&atomic.model, 5).unwrap().y;
        let y_si = crate::spectra::criterion_point(&si.model, 5).unwrap().y;
        assert!((y_atomic - y_si).abs() < 1e-9 * y_atomic);
    }
}
