//! Attractive radial pair potentials `V(r) = sgn(q) c r^q`.
//!
//! A single positive coupling `c` expresses both confining (`q > 0`) and
//! Coulomb-like (`q < 0`) attraction; with this sign convention every
//! accepted potential is strictly increasing in `r`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Smallest and largest supported exponents.
pub const MIN_EXPONENT: f64 = -1.0;
pub const MAX_EXPONENT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("coupling must be positive and finite for an attractive potential, got {coupling}")]
    NotAttractive { coupling: f64 },
    #[error("exponent {exponent} is outside the supported family [-1, 2] \\ {{0}}")]
    UnsupportedExponent { exponent: f64 },
    #[error("potential evaluated at non-positive or non-finite radius {radius}")]
    Domain { radius: f64 },
    #[error("cannot parse potential descriptor `{descriptor}`: {reason}")]
    Parse { descriptor: String, reason: String },
}

/// Named member of the power-law family, derived from the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Linear,
    Coulomb,
    Harmonic,
    Power,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Linear => "linear",
            PotentialKind::Coulomb => "coulomb",
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::Power => "power",
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated attractive pair potential.
///
/// Fields are private so every value in circulation satisfies the
/// invariants `c > 0`, `-1 <= q <= 2`, `q != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    exponent: f64,
    coupling: f64,
}

impl PotentialSpec {
    /// Validates `(q, c)` and builds the potential `sgn(q) c r^q`.
    pub fn new(exponent: f64, coupling: f64) -> Result<Self, PotentialError> {
        validate(exponent, coupling)?;
        Ok(Self { exponent, coupling })
    }

    pub fn linear(coupling: f64) -> Result<Self, PotentialError> {
        Self::new(1.0, coupling)
    }

    pub fn coulomb(coupling: f64) -> Result<Self, PotentialError> {
        Self::new(-1.0, coupling)
    }

    pub fn harmonic(coupling: f64) -> Result<Self, PotentialError> {
        Self::new(2.0, coupling)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `sgn(q)`, i.e. `+1` for confining and `-1` for Coulomb-like members.
    pub fn sign(&self) -> f64 {
        self.exponent.signum()
    }

    pub fn kind(&self) -> PotentialKind {
        if self.exponent == 1.0 {
            PotentialKind::Linear
        } else if self.exponent == -1.0 {
            PotentialKind::Coulomb
        } else if self.exponent == 2.0 {
            PotentialKind::Harmonic
        } else {
            PotentialKind::Power
        }
    }

    /// `V(r) = sgn(q) c r^q` for `r > 0`.
    pub fn evaluate(&self, radius: f64) -> Result<f64, PotentialError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(PotentialError::Domain { radius });
        }
        Ok(self.sign() * self.coupling * radius.powf(self.exponent))
    }

    /// Re-checks the invariants; useful for values assembled elsewhere.
    pub fn validate(&self) -> Result<(), PotentialError> {
        validate(self.exponent, self.coupling)
    }

    /// Same potential with the coupling multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self, PotentialError> {
        Self::new(self.exponent, self.coupling * factor)
    }
}

/// Accepts `(q, c)` iff the pair describes a supported attractive potential.
pub fn validate(exponent: f64, coupling: f64) -> Result<(), PotentialError> {
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(PotentialError::NotAttractive { coupling });
    }
    if !(MIN_EXPONENT..=MAX_EXPONENT).contains(&exponent) || exponent == 0.0 {
        return Err(PotentialError::UnsupportedExponent { exponent });
    }
    Ok(())
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            PotentialKind::Power => write!(f, "power:{}:{}", self.exponent, self.coupling),
            kind => write!(f, "{}:{}", kind, self.coupling),
        }
    }
}

/// Parses `linear[:c]`, `coulomb[:c]`, `harmonic[:c]` and `power:q:c`.
impl FromStr for PotentialSpec {
    type Err = PotentialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |reason: &str| PotentialError::Parse {
            descriptor: s.to_string(),
            reason: reason.to_string(),
        };
        let number = |field: &str| -> Result<f64, PotentialError> {
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(&format!("`{field}` is not a number")))
        };

        let parts: Vec<&str> = s.trim().split(':').collect();
        let name = parts[0].to_ascii_lowercase();
        match name.as_str() {
            "linear" | "coulomb" | "harmonic" => {
                let coupling = match parts.len() {
                    1 => 1.0,
                    2 => number(parts[1])?,
                    _ => return Err(parse_err("expected `<name>[:coupling]`")),
                };
                let exponent = match name.as_str() {
                    "linear" => 1.0,
                    "coulomb" => -1.0,
                    _ => 2.0,
                };
                PotentialSpec::new(exponent, coupling)
            }
            "power" => {
                if parts.len() != 3 {
                    return Err(parse_err("expected `power:<exponent>:<coupling>`"));
                }
                PotentialSpec::new(number(parts[1])?, number(parts[2])?)
            }
            _ => Err(parse_err(
                "unknown potential; use linear, coulomb, harmonic or power:q:c",
            )),
        }
    }
}
