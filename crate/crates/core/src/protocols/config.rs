use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::attention::DEFAULT_ETA;
use crate::error::{Error, Result};
use crate::numerics::SimplexVector;
use crate::subspace::SubspaceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Inductive,
    Transductive,
    Semi,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Inductive => "inductive",
            Self::Transductive => "transductive",
            Self::Semi => "semi",
        })
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "inductive" => Ok(Self::Inductive),
            "transductive" => Ok(Self::Transductive),
            "semi" | "semi-supervised" => Ok(Self::Semi),
            other => Err(Error::InvalidConfig(format!("unknown setting '{other}'"))),
        }
    }
}

/// How many pseudo-labels self-training may absorb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Budget {
    /// Absorb the whole pool, one sample at a time.
    #[default]
    All,
    Count(usize),
}

impl Budget {
    /// Number of absorptions allowed from a pool of `pool` samples.
    pub fn limit(self, pool: usize) -> usize {
        match self {
            Budget::All => pool,
            Budget::Count(n) => n.min(pool),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::All => f.write_str("all"),
            Budget::Count(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Budget::All);
        }
        s.parse().map(Budget::Count).map_err(|_| {
            Error::InvalidConfig(format!("budget must be 'all' or a count, got '{s}'"))
        })
    }
}

impl Serialize for Budget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Budget::All => s.serialize_str("all"),
            Budget::Count(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Budget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(Budget::Count(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Everything that shapes how one episode is solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub setting: Setting,
    #[serde(flatten)]
    pub subspace: SubspaceConfig,
    pub mu: f64,
    pub eta: f64,
    pub pseudo_label_budget: Budget,
    /// Stop self-training once the best pool score drops below this.
    pub confidence_floor: Option<f64>,
    /// Replaces the learned head weights when set.
    pub fixed_weights: Option<SimplexVector>,
    /// Scale every raw feature column to unit length before the transform.
    pub unit_norm: bool,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            setting: Setting::Inductive,
            subspace: SubspaceConfig::default(),
            mu: 1.0,
            eta: DEFAULT_ETA,
            pseudo_label_budget: Budget::All,
            confidence_floor: None,
            fixed_weights: None,
            unit_norm: false,
        }
    }
}

impl EpisodeConfig {
    pub fn with_setting(setting: Setting) -> Self {
        Self {
            setting,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::NonPositiveMu(self.mu));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.subspace.dim2 == 0 {
            return Err(Error::InvalidConfig("dim2 must be at least 1".into()));
        }
        if self.subspace.k_neighbors == Some(0) {
            return Err(Error::InvalidConfig(
                "k_neighbors must be at least 1".into(),
            ));
        }
        if let Some(f) = self.confidence_floor {
            if !f.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "confidence floor {f} is not finite"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_parsing_and_serde() {
        assert_eq!("all".parse::<Budget>().unwrap(), Budget::All);
        assert_eq!("12".parse::<Budget>().unwrap(), Budget::Count(12));
        assert!("-3".parse::<Budget>().is_err());
        assert_eq!(serde_json::to_string(&Budget::Count(4)).unwrap(), "4");
        assert_eq!(
            serde_json::from_str::<Budget>("\"all\"").unwrap(),
            Budget::All
        );
        assert_eq!(Budget::Count(7).limit(3), 3);
        assert_eq!(Budget::All.limit(3), 3);
    }

    #[test]
    fn config_echo_is_flat() {
        let v = serde_json::to_value(EpisodeConfig::default()).unwrap();
        assert_eq!(v["setting"], "inductive");
        assert_eq!(v["method"], "le");
        assert_eq!(v["dim2"], 5);
        assert_eq!(v["eta"], 1.4);
        assert_eq!(v["pseudo_label_budget"], "all");
    }

    #[test]
    fn validation() {
        assert!(EpisodeConfig::default().validate().is_ok());
        let bad = EpisodeConfig {
            mu: 0.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::NonPositiveMu(_))));
        let bad = EpisodeConfig {
            eta: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("semi".parse::<Setting>().unwrap(), Setting::Semi);
    }
}
