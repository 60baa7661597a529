use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PolyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChaosTerm {
    pub delay: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemporalFactor {
    pub harmonic: usize,
    pub phase: Phase,
}

/// One product target. Terms are kept sorted by strictly increasing delay.
/// An empty term list is allowed only together with a temporal factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChaosSpec {
    terms: Vec<ChaosTerm>,
    temporal: Option<TemporalFactor>,
}

impl ChaosSpec {
    pub fn new(mut terms: Vec<ChaosTerm>, temporal: Option<TemporalFactor>) -> Result<Self, PolyError> {
        terms.sort();
        let text = || {
            ChaosSpec {
                terms: terms.clone(),
                temporal,
            }
            .to_string()
        };
        if terms.iter().any(|t| t.degree == 0) {
            return Err(PolyError::Parse {
                text: text(),
                reason: "degrees must be at least 1".into(),
            });
        }
        if terms.iter().any(|t| t.delay == 0) {
            return Err(PolyError::Parse {
                text: text(),
                reason: "delays must be at least 1".into(),
            });
        }
        if terms.windows(2).any(|w| w[0].delay == w[1].delay) {
            return Err(PolyError::Parse {
                text: text(),
                reason: "delays must be distinct".into(),
            });
        }
        if let Some(tf) = temporal {
            if tf.harmonic == 0 {
                return Err(PolyError::Parse {
                    text: text(),
                    reason: "harmonic must be at least 1".into(),
                });
            }
        } else if terms.is_empty() {
            return Err(PolyError::Parse {
                text: String::new(),
                reason: "total degree must be at least 1".into(),
            });
        }
        Ok(ChaosSpec { terms, temporal })
    }

    /// First-degree single-delay target.
    pub fn linear(delay: usize) -> Self {
        ChaosSpec {
            terms: vec![ChaosTerm { delay, degree: 1 }],
            temporal: None,
        }
    }

    pub fn terms(&self) -> &[ChaosTerm] {
        &self.terms
    }

    pub fn temporal(&self) -> Option<TemporalFactor> {
        self.temporal
    }

    pub fn with_temporal(&self, temporal: Option<TemporalFactor>) -> Self {
        ChaosSpec {
            terms: self.terms.clone(),
            temporal,
        }
    }

    pub fn total_degree(&self) -> usize {
        self.terms.iter().map(|t| t.degree).sum()
    }

    pub fn max_delay(&self) -> usize {
        self.terms.iter().map(|t| t.delay).max().unwrap_or(0)
    }

    pub fn max_factor_degree(&self) -> usize {
        self.terms.iter().map(|t| t.degree).max().unwrap_or(0)
    }
}

impl fmt::Display for ChaosSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.terms {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "{}@{}", t.degree, t.delay)?;
            first = false;
        }
        if let Some(tf) = self.temporal {
            if !first {
                f.write_str("*")?;
            }
            let p = match tf.phase {
                Phase::Cos => "cos",
                Phase::Sin => "sin",
            };
            write!(f, "{p}@{}", tf.harmonic)?;
        }
        Ok(())
    }
}

impl FromStr for ChaosSpec {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, PolyError> {
        let err = |reason: &str| PolyError::Parse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let mut terms = Vec::new();
        let mut temporal = None;
        for part in s.trim().split('*') {
            let (lhs, rhs) = part.split_once('@').ok_or_else(|| err("factor lacks '@'"))?;
            let idx: usize = rhs.trim().parse().map_err(|_| err("index is not a non-negative integer"))?;
            match lhs.trim() {
                "cos" | "sin" => {
                    if temporal.is_some() {
                        return Err(err("more than one temporal factor"));
                    }
                    let phase = if lhs.trim() == "cos" { Phase::Cos } else { Phase::Sin };
                    temporal = Some(TemporalFactor { harmonic: idx, phase });
                }
                d => {
                    if temporal.is_some() {
                        return Err(err("temporal factor must come last"));
                    }
                    let degree: usize = d.parse().map_err(|_| err("degree is not an integer"))?;
                    terms.push(ChaosTerm { delay: idx, degree });
                }
            }
        }
        ChaosSpec::new(terms, temporal).map_err(|e| match e {
            PolyError::Parse { reason, .. } => err(&reason),
            other => other,
        })
    }
}

impl Serialize for ChaosSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChaosSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
