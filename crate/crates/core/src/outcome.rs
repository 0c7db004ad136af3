//! Outcome labels, probabilities and terminal distributions shared by both backends.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Label of a run in which a live bomb absorbed the photon.
pub const EXPLODED: &str = "exploded";
/// Label of a run in which no detector clicked.
pub const NO_CLICK: &str = "no-click";

/// Tolerance for floating-point normalization checks.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OutcomeError {
    #[error("negative probability {value} for outcome `{label}`")]
    Negative { label: String, value: String },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("cannot mix exact and floating-point probabilities")]
    MixedKinds,
}

/// A probability (or signed correlator value), either exact or floating point.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Float(f64),
}

impl Probability {
    pub fn ratio(num: i64, den: i64) -> Self {
        Probability::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero_like(&self) -> Self {
        match self {
            Probability::Exact(_) => Probability::Exact(BigRational::zero()),
            Probability::Float(_) => Probability::Float(0.0),
        }
    }

    pub fn one_like(&self) -> Self {
        match self {
            Probability::Exact(_) => Probability::Exact(BigRational::one()),
            Probability::Float(_) => Probability::Float(1.0),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Probability::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(r) => Some(r),
            Probability::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Probability::Float(x) => *x,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Probability::Exact(r) => r.is_negative(),
            Probability::Float(x) => *x < 0.0,
        }
    }

    fn combine(
        self,
        rhs: Self,
        exact: impl Fn(BigRational, BigRational) -> BigRational,
        float: impl Fn(f64, f64) -> f64,
    ) -> Self {
        match (self, rhs) {
            (Probability::Exact(a), Probability::Exact(b)) => Probability::Exact(exact(a, b)),
            (a, b) => Probability::Float(float(a.to_f64(), b.to_f64())),
        }
    }
}

impl Add for Probability {
    type Output = Probability;
    fn add(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Probability {
    type Output = Probability;
    fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Neg for Probability {
    type Output = Probability;
    fn neg(self) -> Self {
        match self {
            Probability::Exact(r) => Probability::Exact(-r),
            Probability::Float(x) => Probability::Float(-x),
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{r}"),
            Probability::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Present when a distribution was estimated by sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingInfo {
    pub samples: u64,
    pub seed: u64,
}

/// Map from terminal outcome label to probability.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    entries: BTreeMap<String, Probability>,
    sampling: Option<SamplingInfo>,
}

impl OutcomeDistribution {
    /// Checks non-negativity, uniform representation and normalization.
    pub fn new(
        entries: BTreeMap<String, Probability>,
        sampling: Option<SamplingInfo>,
    ) -> Result<Self, OutcomeError> {
        let mut kinds = entries.values().map(Probability::is_exact);
        if let Some(first) = kinds.next() {
            if kinds.any(|k| k != first) {
                return Err(OutcomeError::MixedKinds);
            }
        }
        for (label, p) in &entries {
            if p.is_negative() {
                return Err(OutcomeError::Negative {
                    label: label.clone(),
                    value: p.to_string(),
                });
            }
        }
        let dist = Self { entries, sampling };
        match dist.total() {
            Probability::Exact(t) if !t.is_one() => Err(OutcomeError::NotNormalized(t.to_string())),
            Probability::Float(t) if (t - 1.0).abs() > FLOAT_TOLERANCE => {
                Err(OutcomeError::NotNormalized(t.to_string()))
            }
            _ => Ok(dist),
        }
    }

    pub fn exact(
        entries: impl IntoIterator<Item = (String, BigRational)>,
    ) -> Result<Self, OutcomeError> {
        Self::new(
            entries
                .into_iter()
                .map(|(l, p)| (l, Probability::Exact(p)))
                .collect(),
            None,
        )
    }

    pub fn float(
        entries: impl IntoIterator<Item = (String, f64)>,
        sampling: Option<SamplingInfo>,
    ) -> Result<Self, OutcomeError> {
        Self::new(
            entries
                .into_iter()
                .map(|(l, p)| (l, Probability::Float(p)))
                .collect(),
            sampling,
        )
    }

    pub fn entries(&self) -> &BTreeMap<String, Probability> {
        &self.entries
    }

    pub fn sampling(&self) -> Option<SamplingInfo> {
        self.sampling
    }

    pub fn is_exact(&self) -> bool {
        self.entries
            .values()
            .next()
            .is_none_or(Probability::is_exact)
    }

    /// Probability of `label`, zero when the label never occurred.
    pub fn get(&self, label: &str) -> Probability {
        match self.entries.get(label) {
            Some(p) => p.clone(),
            None if self.is_exact() => Probability::Exact(BigRational::zero()),
            None => Probability::Float(0.0),
        }
    }

    pub fn get_f64(&self, label: &str) -> f64 {
        self.get(label).to_f64()
    }

    pub fn total(&self) -> Probability {
        let zero = if self.is_exact() {
            Probability::Exact(BigRational::zero())
        } else {
            Probability::Float(0.0)
        };
        self.entries.values().cloned().fold(zero, |a, b| a + b)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Outcome label for one run: `exploded` overrides detector readouts, several
/// clicks are joined with `+`.
pub fn outcome_label(exploded: bool, clicks: &[&str]) -> String {
    if exploded {
        EXPLODED.to_string()
    } else if clicks.is_empty() {
        NO_CLICK.to_string()
    } else {
        clicks.join("+")
    }
}
