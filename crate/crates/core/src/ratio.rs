//! Rational beamsplitter ratios.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatioError {
    #[error("ratio denominator must be at least 1")]
    ZeroDenominator,
    #[error("ratio {k}/{n} exceeds 1")]
    AboveOne { k: u64, n: u64 },
    #[error("malformed ratio `{0}`, expected k/n")]
    Malformed(String),
    #[error("target {0} is outside [0, 1]")]
    TargetOutOfRange(f64),
    #[error("max denominator must be at least 2, got {0}")]
    DenominatorTooSmall(u64),
}

/// Stay-probability `k/n` of a beamsplitter, stored in lowest terms.
///
/// The mixing angle is `arccos(sqrt(k/n))`, so `k = n` is the identity and
/// `k = 0` a full swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BeamsplitterRatio {
    k: u64,
    n: u64,
}

impl BeamsplitterRatio {
    pub fn new(k: u64, n: u64) -> Result<Self, RatioError> {
        if n == 0 {
            return Err(RatioError::ZeroDenominator);
        }
        if k > n {
            return Err(RatioError::AboveOne { k, n });
        }
        let g = k.gcd(&n);
        Ok(Self { k: k / g, n: n / g })
    }

    pub const fn identity() -> Self {
        Self { k: 1, n: 1 }
    }

    pub const fn swap() -> Self {
        Self { k: 0, n: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.k
    }

    pub fn denominator(&self) -> u64 {
        self.n
    }

    /// The ratio `(n-k)/n` that undoes this one inside a closed interferometer.
    pub fn complement(&self) -> Self {
        Self::new(self.n - self.k, self.n).expect("complement of a valid ratio")
    }

    /// True when the splitter neither always transmits nor always reflects.
    pub fn is_mixing(&self) -> bool {
        self.k != 0 && self.k != self.n
    }

    pub fn stay_probability(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn theta(&self) -> f64 {
        self.stay_probability().sqrt().acos()
    }

    /// Numerator after rescaling to `modulus`; `None` if `n` does not divide it.
    pub fn scaled_to(&self, modulus: u64) -> Option<u64> {
        if modulus.is_multiple_of(self.n) {
            Some(self.k * (modulus / self.n))
        } else {
            None
        }
    }
}

impl fmt::Display for BeamsplitterRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.k, self.n)
    }
}

impl FromStr for BeamsplitterRatio {
    type Err = RatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || RatioError::Malformed(s.to_string());
        let (k, n) = s.split_once('/').ok_or_else(malformed)?;
        let k: u64 = k.trim().parse().map_err(|_| malformed())?;
        let n: u64 = n.trim().parse().map_err(|_| malformed())?;
        Self::new(k, n)
    }
}

/// Least common multiple of the denominators; 1 for an empty set.
pub fn common_modulus<'a>(ratios: impl IntoIterator<Item = &'a BeamsplitterRatio>) -> u64 {
    ratios.into_iter().fold(1, |acc, r| acc.lcm(&r.n))
}

/// Closest `k/n` with `n <= max_denominator`, ties going to the smaller `n`.
pub fn approximate_ratio(
    target: f64,
    max_denominator: u64,
) -> Result<BeamsplitterRatio, RatioError> {
    if !(0.0..=1.0).contains(&target) {
        return Err(RatioError::TargetOutOfRange(target));
    }
    if max_denominator < 2 {
        return Err(RatioError::DenominatorTooSmall(max_denominator));
    }
    let mut best = (f64::INFINITY, 0, 1);
    for n in 1..=max_denominator {
        let floor = (target * n as f64).floor() as u64;
        for k in [floor, floor + 1] {
            if k > n {
                continue;
            }
            let err = (k as f64 / n as f64 - target).abs();
            if err < best.0 {
                best = (err, k, n);
            }
        }
    }
    BeamsplitterRatio::new(best.1, best.2)
}
