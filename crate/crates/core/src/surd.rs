//! Exact arithmetic in multiquadratic fields: finite sums `Σ c·√d` with
//! rational `c` and distinct square-free `d`.
//!
//! Square roots of distinct square-free integers are linearly independent
//! over the rationals, so the representation is canonical and equality is
//! exact. Every `sqrt(k/n)` is representable, which covers all amplitudes
//! produced by rational-ratio beamsplitters.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd {
    /// radicand -> coefficient; no zero coefficients.
    terms: BTreeMap<u128, BigRational>,
}

/// Splits `n` as `outer² · inner` with `inner` square-free.
fn square_free_split(mut n: u128) -> (u128, u128) {
    let mut outer = 1u128;
    let mut inner = 1u128;
    let mut p = 2u128;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        outer *= p.pow(e / 2);
        if e % 2 == 1 {
            inner *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (outer, inner * n)
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut s = Self::zero();
        s.add_term(1, r);
        s
    }

    /// Exact `sqrt(num/den)`, written as `sqrt(num·den)/den`.
    ///
    /// # Panics
    /// If `den` is zero.
    pub fn sqrt_ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "sqrt of a ratio with zero denominator");
        if num == 0 {
            return Self::zero();
        }
        let (outer, inner) = square_free_split(u128::from(num) * u128::from(den));
        let coeff = BigRational::new(BigInt::from(outer), BigInt::from(den));
        let mut s = Self::zero();
        s.add_term(inner, coeff);
        s
    }

    /// Exact square root of a non-negative rational whose numerator and
    /// denominator fit in 64 bits.
    pub fn sqrt_rational(r: &BigRational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        Some(Self::sqrt_ratio(r.numer().to_u64()?, r.denom().to_u64()?))
    }

    fn add_term(&mut self, radicand: u128, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(radicand).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a rational, if it has no irrational part.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(d, c)| c.to_f64().unwrap_or(f64::NAN) * (*d as f64).sqrt())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(*d, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                // √d1·√d2 = g·√((d1/g)(d2/g)) for square-free d1, d2 with g = gcd.
                let g = d1.gcd(d2);
                let radicand = (d1 / g).checked_mul(d2 / g).expect("radicand overflow");
                out.add_term(
                    radicand,
                    c1 * c2 * BigRational::from_integer(BigInt::from(g)),
                );
            }
        }
        out
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let c = c.abs();
            match (*d, c.is_one()) {
                (1, _) => write!(f, "{c}")?,
                (d, true) => write!(f, "√{d}")?,
                (d, false) => write!(f, "{c}·√{d}")?,
            }
        }
        Ok(())
    }
}
