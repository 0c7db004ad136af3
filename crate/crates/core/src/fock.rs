//! Quantum reference backend on the zero/one-photon subspace.
//!
//! A state over `m` paths is a real amplitude vector of length `m + 1`:
//! index 0 is the vacuum, index `i >= 1` a photon in path `i - 1`.
//! Amplitudes are generic over [`Amplitude`]; `f64` gives the usual double
//! precision simulation and [`Surd`] exact arithmetic, under which every
//! probability of a rational-ratio circuit comes out as an exact fraction.
//!
//! Beamsplitter convention (normative): with `c = sqrt(k/n)`, `s = sqrt(1 - k/n)`,
//!
//! ```text
//! lower' =  c·lower + s·upper
//! upper' = -s·lower + c·upper
//! ```

use std::collections::BTreeMap;
use std::fmt::Debug;

use thiserror::Error;

use crate::circuits::{AmplitudeSpec, Circuit, Element, Source};
use crate::outcome::{outcome_label, OutcomeDistribution, Probability};
use crate::ratio::BeamsplitterRatio;
use crate::surd::Surd;

/// Tolerance on the input norm before renormalization is refused.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;
/// Floating-point branches lighter than this are dropped.
pub const PRUNE_BELOW: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("path {path} out of range for {paths} paths")]
    PathOutOfRange { path: usize, paths: usize },
    #[error("beamsplitter ports coincide (path {0})")]
    SamePath(usize),
    #[error("need at least one path")]
    NoPaths,
    #[error("state cannot be normalized: all amplitudes are zero")]
    NonNormalizable,
    #[error("state norm² {0} deviates from 1 beyond tolerance")]
    NormDeviation(String),
    #[error("amplitude `{0}` has no exact representation; use floating point")]
    InexactAmplitude(String),
    #[error("probability {0} is irrational and cannot be reported exactly")]
    IrrationalProbability(String),
    #[error("circuit has {circuit} paths but the input state has {state}")]
    PathMismatch { circuit: usize, state: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}

/// Scalar field for amplitudes.
pub trait Amplitude: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    /// `sqrt(num/den)`.
    fn sqrt_ratio(num: u64, den: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_spec(spec: &AmplitudeSpec) -> Result<Self, FockError>;
    /// Factor `1/sqrt(p)` used to renormalize after a projection.
    fn inv_sqrt(p: &Self) -> Result<Self, FockError>;
    /// Multiplier that brings a state of squared norm `norm_sq` to unit norm,
    /// or an error when the deviation is not tolerated.
    fn renormalizer(norm_sq: &Self) -> Result<Self, FockError>;
    /// Whether a branch weight is small enough to drop.
    fn is_negligible(p: &Self) -> bool;
    /// Whether a squared norm counts as 1.
    fn is_unit(norm_sq: &Self) -> bool;
    fn to_probability(&self) -> Result<Probability, FockError>;
    fn to_f64(&self) -> f64;
}

impl Amplitude for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn sqrt_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64).sqrt()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_spec(spec: &AmplitudeSpec) -> Result<Self, FockError> {
        Ok(spec.value())
    }
    fn inv_sqrt(p: &Self) -> Result<Self, FockError> {
        Ok(1.0 / p.sqrt())
    }
    fn renormalizer(norm_sq: &Self) -> Result<Self, FockError> {
        if *norm_sq == 0.0 {
            Err(FockError::NonNormalizable)
        } else if (norm_sq - 1.0).abs() > RENORMALIZE_TOLERANCE {
            Err(FockError::NormDeviation(norm_sq.to_string()))
        } else {
            Ok(1.0 / norm_sq.sqrt())
        }
    }
    fn is_negligible(p: &Self) -> bool {
        *p < PRUNE_BELOW
    }
    fn is_unit(norm_sq: &Self) -> bool {
        (norm_sq - 1.0).abs() <= 1e-12
    }
    fn to_probability(&self) -> Result<Probability, FockError> {
        Ok(Probability::Float(*self))
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Amplitude for Surd {
    fn zero() -> Self {
        Surd::zero()
    }
    fn one() -> Self {
        Surd::one()
    }
    fn sqrt_ratio(num: u64, den: u64) -> Self {
        Surd::sqrt_ratio(num, den)
    }
    fn add(&self, other: &Self) -> Self {
        Surd::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Surd::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Surd::mul(self, other)
    }
    fn from_spec(spec: &AmplitudeSpec) -> Result<Self, FockError> {
        match *spec {
            AmplitudeSpec::Sqrt { negative, num, den } => {
                let s = Surd::sqrt_ratio(num, den);
                Ok(if negative { s.neg() } else { s })
            }
            AmplitudeSpec::Decimal(0.0) => Ok(Surd::zero()),
            AmplitudeSpec::Decimal(1.0) => Ok(Surd::one()),
            AmplitudeSpec::Decimal(-1.0) => Ok(Surd::one().neg()),
            AmplitudeSpec::Decimal(_) => Err(FockError::InexactAmplitude(spec.to_string())),
        }
    }
    fn inv_sqrt(p: &Self) -> Result<Self, FockError> {
        let r = p
            .to_rational()
            .ok_or_else(|| FockError::IrrationalProbability(p.to_string()))?;
        Surd::sqrt_rational(&r.recip())
            .ok_or_else(|| FockError::IrrationalProbability(p.to_string()))
    }
    fn renormalizer(norm_sq: &Self) -> Result<Self, FockError> {
        if norm_sq.is_zero() {
            Err(FockError::NonNormalizable)
        } else if Self::is_unit(norm_sq) {
            Ok(Surd::one())
        } else {
            Err(FockError::NormDeviation(norm_sq.to_string()))
        }
    }
    fn is_negligible(p: &Self) -> bool {
        p.is_zero()
    }
    fn is_unit(norm_sq: &Self) -> bool {
        *norm_sq == Surd::one()
    }
    fn to_probability(&self) -> Result<Probability, FockError> {
        self.to_rational()
            .map(Probability::Exact)
            .ok_or_else(|| FockError::IrrationalProbability(self.to_string()))
    }
    fn to_f64(&self) -> f64 {
        Surd::to_f64(self)
    }
}

/// Real amplitudes over vacuum + one photon per path.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState<A = f64> {
    amplitudes: Vec<A>,
}

impl<A: Amplitude> FockState<A> {
    pub fn vacuum(paths: usize) -> Result<Self, FockError> {
        if paths == 0 {
            return Err(FockError::NoPaths);
        }
        let mut amplitudes = vec![A::zero(); paths + 1];
        amplitudes[0] = A::one();
        Ok(Self { amplitudes })
    }

    /// Unit amplitude on a photon in `path`.
    pub fn single_photon(paths: usize, path: usize) -> Result<Self, FockError> {
        if path >= paths {
            return Err(FockError::PathOutOfRange { path, paths });
        }
        let mut amplitudes = vec![A::zero(); paths + 1];
        amplitudes[path + 1] = A::one();
        Ok(Self { amplitudes })
    }

    /// Per-path amplitudes plus a vacuum component; a norm within
    /// [`RENORMALIZE_TOLERANCE`] of 1 is rescaled, anything further is refused.
    pub fn superpose(paths: &[A], vacuum: A) -> Result<Self, FockError> {
        if paths.is_empty() {
            return Err(FockError::NoPaths);
        }
        let mut amplitudes = Vec::with_capacity(paths.len() + 1);
        amplitudes.push(vacuum);
        amplitudes.extend_from_slice(paths);
        let state = Self { amplitudes };
        let factor = A::renormalizer(&state.norm_sq())?;
        Ok(Self {
            amplitudes: state.amplitudes.iter().map(|a| a.mul(&factor)).collect(),
        })
    }

    /// Input state declared by a circuit's source line.
    pub fn from_source(circuit: &Circuit) -> Result<Self, FockError> {
        match circuit.source() {
            Source::Path(p) => Self::single_photon(circuit.paths(), *p),
            Source::Superposition(specs) => {
                let amps = specs
                    .iter()
                    .map(A::from_spec)
                    .collect::<Result<Vec<_>, _>>()?;
                Self::superpose(&amps, A::zero())
            }
        }
    }

    pub fn paths(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn vacuum_amplitude(&self) -> &A {
        &self.amplitudes[0]
    }

    pub fn amplitude(&self, path: usize) -> &A {
        &self.amplitudes[path + 1]
    }

    /// Vacuum first, then one entry per path.
    pub fn amplitudes(&self) -> &[A] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> A {
        self.amplitudes
            .iter()
            .fold(A::zero(), |acc, a| acc.add(&a.mul(a)))
    }

    fn check(&self, path: usize) -> Result<(), FockError> {
        if path >= self.paths() {
            Err(FockError::PathOutOfRange {
                path,
                paths: self.paths(),
            })
        } else {
            Ok(())
        }
    }

    pub fn apply_beamsplitter(
        &mut self,
        upper: usize,
        lower: usize,
        ratio: BeamsplitterRatio,
    ) -> Result<(), FockError> {
        self.check(upper)?;
        self.check(lower)?;
        if upper == lower {
            return Err(FockError::SamePath(upper));
        }
        let (k, n) = (ratio.numerator(), ratio.denominator());
        let c = A::sqrt_ratio(k, n);
        let s = A::sqrt_ratio(n - k, n);
        let a_upper = self.amplitudes[upper + 1].clone();
        let a_lower = self.amplitudes[lower + 1].clone();
        self.amplitudes[lower + 1] = c.mul(&a_lower).add(&s.mul(&a_upper));
        self.amplitudes[upper + 1] = c.mul(&a_upper).sub(&s.mul(&a_lower));
        Ok(())
    }

    /// Projective photon-presence measurement on `path`.
    ///
    /// Returns a `present` branch (photon replaced by vacuum when
    /// `demolish`) and an `absent` branch, each renormalized; branches of
    /// zero (or negligible) probability are omitted.
    pub fn measure_presence(
        &self,
        path: usize,
        demolish: bool,
    ) -> Result<Vec<Branch<A>>, FockError> {
        self.check(path)?;
        let amp = &self.amplitudes[path + 1];
        let present = amp.mul(amp);
        let absent = self.norm_sq().sub(&present);
        let mut branches = Vec::with_capacity(2);
        if !A::is_negligible(&present) {
            let factor = A::inv_sqrt(&present)?;
            let mut amplitudes = vec![A::zero(); self.amplitudes.len()];
            amplitudes[if demolish { 0 } else { path + 1 }] = amp.mul(&factor);
            branches.push(Branch {
                probability: present,
                state: FockState { amplitudes },
                tag: "present".into(),
            });
        }
        if !A::is_negligible(&absent) {
            let factor = A::inv_sqrt(&absent)?;
            let mut amplitudes: Vec<A> = self.amplitudes.iter().map(|a| a.mul(&factor)).collect();
            amplitudes[path + 1] = A::zero();
            branches.push(Branch {
                probability: absent,
                state: FockState { amplitudes },
                tag: "absent".into(),
            });
        }
        Ok(branches)
    }

    /// Born-rule weights: vacuum first, then one per path.
    pub fn probabilities(&self) -> Result<Vec<A>, FockError> {
        let norm = self.norm_sq();
        if !A::is_unit(&norm) {
            return Err(FockError::NormDeviation(format!("{norm:?}")));
        }
        Ok(self.amplitudes.iter().map(|a| a.mul(a)).collect())
    }
}

/// One outcome branch of a measurement or of a whole circuit run.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<A = f64> {
    pub probability: A,
    pub state: FockState<A>,
    pub tag: String,
}

struct Trace<'a, A> {
    probability: A,
    state: FockState<A>,
    exploded: bool,
    clicks: Vec<&'a str>,
}

/// Runs `circuit` on `input`, splitting at every bomb, dephaser and
/// detector. Each returned branch is tagged with its terminal outcome label.
pub fn evolve<A: Amplitude>(
    circuit: &Circuit,
    input: &FockState<A>,
) -> Result<Vec<Branch<A>>, FockError> {
    if circuit.paths() != input.paths() {
        return Err(FockError::PathMismatch {
            circuit: circuit.paths(),
            state: input.paths(),
        });
    }
    circuit.validate().map_err(|issues| {
        FockError::InvalidCircuit(
            issues
                .iter()
                .map(|i| format!("element {}: {}", i.element, i.message))
                .collect::<Vec<_>>()
                .join("; "),
        )
    })?;
    let mut traces = vec![Trace {
        probability: A::one(),
        state: input.clone(),
        exploded: false,
        clicks: Vec::new(),
    }];
    for element in circuit.elements() {
        let (path, demolish) = match element {
            Element::Beamsplitter {
                upper,
                lower,
                ratio,
            } => {
                for t in &mut traces {
                    t.state.apply_beamsplitter(*upper, *lower, *ratio)?;
                }
                continue;
            }
            Element::Bomb { live: false, .. } => continue,
            Element::Bomb { path, live: true } | Element::Detector { path, .. } => (*path, true),
            Element::Dephaser { path } => (*path, false),
        };
        let mut next = Vec::with_capacity(traces.len() * 2);
        for t in traces {
            for b in t.state.measure_presence(path, demolish)? {
                let probability = t.probability.mul(&b.probability);
                if A::is_negligible(&probability) {
                    continue;
                }
                let mut trace = Trace {
                    probability,
                    state: b.state,
                    exploded: t.exploded,
                    clicks: t.clicks.clone(),
                };
                if b.tag == "present" {
                    match element {
                        Element::Bomb { .. } => trace.exploded = true,
                        Element::Detector { label, .. } => trace.clicks.push(label),
                        _ => {}
                    }
                }
                next.push(trace);
            }
        }
        traces = next;
    }
    Ok(traces
        .into_iter()
        .map(|t| Branch {
            tag: outcome_label(t.exploded, &t.clicks),
            probability: t.probability,
            state: t.state,
        })
        .collect())
}

/// Terminal distribution: branch weights summed per outcome label.
pub fn outcome_distribution<A: Amplitude>(
    branches: &[Branch<A>],
) -> Result<OutcomeDistribution, FockError> {
    let mut merged: BTreeMap<String, A> = BTreeMap::new();
    for b in branches {
        let entry = merged.entry(b.tag.clone()).or_insert_with(A::zero);
        *entry = entry.add(&b.probability);
    }
    let entries = merged
        .into_iter()
        .map(|(l, p)| Ok((l, p.to_probability()?)))
        .collect::<Result<_, FockError>>()?;
    OutcomeDistribution::new(entries, None).map_err(|e| FockError::NormDeviation(e.to_string()))
}

/// Builds the input from the circuit's source, evolves, and collects the distribution.
pub fn run<A: Amplitude>(circuit: &Circuit) -> Result<OutcomeDistribution, FockError> {
    let input = FockState::<A>::from_source(circuit)?;
    outcome_distribution(&evolve(circuit, &input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_ev, BombMode};

    fn ratio(k: u64, n: u64) -> BeamsplitterRatio {
        BeamsplitterRatio::new(k, n).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn single_photon_basis() {
        let s = FockState::<f64>::single_photon(3, 0).unwrap();
        assert_eq!(s.amplitudes(), &[0.0, 1.0, 0.0, 0.0]);
        let s = FockState::<f64>::single_photon(2, 1).unwrap();
        assert_eq!(s.amplitudes(), &[0.0, 0.0, 1.0]);
        assert_eq!(s.norm_sq(), 1.0);
        assert!(FockState::<f64>::single_photon(2, 2).is_err());
    }

    #[test]
    fn superpose_checks_norm() {
        let t = (1.0f64 / 3.0).sqrt();
        let s = FockState::superpose(&[t, t, t], 0.0).unwrap();
        assert!(close(
            &s.probabilities().unwrap(),
            &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]
        ));
        assert_eq!(
            FockState::superpose(&[1.0, 0.0, 0.0], 0.0).unwrap(),
            FockState::single_photon(3, 0).unwrap()
        );
        assert_eq!(
            FockState::superpose(&[0.0, 0.0, 0.0], 0.0),
            Err(FockError::NonNormalizable)
        );
        assert!(matches!(
            FockState::superpose(&[1.0, 1.0], 0.0),
            Err(FockError::NormDeviation(_))
        ));
        let slightly_off = FockState::superpose(&[1.0 + 1e-10, 0.0], 0.0).unwrap();
        assert!((slightly_off.norm_sq() - 1.0).abs() < 1e-15);

        let third = Surd::sqrt_ratio(1, 3);
        let exact =
            FockState::superpose(&[third.clone(), third.clone(), third], Surd::zero()).unwrap();
        assert_eq!(exact.norm_sq(), Surd::one());
        assert!(matches!(
            FockState::superpose(&[Surd::sqrt_ratio(1, 2)], Surd::zero()),
            Err(FockError::NormDeviation(_))
        ));
    }

    #[test]
    fn identity_and_swap_ratios() {
        let mut s = FockState::<f64>::superpose(&[0.6, 0.8], 0.0).unwrap();
        let before = s.clone();
        s.apply_beamsplitter(0, 1, BeamsplitterRatio::identity())
            .unwrap();
        assert_eq!(s, before);
        s.apply_beamsplitter(0, 1, BeamsplitterRatio::swap())
            .unwrap();
        assert!(close(s.amplitudes(), &[0.0, -0.8, 0.6]));
        assert_eq!(
            s.apply_beamsplitter(1, 1, ratio(1, 2)),
            Err(FockError::SamePath(1))
        );
    }

    #[test]
    fn measure_presence_branches() {
        let mut s = FockState::<f64>::single_photon(2, 0).unwrap();
        s.apply_beamsplitter(0, 1, ratio(1, 2)).unwrap();
        let b = s.measure_presence(0, true).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b[0].probability - 0.5).abs() < 1e-15);
        assert!(close(b[0].state.amplitudes(), &[1.0, 0.0, 0.0]));
        assert!(close(b[1].state.amplitudes(), &[0.0, 0.0, 1.0]));

        let keep = s.measure_presence(0, false).unwrap();
        assert!(close(keep[0].state.amplitudes(), &[0.0, 1.0, 0.0]));

        let lower = FockState::<f64>::single_photon(2, 1).unwrap();
        let only = lower.measure_presence(0, true).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].tag, "absent");
        assert_eq!(only[0].state, lower);
    }

    #[test]
    fn probabilities_reject_unnormalized() {
        let mut s = FockState::<f64>::single_photon(2, 0).unwrap();
        s.amplitudes[2] = 1.0;
        assert!(matches!(
            s.probabilities(),
            Err(FockError::NormDeviation(_))
        ));
    }

    #[test]
    fn evolve_empty_circuit() {
        let c = Circuit::new(2, Source::Path(0)).unwrap();
        let input = FockState::<f64>::single_photon(2, 0).unwrap();
        let branches = evolve(&c, &input).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].probability, 1.0);
        assert_eq!(branches[0].state, input);
        assert_eq!(branches[0].tag, "no-click");
    }

    #[test]
    fn balanced_bomb_tester_exact() {
        let c = build_ev(ratio(1, 2), BombMode::Live).unwrap();
        let d = run::<Surd>(&c).unwrap();
        assert_eq!(d.get("exploded"), Probability::ratio(1, 2));
        assert_eq!(d.get("upper"), Probability::ratio(1, 4));
        assert_eq!(d.get("lower"), Probability::ratio(1, 4));
    }

    #[test]
    fn inexact_source_in_exact_mode() {
        let c =
            crate::circuits::parse("paths 2\nsource-superposition 0.6 0.8\ndetect 0 a\n").unwrap();
        assert!(matches!(
            run::<Surd>(&c),
            Err(FockError::InexactAmplitude(_))
        ));
        let d = run::<f64>(&c).unwrap();
        assert!((d.get_f64("a") - 0.36).abs() < 1e-12);
    }
}
