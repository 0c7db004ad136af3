//! KCBS analysis of the three-path interferometer.
//!
//! Detectors report ±1 with −1 meaning "click". With a single photon at most
//! one detector of a context clicks, so the context correlator is
//! `E = p_neither − p_first − p_second`. A noncontextual model obeys
//! `E1 + … + E5 >= −3`; the report classifies a sum strictly below the bound
//! as contextual.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::circuits::{
    build_hofmann_context, build_hofmann_qsl, context_detectors, hofmann_chain, Circuit,
    CircuitError, Source, HOFMANN_CONTEXTS,
};
use crate::fock::{self, Amplitude, FockError, FockState};
use crate::outcome::{OutcomeDistribution, Probability, NO_CLICK};
use crate::qsl::{self, PhaseModulus, QslError};
use crate::surd::Surd;

/// Noncontextual lower bound on the five-term sum.
pub const NONCONTEXTUAL_BOUND: i64 = -3;
/// Float backends count as contextual only below `bound − BOUND_TOLERANCE`.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Largest quantum violation, `5 − 4√5`.
pub fn quantum_max() -> f64 {
    5.0 - 4.0 * 5f64.sqrt()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KcbsError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Qsl(#[from] QslError),
    #[error("context {0} missing from the KCBS sum")]
    MissingContext(usize),
    #[error("context {0} supplied more than once")]
    DuplicateContext(usize),
    #[error("context {context}: {reason}")]
    BadStatistics { context: usize, reason: String },
}

/// Click statistics of one context.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextResult {
    pub context: usize,
    pub p_first: Probability,
    pub p_second: Probability,
    pub p_neither: Probability,
    pub backend: String,
}

impl ContextResult {
    pub fn new(
        context: usize,
        p_first: Probability,
        p_second: Probability,
        p_neither: Probability,
        backend: impl Into<String>,
    ) -> Result<Self, KcbsError> {
        let r = Self {
            context,
            p_first,
            p_second,
            p_neither,
            backend: backend.into(),
        };
        r.check()?;
        Ok(r)
    }

    /// Reads a context's statistics off a terminal distribution; any outcome
    /// other than one of the two detectors or no click is rejected.
    pub fn from_distribution(
        context: usize,
        dist: &OutcomeDistribution,
        backend: impl Into<String>,
    ) -> Result<Self, KcbsError> {
        let (first, second) = context_detectors(context)?;
        if let Some(other) = dist
            .labels()
            .find(|l| ![first, second, NO_CLICK].contains(l))
        {
            return Err(KcbsError::BadStatistics {
                context,
                reason: format!("unexpected outcome `{other}`"),
            });
        }
        Self::new(
            context,
            dist.get(first),
            dist.get(second),
            dist.get(NO_CLICK),
            backend,
        )
    }

    pub fn is_exact(&self) -> bool {
        self.p_first.is_exact() && self.p_second.is_exact() && self.p_neither.is_exact()
    }

    fn check(&self) -> Result<(), KcbsError> {
        let bad = |reason: String| KcbsError::BadStatistics {
            context: self.context,
            reason,
        };
        let all = [&self.p_first, &self.p_second, &self.p_neither];
        if all.iter().any(|p| p.is_negative()) {
            return Err(bad("negative probability".into()));
        }
        let total = self.p_first.clone() + self.p_second.clone() + self.p_neither.clone();
        let normalized = match &total {
            Probability::Exact(t) => t.is_one(),
            Probability::Float(t) => (t - 1.0).abs() <= 1e-12,
        };
        if !normalized {
            return Err(bad(format!("probabilities sum to {total}")));
        }
        Ok(())
    }
}

/// `E = p_neither − p_first − p_second`.
pub fn context_expectation(r: &ContextResult) -> Result<Probability, KcbsError> {
    r.check()?;
    Ok(r.p_neither.clone() - r.p_first.clone() - r.p_second.clone())
}

/// Sum of the five correlators; each context must appear exactly once.
pub fn kcbs_sum(results: &[ContextResult]) -> Result<Probability, KcbsError> {
    let mut seen = [false; HOFMANN_CONTEXTS];
    for r in results {
        let slot = r
            .context
            .checked_sub(1)
            .filter(|&i| i < HOFMANN_CONTEXTS)
            .ok_or(CircuitError::ContextOutOfRange(r.context))?;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(KcbsError::DuplicateContext(r.context));
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(KcbsError::MissingContext(missing + 1));
    }
    let mut values = results.iter().map(context_expectation);
    let first = values.next().expect("five contexts")?;
    values.try_fold(first, |acc, e| Ok(acc + e?))
}

/// Result of the exhaustive search over deterministic ±1 assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcBound {
    pub minimum: i64,
    pub minimizer: [i8; 5],
    pub minimizer_count: usize,
    pub maximum: i64,
}

/// Minimizes `Σ A_k A_{k+1}` (cyclic) over all 32 assignments `A_k = ±1`.
pub fn nc_bound_bruteforce() -> NcBound {
    let assignments = (0u32..32).map(|bits| {
        let mut a = [1i8; 5];
        for (i, v) in a.iter_mut().enumerate() {
            if bits & (1 << i) != 0 {
                *v = -1;
            }
        }
        let sum: i64 = (0..5).map(|k| i64::from(a[k] * a[(k + 1) % 5])).sum();
        (sum, a)
    });
    let all: Vec<_> = assignments.collect();
    let minimum = all.iter().map(|(s, _)| *s).min().expect("nonempty");
    let maximum = all.iter().map(|(s, _)| *s).max().expect("nonempty");
    let minimizers: Vec<_> = all.iter().filter(|(s, _)| *s == minimum).collect();
    NcBound {
        minimum,
        minimizer: minimizers[0].1,
        minimizer_count: minimizers.len(),
        maximum,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    ConsistentWithNoncontextual,
    Contextual,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::ConsistentWithNoncontextual => "consistent-with-noncontextual",
            Classification::Contextual => "contextual",
        })
    }
}

/// Contextual iff the sum lies strictly below −3 (by more than
/// [`BOUND_TOLERANCE`] for floating-point sums).
pub fn classify(sum: &Probability) -> Classification {
    let below = match sum {
        Probability::Exact(s) => *s < BigRational::from_integer(BigInt::from(NONCONTEXTUAL_BOUND)),
        Probability::Float(s) => *s < NONCONTEXTUAL_BOUND as f64 - BOUND_TOLERANCE,
    };
    if below {
        Classification::Contextual
    } else {
        Classification::ConsistentWithNoncontextual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QslEngine {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Quantum amplitudes; `exact` selects surd arithmetic over `f64`.
    Fock { exact: bool },
    Qsl {
        modulus: PhaseModulus,
        engine: QslEngine,
    },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Fock { .. } => "fock",
            Backend::Qsl { .. } => "qsl",
        }
    }

    fn context_circuit(&self, context: usize) -> Result<Circuit, KcbsError> {
        Ok(match self {
            Backend::Fock { .. } => build_hofmann_context(context)?,
            Backend::Qsl { modulus, .. } => build_hofmann_qsl(modulus.get(), context)?,
        })
    }

    /// Terminal distribution of `circuit` on this backend.
    pub fn run(&self, circuit: &Circuit) -> Result<OutcomeDistribution, KcbsError> {
        Ok(match *self {
            Backend::Fock { exact: true } => fock::run::<Surd>(circuit)?,
            Backend::Fock { exact: false } => fock::run::<f64>(circuit)?,
            Backend::Qsl {
                modulus,
                engine: QslEngine::Exact,
            } => qsl::run_exact(circuit, modulus)?,
            Backend::Qsl {
                modulus,
                engine: QslEngine::Sampled { samples, seed },
            } => qsl::run_sampled(circuit, modulus, samples, seed)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KcbsReport {
    pub backend: String,
    pub contexts: Vec<ContextResult>,
    pub correlators: Vec<Probability>,
    pub sum: Probability,
    pub noncontextual_bound: i64,
    pub quantum_max: f64,
    pub classification: Classification,
    /// Click probability of `A1` in context 1.
    pub a1_marginal: Probability,
    /// Raw click probability of `A1'` in context 5, reported as `A1` in the sum.
    pub a1_prime_marginal: Probability,
}

/// Evaluates all five contexts on `backend` and assembles the report.
pub fn run_kcbs(backend: Backend) -> Result<KcbsReport, KcbsError> {
    let contexts = (1..=HOFMANN_CONTEXTS)
        .into_par_iter()
        .map(|c| {
            let dist = backend.run(&backend.context_circuit(c)?)?;
            ContextResult::from_distribution(c, &dist, backend.name())
        })
        .collect::<Result<Vec<_>, _>>()?;
    report(backend.name(), contexts)
}

/// Builds a report from the five context results.
pub fn report(backend: &str, contexts: Vec<ContextResult>) -> Result<KcbsReport, KcbsError> {
    let sum = kcbs_sum(&contexts)?;
    let correlators = contexts
        .iter()
        .map(context_expectation)
        .collect::<Result<Vec<_>, _>>()?;
    let by_context = |c: usize| {
        contexts
            .iter()
            .find(|r| r.context == c)
            .expect("checked by kcbs_sum")
    };
    Ok(KcbsReport {
        backend: backend.to_string(),
        a1_marginal: by_context(1).p_first.clone(),
        a1_prime_marginal: by_context(5).p_second.clone(),
        classification: classify(&sum),
        correlators,
        sum,
        noncontextual_bound: NONCONTEXTUAL_BOUND,
        quantum_max: quantum_max(),
        contexts,
    })
}

/// Path probabilities (top, mid, bottom) before the chain and after each of
/// its five beamsplitters.
pub fn chain_segments<A: Amplitude>(
    input: &FockState<A>,
) -> Result<Vec<[Probability; 3]>, KcbsError> {
    let mut state = input.clone();
    let row = |s: &FockState<A>| -> Result<[Probability; 3], KcbsError> {
        let p = s.probabilities()?;
        Ok([
            p[1].to_probability()?,
            p[2].to_probability()?,
            p[3].to_probability()?,
        ])
    };
    let mut rows = vec![row(&state)?];
    for (upper, lower, ratio) in hofmann_chain() {
        state.apply_beamsplitter(upper, lower, ratio)?;
        rows.push(row(&state)?);
    }
    Ok(rows)
}

/// Evidence for identifying `A1'` with `A1`: a photon entering the top port
/// of the full chain leaves through the bottom port.
#[derive(Debug, Clone, PartialEq)]
pub struct A1Consistency {
    pub segments: Vec<[Probability; 3]>,
    pub bottom_exit: Probability,
    pub consistent: bool,
}

/// Runs `|100⟩` through the five-beamsplitter chain on the Fock backend.
pub fn check_a1_consistency(exact: bool) -> Result<A1Consistency, KcbsError> {
    let segments = if exact {
        chain_segments(&FockState::<Surd>::single_photon(3, 0)?)?
    } else {
        chain_segments(&FockState::<f64>::single_photon(3, 0)?)?
    };
    let bottom_exit = segments.last().expect("six rows")[2].clone();
    let consistent = match &bottom_exit {
        Probability::Exact(p) => p.is_one(),
        Probability::Float(p) => (p - 1.0).abs() <= 1e-12,
    };
    Ok(A1Consistency {
        segments,
        bottom_exit,
        consistent,
    })
}

/// Same check on the QSL backend: exact probability that a top-port photon
/// exits the full chain at the bottom.
pub fn qsl_bottom_exit(modulus: PhaseModulus) -> Result<BigRational, KcbsError> {
    let mut c = Circuit::new(3, Source::Path(0))?;
    for (upper, lower, ratio) in hofmann_chain() {
        c.beamsplitter(upper, lower, ratio)?;
    }
    c.detector(2, "bottom")?;
    let dist = qsl::run_exact(&c, modulus)?;
    Ok(dist
        .get("bottom")
        .as_exact()
        .cloned()
        .unwrap_or_else(BigRational::zero))
}
