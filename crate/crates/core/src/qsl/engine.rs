//! Exact enumeration and seeded sampling over the QSL ensemble.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{OnticState, PhaseModulus, QslError};
use crate::circuits::{Circuit, Element, Source};
use crate::outcome::{outcome_label, OutcomeDistribution, SamplingInfo};

/// Largest ensemble `run_exact` will enumerate.
pub const MAX_ENUMERATION: u64 = 1 << 28;

/// Samples per deterministic RNG substream.
const CHUNK: u64 = 1 << 16;

/// Terminal result of one deterministic run: explosion flag and the bitmask
/// of clicking detectors (in detector order).
type RunKey = (bool, u64);

struct Plan<'a> {
    circuit: &'a Circuit,
    source: usize,
    modulus: PhaseModulus,
    labels: Vec<&'a str>,
    random_draws: usize,
}

impl<'a> Plan<'a> {
    fn new(circuit: &'a Circuit, modulus: PhaseModulus) -> Result<Self, QslError> {
        circuit.validate().map_err(|issues| {
            QslError::InvalidCircuit(
                issues
                    .iter()
                    .map(|i| format!("element {}: {}", i.element, i.message))
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
        let source = match circuit.source() {
            Source::Path(p) => *p,
            Source::Superposition(_) => return Err(QslError::SuperpositionSource),
        };
        for ratio in circuit.ratios() {
            modulus.scale(*ratio)?;
        }
        let labels = circuit.detector_labels();
        if labels.len() > 64 {
            return Err(QslError::InvalidCircuit("more than 64 detectors".into()));
        }
        let random_draws = circuit
            .elements()
            .iter()
            .filter(|e| {
                matches!(
                    e,
                    Element::Bomb { live: true, .. } | Element::Dephaser { .. }
                )
            })
            .count();
        Ok(Self {
            circuit,
            source,
            modulus,
            labels,
            random_draws,
        })
    }

    /// Number of uniform mod-n values one run consumes: one phase per path
    /// plus one per live bomb or dephaser.
    fn dimensions(&self) -> usize {
        self.circuit.paths() + self.random_draws
    }

    fn run(&self, values: &[u64]) -> Result<RunKey, QslError> {
        let (phases, randomness) = values.split_at(self.circuit.paths());
        let mut state = OnticState::single_photon(self.modulus, self.source, phases)?;
        let mut draws = randomness.iter();
        let mut exploded = false;
        let mut clicks = 0u64;
        let mut detector = 0;
        for element in self.circuit.elements() {
            match element {
                Element::Beamsplitter {
                    upper,
                    lower,
                    ratio,
                } => state.beamsplitter(*upper, *lower, *ratio)?,
                Element::Bomb { path, live: true } => {
                    exploded |= state.bomb(*path, *draws.next().expect("draw"))?
                }
                Element::Bomb { live: false, .. } => {}
                Element::Dephaser { path } => state.dephase(*path, *draws.next().expect("draw"))?,
                Element::Detector { path, .. } => {
                    if state.detect(*path)? {
                        clicks |= 1 << detector;
                    }
                    detector += 1;
                }
            }
        }
        Ok((exploded, clicks))
    }

    fn label(&self, key: RunKey) -> String {
        let clicks: Vec<&str> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(i, _)| key.1 & (1 << i) != 0)
            .map(|(_, l)| *l)
            .collect();
        outcome_label(key.0, &clicks)
    }

    fn merge_labels(&self, counts: HashMap<RunKey, u64>) -> BTreeMap<String, u64> {
        let mut by_label = BTreeMap::new();
        for (key, count) in counts {
            *by_label.entry(self.label(key)).or_insert(0) += count;
        }
        by_label
    }
}

fn merge(mut a: HashMap<RunKey, u64>, b: HashMap<RunKey, u64>) -> HashMap<RunKey, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Modulus from the circuit's `modulus` line, else the lcm of its ratio
/// denominators (at least 2).
pub fn default_modulus(circuit: &Circuit) -> PhaseModulus {
    let m = circuit
        .modulus()
        .unwrap_or_else(|| circuit.natural_modulus())
        .max(2);
    PhaseModulus::new(m).expect("modulus >= 2")
}

/// Exhaustive average over every initial phase assignment and every value of
/// the bomb/dephaser randomness, each with equal weight.
pub fn run_exact(
    circuit: &Circuit,
    modulus: PhaseModulus,
) -> Result<OutcomeDistribution, QslError> {
    let plan = Plan::new(circuit, modulus)?;
    let n = modulus.get();
    let dims = plan.dimensions();
    let total = u32::try_from(dims)
        .ok()
        .and_then(|d| n.checked_pow(d))
        .filter(|&t| t <= MAX_ENUMERATION)
        .ok_or_else(|| QslError::EnumerationTooLarge(format!("{n}^{dims}")))?;

    let counts = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0u64; dims],
            |values, mut index| {
                for v in values.iter_mut() {
                    *v = index % n;
                    index /= n;
                }
                plan.run(values)
            },
        )
        .try_fold(HashMap::new, |mut acc, key| {
            *acc.entry(key?).or_insert(0u64) += 1;
            Ok::<_, QslError>(acc)
        })
        .try_reduce(HashMap::new, |a, b| Ok(merge(a, b)))?;

    let denominator = BigInt::from(total);
    let entries = plan.merge_labels(counts).into_iter().map(|(label, c)| {
        (
            label,
            BigRational::new(BigInt::from(c), denominator.clone()),
        )
    });
    OutcomeDistribution::exact(entries).map_err(|e| QslError::InvalidCircuit(e.to_string()))
}

/// Monte Carlo estimate from `samples` runs. Sample `i` draws from ChaCha8
/// stream `i / 65536` of `seed`, so the result does not depend on how the
/// work is split across threads.
pub fn run_sampled(
    circuit: &Circuit,
    modulus: PhaseModulus,
    samples: u64,
    seed: u64,
) -> Result<OutcomeDistribution, QslError> {
    if samples == 0 {
        return Err(QslError::ZeroSamples);
    }
    let plan = Plan::new(circuit, modulus)?;
    let n = modulus.get();
    let dims = plan.dimensions();
    let chunks = samples.div_ceil(CHUNK);

    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = CHUNK.min(samples - chunk * CHUNK);
            let mut values = vec![0u64; dims];
            let mut acc = HashMap::new();
            for _ in 0..len {
                for v in values.iter_mut() {
                    *v = rng.gen_range(0..n);
                }
                *acc.entry(plan.run(&values)?).or_insert(0u64) += 1;
            }
            Ok::<_, QslError>(acc)
        })
        .try_reduce(HashMap::new, |a, b| Ok(merge(a, b)))?;

    let entries = plan
        .merge_labels(counts)
        .into_iter()
        .map(|(label, c)| (label, c as f64 / samples as f64));
    OutcomeDistribution::float(entries, Some(SamplingInfo { samples, seed }))
        .map_err(|e| QslError::InvalidCircuit(e.to_string()))
}
