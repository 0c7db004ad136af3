//! The original balanced-beamsplitter model on bit pairs `(z, x)`.
//!
//! Only 50:50 splitters are expressible. The mod-n model reduces to this one
//! at `n = 2` under `y = x + z`; [`run_bit_pair`] exists as a reference to
//! test that reduction against.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::QslError;
use crate::circuits::{Circuit, Element, Source};
use crate::outcome::{outcome_label, OutcomeDistribution};
use crate::ratio::BeamsplitterRatio;

/// `(z, x)`: photon bit and phase bit.
pub type BitMode = (u8, u8);

/// `(z1,x1)(z2,x2) -> (z1, x1+x2)(z1+z2, x2)`.
pub fn cnot(control: BitMode, target: BitMode) -> (BitMode, BitMode) {
    (
        (control.0, control.1 ^ target.1),
        (control.0 ^ target.0, target.1),
    )
}

/// `(z, x) -> (x, !z)`.
pub fn ry(mode: BitMode) -> BitMode {
    (mode.1, 1 - mode.0)
}

/// Applies [`ry`] to `target` when the control's photon bit is set.
pub fn controlled_ry(target: BitMode, control: BitMode) -> BitMode {
    if control.0 == 1 {
        ry(target)
    } else {
        target
    }
}

pub fn beamsplitter(modes: &mut [BitMode], upper: usize, lower: usize) {
    let (u, l) = cnot(modes[upper], modes[lower]);
    let u = controlled_ry(u, l);
    let (u, l) = cnot(u, l);
    modes[upper] = u;
    modes[lower] = l;
}

/// Exact distribution of `circuit` in the bit-pair model, enumerating every
/// phase bit and every bomb/dephaser bit.
pub fn run_bit_pair(circuit: &Circuit) -> Result<OutcomeDistribution, QslError> {
    circuit
        .validate()
        .map_err(|issues| QslError::InvalidCircuit(format!("{} issue(s)", issues.len())))?;
    let source = match circuit.source() {
        Source::Path(p) => *p,
        Source::Superposition(_) => return Err(QslError::SuperpositionSource),
    };
    let half = BeamsplitterRatio::new(1, 2).expect("1/2");
    if let Some(r) = circuit.ratios().find(|r| **r != half) {
        return Err(QslError::IncompatibleRatio {
            ratio: *r,
            modulus: 2,
        });
    }
    let draws = circuit
        .elements()
        .iter()
        .filter(|e| {
            matches!(
                e,
                Element::Bomb { live: true, .. } | Element::Dephaser { .. }
            )
        })
        .count();
    let dims = circuit.paths() + draws;
    if dims >= 63 || (1u64 << dims) > super::MAX_ENUMERATION {
        return Err(QslError::EnumerationTooLarge(format!("2^{dims}")));
    }
    let total = 1u64 << dims;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for index in 0..total {
        let bit = |i: usize| ((index >> i) & 1) as u8;
        let mut modes: Vec<BitMode> = (0..circuit.paths())
            .map(|p| (u8::from(p == source), bit(p)))
            .collect();
        let mut next = circuit.paths();
        let mut exploded = false;
        let mut clicks = Vec::new();
        for element in circuit.elements() {
            match element {
                Element::Beamsplitter { upper, lower, .. } => {
                    beamsplitter(&mut modes, *upper, *lower)
                }
                Element::Bomb { path, live: true } => {
                    exploded |= modes[*path].0 == 1;
                    modes[*path] = (0, bit(next));
                    next += 1;
                }
                Element::Bomb { live: false, .. } => {}
                Element::Dephaser { path } => {
                    modes[*path].1 = bit(next);
                    next += 1;
                }
                Element::Detector { path, label } => {
                    if std::mem::replace(&mut modes[*path].0, 0) == 1 {
                        clicks.push(label.as_str());
                    }
                }
            }
        }
        *counts.entry(outcome_label(exploded, &clicks)).or_insert(0) += 1;
    }
    let den = BigInt::from(total);
    OutcomeDistribution::exact(
        counts
            .into_iter()
            .map(|(l, c)| (l, BigRational::new(BigInt::from(c), den.clone()))),
    )
    .map_err(|e| QslError::InvalidCircuit(e.to_string()))
}
