//! Circuits for the bomb-tester and three-path interferometer experiments.

use std::fmt;
use std::str::FromStr;

use super::{AmplitudeSpec, Circuit, CircuitError, Element, Source};
use crate::ratio::BeamsplitterRatio;

/// Phase modulus that resolves every ratio of the three-path chain (lcm of 2, 3, 4).
pub const HOFMANN_MODULUS: u64 = 12;

pub const HOFMANN_CONTEXTS: usize = 5;

const TOP: usize = 0;
const MID: usize = 1;
const BOTTOM: usize = 2;

/// What sits in the upper internal arm of a bomb tester.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BombMode {
    Dud,
    Live,
    Dephase,
}

impl fmt::Display for BombMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BombMode::Dud => "dud",
            BombMode::Live => "live",
            BombMode::Dephase => "dephase",
        })
    }
}

impl FromStr for BombMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dud" => Ok(BombMode::Dud),
            "live" => Ok(BombMode::Live),
            "dephase" => Ok(BombMode::Dephase),
            other => Err(format!(
                "unknown bomb mode `{other}` (expected dud, live or dephase)"
            )),
        }
    }
}

/// Two-path bomb tester: photon in the upper port, `BS(k/n)`, the arm
/// element on the upper internal path, `BS((n-k)/n)`, detectors `upper`
/// and `lower`. A dud bomb stays in the circuit as a no-op element.
pub fn build_ev(ratio: BeamsplitterRatio, mode: BombMode) -> Result<Circuit, CircuitError> {
    if !ratio.is_mixing() {
        return Err(CircuitError::DegenerateRatio(ratio));
    }
    let mut c = Circuit::new(2, Source::Path(0))?;
    c.beamsplitter(0, 1, ratio)?;
    c.push(match mode {
        BombMode::Dud => Element::Bomb {
            path: 0,
            live: false,
        },
        BombMode::Live => Element::Bomb {
            path: 0,
            live: true,
        },
        BombMode::Dephase => Element::Dephaser { path: 0 },
    })?;
    c.beamsplitter(0, 1, ratio.complement())?;
    c.detector(0, "upper")?.detector(1, "lower")?;
    Ok(c)
}

fn ratio(k: u64, n: u64) -> BeamsplitterRatio {
    BeamsplitterRatio::new(k, n).expect("constant ratio")
}

/// The five beamsplitters `(upper, lower, ratio)` of the three-path chain.
pub fn hofmann_chain() -> [(usize, usize, BeamsplitterRatio); 5] {
    [
        (MID, BOTTOM, ratio(1, 2)),
        (TOP, MID, ratio(1, 3)),
        (MID, BOTTOM, ratio(1, 4)),
        (TOP, MID, ratio(1, 3)),
        (MID, BOTTOM, ratio(1, 2)),
    ]
}

/// Two beamsplitters taking a photon in the top path to the equal
/// three-path superposition.
pub fn hofmann_preparation() -> [(usize, usize, BeamsplitterRatio); 2] {
    [(TOP, MID, ratio(1, 3)), (MID, BOTTOM, ratio(1, 2))]
}

/// Detector labels `(top, bottom)` read out in context `c`. Context 5's
/// bottom detector is `A1'`, later identified with `A1`.
pub fn context_detectors(c: usize) -> Result<(&'static str, &'static str), CircuitError> {
    match c {
        1 => Ok(("A1", "A2")),
        2 => Ok(("A3", "A2")),
        3 => Ok(("A3", "A4")),
        4 => Ok(("A5", "A4")),
        5 => Ok(("A5", "A1'")),
        _ => Err(CircuitError::ContextOutOfRange(c)),
    }
}

fn append_context(c: &mut Circuit, context: usize) -> Result<(), CircuitError> {
    let (top, bottom) = context_detectors(context)?;
    for (upper, lower, r) in hofmann_chain().into_iter().take(context) {
        c.beamsplitter(upper, lower, r)?;
    }
    c.detector(TOP, top)?.detector(BOTTOM, bottom)?;
    Ok(())
}

/// Context `c` of the three-path interferometer, fed by the equal superposition.
pub fn build_hofmann_context(context: usize) -> Result<Circuit, CircuitError> {
    context_detectors(context)?;
    let third = AmplitudeSpec::sqrt(false, 1, 3);
    let mut c = Circuit::new(3, Source::Superposition(vec![third; 3]))?;
    append_context(&mut c, context)?;
    Ok(c)
}

/// Context `c` fed by a definite-path photon through the preparation stage,
/// runnable on the QSL backend.
pub fn build_hofmann_qsl(modulus: u64, context: usize) -> Result<Circuit, CircuitError> {
    if modulus == 0 || !modulus.is_multiple_of(HOFMANN_MODULUS) {
        return Err(CircuitError::ModulusNotMultipleOf12(modulus));
    }
    context_detectors(context)?;
    let mut c = Circuit::new(3, Source::Path(TOP))?.with_modulus(Some(modulus));
    for (upper, lower, r) in hofmann_preparation() {
        c.beamsplitter(upper, lower, r)?;
    }
    append_context(&mut c, context)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{parse, serialize};

    #[test]
    fn ev_topology() {
        let c = build_ev(ratio(1, 3), BombMode::Live).unwrap();
        let text = serialize(&c);
        assert_eq!(text, "paths 2\nsource 0\nbs 0 1 1/3\nbomb 0 live\nbs 0 1 2/3\ndetect 0 upper\ndetect 1 lower\n");
        assert!(c.validate().is_ok());
        assert_eq!(c.natural_modulus(), 3);
    }

    #[test]
    fn ev_rejects_degenerate() {
        assert!(matches!(
            build_ev(ratio(0, 2), BombMode::Live),
            Err(CircuitError::DegenerateRatio(_))
        ));
        assert!(matches!(
            build_ev(ratio(2, 2), BombMode::Dud),
            Err(CircuitError::DegenerateRatio(_))
        ));
    }

    #[test]
    fn hofmann_contexts() {
        let c5 = build_hofmann_context(5).unwrap();
        assert_eq!(c5.elements().len(), 7);
        assert_eq!(c5.detector_labels(), vec!["A5", "A1'"]);
        assert_eq!(c5.natural_modulus(), 12);
        assert!(build_hofmann_context(0).is_err());
        assert!(build_hofmann_context(6).is_err());
        let c1 = build_hofmann_context(1).unwrap();
        assert_eq!(
            serialize(&c1),
            "paths 3\nsource-superposition sqrt(1/3) sqrt(1/3) sqrt(1/3)\nbs 1 2 1/2\ndetect 0 A1\ndetect 2 A2\n"
        );
    }

    #[test]
    fn hofmann_qsl() {
        let c = build_hofmann_qsl(12, 5).unwrap();
        assert_eq!(
            c.elements()
                .iter()
                .filter(|e| matches!(e, Element::Beamsplitter { .. }))
                .count(),
            7
        );
        assert_eq!(c.modulus(), Some(12));
        assert!(build_hofmann_qsl(24, 1).is_ok());
        assert_eq!(
            build_hofmann_qsl(10, 1),
            Err(CircuitError::ModulusNotMultipleOf12(10))
        );
    }

    #[test]
    fn builders_round_trip() {
        let mut all = Vec::new();
        for mode in [BombMode::Dud, BombMode::Live, BombMode::Dephase] {
            for n in 2..=8 {
                for k in 1..n {
                    all.push(build_ev(ratio(k, n), mode).unwrap());
                }
            }
        }
        for c in 1..=5 {
            all.push(build_hofmann_context(c).unwrap());
            all.push(build_hofmann_qsl(12, c).unwrap());
        }
        for c in all {
            assert!(c.validate().is_ok());
            assert_eq!(parse(&serialize(&c)).unwrap(), c);
        }
    }
}
