//! Circuit intermediate representation shared by both backends.
//!
//! Paths are indexed from 0 (topmost) downward. A circuit is a source
//! declaration followed by an ordered list of elements; detectors are
//! terminal and consume the path they read.

mod builders;
mod text;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::outcome::{EXPLODED, NO_CLICK};
use crate::ratio::{common_modulus, BeamsplitterRatio};

pub use crate::ratio::approximate_ratio;
pub use builders::{
    build_ev, build_hofmann_context, build_hofmann_qsl, context_detectors, hofmann_chain,
    hofmann_preparation, BombMode, HOFMANN_CONTEXTS, HOFMANN_MODULUS,
};
pub use text::{parse, parse_unchecked, serialize, Diagnostic, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("a circuit needs at least 2 paths, got {0}")]
    TooFewPaths(usize),
    #[error("path {path} out of range for a {paths}-path circuit")]
    PathOutOfRange { path: usize, paths: usize },
    #[error("superposition source has {got} amplitudes, circuit has {paths} paths")]
    SourceLength { got: usize, paths: usize },
    #[error("degenerate ratio {0}: the interferometer needs 0 < k < n")]
    DegenerateRatio(BeamsplitterRatio),
    #[error("context {0} out of range 1..=5")]
    ContextOutOfRange(usize),
    #[error("modulus {0} is not a multiple of 12")]
    ModulusNotMultipleOf12(u64),
    #[error("invalid circuit: {0}")]
    Invalid(String),
}

/// One amplitude of a superposition source, kept in the form it was written.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeSpec {
    Decimal(f64),
    /// `±sqrt(num/den)`, reduced to lowest terms.
    Sqrt {
        negative: bool,
        num: u64,
        den: u64,
    },
}

impl AmplitudeSpec {
    pub fn sqrt(negative: bool, num: u64, den: u64) -> Self {
        use num_integer::Integer;
        let g = num.gcd(&den).max(1);
        AmplitudeSpec::Sqrt {
            negative,
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            AmplitudeSpec::Decimal(x) => x,
            AmplitudeSpec::Sqrt { negative, num, den } => {
                let v = (num as f64 / den as f64).sqrt();
                if negative {
                    -v
                } else {
                    v
                }
            }
        }
    }
}

impl fmt::Display for AmplitudeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AmplitudeSpec::Decimal(x) => write!(f, "{x}"),
            AmplitudeSpec::Sqrt { negative, num, den } => {
                write!(f, "{}sqrt({num}/{den})", if negative { "-" } else { "" })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Single photon in a definite path.
    Path(usize),
    /// Single photon in superposition over all paths (Fock backend only).
    Superposition(Vec<AmplitudeSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Beamsplitter {
        upper: usize,
        lower: usize,
        ratio: BeamsplitterRatio,
    },
    Bomb {
        path: usize,
        live: bool,
    },
    Dephaser {
        path: usize,
    },
    Detector {
        path: usize,
        label: String,
    },
}

impl Element {
    pub fn paths(&self) -> Vec<usize> {
        match self {
            Element::Beamsplitter { upper, lower, .. } => vec![*upper, *lower],
            Element::Bomb { path, .. }
            | Element::Dephaser { path }
            | Element::Detector { path, .. } => vec![*path],
        }
    }
}

/// A problem found by [`Circuit::validate`], tied to an element index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub element: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    paths: usize,
    modulus: Option<u64>,
    source: Source,
    elements: Vec<Element>,
}

impl Circuit {
    pub fn new(paths: usize, source: Source) -> Result<Self, CircuitError> {
        if paths < 2 {
            return Err(CircuitError::TooFewPaths(paths));
        }
        match &source {
            Source::Path(p) if *p >= paths => {
                return Err(CircuitError::PathOutOfRange { path: *p, paths })
            }
            Source::Superposition(a) if a.len() != paths => {
                return Err(CircuitError::SourceLength {
                    got: a.len(),
                    paths,
                })
            }
            _ => {}
        }
        Ok(Self {
            paths,
            modulus: None,
            source,
            elements: Vec::new(),
        })
    }

    pub fn with_modulus(mut self, modulus: Option<u64>) -> Self {
        self.modulus = modulus;
        self
    }

    /// Appends an element; only index ranges are checked here.
    pub fn push(&mut self, element: Element) -> Result<&mut Self, CircuitError> {
        for path in element.paths() {
            if path >= self.paths {
                return Err(CircuitError::PathOutOfRange {
                    path,
                    paths: self.paths,
                });
            }
        }
        self.elements.push(element);
        Ok(self)
    }

    pub fn beamsplitter(
        &mut self,
        upper: usize,
        lower: usize,
        ratio: BeamsplitterRatio,
    ) -> Result<&mut Self, CircuitError> {
        self.push(Element::Beamsplitter {
            upper,
            lower,
            ratio,
        })
    }

    pub fn detector(&mut self, path: usize, label: &str) -> Result<&mut Self, CircuitError> {
        self.push(Element::Detector {
            path,
            label: label.to_string(),
        })
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn ratios(&self) -> impl Iterator<Item = &BeamsplitterRatio> {
        self.elements.iter().filter_map(|e| match e {
            Element::Beamsplitter { ratio, .. } => Some(ratio),
            _ => None,
        })
    }

    /// Least common multiple of all beamsplitter denominators.
    pub fn natural_modulus(&self) -> u64 {
        common_modulus(self.ratios())
    }

    pub fn detector_labels(&self) -> Vec<&str> {
        self.elements
            .iter()
            .filter_map(|e| match e {
                Element::Detector { label, .. } => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }

    /// At least one detector or bomb, so a run produces information.
    pub fn is_runnable(&self) -> bool {
        self.elements
            .iter()
            .any(|e| matches!(e, Element::Detector { .. } | Element::Bomb { .. }))
    }

    /// Collects every semantic problem: coincident beamsplitter ports,
    /// malformed or duplicate labels, and use of a path after its detector.
    pub fn validate(&self) -> Result<(), Vec<Issue>> {
        let mut issues = Vec::new();
        let mut consumed: Vec<Option<usize>> = vec![None; self.paths];
        let mut labels = HashSet::new();
        for (i, element) in self.elements.iter().enumerate() {
            let mut issue = |message: String| {
                issues.push(Issue {
                    element: i,
                    message,
                })
            };
            if let Element::Beamsplitter { upper, lower, .. } = element {
                if upper == lower {
                    issue(format!("beamsplitter ports coincide (path {upper})"));
                }
            }
            for path in element.paths() {
                if let Some(by) = consumed[path] {
                    issue(format!(
                        "path {path} was consumed by the detector at element {by}"
                    ));
                }
            }
            if let Element::Detector { path, label } = element {
                if let Err(msg) = check_label(label) {
                    issue(msg);
                }
                if !labels.insert(label.as_str()) {
                    issue(format!("duplicate detector label `{label}`"));
                }
                consumed[*path].get_or_insert(i);
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }
}

fn check_label(label: &str) -> Result<(), String> {
    if label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || c == '#' || c == '+')
    {
        return Err(format!("malformed detector label `{label}`"));
    }
    if label == EXPLODED || label == NO_CLICK {
        return Err(format!("detector label `{label}` is reserved"));
    }
    Ok(())
}
