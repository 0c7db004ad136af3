//! Extended Quantum Simulation Logic: a noncontextual hidden-variable model
//! of zero/one-photon interferometry.
//!
//! Each path carries a mode `(z, y)`: `z` is the photon-presence bit and `y`
//! a phase coordinate modulo `n`. Every gate is a deterministic map of the
//! ontic state; observable statistics arise from averaging over uniformly
//! random phases (and the fresh randomness drawn by bombs and dephasers).

pub mod bits;
mod engine;

use std::fmt;

use thiserror::Error;

use crate::ratio::BeamsplitterRatio;

pub use engine::{default_modulus, run_exact, run_sampled, MAX_ENUMERATION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QslError {
    #[error("phase modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("path {path} out of range for {paths} modes")]
    PathOutOfRange { path: usize, paths: usize },
    #[error("gate needs two distinct paths, got {0} twice")]
    SamePath(usize),
    #[error("ratio {ratio} is not representable with phase modulus {modulus}")]
    IncompatibleRatio {
        ratio: BeamsplitterRatio,
        modulus: u64,
    },
    #[error("overflow threshold {k} outside [0, {n}]")]
    ThresholdOutOfRange { k: u64, n: u64 },
    #[error("phase value {value} outside [0, {modulus})")]
    PhaseOutOfRange { value: u64, modulus: u64 },
    #[error("path {0} was already consumed by a detector")]
    PathConsumed(usize),
    #[error("the QSL backend needs a definite-path source, not a superposition")]
    SuperpositionSource,
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("enumeration over {0} ontic states exceeds the supported size")]
    EnumerationTooLarge(String),
}

/// Modulus `n >= 2` of the phase coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseModulus(u64);

impl PhaseModulus {
    pub fn new(n: u64) -> Result<Self, QslError> {
        if n < 2 {
            Err(QslError::ModulusTooSmall(n))
        } else {
            Ok(Self(n))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Threshold `k` of `ratio` expressed at this modulus.
    pub fn scale(self, ratio: BeamsplitterRatio) -> Result<u64, QslError> {
        ratio.scaled_to(self.0).ok_or(QslError::IncompatibleRatio {
            ratio,
            modulus: self.0,
        })
    }
}

impl fmt::Display for PhaseModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One path's `(z, y)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QslMode {
    pub z: u8,
    pub y: u64,
}

impl QslMode {
    pub fn new(z: u8, y: u64) -> Self {
        Self { z, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnotSign {
    Plus,
    Minus,
}

/// Overflow indicator: 1 iff the least non-negative residue of `x` mod `n` is `>= k`.
pub fn delta(x: u64, k: u64, n: PhaseModulus) -> Result<u8, QslError> {
    if k > n.0 {
        return Err(QslError::ThresholdOutOfRange { k, n: n.0 });
    }
    Ok(u8::from(x % n.0 >= k))
}

/// Full hidden-variable assignment of an `m`-path interferometer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnticState {
    modulus: PhaseModulus,
    modes: Vec<QslMode>,
    consumed: Vec<bool>,
}

impl OnticState {
    pub fn new(modulus: PhaseModulus, modes: Vec<QslMode>) -> Result<Self, QslError> {
        for m in &modes {
            if m.z > 1 {
                return Err(QslError::PhaseOutOfRange {
                    value: u64::from(m.z),
                    modulus: 2,
                });
            }
            if m.y >= modulus.0 {
                return Err(QslError::PhaseOutOfRange {
                    value: m.y,
                    modulus: modulus.0,
                });
            }
        }
        let consumed = vec![false; modes.len()];
        Ok(Self {
            modulus,
            modes,
            consumed,
        })
    }

    /// A photon in `path` and the given phase coordinates on all paths.
    pub fn single_photon(
        modulus: PhaseModulus,
        path: usize,
        phases: &[u64],
    ) -> Result<Self, QslError> {
        if path >= phases.len() {
            return Err(QslError::PathOutOfRange {
                path,
                paths: phases.len(),
            });
        }
        let modes = phases
            .iter()
            .enumerate()
            .map(|(i, &y)| QslMode::new(u8::from(i == path), y))
            .collect();
        Self::new(modulus, modes)
    }

    pub fn modulus(&self) -> PhaseModulus {
        self.modulus
    }

    pub fn modes(&self) -> &[QslMode] {
        &self.modes
    }

    pub fn mode(&self, path: usize) -> QslMode {
        self.modes[path]
    }

    pub fn photon_count(&self) -> usize {
        self.modes.iter().filter(|m| m.z == 1).count()
    }

    fn check(&self, path: usize) -> Result<(), QslError> {
        if path >= self.modes.len() {
            return Err(QslError::PathOutOfRange {
                path,
                paths: self.modes.len(),
            });
        }
        if self.consumed[path] {
            return Err(QslError::PathConsumed(path));
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<(), QslError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(QslError::SamePath(a));
        }
        Ok(())
    }

    fn check_random(&self, w: u64) -> Result<(), QslError> {
        if w >= self.modulus.0 {
            return Err(QslError::PhaseOutOfRange {
                value: w,
                modulus: self.modulus.0,
            });
        }
        Ok(())
    }

    /// `(z1, y1)(z2, y2) -> (z1, y1 ± y2)(z2 ± z1, y2)`.
    pub fn cnot(&mut self, control: usize, target: usize, sign: CnotSign) -> Result<(), QslError> {
        self.check_pair(control, target)?;
        let n = self.modulus.0;
        let t = self.modes[target];
        let c = &mut self.modes[control];
        c.y = match sign {
            CnotSign::Plus => (c.y + t.y) % n,
            CnotSign::Minus => (c.y + n - t.y) % n,
        };
        let cz = c.z;
        self.modes[target].z ^= cz;
        Ok(())
    }

    /// `(z, y) -> (z + delta(y, k, n), y - k)` with `k` rescaled to the state modulus.
    pub fn ry(&mut self, path: usize, ratio: BeamsplitterRatio) -> Result<(), QslError> {
        self.check(path)?;
        let k = self.modulus.scale(ratio)?;
        let n = self.modulus;
        let m = &mut self.modes[path];
        m.z ^= delta(m.y, k, n)?;
        m.y = (m.y + n.0 - k) % n.0;
        Ok(())
    }

    /// Kickback-free controlled rotation: `ry` on `target` iff the control's `z` is 1.
    pub fn cry(
        &mut self,
        target: usize,
        control: usize,
        ratio: BeamsplitterRatio,
    ) -> Result<(), QslError> {
        self.check_pair(target, control)?;
        self.modulus.scale(ratio)?;
        if self.modes[control].z == 1 {
            self.ry(target, ratio)?;
        }
        Ok(())
    }

    /// Beamsplitter as `CNOT-`, controlled rotation, `CNOT+`, with the upper
    /// path as system 1 and the lower path as system 2.
    pub fn beamsplitter(
        &mut self,
        upper: usize,
        lower: usize,
        ratio: BeamsplitterRatio,
    ) -> Result<(), QslError> {
        self.check_pair(upper, lower)?;
        self.modulus.scale(ratio)?;
        self.cnot(upper, lower, CnotSign::Minus)?;
        self.cry(upper, lower, ratio)?;
        self.cnot(upper, lower, CnotSign::Plus)
    }

    /// Removes any photon at `path` and replaces its phase with `w`; returns
    /// whether a photon was absorbed.
    pub fn bomb(&mut self, path: usize, w: u64) -> Result<bool, QslError> {
        self.check(path)?;
        self.check_random(w)?;
        let exploded = self.modes[path].z == 1;
        self.modes[path] = QslMode::new(0, w);
        Ok(exploded)
    }

    /// Non-demolition which-path measurement: the phase is replaced by `w`.
    pub fn dephase(&mut self, path: usize, w: u64) -> Result<(), QslError> {
        self.check(path)?;
        self.check_random(w)?;
        self.modes[path].y = w;
        Ok(())
    }

    /// Terminal readout of the presence bit; the path cannot be used again.
    pub fn detect(&mut self, path: usize) -> Result<bool, QslError> {
        self.check(path)?;
        self.consumed[path] = true;
        Ok(self.modes[path].z == 1)
    }
}
