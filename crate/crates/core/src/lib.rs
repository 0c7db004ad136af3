//! Single-photon interferometry on two backends.
//!
//! * [`qsl`] is an extended Quantum Simulation Logic model: a noncontextual
//!   hidden-variable theory with discrete phase coordinates that reproduces
//!   the Elitzur-Vaidman bomb tester, including unbalanced beamsplitters.
//! * [`fock`] is the quantum reference on the zero/one-photon subspace, in
//!   floating point or exact surd arithmetic.
//! * [`circuits`] holds the shared circuit representation, its text format
//!   and builders for the bomb tester and Hofmann's three-path interferometer.
//! * [`contextuality`] evaluates the KCBS inequality on either backend.

pub mod circuits;
pub mod contextuality;
pub mod fock;
pub mod outcome;
pub mod qsl;
pub mod ratio;
pub mod surd;

pub use circuits::{Circuit, Element, Source};
pub use outcome::{OutcomeDistribution, Probability};
pub use qsl::{OnticState, PhaseModulus, QslMode};
pub use ratio::BeamsplitterRatio;
