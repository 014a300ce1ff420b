//! Thermodynamic formalism for one-sided sub-shifts of finite type and the
//! suspension semi-flows built over them.
//!
//! Potentials are locally constant (they depend on finitely many leading
//! coordinates), which makes pressure, equilibrium states and flow entropy
//! computable from Perron eigendata of weighted transition matrices. Every
//! quantity has a brute-force counterpart (periodic-orbit partition sums,
//! randomized variational search) used by the test suite and by `verify`.
//!
//! Module map:
//!
//! * [`sft`]: shift spaces, admissible words, periodic points.
//! * [`potential`]: locally constant potentials and roof functions.
//! * [`pressure`]: pressure, entropy, equilibrium Markov measures, oracles.
//! * [`bowen`]: the root equation `t -> P(delta - t * roof) = 0`.
//! * [`suspension`]: flow measures, Abramov and Kac formulas, flow pressure.
//! * [`perturbation`]: entropy/pressure-preserving roof and observable
//!   perturbations and almost-equilibrium witnesses.
//! * [`model`], [`report`], [`verify`]: the file-driven front end.

pub mod bowen;
pub mod error;
pub mod model;
pub mod perturbation;
pub mod potential;
pub mod pressure;
pub mod report;
pub mod rng;
pub mod sft;
pub mod suspension;
pub mod verify;

pub use bowen::{BowenProblem, BowenSolution};
pub use error::{Error, Result};
pub use potential::{LcPotential, Roof};
pub use pressure::{MarkovMeasure, PressureResult};
pub use sft::{Sft, Word};
pub use suspension::{FiberPotential, FlowMeasure};
