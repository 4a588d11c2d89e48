//! Verification toolkit for hybrid quantum Markov chains and hybrid quantum
//! automata.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, the row-stacking `vec` map, Kronecker
//!   products, positivity tests and Gram-Schmidt residuals;
//! * [`quantum`]: Kraus-form quantum operations and density operators;
//! * [`models`]: hqMC, qMC, SL-hqMC, HQA, QA, bilinear machines and total DFAs;
//! * [`transforms`]: conversions between the models and the product with a DFA;
//! * [`equivalence`]: language and trace equivalence decision procedures;
//! * [`model_check`]: path measures, reachability and regular safety checking;
//! * [`io`]: the JSON interchange format;
//! * [`random`]: seeded generators of valid random models.

#![allow(clippy::needless_range_loop)]

pub mod equivalence;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model_check;
pub mod models;
pub mod quantum;
pub mod random;
pub mod transforms;

pub use equivalence::{EquivalenceVerdict, Mode};
pub use error::{Error, Result};
pub use io::Model;
pub use linalg::{ComplexMatrix, ComplexVector, C64, DEFAULT_TOL};
pub use model_check::{PathMeasure, ReachOptions, SafetyResult, SolveMethod};
pub use models::{
    Blm, Dfa, Fashion, HqMC, Hqa, Label, Qa, Qmc, SlHqMC, TransitionMatrix, ValidationReport,
};
pub use quantum::{DensityOperator, QuantumOperation};
