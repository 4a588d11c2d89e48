use std::collections::BTreeSet;

use super::{
    check_unique, index_of, label_symbol, powerset, validate_distribution, Label, TransitionMatrix,
    ValidationReport,
};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, DEFAULT_TOL};
use crate::quantum::{DensityOperator, QuantumOperation};

/// A hybrid quantum Markov chain: classical states, an operation-valued
/// transition matrix and a positive-operator valued initial distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct HqMC {
    dim: usize,
    states: Vec<String>,
    trans: TransitionMatrix,
    init: Vec<ComplexMatrix>,
    tol: f64,
}

impl HqMC {
    /// Checks shapes only; call [`HqMC::validate`] for the semantic invariants.
    pub fn new(
        dim: usize,
        states: Vec<String>,
        trans: TransitionMatrix,
        init: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        check_unique(&states, "state")?;
        if trans.size() != states.len() || trans.dim() != dim {
            return Err(Error::dim(format!(
                "transition matrix is {0}x{0} over dimension {1}, expected {2} states over dimension {dim}",
                trans.size(),
                trans.dim(),
                states.len()
            )));
        }
        if init.len() != states.len() || init.iter().any(|m| m.shape() != (dim, dim)) {
            return Err(Error::dim(
                "initial distribution does not match states/dimension",
            ));
        }
        Ok(Self {
            dim,
            states,
            trans,
            init,
            tol: DEFAULT_TOL,
        })
    }

    /// Builds and validates.
    pub fn validated(
        dim: usize,
        states: Vec<String>,
        trans: TransitionMatrix,
        init: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let m = Self::new(dim, states, trans, init)?;
        m.validate().into_result()?;
        Ok(m)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn trans(&self) -> &TransitionMatrix {
        &self.trans
    }

    /// `M(target, source)`.
    pub fn op(&self, target: usize, source: usize) -> &QuantumOperation {
        self.trans.get(target, source)
    }

    pub fn init(&self) -> &[ComplexMatrix] {
        &self.init
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        index_of(&self.states, name).ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.trans.validate_columns(&self.states, "", self.tol);
        report.extend(validate_distribution(&self.init, &self.states, self.tol));
        report
    }

    /// One step `μ ↦ Mμ`.
    pub fn step(&self, mu: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        self.trans.step(mu)
    }

    /// `μ_n = Mⁿ μ₀`.
    pub fn distribution_at(&self, n: usize) -> Result<Vec<ComplexMatrix>> {
        let mut mu = self.init.clone();
        for _ in 0..n {
            mu = self.step(&mu)?;
        }
        Ok(mu)
    }
}

/// A quantum Markov chain `(E, ρ₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Qmc {
    op: QuantumOperation,
    init: DensityOperator,
    tol: f64,
}

impl Qmc {
    pub fn new(op: QuantumOperation, init: DensityOperator) -> Result<Self> {
        if op.dim() != init.dim() {
            return Err(Error::dim(format!(
                "operation on dimension {}, initial state of dimension {}",
                op.dim(),
                init.dim()
            )));
        }
        Ok(Self {
            op,
            init,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &QuantumOperation {
        &self.op
    }

    pub fn init(&self) -> &DensityOperator {
        &self.init
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let defect = self.op.trace_preservation_defect();
        if defect > self.tol {
            report.push("op", "operation is not trace-preserving", defect);
        }
        let v = linalg::psd_violation(self.init.matrix(), self.tol).unwrap_or(f64::INFINITY);
        if v > self.tol {
            report.push("init", "initial state is not positive semidefinite", v);
        }
        let tr_gap = (self.init.trace() - 1.0).abs();
        if tr_gap > self.tol {
            report.push("init", "initial state does not have unit trace", tr_gap);
        }
        report
    }

    pub fn step(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.op.apply(rho)
    }

    /// `ρ_n = Eⁿ(ρ₀)`.
    pub fn state_at(&self, n: usize) -> Result<ComplexMatrix> {
        let mut rho = self.init.matrix().clone();
        for _ in 0..n {
            rho = self.step(&rho)?;
        }
        Ok(rho)
    }
}

/// A state-labelled hqMC; labels are subsets of `ap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlHqMC {
    chain: HqMC,
    ap: BTreeSet<String>,
    labels: Vec<Label>,
}

impl SlHqMC {
    pub fn new(chain: HqMC, ap: BTreeSet<String>, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != chain.len() {
            return Err(Error::dim(format!(
                "{} labels for {} states",
                labels.len(),
                chain.len()
            )));
        }
        for (l, s) in labels.iter().zip(chain.states()) {
            if let Some(p) = l.iter().find(|p| !ap.contains(*p)) {
                return Err(Error::Format(format!(
                    "label of `{s}` uses `{p}`, which is not an atomic proposition"
                )));
            }
        }
        Ok(Self { chain, ap, labels })
    }

    pub fn chain(&self) -> &HqMC {
        &self.chain
    }

    pub fn ap(&self) -> &BTreeSet<String> {
        &self.ap
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, state: usize) -> &Label {
        &self.labels[state]
    }

    /// The alphabet `2^AP` in canonical order.
    pub fn alphabet(&self) -> Vec<Label> {
        powerset(&self.ap)
    }

    pub fn validate(&self) -> ValidationReport {
        self.chain.validate()
    }

    /// `P_M(w) = Σ_{L(s̄) = w} Tr(ρ_s̄)` by explicit enumeration of label-consistent
    /// state sequences. Exponential in `|w|`; intended as a reference oracle.
    pub fn trace_prob(&self, word: &[Label]) -> Result<f64> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        for sym in word {
            if sym.iter().any(|p| !self.ap.contains(p)) {
                return Err(Error::UnknownSymbol(label_symbol(sym)));
            }
        }
        let mut total = 0.0;
        for s0 in 0..self.chain.len() {
            if self.labels[s0] == word[0] {
                total += self.path_sum(s0, &self.chain.init()[s0], &word[1..])?;
            }
        }
        Ok(total)
    }

    fn path_sum(&self, at: usize, rho: &ComplexMatrix, rest: &[Label]) -> Result<f64> {
        let Some((next, tail)) = rest.split_first() else {
            return Ok(linalg::trace(rho).re);
        };
        let mut total = 0.0;
        for t in 0..self.chain.len() {
            if &self.labels[t] != next {
                continue;
            }
            let op = self.chain.op(t, at);
            if op.is_zero(0.0) {
                continue;
            }
            total += self.path_sum(t, &op.apply(rho)?, tail)?;
        }
        Ok(total)
    }
}
