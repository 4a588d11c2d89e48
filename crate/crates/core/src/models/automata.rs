use std::collections::BTreeSet;

use super::{
    check_unique, index_of, validate_distribution, validate_projector, TransitionMatrix,
    ValidationReport,
};
use crate::error::{Error, Result};
use crate::linalg::{self, real, trace, ComplexMatrix, ComplexVector, C64, DEFAULT_TOL};
use crate::quantum::{DensityOperator, QuantumOperation};

fn word_indices<S: AsRef<str>>(alphabet: &[String], word: &[S]) -> Result<Vec<usize>> {
    word.iter()
        .map(|s| {
            index_of(alphabet, s.as_ref())
                .ok_or_else(|| Error::UnknownSymbol(s.as_ref().to_string()))
        })
        .collect()
}

/// How a hybrid quantum automaton decides acceptance.
#[derive(Debug, Clone, PartialEq)]
pub enum Fashion {
    /// Accept when the classical state lies in the given set of state indices.
    Classical(BTreeSet<usize>),
    /// Accept when the quantum state lies in the range of the projector.
    Quantum(ComplexMatrix),
    /// Both conditions at once.
    Mixed(BTreeSet<usize>, ComplexMatrix),
}

impl Fashion {
    pub fn accepting_states(&self) -> Option<&BTreeSet<usize>> {
        match self {
            Fashion::Classical(f) | Fashion::Mixed(f, _) => Some(f),
            Fashion::Quantum(_) => None,
        }
    }

    pub fn projector(&self) -> Option<&ComplexMatrix> {
        match self {
            Fashion::Quantum(p) | Fashion::Mixed(_, p) => Some(p),
            Fashion::Classical(_) => None,
        }
    }
}

/// Hybrid quantum automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct Hqa {
    dim: usize,
    states: Vec<String>,
    alphabet: Vec<String>,
    init: Vec<ComplexMatrix>,
    trans: Vec<TransitionMatrix>,
    fashion: Fashion,
    tol: f64,
}

impl Hqa {
    pub fn new(
        dim: usize,
        states: Vec<String>,
        alphabet: Vec<String>,
        init: Vec<ComplexMatrix>,
        trans: Vec<TransitionMatrix>,
        fashion: Fashion,
    ) -> Result<Self> {
        check_unique(&states, "state")?;
        check_unique(&alphabet, "symbol")?;
        if trans.len() != alphabet.len() {
            return Err(Error::dim(format!(
                "{} transition matrices for {} symbols",
                trans.len(),
                alphabet.len()
            )));
        }
        if trans
            .iter()
            .any(|t| t.size() != states.len() || t.dim() != dim)
        {
            return Err(Error::dim(
                "transition matrix shape does not match states/dimension",
            ));
        }
        if init.len() != states.len() || init.iter().any(|m| m.shape() != (dim, dim)) {
            return Err(Error::dim(
                "initial distribution does not match states/dimension",
            ));
        }
        if let Some(f) = fashion.accepting_states() {
            if let Some(bad) = f.iter().find(|&&s| s >= states.len()) {
                return Err(Error::dim(format!(
                    "accepting state index {bad} out of range"
                )));
            }
        }
        if let Some(p) = fashion.projector() {
            if p.shape() != (dim, dim) {
                return Err(Error::dim("accepting projector does not match dimension"));
            }
        }
        Ok(Self {
            dim,
            states,
            alphabet,
            init,
            trans,
            fashion,
            tol: DEFAULT_TOL,
        })
    }

    /// The degenerate C-HQA of a probabilistic automaton: `M_σ(t, s) = p·I`
    /// where `p = stochastic[σ][(t, s)]` (columns are distributions) and
    /// `μ₀(s) = init[s]·ρ`.
    pub fn probabilistic(
        dim: usize,
        states: Vec<String>,
        alphabet: Vec<String>,
        stochastic: &[Vec<Vec<f64>>],
        init: &[f64],
        rho: &ComplexMatrix,
        accepting: BTreeSet<usize>,
    ) -> Result<Self> {
        let n = states.len();
        let mut trans = Vec::with_capacity(stochastic.len());
        for p in stochastic {
            let mut m = TransitionMatrix::zero(n, dim);
            for t in 0..n {
                for s in 0..n {
                    if p[t][s] != 0.0 {
                        m.set(t, s, QuantumOperation::identity(dim).scaled(p[t][s]))?;
                    }
                }
            }
            trans.push(m);
        }
        let init = init.iter().map(|&w| rho.scale(w)).collect();
        Self::new(
            dim,
            states,
            alphabet,
            init,
            trans,
            Fashion::Classical(accepting),
        )
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

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn init(&self) -> &[ComplexMatrix] {
        &self.init
    }

    pub fn trans(&self) -> &[TransitionMatrix] {
        &self.trans
    }

    /// Transition matrix of symbol number `sym`.
    pub fn matrix(&self, sym: usize) -> &TransitionMatrix {
        &self.trans[sym]
    }

    pub fn fashion(&self) -> &Fashion {
        &self.fashion
    }

    pub fn word_indices<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<usize>> {
        word_indices(&self.alphabet, word)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (sym, m) in self.alphabet.iter().zip(&self.trans) {
            report.extend(m.validate_columns(&self.states, &format!("symbol `{sym}` "), self.tol));
        }
        report.extend(validate_distribution(&self.init, &self.states, self.tol));
        if let Some(p) = self.fashion.projector() {
            report.extend(validate_projector(p, "fashion p_acc", self.tol));
        }
        report
    }

    /// `μ_w = M_w μ₀`.
    pub fn distribution_after(&self, word: &[usize]) -> Result<Vec<ComplexMatrix>> {
        let mut mu = self.init.clone();
        for &sym in word {
            mu = self
                .trans
                .get(sym)
                .ok_or_else(|| Error::UnknownSymbol(format!("#{sym}")))?
                .step(&mu)?;
        }
        Ok(mu)
    }

    /// Scores a distribution according to the accepting fashion.
    pub fn score(&self, mu: &[ComplexMatrix]) -> f64 {
        match &self.fashion {
            Fashion::Classical(f) => f.iter().map(|&s| trace(&mu[s]).re).sum(),
            Fashion::Quantum(p) => mu.iter().map(|m| trace(&(p * m)).re).sum(),
            Fashion::Mixed(f, p) => f.iter().map(|&s| trace(&(p * &mu[s])).re).sum(),
        }
    }

    pub fn accept_prob_indices(&self, word: &[usize]) -> Result<f64> {
        Ok(self.score(&self.distribution_after(word)?))
    }

    /// `P_A(w)` for a word of symbol names.
    pub fn accept_prob<S: AsRef<str>>(&self, word: &[S]) -> Result<f64> {
        self.accept_prob_indices(&self.word_indices(word)?)
    }
}

/// Quantum automaton `(ρ₀, {E_σ}, P_acc)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Qa {
    alphabet: Vec<String>,
    init: DensityOperator,
    ops: Vec<QuantumOperation>,
    p_acc: ComplexMatrix,
    tol: f64,
}

impl Qa {
    pub fn new(
        alphabet: Vec<String>,
        init: DensityOperator,
        ops: Vec<QuantumOperation>,
        p_acc: ComplexMatrix,
    ) -> Result<Self> {
        check_unique(&alphabet, "symbol")?;
        let d = init.dim();
        if ops.len() != alphabet.len() {
            return Err(Error::dim(format!(
                "{} operations for {} symbols",
                ops.len(),
                alphabet.len()
            )));
        }
        if ops.iter().any(|o| o.dim() != d) || p_acc.shape() != (d, d) {
            return Err(Error::dim(
                "operations/projector do not match the initial state dimension",
            ));
        }
        Ok(Self {
            alphabet,
            init,
            ops,
            p_acc,
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
        self.init.dim()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn init(&self) -> &DensityOperator {
        &self.init
    }

    pub fn ops(&self) -> &[QuantumOperation] {
        &self.ops
    }

    pub fn p_acc(&self) -> &ComplexMatrix {
        &self.p_acc
    }

    pub fn word_indices<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<usize>> {
        word_indices(&self.alphabet, word)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (sym, op) in self.alphabet.iter().zip(&self.ops) {
            let defect = op.trace_preservation_defect();
            if defect > self.tol {
                report.push(
                    format!("ops `{sym}`"),
                    "operation is not trace-preserving",
                    defect,
                );
            }
        }
        let v = linalg::psd_violation(self.init.matrix(), self.tol).unwrap_or(f64::INFINITY);
        if v > self.tol {
            report.push("init", "initial state is not positive semidefinite", v);
        }
        let gap = (self.init.trace() - 1.0).abs();
        if gap > self.tol {
            report.push("init", "initial state does not have unit trace", gap);
        }
        report.extend(validate_projector(&self.p_acc, "p_acc", self.tol));
        report
    }

    pub fn state_after(&self, word: &[usize]) -> Result<ComplexMatrix> {
        let mut rho = self.init.matrix().clone();
        for &sym in word {
            rho = self
                .ops
                .get(sym)
                .ok_or_else(|| Error::UnknownSymbol(format!("#{sym}")))?
                .apply(&rho)?;
        }
        Ok(rho)
    }

    pub fn accept_prob_indices(&self, word: &[usize]) -> Result<f64> {
        Ok(trace(&(&self.p_acc * self.state_after(word)?)).re)
    }

    /// `Tr(P_acc E_w(ρ₀))`.
    pub fn accept_prob<S: AsRef<str>>(&self, word: &[S]) -> Result<f64> {
        self.accept_prob_indices(&self.word_indices(word)?)
    }
}

/// Bilinear machine: weight `η M_{σ_k}⋯M_{σ_1} π`.
///
/// `eta` is stored as a column vector holding the entries of the row vector η.
#[derive(Debug, Clone, PartialEq)]
pub struct Blm {
    alphabet: Vec<String>,
    mats: Vec<ComplexMatrix>,
    pi: ComplexVector,
    eta: ComplexVector,
}

impl Blm {
    pub fn new(
        alphabet: Vec<String>,
        mats: Vec<ComplexMatrix>,
        pi: ComplexVector,
        eta: ComplexVector,
    ) -> Result<Self> {
        check_unique(&alphabet, "symbol")?;
        let n = pi.len();
        if n == 0 {
            return Err(Error::dim("bilinear machine with zero states"));
        }
        if eta.len() != n {
            return Err(Error::dim(format!(
                "pi has {n} entries, eta has {}",
                eta.len()
            )));
        }
        if mats.len() != alphabet.len() {
            return Err(Error::dim(format!(
                "{} matrices for {} symbols",
                mats.len(),
                alphabet.len()
            )));
        }
        if let Some((k, m)) = mats.iter().enumerate().find(|(_, m)| m.shape() != (n, n)) {
            return Err(Error::dim(format!(
                "matrix of symbol `{}` is {}x{}, expected {n}x{n}",
                alphabet[k],
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self {
            alphabet,
            mats,
            pi,
            eta,
        })
    }

    /// A probabilistic automaton with real stochastic data.
    pub fn probabilistic(
        alphabet: Vec<String>,
        stochastic: &[Vec<Vec<f64>>],
        init: &[f64],
        accepting: &[bool],
    ) -> Result<Self> {
        let n = init.len();
        let mats = stochastic
            .iter()
            .map(|p| ComplexMatrix::from_fn(n, n, |t, s| real(p[t][s])))
            .collect();
        let pi = ComplexVector::from_iterator(n, init.iter().map(|&x| real(x)));
        let eta = ComplexVector::from_iterator(
            n,
            accepting.iter().map(|&a| real(f64::from(u8::from(a)))),
        );
        Self::new(alphabet, mats, pi, eta)
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    pub fn matrix(&self, sym: usize) -> &ComplexMatrix {
        &self.mats[sym]
    }

    pub fn pi(&self) -> &ComplexVector {
        &self.pi
    }

    pub fn eta(&self) -> &ComplexVector {
        &self.eta
    }

    pub fn word_indices<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<usize>> {
        word_indices(&self.alphabet, word)
    }

    /// `η·v` (plain bilinear product, no conjugation).
    pub fn eval(&self, v: &ComplexVector) -> C64 {
        self.eta.dot(v)
    }

    /// `M_w π`.
    pub fn forward(&self, word: &[usize]) -> Result<ComplexVector> {
        let mut v = self.pi.clone();
        for &sym in word {
            v = self
                .mats
                .get(sym)
                .ok_or_else(|| Error::UnknownSymbol(format!("#{sym}")))?
                * v;
        }
        Ok(v)
    }

    pub fn weight_indices(&self, word: &[usize]) -> Result<C64> {
        Ok(self.eval(&self.forward(word)?))
    }

    pub fn weight<S: AsRef<str>>(&self, word: &[S]) -> Result<C64> {
        self.weight_indices(&self.word_indices(word)?)
    }

    /// Conjugates by an invertible `p`: `M ↦ p M p⁻¹`, `π ↦ pπ`, `η ↦ η p⁻¹`.
    /// Weights are unchanged.
    pub fn conjugated(&self, p: &ComplexMatrix) -> Result<Self> {
        let inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::dim("conjugating matrix is singular"))?;
        let mats = self.mats.iter().map(|m| p * m * &inv).collect();
        let pi = p * &self.pi;
        let eta = inv.transpose() * &self.eta;
        Self::new(self.alphabet.clone(), mats, pi, eta)
    }
}
