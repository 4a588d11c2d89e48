//! Model conversions:
//!
//! * hqMC → qMC and HQA → QA, by embedding the classical state as a
//!   computational-basis register (`|s⟩⟨s| ⊗ μ(s)`, classical index major);
//! * QA → BLM through the superoperator matrix `Σ E ⊗ conj(E)`;
//! * SL-hqMC → C-HQA, reading one label per step and diverting mismatches
//!   into a non-accepting sink;
//! * the product of an SL-hqMC with a total DFA.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{self, identity, kron, ComplexMatrix};
use crate::models::{
    label_symbol, powerset, Blm, Dfa, Fashion, HqMC, Hqa, Label, Qa, Qmc, SlHqMC, TransitionMatrix,
};
use crate::quantum::{DensityOperator, QuantumOperation};

/// Name given to the sink state added by [`sl_to_chqa`] (suffixed on clashes).
pub const SINK_NAME: &str = "__sink";

/// Proposition carried by accepting product states.
pub const ACCEPT_PROP: &str = "accept";

/// `Σ_s |s⟩⟨s| ⊗ μ(s)` on `H_S ⊗ H`.
pub fn block_diag_state(mu: &[ComplexMatrix]) -> ComplexMatrix {
    let n = mu.len();
    let mut out = linalg::zeros(0, 0);
    for (s, m) in mu.iter().enumerate() {
        let term = kron(&linalg::projector(s, n), m);
        out = if out.is_empty() { term } else { out + term };
    }
    out
}

/// The operation `{|t⟩⟨s| ⊗ M_ts^k}` simulating one step of `trans` on
/// `H_S ⊗ H`. Zero entries contribute no Kraus operators.
pub fn lift_transition(trans: &TransitionMatrix) -> QuantumOperation {
    let (n, d) = (trans.size(), trans.dim());
    let mut kraus = Vec::new();
    for s in 0..n {
        for t in 0..n {
            let op = trans.get(t, s);
            if op.is_zero(0.0) {
                continue;
            }
            let jump = linalg::ket_bra(t, s, n);
            kraus.extend(op.kraus().iter().map(|k| kron(&jump, k)));
        }
    }
    QuantumOperation::new(n * d, kraus).expect("dimensions agree")
}

/// hqMC → qMC with `ρ_n = Σ_s |s⟩⟨s| ⊗ μ_n(s)` at every step.
pub fn hqmc_to_qmc(m: &HqMC) -> Result<Qmc> {
    m.validate().into_result()?;
    let rho0 = DensityOperator::new(block_diag_state(m.init()), m.tol())?;
    Ok(Qmc::new(lift_transition(m.trans()), rho0)?.with_tol(m.tol()))
}

fn classical_selector(accept: &BTreeSet<usize>, n: usize) -> ComplexMatrix {
    accept
        .iter()
        .fold(linalg::zeros(n, n), |acc, &s| acc + linalg::projector(s, n))
}

/// HQA → QA with equal acceptance probabilities on every word.
pub fn hqa_to_qa(a: &Hqa) -> Result<Qa> {
    a.validate().into_result()?;
    let n = a.states().len();
    let d = a.dim();
    let rho0 = DensityOperator::new(block_diag_state(a.init()), a.tol())?;
    let ops = a.trans().iter().map(lift_transition).collect();
    let p_acc = match a.fashion() {
        Fashion::Classical(f) => kron(&classical_selector(f, n), &identity(d)),
        Fashion::Quantum(p) => kron(&identity(n), p),
        Fashion::Mixed(f, p) => kron(&classical_selector(f, n), p),
    };
    Ok(Qa::new(a.alphabet().to_vec(), rho0, ops, p_acc)?.with_tol(a.tol()))
}

/// QA → BLM on `d²` states: `M_σ = Σ E ⊗ conj(E)`, `π = vec(ρ₀)`,
/// `η = vec(P_accᵀ)ᵀ` so that `η·vec(B) = Tr(P_acc B)`.
pub fn qa_to_blm(a: &Qa) -> Result<Blm> {
    a.validate().into_result()?;
    let mats = a
        .ops()
        .iter()
        .map(QuantumOperation::superop_matrix)
        .collect();
    let pi = linalg::vec(a.init().matrix())?;
    let eta = linalg::vec(&a.p_acc().transpose())?;
    Blm::new(a.alphabet().to_vec(), mats, pi, eta)
}

/// HQA → QA → BLM.
pub fn hqa_to_blm(a: &Hqa) -> Result<Blm> {
    qa_to_blm(&hqa_to_qa(a)?)
}

fn fresh_name(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|s| s == base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|cand| !taken.iter().any(|s| s == cand))
        .expect("unbounded supply of names")
}

/// `D_σ`: keeps states labelled `σ` in place and routes all others to the sink.
fn label_filter(labels: &[Label], sigma: &Label, dim: usize) -> TransitionMatrix {
    let n = labels.len();
    let sink = n;
    let mut d = TransitionMatrix::zero(n + 1, dim);
    for (s, l) in labels.iter().enumerate() {
        let target = if l == sigma { s } else { sink };
        d.set(target, s, QuantumOperation::identity(dim))
            .expect("dims");
    }
    d.set(sink, sink, QuantumOperation::identity(dim))
        .expect("dims");
    d
}

/// SL-hqMC → C-HQA over `2^AP` with `P_A(w) = P_M(w)` for nonempty `w`.
///
/// States are those of `m` followed by a sink; every original state accepts.
/// Each letter first checks the current label (mismatches fall into the sink)
/// and then performs one step of the chain.
pub fn sl_to_chqa(m: &SlHqMC) -> Result<Hqa> {
    let chain = m.chain();
    chain.validate().into_result()?;
    let (n, d) = (chain.len(), chain.dim());

    let mut states = chain.states().to_vec();
    states.push(fresh_name(&states, SINK_NAME));

    let mut extended = TransitionMatrix::zero(n + 1, d);
    for t in 0..n {
        for s in 0..n {
            let op = chain.op(t, s);
            if !op.is_zero(0.0) {
                extended.set(t, s, op.clone())?;
            }
        }
    }
    extended.set(n, n, QuantumOperation::identity(d))?;

    let sigma = m.alphabet();
    let trans = sigma
        .iter()
        .map(|l| extended.compose(&label_filter(m.labels(), l, d)))
        .collect::<Result<Vec<_>>>()?;

    let mut init = chain.init().to_vec();
    init.push(linalg::zeros(d, d));

    let a = Hqa::new(
        d,
        states,
        sigma.iter().map(label_symbol).collect(),
        init,
        trans,
        Fashion::Classical((0..n).collect()),
    )?
    .with_tol(chain.tol());
    // Products of column-complete matrices stay column-complete.
    debug_assert!(a.validate().is_valid(), "{}", a.validate());
    Ok(a)
}

/// Index of product state `⟨s, q⟩`.
pub fn product_index(s: usize, q: usize, dfa_states: usize) -> usize {
    s * dfa_states + q
}

fn check_dfa_alphabet(ap: &BTreeSet<String>, dfa: &Dfa) -> Result<()> {
    let want: BTreeSet<Label> = powerset(ap).into_iter().collect();
    let have: BTreeSet<Label> = dfa.alphabet().iter().cloned().collect();
    if want != have {
        let show = |s: &BTreeSet<Label>| s.iter().map(label_symbol).collect::<Vec<_>>().join(" ");
        return Err(Error::AlphabetMismatch(format!(
            "DFA alphabet [{}] is not 2^AP = [{}]",
            show(&have),
            show(&want)
        )));
    }
    Ok(())
}

/// The product `M ⊗ A`: states `S × Q` (state-major), one proposition
/// `accept` holding on `S × F`, and `M'(⟨s',q'⟩,⟨s,q⟩) = M(s',s)` exactly when
/// `q' = δ(q, L(s'))`.
pub fn product(m: &SlHqMC, dfa: &Dfa) -> Result<SlHqMC> {
    check_dfa_alphabet(m.ap(), dfa)?;
    let chain = m.chain();
    let (n, d, nq) = (chain.len(), chain.dim(), dfa.states().len());
    // δ(q, L(s)) for all q, s.
    let next: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            let a = dfa.symbol_index(m.label(s))?;
            Ok((0..nq).map(|q| dfa.step_index(q, a)).collect())
        })
        .collect::<Result<_>>()?;

    let mut names = Vec::with_capacity(n * nq);
    let mut labels = Vec::with_capacity(n * nq);
    let mut init = Vec::with_capacity(n * nq);
    let accept: Label = [ACCEPT_PROP.to_string()].into_iter().collect();
    for s in 0..n {
        for q in 0..nq {
            names.push(format!("({},{})", chain.states()[s], dfa.states()[q]));
            labels.push(if dfa.is_accepting(q) {
                accept.clone()
            } else {
                Label::new()
            });
            init.push(if q == next[s][dfa.q0()] {
                chain.init()[s].clone()
            } else {
                linalg::zeros(d, d)
            });
        }
    }

    let mut trans = TransitionMatrix::zero(n * nq, d);
    for s in 0..n {
        for s2 in 0..n {
            let op = chain.op(s2, s);
            if op.is_zero(0.0) {
                continue;
            }
            for q in 0..nq {
                let q2 = next[s2][q];
                trans.set(
                    product_index(s2, q2, nq),
                    product_index(s, q, nq),
                    op.clone(),
                )?;
            }
        }
    }
    let product_chain = HqMC::new(d, names, trans, init)?.with_tol(chain.tol());
    SlHqMC::new(
        product_chain,
        [ACCEPT_PROP.to_string()].into_iter().collect(),
        labels,
    )
}

/// Lifts a path `s₀s₁⋯` of `m` to the product path `⟨s₀,q₁⟩⟨s₁,q₂⟩⋯` where
/// `q_{i+1} = δ(q_i, L(s_i))`.
pub fn product_path(m: &SlHqMC, dfa: &Dfa, path: &[usize]) -> Result<Vec<usize>> {
    let nq = dfa.states().len();
    let mut q = dfa.q0();
    path.iter()
        .map(|&s| {
            q = dfa.step(q, m.label(s))?;
            Ok(product_index(s, q, nq))
        })
        .collect()
}
