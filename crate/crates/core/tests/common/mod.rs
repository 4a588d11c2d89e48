//! Reference semantics written straight from the definitions, sharing no
//! code with the library beyond its data types.

#![allow(dead_code)]

use std::path::PathBuf;

use hqmc_core::io::{parse_model, Model};
use hqmc_core::{
    Blm, ComplexMatrix, ComplexVector, Fashion, HqMC, Hqa, Label, QuantumOperation, SlHqMC, C64,
};

pub fn fixture(name: &str) -> Model {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_model(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// `Σ_k E ρ E†` with explicit loops.
pub fn apply_kraus(op: &QuantumOperation, rho: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.nrows();
    let mut out = ComplexMatrix::zeros(d, d);
    for e in op.kraus() {
        for i in 0..d {
            for j in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..d {
                    for b in 0..d {
                        acc += e[(i, a)] * rho[(a, b)] * e[(j, b)].conj();
                    }
                }
                out[(i, j)] += acc;
            }
        }
    }
    out
}

pub fn trace_re(m: &ComplexMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `μ'(t) = Σ_s M(t,s)(μ(s))` for a matrix given by an entry accessor.
pub fn hybrid_step<'a>(
    n: usize,
    entry: impl Fn(usize, usize) -> &'a QuantumOperation,
    mu: &[ComplexMatrix],
) -> Vec<ComplexMatrix> {
    let d = mu[0].nrows();
    (0..n)
        .map(|t| {
            (0..n).fold(ComplexMatrix::zeros(d, d), |acc, s| {
                acc + apply_kraus(entry(t, s), &mu[s])
            })
        })
        .collect()
}

pub fn hqmc_distribution(m: &HqMC, steps: usize) -> Vec<ComplexMatrix> {
    let mut mu = m.init().to_vec();
    for _ in 0..steps {
        mu = hybrid_step(m.len(), |t, s| m.op(t, s), &mu);
    }
    mu
}

/// Acceptance probability of an HQA on a word of symbol indices.
pub fn hqa_accept(a: &Hqa, word: &[usize]) -> f64 {
    let n = a.states().len();
    let mut mu = a.init().to_vec();
    for &sym in word {
        mu = hybrid_step(n, |t, s| a.matrix(sym).get(t, s), &mu);
    }
    match a.fashion() {
        Fashion::Classical(f) => f.iter().map(|&s| trace_re(&mu[s])).sum(),
        Fashion::Quantum(p) => mu.iter().map(|m| trace_re(&(p * m))).sum(),
        Fashion::Mixed(f, p) => f.iter().map(|&s| trace_re(&(p * &mu[s]))).sum(),
    }
}

/// `η M_{σk} ⋯ M_{σ1} π`.
pub fn blm_weight(b: &Blm, word: &[usize]) -> C64 {
    let mut v: ComplexVector = b.pi().clone();
    for &sym in word {
        v = b.matrix(sym) * v;
    }
    b.eta().iter().zip(v.iter()).map(|(e, x)| e * x).sum()
}

/// All words over `k` symbols of length exactly `len`, in lexicographic order.
pub fn words(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn words_up_to(k: usize, max: usize, include_empty: bool) -> Vec<Vec<usize>> {
    let start = if include_empty { 0 } else { 1 };
    (start..=max).flat_map(|l| words(k, l)).collect()
}

/// First word (length-then-lex) where the weights differ by more than `tol`.
pub fn first_disagreement(
    a: &Blm,
    b: &Blm,
    max: usize,
    include_empty: bool,
    tol: f64,
) -> Option<Vec<usize>> {
    let order: Vec<usize> = a
        .alphabet()
        .iter()
        .map(|s| {
            b.alphabet()
                .iter()
                .position(|t| t == s)
                .expect("same alphabet")
        })
        .collect();
    words_up_to(a.alphabet().len(), max, include_empty)
        .into_iter()
        .find(|w| {
            let w2: Vec<usize> = w.iter().map(|&s| order[s]).collect();
            (blm_weight(a, w) - blm_weight(b, &w2)).norm() > tol
        })
}

/// Probability of reading the label word `w` along the chain, by summing
/// over every state sequence of length `|w|`.
pub fn sl_path_sum(m: &SlHqMC, word: &[Label]) -> f64 {
    let c = m.chain();
    let n = c.len();
    let mut total = 0.0;
    let mut seq = vec![0usize; word.len()];
    'outer: loop {
        if seq.iter().zip(word).all(|(&s, l)| m.label(s) == l) {
            let mut rho = c.init()[seq[0]].clone();
            for pair in seq.windows(2) {
                rho = apply_kraus(c.op(pair[1], pair[0]), &rho);
            }
            total += trace_re(&rho);
        }
        for i in (0..seq.len()).rev() {
            if seq[i] + 1 < n {
                seq[i] += 1;
                seq[i + 1..].fill(0);
                continue 'outer;
            }
        }
        break;
    }
    total
}

/// Induced ∞-norm (largest absolute row sum).
pub fn inf_norm(m: &ComplexMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
