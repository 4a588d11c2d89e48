//! Seeded generators for random models, used by property tests, the
//! acceptance suite and benchmarks.
//!
//! Every generator produces a *valid* model: transition columns are made
//! trace-preserving by normalising random Kraus families with `G^{-1/2}`,
//! where `G = Σ K†K` over the whole column.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, inv_sqrt_psd, real, ComplexMatrix, ComplexVector};
use crate::models::{
    label_symbol, powerset, Blm, Dfa, Fashion, HqMC, Hqa, Label, SlHqMC, TransitionMatrix,
};
use crate::quantum::{DensityOperator, QuantumOperation};

pub use rand_chacha::ChaCha8Rng as Rng64;

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> Rng64 {
    use rand::SeedableRng;
    Rng64::seed_from_u64(seed)
}

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(gauss(rng), gauss(rng)))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| c(gauss(rng), gauss(rng)))
}

/// Random full-rank density operator `GG†/Tr(GG†)`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let g = gaussian_matrix(rng, d, d);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityOperator::new(m.unscale(tr), 1e-9).expect("positive by construction")
}

/// Haar-ish random unitary from the QR factor of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    gaussian_matrix(rng, d, d).qr().q()
}

/// Random orthogonal projector of the given rank.
pub fn projector_of_rank<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let u = unitary(rng, d);
    let cols = u.columns(0, rank);
    cols * cols.adjoint()
}

/// Random projector with rank drawn uniformly from `1..d` (or `0..=1` when `d = 1`).
pub fn projector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let rank = if d == 1 {
        rng.random_range(0..=1)
    } else {
        rng.random_range(1..d)
    };
    projector_of_rank(rng, d, rank)
}

/// A random trace-preserving quantum operation with `kraus` Kraus operators.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, d: usize, kraus: usize) -> QuantumOperation {
    let ops = selective(rng, d, &[kraus; 1]);
    ops.into_iter().next().expect("one branch")
}

/// Random selective operation: branch `i` gets `kraus_counts[i]` Kraus
/// operators (0 means the zero operation) and the branches sum to a
/// trace-preserving map. At least one count must be positive.
pub fn selective<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    kraus_counts: &[usize],
) -> Vec<QuantumOperation> {
    assert!(
        kraus_counts.iter().any(|&k| k > 0),
        "selective operation needs a nonzero branch"
    );
    let raw: Vec<Vec<ComplexMatrix>> = kraus_counts
        .iter()
        .map(|&k| (0..k).map(|_| gaussian_matrix(rng, d, d)).collect())
        .collect();
    let mut g = linalg::zeros(d, d);
    for k in raw.iter().flatten() {
        g += k.adjoint() * k;
    }
    let norm = inv_sqrt_psd(&g, 1e-14);
    raw.into_iter()
        .map(|ks| {
            if ks.is_empty() {
                QuantumOperation::zero(d)
            } else {
                QuantumOperation::new(d, ks.into_iter().map(|k| k * &norm).collect()).expect("dims")
            }
        })
        .collect()
}

/// Shape parameters for random transition matrices.
#[derive(Debug, Clone, Copy)]
pub struct ChainShape {
    pub states: usize,
    pub dim: usize,
    /// Upper bound on Kraus operators per nonzero entry.
    pub max_kraus: usize,
    /// Probability that an entry is the zero operation.
    pub sparsity: f64,
}

impl ChainShape {
    pub fn new(states: usize, dim: usize) -> Self {
        Self {
            states,
            dim,
            max_kraus: 2,
            sparsity: 0.3,
        }
    }
}

/// Random column-complete transition matrix.
pub fn transition_matrix<R: Rng + ?Sized>(rng: &mut R, shape: ChainShape) -> TransitionMatrix {
    let ChainShape {
        states: n,
        dim: d,
        max_kraus,
        sparsity,
    } = shape;
    let mut m = TransitionMatrix::zero(n, d);
    for s in 0..n {
        let mut counts: Vec<usize> = (0..n)
            .map(|_| {
                if rng.random_bool(sparsity) {
                    0
                } else {
                    rng.random_range(1..=max_kraus)
                }
            })
            .collect();
        if counts.iter().all(|&k| k == 0) {
            counts[rng.random_range(0..n)] = 1;
        }
        for (t, op) in selective(rng, d, &counts).into_iter().enumerate() {
            m.set(t, s, op).expect("dims");
        }
    }
    m
}

/// Random positive-operator valued distribution over `n` states; each state
/// is left empty with probability `sparsity` (but not all of them).
pub fn distribution<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    sparsity: f64,
) -> Vec<ComplexMatrix> {
    let mut weights: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(sparsity) {
                0.0
            } else {
                rng.random_range(0.05..1.0)
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        weights[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|&w| density(rng, d).matrix().scale(w / total))
        .collect()
}

pub fn state_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn hqmc<R: Rng + ?Sized>(rng: &mut R, shape: ChainShape) -> HqMC {
    let trans = transition_matrix(rng, shape);
    let init = distribution(rng, shape.states, shape.dim, 0.3);
    HqMC::validated(shape.dim, state_names("s", shape.states), trans, init)
        .expect("valid by construction")
}

/// Which accepting fashion a random HQA should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FashionKind {
    Classical,
    Quantum,
    Mixed,
}

fn accepting_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

pub fn hqa<R: Rng + ?Sized>(
    rng: &mut R,
    shape: ChainShape,
    symbols: usize,
    kind: FashionKind,
) -> Hqa {
    let alphabet: Vec<String> = (0..symbols)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let trans = (0..symbols)
        .map(|_| transition_matrix(rng, shape))
        .collect();
    let init = distribution(rng, shape.states, shape.dim, 0.3);
    let fashion = match kind {
        FashionKind::Classical => Fashion::Classical(accepting_subset(rng, shape.states)),
        FashionKind::Quantum => Fashion::Quantum(projector(rng, shape.dim)),
        FashionKind::Mixed => Fashion::Mixed(
            accepting_subset(rng, shape.states),
            projector(rng, shape.dim),
        ),
    };
    let a = Hqa::new(
        shape.dim,
        state_names("s", shape.states),
        alphabet,
        init,
        trans,
        fashion,
    )
    .expect("consistent shapes");
    debug_assert!(a.validate().is_valid());
    a
}

/// Random SL-hqMC with propositions `p0, p1, ...`.
pub fn sl_hqmc<R: Rng + ?Sized>(rng: &mut R, shape: ChainShape, props: usize) -> SlHqMC {
    let chain = hqmc(rng, shape);
    let ap: BTreeSet<String> = (0..props).map(|i| format!("p{i}")).collect();
    let sigma = powerset(&ap);
    let labels = (0..shape.states)
        .map(|_| sigma[rng.random_range(0..sigma.len())].clone())
        .collect();
    SlHqMC::new(chain, ap, labels).expect("labels drawn from 2^AP")
}

/// Random bilinear machine with real entries in `[-scale, scale]` and complex
/// perturbations when `complex` is set.
pub fn blm<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    symbols: usize,
    scale: f64,
    complex: bool,
) -> Blm {
    let alphabet: Vec<String> = (0..symbols)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let entry = |rng: &mut R| {
        let re = rng.random_range(-scale..=scale);
        let im = if complex {
            rng.random_range(-scale..=scale)
        } else {
            0.0
        };
        c(re, im)
    };
    let mats = (0..symbols)
        .map(|_| ComplexMatrix::from_fn(n, n, |_, _| entry(rng)))
        .collect();
    let pi = ComplexVector::from_fn(n, |_, _| entry(rng));
    let eta = ComplexVector::from_fn(n, |_, _| entry(rng));
    Blm::new(alphabet, mats, pi, eta).expect("consistent shapes")
}

/// Random probabilistic automaton (column-stochastic matrices, a random
/// initial distribution and a random 0/1 accepting vector).
pub fn probabilistic_blm<R: Rng + ?Sized>(rng: &mut R, n: usize, symbols: usize) -> Blm {
    let alphabet: Vec<String> = (0..symbols)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let stochastic: Vec<Vec<Vec<f64>>> = (0..symbols).map(|_| stochastic_matrix(rng, n)).collect();
    let init = probability_vector(rng, n);
    let accepting: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    Blm::probabilistic(alphabet, &stochastic, &init, &accepting).expect("consistent shapes")
}

pub fn probability_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `p[t][s]`, each column a probability distribution.
pub fn stochastic_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..n).map(|_| probability_vector(rng, n)).collect();
    (0..n)
        .map(|t| (0..n).map(|s| cols[s][t]).collect())
        .collect()
}

/// Random total DFA over `2^ap`. `q0` is never accepting.
pub fn dfa<R: Rng + ?Sized>(rng: &mut R, states: usize, ap: &BTreeSet<String>) -> Dfa {
    let alphabet: Vec<Label> = powerset(ap);
    let na = alphabet.len();
    let delta: Vec<((usize, usize), usize)> = (0..states)
        .flat_map(|q| (0..na).map(move |a| (q, a)))
        .map(|qa| (qa, rng.random_range(0..states)))
        .collect();
    let accepting: BTreeSet<usize> = (1..states).filter(|_| rng.random_bool(0.5)).collect();
    Dfa::new(state_names("q", states), alphabet, delta, 0, accepting)
        .expect("total by construction")
}

/// Symbol strings of `2^ap` in canonical order.
pub fn label_alphabet(ap: &BTreeSet<String>) -> Vec<String> {
    powerset(ap).iter().map(label_symbol).collect()
}

/// `Σ w_i |i⟩⟨i|`.
pub fn diagonal_state(weights: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        weights.len(),
        weights.iter().map(|&w| real(w)),
    ))
}
