//! Language equivalence of bilinear machines and the derived procedures for
//! quantum automata, HQAs and trace equivalence of state-labelled chains.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt_residual, ComplexMatrix, ComplexVector};
use crate::models::{Blm, Hqa, Qa, SlHqMC};
use crate::transforms::{hqa_to_blm, qa_to_blm, sl_to_chqa};

/// Whether the empty word takes part in the comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Compare on `Σ*`.
    #[default]
    IncludeEpsilon,
    /// Compare on `Σ⁺`.
    PositiveWordsOnly,
}

/// Outcome of an equivalence check.
///
/// `margin` is the largest weight discrepancy seen when the machines are
/// declared equivalent, and the discrepancy at the witness otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// Symbols in reading order.
    pub witness: Option<Vec<String>>,
    pub basis_size: usize,
    pub words_explored: u64,
    pub margin: f64,
}

/// Above this number of words brute force refuses to run.
pub const BRUTE_FORCE_CAP: u128 = 1 << 22;

/// Below this ratio `‖b‖/‖u‖` a second orthogonalisation pass is made.
const REORTH_RATIO: f64 = 1e-4;

/// Returns, for every symbol of `a1`, its index in `a2`.
fn align_alphabets(a1: &[String], a2: &[String]) -> Result<Vec<usize>> {
    let mismatch = || Error::AlphabetMismatch(format!("[{}] vs [{}]", a1.join(","), a2.join(",")));
    if a1.len() != a2.len() {
        return Err(mismatch());
    }
    a1.iter()
        .map(|s| a2.iter().position(|t| t == s).ok_or_else(mismatch))
        .collect()
}

fn spell(alphabet: &[String], word: &[usize]) -> Vec<String> {
    word.iter().map(|&i| alphabet[i].clone()).collect()
}

/// Both machines run side by side on the direct sum.
struct Stacked {
    n1: usize,
    mats: Vec<(ComplexMatrix, ComplexMatrix)>,
    eta1: ComplexVector,
    eta2: ComplexVector,
}

impl Stacked {
    fn new(a1: &Blm, a2: &Blm) -> Result<(Self, ComplexVector)> {
        let order = align_alphabets(a1.alphabet(), a2.alphabet())?;
        let mats = order
            .iter()
            .enumerate()
            .map(|(i, &j)| (a1.matrix(i).clone(), a2.matrix(j).clone()))
            .collect();
        let mut pi = ComplexVector::zeros(a1.n() + a2.n());
        pi.rows_mut(0, a1.n()).copy_from(a1.pi());
        pi.rows_mut(a1.n(), a2.n()).copy_from(a2.pi());
        let s = Self {
            n1: a1.n(),
            mats,
            eta1: a1.eta().clone(),
            eta2: a2.eta().clone(),
        };
        Ok((s, pi))
    }

    fn step(&self, v: &ComplexVector, sym: usize) -> ComplexVector {
        let n2 = v.len() - self.n1;
        let (m1, m2) = &self.mats[sym];
        let mut out = ComplexVector::zeros(v.len());
        out.rows_mut(0, self.n1)
            .copy_from(&(m1 * v.rows(0, self.n1)));
        out.rows_mut(self.n1, n2)
            .copy_from(&(m2 * v.rows(self.n1, n2)));
        out
    }

    fn discrepancy(&self, v: &ComplexVector) -> f64 {
        let n2 = v.len() - self.n1;
        (self.eta1.dot(&v.rows(0, self.n1)) - self.eta2.dot(&v.rows(self.n1, n2))).norm()
    }
}

/// Decides `f_{a1} = f_{a2}` on `Σ*` or `Σ⁺` by building an orthonormal
/// basis of the forward space `span{(M¹_w π₁; M²_w π₂)}`.
///
/// Weights are compared with absolute tolerance `tol`. A vector extends the
/// basis when its residual exceeds `tol · max(1, ‖u‖)`.
pub fn blm_equivalent(a1: &Blm, a2: &Blm, tol: f64, mode: Mode) -> Result<EquivalenceVerdict> {
    let (pair, pi) = Stacked::new(a1, a2)?;
    let dim = pi.len();
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(dim);
    let mut queue: VecDeque<(ComplexVector, Vec<usize>)> = VecDeque::new();
    let mut explored = 0u64;
    let mut worst = 0.0f64;

    let verdict = |equivalent, witness: Option<&[usize]>, basis: usize, explored, margin| {
        EquivalenceVerdict {
            equivalent,
            witness: witness.map(|w| spell(a1.alphabet(), w)),
            basis_size: basis,
            words_explored: explored,
            margin,
        }
    };

    if mode == Mode::IncludeEpsilon {
        explored += 1;
        let d = pair.discrepancy(&pi);
        if d > tol {
            return Ok(verdict(false, Some(&[]), 0, explored, d));
        }
        worst = d;
    }
    if try_extend(&mut basis, &pi, tol)? {
        queue.push_back((pi, Vec::new()));
    }

    while let Some((v, word)) = queue.pop_front() {
        for sym in 0..pair.mats.len() {
            let u = pair.step(&v, sym);
            explored += 1;
            let d = pair.discrepancy(&u);
            let mut w = word.clone();
            w.push(sym);
            if d > tol {
                return Ok(verdict(false, Some(&w), basis.len(), explored, d));
            }
            worst = worst.max(d);
            if basis.len() < dim && try_extend(&mut basis, &u, tol)? {
                assert!(basis.len() <= dim, "basis exceeds the ambient dimension");
                queue.push_back((u, w));
            }
        }
    }
    Ok(verdict(true, None, basis.len(), explored, worst))
}

fn try_extend(basis: &mut Vec<ComplexVector>, u: &ComplexVector, tol: f64) -> Result<bool> {
    let scale = u.norm();
    let (mut b, mut norm) = gram_schmidt_residual(u, basis)?;
    if norm < REORTH_RATIO * scale {
        (b, norm) = gram_schmidt_residual(&b, basis)?;
    }
    if norm > tol * scale.max(1.0) {
        basis.push(b.unscale(norm));
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Compares weights on every word of length at most `k` (nonempty words only
/// in [`Mode::PositiveWordsOnly`]) and reports the first disagreement in
/// length-then-lexicographic order of symbol indices.
pub fn blm_k_equivalent_bruteforce(
    a1: &Blm,
    a2: &Blm,
    k: usize,
    tol: f64,
    mode: Mode,
) -> Result<EquivalenceVerdict> {
    let (pair, pi) = Stacked::new(a1, a2)?;
    let sigma = pair.mats.len() as u128;
    let total = (0..=k as u32).try_fold(0u128, |acc, l| {
        sigma.checked_pow(l).and_then(|x| acc.checked_add(x))
    });
    match total {
        Some(t) if t <= BRUTE_FORCE_CAP => {}
        other => {
            return Err(Error::CapExceeded {
                words: other.unwrap_or(u128::MAX),
                cap: BRUTE_FORCE_CAP,
            })
        }
    }

    let mut explored = 0u64;
    let mut worst = 0.0f64;
    let start = if mode == Mode::IncludeEpsilon { 0 } else { 1 };
    let nsym = pair.mats.len();
    for len in start..=k {
        if len > 0 && nsym == 0 {
            break;
        }
        // Odometer over Σ^len; `prefix[j]` is the forward vector of `word[..j]`.
        let mut word = vec![0usize; len];
        let mut prefix = vec![pi.clone()];
        for j in 0..len {
            prefix.push(pair.step(&prefix[j], 0));
        }
        loop {
            explored += 1;
            let d = pair.discrepancy(&prefix[len]);
            if d > tol {
                return Ok(EquivalenceVerdict {
                    equivalent: false,
                    witness: Some(spell(a1.alphabet(), &word)),
                    basis_size: 0,
                    words_explored: explored,
                    margin: d,
                });
            }
            worst = worst.max(d);
            let Some(i) = (0..len).rev().find(|&i| word[i] + 1 < nsym) else {
                break;
            };
            word[i] += 1;
            word[i + 1..].fill(0);
            prefix.truncate(i + 1);
            for j in i..len {
                prefix.push(pair.step(&prefix[j], word[j]));
            }
        }
    }
    Ok(EquivalenceVerdict {
        equivalent: true,
        witness: None,
        basis_size: 0,
        words_explored: explored,
        margin: worst,
    })
}

/// Word-length bound `(n₁k₁)² + (n₂k₂)² − 1` for two HQAs, where `n` is the
/// quantum dimension and `k` the number of classical states.
pub fn hqa_word_bound(a1: &Hqa, a2: &Hqa) -> usize {
    let sq = |a: &Hqa| (a.dim() * a.states().len()).pow(2);
    sq(a1) + sq(a2) - 1
}

/// HQA equivalence on `Σ*` via the QA and BLM encodings.
pub fn hqa_equivalent(a1: &Hqa, a2: &Hqa, tol: f64) -> Result<EquivalenceVerdict> {
    align_alphabets(a1.alphabet(), a2.alphabet())?;
    blm_equivalent(
        &hqa_to_blm(a1)?,
        &hqa_to_blm(a2)?,
        tol,
        Mode::IncludeEpsilon,
    )
}

/// QA equivalence on `Σ*` via the BLM encoding.
pub fn qa_equivalent(a1: &Qa, a2: &Qa, tol: f64, mode: Mode) -> Result<EquivalenceVerdict> {
    align_alphabets(a1.alphabet(), a2.alphabet())?;
    blm_equivalent(&qa_to_blm(a1)?, &qa_to_blm(a2)?, tol, mode)
}

/// Trace equivalence of SL-hqMCs: equal trace probabilities on every
/// nonempty label word. Witness symbols are label sets such as `{a,b}`.
pub fn sl_trace_equivalent(m1: &SlHqMC, m2: &SlHqMC, tol: f64) -> Result<EquivalenceVerdict> {
    if m1.ap() != m2.ap() {
        let show = |m: &SlHqMC| m.ap().iter().cloned().collect::<Vec<_>>().join(",");
        return Err(Error::AlphabetMismatch(format!(
            "atomic propositions {{{}}} vs {{{}}}",
            show(m1),
            show(m2)
        )));
    }
    let b1 = hqa_to_blm(&sl_to_chqa(m1)?)?;
    let b2 = hqa_to_blm(&sl_to_chqa(m2)?)?;
    blm_equivalent(&b1, &b2, tol, Mode::PositiveWordsOnly)
}
