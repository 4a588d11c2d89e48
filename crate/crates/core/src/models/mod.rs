//! The model zoo: hybrid and plain quantum Markov chains, the three automaton
//! tiers (HQA, QA, BLM) and total DFAs over label sets.
//!
//! States and symbols are addressed by their position in the declared lists;
//! names only matter at the edges (JSON, witnesses, CLI output).

mod automata;
mod chain;
mod dfa;

use std::collections::BTreeSet;
use std::fmt;

pub use automata::{Blm, Fashion, Hqa, Qa};
pub use chain::{HqMC, Qmc, SlHqMC};
pub use dfa::Dfa;

use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs_diff, psd_violation, trace, ComplexMatrix};
use crate::quantum::QuantumOperation;

/// A set of atomic propositions, i.e. one letter of the alphabet `2^AP`.
pub type Label = BTreeSet<String>;

/// One invariant failure found by a validator.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub location: String,
    pub invariant: String,
    pub magnitude: f64,
}

/// Outcome of validating a model; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(
        &mut self,
        location: impl Into<String>,
        invariant: impl Into<String>,
        magnitude: f64,
    ) {
        self.violations.push(Violation {
            location: location.into(),
            invariant: invariant.into(),
            magnitude,
        });
    }

    /// Largest violation magnitude, 0 when valid.
    pub fn worst(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| v.magnitude)
            .fold(0.0, f64::max)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidModel(self))
        }
    }

    fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "{}: {} (magnitude {:.3e})",
                v.location, v.invariant, v.magnitude
            )?;
        }
        Ok(())
    }
}

/// Canonical text form of a label set: `{}` or `{a,b}` with sorted members.
pub fn label_symbol(label: &Label) -> String {
    let inner: Vec<&str> = label.iter().map(String::as_str).collect();
    format!("{{{}}}", inner.join(","))
}

/// Parses `{a,b}` (braces optional, whitespace ignored) into a label set.
pub fn parse_label_symbol(s: &str) -> Label {
    let t = s.trim();
    let t = t.strip_prefix('{').unwrap_or(t);
    let t = t.strip_suffix('}').unwrap_or(t);
    t.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(String::from)
        .collect()
}

/// All subsets of `ap` in bitmask order over the sorted propositions
/// (`{}` first, singletons in sorted order, ...).
pub fn powerset(ap: &BTreeSet<String>) -> Vec<Label> {
    let props: Vec<&String> = ap.iter().collect();
    (0..1usize << props.len())
        .map(|mask| {
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| (*p).clone())
                .collect()
        })
        .collect()
}

pub(crate) fn index_of(names: &[String], name: &str) -> Option<usize> {
    names.iter().position(|n| n == name)
}

pub(crate) fn check_unique(names: &[String], what: &str) -> Result<()> {
    let set: BTreeSet<&String> = names.iter().collect();
    if set.len() != names.len() {
        return Err(Error::Format(format!("duplicate {what} names")));
    }
    if names.is_empty() {
        return Err(Error::Format(format!("empty {what} list")));
    }
    Ok(())
}

/// An `|S|×|S|` matrix of quantum operations; entry `(t, s)` moves mass from
/// source `s` to target `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    dim: usize,
    entries: Vec<QuantumOperation>,
}

impl TransitionMatrix {
    /// All entries zero.
    pub fn zero(n: usize, dim: usize) -> Self {
        Self {
            n,
            dim,
            entries: vec![QuantumOperation::zero(dim); n * n],
        }
    }

    /// The diagonal identity matrix of operations.
    pub fn identity(n: usize, dim: usize) -> Self {
        let mut m = Self::zero(n, dim);
        for s in 0..n {
            m.set(s, s, QuantumOperation::identity(dim))
                .expect("dims agree");
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(target, source)`.
    pub fn get(&self, target: usize, source: usize) -> &QuantumOperation {
        &self.entries[target * self.n + source]
    }

    pub fn set(&mut self, target: usize, source: usize, op: QuantumOperation) -> Result<()> {
        if op.dim() != self.dim {
            return Err(Error::dim(format!(
                "operation of dimension {} in a transition matrix of dimension {}",
                op.dim(),
                self.dim
            )));
        }
        if target >= self.n || source >= self.n {
            return Err(Error::dim(format!(
                "entry ({target},{source}) outside {0}x{0}",
                self.n
            )));
        }
        self.entries[target * self.n + source] = op;
        Ok(())
    }

    /// True when entry `(t, s)` is not the zero operation.
    pub fn is_edge(&self, target: usize, source: usize, tol: f64) -> bool {
        !self.get(target, source).is_zero(tol)
    }

    /// `Σ_t M(t, s)†M(t, s)` summed over Kraus operators of the whole column.
    pub fn column_completeness(&self, source: usize) -> ComplexMatrix {
        (0..self.n).fold(linalg::zeros(self.dim, self.dim), |acc, t| {
            acc + self.get(t, source).completeness_sum()
        })
    }

    /// Reports every column whose sum is not trace-preserving.
    pub fn validate_columns(&self, names: &[String], context: &str, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        let id = identity(self.dim);
        for s in 0..self.n {
            let defect = max_abs_diff(&self.column_completeness(s), &id);
            if defect > tol {
                report.push(
                    format!("{context}column `{}`", names[s]),
                    "column sum is not trace-preserving",
                    defect,
                );
            }
        }
        report
    }

    /// `out(s) = Σ_t M(s, t)(mu(t))`.
    pub fn step(&self, mu: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        if mu.len() != self.n {
            return Err(Error::dim(format!(
                "distribution has {} entries, chain has {} states",
                mu.len(),
                self.n
            )));
        }
        let mut out = vec![linalg::zeros(self.dim, self.dim); self.n];
        for (t, m) in mu.iter().enumerate() {
            if m.shape() != (self.dim, self.dim) {
                return Err(Error::dim(format!(
                    "distribution entry {t} is {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            for (s, o) in out.iter_mut().enumerate() {
                let op = self.get(s, t);
                if !op.is_zero(0.0) {
                    *o += op.apply(m)?;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise composition `self · other` of operation-valued matrices.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.dim != other.dim {
            return Err(Error::dim("transition matrices of different shapes"));
        }
        let mut out = Self::zero(self.n, self.dim);
        for t in 0..self.n {
            for s in 0..self.n {
                let mut acc: Option<QuantumOperation> = None;
                for u in 0..self.n {
                    let (a, b) = (self.get(t, u), other.get(u, s));
                    if a.is_zero(0.0) || b.is_zero(0.0) {
                        continue;
                    }
                    let term = a.compose(b)?;
                    acc = Some(match acc {
                        None => term,
                        Some(prev) => prev.sum(&term)?,
                    });
                }
                if let Some(op) = acc {
                    out.set(t, s, op)?;
                }
            }
        }
        Ok(out)
    }

    /// Number of nonzero entries.
    pub fn nonzeros(&self, tol: f64) -> usize {
        self.entries.iter().filter(|op| !op.is_zero(tol)).count()
    }
}

/// Validates a positive-operator valued distribution: PSD entries, total trace 1.
pub(crate) fn validate_distribution(
    init: &[ComplexMatrix],
    names: &[String],
    tol: f64,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut total = 0.0;
    for (m, name) in init.iter().zip(names) {
        let v = psd_violation(m, tol).unwrap_or(f64::INFINITY);
        if v > tol {
            report.push(
                format!("init `{name}`"),
                "initial operator is not positive semidefinite",
                v,
            );
        }
        total += trace(m).re;
    }
    if (total - 1.0).abs() > tol {
        report.push(
            "init",
            "initial traces do not sum to 1",
            (total - 1.0).abs(),
        );
    }
    report
}

pub(crate) fn validate_projector(p: &ComplexMatrix, location: &str, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let herm = max_abs_diff(p, &p.adjoint());
    if herm > tol {
        report.push(location, "accepting projector is not Hermitian", herm);
    }
    let idem = max_abs_diff(&(p * p), p);
    if idem > tol {
        report.push(location, "accepting projector is not idempotent", idem);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_symbols_round_trip() {
        let l: Label = ["b".to_string(), "a".to_string()].into_iter().collect();
        assert_eq!(label_symbol(&l), "{a,b}");
        assert_eq!(parse_label_symbol("{ b , a }"), l);
        assert_eq!(parse_label_symbol("{}"), Label::new());
        assert_eq!(label_symbol(&Label::new()), "{}");
    }

    #[test]
    fn powerset_order() {
        let ap: BTreeSet<String> = ["q".to_string(), "p".to_string()].into_iter().collect();
        let syms: Vec<String> = powerset(&ap).iter().map(label_symbol).collect();
        assert_eq!(syms, ["{}", "{p}", "{q}", "{p,q}"]);
    }

    #[test]
    fn report_formatting() {
        let mut r = ValidationReport::default();
        assert_eq!(r.to_string(), "valid");
        r.push("column `s0`", "column sum is not trace-preserving", 0.75);
        assert!(r.to_string().contains("column `s0`"));
        assert_eq!(r.worst(), 0.75);
        assert!(r.into_result().is_err());
    }

    #[test]
    fn identity_matrix_step_is_identity() {
        let m = TransitionMatrix::identity(2, 2);
        let mu = vec![identity(2).scale(0.25), identity(2).scale(0.25)];
        assert_eq!(m.step(&mu).unwrap(), mu);
        assert!(m
            .validate_columns(&["a".into(), "b".into()], "", 1e-12)
            .is_valid());
    }
}
