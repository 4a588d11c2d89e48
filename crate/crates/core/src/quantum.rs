//! Quantum operations in Kraus form and density operators.

use crate::error::{Error, Result};
use crate::linalg::{
    self, frobenius, identity, is_finite, kron, max_abs_diff, psd_violation, real, trace,
    ComplexMatrix,
};

/// A completely positive map `A ↦ Σ_k E_k A E_k†` on a `dim`-dimensional space.
///
/// The Kraus list is never empty; the zero operation is a single zero matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOperation {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumOperation {
    pub fn new(dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dim("quantum operation on a zero-dimensional space"));
        }
        for (k, e) in kraus.iter().enumerate() {
            if e.shape() != (dim, dim) {
                return Err(Error::dim(format!(
                    "Kraus operator {k} is {}x{}, expected {dim}x{dim}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            if !is_finite(e) {
                return Err(Error::Format(format!(
                    "Kraus operator {k} has non-finite entries"
                )));
            }
        }
        if kraus.is_empty() {
            return Ok(Self::zero(dim));
        }
        Ok(Self { dim, kraus })
    }

    /// Infers the dimension from the first Kraus operator.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = kraus
            .first()
            .ok_or_else(|| Error::dim("cannot infer dimension of an empty Kraus list"))?
            .nrows();
        Self::new(dim, kraus)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![linalg::zeros(dim, dim)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![identity(dim)],
        }
    }

    /// Unitary conjugation `ρ ↦ UρU†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::from_kraus(vec![u])
    }

    /// `p·E` for `p ≥ 0`, realised by scaling every Kraus operator by `√p`.
    pub fn scaled(&self, p: f64) -> Self {
        assert!(p >= 0.0, "negative weight {p}");
        let s = real(p.sqrt());
        Self {
            dim: self.dim,
            kraus: self.kraus.iter().map(|e| e * s).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    fn check_dim(&self, other: usize, what: &str) -> Result<()> {
        if self.dim != other {
            return Err(Error::dim(format!(
                "{what}: operation acts on dimension {}, argument has {other}",
                self.dim
            )));
        }
        Ok(())
    }

    /// `Σ_k E_k a E_k†`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.shape() != (self.dim, self.dim) {
            return Err(Error::dim(format!(
                "apply: operation on dimension {}, matrix is {}x{}",
                self.dim,
                a.nrows(),
                a.ncols()
            )));
        }
        let mut out = linalg::zeros(self.dim, self.dim);
        for e in &self.kraus {
            out += e * a * e.adjoint();
        }
        Ok(out)
    }

    /// `Σ_k E_k† E_k`.
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let mut acc = linalg::zeros(self.dim, self.dim);
        for e in &self.kraus {
            acc += e.adjoint() * e;
        }
        acc
    }

    /// `‖Σ E†E − I‖∞`.
    pub fn trace_preservation_defect(&self) -> f64 {
        max_abs_diff(&self.completeness_sum(), &identity(self.dim))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_defect() <= tol
    }

    /// How far `I − Σ E†E` is from being PSD (≤ 0 when trace-nonincreasing).
    pub fn trace_increase_defect(&self, tol: f64) -> f64 {
        let gap = identity(self.dim) - self.completeness_sum();
        psd_violation(&gap, tol).expect("square by construction")
    }

    pub fn is_trace_nonincreasing(&self, tol: f64) -> bool {
        self.trace_increase_defect(tol) <= tol
    }

    /// Pointwise sum; Kraus lists are concatenated.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim, "sum")?;
        let mut kraus = self.kraus.clone();
        kraus.extend(other.kraus.iter().cloned());
        Ok(Self {
            dim: self.dim,
            kraus,
        })
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim, "compose")?;
        let kraus = self
            .kraus
            .iter()
            .flat_map(|e| other.kraus.iter().map(move |f| e * f))
            .collect();
        Ok(Self {
            dim: self.dim,
            kraus,
        })
    }

    /// The `d²×d²` matrix `Σ_k E_k ⊗ conj(E_k)` acting on row-stacked vectors.
    pub fn superop_matrix(&self) -> ComplexMatrix {
        let d2 = self.dim * self.dim;
        let mut acc = linalg::zeros(d2, d2);
        for e in &self.kraus {
            acc += kron(e, &e.map(|z| z.conj()));
        }
        acc
    }

    /// `Tr E(ρ) = Tr F(ρ)` for every density ρ, decided on completeness sums.
    pub fn eqsim(&self, other: &Self, tol: f64) -> Result<bool> {
        self.check_dim(other.dim, "eqsim")?;
        Ok(max_abs_diff(&self.completeness_sum(), &other.completeness_sum()) <= tol)
    }

    /// True when every Kraus operator has Frobenius norm at most `tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.kraus.iter().all(|e| frobenius(e) <= tol)
    }

    /// Drops Kraus operators with Frobenius norm `≤ tol`.
    pub fn compact(&self, tol: f64) -> Self {
        let kraus: Vec<_> = self
            .kraus
            .iter()
            .filter(|e| frobenius(e) > tol)
            .cloned()
            .collect();
        if kraus.is_empty() {
            Self::zero(self.dim)
        } else {
            Self {
                dim: self.dim,
                kraus,
            }
        }
    }
}

/// A (possibly partial) quantum state: PSD with trace in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        linalg::ensure_square(&matrix, "density operator")?;
        let v = psd_violation(&matrix, tol)?;
        if v > tol {
            return Err(Error::Format(format!(
                "density operator is not positive semidefinite (violation {v:.3e})"
            )));
        }
        let tr = trace(&matrix);
        if tr.im.abs() > tol || tr.re < -tol || tr.re > 1.0 + tol {
            return Err(Error::Format(format!(
                "density operator trace {tr} outside [0, 1]"
            )));
        }
        Ok(Self { matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// `|i⟩⟨i|`.
    pub fn basis_state(i: usize, dim: usize) -> Self {
        Self {
            matrix: linalg::projector(i, dim),
        }
    }

    /// Scales a nonzero PSD matrix to unit trace.
    pub fn normalized(matrix: &ComplexMatrix, tol: f64) -> Result<Self> {
        let tr = trace(matrix).re;
        if tr <= tol {
            return Err(Error::Format(
                "cannot normalise a zero-trace operator".into(),
            ));
        }
        Self::new(matrix.unscale(tr), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }
}

/// Trace of a matrix known to be Hermitian, as a real number.
pub fn real_trace(m: &ComplexMatrix) -> f64 {
    trace(m).re
}
