//! Superoperator-valued path measures, first-passage reachability and
//! quantitative safety checking through the product with a bad-prefix DFA.
//!
//! Superoperators are handled in their matrix form `Q̂` acting on row-stacked
//! density operators, so `Q(ρ) = unvec(Q̂ · vec ρ)` and composition is the
//! matrix product.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs_diff, ComplexMatrix};
use crate::models::{Dfa, HqMC, SlHqMC};
use crate::quantum::{real_trace, DensityOperator};
use crate::transforms::{product, product_index, ACCEPT_PROP};

/// Default convergence threshold on the largest entrywise change.
pub const REACH_TOL: f64 = 1e-10;
/// Default iteration budget.
pub const REACH_MAX_ITER: usize = 100_000;
/// Direct solves are attempted only below this 2-norm condition number.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Largest linear system (in unknown rows) handed to the direct solver.
pub const DIRECT_SOLVE_MAX: usize = 1024;

/// A superoperator on `d × d` matrices in `d² × d²` matrix form.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMeasure {
    dim: usize,
    rep: ComplexMatrix,
}

impl PathMeasure {
    pub fn from_matrix(dim: usize, rep: ComplexMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if rep.shape() != (d2, d2) {
            return Err(Error::dim(format!(
                "superoperator for dimension {dim} must be {d2}x{d2}, got {}x{}",
                rep.nrows(),
                rep.ncols()
            )));
        }
        Ok(Self { dim, rep })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rep: identity(dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rep: linalg::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_rep(&self) -> &ComplexMatrix {
        &self.rep
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.dim, self.dim) {
            return Err(Error::dim(format!(
                "state is {}x{}, measure acts on dimension {}",
                rho.nrows(),
                rho.ncols(),
                self.dim
            )));
        }
        linalg::unvec(&(&self.rep * linalg::vec(rho)?), self.dim)
    }

    /// `Tr(Q(ρ))`.
    pub fn trace_on(&self, rho: &ComplexMatrix) -> Result<f64> {
        Ok(real_trace(&self.apply(rho)?))
    }

    /// `Σ E†E` recovered from the matrix form, i.e. the Heisenberg image of `I`.
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let vec_id = linalg::vec(&identity(self.dim)).expect("square");
        let c = self.rep.transpose() * vec_id;
        linalg::unvec(&c, self.dim).expect("length d²").transpose()
    }

    /// How far `I − Σ E†E` is from positive semidefinite.
    pub fn trace_increase_defect(&self, tol: f64) -> f64 {
        linalg::psd_violation(&(identity(self.dim) - self.completeness_sum()), tol)
            .unwrap_or(f64::INFINITY)
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Self) -> Result<Self> {
        if self.dim != first.dim {
            return Err(Error::dim(format!(
                "cannot compose dimensions {} and {}",
                self.dim, first.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            rep: &self.rep * &first.rep,
        })
    }

    /// Entrywise comparison of the matrix forms.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && max_abs_diff(&self.rep, &other.rep) <= tol
    }
}

fn check_state(m: &HqMC, s: usize) -> Result<()> {
    if s >= m.len() {
        return Err(Error::UnknownState(format!("#{s}")));
    }
    Ok(())
}

/// `M̂(s_n,s_{n−1}) ⋯ M̂(s₁,s₀)` for the path `s₀ ⋯ s_n` of state indices.
pub fn path_superop(m: &HqMC, path: &[usize]) -> Result<PathMeasure> {
    let (&first, rest) = path.split_first().ok_or(Error::EmptyPath)?;
    check_state(m, first)?;
    let mut rep = identity(m.dim() * m.dim());
    let mut prev = first;
    for &s in rest {
        check_state(m, s)?;
        rep = m.op(s, prev).superop_matrix() * rep;
        prev = s;
    }
    PathMeasure::from_matrix(m.dim(), rep)
}

/// Resolves state names to indices.
pub fn state_indices<S: AsRef<str>>(m: &HqMC, names: &[S]) -> Result<Vec<usize>> {
    names.iter().map(|n| m.state_index(n.as_ref())).collect()
}

/// Probability mass of the cylinder spanned by `prefix` when the chain sits
/// in `s` with quantum state `rho`.
pub fn cylinder_measure(
    m: &HqMC,
    s: usize,
    prefix: &[usize],
    rho: &DensityOperator,
) -> Result<f64> {
    check_state(m, s)?;
    let &first = prefix.first().ok_or(Error::EmptyPath)?;
    if first != s {
        let name = |i: usize| {
            m.states()
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("#{i}"))
        };
        return Err(Error::PathStart {
            expected: name(s),
            found: name(first),
        });
    }
    path_superop(m, prefix)?.trace_on(rho.matrix())
}

/// How reachability measures were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    Kleene,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::Direct => "direct",
            SolveMethod::Kleene => "kleene",
        }
    }
}

/// Which solver [`reach_measure`] may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// Direct solve when well conditioned, iteration otherwise.
    #[default]
    Auto,
    Kleene,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub solver: Solver,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self {
            tol: REACH_TOL,
            max_iter: REACH_MAX_ITER,
            solver: Solver::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReachResult {
    /// Indexed by state.
    pub measures: Vec<PathMeasure>,
    /// Largest entrywise change of the last sweep, or the fixpoint equation
    /// residual after a direct solve.
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// The fixpoint system `R_s = Î` on the target and `R_s = Σ_t R_t · M̂(t,s)`
/// elsewhere, with outgoing transitions of target states ignored.
#[derive(Debug, Clone)]
pub struct Reachability {
    dim: usize,
    target: Vec<bool>,
    /// States with an underlying-graph path into the target, target excluded.
    unknown: Vec<usize>,
    /// For each non-target state, its nonzero outgoing terms `(t, M̂(t,s))`.
    succ: Vec<Vec<(usize, ComplexMatrix)>>,
}

impl Reachability {
    pub fn new(m: &HqMC, target: &BTreeSet<usize>) -> Result<Self> {
        let n = m.len();
        if let Some(&bad) = target.iter().find(|&&t| t >= n) {
            return Err(Error::UnknownState(format!("#{bad}")));
        }
        let is_target: Vec<bool> = (0..n).map(|s| target.contains(&s)).collect();
        let succ: Vec<Vec<(usize, ComplexMatrix)>> = (0..n)
            .map(|s| {
                if is_target[s] {
                    return Vec::new();
                }
                (0..n)
                    .filter(|&t| !m.op(t, s).is_zero(0.0))
                    .map(|t| (t, m.op(t, s).superop_matrix()))
                    .collect()
            })
            .collect();

        // Backward search on the underlying graph.
        let mut reaches = is_target.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if !reaches[s] && succ[s].iter().any(|(t, _)| reaches[*t]) {
                    reaches[s] = true;
                    changed = true;
                }
            }
        }
        let unknown = (0..n).filter(|&s| reaches[s] && !is_target[s]).collect();
        Ok(Self {
            dim: m.dim(),
            target: is_target,
            unknown,
            succ,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R⁽⁰⁾`: identity on the target, zero elsewhere.
    pub fn initial(&self) -> Vec<ComplexMatrix> {
        let d2 = self.dim * self.dim;
        self.target
            .iter()
            .map(|&t| {
                if t {
                    identity(d2)
                } else {
                    linalg::zeros(d2, d2)
                }
            })
            .collect()
    }

    /// One Jacobi sweep. Returns the new iterate and the largest entrywise change.
    pub fn sweep(&self, current: &[ComplexMatrix]) -> (Vec<ComplexMatrix>, f64) {
        let mut next = current.to_vec();
        let mut change = 0.0f64;
        for &s in &self.unknown {
            let d2 = self.dim * self.dim;
            let mut acc = linalg::zeros(d2, d2);
            for (t, op) in &self.succ[s] {
                acc += &current[*t] * op;
            }
            change = change.max(max_abs_diff(&acc, &current[s]));
            next[s] = acc;
        }
        (next, change)
    }

    /// Largest entrywise violation of the fixpoint equations by `x`.
    pub fn equation_residual(&self, x: &[ComplexMatrix]) -> f64 {
        self.sweep(x).1
    }

    fn kleene(&self, tol: f64, max_iter: usize) -> (Vec<ComplexMatrix>, f64, usize) {
        let mut x = self.initial();
        let mut residual = if self.unknown.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
        let mut iterations = 0;
        while residual > tol && iterations < max_iter {
            let (next, change) = self.sweep(&x);
            x = next;
            residual = change;
            iterations += 1;
        }
        (x, residual, iterations)
    }

    /// Solves `X (I − T) = C` for the stacked unknowns `X = [R_u₁ ⋯ R_u_k]`.
    fn direct(&self) -> Option<Vec<ComplexMatrix>> {
        let d2 = self.dim * self.dim;
        let k = self.unknown.len();
        let size = k * d2;
        if size == 0 || size > DIRECT_SOLVE_MAX {
            return None;
        }
        let mut pos = vec![usize::MAX; self.target.len()];
        for (i, &s) in self.unknown.iter().enumerate() {
            pos[s] = i;
        }
        let mut system = identity(size);
        let mut rhs = linalg::zeros(d2, size);
        for (j, &s) in self.unknown.iter().enumerate() {
            for (t, op) in &self.succ[s] {
                if self.target[*t] {
                    let mut block = rhs.view_mut((0, j * d2), (d2, d2));
                    block += op;
                } else if pos[*t] != usize::MAX {
                    let mut block = system.view_mut((pos[*t] * d2, j * d2), (d2, d2));
                    block -= op;
                }
            }
        }
        let sv = system.clone().singular_values();
        let (hi, lo) = (sv.max(), sv.min());
        if !(lo > 0.0 && hi / lo < CONDITION_LIMIT) {
            return None;
        }
        let xt = system.transpose().lu().solve(&rhs.transpose())?;
        let x = xt.transpose();
        let mut out = self.initial();
        for (j, &s) in self.unknown.iter().enumerate() {
            out[s] = x.columns(j * d2, d2).into_owned();
        }
        Some(out)
    }
}

/// First-passage reachability measures `R_s = Q_s(◊B)` for every state.
pub fn reach_measure(
    m: &HqMC,
    target: &BTreeSet<usize>,
    opts: ReachOptions,
) -> Result<ReachResult> {
    let sys = Reachability::new(m, target)?;
    let wrap = |x: Vec<ComplexMatrix>| {
        x.into_iter()
            .map(|r| PathMeasure::from_matrix(sys.dim(), r))
            .collect::<Result<Vec<_>>>()
    };
    if opts.solver == Solver::Auto {
        if let Some(x) = sys.direct() {
            let residual = sys.equation_residual(&x);
            return Ok(ReachResult {
                measures: wrap(x)?,
                residual,
                iterations: 0,
                method: SolveMethod::Direct,
            });
        }
    }
    let (x, residual, iterations) = sys.kleene(opts.tol, opts.max_iter);
    Ok(ReachResult {
        measures: wrap(x)?,
        residual,
        iterations,
        method: SolveMethod::Kleene,
    })
}

/// Safety measures for one state of the original chain.
#[derive(Debug, Clone)]
pub struct StateSafety {
    pub state: String,
    pub satisfy: PathMeasure,
    pub violate: PathMeasure,
    /// `Tr(satisfy(ρ))` for the supplied `ρ`.
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct SafetyResult {
    /// Index of the queried state.
    pub state: usize,
    pub probability_satisfy: f64,
    /// One entry per state of the original chain.
    pub per_state: Vec<StateSafety>,
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

impl SafetyResult {
    pub fn queried(&self) -> &StateSafety {
        &self.per_state[self.state]
    }
}

/// Quantitative safety: the measure of runs from `s` that never read a bad
/// prefix accepted by `dfa`, as `Î − R_{⟨s,q_s⟩}` on the product, where
/// `q_s = δ(q₀, L(s))`.
pub fn check_safety(
    m: &SlHqMC,
    dfa: &Dfa,
    s: usize,
    rho: &DensityOperator,
    opts: ReachOptions,
) -> Result<SafetyResult> {
    m.validate().into_result()?;
    if dfa.is_accepting(dfa.q0()) {
        return Err(Error::EmptyProperty);
    }
    check_state(m.chain(), s)?;
    let d = m.chain().dim();
    if rho.dim() != d {
        return Err(Error::dim(format!(
            "initial state has dimension {}, chain has {d}",
            rho.dim()
        )));
    }
    let prod = product(m, dfa)?;
    let target: BTreeSet<usize> = (0..prod.chain().len())
        .filter(|&i| prod.label(i).contains(ACCEPT_PROP))
        .collect();
    let reach = reach_measure(prod.chain(), &target, opts)?;
    let nq = dfa.states().len();
    let per_state = (0..m.chain().len())
        .map(|x| {
            let q = dfa.step(dfa.q0(), m.label(x))?;
            let violate = reach.measures[product_index(x, q, nq)].clone();
            let satisfy = PathMeasure::from_matrix(d, identity(d * d) - violate.matrix_rep())?;
            let probability = satisfy.trace_on(rho.matrix())?;
            Ok(StateSafety {
                state: m.chain().states()[x].clone(),
                satisfy,
                violate,
                probability,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SafetyResult {
        state: s,
        probability_satisfy: per_state[s].probability,
        per_state,
        residual: reach.residual,
        iterations: reach.iterations,
        method: reach.method,
    })
}

/// The normalised initial state at `s` when it carries mass, the maximally
/// mixed state otherwise.
pub fn default_rho(m: &HqMC, s: usize) -> Result<DensityOperator> {
    check_state(m, s)?;
    let mu = &m.init()[s];
    if real_trace(mu) > m.tol() {
        DensityOperator::normalized(mu, m.tol())
    } else {
        Ok(DensityOperator::maximally_mixed(m.dim()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::projector;
    use crate::models::{parse_label_symbol, Label, TransitionMatrix};
    use crate::quantum::QuantumOperation;
    use crate::random::{self, ChainShape};

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// s0 -E0-> s2, s0 -E1-> s1, s2 -E1-> s3, s2 -E0-> s1; s1, s3 absorbing.
    fn blocked_quantum() -> HqMC {
        let e0 = QuantumOperation::from_kraus(vec![projector(0, 2)]).unwrap();
        let e1 = QuantumOperation::from_kraus(vec![projector(1, 2)]).unwrap();
        let mut t = TransitionMatrix::zero(4, 2);
        t.set(2, 0, e0.clone()).unwrap();
        t.set(1, 0, e1.clone()).unwrap();
        t.set(3, 2, e1).unwrap();
        t.set(1, 2, e0).unwrap();
        t.set(1, 1, QuantumOperation::identity(2)).unwrap();
        t.set(3, 3, QuantumOperation::identity(2)).unwrap();
        let mut init = vec![linalg::zeros(2, 2); 4];
        init[0] = DensityOperator::maximally_mixed(2).into_matrix();
        HqMC::validated(2, names(&["s0", "s1", "s2", "s3"]), t, init).unwrap()
    }

    fn blocked_classical() -> HqMC {
        let half = QuantumOperation::identity(1).scaled(0.5);
        let mut t = TransitionMatrix::zero(4, 1);
        for (tgt, src) in [(1, 0), (2, 0), (1, 2), (3, 2)] {
            t.set(tgt, src, half.clone()).unwrap();
        }
        t.set(1, 1, QuantumOperation::identity(1)).unwrap();
        t.set(3, 3, QuantumOperation::identity(1)).unwrap();
        let mut init = vec![linalg::zeros(1, 1); 4];
        init[0] = identity(1);
        HqMC::validated(1, names(&["s0", "s1", "s2", "s3"]), t, init).unwrap()
    }

    #[test]
    fn trivial_path_is_identity() {
        let m = blocked_quantum();
        assert_eq!(path_superop(&m, &[2]).unwrap(), PathMeasure::identity(2));
        assert!(matches!(path_superop(&m, &[]), Err(Error::EmptyPath)));
    }

    #[test]
    fn orthogonal_projections_kill_the_path() {
        let m = blocked_quantum();
        let q = path_superop(&m, &[0, 2, 3]).unwrap();
        assert!(linalg::max_abs(q.matrix_rep()) < 1e-15);
    }

    #[test]
    fn cylinder_checks_start() {
        let m = blocked_quantum();
        let rho = DensityOperator::maximally_mixed(2);
        assert!((cylinder_measure(&m, 0, &[0], &rho).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            cylinder_measure(&m, 0, &[1, 1], &rho),
            Err(Error::PathStart { .. })
        ));
    }

    #[test]
    fn cylinder_additivity() {
        let mut r = random::rng(21);
        for _ in 0..10 {
            let m = random::hqmc(&mut r, ChainShape::new(3, 2));
            let rho = random::density(&mut r, 2);
            for s in 0..3 {
                let total: f64 = (0..3)
                    .map(|t| cylinder_measure(&m, s, &[s, t], &rho).unwrap())
                    .sum();
                assert!((total - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn completeness_sum_round_trip() {
        let mut r = random::rng(4);
        let op = random::selective(&mut r, 3, &[2, 1]).remove(0);
        let q = PathMeasure::from_matrix(3, op.superop_matrix()).unwrap();
        assert!(max_abs_diff(&q.completeness_sum(), &op.completeness_sum()) < 1e-12);
        assert!(q.trace_increase_defect(1e-12) <= 1e-12);
    }

    #[test]
    fn quantum_separation() {
        let m = blocked_quantum();
        for solver in [Solver::Auto, Solver::Kleene] {
            let res = reach_measure(
                &m,
                &[3].into_iter().collect(),
                ReachOptions {
                    solver,
                    ..Default::default()
                },
            )
            .unwrap();
            let mut r = random::rng(0);
            for _ in 0..10 {
                let rho = random::density(&mut r, 2);
                assert!(res.measures[0].trace_on(rho.matrix()).unwrap().abs() < 1e-12);
            }
            assert!(res.measures[1].approx_eq(&PathMeasure::zero(2), 0.0));
        }
    }

    #[test]
    fn classical_quarter() {
        let m = blocked_classical();
        let target = [3].into_iter().collect();
        let auto = reach_measure(&m, &target, ReachOptions::default()).unwrap();
        assert_eq!(auto.method, SolveMethod::Direct);
        let kleene = reach_measure(
            &m,
            &target,
            ReachOptions {
                solver: Solver::Kleene,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(kleene.method, SolveMethod::Kleene);
        for res in [auto, kleene] {
            assert!((res.measures[0].trace_on(&identity(1)).unwrap() - 0.25).abs() < 1e-12);
            assert!((res.measures[2].trace_on(&identity(1)).unwrap() - 0.5).abs() < 1e-12);
            assert!(res.residual <= 1e-10);
        }
    }

    #[test]
    fn full_target_is_identity() {
        let mut r = random::rng(6);
        let m = random::hqmc(&mut r, ChainShape::new(3, 2));
        let res = reach_measure(&m, &(0..3).collect(), ReachOptions::default()).unwrap();
        assert!(res
            .measures
            .iter()
            .all(|q| q.approx_eq(&PathMeasure::identity(2), 0.0)));
    }

    #[test]
    fn kleene_iterates_are_monotone() {
        let mut r = random::rng(13);
        let m = random::hqmc(&mut r, ChainShape::new(4, 2));
        let sys = Reachability::new(&m, &[3].into_iter().collect()).unwrap();
        let rho = random::density(&mut r, 2);
        let mut x = sys.initial();
        let mut last = [0.0; 4];
        for _ in 0..30 {
            x = sys.sweep(&x).0;
            for s in 0..4 {
                let q = PathMeasure::from_matrix(2, x[s].clone()).unwrap();
                let v = q.trace_on(rho.matrix()).unwrap();
                assert!(v >= last[s] - 1e-12 && v <= 1.0 + 1e-9);
                last[s] = v;
            }
        }
    }

    fn labelled(chain: HqMC) -> SlHqMC {
        let mut labels = vec![Label::new(); 4];
        labels[3] = parse_label_symbol("{bad}");
        SlHqMC::new(chain, ["bad".to_string()].into_iter().collect(), labels).unwrap()
    }

    fn never_bad() -> Dfa {
        Dfa::new(
            names(&["ok", "seen"]),
            vec![parse_label_symbol("{}"), parse_label_symbol("{bad}")],
            [((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 1)],
            0,
            [1].into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn safety_on_both_chains() {
        let q = check_safety(
            &labelled(blocked_quantum()),
            &never_bad(),
            0,
            &DensityOperator::maximally_mixed(2),
            ReachOptions::default(),
        )
        .unwrap();
        assert!((q.probability_satisfy - 1.0).abs() < 1e-12);
        let c = check_safety(
            &labelled(blocked_classical()),
            &never_bad(),
            0,
            &DensityOperator::maximally_mixed(1),
            ReachOptions::default(),
        )
        .unwrap();
        assert!((c.probability_satisfy - 0.75).abs() < 1e-12);
        assert!((c.per_state[3].probability).abs() < 1e-12);
    }

    #[test]
    fn empty_property_rejected() {
        let d = never_bad();
        let bad_start = Dfa::new(
            d.states().to_vec(),
            d.alphabet().to_vec(),
            [((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 1)],
            0,
            [0].into_iter().collect(),
        )
        .unwrap();
        let err = check_safety(
            &labelled(blocked_classical()),
            &bad_start,
            0,
            &DensityOperator::maximally_mixed(1),
            ReachOptions::default(),
        );
        assert!(matches!(err, Err(Error::EmptyProperty)));
    }

    #[test]
    fn default_rho_choice() {
        let m = blocked_quantum();
        assert!(
            max_abs_diff(
                default_rho(&m, 0).unwrap().matrix(),
                &(identity(2) * linalg::real(0.5))
            ) < 1e-15
        );
        assert_eq!(
            default_rho(&m, 3).unwrap(),
            DensityOperator::maximally_mixed(2)
        );
    }
}
