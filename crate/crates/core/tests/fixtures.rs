mod common;

use std::collections::BTreeSet;

use common::*;
use hqmc_core::equivalence::{
    blm_equivalent, hqa_equivalent, qa_equivalent, sl_trace_equivalent, Mode,
};
use hqmc_core::io::Model;
use hqmc_core::linalg::{self, max_abs_diff};
use hqmc_core::model_check::{check_safety, default_rho, reach_measure, ReachOptions};
use hqmc_core::models::parse_label_symbol;
use hqmc_core::random;
use hqmc_core::transforms::{
    block_diag_state, hqa_to_blm, hqmc_to_qmc, product, qa_to_blm, sl_to_chqa,
};
use hqmc_core::{
    Blm, ComplexMatrix, ComplexVector, DensityOperator, Dfa, Error, HqMC, Hqa, Qa, SlHqMC,
    TransitionMatrix,
};

const TOL: f64 = 1e-9;

fn chain(name: &str) -> HqMC {
    match fixture(name) {
        Model::HqMC(m) => m,
        other => panic!("{name}: {}", other.kind()),
    }
}

fn labelled(name: &str) -> SlHqMC {
    match fixture(name) {
        Model::SlHqMC(m) => m,
        other => panic!("{name}: {}", other.kind()),
    }
}

fn automaton(name: &str) -> Hqa {
    match fixture(name) {
        Model::Hqa(m) => m,
        other => panic!("{name}: {}", other.kind()),
    }
}

fn blm(name: &str) -> Blm {
    match fixture(name) {
        Model::Blm(m) => m,
        other => panic!("{name}: {}", other.kind()),
    }
}

fn dfa(name: &str) -> Dfa {
    match fixture(name) {
        Model::Dfa(m) => m,
        other => panic!("{name}: {}", other.kind()),
    }
}

#[test]
fn valid_fixtures_validate() {
    for name in [
        "three_state.hqmc.json",
        "blocked_quantum.slhqmc.json",
        "blocked_classical.slhqmc.json",
        "pa.hqa.json",
        "pa_permuted.hqa.json",
        "pa_other_accept.hqa.json",
        "hadamard.qa.json",
        "counter_a.blm.json",
        "three_state.qmc.json",
        "never_bad.dfa.json",
    ] {
        let report = fixture(name).validate();
        assert!(report.is_valid(), "{name}: {report:?}");
    }
}

#[test]
fn half_column_is_reported() {
    let report = fixture("invalid_half.hqmc.json").validate();
    assert!(!report.is_valid());
    let v = &report.violations[0];
    assert!(v.location.contains("s0"), "{v:?}");
    assert!((report.worst() - 0.5).abs() < 1e-12);
}

#[test]
fn non_idempotent_projector_is_reported() {
    assert!(!fixture("nonidempotent.hqa.json").validate().is_valid());
}

#[test]
fn three_state_first_step() {
    let m = chain("three_state.hqmc.json");
    let mu = m.distribution_at(1).unwrap();
    let traces: Vec<f64> = mu.iter().map(trace_re).collect();
    assert!((traces[0]).abs() < 1e-12);
    assert!((traces[1] - 0.5).abs() < 1e-12);
    assert!((traces[2] - 0.5).abs() < 1e-12);
}

#[test]
fn three_state_identity_loop_keeps_mass() {
    let m = chain("three_state.hqmc.json");
    let s1 = m.state_index("s1").unwrap();
    let mut prev = 0.0;
    for n in 0..=10 {
        let mu = m.distribution_at(n).unwrap();
        let total: f64 = mu.iter().map(trace_re).sum();
        assert!((total - 1.0).abs() < TOL);
        let here = trace_re(&mu[s1]);
        assert!(here >= prev - 1e-12);
        prev = here;
    }
}

#[test]
fn three_state_embedding_matches_blocks() {
    let m = chain("three_state.hqmc.json");
    let q = hqmc_to_qmc(&m).unwrap();
    assert!(q.validate().is_valid());
    assert_eq!(q.dim(), 6);
    let rho = q.state_at(3).unwrap();
    let expected = block_diag_state(&hqmc_distribution(&m, 3));
    assert!(max_abs_diff(&rho, &expected) < TOL);
}

#[test]
fn degenerate_pa_equivalences() {
    let pa = automaton("pa.hqa.json");
    let v = hqa_equivalent(&pa, &automaton("pa_permuted.hqa.json"), TOL).unwrap();
    assert!(v.equivalent, "{v:?}");
    let v = hqa_equivalent(&pa, &automaton("pa_other_accept.hqa.json"), TOL).unwrap();
    assert!(!v.equivalent);
    assert_eq!(v.witness, Some(vec![]));
}

#[test]
fn degenerate_embedding_matches_probabilistic_machine() {
    let mut r = random::rng(17);
    for n in 1..=4 {
        let stochastic: Vec<Vec<Vec<f64>>> = (0..2)
            .map(|_| random::stochastic_matrix(&mut r, n))
            .collect();
        let init = random::probability_vector(&mut r, n);
        let accepting: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        let f: BTreeSet<usize> = (0..n).filter(|&i| accepting[i]).collect();
        let rho = random::density(&mut r, 2);
        let states = random::state_names("p", n);
        let alphabet = vec!["a".to_string(), "b".to_string()];
        let hqa = Hqa::probabilistic(
            2,
            states,
            alphabet.clone(),
            &stochastic,
            &init,
            rho.matrix(),
            f,
        )
        .unwrap();
        let pa = Blm::probabilistic(alphabet, &stochastic, &init, &accepting).unwrap();
        for w in words_up_to(2, 5, true) {
            let p = hqa_accept(&hqa, &w);
            assert!((blm_weight(&pa, &w) - linalg::real(p)).norm() < 1e-12);
            assert!((hqa.accept_prob_indices(&w).unwrap() - p).abs() < 1e-12);
        }
    }
}

#[test]
fn one_state_machine_weight() {
    let m = Blm::new(
        vec!["a".into()],
        vec![ComplexMatrix::from_element(1, 1, linalg::real(2.0))],
        ComplexVector::from_element(1, linalg::real(1.0)),
        ComplexVector::from_element(1, linalg::real(3.0)),
    )
    .unwrap();
    assert_eq!(m.weight(&["a", "a"]).unwrap(), linalg::real(12.0));
    assert_eq!(m.weight::<&str>(&[]).unwrap(), linalg::real(3.0));
}

#[test]
fn counters_differ_at_ab() {
    let (a, b) = (blm("counter_a.blm.json"), blm("counter_b.blm.json"));
    let v = blm_equivalent(&a, &b, TOL, Mode::IncludeEpsilon).unwrap();
    assert!(!v.equivalent);
    assert_eq!(v.witness, Some(vec!["a".to_string(), "b".to_string()]));
    assert_eq!(first_disagreement(&a, &b, 5, true, TOL), Some(vec![0, 1]));
}

#[test]
fn quantum_automaton_conversion() {
    let qa: Qa = match fixture("hadamard.qa.json") {
        Model::Qa(q) => q,
        _ => unreachable!(),
    };
    let b = qa_to_blm(&qa).unwrap();
    assert_eq!(b.n(), qa.dim() * qa.dim());
    for w in words_up_to(qa.alphabet().len(), 4, true) {
        let p = qa.accept_prob_indices(&w).unwrap();
        assert!((blm_weight(&b, &w) - linalg::real(p)).norm() < TOL);
    }
    assert!(
        qa_equivalent(&qa, &qa, TOL, Mode::IncludeEpsilon)
            .unwrap()
            .equivalent
    );
}

#[test]
fn labelled_fixtures_convert() {
    for name in [
        "blocked_quantum.slhqmc.json",
        "blocked_classical.slhqmc.json",
    ] {
        let m = labelled(name);
        let a = sl_to_chqa(&m).unwrap();
        assert_eq!(a.states().len(), m.chain().len() + 1);
        assert!(a.validate().is_valid());
        let blm = hqa_to_blm(&a).unwrap();
        assert_eq!(blm.n(), (a.states().len() * a.dim()).pow(2));
    }
}

#[test]
fn quantum_and_classical_variants_are_not_trace_equivalent() {
    let q = labelled("blocked_quantum.slhqmc.json");
    let c = labelled("blocked_classical.slhqmc.json");
    assert!(sl_trace_equivalent(&q, &q, TOL).unwrap().equivalent);
    let v = sl_trace_equivalent(&q, &c, TOL).unwrap();
    assert!(!v.equivalent);
    let w: Vec<_> = v
        .witness
        .unwrap()
        .iter()
        .map(|s| parse_label_symbol(s))
        .collect();
    let (pq, pc) = (sl_path_sum(&q, &w), sl_path_sum(&c, &w));
    assert!((pq - pc).abs() > TOL, "{w:?}: {pq} vs {pc}");
}

#[test]
fn safety_on_blocked_chains() {
    let never_bad = dfa("never_bad.dfa.json");
    let q = labelled("blocked_quantum.slhqmc.json");
    let c = labelled("blocked_classical.slhqmc.json");
    let opts = ReachOptions::default();
    let s0 = q.chain().state_index("s0").unwrap();
    let rho = default_rho(q.chain(), s0).unwrap();
    let rq = check_safety(&q, &never_bad, s0, &rho, opts).unwrap();
    assert!((rq.probability_satisfy - 1.0).abs() < TOL);
    let rc = check_safety(
        &c,
        &never_bad,
        s0,
        &DensityOperator::maximally_mixed(1),
        opts,
    )
    .unwrap();
    assert!((rc.probability_satisfy - 0.75).abs() < TOL);
    assert!(rc.residual <= 1e-10);
}

#[test]
fn empty_bad_prefix_language_is_always_safe() {
    let q = labelled("blocked_classical.slhqmc.json");
    let none = dfa("no_bad_prefix.dfa.json");
    for s in 0..q.chain().len() {
        let r = check_safety(
            &q,
            &none,
            s,
            &DensityOperator::maximally_mixed(1),
            ReachOptions::default(),
        )
        .unwrap();
        assert!((r.probability_satisfy - 1.0).abs() < TOL);
    }
}

#[test]
fn accepting_initial_state_is_rejected() {
    let q = labelled("blocked_quantum.slhqmc.json");
    let bad = dfa("empty_word_bad.dfa.json");
    let err = check_safety(
        &q,
        &bad,
        0,
        &DensityOperator::maximally_mixed(2),
        ReachOptions::default(),
    );
    assert!(matches!(err, Err(Error::EmptyProperty)));
}

#[test]
fn product_with_blocked_chain() {
    let q = labelled("blocked_quantum.slhqmc.json");
    let d = dfa("never_bad.dfa.json");
    let p = product(&q, &d).unwrap();
    assert_eq!(p.chain().len(), q.chain().len() * d.states().len());
    assert!(p.validate().is_valid());
    let accept: BTreeSet<usize> = (0..p.chain().len())
        .filter(|&i| !p.label(i).is_empty())
        .collect();
    assert!(!accept.is_empty());
    let r = reach_measure(p.chain(), &accept, ReachOptions::default()).unwrap();
    assert!(r.residual <= 1e-10);
}

/// Copy of `m` where state `k` is split into two identically labelled halves
/// that share its outgoing behaviour and each receive half its inflow.
fn split_state(m: &SlHqMC, k: usize) -> SlHqMC {
    let c = m.chain();
    let n = c.len();
    let old = |s: usize| if s == n { k } else { s };
    let mut trans = TransitionMatrix::zero(n + 1, c.dim());
    for s in 0..=n {
        for t in 0..=n {
            let op = c.op(old(t), old(s));
            let op = if old(t) == k {
                op.scaled(0.5)
            } else if t == n {
                continue;
            } else {
                op.clone()
            };
            trans.set(t, s, op).unwrap();
        }
    }
    let mut init = c.init().to_vec();
    init[k] = init[k].scale(0.5);
    init.push(init[k].clone());
    let mut states = c.states().to_vec();
    states.push("copy".into());
    let mut labels = m.labels().to_vec();
    labels.push(m.label(k).clone());
    let chain = HqMC::validated(c.dim(), states, trans, init).unwrap();
    SlHqMC::new(chain, m.ap().clone(), labels).unwrap()
}

#[test]
fn splitting_a_state_keeps_trace_equivalence() {
    let mut r = random::rng(23);
    for i in 0..10 {
        let m = random::sl_hqmc(&mut r, random::ChainShape::new(3, 2), 1);
        let split = split_state(&m, i % 3);
        let v = sl_trace_equivalent(&m, &split, TOL).unwrap();
        assert!(v.equivalent, "{v:?}");
        let sigma = hqmc_core::models::powerset(m.ap());
        for len in 1..=3 {
            for w in words(sigma.len(), len) {
                let w: Vec<_> = w.iter().map(|&s| sigma[s].clone()).collect();
                assert!((sl_path_sum(&m, &w) - sl_path_sum(&split, &w)).abs() < TOL);
            }
        }
    }
}
