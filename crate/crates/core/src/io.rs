//! JSON interchange format.
//!
//! Every document carries a `kind` field. Complex numbers are `[re, im]`
//! pairs (a bare number is read as a real value), matrices are lists of rows
//! and operations are `{"kraus": [matrix, ...]}`. Transition entries are keyed
//! `"target|source"`; absent entries are the zero operation and absent initial
//! entries the zero matrix. Label-set symbols are written `{a,b}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equivalence::EquivalenceVerdict;
use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector, C64, DEFAULT_TOL};
use crate::model_check::SafetyResult;
use crate::models::{
    label_symbol, parse_label_symbol, Blm, Dfa, Fashion, HqMC, Hqa, Label, Qa, Qmc, SlHqMC,
    TransitionMatrix, ValidationReport,
};
use crate::quantum::{DensityOperator, QuantumOperation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Pair([f64; 2]),
    Real(f64),
}

impl Scalar {
    fn value(self) -> C64 {
        match self {
            Scalar::Pair([re, im]) => c(re, im),
            Scalar::Real(re) => c(re, 0.0),
        }
    }

    fn of(z: C64) -> Self {
        Scalar::Pair([z.re, z.im])
    }
}

type MatrixDoc = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationDoc {
    kraus: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HqmcDoc {
    dim: usize,
    states: Vec<String>,
    #[serde(default)]
    trans: BTreeMap<String, OperationDoc>,
    #[serde(default)]
    init: BTreeMap<String, MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlHqmcDoc {
    dim: usize,
    states: Vec<String>,
    #[serde(default)]
    trans: BTreeMap<String, OperationDoc>,
    #[serde(default)]
    init: BTreeMap<String, MatrixDoc>,
    ap: Vec<String>,
    #[serde(default)]
    label: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum FashionDoc {
    Classical {
        accept: Vec<String>,
    },
    Quantum {
        p_acc: MatrixDoc,
    },
    Mixed {
        accept: Vec<String>,
        p_acc: MatrixDoc,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HqaDoc {
    dim: usize,
    states: Vec<String>,
    alphabet: Vec<String>,
    #[serde(default)]
    init: BTreeMap<String, MatrixDoc>,
    #[serde(default)]
    trans: BTreeMap<String, BTreeMap<String, OperationDoc>>,
    fashion: FashionDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QmcDoc {
    dim: usize,
    op: OperationDoc,
    init: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QaDoc {
    dim: usize,
    alphabet: Vec<String>,
    init: MatrixDoc,
    ops: BTreeMap<String, OperationDoc>,
    p_acc: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlmDoc {
    n: usize,
    alphabet: Vec<String>,
    mats: BTreeMap<String, MatrixDoc>,
    pi: Vec<Scalar>,
    eta: Vec<Scalar>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DfaDoc {
    states: Vec<String>,
    alphabet: Vec<Vec<String>>,
    delta: BTreeMap<String, String>,
    q0: String,
    accepting: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Document {
    Hqmc(HqmcDoc),
    Qmc(QmcDoc),
    Slhqmc(SlHqmcDoc),
    Hqa(HqaDoc),
    Qa(QaDoc),
    Blm(BlmDoc),
    Dfa(DfaDoc),
}

/// Any model the format can carry.
#[derive(Debug, Clone)]
pub enum Model {
    HqMC(HqMC),
    Qmc(Qmc),
    SlHqMC(SlHqMC),
    Hqa(Hqa),
    Qa(Qa),
    Blm(Blm),
    Dfa(Dfa),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::HqMC(_) => "hqmc",
            Model::Qmc(_) => "qmc",
            Model::SlHqMC(_) => "slhqmc",
            Model::Hqa(_) => "hqa",
            Model::Qa(_) => "qa",
            Model::Blm(_) => "blm",
            Model::Dfa(_) => "dfa",
        }
    }

    /// Semantic checks; bilinear machines and DFAs carry none beyond
    /// construction.
    pub fn validate(&self) -> ValidationReport {
        match self {
            Model::HqMC(m) => m.validate(),
            Model::Qmc(m) => m.validate(),
            Model::SlHqMC(m) => m.validate(),
            Model::Hqa(m) => m.validate(),
            Model::Qa(m) => m.validate(),
            Model::Blm(_) | Model::Dfa(_) => ValidationReport::default(),
        }
    }

    /// Replaces the model-level tolerance where the kind has one.
    pub fn with_tol(self, tol: f64) -> Result<Self> {
        Ok(match self {
            Model::HqMC(m) => Model::HqMC(m.with_tol(tol)),
            Model::Qmc(m) => Model::Qmc(m.with_tol(tol)),
            Model::SlHqMC(m) => Model::SlHqMC(SlHqMC::new(
                m.chain().clone().with_tol(tol),
                m.ap().clone(),
                m.labels().to_vec(),
            )?),
            Model::Hqa(m) => Model::Hqa(m.with_tol(tol)),
            Model::Qa(m) => Model::Qa(m.with_tol(tol)),
            other => other,
        })
    }
}

macro_rules! model_from {
    ($($variant:ident($ty:ty)),*) => {$(
        impl From<$ty> for Model {
            fn from(m: $ty) -> Self {
                Model::$variant(m)
            }
        }
    )*};
}
model_from!(
    HqMC(HqMC),
    Qmc(Qmc),
    SlHqMC(SlHqMC),
    Hqa(Hqa),
    Qa(Qa),
    Blm(Blm),
    Dfa(Dfa)
);

fn matrix(doc: &MatrixDoc, dim: usize, what: &str) -> Result<ComplexMatrix> {
    if doc.len() != dim || doc.iter().any(|r| r.len() != dim) {
        return Err(Error::dim(format!("{what} must be {dim}x{dim}")));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| doc[i][j].value()))
}

fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    m.row_iter()
        .map(|r| r.iter().map(|&z| Scalar::of(z)).collect())
        .collect()
}

fn vector(doc: &[Scalar], n: usize, what: &str) -> Result<ComplexVector> {
    if doc.len() != n {
        return Err(Error::dim(format!(
            "{what} must have {n} entries, has {}",
            doc.len()
        )));
    }
    Ok(ComplexVector::from_iterator(
        n,
        doc.iter().map(|s| s.value()),
    ))
}

fn operation(doc: &OperationDoc, dim: usize, what: &str) -> Result<QuantumOperation> {
    let kraus = doc
        .kraus
        .iter()
        .enumerate()
        .map(|(k, m)| matrix(m, dim, &format!("{what} Kraus operator {k}")))
        .collect::<Result<Vec<_>>>()?;
    QuantumOperation::new(dim, kraus)
}

fn operation_doc(op: &QuantumOperation) -> OperationDoc {
    OperationDoc {
        kraus: op.kraus().iter().map(matrix_doc).collect(),
    }
}

fn index(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownState(name.to_string()))
}

fn split_key(key: &str) -> Result<(&str, &str)> {
    key.split_once('|')
        .ok_or_else(|| Error::Format(format!("key `{key}` is not of the form `a|b`")))
}

fn transitions(
    entries: &BTreeMap<String, OperationDoc>,
    states: &[String],
    dim: usize,
) -> Result<TransitionMatrix> {
    let mut m = TransitionMatrix::zero(states.len(), dim);
    for (key, op) in entries {
        let (t, s) = split_key(key)?;
        m.set(
            index(states, t)?,
            index(states, s)?,
            operation(op, dim, key)?,
        )?;
    }
    Ok(m)
}

fn transitions_doc(m: &TransitionMatrix, states: &[String]) -> BTreeMap<String, OperationDoc> {
    let mut out = BTreeMap::new();
    for t in 0..m.size() {
        for s in 0..m.size() {
            let op = m.get(t, s);
            if !op.is_zero(0.0) {
                out.insert(format!("{}|{}", states[t], states[s]), operation_doc(op));
            }
        }
    }
    out
}

fn distribution(
    entries: &BTreeMap<String, MatrixDoc>,
    states: &[String],
    dim: usize,
) -> Result<Vec<ComplexMatrix>> {
    let mut mu = vec![linalg::zeros(dim, dim); states.len()];
    for (name, m) in entries {
        mu[index(states, name)?] = matrix(m, dim, &format!("init[{name}]"))?;
    }
    Ok(mu)
}

fn distribution_doc(mu: &[ComplexMatrix], states: &[String]) -> BTreeMap<String, MatrixDoc> {
    states
        .iter()
        .zip(mu)
        .filter(|(_, m)| linalg::max_abs(m) != 0.0)
        .map(|(s, m)| (s.clone(), matrix_doc(m)))
        .collect()
}

fn name_set(names: &[String], states: &[String]) -> Result<BTreeSet<usize>> {
    names.iter().map(|n| index(states, n)).collect()
}

/// Density operators are checked on construction; failures surface as an
/// invalid-model report so that `validate` can show them.
fn density(m: ComplexMatrix, tol: f64) -> Result<DensityOperator> {
    let psd = linalg::psd_violation(&m, tol)?;
    let tr = linalg::trace(&m);
    let trace_gap = tr.im.abs().max(-tr.re).max(tr.re - 1.0);
    DensityOperator::new(m, tol).map_err(|e| {
        let mut r = ValidationReport::default();
        r.push("init", e.to_string(), psd.max(trace_gap));
        Error::InvalidModel(r)
    })
}

fn hqmc(
    dim: usize,
    states: Vec<String>,
    trans: &BTreeMap<String, OperationDoc>,
    init: &BTreeMap<String, MatrixDoc>,
    tol: Option<f64>,
) -> Result<HqMC> {
    let t = transitions(trans, &states, dim)?;
    let mu = distribution(init, &states, dim)?;
    Ok(HqMC::new(dim, states, t, mu)?.with_tol(tol.unwrap_or(DEFAULT_TOL)))
}

fn symbols<'a, T>(
    map: &'a BTreeMap<String, T>,
    alphabet: &[String],
    what: &str,
) -> Result<Vec<&'a T>> {
    if let Some(extra) = map.keys().find(|k| !alphabet.contains(k)) {
        return Err(Error::UnknownSymbol(extra.clone()));
    }
    alphabet
        .iter()
        .map(|a| {
            map.get(a)
                .ok_or_else(|| Error::Format(format!("no {what} for symbol `{a}`")))
        })
        .collect()
}

impl Document {
    fn into_model(self) -> Result<Model> {
        Ok(match self {
            Document::Hqmc(d) => Model::HqMC(hqmc(d.dim, d.states, &d.trans, &d.init, d.tol)?),
            Document::Slhqmc(d) => {
                let chain = hqmc(d.dim, d.states, &d.trans, &d.init, d.tol)?;
                if let Some(s) = d.label.keys().find(|s| !chain.states().contains(s)) {
                    return Err(Error::UnknownState(s.clone()));
                }
                let labels = chain
                    .states()
                    .iter()
                    .map(|s| {
                        d.label
                            .get(s)
                            .map(|l| l.iter().cloned().collect())
                            .unwrap_or_default()
                    })
                    .collect();
                Model::SlHqMC(SlHqMC::new(chain, d.ap.into_iter().collect(), labels)?)
            }
            Document::Qmc(d) => {
                let tol = d.tol.unwrap_or(DEFAULT_TOL);
                let op = operation(&d.op, d.dim, "op")?;
                let init = density(matrix(&d.init, d.dim, "init")?, tol)?;
                Model::Qmc(Qmc::new(op, init)?.with_tol(tol))
            }
            Document::Hqa(d) => {
                let trans = symbols(&d.trans, &d.alphabet, "transitions")?
                    .into_iter()
                    .map(|t| transitions(t, &d.states, d.dim))
                    .collect::<Result<Vec<_>>>()?;
                let init = distribution(&d.init, &d.states, d.dim)?;
                let fashion = match &d.fashion {
                    FashionDoc::Classical { accept } => {
                        Fashion::Classical(name_set(accept, &d.states)?)
                    }
                    FashionDoc::Quantum { p_acc } => {
                        Fashion::Quantum(matrix(p_acc, d.dim, "p_acc")?)
                    }
                    FashionDoc::Mixed { accept, p_acc } => {
                        Fashion::Mixed(name_set(accept, &d.states)?, matrix(p_acc, d.dim, "p_acc")?)
                    }
                };
                let tol = d.tol.unwrap_or(DEFAULT_TOL);
                Model::Hqa(
                    Hqa::new(d.dim, d.states, d.alphabet, init, trans, fashion)?.with_tol(tol),
                )
            }
            Document::Qa(d) => {
                let tol = d.tol.unwrap_or(DEFAULT_TOL);
                let ops = symbols(&d.ops, &d.alphabet, "operation")?
                    .into_iter()
                    .zip(&d.alphabet)
                    .map(|(o, a)| operation(o, d.dim, a))
                    .collect::<Result<Vec<_>>>()?;
                let init = density(matrix(&d.init, d.dim, "init")?, tol)?;
                let p = matrix(&d.p_acc, d.dim, "p_acc")?;
                Model::Qa(Qa::new(d.alphabet, init, ops, p)?.with_tol(tol))
            }
            Document::Blm(d) => {
                let mats = symbols(&d.mats, &d.alphabet, "matrix")?
                    .into_iter()
                    .zip(&d.alphabet)
                    .map(|(m, a)| matrix(m, d.n, a))
                    .collect::<Result<Vec<_>>>()?;
                let pi = vector(&d.pi, d.n, "pi")?;
                let eta = vector(&d.eta, d.n, "eta")?;
                Model::Blm(Blm::new(d.alphabet, mats, pi, eta)?)
            }
            Document::Dfa(d) => {
                let alphabet: Vec<Label> = d
                    .alphabet
                    .iter()
                    .map(|l| l.iter().cloned().collect())
                    .collect();
                let delta = d
                    .delta
                    .iter()
                    .map(|(key, to)| {
                        let (q, sym) = split_key(key)?;
                        let label = parse_label_symbol(sym);
                        let a = alphabet
                            .iter()
                            .position(|l| *l == label)
                            .ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?;
                        Ok(((index(&d.states, q)?, a), index(&d.states, to)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let q0 = index(&d.states, &d.q0)?;
                let accepting = name_set(&d.accepting, &d.states)?;
                Model::Dfa(Dfa::new(d.states, alphabet, delta, q0, accepting)?)
            }
        })
    }

    fn from_model(m: &Model) -> Document {
        let tol = |t: f64| (t != DEFAULT_TOL).then_some(t);
        match m {
            Model::HqMC(m) => Document::Hqmc(HqmcDoc {
                dim: m.dim(),
                states: m.states().to_vec(),
                trans: transitions_doc(m.trans(), m.states()),
                init: distribution_doc(m.init(), m.states()),
                tol: tol(m.tol()),
            }),
            Model::SlHqMC(m) => {
                let ch = m.chain();
                Document::Slhqmc(SlHqmcDoc {
                    dim: ch.dim(),
                    states: ch.states().to_vec(),
                    trans: transitions_doc(ch.trans(), ch.states()),
                    init: distribution_doc(ch.init(), ch.states()),
                    ap: m.ap().iter().cloned().collect(),
                    label: ch
                        .states()
                        .iter()
                        .zip(m.labels())
                        .filter(|(_, l)| !l.is_empty())
                        .map(|(s, l)| (s.clone(), l.iter().cloned().collect()))
                        .collect(),
                    tol: tol(ch.tol()),
                })
            }
            Model::Qmc(m) => Document::Qmc(QmcDoc {
                dim: m.dim(),
                op: operation_doc(m.op()),
                init: matrix_doc(m.init().matrix()),
                tol: tol(m.tol()),
            }),
            Model::Hqa(a) => {
                let states = a.states();
                let names = |f: &BTreeSet<usize>| f.iter().map(|&i| states[i].clone()).collect();
                Document::Hqa(HqaDoc {
                    dim: a.dim(),
                    states: states.to_vec(),
                    alphabet: a.alphabet().to_vec(),
                    init: distribution_doc(a.init(), states),
                    trans: a
                        .alphabet()
                        .iter()
                        .zip(a.trans())
                        .map(|(s, t)| (s.clone(), transitions_doc(t, states)))
                        .collect(),
                    fashion: match a.fashion() {
                        Fashion::Classical(f) => FashionDoc::Classical { accept: names(f) },
                        Fashion::Quantum(p) => FashionDoc::Quantum {
                            p_acc: matrix_doc(p),
                        },
                        Fashion::Mixed(f, p) => FashionDoc::Mixed {
                            accept: names(f),
                            p_acc: matrix_doc(p),
                        },
                    },
                    tol: tol(a.tol()),
                })
            }
            Model::Qa(a) => Document::Qa(QaDoc {
                dim: a.dim(),
                alphabet: a.alphabet().to_vec(),
                init: matrix_doc(a.init().matrix()),
                ops: a
                    .alphabet()
                    .iter()
                    .cloned()
                    .zip(a.ops().iter().map(operation_doc))
                    .collect(),
                p_acc: matrix_doc(a.p_acc()),
                tol: tol(a.tol()),
            }),
            Model::Blm(b) => Document::Blm(BlmDoc {
                n: b.n(),
                alphabet: b.alphabet().to_vec(),
                mats: b
                    .alphabet()
                    .iter()
                    .cloned()
                    .zip(b.mats().iter().map(matrix_doc))
                    .collect(),
                pi: b.pi().iter().map(|&z| Scalar::of(z)).collect(),
                eta: b.eta().iter().map(|&z| Scalar::of(z)).collect(),
            }),
            Model::Dfa(d) => {
                let mut delta = BTreeMap::new();
                for (q, name) in d.states().iter().enumerate() {
                    for (a, l) in d.alphabet().iter().enumerate() {
                        delta.insert(
                            format!("{name}|{}", label_symbol(l)),
                            d.states()[d.step_index(q, a)].clone(),
                        );
                    }
                }
                Document::Dfa(DfaDoc {
                    states: d.states().to_vec(),
                    alphabet: d
                        .alphabet()
                        .iter()
                        .map(|l| l.iter().cloned().collect())
                        .collect(),
                    delta,
                    q0: d.states()[d.q0()].clone(),
                    accepting: d
                        .accepting()
                        .iter()
                        .map(|&q| d.states()[q].clone())
                        .collect(),
                })
            }
        }
    }
}

/// Parses one model document. Syntax errors carry line and column.
pub fn parse_model(text: &str) -> Result<Model> {
    let doc: Document = serde_json::from_str(text)?;
    doc.into_model()
}

/// Pretty-printed document; floats keep full round-trip precision.
pub fn model_to_json(m: &Model) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Document::from_model(m))?)
}

/// Reads a complex matrix given as a list of rows.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text)?;
    let n = doc.len();
    matrix(&doc, n, "matrix")
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(matrix_doc(m)).expect("plain data")
}

pub fn verdict_to_value(v: &EquivalenceVerdict) -> Value {
    json!({
        "equivalent": v.equivalent,
        "witness": v.witness,
        "basis_size": v.basis_size,
        "words_explored": v.words_explored,
        "margin": v.margin,
    })
}

pub fn safety_to_value(r: &SafetyResult) -> Value {
    json!({
        "state": r.queried().state,
        "probability_satisfy": r.probability_satisfy,
        "residual": r.residual,
        "iterations": r.iterations,
        "method": r.method.as_str(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::random::{self, ChainShape, FashionKind};
    use crate::transforms;

    fn round_trip(m: Model) -> Model {
        let text = model_to_json(&m).unwrap();
        parse_model(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
    }

    #[test]
    fn hqmc_round_trip_is_exact() {
        let mut r = random::rng(1);
        let m = random::hqmc(&mut r, ChainShape::new(3, 2)).with_tol(1e-7);
        let Model::HqMC(back) = round_trip(m.clone().into()) else {
            panic!()
        };
        assert_eq!(back.tol(), 1e-7);
        assert_eq!(back.states(), m.states());
        for t in 0..3 {
            for s in 0..3 {
                assert_eq!(back.op(t, s).superop_matrix(), m.op(t, s).superop_matrix());
            }
        }
        assert_eq!(back.init(), m.init());
    }

    #[test]
    fn every_kind_round_trips() {
        let mut r = random::rng(2);
        let sl = random::sl_hqmc(&mut r, ChainShape::new(3, 2), 2);
        let hqa = random::hqa(&mut r, ChainShape::new(2, 2), 2, FashionKind::Mixed);
        let qa = transforms::hqa_to_qa(&hqa).unwrap();
        let blm = transforms::qa_to_blm(&qa).unwrap();
        let qmc = transforms::hqmc_to_qmc(sl.chain()).unwrap();
        let dfa = random::dfa(&mut r, 3, sl.ap());
        for m in [
            Model::from(sl.clone()),
            hqa.clone().into(),
            qa.into(),
            blm.clone().into(),
            qmc.into(),
            dfa.clone().into(),
        ] {
            let kind = m.kind();
            let back = round_trip(m);
            assert_eq!(back.kind(), kind);
            assert!(back.validate().is_valid());
        }
        let Model::Blm(b2) = round_trip(blm.clone().into()) else {
            panic!()
        };
        assert_eq!(b2, blm);
        let Model::Dfa(d2) = round_trip(dfa.clone().into()) else {
            panic!()
        };
        assert_eq!(d2, dfa);
        let Model::Hqa(h2) = round_trip(hqa.clone().into()) else {
            panic!()
        };
        assert_eq!(h2.fashion(), hqa.fashion());
    }

    #[test]
    fn real_shorthand_and_sparse_entries() {
        let text = r#"{"kind":"hqmc","dim":1,"states":["a","b"],
            "trans":{"b|a":{"kraus":[[[1]]]},"b|b":{"kraus":[[[1.0]]]}},
            "init":{"a":[[[1,0]]]}}"#;
        let Model::HqMC(m) = parse_model(text).unwrap() else {
            panic!()
        };
        assert!(m.validate().is_valid());
        assert!(m.op(0, 0).is_zero(0.0));
        assert!(max_abs_diff(&m.init()[1], &linalg::zeros(1, 1)) == 0.0);
    }

    #[test]
    fn errors_are_reported() {
        let unknown = parse_model(r#"{"kind":"nfa"}"#).unwrap_err();
        assert!(unknown.to_string().contains("nfa"), "{unknown}");
        let syntax = parse_model("{\n\"kind\": \"hqmc\",\n").unwrap_err();
        assert!(syntax.to_string().contains("line"), "{syntax}");
        let bad_state =
            parse_model(r#"{"kind":"hqmc","dim":1,"states":["a"],"trans":{"a|z":{"kraus":[]}}}"#);
        assert!(matches!(bad_state, Err(Error::UnknownState(s)) if s == "z"));
        let extra = parse_model(r#"{"kind":"hqmc","dim":1,"states":["a"],"bogus":1}"#);
        assert!(extra.is_err());
        let bad_init =
            parse_model(r#"{"kind":"qmc","dim":1,"op":{"kraus":[[[1]]]},"init":[[-1]]}"#);
        assert!(matches!(bad_init, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn verdict_shape() {
        let v = EquivalenceVerdict {
            equivalent: false,
            witness: Some(vec!["a".into()]),
            basis_size: 2,
            words_explored: 3,
            margin: 0.5,
        };
        let j = verdict_to_value(&v);
        assert_eq!(j["witness"], json!(["a"]));
        assert_eq!(j["basis_size"], json!(2));
    }
}
