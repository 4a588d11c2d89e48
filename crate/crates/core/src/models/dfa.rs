use std::collections::BTreeSet;

use super::{check_unique, index_of, label_symbol, Label};
use crate::error::{Error, Result};

/// Total DFA over label sets (the alphabet `2^AP`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    states: Vec<String>,
    alphabet: Vec<Label>,
    /// `delta[q * |Σ| + a]`
    delta: Vec<usize>,
    q0: usize,
    accepting: BTreeSet<usize>,
}

impl Dfa {
    /// `delta` maps `(state, symbol)` index pairs to target indices and must be
    /// total.
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<Label>,
        delta: impl IntoIterator<Item = ((usize, usize), usize)>,
        q0: usize,
        accepting: BTreeSet<usize>,
    ) -> Result<Self> {
        check_unique(&states, "DFA state")?;
        let distinct: BTreeSet<&Label> = alphabet.iter().collect();
        if distinct.len() != alphabet.len() {
            return Err(Error::Format("duplicate DFA alphabet symbols".into()));
        }
        let (nq, na) = (states.len(), alphabet.len());
        let mut table = vec![usize::MAX; nq * na];
        for ((q, a), t) in delta {
            if q >= nq || a >= na || t >= nq {
                return Err(Error::Format(format!(
                    "DFA transition ({q},{a}) -> {t} out of range"
                )));
            }
            table[q * na + a] = t;
        }
        if let Some(k) = table.iter().position(|&t| t == usize::MAX) {
            return Err(Error::Format(format!(
                "DFA is not total: no transition from `{}` on {}",
                states[k / na],
                label_symbol(&alphabet[k % na])
            )));
        }
        if q0 >= nq || accepting.iter().any(|&q| q >= nq) {
            return Err(Error::Format(
                "DFA initial/accepting state out of range".into(),
            ));
        }
        Ok(Self {
            states,
            alphabet,
            delta: table,
            q0,
            accepting,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn q0(&self) -> usize {
        self.q0
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        index_of(&self.states, name)
    }

    pub fn symbol_index(&self, label: &Label) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownSymbol(label_symbol(label)))
    }

    pub fn step_index(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.alphabet.len() + a]
    }

    pub fn step(&self, q: usize, label: &Label) -> Result<usize> {
        Ok(self.step_index(q, self.symbol_index(label)?))
    }

    /// Runs from `q0`.
    pub fn run(&self, word: &[Label]) -> Result<usize> {
        word.iter().try_fold(self.q0, |q, l| self.step(q, l))
    }

    pub fn accepts(&self, word: &[Label]) -> Result<bool> {
        Ok(self.is_accepting(self.run(word)?))
    }
}
