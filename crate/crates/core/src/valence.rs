//! Valence systems and the bounded brute-force reachability oracle.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::decomposition::{scope, Scope};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::words::{is_identity, parse_tokens, word_tokens, Word, DEFAULT_BUDGET};

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub word: Word,
    pub to: StateId,
}

/// A finite automaton whose transitions carry words over a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValenceSystem {
    pub graph: Graph,
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
    pub initial: StateId,
    pub final_state: StateId,
}

/// Serialized form; words are token lists such as `["a+", "b-"]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub states: Vec<String>,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_state: String,
    pub transitions: Vec<TransitionSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionSpec {
    pub from: String,
    pub word: Vec<String>,
    pub to: String,
}

/// Build a system from state names and `(from, word text, to)` triples.
pub fn build_system(
    g: &Graph,
    states: &[&str],
    transitions: &[(&str, &str, &str)],
    initial: &str,
    final_state: &str,
) -> Result<ValenceSystem> {
    let spec = SystemSpec {
        states: states.iter().map(|s| s.to_string()).collect(),
        initial: initial.into(),
        final_state: final_state.into(),
        transitions: transitions
            .iter()
            .map(|(f, w, t)| TransitionSpec {
                from: f.to_string(),
                word: w.split_whitespace().map(String::from).collect(),
                to: t.to_string(),
            })
            .collect(),
    };
    ValenceSystem::from_spec(g.clone(), &spec)
}

impl ValenceSystem {
    pub fn from_spec(graph: Graph, spec: &SystemSpec) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, s) in spec.states.iter().enumerate() {
            if index.insert(s.as_str(), i).is_some() {
                return Err(Error::DuplicateState(s.clone()));
            }
        }
        let state = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownState(s.to_string()));
        let transitions = spec
            .transitions
            .iter()
            .map(|t| {
                let word = parse_tokens(&graph, &t.word).map_err(|e| match e {
                    Error::BadToken(tok) if tok.ends_with(['+', '-']) => Error::UnknownVertex(tok[..tok.len() - 1].into()),
                    e => e,
                })?;
                Ok(Transition { from: state(&t.from)?, word, to: state(&t.to)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ValenceSystem {
            initial: state(&spec.initial)?,
            final_state: state(&spec.final_state)?,
            states: spec.states.clone(),
            transitions,
            graph,
        })
    }

    pub fn spec(&self) -> SystemSpec {
        SystemSpec {
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            final_state: self.states[self.final_state].clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionSpec {
                    from: self.states[t.from].clone(),
                    word: word_tokens(&self.graph, &t.word),
                    to: self.states[t.to].clone(),
                })
                .collect(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Equivalent system whose transitions read at most one operation.
    ///
    /// Original state ids are kept; intermediate states are appended.
    pub fn expanded(&self) -> ValenceSystem {
        let mut states = self.states.clone();
        let mut transitions = Vec::new();
        for (ti, t) in self.transitions.iter().enumerate() {
            if t.word.len() <= 1 {
                transitions.push(t.clone());
                continue;
            }
            let mut from = t.from;
            for (pos, &x) in t.word.iter().enumerate() {
                let to = if pos + 1 == t.word.len() {
                    t.to
                } else {
                    states.push(format!("t{ti}.{}", pos + 1));
                    states.len() - 1
                };
                transitions.push(Transition { from, word: vec![x], to });
                from = to;
            }
        }
        ValenceSystem {
            graph: self.graph.clone(),
            states,
            transitions,
            initial: self.initial,
            final_state: self.final_state,
        }
    }

    /// States reachable from `q` through ε-transitions, `q` included.
    pub fn epsilon_closure(&self, q: StateId) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        seen[q] = true;
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for t in &self.transitions {
                if t.from == p && t.word.is_empty() && !seen[t.to] {
                    seen[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
        seen
    }

    /// Replay a transition sequence from the initial state; returns the word.
    pub fn replay(&self, run: &[usize]) -> Option<Word> {
        let mut q = self.initial;
        let mut w = Vec::new();
        for &ti in run {
            let t = self.transitions.get(ti)?;
            if t.from != q {
                return None;
            }
            w.extend_from_slice(&t.word);
            q = t.to;
        }
        (q == self.final_state).then_some(w)
    }
}

/// A run from the initial to the final state whose word is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunWitness {
    /// Transition indices in run order.
    pub transitions: Vec<usize>,
    pub word: Word,
    pub scope: Scope,
}

/// Breadth-first search over runs by accumulated word length.
///
/// `None` only means no witness exists up to `max_word_len`.
pub fn oracle_bsreach(sys: &ValenceSystem, k: Scope, max_word_len: usize) -> Result<Option<RunWitness>> {
    oracle_bsreach_with_budget(sys, k, max_word_len, 5_000_000)
}

pub fn oracle_bsreach_with_budget(
    sys: &ValenceSystem,
    k: Scope,
    max_word_len: usize,
    budget: usize,
) -> Result<Option<RunWitness>> {
    struct Entry {
        state: StateId,
        word: Word,
        parent: usize,
        via: usize,
        steps: usize,
    }
    let cap = 4 * max_word_len + sys.state_count();
    let mut entries: Vec<Entry> = Vec::new();
    let mut index: HashMap<(StateId, Word), usize> = HashMap::new();
    let mut verdicts: HashMap<Word, Option<Scope>> = HashMap::new();
    let mut buckets: Vec<VecDeque<usize>> = (0..=max_word_len).map(|_| VecDeque::new()).collect();
    entries.push(Entry { state: sys.initial, word: Vec::new(), parent: usize::MAX, via: usize::MAX, steps: 0 });
    index.insert((sys.initial, Vec::new()), 0);
    buckets[0].push_back(0);
    for len in 0..=max_word_len {
        while let Some(e) = buckets[len].pop_front() {
            if entries[e].state == sys.final_state {
                let w = &entries[e].word;
                let found = match verdicts.get(w) {
                    Some(v) => *v,
                    None => {
                        let v = if is_identity(&sys.graph, w)? { Some(scope(&sys.graph, w, DEFAULT_BUDGET)?) } else { None };
                        verdicts.insert(w.clone(), v);
                        v
                    }
                };
                if let Some(sc) = found.filter(|&sc| sc <= k) {
                    let mut run = Vec::new();
                    let mut cur = e;
                    while entries[cur].parent != usize::MAX {
                        run.push(entries[cur].via);
                        cur = entries[cur].parent;
                    }
                    run.reverse();
                    return Ok(Some(RunWitness { transitions: run, word: entries[e].word.clone(), scope: sc }));
                }
            }
            if entries[e].steps >= cap {
                continue;
            }
            for (ti, t) in sys.transitions.iter().enumerate() {
                if t.from != entries[e].state || len + t.word.len() > max_word_len {
                    continue;
                }
                let mut word = entries[e].word.clone();
                word.extend_from_slice(&t.word);
                let key = (t.to, word);
                if index.contains_key(&key) {
                    continue;
                }
                let id = entries.len();
                if id >= budget {
                    return Err(Error::ResourceLimit(format!("oracle exceeded {budget} run prefixes")));
                }
                let next_len = key.1.len();
                entries.push(Entry { state: t.to, word: key.1.clone(), parent: e, via: ti, steps: entries[e].steps + 1 });
                index.insert(key, id);
                buckets[next_len].push_back(id);
            }
        }
    }
    Ok(None)
}
