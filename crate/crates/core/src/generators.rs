//! Instance generators: random systems and the queue and bit-vector gadgets.
//!
//! Queue machines (`Bqa`) keep `n` bits in a cyclic queue; a transition
//! `(p, x, y, p')` dequeues `x` and enqueues `y`. Bit-vector machines
//! (`Bva`) keep `n` cells; `(p, i, x, y, p')` requires cell `i` to hold `x`
//! and overwrites it with `y`. Both start from `(initial, 0ⁿ)` and accept in
//! `(final, 0ⁿ)`.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::valence::{StateId, SystemSpec, Transition, TransitionSpec, ValenceSystem};
use crate::words::{word_tokens, Op, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetKind {
    Bqa,
    Bva,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetTransition {
    pub from: String,
    /// 1-based cell index; ignored by queue machines.
    #[serde(default)]
    pub cell: usize,
    pub x: u8,
    pub y: u8,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetMachine {
    pub kind: GadgetKind,
    pub n: usize,
    pub states: Vec<String>,
    pub transitions: Vec<GadgetTransition>,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_state: String,
}

/// Fresh initial and final states added by both gadgets.
pub const GADGET_INITIAL: &str = "^init";
pub const GADGET_FINAL: &str = "^fin";

impl GadgetMachine {
    fn check(&self, kind: GadgetKind) -> Result<()> {
        let bad = |m: String| Err(Error::BadMachine(m));
        if self.kind != kind {
            return bad(format!("expected a {kind:?} machine"));
        }
        if self.n == 0 || self.n > 32 {
            return bad(format!("cell count {} outside 1..=32", self.n));
        }
        let states: HashSet<&str> = self.states.iter().map(String::as_str).collect();
        if states.len() != self.states.len() {
            return bad("duplicate state".into());
        }
        for s in [GADGET_INITIAL, GADGET_FINAL] {
            if states.contains(s) {
                return bad(format!("state name `{s}` is reserved"));
            }
        }
        for s in [&self.initial, &self.final_state] {
            if !states.contains(s.as_str()) {
                return Err(Error::UnknownState(s.clone()));
            }
        }
        for t in &self.transitions {
            for s in [&t.from, &t.to] {
                if !states.contains(s.as_str()) {
                    return Err(Error::UnknownState(s.clone()));
                }
            }
            if t.x > 1 || t.y > 1 {
                return bad("bits must be 0 or 1".into());
            }
            if kind == GadgetKind::Bva && !(1..=self.n).contains(&t.cell) {
                return bad(format!("cell {} outside 1..={}", t.cell, self.n));
            }
        }
        Ok(())
    }

    fn index(&self, s: &str) -> usize {
        self.states.iter().position(|x| x == s).expect("checked")
    }

    /// Reachability of `(final, 0ⁿ)` from `(initial, 0ⁿ)` by exhaustive search.
    pub fn simulate(&self) -> Result<bool> {
        self.check(self.kind)?;
        let n = self.n;
        let start = (self.index(&self.initial), 0u32);
        let goal = (self.index(&self.final_state), 0u32);
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((p, bits)) = queue.pop_front() {
            if (p, bits) == goal {
                return Ok(true);
            }
            for t in self.transitions.iter().filter(|t| self.index(&t.from) == p) {
                let next = match self.kind {
                    // Bit 0 is the front of the queue.
                    GadgetKind::Bqa => {
                        if bits & 1 != u32::from(t.x) {
                            continue;
                        }
                        (bits >> 1) | u32::from(t.y) << (n - 1)
                    }
                    GadgetKind::Bva => {
                        let i = t.cell - 1;
                        if bits >> i & 1 != u32::from(t.x) {
                            continue;
                        }
                        (bits & !(1 << i)) | u32::from(t.y) << i
                    }
                };
                let s = (self.index(&t.to), next);
                if seen.insert(s) {
                    queue.push_back(s);
                }
            }
        }
        Ok(false)
    }
}

fn gadget_system(g: &Graph, m: &GadgetMachine, start: Word, end: Word, steps: Vec<(usize, Word, usize)>) -> ValenceSystem {
    let mut states = m.states.clone();
    states.push(GADGET_INITIAL.into());
    states.push(GADGET_FINAL.into());
    let (init, fin) = (states.len() - 2, states.len() - 1);
    let mut transitions = vec![Transition { from: init, word: start, to: m.index(&m.initial) }];
    transitions.extend(steps.into_iter().map(|(from, word, to)| Transition { from, word, to }));
    transitions.push(Transition { from: m.index(&m.final_state), word: end, to: fin });
    ValenceSystem { graph: g.clone(), states, transitions, initial: init, final_state: fin }
}

/// Queue gadget over two independent vertices `u` and `v`; returns the
/// system and its scope bound.
pub fn gen_bqa(m: &GadgetMachine, g: &Graph, u: VertexId, v: VertexId) -> Result<(ValenceSystem, usize)> {
    m.check(GadgetKind::Bqa)?;
    if u >= g.len() || v >= g.len() {
        return Err(Error::UnknownVertex(format!("{}", u.max(v))));
    }
    if u == v || !g.independent(u, v) {
        return Err(Error::VerticesNotAdjacent(g.name(u).into(), g.name(v).into()));
    }
    let zero = vec![Op::plus(u)];
    let one = vec![Op::plus(u), Op::plus(u)];
    let bar = |w: &Word| -> Word { w.iter().map(|x| Op::minus(x.vertex)).collect() };
    let sep = vec![Op::plus(v), Op::minus(v)];
    let e = vec![Op::plus(u), Op::minus(u)];
    let cat = |parts: &[&Word]| -> Word {
        parts.iter().flat_map(|p| p.iter().copied().chain(sep.iter().copied())).collect()
    };
    let (zero_b, one_b) = (bar(&zero), bar(&one));
    let mut t0 = cat(&[&zero, &one, &one]);
    let mut tf = cat(&[&zero_b, &one_b, &one_b]);
    for _ in 1..m.n {
        t0.extend(cat(&[&e, &e, &e, &zero, &one, &one]));
        tf.extend(cat(&[&e, &e, &e, &zero_b, &one_b, &one_b]));
    }
    let read = |x: u8| if x == 0 { [&zero_b, &one_b, &one_b] } else { [&one_b, &zero_b, &zero_b] };
    let write = |y: u8| if y == 0 { [&zero, &one, &one] } else { [&one, &zero, &zero] };
    let steps = m
        .transitions
        .iter()
        .map(|t| {
            let [x1, x2, x3] = read(t.x);
            let [y1, y2, y3] = write(t.y);
            (m.index(&t.from), cat(&[x1, x2, x3, y1, y2, y3]), m.index(&t.to))
        })
        .collect();
    let k = if g.class_of(u) == g.class_of(v) { 6 * (2 * m.n - 1) } else { 3 * (2 * m.n - 1) };
    Ok((gadget_system(g, m, t0, tf, steps), k))
}

/// Looped `u` and `v`, independent of each other; returns the graph and `(u, v)`.
///
/// With an unlooped `u` the gadget words are not `k`-scoped, so the queue
/// reading needs the loop on `u`.
pub fn bqa_graph() -> Result<(Graph, VertexId, VertexId)> {
    let g = Graph::new(&["u", "v"], &[("u", "v")], &["u", "v"])?;
    Ok((g, 0, 1))
}

/// Vertices `a1, b1, …, an, bn` of the bit-vector gadget.
pub fn bva_vertices(g: &Graph, n: usize) -> Result<Vec<(VertexId, VertexId)>> {
    let pairs = (1..=n)
        .map(|i| {
            let find = |name: String| g.vertex(&name).map_err(|_| Error::BadGadgetGraph(format!("missing vertex `{name}`")));
            Ok((find(format!("a{i}"))?, find(format!("b{i}"))?))
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<VertexId> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    for (i, &x) in all.iter().enumerate() {
        for &y in &all[i + 1..] {
            if !g.independent(x, y) {
                return Err(Error::BadGadgetGraph(format!("`{}` and `{}` must be adjacent", g.name(x), g.name(y))));
            }
        }
    }
    Ok(pairs)
}

/// Unlooped clique on `a1, b1, …, an, bn`.
pub fn bva_graph(n: usize) -> Result<Graph> {
    let names: Vec<String> = (1..=n).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect();
    let v: Vec<&str> = names.iter().map(String::as_str).collect();
    let edges: Vec<(&str, &str)> = (0..v.len()).flat_map(|i| (i + 1..v.len()).map(move |j| (i, j))).map(|(i, j)| (v[i], v[j])).collect();
    Graph::new(&v, &edges, &[])
}

/// Bit-vector gadget for scope bound `k`; barred letters are `-` operations.
pub fn gen_bva(m: &GadgetMachine, g: &Graph, k: usize) -> Result<ValenceSystem> {
    m.check(GadgetKind::Bva)?;
    if k == 0 {
        return Err(Error::ZeroScopeBound);
    }
    let cells = bva_vertices(g, m.n)?;
    let pow = |x: Op, e: usize| std::iter::repeat_n(x, e);
    let sep = |b: VertexId| [Op::plus(b), Op::minus(b)];
    let mut t0 = Vec::new();
    let mut tf = Vec::new();
    for &(a, b) in &cells {
        t0.extend(pow(Op::plus(a), k).chain(sep(b)));
        tf.extend(pow(Op::minus(a), k).chain(sep(b)));
    }
    let steps = m
        .transitions
        .iter()
        .map(|t| {
            let (a, b) = cells[t.cell - 1];
            let mut w: Word = pow(Op::minus(a), (1 + 2 * t.x as usize) * k).chain(sep(b)).collect();
            for _ in 0..k {
                w.extend([Op::plus(a), Op::minus(a)].into_iter().chain(sep(b)));
            }
            w.extend(pow(Op::plus(a), (1 + 2 * t.y as usize) * k).chain(sep(b)));
            (m.index(&t.from), w, m.index(&t.to))
        })
        .collect();
    Ok(gadget_system(g, m, t0, tf, steps))
}

/// Pseudo-random graph and system, fully determined by the arguments.
///
/// Vertices `v1..`, each pair independent with probability 1/2 and each
/// vertex looped with probability 1/4; states `q0..` with initial `q0` and
/// final the last state; transition words of length `0..=word_len`.
pub fn gen_random(seed: u64, graph_size: usize, states: usize, trans: usize, word_len: usize) -> Result<(Graph, ValenceSystem)> {
    if graph_size == 0 || states == 0 {
        return Err(Error::BadFamilyParams(format!("random({graph_size}, {states})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (1..=graph_size).map(|i| format!("v{i}")).collect();
    let v: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut edges = Vec::new();
    let mut loops = Vec::new();
    for i in 0..graph_size {
        if rng.gen_bool(0.25) {
            loops.push(v[i]);
        }
        for j in i + 1..graph_size {
            if rng.gen_bool(0.5) {
                edges.push((v[i], v[j]));
            }
        }
    }
    let g = Graph::new(&v, &edges, &loops)?;
    let state_names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let transitions = (0..trans)
        .map(|_| {
            let from = rng.gen_range(0..states);
            let to = rng.gen_range(0..states);
            let len = rng.gen_range(0..=word_len);
            let word: Word = (0..len)
                .map(|_| {
                    let x = rng.gen_range(0..graph_size);
                    if rng.gen_bool(0.5) { Op::plus(x) } else { Op::minus(x) }
                })
                .collect();
            TransitionSpec { from: state_names[from].clone(), word: word_tokens(&g, &word), to: state_names[to].clone() }
        })
        .collect();
    let spec = SystemSpec {
        initial: state_names[0].clone(),
        final_state: state_names[states - 1].clone(),
        states: state_names,
        transitions,
    };
    let sys = ValenceSystem::from_spec(g.clone(), &spec)?;
    Ok((g, sys))
}

/// Look up a state of a generated system by name.
pub fn state_named(sys: &ValenceSystem, name: &str) -> Option<StateId> {
    sys.states.iter().position(|s| s == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{family, Family};
    use crate::words::format_word;

    fn bqa(n: usize, transitions: &[(&str, u8, u8, &str)]) -> GadgetMachine {
        GadgetMachine {
            kind: GadgetKind::Bqa,
            n,
            states: vec!["p".into(), "q".into()],
            transitions: transitions
                .iter()
                .map(|&(f, x, y, t)| GadgetTransition { from: f.into(), cell: 0, x, y, to: t.into() })
                .collect(),
            initial: "p".into(),
            final_state: "q".into(),
        }
    }

    #[test]
    fn bqa_scope_bounds() {
        let uc = family(Family::UC(2)).unwrap();
        let (_, k) = gen_bqa(&bqa(2, &[]), &uc, 0, 1).unwrap();
        assert_eq!(k, 9);
        // One class: v3 is dependent with both and links them.
        let g = Graph::new(&["v1", "v2", "v3"], &[("v1", "v2")], &[]).unwrap();
        let (_, k) = gen_bqa(&bqa(1, &[]), &g, 0, 1).unwrap();
        assert_eq!(k, 6);
        let p2 = family(Family::P(2)).unwrap();
        assert!(matches!(gen_bqa(&bqa(1, &[]), &p2, 0, 1), Err(Error::VerticesNotAdjacent(..))));
    }

    #[test]
    fn bqa_words() {
        let uc = family(Family::UC(2)).unwrap();
        let (s, _) = gen_bqa(&bqa(2, &[("p", 1, 0, "q")]), &uc, 0, 1).unwrap();
        assert_eq!(s.transitions[0].word.len(), 34);
        assert_eq!(
            format_word(&uc, &s.transitions[1].word),
            "v1- v1- v2+ v2- v1- v2+ v2- v1- v2+ v2- v1+ v2+ v2- v1+ v1+ v2+ v2- v1+ v1+ v2+ v2-"
        );
        assert_eq!(s.states[s.initial], GADGET_INITIAL);
    }

    #[test]
    fn bva_word_lengths() {
        let g = bva_graph(1).unwrap();
        let m = |x, y| GadgetMachine {
            kind: GadgetKind::Bva,
            n: 1,
            states: vec!["p".into()],
            transitions: vec![GadgetTransition { from: "p".into(), cell: 1, x, y, to: "p".into() }],
            initial: "p".into(),
            final_state: "p".into(),
        };
        assert_eq!(gen_bva(&m(0, 1), &g, 1).unwrap().transitions[1].word.len(), 12);
        assert_eq!(gen_bva(&m(0, 0), &g, 1).unwrap().transitions[1].word.len(), 10);
        let s = gen_bva(&m(0, 0), &g, 2).unwrap();
        assert_eq!(format_word(&g, &s.transitions[0].word), "a1+ a1+ b1+ b1-");
        assert!(matches!(gen_bva(&m(0, 0), &family(Family::P(2)).unwrap(), 1), Err(Error::BadGadgetGraph(_))));
    }

    #[test]
    fn simulators() {
        assert!(bqa(1, &[("p", 0, 0, "q")]).simulate().unwrap());
        assert!(!bqa(1, &[("p", 0, 1, "q")]).simulate().unwrap());
        assert!(bqa(2, &[("p", 0, 1, "p"), ("p", 0, 0, "p"), ("p", 1, 0, "q")]).simulate().unwrap());
        assert!(!bqa(2, &[("p", 1, 0, "q")]).simulate().unwrap());
        let mut bad = bqa(1, &[("p", 2, 0, "q")]);
        assert!(matches!(bad.simulate(), Err(Error::BadMachine(_))));
        bad.transitions.clear();
        bad.states.push(GADGET_FINAL.into());
        assert!(matches!(bad.simulate(), Err(Error::BadMachine(_))));
    }

    #[test]
    fn random_is_deterministic() {
        let a = gen_random(1, 3, 3, 4, 3).unwrap();
        let b = gen_random(1, 3, 3, 4, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.0.len(), 3);
        assert_ne!(gen_random(2, 3, 3, 4, 3).unwrap().1, a.1);
    }
}
