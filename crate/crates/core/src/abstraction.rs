//! Block and context abstractions and the dependence, commutation and
//! cancellation relations between blocks.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::pda::{intersect_nfa, pda_nonempty, Nfa, Pda, PdaTransition, Symbol};
use crate::valence::{StateId, ValenceSystem};
use crate::words::{bit, lex_normal_form, vertex_set, Op, PosSet, TraceView, Word};

/// Summary `(q1, q2, f, o, Umin, Umax)` of one block of a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockAbstraction {
    pub q1: StateId,
    pub q2: StateId,
    pub f: Op,
    pub o: Op,
    pub umin: VertexSet,
    pub umax: VertexSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    E,
    Block(BlockAbstraction),
}

impl Slot {
    pub fn block(&self) -> Option<&BlockAbstraction> {
        match self {
            Slot::E => None,
            Slot::Block(b) => Some(b),
        }
    }
}

/// Up to `2k` blocks of one context plus its first letter and witness letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContextAbstraction {
    pub blocks: Vec<Slot>,
    pub f: Option<Op>,
    pub o: Option<Op>,
}

impl ContextAbstraction {
    pub fn e_context(slots: usize) -> Self {
        ContextAbstraction { blocks: vec![Slot::E; slots], f: None, o: None }
    }

    pub fn is_e(&self) -> bool {
        self.blocks.iter().all(|s| *s == Slot::E)
    }

    /// Checks the structural invariants against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let present: Vec<&BlockAbstraction> = self.blocks.iter().filter_map(Slot::block).collect();
        if present.is_empty() {
            return if self.f.is_none() && self.o.is_none() {
                Ok(())
            } else {
                Err(Error::BadAbstraction("E-context carries letters".into()))
            };
        }
        for b in &present {
            b.validate(g)?;
        }
        for (i, a) in present.iter().enumerate() {
            for b in &present[i + 1..] {
                if !blocks_dependent(g, a, b) {
                    return Err(Error::BadAbstraction("blocks are not pairwise dependent".into()));
                }
            }
        }
        if self.f != Some(present[0].f) {
            return Err(Error::BadAbstraction("context f differs from the first block".into()));
        }
        if !present.iter().any(|b| Some(b.o) == self.o) {
            return Err(Error::BadAbstraction("context o is not the o of any block".into()));
        }
        Ok(())
    }
}

/// Vertices below `umax` that are dependent with every element of `umax`.
///
/// On loop-free graphs this is the plain downward closure; with loops it
/// drops vertices that would make the letter set independent.
pub fn letter_set(g: &Graph, umax: VertexSet) -> VertexSet {
    g.down_closure(umax)
        .iter()
        .filter(|&x| umax.iter().all(|u| u == x || !g.independent(x, u)))
        .collect()
}

/// Letters allowed to survive in the reduced word of a block.
pub fn residual_set(g: &Graph, umin: VertexSet, umax: VertexSet) -> VertexSet {
    letter_set(g, umax).intersection(g.up_closure(umin))
}

impl BlockAbstraction {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for (name, u) in [("Umin", self.umin), ("Umax", self.umax)] {
            if !g.dependent_set(u) || !g.is_antichain(u) {
                return Err(Error::BadAbstraction(format!("{name} is not a neighbor antichain")));
            }
        }
        let letters = letter_set(g, self.umax);
        if !letters.contains(self.f.vertex) || !letters.contains(self.o.vertex) {
            return Err(Error::BadAbstraction("f or o lies outside the closure of Umax".into()));
        }
        Ok(())
    }

    pub fn display(&self, g: &Graph, sys: &ValenceSystem) -> String {
        format!(
            "({}, {}, {}, {}, {}, {})",
            sys.states[self.q1],
            sys.states[self.q2],
            self.f.display(g),
            self.o.display(g),
            g.format_set(self.umin),
            g.format_set(self.umax)
        )
    }
}

/// The union of the two `Umax` sets is dependent.
pub fn blocks_dependent(g: &Graph, n1: &BlockAbstraction, n2: &BlockAbstraction) -> bool {
    g.dependent_set(n1.umax.union(n2.umax))
}

/// Every letter of `Umin₁` is independent of every letter of `Umin₂`.
pub fn blocks_commute(g: &Graph, n1: &BlockAbstraction, n2: &BlockAbstraction) -> bool {
    n1.umin.iter().all(|x| n2.umin.iter().all(|y| g.independent(x, y)))
}

pub fn slots_commute(g: &Graph, a: &Slot, b: &Slot) -> bool {
    match (a, b) {
        (Slot::Block(x), Slot::Block(y)) => blocks_commute(g, x, y),
        _ => true,
    }
}

/// Stack symbol layout shared by the block automata: letters use their op
/// code; tagged copies for phase `i` are offset by `(i + 1)·2|V|`.
struct Layout {
    nv: u32,
}

impl Layout {
    fn separator(&self) -> Symbol {
        2 * self.nv
    }

    fn inputs(&self) -> u32 {
        2 * self.nv + 1
    }

    fn stack(&self) -> u32 {
        6 * self.nv
    }

    fn symbol(&self, x: Op, shared: VertexSet, phase: u32) -> Symbol {
        if shared.contains(x.vertex) {
            x.code()
        } else {
            (phase + 1) * 2 * self.nv + x.code()
        }
    }
}

/// Adds the moves of one reading phase over the letters in `letters`.
fn add_phase(p: &mut Pda, sys: &ValenceSystem, layout: &Layout, letters: VertexSet, shared: VertexSet, phase: u32, offset: usize) {
    let g = &sys.graph;
    for t in &sys.transitions {
        let (from, to) = (offset + t.from, offset + t.to);
        let Some(&x) = t.word.first() else {
            p.add(from, None, None, &[], to);
            continue;
        };
        if !letters.contains(x.vertex) {
            continue;
        }
        let a = Some(x.code());
        let plus = layout.symbol(Op::plus(x.vertex), shared, phase);
        let minus = layout.symbol(Op::minus(x.vertex), shared, phase);
        let looped = g.is_looped(x.vertex);
        if x.is_plus() {
            p.add(from, a, None, &[plus], to);
            if looped {
                p.add(from, a, Some(minus), &[], to);
            }
        } else {
            p.add(from, a, Some(plus), &[], to);
            if looped {
                p.add(from, a, None, &[minus], to);
            }
        }
    }
}

/// Adds NFA states `base..base+3` checking "begins with `f`, contains `o`".
fn add_first_and_witness(n: &mut Nfa, layout: &Layout, base: usize, f: Op, o: Op) {
    let letters: Vec<Symbol> = (0..layout.separator()).collect();
    let after_f = if f == o { base + 2 } else { base + 1 };
    n.transitions.push((base, Some(f.code()), after_f));
    for &a in &letters {
        n.transitions.push((base + 1, Some(a), base + 1));
        n.transitions.push((base + 2, Some(a), base + 2));
    }
    n.transitions.push((base + 1, Some(o.code()), base + 2));
}

/// Cancellation automaton: reads `w_u # w_v` and accepts when both blocks fit and cancel.
pub fn cancellation_pda(sys: &ValenceSystem, n1: &BlockAbstraction, n2: &BlockAbstraction) -> Result<Pda> {
    let owned;
    let sys = if sys.transitions.iter().all(|t| t.word.len() <= 1) {
        sys
    } else {
        owned = sys.expanded();
        &owned
    };
    let g = &sys.graph;
    let layout = Layout { nv: g.len() as u32 };
    let n = sys.states.len();
    let (bu, bv) = (letter_set(g, n1.umax), letter_set(g, n2.umax));
    let shared = residual_set(g, n1.umin, n1.umax).intersection(residual_set(g, n2.umin, n2.umax));
    let mut p = Pda::new(2 * n, layout.inputs(), layout.stack(), n1.q1, n + n2.q2);
    add_phase(&mut p, sys, &layout, bu, shared, 0, 0);
    add_phase(&mut p, sys, &layout, bv, shared, 1, n);
    p.add(n1.q2, Some(layout.separator()), None, &[], n + n2.q1);
    let mut nfa = Nfa { states: 6, alphabet: layout.inputs(), transitions: Vec::new(), initial: 0, finals: vec![5] };
    add_first_and_witness(&mut nfa, &layout, 0, n1.f, n1.o);
    nfa.transitions.push((2, Some(layout.separator()), 3));
    add_first_and_witness(&mut nfa, &layout, 3, n2.f, n2.o);
    intersect_nfa(&p, &nfa)
}

/// Some `u ∈ L(n1)`, `u' ∈ L(n2)` satisfy `uu' ≡ ε`.
pub fn blocks_cancel(sys: &ValenceSystem, n1: &BlockAbstraction, n2: &BlockAbstraction) -> Result<bool> {
    Ok(pda_nonempty(&cancellation_pda(sys, n1, n2)?))
}

/// Realizability of all blocks sharing `(f, o, Umin, Umax)`.
///
/// A block can take part in a cancellation only as the left partner, whose
/// reduced word lies on the stack after reading it, or as the right partner,
/// which pops such a word. Both shapes are checked with one set of summaries.
/// `Umax` must be exactly the max-set of the block's letters and `Umin`
/// exactly the min-set of its non-empty residual.
pub struct BlockRealizer {
    n: usize,
    left: Vec<Vec<bool>>,
    right: Vec<Vec<bool>>,
}

impl BlockRealizer {
    /// `sys` must read at most one letter per transition.
    pub fn new(sys: &ValenceSystem, f: Op, o: Op, umin: VertexSet, umax: VertexSet) -> Self {
        let g = &sys.graph;
        let layout = Layout { nv: g.len() as u32 };
        let n = sys.states.len();
        if umin.is_empty() {
            return BlockRealizer { n, left: vec![vec![false; n]; n], right: vec![vec![false; n]; n] };
        }
        let letters = letter_set(g, umax);
        let residual = residual_set(g, umin, umax);
        let mut p = Pda::new(n, layout.inputs(), layout.stack(), 0, 0);
        add_phase(&mut p, sys, &layout, letters, residual, 0, 0);
        // The NFA also records which vertices of `Umax` have been read: `Umax`
        // is the max-set of the block's letters iff all of them occur.
        let mut base = Nfa { states: 3, alphabet: layout.inputs(), transitions: Vec::new(), initial: 0, finals: vec![2] };
        add_first_and_witness(&mut base, &layout, 0, f, o);
        let tops: Vec<usize> = umax.iter().collect();
        let masks = 1usize << tops.len();
        let top_bit = |sym: Symbol| -> usize {
            tops.iter().position(|&v| sym < layout.separator() && v == (sym / 2) as usize).map_or(0, |i| 1 << i)
        };
        let lift = |s: usize, mask: usize| s * masks + mask;
        let mut nfa = Nfa { states: 3 * masks, alphabet: layout.inputs(), transitions: Vec::new(), initial: 0, finals: vec![lift(2, masks - 1)] };
        for &(s, a, t) in &base.transitions {
            for mask in 0..masks {
                let next = a.map_or(mask, |a| mask | top_bit(a));
                nfa.transitions.push((lift(s, mask), a, lift(t, next)));
            }
        }
        let prod = intersect_nfa(&p, &nfa).expect("alphabets agree by construction");
        let summaries = prod.summaries();
        let residual_symbols: Vec<Symbol> = residual
            .iter()
            .flat_map(|v| {
                let mut s = vec![Op::plus(v).code()];
                if g.is_looped(v) {
                    s.push(Op::minus(v).code());
                }
                s
            })
            .collect();
        // Likewise `Umin` is the min-set of the residual iff each of its vertices is a residual letter.
        let bottoms: Vec<usize> = umin.iter().collect();
        let layers = 1usize << bottoms.len();
        let bottom_bit = |sym: Symbol| -> usize { bottoms.iter().position(|&v| v == (sym / 2) as usize).map_or(0, |i| 1 << i) };
        let m = nfa.states;
        let id = |q: usize, s: usize| q * m + s;
        let states = n * m;
        // Closure states carry the `Umin` layer and the last residual letter,
        // which the next residual letter may not invert.
        let none = layout.separator() as usize;
        let closure = |residual_edge: &dyn Fn(&PdaTransition) -> Option<Symbol>| -> Vec<Vec<bool>> {
            let mut edges = vec![Vec::new(); states];
            for t in &prod.transitions {
                if t.from < states && t.to < states {
                    if let (Some(x), Some(a)) = (residual_edge(t), t.input) {
                        edges[t.from].push((t.to, bottom_bit(x), a as usize));
                    }
                }
            }
            let at = |layer: usize, last: usize| layer * (none + 1) + last;
            (0..n)
                .map(|q1| {
                    let mut seen = vec![vec![false; layers * (none + 1)]; states];
                    let mut stack = vec![(id(q1, 0), 0, none)];
                    seen[id(q1, 0)][at(0, none)] = true;
                    while let Some((s, layer, last)) = stack.pop() {
                        let summaries_from = (0..states).filter(|&t| summaries.reach(s, t)).map(|t| (t, layer, last));
                        let residual_from = edges[s]
                            .iter()
                            .filter(|&&(_, _, a)| last == none || a / 2 != last / 2 || a == last)
                            .map(|&(t, b, a)| (t, layer | b, a));
                        for (t, l, a) in summaries_from.chain(residual_from).collect::<Vec<_>>() {
                            if !seen[t][at(l, a)] {
                                seen[t][at(l, a)] = true;
                                stack.push((t, l, a));
                            }
                        }
                    }
                    let end = |q2: usize| (0..=none).any(|a| seen[id(q2, lift(2, masks - 1))][at(layers - 1, a)]);
                    (0..n).map(end).collect()
                })
                .collect()
        };
        let single = |t: &PdaTransition| t.push.len() + usize::from(t.pop.is_some()) == 1;
        let left = closure(&|t| (single(t) && t.pop.is_none() && residual_symbols.contains(&t.push[0])).then(|| t.push[0]));
        let right = closure(&|t| t.pop.filter(|x| single(t) && t.push.is_empty() && residual_symbols.contains(x)));
        BlockRealizer { n, left, right }
    }

    pub fn realizable(&self, q1: StateId, q2: StateId) -> bool {
        q1 < self.n && q2 < self.n && (self.left[q1][q2] || self.right[q1][q2])
    }
}

/// Independence of consecutive contexts: `f(next) I o(prev)` with distinct vertices.
pub fn contexts_independent(g: &Graph, prev: &ContextAbstraction, next: &ContextAbstraction) -> bool {
    if prev.is_e() {
        return true;
    }
    let (Some(o), Some(f)) = (prev.o, next.f) else {
        return false;
    };
    prev.blocks.iter().filter_map(Slot::block).any(|b| b.o == o) && f.vertex != o.vertex && g.independent(f.vertex, o.vertex)
}

/// Words on paths `q1 → q2` of length at most `max_len`.
fn path_words(sys: &ValenceSystem, q1: StateId, q2: StateId, max_len: usize, budget: usize) -> Result<Vec<Word>> {
    let mut seen: HashSet<(StateId, Word)> = HashSet::new();
    let mut out: HashSet<Word> = HashSet::new();
    let mut stack = vec![(q1, Vec::new())];
    seen.insert((q1, Vec::new()));
    while let Some((q, w)) = stack.pop() {
        if q == q2 {
            out.insert(w.clone());
        }
        for t in sys.transitions.iter().filter(|t| t.from == q) {
            if w.len() + t.word.len() > max_len {
                continue;
            }
            let mut next = w.clone();
            next.extend_from_slice(&t.word);
            if seen.insert((t.to, next.clone())) {
                if seen.len() > budget {
                    return Err(Error::ResourceLimit(format!("path enumeration exceeded {budget} prefixes")));
                }
                stack.push((t.to, next));
            }
        }
    }
    let mut words: Vec<Word> = out.into_iter().collect();
    words.sort();
    Ok(words)
}

/// Normal forms of every word represented by `n` through paths of length at most `max_len`.
pub fn represented_words(sys: &ValenceSystem, n: &BlockAbstraction, max_len: usize, budget: usize) -> Result<Vec<Word>> {
    let g = &sys.graph;
    let mut out: HashSet<Word> = HashSet::new();
    for u in path_words(sys, n.q1, n.q2, max_len, budget)? {
        let b = vertex_set(&u);
        if u.first() != Some(&n.f) || !u.contains(&n.o) || !g.dependent_set(b) || !g.max_set(b)?.is_subset(n.umax) {
            continue;
        }
        let view = TraceView::new(g, &u)?;
        let mut seen: HashSet<PosSet> = HashSet::new();
        let mut stack = vec![view.full()];
        seen.insert(view.full());
        while let Some(s) = stack.pop() {
            let hat: Word = (0..u.len()).filter(|&i| s & bit(i) != 0).map(|i| u[i]).collect();
            if g.min_set(vertex_set(&hat))?.is_subset(n.umin) {
                out.insert(lex_normal_form(g, &hat));
            }
            for (i, j) in view.moves(s) {
                let t = s & !bit(i) & !bit(j);
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
    }
    let mut words: Vec<Word> = out.into_iter().collect();
    words.sort();
    Ok(words)
}

/// `n` represents `u_hat` through some path of length at most `max_len`.
pub fn represents(sys: &ValenceSystem, n: &BlockAbstraction, u_hat: &[Op], max_len: usize) -> Result<bool> {
    let target = lex_normal_form(&sys.graph, u_hat);
    Ok(represented_words(sys, n, max_len, 1_000_000)?.contains(&target))
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::E => f.write_str("E"),
            Slot::Block(b) => write!(
                f,
                "({},{},{},{},{:#x},{:#x})",
                b.q1,
                b.q2,
                b.f.code(),
                b.o.code(),
                b.umin.0,
                b.umax.0
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{family, Family};
    use crate::valence::build_system;
    use crate::words::{parse_op, parse_word};
    use proptest::prelude::*;

    fn gamma1() -> Graph {
        let vs = ["a", "b1", "b2", "b3", "c1", "c2", "c3"];
        let mut edges = Vec::new();
        for b in ["b1", "b2", "b3"] {
            for c in ["c1", "c2", "c3"] {
                edges.push((b, c));
            }
        }
        for v in &vs[1..] {
            edges.push(("a", *v));
        }
        Graph::new(&vs, &edges, &[]).unwrap()
    }

    fn block(g: &Graph, q1: usize, q2: usize, f: &str, o: &str, umin: &[&str], umax: &[&str]) -> BlockAbstraction {
        BlockAbstraction {
            q1,
            q2,
            f: parse_op(g, f).unwrap(),
            o: parse_op(g, o).unwrap(),
            umin: g.set(umin).unwrap(),
            umax: g.set(umax).unwrap(),
        }
    }

    #[test]
    fn dependence_examples() {
        let g = gamma1();
        let b1 = block(&g, 0, 0, "b1+", "b1+", &["b1"], &["b1"]);
        let b2 = block(&g, 0, 0, "b2+", "b2+", &["b2"], &["b2"]);
        let c1 = block(&g, 0, 0, "c1+", "c1+", &["c1"], &["c1"]);
        assert!(blocks_dependent(&g, &b1, &b2));
        assert!(!blocks_dependent(&g, &b1, &c1));
        assert!(blocks_dependent(&g, &b1, &b1));
        assert!(blocks_commute(&g, &b1, &c1));
        assert!(!blocks_commute(&g, &b1, &b2));
        assert!(slots_commute(&g, &Slot::E, &Slot::Block(b1)));
    }

    #[test]
    fn cancel_examples() {
        let g = family(Family::P(1)).unwrap();
        let sys = build_system(&g, &["p1", "p2", "p3", "p4"], &[("p1", "v1+", "p2"), ("p3", "v1-", "p4")], "p1", "p4").unwrap();
        let n1 = block(&g, 0, 1, "v1+", "v1+", &["v1"], &["v1"]);
        let n2 = block(&g, 2, 3, "v1-", "v1-", &["v1"], &["v1"]);
        assert!(blocks_cancel(&sys, &n1, &n2).unwrap());
        let n2_bad = block(&g, 2, 3, "v1+", "v1+", &["v1"], &["v1"]);
        assert!(!blocks_cancel(&sys, &n1, &n2_bad).unwrap());
        let push = build_system(&g, &["p1", "p2"], &[("p1", "v1+", "p2")], "p1", "p2").unwrap();
        let n = block(&g, 0, 1, "v1+", "v1+", &["v1"], &["v1"]);
        assert!(!blocks_cancel(&push, &n, &n).unwrap());
    }

    #[test]
    fn cancel_needs_shared_residue() {
        let g = family(Family::P(1)).unwrap();
        let sys = build_system(&g, &["p1", "p2", "p3", "p4"], &[("p1", "v1+", "p2"), ("p3", "v1-", "p4")], "p1", "p4").unwrap();
        let n1 = block(&g, 0, 1, "v1+", "v1+", &[], &["v1"]);
        let n2 = block(&g, 2, 3, "v1-", "v1-", &["v1"], &["v1"]);
        assert!(!blocks_cancel(&sys, &n1, &n2).unwrap());
    }

    #[test]
    fn represents_examples() {
        let g = family(Family::P(1)).unwrap();
        let sys = build_system(&g, &["q0", "q1"], &[("q0", "v1+ v1- v1+", "q1")], "q0", "q1").unwrap();
        let e = sys.expanded();
        let n = block(&g, 0, 1, "v1+", "v1+", &["v1"], &["v1"]);
        assert!(represents(&e, &n, &parse_word(&g, "v1+").unwrap(), 6).unwrap());
        let p2 = family(Family::P(2)).unwrap();
        let sys2 = build_system(&p2, &["q0", "q1"], &[("q0", "v1+ v1- v1+", "q1")], "q0", "q1").unwrap().expanded();
        let n2 = block(&p2, 0, 1, "v1+", "v1+", &["v1"], &["v1"]);
        assert!(!represents(&sys2, &n2, &parse_word(&p2, "v2+").unwrap(), 6).unwrap());
        let sys3 = build_system(&g, &["q0", "q1"], &[("q0", "v1+ v1-", "q1")], "q0", "q1").unwrap().expanded();
        let n3 = block(&g, 0, 1, "v1+", "v1-", &[], &["v1"]);
        assert!(represents(&sys3, &n3, &[], 6).unwrap());
    }

    #[test]
    fn contexts_independent_examples() {
        let g = gamma1();
        let ctx = |b: BlockAbstraction| ContextAbstraction { blocks: vec![Slot::Block(b), Slot::E], f: Some(b.f), o: Some(b.o) };
        let prev_c1 = ctx(block(&g, 0, 0, "c1+", "c1+", &["c1"], &["c1"]));
        let prev_b2 = ctx(block(&g, 0, 0, "b2+", "b2+", &["b2"], &["b2"]));
        let next_b1 = ctx(block(&g, 0, 0, "b1+", "b1+", &["b1"], &["b1"]));
        assert!(contexts_independent(&g, &prev_c1, &next_b1));
        assert!(!contexts_independent(&g, &prev_b2, &next_b1));
        assert!(contexts_independent(&g, &ContextAbstraction::e_context(2), &next_b1));
    }

    #[test]
    fn validation_rejects_bad_blocks() {
        let g = gamma1();
        assert!(block(&g, 0, 0, "b1+", "b1+", &["b1"], &["b1"]).validate(&g).is_ok());
        assert!(block(&g, 0, 0, "c1+", "c1+", &["b1"], &["b1"]).validate(&g).is_err());
        assert!(block(&g, 0, 0, "b1+", "b1+", &["b1", "c1"], &["b1"]).validate(&g).is_err());
        let b = block(&g, 0, 0, "b1+", "b1+", &["b1"], &["b1"]);
        let c = block(&g, 0, 0, "c1+", "c1+", &["c1"], &["c1"]);
        let bad = ContextAbstraction { blocks: vec![Slot::Block(b), Slot::Block(c)], f: Some(b.f), o: Some(b.o) };
        assert!(bad.validate(&g).is_err());
    }

    /// Exact abstraction of a one-sided block word, if it has one.
    fn exact_shape(g: &Graph, u: &[Op]) -> Option<(VertexSet, VertexSet, bool, bool)> {
        let letters = vertex_set(u);
        if !g.dependent_set(letters) {
            return None;
        }
        let r = crate::words::greedy_irreducible(g, u);
        if r.is_empty() {
            return None;
        }
        let left = r.iter().all(|x| x.is_plus() || g.is_looped(x.vertex));
        let right = r.iter().all(|x| !x.is_plus() || g.is_looped(x.vertex));
        Some((g.min_set(vertex_set(&r)).unwrap(), g.max_set(letters).unwrap(), left, right))
    }

    #[test]
    fn realizer_matches_brute_force() {
        // Acyclic, so every path word is enumerated.
        let g = Graph::new(&["v1", "v2", "v3"], &[("v1", "v3")], &["v1"]).unwrap();
        let sys = build_system(
            &g,
            &["a", "b", "c", "d"],
            &[("a", "v1+ v2+", "b"), ("a", "v2- v1-", "b"), ("b", "v1- v3+", "c"), ("b", "v2+ v2-", "c"), ("a", "v3+", "c"), ("c", "v1+ v1-", "d"), ("b", "", "d")],
            "a",
            "d",
        )
        .unwrap()
        .expanded();
        let n = sys.states.len();
        let mut expected = HashSet::new();
        for q1 in 0..n {
            for q2 in 0..n {
                for u in path_words(&sys, q1, q2, 12, 100_000).unwrap() {
                    if let Some((umin, umax, left, right)) = exact_shape(&g, &u) {
                        if left || right {
                            expected.insert((q1, q2, u[0], umin, umax));
                        }
                    }
                }
            }
        }
        let antichains = g.neighbor_antichains(g.len());
        let mut found = HashSet::new();
        for &umax in &antichains {
            for &umin in &antichains {
                for f in g.vertices().flat_map(|v| [Op::plus(v), Op::minus(v)]) {
                    let r = BlockRealizer::new(&sys, f, f, umin, umax);
                    for q1 in 0..n {
                        for q2 in 0..n {
                            if r.realizable(q1, q2) {
                                found.insert((q1, q2, f, umin, umax));
                            }
                        }
                    }
                }
            }
        }
        assert!(!expected.is_empty());
        assert_eq!(found, expected);
    }

    fn dependent_subset(g: &Graph, bits: u64) -> VertexSet {
        let mut s = VertexSet::EMPTY;
        for v in g.vertices() {
            if bits >> v & 1 == 1 && g.dependent_set(s.with(v)) {
                s.insert(v);
            }
        }
        s
    }

    proptest! {
        #[test]
        fn lem_dep_matches_closure_check(edges in any::<u64>(), loops in any::<u8>(), b1 in any::<u64>(), b2 in any::<u64>()) {
            let names = ["a", "b", "c", "d", "e", "f"];
            let mut es = Vec::new();
            let mut k = 0;
            for i in 0..6 {
                for j in i + 1..6 {
                    if edges >> k & 1 == 1 {
                        es.push((names[i], names[j]));
                    }
                    k += 1;
                }
            }
            let ls: Vec<&str> = (0..6).filter(|i| loops >> i & 1 == 1).map(|i| names[i]).collect();
            let g = Graph::new(&names, &es, &ls).unwrap();
            let (s1, s2) = (dependent_subset(&g, b1), dependent_subset(&g, b2));
            prop_assume!(!s1.is_empty() && !s2.is_empty());
            let mk = |s: VertexSet| BlockAbstraction {
                q1: 0, q2: 0, f: Op::plus(s.iter().next().unwrap()), o: Op::plus(s.iter().next().unwrap()),
                umin: g.min_set(s).unwrap(), umax: g.max_set(s).unwrap(),
            };
            let direct = s1.iter().all(|x| s2.iter().all(|y| x == y || !g.independent(x, y)));
            prop_assert_eq!(blocks_dependent(&g, &mk(s1), &mk(s2)), direct);
        }
    }
}
