//! Words over the signed letters v⁺/v⁻, the rewriting rules R1–R3 and the
//! identity test w ≡ ε.
//!
//! Searches never enumerate words directly. Two words that differ by R3 swaps
//! denote the same trace, and every word reachable from `w` is determined by
//! which positions of `w` are still present, so the search state is the set of
//! surviving positions (at most 128 letters).

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// A letter v⁺ or v⁻.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Op {
    pub vertex: VertexId,
    pub sign: Sign,
}

impl Op {
    pub fn plus(vertex: VertexId) -> Self {
        Op { vertex, sign: Sign::Plus }
    }

    pub fn minus(vertex: VertexId) -> Self {
        Op { vertex, sign: Sign::Minus }
    }

    pub fn is_plus(self) -> bool {
        self.sign == Sign::Plus
    }

    pub fn inverse(self) -> Self {
        let sign = match self.sign {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        };
        Op { vertex: self.vertex, sign }
    }

    /// Dense index 2v + sign, used as an automaton input symbol.
    pub fn code(self) -> u32 {
        2 * self.vertex as u32 + u32::from(self.sign == Sign::Minus)
    }

    pub fn from_code(code: u32) -> Self {
        let vertex = (code / 2) as VertexId;
        if code % 2 == 0 {
            Op::plus(vertex)
        } else {
            Op::minus(vertex)
        }
    }

    pub fn display(self, g: &Graph) -> String {
        let s = if self.is_plus() { '+' } else { '-' };
        format!("{}{}", g.name(self.vertex), s)
    }
}

pub type Word = Vec<Op>;

/// Longest word the position-set searches accept.
pub const MAX_SEARCH_LEN: usize = 128;

/// Default state budget for the exhaustive searches.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A rewriting step touching positions `position` and `position + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReductionStep {
    pub rule: Rule,
    pub position: usize,
}

pub fn parse_op(g: &Graph, token: &str) -> Result<Op> {
    let bad = || Error::BadToken(token.to_string());
    let (name, sign) = match token.as_bytes().last() {
        Some(b'+') => (&token[..token.len() - 1], Sign::Plus),
        Some(b'-') => (&token[..token.len() - 1], Sign::Minus),
        _ => return Err(bad()),
    };
    let vertex = g.vertex(name).map_err(|_| bad())?;
    Ok(Op { vertex, sign })
}

/// Parses whitespace-separated `name+` / `name-` tokens.
pub fn parse_word(g: &Graph, text: &str) -> Result<Word> {
    text.split_whitespace().map(|t| parse_op(g, t)).collect()
}

pub fn parse_tokens<S: AsRef<str>>(g: &Graph, tokens: &[S]) -> Result<Word> {
    tokens.iter().map(|t| parse_op(g, t.as_ref())).collect()
}

pub fn format_word(g: &Graph, w: &[Op]) -> String {
    w.iter().map(|x| x.display(g)).collect::<Vec<_>>().join(" ")
}

pub fn word_tokens(g: &Graph, w: &[Op]) -> Vec<String> {
    w.iter().map(|x| x.display(g)).collect()
}

pub fn vertex_set(w: &[Op]) -> VertexSet {
    w.iter().map(|x| x.vertex).collect()
}

/// xIy: distinct letters over independent vertices.
pub fn ops_independent(g: &Graph, x: Op, y: Op) -> bool {
    x != y && g.independent(x.vertex, y.vertex)
}

/// Whether the adjacent pair `x y` is deleted by R1 or R2.
pub fn cancels(g: &Graph, x: Op, y: Op) -> bool {
    x.vertex == y.vertex && x.sign != y.sign && (x.is_plus() || g.is_looped(x.vertex))
}

pub fn apply_step(g: &Graph, w: &[Op], s: ReductionStep) -> Result<Word> {
    let i = s.position;
    let not_applicable = || Error::StepNotApplicable { rule: s.rule.to_string(), position: i };
    if i + 1 >= w.len() {
        return Err(not_applicable());
    }
    let (x, y) = (w[i], w[i + 1]);
    let ok = match s.rule {
        Rule::R1 => x.vertex == y.vertex && x.is_plus() && !y.is_plus(),
        Rule::R2 => x.vertex == y.vertex && !x.is_plus() && y.is_plus() && g.is_looped(x.vertex),
        Rule::R3 => ops_independent(g, x, y),
    };
    if !ok {
        return Err(not_applicable());
    }
    let mut out = w.to_vec();
    match s.rule {
        Rule::R3 => out.swap(i, i + 1),
        _ => {
            out.drain(i..i + 2);
        }
    }
    Ok(out)
}

/// Necessary condition for w ≡ ε: per vertex, as many v⁺ as v⁻.
pub fn balanced(w: &[Op]) -> bool {
    let mut count = [0i32; crate::graph::MAX_VERTICES];
    for x in w {
        count[x.vertex] += if x.is_plus() { 1 } else { -1 };
    }
    count.iter().all(|&c| c == 0)
}

/// Stack-based leftmost-innermost R1/R2 cancellation.
pub fn greedy_irreducible(g: &Graph, w: &[Op]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        match out.last() {
            Some(&y) if cancels(g, y, x) => {
                out.pop();
            }
            _ => out.push(x),
        }
    }
    out
}

/// Lexicographically least word in the trace of `w`.
pub fn lex_normal_form(g: &Graph, w: &[Op]) -> Word {
    let mut remaining: Vec<Op> = w.to_vec();
    let mut out = Vec::with_capacity(w.len());
    while !remaining.is_empty() {
        // A letter can be moved to the front iff it is independent of everything before it.
        let mut best: Option<usize> = None;
        for i in 0..remaining.len() {
            if remaining[..i].iter().all(|&y| ops_independent(g, y, remaining[i]))
                && best.is_none_or(|b| remaining[i] < remaining[b])
            {
                best = Some(i);
            }
        }
        let b = best.expect("first letter is always movable");
        out.push(remaining.remove(b));
    }
    out
}

/// Position sets for words of length ≤ 128.
pub(crate) type PosSet = u128;

pub(crate) fn bit(i: usize) -> PosSet {
    1u128 << i
}

pub(crate) fn positions(s: PosSet) -> impl Iterator<Item = usize> {
    let mut bits = s;
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(i)
    })
}

/// Dependence structure of a fixed word, used by the position-set searches.
pub(crate) struct TraceView<'a> {
    pub g: &'a Graph,
    pub w: &'a [Op],
    dep: Vec<PosSet>,
}

impl<'a> TraceView<'a> {
    pub fn new(g: &'a Graph, w: &'a [Op]) -> Result<Self> {
        if w.len() > MAX_SEARCH_LEN {
            return Err(Error::ResourceLimit(format!("word longer than {MAX_SEARCH_LEN} letters")));
        }
        let dep = (0..w.len())
            .map(|i| {
                (0..w.len()).filter(|&j| j != i && !ops_independent(g, w[i], w[j])).fold(0, |m, j| m | bit(j))
            })
            .collect();
        Ok(TraceView { g, w, dep })
    }

    pub fn full(&self) -> PosSet {
        if self.w.len() == 128 {
            u128::MAX
        } else {
            bit(self.w.len()) - 1
        }
    }

    /// Letters at `i < j` cancel once adjacent (in some order).
    pub fn pair_cancels(&self, i: usize, j: usize) -> bool {
        let (x, y) = (self.w[i], self.w[j]);
        x.vertex == y.vertex && x.sign != y.sign && (x.is_plus() || self.g.is_looped(x.vertex))
    }

    /// Whether `i < j` can be made adjacent by R3 swaps in the trace of `s`.
    pub fn adjacent_able(&self, s: PosSet, i: usize, j: usize) -> bool {
        let mut after = bit(i);
        for p in positions(s & (bit(j) - 1) & !(bit(i + 1) - 1)) {
            if self.dep[p] & after != 0 {
                if self.dep[p] & bit(j) != 0 {
                    return false;
                }
                after |= bit(p);
            }
        }
        true
    }

    /// All cancellations `(i, j)` available in the trace of `s`.
    pub fn moves(&self, s: PosSet) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in positions(s) {
            for j in positions(s & !(bit(i + 1) - 1)) {
                if self.pair_cancels(i, j) && self.adjacent_able(s, i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether ∅ is reachable from `start` by cancellations.
    pub fn reduces_to_empty(&self, start: PosSet, budget: usize) -> Result<bool> {
        let mut seen: HashSet<PosSet> = HashSet::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(s) = stack.pop() {
            if s == 0 {
                return Ok(true);
            }
            for (i, j) in self.moves(s) {
                let t = s & !bit(i) & !bit(j);
                if seen.insert(t) {
                    if seen.len() > budget {
                        return Err(Error::ResourceLimit(format!("identity search exceeded {budget} states")));
                    }
                    stack.push(t);
                }
            }
        }
        Ok(false)
    }

    /// R3 swaps followed by one R1/R2 step that delete positions `i < j` from
    /// the concrete arrangement `order` (original position ids).
    pub fn realize(&self, order: &mut Vec<usize>, i: usize, j: usize, steps: &mut Vec<ReductionStep>) {
        let a = order.iter().position(|&p| p == i).expect("position present");
        let b = order.iter().position(|&p| p == j).expect("position present");
        let (a, b) = (a.min(b), a.max(b));
        let first = order[a];
        // Letters between that depend (transitively) on the first letter move past the second.
        let mut after = bit(first);
        let mut target: Vec<usize> = order[..a].to_vec();
        let mut tail = Vec::new();
        for &p in &order[a + 1..b] {
            if self.dep[p] & after != 0 {
                after |= bit(p);
                tail.push(p);
            } else {
                target.push(p);
            }
        }
        target.push(order[a]);
        target.push(order[b]);
        target.extend(tail);
        target.extend_from_slice(&order[b + 1..]);
        let rank: std::collections::HashMap<usize, usize> = target.iter().enumerate().map(|(r, &p)| (p, r)).collect();
        // Bubble sort towards the target; every swapped pair is an inversion, hence independent.
        loop {
            let mut swapped = false;
            for k in 0..order.len().saturating_sub(1) {
                if rank[&order[k]] > rank[&order[k + 1]] {
                    order.swap(k, k + 1);
                    steps.push(ReductionStep { rule: Rule::R3, position: k });
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        let k = order.iter().position(|&p| p == i || p == j).expect("present");
        let rule = if self.w[order[k]].is_plus() { Rule::R1 } else { Rule::R2 };
        steps.push(ReductionStep { rule, position: k });
        order.drain(k..k + 2);
    }
}

/// w ≡ ε with the default budget.
pub fn is_identity(g: &Graph, w: &[Op]) -> Result<bool> {
    is_identity_with_budget(g, w, DEFAULT_BUDGET)
}

pub fn is_identity_with_budget(g: &Graph, w: &[Op], budget: usize) -> Result<bool> {
    if !balanced(w) {
        return Ok(false);
    }
    if greedy_irreducible(g, w).is_empty() {
        return Ok(true);
    }
    let view = TraceView::new(g, w)?;
    view.reduces_to_empty(view.full(), budget)
}
