//! Canonical contexts, reduction traces, interaction distance, the scope
//! measure sc(w), induced block decompositions and free reduction of word
//! sequences.

use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::words::{balanced, bit, is_identity_with_budget, vertex_set, Op, PosSet, ReductionStep, TraceView, Word};

/// A scope value or bound; `Infinite` sorts above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scope {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Finite(k) => write!(f, "{k}"),
            Scope::Infinite => f.write_str("inf"),
        }
    }
}

/// Left-greedy split of a word into maximal dependent factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextDecomposition {
    /// Start index of every context.
    pub starts: Vec<usize>,
    /// Weak dependence class of every context.
    pub classes: Vec<usize>,
    pub len: usize,
}

impl ContextDecomposition {
    pub fn count(&self) -> usize {
        self.starts.len()
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        let end = self.starts.get(i + 1).copied().unwrap_or(self.len);
        self.starts[i]..end
    }

    pub fn context_of(&self, pos: usize) -> usize {
        self.starts.partition_point(|&s| s <= pos) - 1
    }

    /// Context index of every position.
    pub fn owner(&self) -> Vec<usize> {
        (0..self.count()).flat_map(|i| self.range(i).map(move |_| i)).collect()
    }
}

pub fn canonical_contexts(g: &Graph, w: &[Op]) -> ContextDecomposition {
    let mut starts = Vec::new();
    let mut classes = Vec::new();
    let mut current = VertexSet::EMPTY;
    for (i, x) in w.iter().enumerate() {
        let extended = current.with(x.vertex);
        if starts.is_empty() || !g.dependent_set(extended) {
            starts.push(i);
            classes.push(g.class_of(x.vertex));
            current = VertexSet::singleton(x.vertex);
        } else {
            current = extended;
        }
    }
    ContextDecomposition { starts, classes, len: w.len() }
}

/// 1 + number of contexts strictly between `i` and `j` in the class of `i`.
pub fn interaction_distance(d: &ContextDecomposition, i: usize, j: usize) -> Result<usize> {
    let (i, j) = (i.min(j), i.max(j));
    if d.classes[i] != d.classes[j] {
        return Err(Error::NotWeaklyDependent(i, j));
    }
    Ok(1 + (i + 1..j).filter(|&c| d.classes[c] == d.classes[i]).count())
}

/// A reduction of a word to ε together with the matching R_π it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    /// Cancelled position pairs `(i, j)` with `i < j`, sorted.
    pub matching: Vec<(usize, usize)>,
}

impl ReductionTrace {
    pub fn partner(&self, n: usize) -> Vec<usize> {
        let mut p = vec![usize::MAX; n];
        for &(i, j) in &self.matching {
            p[i] = j;
            p[j] = i;
        }
        p
    }
}

/// Partial matching as a partner array; `u8::MAX` marks unmatched.
type Partial = Vec<u8>;

fn remaining(partial: &Partial) -> PosSet {
    partial.iter().enumerate().filter(|(_, &p)| p == u8::MAX).fold(0, |s, (i, _)| s | bit(i))
}

struct TraceSearch<'a> {
    view: TraceView<'a>,
    budget: usize,
    seen: HashSet<Partial>,
    found: Vec<(Partial, Vec<(usize, usize)>)>,
    found_keys: HashSet<Partial>,
}

impl TraceSearch<'_> {
    fn charge(&self) -> Result<()> {
        if self.seen.len() > self.budget {
            return Err(Error::ResourceLimit(format!("trace enumeration exceeded {} states", self.budget)));
        }
        Ok(())
    }

    fn explore(&mut self, partial: Partial, order: Vec<(usize, usize)>) -> Result<()> {
        let mut stack = vec![(partial, order)];
        while let Some((partial, order)) = stack.pop() {
            let s = remaining(&partial);
            if s == 0 {
                if self.found_keys.insert(partial.clone()) {
                    self.found.push((partial, order));
                }
                continue;
            }
            for (i, j) in self.view.moves(s) {
                let mut next = partial.clone();
                next[i] = j as u8;
                next[j] = i as u8;
                if self.seen.insert(next.clone()) {
                    self.charge()?;
                    let mut o = order.clone();
                    o.push((i, j));
                    stack.push((next, o));
                }
            }
        }
        Ok(())
    }

    fn into_traces(self) -> Vec<ReductionTrace> {
        let mut out: Vec<ReductionTrace> = self
            .found
            .into_iter()
            .map(|(partial, order)| {
                let mut arrangement: Vec<usize> = (0..partial.len()).collect();
                let mut steps = Vec::new();
                for &(i, j) in &order {
                    self.view.realize(&mut arrangement, i, j, &mut steps);
                }
                let mut matching: Vec<(usize, usize)> = order;
                matching.sort_unstable();
                ReductionTrace { steps, matching }
            })
            .collect();
        out.sort_by(|a, b| a.matching.cmp(&b.matching));
        out
    }
}

fn new_search<'a>(g: &'a Graph, w: &'a [Op], budget: usize) -> Result<TraceSearch<'a>> {
    if w.len() >= u8::MAX as usize {
        return Err(Error::ResourceLimit("word too long for trace enumeration".into()));
    }
    Ok(TraceSearch {
        view: TraceView::new(g, w)?,
        budget,
        seen: HashSet::new(),
        found: Vec::new(),
        found_keys: HashSet::new(),
    })
}

/// Every reduction of `w` to ε, one per distinct matching, sorted by matching.
pub fn all_reductions(g: &Graph, w: &[Op], budget: usize) -> Result<Vec<ReductionTrace>> {
    let mut search = new_search(g, w, budget)?;
    search.explore(vec![u8::MAX; w.len()], Vec::new())?;
    Ok(search.into_traces())
}

/// Irreducible outcomes of the greedy phase inside one context: the
/// cancelled pairs, in application order. Only adjacent R1/R2 steps are used.
fn greedy_phase_outcomes(view: &TraceView<'_>, range: std::ops::Range<usize>) -> Vec<Vec<(usize, usize)>> {
    let mut results = Vec::new();
    let mut seen_final = HashSet::new();
    let mut seen = HashSet::new();
    let mut stack: Vec<(Vec<usize>, Vec<(usize, usize)>)> = vec![(range.collect(), Vec::new())];
    while let Some((alive, pairs)) = stack.pop() {
        let mut any = false;
        for k in 0..alive.len().saturating_sub(1) {
            let (i, j) = (alive[k], alive[k + 1]);
            if crate::words::cancels(view.g, view.w[i], view.w[j]) {
                any = true;
                let mut next = alive.clone();
                next.drain(k..k + 2);
                let mut p = pairs.clone();
                p.push((i, j));
                let mut key = p.clone();
                key.sort_unstable();
                if seen.insert(key) {
                    stack.push((next, p));
                }
            }
        }
        if !any {
            let mut key = pairs.clone();
            key.sort_unstable();
            if seen_final.insert(key) {
                results.push(pairs);
            }
        }
    }
    results
}

/// Cartesian product of the per-context greedy outcomes.
fn greedy_starts(view: &TraceView<'_>, d: &ContextDecomposition, budget: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    let mut combos: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for c in 0..d.count() {
        let outcomes = greedy_phase_outcomes(view, d.range(c));
        let mut next = Vec::with_capacity(combos.len() * outcomes.len());
        for base in &combos {
            for o in &outcomes {
                let mut v = base.clone();
                v.extend_from_slice(o);
                next.push(v);
            }
        }
        if next.len() > budget {
            return Err(Error::ResourceLimit("too many greedy prefixes".into()));
        }
        combos = next;
    }
    Ok(combos)
}

/// Reductions of `w` to ε that start with a greedy phase, one per matching.
pub fn greedy_reductions(g: &Graph, w: &[Op], budget: usize) -> Result<Vec<ReductionTrace>> {
    let d = canonical_contexts(g, w);
    let mut search = new_search(g, w, budget)?;
    for start in greedy_starts(&search.view, &d, budget)? {
        let mut partial = vec![u8::MAX; w.len()];
        for &(i, j) in &start {
            partial[i] = j as u8;
            partial[j] = i as u8;
        }
        if search.seen.insert(partial.clone()) {
            search.explore(partial, start)?;
        }
    }
    Ok(search.into_traces())
}

/// Largest interaction distance over the pairs of a matching.
pub fn matching_scope(d: &ContextDecomposition, matching: &[(usize, usize)]) -> Result<usize> {
    let mut worst = 0;
    for &(i, j) in matching {
        worst = worst.max(interaction_distance(d, d.context_of(i), d.context_of(j))?);
    }
    Ok(worst)
}

/// sc(w): least worst interaction distance over greedy reductions.
///
/// Bottleneck search over surviving-position sets, seeded with every
/// outcome of the greedy phase.
pub fn scope(g: &Graph, w: &[Op], budget: usize) -> Result<Scope> {
    let view = TraceView::new(g, w)?;
    let d = canonical_contexts(g, w);
    let owner = d.owner();
    let mut best: HashMap<PosSet, usize> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for start in greedy_starts(&view, &d, budget)? {
        let s = start.iter().fold(view.full(), |s, &(i, j)| s & !bit(i) & !bit(j));
        let cost = usize::from(!start.is_empty());
        if best.get(&s).is_none_or(|&c| cost < c) {
            best.insert(s, cost);
            heap.push(Reverse((cost, s)));
        }
    }
    while let Some(Reverse((cost, s))) = heap.pop() {
        if best.get(&s).is_some_and(|&c| c < cost) {
            continue;
        }
        if s == 0 {
            return Ok(Scope::Finite(cost));
        }
        for (i, j) in view.moves(s) {
            let dist = interaction_distance(&d, owner[i], owner[j])?;
            let c = cost.max(dist);
            let t = s & !bit(i) & !bit(j);
            if best.get(&t).is_none_or(|&old| c < old) {
                best.insert(t, c);
                if best.len() > budget {
                    return Err(Error::ResourceLimit(format!("scope search exceeded {budget} states")));
                }
                heap.push(Reverse((c, t)));
            }
        }
    }
    Ok(Scope::Infinite)
}

/// Factor start positions of a block decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub starts: Vec<usize>,
    pub len: usize,
}

impl BlockDecomposition {
    pub fn factor_count(&self) -> usize {
        self.starts.len()
    }

    pub fn factor_of(&self, pos: usize) -> usize {
        self.starts.partition_point(|&s| s <= pos) - 1
    }

    pub fn factors<'w>(&self, w: &'w [Op]) -> Vec<&'w [Op]> {
        (0..self.starts.len())
            .map(|f| {
                let end = self.starts.get(f + 1).copied().unwrap_or(self.len);
                &w[self.starts[f]..end]
            })
            .collect()
    }
}

/// Scan every context left to right and start a new factor whenever a
/// position cancels into another context while the current factor already
/// cancels into a different one. Cancellations inside the context never split.
pub fn induced_decomposition(d: &ContextDecomposition, trace: &ReductionTrace) -> BlockDecomposition {
    let owner = d.owner();
    let partner = trace.partner(d.len);
    let mut starts = Vec::new();
    for c in 0..d.count() {
        let range = d.range(c);
        starts.push(range.start);
        let mut hit: Option<usize> = None;
        for k in range.clone() {
            let other = owner[partner[k]];
            if other != c && hit != Some(other) {
                if hit.is_some() {
                    starts.push(k);
                }
                hit = Some(other);
            }
        }
    }
    BlockDecomposition { starts, len: d.len }
}

/// Every factor is dependent and cancels only within itself and at most one other factor.
pub fn is_block_decomposition(g: &Graph, w: &[Op], factors: &BlockDecomposition, trace: &ReductionTrace) -> bool {
    let partner = trace.partner(w.len());
    if partner.iter().any(|&p| p == usize::MAX) {
        return false;
    }
    factors.factors(w).iter().enumerate().all(|(f, word)| {
        let start = factors.starts[f];
        let others: BTreeSet<usize> = (start..start + word.len())
            .map(|k| factors.factor_of(partner[k]))
            .filter(|&o| o != f)
            .collect();
        g.dependent_set(vertex_set(word)) && others.len() <= 1
    })
}

/// Whether a sequence of words reduces to the empty sequence.
///
/// Moves: delete adjacent `wᵢ wⱼ` with `wᵢwⱼ ≡ ε`; swap adjacent words whose
/// letters are pairwise independent; cancel a pair inside one word (dropping
/// the word once empty).
pub fn free_reduce_words(g: &Graph, seq: &[Word], budget: usize) -> Result<bool> {
    if seq.iter().all(|w| g.dependent_set(vertex_set(w))) {
        free_reduce_dependent(g, seq, budget)
    } else {
        free_reduce_general(g, seq, budget)
    }
}

/// Inside a dependent word only `v⁺`/`v⁻` of a looped `v` commute, and they
/// cancel anyway, so in-word cancellation is confluent and only shrinks
/// letter sets. Every word is reduced up front and the search uses the two
/// sequence moves only.
fn free_reduce_dependent(g: &Graph, seq: &[Word], budget: usize) -> Result<bool> {
    let mut start: Vec<Word> = Vec::with_capacity(seq.len());
    for w in seq {
        let r = irreducible(g, w)?;
        if !r.is_empty() {
            start.push(r);
        }
    }
    let n = start.len();
    // Words never change, so states are index sequences.
    let mut cancel = vec![vec![false; n]; n];
    let mut commute = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let joined: Word = start[i].iter().chain(&start[j]).copied().collect();
                cancel[i][j] = balanced(&joined) && is_identity_with_budget(g, &joined, budget)?;
                commute[i][j] = start[i].iter().all(|&x| start[j].iter().all(|&y| crate::words::ops_independent(g, x, y)));
            }
        }
    }
    let first: Vec<usize> = (0..n).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([first.clone()]);
    let mut stack = vec![first];
    while let Some(cur) = stack.pop() {
        if cur.is_empty() {
            return Ok(true);
        }
        for i in 0..cur.len() - 1 {
            let (a, b) = (cur[i], cur[i + 1]);
            let mut moves = Vec::with_capacity(2);
            if cancel[a][b] {
                let mut next = cur.clone();
                next.drain(i..i + 2);
                moves.push(next);
            }
            if commute[a][b] {
                let mut next = cur.clone();
                next.swap(i, i + 1);
                moves.push(next);
            }
            for next in moves {
                if seen.insert(next.clone()) {
                    if seen.len() > budget {
                        return Err(Error::ResourceLimit(format!("free reduction exceeded {budget} states")));
                    }
                    stack.push(next);
                }
            }
        }
    }
    Ok(false)
}

fn free_reduce_general(g: &Graph, seq: &[Word], budget: usize) -> Result<bool> {
    let start: Vec<Word> = seq.iter().filter(|w| !w.is_empty()).cloned().collect();
    let mut seen: HashSet<Vec<Word>> = HashSet::new();
    let mut pair_cache: HashMap<(Word, Word), bool> = HashMap::new();
    let mut stack = vec![start.clone()];
    seen.insert(start);
    while let Some(cur) = stack.pop() {
        if cur.is_empty() {
            return Ok(true);
        }
        let mut next_states: Vec<Vec<Word>> = Vec::new();
        for i in 0..cur.len() {
            let view = TraceView::new(g, &cur[i])?;
            for (a, b) in view.moves(view.full()) {
                let mut next = cur.clone();
                let reduced: Word =
                    cur[i].iter().enumerate().filter(|&(p, _)| p != a && p != b).map(|(_, &x)| x).collect();
                if reduced.is_empty() {
                    next.remove(i);
                } else {
                    next[i] = reduced;
                }
                next_states.push(next);
            }
        }
        for i in 0..cur.len().saturating_sub(1) {
            let key = (cur[i].clone(), cur[i + 1].clone());
            let cancel = match pair_cache.get(&key) {
                Some(&c) => c,
                None => {
                    let joined: Word = cur[i].iter().chain(&cur[i + 1]).copied().collect();
                    let c = is_identity_with_budget(g, &joined, budget)?;
                    pair_cache.insert(key, c);
                    c
                }
            };
            if cancel {
                let mut next = cur.clone();
                next.drain(i..i + 2);
                next_states.push(next);
            }
            let commute = cur[i]
                .iter()
                .all(|&x| cur[i + 1].iter().all(|&y| crate::words::ops_independent(g, x, y)));
            if commute {
                let mut next = cur.clone();
                next.swap(i, i + 1);
                next_states.push(next);
            }
        }
        for next in next_states {
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Err(Error::ResourceLimit(format!("free reduction exceeded {budget} states")));
                }
                stack.push(next);
            }
        }
    }
    Ok(false)
}

/// Irreducible form of `w` under in-word cancellation.
fn irreducible(g: &Graph, w: &[Op]) -> Result<Word> {
    let mut cur = w.to_vec();
    loop {
        let view = TraceView::new(g, &cur)?;
        let Some(&(a, b)) = view.moves(view.full()).first() else {
            return Ok(cur);
        };
        cur = cur.iter().enumerate().filter(|&(p, _)| p != a && p != b).map(|(_, &x)| x).collect();
    }
}
