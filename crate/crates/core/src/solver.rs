//! Explicit-state search over the reachability graph of context windows.
//!
//! A node keeps, for every weak dependence class, a window of `k` context
//! abstractions whose blocks have not been cancelled yet, plus the class
//! and end state of the most recent context and that context's witness
//! letter. Appending a context is allowed once the oldest context of its
//! class can be cleared by free reduction on the blocks of the window.

use std::collections::{HashMap, HashSet};
use std::sync::RwLock;

use rayon::prelude::*;

use crate::abstraction::{
    blocks_cancel, blocks_commute, blocks_dependent, letter_set, BlockAbstraction, BlockRealizer, ContextAbstraction,
    Slot,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::pda::{anticlique_pda, pda_nonempty, singleton_counter_pda};
use crate::valence::{StateId, ValenceSystem};
use crate::words::Op;

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    /// Use the pushdown constructions on anti-clique and one-vertex graphs.
    pub fast_path: bool,
    /// Maximum number of visited nodes before giving up with `Limit`.
    pub budget: usize,
    /// Worker threads for frontier expansion; 1 keeps the search sequential.
    pub workers: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { fast_path: true, budget: DEFAULT_NODE_BUDGET, workers: 1 }
    }
}

/// Window of one weak dependence class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassConfiguration {
    pub window: Vec<ContextAbstraction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RNode {
    pub configs: Vec<ClassConfiguration>,
    pub current_class: Option<usize>,
    pub last_state: StateId,
    /// Vertices the next context may start with: those independent of some
    /// letter witnessed in the last context. `None` before the first context.
    pub allowed_first: Option<VertexSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessStep {
    pub class: usize,
    pub context: ContextAbstraction,
    pub node: RNode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Initial and final state coincide up to ε-moves.
    Trivial,
    AntiClique,
    Singleton,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The witness is the path of appended contexts; fast paths report none.
    Reachable(Vec<WitnessStep>),
    Unreachable,
    Limit,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Reachable(_) => "REACHABLE",
            Verdict::Unreachable => "UNREACHABLE",
            Verdict::Limit => "LIMIT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub engine: Engine,
    /// Visited reachability-graph nodes (0 for the fast paths).
    pub nodes: usize,
}

/// Block id 0 is the placeholder E.
type BlockId = u32;
const NO_CLASS: u32 = u32::MAX;
const ANY_FIRST: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    slots: Box<[BlockId]>,
    class: u32,
    state: u32,
    allowed: u64,
}

/// A freshly guessed context and the letters some realization of it witnesses.
#[derive(Clone, Debug)]
struct Fresh {
    blocks: Vec<BlockId>,
    /// Op codes, one bit each.
    witnesses: u128,
}

type Expansion = (usize, bool, Vec<(Key, usize, Fresh)>);

/// Search engine for one system and scope bound.
pub struct Solver {
    sys: ValenceSystem,
    k: usize,
    classes: Vec<VertexSet>,
    blocks: Vec<BlockAbstraction>,
    /// Letters each block can witness; indexed like `blocks`.
    witnesses: Vec<u128>,
    /// `[class][q1]`: usable blocks.
    by_start: Vec<Vec<Vec<BlockId>>>,
    cancel_cache: RwLock<HashMap<(BlockId, BlockId), bool>>,
}

/// Whether `a < b` can be brought next to each other inside live set `s`.
fn adjacent_able(dep: &[u64], s: u64, a: usize, b: usize) -> bool {
    let mut after = 1u64 << a;
    let mut bits = s & ((1u64 << b) - 1) & !((1u64 << (a + 1)) - 1);
    while bits != 0 {
        let p = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        if dep[p] & after != 0 {
            if dep[p] & (1 << b) != 0 {
                return false;
            }
            after |= 1 << p;
        }
    }
    true
}

/// Maximal live sets disjoint from `first` reachable by cancelling pairs.
///
/// `dep[a]` holds the items not commuting with `a`; `can[a]` holds the later
/// items `a` cancels with. The search picks a matching of cancelled pairs and
/// checks it greedily: removing a pair never blocks another one. It branches
/// only on uncovered early items and on items inside a blocked pair.
fn survivor_sets(dep: &[u64], can: &[u64], first: u64) -> Vec<u64> {
    let m = dep.len();
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let pairable = |x: usize, y: usize| {
        let (a, b) = (x.min(y), x.max(y));
        can[a] >> b & 1 == 1
    };
    let mut found: Vec<u64> = Vec::new();
    // Removed pairs only matter through the live set they leave behind.
    let mut seen: HashSet<(u64, Vec<(u8, u8)>)> = HashSet::new();
    let mut stack: Vec<(u64, Vec<(u8, u8)>)> = vec![(full, Vec::new())];
    while let Some((mut alive, mut pending)) = stack.pop() {
        let covered = pending.iter().fold(full & !alive, |c, &(a, b)| c | 1 << a | 1 << b);
        if found.iter().any(|&f| covered & f == f) {
            continue;
        }
        loop {
            let before = pending.len();
            pending.retain(|&(a, b)| {
                if adjacent_able(dep, alive, a as usize, b as usize) {
                    alive &= !(1u64 << a) & !(1u64 << b);
                    false
                } else {
                    true
                }
            });
            if pending.len() == before {
                break;
            }
        }
        let mut branch = |z: usize, stack: &mut Vec<(u64, Vec<(u8, u8)>)>| {
            let mut free = full & !covered & !(1u64 << z);
            while free != 0 {
                let y = free.trailing_zeros() as usize;
                free &= free - 1;
                if pairable(z, y) {
                    let mut next = pending.clone();
                    next.push((z.min(y) as u8, z.max(y) as u8));
                    next.sort_unstable();
                    if seen.insert((alive, next.clone())) {
                        stack.push((alive, next));
                    }
                }
            }
        };
        if pending.is_empty() {
            let open = first & !covered;
            if open == 0 {
                if first == full {
                    return vec![0];
                }
                found.retain(|&f| f & covered != covered);
                found.push(covered);
            } else {
                branch(open.trailing_zeros() as usize, &mut stack);
            }
            continue;
        }
        // Some uncovered item strictly inside a blocked pair must go first.
        let mut inside = 0u64;
        for &(a, b) in &pending {
            inside |= ((1u64 << b) - 1) & !((1u64 << (a + 1)) - 1);
        }
        let mut cands = inside & alive & !covered;
        while cands != 0 {
            let z = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            branch(z, &mut stack);
        }
    }
    found.into_iter().map(|c| full & !c).collect()
}

impl Solver {
    pub fn new(sys: &ValenceSystem, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroScopeBound);
        }
        let sys = sys.expanded();
        let g = sys.graph.clone();
        let n = sys.states.len();
        let classes = g.weak_classes().to_vec();
        let dummy = BlockAbstraction {
            q1: 0,
            q2: 0,
            f: Op::plus(0),
            o: Op::plus(0),
            umin: VertexSet::EMPTY,
            umax: VertexSet::EMPTY,
        };
        let mut solver = Solver {
            sys,
            k,
            classes,
            blocks: vec![dummy],
            witnesses: vec![0],
            by_start: vec![vec![Vec::new(); n]; g.weak_classes().len()],
            cancel_cache: RwLock::new(HashMap::new()),
        };
        let used: VertexSet = solver.sys.transitions.iter().flat_map(|t| t.word.iter().map(|x| x.vertex)).collect();
        let mut candidates = Vec::new();
        for ci in 0..solver.classes.len() {
            let class = solver.classes[ci];
            if class.intersection(used).is_empty() {
                continue;
            }
            let antichains = g.antichains_within(class, class.len());
            for &umax in antichains.iter().filter(|u| !u.is_empty()) {
                let letters = letter_set(&g, umax).intersection(used);
                let ops: Vec<Op> = letters.iter().flat_map(|u| [Op::plus(u), Op::minus(u)]).collect();
                // Blocks with an empty residual reduce to ε on their own; they are
                // absorbed by a neighbouring block of the same context.
                for &umin in antichains.iter().filter(|u| !u.is_empty() && u.is_subset(letter_set(&g, umax))) {
                    for &f in &ops {
                        let mut seen: HashMap<(usize, usize), u128> = HashMap::new();
                        for &o in &ops {
                            let r = BlockRealizer::new(&solver.sys, f, o, umin, umax);
                            for q1 in 0..n {
                                for q2 in 0..n {
                                    if r.realizable(q1, q2) {
                                        *seen.entry((q1, q2)).or_default() |= 1u128 << o.code();
                                    }
                                }
                            }
                        }
                        for ((q1, q2), w) in seen {
                            // `o = f` is always realizable alongside any other witness.
                            candidates.push((ci, BlockAbstraction { q1, q2, f, o: f, umin, umax }, w));
                        }
                    }
                }
            }
        }
        candidates.sort();
        let ids: Vec<BlockId> = (1..=candidates.len() as BlockId).collect();
        for (_, b, w) in &candidates {
            solver.blocks.push(*b);
            solver.witnesses.push(*w);
        }
        // A block nothing cancels with can never leave a window.
        for (&(ci, b, _), &id) in candidates.iter().zip(&ids) {
            let mut partnered = false;
            for (&(cj, _, _), &other) in candidates.iter().zip(&ids) {
                if ci == cj && (solver.cancel(id, other)? || solver.cancel(other, id)?) {
                    partnered = true;
                    break;
                }
            }
            if partnered {
                solver.by_start[ci][b.q1].push(id);
            }
        }
        Ok(solver)
    }

    pub fn graph(&self) -> &Graph {
        &self.sys.graph
    }

    /// The system with single-letter transitions the search runs on.
    pub fn system(&self) -> &ValenceSystem {
        &self.sys
    }

    /// Number of block abstractions contexts are built from.
    pub fn block_count(&self) -> usize {
        self.by_start.iter().flatten().map(Vec::len).sum()
    }

    fn slots_per_class(&self) -> usize {
        2 * self.k * self.k
    }

    fn initial_key(&self) -> Key {
        Key {
            slots: vec![0; self.classes.len() * self.slots_per_class()].into_boxed_slice(),
            class: NO_CLASS,
            state: self.sys.initial as u32,
            allowed: ANY_FIRST,
        }
    }

    fn slot(&self, id: BlockId) -> Slot {
        if id == 0 {
            Slot::E
        } else {
            Slot::Block(self.blocks[id as usize])
        }
    }

    fn cancel(&self, a: BlockId, b: BlockId) -> Result<bool> {
        if let Some(&c) = self.cancel_cache.read().expect("cache lock").get(&(a, b)) {
            return Ok(c);
        }
        let c = blocks_cancel(&self.sys, &self.blocks[a as usize], &self.blocks[b as usize])?;
        self.cancel_cache.write().expect("cache lock").insert((a, b), c);
        Ok(c)
    }

    fn commute(&self, a: BlockId, b: BlockId) -> bool {
        blocks_commute(&self.sys.graph, &self.blocks[a as usize], &self.blocks[b as usize])
    }

    /// Vertices independent of, and distinct from, some witnessed letter.
    fn allowed_after(&self, witnesses: u128) -> u64 {
        let g = &self.sys.graph;
        let mut allowed = 0u64;
        for v in g.vertices() {
            if witnesses >> (2 * v) & 3 != 0 {
                allowed |= g.vertices().filter(|&u| u != v && g.independent(u, v)).fold(0, |m, u| m | 1 << u);
            }
        }
        allowed
    }

    /// Fresh contexts of `class` starting at `q`: 1..=2k blocks chained
    /// through their states and pairwise dependent.
    fn fresh_contexts(&self, class: usize, q: StateId, allowed: u64) -> Vec<Fresh> {
        let mut out = Vec::new();
        let mut chain = Vec::new();
        self.extend_chain(class, q, allowed, &mut chain, 0, &mut out);
        out
    }

    fn extend_chain(&self, class: usize, q: StateId, allowed: u64, chain: &mut Vec<BlockId>, witnesses: u128, out: &mut Vec<Fresh>) {
        let g = &self.sys.graph;
        for &id in &self.by_start[class][q] {
            let b = &self.blocks[id as usize];
            if chain.is_empty() && allowed >> b.f.vertex & 1 == 0 {
                continue;
            }
            if !chain.iter().all(|&c| blocks_dependent(g, &self.blocks[c as usize], b)) {
                continue;
            }
            chain.push(id);
            let w = witnesses | self.witnesses[id as usize];
            out.push(Fresh { blocks: chain.clone(), witnesses: w });
            if chain.len() < 2 * self.k {
                self.extend_chain(class, b.q2, allowed, chain, w, out);
            }
            chain.pop();
        }
    }

    /// Maximal survivor sets of the free reduction on `seq` in which every
    /// block at a position below `clear` is cancelled. Each set lists
    /// surviving positions of `seq`.
    fn reduce(&self, seq: &[BlockId], clear: usize) -> Result<Vec<Vec<usize>>> {
        let items: Vec<usize> = (0..seq.len()).filter(|&i| seq[i] != 0).collect();
        let m = items.len();
        if m > 63 {
            return Err(Error::ResourceLimit(format!("{m} live blocks in one window")));
        }
        let first: u64 = items.iter().enumerate().filter(|(_, &p)| p < clear).fold(0, |s, (i, _)| s | 1 << i);
        let mut dep = vec![0u64; m];
        let mut can = vec![0u64; m];
        for a in 0..m {
            for b in a + 1..m {
                let (x, y) = (seq[items[a]], seq[items[b]]);
                let commute = self.commute(x, y);
                if !commute {
                    dep[a] |= 1 << b;
                    dep[b] |= 1 << a;
                }
                if self.cancel(x, y)? || (commute && self.cancel(y, x)?) {
                    can[a] |= 1 << b;
                }
            }
        }
        // Early blocks that no later block can cancel never clear.
        if (0..m).any(|a| first >> a & 1 == 1 && can[a] == 0 && (0..a).all(|b| can[b] >> a & 1 == 0)) {
            return Ok(Vec::new());
        }
        let maximal = survivor_sets(&dep, &can, first);
        Ok(maximal
            .into_iter()
            .map(|s| (0..m).filter(|&i| s >> i & 1 == 1).map(|i| items[i]).collect())
            .collect())
    }

    /// Windows reachable by appending `fresh` to `window` and clearing the oldest context.
    fn step_window(&self, window: &[BlockId], fresh: &[BlockId]) -> Result<Vec<Vec<BlockId>>> {
        let per_ctx = 2 * self.k;
        let mut seq = window.to_vec();
        seq.extend_from_slice(fresh);
        seq.resize(window.len() + per_ctx, 0);
        let survivors = self.reduce(&seq, per_ctx)?;
        Ok(survivors
            .into_iter()
            .map(|live| {
                let mut next = vec![0; window.len()];
                for i in live {
                    next[i - per_ctx] = seq[i];
                }
                next
            })
            .collect())
    }

    fn flushable(&self, window: &[BlockId]) -> Result<bool> {
        if window.iter().all(|&b| b == 0) {
            return Ok(true);
        }
        Ok(self.reduce(window, window.len())?.iter().any(Vec::is_empty))
    }

    fn accepting(&self, key: &Key) -> Result<bool> {
        if key.state as usize != self.sys.final_state {
            return Ok(false);
        }
        let per = self.slots_per_class();
        for c in 0..self.classes.len() {
            if !self.flushable(&key.slots[c * per..(c + 1) * per])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn successors(&self, key: &Key) -> Result<Vec<(Key, usize, Fresh)>> {
        let per = self.slots_per_class();
        let mut out = Vec::new();
        for class in 0..self.classes.len() {
            let window = &key.slots[class * per..(class + 1) * per];
            for c in self.fresh_contexts(class, key.state as usize, key.allowed) {
                let last = *c.blocks.last().expect("fresh contexts are non-empty");
                for next in self.step_window(window, &c.blocks)? {
                    let mut slots = key.slots.clone();
                    slots[class * per..(class + 1) * per].copy_from_slice(&next);
                    let succ = Key {
                        slots,
                        class: class as u32,
                        state: self.blocks[last as usize].q2 as u32,
                        allowed: self.allowed_after(c.witnesses),
                    };
                    out.push((succ, class, c.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Concrete context; `o` is a witnessed letter the next first letter is independent of.
    fn context_of(&self, fresh: &Fresh, next_first: Option<Op>) -> ContextAbstraction {
        let g = &self.sys.graph;
        let o = (0..128u32)
            .filter(|&c| fresh.witnesses >> c & 1 == 1)
            .map(Op::from_code)
            .find(|o| next_first.is_none_or(|f| f.vertex != o.vertex && g.independent(f.vertex, o.vertex)));
        let mut blocks = Vec::new();
        for &id in &fresh.blocks {
            let mut b = self.blocks[id as usize];
            if let Some(o) = o.filter(|o| self.witnesses[id as usize] >> o.code() & 1 == 1 && !blocks.iter().any(|s: &Slot| s.block().is_some_and(|x| x.o == *o))) {
                b.o = o;
            }
            blocks.push(Slot::Block(b));
        }
        blocks.resize(2 * self.k, Slot::E);
        ContextAbstraction { f: Some(self.blocks[fresh.blocks[0] as usize].f), o, blocks }
    }

    fn window_contexts(&self, slots: &[BlockId]) -> Vec<ContextAbstraction> {
        slots
            .chunks(2 * self.k)
            .map(|ch| {
                let blocks: Vec<Slot> = ch.iter().map(|&b| self.slot(b)).collect();
                let f = blocks.iter().find_map(Slot::block).map(|b| b.f);
                ContextAbstraction { blocks, f, o: None }
            })
            .collect()
    }

    fn node_of(&self, key: &Key) -> RNode {
        let per = self.slots_per_class();
        RNode {
            configs: (0..self.classes.len())
                .map(|c| ClassConfiguration { window: self.window_contexts(&key.slots[c * per..(c + 1) * per]) })
                .collect(),
            current_class: (key.class != NO_CLASS).then_some(key.class as usize),
            last_state: key.state as usize,
            allowed_first: (key.allowed != ANY_FIRST).then_some(VertexSet(key.allowed)),
        }
    }

    fn ids_of(&self, slots: &[Slot]) -> Result<Vec<BlockId>> {
        slots
            .iter()
            .map(|s| match s {
                Slot::E => Ok(0),
                Slot::Block(b) => self
                    .blocks
                    .iter()
                    .position(|x| *x == BlockAbstraction { o: x.f, ..*b })
                    .map(|i| i as BlockId)
                    .ok_or_else(|| Error::BadAbstraction("block outside the candidate set".into())),
            })
            .collect()
    }

    fn key_of(&self, node: &RNode) -> Result<Key> {
        let slots: Vec<Slot> = node.configs.iter().flat_map(|c| c.window.iter().flat_map(|x| x.blocks.iter().copied())).collect();
        if slots.len() != self.classes.len() * self.slots_per_class() {
            return Err(Error::BadAbstraction("node shape does not match k".into()));
        }
        Ok(Key {
            slots: self.ids_of(&slots)?.into_boxed_slice(),
            class: node.current_class.map_or(NO_CLASS, |c| c as u32),
            state: node.last_state as u32,
            allowed: node.allowed_first.map_or(ANY_FIRST, |s| s.0),
        })
    }

    pub fn initial_node(&self) -> RNode {
        self.node_of(&self.initial_key())
    }

    /// Candidate contexts of `class` starting in state `q`, in search order.
    pub fn contexts_from(&self, class: usize, q: StateId) -> Vec<ContextAbstraction> {
        self.fresh_contexts(class, q, ANY_FIRST).iter().map(|c| self.context_of(c, None)).collect()
    }

    pub fn one_step(&self, cfg: &ClassConfiguration, c: &ContextAbstraction) -> Result<Vec<ClassConfiguration>> {
        let per_ctx = 2 * self.k;
        if cfg.window.len() != self.k || c.blocks.len() != per_ctx {
            return Err(Error::BadAbstraction("window or context has the wrong length".into()));
        }
        let window: Vec<Slot> = cfg.window.iter().flat_map(|ctx| ctx.blocks.iter().copied()).collect();
        let window = self.ids_of(&window)?;
        let fresh = self.ids_of(&c.blocks)?;
        Ok(self.step_window(&window, &fresh)?.iter().map(|w| ClassConfiguration { window: self.window_contexts(w) }).collect())
    }

    pub fn edges(&self, node: &RNode) -> Result<Vec<RNode>> {
        let key = self.key_of(node)?;
        Ok(self.successors(&key)?.iter().map(|(k, _, _)| self.node_of(k)).collect())
    }

    /// Breadth-first search from the initial node.
    pub fn search(&self, opts: &SolverOptions) -> Result<Decision> {
        let start = self.initial_key();
        let mut keys: Vec<Key> = vec![start.clone()];
        let mut parents: Vec<(usize, usize, Option<Fresh>)> = vec![(usize::MAX, 0, None)];
        let mut index: HashSet<Key> = HashSet::from([start]);
        let mut frontier = vec![0usize];
        let pool = (opts.workers > 1)
            .then(|| rayon::ThreadPoolBuilder::new().num_threads(opts.workers).build())
            .transpose()
            .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;
        while !frontier.is_empty() {
            let expand = |&id: &usize| -> Result<Expansion> {
                let key = &keys[id];
                if self.accepting(key)? {
                    return Ok((id, true, Vec::new()));
                }
                Ok((id, false, self.successors(key)?))
            };
            let results: Vec<Result<Expansion>> = match &pool {
                Some(p) => p.install(|| frontier.par_iter().map(expand).collect()),
                None => frontier.iter().map(expand).collect(),
            };
            let mut next = Vec::new();
            for r in results {
                let (id, accept, succ) = r?;
                if accept {
                    let witness = self.witness(&keys, &parents, id);
                    return Ok(Decision { verdict: Verdict::Reachable(witness), engine: Engine::Generic, nodes: keys.len() });
                }
                for (key, class, fresh) in succ {
                    if index.contains(&key) {
                        continue;
                    }
                    if keys.len() >= opts.budget {
                        return Ok(Decision { verdict: Verdict::Limit, engine: Engine::Generic, nodes: keys.len() });
                    }
                    index.insert(key.clone());
                    next.push(keys.len());
                    keys.push(key);
                    parents.push((id, class, Some(fresh)));
                }
            }
            frontier = next;
        }
        Ok(Decision { verdict: Verdict::Unreachable, engine: Engine::Generic, nodes: keys.len() })
    }

    fn witness(&self, keys: &[Key], parents: &[(usize, usize, Option<Fresh>)], mut id: usize) -> Vec<WitnessStep> {
        let mut steps = Vec::new();
        let mut next_first = None;
        while let (p, class, Some(fresh)) = &parents[id] {
            steps.push(WitnessStep { class: *class, context: self.context_of(fresh, next_first), node: self.node_of(&keys[id]) });
            next_first = Some(self.blocks[fresh.blocks[0] as usize].f);
            id = *p;
        }
        steps.reverse();
        steps
    }
}

pub fn initial_node(sys: &ValenceSystem, k: usize) -> Result<RNode> {
    Ok(Solver::new(sys, k)?.initial_node())
}

/// Every candidate context of `class`, over all start states.
pub fn enumerate_contexts(sys: &ValenceSystem, k: usize, class: usize) -> Result<Vec<ContextAbstraction>> {
    let s = Solver::new(sys, k)?;
    Ok((0..s.sys.states.len()).flat_map(|q| s.contexts_from(class, q)).collect())
}

pub fn one_step(sys: &ValenceSystem, k: usize, cfg: &ClassConfiguration, c: &ContextAbstraction) -> Result<Vec<ClassConfiguration>> {
    Solver::new(sys, k)?.one_step(cfg, c)
}

pub fn edges(sys: &ValenceSystem, k: usize, node: &RNode) -> Result<Vec<RNode>> {
    Solver::new(sys, k)?.edges(node)
}

/// Decides whether a run reaches the final state with an identity word of scope at most `k`.
pub fn decide(sys: &ValenceSystem, k: usize, opts: &SolverOptions) -> Result<Decision> {
    if k == 0 {
        return Err(Error::ZeroScopeBound);
    }
    if sys.epsilon_closure(sys.initial)[sys.final_state] {
        return Ok(Decision { verdict: Verdict::Reachable(Vec::new()), engine: Engine::Trivial, nodes: 0 });
    }
    let g = &sys.graph;
    if opts.fast_path {
        if g.len() == 1 {
            let reachable = pda_nonempty(&singleton_counter_pda(sys)?);
            return Ok(fast(reachable, Engine::Singleton));
        }
        if g.is_anti_clique() {
            let reachable = pda_nonempty(&anticlique_pda(sys)?);
            return Ok(fast(reachable, Engine::AntiClique));
        }
    }
    Solver::new(sys, k)?.search(opts)
}

fn fast(reachable: bool, engine: Engine) -> Decision {
    let verdict = if reachable { Verdict::Reachable(Vec::new()) } else { Verdict::Unreachable };
    Decision { verdict, engine, nodes: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{family, Family};
    use crate::valence::build_system;

    /// Every live set reachable by single cancellations, kept if maximal.
    fn survivor_sets_exhaustive(dep: &[u64], can: &[u64], first: u64) -> Vec<u64> {
        let m = dep.len();
        let full = (1u64 << m) - 1;
        let mut seen: HashSet<u64> = HashSet::from([full]);
        let mut stack = vec![full];
        let mut valid = Vec::new();
        while let Some(s) = stack.pop() {
            if s & first == 0 {
                valid.push(s);
            }
            for a in (0..m).filter(|&a| s >> a & 1 == 1) {
                for b in (0..m).filter(|&b| (s & can[a]) >> b & 1 == 1) {
                    if adjacent_able(dep, s, a, b) {
                        let t = s & !(1 << a) & !(1 << b);
                        if seen.insert(t) {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        valid.iter().copied().filter(|&s| !valid.iter().any(|&t| t != s && t & s == s)).collect()
    }

    proptest::proptest! {
        #[test]
        fn survivor_search_matches_exhaustive(
            m in 1usize..11,
            dep_bits in proptest::collection::vec(proptest::bool::weighted(0.5), 55),
            can_bits in proptest::collection::vec(proptest::bool::weighted(0.35), 55),
            clear in 0usize..8,
        ) {
            let mut dep = vec![0u64; m];
            let mut can = vec![0u64; m];
            let mut e = 0;
            for a in 0..m {
                for b in a + 1..m {
                    if dep_bits[e] {
                        dep[a] |= 1 << b;
                        dep[b] |= 1 << a;
                    }
                    if can_bits[e] {
                        can[a] |= 1 << b;
                    }
                    e += 1;
                }
            }
            let first = (1u64 << clear.min(m)) - 1;
            let mut fast = survivor_sets(&dep, &can, first);
            let mut slow = survivor_sets_exhaustive(&dep, &can, first);
            fast.sort_unstable();
            slow.sort_unstable();
            proptest::prop_assert_eq!(fast, slow);
        }
    }

    fn generic() -> SolverOptions {
        SolverOptions { fast_path: false, ..SolverOptions::default() }
    }

    fn p1_push_pop() -> ValenceSystem {
        let g = family(Family::P(1)).unwrap();
        build_system(&g, &["q0", "q1", "qf"], &[("q0", "v1+", "q1"), ("q1", "v1-", "qf")], "q0", "qf").unwrap()
    }

    #[test]
    fn initial_node_shapes() {
        let s = p1_push_pop();
        let n = initial_node(&s, 1).unwrap();
        assert_eq!(n.configs.len(), 1);
        assert_eq!(n.configs[0].window.len(), 1);
        assert!(n.configs[0].window[0].is_e());
        assert_eq!((n.current_class, n.last_state, n.allowed_first), (None, 0, None));
        let mp = family(Family::MP(2, 2)).unwrap();
        let s = build_system(&mp, &["q"], &[], "q", "q").unwrap();
        let n = initial_node(&s, 3).unwrap();
        assert_eq!(n.configs.len(), 2);
        assert!(n.configs.iter().all(|c| c.window.len() == 3 && c.window.iter().all(|x| x.is_e() && x.blocks.len() == 6)));
    }

    #[test]
    fn decide_examples() {
        let s = p1_push_pop();
        let d = decide(&s, 1, &generic()).unwrap();
        assert!(matches!(d.verdict, Verdict::Reachable(_)));
        assert_eq!(d.engine, Engine::Generic);
        let g = family(Family::P(1)).unwrap();
        let s = build_system(&g, &["q0", "qf"], &[("q0", "v1+", "qf")], "q0", "qf").unwrap();
        assert_eq!(decide(&s, 1, &generic()).unwrap().verdict, Verdict::Unreachable);
        assert_eq!(decide(&s, 1, &SolverOptions::default()).unwrap().verdict, Verdict::Unreachable);
        assert_eq!(decide(&s, 0, &generic()), Err(Error::ZeroScopeBound));
    }

    #[test]
    fn empty_run_is_accepted() {
        let g = family(Family::P(1)).unwrap();
        let s = build_system(&g, &["q0", "qf"], &[("q0", "", "qf")], "q0", "qf").unwrap();
        let d = decide(&s, 1, &generic()).unwrap();
        assert_eq!((d.verdict, d.engine), (Verdict::Reachable(Vec::new()), Engine::Trivial));
    }

    #[test]
    fn edges_from_initial() {
        let g = family(Family::P(1)).unwrap();
        let s = build_system(&g, &["q0", "qf"], &[("q0", "v1+ v1-", "qf")], "q0", "qf").unwrap();
        let solver = Solver::new(&s, 1).unwrap();
        let succ = solver.edges(&solver.initial_node()).unwrap();
        assert!(!succ.is_empty());
        assert!(succ.iter().any(|n| {
            let b = n.configs[0].window[0].blocks.iter().filter_map(Slot::block).collect::<Vec<_>>();
            b.len() == 1 && b[0].f == Op::plus(0)
        }));
    }

    #[test]
    fn one_step_examples() {
        let s = p1_push_pop();
        let solver = Solver::new(&s, 1).unwrap();
        let ctxs = solver.contexts_from(0, 0);
        let empty = ClassConfiguration { window: vec![ContextAbstraction::e_context(2)] };
        for c in &ctxs {
            let r = solver.one_step(&empty, c).unwrap();
            assert_eq!(r.len(), 1);
            assert_eq!(r[0].window[0].blocks, c.blocks);
        }
        // A window holding a push block clears only against a context that pops it.
        let push = ctxs.iter().find(|c| c.blocks[0].block().unwrap().q2 == 1 && c.blocks[1] == Slot::E && c.blocks[0].block().unwrap().umin == VertexSet::singleton(0)).unwrap();
        let cfg = ClassConfiguration { window: vec![push.clone()] };
        let pops = solver.contexts_from(0, 1);
        assert!(pops.iter().any(|c| solver.one_step(&cfg, c).unwrap().iter().any(|r| r.window[0].blocks.iter().all(|b| *b == Slot::E))));
        let again = solver.contexts_from(0, 0);
        assert!(again.iter().all(|c| solver.one_step(&cfg, c).unwrap().is_empty()));
    }

    #[test]
    fn context_count_is_stable() {
        let g = family(Family::P(1)).unwrap();
        let s = build_system(&g, &["q0", "qf"], &[("q0", "v1+", "qf"), ("qf", "v1-", "q0")], "q0", "qf").unwrap();
        let all = enumerate_contexts(&s, 1, 0).unwrap();
        assert!(all.iter().all(|c| c.validate(&g).is_ok()));
        let distinct: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), all.len());
        // Only q0->qf (residual v+) and qf->q0 (residual v-) leave a residual;
        // q0->q0 words reduce to ε. Contexts: each block alone and both chains of two.
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn workers_do_not_change_verdicts() {
        let s = p1_push_pop();
        let one = decide(&s, 1, &generic()).unwrap();
        let four = decide(&s, 1, &SolverOptions { workers: 4, ..generic() }).unwrap();
        assert_eq!(one.verdict.label(), four.verdict.label());
    }
}
