//! Pushdown automata with summary-based emptiness, products with finite
//! automata, and the fast-path constructions for anti-clique and
//! single-vertex graphs.

use std::fmt;

use crate::error::{Error, Result};
use crate::valence::ValenceSystem;

pub type Symbol = u32;

/// One move. `push` is listed bottom-first, so its last symbol ends on top.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PdaTransition {
    pub from: usize,
    pub input: Option<Symbol>,
    pub pop: Option<Symbol>,
    pub push: Vec<Symbol>,
    pub to: usize,
}

/// Accepts by reaching `final_state` with an empty stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    pub states: usize,
    pub input_symbols: u32,
    pub stack_symbols: u32,
    pub transitions: Vec<PdaTransition>,
    pub initial: usize,
    pub final_state: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub states: usize,
    pub alphabet: u32,
    pub transitions: Vec<(usize, Option<Symbol>, usize)>,
    pub initial: usize,
    pub finals: Vec<usize>,
}

impl Nfa {
    /// Accepts every word.
    pub fn universal(alphabet: u32) -> Self {
        Nfa {
            states: 1,
            alphabet,
            transitions: (0..alphabet).map(|a| (0, Some(a), 0)).collect(),
            initial: 0,
            finals: vec![0],
        }
    }

    /// Accepts nothing.
    pub fn empty(alphabet: u32) -> Self {
        Nfa { states: 1, alphabet, transitions: Vec::new(), initial: 0, finals: Vec::new() }
    }
}

/// Net-zero reachability between PDA states.
///
/// `reach(p, q)` holds iff some run goes from `p` with an empty stack to `q`
/// with an empty stack; the run never pops below its starting height.
pub struct Summaries {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl Summaries {
    pub fn reach(&self, p: usize, q: usize) -> bool {
        p < self.n && q < self.n && self.rows[p][q / 64] >> (q % 64) & 1 == 1
    }
}

enum Move {
    Internal,
    Push(Symbol),
    Pop(Symbol),
}

impl Pda {
    pub fn new(states: usize, input_symbols: u32, stack_symbols: u32, initial: usize, final_state: usize) -> Self {
        Pda { states, input_symbols, stack_symbols, transitions: Vec::new(), initial, final_state }
    }

    pub fn add(&mut self, from: usize, input: Option<Symbol>, pop: Option<Symbol>, push: &[Symbol], to: usize) {
        self.transitions.push(PdaTransition { from, input, pop, push: push.to_vec(), to });
    }

    pub fn add_state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    /// Split every transition into single-symbol stack moves; input is dropped.
    fn normalized(&self) -> (usize, Vec<(usize, Move, usize)>) {
        let mut n = self.states;
        let mut moves = Vec::new();
        for t in &self.transitions {
            let mut steps: Vec<Move> = t.pop.map(Move::Pop).into_iter().collect();
            steps.extend(t.push.iter().map(|&x| Move::Push(x)));
            if steps.is_empty() {
                steps.push(Move::Internal);
            }
            let count = steps.len();
            let mut from = t.from;
            for (i, m) in steps.into_iter().enumerate() {
                let to = if i + 1 == count {
                    t.to
                } else {
                    n += 1;
                    n - 1
                };
                moves.push((from, m, to));
                from = to;
            }
        }
        (n, moves)
    }

    /// Saturate the summary relation over all states.
    pub fn summaries(&self) -> Summaries {
        let (n, moves) = self.normalized();
        let words = n.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; n];
        let mut cols = vec![vec![0u64; words]; n];
        let mut pushes_into: Vec<Vec<(usize, Symbol)>> = vec![Vec::new(); n];
        let mut pops_from: Vec<Vec<(Symbol, usize)>> = vec![Vec::new(); n];
        let mut work = Vec::new();
        let add = |p: usize, q: usize, rows: &mut Vec<Vec<u64>>, cols: &mut Vec<Vec<u64>>, work: &mut Vec<(usize, usize)>| {
            if rows[p][q / 64] >> (q % 64) & 1 == 0 {
                rows[p][q / 64] |= 1 << (q % 64);
                cols[q][p / 64] |= 1 << (p % 64);
                work.push((p, q));
            }
        };
        for p in 0..n {
            add(p, p, &mut rows, &mut cols, &mut work);
        }
        for (from, m, to) in moves {
            match m {
                Move::Internal => add(from, to, &mut rows, &mut cols, &mut work),
                Move::Push(x) => pushes_into[to].push((from, x)),
                Move::Pop(x) => pops_from[from].push((x, to)),
            }
        }
        let bits = |row: &[u64]| -> Vec<usize> {
            let mut out = Vec::new();
            for (i, &w) in row.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    out.push(i * 64 + w.trailing_zeros() as usize);
                    w &= w - 1;
                }
            }
            out
        };
        while let Some((p, q)) = work.pop() {
            for r in bits(&rows[q]) {
                add(p, r, &mut rows, &mut cols, &mut work);
            }
            for o in bits(&cols[p]) {
                add(o, q, &mut rows, &mut cols, &mut work);
            }
            for &(a, x) in &pushes_into[p] {
                for &(y, b) in &pops_from[q] {
                    if x == y {
                        add(a, b, &mut rows, &mut cols, &mut work);
                    }
                }
            }
        }
        Summaries { n, rows }
    }
}

/// Some input word leads from the initial state to the final state, both with an empty stack.
pub fn pda_nonempty(p: &Pda) -> bool {
    p.summaries().reach(p.initial, p.final_state)
}

/// Product automaton accepting `L(p) ∩ L(n)`.
pub fn intersect_nfa(p: &Pda, n: &Nfa) -> Result<Pda> {
    if p.input_symbols != n.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    let m = n.states;
    let id = |s: usize, t: usize| s * m + t;
    let accept = p.states * m;
    let mut out = Pda::new(accept + 1, p.input_symbols, p.stack_symbols, id(p.initial, n.initial), accept);
    for t in &p.transitions {
        match t.input {
            None => {
                for s in 0..m {
                    out.add(id(t.from, s), None, t.pop, &t.push, id(t.to, s));
                }
            }
            Some(a) => {
                for &(s, b, s2) in &n.transitions {
                    if b == Some(a) {
                        out.add(id(t.from, s), Some(a), t.pop, &t.push, id(t.to, s2));
                    }
                }
            }
        }
    }
    for &(s, b, s2) in &n.transitions {
        if b.is_none() {
            for q in 0..p.states {
                out.add(id(q, s), None, None, &[], id(q, s2));
            }
        }
    }
    for &f in &n.finals {
        out.add(id(p.final_state, f), None, None, &[], accept);
    }
    Ok(out)
}

/// Input symbol of an operation; `2·|V|` is reserved for the separator.
fn input_code(x: crate::words::Op) -> Symbol {
    x.code()
}

/// Pushdown automaton for a valence system over an anti-clique.
///
/// Stack symbols per vertex `v`: `3v` for v⁺, `3v+1` for v⁻, `3v+2` for v°.
pub fn anticlique_pda(sys: &ValenceSystem) -> Result<Pda> {
    let g = &sys.graph;
    if !g.is_anti_clique() {
        return Err(Error::GraphNotAntiClique);
    }
    let e = sys.expanded();
    let nv = g.len() as u32;
    let mut p = Pda::new(e.states.len(), 2 * nv + 1, 3 * nv, e.initial, e.final_state);
    for t in &e.transitions {
        let Some(&x) = t.word.first() else {
            p.add(t.from, None, None, &[], t.to);
            continue;
        };
        let v = x.vertex as Symbol;
        let a = Some(input_code(x));
        if x.is_plus() {
            p.add(t.from, a, None, &[3 * v], t.to);
            if g.is_looped(x.vertex) {
                p.add(t.from, a, Some(3 * v + 2), &[], t.to);
            }
        } else {
            p.add(t.from, a, Some(3 * v), &[], t.to);
            if g.is_looped(x.vertex) {
                p.add(t.from, a, None, &[3 * v + 2], t.to);
            }
        }
    }
    Ok(p)
}

/// Counter automaton for a valence system over a one-vertex graph.
///
/// Unlooped: one stack symbol counts the surplus of v⁺. Looped: the sign of
/// the counter lives in the state and symbol `1` marks the bottom of a
/// non-zero excursion, which provides the zero test.
pub fn singleton_counter_pda(sys: &ValenceSystem) -> Result<Pda> {
    let g = &sys.graph;
    if g.len() != 1 {
        return Err(Error::GraphNotSingleton);
    }
    let e = sys.expanded();
    let n = e.states.len();
    if !g.is_looped(0) {
        let mut p = Pda::new(n, 3, 1, e.initial, e.final_state);
        for t in &e.transitions {
            match t.word.first() {
                None => p.add(t.from, None, None, &[], t.to),
                Some(x) if x.is_plus() => p.add(t.from, Some(input_code(*x)), None, &[0], t.to),
                Some(x) => p.add(t.from, Some(input_code(*x)), Some(0), &[], t.to),
            }
        }
        return Ok(p);
    }
    const ZERO: usize = 0;
    const POS: usize = 1;
    const NEG: usize = 2;
    const Z: Symbol = 0;
    const B: Symbol = 1;
    let id = |q: usize, mode: usize| 3 * q + mode;
    let accept = 3 * n;
    let mut p = Pda::new(accept + 1, 3, 2, id(e.initial, ZERO), accept);
    p.add(id(e.final_state, ZERO), None, None, &[], accept);
    for t in &e.transitions {
        let Some(&x) = t.word.first() else {
            for mode in [ZERO, POS, NEG] {
                p.add(id(t.from, mode), None, None, &[], id(t.to, mode));
            }
            continue;
        };
        let a = Some(input_code(x));
        let (grow, shrink) = if x.is_plus() { (POS, NEG) } else { (NEG, POS) };
        p.add(id(t.from, ZERO), a, None, &[B], id(t.to, grow));
        p.add(id(t.from, grow), a, None, &[Z], id(t.to, grow));
        p.add(id(t.from, shrink), a, Some(Z), &[], id(t.to, shrink));
        p.add(id(t.from, shrink), a, Some(B), &[], id(t.to, ZERO));
    }
    Ok(p)
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states {}", self.states)?;
        writeln!(f, "input {}", self.input_symbols)?;
        writeln!(f, "stack {}", self.stack_symbols)?;
        writeln!(f, "initial {}", self.initial)?;
        writeln!(f, "final {}", self.final_state)?;
        let sym = |s: Option<Symbol>| s.map_or("_".to_string(), |x| x.to_string());
        for t in &self.transitions {
            let push: Vec<String> = t.push.iter().map(|x| x.to_string()).collect();
            writeln!(
                f,
                "{} {} {} [{}] {}",
                t.from,
                sym(t.input),
                sym(t.pop),
                push.join(" "),
                t.to
            )?;
        }
        Ok(())
    }
}
