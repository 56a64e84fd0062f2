//! Storage graphs: vertices with a fixed linear order, an undirected
//! independence relation with optional self-loops, and everything derived
//! from it (neighbourhoods, the order ⪯, weak dependence classes, neighbor
//! antichains, named families and the complexity classifier).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a vertex in the graph's listing order.
pub type VertexId = usize;

/// Maximum number of vertices a [`Graph`] may hold.
pub const MAX_VERTICES: usize = 64;

/// A set of vertices stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn singleton(v: VertexId) -> Self {
        VertexSet(1 << v)
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: VertexId) {
        self.0 |= 1 << v;
    }

    pub fn with(self, v: VertexId) -> Self {
        VertexSet(self.0 | 1 << v)
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = VertexId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(v)
        })
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Undirected graph with self-loops and a fixed vertex order.
///
/// `adj[v]` is the neighbourhood N(v); it contains `v` itself iff `v` is looped.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    adj: Vec<VertexSet>,
    classes: Vec<VertexSet>,
    class_of: Vec<usize>,
}

/// Serialized form of a [`Graph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub loops: Vec<String>,
}

impl TryFrom<GraphSpec> for Graph {
    type Error = Error;

    fn try_from(spec: GraphSpec) -> Result<Self> {
        let edges: Vec<(&str, &str)> = spec.edges.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
        let loops: Vec<&str> = spec.loops.iter().map(String::as_str).collect();
        let vertices: Vec<&str> = spec.vertices.iter().map(String::as_str).collect();
        Graph::new(&vertices, &edges, &loops)
    }
}

impl From<Graph> for GraphSpec {
    fn from(g: Graph) -> Self {
        g.spec()
    }
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Graph {
    /// Builds a graph; the listing order of `vertices` is the order ≪.
    pub fn new(vertices: &[&str], edges: &[(&str, &str)], loops: &[&str]) -> Result<Self> {
        if vertices.len() > MAX_VERTICES {
            return Err(Error::TooManyVertices(vertices.len()));
        }
        let mut index = HashMap::new();
        for (i, name) in vertices.iter().enumerate() {
            if !valid_name(name) {
                return Err(Error::BadName(name.to_string()));
            }
            if index.insert(name.to_string(), i).is_some() {
                return Err(Error::DuplicateVertex(name.to_string()));
            }
        }
        let lookup = |name: &str| index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()));
        let mut adj = vec![VertexSet::EMPTY; vertices.len()];
        for &(a, b) in edges {
            let (u, v) = (lookup(a)?, lookup(b)?);
            adj[u].insert(v);
            adj[v].insert(u);
        }
        for &l in loops {
            let v = lookup(l)?;
            adj[v].insert(v);
        }
        Ok(Self::from_parts(vertices.iter().map(|s| s.to_string()).collect(), index, adj))
    }

    fn from_parts(names: Vec<String>, index: HashMap<String, VertexId>, adj: Vec<VertexSet>) -> Self {
        let n = names.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        // Components of the complement graph, loops ignored; discovered in vertex order.
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = VertexSet::singleton(start);
            let mut stack = vec![start];
            class_of[start] = id;
            while let Some(u) = stack.pop() {
                for w in 0..n {
                    if w != u && class_of[w] == usize::MAX && !adj[u].contains(w) {
                        class_of[w] = id;
                        members.insert(w);
                        stack.push(w);
                    }
                }
            }
            classes.push(members);
        }
        Graph { names, index, adj, classes, class_of }
    }

    pub fn spec(&self) -> GraphSpec {
        let mut edges = Vec::new();
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                if self.adj[u].contains(v) {
                    edges.push([self.names[u].clone(), self.names[v].clone()]);
                }
            }
        }
        GraphSpec {
            vertices: self.names.clone(),
            edges,
            loops: (0..self.len()).filter(|&v| self.is_looped(v)).map(|v| self.names[v].clone()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.len()
    }

    pub fn all(&self) -> VertexSet {
        self.vertices().collect()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn set(&self, names: &[&str]) -> Result<VertexSet> {
        names.iter().map(|n| self.vertex(n)).collect()
    }

    pub fn is_looped(&self, v: VertexId) -> bool {
        self.adj[v].contains(v)
    }

    /// uIv; for u = v this asks for a self-loop.
    pub fn independent(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].contains(v)
    }

    /// N(v) = {u | uIv}.
    pub fn neighbourhood(&self, v: VertexId) -> VertexSet {
        self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|v| self.adj[v].difference(VertexSet::singleton(v)).len()).sum::<usize>() / 2
    }

    pub fn loop_count(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_looped(v)).count()
    }

    /// No two distinct members are independent.
    pub fn dependent_set(&self, u: VertexSet) -> bool {
        u.iter().all(|v| self.adj[v].intersection(u).difference(VertexSet::singleton(v)).is_empty())
    }

    /// u ≤ v iff N(u) ⊆ N(v).
    pub fn le(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].is_subset(self.adj[v])
    }

    /// u ⪯ v iff u ≤ v and u ≪ v (strict).
    pub fn preceq(&self, u: VertexId, v: VertexId) -> bool {
        u < v && self.le(u, v)
    }

    fn require_dependent(&self, u: VertexSet) -> Result<()> {
        if self.dependent_set(u) {
            Ok(())
        } else {
            Err(Error::NotDependentSet)
        }
    }

    pub fn min_set(&self, u: VertexSet) -> Result<VertexSet> {
        self.require_dependent(u)?;
        Ok(u.iter().filter(|&x| !u.iter().any(|y| self.preceq(y, x))).collect())
    }

    pub fn max_set(&self, u: VertexSet) -> Result<VertexSet> {
        self.require_dependent(u)?;
        Ok(u.iter().filter(|&x| !u.iter().any(|y| self.preceq(x, y))).collect())
    }

    /// Reflexive downward closure {x | x = y or x ⪯ y for some y ∈ u}.
    pub fn down_closure(&self, u: VertexSet) -> VertexSet {
        self.vertices().filter(|&x| u.iter().any(|y| x == y || self.preceq(x, y))).collect()
    }

    /// Reflexive upward closure {x | x = y or y ⪯ x for some y ∈ u}.
    pub fn up_closure(&self, u: VertexSet) -> VertexSet {
        self.vertices().filter(|&x| u.iter().any(|y| x == y || self.preceq(y, x))).collect()
    }

    pub fn is_antichain(&self, u: VertexSet) -> bool {
        u.iter().all(|x| !u.iter().any(|y| self.preceq(x, y)))
    }

    /// Every u ∈ U, u' ∈ U' satisfy uIu', decided on the min-sets.
    pub fn sets_independent(&self, u: VertexSet, u2: VertexSet) -> Result<bool> {
        let (a, b) = (self.min_set(u)?, self.min_set(u2)?);
        Ok(a.iter().all(|x| b.is_subset(self.adj[x])))
    }

    pub fn weak_classes(&self) -> &[VertexSet] {
        &self.classes
    }

    pub fn class_of(&self, v: VertexId) -> usize {
        self.class_of[v]
    }

    /// Dependent antichains of size ≤ `max_size`, by size then lexicographically; ∅ first.
    pub fn neighbor_antichains(&self, max_size: usize) -> Vec<VertexSet> {
        self.antichains_within(self.all(), max_size)
    }

    pub fn antichains_within(&self, within: VertexSet, max_size: usize) -> Vec<VertexSet> {
        let pool: Vec<VertexId> = within.iter().collect();
        let mut out = vec![VertexSet::EMPTY];
        for size in 1..=max_size.min(pool.len()) {
            for combo in pool.iter().copied().combinations(size) {
                let s: VertexSet = combo.into_iter().collect();
                if self.dependent_set(s) && self.is_antichain(s) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// No edge between distinct vertices (loops allowed).
    pub fn is_anti_clique(&self) -> bool {
        self.edge_count() == 0
    }

    /// Every pair of distinct vertices is adjacent (loops arbitrary).
    pub fn is_clique(&self) -> bool {
        self.edge_count() * 2 == self.len() * self.len().saturating_sub(1)
    }

    pub fn format_set(&self, u: VertexSet) -> String {
        format!("{{{}}}", u.iter().map(|v| self.name(v)).join(","))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spec = self.spec();
        f.debug_struct("Graph")
            .field("vertices", &spec.vertices)
            .field("edges", &spec.edges)
            .field("loops", &spec.loops)
            .finish()
    }
}

/// Complexity of BSREACH for a fixed graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplexityClass {
    NL,
    P,
    PSPACE,
}

impl fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ComplexityClass::NL => "NL",
            ComplexityClass::P => "P",
            ComplexityClass::PSPACE => "PSPACE",
        };
        f.write_str(s)
    }
}

/// Whether the scope bound is part of the input or fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScopeMode {
    KInput,
    KFixed,
}

impl FromStr for ScopeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k-input" | "k-in-input" => Ok(ScopeMode::KInput),
            "k-fixed" => Ok(ScopeMode::KFixed),
            _ => Err(Error::BadFamilyParams(format!("unknown mode `{s}`"))),
        }
    }
}

pub fn classify(g: &Graph, mode: ScopeMode) -> ComplexityClass {
    match mode {
        ScopeMode::KInput if g.len() <= 1 => ComplexityClass::NL,
        ScopeMode::KInput if g.is_anti_clique() => ComplexityClass::P,
        ScopeMode::KInput => ComplexityClass::PSPACE,
        ScopeMode::KFixed if g.is_clique() => ComplexityClass::NL,
        ScopeMode::KFixed => ComplexityClass::P,
    }
}

/// Named graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// s unlooped vertices, no edges.
    P(usize),
    /// Direct product of r copies of P_s.
    MP(usize, usize),
    /// Unlooped clique.
    UC(usize),
    /// Looped clique.
    LC(usize),
    /// UC_{d+2} minus one edge.
    UCminus(usize),
    /// Alternately adding a universal vertex and an isolated vertex.
    SC(usize),
    /// u_i – v_j adjacent iff i ≠ j.
    B(usize),
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `P_3`, `MP_2_3`, `UC_5`, `LC_2`, `UCminus_2`, `SC_4`, `B_3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadFamilyParams(s.to_string());
        let mut parts = s.split('_');
        let name = parts.next().ok_or_else(bad)?;
        let nums: Vec<usize> = parts.map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        match (name, nums.as_slice()) {
            ("P", [s]) => Ok(Family::P(*s)),
            ("MP", [r, s]) => Ok(Family::MP(*r, *s)),
            ("UC", [d]) => Ok(Family::UC(*d)),
            ("LC", [d]) => Ok(Family::LC(*d)),
            ("UCminus", [d]) => Ok(Family::UCminus(*d)),
            ("SC", [m]) => Ok(Family::SC(*m)),
            ("B", [n]) => Ok(Family::B(*n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::P(s) => write!(f, "P_{s}"),
            Family::MP(r, s) => write!(f, "MP_{r}_{s}"),
            Family::UC(d) => write!(f, "UC_{d}"),
            Family::LC(d) => write!(f, "LC_{d}"),
            Family::UCminus(d) => write!(f, "UCminus_{d}"),
            Family::SC(m) => write!(f, "SC_{m}"),
            Family::B(n) => write!(f, "B_{n}"),
        }
    }
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn build_owned(vertices: &[String], edges: &[(String, String)], loops: &[String]) -> Result<Graph> {
    let v: Vec<&str> = vertices.iter().map(String::as_str).collect();
    let e: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let l: Vec<&str> = loops.iter().map(String::as_str).collect();
    Graph::new(&v, &e, &l)
}

fn all_pairs(vs: &[String]) -> Vec<(String, String)> {
    vs.iter().cloned().tuple_combinations().collect()
}

pub fn family(f: Family) -> Result<Graph> {
    let bad = || Error::BadFamilyParams(f.to_string());
    match f {
        Family::P(s) => {
            if s == 0 {
                return Err(bad());
            }
            build_owned(&numbered("v", s), &[], &[])
        }
        Family::MP(r, s) => {
            if r == 0 || s == 0 || r * s > MAX_VERTICES {
                return Err(bad());
            }
            let vs: Vec<String> = (1..=r).flat_map(|i| (1..=s).map(move |j| format!("v{i}_{j}"))).collect();
            let edges: Vec<(String, String)> = (0..vs.len())
                .tuple_combinations()
                .filter(|&(a, b)| a / s != b / s)
                .map(|(a, b)| (vs[a].clone(), vs[b].clone()))
                .collect();
            build_owned(&vs, &edges, &[])
        }
        Family::UC(d) | Family::LC(d) => {
            if d == 0 {
                return Err(bad());
            }
            let vs = numbered("v", d);
            let loops = if matches!(f, Family::LC(_)) { vs.clone() } else { Vec::new() };
            build_owned(&vs, &all_pairs(&vs), &loops)
        }
        Family::UCminus(d) => {
            let vs = numbered("v", d + 2);
            let edges: Vec<_> = all_pairs(&vs).into_iter().skip(1).collect();
            build_owned(&vs, &edges, &[])
        }
        Family::SC(m) => {
            if m + 1 > MAX_VERTICES {
                return Err(bad());
            }
            let vs: Vec<String> = (0..=m).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in (1..=m).step_by(2) {
                edges.extend((0..i).map(|j| (vs[j].clone(), vs[i].clone())));
            }
            build_owned(&vs, &edges, &[])
        }
        Family::B(n) => {
            if n == 0 || 2 * n > MAX_VERTICES {
                return Err(bad());
            }
            let us = numbered("u", n);
            let ws = numbered("v", n);
            let vs: Vec<String> = us.iter().chain(&ws).cloned().collect();
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| i != j).map(move |j| (i, j)))
                .map(|(i, j)| (us[i].clone(), ws[j].clone()))
                .collect();
            build_owned(&vs, &edges, &[])
        }
    }
}
