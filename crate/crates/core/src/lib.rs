//! Scope-bounded reachability for valence systems over graph monoids.
//!
//! The crate decides whether a valence system has a run whose accumulated
//! word is the identity and has scope at most `k`. It contains the abstraction
//! based decision procedure ([`solver::decide`]), brute-force oracles used to
//! validate it, pushdown fast paths, a complexity classifier and instance
//! generators.

pub mod abstraction;
pub mod decomposition;
pub mod error;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod pda;
pub mod solver;
pub mod valence;
pub mod words;

pub use decomposition::{
    all_reductions, canonical_contexts, free_reduce_words, greedy_reductions, induced_decomposition,
    interaction_distance, is_block_decomposition, scope, BlockDecomposition, ContextDecomposition, ReductionTrace,
    Scope,
};
pub use error::{Error, Result};
pub use graph::{classify, family, ComplexityClass, Family, Graph, GraphSpec, ScopeMode, VertexId, VertexSet};
pub use words::{
    apply_step, format_word, greedy_irreducible, is_identity, is_identity_with_budget, ops_independent, parse_word,
    Op, ReductionStep, Rule, Sign, Word,
};
pub use pda::{anticlique_pda, intersect_nfa, pda_nonempty, singleton_counter_pda, Nfa, Pda, PdaTransition};
pub use valence::{build_system, oracle_bsreach, RunWitness, StateId, SystemSpec, Transition, TransitionSpec, ValenceSystem};
pub use abstraction::{
    blocks_cancel, blocks_commute, blocks_dependent, contexts_independent, represents, BlockAbstraction, ContextAbstraction,
    Slot,
};
pub use solver::{
    decide, edges, enumerate_contexts, initial_node, one_step, ClassConfiguration, Decision, Engine, RNode, Solver,
    SolverOptions, Verdict, WitnessStep,
};
pub use instance::{graph_from_json, Instance};
pub use generators::{bqa_graph, bva_graph, gen_bqa, gen_bva, gen_random, GadgetKind, GadgetMachine, GadgetTransition};
