//! Instances shared by the solver benchmarks.

use bsreach::{bqa_graph, gen_bqa, gen_random, GadgetKind, GadgetMachine, GadgetTransition, Instance, ValenceSystem};

pub struct Fixture {
    pub name: String,
    pub system: ValenceSystem,
    pub k: usize,
}

const PUSH_POP: &str = r#"{
  "graph": {"vertices": ["v1"]},
  "system": {"states": ["q0", "q1", "qf"], "initial": "q0", "final": "qf",
    "transitions": [{"from": "q0", "word": ["v1+"], "to": "q1"}, {"from": "q1", "word": ["v1-"], "to": "qf"}]},
  "k": 1
}"#;

/// Needs two contexts per run, so it is reachable only for k >= 2.
const CROSSED: &str = r#"{
  "graph": {"vertices": ["a", "b", "c"], "edges": [["a", "b"]]},
  "system": {"states": ["q0", "q1", "qf"], "initial": "q0", "final": "qf",
    "transitions": [{"from": "q0", "word": ["a+", "b+"], "to": "q1"}, {"from": "q1", "word": ["a-", "b-"], "to": "qf"}]},
  "k": 2
}"#;

fn from_json(name: &str, text: &str) -> Fixture {
    let inst = Instance::from_json(text).expect("fixture parses");
    Fixture { name: name.into(), k: inst.k.expect("fixture has k"), system: inst.system }
}

/// Queue machine on `n` cells that enqueues a 1 and dequeues it again.
pub fn queue_round_trip(n: usize) -> Fixture {
    let t = |from: &str, x, y, to: &str| GadgetTransition { from: from.into(), cell: 0, x, y, to: to.into() };
    let m = GadgetMachine {
        kind: GadgetKind::Bqa,
        n,
        states: vec!["p".into(), "q".into(), "r".into()],
        transitions: vec![t("p", 0, 1, "q"), t("q", 0, 0, "r")],
        initial: "p".into(),
        final_state: "r".into(),
    };
    let (g, u, v) = bqa_graph().expect("gadget graph");
    let (system, k) = gen_bqa(&m, &g, u, v).expect("gadget builds");
    Fixture { name: format!("bqa_n{n}"), system, k }
}

/// Small solver workloads: hand-written instances plus seeded random ones.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = vec![from_json("push_pop", PUSH_POP), from_json("crossed", CROSSED), queue_round_trip(1)];
    for seed in [3u64, 17, 42] {
        let (_, system) = gen_random(seed, 3, 3, 4, 3).expect("random instance");
        out.push(Fixture { name: format!("random_{seed}"), system, k: 2 });
    }
    out
}
