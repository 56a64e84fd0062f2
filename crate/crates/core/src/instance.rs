//! The JSON instance format: a graph, a system over it and an optional scope bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::valence::{SystemSpec, ValenceSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub system: ValenceSystem,
    /// At least 1 when present.
    pub k: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    graph: Graph,
    system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
}

impl Instance {
    pub fn new(system: ValenceSystem, k: Option<usize>) -> Result<Self> {
        if k == Some(0) {
            return Err(Error::ZeroScopeBound);
        }
        Ok(Instance { system, k })
    }

    pub fn graph(&self) -> &Graph {
        &self.system.graph
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::BadInstance(e.to_string()))?;
        Instance::new(ValenceSystem::from_spec(file.graph, &file.system)?, file.k)
    }

    /// Pretty-printed JSON; stable for a fixed instance.
    pub fn to_json(&self) -> String {
        let file = InstanceFile { graph: self.system.graph.clone(), system: self.system.spec(), k: self.k };
        serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
    }
}

/// Parses just a graph document, or the graph of an instance document.
pub fn graph_from_json(text: &str) -> Result<Graph> {
    #[derive(Deserialize)]
    struct GraphOnly {
        graph: Graph,
    }
    match serde_json::from_str::<GraphOnly>(text) {
        Ok(doc) => Ok(doc.graph),
        Err(_) => serde_json::from_str::<Graph>(text).map_err(|e| Error::BadInstance(e.to_string())),
    }
}
