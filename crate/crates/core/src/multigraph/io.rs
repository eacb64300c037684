//! JSON and DOT serialisation.

use std::collections::BTreeSet;
use std::fmt::{Display, Write};

use serde::{Deserialize, Serialize};

use super::{FiniteMultigraph, Label};
use crate::{Error, Name, Result};

/// `{"vertices":[...],"edges":[{"id":...,"ends":[a,b]}...]}`; a loop repeats
/// its endpoint. Truncations additionally list their dummy vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<JsonEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dummies: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub id: String,
    pub ends: [String; 2],
}

impl JsonGraph {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain strings serialise")
    }

    /// Builds a [`FiniteMultigraph`] over [`Name`] labels, rejecting
    /// duplicate labels and labels shared between vertices and edges.
    pub fn to_graph(&self) -> Result<FiniteMultigraph<Name, Name>> {
        let vertex_names: BTreeSet<&str> = self.vertices.iter().map(String::as_str).collect();
        if let Some(e) = self.edges.iter().find(|e| vertex_names.contains(e.id.as_str())) {
            return Err(Error::LabelClash(e.id.clone()));
        }
        FiniteMultigraph::from_parts(
            self.vertices.iter().map(|v| Name::from(v.as_str())),
            self.edges.iter().map(|e| {
                (
                    Name::from(e.id.as_str()),
                    Name::from(e.ends[0].as_str()),
                    Name::from(e.ends[1].as_str()),
                )
            }),
        )
    }
}

impl<V: Label + Display, E: Label + Display> FiniteMultigraph<V, E> {
    pub fn to_json(&self) -> JsonGraph {
        JsonGraph {
            vertices: self.vertices.iter().map(ToString::to_string).collect(),
            edges: self
                .edges
                .iter()
                .map(|(e, (a, b))| JsonEdge {
                    id: e.to_string(),
                    ends: [a.to_string(), b.to_string()],
                })
                .collect(),
            dummies: None,
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.to_dot_with(name, |_| None, |_| None)
    }

    /// DOT export; every edge, parallel or loop, is its own statement.
    /// The closures may return extra attribute text for a vertex or edge.
    pub fn to_dot_with(
        &self,
        name: &str,
        vertex_attrs: impl Fn(&V) -> Option<String>,
        edge_attrs: impl Fn(&E) -> Option<String>,
    ) -> String {
        let mut out = String::new();
        writeln!(out, "graph {} {{", quote(name)).unwrap();
        for v in &self.vertices {
            match vertex_attrs(v) {
                Some(a) => writeln!(out, "  {} [{a}];", quote(&v.to_string())).unwrap(),
                None => writeln!(out, "  {};", quote(&v.to_string())).unwrap(),
            }
        }
        for (e, (a, b)) in &self.edges {
            let mut attrs = format!("label={}", quote(&e.to_string()));
            if let Some(extra) = edge_attrs(e) {
                attrs.push_str(", ");
                attrs.push_str(&extra);
            }
            writeln!(out, "  {} -- {} [{attrs}];", quote(&a.to_string()), quote(&b.to_string())).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_loops_and_parallels() {
        let text = r#"{"vertices":["a","b"],"edges":[{"id":"e1","ends":["a","b"]},{"id":"e2","ends":["a","b"]},{"id":"e3","ends":["b","b"]}]}"#;
        let g = JsonGraph::parse(text).unwrap().to_graph().unwrap();
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.degree(&Name::from("b")).unwrap(), 4);
        let again = g.to_json().to_graph().unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn json_rejects_clashes_and_dangling_ends() {
        let clash = r#"{"vertices":["a","e"],"edges":[{"id":"e","ends":["a","a"]}]}"#;
        assert!(matches!(JsonGraph::parse(clash).unwrap().to_graph(), Err(Error::LabelClash(_))));
        let dangling = r#"{"vertices":["a"],"edges":[{"id":"e","ends":["a","b"]}]}"#;
        assert!(matches!(JsonGraph::parse(dangling).unwrap().to_graph(), Err(Error::UnknownVertex(_))));
        let dup = r#"{"vertices":["a","a"],"edges":[]}"#;
        assert!(matches!(JsonGraph::parse(dup).unwrap().to_graph(), Err(Error::DuplicateVertex(_))));
    }

    #[test]
    fn dot_has_one_statement_per_parallel_edge() {
        let g = FiniteMultigraph::<Name, Name>::from_parts(
            ["v".into(), "w".into()],
            [("e1".into(), "v".into(), "w".into()), ("e2".into(), "v".into(), "w".into())],
        )
        .unwrap();
        let dot = g.to_dot("g");
        assert_eq!(dot.matches(" -- ").count(), 2);
        assert!(dot.contains("\"v\" -- \"w\" [label=\"e1\"];"));
        assert!(dot.contains("\"v\" -- \"w\" [label=\"e2\"];"));
    }
}
