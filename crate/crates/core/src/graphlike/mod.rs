//! Edge-contraction inverse systems of finite connected multigraphs.
//!
//! Stage `n` has edges `e1..en`; contracting `en` in stage `n` gives stage
//! `n - 1` exactly, labels included. A system is stored as the list of
//! uncontraction steps that build stage `n` from stage `n - 1`.

pub mod builders;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::multigraph::FiniteMultigraph;
use crate::verify::Report;
use crate::{Error, Name, Result};

pub type StageGraph = FiniteMultigraph<Name, Name>;

/// An end of an edge: `slot` 0 or 1 indexes the stored (sorted) endpoint
/// pair.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Incidence {
    pub edge: Name,
    pub slot: u8,
}

impl Incidence {
    pub fn new(edge: impl Into<Name>, slot: u8) -> Self {
        Incidence { edge: edge.into(), slot }
    }
}

impl fmt::Display for Incidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.edge, self.slot)
    }
}

impl std::str::FromStr for Incidence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad incidence `{s}`, expected `edge#0` or `edge#1`"));
        let (e, k) = s.rsplit_once('#').ok_or_else(bad)?;
        match k {
            "0" => Ok(Incidence::new(e, 0)),
            "1" => Ok(Incidence::new(e, 1)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepKind {
    /// Add the new edge as a loop at `at`.
    Loop { at: Name },
    /// Replace `at` by the two vertices `into`, joined by the new edge, and
    /// reattach every incidence at `at` as `assign` says.
    Split {
        at: Name,
        into: (Name, Name),
        assign: BTreeMap<Incidence, Name>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UncontractionStep {
    pub edge: Name,
    pub kind: StepKind,
}

impl UncontractionStep {
    pub fn at(&self) -> &Name {
        match &self.kind {
            StepKind::Loop { at } | StepKind::Split { at, .. } => at,
        }
    }
}

/// What one step did: the bonding map back and the raw new endpoints of
/// every old edge (slot `i` of the old pair becomes entry `i`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub vertex_map: BTreeMap<Name, Name>,
    pub ends: BTreeMap<Name, [Name; 2]>,
    pub edge: Name,
    pub at: Name,
    /// Vertices replacing `at` (equal for a loop step).
    pub into: (Name, Name),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeContractionSystem {
    pub root: Name,
    pub steps: Vec<UncontractionStep>,
}

fn malformed(stage: usize, reason: impl Into<String>) -> Error {
    Error::MalformedStep {
        stage,
        reason: reason.into(),
    }
}

/// Applies `step` to stage `stage - 1`.
pub fn apply_step(g: &StageGraph, step: &UncontractionStep, stage: usize) -> Result<(StageGraph, Transition)> {
    let at = step.at();
    if !g.has_vertex(at) {
        return Err(malformed(stage, format!("vertex `{at}` does not exist")));
    }
    if g.has_edge(&step.edge) || g.has_vertex(&step.edge) {
        return Err(malformed(stage, format!("label `{}` is already in use", step.edge)));
    }
    let mut next = FiniteMultigraph::new();
    let mut vertex_map = BTreeMap::new();
    let mut ends = BTreeMap::new();
    match &step.kind {
        StepKind::Loop { at } => {
            for v in g.vertices() {
                next.add_vertex(v.clone())?;
                vertex_map.insert(v.clone(), v.clone());
            }
            for (e, (a, b)) in g.edges() {
                next.add_edge(e.clone(), a.clone(), b.clone())?;
                ends.insert(e.clone(), [a.clone(), b.clone()]);
            }
            next.add_edge(step.edge.clone(), at.clone(), at.clone())?;
            Ok((
                next,
                Transition {
                    vertex_map,
                    ends,
                    edge: step.edge.clone(),
                    at: at.clone(),
                    into: (at.clone(), at.clone()),
                },
            ))
        }
        StepKind::Split { at, into: (v, w), assign } => {
            if v == w {
                return Err(malformed(stage, format!("split of `{at}` into one vertex `{v}`")));
            }
            for x in [v, w] {
                if x != at && (g.has_vertex(x) || g.has_edge(x)) {
                    return Err(malformed(stage, format!("label `{x}` is already in use")));
                }
                if x == &step.edge {
                    return Err(malformed(stage, format!("label `{x}` names both a vertex and the new edge")));
                }
            }
            let mut used = BTreeSet::new();
            for v0 in g.vertices() {
                if v0 != at {
                    next.add_vertex(v0.clone())?;
                    vertex_map.insert(v0.clone(), v0.clone());
                }
            }
            for x in [v, w] {
                next.add_vertex(x.clone())?;
                vertex_map.insert(x.clone(), at.clone());
            }
            for (e, (a, b)) in g.edges() {
                let mut pair = [a.clone(), b.clone()];
                for (slot, end) in pair.iter_mut().enumerate() {
                    if end == at {
                        let inc = Incidence::new(e.clone(), slot as u8);
                        let target = assign
                            .get(&inc)
                            .ok_or_else(|| malformed(stage, format!("incidence {inc} at `{at}` is not assigned")))?;
                        if target != v && target != w {
                            return Err(malformed(stage, format!("incidence {inc} is assigned to `{target}`")));
                        }
                        used.insert(inc);
                        *end = target.clone();
                    }
                }
                next.add_edge(e.clone(), pair[0].clone(), pair[1].clone())?;
                ends.insert(e.clone(), pair);
            }
            if let Some(extra) = assign.keys().find(|i| !used.contains(*i)) {
                return Err(malformed(stage, format!("incidence {extra} is not at `{at}`")));
            }
            next.add_edge(step.edge.clone(), v.clone(), w.clone())?;
            Ok((
                next,
                Transition {
                    vertex_map,
                    ends,
                    edge: step.edge.clone(),
                    at: at.clone(),
                    into: (v.clone(), w.clone()),
                },
            ))
        }
    }
}

/// Every stage `0..=n` and the transitions between them.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub graphs: Vec<StageGraph>,
    pub transitions: Vec<Transition>,
}

impl EdgeContractionSystem {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn stage0(&self) -> StageGraph {
        FiniteMultigraph::from_parts([self.root.clone()], []).expect("single vertex")
    }

    pub fn expansion(&self, n: usize) -> Result<Expansion> {
        if n > self.steps.len() {
            return Err(Error::Horizon {
                requested: n,
                available: self.steps.len(),
            });
        }
        let mut graphs = vec![self.stage0()];
        let mut transitions = Vec::with_capacity(n);
        for (i, step) in self.steps[..n].iter().enumerate() {
            let (g, t) = apply_step(&graphs[i], step, i + 1)?;
            graphs.push(g);
            transitions.push(t);
        }
        Ok(Expansion { graphs, transitions })
    }

    pub fn stage(&self, n: usize) -> Result<StageGraph> {
        Ok(self.expansion(n)?.graphs.pop().expect("stage 0 exists"))
    }

    /// Parses the module JSON system format.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: JsonSystem = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&JsonSystem::from(self)).expect("serialisable")
    }
}

/// Checks every stage up to `n`: contracting `en` reproduces stage `n - 1`
/// label for label, stage `n` is connected with edges exactly `e1..en`, at
/// most `n + 1` vertices and maximum degree at most `2n`, and deleting any
/// single edge leaves at most two components.
pub fn validate(sys: &EdgeContractionSystem, n: usize) -> Report {
    let mut r = Report::new("edge_contraction_system", 0, n);
    let exp = match sys.expansion(n) {
        Ok(e) => e,
        Err(e) => {
            r.fail(e.to_string());
            return r;
        }
    };
    for (k, g) in exp.graphs.iter().enumerate() {
        if !g.is_connected() {
            r.fail(format!("stage {k} is disconnected"));
        }
        if g.num_vertices() > k + 1 {
            r.fail(format!("stage {k} has {} vertices", g.num_vertices()));
        }
        let expected: BTreeSet<&Name> = sys.steps[..k].iter().map(|s| &s.edge).collect();
        let got: BTreeSet<&Name> = g.edge_labels().collect();
        if expected != got {
            r.fail(format!("stage {k} has edges {got:?}, expected {expected:?}"));
        }
        if g.max_degree() > 2 * k {
            r.fail(format!("stage {k} has maximum degree {} > {}", g.max_degree(), 2 * k));
        }
        for e in g.edge_labels() {
            let mut h = g.clone();
            h.remove_edge(e).expect("edge exists");
            if h.components().len() > 2 {
                r.fail(format!("deleting {e} from stage {k} leaves more than two components"));
            }
        }
        if k > 0 {
            match g.contract_edge(&sys.steps[k - 1].edge) {
                Ok((back, _)) if back == exp.graphs[k - 1] => {}
                Ok(_) => r.fail(format!("contracting {} in stage {k} does not give stage {}", sys.steps[k - 1].edge, k - 1)),
                Err(e) => r.fail(format!("stage {k}: {e}")),
            }
        }
    }
    r
}

/// The system whose stage `k` is `g` with all but the first `k` edges of
/// `order` contracted. Stage `|E|` is `g` itself, labels included.
pub fn from_finite_graph(g: &StageGraph, order: &[Name]) -> Result<EdgeContractionSystem> {
    let root = g
        .vertices()
        .first()
        .cloned()
        .ok_or_else(|| Error::Invalid("graph has no vertices".into()))?;
    if !g.is_connected() {
        let comps = g.components();
        return Err(Error::Disconnected {
            root: root.to_string(),
            unreached: comps[1].first().expect("non-empty").to_string(),
        });
    }
    let listed: BTreeSet<&Name> = order.iter().collect();
    let present: BTreeSet<&Name> = g.edge_labels().collect();
    if listed != present || order.len() != present.len() {
        return Err(Error::Invalid("edge order is not a permutation of the edges".into()));
    }
    let mut stages = vec![g.clone()];
    for e in order.iter().rev() {
        let (smaller, _) = stages.last().expect("non-empty").contract_edge(e)?;
        stages.push(smaller);
    }
    stages.reverse();
    let mut steps = Vec::with_capacity(order.len());
    for (k, e) in order.iter().enumerate() {
        let (before, after) = (&stages[k], &stages[k + 1]);
        let (a, b) = after.endpoints(e)?.clone();
        let kind = if a == b {
            StepKind::Loop { at: a }
        } else {
            // contract_edge keeps the smaller label, so `a` survives as `z`
            let z = a.clone();
            let mut assign = BTreeMap::new();
            for (f, (c0, c1)) in before.edges() {
                let (d0, d1) = after.endpoints(f)?.clone();
                let new = if c0 == &z && c1 == &z {
                    [d0, d1]
                } else if c0 == &z {
                    [if &d0 == c1 { d1 } else { d0 }, c1.clone()]
                } else if c1 == &z {
                    [c0.clone(), if &d0 == c0 { d1 } else { d0 }]
                } else {
                    continue;
                };
                for (slot, x) in new.into_iter().enumerate() {
                    if [c0, c1][slot] == &z {
                        assign.insert(Incidence::new(f.clone(), slot as u8), x);
                    }
                }
            }
            StepKind::Split {
                at: z,
                into: (a, b),
                assign,
            }
        };
        steps.push(UncontractionStep { edge: e.clone(), kind });
    }
    Ok(EdgeContractionSystem { root, steps })
}

#[derive(Serialize, Deserialize)]
struct JsonSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<String>,
    steps: Vec<JsonStep>,
}

#[derive(Serialize, Deserialize)]
struct JsonStep {
    edge: String,
    kind: String,
    at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    into: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    assign: BTreeMap<String, String>,
}

impl TryFrom<JsonSystem> for EdgeContractionSystem {
    type Error = Error;

    fn try_from(raw: JsonSystem) -> Result<Self> {
        let root = raw
            .root
            .or_else(|| raw.steps.first().map(|s| s.at.clone()))
            .unwrap_or_else(|| "0".to_string());
        let mut steps = Vec::with_capacity(raw.steps.len());
        for (i, s) in raw.steps.into_iter().enumerate() {
            let kind = match (s.kind.as_str(), s.into) {
                ("loop", None) if s.assign.is_empty() => StepKind::Loop { at: s.at.into() },
                ("split", Some([v, w])) => StepKind::Split {
                    at: s.at.into(),
                    into: (v.into(), w.into()),
                    assign: s
                        .assign
                        .into_iter()
                        .map(|(k, v)| Ok((k.parse()?, Name::from(v))))
                        .collect::<Result<_>>()?,
                },
                (kind, _) => {
                    return Err(malformed(i + 1, format!("step of kind `{kind}` has the wrong fields")));
                }
            };
            steps.push(UncontractionStep { edge: s.edge.into(), kind });
        }
        Ok(EdgeContractionSystem { root: root.into(), steps })
    }
}

impl From<&EdgeContractionSystem> for JsonSystem {
    fn from(sys: &EdgeContractionSystem) -> Self {
        JsonSystem {
            root: Some(sys.root.to_string()),
            steps: sys
                .steps
                .iter()
                .map(|s| match &s.kind {
                    StepKind::Loop { at } => JsonStep {
                        edge: s.edge.to_string(),
                        kind: "loop".into(),
                        at: at.to_string(),
                        into: None,
                        assign: BTreeMap::new(),
                    },
                    StepKind::Split { at, into, assign } => JsonStep {
                        edge: s.edge.to_string(),
                        kind: "split".into(),
                        at: at.to_string(),
                        into: Some([into.0.to_string(), into.1.to_string()]),
                        assign: assign.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
                    },
                })
                .collect(),
        }
    }
}
