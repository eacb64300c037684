//! Named locally finite graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use super::LazyGraph;
use crate::blowup::{BlowupParams, BlowupVertex, Profile, TreeAddr};
use crate::multigraph::JsonGraph;
use crate::{Error, Name, Result};

/// Names accepted by [`with_graph!`](crate::with_graph), besides `file:<path>`.
pub const GRAPH_NAMES: &[&str] = &[
    "ray",
    "double_ray",
    "binary_tree",
    "quadrant_grid",
    "ladder",
    "stacked_cliques",
    "blowup_lf",
    "blowup_gl",
    "star3",
    "single_vertex",
];

pub fn unknown_graph(name: &str) -> Error {
    Error::Invalid(format!(
        "unknown graph `{name}`; available: {}, file:<path.json>",
        GRAPH_NAMES.join(", ")
    ))
}

/// Binds `$g` to the named builder and evaluates `$body`, yielding
/// `Result<_, Error>`.
#[macro_export]
macro_rules! with_graph {
    ($name:expr, |$g:ident| $body:expr) => {{
        use $crate::locally_finite::builders as __b;
        let __name: &str = $name;
        match __name {
            "ray" => { let $g = __b::Ray; Ok($body) }
            "double_ray" => { let $g = __b::DoubleRay; Ok($body) }
            "binary_tree" => { let $g = __b::BinaryTree; Ok($body) }
            "quadrant_grid" => { let $g = __b::QuadrantGrid; Ok($body) }
            "ladder" => { let $g = __b::Ladder; Ok($body) }
            "stacked_cliques" => { let $g = __b::StackedCliques; Ok($body) }
            "blowup_lf" => { let $g = __b::Blowup::lf(); Ok($body) }
            "blowup_gl" => { let $g = __b::Blowup::gl(); Ok($body) }
            "star3" => { let $g = __b::FiniteGraph::star3(); Ok($body) }
            "single_vertex" => { let $g = __b::FiniteGraph::single_vertex(); Ok($body) }
            other => match other.strip_prefix("file:") {
                Some(path) => match __b::FiniteGraph::load(path) {
                    Ok($g) => Ok($body),
                    Err(e) => Err(e),
                },
                None => Err(__b::unknown_graph(other)),
            },
        }
    }};
}

pub struct Ray;

impl LazyGraph for Ray {
    type Vertex = u64;

    fn root(&self) -> u64 {
        0
    }

    fn neighbors(&self, v: &u64) -> Vec<u64> {
        match *v {
            0 => vec![1],
            k => vec![k - 1, k + 1],
        }
    }

    fn oracle_ends(&self, stages: usize) -> Vec<Vec<u64>> {
        vec![(0..=stages as u64).collect()]
    }
}

pub struct DoubleRay;

impl LazyGraph for DoubleRay {
    type Vertex = i64;

    fn root(&self) -> i64 {
        0
    }

    fn neighbors(&self, v: &i64) -> Vec<i64> {
        vec![v - 1, v + 1]
    }

    fn oracle_ends(&self, stages: usize) -> Vec<Vec<i64>> {
        let s = stages as i64;
        vec![(0..=s).map(|k| -k).collect(), (0..=s).collect()]
    }
}

pub struct BinaryTree;

fn words(len: usize) -> impl Iterator<Item = TreeAddr> {
    (0u64..1 << len).map(move |w| TreeAddr::from_bits((0..len).map(|i| w >> (len - 1 - i) & 1 == 1)))
}

impl LazyGraph for BinaryTree {
    type Vertex = TreeAddr;

    fn root(&self) -> TreeAddr {
        TreeAddr::root()
    }

    fn neighbors(&self, v: &TreeAddr) -> Vec<TreeAddr> {
        let mut out: Vec<TreeAddr> = v.parent().into_iter().collect();
        out.extend([v.child(false), v.child(true)]);
        out
    }

    fn oracle_ends(&self, stages: usize) -> Vec<Vec<TreeAddr>> {
        words(stages)
            .map(|w| (0..=stages).map(|k| w.prefix(k)).collect())
            .collect()
    }
}

/// A lattice point of the quadrant `ℕ × ℕ`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GridPoint(pub u32, pub u32);

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

pub struct QuadrantGrid;

impl LazyGraph for QuadrantGrid {
    type Vertex = GridPoint;

    fn root(&self) -> GridPoint {
        GridPoint(0, 0)
    }

    fn neighbors(&self, v: &GridPoint) -> Vec<GridPoint> {
        let GridPoint(i, j) = *v;
        let mut out = Vec::with_capacity(4);
        if i > 0 {
            out.push(GridPoint(i - 1, j));
        }
        if j > 0 {
            out.push(GridPoint(i, j - 1));
        }
        out.extend([GridPoint(i + 1, j), GridPoint(i, j + 1)]);
        out
    }

    fn oracle_ends(&self, stages: usize) -> Vec<Vec<GridPoint>> {
        let s = stages as u32;
        vec![(0..=s).map(|k| GridPoint(k - k / 2, k / 2)).collect()]
    }
}

/// Vertex of the one-sided ladder `ℕ × K_2`; `side` false is rail `a`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rung {
    pub side: bool,
    pub pos: u32,
}

impl fmt::Display for Rung {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.side { 'b' } else { 'a' }, self.pos)
    }
}

pub struct Ladder;

impl LazyGraph for Ladder {
    type Vertex = Rung;

    fn root(&self) -> Rung {
        Rung { side: false, pos: 0 }
    }

    fn neighbors(&self, v: &Rung) -> Vec<Rung> {
        let mut out = vec![Rung { side: !v.side, pos: v.pos }];
        if v.pos > 0 {
            out.push(Rung { pos: v.pos - 1, ..*v });
        }
        out.push(Rung { pos: v.pos + 1, ..*v });
        out
    }

    fn oracle_ends(&self, stages: usize) -> Vec<Vec<Rung>> {
        vec![(0..=stages as u32).map(|pos| Rung { side: false, pos }).collect()]
    }
}

/// Vertex `index` of the clique `K_block` in the stacked cliques graph.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CliqueVertex {
    pub block: u32,
    pub index: u32,
}

impl fmt::Display for CliqueVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}:{}", self.block, self.index)
    }
}

impl CliqueVertex {
    pub fn is_valid(&self) -> bool {
        self.block >= 1 && self.index < self.block
    }
}

/// Adjacency in the stacked cliques graph: inside `K_m`, or between
/// consecutive cliques.
pub fn cliques_adjacent(a: &CliqueVertex, b: &CliqueVertex) -> bool {
    a.is_valid() && b.is_valid() && a != b && a.block.abs_diff(b.block) <= 1
}

/// Disjoint cliques `K_1, K_2, ...` with every vertex of `K_m` joined to
/// every vertex of `K_{m+1}`.
pub struct StackedCliques;

impl LazyGraph for StackedCliques {
    type Vertex = CliqueVertex;

    fn root(&self) -> CliqueVertex {
        CliqueVertex { block: 1, index: 0 }
    }

    fn neighbors(&self, v: &CliqueVertex) -> Vec<CliqueVertex> {
        let lo = v.block.saturating_sub(1).max(1);
        (lo..=v.block + 1)
            .flat_map(|block| (0..block).map(move |index| CliqueVertex { block, index }))
            .filter(|u| u != v)
            .collect()
    }

    fn oracle_ends(&self, stages: usize) -> Vec<Vec<CliqueVertex>> {
        vec![(0..=stages as u32)
            .map(|k| CliqueVertex { block: k + 1, index: 0 })
            .collect()]
    }
}

/// A tree blowup viewed as a lazy graph.
pub struct Blowup {
    pub params: BlowupParams,
}

impl Blowup {
    pub fn lf() -> Self {
        Blowup {
            params: BlowupParams::new(Profile::Lf),
        }
    }

    pub fn gl() -> Self {
        Blowup {
            params: BlowupParams::new(Profile::Gl),
        }
    }
}

impl LazyGraph for Blowup {
    type Vertex = BlowupVertex;

    fn root(&self) -> BlowupVertex {
        BlowupVertex::new(TreeAddr::root(), 0)
    }

    fn neighbors(&self, v: &BlowupVertex) -> Vec<BlowupVertex> {
        let block = |t: TreeAddr| {
            let size = self.params.block_size(t.level());
            (0..size).map(move |i| BlowupVertex::new(t.clone(), i))
        };
        let mut out: Vec<BlowupVertex> = block(v.addr.clone()).filter(|u| u != v).collect();
        if let Some(p) = v.addr.parent() {
            out.extend(block(p));
        }
        out.extend(block(v.addr.child(false)));
        out.extend(block(v.addr.child(true)));
        out
    }

    fn oracle_ends(&self, stages: usize) -> Vec<Vec<BlowupVertex>> {
        words(stages)
            .map(|w| (0..=stages).map(|k| BlowupVertex::new(w.prefix(k), 0)).collect())
            .collect()
    }
}

/// A finite connected simple graph with `Name` labels.
#[derive(Clone, Debug)]
pub struct FiniteGraph {
    root: Name,
    adj: BTreeMap<Name, Vec<Name>>,
}

impl FiniteGraph {
    pub fn new(root: Name, edges: &[(Name, Name)], isolated: &[Name]) -> Result<Self> {
        let mut adj: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        adj.entry(root.clone()).or_default();
        for v in isolated {
            adj.entry(v.clone()).or_default();
        }
        for (a, b) in edges {
            if a == b {
                return Err(Error::Invalid(format!("loop at `{a}` in a simple graph")));
            }
            if !adj.entry(a.clone()).or_default().insert(b.clone()) {
                return Err(Error::Invalid(format!("parallel edges between `{a}` and `{b}`")));
            }
            adj.entry(b.clone()).or_default().insert(a.clone());
        }
        let g = FiniteGraph {
            root,
            adj: adj.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect(),
        };
        let mut seen = BTreeSet::from([&g.root]);
        let mut stack = vec![&g.root];
        while let Some(v) = stack.pop() {
            for u in &g.adj[v] {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        if let Some(u) = g.adj.keys().find(|u| !seen.contains(u)) {
            return Err(Error::Disconnected {
                root: g.root.to_string(),
                unreached: u.to_string(),
            });
        }
        Ok(g)
    }

    pub fn star3() -> Self {
        let e = |b: &str| (Name::from("c"), Name::from(b));
        FiniteGraph::new("c".into(), &[e("x"), e("y"), e("z")], &[]).expect("valid")
    }

    pub fn single_vertex() -> Self {
        FiniteGraph::new("v".into(), &[], &[]).expect("valid")
    }

    /// Simple graph from module JSON; the root is the smallest vertex.
    pub fn from_json(j: &JsonGraph) -> Result<Self> {
        let g = j.to_graph()?;
        let root = g
            .vertices()
            .first()
            .cloned()
            .ok_or_else(|| Error::Invalid("graph has no vertices".into()))?;
        let edges: Vec<(Name, Name)> = g.edges().map(|(_, (a, b))| (a.clone(), b.clone())).collect();
        let isolated: Vec<Name> = g.vertices().iter().cloned().collect();
        FiniteGraph::new(root, &edges, &isolated)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&JsonGraph::parse(&text)?)
    }
}

impl LazyGraph for FiniteGraph {
    type Vertex = Name;

    fn root(&self) -> Name {
        self.root.clone()
    }

    fn neighbors(&self, v: &Name) -> Vec<Name> {
        self.adj.get(v).cloned().unwrap_or_default()
    }

    fn is_finite(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::super::{prefix, Explorer};
    use super::*;

    fn symmetric<G: LazyGraph>(g: &G, depth: usize) {
        // horizon() rejects asymmetric or repeating lists
        Explorer::new(g).horizon(depth).unwrap();
    }

    impl<G: LazyGraph> LazyGraph for &G {
        type Vertex = G::Vertex;
        fn root(&self) -> G::Vertex {
            (**self).root()
        }
        fn neighbors(&self, v: &G::Vertex) -> Vec<G::Vertex> {
            (**self).neighbors(v)
        }
    }

    #[test]
    fn builders_are_symmetric() {
        symmetric(&Ray, 5);
        symmetric(&DoubleRay, 5);
        symmetric(&BinaryTree, 5);
        symmetric(&QuadrantGrid, 5);
        symmetric(&Ladder, 5);
        symmetric(&StackedCliques, 5);
        symmetric(&Blowup::lf(), 3);
        symmetric(&Blowup::gl(), 3);
        symmetric(&FiniteGraph::star3(), 3);
    }

    #[test]
    fn oracle_rays_are_geodesic() {
        fn check<G: LazyGraph>(g: G, stages: usize, count: usize) {
            let rays = g.oracle_ends(stages);
            assert_eq!(rays.len(), count);
            let h = Explorer::new(g).horizon(stages).unwrap();
            for ray in rays {
                assert_eq!(ray.len(), stages + 1);
                for (k, v) in ray.iter().enumerate() {
                    assert_eq!(h.dist[v], k, "{v}");
                }
            }
        }
        check(Ray, 4, 1);
        check(DoubleRay, 4, 2);
        check(BinaryTree, 4, 16);
        check(QuadrantGrid, 4, 1);
        check(Ladder, 4, 1);
        check(StackedCliques, 4, 1);
        check(Blowup::lf(), 3, 8);
    }

    #[test]
    fn stacked_cliques_layers_are_the_cliques() {
        let p = prefix(&Explorer::new(StackedCliques), 4).unwrap();
        for (k, layer) in p.layers.iter().enumerate() {
            assert_eq!(layer.len(), k + 1);
            assert!(layer.iter().all(|v| v.block as usize == k + 1));
        }
    }

    #[test]
    fn finite_graph_rejects_bad_input() {
        let n = |s: &str| Name::from(s);
        assert!(FiniteGraph::new(n("a"), &[(n("a"), n("a"))], &[]).is_err());
        assert!(FiniteGraph::new(n("a"), &[(n("a"), n("b")), (n("b"), n("a"))], &[]).is_err());
        assert!(matches!(
            FiniteGraph::new(n("a"), &[(n("b"), n("c"))], &[]),
            Err(Error::Disconnected { .. })
        ));
    }

    #[test]
    fn catalog_dispatch() {
        let sizes: Vec<usize> = GRAPH_NAMES
            .iter()
            .map(|name| crate::with_graph!(name, |g| Explorer::new(g).horizon(1).unwrap().layers[1].len()).unwrap())
            .collect();
        assert_eq!(sizes, [1, 2, 2, 2, 2, 2, 4, 6, 3, 0]);
        let err = crate::with_graph!("moebius", |g| Explorer::new(g).root().to_string()).unwrap_err();
        assert!(err.to_string().contains("binary_tree"));
    }
}
