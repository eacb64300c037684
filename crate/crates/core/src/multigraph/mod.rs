//! Finite multigraphs with loops and parallel edges.
//!
//! Vertices and edges carry opaque, totally ordered labels. Edge labels
//! survive every contraction unchanged, so equality of two stages can be
//! checked label for label instead of up to isomorphism.

mod io;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Debug, Display};

use crate::{Error, Result};

pub use io::{JsonEdge, JsonGraph};

/// Bound shared by every vertex or edge label.
pub trait Label: Ord + Clone + Debug {}

impl<T: Ord + Clone + Debug> Label for T {}

/// Label of an edge in a simple graph: the normalised endpoint pair.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Link<V> {
    pub lo: V,
    pub hi: V,
}

impl<V: Ord> Link<V> {
    pub fn new(a: V, b: V) -> Self {
        if a <= b {
            Link { lo: a, hi: b }
        } else {
            Link { lo: b, hi: a }
        }
    }
}

impl<V: Display> Display for Link<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}~{}", self.lo, self.hi)
    }
}

/// A finite multigraph. Endpoint pairs are stored sorted; a loop stores the
/// same vertex twice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteMultigraph<V, E> {
    vertices: BTreeSet<V>,
    edges: BTreeMap<E, (V, V)>,
}

/// Bookkeeping of a contraction: where every source vertex went and which
/// edges survived.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuotientMap<V, E> {
    pub block_of: BTreeMap<V, V>,
    pub kept_edges: BTreeSet<E>,
    /// Edges removed by the contraction. For [`FiniteMultigraph::contract_edge`]
    /// this is exactly the contracted edge.
    pub dropped_loops: BTreeSet<E>,
}

fn sorted<V: Ord>(a: V, b: V) -> (V, V) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<V: Label, E: Label> Default for FiniteMultigraph<V, E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: Label, E: Label> FiniteMultigraph<V, E> {
    pub fn new() -> Self {
        FiniteMultigraph {
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Builds a graph from vertex and edge lists, validating every endpoint.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = V>,
        edges: impl IntoIterator<Item = (E, V, V)>,
    ) -> Result<Self> {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (e, a, b) in edges {
            g.add_edge(e, a, b)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: V) -> Result<()> {
        if !self.vertices.insert(v.clone()) {
            return Err(Error::DuplicateVertex(format!("{v:?}")));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, e: E, a: V, b: V) -> Result<()> {
        for x in [&a, &b] {
            if !self.vertices.contains(x) {
                return Err(Error::UnknownVertex(format!("{x:?}")));
            }
        }
        if self.edges.contains_key(&e) {
            return Err(Error::DuplicateEdge(format!("{e:?}")));
        }
        self.edges.insert(e, sorted(a, b));
        Ok(())
    }

    pub fn remove_edge(&mut self, e: &E) -> Result<(V, V)> {
        self.edges
            .remove(e)
            .ok_or_else(|| Error::UnknownEdge(format!("{e:?}")))
    }

    pub fn vertices(&self) -> &BTreeSet<V> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&E, &(V, V))> {
        self.edges.iter()
    }

    pub fn edge_labels(&self) -> impl Iterator<Item = &E> {
        self.edges.keys()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &V) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, e: &E) -> bool {
        self.edges.contains_key(e)
    }

    pub fn endpoints(&self, e: &E) -> Result<&(V, V)> {
        self.edges
            .get(e)
            .ok_or_else(|| Error::UnknownEdge(format!("{e:?}")))
    }

    fn check_vertex(&self, v: &V) -> Result<()> {
        if self.vertices.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("{v:?}")))
        }
    }

    /// Number of edge-endpoint incidences at `v`; a loop counts twice.
    pub fn degree(&self, v: &V) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self
            .edges
            .values()
            .map(|(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum())
    }

    pub fn max_degree(&self) -> usize {
        let mut deg: BTreeMap<&V, usize> = BTreeMap::new();
        for (a, b) in self.edges.values() {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg.values().copied().max().unwrap_or(0)
    }

    /// Adjacency lists (with multiplicity, loops listed once per incidence).
    pub fn adjacency(&self) -> BTreeMap<&V, Vec<&V>> {
        let mut adj: BTreeMap<&V, Vec<&V>> = self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (a, b) in self.edges.values() {
            adj.get_mut(a).expect("endpoint").push(b);
            adj.get_mut(b).expect("endpoint").push(a);
        }
        adj
    }

    /// Connected components, each sorted, listed by their smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<V>> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&V> = BTreeSet::new();
        let mut out = Vec::new();
        for start in &self.vertices {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                comp.insert(v.clone());
                for &w in &adj[v] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Distance classes from `root`: layer `k` holds the vertices at
    /// distance exactly `k`.
    pub fn bfs_layers(&self, root: &V) -> Result<Vec<BTreeSet<V>>> {
        self.check_vertex(root)?;
        let adj = self.adjacency();
        let mut dist: BTreeMap<&V, usize> = BTreeMap::new();
        dist.insert(root, 0);
        let mut queue = VecDeque::from([root]);
        let mut layers: Vec<BTreeSet<V>> = Vec::new();
        while let Some(v) = queue.pop_front() {
            let d = dist[v];
            if layers.len() <= d {
                layers.push(BTreeSet::new());
            }
            layers[d].insert(v.clone());
            for &w in &adj[v] {
                if !dist.contains_key(w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
        if let Some(unreached) = self.vertices.iter().find(|v| !dist.contains_key(v)) {
            return Err(Error::Disconnected {
                root: format!("{root:?}"),
                unreached: format!("{unreached:?}"),
            });
        }
        Ok(layers)
    }

    /// The edges with one endpoint in `a` and the other in `b`.
    pub fn edge_cut(&self, a: &BTreeSet<V>, b: &BTreeSet<V>) -> Result<BTreeSet<E>> {
        if let Some(x) = a.intersection(b).next() {
            return Err(Error::Overlap(format!("{x:?}")));
        }
        for v in a.iter().chain(b) {
            self.check_vertex(v)?;
        }
        Ok(self
            .edges
            .iter()
            .filter(|(_, (x, y))| (a.contains(x) && b.contains(y)) || (a.contains(y) && b.contains(x)))
            .map(|(e, _)| e.clone())
            .collect())
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &BTreeSet<V>) -> Self {
        FiniteMultigraph {
            vertices: self.vertices.intersection(keep).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(_, (a, b))| keep.contains(a) && keep.contains(b))
                .map(|(e, ends)| (e.clone(), ends.clone()))
                .collect(),
        }
    }

    /// Quotient by a partition of the vertex set. Every block becomes one
    /// vertex named after its smallest member; edges inside a block are
    /// deleted, all other edges keep their labels (parallels included).
    pub fn contract_partition(&self, blocks: &[BTreeSet<V>]) -> Result<(Self, QuotientMap<V, E>)> {
        let mut block_of = BTreeMap::new();
        for block in blocks {
            let Some(rep) = block.first() else {
                return Err(Error::NotAPartition("empty block".into()));
            };
            for v in block {
                self.check_vertex(v).map_err(|_| Error::NotAPartition(format!("{v:?} is not a vertex")))?;
                if block_of.insert(v.clone(), rep.clone()).is_some() {
                    return Err(Error::NotAPartition(format!("{v:?} lies in two blocks")));
                }
            }
        }
        if let Some(v) = self.vertices.iter().find(|v| !block_of.contains_key(v)) {
            return Err(Error::NotAPartition(format!("{v:?} is not covered")));
        }
        let mut quotient = FiniteMultigraph {
            vertices: block_of.values().cloned().collect(),
            edges: BTreeMap::new(),
        };
        let mut kept_edges = BTreeSet::new();
        let mut dropped_loops = BTreeSet::new();
        for (e, (a, b)) in &self.edges {
            let (qa, qb) = (&block_of[a], &block_of[b]);
            if qa == qb {
                dropped_loops.insert(e.clone());
            } else {
                quotient.edges.insert(e.clone(), sorted(qa.clone(), qb.clone()));
                kept_edges.insert(e.clone());
            }
        }
        Ok((
            quotient,
            QuotientMap {
                block_of,
                kept_edges,
                dropped_loops,
            },
        ))
    }

    /// Contracts the single edge `e`: its endpoints are identified (under the
    /// smaller label), `e` disappears, and every other edge is kept, even
    /// when it becomes a loop.
    pub fn contract_edge(&self, e: &E) -> Result<(Self, QuotientMap<V, E>)> {
        let (a, b) = self.endpoints(e)?.clone();
        // a <= b by storage order, so a is the surviving label.
        let block_of: BTreeMap<V, V> = self
            .vertices
            .iter()
            .map(|v| (v.clone(), if *v == b { a.clone() } else { v.clone() }))
            .collect();
        let mut quotient = FiniteMultigraph {
            vertices: block_of.values().cloned().collect(),
            edges: BTreeMap::new(),
        };
        for (f, (x, y)) in &self.edges {
            if f != e {
                quotient
                    .edges
                    .insert(f.clone(), sorted(block_of[x].clone(), block_of[y].clone()));
            }
        }
        let kept_edges = quotient.edges.keys().cloned().collect();
        Ok((
            quotient,
            QuotientMap {
                block_of,
                kept_edges,
                dropped_loops: BTreeSet::from([e.clone()]),
            },
        ))
    }

    /// Relabels vertices through `f`, which must be injective.
    pub fn map_vertices<W: Label>(&self, mut f: impl FnMut(&V) -> W) -> Result<FiniteMultigraph<W, E>> {
        let image: BTreeMap<&V, W> = self.vertices.iter().map(|v| (v, f(v))).collect();
        let mut out = FiniteMultigraph::new();
        for w in image.values() {
            out.add_vertex(w.clone())?;
        }
        for (e, (a, b)) in &self.edges {
            out.add_edge(e.clone(), image[a].clone(), image[b].clone())?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type G = FiniteMultigraph<u32, &'static str>;

    fn path4() -> G {
        G::from_parts(0..4, [("a", 0, 1), ("b", 1, 2), ("c", 2, 3)]).unwrap()
    }

    fn set(xs: &[u32]) -> BTreeSet<u32> {
        xs.iter().copied().collect()
    }

    /// Reachability by repeated relaxation of an adjacency matrix.
    fn reach_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            r[a][b] = true;
            r[b][a] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    #[test]
    fn components_basic() {
        assert_eq!(path4().components(), vec![set(&[0, 1, 2, 3])]);
        let g = G::from_parts([0, 1], []).unwrap();
        assert_eq!(g.components(), vec![set(&[0]), set(&[1])]);
    }

    #[test]
    fn components_match_reachability_oracle() {
        // triangle 0,1,2 plus pendant 3 on 2, then strip vertex 2's edges
        let edges = [(0usize, 1usize), (3, 4), (4, 5)];
        let g = G::from_parts(0..6, [("x", 0, 1), ("y", 3, 4), ("z", 4, 5)]).unwrap();
        let r = reach_oracle(6, &edges);
        let comps = g.components();
        for i in 0..6u32 {
            for j in 0..6u32 {
                let same = comps.iter().any(|c| c.contains(&i) && c.contains(&j));
                assert_eq!(same, r[i as usize][j as usize], "{i} {j}");
            }
        }
        assert_eq!(comps.len(), 3);
    }

    #[test]
    fn bfs_layers_examples() {
        let p = G::from_parts(0..3, [("a", 0, 1), ("b", 1, 2)]).unwrap();
        assert_eq!(p.bfs_layers(&0).unwrap(), vec![set(&[0]), set(&[1]), set(&[2])]);

        let tree = G::from_parts(0..7, [("a", 0, 1), ("b", 0, 2), ("c", 1, 3), ("d", 1, 4), ("e", 2, 5), ("f", 2, 6)]).unwrap();
        let sizes: Vec<usize> = tree.bfs_layers(&0).unwrap().iter().map(BTreeSet::len).collect();
        assert_eq!(sizes, [1, 2, 4]);
    }

    #[test]
    fn bfs_layers_k4_against_distance_table() {
        let k4 = FiniteMultigraph::<u32, (u32, u32)>::from_parts(
            0..4,
            (0..4).flat_map(|a| (a + 1..4).map(move |b| ((a, b), a, b))),
        )
        .unwrap();
        // Floyd-Warshall distance table.
        let inf = u32::MAX / 2;
        let mut d = [[inf; 4]; 4];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for (_, (a, b)) in k4.edges() {
            d[*a as usize][*b as usize] = 1;
            d[*b as usize][*a as usize] = 1;
        }
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        for root in 0..4u32 {
            let layers = k4.bfs_layers(&root).unwrap();
            for (k, layer) in layers.iter().enumerate() {
                for v in layer {
                    assert_eq!(d[root as usize][*v as usize] as usize, k);
                }
            }
            assert_eq!(layers.len(), 2);
            assert_eq!(layers[1].len(), 3);
        }
    }

    #[test]
    fn bfs_layers_disconnected_names_vertex() {
        let g = G::from_parts([0, 1, 2], [("a", 0, 1)]).unwrap();
        match g.bfs_layers(&0) {
            Err(Error::Disconnected { unreached, .. }) => assert_eq!(unreached, "2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn edge_cut_cases() {
        let tree = G::from_parts(0..7, [("a", 0, 1), ("b", 0, 2), ("c", 1, 3), ("d", 1, 4), ("e", 2, 5), ("f", 2, 6)]).unwrap();
        assert_eq!(tree.edge_cut(&set(&[1, 2]), &set(&[3, 4, 5, 6])).unwrap().len(), 4);
        assert!(tree.edge_cut(&set(&[3]), &set(&[4])).unwrap().is_empty());
        assert!(matches!(tree.edge_cut(&set(&[1, 2]), &set(&[2])), Err(Error::Overlap(_))));
    }

    #[test]
    fn edge_cut_complete_join() {
        // K2 block {0,1} joined completely to K3 block {2,3,4}: n(n+1) = 6 for n = 2
        let mut edges = vec![((0, 1), 0, 1), ((2, 3), 2, 3), ((2, 4), 2, 4), ((3, 4), 3, 4)];
        for a in 0..2 {
            for b in 2..5 {
                edges.push(((a, b), a, b));
            }
        }
        let g = FiniteMultigraph::<u32, (u32, u32)>::from_parts(0..5, edges).unwrap();
        let brute = g
            .edges()
            .filter(|(_, (a, b))| (*a < 2) != (*b < 2))
            .count();
        let cut = g.edge_cut(&set(&[0, 1]), &set(&[2, 3, 4])).unwrap();
        assert_eq!(cut.len(), brute);
        assert_eq!(cut.len(), 6);
    }

    #[test]
    fn contract_partition_examples() {
        let (q, map) = path4().contract_partition(&[set(&[0]), set(&[1]), set(&[2, 3])]).unwrap();
        assert_eq!(q.vertices(), &set(&[0, 1, 2]));
        assert_eq!(q.num_edges(), 2);
        assert_eq!(map.dropped_loops, BTreeSet::from(["c"]));
        assert!(q.is_connected());

        let (q, map) = path4().contract_partition(&[set(&[0, 1, 2, 3])]).unwrap();
        assert_eq!(q.num_vertices(), 1);
        assert_eq!(q.num_edges(), 0);
        assert_eq!(map.dropped_loops.len(), 3);
    }

    #[test]
    fn contract_partition_rejects_bad_blocks() {
        let g = path4();
        assert!(matches!(g.contract_partition(&[set(&[0, 1])]), Err(Error::NotAPartition(_))));
        assert!(matches!(
            g.contract_partition(&[set(&[0, 1]), set(&[1, 2, 3])]),
            Err(Error::NotAPartition(_))
        ));
        assert!(matches!(
            g.contract_partition(&[set(&[0, 1, 2, 3, 9])]),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn contract_edge_examples() {
        // two parallel edges between v and w; contracting one leaves a loop
        let g = FiniteMultigraph::<&str, &str>::from_parts(["v", "w"], [("e1", "v", "w"), ("e2", "v", "w")]).unwrap();
        let (q, _) = g.contract_edge(&"e2").unwrap();
        assert_eq!(q.num_vertices(), 1);
        assert_eq!(q.endpoints(&"e1").unwrap(), &("v", "v"));
        assert_eq!(q.degree(&"v").unwrap(), 2);

        // contracting a loop only removes it
        let (q2, _) = q.contract_edge(&"e1").unwrap();
        assert_eq!(q2.num_vertices(), 1);
        assert_eq!(q2.num_edges(), 0);

        // triangle a,b,c with ab contracted: two vertices, two parallel edges
        let t = FiniteMultigraph::<&str, &str>::from_parts(["a", "b", "c"], [("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a")]).unwrap();
        let (q, _) = t.contract_edge(&"ab").unwrap();
        assert_eq!(q.num_vertices(), 2);
        assert_eq!(q.endpoints(&"bc").unwrap(), q.endpoints(&"ca").unwrap());

        assert!(matches!(t.contract_edge(&"zz"), Err(Error::UnknownEdge(_))));
    }

    #[test]
    fn degree_cases() {
        let g = FiniteMultigraph::<&str, &str>::from_parts(["z", "i"], [("l", "z", "z")]).unwrap();
        assert_eq!(g.degree(&"z").unwrap(), 2);
        assert_eq!(g.degree(&"i").unwrap(), 0);
        assert!(matches!(g.degree(&"q"), Err(Error::UnknownVertex(_))));
        let p = FiniteMultigraph::<&str, &str>::from_parts(["v", "w"], [("1", "v", "w"), ("2", "v", "w")]).unwrap();
        assert_eq!(p.degree(&"v").unwrap(), 2);
        assert_eq!(p.degree(&"w").unwrap(), 2);
    }

    fn arb_multigraph() -> impl Strategy<Value = FiniteMultigraph<u8, u8>> {
        (1u8..7).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..10).prop_map(move |es| {
                FiniteMultigraph::from_parts(0..n, es.into_iter().enumerate().map(|(i, (a, b))| (i as u8, a, b))).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn handshake(g in arb_multigraph()) {
            let total: usize = g.vertices().iter().map(|v| g.degree(v).unwrap()).sum();
            prop_assert_eq!(total, 2 * g.num_edges());
        }

        #[test]
        fn contract_edge_drops_exactly_one(g in arb_multigraph(), pick in any::<prop::sample::Index>()) {
            prop_assume!(g.num_edges() > 0);
            let e = *pick.get(&g.edge_labels().copied().collect::<Vec<_>>());
            let (q, _) = g.contract_edge(&e).unwrap();
            prop_assert_eq!(q.num_edges(), g.num_edges() - 1);
        }

        #[test]
        fn partition_counts_and_components(g in arb_multigraph()) {
            // blocks = connected pieces of a spanning sub-forest: every block connected in g
            let comps = g.components();
            let blocks: Vec<BTreeSet<u8>> = comps
                .iter()
                .flat_map(|c| {
                    let v: Vec<u8> = c.iter().copied().collect();
                    let sub = g.induced(c);
                    // split each component at its first vertex only if that keeps both parts connected
                    let rest: BTreeSet<u8> = v[1..].iter().copied().collect();
                    if !rest.is_empty() && sub.induced(&rest).is_connected() {
                        vec![BTreeSet::from([v[0]]), rest]
                    } else {
                        vec![c.clone()]
                    }
                })
                .collect();
            let (q, map) = g.contract_partition(&blocks).unwrap();
            prop_assert_eq!(q.num_edges() + map.dropped_loops.len(), g.num_edges());
            prop_assert_eq!(q.components().len(), comps.len());
            for (e, (a, b)) in g.edges() {
                prop_assert_eq!(map.kept_edges.contains(e), map.block_of[a] != map.block_of[b]);
            }
        }
    }
}
