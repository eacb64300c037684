//! Locally finite connected graphs explored lazily by distance class, and
//! their truncation inverse system.
//!
//! Stage `n` of the inverse system keeps `S_n = D^{<n}` (the vertices at
//! distance less than `n` from the root) and contracts every component of
//! `G - S_n` to a dummy vertex. A component is only ever seen through a
//! finite horizon; its membership on `D^n ∪ D^{n+1}` is computed from
//! `G[D^n ∪ D^{n+1}]` and cross-checked against the deeper horizon
//! `G[D^n ∪ D^{n+1} ∪ D^{n+2}]`. Disagreement is reported as
//! [`Error::HorizonUnstable`] rather than silently accepted.

pub mod builders;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use crate::limits;
use crate::multigraph::{FiniteMultigraph, Link};
use crate::verify::Report;
use crate::{Error, Result};

/// Bound on vertex labels of lazily explored graphs.
pub trait Vertex: Ord + Clone + Hash + Debug + Display + Send + Sync {}

impl<T: Ord + Clone + Hash + Debug + Display + Send + Sync> Vertex for T {}

/// A locally finite connected simple graph given by a root and a neighbour
/// function.
pub trait LazyGraph: Send + Sync {
    type Vertex: Vertex;

    fn root(&self) -> Self::Vertex;

    /// Finite neighbour list of `v`. Must be symmetric and loop-free.
    fn neighbors(&self, v: &Self::Vertex) -> Vec<Self::Vertex>;

    /// Geodesic rays from the root (`ray[k]` at distance `k`, `stages + 1`
    /// entries each) representing pairwise distinct ends that are already
    /// separated by stage `stages`. Empty when the ends are not enumerable.
    fn oracle_ends(&self, _stages: usize) -> Vec<Vec<Self::Vertex>> {
        Vec::new()
    }

    /// Whether exploration terminates. Finite graphs are explored in full
    /// when components are computed, so no horizon heuristic is needed.
    fn is_finite(&self) -> bool {
        false
    }
}

/// Simple-graph edge between lazily explored vertices.
pub type SimpleEdge<V> = Link<V>;

/// Finite graph over explored vertices.
pub type ExploredGraph<V> = FiniteMultigraph<V, SimpleEdge<V>>;

/// Memoising wrapper around a [`LazyGraph`]. Neighbour lists are cached
/// behind a lock, so one explorer can serve concurrent queries.
pub struct Explorer<G: LazyGraph> {
    graph: G,
    cache: RwLock<HashMap<G::Vertex, Arc<Vec<G::Vertex>>>>,
}

impl<G: LazyGraph> Explorer<G> {
    pub fn new(graph: G) -> Self {
        Explorer {
            graph,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn graph(&self) -> &G {
        &self.graph
    }

    pub fn root(&self) -> G::Vertex {
        self.graph.root()
    }

    pub fn cached_vertices(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn neighbors(&self, v: &G::Vertex) -> Result<Arc<Vec<G::Vertex>>> {
        if let Some(list) = self.cache.read().expect("cache lock").get(v) {
            return Ok(Arc::clone(list));
        }
        let list = Arc::new(self.graph.neighbors(v));
        let mut cache = self.cache.write().expect("cache lock");
        limits::check_vertices(cache.len() + 1)?;
        Ok(Arc::clone(cache.entry(v.clone()).or_insert(list)))
    }

    /// Explores the distance classes `D^0..=D^{depth+1}` and the neighbour
    /// lists of every vertex at distance at most `depth`.
    pub fn horizon(&self, depth: usize) -> Result<Horizon<G::Vertex>> {
        let root = self.root();
        let mut dist = BTreeMap::from([(root.clone(), 0usize)]);
        let mut layers = vec![BTreeSet::from([root])];
        let mut adj = BTreeMap::new();
        for k in 0..=depth {
            let mut next = BTreeSet::new();
            for v in &layers[k] {
                let list = self.neighbors(v)?;
                let mut seen = BTreeSet::new();
                for u in list.iter() {
                    if u == v || !seen.insert(u) {
                        return Err(Error::Invalid(format!(
                            "neighbour list of `{v}` repeats `{u}` or contains a loop"
                        )));
                    }
                    if !dist.contains_key(u) {
                        dist.insert(u.clone(), k + 1);
                        next.insert(u.clone());
                    }
                }
                adj.insert(v.clone(), list);
            }
            limits::check_vertices(dist.len())?;
            layers.push(next);
        }
        for (v, list) in &adj {
            for u in list.iter() {
                if let Some(back) = adj.get(u) {
                    if !back.contains(v) {
                        return Err(Error::Asymmetric(v.to_string(), u.to_string()));
                    }
                }
            }
        }
        Ok(Horizon {
            depth,
            layers,
            dist,
            adj,
        })
    }
}

/// The explored part of a lazy graph: distance classes up to `depth + 1`
/// and neighbour lists up to `depth`.
#[derive(Clone, Debug)]
pub struct Horizon<V> {
    pub depth: usize,
    pub layers: Vec<BTreeSet<V>>,
    pub dist: BTreeMap<V, usize>,
    adj: BTreeMap<V, Arc<Vec<V>>>,
}

impl<V: Vertex> Horizon<V> {
    pub fn layer(&self, k: usize) -> &BTreeSet<V> {
        &self.layers[k]
    }

    pub fn neighbors(&self, v: &V) -> &[V] {
        self.adj.get(v).map(|l| l.as_slice()).unwrap_or(&[])
    }

    /// `G[D^lo ∪ ... ∪ D^hi]`; requires `hi <= depth`.
    pub fn induced(&self, lo: usize, hi: usize) -> ExploredGraph<V> {
        assert!(hi <= self.depth, "layer {hi} is beyond the explored depth {}", self.depth);
        let mut g = FiniteMultigraph::new();
        for layer in &self.layers[lo..=hi] {
            for v in layer {
                g.add_vertex(v.clone()).expect("layers are disjoint");
            }
        }
        for layer in &self.layers[lo..=hi] {
            for v in layer {
                for u in self.neighbors(v) {
                    if v < u && (lo..=hi).contains(&self.dist[u]) {
                        g.add_edge(Link::new(v.clone(), u.clone()), v.clone(), u.clone())
                            .expect("simple graph");
                    }
                }
            }
        }
        g
    }

    /// `E(D^k, D^{k+1})` as `(x, y)` pairs with `x ∈ D^k`, sorted.
    pub fn cut(&self, k: usize) -> Vec<(V, V)> {
        assert!(k <= self.depth);
        let mut out: Vec<(V, V)> = self.layers[k]
            .iter()
            .flat_map(|x| {
                self.neighbors(x)
                    .iter()
                    .filter(|y| self.dist[*y] == k + 1)
                    .map(move |y| (x.clone(), y.clone()))
            })
            .collect();
        out.sort();
        out
    }
}

/// The induced graph on `D^{≤depth}` together with the cached look-ahead
/// layer and its edge cut.
#[derive(Clone, Debug)]
pub struct GraphPrefix<V> {
    pub depth: usize,
    pub layers: Vec<BTreeSet<V>>,
    pub graph: ExploredGraph<V>,
    pub lookahead: BTreeSet<V>,
    pub frontier_cut: Vec<(V, V)>,
}

pub fn prefix<G: LazyGraph>(ex: &Explorer<G>, n: usize) -> Result<GraphPrefix<G::Vertex>> {
    let h = ex.horizon(n)?;
    Ok(GraphPrefix {
        depth: n,
        layers: h.layers[..=n].to_vec(),
        graph: h.induced(0, n),
        lookahead: h.layers[n + 1].clone(),
        frontier_cut: h.cut(n),
    })
}

/// Partition of `D^k` by the components of `G - D^{<k}`.
#[derive(Clone, Debug)]
pub struct Pieces<V> {
    pub stage: usize,
    /// Pieces sorted by their smallest vertex.
    pub pieces: Vec<BTreeSet<V>>,
    /// Piece index of every vertex in `D^k ∪ D^{k+1}`.
    pub member_of: BTreeMap<V, usize>,
    pub horizon: Horizon<V>,
}

/// Horizon of a finite graph deep enough that its outermost layer is empty.
fn exhaust<G: LazyGraph>(ex: &Explorer<G>, min_depth: usize) -> Result<Horizon<G::Vertex>> {
    let mut depth = min_depth.max(1);
    loop {
        let h = ex.horizon(depth)?;
        if h.layers.last().is_some_and(BTreeSet::is_empty) {
            return Ok(h);
        }
        depth *= 2;
    }
}

pub fn pieces<G: LazyGraph>(ex: &Explorer<G>, k: usize) -> Result<Pieces<G::Vertex>> {
    let horizon = ex.horizon(k + 2)?;
    let mut near = horizon.induced(k, k + 1).components();
    if ex.graph().is_finite() {
        // exact: merge near components along the whole remaining graph
        let full = exhaust(ex, k + 2)?;
        let depth = full.depth;
        let far = full.induced(k, depth).components();
        near = far
            .into_iter()
            .map(|c| c.into_iter().filter(|v| horizon.dist.get(v).is_some_and(|&d| d <= k + 1)).collect())
            .filter(|c: &BTreeSet<G::Vertex>| !c.is_empty())
            .collect();
    } else {
        let far = horizon.induced(k, k + 2).components();
        let far_of: BTreeMap<&G::Vertex, usize> = far
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |v| (v, i)))
            .collect();

        // near components refine far ones; stability means the refinement is trivial
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, comp) in near.iter().enumerate() {
            let rep = comp.first().expect("components are non-empty");
            if owner.insert(far_of[rep], i).is_some() {
                return Err(Error::HorizonUnstable {
                    stage: k,
                    vertex: rep.to_string(),
                });
            }
        }
    }

    let layer = horizon.layer(k);
    let mut with_piece: Vec<(BTreeSet<G::Vertex>, &BTreeSet<G::Vertex>)> = near
        .iter()
        .map(|c| (c.intersection(layer).cloned().collect::<BTreeSet<_>>(), c))
        .collect();
    if let Some((_, c)) = with_piece.iter().find(|(p, _)| p.is_empty()) {
        // every component of G - D^{<k} has a vertex at distance exactly k
        return Err(Error::HorizonUnstable {
            stage: k,
            vertex: c.first().expect("non-empty").to_string(),
        });
    }
    with_piece.sort_by(|a, b| a.0.first().cmp(&b.0.first()));
    let mut member_of = BTreeMap::new();
    for (i, (_, comp)) in with_piece.iter().enumerate() {
        for v in comp.iter() {
            member_of.insert(v.clone(), i);
        }
    }
    Ok(Pieces {
        stage: k,
        pieces: with_piece.into_iter().map(|(p, _)| p).collect(),
        member_of,
        horizon,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierPiece<V> {
    pub vertices: BTreeSet<V>,
    /// Index of the unique stage-`n` piece this piece has neighbours in.
    pub parent: usize,
}

/// Pieces `C ∩ D^{n+1}` for the components `C` of `G - D^{≤n}`, each with
/// its parent piece in `D^n`.
#[derive(Clone, Debug)]
pub struct FrontierDecomposition<V> {
    pub stage: usize,
    pub pieces: Vec<FrontierPiece<V>>,
}

pub fn frontier<G: LazyGraph>(ex: &Explorer<G>, n: usize) -> Result<FrontierDecomposition<G::Vertex>> {
    let below = pieces(ex, n)?;
    let above = pieces(ex, n + 1)?;
    let h = &above.horizon;
    let mut out = Vec::with_capacity(above.pieces.len());
    for piece in &above.pieces {
        let mut parents = BTreeSet::new();
        for v in piece {
            for u in h.neighbors(v) {
                if h.dist[u] == n {
                    parents.insert(below.member_of[u]);
                }
            }
        }
        let rep = piece.first().expect("non-empty piece");
        let parent = match (parents.len(), parents.first()) {
            (1, Some(&p)) => p,
            _ => {
                return Err(Error::Invalid(format!(
                    "piece containing `{rep}` has neighbours in {} stage-{n} pieces",
                    parents.len()
                )))
            }
        };
        if below.member_of.get(rep) != Some(&parent) {
            return Err(Error::HorizonUnstable {
                stage: n,
                vertex: rep.to_string(),
            });
        }
        out.push(FrontierPiece {
            vertices: piece.clone(),
            parent,
        });
    }
    Ok(FrontierDecomposition {
        stage: n + 1,
        pieces: out,
    })
}

/// Stage `n` of the truncation inverse system.
#[derive(Clone, Debug)]
pub struct Truncation<V> {
    pub stage: usize,
    pub graph: ExploredGraph<V>,
    /// Dummy vertex → explored members of the component it stands for.
    pub dummies: BTreeMap<V, BTreeSet<V>>,
    /// Image of every explored vertex (`D^{≤n+1}`).
    pub projection: BTreeMap<V, V>,
}

impl<V: Vertex> Truncation<V> {
    pub fn is_dummy(&self, v: &V) -> bool {
        self.dummies.contains_key(v)
    }

    pub fn real_vertices(&self) -> impl Iterator<Item = &V> {
        self.graph.vertices().iter().filter(|v| !self.is_dummy(v))
    }

    /// Module JSON format with the `dummies` annotation.
    pub fn to_json(&self) -> crate::multigraph::JsonGraph {
        let mut j = self.graph.to_json();
        j.dummies = Some(self.dummies.keys().map(ToString::to_string).collect());
        j
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.graph
            .to_dot_with(name, |v| self.is_dummy(v).then(|| "shape=box".to_string()), |_| None)
    }
}

/// Contracts every component of `G - D^{<n}` to a dummy named after its
/// smallest vertex in `D^n`, deleting new loops and keeping parallel edges.
pub fn truncation<G: LazyGraph>(ex: &Explorer<G>, n: usize) -> Result<Truncation<G::Vertex>> {
    let p = pieces(ex, n)?;
    let h = &p.horizon;
    let mut blocks: Vec<BTreeSet<G::Vertex>> = h.layers[..n]
        .iter()
        .flatten()
        .map(|v| BTreeSet::from([v.clone()]))
        .collect();
    blocks.extend(p.pieces.iter().cloned());
    let (graph, _) = h.induced(0, n).contract_partition(&blocks)?;

    let labels: Vec<G::Vertex> = p
        .pieces
        .iter()
        .map(|piece| piece.first().expect("non-empty").clone())
        .collect();
    let mut dummies: BTreeMap<G::Vertex, BTreeSet<G::Vertex>> =
        labels.iter().map(|l| (l.clone(), BTreeSet::new())).collect();
    let mut projection = BTreeMap::new();
    for v in h.layers[..n].iter().flatten() {
        projection.insert(v.clone(), v.clone());
    }
    for (v, &i) in &p.member_of {
        dummies.get_mut(&labels[i]).expect("label").insert(v.clone());
        projection.insert(v.clone(), labels[i].clone());
    }
    Ok(Truncation {
        stage: n,
        graph,
        dummies,
        projection,
    })
}

/// Image of an edge under a bonding map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeImage<V> {
    Edge(SimpleEdge<V>),
    Vertex(V),
}

/// The bonding map `G_{n+1} → G_n`.
#[derive(Clone, Debug)]
pub struct Bonding<V> {
    pub stage: usize,
    pub vertex_map: BTreeMap<V, V>,
    pub edge_map: BTreeMap<SimpleEdge<V>, EdgeImage<V>>,
}

/// Builds `f_n : G_{n+1} → G_n` from the two truncations.
pub fn bonding_between<V: Vertex>(upper: &Truncation<V>, lower: &Truncation<V>) -> Result<Bonding<V>> {
    let mut vertex_map = BTreeMap::new();
    for v in upper.graph.vertices() {
        // real vertices and dummy labels both lie in D^{≤n+1}, which the
        // lower projection covers
        let image = lower
            .projection
            .get(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        vertex_map.insert(v.clone(), image.clone());
    }
    let mut edge_map = BTreeMap::new();
    for (e, (a, _)) in upper.graph.edges() {
        let image = if lower.graph.has_edge(e) {
            EdgeImage::Edge(e.clone())
        } else {
            EdgeImage::Vertex(vertex_map[a].clone())
        };
        edge_map.insert(e.clone(), image);
    }
    Ok(Bonding {
        stage: lower.stage,
        vertex_map,
        edge_map,
    })
}

pub fn bonding<G: LazyGraph>(ex: &Explorer<G>, n: usize) -> Result<Bonding<G::Vertex>> {
    bonding_between(&truncation(ex, n + 1)?, &truncation(ex, n)?)
}

/// Checks that `map` is a surjective graph map `upper → lower` that is the
/// identity on `S_n` and on the edges of `lower`, and that sends every dummy
/// into the dummy whose component contains it.
pub fn check_bonding<V: Vertex>(upper: &Truncation<V>, lower: &Truncation<V>, map: &Bonding<V>) -> Report {
    let mut r = Report::new("bonding", lower.stage, upper.stage);
    for v in upper.graph.vertices() {
        let Some(img) = map.vertex_map.get(v) else {
            r.fail(format!("vertex {v} of stage {} has no image", upper.stage));
            continue;
        };
        if !lower.graph.has_vertex(img) {
            r.fail(format!("{v} maps to {img}, which is not a vertex of stage {}", lower.stage));
            continue;
        }
        if !lower.is_dummy(v) && lower.graph.has_vertex(v) && img != v {
            r.fail(format!("real vertex {v} is not fixed (maps to {img})"));
        }
        if let Some(members) = upper.dummies.get(v) {
            let Some(target) = lower.dummies.get(img) else {
                r.fail(format!("dummy {v} maps to real vertex {img}"));
                continue;
            };
            if let Some(stray) = members
                .iter()
                .find(|m| lower.projection.contains_key(*m) && !target.contains(*m))
            {
                r.fail(format!("dummy {v} contains {stray}, which lies outside the block of {img}"));
            }
        }
    }
    let hit: BTreeSet<&V> = map.vertex_map.values().collect();
    for v in lower.graph.vertices() {
        if !hit.contains(v) {
            r.fail(format!("vertex {v} of stage {} is not hit", lower.stage));
        }
    }
    for (e, (a, b)) in upper.graph.edges() {
        let (Some(ia), Some(ib)) = (map.vertex_map.get(a), map.vertex_map.get(b)) else {
            continue;
        };
        match map.edge_map.get(e) {
            None => r.fail(format!("edge {e} has no image")),
            Some(EdgeImage::Edge(f)) => match lower.graph.endpoints(f) {
                Ok((x, y)) => {
                    let (ia, ib) = if ia <= ib { (ia, ib) } else { (ib, ia) };
                    if (x, y) != (ia, ib) {
                        r.fail(format!("edge {e} maps to {f} but its ends map to {ia}, {ib}"));
                    }
                }
                Err(_) => r.fail(format!("edge {e} maps to {f}, which is not an edge of stage {}", lower.stage)),
            },
            Some(EdgeImage::Vertex(x)) => {
                if ia != x || ib != x {
                    r.fail(format!("edge {e} collapses to {x} but its ends map to {ia}, {ib}"));
                }
            }
        }
    }
    for f in lower.graph.edge_labels() {
        if map.edge_map.get(f) != Some(&EdgeImage::Edge(f.clone())) {
            r.fail(format!("edge {f} of stage {} is not mapped identically", lower.stage));
        }
    }
    r
}

/// A finite approximation of an end: the dummy it lives in at stages
/// `1..=len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndPrefix<V> {
    pub dummies: Vec<V>,
}

impl<V: Vertex> EndPrefix<V> {
    /// Dummy at stage `k` (`k >= 1`).
    pub fn at(&self, k: usize) -> Option<&V> {
        k.checked_sub(1).and_then(|i| self.dummies.get(i))
    }

    /// First stage at which the two prefixes differ.
    pub fn separation(&self, other: &Self) -> Option<usize> {
        self.dummies
            .iter()
            .zip(&other.dummies)
            .position(|(a, b)| a != b)
            .map(|i| i + 1)
    }
}

/// Follows a geodesic ray through the truncations `1..=stages`.
pub fn end_prefix<G: LazyGraph>(ex: &Explorer<G>, ray: &[G::Vertex], stages: usize) -> Result<EndPrefix<G::Vertex>> {
    let mut dummies = Vec::with_capacity(stages);
    for k in 1..=stages {
        let v = ray
            .get(k)
            .ok_or_else(|| Error::UnknownEnd(format!("ray is shorter than {k}")))?;
        let p = pieces(ex, k)?;
        if p.horizon.dist.get(v) != Some(&k) {
            return Err(Error::UnknownEnd(format!("ray vertex {v} is not at distance {k}")));
        }
        let piece = &p.pieces[p.member_of[v]];
        dummies.push(piece.first().expect("non-empty").clone());
    }
    Ok(EndPrefix { dummies })
}

#[cfg(test)]
mod tests {
    use super::builders::*;
    use super::*;
    use crate::blowup::TreeAddr;

    fn t(s: &str) -> TreeAddr {
        TreeAddr::parse(s).unwrap()
    }

    #[test]
    fn prefix_examples() {
        let p = prefix(&Explorer::new(Ray), 2).unwrap();
        assert_eq!(p.layers, vec![BTreeSet::from([0]), BTreeSet::from([1]), BTreeSet::from([2])]);
        assert_eq!(p.graph.num_edges(), 2);

        let p = prefix(&Explorer::new(BinaryTree), 2).unwrap();
        assert_eq!(p.graph.num_vertices(), 7);
        assert_eq!(p.graph.num_edges(), 6);
        assert_eq!(p.frontier_cut.len(), 8);
    }

    /// All (i, j) with i + j <= n, and the 4-neighbour edges among them.
    fn grid_corner_oracle(n: u32) -> (Vec<usize>, usize) {
        let pts: Vec<(u32, u32)> = (0..=n).flat_map(|i| (0..=n - i).map(move |j| (i, j))).collect();
        let mut sizes = vec![0; n as usize + 1];
        for &(i, j) in &pts {
            sizes[(i + j) as usize] += 1;
        }
        let mut edges = 0;
        for (a, &p) in pts.iter().enumerate() {
            for &q in &pts[a + 1..] {
                if p.0.abs_diff(q.0) + p.1.abs_diff(q.1) == 1 {
                    edges += 1;
                }
            }
        }
        (sizes, edges)
    }

    #[test]
    fn prefix_quadrant_grid_matches_enumeration() {
        let (sizes, edges) = grid_corner_oracle(2);
        assert_eq!(sizes, [1, 2, 3]);
        assert_eq!(edges, 6);
        let p = prefix(&Explorer::new(QuadrantGrid), 2).unwrap();
        let got: Vec<usize> = p.layers.iter().map(BTreeSet::len).collect();
        assert_eq!(got, sizes);
        assert_eq!(p.graph.num_edges(), edges);
    }

    struct Broken;

    impl LazyGraph for Broken {
        type Vertex = u32;
        fn root(&self) -> u32 {
            0
        }
        fn neighbors(&self, v: &u32) -> Vec<u32> {
            match v {
                0 => vec![1, 2],
                1 => vec![0, 2],
                2 => vec![0],
                _ => vec![],
            }
        }
    }

    #[test]
    fn asymmetric_neighbour_function_is_rejected() {
        match prefix(&Explorer::new(Broken), 1) {
            Err(Error::Asymmetric(a, b)) => assert_eq!((a.as_str(), b.as_str()), ("1", "2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn frontier_examples() {
        let f = frontier(&Explorer::new(BinaryTree), 0).unwrap();
        assert_eq!(f.pieces.len(), 2);
        assert!(f.pieces.iter().all(|p| p.parent == 0));

        for n in 0..4 {
            assert_eq!(frontier(&Explorer::new(Ray), n).unwrap().pieces.len(), 1);
        }

        let ex = Explorer::new(DoubleRay);
        let f = frontier(&ex, 1).unwrap();
        assert_eq!(f.pieces.len(), 2);
        // oracle: components of G - D^{≤1} in a wide finite window
        let window = ex.horizon(6).unwrap().induced(2, 6);
        assert_eq!(window.components().len(), 2);
    }

    #[test]
    fn truncation_examples() {
        let tr = truncation(&Explorer::new(Ray), 1).unwrap();
        assert_eq!(tr.graph.num_vertices(), 2);
        assert_eq!(tr.dummies.len(), 1);
        assert_eq!(tr.graph.num_edges(), 1);

        let tr = truncation(&Explorer::new(BinaryTree), 2).unwrap();
        assert_eq!(tr.real_vertices().count(), 3);
        assert_eq!(tr.dummies.len(), 4);
        assert_eq!(tr.graph.num_edges(), 6);

        let tr = truncation(&Explorer::new(StackedCliques), 1).unwrap();
        assert_eq!(tr.real_vertices().count(), 1);
        assert_eq!(tr.dummies.len(), 1);
        assert_eq!(tr.graph.num_edges(), 2);
        let (a, b) = tr.graph.edges().next().unwrap().1;
        assert_ne!(a, b);
        assert!(tr.graph.edges().all(|(_, ends)| ends == &(a.clone(), b.clone())));
    }

    #[test]
    fn truncation_json_lists_dummies() {
        let tr = truncation(&Explorer::new(BinaryTree), 1).unwrap();
        let j = tr.to_json();
        assert_eq!(j.dummies.as_deref(), Some(&["r0".to_string(), "r1".to_string()][..]));
    }

    #[test]
    fn bonding_examples() {
        let ex = Explorer::new(Ray);
        let b = bonding(&ex, 1).unwrap();
        assert_eq!(b.vertex_map[&2], 1);
        assert_eq!(b.vertex_map[&0], 0);

        let ex = Explorer::new(BinaryTree);
        let b = bonding(&ex, 1).unwrap();
        let mut fibres: BTreeMap<TreeAddr, usize> = BTreeMap::new();
        let up = truncation(&ex, 2).unwrap();
        for d in up.dummies.keys() {
            *fibres.entry(b.vertex_map[d].clone()).or_default() += 1;
        }
        assert_eq!(fibres, BTreeMap::from([(t("0"), 2), (t("1"), 2)]));
        assert_eq!(b.vertex_map[&t("")], t(""));
        assert!(check_bonding(&up, &truncation(&ex, 1).unwrap(), &b).passed());
    }

    #[test]
    fn tampered_bonding_is_reported() {
        let ex = Explorer::new(BinaryTree);
        let (up, low) = (truncation(&ex, 2).unwrap(), truncation(&ex, 1).unwrap());
        let mut b = bonding_between(&up, &low).unwrap();
        b.vertex_map.insert(t("00"), t("1"));
        let r = check_bonding(&up, &low, &b);
        assert!(!r.passed());
        assert!(r.witnesses.iter().any(|w| w.contains("r00")));
    }

    #[test]
    fn end_oracle_binary_tree_separates_at_stage_two() {
        let ex = Explorer::new(BinaryTree);
        let zeros = [t(""), t("0"), t("00"), t("000")];
        let zero_one = [t(""), t("0"), t("01"), t("010")];
        let a = end_prefix(&ex, &zeros, 3).unwrap();
        let b = end_prefix(&ex, &zero_one, 3).unwrap();
        assert_eq!(a.separation(&b), Some(2));
    }

    #[test]
    fn ray_has_one_end_class_per_stage() {
        let ex = Explorer::new(Ray);
        for n in 1..6 {
            assert_eq!(truncation(&ex, n).unwrap().dummies.len(), 1);
        }
        assert_eq!(Ray.oracle_ends(4).len(), 1);
    }

    #[test]
    fn explorer_is_shareable_across_threads() {
        let ex = Explorer::new(QuadrantGrid);
        let counts: Vec<usize> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|i| {
                    let ex = &ex;
                    s.spawn(move || truncation(ex, 2 + i % 2).unwrap().graph.num_edges())
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(counts[0], counts[2]);
        assert_eq!(counts[1], counts[3]);
    }
}
