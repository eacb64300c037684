//! Embedding a locally finite connected graph into the `lf` tree blowup,
//! one distance class at a time.
//!
//! The distance class `D^n` is placed on level `h(n)` of the blowup, with
//! each piece of `D^n` (its part in one component of `G - D^{<n}`) inside a
//! single block below the block of its parent piece. Edges from `D^n` to
//! `D^{n+1}` become monotone paths between the levels `h(n)` and `h(n+1)`.

pub mod warmup;

use std::collections::{BTreeMap, BTreeSet};

use crate::blowup::{self, BlowupParams, BlowupVertex, Profile, TreeAddr};
use crate::locally_finite::{self, EndPrefix, Explorer, Horizon, LazyGraph, SimpleEdge, Vertex};
use crate::verify::Report;
use crate::{Error, Result};

/// Recurrence used to pick the levels.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Recurrence {
    /// `h(0) = d(v)`, `h(n) = max(h(n-1) + |D^n|, |E(D^n, D^{n+1})|)`.
    Universal,
    /// `h(0) = max(d(v), 1)`, `h(n) = max(h(n-1) + 1, |E(D^n, D^{n+1})|, |D^n|)`.
    Warmup,
}

/// Layer sizes `|D^k|` and cut sizes `|E(D^k, D^{k+1})|` for `k <= depth`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LayerStats {
    pub root_degree: usize,
    pub sizes: Vec<usize>,
    pub cuts: Vec<usize>,
}

impl LayerStats {
    pub fn from_horizon<V: Vertex>(h: &Horizon<V>) -> Self {
        let root = h.layers[0].first().expect("root");
        LayerStats {
            root_degree: h.neighbors(root).len(),
            sizes: h.layers[..=h.depth].iter().map(BTreeSet::len).collect(),
            cuts: (0..=h.depth).map(|k| h.cut(k).len()).collect(),
        }
    }

    pub fn level_function(&self, rec: Recurrence) -> Vec<usize> {
        let mut h: Vec<usize> = Vec::with_capacity(self.sizes.len());
        for n in 0..self.sizes.len() {
            let value = match (rec, n) {
                (Recurrence::Universal, 0) => self.root_degree,
                (Recurrence::Warmup, 0) => self.root_degree.max(1),
                (Recurrence::Universal, _) => (h[n - 1] + self.sizes[n]).max(self.cuts[n]),
                (Recurrence::Warmup, _) => (h[n - 1] + 1).max(self.cuts[n]).max(self.sizes[n]),
            };
            h.push(value);
        }
        h
    }
}

pub fn level_function<G: LazyGraph>(ex: &Explorer<G>, rec: Recurrence, n: usize) -> Result<Vec<usize>> {
    Ok(LayerStats::from_horizon(&ex.horizon(n)?).level_function(rec))
}

/// A piece of `D^k` and the block it was placed in.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlacedPiece<V> {
    pub vertices: BTreeSet<V>,
    pub parent: Option<usize>,
    pub addr: TreeAddr,
}

/// The maps `φ` on `G[D^{≤depth}]` produced by the recursion.
#[derive(Clone, Debug)]
pub struct Embedding<V> {
    pub depth: usize,
    pub h: Vec<usize>,
    pub layers: Vec<BTreeSet<V>>,
    /// `pieces[k]` lists the pieces of `D^k` sorted by smallest vertex.
    pub pieces: Vec<Vec<PlacedPiece<V>>>,
    pub vertex_map: BTreeMap<V, BlowupVertex>,
    /// Path images, oriented from the lower to the higher distance class.
    pub edge_map: BTreeMap<SimpleEdge<V>, Vec<BlowupVertex>>,
    /// `k(n) = |E(D^n, D^{n+1})|` for `n < depth`.
    pub cut_sizes: Vec<usize>,
}

pub const LF: BlowupParams = BlowupParams { profile: Profile::Lf };

pub fn embed<G: LazyGraph>(ex: &Explorer<G>, depth: usize) -> Result<Embedding<G::Vertex>> {
    let h = level_function(ex, Recurrence::Universal, depth)?;
    embed_with(ex, depth, &h)
}

/// Runs the recursion with the given level function (at least `depth + 1`
/// values).
pub fn embed_with<G: LazyGraph>(ex: &Explorer<G>, depth: usize, h: &[usize]) -> Result<Embedding<G::Vertex>> {
    if h.len() <= depth {
        return Err(Error::Horizon {
            requested: depth,
            available: h.len().saturating_sub(1),
        });
    }
    let horizon = ex.horizon(depth)?;
    let root = ex.root();
    let root_addr = TreeAddr::leftmost(h[0]);
    let mut emb = Embedding {
        depth,
        h: h[..=depth].to_vec(),
        layers: horizon.layers[..=depth].to_vec(),
        pieces: vec![vec![PlacedPiece {
            vertices: BTreeSet::from([root.clone()]),
            parent: None,
            addr: root_addr.clone(),
        }]],
        vertex_map: BTreeMap::from([(root, BlowupVertex::new(root_addr, 0))]),
        edge_map: BTreeMap::new(),
        cut_sizes: Vec::new(),
    };
    for k in 0..depth {
        let level = h[k + 1];
        if level <= h[k] && !horizon.layers[k + 1].is_empty() {
            return Err(Error::Capacity(format!("level function is not increasing at {}", k + 1)));
        }
        let fr = locally_finite::frontier(ex, k)?;
        let mut taken: BTreeSet<TreeAddr> = BTreeSet::new();
        let mut placed = Vec::with_capacity(fr.pieces.len());
        for piece in fr.pieces {
            let above = &emb.pieces[k][piece.parent].addr;
            let addr = above
                .descendants(level)
                .find(|t| !taken.contains(t))
                .ok_or_else(|| Error::Capacity(format!("no free node below {above} at level {level}")))?;
            if piece.vertices.len() > LF.block_size(level) as usize {
                return Err(Error::Capacity(format!(
                    "piece of {} vertices exceeds block {addr}",
                    piece.vertices.len()
                )));
            }
            taken.insert(addr.clone());
            for (i, v) in piece.vertices.iter().enumerate() {
                emb.vertex_map.insert(v.clone(), BlowupVertex::new(addr.clone(), i as u32));
            }
            placed.push(PlacedPiece {
                vertices: piece.vertices,
                parent: Some(piece.parent),
                addr,
            });
        }
        emb.pieces.push(placed);

        let cut = horizon.cut(k);
        emb.cut_sizes.push(cut.len());
        let mut avoid = BTreeSet::new();
        for (x, y) in cut {
            let path = blowup::monotone_path(LF, &emb.vertex_map[&x], &emb.vertex_map[&y], &avoid)?;
            avoid.extend(path.interior().iter().cloned());
            emb.edge_map.insert(SimpleEdge::new(x, y), path.vertices);
        }
        for x in &horizon.layers[k + 1] {
            for y in horizon.neighbors(x) {
                if x < y && horizon.dist[y] == k + 1 {
                    let (a, b) = (&emb.vertex_map[x], &emb.vertex_map[y]);
                    if a.addr != b.addr {
                        return Err(Error::Invalid(format!("edge {x}~{y} joins two pieces")));
                    }
                    emb.edge_map
                        .insert(SimpleEdge::new(x.clone(), y.clone()), vec![a.clone(), b.clone()]);
                }
            }
        }
    }
    Ok(emb)
}

impl<V: Vertex> Embedding<V> {
    pub fn distance(&self, v: &V) -> Option<usize> {
        self.layers.iter().position(|l| l.contains(v))
    }

    /// Index of the stage-`k` piece that `v` (at distance `>= k`) descends from.
    fn ancestor_piece(&self, v: &V, k: usize) -> Option<usize> {
        let mut stage = self.distance(v)?;
        let mut idx = self.pieces[stage].iter().position(|p| p.vertices.contains(v))?;
        while stage > k {
            idx = self.pieces[stage][idx].parent?;
            stage -= 1;
        }
        (stage == k).then_some(idx)
    }

    /// The address `t_C` of every component `C` of `G - D^{<k}` (indexed as
    /// the stage-`k` pieces).
    pub fn component_addresses(&self, k: usize) -> Vec<TreeAddr> {
        self.pieces[k].iter().map(|p| p.addr.clone()).collect()
    }

    /// Restriction to `G[D^{≤depth}]`.
    pub fn restrict(&self, depth: usize) -> (BTreeMap<V, BlowupVertex>, BTreeMap<SimpleEdge<V>, Vec<BlowupVertex>>) {
        let keep = |v: &V| self.distance(v).is_some_and(|d| d <= depth);
        let vm = self.vertex_map.iter().filter(|(v, _)| keep(v)).map(|(v, b)| (v.clone(), b.clone())).collect();
        let em = self
            .edge_map
            .iter()
            .filter(|(e, _)| keep(&e.lo) && keep(&e.hi))
            .map(|(e, p)| (e.clone(), p.clone()))
            .collect();
        (vm, em)
    }
}

/// Checks injectivity, the level discipline, that edge images are paths
/// of the blowup with pairwise disjoint interiors avoiding every vertex
/// image, block placement of the pieces, and the level window of each
/// consecutive pair of distance classes.
pub fn validate<V: Vertex>(emb: &Embedding<V>) -> Report {
    let mut r = Report::new("embedding", 0, emb.depth);
    let mut seen: BTreeMap<&BlowupVertex, &V> = BTreeMap::new();
    for (v, img) in &emb.vertex_map {
        if let Some(other) = seen.insert(img, v) {
            r.fail(format!("{other} and {v} both map to {img}"));
        }
        if !LF.is_vertex(img) {
            r.fail(format!("{v} maps to {img}, which is not a blowup vertex"));
        }
        match emb.distance(v) {
            Some(d) if img.level() == emb.h[d] => {}
            Some(d) => r.fail(format!("{v} in D^{d} maps to level {}, expected {}", img.level(), emb.h[d])),
            None => r.fail(format!("{v} is not in an explored layer")),
        }
    }
    for layer in &emb.layers {
        for v in layer {
            if !emb.vertex_map.contains_key(v) {
                r.fail(format!("{v} has no image"));
            }
        }
    }
    for (k, pieces) in emb.pieces.iter().enumerate() {
        let mut addrs = BTreeSet::new();
        for p in pieces {
            if p.addr.level() != emb.h[k] || !addrs.insert(&p.addr) {
                r.fail(format!("stage-{k} piece at {} is misplaced or shares its node", p.addr));
            }
            if let Some(v) = p.vertices.iter().find(|v| emb.vertex_map.get(*v).map(|b| &b.addr) != Some(&p.addr)) {
                r.fail(format!("{v} is not in the block {} of its piece", p.addr));
            }
        }
    }

    let images: BTreeSet<&BlowupVertex> = emb.vertex_map.values().collect();
    for (e, path) in &emb.edge_map {
        let (Some(a), Some(b)) = (emb.vertex_map.get(&e.lo), emb.vertex_map.get(&e.hi)) else {
            r.fail(format!("edge {e} has an endpoint without image"));
            continue;
        };
        let ends_ok = path.len() >= 2
            && ((path[0] == *a && path[path.len() - 1] == *b) || (path[0] == *b && path[path.len() - 1] == *a));
        if !ends_ok {
            r.fail(format!("path of {e} does not join the images of its ends"));
        }
        if let Some(w) = path.windows(2).find(|w| !blowup::adjacent(LF, &w[0], &w[1])) {
            r.fail(format!("path of {e} uses the non-edge {}, {}", w[0], w[1]));
        }
        if path.iter().collect::<BTreeSet<_>>().len() != path.len() {
            r.fail(format!("path of {e} repeats a vertex"));
        }
        if path.len() > 2 {
            if let Some(x) = path[1..path.len() - 1].iter().find(|x| images.contains(x)) {
                r.fail(format!("path of {e} passes through the vertex image {x}"));
            }
        }
        if let (Some(da), Some(db)) = (emb.distance(&e.lo), emb.distance(&e.hi)) {
            let (lo, hi) = (emb.h[da.min(db)], emb.h[da.max(db)]);
            if path.iter().any(|x| x.level() < lo || x.level() > hi) {
                r.fail(format!("path of {e} leaves the levels {lo}..={hi}"));
            }
        }
    }
    // literal pairwise check
    let edges: Vec<(&SimpleEdge<V>, BTreeSet<&BlowupVertex>)> = emb
        .edge_map
        .iter()
        .map(|(e, p)| (e, p.iter().skip(1).take(p.len().saturating_sub(2)).collect()))
        .collect();
    for (i, (e, a)) in edges.iter().enumerate() {
        for (f, b) in &edges[i + 1..] {
            if let Some(x) = a.intersection(b).next() {
                r.fail(format!("paths of {e} and {f} share the interior vertex {x}"));
            }
        }
    }
    for (n, &k) in emb.cut_sizes.iter().enumerate() {
        r.note(format!("k({n}) = {k}, h({n}) = {}", emb.h[n]));
        if k > emb.h[n] {
            r.fail(format!("routing bound violated at stage {n}: k = {k} > h = {}", emb.h[n]));
        }
    }
    r
}

/// Checks that each component `C` of `G - D^{<k}` (as far as explored)
/// maps into the subtree below `t_C`, with distinct `t_C`.
pub fn verify_star<V: Vertex>(emb: &Embedding<V>, k: usize) -> Report {
    let mut r = Report::new("star", k, emb.depth);
    let addrs = emb.component_addresses(k);
    if addrs.iter().collect::<BTreeSet<_>>().len() != addrs.len() {
        r.fail(format!("two stage-{k} components share a node"));
    }
    for (v, img) in &emb.vertex_map {
        if emb.distance(v).is_some_and(|d| d < k) {
            continue;
        }
        match emb.ancestor_piece(v, k) {
            Some(c) if addrs[c].is_ancestor_of(&img.addr) => {}
            Some(c) => r.fail(format!("{v} maps to {img}, outside the subtree of {}", addrs[c])),
            None => r.fail(format!("{v} has no stage-{k} ancestor piece")),
        }
    }
    for (e, path) in &emb.edge_map {
        let (Some(da), Some(db)) = (emb.distance(&e.lo), emb.distance(&e.hi)) else {
            continue;
        };
        if da.min(db) < k {
            continue;
        }
        let Some(c) = emb.ancestor_piece(&e.lo, k) else {
            continue;
        };
        if let Some(x) = path.iter().find(|x| !addrs[c].is_ancestor_of(&x.addr)) {
            r.fail(format!("path of {e} reaches {x}, outside the subtree of {}", addrs[c]));
        }
    }
    r
}

/// The end of the blowup an end of `G` is sent to, through its first
/// stages: the node `t_C` of the component containing it at every stage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiftedEnd {
    pub addrs: Vec<TreeAddr>,
}

impl LiftedEnd {
    /// Dummies of the blowup inverse system hit by this end: at stage `k`
    /// the component of the blowup minus the levels `< h(k)` that contains
    /// the subtree below `addrs[k]`.
    pub fn dummies(&self) -> Vec<BlowupVertex> {
        self.addrs.iter().map(|t| BlowupVertex::new(t.clone(), 0)).collect()
    }

    pub fn separation(&self, other: &Self) -> Option<usize> {
        self.addrs.iter().zip(&other.addrs).position(|(a, b)| a != b)
    }
}

pub fn lift_end<V: Vertex>(emb: &Embedding<V>, end: &EndPrefix<V>) -> Result<LiftedEnd> {
    let mut addrs = vec![emb.pieces[0][0].addr.clone()];
    for k in 1..=emb.depth.min(end.dummies.len()) {
        let d = end.at(k).expect("in range");
        let piece = emb.pieces[k]
            .iter()
            .find(|p| p.vertices.first() == Some(d))
            .ok_or_else(|| Error::UnknownEnd(format!("{d} is not a stage-{k} dummy")))?;
        if !addrs[k - 1].is_ancestor_of(&piece.addr) {
            return Err(Error::UnknownEnd(format!("stage-{k} dummy {d} does not refine stage {}", k - 1)));
        }
        addrs.push(piece.addr.clone());
    }
    Ok(LiftedEnd { addrs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locally_finite::builders::*;

    #[test]
    fn level_function_examples() {
        let tree = level_function(&Explorer::new(BinaryTree), Recurrence::Universal, 4).unwrap();
        assert_eq!(tree, [2, 4, 8, 16, 32]);
        let grid = level_function(&Explorer::new(QuadrantGrid), Recurrence::Universal, 4).unwrap();
        assert_eq!(grid, [2, 4, 7, 11, 16]);
        let ray = level_function(&Explorer::new(Ray), Recurrence::Universal, 3).unwrap();
        assert_eq!(ray, [1, 2, 3, 4]);
        let single = level_function(&Explorer::new(FiniteGraph::single_vertex()), Recurrence::Warmup, 2).unwrap();
        assert_eq!(single, [1, 2, 3]);
    }

    #[test]
    fn ray_embedding_is_a_vertical_path() {
        let emb = embed(&Explorer::new(Ray), 3).unwrap();
        let r = validate(&emb);
        assert!(r.passed(), "{r:?}");
        let got: Vec<String> = (0..=3u64).map(|v| emb.vertex_map[&v].to_string()).collect();
        assert_eq!(got, ["r0:0", "r00:0", "r000:0", "r0000:0"]);
    }

    #[test]
    fn binary_tree_pieces_go_to_distinct_subtrees() {
        let emb = embed(&Explorer::new(BinaryTree), 3).unwrap();
        assert!(validate(&emb).passed());
        for k in 0..=3 {
            assert!(verify_star(&emb, k).passed());
        }
        assert_eq!(emb.component_addresses(1).len(), 2);
    }

    #[test]
    fn shrunken_level_function_breaks_routing() {
        let ex = Explorer::new(BinaryTree);
        let res = embed_with(&ex, 3, &[1, 2, 3, 4]);
        let failed = match res {
            Err(_) => true,
            Ok(emb) => !validate(&emb).passed(),
        };
        assert!(failed);
    }

    #[test]
    fn lifted_ends_stay_apart() {
        let ex = Explorer::new(BinaryTree);
        let emb = embed(&ex, 3).unwrap();
        let rays = BinaryTree.oracle_ends(3);
        let lifted: Vec<LiftedEnd> = rays
            .iter()
            .map(|ray| lift_end(&emb, &locally_finite::end_prefix(&ex, ray, 3).unwrap()).unwrap())
            .collect();
        for (i, a) in lifted.iter().enumerate() {
            for b in &lifted[i + 1..] {
                assert!(a.separation(b).is_some());
            }
        }
    }
}
