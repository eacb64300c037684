//! Embedding into the stacked cliques graph: `D^n` goes to `K_{h(n)}` and
//! the `i`-th edge of `E(D^n, D^{n+1})` runs through vertex `i` of every
//! clique strictly between.

use std::collections::{BTreeMap, BTreeSet};

use super::{LayerStats, Recurrence};
use crate::locally_finite::builders::{cliques_adjacent, CliqueVertex};
use crate::locally_finite::{Explorer, LazyGraph, SimpleEdge, Vertex};
use crate::verify::Report;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CliqueEmbedding<V> {
    pub depth: usize,
    pub h: Vec<usize>,
    pub layers: Vec<BTreeSet<V>>,
    pub vertex_map: BTreeMap<V, CliqueVertex>,
    pub edge_map: BTreeMap<SimpleEdge<V>, Vec<CliqueVertex>>,
}

pub fn embed<G: LazyGraph>(ex: &Explorer<G>, depth: usize) -> Result<CliqueEmbedding<G::Vertex>> {
    let horizon = ex.horizon(depth)?;
    let h = LayerStats::from_horizon(&horizon).level_function(Recurrence::Warmup);
    let layers = horizon.layers[..=depth].to_vec();
    let mut vertex_map = BTreeMap::new();
    for (k, layer) in layers.iter().enumerate() {
        if layer.len() > h[k] {
            return Err(Error::Capacity(format!("D^{k} does not fit in K_{}", h[k])));
        }
        for (i, v) in layer.iter().enumerate() {
            vertex_map.insert(v.clone(), CliqueVertex { block: h[k] as u32, index: i as u32 });
        }
    }
    let mut edge_map = BTreeMap::new();
    for k in 0..=depth {
        for x in &layers[k] {
            for y in horizon.neighbors(x) {
                if x < y && horizon.dist[y] == k {
                    edge_map.insert(SimpleEdge::new(x.clone(), y.clone()), vec![vertex_map[x], vertex_map[y]]);
                }
            }
        }
        if k == depth {
            break;
        }
        for (i, (x, y)) in horizon.cut(k).into_iter().enumerate() {
            if i > h[k] {
                return Err(Error::Capacity(format!("edge {i} of the cut at {k} has no lane")));
            }
            let mut path = vec![vertex_map[&x]];
            path.extend((h[k] + 1..h[k + 1]).map(|m| CliqueVertex { block: m as u32, index: i as u32 }));
            path.push(vertex_map[&y]);
            edge_map.insert(SimpleEdge::new(x, y), path);
        }
    }
    Ok(CliqueEmbedding {
        depth,
        h: h[..=depth].to_vec(),
        layers,
        vertex_map,
        edge_map,
    })
}

pub fn validate<V: Vertex>(emb: &CliqueEmbedding<V>) -> Report {
    let mut r = Report::new("clique_embedding", 0, emb.depth);
    let mut seen = BTreeMap::new();
    for (v, img) in &emb.vertex_map {
        if !img.is_valid() {
            r.fail(format!("{v} maps to {img}, which is not a vertex"));
        }
        if let Some(other) = seen.insert(*img, v) {
            r.fail(format!("{other} and {v} both map to {img}"));
        }
    }
    for (k, layer) in emb.layers.iter().enumerate() {
        for v in layer {
            match emb.vertex_map.get(v) {
                Some(img) if img.block as usize == emb.h[k] => {}
                _ => r.fail(format!("{v} in D^{k} is not in K_{}", emb.h[k])),
            }
        }
    }
    let images: BTreeSet<&CliqueVertex> = emb.vertex_map.values().collect();
    let mut interiors: BTreeMap<CliqueVertex, &SimpleEdge<V>> = BTreeMap::new();
    for (e, path) in &emb.edge_map {
        let ends = (path.first(), path.last());
        let (a, b) = (emb.vertex_map.get(&e.lo), emb.vertex_map.get(&e.hi));
        if !(ends == (a, b) || ends == (b, a)) || path.len() < 2 {
            r.fail(format!("path of {e} does not join the images of its ends"));
        }
        if let Some(w) = path.windows(2).find(|w| !cliques_adjacent(&w[0], &w[1])) {
            r.fail(format!("path of {e} uses the non-edge {}, {}", w[0], w[1]));
        }
        for x in path.iter().skip(1).take(path.len().saturating_sub(2)) {
            if images.contains(x) {
                r.fail(format!("path of {e} passes through the vertex image {x}"));
            }
            if let Some(f) = interiors.insert(*x, e) {
                r.fail(format!("paths of {f} and {e} share {x}"));
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locally_finite::builders::*;

    #[test]
    fn ray_goes_to_consecutive_cliques() {
        let emb = embed(&Explorer::new(Ray), 4).unwrap();
        assert_eq!(emb.h, [1, 2, 3, 4, 5]);
        assert!(emb.edge_map.values().all(|p| p.len() == 2));
        assert!(validate(&emb).passed());
    }

    #[test]
    fn binary_tree_uses_lanes() {
        let emb = embed(&Explorer::new(BinaryTree), 3).unwrap();
        assert_eq!(emb.h, [2, 4, 8, 16]);
        let r = validate(&emb);
        assert!(r.passed(), "{r:?}");
        let long = emb.edge_map.values().filter(|p| p.len() > 2).count();
        assert!(long > 0);
    }

    #[test]
    fn shared_lane_is_caught() {
        let mut emb = embed(&Explorer::new(BinaryTree), 2).unwrap();
        let paths: Vec<_> = emb.edge_map.keys().cloned().collect();
        let donor = emb.edge_map.values().find(|p| p.len() > 2).unwrap().clone();
        let victim = paths.iter().find(|e| emb.edge_map[*e] != donor && emb.edge_map[*e].len() == donor.len()).unwrap();
        let mut stolen = emb.edge_map[victim].clone();
        stolen[1] = donor[1];
        emb.edge_map.insert(victim.clone(), stolen);
        assert!(!validate(&emb).passed());
    }
}
