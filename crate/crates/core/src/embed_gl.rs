//! Embedding an edge-contraction system into the `gl` tree blowup.
//!
//! Stage `n` assigns every vertex of `G_n` a node `g_n(v)` at level `n` and
//! every edge a path `p_n(e)` through levels `≤ n` joining the blocks of its
//! ends. Going to stage `n + 1`, old paths grow by one vertex at each end
//! and the new edge `e_{n+1}` gets a three-vertex path through the block of
//! the vertex it uncontracts.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::blowup::{self, BlowupParams, BlowupVertex, Profile, TreeAddr};
use crate::graphlike::{EdgeContractionSystem, Expansion};
use crate::multigraph::{FiniteMultigraph, Link};
use crate::verify::Report;
use crate::{Error, Name, Result};

pub const GL: BlowupParams = BlowupParams { profile: Profile::Gl };

/// The maps `g_n` and `p_n`. Paths run from the block of the first stored
/// endpoint to the block of the second.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GlStage {
    pub stage: usize,
    pub vertex_map: BTreeMap<Name, TreeAddr>,
    pub paths: BTreeMap<Name, Vec<BlowupVertex>>,
}

impl GlStage {
    pub fn to_json(&self) -> Value {
        json!({
            "stage": self.stage,
            "vertices": self.vertex_map.iter().map(|(v, t)| (v.to_string(), json!(t.to_string()))).collect::<serde_json::Map<_, _>>(),
            "paths": self.paths.iter().map(|(e, p)| (e.to_string(), json!(p.iter().map(ToString::to_string).collect::<Vec<_>>()))).collect::<serde_json::Map<_, _>>(),
        })
    }

    /// The union of the paths, one colour per edge.
    pub fn to_dot(&self, name: &str) -> String {
        const COLOURS: [&str; 8] = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"];
        let mut g: FiniteMultigraph<BlowupVertex, String> = FiniteMultigraph::new();
        let mut colour = BTreeMap::new();
        for (i, (e, path)) in self.paths.iter().enumerate() {
            for v in path {
                if !g.has_vertex(v) {
                    g.add_vertex(v.clone()).expect("fresh");
                }
            }
            for (j, w) in path.windows(2).enumerate() {
                let label = format!("{e}.{j}");
                colour.insert(label.clone(), COLOURS[i % COLOURS.len()]);
                g.add_edge(label, w[0].clone(), w[1].clone()).expect("fresh");
            }
        }
        g.to_dot_with(name, |_| None, |e| Some(format!("color={}", colour[e])))
    }
}

#[derive(Clone, Debug)]
pub struct GlEmbedding {
    pub expansion: Expansion,
    pub stages: Vec<GlStage>,
}

struct Allocator {
    used: BTreeMap<TreeAddr, BTreeSet<u32>>,
}

impl Allocator {
    fn take(&mut self, t: &TreeAddr) -> Result<BlowupVertex> {
        let used = self.used.entry(t.clone()).or_default();
        let i = (0..GL.block_size(t.level()))
            .find(|i| !used.contains(i))
            .ok_or_else(|| Error::Capacity(format!("block {t} is full")))?;
        used.insert(i);
        Ok(BlowupVertex::new(t.clone(), i))
    }
}

pub fn embed(sys: &EdgeContractionSystem, n: usize) -> Result<GlEmbedding> {
    let expansion = sys.expansion(n)?;
    let mut stages = vec![GlStage {
        stage: 0,
        vertex_map: BTreeMap::from([(sys.root.clone(), TreeAddr::root())]),
        paths: BTreeMap::new(),
    }];
    for (k, t) in expansion.transitions.iter().enumerate() {
        let prev = &stages[k];
        let g = &expansion.graphs[k + 1];
        let split = t.into.0 != t.into.1;
        let mut vertex_map = BTreeMap::new();
        for x in g.vertices() {
            let base = &prev.vertex_map[&t.vertex_map[x]];
            vertex_map.insert(x.clone(), base.child(split && x == &t.into.1));
        }
        let mut alloc = Allocator { used: BTreeMap::new() };
        let mut paths = BTreeMap::new();
        for (e, old) in &prev.paths {
            let [n0, n1] = &t.ends[e];
            let a = alloc.take(&vertex_map[n0])?;
            let b = alloc.take(&vertex_map[n1])?;
            let mut path = Vec::with_capacity(old.len() + 2);
            path.push(a);
            path.extend(old.iter().cloned());
            path.push(b);
            if n0 > n1 {
                path.reverse();
            }
            paths.insert(e.clone(), path);
        }
        let apex_addr = &prev.vertex_map[&t.at];
        let busy: BTreeSet<&BlowupVertex> = prev.paths.values().flatten().collect();
        let apex = blowup::block(GL, apex_addr)
            .find(|v| !busy.contains(v))
            .ok_or_else(|| Error::Capacity(format!("block {apex_addr} is full")))?;
        let a = alloc.take(&vertex_map[&t.into.0])?;
        let b = alloc.take(&vertex_map[&t.into.1])?;
        let mut path = vec![a, apex, b];
        if t.into.0 > t.into.1 {
            path.reverse();
        }
        paths.insert(t.edge.clone(), path);
        stages.push(GlStage {
            stage: k + 1,
            vertex_map,
            paths,
        });
    }
    Ok(GlEmbedding { expansion, stages })
}

impl GlEmbedding {
    pub fn depth(&self) -> usize {
        self.stages.len() - 1
    }

    /// `p_n(e)`, the stage-`n` prefix of the double ray of `e`.
    pub fn double_ray_prefix(&self, e: &Name, n: usize) -> Result<&[BlowupVertex]> {
        let st = self.stages.get(n).ok_or(Error::Horizon {
            requested: n,
            available: self.depth(),
        })?;
        st.paths
            .get(e)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownEdge(e.to_string()))
    }

    /// Image in `G_m` of a vertex of `G_n` (`m <= n`).
    pub fn vertex_at(&self, x: &Name, n: usize, m: usize) -> Name {
        (m..n).rev().fold(x.clone(), |v, k| self.expansion.transitions[k].vertex_map[&v].clone())
    }
}

/// Stage-wise properties: `g_n` injective into level `n` and refining
/// `g_{n-1}` along the bonding map; `p_n(e)` a path of the blowup through
/// levels `≤ n` between the blocks of the ends of `e`, meeting every level
/// at most twice, internally avoiding those blocks, pairwise vertex
/// disjoint, and extending `p_{n-1}(e)` by exactly one vertex at each end.
pub fn check_properties(emb: &GlEmbedding) -> Report {
    let mut r = Report::new("graphlike_embedding", 0, emb.depth());
    for (n, st) in emb.stages.iter().enumerate() {
        let g = &emb.expansion.graphs[n];
        let mut seen = BTreeMap::new();
        for v in g.vertices() {
            let Some(t) = st.vertex_map.get(v) else {
                r.fail(format!("stage {n}: {v} has no node"));
                continue;
            };
            if t.level() != n {
                r.fail(format!("stage {n}: {v} maps to {t} at level {}", t.level()));
            }
            if let Some(other) = seen.insert(t, v) {
                r.fail(format!("stage {n}: {other} and {v} share {t}"));
            }
            if n > 0 {
                let below = &emb.expansion.transitions[n - 1].vertex_map[v];
                if t.parent().as_ref() != emb.stages[n - 1].vertex_map.get(below) {
                    r.fail(format!("stage {n}: node of {v} is not a child of the node of {below}"));
                }
            }
        }
        let mut owner: BTreeMap<&BlowupVertex, &Name> = BTreeMap::new();
        for e in g.edge_labels() {
            let Some(path) = st.paths.get(e) else {
                r.fail(format!("stage {n}: {e} has no path"));
                continue;
            };
            let (c0, c1) = g.endpoints(e).expect("edge");
            let (t0, t1) = (&st.vertex_map[c0], &st.vertex_map[c1]);
            if path.len() < 2 || &path[0].addr != t0 || &path[path.len() - 1].addr != t1 {
                r.fail(format!("stage {n}: path of {e} does not join K({t0}) and K({t1})"));
            }
            if let Some(w) = path.windows(2).find(|w| !blowup::adjacent(GL, &w[0], &w[1])) {
                r.fail(format!("stage {n}: path of {e} uses the non-edge {}, {}", w[0], w[1]));
            }
            if path.len() > 2 {
                if let Some(x) = path[1..path.len() - 1].iter().find(|x| &x.addr == t0 || &x.addr == t1) {
                    r.fail(format!("stage {n}: path of {e} re-enters an end block at {x}"));
                }
            }
            let mut per_level = vec![0usize; n + 1];
            for x in path {
                match per_level.get_mut(x.level()) {
                    Some(c) => *c += 1,
                    None => r.fail(format!("stage {n}: path of {e} reaches level {}", x.level())),
                }
                if let Some(f) = owner.insert(x, e) {
                    r.fail(format!("stage {n}: paths of {f} and {e} share {x}"));
                }
            }
            if let Some(level) = per_level.iter().position(|&c| c > 2) {
                r.fail(format!("stage {n}: path of {e} meets level {level} more than twice"));
            }
            if n > 0 {
                if let Some(old) = emb.stages[n - 1].paths.get(e) {
                    let inner = (path.len() == old.len() + 2).then(|| &path[1..path.len() - 1]);
                    let reversed: Vec<BlowupVertex> = old.iter().rev().cloned().collect();
                    if inner != Some(old.as_slice()) && inner != Some(reversed.as_slice()) {
                        r.fail(format!("stage {n}: path of {e} does not extend its stage-{} path", n - 1));
                    }
                } else if path.len() != 3 {
                    r.fail(format!("stage {n}: new edge {e} has a path of length {}", path.len()));
                }
            }
        }
        if let Some(e) = st.paths.keys().find(|e| !g.has_edge(e)) {
            r.fail(format!("stage {n}: path for the non-edge {e}"));
        }
    }
    r
}

/// A walk in the truncated blowup `𝐆_n`: vertices and the original edges
/// between consecutive ones.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Walk {
    pub vertices: Vec<BlowupVertex>,
    pub edges: Vec<Link<BlowupVertex>>,
}

impl Walk {
    pub fn reversed(&self) -> Walk {
        Walk {
            vertices: self.vertices.iter().rev().cloned().collect(),
            edges: self.edges.iter().rev().cloned().collect(),
        }
    }
}

/// The graph map `G_n → 𝐆_n`, where `𝐆_n` keeps the levels `< n` of the
/// blowup and contracts the subtree below each node `t` at level `n` to
/// the dummy `(t, 0)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StageMap {
    pub stage: usize,
    pub vertex_map: BTreeMap<Name, BlowupVertex>,
    pub edge_map: BTreeMap<Name, Walk>,
}

fn project(v: &BlowupVertex, n: usize) -> BlowupVertex {
    if v.level() < n {
        v.clone()
    } else {
        BlowupVertex::new(v.addr.prefix(n), 0)
    }
}

pub fn stage_map(emb: &GlEmbedding, n: usize) -> Result<StageMap> {
    let st = emb.stages.get(n).ok_or(Error::Horizon {
        requested: n,
        available: emb.depth(),
    })?;
    let vertex_map = st
        .vertex_map
        .iter()
        .map(|(v, t)| (v.clone(), BlowupVertex::new(t.clone(), 0)))
        .collect();
    let edge_map = st
        .paths
        .iter()
        .map(|(e, p)| {
            let walk = Walk {
                vertices: p.iter().map(|x| project(x, n)).collect(),
                edges: p.windows(2).map(|w| Link::new(w[0].clone(), w[1].clone())).collect(),
            };
            (e.clone(), walk)
        })
        .collect();
    Ok(StageMap {
        stage: n,
        vertex_map,
        edge_map,
    })
}

/// Checks that a stage map is an injective graph map into `𝐆_n` that
/// sends edges to internally disjoint walks avoiding the vertex images.
/// Membership in `𝐆_n` is decided arithmetically, so large stages do not
/// have to be materialised.
pub fn check_stage_map(sm: &StageMap, g: &crate::graphlike::StageGraph) -> Report {
    let n = sm.stage;
    let mut r = Report::new("stage_map", n, n);
    let is_dummy = |v: &BlowupVertex| v.level() == n && v.index == 0;
    let mut seen = BTreeMap::new();
    for (v, img) in &sm.vertex_map {
        if !is_dummy(img) {
            r.fail(format!("{v} maps to {img}, which is not a dummy of stage {n}"));
        }
        if let Some(o) = seen.insert(img, v) {
            r.fail(format!("{o} and {v} both map to {img}"));
        }
    }
    let mut interior: BTreeMap<&BlowupVertex, &Name> = BTreeMap::new();
    let mut labels: BTreeMap<&Link<BlowupVertex>, &Name> = BTreeMap::new();
    for (e, w) in &sm.edge_map {
        let Ok((a, b)) = g.endpoints(e) else {
            r.fail(format!("walk for the non-edge {e}"));
            continue;
        };
        if w.vertices.len() != w.edges.len() + 1 || w.edges.is_empty() {
            r.fail(format!("walk of {e} is malformed"));
            continue;
        }
        if w.vertices.first() != sm.vertex_map.get(a) || w.vertices.last() != sm.vertex_map.get(b) {
            r.fail(format!("walk of {e} does not join the images of {a} and {b}"));
        }
        for (i, l) in w.edges.iter().enumerate() {
            let ends = Link::new(project(&l.lo, n), project(&l.hi, n));
            let here = Link::new(w.vertices[i].clone(), w.vertices[i + 1].clone());
            let kept = l.lo.level().min(l.hi.level()) < n;
            if !blowup::adjacent(GL, &l.lo, &l.hi) || !kept || ends != here {
                r.fail(format!("walk of {e} uses {l}, which is not an edge {here} of stage {n}"));
            }
            if let Some(f) = labels.insert(l, e) {
                r.fail(format!("walks of {f} and {e} both use {l}"));
            }
        }
        for x in &w.vertices[1..w.vertices.len() - 1] {
            if is_dummy(x) {
                r.fail(format!("walk of {e} passes through the dummy {x}"));
            }
            if let Some(f) = interior.insert(x, e) {
                r.fail(format!("walks of {f} and {e} share {x}"));
            }
        }
    }
    r
}

/// The bonding map `𝐆_{n+1} → 𝐆_n` on vertices.
fn bond(v: &BlowupVertex, n: usize) -> BlowupVertex {
    project(v, n)
}

fn bond_walk(w: &Walk, n: usize, r: &mut Report, what: &str) -> Walk {
    let mut out = Walk {
        vertices: vec![bond(&w.vertices[0], n)],
        edges: Vec::new(),
    };
    for (i, l) in w.edges.iter().enumerate() {
        let img = bond(&w.vertices[i + 1], n);
        if l.lo.level().min(l.hi.level()) < n {
            out.edges.push(l.clone());
            out.vertices.push(img);
        } else if Some(&img) != out.vertices.last() {
            r.fail(format!("{what}: contracted edge {l} joins distinct images"));
        }
    }
    out
}

/// Checks `h_n ∘ f_n = f'_n ∘ h_{n+1}` on vertices and edges, where `f_n`
/// contracts `e_{n+1}` and `f'_n` is the bonding map of the blowup system.
pub fn check_commute(emb: &GlEmbedding, n: usize) -> Result<Report> {
    let mut r = Report::new("commuting_square", n, n + 1);
    let (lo, hi) = (stage_map(emb, n)?, stage_map(emb, n + 1)?);
    let t = &emb.expansion.transitions[n];
    for (x, img) in &hi.vertex_map {
        let down = bond(img, n);
        let expected = &lo.vertex_map[&t.vertex_map[x]];
        if &down != expected {
            r.fail(format!("vertex {x}: bonding gives {down}, stage {n} map gives {expected}"));
        }
    }
    for (e, w) in &hi.edge_map {
        let what = format!("edge {e}");
        let down = bond_walk(w, n, &mut r, &what);
        if e == &t.edge {
            let z = &lo.vertex_map[&t.at];
            if !down.edges.is_empty() || down.vertices != [z.clone()] {
                r.fail(format!("new edge {e} does not collapse to {z}"));
            }
        } else if lo.edge_map.get(e).map(|w| w != &down && w != &down.reversed()).unwrap_or(true) {
            r.fail(format!("edge {e}: bonded walk differs from the stage {n} walk"));
        }
    }
    Ok(r)
}

/// Checks that every `p_n(e)` has `2(n - k) + 2` edges when `e` appears at
/// stage `k`, that consecutive prefixes are strictly nested, and that the
/// prefixes of distinct edges at the last stage are vertex disjoint.
pub fn check_double_rays(emb: &GlEmbedding) -> Report {
    let depth = emb.depth();
    let mut r = Report::new("double_rays", 0, depth);
    let last = &emb.stages[depth];
    for e in last.paths.keys() {
        let Some(born) = emb.stages.iter().position(|st| st.paths.contains_key(e)) else {
            continue;
        };
        for n in born..=depth {
            let p = &emb.stages[n].paths[e];
            if p.len() != 2 * (n - born) + 3 {
                r.fail(format!("p_{n}({e}) has {} edges, expected {}", p.len() - 1, 2 * (n - born) + 2));
            }
            if n > born {
                let q = &emb.stages[n - 1].paths[e];
                let inner: BTreeSet<&BlowupVertex> = p.iter().collect();
                if q.iter().any(|x| !inner.contains(x)) || q.len() >= p.len() {
                    r.fail(format!("p_{}({e}) is not strictly inside p_{n}({e})", n - 1));
                }
            }
        }
    }
    let prefixes: Vec<(&Name, BTreeSet<&BlowupVertex>)> =
        last.paths.iter().map(|(e, p)| (e, p.iter().collect())).collect();
    for (i, (e, a)) in prefixes.iter().enumerate() {
        for (f, b) in &prefixes[i + 1..] {
            if let Some(x) = a.intersection(b).next() {
                r.fail(format!("double rays of {e} and {f} meet at {x}"));
            }
        }
    }
    r
}

/// Notes, for every pair of vertices of the last stage, the first stage at
/// which their images differ, and checks that their nodes stay
/// incomparable from then on.
pub fn check_vertex_separation(emb: &GlEmbedding) -> Report {
    let n = emb.depth();
    let mut r = Report::new("vertex_separation", 0, n);
    let verts: Vec<&Name> = emb.expansion.graphs[n].vertices().iter().collect();
    for (i, x) in verts.iter().enumerate() {
        for y in &verts[i + 1..] {
            let first = (0..=n).find(|&m| emb.vertex_at(x, n, m) != emb.vertex_at(y, n, m));
            let Some(m0) = first else {
                r.fail(format!("{x} and {y} are never separated"));
                continue;
            };
            for m in m0..=n {
                let a = &emb.stages[m].vertex_map[&emb.vertex_at(x, n, m)];
                let b = &emb.stages[m].vertex_map[&emb.vertex_at(y, n, m)];
                if a.comparable(b) {
                    r.fail(format!("{x} and {y} share a branch at stage {m}"));
                }
            }
            r.note(format!("{x} | {y} from stage {m0}"));
        }
    }
    r
}
