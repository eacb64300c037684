//! Tree blowups of the rooted binary tree.
//!
//! Every node `t` of the binary tree is replaced by a clique `K(t)` whose
//! size depends only on the level of `t`, and every vertex of `K(t)` is
//! joined to every vertex of the cliques of the children of `t`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::limits;
use crate::locally_finite::builders::BinaryTree;
use crate::locally_finite::{self, Explorer, ExploredGraph, Truncation};
use crate::multigraph::{FiniteMultigraph, Link};
use crate::verify::Report;
use crate::{Error, Result};

/// A node of the binary tree, as the word of child choices from the root.
/// The derived order is lexicographic with prefixes first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct TreeAddr {
    bits: Vec<bool>,
}

impl TreeAddr {
    pub fn root() -> Self {
        TreeAddr::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        TreeAddr {
            bits: bits.into_iter().collect(),
        }
    }

    /// The all-zero address at `level`.
    pub fn leftmost(level: usize) -> Self {
        TreeAddr {
            bits: vec![false; level],
        }
    }

    /// Accepts `r0110`, `0110`, `r` and the empty string.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s.strip_prefix('r').unwrap_or(s);
        body.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Invalid(format!("bad tree address `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(|bits| TreeAddr { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn level(&self) -> usize {
        self.bits.len()
    }

    pub fn parent(&self) -> Option<Self> {
        self.bits.split_last().map(|(_, rest)| TreeAddr { bits: rest.to_vec() })
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(bit);
        TreeAddr { bits }
    }

    /// The ancestor at `level` (self if `level >= self.level()`).
    pub fn prefix(&self, level: usize) -> Self {
        TreeAddr {
            bits: self.bits[..level.min(self.bits.len())].to_vec(),
        }
    }

    /// Tree order: `self ≤ other`.
    pub fn is_ancestor_of(&self, other: &Self) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn is_strict_ancestor_of(&self, other: &Self) -> bool {
        self.level() < other.level() && self.is_ancestor_of(other)
    }

    pub fn comparable(&self, other: &Self) -> bool {
        self.is_ancestor_of(other) || other.is_ancestor_of(self)
    }

    /// Descendants of `self` at `level`, leftmost first.
    pub fn descendants(&self, level: usize) -> impl Iterator<Item = TreeAddr> + '_ {
        let extra = level.saturating_sub(self.level());
        let count: u64 = if level < self.level() { 0 } else { 1 << extra };
        (0..count).map(move |w| {
            let mut bits = self.bits.clone();
            bits.extend((0..extra).map(|i| w >> (extra - 1 - i) & 1 == 1));
            TreeAddr { bits }
        })
    }
}

impl fmt::Display for TreeAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("r")?;
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TreeAddr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TreeAddr::parse(s)
    }
}

/// Block size profile.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `|K(t)| = n + 1` at level `n`; universal for locally finite graphs.
    Lf,
    /// `|K(t)| = 2n + 1` at level `n`; used for graph-like continua.
    Gl,
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lf" | "universal_lf" | "blowup_lf" => Ok(Profile::Lf),
            "gl" | "universal_gl" | "blowup_gl" => Ok(Profile::Gl),
            _ => Err(Error::Invalid(format!("unknown blowup profile `{s}`; available: lf, gl"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BlowupParams {
    pub profile: Profile,
}

impl BlowupParams {
    pub fn new(profile: Profile) -> Self {
        BlowupParams { profile }
    }

    pub fn block_size(&self, level: usize) -> u32 {
        let n = level as u32;
        match self.profile {
            Profile::Lf => n + 1,
            Profile::Gl => 2 * n + 1,
        }
    }

    pub fn is_vertex(&self, v: &BlowupVertex) -> bool {
        v.index < self.block_size(v.addr.level())
    }

    /// Vertices of the blowup at levels `< n`.
    pub fn count_below(&self, n: usize) -> usize {
        (0..n).map(|k| (self.block_size(k) as usize) << k).sum()
    }
}

/// Vertex `index` of the clique `K(addr)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BlowupVertex {
    pub addr: TreeAddr,
    pub index: u32,
}

impl BlowupVertex {
    pub fn new(addr: TreeAddr, index: u32) -> Self {
        BlowupVertex { addr, index }
    }

    pub fn level(&self) -> usize {
        self.addr.level()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (a, i) = s
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("bad blowup vertex `{s}`")))?;
        let index = i
            .parse()
            .map_err(|_| Error::Invalid(format!("bad blowup vertex `{s}`")))?;
        Ok(BlowupVertex::new(TreeAddr::parse(a)?, index))
    }
}

impl fmt::Display for BlowupVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.addr, self.index)
    }
}

pub type BlowupEdge = Link<BlowupVertex>;

/// Adjacency in the blowup.
pub fn adjacent(p: BlowupParams, u: &BlowupVertex, w: &BlowupVertex) -> bool {
    if !p.is_vertex(u) || !p.is_vertex(w) {
        return false;
    }
    if u.addr == w.addr {
        return u.index != w.index;
    }
    u.addr.parent().as_ref() == Some(&w.addr) || w.addr.parent().as_ref() == Some(&u.addr)
}

/// The induced subgraph on the levels `0..=n`.
pub fn level_subgraph(p: BlowupParams, n: usize) -> Result<ExploredGraph<BlowupVertex>> {
    limits::check_vertices(p.count_below(n + 1))?;
    let mut g = FiniteMultigraph::new();
    for level in 0..=n {
        for t in TreeAddr::root().descendants(level) {
            for v in block(p, &t) {
                g.add_vertex(v)?;
            }
        }
    }
    for level in 0..=n {
        for t in TreeAddr::root().descendants(level) {
            let here: Vec<BlowupVertex> = block(p, &t).collect();
            for (i, a) in here.iter().enumerate() {
                for b in &here[i + 1..] {
                    g.add_edge(Link::new(a.clone(), b.clone()), a.clone(), b.clone())?;
                }
            }
            if let Some(parent) = t.parent() {
                for a in block(p, &parent) {
                    for b in &here {
                        g.add_edge(Link::new(a.clone(), b.clone()), a.clone(), b.clone())?;
                    }
                }
            }
        }
    }
    Ok(g)
}

pub fn block(p: BlowupParams, t: &TreeAddr) -> impl Iterator<Item = BlowupVertex> + '_ {
    (0..p.block_size(t.level())).map(move |i| BlowupVertex::new(t.clone(), i))
}

/// A path in the blowup whose levels increase by one at every step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotonePath {
    pub vertices: Vec<BlowupVertex>,
}

impl MonotonePath {
    pub fn interior(&self) -> &[BlowupVertex] {
        let n = self.vertices.len();
        if n <= 2 {
            &[]
        } else {
            &self.vertices[1..n - 1]
        }
    }
}

/// Routes a monotone path from `from` down to `to`, avoiding `avoid`.
///
/// Requires `from.addr < to.addr` in the tree order, `avoid` on levels at
/// least `level(from)` with at most `level(from)` vertices per level, and
/// neither endpoint in `avoid`. At every intermediate level the path takes
/// the lowest-index free vertex of the block on the way to `to`.
pub fn monotone_path(
    p: BlowupParams,
    from: &BlowupVertex,
    to: &BlowupVertex,
    avoid: &BTreeSet<BlowupVertex>,
) -> Result<MonotonePath> {
    for v in [from, to] {
        if !p.is_vertex(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
    }
    if !from.addr.is_strict_ancestor_of(&to.addr) {
        return Err(Error::Incomparable(from.addr.to_string(), to.addr.to_string()));
    }
    let n = from.level();
    let mut per_level: BTreeMap<usize, usize> = BTreeMap::new();
    for x in avoid {
        if x.level() < n {
            return Err(Error::AvoidBound(format!("{x} lies above level {n}")));
        }
        *per_level.entry(x.level()).or_default() += 1;
    }
    if let Some((level, count)) = per_level.iter().find(|(_, &c)| c > n) {
        return Err(Error::AvoidBound(format!("{count} avoided vertices on level {level}, at most {n} allowed")));
    }
    if let Some(v) = [from, to].into_iter().find(|v| avoid.contains(*v)) {
        return Err(Error::AvoidBound(format!("endpoint {v} is avoided")));
    }
    let mut vertices = vec![from.clone()];
    for level in n + 1..to.level() {
        let t = to.addr.prefix(level);
        let v = block(p, &t)
            .find(|v| !avoid.contains(v))
            .ok_or_else(|| Error::Capacity(format!("block {t} is fully avoided")))?;
        vertices.push(v);
    }
    vertices.push(to.clone());
    Ok(MonotonePath { vertices })
}

/// Stage `n` of the inverse system of the blowup, keeping the levels `< n`
/// and contracting each `K(t)`-rooted subtree for `t` at level `n` to the
/// dummy `(t, 0)`.
pub fn truncate_below(p: BlowupParams, n: usize) -> Result<Truncation<BlowupVertex>> {
    limits::check_vertices(p.count_below(n) + (1 << n))?;
    let q = |v: &BlowupVertex| {
        if v.level() < n {
            v.clone()
        } else {
            BlowupVertex::new(v.addr.prefix(n), 0)
        }
    };
    let mut graph = FiniteMultigraph::new();
    let mut dummies = BTreeMap::new();
    let mut projection = BTreeMap::new();
    for level in 0..=n {
        for t in TreeAddr::root().descendants(level) {
            for v in block(p, &t) {
                projection.insert(v.clone(), q(&v));
            }
            if level < n {
                for v in block(p, &t) {
                    graph.add_vertex(v)?;
                }
            } else {
                let d = BlowupVertex::new(t.clone(), 0);
                graph.add_vertex(d.clone())?;
                dummies.insert(d, block(p, &t).collect::<BTreeSet<_>>());
            }
        }
    }
    for level in 0..n {
        for t in TreeAddr::root().descendants(level) {
            let here: Vec<BlowupVertex> = block(p, &t).collect();
            for (i, a) in here.iter().enumerate() {
                for b in &here[i + 1..] {
                    graph.add_edge(Link::new(a.clone(), b.clone()), a.clone(), b.clone())?;
                }
            }
            for child in [t.child(false), t.child(true)] {
                for a in &here {
                    for b in block(p, &child) {
                        let e = Link::new(a.clone(), b.clone());
                        graph.add_edge(e, a.clone(), q(&b))?;
                    }
                }
            }
        }
    }
    Ok(Truncation {
        stage: n,
        graph,
        dummies,
        projection,
    })
}

/// Stage `n` truncation that keeps `T^{≤n}` and has one dummy per node at
/// level `n + 1`.
pub fn blowup_truncation(p: BlowupParams, n: usize) -> Result<Truncation<BlowupVertex>> {
    truncate_below(p, n + 1)
}

/// Compares the dummies of [`blowup_truncation`] with the dummies of the
/// binary tree truncation at the same depth, computed independently by
/// lazy exploration of the tree, and checks that projecting the blowup
/// truncation onto the tree is a graph map.
pub fn check_star_bijection(p: BlowupParams, n: usize) -> Result<Report> {
    let mut r = Report::new("star_bijection", n, n);
    let blown = blowup_truncation(p, n)?;
    let tree = locally_finite::truncation(&Explorer::new(BinaryTree), n + 1)?;

    let from_blowup: BTreeSet<TreeAddr> = blown.dummies.keys().map(|d| d.addr.clone()).collect();
    let from_tree: BTreeSet<TreeAddr> = tree.dummies.keys().cloned().collect();
    r.note(format!("{} dummies in the blowup, {} in the tree", from_blowup.len(), from_tree.len()));
    if from_blowup.len() != blown.dummies.len() {
        r.fail("two blowup dummies share a tree node".to_string());
    }
    for t in from_blowup.symmetric_difference(&from_tree) {
        r.fail(format!("dummy node {t} is not matched"));
    }
    for (d, members) in &blown.dummies {
        if let Some(tm) = tree.dummies.get(&d.addr) {
            // the tree dummy's explored members are t and its children
            let expected: BTreeSet<&TreeAddr> = tm.iter().filter(|a| a.level() == n + 1).collect();
            let got: BTreeSet<&TreeAddr> = members.iter().map(|v| &v.addr).collect();
            if expected != got {
                r.fail(format!("dummy {d} covers {got:?}, tree dummy covers {expected:?}"));
            }
        }
    }
    for (e, (a, b)) in blown.graph.edges() {
        let (ta, tb) = (&a.addr, &b.addr);
        let fine = ta == tb || tree.graph.has_edge(&Link::new(ta.clone(), tb.clone()));
        if !fine {
            r.fail(format!("edge {e} projects to the non-edge {ta}, {tb}"));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeAddr {
        TreeAddr::parse(s).unwrap()
    }

    fn v(s: &str) -> BlowupVertex {
        BlowupVertex::parse(s).unwrap()
    }

    const LF: BlowupParams = BlowupParams { profile: Profile::Lf };
    const GL: BlowupParams = BlowupParams { profile: Profile::Gl };

    #[test]
    fn addresses() {
        assert_eq!(t("r01").to_string(), "r01");
        assert_eq!(t("").to_string(), "r");
        assert_eq!(t("01").parent(), Some(t("0")));
        assert!(t("0").is_strict_ancestor_of(&t("011")));
        assert!(!t("0").comparable(&t("10")));
        assert!(t("r").is_ancestor_of(&t("r")));
        let d: Vec<String> = t("1").descendants(3).map(|a| a.to_string()).collect();
        assert_eq!(d, ["r100", "r101", "r110", "r111"]);
        assert!(TreeAddr::parse("r2").is_err());
        assert_eq!(v("r01:2"), BlowupVertex::new(t("01"), 2));
    }

    #[test]
    fn block_sizes() {
        let lf: Vec<u32> = (0..5).map(|n| LF.block_size(n)).collect();
        let gl: Vec<u32> = (0..5).map(|n| GL.block_size(n)).collect();
        assert_eq!(lf, [1, 2, 3, 4, 5]);
        assert_eq!(gl, [1, 3, 5, 7, 9]);
    }

    #[test]
    fn adjacency_rules() {
        assert!(adjacent(LF, &v("r0:0"), &v("r0:1")));
        assert!(!adjacent(LF, &v("r0:0"), &v("r0:0")));
        assert!(adjacent(LF, &v("r:0"), &v("r1:1")));
        assert!(!adjacent(LF, &v("r:0"), &v("r11:0")));
        assert!(!adjacent(LF, &v("r0:0"), &v("r1:0")));
        assert!(!adjacent(LF, &v("r0:2"), &v("r00:0")));
        assert!(adjacent(GL, &v("r0:2"), &v("r00:0")));
    }

    #[test]
    fn level_subgraph_counts() {
        // oracle: sum over levels of 2^k s(k) vertices, clique edges plus joins
        for (p, n) in [(LF, 3), (GL, 3)] {
            let g = level_subgraph(p, n).unwrap();
            let mut verts = 0;
            let mut edges = 0;
            for k in 0..=n {
                let s = p.block_size(k) as usize;
                verts += s << k;
                edges += (s * (s - 1) / 2) << k;
                if k > 0 {
                    edges += (s * p.block_size(k - 1) as usize) << k;
                }
            }
            assert_eq!(g.num_vertices(), verts);
            assert_eq!(g.num_edges(), edges);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn monotone_path_examples() {
        let path = monotone_path(LF, &v("r0:0"), &v("r010:0"), &BTreeSet::from([v("r01:0")])).unwrap();
        assert_eq!(path.vertices, [v("r0:0"), v("r01:1"), v("r010:0")]);

        let path = monotone_path(LF, &v("r:0"), &v("r0:1"), &BTreeSet::new()).unwrap();
        assert_eq!(path.vertices.len(), 2);

        assert!(matches!(
            monotone_path(LF, &v("r0:0"), &v("r1:0"), &BTreeSet::new()),
            Err(Error::Incomparable(..))
        ));
        assert!(matches!(
            monotone_path(LF, &v("r0:0"), &v("r0:1"), &BTreeSet::new()),
            Err(Error::Incomparable(..))
        ));
        let crowded = BTreeSet::from([v("r01:0"), v("r01:1")]);
        assert!(matches!(
            monotone_path(LF, &v("r0:0"), &v("r010:0"), &crowded),
            Err(Error::AvoidBound(..))
        ));
        assert!(matches!(
            monotone_path(LF, &v("r0:0"), &v("r010:0"), &BTreeSet::from([v("r:0")])),
            Err(Error::AvoidBound(..))
        ));
    }

    #[test]
    fn blowup_truncation_matches_generic_contraction() {
        for p in [LF, GL] {
            for n in 0..3 {
                let direct = blowup_truncation(p, n).unwrap();
                assert_eq!(direct.dummies.len(), 1 << (n + 1));
                // oracle: contract the level subgraph partition-wise
                let full = level_subgraph(p, n + 1).unwrap();
                let mut blocks: Vec<BTreeSet<BlowupVertex>> = full
                    .vertices()
                    .iter()
                    .filter(|x| x.level() <= n)
                    .map(|x| BTreeSet::from([x.clone()]))
                    .collect();
                blocks.extend(TreeAddr::root().descendants(n + 1).map(|t| block(p, &t).collect()));
                let (generic, _) = full.contract_partition(&blocks).unwrap();
                assert_eq!(generic, direct.graph, "profile {p:?}, n = {n}");
            }
        }
    }

    #[test]
    fn star_bijection_holds() {
        for n in 0..5 {
            let r = check_star_bijection(LF, n).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn blowup_truncation_agrees_with_lazy_exploration() {
        use crate::locally_finite::builders::Blowup;
        let lazy = locally_finite::truncation(&Explorer::new(Blowup::lf()), 3).unwrap();
        let direct = truncate_below(LF, 3).unwrap();
        assert_eq!(lazy.graph, direct.graph);
        assert_eq!(lazy.dummies.keys().collect::<Vec<_>>(), direct.dummies.keys().collect::<Vec<_>>());
    }
}
