//! Verification suites and their machine-readable reports.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::blowup::{self, BlowupParams, Profile};
use crate::embed_lf::{self, warmup};
use crate::graphlike::{self, EdgeContractionSystem};
use crate::locally_finite::{self, Explorer, LazyGraph};
use crate::{embed_gl, Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of a check. A failing report always carries a witness.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    /// First and last stage covered.
    pub stages: [usize; 2],
    pub witnesses: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Report>,
}

impl Report {
    pub fn new(check: impl Into<String>, from: usize, to: usize) -> Self {
        Report {
            check: check.into(),
            status: Status::Pass,
            stages: [from, to],
            witnesses: Vec::new(),
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn fail(&mut self, witness: String) {
        self.status = Status::Fail;
        self.witnesses.push(witness);
    }

    pub fn note(&mut self, note: String) {
        self.notes.push(note);
    }

    /// Attaches a sub-report; a failing child fails the parent.
    pub fn absorb(&mut self, child: Report) {
        if !child.passed() {
            let first = child.witnesses.first().cloned().unwrap_or_default();
            self.fail(format!("{} [{}..{}]: {first}", child.check, child.stages[0], child.stages[1]));
        }
        self.children.push(child);
    }

    /// Records an error as a failure.
    pub fn absorb_result(&mut self, what: &str, res: Result<Report>) {
        match res {
            Ok(r) => self.absorb(r),
            Err(e) => self.fail(format!("{what}: {e}")),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Suite {
    InverseSystem,
    Universal,
    Warmup,
    Contraction,
    GraphLike,
    Star,
}

pub const SUITE_NAMES: &[&str] = &["inverse_system", "thm32", "warmup", "thm41", "thm42", "star"];

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "inverse_system" => Suite::InverseSystem,
            "thm32" | "universal" => Suite::Universal,
            "warmup" | "prop31" => Suite::Warmup,
            "thm41" | "contraction" => Suite::Contraction,
            "thm42" | "graphlike" => Suite::GraphLike,
            "star" => Suite::Star,
            _ => {
                return Err(Error::Invalid(format!(
                    "unknown suite `{s}`; available: {}",
                    SUITE_NAMES.join(", ")
                )))
            }
        })
    }
}

/// Truncations, bonding maps and the oracle ends of a lazy graph up to
/// stage `depth`.
pub fn inverse_system<G: LazyGraph>(ex: &Explorer<G>, depth: usize) -> Report {
    let mut r = Report::new("inverse_system", 1, depth);
    if let Err(e) = inverse_system_into(ex, depth, &mut r) {
        r.fail(e.to_string());
    }
    r
}

fn inverse_system_into<G: LazyGraph>(ex: &Explorer<G>, depth: usize, r: &mut Report) -> Result<()> {
    let mut truncs = Vec::new();
    for n in 1..=depth.max(1) {
        let tr = locally_finite::truncation(ex, n)?;
        if let Some((e, _)) = tr.graph.edges().find(|(_, (a, b))| a == b) {
            r.fail(format!("stage {n} has the loop {e}"));
        }
        // every edge with an end in S_n survives, others vanish
        let h = ex.horizon(n)?;
        let expected = h.induced(0, n).edges().filter(|(_, (a, b))| h.dist[a].min(h.dist[b]) < n).count();
        if tr.graph.num_edges() != expected {
            r.fail(format!("stage {n} has {} edges, expected {expected}", tr.graph.num_edges()));
        }
        r.note(format!("stage {n}: {} dummies", tr.dummies.len()));
        truncs.push(tr);
    }
    for n in 1..depth {
        let b = locally_finite::bonding_between(&truncs[n], &truncs[n - 1])?;
        r.absorb(locally_finite::check_bonding(&truncs[n], &truncs[n - 1], &b));
    }
    let rays = ex.graph().oracle_ends(depth);
    let ends = rays
        .iter()
        .map(|ray| locally_finite::end_prefix(ex, ray, depth))
        .collect::<Result<Vec<_>>>()?;
    for end in &ends {
        for k in 1..depth {
            let up = end.at(k + 1).expect("in range");
            let down = truncs[k - 1].projection.get(up);
            if down != end.at(k) {
                r.fail(format!("end through {up} is inconsistent between stages {k} and {}", k + 1));
            }
        }
    }
    for (i, a) in ends.iter().enumerate() {
        for b in &ends[i + 1..] {
            if a.separation(b).is_none() {
                r.fail(format!("oracle ends {:?} and {:?} are not separated", a.dummies, b.dummies));
            }
        }
    }
    r.note(format!("{} oracle ends", ends.len()));
    Ok(())
}

/// The level-by-level embedding into the `lf` blowup: validity at every
/// depth, extension between depths, the component property at every stage
/// and separation of the lifted oracle ends.
pub fn universal<G: LazyGraph>(ex: &Explorer<G>, depth: usize) -> Report {
    universal_with(ex, depth, None)
}

/// As [`universal`], with an optional replacement level function.
pub fn universal_with<G: LazyGraph>(ex: &Explorer<G>, depth: usize, h: Option<&[usize]>) -> Report {
    let mut r = Report::new("universal_embedding", 0, depth);
    if let Err(e) = universal_into(ex, depth, h, &mut r) {
        r.fail(e.to_string());
    }
    r
}

fn universal_into<G: LazyGraph>(ex: &Explorer<G>, depth: usize, h: Option<&[usize]>, r: &mut Report) -> Result<()> {
    let level = match h {
        Some(h) => h.to_vec(),
        None => embed_lf::level_function(ex, embed_lf::Recurrence::Universal, depth)?,
    };
    r.note(format!("h = {level:?}"));
    let mut prev: Option<embed_lf::Embedding<G::Vertex>> = None;
    for m in 0..=depth {
        let emb = embed_lf::embed_with(ex, m, &level)?;
        let mut v = embed_lf::validate(&emb);
        v.stages = [m, m];
        r.absorb(v);
        if let Some(p) = &prev {
            let (vm, em) = emb.restrict(m - 1);
            if vm != p.vertex_map || em != p.edge_map {
                r.fail(format!("depth {m} does not extend depth {}", m - 1));
            }
        }
        prev = Some(emb);
    }
    let emb = prev.expect("depth 0 exists");
    for k in 0..=depth {
        r.absorb(embed_lf::verify_star(&emb, k));
    }
    let rays = ex.graph().oracle_ends(depth);
    let lifted = rays
        .iter()
        .map(|ray| embed_lf::lift_end(&emb, &locally_finite::end_prefix(ex, ray, depth)?))
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in lifted.iter().enumerate() {
        for b in &lifted[i + 1..] {
            match a.separation(b) {
                Some(k) => {
                    if a.addrs[k].comparable(&b.addrs[k]) {
                        r.fail(format!("lifted ends share a branch at stage {k}"));
                    }
                }
                None => r.fail(format!("lifted ends {:?} and {:?} coincide", a.addrs, b.addrs)),
            }
        }
    }
    r.note(format!("{} lifted ends", lifted.len()));
    Ok(())
}

pub fn warmup<G: LazyGraph>(ex: &Explorer<G>, depth: usize) -> Report {
    let mut r = Report::new("clique_embedding", 0, depth);
    match warmup::embed(ex, depth) {
        Ok(emb) => {
            r.note(format!("h = {:?}", emb.h));
            r.absorb(warmup::validate(&emb));
        }
        Err(e) => r.fail(e.to_string()),
    }
    r
}

pub fn contraction(sys: &EdgeContractionSystem, depth: usize) -> Report {
    let mut r = Report::new("edge_contraction", 0, depth);
    r.absorb(graphlike::validate(sys, depth));
    if depth == sys.len() {
        // rebuilding from the top stage must give the same system
        match sys.stage(depth).and_then(|g| {
            let order: Vec<_> = sys.steps.iter().map(|s| s.edge.clone()).collect();
            graphlike::from_finite_graph(&g, &order)
        }) {
            Ok(again) => match (again.expansion(depth), sys.expansion(depth)) {
                (Ok(a), Ok(b)) if a.graphs == b.graphs => {}
                _ => r.fail("rebuilding from the last stage changes some stage".into()),
            },
            Err(e) => r.fail(e.to_string()),
        }
    }
    r
}

pub fn graph_like(sys: &EdgeContractionSystem, depth: usize) -> Report {
    let mut r = Report::new("graphlike_embedding", 0, depth);
    let emb = match embed_gl::embed(sys, depth) {
        Ok(e) => e,
        Err(e) => {
            r.fail(e.to_string());
            return r;
        }
    };
    r.absorb(embed_gl::check_properties(&emb));
    for n in 0..depth {
        r.absorb_result("commuting square", embed_gl::check_commute(&emb, n));
    }
    for n in 0..=depth {
        match embed_gl::stage_map(&emb, n) {
            Ok(sm) => r.absorb(embed_gl::check_stage_map(&sm, &emb.expansion.graphs[n])),
            Err(e) => r.fail(e.to_string()),
        }
    }
    r.absorb(embed_gl::check_double_rays(&emb));
    r.absorb(embed_gl::check_vertex_separation(&emb));
    r
}

pub fn star(profile: Profile, depth: usize) -> Report {
    let mut r = Report::new("star_bijection", 0, depth);
    for n in 0..=depth {
        r.absorb_result("star bijection", blowup::check_star_bijection(BlowupParams::new(profile), n));
    }
    r
}

/// Runs `suite` on a named target: a graph for the lazy-graph suites, a
/// system for the contraction suites, a profile for `star`.
pub fn run(suite: Suite, target: &str, depth: usize) -> Result<Report> {
    match suite {
        Suite::InverseSystem => crate::with_graph!(target, |g| inverse_system(&Explorer::new(g), depth)),
        Suite::Universal => crate::with_graph!(target, |g| universal(&Explorer::new(g), depth)),
        Suite::Warmup => crate::with_graph!(target, |g| warmup(&Explorer::new(g), depth)),
        Suite::Contraction => Ok(contraction(&graphlike::builders::by_name(target)?, depth)),
        Suite::GraphLike => Ok(graph_like(&graphlike::builders::by_name(target)?, depth)),
        Suite::Star => Ok(star(target.parse()?, depth)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_is_stable() {
        let mut r = Report::new("x", 0, 2);
        r.fail("boom".into());
        let text = r.to_json();
        assert_eq!(
            text,
            "{\n  \"check\": \"x\",\n  \"status\": \"fail\",\n  \"stages\": [\n    0,\n    2\n  ],\n  \"witnesses\": [\n    \"boom\"\n  ]\n}"
        );
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn failing_child_fails_parent_with_witness() {
        let mut parent = Report::new("p", 0, 1);
        let mut child = Report::new("c", 1, 1);
        child.fail("bad".into());
        parent.absorb(child);
        assert!(!parent.passed());
        assert!(parent.witnesses[0].contains("bad"));
    }

    #[test]
    fn suites_pass_on_small_targets() {
        for (suite, target, depth) in [
            (Suite::InverseSystem, "binary_tree", 3),
            (Suite::InverseSystem, "double_ray", 3),
            (Suite::Universal, "quadrant_grid", 3),
            (Suite::Warmup, "ladder", 3),
            (Suite::Contraction, "k4", 6),
            (Suite::GraphLike, "hawaiian:2", 4),
            (Suite::Star, "lf", 3),
        ] {
            let r = run(suite, target, depth).unwrap();
            assert!(r.passed(), "{suite:?} on {target}: {:?}", r.witnesses);
        }
        assert!(run(Suite::Universal, "nope", 1).is_err());
    }
}
