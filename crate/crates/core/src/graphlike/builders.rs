//! Named edge-contraction systems.

use std::collections::BTreeMap;

use super::{apply_step, from_finite_graph, EdgeContractionSystem, Incidence, StageGraph, StepKind, UncontractionStep};
use crate::multigraph::FiniteMultigraph;
use crate::{Error, Name, Result};

pub const SYSTEM_NAMES: &[&str] = &["hawaiian:<k>", "sierpinski:<depth>", "cycle:<n>", "theta", "dumbbell", "k4"];

fn edge(i: usize) -> Name {
    Name::new(format!("e{i}"))
}

/// `k` circles glued at the vertex `0`: circle `c` is the loop `e(2c-1)`
/// split by `e(2c)` into a digon on `0` and `c`.
pub fn hawaiian(k: usize) -> EdgeContractionSystem {
    let root = Name::from("0");
    let mut steps = Vec::with_capacity(2 * k);
    let mut g = FiniteMultigraph::from_parts([root.clone()], []).expect("single vertex");
    for c in 1..=k {
        let lp = UncontractionStep {
            edge: edge(2 * c - 1),
            kind: StepKind::Loop { at: root.clone() },
        };
        let (next, _) = apply_step(&g, &lp, 2 * c - 1).expect("valid loop");
        let mut assign = BTreeMap::new();
        for (e, (a, b)) in next.edges() {
            for (slot, x) in [a, b].into_iter().enumerate() {
                if x == &root {
                    assign.insert(Incidence::new(e.clone(), slot as u8), root.clone());
                }
            }
        }
        assign.insert(Incidence::new(edge(2 * c - 1), 1), Name::new(c.to_string()));
        let split = UncontractionStep {
            edge: edge(2 * c),
            kind: StepKind::Split {
                at: root.clone(),
                into: (root.clone(), Name::new(c.to_string())),
                assign,
            },
        };
        let (after, _) = apply_step(&next, &split, 2 * c).expect("valid split");
        g = after;
        steps.push(lp);
        steps.push(split);
    }
    EdgeContractionSystem { root, steps }
}

fn graph(vertices: &[&str], edges: &[(&str, &str)]) -> StageGraph {
    FiniteMultigraph::from_parts(
        vertices.iter().map(|v| Name::from(*v)),
        edges.iter().enumerate().map(|(i, (a, b))| (edge(i + 1), Name::from(*a), Name::from(*b))),
    )
    .expect("valid graph")
}

fn in_order(g: &StageGraph) -> EdgeContractionSystem {
    let order: Vec<Name> = g.edge_labels().cloned().collect();
    from_finite_graph(g, &order).expect("connected")
}

/// The cycle `C_n` on `0..n`, edge `ei` joining `i-1` and `i mod n`.
pub fn cycle(n: usize) -> EdgeContractionSystem {
    assert!(n >= 1);
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let vs: Vec<&str> = names.iter().map(String::as_str).collect();
    let es: Vec<(&str, &str)> = (1..=n).map(|i| (vs[i - 1], vs[i % n])).collect();
    in_order(&graph(&vs, &es))
}

/// Two poles joined by paths of lengths 1, 2 and 2.
pub fn theta() -> EdgeContractionSystem {
    in_order(&graph(&["n", "s", "u", "w"], &[("n", "s"), ("n", "u"), ("u", "s"), ("n", "w"), ("w", "s")]))
}

/// Two vertices joined by three parallel edges.
pub fn dumbbell3() -> EdgeContractionSystem {
    in_order(&graph(&["a", "b"], &[("a", "b"), ("a", "b"), ("a", "b")]))
}

pub fn k4() -> EdgeContractionSystem {
    let v = ["a", "b", "c", "d"];
    let mut es = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            es.push((v[i], v[j]));
        }
    }
    in_order(&graph(&v, &es))
}

/// The depth-`d` Sierpinski graph: ternary words of length `d` (letters
/// `a`, `b`, `c`, prefixed by `t`). At depth `l` the copies `wi` and `wj`
/// are joined at `wij..j` and `wji..i`. Edges are numbered level by level.
pub fn sierpinski(depth: usize) -> StageGraph {
    const L: [char; 3] = ['a', 'b', 'c'];
    fn words(len: usize) -> Vec<String> {
        (0..len).fold(vec![String::new()], |acc, _| {
            acc.iter().flat_map(|w| L.iter().map(move |c| format!("{w}{c}"))).collect()
        })
    }
    let mut g = FiniteMultigraph::new();
    for w in words(depth) {
        g.add_vertex(Name::new(format!("t{w}"))).expect("fresh");
    }
    let mut count = 0;
    for level in 1..=depth {
        for w in words(level - 1) {
            for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                let tail = |c: char| c.to_string().repeat(depth - level);
                let a = format!("t{w}{}{}", L[i], tail(L[j]));
                let b = format!("t{w}{}{}", L[j], tail(L[i]));
                count += 1;
                g.add_edge(edge(count), a.into(), b.into()).expect("fresh");
            }
        }
    }
    g
}

pub fn sierpinski_graphlike(depth: usize) -> EdgeContractionSystem {
    in_order(&sierpinski(depth))
}

/// Resolves `hawaiian:<k>`, `sierpinski:<d>`, `cycle:<n>`, `theta`,
/// `dumbbell`, `k4` and `file:<path.json>`.
pub fn by_name(target: &str) -> Result<EdgeContractionSystem> {
    let (name, arg) = match target.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (target, None),
    };
    let num = |default: usize| -> Result<usize> {
        arg.map_or(Ok(default), |a| {
            a.parse().map_err(|_| Error::Invalid(format!("bad parameter in `{target}`")))
        })
    };
    match name {
        "hawaiian" => Ok(hawaiian(num(8)?)),
        "sierpinski" => Ok(sierpinski_graphlike(num(2)?)),
        "cycle" => match num(4)? {
            0 => Err(Error::Invalid("cycle needs at least one vertex".into())),
            n => Ok(cycle(n)),
        },
        "theta" => Ok(theta()),
        "dumbbell" => Ok(dumbbell3()),
        "k4" => Ok(k4()),
        "file" => {
            let path = arg.unwrap_or_default();
            let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
            EdgeContractionSystem::from_json(&text)
        }
        _ => Err(Error::Invalid(format!(
            "unknown system `{target}`; available: {}, file:<path.json>",
            SYSTEM_NAMES.join(", ")
        ))),
    }
}
