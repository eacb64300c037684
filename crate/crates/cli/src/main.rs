use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ends_universal::blowup::{self, BlowupParams, BlowupVertex, Profile};
use ends_universal::embed_lf::{self, warmup};
use ends_universal::graphlike::builders as systems;
use ends_universal::locally_finite::{self, Explorer, LazyGraph};
use ends_universal::multigraph::{FiniteMultigraph, Label};
use ends_universal::verify::{self, Report, Suite};
use ends_universal::{embed_gl, with_graph, Error};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "ends-universal", version, about = "Finite stages of ends, blowups and universal embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a blowup, a graph prefix or a contraction stage.
    #[command(subcommand)]
    Gen(Gen),
    /// Stage-`n` truncation of a graph, dummies marked.
    Truncate {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Embed a locally finite graph up to a depth.
    Embed {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Target::LfBlowup)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        emit: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Embed a contraction system into the gl blowup.
    EmbedGl {
        #[arg(long)]
        system: String,
        /// Defaults to the number of steps of the system.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        emit: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, conflicts_with_all = ["system", "profile"])]
        graph: Option<String>,
        #[arg(long, conflicts_with = "profile")]
        system: Option<String>,
        #[arg(long, value_parser = parse_profile)]
        profile: Option<Profile>,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Export a whole inverse system (truncations and bonding maps) or a
    /// contraction system as JSON.
    Export {
        #[arg(long, conflicts_with = "system", required_unless_present = "system")]
        graph: Option<String>,
        #[arg(long)]
        system: Option<String>,
        /// Last stage of a graph's inverse system.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Levels `0..=depth` of a tree blowup.
    Blowup {
        #[arg(long, value_parser = parse_profile)]
        profile: Profile,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// The ball `G[D^{≤depth}]` of a named graph.
    Graph {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Stage `depth` of a contraction system.
    System {
        #[arg(long)]
        system: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Out {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    LfBlowup,
    Stacked,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit status 2: bad flags or names. Everything else found after
/// validation exits with 1.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Checks a graph name (and loads `file:` graphs) before any exploration.
fn check_graph(name: &str) -> Result<(), Failure> {
    with_graph!(name, |_g| ()).map_err(usage)
}

fn emit(out: &Out, text: String) -> Result<(), Failure> {
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise")
}

fn strings<T: Display>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

fn graph_prefix<G: LazyGraph>(g: G, depth: usize, format: Format) -> Result<String, Failure> {
    let p = locally_finite::prefix(&Explorer::new(g), depth)?;
    Ok(match format {
        Format::Json => p.graph.to_json().to_string_pretty(),
        Format::Dot => p.graph.to_dot("prefix"),
    })
}

fn truncate<G: LazyGraph>(g: G, depth: usize, format: Format) -> Result<String, Failure> {
    let tr = locally_finite::truncation(&Explorer::new(g), depth)?;
    Ok(match format {
        Format::Json => tr.to_json().to_string_pretty(),
        Format::Dot => tr.to_dot(&format!("truncation_{depth}")),
    })
}

/// The union of the image paths as a graph on blowup or clique vertices.
fn image_dot<X: Label + Display>(name: &str, vertices: &[X], paths: &[(String, Vec<X>)]) -> String {
    let mut g: FiniteMultigraph<X, String> = FiniteMultigraph::new();
    for v in vertices.iter().chain(paths.iter().flat_map(|(_, p)| p.iter())) {
        if !g.has_vertex(v) {
            g.add_vertex(v.clone()).expect("fresh vertex");
        }
    }
    for (e, p) in paths {
        for (i, w) in p.windows(2).enumerate() {
            g.add_edge(format!("{e}.{i}"), w[0].clone(), w[1].clone()).expect("fresh edge");
        }
    }
    g.to_dot(name)
}

fn embed<G: LazyGraph>(g: G, depth: usize, target: Target, format: Format) -> Result<(String, bool), Failure> {
    let ex = Explorer::new(g);
    let (h, vertices, paths, report) = match target {
        Target::LfBlowup => {
            let emb = embed_lf::embed(&ex, depth)?;
            let paths: Vec<(String, Vec<String>)> =
                emb.edge_map.iter().map(|(e, p)| (e.to_string(), strings(p))).collect();
            let vertices: Vec<(String, String)> =
                emb.vertex_map.iter().map(|(v, x)| (v.to_string(), x.to_string())).collect();
            if let Format::Dot = format {
                let images: Vec<BlowupVertex> = emb.vertex_map.values().cloned().collect();
                let ps: Vec<(String, Vec<BlowupVertex>)> =
                    emb.edge_map.iter().map(|(e, p)| (e.to_string(), p.clone())).collect();
                return Ok((image_dot("embedding", &images, &ps), embed_lf::validate(&emb).passed()));
            }
            (emb.h.clone(), vertices, paths, embed_lf::validate(&emb))
        }
        Target::Stacked => {
            let emb = warmup::embed(&ex, depth)?;
            if let Format::Dot = format {
                let images: Vec<_> = emb.vertex_map.values().cloned().collect();
                let ps: Vec<_> = emb.edge_map.iter().map(|(e, p)| (e.to_string(), p.clone())).collect();
                return Ok((image_dot("embedding", &images, &ps), warmup::validate(&emb).passed()));
            }
            let paths = emb.edge_map.iter().map(|(e, p)| (e.to_string(), strings(p))).collect();
            let vertices = emb.vertex_map.iter().map(|(v, x)| (v.to_string(), x.to_string())).collect();
            (emb.h.clone(), vertices, paths, warmup::validate(&emb))
        }
    };
    let passed = report.passed();
    let doc = json!({
        "depth": depth,
        "h": h,
        "vertex_map": vertices.into_iter().map(|(v, x)| (v, Value::String(x))).collect::<Map<_, _>>(),
        "edge_paths": paths.into_iter().map(|(e, p)| (e, json!(p))).collect::<Map<_, _>>(),
        "report": serde_json::from_str::<Value>(&report.to_json()).expect("report json"),
    });
    Ok((pretty(&doc), passed))
}

fn inverse_system_json<G: LazyGraph>(g: G, depth: usize) -> Result<String, Failure> {
    let ex = Explorer::new(g);
    let mut stages = Vec::new();
    let mut bondings = Vec::new();
    for n in 1..=depth.max(1) {
        let tr = locally_finite::truncation(&ex, n)?;
        stages.push(serde_json::to_value(tr.to_json()).expect("json graph"));
        if n > 1 {
            let b = locally_finite::bonding(&ex, n - 1)?;
            let edges: Map<String, Value> = b
                .edge_map
                .iter()
                .map(|(e, img)| {
                    let v = match img {
                        locally_finite::EdgeImage::Edge(f) => json!({ "edge": f.to_string() }),
                        locally_finite::EdgeImage::Vertex(x) => json!({ "vertex": x.to_string() }),
                    };
                    (e.to_string(), v)
                })
                .collect();
            bondings.push(json!({
                "from": n,
                "to": n - 1,
                "vertices": b.vertex_map.iter().map(|(v, x)| (v.to_string(), json!(x.to_string()))).collect::<Map<_, _>>(),
                "edges": edges,
            }));
        }
    }
    Ok(pretty(&json!({ "stages": stages, "bonding_maps": bondings })))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Gen(Gen::Blowup {
            profile,
            depth,
            format,
            out,
        }) => {
            let g = blowup::level_subgraph(BlowupParams::new(profile), depth)?;
            let text = match format {
                Format::Json => g.to_json().to_string_pretty(),
                Format::Dot => g.to_dot(&format!("blowup_{}", profile_name(profile))),
            };
            emit(&out, text)?;
        }
        Command::Gen(Gen::Graph {
            graph,
            depth,
            format,
            out,
        }) => {
            check_graph(&graph)?;
            let text = with_graph!(&graph, |g| graph_prefix(g, depth, format)).map_err(usage)??;
            emit(&out, text)?;
        }
        Command::Gen(Gen::System {
            system,
            depth,
            format,
            out,
        }) => {
            let sys = systems::by_name(&system).map_err(usage)?;
            let g = sys.stage(depth.unwrap_or(sys.len()))?;
            let text = match format {
                Format::Json => g.to_json().to_string_pretty(),
                Format::Dot => g.to_dot("stage"),
            };
            emit(&out, text)?;
        }
        Command::Truncate {
            graph,
            depth,
            format,
            out,
        } => {
            check_graph(&graph)?;
            let text = with_graph!(&graph, |g| truncate(g, depth, format)).map_err(usage)??;
            emit(&out, text)?;
        }
        Command::Embed {
            graph,
            depth,
            target,
            emit: format,
            out,
        } => {
            check_graph(&graph)?;
            let (text, passed) = with_graph!(&graph, |g| embed(g, depth, target, format)).map_err(usage)??;
            emit(&out, text)?;
            return Ok(passed);
        }
        Command::EmbedGl {
            system,
            depth,
            emit: format,
            out,
        } => {
            let sys = systems::by_name(&system).map_err(usage)?;
            let n = depth.unwrap_or(sys.len());
            let emb = embed_gl::embed(&sys, n)?;
            let report = embed_gl::check_properties(&emb);
            let text = match format {
                Format::Json => pretty(&json!({
                    "depth": n,
                    "stages": emb.stages.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
                    "report": serde_json::from_str::<Value>(&report.to_json()).expect("report json"),
                })),
                Format::Dot => emb.stages[n].to_dot(&format!("stage_{n}")),
            };
            emit(&out, text)?;
            return Ok(report.passed());
        }
        Command::Verify {
            suite,
            graph,
            system,
            profile,
            depth,
            out,
        } => {
            let report = verify_command(suite, graph, system, profile, depth)?;
            emit(&out, report.to_json())?;
            return Ok(report.passed());
        }
        Command::Export {
            graph,
            system,
            depth,
            out,
        } => {
            let text = match (graph, system) {
                (Some(graph), _) => {
                    check_graph(&graph)?;
                    with_graph!(&graph, |g| inverse_system_json(g, depth)).map_err(usage)??
                }
                (None, Some(system)) => systems::by_name(&system).map_err(usage)?.to_json(),
                (None, None) => unreachable!("clap requires one of --graph and --system"),
            };
            emit(&out, text)?;
        }
    }
    Ok(true)
}

fn profile_name(p: Profile) -> &'static str {
    match p {
        Profile::Lf => "lf",
        Profile::Gl => "gl",
    }
}

fn verify_command(
    suite: Suite,
    graph: Option<String>,
    system: Option<String>,
    profile: Option<Profile>,
    depth: Option<usize>,
) -> Result<Report, Failure> {
    let missing = |flag: &str| Failure::Usage(format!("this suite needs --{flag}"));
    match suite {
        Suite::InverseSystem | Suite::Universal | Suite::Warmup => {
            let graph = graph.ok_or_else(|| missing("graph"))?;
            check_graph(&graph)?;
            Ok(verify::run(suite, &graph, depth.unwrap_or(4))?)
        }
        Suite::Contraction | Suite::GraphLike => {
            let name = system.ok_or_else(|| missing("system"))?;
            let sys = systems::by_name(&name).map_err(usage)?;
            let n = depth.unwrap_or(sys.len());
            if n > sys.len() {
                return Err(Failure::Usage(format!("`{name}` has only {} stages", sys.len())));
            }
            Ok(match suite {
                Suite::Contraction => verify::contraction(&sys, n),
                _ => verify::graph_like(&sys, n),
            })
        }
        Suite::Star => {
            let profile = profile.ok_or_else(|| missing("profile"))?;
            Ok(verify::star(profile, depth.unwrap_or(6)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
