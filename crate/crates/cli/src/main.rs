use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ptv_core::algebra::{check_identities, QuantumParams};
use ptv_core::analysis::{skeletons, validate, Validation, VertexNature};
use ptv_core::constructions::{
    boundary_components, cone_boundary, example, identify_vertices, mapping_cylinder_attach, suspension, Example,
    EXAMPLE_NAMES,
};
use ptv_core::io::{self, Complex};
use ptv_core::moves::{random_walk_with, MoveWeights};
use ptv_core::statesum::{state_sum, StateSumResult};
use ptv_core::Triangulation;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ptv", version, about = "Pseudomanifold triangulations, singular skeletons and state-sum invariants")]
struct Cli {
    /// Machine-readable output; errors go to stderr as JSON
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgebraAction {
    Table,
    Check,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a file describes a pseudomanifold
    Validate { file: PathBuf },
    /// Singular skeletons and the Γ-signature of a closed complex
    Analyze { file: PathBuf },
    /// Evaluate the state sum
    Invariant {
        file: PathBuf,
        #[arg(long)]
        r: u32,
        /// Root exponent c in a = exp(2πi c / 4r)
        #[arg(long, default_value_t = 1)]
        root: i64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Seeded random walk of bistellar moves, one JSON line per step
    Walk {
        file: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
        /// Evaluate the state sum after every step and compare
        #[arg(long, requires = "r")]
        check_invariant: bool,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 1)]
        root: i64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the final complex here
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Quantum dimensions or the identity suite at level r
    Algebra {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        root: i64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        action: AlgebraAction,
    },
    /// Write a complex from the example library
    Example {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXAMPLE_NAMES))]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cone off boundary components; groups like "0;1,2"
    Cone {
        file: PathBuf,
        #[arg(long)]
        groups: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Identify vertices; groups like "v0,v5;v2,v3" (names, labels or ids)
    Pinch {
        file: PathBuf,
        #[arg(long)]
        groups: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Suspend a closed 2-complex
    Suspend {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Attach a mapping cylinder of a torus boundary component onto a circle
    Mapcyl {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failed run: `usage` failures exit with 2, domain failures with 1.
struct Failure {
    kind: &'static str,
    message: String,
    usage: bool,
}

impl Failure {
    fn domain(kind: &'static str, e: impl Display) -> Self {
        Failure {
            kind,
            message: e.to_string(),
            usage: false,
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            kind: "usage",
            message: message.into(),
            usage: true,
        }
    }
}

macro_rules! domain_error {
    ($($ty:path => $kind:literal),* $(,)?) => {
        $(impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::domain($kind, e)
            }
        })*
    };
}

domain_error! {
    io::IoError => "io",
    ptv_core::analysis::AnalysisError => "analysis",
    ptv_core::constructions::ConstructionError => "construction",
    ptv_core::moves::MoveError => "move",
    ptv_core::statesum::StateSumError => "stateSum",
}

// bad level, root or tolerance flags
impl From<ptv_core::algebra::AlgebraError> for Failure {
    fn from(e: ptv_core::algebra::AlgebraError) -> Self {
        Failure {
            kind: "usage",
            message: e.to_string(),
            usage: true,
        }
    }
}

fn complex_pair(z: num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

fn read_3d(path: &Path) -> Result<Triangulation, Failure> {
    Ok(io::read_triangulation(path)?)
}

fn emit(output: &Option<PathBuf>, c: Complex) -> Result<(), Failure> {
    match output {
        Some(path) => io::write(path, &c)?,
        None => println!("{}", io::to_string(&c)),
    }
    Ok(())
}

fn summary(t: &Triangulation) -> String {
    format!(
        "{} tetrahedra, {} vertices, {} edges, {} faces",
        t.num_tetrahedra(),
        t.num_vertices(),
        t.num_edges(),
        t.num_faces()
    )
}

fn parse_groups<T>(spec: &str, item: impl Fn(&str) -> Result<T, Failure>) -> Result<Vec<Vec<T>>, Failure> {
    spec.split(';')
        .map(|g| {
            let g = g.trim();
            if g.is_empty() {
                return Err(Failure::usage(format!("empty group in {spec:?}")));
            }
            g.split(',').map(|x| item(x.trim())).collect()
        })
        .collect()
}

/// Resolves a vertex by label, display name (`v3`) or bare class id.
fn resolve_vertex(t: &Triangulation, name: &str) -> Result<usize, Failure> {
    if let Some(v) = (0..t.num_vertices()).find(|&v| t.label(v).is_some_and(|l| l.to_string() == name)) {
        return Ok(v);
    }
    if let Some(v) = (0..t.num_vertices()).find(|&v| t.vertex_name(v) == name) {
        return Ok(v);
    }
    match name.parse::<usize>() {
        Ok(v) if v < t.num_vertices() => Ok(v),
        _ => Err(Failure::domain("construction", format!("no vertex named {name:?}"))),
    }
}

fn nature_name(n: VertexNature) -> String {
    match n {
        VertexNature::ManifoldPoint => "manifold".into(),
        VertexNature::X1NotX0 { k } => format!("on X1 (k={k})"),
        VertexNature::X0Point => "X0".into(),
    }
}

fn invariant_json(res: &StateSumResult, r: u32, root: i64) -> Value {
    let colorings = u64::try_from(res.colorings).map(Value::from).unwrap_or_else(|_| Value::from(res.colorings.to_string()));
    json!({
        "value": complex_pair(res.value),
        "a": res.vertices,
        "colorings": colorings,
        "pruned": res.pruned,
        "r": r,
        "root": root,
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let json = cli.json;
    match &cli.command {
        Command::Validate { file } => match io::read(file)? {
            Complex::Three(t) => {
                let v = validate(&t);
                if json {
                    println!("{}", json!({"validation": v, "tetrahedra": t.num_tetrahedra(), "vertices": t.num_vertices(), "edges": t.num_edges()}));
                } else {
                    println!("{}", v.describe());
                    println!("{}", summary(&t));
                }
                if let Validation::Invalid { reason } = v {
                    return Err(Failure::domain("invalid", reason));
                }
            }
            Complex::Two(s) => {
                let c = s.classify();
                if json {
                    println!("{}", json!({"surface": c, "closed": s.is_closed(), "euler": s.euler_characteristic()}));
                } else {
                    let closed = if s.is_closed() { "closed" } else { "bounded" };
                    println!("{closed} 2-complex, euler characteristic {}", s.euler_characteristic());
                    println!("{} triangles, {} vertices, {} edges", s.num_triangles(), s.num_vertices(), s.num_edges());
                }
            }
        },
        Command::Analyze { file } => {
            let t = read_3d(file)?;
            let rep = skeletons(&t)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "x0": rep.x0_vertices,
                        "x1_vertices": rep.x1_vertices,
                        "x1_edges": rep.x1_edges,
                        "gamma": rep.gamma,
                    })
                );
            } else {
                println!("{}", summary(&t));
                println!("{:<8} {:<14} name", "vertex", "type");
                for v in 0..t.num_vertices() {
                    println!("{v:<8} {:<14} {}", nature_name(rep.natures[v]), t.vertex_name(v));
                }
                println!("singular edges: {}", rep.x1_edges.len());
                for &e in &rep.x1_edges {
                    let (a, b) = t.edge_ends(e);
                    println!("  edge {e}: {a}-{b}, {} link circles", rep.edge_circles[e]);
                }
                println!("gamma: {} nodes, {} arcs", rep.gamma.nodes.len(), rep.gamma.arcs.len());
                for (i, n) in rep.gamma.nodes.iter().enumerate() {
                    println!("  node {i}: {}", serde_json::to_string(n).expect("serializable"));
                }
                for a in &rep.gamma.arcs {
                    println!(
                        "  arc {}-{}: {} interior vertices, k={}",
                        a.endpoints[0], a.endpoints[1], a.interior_vertices, a.k
                    );
                }
            }
        }
        Command::Invariant {
            file,
            r,
            root,
            tol,
            jobs,
        } => {
            let t = read_3d(file)?;
            let p = QuantumParams::new(*r, *root, *tol)?;
            let res = state_sum(&t, &p, (*jobs).max(1))?;
            if json {
                println!("{}", invariant_json(&res, *r, *root));
            } else {
                println!("value     {:.12} {:+.12}i", res.value.re, res.value.im);
                println!("vertices  {}", res.vertices);
                println!("colorings {}", res.colorings);
                println!("pruned    {}", res.pruned);
                println!("frontier  {}", res.frontier);
                println!("time      {:.3}s", res.wall_time_secs);
            }
        }
        Command::Walk {
            file,
            steps,
            seed,
            check_invariant,
            r,
            root,
            tol,
            jobs,
            output,
        } => {
            let t = read_3d(file)?;
            let params = match (check_invariant, r) {
                (true, Some(r)) => Some(QuantumParams::new(*r, *root, *tol)?),
                _ => None,
            };
            let initial = match &params {
                Some(p) => Some(state_sum(&t, p, *jobs)?.value),
                None => None,
            };
            let mut failure = None;
            let mut worst: f64 = 0.0;
            let last = random_walk_with(&t, *steps, *seed, &MoveWeights::default(), |step, m, cur| {
                let mut line = json!({
                    "step": step + 1,
                    "kind": m.kind.name(),
                    "target": m.target,
                    "tets": cur.num_tetrahedra(),
                    "edges": cur.num_edges(),
                });
                if let (Some(p), Some(z0), None) = (&params, initial, &failure) {
                    match state_sum(cur, p, *jobs) {
                        Ok(res) => {
                            let dev = ptv_core::algebra::relative_deviation(z0, res.value);
                            worst = worst.max(dev);
                            line["value"] = complex_pair(res.value);
                            line["deviation"] = json!(dev);
                        }
                        Err(e) => failure = Some(e),
                    }
                }
                println!("{line}");
            })?;
            if let Some(e) = failure {
                return Err(e.into());
            }
            if output.is_some() {
                emit(output, Complex::Three(last))?;
            }
            if let Some(p) = &params {
                if worst > p.tol() {
                    return Err(Failure::domain(
                        "invarianceViolated",
                        format!("state sum changed along the walk (relative deviation {worst:.3e})"),
                    ));
                }
                log::info!("state sum preserved along the walk (max deviation {worst:.3e})");
            }
        }
        Command::Algebra {
            r,
            root,
            tol,
            samples,
            seed,
            action,
        } => {
            let p = QuantumParams::new(*r, *root, *tol)?;
            match action {
                AlgebraAction::Table => {
                    let dims = (0..p.num_colors()).map(|i| p.qdim(i)).collect::<Result<Vec<_>, _>>()?;
                    if json {
                        println!(
                            "{}",
                            json!({
                                "r": r,
                                "root": root,
                                "a": complex_pair(p.root()),
                                "colors": p.num_colors(),
                                "qdim": dims.iter().map(|&z| complex_pair(z)).collect::<Vec<_>>(),
                                "rank_squared": complex_pair(p.rank_squared()),
                            })
                        );
                    } else {
                        println!("r = {r}, a = exp(2πi·{root}/{})", 4 * r);
                        println!("{:<6} qdim", "color");
                        for (i, z) in dims.iter().enumerate() {
                            println!("{:<6} {:.12} {:+.12}i", i, z.re, z.im);
                        }
                        let w = p.rank_squared();
                        println!("rank²  {:.12} {:+.12}i", w.re, w.im);
                    }
                }
                AlgebraAction::Check => {
                    let rep = check_identities(&p, *samples, *seed);
                    if json {
                        println!("{}", serde_json::to_string(&rep).expect("serializable"));
                    } else {
                        println!("rank deviation       {:.3e}", rep.rank_deviation);
                        println!("gate failures        {} / {}", rep.gate_failures, rep.gate_keys_checked);
                        println!(
                            "symmetry deviation   {:.3e} ({} keys)",
                            rep.symmetry_max_deviation, rep.symmetry_keys_checked
                        );
                        println!(
                            "pentagon deviation   {:.3e} ({} nontrivial samples)",
                            rep.pentagon.max_deviation, rep.pentagon.nontrivial
                        );
                        println!("{}", if rep.passed { "PASS" } else { "FAIL" });
                    }
                    if !rep.passed {
                        return Err(Failure::domain("identityCheck", "identity suite failed"));
                    }
                }
            }
        }
        Command::Example { name, output } => {
            let c = match example(name)? {
                Example::Complex(t) => Complex::Three(t),
                Example::Surface(s) => Complex::Two(s),
            };
            emit(output, c)?;
        }
        Command::Cone { file, groups, output } => {
            let t = read_3d(file)?;
            let groups = parse_groups(groups, |x| {
                x.parse::<usize>()
                    .map_err(|_| Failure::usage(format!("boundary component {x:?} is not a number")))
            })?;
            let n = boundary_components(&t).components.len();
            log::info!("{n} boundary components");
            emit(output, Complex::Three(cone_boundary(&t, &groups)?))?;
        }
        Command::Pinch { file, groups, output } => {
            let t = read_3d(file)?;
            let groups = parse_groups(groups, |x| resolve_vertex(&t, x))?;
            emit(output, Complex::Three(identify_vertices(&t, &groups)?))?;
        }
        Command::Suspend { file, output } => {
            let s = io::read_surface(file)?;
            emit(output, Complex::Three(suspension(&s)?))?;
        }
        Command::Mapcyl {
            file,
            component,
            k,
            m,
            output,
        } => {
            let t = read_3d(file)?;
            let (out, info) = mapping_cylinder_attach(&t, *component, *k, *m)?;
            log::info!(
                "functional ({}, {}), period {}, circle vertices {:?}",
                info.functional.0,
                info.functional.1,
                info.period,
                info.circle_vertices
            );
            emit(output, Complex::Three(out))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PTV_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if cli.json {
                eprintln!("{}", json!({"error": {"kind": f.kind, "message": f.message}}));
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(if f.usage { 2 } else { 1 })
        }
    }
}
