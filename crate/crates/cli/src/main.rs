use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ctrlset::element_set::ElementSet;
use ctrlset::explicit::{exact_identifying, greedy_identifying, verify_explicit_identifying, SolutionList};
use ctrlset::flow::{min_weight_flow_identifying, verify_flow_identifying};
use ctrlset::graph::{topological_order, TopologicalOrder};
use ctrlset::instances::{
    gen_bundle_instance, gen_random_dag, gen_random_digraph, gen_tight_gap_family, gen_vertex_cover_dag,
    GeneratedInstance, UndirectedGraph,
};
use ctrlset::io::{self, Instance, InstanceFile};
use ctrlset::linalg;
use ctrlset::linear::{min_weight_identifying_from_basis, verify_identifying_from_basis, AffineBasis};
use ctrlset::matroid::{min_weight_matroid_identifying, verify_matroid_identifying, BuiltinMatroid};
use ctrlset::path::{
    approx_min_path_identifying_dag, exact_min_path_identifying, gap_ratio, verify_path_identifying_dag,
    verify_path_identifying_general, within_gap_bound, Caps, PathVerdict,
};
use ctrlset::polymatroid::{min_weight_polymatroid_identifying, verify_polymatroid_identifying};
use ctrlset::rational::{self, Rational};
use ctrlset::tolls::{
    controlling_counterexample_check, convex_tolls, discrete_tolls, tolled_minimizers, LinearCost, SeparableQuadratic,
    TollOptions,
};
use ctrlset::{Error, WeightedGroundSet};

#[derive(Parser)]
#[command(
    name = "ctrlset",
    version,
    about = "Identifying sets and tolls for combinatorial solution systems"
)]
struct Cli {
    #[command(flatten)]
    caps: CapArgs,
    /// Write the full run report, payload included, to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CapArgs {
    #[arg(long, global = true, env = "CTRLSET_MAX_PATHS", default_value_t = 100_000)]
    max_paths: usize,
    #[arg(long, global = true, env = "CTRLSET_MAX_SUBSETS", default_value_t = 1 << 24)]
    max_subsets: u64,
    /// Largest ground set enumerated by brute-force verifiers.
    #[arg(long, global = true, env = "CTRLSET_MAX_ENUM", default_value_t = 20)]
    max_enum: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            max_paths: self.max_paths,
            max_subsets: self.max_subsets,
            max_ground: self.max_enum,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimum-weight identifying set for unit s-t flows.
    FlowIdentify {
        instance: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Check this set instead (ids, arc names, or a JSON file).
        #[arg(long)]
        verify: Option<String>,
    },
    /// Whether a set identifies the s-t paths.
    PathVerify {
        instance: PathBuf,
        #[arg(long = "S", alias = "set")]
        set: String,
        /// Enumerate paths even when the graph is acyclic.
        #[arg(long)]
        enumerate: bool,
    },
    /// Exact minimum-weight path-identifying set.
    PathExact {
        instance: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Flow-based approximation for acyclic graphs.
    PathApprox {
        instance: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Sizes of the flow-based set and the exact path optimum.
    PathGap { instance: PathBuf },
    /// Minimum-weight identifying set of a matroid's bases.
    MatroidIdentify {
        #[arg(long, value_enum)]
        kind: Option<MatroidKind>,
        /// Graph file for `--kind graphic`.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Matroid description file.
        #[arg(long)]
        matroid: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        verify: Option<String>,
    },
    /// Minimum-weight identifying set of a polymatroid's base polytope.
    PolymatroidIdentify {
        #[arg(long)]
        polymatroid: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        verify: Option<String>,
    },
    /// Identifying sets from an affine basis, or from the flow polytope of an instance.
    LinearIdentify {
        #[arg(long, required_unless_present = "instance", conflicts_with = "instance")]
        basis: Option<PathBuf>,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        verify: Option<String>,
    },
    /// Identifying sets of an explicit 0/1 solution list, or of the s-t paths of an instance.
    ExplicitIdentify {
        #[arg(long, required_unless_present = "instance", conflicts_with = "instance")]
        solutions: Option<PathBuf>,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        verify: Option<String>,
    },
    /// Toll vectors supported on a set.
    Tolls {
        #[arg(long, value_enum)]
        mode: TollMode,
        /// Graph instance, solution list, or point file.
        #[arg(long)]
        instance: PathBuf,
        /// Target as a bit string or comma separated rationals.
        #[arg(long)]
        target: Option<String>,
        #[arg(long = "S", alias = "set")]
        set: String,
        #[arg(long)]
        cost: Option<PathBuf>,
        #[arg(long)]
        margin: Option<String>,
        #[arg(long)]
        nonnegative: bool,
        /// Inequality cap for the controlling check.
        #[arg(long, default_value_t = 100_000)]
        max_inequalities: usize,
    },
    /// Generate an instance.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        vertices: Option<usize>,
        /// Undirected edges such as `0-1,1-2`.
        #[arg(long)]
        edges: Option<String>,
        #[arg(long)]
        copies: Option<usize>,
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        arc: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MatroidKind {
    Graphic,
    Uniform,
    Free,
}

#[derive(Clone, Copy, ValueEnum)]
enum TollMode {
    Discrete,
    Convex,
    /// Decide whether the set controls all targets for linear costs.
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    TightGap,
    VcDag,
    Bundle,
    RandomDag,
    RandomDigraph,
}

#[derive(Serialize)]
struct RunReport {
    subcommand: String,
    digest: String,
    wall_ms: u128,
    caps_hit: bool,
    reverified: Option<bool>,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

struct Outcome {
    payload: Value,
    ok: bool,
    reverified: Option<bool>,
    /// Written here instead of standard output.
    out: Option<PathBuf>,
}

impl Outcome {
    fn new(payload: impl Serialize, ok: bool) -> Result<Self, Error> {
        Ok(Outcome {
            payload: serde_json::to_value(payload).map_err(|e| Error::InvalidParams(e.to_string()))?,
            ok,
            reverified: None,
            out: None,
        })
    }

    fn reverified(mut self, ok: bool) -> Self {
        self.reverified = Some(ok);
        self
    }
}

struct Ctx {
    hasher: Sha256,
    caps: Caps,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn instance(&mut self, path: &Path) -> Result<Instance, Error> {
        let text = self.read(path)?;
        io::parse_instance(&text)
    }

    fn weights(&mut self, path: Option<&PathBuf>, default: WeightedGroundSet) -> Result<WeightedGroundSet, Error> {
        let Some(p) = path else {
            return Ok(default);
        };
        let text = self.read(p)?;
        let w = io::parse_weights(&text)?;
        w.expect_size(default.size())?;
        Ok(w)
    }

    fn set(&mut self, arg: &str, inst: Option<&Instance>, size: usize) -> Result<Vec<usize>, Error> {
        let path = Path::new(arg);
        if arg.ends_with(".json") && path.is_file() {
            let text = self.read(path)?;
            let set = io::parse_set_json(&text)?;
            if let Some(&e) = set.iter().find(|&&e| e >= size) {
                return Err(Error::InvalidElement { element: e, size });
            }
            return Ok(set);
        }
        let meta = inst.map(|i| i.meta.clone()).unwrap_or_default();
        io::resolve_arc_set(arg, &meta, size).map_err(|e| match e {
            Error::InvalidArc { arc, arc_count } => Error::InvalidElement {
                element: arc,
                size: arc_count,
            },
            other => other,
        })
    }
}

fn element_set(set: &[usize]) -> Result<ElementSet, Error> {
    if let Some(&e) = set.iter().find(|&&e| e >= 64) {
        return Err(Error::InvalidElement { element: e, size: 64 });
    }
    Ok(set.iter().fold(ElementSet::default(), |s, &e| s.with(e)))
}

fn is_dag(inst: &Instance) -> bool {
    matches!(topological_order(&inst.graph), TopologicalOrder::Ranks(_))
}

fn check_path_set(inst: &Instance, set: &[usize], caps: Caps) -> Result<PathVerdict, Error> {
    if is_dag(inst) {
        verify_path_identifying_dag(&inst.graph, inst.st, set)
    } else {
        verify_path_identifying_general(&inst.graph, inst.st, set, caps.max_paths)
    }
}

fn run(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome, Error> {
    let caps = ctx.caps;
    match cmd {
        Command::FlowIdentify {
            instance,
            weights,
            verify,
        } => {
            let inst = ctx.instance(instance)?;
            if let Some(arg) = verify {
                let set = ctx.set(arg, Some(&inst), inst.graph.arc_count())?;
                let v = verify_flow_identifying(&inst.graph, inst.st, &set)?;
                let ok = v.identifying;
                return Outcome::new(v, ok);
            }
            let w = ctx.weights(weights.as_ref(), inst.weights.clone())?;
            let r = min_weight_flow_identifying(&inst.graph, inst.st, &w)?;
            let check = verify_flow_identifying(&inst.graph, inst.st, &r.identifying_set)?.identifying;
            Ok(Outcome::new(r, check)?.reverified(check))
        }
        Command::PathVerify {
            instance,
            set,
            enumerate,
        } => {
            let inst = ctx.instance(instance)?;
            let set = ctx.set(set, Some(&inst), inst.graph.arc_count())?;
            let (v, method) = if *enumerate || !is_dag(&inst) {
                (
                    verify_path_identifying_general(&inst.graph, inst.st, &set, caps.max_paths)?,
                    "enumeration",
                )
            } else {
                (verify_path_identifying_dag(&inst.graph, inst.st, &set)?, "dag")
            };
            let ok = v.identifying;
            Outcome::new(
                json!({"identifying": v.identifying, "witness": v.witness, "method": method}),
                ok,
            )
        }
        Command::PathExact { instance, weights } => {
            let inst = ctx.instance(instance)?;
            let w = ctx.weights(weights.as_ref(), inst.weights.clone())?;
            let r = exact_min_path_identifying(&inst.graph, inst.st, &w, caps)?;
            let check = check_path_set(&inst, &r.identifying_set, caps)?.identifying;
            Ok(Outcome::new(r, check)?.reverified(check))
        }
        Command::PathApprox { instance, weights } => {
            let inst = ctx.instance(instance)?;
            let w = ctx.weights(weights.as_ref(), inst.weights.clone())?;
            let r = approx_min_path_identifying_dag(&inst.graph, inst.st, &w)?;
            let check = verify_path_identifying_dag(&inst.graph, inst.st, &r.identifying_set)?.identifying;
            Ok(Outcome::new(r, check)?.reverified(check))
        }
        Command::PathGap { instance } => {
            let inst = ctx.instance(instance)?;
            let g = gap_ratio(&inst.graph, inst.st, caps)?;
            let within = within_gap_bound(g.flow_size, g.optimum_size);
            Outcome::new(
                json!({
                    "flow_size": g.flow_size,
                    "optimum_size": g.optimum_size,
                    "ratio": rational::format(&g.ratio),
                    "within_bound": within,
                }),
                true,
            )
        }
        Command::MatroidIdentify {
            kind,
            graph,
            matroid,
            k,
            n,
            weights,
            verify,
        } => {
            let m = match (kind, matroid, graph) {
                (_, Some(path), _) => {
                    let text = ctx.read(path)?;
                    io::parse_matroid(&text)?
                }
                (Some(MatroidKind::Graphic), None, Some(path)) => {
                    let text = ctx.read(path)?;
                    io::parse_matroid(&text)?
                }
                (Some(MatroidKind::Uniform), None, None) => {
                    let (Some(k), Some(n)) = (k, n) else {
                        return Err(Error::InvalidParams("uniform matroids need --k and --n".into()));
                    };
                    BuiltinMatroid::uniform(*k, *n)?
                }
                (Some(MatroidKind::Free), None, None) => {
                    let Some(n) = n else {
                        return Err(Error::InvalidParams("free matroids need --n".into()));
                    };
                    BuiltinMatroid::free(*n)?
                }
                _ => {
                    return Err(Error::InvalidParams(
                        "give --matroid FILE, --kind graphic --graph FILE, or --kind uniform|free".into(),
                    ))
                }
            };
            let size = ctrlset::matroid::Matroid::ground_size(&m);
            if let Some(arg) = verify {
                let set = ctx.set(arg, None, size)?;
                let v = verify_matroid_identifying(&m, element_set(&set)?, caps.max_ground)?;
                let ok = v.identifying;
                return Outcome::new(
                    json!({
                        "identifying": v.identifying,
                        "witness": v.witness.map(|w| json!({
                            "circuit": w.circuit.to_vec(),
                            "basis": w.basis.to_vec(),
                            "other_basis": w.other_basis.to_vec(),
                        })),
                    }),
                    ok,
                );
            }
            let w = ctx.weights(weights.as_ref(), WeightedGroundSet::unit(size))?;
            let r = min_weight_matroid_identifying(&m, &w)?;
            let check = if size <= caps.max_ground {
                Some(verify_matroid_identifying(&m, element_set(&r.identifying_set)?, caps.max_ground)?.identifying)
            } else {
                None
            };
            let mut out = Outcome::new(r, check != Some(false))?;
            out.reverified = check;
            Ok(out)
        }
        Command::PolymatroidIdentify {
            polymatroid,
            weights,
            verify,
        } => {
            let text = ctx.read(polymatroid)?;
            let f = io::parse_polymatroid(&text)?;
            let size = f.ground_size();
            if let Some(arg) = verify {
                let set = ctx.set(arg, None, size)?;
                let v = verify_polymatroid_identifying(f.as_ref(), element_set(&set)?, caps.max_ground)?;
                let ok = v.identifying;
                return Outcome::new(v, ok);
            }
            let w = ctx.weights(weights.as_ref(), WeightedGroundSet::unit(size))?;
            let r = min_weight_polymatroid_identifying(f.as_ref(), &w, caps.max_ground)?;
            let check = verify_polymatroid_identifying(f.as_ref(), element_set(&r.identifying_set)?, caps.max_ground)?
                .identifying;
            Ok(Outcome::new(r, check)?.reverified(check))
        }
        Command::LinearIdentify {
            basis,
            instance,
            weights,
            verify,
        } => {
            let (b, default_w) = match (basis, instance) {
                (Some(path), _) => {
                    let text = ctx.read(path)?;
                    let b = io::parse_basis(&text)?;
                    let n = b.dimension();
                    (b, WeightedGroundSet::unit(n))
                }
                (None, Some(path)) => {
                    let inst = ctx.instance(path)?;
                    (io::flow_basis(&inst)?, inst.weights)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            if let Some(arg) = verify {
                let set = ctx.set(arg, None, b.dimension())?;
                let v = verify_identifying_from_basis(&b, &set)?;
                let ok = v.identifying;
                return Outcome::new(v, ok);
            }
            let w = ctx.weights(weights.as_ref(), default_w)?;
            let r = min_weight_identifying_from_basis(&b, &w)?;
            let check = verify_identifying_from_basis(&b, &r.identifying_set)?.identifying;
            Ok(Outcome::new(r, check)?.reverified(check))
        }
        Command::ExplicitIdentify {
            solutions,
            instance,
            exact,
            weights,
            verify,
        } => {
            let (x, default_w) = match (solutions, instance) {
                (Some(path), _) => {
                    let text = ctx.read(path)?;
                    let x = io::parse_solutions(&text)?;
                    let n = x.dim();
                    (x, WeightedGroundSet::unit(n))
                }
                (None, Some(path)) => {
                    let inst = ctx.instance(path)?;
                    (io::path_solutions(&inst, caps.max_paths)?, inst.weights)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            if let Some(arg) = verify {
                let set = ctx.set(arg, None, x.dim())?;
                let v = verify_explicit_identifying(&x, &set)?;
                let ok = v.identifying;
                return Outcome::new(v, ok);
            }
            let w = ctx.weights(weights.as_ref(), default_w)?;
            let r = if *exact {
                exact_identifying(&x, &w, caps.max_subsets)?
            } else {
                greedy_identifying(&x, &w)?
            };
            let check = verify_explicit_identifying(&x, &r.identifying_set)?.identifying;
            Ok(Outcome::new(r, check)?.reverified(check))
        }
        Command::Tolls {
            mode,
            instance,
            target,
            set,
            cost,
            margin,
            nonnegative,
            max_inequalities,
        } => tolls(
            ctx,
            TollArgs {
                mode: *mode,
                instance,
                target: target.as_deref(),
                set,
                cost: cost.as_ref(),
                margin: margin.as_deref(),
                nonnegative: *nonnegative,
                max_inequalities: *max_inequalities,
            },
        ),
        Command::Gen {
            family,
            k,
            vertices,
            edges,
            copies,
            base,
            arc,
            size,
            nodes,
            p,
            seed,
            out,
        } => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Error::InvalidParams(format!("this family needs --{name}")))
            };
            let g: GeneratedInstance = match family {
                Family::TightGap => gen_tight_gap_family(need(*k, "k")?)?,
                Family::VcDag => {
                    let edges = parse_edges(edges.as_deref().unwrap_or(""))?;
                    let graph = UndirectedGraph::new(need(*vertices, "vertices")?, edges)?;
                    gen_vertex_cover_dag(&graph, copies.unwrap_or(1))?.instance
                }
                Family::Bundle => {
                    let Some(path) = base else {
                        return Err(Error::InvalidParams("bundle needs --base".into()));
                    };
                    let b = ctx.instance(path)?;
                    let mut g = gen_bundle_instance(&b.graph, b.st, need(*arc, "arc")?, need(*size, "size")?)?;
                    g.meta.params.insert("seed".into(), json!(seed));
                    g
                }
                Family::RandomDag => gen_random_dag(need(*nodes, "nodes")?, p.unwrap_or(0.5), *seed)?,
                Family::RandomDigraph => gen_random_digraph(need(*nodes, "nodes")?, p.unwrap_or(0.5), *seed)?,
            };
            let file = InstanceFile::from(&g);
            let mut outcome = Outcome::new(&file, true)?;
            ctx.hasher
                .update(serde_json::to_string(&file).unwrap_or_default().as_bytes());
            outcome.out = out.clone();
            Ok(outcome)
        }
    }
}

fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once('-')
                .ok_or_else(|| Error::InvalidParams(format!("bad edge {t:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidParams(format!("bad edge {t:?}")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

struct TollArgs<'a> {
    mode: TollMode,
    instance: &'a Path,
    target: Option<&'a str>,
    set: &'a str,
    cost: Option<&'a PathBuf>,
    margin: Option<&'a str>,
    nonnegative: bool,
    max_inequalities: usize,
}

/// Graph instances, solution lists and point files are told apart by their keys.
enum TollInput {
    Graph(Instance),
    Solutions(SolutionList),
    Points(Vec<Vec<Rational>>),
}

fn read_toll_input(ctx: &mut Ctx, path: &Path) -> Result<TollInput, Error> {
    let text = ctx.read(path)?;
    let value: Value = io::from_json(&text)?;
    if value.get("arcs").is_some() {
        Ok(TollInput::Graph(io::parse_instance(&text)?))
    } else if value.get("vectors").is_some() {
        Ok(TollInput::Solutions(io::parse_solutions(&text)?))
    } else if value.get("points").is_some() {
        let b: PointsFile = io::from_json(&text)?;
        Ok(TollInput::Points(b.points))
    } else {
        Err(Error::InvalidParams(
            "expected an instance, solution list or point file".into(),
        ))
    }
}

#[derive(serde::Deserialize)]
struct PointsFile {
    #[serde(deserialize_with = "points")]
    points: Vec<Vec<Rational>>,
}

fn points<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
    let raw: Vec<Vec<rational::RawRational>> = serde::Deserialize::deserialize(d)?;
    raw.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| v.into_rational().map_err(serde::de::Error::custom))
                .collect()
        })
        .collect()
}

fn tolls(ctx: &mut Ctx, a: TollArgs) -> Result<Outcome, Error> {
    let caps = ctx.caps;
    let input = read_toll_input(ctx, a.instance)?;
    let (solutions, meta_inst, weights) = match input {
        TollInput::Graph(inst) => {
            let x = io::path_solutions(&inst, caps.max_paths)?;
            let w = inst.weights.clone();
            (x.clone(), Some(inst), w)
        }
        TollInput::Solutions(x) => {
            let n = x.dim();
            (x, None, WeightedGroundSet::unit(n))
        }
        TollInput::Points(points) => {
            if !matches!(a.mode, TollMode::Convex | TollMode::Check) {
                return Err(Error::InvalidParams("discrete tolls need 0/1 solutions".into()));
            }
            return points_tolls(ctx, a, points);
        }
    };
    let n = solutions.dim();
    let set = ctx.set(a.set, meta_inst.as_ref(), n)?;
    let points: Vec<Vec<Rational>> = (0..solutions.len()).map(|i| solutions.rational_vector(i)).collect();
    match a.mode {
        TollMode::Discrete => {
            let target = io::point_to_bits(&io::parse_point(require_target(a.target)?)?)?;
            let cost = read_cost(ctx, a.cost, || Box::new(LinearCost(weights.weights().to_vec())))?;
            let opts = toll_options(a.margin, a.nonnegative)?;
            let t = discrete_tolls(&solutions, &set, cost.as_ref(), &target, &opts)?;
            let idx = solutions.index_of(&target).ok_or(Error::TargetNotInX)?;
            let check = tolled_minimizers(&solutions, cost.as_ref(), &t)?.contains(&idx);
            Ok(Outcome::new(t, check)?.reverified(check))
        }
        TollMode::Convex => {
            let basis = AffineBasis::from_spanning_points(&points)?;
            convex_outcome(ctx, a, &basis, &set, &weights)
        }
        TollMode::Check => check_outcome(ctx, a, &points, &set),
    }
}

fn points_tolls(ctx: &mut Ctx, a: TollArgs, points: Vec<Vec<Rational>>) -> Result<Outcome, Error> {
    let n = points.first().map_or(0, Vec::len);
    let set = ctx.set(a.set, None, n)?;
    match a.mode {
        TollMode::Convex => {
            let basis = AffineBasis::from_spanning_points(&points)?;
            convex_outcome(ctx, a, &basis, &set, &WeightedGroundSet::unit(n))
        }
        _ => check_outcome(ctx, a, &points, &set),
    }
}

fn convex_outcome(
    ctx: &mut Ctx,
    a: TollArgs,
    basis: &AffineBasis,
    set: &[usize],
    weights: &WeightedGroundSet,
) -> Result<Outcome, Error> {
    let target = io::parse_point(require_target(a.target)?)?;
    let cost = read_cost(ctx, a.cost, || {
        Box::new(SeparableQuadratic::resistances(weights.weights().to_vec()).expect("weights are nonnegative"))
    })?;
    let opts = toll_options(a.margin, a.nonnegative)?;
    let t = convex_tolls(basis, set, cost.as_ref(), &target, &opts)?;
    let d = cost.subgradient(&target).ok_or(Error::NoSubgradient)?;
    let g: Vec<Rational> = d.iter().zip(&t.gamma).map(|(x, y)| x + y).collect();
    let check = basis
        .differences()
        .iter()
        .all(|di| num_traits::Zero::is_zero(&linalg::dot(&g, di)));
    Ok(Outcome::new(t, check)?.reverified(check))
}

fn check_outcome(ctx: &mut Ctx, a: TollArgs, points: &[Vec<Rational>], set: &[usize]) -> Result<Outcome, Error> {
    let Some(path) = a.cost else {
        return Err(Error::InvalidParams("the controlling check needs --cost".into()));
    };
    let text = ctx.read(path)?;
    let value: Value = io::from_json(&text)?;
    let files: Vec<Value> = match value {
        Value::Array(v) => v,
        other => vec![other],
    };
    let costs = files
        .into_iter()
        .map(|v| match serde_json::from_value::<io::CostFile>(v) {
            Ok(io::CostFile::Linear { c }) => Ok(LinearCost(c)),
            Ok(_) => Err(Error::InvalidParams("the controlling check takes linear costs".into())),
            Err(e) => Err(Error::InvalidParams(format!("malformed cost: {e}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let v = controlling_counterexample_check(points, set, &costs, a.max_inequalities)?;
    let ok = v.controlling;
    Outcome::new(v, ok)
}

fn require_target(t: Option<&str>) -> Result<&str, Error> {
    t.ok_or_else(|| Error::InvalidParams("--target is required".into()))
}

fn read_cost(
    ctx: &mut Ctx,
    path: Option<&PathBuf>,
    default: impl FnOnce() -> Box<dyn ctrlset::tolls::CostOracle>,
) -> Result<Box<dyn ctrlset::tolls::CostOracle>, Error> {
    match path {
        Some(p) => {
            let text = ctx.read(p)?;
            io::parse_cost(&text)
        }
        None => Ok(default()),
    }
}

fn toll_options(margin: Option<&str>, nonnegative: bool) -> Result<TollOptions, Error> {
    Ok(TollOptions {
        margin: margin.map(rational::parse).transpose()?,
        require_nonnegative: nonnegative,
    })
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::FlowIdentify { .. } => "flow-identify",
        Command::PathVerify { .. } => "path-verify",
        Command::PathExact { .. } => "path-exact",
        Command::PathApprox { .. } => "path-approx",
        Command::PathGap { .. } => "path-gap",
        Command::MatroidIdentify { .. } => "matroid-identify",
        Command::PolymatroidIdentify { .. } => "polymatroid-identify",
        Command::LinearIdentify { .. } => "linear-identify",
        Command::ExplicitIdentify { .. } => "explicit-identify",
        Command::Tolls { .. } => "tolls",
        Command::Gen { .. } => "gen",
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        _ if e.is_cap_exceeded() => 3,
        Error::NotIdentifying(_)
        | Error::TargetNotInX
        | Error::TargetOutsideAffineHull
        | Error::NoStPath
        | Error::NegativeTolls { .. } => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx {
        hasher: Sha256::new(),
        caps: cli.caps.caps(),
    };
    let result = run(&cli.command, &mut ctx);
    let mut report = RunReport {
        subcommand: subcommand_name(&cli.command).into(),
        digest: String::new(),
        wall_ms: 0,
        caps_hit: false,
        reverified: None,
        exit_code: 0,
        result: None,
        error: None,
    };
    match result {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.payload).expect("JSON values serialize");
            match &outcome.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                        report.error = Some(format!("cannot write {}: {e}", path.display()));
                        report.exit_code = 2;
                    }
                }
                None => println!("{text}"),
            }
            if report.exit_code == 0 && !outcome.ok {
                report.exit_code = 1;
            }
            report.reverified = outcome.reverified;
            report.result = Some(outcome.payload);
        }
        Err(e) => {
            report.exit_code = error_code(&e);
            report.caps_hit = e.is_cap_exceeded();
            report.error = Some(e.to_string());
        }
    }
    report.digest = hex::encode(ctx.hasher.finalize());
    report.wall_ms = start.elapsed().as_millis();
    if let Some(path) = &cli.report {
        let full = serde_json::to_string_pretty(&report).expect("report serializes");
        if let Err(e) = std::fs::write(path, format!("{full}\n")) {
            eprintln!("cannot write report {}: {e}", path.display());
        }
    }
    report.result = None;
    eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
    ExitCode::from(report.exit_code)
}
