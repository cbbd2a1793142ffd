use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use motifclust::conductance::{phi2, phi3, phi4, ConductanceError, ConductanceResult};
use motifclust::eval::{self, load_communities, precision_recall, theta_sweep, EvalError};
use motifclust::graph::{
    load_edge_list, read_clustering_tsv, write_clustering_tsv, write_edge_list, Graph, GraphError,
    IdMap, VertexSubset,
};
use motifclust::motif::{k4_counts, triangle_counts, MotifError};
use motifclust::spectral::{second_eigenpair, sweep_cut, SpectralError, SpectralOptions};
use motifclust::synth::{self, PlantedParams, SynthError};
use motifclust::tectonic::{component_histogram, tectonic_cluster, Theta, ThetaError, ThresholdSpec};
use motifclust::walks::{
    empirical_stay_probability, stay_profile, theoretical_stay, StartDistribution, WalkConfig,
    WalkError, WalkKind, Walker,
};

/// Triangle-motif graph clustering toolkit.
///
/// All logarithms are natural. Thresholds accept decimals ("0.06") or
/// rationals ("3/50") and are applied exactly.
#[derive(Parser, Debug)]
#[command(name = "motifclust", version)]
struct Cli {
    /// Worker threads (default: MOTIFCLUST_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Triangle (and optionally K4) counts.
    Count(CountArgs),
    /// Threshold clustering into connected components.
    Cluster(ClusterArgs),
    /// Edge, triangle and K4 conductance of a vertex set.
    Conductance(ConductanceArgs),
    /// Triangle spectral sweep cut.
    Spectral(SpectralArgs),
    /// Seeded synthetic graphs and experiments.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Monte-Carlo one-step stay probability of a random walk.
    Walk(WalkArgs),
    /// Precision/recall of a clustering against ground-truth communities.
    Eval(EvalArgs),
    /// Precision/recall over a range of normalized thresholds.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Per-edge TSV `u<TAB>v<TAB>t(u,v)`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also count 4-cliques.
    #[arg(long)]
    k4: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Tectonic,
    Raw,
}

#[derive(Args, Debug, Clone)]
struct ThresholdArgs {
    #[arg(long, value_enum, default_value = "tectonic")]
    mode: Mode,
    /// Normalized threshold: edges with t(u,v)/(deg u + deg v) below it are removed.
    #[arg(long, default_value = "0.06")]
    theta: String,
    /// Raw threshold: edges with t(u,v) at or below it are removed.
    #[arg(long, default_value_t = 0)]
    cutoff: u64,
}

impl ThresholdArgs {
    fn spec(&self) -> Result<ThresholdSpec, Failure> {
        Ok(match self.mode {
            Mode::Tectonic => ThresholdSpec::Normalized { theta: self.theta.parse()? },
            Mode::Raw => ThresholdSpec::Raw { cutoff: self.cutoff },
        })
    }
}

fn describe(spec: ThresholdSpec) -> Value {
    match spec {
        ThresholdSpec::Normalized { theta } => json!({"mode": "tectonic", "theta": theta.to_string()}),
        ThresholdSpec::Raw { cutoff } => json!({"mode": "raw", "cutoff": cutoff}),
    }
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[command(flatten)]
    threshold: ThresholdArgs,
    #[arg(long)]
    edges: PathBuf,
    /// Clustering TSV `node<TAB>cluster`.
    #[arg(long)]
    out: PathBuf,
    /// Component-size histogram CSV `size,count`.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum MeasureArg {
    Phi2,
    Phi3,
    Phi4,
    All,
}

#[derive(Args, Debug)]
struct ConductanceArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Node ids of the set, whitespace separated.
    #[arg(long)]
    subset: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    measure: MeasureArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectralArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Matrix-vector product budget (default 10·n).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Seed of the start vector.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cut membership TSV `node<TAB>0|1` (1 = inside the cut).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum SynthCommand {
    /// Erdős–Rényi G(n, p).
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Planted partition G(nk, k, p, q).
    Planted {
        /// Vertices per cluster.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Labels TSV `node<TAB>cluster`.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Two-cluster recovery by removing edges of weight below 8 ln² n.
    Recovery {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add a clique on a random subset X of a random subset S.
    PlantClique {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        s_size: usize,
        #[arg(long)]
        x_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Standard,
    Biased,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StartArg {
    Uniform,
    Volume,
}

#[derive(Args, Debug)]
struct WalkArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Labels TSV `node<TAB>cluster`.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum, default_value = "standard")]
    kind: KindArg,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    start: StartArg,
    /// Planted parameters; when all three are given the closed form is reported.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// JSON summary (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    communities: PathBuf,
    /// Score an existing clustering TSV instead of running threshold clustering.
    #[arg(long)]
    clustering: Option<PathBuf>,
    #[command(flatten)]
    threshold: ThresholdArgs,
    /// Per-community CSV.
    #[arg(long)]
    out: PathBuf,
    /// Aggregate JSON (default: stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    communities: PathBuf,
    /// Comma-separated thresholds.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.10"
    )]
    thetas: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

/// An error with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }

    fn degenerate(message: impl ToString) -> Self {
        Failure { code: 3, message: message.to_string() }
    }
}

macro_rules! input_failure {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::input(e)
            }
        }
    )*};
}

input_failure!(io::Error, GraphError, MotifError, ThetaError, SynthError, WalkError, EvalError);

impl From<ConductanceError> for Failure {
    fn from(e: ConductanceError) -> Self {
        match e {
            ConductanceError::Degenerate { .. } => Failure::degenerate(e),
            other => Failure::input(other),
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Disconnected { .. }
            | SpectralError::TooFewActive { .. }
            | SpectralError::AllPrefixesDegenerate => Failure::degenerate(e),
            other => Failure::input(other),
        }
    }
}

/// Parameters, input digests and stage timings of one run.
#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    tool_version: &'static str,
    parameters: Value,
    seeds: Vec<u64>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    timings_seconds: BTreeMap<&'static str, f64>,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

impl RunManifest {
    fn new(subcommand: &'static str, parameters: Value) -> Self {
        RunManifest {
            subcommand,
            tool_version: env!("CARGO_PKG_VERSION"),
            parameters,
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings_seconds: BTreeMap::new(),
        }
    }

    fn input(&mut self, path: &Path) -> Result<(), Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Runs `f`, recording its wall time under `stage`.
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.timings_seconds.entry(stage).or_default() += start.elapsed().as_secs_f64();
        out
    }

    /// Writes `<primary>.manifest.json`.
    fn write_beside(&self, primary: &Path) -> Result<(), Failure> {
        let mut name = primary.as_os_str().to_owned();
        name.push(".manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(PathBuf::from(name), text + "\n")?;
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load(manifest: &mut RunManifest, path: &Path) -> Result<(Graph, IdMap), Failure> {
    manifest.input(path)?;
    let (g, ids, report) = manifest.time("load", || load_edge_list(path))?;
    log::info!(
        "loaded {}: {} nodes, {} edges ({} self-loops, {} duplicates dropped)",
        path.display(),
        report.nodes,
        report.edges,
        report.self_loops,
        report.duplicates
    );
    Ok((g, ids))
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string(value).expect("json"));
}

fn run_count(args: CountArgs) -> Result<(), Failure> {
    let mut m = RunManifest::new("count", json!({"k4": args.k4}));
    let (g, ids) = load(&mut m, &args.edges)?;
    let t = m.time("triangle_count", || triangle_counts(&g))?;
    let mut summary = json!({"nodes": g.node_count(), "edges": g.edge_count(), "triangles": t.total});
    if args.k4 {
        let c = m.time("k4_count", || k4_counts(&g))?;
        summary["k4"] = json!(c.total);
    }
    if let Some(out) = &args.out {
        let mut w = create(out)?;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            writeln!(w, "{}\t{}\t{}", ids.to_external(u), ids.to_external(v), t.per_edge.get(e))?;
        }
        w.flush()?;
        m.output(out);
        m.write_beside(out)?;
    }
    print_json(&summary);
    Ok(())
}

fn run_cluster(args: ClusterArgs) -> Result<(), Failure> {
    let spec = args.threshold.spec()?;
    let mut m = RunManifest::new("cluster", describe(spec));
    let (g, ids) = load(&mut m, &args.edges)?;
    let t = m.time("triangle_count", || triangle_counts(&g))?;
    let (clustering, removed) = m.time("cluster", || tectonic_cluster(&g, &t.per_edge, spec))?;

    let mut w = create(&args.out)?;
    write_clustering_tsv(&mut w, &clustering, &ids)?;
    w.flush()?;
    m.output(&args.out);
    if let Some(path) = &args.histogram {
        let mut w = create(path)?;
        writeln!(w, "size,count")?;
        for (size, count) in component_histogram(&clustering) {
            writeln!(w, "{size},{count}")?;
        }
        w.flush()?;
        m.output(path);
    }
    m.write_beside(&args.out)?;
    let mut summary = describe(spec);
    summary["clusters"] = json!(clustering.cluster_count());
    summary["removed_edges"] = json!(removed);
    print_json(&summary);
    Ok(())
}

fn read_subset(path: &Path, ids: &IdMap) -> Result<VertexSubset, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut s = VertexSubset::empty(ids.len());
    for tok in text.split_whitespace() {
        let ext: u64 = tok
            .parse()
            .map_err(|_| Failure::input(format!("{}: bad node id {tok:?}", path.display())))?;
        let u = ids
            .to_internal(ext)
            .ok_or_else(|| Failure::input(format!("{}: node {ext} is not in the graph", path.display())))?;
        s.insert(u);
    }
    Ok(s)
}

fn run_conductance(args: ConductanceArgs) -> Result<(), Failure> {
    let mut m = RunManifest::new("conductance", json!({"measure": format!("{:?}", args.measure)}));
    let (g, ids) = load(&mut m, &args.edges)?;
    m.input(&args.subset)?;
    let s = read_subset(&args.subset, &ids)?;
    let wants = |x: MeasureArg| args.measure == x || args.measure == MeasureArg::All;

    let mut lines = Vec::new();
    let mut first_error = None;
    let mut record = |r: Result<ConductanceResult, ConductanceError>, lines: &mut Vec<String>| match r {
        Ok(c) => lines.push(c.to_string()),
        Err(e) => {
            lines.push(format!("# {e}"));
            first_error.get_or_insert(e);
        }
    };
    if wants(MeasureArg::Phi2) {
        record(phi2(&g, &s), &mut lines);
    }
    if wants(MeasureArg::Phi3) {
        let t = m.time("triangle_count", || triangle_counts(&g))?;
        record(phi3(&g, &s, &t.per_edge), &mut lines);
    }
    if wants(MeasureArg::Phi4) {
        record(phi4(&g, &s), &mut lines);
    }
    let text = lines.join("\n") + "\n";
    match &args.out {
        Some(out) => {
            fs::write(out, &text)?;
            m.output(out);
            m.write_beside(out)?;
        }
        None => print!("{text}"),
    }
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn run_spectral(args: SpectralArgs) -> Result<(), Failure> {
    let opts = SpectralOptions { tol: args.tol, max_iter: args.max_iter, seed: args.seed, ..Default::default() };
    let mut m = RunManifest::new(
        "spectral",
        json!({"tol": args.tol, "max_iter": args.max_iter, "basis_size": opts.basis_size}),
    );
    m.seeds.push(args.seed);
    let (g, ids) = load(&mut m, &args.edges)?;
    let t = m.time("triangle_count", || triangle_counts(&g))?;
    let spectral = m.time("eigensolve", || second_eigenpair(&g, &t.per_edge, &opts))?;
    let sweep = m.time("sweep", || sweep_cut(&g, &t.per_edge, &spectral.embedding()))?;
    let subset = sweep.subset();

    let mut w = create(&args.out)?;
    for u in 0..g.node_count() {
        writeln!(w, "{}\t{}", ids.to_external(u), subset.contains(u) as u8)?;
    }
    w.flush()?;
    m.output(&args.out);
    m.write_beside(&args.out)?;
    print_json(&json!({
        "lambda2": spectral.lambda2,
        "residual": spectral.residual,
        "iterations": spectral.iterations,
        "excluded_vertices": spectral.excluded.len(),
        "prefix_size": sweep.best_prefix_size,
        "phi3_numerator": sweep.best_phi3.numerator,
        "phi3_denominator": sweep.best_phi3.denominator,
        "phi3": sweep.best_phi3.value(),
    }));
    Ok(())
}

fn write_graph(path: &Path, g: &Graph) -> Result<(), Failure> {
    let mut w = create(path)?;
    write_edge_list(&mut w, g, &IdMap::identity(g.node_count()))?;
    w.flush()?;
    Ok(())
}

fn run_synth(cmd: SynthCommand) -> Result<(), Failure> {
    match cmd {
        SynthCommand::Gnp { n, p, seed, out } => {
            let mut m = RunManifest::new("synth gnp", json!({"n": n, "p": p}));
            m.seeds.push(seed);
            let g = m.time("generate", || synth::gnp(n, p, seed))?;
            write_graph(&out, &g)?;
            m.output(&out);
            m.write_beside(&out)?;
            print_json(&json!({"nodes": g.node_count(), "edges": g.edge_count()}));
        }
        SynthCommand::Planted { n, k, p, q, seed, out, labels } => {
            let params = PlantedParams { n, k, p, q, seed };
            let mut m = RunManifest::new("synth planted", json!(params));
            m.seeds.push(seed);
            let pg = m.time("generate", || synth::planted_partition(&params))?;
            write_graph(&out, &pg.graph)?;
            m.output(&out);
            if let Some(path) = &labels {
                let mut w = create(path)?;
                for (u, l) in pg.labels.iter().enumerate() {
                    writeln!(w, "{u}\t{l}")?;
                }
                w.flush()?;
                m.output(path);
            }
            m.write_beside(&out)?;
            print_json(&json!({"nodes": pg.graph.node_count(), "edges": pg.graph.edge_count()}));
        }
        SynthCommand::Recovery { n, seeds, out } => {
            let mut m = RunManifest::new("synth recovery", json!({"n": n, "log": "natural"}));
            m.seeds = seeds.clone();
            let report = m.time("experiment", || synth::recovery_experiment(n, &seeds))?;
            fs::write(&out, serde_json::to_string_pretty(&report).expect("json") + "\n")?;
            m.output(&out);
            m.write_beside(&out)?;
            print_json(&json!({"successes": report.successes(), "runs": report.runs.len()}));
        }
        SynthCommand::PlantClique { edges, s_size, x_size, seed, out } => {
            let mut m = RunManifest::new("synth plant-clique", json!({"s_size": s_size, "x_size": x_size}));
            m.seeds.push(seed);
            let (g, ids) = load(&mut m, &edges)?;
            let planted = m.time("generate", || synth::plant_clique(&g, s_size, x_size, seed))?;
            let mut w = create(&out)?;
            write_edge_list(&mut w, &planted.graph, &ids)?;
            w.flush()?;
            m.output(&out);
            m.write_beside(&out)?;
            let ext = |v: &[usize]| v.iter().map(|&u| ids.to_external(u)).collect::<Vec<_>>();
            print_json(&json!({
                "added_edges": planted.added_edges,
                "s": ext(&planted.s),
                "x": ext(&planted.x),
            }));
        }
    }
    Ok(())
}

fn run_walk(args: WalkArgs) -> Result<(), Failure> {
    let kind = match args.kind {
        KindArg::Standard => WalkKind::Standard,
        KindArg::Biased => WalkKind::TriangleBiased,
    };
    let start = match args.start {
        StartArg::Uniform => StartDistribution::Uniform,
        StartArg::Volume => StartDistribution::Volume,
    };
    let mut m = RunManifest::new(
        "walk",
        json!({"kind": kind, "trials": args.trials, "steps": args.steps,
               "start": format!("{:?}", args.start), "p": args.p, "q": args.q, "k": args.k}),
    );
    m.seeds.push(args.seed);
    let (g, ids) = load(&mut m, &args.edges)?;
    m.input(&args.labels)?;
    let (labels, unknown) = read_clustering_tsv(&args.labels, &ids)?;
    if unknown > 0 {
        log::warn!("{unknown} labeled nodes are not in the graph");
    }
    let t = m.time("triangle_count", || triangle_counts(&g))?;
    let cfg = WalkConfig { kind, steps: args.steps, trials: args.trials, seed: args.seed, start };
    let estimate = m.time("walk", || empirical_stay_probability(&g, labels.labels(), &t.per_edge, &cfg))?;
    let walker = Walker::new(&g, kind, &t.per_edge)?;
    let profile = stay_profile(&walker, labels.labels());
    let theoretical = match (args.p, args.q, args.k) {
        (Some(p), Some(q), Some(k)) => Some(theoretical_stay(kind, p, q, k)?),
        _ => None,
    };
    let summary = json!({
        "kind": kind,
        "estimate": estimate.estimate,
        "stderr": estimate.stderr,
        "trials": estimate.trials,
        "exact_mean": profile.mean,
        "exact_min": profile.min,
        "exact_max": profile.max,
        "theoretical": theoretical,
    });
    match &args.out {
        Some(out) => {
            fs::write(out, serde_json::to_string_pretty(&summary).expect("json") + "\n")?;
            m.output(out);
            m.write_beside(out)?;
        }
        None => print_json(&summary),
    }
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<(), Failure> {
    let mut m = RunManifest::new("eval", json!({}));
    let (g, ids) = load(&mut m, &args.edges)?;
    m.input(&args.communities)?;
    let truth = load_communities(&args.communities)?;
    let clustering = match &args.clustering {
        Some(path) => {
            m.parameters = json!({"clustering": path.display().to_string()});
            m.input(path)?;
            let (c, unknown) = read_clustering_tsv(path, &ids)?;
            if unknown > 0 {
                log::warn!("{unknown} clustered nodes are not in the graph");
            }
            c
        }
        None => {
            let spec = args.threshold.spec()?;
            m.parameters = describe(spec);
            let t = m.time("triangle_count", || triangle_counts(&g))?;
            m.time("cluster", || tectonic_cluster(&g, &t.per_edge, spec))?.0
        }
    };
    let mut report = m.time("evaluate", || precision_recall(&clustering, &ids, &truth))?;
    let pipeline = ["load", "triangle_count", "cluster"]
        .iter()
        .filter_map(|s| m.timings_seconds.get(s))
        .sum::<f64>();
    report.seconds = args.clustering.is_none().then_some(pipeline);

    let mut w = create(&args.out)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    m.output(&args.out);
    let summary = report.summary_json();
    match &args.summary {
        Some(path) => {
            fs::write(path, serde_json::to_string_pretty(&summary).expect("json") + "\n")?;
            m.output(path);
        }
        None => print_json(&summary),
    }
    m.write_beside(&args.out)?;
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let thetas = args
        .thetas
        .iter()
        .map(|s| s.parse::<Theta>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = RunManifest::new(
        "sweep",
        json!({"thetas": thetas.iter().map(Theta::to_string).collect::<Vec<_>>()}),
    );
    let (g, ids) = load(&mut m, &args.edges)?;
    m.input(&args.communities)?;
    let truth = load_communities(&args.communities)?;
    let t = m.time("triangle_count", || triangle_counts(&g))?;
    let points = m.time("sweep", || theta_sweep(&g, &t.per_edge, &ids, &truth, &thetas))?;
    let mut w = create(&args.out)?;
    eval::write_sweep_csv(&mut w, &points)?;
    w.flush()?;
    m.output(&args.out);
    m.write_beside(&args.out)?;
    let xs: Vec<f64> = points.iter().map(|p| p.theta_value).collect();
    let ps: Vec<f64> = points.iter().map(|p| p.precision).collect();
    let rs: Vec<f64> = points.iter().map(|p| p.recall).collect();
    print_json(&json!({
        "points": points.len(),
        "spearman_precision": eval::spearman(&xs, &ps),
        "spearman_recall": eval::spearman(&xs, &rs),
    }));
    Ok(())
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var("MOTIFCLUST_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Failure::input(format!("MOTIFCLUST_THREADS={v:?} is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(Failure::input)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|()| match cli.command {
        Command::Count(a) => run_count(a),
        Command::Cluster(a) => run_cluster(a),
        Command::Conductance(a) => run_conductance(a),
        Command::Spectral(a) => run_spectral(a),
        Command::Synth(c) => run_synth(c),
        Command::Walk(a) => run_walk(a),
        Command::Eval(a) => run_eval(a),
        Command::Sweep(a) => run_sweep(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("motifclust: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
