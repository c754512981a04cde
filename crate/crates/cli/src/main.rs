//! `hyperwalk`: generate hyper-graph families, solve exact hitting times,
//! simulate cover times and check cover-time bounds.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 infeasible query
//! (disconnected structure or unreachable target), 4 a bound or invariant
//! check failed.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperwalk::bounds::{
    check_family, line1d_check, line1d_step_moments, lower_trend, mesh2d_trend, BoundReport,
    LowerTrendReport, MeshTrendReport, StepMoments, Verdict, CHECKS,
};
use hyperwalk::exact::{
    foster_sum, transitive_identities, vertex_transitivity, Analyzer, MaxPair, Transitivity,
};
use hyperwalk::families::{self, default_grid, FamilySpec};
use hyperwalk::io::{float_or_inf, fmt17, parse_hypergraph, read_points_csv, to_json};
use hyperwalk::sim::{
    estimate_speedups, sample_cover, with_workers, CoverEstimate, CoverSamples, Passage, SimConfig,
    SpeedupReport, StartPolicy,
};
use hyperwalk::walk::{coupling_check, lift_walk_check, spectrum_check};
use hyperwalk::{AnyHypergraph, Graph, RadioHypergraph};

const EXIT_INVALID: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_FAILED_CHECK: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hyperwalk",
    version,
    about = "Random walks and radio broadcast on hyper-graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a family member as hyper-graph JSON.
    Gen(GenArgs),
    /// Exact hitting and radio hitting times.
    Analyze(AnalyzeArgs),
    /// Monte-Carlo cover and radio cover times.
    Simulate(SimulateArgs),
    /// Compare cover-time bounds with exact and simulated values.
    Bounds(BoundsArgs),
    /// Run the invariant suite over the default family grid.
    Check(CheckArgs),
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: Family,
    /// Output file (default: stdout).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// k-uniform sliding-window hyperline.
    Hyperline {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// k-hop radio line (circular with --ring).
    RadioLine {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ring: bool,
    },
    /// side × side radio torus with L1 reach k.
    Mesh2d {
        #[arg(long)]
        side: usize,
        #[arg(long)]
        k: usize,
    },
    /// One hyper-edge holding every vertex.
    SingleEdge {
        #[arg(long)]
        n: usize,
    },
    /// Radio hyper-graph of the complete graph.
    CompleteBroadcast {
        #[arg(long)]
        n: usize,
    },
    /// Uniform hyper-clique joined to a path.
    CliqueLine {
        #[arg(long = "n-prime")]
        n_prime: usize,
        #[arg(long)]
        c: usize,
    },
    /// Unit-disk radio hyper-graph from an `x,y` CSV file.
    UnitDisk {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        radius: f64,
    },
    /// m uniform random k-subsets, resampled until connected.
    RandomUniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Hyper-graph JSON file, or `-` for stdin.
    input: PathBuf,
    /// Restrict to one start vertex.
    #[arg(long)]
    source: Option<usize>,
    /// Target set U (repeat or comma-separate); default: every single vertex.
    #[arg(long, value_delimiter = ',')]
    target: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Cover,
    RadioCover,
    Both,
    Speedups,
}

#[derive(Clone, Copy)]
struct StartArg(StartPolicy);

impl FromStr for StartArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Self(StartPolicy::All)),
            "stationary" => Ok(Self(StartPolicy::Stationary)),
            v => v
                .parse()
                .map(|v| Self(StartPolicy::Fixed(v)))
                .map_err(|_| format!("expected `all`, `stationary` or a vertex index, got {v:?}")),
        }
    }
}

#[derive(Args, Clone)]
struct SimFlags {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-trial step cap (default: 50·2mnr).
    #[arg(long)]
    cap: Option<u64>,
    /// Worker threads (default: HYPERWALK_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl SimFlags {
    fn config(&self) -> SimConfig {
        SimConfig {
            trials: self.trials,
            cap: self.cap,
            seed: self.seed,
            threads: self.threads,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Quantity::Both)]
    quantity: Quantity,
    /// `all`, `stationary` or a vertex index.
    #[arg(long, default_value = "all")]
    start: StartArg,
    #[command(flatten)]
    sim: SimFlags,
    /// Also write every trial's value to this CSV file.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Hyper-graph JSON file to check.
    input: Option<PathBuf>,
    /// Check every instance of the default family grid.
    #[arg(long)]
    grid: bool,
    /// Checks to run (default: all).
    #[arg(long, value_delimiter = ',')]
    check: Vec<String>,
    #[command(flatten)]
    sim: SimFlags,
    /// Exact radio hitting trend on mesh2d(SIDE, k) over --ks.
    #[arg(long, value_name = "SIDE")]
    mesh_trend: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    ks: Vec<usize>,
    /// Adjacent pairs sampled for the resistance floor.
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    /// clique_line trend over `n':c` pairs, e.g. `6:2,8:2,8:3`.
    #[arg(long, value_delimiter = ',')]
    lower_trend: Vec<String>,
    /// Ring radio_line bound and step moments, as `n:k`.
    #[arg(long)]
    line1d: Option<String>,
    /// CSV series (k, radio h_max) of the mesh trend for plotting.
    #[arg(long)]
    series: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    sim: SimFlags,
    /// Tolerance for operator identities.
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Settings echoed into every report.
#[derive(Serialize)]
struct Meta {
    command: &'static str,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulation: Option<SimSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
}

#[derive(Serialize)]
struct SimSettings {
    seed: u64,
    trials: usize,
    /// `null` means the default of 50·2mnr.
    cap: Option<u64>,
}

impl Meta {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            simulation: None,
            tolerance: None,
        }
    }

    fn sim(mut self, flags: &SimFlags) -> Self {
        self.simulation = Some(SimSettings {
            seed: flags.seed,
            trials: flags.trials,
            cap: flags.cap,
        });
        self
    }
}

fn read_input(path: &Path) -> anyhow::Result<AnyHypergraph> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(parse_hypergraph(&text)?)
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?
        }
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> anyhow::Result<()> {
    emit(output, &serde_json::to_string_pretty(value)?)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<u8> {
    let h: AnyHypergraph = match args.family {
        Family::Hyperline { n, k } => FamilySpec::Hyperline { n, k }.build()?,
        Family::RadioLine { n, k, ring } => FamilySpec::RadioLine { n, k, ring }.build()?,
        Family::Mesh2d { side, k } => FamilySpec::Mesh2d { side, k }.build()?,
        Family::SingleEdge { n } => FamilySpec::SingleEdge { n }.build()?,
        Family::CompleteBroadcast { n } => FamilySpec::CompleteBroadcast { n }.build()?,
        Family::CliqueLine { n_prime, c } => FamilySpec::CliqueLine { n_prime, c }.build()?,
        Family::RandomUniform { n, m, k, seed } => {
            FamilySpec::RandomUniform { n, m, k, seed }.build()?
        }
        Family::UnitDisk { points, radius } => {
            let file =
                fs::File::open(&points).with_context(|| format!("reading {}", points.display()))?;
            families::unit_disk(&read_points_csv(file)?, radius)?.into()
        }
    };
    emit(args.output.as_deref(), &to_json(&h)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct PairRow {
    source: usize,
    target: Vec<usize>,
    #[serde(with = "float_or_inf")]
    hitting: f64,
    #[serde(with = "float_or_inf")]
    radio: f64,
    #[serde(with = "float_or_inf")]
    radio_raw: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    meta: Meta,
    n: usize,
    m: usize,
    directed: bool,
    irreducible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_max: Option<MaxPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_radio_max: Option<MaxPair>,
    rows: Vec<PairRow>,
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<u8> {
    let h = read_input(&args.input)?;
    let n = h.vertex_count();
    let an = Analyzer::new(&h)?;
    if let Some(s) = args.source.filter(|&s| s >= n) {
        bail!(hyperwalk::Error::InvalidParameter(format!(
            "source {s} out of range (n = {n})"
        )));
    }
    let sources: Vec<usize> = args.source.map_or_else(|| (0..n).collect(), |s| vec![s]);
    let targets: Vec<Vec<usize>> = if args.target.is_empty() {
        (0..n).map(|u| vec![u]).collect()
    } else {
        vec![args.target.clone()]
    };
    let mut rows = Vec::new();
    let mut h_max = None::<MaxPair>;
    let mut r_max = None::<MaxPair>;
    for target in &targets {
        let hit = an.hitting(target)?;
        let radio = an.radio_profile(target)?;
        for &v in &sources {
            rows.push(PairRow {
                source: v,
                target: radio.target.clone(),
                hitting: hit.values[v],
                radio: radio.values[v],
                radio_raw: radio.raw[v],
            });
        }
    }
    if args.target.is_empty() {
        for row in &rows {
            let u = row.target[0];
            if h_max.is_none_or(|b| row.hitting > b.value) {
                h_max = Some(MaxPair {
                    value: row.hitting,
                    source: row.source,
                    target: u,
                });
            }
            if r_max.is_none_or(|b| row.radio > b.value) {
                r_max = Some(MaxPair {
                    value: row.radio,
                    source: row.source,
                    target: u,
                });
            }
        }
    }
    let unreachable = rows
        .iter()
        .any(|r| !r.hitting.is_finite() || !r.radio.is_finite());
    match args.format {
        Format::Json => emit_json(
            args.output.as_deref(),
            &AnalyzeReport {
                meta: Meta::new("analyze"),
                n,
                m: h.edge_count(),
                directed: h.is_directed(),
                irreducible: an.is_irreducible(),
                h_max,
                h_radio_max: r_max,
                rows,
            },
        )?,
        Format::Csv => {
            let mut text = String::from("source,target,hitting,radio,radio_raw");
            for r in &rows {
                let t: Vec<String> = r.target.iter().map(usize::to_string).collect();
                text.push_str(&format!(
                    "\n{},{},{},{},{}",
                    r.source,
                    t.join(" "),
                    fmt17(r.hitting),
                    fmt17(r.radio),
                    fmt17(r.radio_raw)
                ));
            }
            emit(args.output.as_deref(), &text)?;
        }
    }
    if unreachable {
        eprintln!("some targets are unreachable from some sources");
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(0)
}

#[derive(Serialize)]
struct SimulateReport {
    meta: Meta,
    #[serde(skip_serializing_if = "Option::is_none")]
    cover: Option<CoverEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radio_cover: Option<CoverEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speedups: Option<SpeedupReport>,
    valid: bool,
}

fn write_samples(path: &Path, samples: &[CoverSamples]) -> anyhow::Result<()> {
    let mut text = String::from("quantity,start,trial,steps");
    for s in samples {
        for (start, values) in s.starts.iter().zip(&s.values) {
            let start = start.map_or_else(|| "stationary".to_string(), |v| v.to_string());
            for (trial, v) in values.iter().enumerate() {
                let v = v.map_or_else(String::new, |x| x.to_string());
                text.push_str(&format!("\n{},{start},{trial},{v}", s.quantity));
            }
        }
    }
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<u8> {
    let h = read_input(&args.input)?;
    let cfg = args.sim.config();
    let meta = Meta::new("simulate").sim(&args.sim);
    let mut report = SimulateReport {
        meta,
        cover: None,
        radio_cover: None,
        speedups: None,
        valid: true,
    };
    if let Quantity::Speedups = args.quantity {
        let s = estimate_speedups(&h, &cfg)?;
        report.valid = s.cover.valid && s.radio_cover.valid;
        report.speedups = Some(s);
    } else {
        let analyzer = Analyzer::new(&h)?;
        let model = analyzer.model();
        let mut samples = Vec::new();
        if matches!(args.quantity, Quantity::Cover | Quantity::Both) {
            samples.push(sample_cover(model, Passage::Visit, args.start.0, &cfg)?);
        }
        if matches!(args.quantity, Quantity::RadioCover | Quantity::Both) {
            samples.push(sample_cover(model, Passage::Hear, args.start.0, &cfg)?);
        }
        for s in &samples {
            let est = s.summarize();
            report.valid &= est.valid;
            match s.quantity.as_str() {
                "cover" => report.cover = Some(est),
                _ => report.radio_cover = Some(est),
            }
        }
        if let Some(path) = &args.samples {
            write_samples(path, &samples)?;
        }
    }
    if !report.valid {
        eprintln!("warning: more than 1% of trials hit the step cap; raise --cap");
    }
    emit_json(args.output.as_deref(), &report)?;
    Ok(0)
}

#[derive(Serialize)]
struct Line1dReport {
    radio_line: StepMoments,
    hyperline: StepMoments,
    bound: BoundReport,
}

#[derive(Serialize)]
struct BoundsOutput {
    meta: Meta,
    reports: Vec<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mesh_trend: Option<MeshTrendReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_trend: Option<LowerTrendReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line1d: Option<Line1dReport>,
    violated: usize,
}

fn parse_pair(s: &str) -> anyhow::Result<(usize, usize)> {
    let bad = || hyperwalk::Error::InvalidParameter(format!("expected `a:b`, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn print_table(reports: &[BoundReport]) {
    eprintln!(
        "{:<28} {:<17} {:>14} {:>14} {:>10}  verdict",
        "instance", "bound", "value", "measured", "±ci"
    );
    for r in reports {
        eprintln!(
            "{:<28} {:<17} {:>14.4} {:>14.4} {:>10.4}  {:?}",
            r.instance, r.bound, r.value, r.measured, r.ci_half_width, r.verdict
        );
    }
}

fn cmd_bounds(args: BoundsArgs) -> anyhow::Result<u8> {
    let checks: Vec<&str> = args.check.iter().map(String::as_str).collect();
    if let Some(bad) = checks.iter().find(|c| !CHECKS.contains(c)) {
        bail!(hyperwalk::Error::InvalidParameter(format!(
            "unknown check {bad:?}; expected one of {CHECKS:?}"
        )));
    }
    let lower: Vec<(usize, usize)> = args
        .lower_trend
        .iter()
        .map(|s| parse_pair(s))
        .collect::<anyhow::Result<_>>()?;
    let line1d = args.line1d.as_deref().map(parse_pair).transpose()?;
    if args.input.is_none()
        && !args.grid
        && args.mesh_trend.is_none()
        && lower.is_empty()
        && line1d.is_none()
    {
        bail!(hyperwalk::Error::InvalidParameter(
            "nothing to check: give an input file, --grid, --mesh-trend, --lower-trend or --line1d"
                .into()
        ));
    }
    let cfg = args.sim.config();
    let mut instances: Vec<(String, AnyHypergraph)> = Vec::new();
    if let Some(path) = &args.input {
        instances.push((path.display().to_string(), read_input(path)?));
    }
    if args.grid {
        instances.extend(
            default_grid()
                .into_iter()
                .map(|s| (s.label(), s.build()))
                .map(|(l, h)| (l, h.unwrap())),
        );
    }
    let mut reports = Vec::new();
    for (label, h) in &instances {
        reports.extend(check_family(h, label, &checks, &cfg)?);
    }
    let mesh_trend = args
        .mesh_trend
        .map(|side| mesh2d_trend(side, &args.ks, args.pairs, args.sim.seed))
        .transpose()?;
    if let (Some(trend), Some(path)) = (&mesh_trend, &args.series) {
        let mut text = String::from("k,d,h_radio_max,scale");
        for r in &trend.rows {
            text.push_str(&format!(
                "\n{},{},{},{}",
                r.k,
                r.d,
                fmt17(r.h_radio_max),
                fmt17(r.scale)
            ));
        }
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let lower_trend = if lower.is_empty() {
        None
    } else {
        Some(lower_trend(&lower)?)
    };
    let line1d = match line1d {
        Some((n, k)) => {
            let (radio_line, hyperline) = line1d_step_moments(k)?;
            let bound = line1d_check(n, k, &cfg)?;
            reports.push(bound.clone());
            Some(Line1dReport {
                radio_line,
                hyperline,
                bound,
            })
        }
        None => None,
    };
    let violated = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Violated)
        .count();
    print_table(&reports);
    if let Some(t) = &mesh_trend {
        for r in &t.rows {
            eprintln!(
                "mesh2d({},{}) radio h_max = {:.4}, min R_wv = {:.4} (floor {:.4})",
                t.side, r.k, r.h_radio_max, r.min_resistance, r.resistance_floor
            );
        }
        eprintln!("strictly decreasing: {}", t.strictly_decreasing);
    }
    let out = BoundsOutput {
        meta: Meta::new("bounds").sim(&args.sim),
        reports,
        mesh_trend,
        lower_trend,
        line1d,
        violated,
    };
    emit_json(args.output.as_deref(), &out)?;
    Ok(if violated > 0 { EXIT_FAILED_CHECK } else { 0 })
}

#[derive(Serialize)]
struct CheckRow {
    instance: String,
    check: String,
    #[serde(with = "float_or_inf")]
    value: f64,
    #[serde(with = "float_or_inf")]
    tolerance: f64,
    pass: bool,
}

fn row(instance: &str, check: &str, value: f64, tolerance: f64, pass: bool) -> CheckRow {
    CheckRow {
        instance: instance.into(),
        check: check.into(),
        value,
        tolerance,
        pass,
    }
}

fn graph_of(h: &AnyHypergraph) -> Option<Graph> {
    match h {
        AnyHypergraph::Undirected(u) if u.edges().iter().all(|e| e.len() == 2) => Graph::new(
            u.vertex_count(),
            u.edges().iter().map(|e| (e[0], e[1])).collect(),
        )
        .ok(),
        AnyHypergraph::Directed(d) => RadioHypergraph::try_from(d.clone()).ok()?.reception_graph(),
        _ => None,
    }
}

fn check_instance(
    label: &str,
    h: &AnyHypergraph,
    tol: f64,
    cfg: &SimConfig,
) -> anyhow::Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    if let AnyHypergraph::Undirected(u) = h {
        let mut worst: f64 = 0.0;
        for t in 1..=10 {
            worst = worst.max(coupling_check(u, t, tol)?.max_deviation);
        }
        rows.push(row(label, "coupling", worst, tol, worst <= tol));
        let lift = (1..=5)
            .map(|t| lift_walk_check(u, t, tol).map(|r| r.max_deviation))
            .collect::<Result<Vec<_>, _>>()?;
        let worst = lift.into_iter().fold(0.0, f64::max);
        rows.push(row(label, "lift", worst, tol, worst <= tol));
        if u.vertex_count() + u.edge_count() <= 400 {
            let s = spectrum_check(u, 1e-8)?;
            rows.push(row(label, "spectrum", s.max_pairing_distance, 1e-8, s.pass));
        }
    }
    if h.vertex_count() <= 30 {
        let an = Analyzer::new(h)?;
        let hit = an.hitting_table()?;
        let (radio, _) = an.radio_tables()?;
        let excess = hit
            .values
            .iter()
            .zip(&radio.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x))
            .fold(f64::NEG_INFINITY, f64::max);
        rows.push(row(label, "radio_not_slower", excess, 1e-9, excess <= 1e-9));
    }
    if let Some(g) = graph_of(h) {
        let f = foster_sum(&g)?;
        rows.push(row(label, "foster", f.residual, 1e-8, f.residual <= 1e-8));
        if let AnyHypergraph::Directed(d) = h {
            if vertex_transitivity(&g) == Transitivity::Transitive {
                let r = RadioHypergraph::try_from(d.clone())?;
                let t = transitive_identities(&r, 0, g.vertex_count() - 1)?;
                rows.push(row(
                    label,
                    "transitive_identities",
                    t.max_residual,
                    1e-7,
                    t.max_residual <= 1e-7,
                ));
            }
        }
    }
    for b in check_family(h, label, &[], cfg)? {
        let pass = b.verdict != Verdict::Violated;
        rows.push(row(
            label,
            &format!("bound:{}", b.bound),
            b.measured,
            b.value,
            pass,
        ));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct CheckOutput {
    meta: Meta,
    results: Vec<CheckRow>,
    failed: usize,
}

fn cmd_check(args: CheckArgs) -> anyhow::Result<u8> {
    let cfg = args.sim.config();
    let mut specs = default_grid();
    specs.push(FamilySpec::Mesh2d { side: 4, k: 1 });
    let mut results = Vec::new();
    for spec in specs {
        let h = spec.build()?;
        results.extend(check_instance(&spec.label(), &h, args.tolerance, &cfg)?);
    }
    for k in 1..=10 {
        let (radio, _) = line1d_step_moments(k)?;
        results.push(row(
            &format!("radio_line step k={k}"),
            "line1d_variance",
            radio.second_moment_f64,
            radio.constant_f64,
            radio.matches,
        ));
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    for r in results.iter().filter(|r| !r.pass) {
        eprintln!(
            "FAIL {} {}: {} (tolerance {})",
            r.instance, r.check, r.value, r.tolerance
        );
    }
    eprintln!("{} checks, {failed} failed", results.len());
    let mut meta = Meta::new("check").sim(&args.sim);
    meta.tolerance = Some(args.tolerance);
    emit_json(
        args.output.as_deref(),
        &CheckOutput {
            meta,
            results,
            failed,
        },
    )?;
    Ok(if failed > 0 { EXIT_FAILED_CHECK } else { 0 })
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Check(a) => cmd_check(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hyperwalk::Error>() {
        Some(e) if e.is_infeasible() => EXIT_INFEASIBLE,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_workers(None, || run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
