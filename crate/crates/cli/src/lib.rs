//! `harmord` command-line front end. [`dispatch`] does all the work so it can
//! be driven from tests with in-memory streams.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::time::Instant;

use clap::{error::ErrorKind, CommandFactory, Parser, Subcommand, ValueEnum};
use harmord_core::billiards::{fold_circle, minimal_period, BilliardError, GreatCircle};
use harmord_core::cone::{ConeOverGraph, KPod};
use harmord_core::hommaps::{build_loop_map, build_tree_map, HomMapError, HomogeneousMap, Shape};
use harmord_core::spectrum::{
    admissible_orders, is_admissible, order_gap, orders_from_certificate, partition_solutions, Fraction, FractionJson,
    SpectrumError, SpectrumQuery,
};
use harmord_core::ReflectionGroup;
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub mod canon;
pub mod shape;

use shape::{load_link, parse_shape, select_cycle, ShapeSpec};

#[derive(Debug, Parser)]
#[command(
    name = "harmord",
    version,
    about = "Orders of homogeneous harmonic maps into buildings"
)]
#[command(arg_required_else_help = true, propagate_version = true)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch commands.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output format; batch commands default to csv, the rest to json.
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Finite reflection groups.
    #[command(subcommand, arg_required_else_help = true)]
    Group(GroupCmd),
    /// Chamber billiards.
    #[command(subcommand, arg_required_else_help = true)]
    Billiard(BilliardCmd),
    /// Homogeneous maps into cones.
    #[command(subcommand, arg_required_else_help = true)]
    Hommap(HommapCmd),
    /// Admissible orders.
    #[command(subcommand, arg_required_else_help = true)]
    Spectrum(SpectrumCmd),
}

#[derive(Debug, clap::Args)]
struct GroupArgs {
    /// dihedral | a | b | d | h3
    #[arg(long)]
    family: String,
    /// p for dihedral, rank otherwise (ignored for h3).
    #[arg(long, default_value_t = 0)]
    param: usize,
}

#[derive(Debug, Subcommand)]
enum GroupCmd {
    /// Order, simple normals and element-order histogram.
    Info(GroupArgs),
}

#[derive(Debug, Subcommand)]
enum BilliardCmd {
    /// Fold one seeded great circle and certify its period.
    Trace {
        #[command(flatten)]
        group: GroupArgs,
        /// Number of path samples over one turn of the circle.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Certify many seeded circles; circle i uses seed + i.
    Survey {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "h3")]
        family: String,
        #[arg(long, default_value_t = 0)]
        param: usize,
        /// Multiplicities checked against the spectrum.
        #[arg(long, default_value_t = 8)]
        max_mult: u64,
    },
}

#[derive(Debug, clap::Args)]
struct ShapeArgs {
    /// tree:m=3:legs=1,2,3 or loop:link=heawood:cycle=auto:mult=1
    #[arg(long)]
    shape: String,
    /// Link for loop shapes without link=: cycle:7:pi/3, star:3:pi, heawood or a JSON file.
    #[arg(long)]
    link: Option<String>,
    /// Distance scale L.
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
}

#[derive(Debug, Subcommand)]
enum HommapCmd {
    /// Construct the map and report its arcs and dichotomy class.
    Build(ShapeArgs),
    /// Energy, height and Almgren order at several radii.
    Order {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
        r: Vec<f64>,
        /// Angular panels per arc.
        #[arg(long, default_value_t = 4)]
        panels: usize,
    },
}

#[derive(Debug, Subcommand)]
enum SpectrumCmd {
    /// Admissible orders m/k in [1, max] with k | |W|.
    List {
        #[arg(long)]
        group_order: u64,
        #[arg(long, default_value_t = 3.0)]
        max: f64,
        /// Rank-one targets: half-integers only.
        #[arg(long)]
        rank_one: bool,
    },
    /// Combinatorial gap 1/|W| above order 1.
    Gap {
        #[arg(long)]
        group_order: u64,
    },
    /// Arc partitions of the circle for order alpha (p/q or decimal).
    Partitions {
        #[arg(long)]
        alpha: String,
    },
}

/// Why a command did not produce its output.
#[derive(Debug)]
enum Failure {
    /// Bad input; exit 2.
    Usage(String),
    /// A checked mathematical statement failed; exit 1.
    Contradiction(String),
}

enum Emit {
    Json(Value),
    Csv(String),
}

struct Outcome {
    emit: Emit,
    /// Set when the output was produced but records a contradiction.
    contradiction: Option<String>,
}

impl From<Emit> for Outcome {
    fn from(emit: Emit) -> Self {
        Outcome {
            emit,
            contradiction: None,
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

/// Runs one command line. `argv[0]` is the program name. Output goes to
/// `out`, the manifest and diagnostics to `err`; returns the exit code.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = start.elapsed();
    let (outcome, contradiction) = match result {
        Ok(o) => {
            let c = o.contradiction.clone();
            (o, c)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n");
            let _ = write!(err, "{}", subcommand_help(&argv));
            return 2;
        }
        Err(Failure::Contradiction(msg)) => {
            let _ = writeln!(err, "contradiction: {msg}");
            return 1;
        }
    };
    let text = match &outcome.emit {
        Emit::Json(v) => {
            let mut s = canon::to_string(v);
            s.push('\n');
            s
        }
        Emit::Csv(s) => s.clone(),
    };
    if out.write_all(text.as_bytes()).is_err() {
        return 1;
    }
    let manifest = json!({
        "command": argv.join(" "),
        "seed": cli.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "duration_s": elapsed.as_secs_f64(),
        "digest": hex::encode(Sha256::digest(text.as_bytes())),
    });
    let _ = writeln!(err, "{}", canon::to_string(&manifest));
    match contradiction {
        Some(msg) => {
            let _ = writeln!(err, "contradiction: {msg}");
            1
        }
        None => 0,
    }
}

/// Help of the deepest subcommand named in `argv`.
fn subcommand_help(argv: &[String]) -> String {
    let mut cmd = Cli::command();
    for word in argv.iter().skip(1) {
        match cmd.find_subcommand(word) {
            Some(sub) => cmd = sub.clone(),
            None => continue,
        }
    }
    cmd.render_help().to_string()
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let batch = matches!(cli.command, Command::Billiard(BilliardCmd::Survey { .. }));
    let format = cli
        .output
        .unwrap_or(if batch { OutputFormat::Csv } else { OutputFormat::Json });
    if format == OutputFormat::Csv && !batch {
        return Err(usage("csv output is only available for 'billiard survey'"));
    }
    match &cli.command {
        Command::Group(GroupCmd::Info(g)) => group_info(g).map(Into::into),
        Command::Billiard(BilliardCmd::Trace { group, samples }) => billiard_trace(group, *samples, cli.seed),
        Command::Billiard(BilliardCmd::Survey {
            count,
            family,
            param,
            max_mult,
        }) => survey(family, *param, *count, *max_mult, cli.seed, cli.jobs, format),
        Command::Hommap(HommapCmd::Build(s)) => hommap_build(s),
        Command::Hommap(HommapCmd::Order { shape, r, panels }) => hommap_order(shape, r, *panels),
        Command::Spectrum(cmd) => spectrum(cmd).map(Into::into),
    }
}

fn group(tag: &str, param: usize) -> Result<ReflectionGroup, Failure> {
    ReflectionGroup::from_tag(tag, param).map_err(usage)
}

fn vector(x: &[f64]) -> Value {
    Value::from(x.to_vec())
}

fn fraction(f: Fraction) -> Value {
    let j = FractionJson::from(f);
    json!({"num": j.num, "den": j.den})
}

fn group_info(g: &GroupArgs) -> Result<Emit, Failure> {
    let grp = group(&g.family, g.param)?;
    let histogram: serde_json::Map<String, Value> = grp
        .element_orders_histogram()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::from(v)))
        .collect();
    Ok(Emit::Json(json!({
        "family": grp.family().to_string(),
        "rank": grp.rank(),
        "order": grp.order(),
        "simple_normals": grp.simple_normals().iter().map(|n| vector(n.as_slice())).collect::<Vec<_>>(),
        "element_orders_histogram": histogram,
    })))
}

fn billiard_trace(g: &GroupArgs, samples: usize, seed: u64) -> Result<Outcome, Failure> {
    let grp = group(&g.family, g.param)?;
    if grp.rank() < 2 {
        return Err(usage("billiards need rank >= 2"));
    }
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let circle = GreatCircle::seeded(grp.rank(), seed);
    let cert = minimal_period(&grp, &circle).map_err(billiard_failure)?;
    let path = fold_circle(&grp, &circle).map_err(billiard_failure)?;
    let events: Vec<Value> = path
        .events()
        .iter()
        .map(|e| json!({"t": e.t, "wall": e.wall}))
        .collect();
    let pts: Vec<Value> = (0..samples)
        .map(|i| {
            let t = TAU * i as f64 / samples as f64;
            let mut row = vec![t];
            row.extend(path.sample(t).iter());
            Value::from(row)
        })
        .collect();
    let contradiction = (!cert.is_valid()).then(|| format!("certificate ({}, {}) fails its own check", cert.j, cert.k));
    Ok(Outcome {
        emit: Emit::Json(json!({
            "circle": {"p": vector(circle.p().as_slice()), "v": vector(circle.v().as_slice())},
            "family": grp.family().to_string(),
            "group_order": grp.order(),
            "lambda": cert.lambda,
            "j": cert.j,
            "k": cert.k,
            "monodromy_word": cert.monodromy.word(),
            "events": events,
            "samples": pts,
        })),
        contradiction,
    })
}

fn billiard_failure(e: BilliardError) -> Failure {
    match e {
        BilliardError::CertificationFailure { .. } | BilliardError::NoRationalMatch { .. } => {
            Failure::Contradiction(e.to_string())
        }
        other => usage(other),
    }
}

struct SurveyRow {
    seed: u64,
    lambda: f64,
    j: u64,
    k: u64,
    ok: bool,
    note: Option<String>,
}

fn survey_one(grp: &ReflectionGroup, seed: u64, max_mult: u64) -> SurveyRow {
    let circle = GreatCircle::seeded(grp.rank(), seed);
    match minimal_period(grp, &circle) {
        Ok(cert) => {
            let note = if !cert.is_valid() {
                Some(format!("seed {seed}: invalid certificate"))
            } else {
                match orders_from_certificate(&cert, max_mult) {
                    Ok(_) => None,
                    Err(SpectrumError::InadmissibleDerivedOrder { order, group_order }) => Some(format!(
                        "seed {seed}: derived order {order} inadmissible for |W| = {group_order}"
                    )),
                    Err(e) => Some(format!("seed {seed}: {e}")),
                }
            };
            SurveyRow {
                seed,
                lambda: cert.lambda,
                j: cert.j,
                k: cert.k,
                ok: note.is_none(),
                note,
            }
        }
        Err(e) => SurveyRow {
            seed,
            lambda: f64::NAN,
            j: 0,
            k: 0,
            ok: false,
            note: Some(format!("seed {seed}: {e}")),
        },
    }
}

fn survey(
    family: &str,
    param: usize,
    count: usize,
    max_mult: u64,
    seed: u64,
    jobs: usize,
    format: OutputFormat,
) -> Result<Outcome, Failure> {
    let grp = group(family, param)?;
    if grp.rank() < 2 {
        return Err(usage("billiards need rank >= 2"));
    }
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(usage)?;
    // indexed parallel iteration keeps rows in seed order
    let rows: Vec<SurveyRow> = pool.install(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|i| survey_one(&grp, seed.wrapping_add(i), max_mult))
            .collect()
    });
    let failures: Vec<&str> = rows.iter().filter_map(|r| r.note.as_deref()).collect();
    let contradiction = (!failures.is_empty()).then(|| {
        format!(
            "{} of {} circles failed; first: {}",
            failures.len(),
            rows.len(),
            failures[0]
        )
    });
    let emit = match format {
        OutputFormat::Csv => {
            let mut s = String::from("seed,lambda,j,k,ok\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.seed,
                    canon::float(r.lambda),
                    r.j,
                    r.k,
                    r.ok
                ));
            }
            Emit::Csv(s)
        }
        OutputFormat::Json => Emit::Json(Value::from(
            rows.iter()
                .map(|r| json!({"seed": r.seed, "lambda": r.lambda, "j": r.j, "k": r.k, "ok": r.ok}))
                .collect::<Vec<_>>(),
        )),
    };
    Ok(Outcome { emit, contradiction })
}

/// Builds the map and returns it with the `|W|` of its target (2 for trees,
/// `2p` for links whose edges all have length `pi/p`).
fn build_map(args: &ShapeArgs) -> Result<(HomogeneousMap, Option<u64>), Failure> {
    match parse_shape(&args.shape).map_err(usage)? {
        ShapeSpec::Tree { legs, pod_legs } => {
            let pod = KPod::new(pod_legs).map_err(usage)?;
            let map = build_tree_map(legs.len(), pod, &legs, args.amplitude).map_err(usage)?;
            Ok((map, Some(2)))
        }
        ShapeSpec::Loop { link, cycle, mult } => {
            let spec = link
                .or_else(|| args.link.clone())
                .ok_or_else(|| usage("loop shape needs link=... or --link"))?;
            let graph = load_link(&spec).map_err(usage)?;
            let path = select_cycle(&graph, &cycle).map_err(usage)?;
            let lengths: Vec<f64> = graph.edges().iter().map(|e| e.length).collect();
            let p = (PI / lengths[0]).round();
            let order = (p >= 2.0 && lengths.iter().all(|&l| (l - PI / p).abs() < 1e-9)).then_some(2 * p as u64);
            let map = build_loop_map(ConeOverGraph::new(graph), &path, mult, args.amplitude).map_err(usage)?;
            Ok((map, order))
        }
    }
}

fn hommap_failure(e: HomMapError) -> Failure {
    match e {
        HomMapError::InconsistentInvariants { .. }
        | HomMapError::SpeedMismatch { .. }
        | HomMapError::NoConvergence { .. }
        | HomMapError::Billiard(_) => Failure::Contradiction(e.to_string()),
        other => usage(other),
    }
}

fn dichotomy_json(map: &HomogeneousMap) -> Result<Value, Failure> {
    let rep = map.dichotomy_classify().map_err(hommap_failure)?;
    let verdict = match rep.verdict {
        harmord_core::hommaps::Verdict::HalfIntegerOrder => "half_integer_order",
        harmord_core::hommaps::Verdict::ConstantDistance => "constant_distance",
    };
    Ok(json!({
        "verdict": verdict,
        "invariants": rep.invariants.iter().map(|&(d, p)| vec![d, p]).collect::<Vec<_>>(),
    }))
}

fn admissibility_json(map: &HomogeneousMap, order: Option<u64>) -> Result<Value, Failure> {
    let Some(order) = order else {
        return Ok(Value::Null);
    };
    match is_admissible(map.alpha(), order, 1e-9) {
        Some((m, k)) => Ok(json!({"group_order": order, "m": m, "k": k})),
        None => Err(Failure::Contradiction(format!(
            "alpha = {} is not m/k with k | {order}",
            map.alpha()
        ))),
    }
}

fn hommap_build(args: &ShapeArgs) -> Result<Outcome, Failure> {
    let (map, order) = build_map(args)?;
    let arcs: Vec<Value> = map
        .arcs()
        .iter()
        .map(|a| json!({"start": a.start, "end": a.end, "v1": a.v1.to_vec(), "v2": a.v2.to_vec()}))
        .collect();
    let mut doc = json!({
        "alpha": map.alpha(),
        "amplitude": map.amplitude(),
        "arcs": arcs,
        "dichotomy": dichotomy_json(&map)?,
        "admissible": admissibility_json(&map, order)?,
    });
    match map.shape() {
        Shape::Tree(t) => {
            doc["kind"] = json!("tree");
            doc["legs"] = json!(t.legs());
            doc["pod_legs"] = json!(t.pod().legs());
        }
        Shape::Loop(l) => {
            doc["kind"] = json!("loop");
            let names = l.graph().names();
            doc["cycle"] = json!(l.vertices().iter().map(|&v| names[v].clone()).collect::<Vec<_>>());
            doc["multiplicity"] = json!(l.multiplicity());
            doc["lap_length"] = json!(l.lap_length());
            if let Some(order) = order {
                let b = map.to_billiard(PI / (order / 2) as f64).map_err(hommap_failure)?;
                doc["billiard"] = json!({
                    "group_order": b.group_order,
                    "minimal_period": b.minimal_period,
                    "certificate": [b.certificate.0, b.certificate.1],
                    "curve_period": b.curve_period,
                    "curve_certificate": [b.curve_certificate.0, b.curve_certificate.1],
                });
            }
        }
    }
    Ok(Emit::Json(doc).into())
}

fn hommap_order(args: &ShapeArgs, radii: &[f64], panels: usize) -> Result<Outcome, Failure> {
    let (map, _) = build_map(args)?;
    let estimates = radii
        .iter()
        .map(|&r| {
            map.order_estimate(r, panels)
                .map(|e| json!({"r": e.r, "E": e.energy, "I": e.i_value, "ord": e.ord}))
                .map_err(hommap_failure)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let image_length = map.image_length(64).map_err(hommap_failure)?;
    Ok(Emit::Json(json!({
        "alpha": map.alpha(),
        "estimates": estimates,
        "dichotomy": dichotomy_json(&map)?,
        "image_length": image_length,
    }))
    .into())
}

/// `p/q` or a decimal.
fn parse_alpha(s: &str) -> Result<f64, Failure> {
    let bad = || usage(format!("--alpha: expected p/q or a number, got '{s}'"));
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() && v >= 1.0 {
        Ok(v)
    } else {
        Err(usage(format!("--alpha must be >= 1, got {s}")))
    }
}

fn spectrum(cmd: &SpectrumCmd) -> Result<Emit, Failure> {
    match cmd {
        SpectrumCmd::List {
            group_order,
            max,
            rank_one,
        } => {
            if *group_order < 1 || !max.is_finite() || *max < 1.0 {
                return Err(usage("need --group-order >= 1 and a finite --max >= 1"));
            }
            let orders = admissible_orders(&SpectrumQuery {
                group_order: *group_order,
                max_order: *max,
                is_rank_one: *rank_one,
            });
            Ok(Emit::Json(Value::from(
                orders.into_iter().map(fraction).collect::<Vec<_>>(),
            )))
        }
        SpectrumCmd::Gap { group_order } => {
            if *group_order < 1 {
                return Err(usage("need --group-order >= 1"));
            }
            Ok(Emit::Json(json!({"gap": fraction(order_gap(*group_order))})))
        }
        SpectrumCmd::Partitions { alpha } => {
            let a = parse_alpha(alpha)?;
            let sols = partition_solutions(a, 1e-9);
            Ok(Emit::Json(Value::from(
                sols.iter()
                    .map(|s| {
                        json!({
                            "alpha": fraction(s.alpha()),
                            "parts": s.parts,
                            "arc_lengths": s.arc_lengths(),
                            "degenerate": s.degenerate,
                        })
                    })
                    .collect::<Vec<_>>(),
            )))
        }
    }
}
