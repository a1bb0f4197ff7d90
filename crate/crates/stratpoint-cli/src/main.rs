//! Command-line surface over the stratpoint library.
//!
//! Exit codes: 0 on success, 1 when a verification or consistency check
//! fails, 2 on usage, file, or precondition errors.

mod format;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::path::PathBuf;

use format::{
    load_input, parse_floats, parse_grid, parse_point, problem_to_file, render_input,
    sqp_to_file, InputFile,
};
use stratpoint::code::{is_stationary, mfcq_violated};
use stratpoint::examples::all_builtins;
use stratpoint::jet::{build_normal_form, jet_sp, normal_form_jacobian, point_code, SqpInstance};
use stratpoint::rational::{format_rational, rat_int, rat_to_f64};
use stratpoint::tracer::{
    boundary_probe, export_trace, snap_jet_values, trace_grid, trace_problem_grid,
    Classification, ExportFormat, GridSpec, ProbePosition, TraceRecord,
};
use stratpoint::transform::{
    apply_slack, mf2sp, sp2mf, verify_commutation, ActiveSetAction, CodeAction, PairAction,
    TransformKind, TransformedProblem,
};
use stratpoint::verify::{render, run_suite, Suite};
use stratpoint::{CombinatorialCode, Poly, PolyProblem, ProblemSize, Rational};

#[derive(Parser)]
#[command(
    name = "stratpoint",
    version,
    about = "Stationarity and constraint-qualification analysis of parametric problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide stationarity and MFCQ failure at one point, with the code.
    Code {
        /// Built-in example name or path to a problem/instance file.
        problem: String,
        /// Decision variables, comma-separated exact rationals.
        #[arg(long)]
        x: String,
        /// Parameters, comma-separated exact rationals.
        #[arg(long, default_value = "")]
        y: String,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Attach the universal convex-quadratic normal form at a point.
    NormalForm {
        problem: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "")]
        y: String,
        /// Where to write the instance file (includes the parameter y_bar).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite the problem and verify the induced code action on samples.
    Transform {
        problem: String,
        #[arg(long, value_enum)]
        kind: TransformArg,
        /// Which inequality a slack rewrite targets (1-based).
        #[arg(long, default_value_t = 1)]
        index: usize,
        /// Where to write the transformed problem file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Classify parameter-grid nodes, or probe a distinguished inequality.
    Trace {
        problem: String,
        /// Grid description, e.g. y1=-1:1:41,y2=0,y3=-1:1:41
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Two 1-based parameter indices for the SVG projection, e.g. 1,3.
        #[arg(long)]
        project: Option<String>,
        /// Probe this inequality's activation boundary instead of tracing
        /// (1-based, exact instances only).
        #[arg(long)]
        distinguish: Option<usize>,
        /// Inequalities held active along the corrected branch (1-based,
        /// polynomial problems only).
        #[arg(long, default_value = "")]
        active: String,
        /// Corrector seed for the first node (polynomial problems only).
        #[arg(long)]
        seed_x: Option<String>,
        /// Write the export here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized verification suites against their oracles.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Defaults to $STRATPOINT_SEED, then 42.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// List built-in examples, or write one to a file.
    Examples {
        /// Name of the example to show or export.
        #[arg(long)]
        name: Option<String>,
        /// Write the named example as an input file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    Slack,
    Sp2mf,
    Mf2sp,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Codes,
    Qp,
    Transforms,
    Boundary,
    All,
}

fn main() {
    // Die quietly when a downstream pipe closes early, as cat and grep do,
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Code { problem, x, y, json } => cmd_code(&problem, &x, &y, json),
        Command::NormalForm {
            problem,
            x,
            y,
            out,
            json,
        } => cmd_normal_form(&problem, &x, &y, &out, json),
        Command::Transform {
            problem,
            kind,
            index,
            out,
            json,
        } => cmd_transform(&problem, kind, index, &out, json),
        Command::Trace {
            problem,
            grid,
            format,
            project,
            distinguish,
            active,
            seed_x,
            out,
        } => cmd_trace(
            &problem,
            &grid,
            format,
            project.as_deref(),
            distinguish,
            &active,
            seed_x.as_deref(),
            out.as_deref(),
        ),
        Command::Verify {
            suite,
            seed,
            trials,
        } => cmd_verify(suite, seed, trials),
        Command::Examples { name, out } => cmd_examples(name.as_deref(), out.as_deref()),
    }
}

fn point_for(problem: &PolyProblem, x: &str, y: &str) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let x = parse_point(x)?;
    let y = parse_point(y)?;
    if x.len() != problem.size.n {
        bail!("x has {} coordinates, the problem has n = {}", x.len(), problem.size.n);
    }
    if y.len() != problem.size.p {
        bail!("y has {} coordinates, the problem has p = {}", y.len(), problem.size.p);
    }
    Ok((x, y))
}

fn yes_no(v: bool) -> &'static str {
    if v {
        "yes"
    } else {
        "no"
    }
}

fn indices_json(set: &BTreeSet<usize>) -> serde_json::Value {
    set.iter().map(|k| k + 1).collect::<Vec<usize>>().into()
}

fn fmt_index_set(set: &BTreeSet<usize>, m_star: usize) -> String {
    let parts: Vec<String> = set
        .iter()
        .map(|k| {
            if *k == m_star {
                "m*".to_string()
            } else {
                (k + 1).to_string()
            }
        })
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn fmt_pairs<'a>(pairs: impl Iterator<Item = &'a stratpoint::IndexPair>, m_star: usize) -> String {
    let parts: Vec<String> = pairs
        .map(|p| {
            format!(
                "({},{})",
                fmt_index_set(&p.i, m_star),
                fmt_index_set(&p.j, usize::MAX)
            )
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn pair_json(p: &stratpoint::IndexPair) -> serde_json::Value {
    serde_json::json!({
        "i": indices_json(&p.i),
        "j": indices_json(&p.j),
    })
}

fn code_json(code: &CombinatorialCode) -> serde_json::Value {
    serde_json::json!({
        "m_star": code.m_star + 1,
        "i0": indices_json(&code.i0),
        "pairs": code.pairs.iter().map(pair_json).collect::<Vec<_>>(),
        "sp_pairs": code.sp_pairs().map(pair_json).collect::<Vec<_>>(),
        "mf_pairs": code.mf_pairs().map(pair_json).collect::<Vec<_>>(),
    })
}

fn rational_strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn cmd_code(problem: &str, x: &str, y: &str, json: bool) -> Result<i32> {
    let loaded = load_input(problem)?;
    let (x, y) = point_for(&loaded.problem, x, y)?;
    let report = point_code(&loaded.problem, &x, &y)?;
    let stationary = report.feasible && report.code.is_stationary();
    let violated = report.feasible && report.code.mfcq_violated();
    if json {
        let body = serde_json::json!({
            "problem": loaded.name,
            "x": rational_strings(&x),
            "y": rational_strings(&y),
            "ineq_feasible": report.ineq_feasible,
            "eq_feasible": report.eq_feasible,
            "feasible": report.feasible,
            "code": code_json(&report.code),
            "stationary": stationary,
            "mfcq_violated": violated,
        });
        println!("{}", serde_json::to_string_pretty(&body)?);
    } else {
        let size = loaded.problem.size;
        println!(
            "problem: {} (n={}, m_le={}, m_eq={}, p={})",
            loaded.name, size.n, size.m_le, size.m_eq, size.p
        );
        println!(
            "point: x=({}) y=({})",
            rational_strings(&x).join(","),
            rational_strings(&y).join(",")
        );
        println!(
            "feasible: {} (inequalities {}, equalities {})",
            yes_no(report.feasible),
            yes_no(report.ineq_feasible),
            yes_no(report.eq_feasible)
        );
        let code = &report.code;
        println!("code: {code}");
        println!("active set: {}", fmt_index_set(&code.i0, usize::MAX));
        println!("sp pairs: {}", fmt_pairs(code.sp_pairs(), code.m_star));
        println!("mf pairs: {}", fmt_pairs(code.mf_pairs(), code.m_star));
        println!("stationary: {}", yes_no(stationary));
        println!("mfcq violated: {}", yes_no(violated));
    }
    Ok(0)
}

fn cmd_normal_form(problem: &str, x: &str, y: &str, out: &std::path::Path, json: bool) -> Result<i32> {
    let loaded = load_input(problem)?;
    let (x, y) = point_for(&loaded.problem, x, y)?;
    let jet = jet_sp(&loaded.problem, &x, &y)?;
    let built = build_normal_form(&jet)?;
    let (_, det) = normal_form_jacobian(&jet)?;
    let round_trip = built.jet_check == jet;
    let unit = det.clone() == rat_int(1) || det.clone() == rat_int(-1);

    let body = render_input(&InputFile::Sqp(sqp_to_file(&built.sqp, Some(&built.y_bar))))?;
    std::fs::write(out, body).with_context(|| format!("writing {}", out.display()))?;

    if json {
        let body = serde_json::json!({
            "problem": loaded.name,
            "out": out.display().to_string(),
            "size": {
                "n": built.sqp.size.n,
                "m_le": built.sqp.size.m_le,
                "m_eq": built.sqp.size.m_eq,
                "p": built.sqp.size.p,
            },
            "determinant": format_rational(&det),
            "round_trip": round_trip,
        });
        println!("{}", serde_json::to_string_pretty(&body)?);
    } else {
        let size = built.sqp.size;
        println!("wrote {}", out.display());
        println!(
            "normal form: n={}, m_le={}, m_eq={}, p={}",
            size.n, size.m_le, size.m_eq, size.p
        );
        println!("jacobian determinant: {}", format_rational(&det));
        println!(
            "round trip: {}",
            if round_trip { "ok" } else { "MISMATCH" }
        );
    }
    if !round_trip || !unit {
        eprintln!("normal-form checks failed");
        return Ok(1);
    }
    Ok(0)
}

fn action_text(action: &CodeAction) -> String {
    let active = match action.active {
        ActiveSetAction::Identity => "I0 unchanged",
        ActiveSetAction::AddMStar => "I0 gains the old objective index",
    };
    let pairs = match action.pairs {
        PairAction::Identity => "pairs unchanged",
        PairAction::StarEachPair => "each pair gains the objective index",
    };
    format!("{active}; {pairs}")
}

fn action_json(action: &CodeAction) -> serde_json::Value {
    serde_json::json!({
        "active": match action.active {
            ActiveSetAction::Identity => "identity",
            ActiveSetAction::AddMStar => "add_m_star",
        },
        "pairs": match action.pairs {
            PairAction::Identity => "identity",
            PairAction::StarEachPair => "star_each_pair",
        },
    })
}

/// Deterministic sample points with small integer coordinates, used for the
/// commutation and membership spot checks.
fn sample_points(n: usize, p: usize, count: usize) -> Vec<(Vec<Rational>, Vec<Rational>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count)
        .map(|_| {
            let x = (0..n).map(|_| rat_int(rng.gen_range(-1..=1))).collect();
            let y = (0..p).map(|_| rat_int(rng.gen_range(-1..=1))).collect();
            (x, y)
        })
        .collect()
}

/// Problem-level slack rewrite: one inequality is traded for a fresh
/// variable pinned to its negated value, nonnegative in the image.
fn slack_problem(prob: &PolyProblem, index: usize) -> Result<(PolyProblem, stratpoint::transform::VarMap)> {
    if index == 0 || index > prob.size.m_le {
        bail!(
            "slack index {index} out of range 1..={}",
            prob.size.m_le
        );
    }
    let g = &prob.inequalities[index - 1];
    let split = apply_slack(&g.neg());
    let ProblemSize { n, m_le, m_eq, p } = prob.size;
    let mut inequalities: Vec<Poly> = prob
        .inequalities
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != index - 1)
        .map(|(_, q)| q.extend(n + 1, p))
        .collect();
    inequalities.push(split.nonneg.neg());
    let mut equalities: Vec<Poly> = prob.equalities.iter().map(|h| h.extend(n + 1, p)).collect();
    equalities.push(split.tie.clone());
    let image = PolyProblem {
        size: ProblemSize {
            n: n + 1,
            m_le,
            m_eq: m_eq + 1,
            p,
        },
        objective: prob.objective.extend(n + 1, p),
        inequalities,
        equalities,
    };
    Ok((image, split.var_map))
}

fn feasible_at(prob: &PolyProblem, x: &[Rational], y: &[Rational]) -> Result<bool> {
    use num::{Signed, Zero};
    for g in &prob.inequalities {
        if g.eval(x, y)?.is_positive() {
            return Ok(false);
        }
    }
    for h in &prob.equalities {
        if !h.eval(x, y)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn write_transformed(
    out: &std::path::Path,
    image: &PolyProblem,
) -> Result<()> {
    let body = render_input(&InputFile::Problem(problem_to_file(image)))?;
    std::fs::write(out, body).with_context(|| format!("writing {}", out.display()))
}

fn cmd_transform(
    problem: &str,
    kind: TransformArg,
    index: usize,
    out: &std::path::Path,
    json: bool,
) -> Result<i32> {
    let loaded = load_input(problem)?;
    let prob = loaded.problem;

    if kind == TransformArg::Slack {
        let (image, var_map) = slack_problem(&prob, index)?;
        let samples = sample_points(prob.size.n, prob.size.p, 12);
        let mut failures = Vec::new();
        for (k, (x, y)) in samples.iter().enumerate() {
            let (x2, y2) = var_map.apply(x, y)?;
            if feasible_at(&prob, x, y)? != feasible_at(&image, &x2, &y2)? {
                failures.push(format!("sample {k}: membership not preserved"));
            }
        }
        write_transformed(out, &image)?;
        let ok = failures.is_empty();
        if json {
            let body = serde_json::json!({
                "kind": "slack",
                "out": out.display().to_string(),
                "action": action_json(&CodeAction::IDENTITY),
                "samples": samples.len(),
                "ok": ok,
                "failures": failures,
            });
            println!("{}", serde_json::to_string_pretty(&body)?);
        } else {
            println!("wrote {}", out.display());
            println!("code action: {}", action_text(&CodeAction::IDENTITY));
            println!(
                "membership check: {}/{} samples preserved",
                samples.len() - failures.len(),
                samples.len()
            );
            for f in &failures {
                println!("  - {f}");
            }
        }
        return Ok(if ok { 0 } else { 1 });
    }

    let t: TransformedProblem = match kind {
        TransformArg::Sp2mf => sp2mf(&prob).map_err(|e| anyhow!("{e}"))?,
        TransformArg::Mf2sp => mf2sp(&prob).map_err(|e| anyhow!("{e}"))?,
        TransformArg::Slack => unreachable!(),
    };
    let samples = sample_points(prob.size.n, prob.size.p, 12);
    let report = verify_commutation(&t, &samples)?;
    write_transformed(out, &t.problem)?;
    if json {
        let body = serde_json::json!({
            "kind": match t.kind {
                TransformKind::SpToMf => "sp2mf",
                TransformKind::MfToSp => "mf2sp",
            },
            "out": out.display().to_string(),
            "action": action_json(&t.code_action),
            "samples": report.checked,
            "ok": report.ok(),
            "failures": report.failures,
        });
        println!("{}", serde_json::to_string_pretty(&body)?);
    } else {
        println!("wrote {}", out.display());
        println!("code action: {}", action_text(&t.code_action));
        println!(
            "commutation check: {}/{} samples exact",
            report.checked - report.failures.len(),
            report.checked
        );
        for f in &report.failures {
            println!("  - {f}");
        }
    }
    Ok(if report.ok() { 0 } else { 1 })
}

/// Re-derives each record's verdict from its exact jet through the
/// multiplier-feasibility route and checks it against the recorded code and
/// classification. Returns human-readable violations.
fn audit_records(
    records: &[TraceRecord],
    jet_of: impl Fn(&[Rational], &[Rational]) -> Result<stratpoint::JetPoint>,
) -> Result<Vec<String>> {
    let mut violations = Vec::new();
    for (k, rec) in records.iter().enumerate() {
        match rec.classification {
            Classification::SpInterior => {
                let x = rec
                    .x
                    .as_ref()
                    .ok_or_else(|| anyhow!("record {k}: stationary without a point"))?;
                let jet = jet_of(x, &rec.y)?;
                if !rec.code.is_stationary() {
                    violations.push(format!("record {k}: sp_interior without a stationarity pair"));
                }
                if !is_stationary(&jet).map_err(|e| anyhow!("{e}"))? {
                    violations.push(format!(
                        "record {k}: sp_interior fails the multiplier feasibility check"
                    ));
                }
                if mfcq_violated(&jet).map_err(|e| anyhow!("{e}"))? {
                    violations.push(format!("record {k}: sp_interior carries a degeneracy"));
                }
            }
            Classification::MfBoundary => {
                if !rec.code.mfcq_violated() {
                    violations.push(format!("record {k}: mf_boundary without a degeneracy pair"));
                }
                if let Some(x) = &rec.x {
                    let jet = jet_of(x, &rec.y)?;
                    if !mfcq_violated(&jet).map_err(|e| anyhow!("{e}"))? {
                        violations.push(format!(
                            "record {k}: mf_boundary fails the multiplier feasibility check"
                        ));
                    }
                }
            }
            Classification::Infeasible => {
                if rec.x.is_some() || !rec.code.pairs.is_empty() {
                    violations.push(format!("record {k}: infeasible record carries data"));
                }
            }
            Classification::NonStationary => {
                if rec.code.is_stationary() || rec.code.mfcq_violated() {
                    violations.push(format!("record {k}: non_stationary with certificate pairs"));
                }
            }
        }
    }
    Ok(violations)
}

fn parse_projection(s: &str, p: usize) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts.as_slice() else {
        bail!("--project wants two comma-separated indices, got {s:?}");
    };
    let a: usize = a.trim().parse().context("bad projection index")?;
    let b: usize = b.trim().parse().context("bad projection index")?;
    if a == 0 || b == 0 || a > p || b > p {
        bail!("projection indices must lie in 1..={p}");
    }
    Ok((a - 1, b - 1))
}

fn run_boundary_probe(sqp: &SqpInstance, m: usize, grid: &GridSpec) -> Result<i32> {
    if m == 0 || m > sqp.size.m_le {
        bail!("--distinguish index {m} out of range 1..={}", sqp.size.m_le);
    }
    let report = boundary_probe(sqp, m - 1, grid).map_err(|e| anyhow!("{e}"))?;
    println!(
        "boundary probe: inequality {m}, {} nodes, {} skipped",
        report.nodes.len(),
        report.skipped
    );
    for node in &report.nodes {
        let y: Vec<String> = node.y.iter().map(format_rational).collect();
        match &node.boundary {
            Some(a) => {
                let marks: Vec<String> = node
                    .checks
                    .iter()
                    .map(|c| {
                        let pos = match c.position {
                            ProbePosition::Below => "below",
                            ProbePosition::At => "at",
                            ProbePosition::Above => "above",
                        };
                        format!("{pos}:{}", if c.ok { "ok" } else { "VIOLATION" })
                    })
                    .collect();
                println!(
                    "  y=({}) boundary={} {}",
                    y.join(","),
                    format_rational(a),
                    marks.join(" ")
                );
            }
            None => println!("  y=({}) skipped (no boundary)", y.join(",")),
        }
    }
    if report.ok() {
        println!("trichotomy: ok");
        Ok(0)
    } else {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        Ok(1)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    problem: &str,
    grid: &str,
    format: FormatArg,
    project: Option<&str>,
    distinguish: Option<usize>,
    active: &str,
    seed_x: Option<&str>,
    out: Option<&std::path::Path>,
) -> Result<i32> {
    let loaded = load_input(problem)?;
    let p = loaded.problem.size.p;
    let grid = parse_grid(grid, p)?;
    let projection = project.map(|s| parse_projection(s, p)).transpose()?;

    if let Some(m) = distinguish {
        let Some(sqp) = &loaded.sqp else {
            bail!("--distinguish needs an exact quadratic instance");
        };
        return run_boundary_probe(sqp, m, &grid);
    }

    let records: Vec<TraceRecord>;
    let violations: Vec<String>;
    match &loaded.sqp {
        Some(sqp) => {
            records = trace_grid(sqp, &grid).map_err(|e| anyhow!("{e}"))?;
            violations = audit_records(&records, |x, y| {
                sqp.jet_at(x, y).map_err(|e| anyhow!("{e}"))
            })?;
        }
        None => {
            let prob = &loaded.problem;
            let active_set: BTreeSet<usize> = parse_point(active)?
                .iter()
                .map(|v| {
                    let k = rat_to_f64(v) as i64;
                    if rat_int(k) != *v || k < 1 || k as usize > prob.size.m_le {
                        bail!("--active entries must be inequality indices 1..={}", prob.size.m_le);
                    }
                    Ok(k as usize - 1)
                })
                .collect::<Result<_>>()?;
            let seed = match seed_x {
                Some(s) => {
                    let parsed = parse_floats(s)?;
                    if parsed.len() != prob.size.n {
                        bail!("--seed-x needs n = {} coordinates", prob.size.n);
                    }
                    parsed
                }
                None => vec![0.0; prob.size.n],
            };
            let trace = trace_problem_grid(prob, &grid, &active_set, &seed)
                .map_err(|e| anyhow!("{e}"))?;
            for note in &trace.notes {
                eprintln!("note: {note}");
            }
            records = trace.records;
            violations = audit_records(&records, |x, y| {
                let mut jet = jet_sp(prob, x, y).map_err(|e| anyhow!("{e}"))?;
                snap_jet_values(&mut jet);
                Ok(jet)
            })?;
        }
    }

    let export = export_trace(
        &records,
        match format {
            FormatArg::Csv => ExportFormat::Csv,
            FormatArg::Json => ExportFormat::Json,
            FormatArg::Svg => ExportFormat::Svg,
        },
        projection,
    )
    .map_err(|e| anyhow!("{e}"))?;
    match out {
        Some(path) => {
            std::fs::write(path, &export).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{export}"),
    }

    if violations.is_empty() {
        Ok(0)
    } else {
        for v in &violations {
            eprintln!("consistency violation: {v}");
        }
        Ok(1)
    }
}

fn cmd_verify(suite: SuiteArg, seed: Option<u64>, trials: usize) -> Result<i32> {
    let seed = match seed {
        Some(s) => s,
        None => match std::env::var("STRATPOINT_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| anyhow!("STRATPOINT_SEED must be an unsigned integer, got {v:?}"))?,
            Err(_) => 42,
        },
    };
    let suites: Vec<Suite> = match suite {
        SuiteArg::Codes => vec![Suite::Codes],
        SuiteArg::Qp => vec![Suite::Qp],
        SuiteArg::Transforms => vec![Suite::Transforms],
        SuiteArg::Boundary => vec![Suite::Boundary],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, seed, trials))
        .collect::<stratpoint::Result<Vec<_>>>()
        .map_err(|e| anyhow!("{e}"))?;
    let ok = reports.iter().all(|r| r.ok());
    print!("{}", render(seed, trials, &reports));
    Ok(if ok { 0 } else { 1 })
}

fn cmd_examples(name: Option<&str>, out: Option<&std::path::Path>) -> Result<i32> {
    match name {
        None => {
            if out.is_some() {
                bail!("--out needs --name");
            }
            for ex in all_builtins() {
                let s = ex.problem.size;
                println!(
                    "{} (n={}, m_le={}, m_eq={}, p={}{})",
                    ex.name,
                    s.n,
                    s.m_le,
                    s.m_eq,
                    s.p,
                    if ex.sqp.is_some() { ", exact instance" } else { "" }
                );
            }
            Ok(0)
        }
        Some(name) => {
            let ex = stratpoint::examples::builtin(name)
                .ok_or_else(|| anyhow!("no built-in example named {name:?}"))?;
            println!("{}: {}", ex.name, ex.notes);
            if let Some(path) = out {
                let input = match &ex.sqp {
                    Some(sqp) => InputFile::Sqp(sqp_to_file(sqp, None)),
                    None => InputFile::Problem(problem_to_file(&ex.problem)),
                };
                std::fs::write(path, render_input(&input)?)
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}
