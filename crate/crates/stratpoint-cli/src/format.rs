//! On-disk problem format and small input parsers.
//!
//! Files are JSON with a `kind` discriminator. Every number is a string in
//! fraction or decimal form and is parsed exactly, so files mean the same
//! thing on every platform. Writing always emits the canonical fraction
//! form, which makes write-parse-write a fixed point.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use stratpoint::examples::builtin;
use stratpoint::jet::{ParamSource, SqpInstance};
use stratpoint::rational::{format_rational, parse_rational};
use stratpoint::tracer::{GridAxis, GridSpec};
use stratpoint::{Poly, PolyProblem, ProblemSize, Rational};

#[derive(Debug, Serialize, Deserialize)]
pub struct SizeFile {
    pub n: usize,
    pub m_le: usize,
    pub m_eq: usize,
    pub p: usize,
}

/// One monomial: an exact coefficient and exponent lists over x and y.
#[derive(Debug, Serialize, Deserialize)]
pub struct TermFile {
    pub coeff: String,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub size: SizeFile,
    pub objective: Vec<TermFile>,
    pub inequalities: Vec<Vec<TermFile>>,
    pub equalities: Vec<Vec<TermFile>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SourceFile {
    Canonical,
    Affine {
        base: Vec<String>,
        directions: Vec<Vec<String>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SqpFile {
    pub size: SizeFile,
    pub c: Vec<String>,
    pub source: SourceFile,
    /// Parameter value attached by the normal-form command; the jet of the
    /// instance at (0, y_bar) reproduces the jet the form was built from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_bar: Option<Vec<String>>,
}

/// Any input file the commands accept.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputFile {
    Problem(ProblemFile),
    Sqp(SqpFile),
}

fn size_of(s: &SizeFile) -> ProblemSize {
    ProblemSize {
        n: s.n,
        m_le: s.m_le,
        m_eq: s.m_eq,
        p: s.p,
    }
}

fn size_file(s: &ProblemSize) -> SizeFile {
    SizeFile {
        n: s.n,
        m_le: s.m_le,
        m_eq: s.m_eq,
        p: s.p,
    }
}

fn poly_from_terms(terms: &[TermFile], n: usize, p: usize, what: &str) -> Result<Poly> {
    let parsed: Vec<(Rational, Vec<u32>, Vec<u32>)> = terms
        .iter()
        .map(|t| {
            let c = parse_rational(&t.coeff)
                .map_err(|e| anyhow!("{what}: bad coefficient {:?}: {e}", t.coeff))?;
            Ok((c, t.x.clone(), t.y.clone()))
        })
        .collect::<Result<_>>()?;
    Poly::from_terms(n, p, parsed).map_err(|e| anyhow!("{what}: {e}"))
}

fn poly_to_terms(poly: &Poly) -> Vec<TermFile> {
    poly.terms()
        .map(|(c, xe, ye)| TermFile {
            coeff: format_rational(c),
            x: xe.to_vec(),
            y: ye.to_vec(),
        })
        .collect()
}

fn rationals_from(strings: &[String], what: &str) -> Result<Vec<Rational>> {
    strings
        .iter()
        .map(|s| parse_rational(s).map_err(|e| anyhow!("{what}: bad value {s:?}: {e}")))
        .collect()
}

fn rationals_to(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

pub fn problem_from_file(file: &ProblemFile) -> Result<PolyProblem> {
    let size = size_of(&file.size);
    let prob = PolyProblem {
        size,
        objective: poly_from_terms(&file.objective, size.n, size.p, "objective")?,
        inequalities: file
            .inequalities
            .iter()
            .enumerate()
            .map(|(k, terms)| {
                poly_from_terms(terms, size.n, size.p, &format!("inequality {}", k + 1))
            })
            .collect::<Result<_>>()?,
        equalities: file
            .equalities
            .iter()
            .enumerate()
            .map(|(k, terms)| {
                poly_from_terms(terms, size.n, size.p, &format!("equality {}", k + 1))
            })
            .collect::<Result<_>>()?,
    };
    let report = prob.validate();
    if !report.ok() {
        bail!("invalid problem: {}", report.failures.join("; "));
    }
    Ok(prob)
}

pub fn problem_to_file(prob: &PolyProblem) -> ProblemFile {
    ProblemFile {
        size: size_file(&prob.size),
        objective: poly_to_terms(&prob.objective),
        inequalities: prob.inequalities.iter().map(poly_to_terms).collect(),
        equalities: prob.equalities.iter().map(poly_to_terms).collect(),
    }
}

pub fn sqp_from_file(file: &SqpFile) -> Result<(SqpInstance, Option<Vec<Rational>>)> {
    let sqp = SqpInstance {
        size: size_of(&file.size),
        c: rationals_from(&file.c, "c")?,
        source: match &file.source {
            SourceFile::Canonical => ParamSource::Canonical,
            SourceFile::Affine { base, directions } => ParamSource::Affine {
                base: rationals_from(base, "base")?,
                directions: directions
                    .iter()
                    .map(|d| rationals_from(d, "direction"))
                    .collect::<Result<_>>()?,
            },
        },
    };
    sqp.validate().map_err(|e| anyhow!("invalid instance: {e}"))?;
    let y_bar = file
        .y_bar
        .as_ref()
        .map(|v| rationals_from(v, "y_bar"))
        .transpose()?;
    Ok((sqp, y_bar))
}

pub fn sqp_to_file(sqp: &SqpInstance, y_bar: Option<&[Rational]>) -> SqpFile {
    SqpFile {
        size: size_file(&sqp.size),
        c: rationals_to(&sqp.c),
        source: match &sqp.source {
            ParamSource::Canonical => SourceFile::Canonical,
            ParamSource::Affine { base, directions } => SourceFile::Affine {
                base: rationals_to(base),
                directions: directions.iter().map(|d| rationals_to(d)).collect(),
            },
        },
        y_bar: y_bar.map(rationals_to),
    }
}

/// Canonical serialization of an input file: pretty JSON with a trailing
/// newline.
pub fn render_input(input: &InputFile) -> Result<String> {
    let mut body = serde_json::to_string_pretty(input).context("serializing file")?;
    body.push('\n');
    Ok(body)
}

/// A loaded input: always a polynomial problem, plus the exact quadratic
/// instance when the source carries one.
pub struct LoadedInput {
    pub name: String,
    pub problem: PolyProblem,
    pub sqp: Option<SqpInstance>,
}

/// Resolves a command-line problem argument: a built-in example name first,
/// then a file path.
pub fn load_input(arg: &str) -> Result<LoadedInput> {
    if let Some(example) = builtin(arg) {
        return Ok(LoadedInput {
            name: example.name.to_string(),
            problem: example.problem,
            sqp: example.sqp,
        });
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!("{arg}: not a built-in example and no such file");
    }
    let body = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    let input: InputFile =
        serde_json::from_str(&body).with_context(|| format!("parsing {arg}"))?;
    match input {
        InputFile::Problem(file) => Ok(LoadedInput {
            name: arg.to_string(),
            problem: problem_from_file(&file)?,
            sqp: None,
        }),
        InputFile::Sqp(file) => {
            let (sqp, _) = sqp_from_file(&file)?;
            let problem = sqp
                .to_problem()
                .map_err(|e| anyhow!("instance has no polynomial form: {e}"))?;
            Ok(LoadedInput {
                name: arg.to_string(),
                problem,
                sqp: Some(sqp),
            })
        }
    }
}

/// Parses a comma-separated list of exact rationals; empty input is the
/// empty vector.
pub fn parse_point(s: &str) -> Result<Vec<Rational>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| parse_rational(part).map_err(|e| anyhow!("bad coordinate {part:?}: {e}")))
        .collect()
}

/// Parses a comma-separated float list for corrector seeds.
pub fn parse_floats(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| anyhow!("bad float {part:?}: {e}"))
        })
        .collect()
}

/// Parses a grid description like `y1=-1:1:41,y2=0,y3=-1:1:41`. Every
/// parameter y1..yp must appear exactly once, either fixed (`y2=0`) or swept
/// (`y1=min:max:steps`).
pub fn parse_grid(s: &str, p: usize) -> Result<GridSpec> {
    let mut axes: Vec<Option<GridAxis>> = vec![None; p];
    let s = s.trim();
    let entries: Vec<&str> = if s.is_empty() {
        Vec::new()
    } else {
        s.split(',').collect()
    };
    for entry in entries {
        let (name, spec) = entry
            .split_once('=')
            .ok_or_else(|| anyhow!("grid entry {entry:?} is not name=value"))?;
        let name = name.trim();
        let idx: usize = name
            .strip_prefix('y')
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| anyhow!("grid entry {entry:?}: expected a parameter name y1..y{p}"))?;
        if idx == 0 || idx > p {
            bail!("grid entry {entry:?}: parameter index out of range 1..={p}");
        }
        if axes[idx - 1].is_some() {
            bail!("grid entry {entry:?}: parameter named twice");
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let axis = match parts.as_slice() {
            [v] => GridAxis::Fixed(
                parse_rational(v).map_err(|e| anyhow!("grid entry {entry:?}: {e}"))?,
            ),
            [min, max, steps] => GridAxis::Range {
                min: parse_rational(min).map_err(|e| anyhow!("grid entry {entry:?}: {e}"))?,
                max: parse_rational(max).map_err(|e| anyhow!("grid entry {entry:?}: {e}"))?,
                steps: steps
                    .trim()
                    .parse()
                    .map_err(|e| anyhow!("grid entry {entry:?}: bad step count: {e}"))?,
            },
            _ => bail!("grid entry {entry:?}: expected value or min:max:steps"),
        };
        axes[idx - 1] = Some(axis);
    }
    let axes: Vec<GridAxis> = axes
        .into_iter()
        .enumerate()
        .map(|(k, a)| a.ok_or_else(|| anyhow!("grid is missing parameter y{}", k + 1)))
        .collect::<Result<_>>()?;
    let grid = GridSpec { axes };
    grid.validate().map_err(|e| anyhow!("bad grid: {e}"))?;
    Ok(grid)
}
