//! Seeded randomized verification suites. Each suite checks one engine
//! against an independent route to the same answer: exhaustive oracles,
//! hand algebra, or a second implementation. The command line runner prints
//! the rendered report; tests call the suites directly.

use crate::code::{brute_force_code, compute_code, in_closure, is_stationary, mfcq_violated};
use crate::error::Result;
use crate::jet::{jet_mf, InstantiatedConstraints, ParamSource, SqpInstance};
use crate::linalg::project_affine;
use crate::poly::Poly;
use crate::problem::{IndexPair, JetPoint, PolyProblem, ProblemSize};
use crate::qp::{solve_qp, QpStatus};
use crate::rational::{rat, rat_int, Rational};
use crate::tracer::{boundary_probe, GridAxis, GridSpec};
use crate::transform::{mf2sp, phi_deform, sp2mf, t2_target};
use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// The named verification suites the runner understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Code engine against the exhaustive oracle, plus the closure identity.
    Codes,
    /// Exact projection solver against active-subset enumeration.
    Qp,
    /// Rewrite commutation and deformation code invariance.
    Transforms,
    /// Activity-boundary trichotomy probes.
    Boundary,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Codes, Suite::Qp, Suite::Transforms, Suite::Boundary];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Codes => "codes",
            Suite::Qp => "qp",
            Suite::Transforms => "transforms",
            Suite::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one suite: counts plus one message per failed trial.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn int(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    rat_int(rng.gen_range(lo..=hi))
}

fn dense_coeff(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=4))
}

/// A random jet for the code-engine suites. The standard flavor uses
/// integer coefficients in -3..=3; the dense flavor uses small-denominator
/// rationals and a higher share of active constraints.
pub fn random_jet(rng: &mut ChaCha8Rng, dense: bool) -> JetPoint {
    let n = rng.gen_range(1..=3usize);
    let m_le = rng.gen_range(0..=4usize);
    let m_eq = rng.gen_range(0..=2usize);
    let coeff = |rng: &mut ChaCha8Rng| {
        if dense {
            dense_coeff(rng)
        } else {
            int(rng, -3, 3)
        }
    };
    let active_share = if dense { 0.7 } else { 0.5 };
    let a: Vec<Vec<Rational>> = (0..m_le)
        .map(|_| (0..n).map(|_| coeff(rng)).collect())
        .collect();
    let alpha: Vec<Rational> = (0..m_le)
        .map(|_| {
            let roll: f64 = rng.gen();
            if roll < active_share {
                Rational::zero()
            } else if roll < active_share + 0.4 {
                -int(rng, 1, 2)
            } else {
                int(rng, 1, 2)
            }
        })
        .collect();
    let b: Vec<Vec<Rational>> = (0..m_eq)
        .map(|_| (0..n).map(|_| coeff(rng)).collect())
        .collect();
    let beta: Vec<Rational> = (0..m_eq)
        .map(|_| {
            if rng.gen_bool(0.8) {
                Rational::zero()
            } else {
                int(rng, -2, 2)
            }
        })
        .collect();
    let a_star: Vec<Rational> = if rng.gen_bool(0.15) {
        vec![Rational::zero(); n]
    } else {
        (0..n).map(|_| coeff(rng)).collect()
    };
    JetPoint {
        a,
        alpha,
        b,
        beta,
        a_star,
    }
}

/// A jet violating the qualification without being stationary, together
/// with one minimal violation pair from its code. The active gradients live
/// in the hyperplane orthogonal to the last axis and sum to zero, while the
/// objective gradient is the last axis itself, so no nonnegative
/// combination can absorb it.
pub fn random_mf_only_jet(rng: &mut ChaCha8Rng) -> (JetPoint, IndexPair) {
    loop {
        let n = rng.gen_range(2..=3usize);
        let k = rng.gen_range(2..=4usize);
        let mut rows: Vec<Vec<Rational>> = (0..k - 1)
            .map(|_| {
                let mut row: Vec<Rational> = (0..n - 1).map(|_| int(rng, -2, 2)).collect();
                row.push(Rational::zero());
                row
            })
            .collect();
        let closing: Vec<Rational> = (0..n)
            .map(|r| -rows.iter().map(|row| row[r].clone()).sum::<Rational>())
            .collect();
        rows.push(closing);

        let mut a_star = vec![Rational::zero(); n];
        a_star[n - 1] = Rational::one();
        let jet = JetPoint {
            alpha: vec![Rational::zero(); k],
            a: rows,
            b: vec![],
            beta: vec![],
            a_star,
        };
        if is_stationary(&jet).unwrap() {
            continue;
        }
        let code = compute_code(&jet).unwrap();
        let Some(pair) = code.mf_pairs().next().cloned() else {
            continue;
        };
        return (jet, pair);
    }
}

/// A random projection instance in row form, sized for the subset oracle.
pub fn random_qp(rng: &mut ChaCha8Rng) -> (Vec<Rational>, InstantiatedConstraints) {
    let n = rng.gen_range(1..=4usize);
    let m_le = rng.gen_range(0..=6usize);
    let m_eq = rng.gen_range(0..=2usize);
    let c: Vec<Rational> = (0..n).map(|_| int(rng, -3, 3)).collect();
    let rows = InstantiatedConstraints {
        a: (0..m_le)
            .map(|_| (0..n).map(|_| int(rng, -3, 3)).collect())
            .collect(),
        alpha: (0..m_le).map(|_| int(rng, -3, 3)).collect(),
        b: (0..m_eq)
            .map(|_| (0..n).map(|_| int(rng, -3, 3)).collect())
            .collect(),
        beta: (0..m_eq).map(|_| int(rng, -3, 3)).collect(),
    };
    (c, rows)
}

/// A random polynomial problem for the transform suite: short polynomials
/// of total degree at most two.
pub fn random_problem(rng: &mut ChaCha8Rng) -> PolyProblem {
    let n = rng.gen_range(1..=3usize);
    let p = rng.gen_range(0..=2usize);
    let m_le = rng.gen_range(1..=3usize);
    let m_eq = rng.gen_range(0..=1usize);
    let poly = |rng: &mut ChaCha8Rng| random_poly(rng, n, p);
    PolyProblem {
        size: ProblemSize { n, m_le, m_eq, p },
        objective: poly(rng),
        inequalities: (0..m_le).map(|_| poly(rng)).collect(),
        equalities: (0..m_eq).map(|_| poly(rng)).collect(),
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n_x: usize, n_y: usize) -> Poly {
    let terms = rng.gen_range(1..=4usize);
    let spec: Vec<(Rational, Vec<u32>, Vec<u32>)> = (0..terms)
        .map(|_| {
            let coeff = int(rng, -2, 2);
            let mut ex = vec![0u32; n_x];
            let mut ey = vec![0u32; n_y];
            for _ in 0..rng.gen_range(0..=2usize) {
                let slot = rng.gen_range(0..n_x + n_y);
                if slot < n_x {
                    ex[slot] += 1;
                } else {
                    ey[slot - n_x] += 1;
                }
            }
            (coeff, ex, ey)
        })
        .collect();
    Poly::from_terms(n_x, n_y, spec).expect("exponent vectors match declared arity")
}

/// A random rational point in the sample box for commutation checks.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize, p: usize) -> (Vec<Rational>, Vec<Rational>) {
    let draw = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-2..=2), rng.gen_range(1..=2));
    (
        (0..n).map(|_| draw(rng)).collect(),
        (0..p).map(|_| draw(rng)).collect(),
    )
}

fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Exhaustive projection oracle: every inequality subset is treated as
/// tight, the affine projection is taken, and the best feasible candidate
/// wins. `None` means no candidate is feasible, which for a projection
/// instance is exactly infeasibility of the constraint set.
fn brute_force_qp(c: &[Rational], rows: &InstantiatedConstraints) -> Option<Vec<Rational>> {
    let m_le = rows.a.len();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for mask in 0u32..(1 << m_le) {
        let mut tight: Vec<Vec<Rational>> = Vec::new();
        let mut rhs: Vec<Rational> = Vec::new();
        for i in 0..m_le {
            if mask & (1 << i) != 0 {
                tight.push(rows.a[i].clone());
                rhs.push(-rows.alpha[i].clone());
            }
        }
        for (row, beta) in rows.b.iter().zip(&rows.beta) {
            tight.push(row.clone());
            rhs.push(-beta.clone());
        }
        let Some(x) = project_affine(c, &tight, &rhs) else {
            continue;
        };
        let ineq_ok = rows
            .a
            .iter()
            .zip(&rows.alpha)
            .all(|(row, off)| !(dot(row, &x) + off).is_positive());
        let eq_ok = rows
            .b
            .iter()
            .zip(&rows.beta)
            .all(|(row, off)| (dot(row, &x) + off).is_zero());
        if !ineq_ok || !eq_ok {
            continue;
        }
        let value: Rational = x
            .iter()
            .zip(c)
            .map(|(xv, cv)| {
                let d = xv - cv;
                &d * &d
            })
            .sum();
        if best.as_ref().map_or(true, |(v, _)| value < *v) {
            best = Some((value, x));
        }
    }
    best.map(|(_, x)| x)
}

fn codes_trial(rng: &mut ChaCha8Rng, trial: usize) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let jet = random_jet(rng, trial % 2 == 1);
    let got = compute_code(&jet)?;
    let want = brute_force_code(&jet)?;
    if got != want {
        failures.push(format!(
            "codes trial {trial}: engine {got} disagrees with oracle {want}"
        ));
    }
    let closure = in_closure(&jet)?;
    let split = is_stationary(&jet)? || mfcq_violated(&jet)?;
    if closure != split {
        failures.push(format!(
            "codes trial {trial}: closure {closure} but stationary-or-violated {split}"
        ));
    }
    Ok(failures)
}

fn qp_trial(rng: &mut ChaCha8Rng, trial: usize) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let (c, rows) = random_qp(rng);
    let solved = solve_qp(&c, &rows)?;
    let oracle = brute_force_qp(&c, &rows);
    match (solved.status, oracle) {
        (QpStatus::Infeasible, None) => {}
        (QpStatus::Optimal, Some(want)) => {
            let x = solved.x_star.as_ref().expect("optimal carries a point");
            if x != &want {
                failures.push(format!(
                    "qp trial {trial}: solver point differs from oracle point"
                ));
            }
            let mult = solved
                .multipliers
                .as_ref()
                .expect("optimal carries multipliers");
            let two = rat_int(2);
            for r in 0..c.len() {
                let mut residual = &two * &(&x[r] - &c[r]);
                for (mu, row) in mult.mu.iter().zip(&rows.a) {
                    residual += mu * &row[r];
                }
                for (lambda, row) in mult.lambda.iter().zip(&rows.b) {
                    residual += lambda * &row[r];
                }
                if !residual.is_zero() {
                    failures.push(format!(
                        "qp trial {trial}: multiplier identity fails in coordinate {r}"
                    ));
                    break;
                }
            }
            if mult.mu.iter().any(|v| v.is_negative()) {
                failures.push(format!("qp trial {trial}: negative inequality multiplier"));
            }
            for (i, mu) in mult.mu.iter().enumerate() {
                if mu.is_positive() && !(dot(&rows.a[i], x) + &rows.alpha[i]).is_zero() {
                    failures.push(format!(
                        "qp trial {trial}: multiplier {i} positive on an inactive row"
                    ));
                }
            }
        }
        (got, oracle) => {
            failures.push(format!(
                "qp trial {trial}: solver {got:?} but oracle feasibility {}",
                oracle.is_some()
            ));
        }
    }
    Ok(failures)
}

fn transforms_trial(rng: &mut ChaCha8Rng, trial: usize) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let prob = random_problem(rng);
    let samples: Vec<(Vec<Rational>, Vec<Rational>)> = (0..3)
        .map(|_| random_point(rng, prob.size.n, prob.size.p))
        .collect();

    let widened = sp2mf(&prob)?;
    let report = crate::transform::verify_commutation(&widened, &samples)?;
    for msg in report.failures {
        failures.push(format!("transforms trial {trial}: sp2mf {msg}"));
    }

    if prob.size.m_eq == 0 {
        let stationarized = mf2sp(&prob)?;
        let report = crate::transform::verify_commutation(&stationarized, &samples)?;
        for msg in report.failures {
            failures.push(format!("transforms trial {trial}: mf2sp {msg}"));
        }

        // Deformation invariance: any in-domain pack yields the code of the
        // standard recombination.
        let (x, y) = &samples[0];
        let jet = jet_mf(&prob, x, y)?;
        let pack = crate::transform::PhiParams {
            a_last: (0..jet.a.len()).map(|_| -int(rng, 1, 2)).collect(),
            a_star_last: int(rng, 1, 2),
            v: (0..prob.size.n).map(|_| int(rng, -2, 2)).collect(),
        };
        let deformed = phi_deform(&jet, &pack)?;
        let standard = t2_target(&jet)?;
        if compute_code(&deformed)? != compute_code(&standard)? {
            failures.push(format!(
                "transforms trial {trial}: deformation changed the code"
            ));
        }
    }
    Ok(failures)
}

fn boundary_trial(rng: &mut ChaCha8Rng, trial: usize) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let n = rng.gen_range(1..=2usize);
    let m_le = rng.gen_range(1..=3usize);
    let size = ProblemSize {
        n,
        m_le,
        m_eq: 0,
        p: (n + 1) * m_le,
    };
    let sqp = SqpInstance {
        size,
        c: (0..n).map(|_| int(rng, -2, 2)).collect(),
        source: ParamSource::Canonical,
    };
    let m = rng.gen_range(0..m_le);
    // Keeping every other offset at -4 keeps the deleted problem feasible
    // (the origin satisfies those rows strictly), so no node is skipped.
    let mut axes = Vec::with_capacity(size.p);
    for row in 0..m_le {
        for _ in 0..n {
            axes.push(GridAxis::Fixed(int(rng, -2, 2)));
        }
        axes.push(GridAxis::Fixed(if row == m {
            int(rng, -2, 2)
        } else {
            rat_int(-4)
        }));
    }
    // Sweep the distinguished row's first gradient coordinate.
    axes[(n + 1) * m] = GridAxis::Range {
        min: rat_int(-2),
        max: rat_int(2),
        steps: 3,
    };
    let report = boundary_probe(&sqp, m, &GridSpec { axes })?;
    if report.skipped > 0 {
        failures.push(format!(
            "boundary trial {trial}: {} nodes skipped despite harmless rows",
            report.skipped
        ));
    }
    for violation in report.violations {
        failures.push(format!("boundary trial {trial}: {violation}"));
    }
    Ok(failures)
}

/// Runs one suite for `trials` trials. Deterministic for a fixed seed; each
/// suite draws from its own stream, so suites are independent of each other
/// and of the trial count of their neighbors.
pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(match suite {
        Suite::Codes => 1,
        Suite::Qp => 2,
        Suite::Transforms => 3,
        Suite::Boundary => 4,
    });
    let mut failures = Vec::new();
    let mut passed = 0usize;
    for trial in 0..trials {
        let result = match suite {
            Suite::Codes => codes_trial(&mut rng, trial),
            Suite::Qp => qp_trial(&mut rng, trial),
            Suite::Transforms => transforms_trial(&mut rng, trial),
            Suite::Boundary => boundary_trial(&mut rng, trial),
        };
        match result {
            Ok(msgs) if msgs.is_empty() => passed += 1,
            Ok(msgs) => failures.extend(msgs),
            Err(e) => failures.push(format!("{} trial {trial}: error: {e}", suite.name())),
        }
    }
    Ok(SuiteReport {
        suite,
        trials,
        passed,
        failures,
    })
}

/// Renders suite reports in the fixed line format the determinism contract
/// promises: header, one count line per suite, indented failure lines, and
/// an overall verdict.
pub fn render(seed: u64, trials: usize, reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    out.push_str("stratpoint verification\n");
    out.push_str(&format!("seed: {seed}\n"));
    out.push_str(&format!("trials per suite: {trials}\n"));
    let mut all_ok = true;
    for report in reports {
        out.push_str(&format!(
            "{}: {}/{} pass\n",
            report.suite.name(),
            report.passed,
            report.trials
        ));
        for failure in &report.failures {
            out.push_str(&format!("  - {failure}\n"));
        }
        all_ok &= report.ok();
    }
    out.push_str(if all_ok {
        "overall: PASS\n"
    } else {
        "overall: FAIL\n"
    });
    out
}

/// Runs every suite and renders the deterministic report. The report is a
/// pure function of `(seed, trials)`.
pub fn full_report(seed: u64, trials: usize) -> Result<String> {
    let reports: Vec<SuiteReport> = Suite::ALL
        .iter()
        .map(|&suite| run_suite(suite, seed, trials))
        .collect::<Result<_>>()?;
    Ok(render(seed, trials, &reports))
}

/// Did a rendered report end in a pass verdict?
pub fn report_passes(report: &str) -> bool {
    report.lines().any(|l| l == "overall: PASS")
}
