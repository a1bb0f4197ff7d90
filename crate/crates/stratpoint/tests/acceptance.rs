//! Acceptance gate: one test per criterion, each line of the harness output
//! reporting one pass/fail verdict. Every check runs an engine against an
//! independent route: an exhaustive oracle, hand algebra, a closed form, or
//! a second implementation.

use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::Instant;

use stratpoint::code::{
    brute_force_code, compute_code, compute_mf_code, in_closure, is_stationary, mfcq_violated,
    perturb_toward_sp,
};
use stratpoint::examples::builtin;
use stratpoint::jet::{
    build_normal_form, jet_mf, jet_sp, normal_form_jacobian, point_in_sp_closure, ParamSource,
    SqpInstance,
};
use stratpoint::linalg::determinant;
use stratpoint::qp::{stationary_map, QpStatus};
use stratpoint::rational::{rat, rat_int, rat_pow, rat_to_f64};
use stratpoint::tracer::{
    boundary_probe, continuation_path, trace_grid, Classification, GridAxis, GridSpec,
};
use stratpoint::transform::{mf2sp, sp2mf};
use stratpoint::verify::{
    full_report, random_jet, random_mf_only_jet, random_problem, report_passes, run_suite, Suite,
};
use stratpoint::{PolyProblem, ProblemSize, Rational};

const SEED_JETS: u64 = 20260816;

fn rv(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&v| rat_int(v)).collect()
}

#[test]
fn criterion_01_code_engine_matches_the_exhaustive_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS);
    for trial in 0..500 {
        let jet = random_jet(&mut rng, false);
        assert_eq!(
            compute_code(&jet).unwrap(),
            brute_force_code(&jet).unwrap(),
            "trial {trial}"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 120,
        "oracle sweep took {elapsed:?}, budget is 120s"
    );
    println!("criterion 1: PASS - 500/500 oracle agreements in {elapsed:?}");
}

#[test]
fn criterion_02_closure_equals_stationary_or_violated() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS);
    let mut checked = 0usize;
    for _ in 0..500 {
        let jet = random_jet(&mut rng, false);
        let closure = in_closure(&jet).unwrap();
        let split = is_stationary(&jet).unwrap() || mfcq_violated(&jet).unwrap();
        assert_eq!(closure, split);
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 2);
    for _ in 0..500 {
        let jet = random_jet(&mut rng, true);
        let closure = in_closure(&jet).unwrap();
        let split = is_stationary(&jet).unwrap() || mfcq_violated(&jet).unwrap();
        assert_eq!(closure, split);
        checked += 1;
    }
    println!("criterion 2: PASS - closure identity on {checked}/1000 jets");
}

#[test]
fn criterion_03_perturbation_lands_in_the_stationary_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 3);
    let mut cases = 0usize;
    for _ in 0..100 {
        let (jet, pair) = random_mf_only_jet(&mut rng);
        assert!(mfcq_violated(&jet).unwrap());
        assert!(!is_stationary(&jet).unwrap());
        for k in 1..=6u32 {
            let step = rat_pow(&rat(1, 10), k);
            let moved = perturb_toward_sp(&jet, &pair, &step).unwrap();
            assert!(is_stationary(&moved).unwrap(), "step 10^-{k}");
            assert!(compute_code(&moved).unwrap().is_stationary());
            cases += 1;
        }
    }
    println!("criterion 3: PASS - {cases}/600 perturbations became stationary");
}

#[test]
fn criterion_04_qp_solver_matches_subset_enumeration() {
    let report = run_suite(Suite::Qp, SEED_JETS ^ 4, 200).unwrap();
    assert!(report.ok(), "{:?}", report.failures);
    assert_eq!(report.passed, 200);
    println!("criterion 4: PASS - 200/200 projections match the subset oracle");
}

#[test]
fn criterion_05_normal_form_round_trips_with_unit_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 5);
    for trial in 0..100 {
        let jet = random_jet(&mut rng, trial % 2 == 0);
        let built = build_normal_form(&jet).unwrap();
        assert_eq!(built.jet_check, jet, "trial {trial}");
        let zeros = vec![Rational::zero(); jet.n()];
        assert_eq!(built.sqp.jet_at(&zeros, &built.y_bar).unwrap(), jet);

        let (matrix, det) = normal_form_jacobian(&jet).unwrap();
        assert!(det == Rational::one(), "trial {trial}: det {det}");
        assert_eq!(determinant(&matrix), Rational::one());
    }
    println!("criterion 5: PASS - 100/100 exact round trips, all determinants +1");
}

#[test]
fn criterion_06a_stationary_points_map_to_violation_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 6);
    let mut mapped = 0usize;
    let mut attempts = 0usize;
    while mapped < 100 && attempts < 2000 {
        attempts += 1;
        let n = rng.gen_range(1..=2usize);
        let m_le = rng.gen_range(1..=3usize);
        let m_eq = rng.gen_range(0..=1usize);
        let size = ProblemSize {
            n,
            m_le,
            m_eq,
            p: (n + 1) * (m_le + m_eq),
        };
        let sqp = SqpInstance {
            size,
            c: (0..n).map(|_| rat_int(rng.gen_range(-2..=2))).collect(),
            source: ParamSource::Canonical,
        };
        let y: Vec<Rational> = (0..size.p).map(|_| rat_int(rng.gen_range(-2..=2))).collect();
        let found = stationary_map(&sqp, &y).unwrap();
        let (QpStatus::Optimal, Some(x)) = (found.status, found.x) else {
            continue;
        };

        let prob = sqp.to_problem().unwrap();
        let widened = sp2mf(&prob).unwrap();
        let (x_img, y_img) = widened.var_map.apply(&x, &y).unwrap();
        let image_jet = jet_mf(&widened.problem, &x_img, &y_img).unwrap();
        let image_code = compute_mf_code(&image_jet).unwrap();
        assert!(image_code.mfcq_violated(), "attempt {attempts}");

        let source_jet = jet_sp(&prob, &x, &y).unwrap();
        let source_code = compute_code(&source_jet).unwrap();
        assert_eq!(image_code, widened.code_action.apply(&source_code));
        mapped += 1;
    }
    assert_eq!(mapped, 100, "exhausted attempts at {attempts}");
    println!("criterion 6a: PASS - 100/100 stationary points land in the violation set");
}

fn grid_values(n: usize, values: &[Rational]) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for v in values {
                let mut node = prefix.clone();
                node.push(v.clone());
                next.push(node);
            }
        }
        out = next;
    }
    out
}

#[test]
fn criterion_06b_violation_points_correspond_to_image_stationarity() {
    let mut problems: Vec<PolyProblem> = vec![builtin("double-wedge").unwrap().problem];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 7);
    while problems.len() < 21 {
        let prob = random_problem(&mut rng);
        if prob.size.m_eq == 0 {
            problems.push(prob);
        }
    }

    let x_values = [rat_int(-1), rat_int(0), rat_int(1)];
    let y_values = [rat_int(-1), rat_int(1)];
    let mut samples = 0usize;
    let mut hits = 0usize;
    for prob in &problems {
        let rewritten = mf2sp(prob).unwrap();
        for x in grid_values(prob.size.n, &x_values) {
            for y in grid_values(prob.size.p, &y_values) {
                let source_jet = jet_mf(prob, &x, &y).unwrap();
                let source_in_mf = source_jet.alpha_feasible()
                    && compute_mf_code(&source_jet).unwrap().mfcq_violated();

                let (x_img, y_img) = rewritten.var_map.apply(&x, &y).unwrap();
                let image_jet = jet_sp(&rewritten.problem, &x_img, &y_img).unwrap();
                let image_stationary =
                    image_jet.alpha_feasible() && is_stationary(&image_jet).unwrap();

                assert_eq!(
                    source_in_mf, image_stationary,
                    "correspondence fails at x={x:?} y={y:?}"
                );
                assert!(rewritten
                    .problem
                    .objective
                    .eval(&x_img, &y_img)
                    .unwrap()
                    .is_zero());
                assert_eq!(
                    compute_code(&image_jet).unwrap(),
                    rewritten
                        .code_action
                        .apply(&compute_mf_code(&source_jet).unwrap())
                );
                samples += 1;
                hits += usize::from(source_in_mf);
            }
        }
    }
    assert!(hits > 0, "sampling never met the violation set");
    println!(
        "criterion 6b: PASS - correspondence holds at {samples}/{samples} grid samples ({hits} in the violation set)"
    );
}

#[test]
fn criterion_07_boundary_trichotomy_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 8);
    let mut probes = 0usize;
    for trial in 0..50 {
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
            c: (0..n).map(|_| rat_int(rng.gen_range(-2..=2))).collect(),
            source: ParamSource::Canonical,
        };
        let m = rng.gen_range(0..m_le);
        // Other rows keep offset -4 so deleting row m leaves a feasible set.
        let mut axes = Vec::with_capacity(size.p);
        for row in 0..m_le {
            for _ in 0..n {
                axes.push(GridAxis::Fixed(rat_int(rng.gen_range(-2..=2))));
            }
            axes.push(GridAxis::Fixed(rat_int(if row == m { 0 } else { -4 })));
        }
        axes[(n + 1) * m] = GridAxis::Range {
            min: rat_int(-2),
            max: rat_int(2),
            steps: 5,
        };
        let swept_offset = (n + 1) * (if m == 0 { m_le - 1 } else { 0 });
        axes[swept_offset + n] = GridAxis::Range {
            min: rat_int(-4),
            max: rat_int(-2),
            steps: 5,
        };
        let report = boundary_probe(&sqp, m, &GridSpec { axes }).unwrap();
        assert_eq!(report.skipped, 0, "trial {trial}");
        assert!(report.ok(), "trial {trial}: {:?}", report.violations);
        probes += report.nodes.iter().map(|node| node.checks.len()).sum::<usize>();
    }
    println!("criterion 7: PASS - trichotomy held on {probes} probes across 50 instances");
}

#[test]
fn criterion_08_traced_strip_is_a_half_plane_with_frontier() {
    let sqp = builtin("strip-sqp").unwrap().sqp.unwrap();
    let axis = || GridAxis::Range {
        min: rat_int(-1),
        max: rat_int(1),
        steps: 41,
    };
    let records = trace_grid(&sqp, &GridSpec { axes: vec![axis(), axis()] }).unwrap();
    assert_eq!(records.len(), 41 * 41);

    let class = |i: usize, j: usize| records[i * 41 + j].classification;
    let neighbors = |i: usize, j: usize| {
        let mut out = Vec::new();
        if i > 0 {
            out.push((i - 1, j));
        }
        if j > 0 {
            out.push((i, j - 1));
        }
        if i + 1 < 41 {
            out.push((i + 1, j));
        }
        if j + 1 < 41 {
            out.push((i, j + 1));
        }
        out
    };

    // The stationary region is connected in the grid graph.
    let sp_nodes: Vec<(usize, usize)> = (0..41)
        .flat_map(|i| (0..41).map(move |j| (i, j)))
        .filter(|&(i, j)| class(i, j) == Classification::SpInterior)
        .collect();
    assert!(!sp_nodes.is_empty());
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = vec![sp_nodes[0]];
    seen.insert(sp_nodes[0]);
    while let Some((i, j)) = queue.pop() {
        for (ni, nj) in neighbors(i, j) {
            if class(ni, nj) == Classification::SpInterior && seen.insert((ni, nj)) {
                queue.push((ni, nj));
            }
        }
    }
    assert_eq!(seen.len(), sp_nodes.len(), "stationary region is connected");

    // Every boundary node touches the region and its complement.
    let mut mf_count = 0usize;
    for i in 0..41 {
        for j in 0..41 {
            if class(i, j) != Classification::MfBoundary {
                continue;
            }
            mf_count += 1;
            let near = neighbors(i, j);
            assert!(near
                .iter()
                .any(|&(a, b)| class(a, b) == Classification::SpInterior));
            assert!(near
                .iter()
                .any(|&(a, b)| class(a, b) != Classification::SpInterior));
        }
    }
    assert_eq!(mf_count, 41, "the diagonal has 41 nodes");

    // Independent route: the violation predicate is false on every
    // stationary record's exact jet.
    for record in &records {
        if record.classification == Classification::SpInterior {
            let jet = sqp
                .jet_at(record.x.as_ref().unwrap(), &record.y)
                .unwrap();
            assert!(!mfcq_violated(&jet).unwrap());
            assert!(is_stationary(&jet).unwrap());
        }
    }
    println!(
        "criterion 8: PASS - {} stationary nodes form one component, 41 boundary nodes on its frontier",
        sp_nodes.len()
    );
}

#[test]
fn criterion_09_counterexample_closure_condition_and_breakdown() {
    let prob = builtin("example-5.1").unwrap().problem;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 9);
    let draw = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-3..=3), rng.gen_range(1..=2));
    let mut in_set = 0usize;
    for _ in 0..10_000 {
        let x: Vec<Rational> = (0..2).map(|_| draw(&mut rng)).collect();
        let y: Vec<Rational> = (0..3).map(|_| draw(&mut rng)).collect();
        let jet = jet_sp(&prob, &x, &y).unwrap();
        let det = determinant(&[
            vec![jet.b[0][0].clone(), jet.a_star[0].clone()],
            vec![jet.b[0][1].clone(), jet.a_star[1].clone()],
        ]);
        let condition = jet.beta[0].is_zero() && det.is_zero();
        let engine = point_in_sp_closure(&prob, &x, &y).unwrap();
        assert_eq!(engine, condition, "x={x:?} y={y:?}");
        in_set += usize::from(engine);
    }
    assert!(in_set > 0, "sampling never met the closure");

    // The parameter origin carries both certificate kinds at once.
    let vertex = jet_sp(&prob, &rv(&[0, 0]), &rv(&[0, 0, 0])).unwrap();
    let code = compute_code(&vertex).unwrap();
    assert!(code.sp_pairs().next().is_some());
    assert!(code.mf_pairs().next().is_some());

    // Continuation toward the degenerate parameter breaks down.
    let path: Vec<Vec<f64>> = (0..=32)
        .map(|k| {
            let s = 1.0 - k as f64 / 32.0;
            vec![s, 0.0, -s]
        })
        .collect();
    let j: BTreeSet<usize> = [0].into_iter().collect();
    let run = continuation_path(&prob, &BTreeSet::new(), &j, &[1.0, 0.0], &[], &[-2.0], &path)
        .unwrap();
    let breakdown = run.breakdown.expect("path must break down at the origin");
    assert!(breakdown.y[0].abs() < 0.1, "breakdown near y = (0,0,0)");
    for step in &run.steps {
        assert!((step.x[0] - 1.0).abs() < 1e-8);
        assert!(step.x[1].abs() < 1e-8);
    }
    println!(
        "criterion 9: PASS - closure condition on 10000/10000 jets ({in_set} inside), vertex has both certificates, continuation breakdown at index {}",
        breakdown.index
    );
}

#[test]
fn criterion_10_verification_report_is_deterministic() {
    let first = full_report(42, 100).unwrap();
    let second = full_report(42, 100).unwrap();
    assert_eq!(first, second, "reports must be byte-identical");
    assert!(report_passes(&first), "{first}");
    println!("criterion 10: PASS - seed-42 reports byte-identical and passing");
}

#[test]
fn newton_limits_match_exact_minimizers() {
    // Float-corrector spot check at acceptance scale: exact QP minimizers
    // seed Newton on the polynomial form, and the limits agree closely.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_JETS ^ 10);
    let mut agreed = 0usize;
    for _ in 0..40 {
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
            c: (0..n).map(|_| rat_int(rng.gen_range(-2..=2))).collect(),
            source: ParamSource::Canonical,
        };
        let y: Vec<Rational> = (0..size.p).map(|_| rat_int(rng.gen_range(-2..=2))).collect();
        let found = stationary_map(&sqp, &y).unwrap();
        let (QpStatus::Optimal, Some(x)) = (found.status, found.x) else {
            continue;
        };
        let code = found.code.unwrap();
        let prob = sqp.to_problem().unwrap();
        let jet = sqp.jet_at(&x, &y).unwrap();
        let active: BTreeSet<usize> = code.i0.iter().copied().collect();

        // Recover exact multipliers for the half-norm convention by solving
        // the stationarity system on the active rows, then jitter and let
        // Newton pull the point back.
        let mults = exact_half_multipliers(&jet, &active);
        let Some(mu) = mults else {
            continue;
        };
        let seed_x: Vec<f64> = x.iter().map(|v| rat_to_f64(v) + 5e-4).collect();
        let y_f: Vec<f64> = y.iter().map(rat_to_f64).collect();
        let out = stratpoint::tracer::newton_correct(
            &prob,
            &active,
            &BTreeSet::new(),
            &seed_x,
            &mu,
            &[],
            &y_f,
        )
        .unwrap();
        if let Some(sol) = out.converged() {
            for (got, want) in sol.x.iter().zip(&x) {
                assert!((got - rat_to_f64(want)).abs() < 1e-9);
            }
            agreed += 1;
        }
    }
    assert!(agreed >= 20, "want agreements, got {agreed}");
    println!("newton spot check: PASS - {agreed} exact/float agreements");
}

/// Multipliers of `(x - c) + sum mu_i a_i = 0` on the active rows, solved
/// exactly and converted to floats, or None when the system is singular.
fn exact_half_multipliers(jet: &stratpoint::JetPoint, active: &BTreeSet<usize>) -> Option<Vec<f64>> {
    let rows: Vec<usize> = active.iter().copied().collect();
    let n = jet.n();
    if rows.is_empty() {
        return Some(Vec::new());
    }
    if rows.len() > n {
        return None;
    }
    // Solve the normal equations G mu = -G0 where G is the Gram matrix of
    // the active gradients and G0 their inner products with a_star.
    let gram: Vec<Vec<Rational>> = rows
        .iter()
        .map(|&i| {
            rows.iter()
                .map(|&k| {
                    (0..n)
                        .map(|r| &jet.a[i][r] * &jet.a[k][r])
                        .sum::<Rational>()
                })
                .collect()
        })
        .collect();
    let rhs: Vec<Rational> = rows
        .iter()
        .map(|&i| {
            -(0..n)
                .map(|r| &jet.a[i][r] * &jet.a_star[r])
                .sum::<Rational>()
        })
        .collect();
    let mu = stratpoint::linalg::solve(&gram, &rhs)?;
    // The candidate must reproduce the stationarity identity exactly.
    for r in 0..n {
        let mut v = jet.a_star[r].clone();
        for (slot, &i) in rows.iter().enumerate() {
            v += &mu[slot] * &jet.a[i][r];
        }
        if !v.is_zero() {
            return None;
        }
    }
    if mu.iter().any(|v| v.is_negative()) {
        return None;
    }
    Some(mu.iter().map(rat_to_f64).collect())
}
