//! Exact minimization of `‖x − c‖²` over a rational polyhedron, the
//! parameter-to-minimizer map of a quadratic instance, and the
//! deleted-constraint solve that locates activity boundaries.
//!
//! The solver is a primal active-set method run entirely over rationals.
//! Each round projects the center onto the affine hull of the currently
//! active rows; when the iterate is already that projection, a small LP
//! either produces nonnegative multipliers (optimality certificate) or a
//! strict descent direction, so every non-final round strictly lowers the
//! objective.

use crate::code::compute_code;
use crate::error::{Error, Result};
use crate::jet::{InstantiatedConstraints, SqpInstance};
use crate::linalg::project_affine;
use crate::lp::{lp_feasible, lp_solve, LpProblem, LpStatus};
use crate::problem::{CombinatorialCode, Multipliers};
use crate::rational::{rat_int, Rational};
use num::{One, Signed, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    Infeasible,
}

/// Result of one polyhedral projection. Multipliers certify
/// `2(x* − c) + Σ μ_i a_i + Σ λ_j b_j = 0` with `μ ≥ 0` supported on the
/// active set; they are one valid certificate, not a canonical one.
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub status: QpStatus,
    pub x_star: Option<Vec<Rational>>,
    pub active: BTreeSet<usize>,
    pub multipliers: Option<Multipliers>,
}

fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn check_rows(c: &[Rational], rows: &InstantiatedConstraints) -> Result<()> {
    let n = c.len();
    if rows.a.len() != rows.alpha.len() || rows.b.len() != rows.beta.len() {
        return Err(Error::Dimension(
            "constraint rows and offsets must pair up".into(),
        ));
    }
    if rows.a.iter().chain(rows.b.iter()).any(|r| r.len() != n) {
        return Err(Error::Dimension(
            "constraint rows must have the same dimension as the center".into(),
        ));
    }
    Ok(())
}

/// Indices with `a_i · x + α_i = 0`.
fn active_rows(rows: &InstantiatedConstraints, x: &[Rational]) -> BTreeSet<usize> {
    rows.a
        .iter()
        .zip(&rows.alpha)
        .enumerate()
        .filter(|(_, (row, off))| (dot(row, x) + *off).is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Feasibility certificate for the full KKT system at `x` with working set
/// `w`: nonnegative weights on the active rows and free weights on the
/// equalities reproducing `-2(x - c)`.
fn multiplier_certificate(
    c: &[Rational],
    rows: &InstantiatedConstraints,
    x: &[Rational],
    w: &BTreeSet<usize>,
) -> Result<Option<Multipliers>> {
    let n = c.len();
    let w_list: Vec<usize> = w.iter().copied().collect();
    let m_eq = rows.b.len();
    let vars = w_list.len() + m_eq;
    let two = rat_int(2);

    if vars == 0 {
        let stationary = x.iter().zip(c).all(|(xv, cv)| xv == cv);
        return Ok(stationary.then(|| Multipliers {
            mu: vec![Rational::zero(); rows.a.len()],
            lambda: vec![],
        }));
    }

    let mut eq = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = vec![Rational::zero(); vars];
        for (col, &i) in w_list.iter().enumerate() {
            row[col] = rows.a[i][r].clone();
        }
        for j in 0..m_eq {
            row[w_list.len() + j] = rows.b[j][r].clone();
        }
        eq.push((row, -(&two * (&x[r] - &c[r]))));
    }
    let mut ineq = Vec::with_capacity(w_list.len());
    for col in 0..w_list.len() {
        let mut row = vec![Rational::zero(); vars];
        row[col] = -Rational::one();
        ineq.push((row, Rational::zero()));
    }
    let result = lp_feasible(vars, eq, ineq)?;
    if result.status != LpStatus::Optimal {
        return Ok(None);
    }
    let sol = result.solution.expect("feasible LP returns a point");
    let mut mu = vec![Rational::zero(); rows.a.len()];
    for (col, &i) in w_list.iter().enumerate() {
        mu[i] = sol[col].clone();
    }
    let lambda = sol[w_list.len()..].to_vec();
    Ok(Some(Multipliers { mu, lambda }))
}

/// A direction that keeps the working rows and all equalities satisfied
/// while strictly decreasing the objective; exists exactly when the
/// multiplier certificate does not.
fn descent_direction(
    c: &[Rational],
    rows: &InstantiatedConstraints,
    x: &[Rational],
    w: &BTreeSet<usize>,
) -> Result<Vec<Rational>> {
    let n = c.len();
    let two = rat_int(2);
    let objective: Vec<Rational> = (0..n).map(|r| -(&two * (&x[r] - &c[r]))).collect();
    let mut eq = Vec::new();
    for row in &rows.b {
        eq.push((row.clone(), Rational::zero()));
    }
    let mut ineq = Vec::new();
    for &i in w {
        ineq.push((rows.a[i].clone(), Rational::zero()));
    }
    for r in 0..n {
        let mut hi = vec![Rational::zero(); n];
        hi[r] = Rational::one();
        ineq.push((hi.clone(), Rational::one()));
        let lo: Vec<Rational> = hi.into_iter().map(|v| -v).collect();
        ineq.push((lo, Rational::one()));
    }
    let result = lp_solve(&LpProblem {
        var_count: n,
        objective,
        eq,
        ineq,
    })?;
    let improving = result.status == LpStatus::Optimal
        && result.value.as_ref().map(|v| v.is_positive()) == Some(true);
    if !improving {
        return Err(Error::Precondition(
            "no descent direction although the multiplier certificate failed".into(),
        ));
    }
    Ok(result.solution.expect("optimal LP returns a point"))
}

/// Largest step along `d` from `x` before an inactive inequality becomes
/// tight; `None` means unblocked. Ties resolve to the lowest row index.
fn blocking_step(
    rows: &InstantiatedConstraints,
    x: &[Rational],
    d: &[Rational],
    w: &BTreeSet<usize>,
) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for (i, (row, off)) in rows.a.iter().zip(&rows.alpha).enumerate() {
        if w.contains(&i) {
            continue;
        }
        let speed = dot(row, d);
        if !speed.is_positive() {
            continue;
        }
        let slack = -(dot(row, x) + off.clone());
        let t = slack / speed;
        if best.as_ref().map(|b| &t < b).unwrap_or(true) {
            best = Some(t);
        }
    }
    best
}

/// Exact minimizer of `‖x − c‖²` over
/// `{x : a_i·x + α_i ≤ 0, b_j·x + β_j = 0}`, or the infeasibility verdict.
pub fn solve_qp(c: &[Rational], rows: &InstantiatedConstraints) -> Result<QpSolution> {
    check_rows(c, rows)?;
    let n = c.len();
    let m_le = rows.a.len();

    let phase1_eq: Vec<(Vec<Rational>, Rational)> = rows
        .b
        .iter()
        .zip(&rows.beta)
        .map(|(row, off)| (row.clone(), -off.clone()))
        .collect();
    let phase1_ineq: Vec<(Vec<Rational>, Rational)> = rows
        .a
        .iter()
        .zip(&rows.alpha)
        .map(|(row, off)| (row.clone(), -off.clone()))
        .collect();
    let start = lp_feasible(n, phase1_eq, phase1_ineq)?;
    if start.status != LpStatus::Optimal {
        return Ok(QpSolution {
            status: QpStatus::Infeasible,
            x_star: None,
            active: BTreeSet::new(),
            multipliers: None,
        });
    }
    let mut x = start.solution.expect("feasible LP returns a point");

    let cap = std::cmp::max(8usize, 1usize << std::cmp::min(m_le + 1, 20));
    for _ in 0..cap {
        let w = active_rows(rows, &x);
        let mut proj_rows: Vec<Vec<Rational>> = w.iter().map(|&i| rows.a[i].clone()).collect();
        let mut proj_rhs: Vec<Rational> = w.iter().map(|&i| -rows.alpha[i].clone()).collect();
        for (row, off) in rows.b.iter().zip(&rows.beta) {
            proj_rows.push(row.clone());
            proj_rhs.push(-off.clone());
        }
        let target = project_affine(c, &proj_rows, &proj_rhs)
            .expect("rows tight at the iterate are consistent");

        if target == x {
            if let Some(mult) = multiplier_certificate(c, rows, &x, &w)? {
                mult.validate()?;
                verify_kkt(c, rows, &x, &mult)?;
                return Ok(QpSolution {
                    status: QpStatus::Optimal,
                    x_star: Some(x),
                    active: w,
                    multipliers: Some(mult),
                });
            }
            let d = descent_direction(c, rows, &x, &w)?;
            // Unconstrained minimum of the objective along the ray.
            let d_sq = dot(&d, &d);
            let gain = dot(
                &d,
                &(0..n).map(|r| &c[r] - &x[r]).collect::<Vec<_>>(),
            );
            let t_opt = gain / d_sq;
            let t = match blocking_step(rows, &x, &d, &w) {
                Some(t_max) if t_max < t_opt => t_max,
                _ => t_opt,
            };
            for r in 0..n {
                x[r] += &t * &d[r];
            }
        } else {
            let d: Vec<Rational> = (0..n).map(|r| &target[r] - &x[r]).collect();
            let t = match blocking_step(rows, &x, &d, &w) {
                Some(t_max) if t_max < Rational::one() => t_max,
                _ => Rational::one(),
            };
            for r in 0..n {
                x[r] += &t * &d[r];
            }
        }
    }
    Err(Error::IterationCap(format!(
        "projection loop exceeded {} rounds",
        cap
    )))
}

fn verify_kkt(
    c: &[Rational],
    rows: &InstantiatedConstraints,
    x: &[Rational],
    mult: &Multipliers,
) -> Result<()> {
    let two = rat_int(2);
    for r in 0..c.len() {
        let mut residual = &two * (&x[r] - &c[r]);
        for (mu, row) in mult.mu.iter().zip(&rows.a) {
            residual += mu * &row[r];
        }
        for (lambda, row) in mult.lambda.iter().zip(&rows.b) {
            residual += lambda * &row[r];
        }
        if !residual.is_zero() {
            return Err(Error::Precondition(
                "multiplier certificate does not close the gradient relation".into(),
            ));
        }
    }
    Ok(())
}

/// Minimizer of a quadratic instance at one parameter value, with the
/// combinatorial code of the solution point.
#[derive(Debug, Clone)]
pub struct StationaryMapResult {
    pub status: QpStatus,
    pub x: Option<Vec<Rational>>,
    pub code: Option<CombinatorialCode>,
}

pub fn stationary_map(sqp: &SqpInstance, y: &[Rational]) -> Result<StationaryMapResult> {
    let rows = sqp.constraints_at(y)?;
    let solution = solve_qp(&sqp.c, &rows)?;
    match solution.status {
        QpStatus::Infeasible => Ok(StationaryMapResult {
            status: QpStatus::Infeasible,
            x: None,
            code: None,
        }),
        QpStatus::Optimal => {
            let x = solution.x_star.expect("optimal solve carries a point");
            let jet = sqp.jet_at(&x, y)?;
            let code = compute_code(&jet)?;
            Ok(StationaryMapResult {
                status: QpStatus::Optimal,
                x: Some(x),
                code: Some(code),
            })
        }
    }
}

/// Same instance with inequality `m` removed.
pub fn solve_deleted(sqp: &SqpInstance, y: &[Rational], m: usize) -> Result<QpSolution> {
    let mut rows = sqp.constraints_at(y)?;
    if m >= rows.a.len() {
        return Err(Error::IndexOutOfRange(format!(
            "inequality index {} out of range for {} inequalities",
            m,
            rows.a.len()
        )));
    }
    rows.a.remove(m);
    rows.alpha.remove(m);
    solve_qp(&sqp.c, &rows)
}

/// The offset that makes inequality `m` exactly active at the minimizer of
/// the deleted problem: `-x' · a_m`. The `α_m` slot of the parameters plays
/// no role because constraint `m` is absent from the solve.
pub fn alpha_boundary(sqp: &SqpInstance, y: &[Rational], m: usize) -> Result<Rational> {
    let deleted = solve_deleted(sqp, y, m)?;
    let x_prime = match deleted.status {
        QpStatus::Optimal => deleted.x_star.expect("optimal solve carries a point"),
        QpStatus::Infeasible => {
            return Err(Error::Precondition(
                "deleted problem is infeasible; no activity boundary exists".into(),
            ))
        }
    };
    let rows = sqp.constraints_at(y)?;
    Ok(-dot(&x_prime, &rows.a[m]))
}
