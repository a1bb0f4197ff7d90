//! Parameter-grid tracing of stationary points, float Newton correction on
//! indexed KKT systems, boundary probing of a distinguished inequality, and
//! trace export.
//!
//! Tracing a quadratic instance is exact: grid nodes are rational, the
//! solver is the exact projection QP, and codes come from the exact engine.
//! General polynomial problems are followed in floats through
//! [`newton_correct`]; before any code is computed the float point is
//! rationalized and near-zero constraint values are snapped to zero by
//! [`snapped_jet`], so the code engine itself never sees a tolerance.

use crate::code::compute_code;
use crate::error::{Error, Result};
use crate::jet::{jet_sp, SqpInstance};
use crate::poly::Poly;
use crate::problem::{CombinatorialCode, JetPoint, PolyProblem};
use crate::qp::{alpha_boundary, solve_qp, stationary_map, QpStatus};
use crate::rational::{format_rational, rat_from_f64, rat_pow, rat_to_f64, Rational};
use num::{Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

/// Newton iteration stops after this many steps.
pub const MAX_NEWTON_ITERATIONS: usize = 50;

/// A Newton iterate counts as converged when the KKT residual (max norm)
/// falls below this.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Constraint values closer to zero than this are snapped to zero before
/// exact code computation on float-corrected points.
pub const ACTIVITY_TOL: f64 = 1e-8;

/// A pivot smaller than the matrix scale divided by this ratio is treated
/// as zero; equivalently, a linear solve is abandoned when the condition
/// estimate exceeds this. Breakdown reports quote the value.
pub const SINGULAR_RATIO: f64 = 1e12;

/// One grid axis: either swept over an inclusive range or held fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum GridAxis {
    Fixed(Rational),
    Range {
        min: Rational,
        max: Rational,
        steps: usize,
    },
}

impl GridAxis {
    fn validate(&self) -> Result<()> {
        if let GridAxis::Range { min, max, steps } = self {
            if *steps < 1 {
                return Err(Error::Precondition("a grid axis needs at least one step".into()));
            }
            if min > max {
                return Err(Error::Precondition(
                    "grid axis range is reversed: min exceeds max".into(),
                ));
            }
        }
        Ok(())
    }

    /// The node values along this axis. A one-step range degenerates to its
    /// lower endpoint.
    pub fn values(&self) -> Result<Vec<Rational>> {
        self.validate()?;
        Ok(match self {
            GridAxis::Fixed(v) => vec![v.clone()],
            GridAxis::Range { min, max, steps } => {
                if *steps == 1 {
                    vec![min.clone()]
                } else {
                    let span = max - min;
                    let denom = Rational::from_integer(((*steps - 1) as i64).into());
                    (0..*steps)
                        .map(|k| {
                            min + &span * &Rational::from_integer((k as i64).into()) / &denom
                        })
                        .collect()
                }
            }
        })
    }
}

/// Rectangular parameter grid, one axis per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for axis in &self.axes {
            axis.validate()?;
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.axes
            .iter()
            .map(|a| match a {
                GridAxis::Fixed(_) => 1,
                GridAxis::Range { steps, .. } => *steps,
            })
            .product()
    }

    /// All grid nodes in lexicographic order of axis indices, the first
    /// axis outermost. A grid with no axes has the single empty node.
    pub fn nodes(&self) -> Result<Vec<Vec<Rational>>> {
        let per_axis: Vec<Vec<Rational>> = self
            .axes
            .iter()
            .map(|a| a.values())
            .collect::<Result<_>>()?;
        let mut out = vec![Vec::new()];
        for values in &per_axis {
            let mut next = Vec::with_capacity(out.len() * values.len());
            for prefix in &out {
                for v in values {
                    let mut node = prefix.clone();
                    node.push(v.clone());
                    next.push(node);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// What a traced point is, read off its exact code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// A stationarity pair exists and no degeneracy pair does.
    SpInterior,
    /// A degeneracy pair exists; the point sits on the boundary set.
    MfBoundary,
    /// The constraint system has no solution at this parameter.
    Infeasible,
    /// Feasible but carrying no stationarity certificate.
    NonStationary,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::SpInterior => "sp_interior",
            Classification::MfBoundary => "mf_boundary",
            Classification::Infeasible => "infeasible",
            Classification::NonStationary => "non_stationary",
        })
    }
}

/// Reads the classification off a code. Degeneracy wins over stationarity,
/// so points carrying both kinds of pair are boundary points.
pub fn classify(code: &CombinatorialCode, feasible: bool) -> Classification {
    if !feasible {
        Classification::Infeasible
    } else if code.mfcq_violated() {
        Classification::MfBoundary
    } else if code.is_stationary() {
        Classification::SpInterior
    } else {
        Classification::NonStationary
    }
}

/// One traced grid node: the parameter, the minimizer if one exists, its
/// exact code, and the classification the code implies.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub y: Vec<Rational>,
    pub x: Option<Vec<Rational>>,
    pub code: CombinatorialCode,
    pub classification: Classification,
}

/// Solves the instance at every grid node and records exact codes. Nodes
/// are emitted in lexicographic order of grid indices; each node is
/// independent of the others, so the order is the only sequencing promise.
pub fn trace_grid(sqp: &SqpInstance, grid: &GridSpec) -> Result<Vec<TraceRecord>> {
    sqp.validate()?;
    grid.validate()?;
    if grid.axes.len() != sqp.size.p {
        return Err(Error::Dimension(format!(
            "grid has {} axes but the instance has {} parameters",
            grid.axes.len(),
            sqp.size.p
        )));
    }
    let mut records = Vec::with_capacity(grid.node_count());
    for y in grid.nodes()? {
        let found = stationary_map(sqp, &y)?;
        let record = match found.status {
            QpStatus::Infeasible => TraceRecord {
                y,
                x: None,
                code: CombinatorialCode::empty(sqp.size.m_le),
                classification: Classification::Infeasible,
            },
            QpStatus::Optimal => {
                let code = found.code.expect("optimal result carries a code");
                let classification = classify(&code, true);
                TraceRecord {
                    y,
                    x: found.x,
                    code,
                    classification,
                }
            }
        };
        records.push(record);
    }
    Ok(records)
}

/// Converged output of [`newton_correct`].
#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub x: Vec<f64>,
    /// Multipliers of the inequalities in `I`, in ascending index order.
    pub mu: Vec<f64>,
    /// Multipliers of the equalities in `J`, in ascending index order.
    pub lambda: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// What a Newton run did. The two failure modes both signal leaving the
/// region where the indexed KKT system has a nondegenerate solution.
#[derive(Debug, Clone)]
pub enum NewtonOutcome {
    Converged(NewtonSolution),
    SingularJacobian { iteration: usize },
    NoConvergence { residual: f64 },
}

impl NewtonOutcome {
    pub fn converged(&self) -> Option<&NewtonSolution> {
        match self {
            NewtonOutcome::Converged(s) => Some(s),
            _ => None,
        }
    }
}

fn eval_grad(grads: &[Poly], x: &[f64], y: &[f64]) -> Vec<f64> {
    grads.iter().map(|g| g.eval_f64(x, y)).collect()
}

/// Gauss-Jordan solve with partial pivoting. `None` when the matrix is
/// singular to within [`SINGULAR_RATIO`] or contains non-finite entries.
fn solve_f64(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let dim = m.len();
    if dim == 0 {
        return Some(Vec::new());
    }
    let mut scale = 0.0f64;
    for row in &m {
        for &v in row {
            if !v.is_finite() {
                return None;
            }
            scale = scale.max(v.abs());
        }
    }
    if scale == 0.0 {
        return None;
    }
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty pivot range");
        if m[pivot_row][col].abs() * SINGULAR_RATIO < scale {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in 0..dim {
            if row == col {
                continue;
            }
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..dim {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    Some((0..dim).map(|k| rhs[k] / m[k][k]).collect())
}

struct KktSystem {
    n: usize,
    f_grad: Vec<Poly>,
    f_hess: Vec<Vec<Poly>>,
    g_grad: Vec<Vec<Poly>>,
    g_hess: Vec<Vec<Vec<Poly>>>,
    g_val: Vec<Poly>,
    h_grad: Vec<Vec<Poly>>,
    h_hess: Vec<Vec<Vec<Poly>>>,
    h_val: Vec<Poly>,
}

impl KktSystem {
    fn build(prob: &PolyProblem, i_real: &[usize], j: &[usize]) -> KktSystem {
        let pick_g = |k: &usize| &prob.inequalities[*k];
        let pick_h = |k: &usize| &prob.equalities[*k];
        KktSystem {
            n: prob.size.n,
            f_grad: prob.objective.grad_x(),
            f_hess: prob.objective.hessian_x(),
            g_grad: i_real.iter().map(|k| pick_g(k).grad_x()).collect(),
            g_hess: i_real.iter().map(|k| pick_g(k).hessian_x()).collect(),
            g_val: i_real.iter().map(|k| pick_g(k).clone()).collect(),
            h_grad: j.iter().map(|k| pick_h(k).grad_x()).collect(),
            h_hess: j.iter().map(|k| pick_h(k).hessian_x()).collect(),
            h_val: j.iter().map(|k| pick_h(k).clone()).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.n + self.g_val.len() + self.h_val.len()
    }

    fn residual(&self, x: &[f64], mu: &[f64], lambda: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let fg = eval_grad(&self.f_grad, x, y);
        for r in 0..self.n {
            let mut v = fg[r];
            for (k, grads) in self.g_grad.iter().enumerate() {
                v += mu[k] * grads[r].eval_f64(x, y);
            }
            for (k, grads) in self.h_grad.iter().enumerate() {
                v += lambda[k] * grads[r].eval_f64(x, y);
            }
            out.push(v);
        }
        for g in &self.g_val {
            out.push(g.eval_f64(x, y));
        }
        for h in &self.h_val {
            out.push(h.eval_f64(x, y));
        }
        out
    }

    fn jacobian(&self, x: &[f64], mu: &[f64], lambda: &[f64], y: &[f64]) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let ni = self.g_val.len();
        let mut m = vec![vec![0.0; dim]; dim];
        for r in 0..self.n {
            for c in 0..self.n {
                let mut v = self.f_hess[r][c].eval_f64(x, y);
                for (k, hess) in self.g_hess.iter().enumerate() {
                    v += mu[k] * hess[r][c].eval_f64(x, y);
                }
                for (k, hess) in self.h_hess.iter().enumerate() {
                    v += lambda[k] * hess[r][c].eval_f64(x, y);
                }
                m[r][c] = v;
            }
            for (k, grads) in self.g_grad.iter().enumerate() {
                m[r][self.n + k] = grads[r].eval_f64(x, y);
            }
            for (k, grads) in self.h_grad.iter().enumerate() {
                m[r][self.n + ni + k] = grads[r].eval_f64(x, y);
            }
        }
        for (k, grads) in self.g_grad.iter().enumerate() {
            for c in 0..self.n {
                m[self.n + k][c] = grads[c].eval_f64(x, y);
            }
        }
        for (k, grads) in self.h_grad.iter().enumerate() {
            for c in 0..self.n {
                m[self.n + ni + k][c] = grads[c].eval_f64(x, y);
            }
        }
        m
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, e| acc.max(e.abs()))
}

/// Float Newton iteration on the square KKT system selected by the index
/// pair `(I, J)`: gradient of the Lagrangian zero, the chosen inequalities
/// and equalities zero. The objective always participates with unit weight;
/// an index equal to the objective slot is accepted in `i` and adds no
/// unknown. Unknowns are `x`, one multiplier per real index in `I`, one per
/// index in `J`.
///
/// Converged means residual below [`RESIDUAL_TOL`] with a nonsingular
/// Jacobian at the final iterate; a singular Jacobian (to within
/// [`SINGULAR_RATIO`]) or running out of iterations is reported as the
/// corresponding failure outcome, not as an error.
pub fn newton_correct(
    prob: &PolyProblem,
    i: &BTreeSet<usize>,
    j: &BTreeSet<usize>,
    seed_x: &[f64],
    seed_mu: &[f64],
    seed_lambda: &[f64],
    y: &[f64],
) -> Result<NewtonOutcome> {
    let m_star = prob.size.m_le;
    if let Some(&bad) = i.iter().find(|&&k| k > m_star) {
        return Err(Error::IndexOutOfRange(format!(
            "inequality index {bad} exceeds the objective slot {m_star}"
        )));
    }
    if let Some(&bad) = j.iter().find(|&&k| k >= prob.size.m_eq) {
        return Err(Error::IndexOutOfRange(format!(
            "equality index {bad} out of range for {} equalities",
            prob.size.m_eq
        )));
    }
    let i_real: Vec<usize> = i.iter().copied().filter(|&k| k != m_star).collect();
    let j_list: Vec<usize> = j.iter().copied().collect();
    if seed_x.len() != prob.size.n
        || seed_mu.len() != i_real.len()
        || seed_lambda.len() != j_list.len()
        || y.len() != prob.size.p
    {
        return Err(Error::Dimension(
            "seed or parameter length does not match the system".into(),
        ));
    }

    let sys = KktSystem::build(prob, &i_real, &j_list);
    let mut x = seed_x.to_vec();
    let mut mu = seed_mu.to_vec();
    let mut lambda = seed_lambda.to_vec();
    let mut residual = f64::INFINITY;
    for iteration in 0..=MAX_NEWTON_ITERATIONS {
        let f = sys.residual(&x, &mu, &lambda, y);
        residual = max_abs(&f);
        if !residual.is_finite() {
            return Ok(NewtonOutcome::NoConvergence { residual });
        }
        if residual < RESIDUAL_TOL {
            let jay = sys.jacobian(&x, &mu, &lambda, y);
            let probe = solve_f64(jay, vec![0.0; sys.dim()]);
            return Ok(if probe.is_none() {
                NewtonOutcome::SingularJacobian { iteration }
            } else {
                NewtonOutcome::Converged(NewtonSolution {
                    x,
                    mu,
                    lambda,
                    residual,
                    iterations: iteration,
                })
            });
        }
        if iteration == MAX_NEWTON_ITERATIONS {
            break;
        }
        let jay = sys.jacobian(&x, &mu, &lambda, y);
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let Some(delta) = solve_f64(jay, rhs) else {
            return Ok(NewtonOutcome::SingularJacobian { iteration });
        };
        let ni = i_real.len();
        for (r, d) in delta.iter().enumerate() {
            if r < sys.n {
                x[r] += d;
            } else if r < sys.n + ni {
                mu[r - sys.n] += d;
            } else {
                lambda[r - sys.n - ni] += d;
            }
        }
    }
    Ok(NewtonOutcome::NoConvergence { residual })
}

/// One successful node along a continuation path.
#[derive(Debug, Clone)]
pub struct PathStep {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub mu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub residual: f64,
}

/// Where and why a continuation stopped early.
#[derive(Debug, Clone)]
pub struct PathBreakdown {
    /// Index into the path of the first node that failed.
    pub index: usize,
    pub y: Vec<f64>,
    pub reason: String,
}

/// Result of [`continuation_path`]: the successful prefix and the first
/// breakdown, if any.
#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub steps: Vec<PathStep>,
    pub breakdown: Option<PathBreakdown>,
}

impl ContinuationResult {
    pub fn completed(&self) -> bool {
        self.breakdown.is_none()
    }
}

/// Follows the solution of one indexed KKT system along a list of
/// parameters, seeding each Newton run with the previous solution. Stops at
/// the first failure and reports the breakdown parameter and reason; both
/// failure kinds mean the path left the nondegeneracy region of the system.
pub fn continuation_path(
    prob: &PolyProblem,
    i: &BTreeSet<usize>,
    j: &BTreeSet<usize>,
    start_x: &[f64],
    start_mu: &[f64],
    start_lambda: &[f64],
    path: &[Vec<f64>],
) -> Result<ContinuationResult> {
    let mut x = start_x.to_vec();
    let mut mu = start_mu.to_vec();
    let mut lambda = start_lambda.to_vec();
    let mut steps = Vec::with_capacity(path.len());
    for (index, y) in path.iter().enumerate() {
        match newton_correct(prob, i, j, &x, &mu, &lambda, y)? {
            NewtonOutcome::Converged(sol) => {
                x = sol.x.clone();
                mu = sol.mu.clone();
                lambda = sol.lambda.clone();
                steps.push(PathStep {
                    y: y.clone(),
                    x: sol.x,
                    mu: sol.mu,
                    lambda: sol.lambda,
                    residual: sol.residual,
                });
            }
            NewtonOutcome::SingularJacobian { iteration } => {
                return Ok(ContinuationResult {
                    steps,
                    breakdown: Some(PathBreakdown {
                        index,
                        y: y.clone(),
                        reason: format!(
                            "KKT matrix near singular (condition estimate above {SINGULAR_RATIO:e}) at iteration {iteration}"
                        ),
                    }),
                });
            }
            NewtonOutcome::NoConvergence { residual } => {
                return Ok(ContinuationResult {
                    steps,
                    breakdown: Some(PathBreakdown {
                        index,
                        y: y.clone(),
                        reason: format!(
                            "no convergence within {MAX_NEWTON_ITERATIONS} iterations (residual {residual:e})"
                        ),
                    }),
                });
            }
        }
    }
    Ok(ContinuationResult {
        steps,
        breakdown: None,
    })
}

/// Where a probe offset sits relative to the boundary value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbePosition {
    Below,
    At,
    Above,
}

/// One solved probe of the distinguished inequality at a shifted offset.
#[derive(Debug, Clone)]
pub struct ProbeCheck {
    pub position: ProbePosition,
    pub offset: Rational,
    pub feasible: bool,
    /// The distinguished inequality is active at the solution.
    pub member_active: bool,
    /// Some pair of the code avoids the distinguished inequality.
    pub avoiding_pair: bool,
    pub ok: bool,
}

/// One grid node of a boundary probe. `boundary` is absent when the
/// problem without the distinguished inequality is infeasible, in which
/// case no checks run.
#[derive(Debug, Clone)]
pub struct BoundaryProbeNode {
    pub y: Vec<Rational>,
    pub boundary: Option<Rational>,
    pub checks: Vec<ProbeCheck>,
}

/// Sweep result of [`boundary_probe`].
#[derive(Debug, Clone)]
pub struct BoundaryProbeReport {
    pub nodes: Vec<BoundaryProbeNode>,
    /// Nodes whose deleted problem was infeasible.
    pub skipped: usize,
    /// One entry per violated expectation.
    pub violations: Vec<String>,
}

impl BoundaryProbeReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Probes the local half-space picture of one distinguished inequality `m`
/// across a parameter grid. At each node it computes the boundary offset
/// (the value at which `m` first becomes active at the solution), re-solves
/// with the offset of `m` overridden to one below, at, and one above the
/// boundary, and checks the expected pattern: inactive below; active with a
/// pair avoiding `m` at the boundary; active above. The grid value on the
/// offset axis of `m` plays no role.
///
/// A probe above the boundary may be infeasible; the expectation is then
/// vacuous and the check passes with `feasible` false. Below and at the
/// boundary the solution of the problem without `m` stays feasible, so
/// infeasibility there is reported as a violation.
pub fn boundary_probe(
    sqp: &SqpInstance,
    m: usize,
    grid: &GridSpec,
) -> Result<BoundaryProbeReport> {
    sqp.validate()?;
    grid.validate()?;
    if m >= sqp.size.m_le {
        return Err(Error::IndexOutOfRange(format!(
            "distinguished inequality {m} out of range for {} inequalities",
            sqp.size.m_le
        )));
    }
    if grid.axes.len() != sqp.size.p {
        return Err(Error::Dimension(format!(
            "grid has {} axes but the instance has {} parameters",
            grid.axes.len(),
            sqp.size.p
        )));
    }
    let mut nodes = Vec::new();
    let mut skipped = 0usize;
    let mut violations = Vec::new();
    for (node_idx, y) in grid.nodes()?.into_iter().enumerate() {
        let boundary = match alpha_boundary(sqp, &y, m) {
            Ok(v) => v,
            Err(Error::Precondition(_)) => {
                skipped += 1;
                nodes.push(BoundaryProbeNode {
                    y,
                    boundary: None,
                    checks: Vec::new(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let one = Rational::from_integer(1.into());
        let probes = [
            (ProbePosition::Below, &boundary - &one),
            (ProbePosition::At, boundary.clone()),
            (ProbePosition::Above, &boundary + &one),
        ];
        let mut checks = Vec::with_capacity(3);
        for (position, offset) in probes {
            let mut rows = sqp.constraints_at(&y)?;
            rows.alpha[m] = offset.clone();
            let solved = solve_qp(&sqp.c, &rows)?;
            let check = match solved.status {
                QpStatus::Infeasible => {
                    let ok = position == ProbePosition::Above;
                    if !ok {
                        violations.push(format!(
                            "node {node_idx} {position:?}: problem unexpectedly infeasible"
                        ));
                    }
                    ProbeCheck {
                        position,
                        offset,
                        feasible: false,
                        member_active: false,
                        avoiding_pair: false,
                        ok,
                    }
                }
                QpStatus::Optimal => {
                    let x = solved.x_star.as_ref().expect("optimal probe has a point");
                    let mut jet = sqp.jet_at(x, &y)?;
                    jet.alpha[m] = dot(&rows.a[m], x) + &offset;
                    let code = compute_code(&jet)?;
                    let member_active = code.i0.contains(&m);
                    let avoiding_pair = code.pairs.iter().any(|p| !p.i.contains(&m));
                    let ok = match position {
                        ProbePosition::Below => !member_active,
                        ProbePosition::At => member_active && avoiding_pair,
                        ProbePosition::Above => member_active,
                    };
                    if !ok {
                        violations.push(format!(
                            "node {node_idx} {position:?}: active={member_active} avoiding_pair={avoiding_pair}"
                        ));
                    }
                    ProbeCheck {
                        position,
                        offset,
                        feasible: true,
                        member_active,
                        avoiding_pair,
                        ok,
                    }
                }
            };
            checks.push(check);
        }
        nodes.push(BoundaryProbeNode {
            y,
            boundary: Some(boundary),
            checks,
        });
    }
    Ok(BoundaryProbeReport {
        nodes,
        skipped,
        violations,
    })
}

/// Snaps constraint values within [`ACTIVITY_TOL`] of zero to exact zero,
/// in place. Gradients are left untouched: the snap repairs the active set
/// and equality membership a float iteration was aiming at, nothing else.
pub fn snap_jet_values(jet: &mut JetPoint) {
    let snap = |v: &mut Rational| {
        if rat_to_f64(v).abs() < ACTIVITY_TOL {
            *v = Rational::zero();
        }
    };
    jet.alpha.iter_mut().for_each(snap);
    jet.beta.iter_mut().for_each(snap);
}

/// Rationalizes a float point exactly, evaluates the jet of the problem
/// there, and snaps constraint values to zero via [`snap_jet_values`]. The
/// result feeds the exact code engine with the active set the float
/// iteration was aiming at.
pub fn snapped_jet(prob: &PolyProblem, x: &[f64], y: &[f64]) -> Result<JetPoint> {
    let xr: Vec<Rational> = x.iter().map(|&v| rat_from_f64(v)).collect::<Result<_>>()?;
    let yr: Vec<Rational> = y.iter().map(|&v| rat_from_f64(v)).collect::<Result<_>>()?;
    let mut jet = jet_sp(prob, &xr, &yr)?;
    snap_jet_values(&mut jet);
    Ok(jet)
}

/// A float-driven grid trace of a general polynomial problem: one record
/// per node plus a note for every node the corrector could not resolve on
/// its own.
#[derive(Debug, Clone)]
pub struct ProblemTrace {
    pub records: Vec<TraceRecord>,
    pub notes: Vec<String>,
}

/// Substitutes exact parameter values into a polynomial and returns its
/// value when the result does not depend on x, or None when some
/// x-dependent term survives the substitution.
fn x_constant_value(poly: &Poly, y: &[Rational]) -> Option<Rational> {
    let mut constant = Rational::zero();
    let mut varying: Vec<(Vec<u32>, Rational)> = Vec::new();
    for (coeff, xe, ye) in poly.terms() {
        let mut v = coeff.clone();
        for (j, &e) in ye.iter().enumerate() {
            if e > 0 {
                v *= rat_pow(&y[j], e);
            }
        }
        if xe.iter().all(|&e| e == 0) {
            constant += v;
        } else if let Some(slot) = varying.iter_mut().find(|(k, _)| k == xe) {
            slot.1 += v;
        } else {
            varying.push((xe.to_vec(), v));
        }
    }
    if varying.iter().all(|(_, v)| v.is_zero()) {
        Some(constant)
    } else {
        None
    }
}

fn unresolved_record(y: Vec<Rational>, m_le: usize) -> TraceRecord {
    TraceRecord {
        y,
        x: None,
        code: CombinatorialCode::empty(m_le),
        classification: Classification::NonStationary,
    }
}

/// Follows one KKT branch of a general polynomial problem over a grid. At
/// each node the branch selected by the active set `active` (all equalities
/// always participate) is corrected by [`newton_correct`], seeded with the
/// previous node's solution, and the corrected point is rationalized,
/// value-snapped, and classified by the exact code engine.
///
/// Nodes where the corrector fails are rescued when the substituted
/// parameter makes every relevant claim exact: a constraint that loses all
/// x-dependence and evaluates nonzero (equality) or positive (inequality)
/// certifies the node infeasible, and when all constraints lose their
/// x-dependence and the remaining system is feasible, a degeneracy
/// certificate at a representative point holds across the whole fiber.
/// Anything else is recorded as non_stationary with an empty code and an
/// explanatory note; such notes mean "unresolved", not "proved
/// non-stationary".
pub fn trace_problem_grid(
    prob: &PolyProblem,
    grid: &GridSpec,
    active: &BTreeSet<usize>,
    seed_x: &[f64],
) -> Result<ProblemTrace> {
    let check = prob.validate();
    if !check.ok() {
        return Err(Error::Precondition(format!(
            "problem fails validation: {}",
            check.failures.join("; ")
        )));
    }
    grid.validate()?;
    if grid.axes.len() != prob.size.p {
        return Err(Error::Dimension(format!(
            "grid has {} axes but the problem has {} parameters",
            grid.axes.len(),
            prob.size.p
        )));
    }
    let j_all: BTreeSet<usize> = (0..prob.size.m_eq).collect();
    let i_real = active.iter().filter(|&&k| k != prob.size.m_le).count();

    let mut cur_x = seed_x.to_vec();
    let mut cur_mu = vec![0.0; i_real];
    let mut cur_lambda = vec![0.0; prob.size.m_eq];
    let mut records = Vec::with_capacity(grid.node_count());
    let mut notes = Vec::new();
    for (node, y) in grid.nodes()?.into_iter().enumerate() {
        let y_f: Vec<f64> = y.iter().map(rat_to_f64).collect();
        let outcome = newton_correct(prob, active, &j_all, &cur_x, &cur_mu, &cur_lambda, &y_f)?;
        if let Some(sol) = outcome.converged() {
            cur_x = sol.x.clone();
            cur_mu = sol.mu.clone();
            cur_lambda = sol.lambda.clone();
            let xr: Vec<Rational> = sol.x.iter().map(|&v| rat_from_f64(v)).collect::<Result<_>>()?;
            let mut jet = jet_sp(prob, &xr, &y)?;
            snap_jet_values(&mut jet);
            if jet.alpha_feasible() && jet.beta.iter().all(|v| v.is_zero()) {
                let code = compute_code(&jet)?;
                let classification = classify(&code, true);
                records.push(TraceRecord {
                    y,
                    x: Some(xr),
                    code,
                    classification,
                });
            } else {
                notes.push(format!(
                    "node {node}: the corrected point violates a constraint; the tracked branch left the feasible set"
                ));
                records.push(TraceRecord {
                    y,
                    x: Some(xr),
                    code: CombinatorialCode::empty(prob.size.m_le),
                    classification: Classification::NonStationary,
                });
            }
            continue;
        }
        let reason = match outcome {
            NewtonOutcome::SingularJacobian { iteration } => {
                format!("singular KKT system at iteration {iteration}")
            }
            NewtonOutcome::NoConvergence { residual } => {
                format!("no convergence, residual {residual:.3e}")
            }
            NewtonOutcome::Converged(_) => unreachable!("handled above"),
        };

        // Rescue: claims that survive substituting the parameter exactly.
        let mut infeasible = false;
        let mut all_constant = true;
        for h in &prob.equalities {
            match x_constant_value(h, &y) {
                Some(v) if !v.is_zero() => {
                    infeasible = true;
                    break;
                }
                Some(_) => {}
                None => all_constant = false,
            }
        }
        if !infeasible {
            for g in &prob.inequalities {
                match x_constant_value(g, &y) {
                    Some(v) if v.is_positive() => {
                        infeasible = true;
                        break;
                    }
                    Some(_) => {}
                    None => all_constant = false,
                }
            }
        }
        if infeasible {
            records.push(TraceRecord {
                y,
                x: None,
                code: CombinatorialCode::empty(prob.size.m_le),
                classification: Classification::Infeasible,
            });
        } else if all_constant {
            // Every x is feasible and active constraints have identically
            // zero gradients, so a degeneracy pair found at one point is a
            // degeneracy pair at every point of the fiber.
            let rep = vec![Rational::zero(); prob.size.n];
            let jet = jet_sp(prob, &rep, &y)?;
            let code = compute_code(&jet)?;
            if code.mfcq_violated() {
                records.push(TraceRecord {
                    y,
                    x: Some(rep),
                    code,
                    classification: Classification::MfBoundary,
                });
            } else {
                notes.push(format!(
                    "node {node}: {reason}; the fiber is all of state space and carries no degeneracy certificate, node unresolved"
                ));
                records.push(unresolved_record(y, prob.size.m_le));
            }
        } else {
            notes.push(format!("node {node}: {reason}; node unresolved"));
            records.push(unresolved_record(y, prob.size.m_le));
        }
    }
    Ok(ProblemTrace { records, notes })
}

/// Serialization targets for traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    Svg,
}

fn json_indices(set: &BTreeSet<usize>) -> String {
    let body: Vec<String> = set.iter().map(|k| (k + 1).to_string()).collect();
    format!("[{}]", body.join(","))
}

fn code_to_json(code: &CombinatorialCode) -> String {
    let pairs: Vec<String> = code
        .pairs
        .iter()
        .map(|p| {
            format!(
                "{{\"i\":{},\"j\":{}}}",
                json_indices(&p.i),
                json_indices(&p.j)
            )
        })
        .collect();
    format!(
        "{{\"m_star\":{},\"i0\":{},\"pairs\":[{}]}}",
        code.m_star + 1,
        json_indices(&code.i0),
        pairs.join(",")
    )
}

fn rational_list_json(values: &[Rational]) -> String {
    let body: Vec<String> = values
        .iter()
        .map(|v| format!("\"{}\"", format_rational(v)))
        .collect();
    format!("[{}]", body.join(","))
}

/// Serializes trace records. CSV flattens each record to one row in the
/// column order `y.., x.., feasible, stationary, mfcq_violated,
/// classification` with exact rational entries. JSON mirrors the record
/// fields, all indices shifted to one-based. SVG draws a scatter of the two
/// projected parameter coordinates in an 800 by 800 viewport, classification
/// mapped to the marker class; it requires a projection.
pub fn export_trace(
    records: &[TraceRecord],
    format: ExportFormat,
    projection: Option<(usize, usize)>,
) -> Result<String> {
    match format {
        ExportFormat::Csv => {
            let p = records.first().map(|r| r.y.len()).unwrap_or(0);
            let n = records
                .iter()
                .find_map(|r| r.x.as_ref().map(|v| v.len()))
                .unwrap_or(0);
            let mut columns = Vec::with_capacity(p + n + 4);
            for k in 0..p {
                columns.push(format!("y{}", k + 1));
            }
            for k in 0..n {
                columns.push(format!("x{}", k + 1));
            }
            columns.extend(
                ["feasible", "stationary", "mfcq_violated", "classification"]
                    .map(String::from),
            );
            let mut out = columns.join(",");
            out.push('\n');
            for r in records {
                let mut cells: Vec<String> = r.y.iter().map(format_rational).collect();
                match &r.x {
                    Some(x) => cells.extend(x.iter().map(format_rational)),
                    None => cells.extend(vec![String::new(); n]),
                }
                cells.push((r.classification != Classification::Infeasible).to_string());
                cells.push(r.code.is_stationary().to_string());
                cells.push(r.code.mfcq_violated().to_string());
                cells.push(r.classification.to_string());
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        ExportFormat::Json => {
            let body: Vec<String> = records
                .iter()
                .map(|r| {
                    let x = match &r.x {
                        Some(x) => rational_list_json(x),
                        None => "null".to_string(),
                    };
                    format!(
                        "{{\"y\":{},\"x\":{},\"code\":{},\"classification\":\"{}\"}}",
                        rational_list_json(&r.y),
                        x,
                        code_to_json(&r.code),
                        r.classification
                    )
                })
                .collect();
            Ok(format!("[{}]", body.join(",")))
        }
        ExportFormat::Svg => {
            let Some((u, v)) = projection else {
                return Err(Error::Precondition(
                    "svg export needs a projection onto two parameter coordinates".into(),
                ));
            };
            if let Some(first) = records.first() {
                let p = first.y.len();
                if u >= p || v >= p {
                    return Err(Error::IndexOutOfRange(format!(
                        "projection ({u}, {v}) out of range for {p} parameters"
                    )));
                }
            }
            let pts: Vec<(f64, f64, Classification)> = records
                .iter()
                .map(|r| {
                    (
                        rat_to_f64(&r.y[u]),
                        rat_to_f64(&r.y[v]),
                        r.classification,
                    )
                })
                .collect();
            let size = 800.0f64;
            let pad = 40.0f64;
            let (mut u_min, mut u_max) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
            for (fu, fv, _) in &pts {
                u_min = u_min.min(*fu);
                u_max = u_max.max(*fu);
                v_min = v_min.min(*fv);
                v_max = v_max.max(*fv);
            }
            let place = |val: f64, lo: f64, hi: f64| {
                if hi > lo {
                    pad + (val - lo) / (hi - lo) * (size - 2.0 * pad)
                } else {
                    size / 2.0
                }
            };
            let mut out = String::new();
            let _ = writeln!(
                out,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\">"
            );
            out.push_str(concat!(
                "<style>circle.sp_interior{fill:#1a7f37}",
                "circle.mf_boundary{fill:#cf222e}",
                "circle.infeasible{fill:#aaaaaa}",
                "circle.non_stationary{fill:#0969da}</style>\n"
            ));
            for (fu, fv, class) in &pts {
                let cx = place(*fu, u_min, u_max);
                let cy = size - place(*fv, v_min, v_max);
                let _ = writeln!(
                    out,
                    "<circle class=\"{class}\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3\"/>"
                );
            }
            out.push_str("</svg>\n");
            Ok(out)
        }
    }
}
