//! Built-in example problems with documented expected behavior, for the
//! command line and the verification suites.

use crate::jet::{ParamSource, SqpInstance};
use crate::poly::Poly;
use crate::problem::{PolyProblem, ProblemSize};
use crate::rational::{rat_int, Rational};

/// A named problem whose interesting facts are known in closed form. Every
/// example carries a polynomial form; those that are convex quadratic also
/// carry the exact-solver instance, and `problem` is its polynomial image.
#[derive(Debug, Clone)]
pub struct BuiltinExample {
    pub name: &'static str,
    /// What the example shows, and the hand-checked facts tests pin down.
    pub notes: &'static str,
    pub problem: PolyProblem,
    pub sqp: Option<SqpInstance>,
}

fn r(k: i64) -> Rational {
    rat_int(k)
}

/// Distance-squared objective over a parametric hyperplane. The solution is
/// x = -y3 (y1, y2) / (y1^2 + y2^2) wherever the gradient (y1, y2) is
/// nonzero; at the parameter origin every x is feasible and the origin is
/// simultaneously stationary and degenerate, the vertex where the traced
/// set fails to be a manifold with boundary.
fn example_5_1() -> PolyProblem {
    let x1 = Poly::x_var(2, 3, 0);
    let x2 = Poly::x_var(2, 3, 1);
    let objective = x1.mul(&x1).add(&x2.mul(&x2));
    let hyperplane = x1
        .mul(&Poly::y_var(2, 3, 0))
        .add(&x2.mul(&Poly::y_var(2, 3, 1)))
        .add(&Poly::y_var(2, 3, 2));
    PolyProblem {
        size: ProblemSize {
            n: 2,
            m_le: 0,
            m_eq: 1,
            p: 3,
        },
        objective,
        inequalities: vec![],
        equalities: vec![hyperplane],
    }
}

/// Projection of c = (1, 0) onto the half space x1 <= 0. The minimizer is
/// the origin, active constraint gradient (1, 0) opposing the objective
/// gradient, so the code there is {({1, m*}, {})}.
fn halfspace_qp() -> SqpInstance {
    SqpInstance {
        size: ProblemSize {
            n: 2,
            m_le: 1,
            m_eq: 0,
            p: 0,
        },
        c: vec![r(1), r(0)],
        source: ParamSource::Affine {
            base: vec![r(1), r(0), r(0)],
            directions: vec![],
        },
    }
}

/// Zero objective with the wedge x <= 0, -x <= 0. Only the origin is
/// feasible; the opposing gradients violate the qualification there, and
/// the vanishing objective gradient makes the origin stationary too.
fn double_wedge() -> PolyProblem {
    let x = Poly::x_var(1, 0, 0);
    PolyProblem {
        size: ProblemSize {
            n: 1,
            m_le: 2,
            m_eq: 0,
            p: 0,
        },
        objective: Poly::zero(1, 0),
        inequalities: vec![x.clone(), x.neg()],
        equalities: vec![],
    }
}

/// One-variable projection of c = 1 onto x + alpha1 <= 0, the offset being
/// the single parameter. The constraint becomes active at alpha1 = -1, the
/// value alpha_boundary reports at every parameter.
fn halfspace_sqp() -> SqpInstance {
    SqpInstance {
        size: ProblemSize {
            n: 1,
            m_le: 1,
            m_eq: 0,
            p: 1,
        },
        c: vec![r(1)],
        source: ParamSource::Affine {
            base: vec![r(1), r(0)],
            directions: vec![vec![r(0), r(1)]],
        },
    }
}

/// Projection of c = (1, 0) onto the strip alpha2 <= x1 <= -alpha1, both
/// offsets parametric. Feasible exactly when alpha1 + alpha2 <= 0; the
/// strip collapses to a degenerate line on alpha1 + alpha2 = 0, so traces
/// over (alpha1, alpha2) show a stationary half plane whose frontier is
/// the qualification-violating diagonal.
fn strip_sqp() -> SqpInstance {
    SqpInstance {
        size: ProblemSize {
            n: 2,
            m_le: 2,
            m_eq: 0,
            p: 2,
        },
        c: vec![r(1), r(0)],
        source: ParamSource::Affine {
            base: vec![r(1), r(0), r(0), r(-1), r(0), r(0)],
            directions: vec![
                vec![r(0), r(0), r(1), r(0), r(0), r(0)],
                vec![r(0), r(0), r(0), r(0), r(0), r(1)],
            ],
        },
    }
}

fn from_sqp(name: &'static str, notes: &'static str, sqp: SqpInstance) -> BuiltinExample {
    let problem = sqp
        .to_problem()
        .expect("builtin instances convert to polynomial form");
    BuiltinExample {
        name,
        notes,
        problem,
        sqp: Some(sqp),
    }
}

/// All built-in examples, in a fixed presentation order.
pub fn all_builtins() -> Vec<BuiltinExample> {
    vec![
        BuiltinExample {
            name: "example-5.1",
            notes: "min x1^2 + x2^2 s.t. x1 y1 + x2 y2 + y3 = 0; solution \
                    x = -y3 (y1, y2) / (y1^2 + y2^2) away from (y1, y2) = 0; \
                    the parameter origin is a vertex that is stationary and \
                    degenerate at once, and continuation into it breaks down",
            problem: example_5_1(),
            sqp: None,
        },
        from_sqp(
            "halfspace-qp",
            "project c = (1, 0) onto x1 <= 0; minimizer (0, 0) with code \
             {({1, m*}, {})}",
            halfspace_qp(),
        ),
        BuiltinExample {
            name: "double-wedge",
            notes: "zero objective on x <= 0, -x <= 0; the origin is the only \
                    feasible point, violates the qualification through the \
                    opposing gradients, and is stationary; the standard \
                    degeneracy-to-stationarity rewrite sends it to \
                    min x2 s.t. x - x2 <= 0, -x - x2 <= 0",
            problem: double_wedge(),
            sqp: None,
        },
        from_sqp(
            "halfspace-sqp",
            "project c = 1 onto x + alpha1 <= 0 with parametric offset; the \
             activity boundary sits at alpha1 = -1",
            halfspace_sqp(),
        ),
        from_sqp(
            "strip-sqp",
            "project c = (1, 0) onto alpha2 <= x1 <= -alpha1; stationary for \
             alpha1 + alpha2 < 0, degenerate on the diagonal alpha1 + alpha2 \
             = 0, infeasible above it",
            strip_sqp(),
        ),
    ]
}

/// Looks one example up by name.
pub fn builtin(name: &str) -> Option<BuiltinExample> {
    all_builtins().into_iter().find(|e| e.name == name)
}

pub fn builtin_names() -> Vec<&'static str> {
    all_builtins().iter().map(|e| e.name).collect()
}
