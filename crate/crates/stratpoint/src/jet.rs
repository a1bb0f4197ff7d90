//! Jet evaluation on polynomial problems and the universal convex-quadratic
//! normal form.
//!
//! The jet of a problem at a point records every constraint gradient, every
//! constraint value, and the objective gradient. Any jet can be realized as
//! the jet of a convex quadratic problem whose constraint coefficients are
//! themselves the parameters; [`build_normal_form`] performs that
//! construction and [`normal_form_jacobian`] certifies that the realization
//! is a diffeomorphism-grade change of coordinates (unit determinant).

use crate::code::{compute_code, in_closure};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Poly;
use crate::problem::{CombinatorialCode, JetPoint, MfJetPoint, PolyProblem, ProblemSize};
use crate::rational::Rational;
use num::{One, Zero};

fn check_problem(prob: &PolyProblem, x: &[Rational], y: &[Rational]) -> Result<()> {
    let report = prob.validate();
    if !report.ok() {
        return Err(Error::Dimension(report.failures.join("; ")));
    }
    if x.len() != prob.size.n {
        return Err(Error::Dimension(format!(
            "x has length {}, problem has n = {}",
            x.len(),
            prob.size.n
        )));
    }
    if y.len() != prob.size.p {
        return Err(Error::Dimension(format!(
            "y has length {}, problem has p = {}",
            y.len(),
            prob.size.p
        )));
    }
    Ok(())
}

fn eval_gradient(poly: &Poly, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
    poly.grad_x().iter().map(|d| d.eval(x, y)).collect()
}

/// First-order data of the problem at `(x, y)`: every constraint gradient
/// and value plus the objective gradient, all evaluated exactly.
pub fn jet_sp(prob: &PolyProblem, x: &[Rational], y: &[Rational]) -> Result<JetPoint> {
    check_problem(prob, x, y)?;
    let mut a = Vec::with_capacity(prob.inequalities.len());
    let mut alpha = Vec::with_capacity(prob.inequalities.len());
    for g in &prob.inequalities {
        a.push(eval_gradient(g, x, y)?);
        alpha.push(g.eval(x, y)?);
    }
    let mut b = Vec::with_capacity(prob.equalities.len());
    let mut beta = Vec::with_capacity(prob.equalities.len());
    for h in &prob.equalities {
        b.push(eval_gradient(h, x, y)?);
        beta.push(h.eval(x, y)?);
    }
    let a_star = eval_gradient(&prob.objective, x, y)?;
    Ok(JetPoint {
        a,
        alpha,
        b,
        beta,
        a_star,
    })
}

/// The same data without the objective gradient, for the constraint-only
/// (MFCQ) side.
pub fn jet_mf(prob: &PolyProblem, x: &[Rational], y: &[Rational]) -> Result<MfJetPoint> {
    let jet = jet_sp(prob, x, y)?;
    Ok(MfJetPoint {
        a: jet.a,
        alpha: jet.alpha,
        b: jet.b,
        beta: jet.beta,
    })
}

/// Code of a problem point together with its feasibility split. The code
/// itself only gates on inequality values, so equality feasibility is
/// reported separately and `feasible` is the conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCode {
    pub code: CombinatorialCode,
    pub ineq_feasible: bool,
    pub eq_feasible: bool,
    pub feasible: bool,
}

pub fn point_code(prob: &PolyProblem, x: &[Rational], y: &[Rational]) -> Result<PointCode> {
    let jet = jet_sp(prob, x, y)?;
    let code = compute_code(&jet)?;
    let ineq_feasible = jet.alpha_feasible();
    let eq_feasible = jet.beta_zero();
    Ok(PointCode {
        code,
        ineq_feasible,
        eq_feasible,
        feasible: ineq_feasible && eq_feasible,
    })
}

/// Does `(x, y)` lie in the closure of the stationary locus as seen by the
/// first-order data: the point must be feasible and the jet must sit in the
/// closed multiplier cone.
pub fn point_in_sp_closure(prob: &PolyProblem, x: &[Rational], y: &[Rational]) -> Result<bool> {
    let jet = jet_sp(prob, x, y)?;
    Ok(jet.alpha_feasible() && jet.beta_zero() && in_closure(&jet)?)
}

/// Where a quadratic instance takes its constraint coefficients from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamSource {
    /// The parameter vector *is* the full coefficient vector
    /// `(a_1, α_1, …, b_1, β_1, …)`, so `p = (n+1)(m_le + m_eq)`.
    Canonical,
    /// Parameters sweep an affine subspace of the full coefficient space:
    /// `y ↦ base + Σ y_k · directions[k]`.
    Affine {
        base: Vec<Rational>,
        directions: Vec<Vec<Rational>>,
    },
}

/// Convex quadratic instance: objective `½‖x − c‖²` with affine constraints
/// whose coefficients depend on the parameters as described by `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqpInstance {
    pub size: ProblemSize,
    pub c: Vec<Rational>,
    pub source: ParamSource,
}

/// Constraint coefficients of a quadratic instance at one parameter value:
/// rows `a_i·x + alpha_i ≤ 0` and `b_j·x + beta_j = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstantiatedConstraints {
    pub a: Vec<Vec<Rational>>,
    pub alpha: Vec<Rational>,
    pub b: Vec<Vec<Rational>>,
    pub beta: Vec<Rational>,
}

impl SqpInstance {
    /// Full coefficient-space dimension `(n+1)(m_le + m_eq)`.
    pub fn p1(&self) -> usize {
        (self.size.n + 1) * (self.size.m_le + self.size.m_eq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.len() != self.size.n {
            return Err(Error::Dimension("c must have length n".into()));
        }
        match &self.source {
            ParamSource::Canonical => {
                if self.size.p != self.p1() {
                    return Err(Error::Dimension(
                        "canonical instance needs p = (n+1)(m_le + m_eq)".into(),
                    ));
                }
            }
            ParamSource::Affine { base, directions } => {
                let p1 = self.p1();
                if base.len() != p1
                    || directions.len() != self.size.p
                    || directions.iter().any(|d| d.len() != p1)
                {
                    return Err(Error::Dimension(
                        "affine source must map p parameters into the full coefficient space"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Maps a parameter vector to the full coefficient vector.
    pub fn full_params(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        self.validate()?;
        if y.len() != self.size.p {
            return Err(Error::Dimension(format!(
                "parameter vector has length {}, instance has p = {}",
                y.len(),
                self.size.p
            )));
        }
        match &self.source {
            ParamSource::Canonical => Ok(y.to_vec()),
            ParamSource::Affine { base, directions } => {
                let mut full = base.clone();
                for (yk, dir) in y.iter().zip(directions) {
                    for (slot, d) in full.iter_mut().zip(dir) {
                        *slot += yk * d;
                    }
                }
                Ok(full)
            }
        }
    }

    /// Splits the full coefficient vector into constraint rows at `y`.
    pub fn constraints_at(&self, y: &[Rational]) -> Result<InstantiatedConstraints> {
        let full = self.full_params(y)?;
        let n = self.size.n;
        let block = |idx: usize| {
            let start = (n + 1) * idx;
            (full[start..start + n].to_vec(), full[start + n].clone())
        };
        let mut a = Vec::with_capacity(self.size.m_le);
        let mut alpha = Vec::with_capacity(self.size.m_le);
        for i in 0..self.size.m_le {
            let (row, offset) = block(i);
            a.push(row);
            alpha.push(offset);
        }
        let mut b = Vec::with_capacity(self.size.m_eq);
        let mut beta = Vec::with_capacity(self.size.m_eq);
        for j in 0..self.size.m_eq {
            let (row, offset) = block(self.size.m_le + j);
            b.push(row);
            beta.push(offset);
        }
        Ok(InstantiatedConstraints {
            a,
            alpha,
            b,
            beta,
        })
    }

    /// Jet at `(x, y)` computed directly from the instantiated coefficients.
    /// Agrees exactly with `jet_sp` on the polynomial rendering.
    pub fn jet_at(&self, x: &[Rational], y: &[Rational]) -> Result<JetPoint> {
        if x.len() != self.size.n {
            return Err(Error::Dimension("x must have length n".into()));
        }
        let rows = self.constraints_at(y)?;
        let value = |row: &[Rational], offset: &Rational| {
            row.iter()
                .zip(x)
                .fold(offset.clone(), |acc, (r, xv)| acc + r * xv)
        };
        let alpha = rows
            .a
            .iter()
            .zip(&rows.alpha)
            .map(|(row, off)| value(row, off))
            .collect();
        let beta = rows
            .b
            .iter()
            .zip(&rows.beta)
            .map(|(row, off)| value(row, off))
            .collect();
        let a_star = x.iter().zip(&self.c).map(|(xv, cv)| xv - cv).collect();
        Ok(JetPoint {
            a: rows.a,
            alpha,
            b: rows.b,
            beta,
            a_star,
        })
    }

    /// Renders the instance as an explicit polynomial problem in `(x, y)`.
    pub fn to_problem(&self) -> Result<PolyProblem> {
        self.validate()?;
        let n = self.size.n;
        let p = self.size.p;

        // Each full coefficient as a degree ≤ 1 polynomial in y.
        let coeff_polys: Vec<Poly> = match &self.source {
            ParamSource::Canonical => (0..p).map(|k| Poly::y_var(n, p, k)).collect(),
            ParamSource::Affine { base, directions } => (0..self.p1())
                .map(|slot| {
                    let mut poly = Poly::constant(n, p, base[slot].clone());
                    for (k, dir) in directions.iter().enumerate() {
                        poly = poly.add(&Poly::y_var(n, p, k).scale(&dir[slot]));
                    }
                    poly
                })
                .collect(),
        };

        let constraint = |idx: usize| {
            let start = (n + 1) * idx;
            let mut g = coeff_polys[start + n].clone();
            for r in 0..n {
                g = g.add(&coeff_polys[start + r].mul(&Poly::x_var(n, p, r)));
            }
            g
        };
        let inequalities: Vec<Poly> = (0..self.size.m_le).map(constraint).collect();
        let equalities: Vec<Poly> = (0..self.size.m_eq)
            .map(|j| constraint(self.size.m_le + j))
            .collect();

        let half = Rational::new(1.into(), 2.into());
        let mut objective = Poly::zero(n, p);
        for r in 0..n {
            let xr = Poly::x_var(n, p, r);
            let shifted = xr.sub(&Poly::constant(n, p, self.c[r].clone()));
            objective = objective.add(&shifted.mul(&shifted).scale(&half));
        }

        Ok(PolyProblem {
            size: self.size,
            objective,
            inequalities,
            equalities,
        })
    }
}

/// A jet realized as the jet of a canonical quadratic instance at `x = 0`,
/// parameter `y_bar`. `jet_check` re-evaluates the rendered problem there;
/// it must reproduce the input jet coordinate for coordinate.
#[derive(Debug, Clone)]
pub struct NormalFormResult {
    pub sqp: SqpInstance,
    pub y_bar: Vec<Rational>,
    pub jet_check: JetPoint,
}

/// Realizes any jet as the jet of the canonical convex-quadratic instance:
/// constraint coefficients become the parameters and the objective center is
/// `c = -a_star`, so the objective gradient at the origin is `a_star`.
pub fn build_normal_form(jet: &JetPoint) -> Result<NormalFormResult> {
    jet.validate()?;
    let n = jet.n();
    let size = ProblemSize {
        n,
        m_le: jet.m_le(),
        m_eq: jet.m_eq(),
        p: (n + 1) * (jet.m_le() + jet.m_eq()),
    };
    let c: Vec<Rational> = jet.a_star.iter().map(|v| -v.clone()).collect();
    let sqp = SqpInstance {
        size,
        c,
        source: ParamSource::Canonical,
    };
    let coords = jet.to_coords();
    let y_bar = coords[..size.p].to_vec();
    let origin = vec![Rational::zero(); n];
    let jet_check = jet_sp(&sqp.to_problem()?, &origin, &y_bar)?;
    Ok(NormalFormResult {
        sqp,
        y_bar,
        jet_check,
    })
}

/// Jacobian of the jet of the canonical instance at `(0, y_bar)`, rows in
/// jet-coordinate order and columns ordered parameters-then-x. The matrix is
/// upper triangular with unit diagonal; the determinant is recomputed by
/// elimination rather than read off the structure.
pub fn normal_form_jacobian(jet: &JetPoint) -> Result<(Vec<Vec<Rational>>, Rational)> {
    jet.validate()?;
    let n = jet.n();
    let m_le = jet.m_le();
    let m_eq = jet.m_eq();
    let p1 = (n + 1) * (m_le + m_eq);
    let dim = p1 + n;
    let mut matrix = vec![vec![Rational::zero(); dim]; dim];

    let gradient_row = |idx: usize| -> &Vec<Rational> {
        if idx < m_le {
            &jet.a[idx]
        } else {
            &jet.b[idx - m_le]
        }
    };
    for idx in 0..m_le + m_eq {
        let start = (n + 1) * idx;
        // Gradient coordinates depend only on their own parameter slots.
        for r in 0..n {
            matrix[start + r][start + r] = Rational::one();
        }
        // The value coordinate depends on its offset slot and, through the
        // inner product with x, on every x variable.
        matrix[start + n][start + n] = Rational::one();
        let grad = gradient_row(idx);
        for r in 0..n {
            matrix[start + n][p1 + r] = grad[r].clone();
        }
    }
    for r in 0..n {
        matrix[p1 + r][p1 + r] = Rational::one();
    }

    let det = linalg::determinant(&matrix);
    Ok((matrix, det))
}

/// Restricts a canonical instance to an affine parameter subspace spanned by
/// `directions` around `base`. The directions must be linearly independent.
pub fn restrict_parameters(
    sqp: &SqpInstance,
    base: Vec<Rational>,
    directions: Vec<Vec<Rational>>,
) -> Result<SqpInstance> {
    sqp.validate()?;
    if !matches!(sqp.source, ParamSource::Canonical) {
        return Err(Error::Precondition(
            "only a canonical instance can be restricted".into(),
        ));
    }
    let p1 = sqp.p1();
    if base.len() != p1 || directions.iter().any(|d| d.len() != p1) {
        return Err(Error::Dimension(
            "base and directions must live in the full coefficient space".into(),
        ));
    }
    if linalg::rank(&directions) != directions.len() {
        return Err(Error::RankDeficient(
            "parameter directions are linearly dependent".into(),
        ));
    }
    let mut size = sqp.size;
    size.p = directions.len();
    Ok(SqpInstance {
        size,
        c: sqp.c.clone(),
        source: ParamSource::Affine { base, directions },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rv(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&v| rat_int(v)).collect()
    }

    /// Cone over a torus-like family: one parametric equality brushing the
    /// origin, pure quadratic objective.
    fn cone_example() -> PolyProblem {
        let x = |k| Poly::x_var(2, 3, k);
        let y = |k| Poly::y_var(2, 3, k);
        let objective = x(0).mul(&x(0)).add(&x(1).mul(&x(1)));
        let equality = x(0).mul(&y(0)).add(&x(1).mul(&y(1))).add(&y(2));
        PolyProblem {
            size: ProblemSize {
                n: 2,
                m_le: 0,
                m_eq: 1,
                p: 3,
            },
            objective,
            inequalities: vec![],
            equalities: vec![equality],
        }
    }

    fn halfspace_qp() -> PolyProblem {
        let x = |k| Poly::x_var(2, 0, k);
        let half = rat(1, 2);
        let shift = x(0).sub(&Poly::constant(2, 0, rat_int(1)));
        let objective = shift
            .mul(&shift)
            .add(&x(1).mul(&x(1)))
            .scale(&half);
        PolyProblem {
            size: ProblemSize {
                n: 2,
                m_le: 1,
                m_eq: 0,
                p: 0,
            },
            objective,
            inequalities: vec![x(0)],
            equalities: vec![],
        }
    }

    #[test]
    fn jet_on_cone_example() {
        let prob = cone_example();
        let vertex = jet_sp(&prob, &rv(&[0, 0]), &rv(&[0, 0, 0])).unwrap();
        assert_eq!(vertex.b, vec![rv(&[0, 0])]);
        assert_eq!(vertex.beta, rv(&[0]));
        assert_eq!(vertex.a_star, rv(&[0, 0]));

        let off = jet_sp(&prob, &rv(&[1, 0]), &rv(&[1, 0, -1])).unwrap();
        assert_eq!(off.b, vec![rv(&[1, 0])]);
        assert_eq!(off.beta, rv(&[0]));
        assert_eq!(off.a_star, rv(&[2, 0]));
    }

    #[test]
    fn jet_of_constant_data_is_constant() {
        let objective = Poly::x_var(1, 2, 0).scale(&rat_int(2));
        let prob = PolyProblem {
            size: ProblemSize {
                n: 1,
                m_le: 1,
                m_eq: 0,
                p: 2,
            },
            objective,
            inequalities: vec![Poly::constant(1, 2, rat_int(-1))],
            equalities: vec![],
        };
        let j1 = jet_sp(&prob, &rv(&[0]), &rv(&[0, 0])).unwrap();
        let j2 = jet_sp(&prob, &rv(&[3]), &rv(&[-2, 5])).unwrap();
        assert_eq!(j1, j2);
        assert_eq!(j1.a, vec![rv(&[0])]);
        assert_eq!(j1.alpha, rv(&[-1]));
        assert_eq!(j1.a_star, rv(&[2]));
    }

    #[test]
    fn jet_mf_is_projection() {
        let prob = cone_example();
        let full = jet_sp(&prob, &rv(&[1, 0]), &rv(&[1, 0, -1])).unwrap();
        let mf = jet_mf(&prob, &rv(&[1, 0]), &rv(&[1, 0, -1])).unwrap();
        assert_eq!(mf.b, full.b);
        assert_eq!(mf.beta, full.beta);

        let x = |k| Poly::x_var(2, 0, k);
        let wedge = PolyProblem {
            size: ProblemSize {
                n: 2,
                m_le: 2,
                m_eq: 0,
                p: 0,
            },
            objective: Poly::zero(2, 0),
            inequalities: vec![x(0).clone(), x(0).neg()],
            equalities: vec![],
        };
        let mf = jet_mf(&wedge, &rv(&[0, 0]), &[]).unwrap();
        assert_eq!(mf.a, vec![rv(&[1, 0]), rv(&[-1, 0])]);
        assert_eq!(mf.alpha, rv(&[0, 0]));
    }

    #[test]
    fn point_code_examples() {
        let cone = cone_example();
        let vertex = point_code(&cone, &rv(&[0, 0]), &rv(&[0, 0, 0])).unwrap();
        assert!(vertex.feasible);
        assert!(vertex.code.is_stationary());
        assert!(vertex.code.mfcq_violated());

        let qp = halfspace_qp();
        let at_wall = point_code(&qp, &rv(&[0, 0]), &[]).unwrap();
        assert!(at_wall.feasible);
        assert!(at_wall.code.is_stationary());
        let expected: std::collections::BTreeSet<_> =
            [crate::problem::IndexPair::new([0, 1], [])].into();
        assert_eq!(at_wall.code.pairs, expected);

        let interior = point_code(&qp, &rv(&[-1, 0]), &[]).unwrap();
        assert!(interior.feasible);
        assert!(interior.code.pairs.is_empty());

        // Same object through either API path.
        let jet = jet_sp(&qp, &rv(&[0, 0]), &[]).unwrap();
        assert_eq!(at_wall.code, compute_code(&jet).unwrap());
    }

    #[test]
    fn closure_membership_needs_feasibility() {
        let cone = cone_example();
        // On the constraint surface with aligned gradients: in the closure.
        assert!(point_in_sp_closure(&cone, &rv(&[1, 0]), &rv(&[1, 0, -1])).unwrap());
        // Off the constraint surface the cone data still degenerates, but
        // the point itself is not feasible.
        assert!(!point_in_sp_closure(&cone, &rv(&[1, 0]), &rv(&[1, 0, 5])).unwrap());
    }

    #[test]
    fn normal_form_small_example() {
        let jet = JetPoint {
            a: vec![rv(&[1, 0])],
            alpha: rv(&[0]),
            b: vec![],
            beta: vec![],
            a_star: rv(&[0, 1]),
        };
        let nf = build_normal_form(&jet).unwrap();
        assert_eq!(nf.sqp.c, rv(&[0, -1]));
        assert_eq!(nf.y_bar, rv(&[1, 0, 0]));
        assert_eq!(nf.jet_check, jet);
    }

    #[test]
    fn normal_form_on_cone_vertex() {
        let prob = cone_example();
        let jet = jet_sp(&prob, &rv(&[0, 0]), &rv(&[0, 0, 0])).unwrap();
        let nf = build_normal_form(&jet).unwrap();
        assert_eq!(nf.sqp.size.n, 2);
        assert_eq!(nf.sqp.size.m_le, 0);
        assert_eq!(nf.sqp.size.m_eq, 1);
        assert_eq!(nf.sqp.size.p, 3);
        assert_eq!(nf.jet_check, jet);
    }

    #[test]
    fn normal_form_of_zero_jet() {
        let jet = JetPoint {
            a: vec![rv(&[0])],
            alpha: rv(&[0]),
            b: vec![],
            beta: vec![],
            a_star: rv(&[0]),
        };
        let nf = build_normal_form(&jet).unwrap();
        assert_eq!(nf.sqp.c, rv(&[0]));
        assert_eq!(nf.y_bar, rv(&[0, 0]));
        assert_eq!(nf.jet_check, jet);
    }

    #[test]
    fn jacobian_is_unitriangular() {
        let jet = JetPoint {
            a: vec![rv(&[5])],
            alpha: rv(&[-2]),
            b: vec![],
            beta: vec![],
            a_star: rv(&[7]),
        };
        let (matrix, det) = normal_form_jacobian(&jet).unwrap();
        assert_eq!(matrix.len(), 3);
        assert_eq!(det, rat_int(1));
        for (r, row) in matrix.iter().enumerate() {
            assert_eq!(row[r], rat_int(1));
            for entry in &row[..r] {
                assert!(entry.is_zero());
            }
        }
        // The constraint-value row responds to x through the gradient.
        assert_eq!(matrix[1][2], rat_int(5));
    }

    #[test]
    fn zero_jet_jacobian_is_identity() {
        let jet = JetPoint {
            a: vec![rv(&[0, 0])],
            alpha: rv(&[0]),
            b: vec![rv(&[0, 0])],
            beta: rv(&[0]),
            a_star: rv(&[0, 0]),
        };
        let (matrix, det) = normal_form_jacobian(&jet).unwrap();
        assert_eq!(det, rat_int(1));
        for (r, row) in matrix.iter().enumerate() {
            for (c, entry) in row.iter().enumerate() {
                assert_eq!(entry, &if r == c { rat_int(1) } else { rat_int(0) });
            }
        }
    }

    fn random_jet(rng: &mut ChaCha8Rng) -> JetPoint {
        let n = rng.gen_range(1..=3);
        let m_le = rng.gen_range(0..=3);
        let m_eq = rng.gen_range(0..=2);
        let coeff = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        let vector = |rng: &mut ChaCha8Rng| -> Vec<Rational> {
            (0..n).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect()
        };
        JetPoint {
            a: (0..m_le).map(|_| vector(rng)).collect(),
            alpha: (0..m_le).map(|_| coeff(rng)).collect(),
            b: (0..m_eq).map(|_| vector(rng)).collect(),
            beta: (0..m_eq).map(|_| coeff(rng)).collect(),
            a_star: vector(rng),
        }
    }

    #[test]
    fn random_round_trips_and_determinants() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..60 {
            let jet = random_jet(&mut rng);
            let nf = build_normal_form(&jet).unwrap();
            assert_eq!(nf.jet_check, jet);
            let (_, det) = normal_form_jacobian(&jet).unwrap();
            assert_eq!(det, rat_int(1));

            // The direct jet and the polynomial-rendered jet agree off the
            // base point as well.
            let x = vec![rat_int(1); jet.n()];
            let direct = nf.sqp.jet_at(&x, &nf.y_bar).unwrap();
            let rendered = jet_sp(&nf.sqp.to_problem().unwrap(), &x, &nf.y_bar).unwrap();
            assert_eq!(direct, rendered);
        }
    }

    #[test]
    fn restriction_examples() {
        let jet = JetPoint {
            a: vec![rv(&[1, 0])],
            alpha: rv(&[0]),
            b: vec![],
            beta: vec![],
            a_star: rv(&[0, 1]),
        };
        let nf = build_normal_form(&jet).unwrap();

        // Identity restriction behaves like the canonical instance.
        let p1 = nf.sqp.p1();
        let identity: Vec<Vec<Rational>> = (0..p1)
            .map(|k| {
                (0..p1)
                    .map(|s| if s == k { rat_int(1) } else { rat_int(0) })
                    .collect()
            })
            .collect();
        let same = restrict_parameters(&nf.sqp, vec![rat_int(0); p1], identity).unwrap();
        let y = rv(&[2, -1, 3]);
        assert_eq!(
            same.constraints_at(&y).unwrap(),
            nf.sqp.constraints_at(&y).unwrap()
        );

        // A line moving only the constraint offset slides the wall along its
        // own gradient.
        let mut dir = vec![rat_int(0); p1];
        dir[2] = rat_int(1);
        let line = restrict_parameters(&nf.sqp, nf.y_bar.clone(), vec![dir]).unwrap();
        let shifted = line.constraints_at(&rv(&[4])).unwrap();
        assert_eq!(shifted.a, vec![rv(&[1, 0])]);
        assert_eq!(shifted.alpha, rv(&[4]));

        // Dependent directions are refused.
        let dup = vec![
            vec![rat_int(1), rat_int(0), rat_int(0)],
            vec![rat_int(2), rat_int(0), rat_int(0)],
        ];
        assert!(restrict_parameters(&nf.sqp, vec![rat_int(0); p1], dup).is_err());

        // Restricting an already-restricted instance is refused.
        assert!(restrict_parameters(&line, vec![rat_int(0); p1], vec![]).is_err());
    }
}
