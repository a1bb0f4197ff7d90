//! Rewrites between stationarity problems and constraint-degeneracy
//! problems, with the exact bookkeeping they induce on combinatorial codes.
//!
//! Each composite rewrite carries a variable map (where sample points go), a
//! code action (how codes are rewritten), and a provenance chain of
//! elementary steps. [`verify_commutation`] checks on concrete sample points
//! that mapping the point and reading first-order data commutes with
//! rewriting the data directly, and that codes travel by the stated action.

use crate::code::{compute_code, compute_mf_code};
use crate::error::{Error, Result};
use crate::jet::{jet_mf, jet_sp};
use crate::poly::Poly;
use crate::problem::{
    CombinatorialCode, IndexPair, JetPoint, MfJetPoint, PolyProblem, ProblemSize,
};
use crate::rational::Rational;
use num::{One, Signed, Zero};

/// How a rewrite changes the active set of a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveSetAction {
    Identity,
    /// The objective turns into one more active inequality: `I0` gains the
    /// old objective index and the objective slot moves one past it.
    AddMStar,
}

/// How a rewrite changes the pair family of a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairAction {
    Identity,
    /// Every pair gains the objective index: `(I, J)` becomes
    /// `(I ∪ {m*}, J)`.
    StarEachPair,
}

/// Exact rewriting of combinatorial codes induced by a transformation. Pure
/// data, applied with [`CodeAction::apply`] and fused with
/// [`CodeAction::compose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeAction {
    pub active: ActiveSetAction,
    pub pairs: PairAction,
}

impl CodeAction {
    pub const IDENTITY: CodeAction = CodeAction {
        active: ActiveSetAction::Identity,
        pairs: PairAction::Identity,
    };

    /// Rewrites one code. The pair rewrite uses the objective index as it
    /// stands after the active-set rewrite.
    pub fn apply(&self, code: &CombinatorialCode) -> CombinatorialCode {
        let mut m_star = code.m_star;
        let mut i0 = code.i0.clone();
        let mut pairs = code.pairs.clone();
        if let ActiveSetAction::AddMStar = self.active {
            i0.insert(code.m_star);
            m_star += 1;
        }
        if let PairAction::StarEachPair = self.pairs {
            pairs = pairs
                .into_iter()
                .map(|p| {
                    let mut i = p.i;
                    i.insert(m_star);
                    IndexPair { i, j: p.j }
                })
                .collect();
        }
        CombinatorialCode { m_star, i0, pairs }
    }

    /// Fuses `self` followed by `then` into one action. Two non-identity
    /// rewrites of the same component cannot be expressed as a single
    /// action, so that combination is rejected.
    pub fn compose(&self, then: &CodeAction) -> Result<CodeAction> {
        let active = match (self.active, then.active) {
            (ActiveSetAction::Identity, a) | (a, ActiveSetAction::Identity) => a,
            _ => {
                return Err(Error::Precondition(
                    "cannot fuse two active-set rewrites into one action".into(),
                ))
            }
        };
        let pairs = match (self.pairs, then.pairs) {
            (PairAction::Identity, a) | (a, PairAction::Identity) => a,
            _ => {
                return Err(Error::Precondition(
                    "cannot fuse two pair rewrites into one action".into(),
                ))
            }
        };
        Ok(CodeAction { active, pairs })
    }
}

/// Polynomial change of variables `(x, y) ↦ (x', y')`. Every output
/// coordinate is a polynomial in the source variables, so mapped points are
/// evaluated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct VarMap {
    pub out_x: Vec<Poly>,
    pub out_y: Vec<Poly>,
}

impl VarMap {
    pub fn apply(&self, x: &[Rational], y: &[Rational]) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let ex = self
            .out_x
            .iter()
            .map(|p| p.eval(x, y))
            .collect::<Result<Vec<_>>>()?;
        let ey = self
            .out_y
            .iter()
            .map(|p| p.eval(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok((ex, ey))
    }
}

/// Parameter pack for the target-space deformation [`phi_deform`]. The
/// domain requires every `a_last` entry negative and `a_star_last` positive;
/// those sign constraints are exactly what keeps multiplier systems intact.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiParams {
    /// Last coordinate given to each deformed inequality gradient.
    pub a_last: Vec<Rational>,
    /// Last coordinate given to the deformed objective gradient.
    pub a_star_last: Rational,
    /// Shear mixing the old coordinates into the new gradients.
    pub v: Vec<Rational>,
}

impl PhiParams {
    /// The pack at which the deformation reduces to the plain recombination
    /// [`t2_target`].
    pub fn standard(m_le: usize, n: usize) -> Self {
        PhiParams {
            a_last: vec![-Rational::one(); m_le],
            a_star_last: Rational::one(),
            v: vec![Rational::zero(); n],
        }
    }

    pub fn in_domain(&self) -> bool {
        self.a_last.iter().all(|c| c.is_negative()) && self.a_star_last.is_positive()
    }
}

/// One building block of a composite rewrite.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementaryTransform {
    /// Appends a decision variable carrying the value of an inducing
    /// function, negated when `positive` is false. Only the positive variant
    /// is produced by the rewrites in this module.
    ExtendPrimal { inducing: Vec<Poly>, positive: bool },
    /// Appends a parameter carrying the value of an inducing function.
    ExtendParameter { inducing: Vec<Poly>, positive: bool },
    /// Rewrites jet coordinates by the fixed recombination, recorded as the
    /// deformation pack at which the general deformation degenerates to it.
    RecombineTarget { at: PhiParams },
    /// Rewrites jet coordinates by the deformation at a chosen pack.
    DeformTarget { params: PhiParams },
}

/// One provenance entry: a building block and the code rewriting it
/// induces. Chains store entries in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProvenanceStep {
    pub transform: ElementaryTransform,
    pub action: CodeAction,
}

/// Direction of a composite rewrite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// Stationary points of the source become constraint degeneracies of
    /// the image.
    SpToMf,
    /// Constraint degeneracies of the source become stationary points of
    /// the image.
    MfToSp,
}

/// A source problem with its rewritten image and everything needed to check
/// that codes travel correctly.
#[derive(Debug, Clone)]
pub struct TransformedProblem {
    pub kind: TransformKind,
    pub source: PolyProblem,
    pub problem: PolyProblem,
    pub var_map: VarMap,
    pub code_action: CodeAction,
    pub provenance: Vec<ProvenanceStep>,
}

/// Image of one inequality under the slack rewrite.
#[derive(Debug, Clone)]
pub struct SlackTransform {
    /// The fresh variable itself; its nonnegativity replaces `f ≥ 0`.
    pub nonneg: Poly,
    /// `x_{n+1} - f`, pinning the fresh variable to the function value.
    pub tie: Poly,
    pub var_map: VarMap,
    pub provenance: Vec<ProvenanceStep>,
}

/// Splits `f ≥ 0` into `x_{n+1} ≥ 0` and `x_{n+1} - f = 0` with a slack
/// variable carrying the value of `f`. Membership is preserved: `x`
/// satisfies `f(x) ≥ 0` exactly when `(x, f(x))` satisfies the image pair,
/// and the image equality holds at mapped points by construction.
pub fn apply_slack(f: &Poly) -> SlackTransform {
    let n = f.n_x();
    let p = f.n_y();
    let slack = Poly::x_var(n + 1, p, n);
    let out_x: Vec<Poly> = (0..n)
        .map(|i| Poly::x_var(n, p, i))
        .chain([f.clone()])
        .collect();
    let out_y: Vec<Poly> = (0..p).map(|j| Poly::y_var(n, p, j)).collect();
    SlackTransform {
        nonneg: slack.clone(),
        tie: slack.sub(&f.extend(n + 1, p)),
        var_map: VarMap { out_x, out_y },
        provenance: vec![ProvenanceStep {
            transform: ElementaryTransform::ExtendPrimal {
                inducing: vec![f.clone()],
                positive: true,
            },
            action: CodeAction::IDENTITY,
        }],
    }
}

fn require_well_formed(prob: &PolyProblem) -> Result<()> {
    let report = prob.validate();
    if report.ok() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "malformed problem: {}",
            report.failures.join("; ")
        )))
    }
}

/// Rewrites a stationarity problem as a constraint-degeneracy problem. The
/// objective is traded for one more inequality `f - y_{p+1} ≤ 0` and one
/// more parameter carrying the objective value. Along the variable map the
/// new inequality is active with the old objective gradient, so the active
/// set gains the old objective index while the pair family is untouched.
///
/// The image is a bare constraint system; its stored objective is the zero
/// polynomial and plays no role.
pub fn sp2mf(prob: &PolyProblem) -> Result<TransformedProblem> {
    require_well_formed(prob)?;
    let ProblemSize { n, m_le, m_eq, p } = prob.size;
    let mut inequalities: Vec<Poly> = prob
        .inequalities
        .iter()
        .map(|g| g.extend(n, p + 1))
        .collect();
    inequalities.push(
        prob.objective
            .extend(n, p + 1)
            .sub(&Poly::y_var(n, p + 1, p)),
    );
    let equalities: Vec<Poly> = prob.equalities.iter().map(|h| h.extend(n, p + 1)).collect();
    let problem = PolyProblem {
        size: ProblemSize {
            n,
            m_le: m_le + 1,
            m_eq,
            p: p + 1,
        },
        objective: Poly::zero(n, p + 1),
        inequalities,
        equalities,
    };
    let out_x: Vec<Poly> = (0..n).map(|i| Poly::x_var(n, p, i)).collect();
    let out_y: Vec<Poly> = (0..p)
        .map(|j| Poly::y_var(n, p, j))
        .chain([prob.objective.clone()])
        .collect();
    let action = CodeAction {
        active: ActiveSetAction::AddMStar,
        pairs: PairAction::Identity,
    };
    Ok(TransformedProblem {
        kind: TransformKind::SpToMf,
        source: prob.clone(),
        problem,
        var_map: VarMap { out_x, out_y },
        code_action: action,
        provenance: vec![ProvenanceStep {
            transform: ElementaryTransform::ExtendParameter {
                inducing: vec![prob.objective.clone()],
                positive: true,
            },
            action,
        }],
    })
}

/// Rewrites a constraint-degeneracy problem (inequalities only) as a
/// stationarity problem in one more variable: minimize the fresh variable
/// `x_{n+1}` subject to `g_i - x_{n+1} ≤ 0`. Degeneracy certificates become
/// stationarity certificates, so every pair gains the objective index while
/// the active set is untouched.
///
/// The source objective is ignored; only the inequalities matter. The fresh
/// variable enters with positive sign, covering the descent side of the
/// construction; the mirrored variant is not provided. Equality constraints
/// and empty inequality systems are rejected.
pub fn mf2sp(prob: &PolyProblem) -> Result<TransformedProblem> {
    require_well_formed(prob)?;
    if prob.size.m_eq != 0 {
        return Err(Error::Precondition(
            "the stationarity rewrite needs an inequality-only source".into(),
        ));
    }
    if prob.size.m_le == 0 {
        return Err(Error::Precondition(
            "the stationarity rewrite needs at least one inequality".into(),
        ));
    }
    let ProblemSize { n, m_le, p, .. } = prob.size;
    let slack = Poly::x_var(n + 1, p, n);
    let inequalities: Vec<Poly> = prob
        .inequalities
        .iter()
        .map(|g| g.extend(n + 1, p).sub(&slack))
        .collect();
    let problem = PolyProblem {
        size: ProblemSize {
            n: n + 1,
            m_le,
            m_eq: 0,
            p,
        },
        objective: slack,
        inequalities,
        equalities: Vec::new(),
    };
    let out_x: Vec<Poly> = (0..n)
        .map(|i| Poly::x_var(n, p, i))
        .chain([Poly::zero(n, p)])
        .collect();
    let out_y: Vec<Poly> = (0..p).map(|j| Poly::y_var(n, p, j)).collect();
    let action = CodeAction {
        active: ActiveSetAction::Identity,
        pairs: PairAction::StarEachPair,
    };
    let standard = PhiParams::standard(m_le, n);
    Ok(TransformedProblem {
        kind: TransformKind::MfToSp,
        source: prob.clone(),
        problem,
        var_map: VarMap { out_x, out_y },
        code_action: action,
        provenance: vec![
            ProvenanceStep {
                transform: ElementaryTransform::RecombineTarget {
                    at: standard.clone(),
                },
                action,
            },
            ProvenanceStep {
                transform: ElementaryTransform::DeformTarget { params: standard },
                action: CodeAction::IDENTITY,
            },
            ProvenanceStep {
                transform: ElementaryTransform::ExtendPrimal {
                    inducing: prob.inequalities.clone(),
                    positive: true,
                },
                action: CodeAction::IDENTITY,
            },
        ],
    })
}

/// The plain recombination sending a constraint-side jet to a
/// stationarity-side jet in one more variable: each inequality gradient is
/// extended by `-1` and the objective gradient is the fresh coordinate
/// axis. Equals [`phi_deform`] at the standard pack.
pub fn t2_target(jet: &MfJetPoint) -> Result<JetPoint> {
    jet.validate()?;
    if jet.m_eq() != 0 {
        return Err(Error::Precondition(
            "the recombination applies to inequality-only jets".into(),
        ));
    }
    let n = jet.n();
    let a = jet
        .a
        .iter()
        .map(|row| {
            let mut out = row.clone();
            out.push(-Rational::one());
            out
        })
        .collect();
    let mut a_star = vec![Rational::zero(); n];
    a_star.push(Rational::one());
    Ok(JetPoint {
        a,
        alpha: jet.alpha.clone(),
        b: Vec::new(),
        beta: Vec::new(),
        a_star,
    })
}

/// Deforms a constraint-side jet into a stationarity-side jet in one more
/// variable. Inequality gradient `i` becomes `a_last[i] · (v - a_i)`
/// extended by `a_last[i]`, and the objective gradient becomes
/// `a_star_last · v` extended by `a_star_last`. On the domain of the pack
/// the image carries the same combinatorial code as [`t2_target`]: the sign
/// constraints let positive multipliers absorb the scale factors, and the
/// last coordinate forces the objective into every surviving pair.
pub fn phi_deform(jet: &MfJetPoint, q: &PhiParams) -> Result<JetPoint> {
    jet.validate()?;
    if jet.m_eq() != 0 {
        return Err(Error::Precondition(
            "the deformation applies to inequality-only jets".into(),
        ));
    }
    if q.a_last.len() != jet.m_le() || q.v.len() != jet.n() {
        return Err(Error::Dimension(
            "deformation pack does not fit the jet".into(),
        ));
    }
    if !q.in_domain() {
        return Err(Error::Precondition(
            "deformation pack outside its domain: a_last entries must be negative and a_star_last positive".into(),
        ));
    }
    let mut a = Vec::with_capacity(jet.m_le());
    for (row, c) in jet.a.iter().zip(&q.a_last) {
        let mut out = Vec::with_capacity(jet.n() + 1);
        for (ar, vr) in row.iter().zip(&q.v) {
            out.push(c * &(vr - ar));
        }
        out.push(c.clone());
        a.push(out);
    }
    let mut a_star: Vec<Rational> = q.v.iter().map(|vr| &q.a_star_last * vr).collect();
    a_star.push(q.a_star_last.clone());
    Ok(JetPoint {
        a,
        alpha: jet.alpha.clone(),
        b: Vec::new(),
        beta: Vec::new(),
        a_star,
    })
}

/// Recovers the constraint-side jet and the pack from a deformed jet; the
/// exact inverse of [`phi_deform`]. The image is recognized by its signs:
/// every inequality gradient ends in a negative coordinate and the
/// objective gradient ends in a positive one.
pub fn phi_inverse(jet: &JetPoint) -> Result<(MfJetPoint, PhiParams)> {
    jet.validate()?;
    if jet.m_eq() != 0 {
        return Err(Error::Precondition(
            "the deformation applies to inequality-only jets".into(),
        ));
    }
    let n1 = jet.n();
    if n1 == 0 {
        return Err(Error::Dimension(
            "a deformed jet has at least one variable".into(),
        ));
    }
    let n = n1 - 1;
    let a_star_last = jet.a_star[n].clone();
    if !a_star_last.is_positive() {
        return Err(Error::Precondition(
            "jet outside the deformation image: objective gradient must end positively".into(),
        ));
    }
    let v: Vec<Rational> = jet.a_star[..n].iter().map(|c| c / &a_star_last).collect();
    let mut a = Vec::with_capacity(jet.m_le());
    let mut a_last = Vec::with_capacity(jet.m_le());
    for row in &jet.a {
        let c = row[n].clone();
        if !c.is_negative() {
            return Err(Error::Precondition(
                "jet outside the deformation image: inequality gradients must end negatively"
                    .into(),
            ));
        }
        let orig: Vec<Rational> = row[..n]
            .iter()
            .zip(&v)
            .map(|(e, vr)| vr - &(e / &c))
            .collect();
        a.push(orig);
        a_last.push(c);
    }
    Ok((
        MfJetPoint {
            a,
            alpha: jet.alpha.clone(),
            b: Vec::new(),
            beta: Vec::new(),
        },
        PhiParams {
            a_last,
            a_star_last,
            v,
        },
    ))
}

/// Outcome of checking a rewrite against its claims on sample points.
#[derive(Debug, Clone)]
pub struct CommutationReport {
    pub checked: usize,
    /// One entry per failed check, naming the sample.
    pub failures: Vec<String>,
}

impl CommutationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, at each sample point, that mapping the point and reading
/// first-order data agrees with rewriting the source data directly, and
/// that the image code equals the code action applied to the source code.
///
/// At samples violating the source inequalities both codes are empty by
/// convention; there the action comparison is replaced by checking that the
/// image code is indeed empty.
pub fn verify_commutation(
    t: &TransformedProblem,
    samples: &[(Vec<Rational>, Vec<Rational>)],
) -> Result<CommutationReport> {
    let mut failures = Vec::new();
    for (k, (x, y)) in samples.iter().enumerate() {
        let (x2, y2) = t.var_map.apply(x, y)?;
        match t.kind {
            TransformKind::SpToMf => {
                let source_jet = jet_sp(&t.source, x, y)?;
                let image_jet = jet_mf(&t.problem, &x2, &y2)?;
                let mut a = source_jet.a.clone();
                a.push(source_jet.a_star.clone());
                let mut alpha = source_jet.alpha.clone();
                alpha.push(Rational::zero());
                let expected = MfJetPoint {
                    a,
                    alpha,
                    b: source_jet.b.clone(),
                    beta: source_jet.beta.clone(),
                };
                if image_jet != expected {
                    failures.push(format!(
                        "sample {k}: image jet disagrees with the rewritten source jet"
                    ));
                    continue;
                }
                let image_code = compute_mf_code(&image_jet)?;
                if source_jet.alpha_feasible() {
                    let source_code = compute_code(&source_jet)?;
                    if image_code != t.code_action.apply(&source_code) {
                        failures.push(format!(
                            "sample {k}: image code disagrees with the action on the source code"
                        ));
                    }
                } else if image_code != CombinatorialCode::empty(image_code.m_star) {
                    failures.push(format!(
                        "sample {k}: image code is not empty at an infeasible sample"
                    ));
                }
            }
            TransformKind::MfToSp => {
                let source_jet = jet_mf(&t.source, x, y)?;
                let image_jet = jet_sp(&t.problem, &x2, &y2)?;
                let expected = t2_target(&source_jet)?;
                if image_jet != expected {
                    failures.push(format!(
                        "sample {k}: image jet disagrees with the rewritten source jet"
                    ));
                    continue;
                }
                let source_code = compute_mf_code(&source_jet)?;
                let image_code = compute_code(&image_jet)?;
                if image_code != t.code_action.apply(&source_code) {
                    failures.push(format!(
                        "sample {k}: image code disagrees with the action on the source code"
                    ));
                }
            }
        }
    }
    Ok(CommutationReport {
        checked: samples.len(),
        failures,
    })
}
