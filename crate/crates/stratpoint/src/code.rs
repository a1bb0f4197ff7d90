//! Active sets, multiplier cones, and the combinatorial code of a jet point.
//!
//! The code of a jet collects the minimal index pairs `(I, J)` that support a
//! vanishing combination of constraint gradients (with the objective gradient
//! standing in under the index `m*`). Pairs containing `m*` certify
//! stationarity; pairs without it certify that MFCQ fails.

use crate::error::{Error, Result};
use crate::lp::{lp_feasible, lp_solve, LpProblem, LpStatus};
use crate::problem::{CombinatorialCode, IndexPair, JetPoint, MfJetPoint};
use crate::rational::Rational;
use num::{One, Signed, Zero};
use std::collections::BTreeSet;

/// Indices of the active inequalities `{i : α_i = 0}`, or `None` when some
/// `α_i > 0` (the point violates an inequality outright, so no multiplier
/// data applies and the code is empty).
pub fn active_set(jet: &JetPoint) -> Option<BTreeSet<usize>> {
    if !jet.alpha_feasible() {
        return None;
    }
    Some(
        jet.alpha
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_zero())
            .map(|(i, _)| i)
            .collect(),
    )
}

/// Gradient addressed by a pair index: real inequalities first, with the
/// objective gradient under the index `m_le`.
fn gradient<'a>(jet: &'a JetPoint, idx: usize) -> &'a [Rational] {
    if idx == jet.m_le() {
        &jet.a_star
    } else {
        &jet.a[idx]
    }
}

fn check_pair_indices(jet: &JetPoint, pair: &IndexPair) -> Result<()> {
    let m_star = jet.m_le();
    for &i in &pair.i {
        if i > m_star {
            return Err(Error::IndexOutOfRange(format!(
                "inequality index {} exceeds the objective index {}",
                i, m_star
            )));
        }
        if i < m_star && !jet.alpha[i].is_zero() {
            return Err(Error::Precondition(format!(
                "inequality {} is not active (value {})",
                i + 1,
                jet.alpha[i]
            )));
        }
    }
    for &j in &pair.j {
        if j >= jet.m_eq() {
            return Err(Error::IndexOutOfRange(format!(
                "equality index {} out of range for {} equalities",
                j,
                jet.m_eq()
            )));
        }
    }
    Ok(())
}

/// One sign-restricted query against the multiplier cone of a jet: over
/// `Σ μ_i a_i + Σ λ_j b_j = 0` (with `a_{m*} := a_star`) and the signs of the
/// `λ_j` fixed, how large can the smallest multiplier be pushed?
#[derive(Debug, Clone)]
pub struct ConeQuery<'a> {
    pub jet: &'a JetPoint,
    pub i: BTreeSet<usize>,
    pub j: BTreeSet<usize>,
    /// One sign (`+1` or `-1`) per element of `j`, in ascending index order.
    pub sign_pattern: Vec<i8>,
}

impl ConeQuery<'_> {
    /// Optimal value of: maximize `t` subject to the multiplier relation,
    /// `μ_i ≥ t`, `s_j λ_j ≥ t`, and the normalization `Σμ + Σ s_j λ_j = 1`.
    /// Returns `None` when even the normalized system is infeasible. A
    /// strictly positive margin is exactly a certificate that all `μ_i` can
    /// be made positive and all `λ_j` nonzero with the prescribed signs.
    pub fn margin(&self) -> Result<Option<Rational>> {
        self.jet.validate()?;
        let pair = IndexPair {
            i: self.i.clone(),
            j: self.j.clone(),
        };
        if pair.is_empty() {
            return Err(Error::Precondition("empty index pair".into()));
        }
        if self.sign_pattern.len() != self.j.len()
            || self.sign_pattern.iter().any(|s| *s != 1 && *s != -1)
        {
            return Err(Error::Precondition(
                "sign pattern must hold one of +1/-1 per equality index".into(),
            ));
        }
        check_pair_indices(self.jet, &pair)?;

        let n = self.jet.n();
        let i_list: Vec<usize> = self.i.iter().copied().collect();
        let j_list: Vec<usize> = self.j.iter().copied().collect();
        // Variables: one μ per i, one λ per j, then t.
        let vars = i_list.len() + j_list.len() + 1;
        let t_col = vars - 1;
        let signs: Vec<Rational> = self
            .sign_pattern
            .iter()
            .map(|s| Rational::from_integer((*s as i64).into()))
            .collect();

        let mut eq = Vec::with_capacity(n + 1);
        for r in 0..n {
            let mut row = vec![Rational::zero(); vars];
            for (c, &i) in i_list.iter().enumerate() {
                row[c] = gradient(self.jet, i)[r].clone();
            }
            for (c, &j) in j_list.iter().enumerate() {
                row[i_list.len() + c] = self.jet.b[j][r].clone();
            }
            eq.push((row, Rational::zero()));
        }
        let mut norm = vec![Rational::zero(); vars];
        for c in 0..i_list.len() {
            norm[c] = Rational::one();
        }
        for (c, s) in signs.iter().enumerate() {
            norm[i_list.len() + c] = s.clone();
        }
        eq.push((norm, Rational::one()));

        let mut ineq = Vec::with_capacity(vars - 1);
        for c in 0..i_list.len() {
            let mut row = vec![Rational::zero(); vars];
            row[t_col] = Rational::one();
            row[c] = -Rational::one();
            ineq.push((row, Rational::zero()));
        }
        for (c, s) in signs.iter().enumerate() {
            let mut row = vec![Rational::zero(); vars];
            row[t_col] = Rational::one();
            row[i_list.len() + c] = -s.clone();
            ineq.push((row, Rational::zero()));
        }

        let mut objective = vec![Rational::zero(); vars];
        objective[t_col] = Rational::one();
        let result = lp_solve(&LpProblem {
            var_count: vars,
            objective,
            eq,
            ineq,
        })?;
        match result.status {
            LpStatus::Optimal => Ok(result.value),
            LpStatus::Infeasible => Ok(None),
            // The normalization bounds t above by 1/(|I|+|J|).
            LpStatus::Unbounded => Err(Error::Precondition(
                "cone query cannot be unbounded under normalization".into(),
            )),
        }
    }
}

fn sign_patterns(len: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1usize << len).map(move |mask| {
        (0..len)
            .map(|k| if mask >> k & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

/// Does the pair `(I, J)` support multipliers `μ_i > 0` (for `i ∈ I`, with
/// `a_{m*} := a_star`) and `λ_j ≠ 0` (for `j ∈ J`) whose gradient combination
/// vanishes? Decided by one margin query per sign pattern of the `λ_j`.
pub fn pair_qualifies(jet: &JetPoint, pair: &IndexPair) -> Result<bool> {
    jet.validate()?;
    if pair.is_empty() {
        return Err(Error::Precondition("empty index pair".into()));
    }
    check_pair_indices(jet, pair)?;
    if pair.j.len() >= usize::BITS as usize - 1 {
        return Err(Error::Precondition(
            "too many equality indices for sign-pattern enumeration".into(),
        ));
    }
    for pattern in sign_patterns(pair.j.len()) {
        let query = ConeQuery {
            jet,
            i: pair.i.clone(),
            j: pair.j.clone(),
            sign_pattern: pattern,
        };
        if let Some(t) = query.margin()? {
            if t.is_positive() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn subsets(universe: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::with_capacity(1 << universe.len());
    for mask in 0..1usize << universe.len() {
        out.push(
            universe
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &v)| v)
                .collect(),
        );
    }
    out
}

fn enumeration_budget(jet: &JetPoint, active: &BTreeSet<usize>) -> Result<()> {
    if active.len() + 1 + jet.m_eq() >= 24 {
        return Err(Error::Precondition(
            "too many active constraints for exhaustive pair enumeration".into(),
        ));
    }
    Ok(())
}

/// The combinatorial code of a jet: its active set together with every
/// minimal qualifying pair, found by enumerating candidates in ascending
/// total size and skipping anything that already contains a kept pair.
/// Jets violating an inequality get the empty code.
pub fn compute_code(jet: &JetPoint) -> Result<CombinatorialCode> {
    jet.validate()?;
    let m_star = jet.m_le();
    let Some(i0) = active_set(jet) else {
        return Ok(CombinatorialCode::empty(m_star));
    };
    enumeration_budget(jet, &i0)?;

    let mut i_universe: Vec<usize> = i0.iter().copied().collect();
    i_universe.push(m_star);
    let j_universe: Vec<usize> = (0..jet.m_eq()).collect();

    let mut candidates = Vec::new();
    for i_set in subsets(&i_universe) {
        for j_set in subsets(&j_universe) {
            let pair = IndexPair {
                i: i_set.clone(),
                j: j_set,
            };
            if !pair.is_empty() {
                candidates.push(pair);
            }
        }
    }
    candidates.sort_by(|x, y| x.card().cmp(&y.card()).then_with(|| x.cmp(y)));

    let mut kept: Vec<IndexPair> = Vec::new();
    for cand in candidates {
        if kept.iter().any(|k| k.le(&cand)) {
            continue;
        }
        if pair_qualifies(jet, &cand)? {
            kept.push(cand);
        }
    }
    Ok(CombinatorialCode {
        m_star,
        i0,
        pairs: kept.into_iter().collect(),
    })
}

/// Code of a bare constraint system, with no objective in play. The pair
/// universe is the active inequalities and the equalities only, so every
/// reported pair is a constraint-side degeneracy certificate. The `m_star`
/// field of the result is set to the inequality count, one past the last
/// usable index, and never appears in a pair.
pub fn compute_mf_code(jet: &MfJetPoint) -> Result<CombinatorialCode> {
    jet.validate()?;
    let m_star = jet.m_le();
    let shim = JetPoint {
        a: jet.a.clone(),
        alpha: jet.alpha.clone(),
        b: jet.b.clone(),
        beta: jet.beta.clone(),
        a_star: vec![Rational::zero(); jet.n()],
    };
    let Some(i0) = active_set(&shim) else {
        return Ok(CombinatorialCode::empty(m_star));
    };
    enumeration_budget(&shim, &i0)?;

    let i_universe: Vec<usize> = i0.iter().copied().collect();
    let j_universe: Vec<usize> = (0..jet.m_eq()).collect();

    let mut candidates = Vec::new();
    for i_set in subsets(&i_universe) {
        for j_set in subsets(&j_universe) {
            let pair = IndexPair {
                i: i_set.clone(),
                j: j_set,
            };
            if !pair.is_empty() {
                candidates.push(pair);
            }
        }
    }
    candidates.sort_by(|x, y| x.card().cmp(&y.card()).then_with(|| x.cmp(y)));

    let mut kept: Vec<IndexPair> = Vec::new();
    for cand in candidates {
        if kept.iter().any(|k| k.le(&cand)) {
            continue;
        }
        if pair_qualifies(&shim, &cand)? {
            kept.push(cand);
        }
    }
    Ok(CombinatorialCode {
        m_star,
        i0,
        pairs: kept.into_iter().collect(),
    })
}

/// Can a nonnegative combination of active gradients absorb the objective
/// gradient? True exactly when the code contains a pair through `m*`.
pub fn is_stationary(jet: &JetPoint) -> Result<bool> {
    jet.validate()?;
    let Some(i0) = active_set(jet) else {
        return Ok(false);
    };
    let i_list: Vec<usize> = i0.iter().copied().collect();
    let m_eq = jet.m_eq();
    let vars = i_list.len() + m_eq;
    if vars == 0 {
        return Ok(jet.a_star.iter().all(|v| v.is_zero()));
    }
    let n = jet.n();
    let mut eq = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = vec![Rational::zero(); vars];
        for (c, &i) in i_list.iter().enumerate() {
            row[c] = jet.a[i][r].clone();
        }
        for j in 0..m_eq {
            row[i_list.len() + j] = jet.b[j][r].clone();
        }
        eq.push((row, -jet.a_star[r].clone()));
    }
    let mut ineq = Vec::with_capacity(i_list.len());
    for c in 0..i_list.len() {
        let mut row = vec![Rational::zero(); vars];
        row[c] = -Rational::one();
        ineq.push((row, Rational::zero()));
    }
    let result = lp_feasible(vars, eq, ineq)?;
    Ok(result.status == LpStatus::Optimal)
}

/// Shared kernel for the normalized cone-membership tests: is there a
/// combination with `μ ≥ 0` over `mu_indices` (objective gradient included
/// when `with_star`), `λ` free over all equalities, not all zero, summing to
/// the zero vector? Nonvanishing is enforced through the normalization
/// `Σμ + Σ|λ| = 1`, one feasibility query per sign pattern of `λ`.
fn normalized_cone_feasible(jet: &JetPoint, with_star: bool) -> Result<bool> {
    let Some(i0) = active_set(jet) else {
        return Ok(false);
    };
    let mut mu_indices: Vec<usize> = i0.iter().copied().collect();
    if with_star {
        mu_indices.push(jet.m_le());
    }
    let m_eq = jet.m_eq();
    if m_eq >= usize::BITS as usize - 1 {
        return Err(Error::Precondition(
            "too many equalities for sign-pattern enumeration".into(),
        ));
    }
    let vars = mu_indices.len() + m_eq;
    if vars == 0 {
        return Ok(false);
    }
    let n = jet.n();
    for pattern in sign_patterns(m_eq) {
        let signs: Vec<Rational> = pattern
            .iter()
            .map(|s| Rational::from_integer((*s as i64).into()))
            .collect();
        let mut eq = Vec::with_capacity(n + 1);
        for r in 0..n {
            let mut row = vec![Rational::zero(); vars];
            for (c, &i) in mu_indices.iter().enumerate() {
                row[c] = gradient(jet, i)[r].clone();
            }
            for j in 0..m_eq {
                row[mu_indices.len() + j] = jet.b[j][r].clone();
            }
            eq.push((row, Rational::zero()));
        }
        let mut norm = vec![Rational::zero(); vars];
        for c in 0..mu_indices.len() {
            norm[c] = Rational::one();
        }
        for (j, s) in signs.iter().enumerate() {
            norm[mu_indices.len() + j] = s.clone();
        }
        eq.push((norm, Rational::one()));

        let mut ineq = Vec::with_capacity(vars);
        for c in 0..mu_indices.len() {
            let mut row = vec![Rational::zero(); vars];
            row[c] = -Rational::one();
            ineq.push((row, Rational::zero()));
        }
        for (j, s) in signs.iter().enumerate() {
            let mut row = vec![Rational::zero(); vars];
            row[mu_indices.len() + j] = -s.clone();
            ineq.push((row, Rational::zero()));
        }
        if lp_feasible(vars, eq, ineq)?.status == LpStatus::Optimal {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Does some nonzero combination of active inequality gradients (with
/// nonnegative weights) and equality gradients vanish? True exactly when the
/// code contains a pair avoiding `m*`.
pub fn mfcq_violated(jet: &JetPoint) -> Result<bool> {
    jet.validate()?;
    normalized_cone_feasible(jet, false)
}

/// Membership in the closed multiplier cone: some nonzero normalized
/// combination, objective gradient allowed with nonnegative weight, vanishes.
/// Equivalent to `is_stationary ∨ mfcq_violated`.
pub fn in_closure(jet: &JetPoint) -> Result<bool> {
    jet.validate()?;
    normalized_cone_feasible(jet, true)
}

/// Pushes a jet sitting in the MFCQ-violation locus (but not stationary)
/// toward the stationary locus: every gradient named by `pair` has
/// `step · a_star` subtracted. Constraint values are untouched, so the active
/// set is preserved.
pub fn perturb_toward_sp(jet: &JetPoint, pair: &IndexPair, step: &Rational) -> Result<JetPoint> {
    jet.validate()?;
    if step.is_negative() {
        return Err(Error::Precondition("step must be nonnegative".into()));
    }
    if !mfcq_violated(jet)? || is_stationary(jet)? {
        return Err(Error::Precondition(
            "jet must violate MFCQ and not be stationary".into(),
        ));
    }
    let code = compute_code(jet)?;
    if !code.mf_pairs().any(|p| p == pair) {
        return Err(Error::Precondition(
            "pair is not a minimal MFCQ-violation pair of this jet".into(),
        ));
    }
    let mut out = jet.clone();
    for &i in &pair.i {
        for r in 0..jet.n() {
            out.a[i][r] -= step * &jet.a_star[r];
        }
    }
    for &j in &pair.j {
        for r in 0..jet.n() {
            out.b[j][r] -= step * &jet.a_star[r];
        }
    }
    Ok(out)
}

/// Is there a strictly positive `v` with `M v = 0` and `Σv = 1`, where the
/// columns of `M` are the given gradients? Decided without any simplex:
/// every basic point of the normalized polytope is enumerated by solving the
/// square-ish subsystems directly, and strict positivity holds exactly when
/// each coordinate is positive at some basic point (averaging the witnesses).
fn strictly_positive_combination(columns: &[Vec<Rational>], n: usize) -> bool {
    let k = columns.len();
    if k == 0 {
        return false;
    }
    let mut rows = vec![vec![Rational::zero(); k]; n + 1];
    for (c, col) in columns.iter().enumerate() {
        for r in 0..n {
            rows[r][c] = col[r].clone();
        }
        rows[n][c] = Rational::one();
    }
    let mut rhs = vec![Rational::zero(); n + 1];
    rhs[n] = Rational::one();

    let mut positive_seen = vec![false; k];
    let mut any_point = false;
    for mask in 1..1usize << k {
        let cols: Vec<usize> = (0..k).filter(|c| mask >> c & 1 == 1).collect();
        let sub: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let Some(v) = crate::linalg::solve(&sub, &rhs) else {
            continue;
        };
        if v.iter().any(|x| x.is_negative()) {
            continue;
        }
        any_point = true;
        for (slot, &c) in cols.iter().enumerate() {
            if v[slot].is_positive() {
                positive_seen[c] = true;
            }
        }
    }
    any_point && positive_seen.iter().all(|&p| p)
}

/// Independent oracle for [`compute_code`]: every pair and every sign pattern
/// is tried, strict feasibility is decided by exhausting basic points of the
/// normalized polytope, and minimality is applied as a final filter. Only
/// intended for small jets.
pub fn brute_force_code(jet: &JetPoint) -> Result<CombinatorialCode> {
    jet.validate()?;
    if jet.m_le() + jet.m_eq() > 6 || jet.n() > 4 {
        return Err(Error::Precondition(
            "jet too large for the exhaustive oracle (needs m_le + m_eq <= 6, n <= 4)".into(),
        ));
    }
    let m_star = jet.m_le();
    let Some(i0) = active_set(jet) else {
        return Ok(CombinatorialCode::empty(m_star));
    };
    let n = jet.n();

    let mut i_universe: Vec<usize> = i0.iter().copied().collect();
    i_universe.push(m_star);
    let j_universe: Vec<usize> = (0..jet.m_eq()).collect();

    let mut qualifying: Vec<IndexPair> = Vec::new();
    for i_set in subsets(&i_universe) {
        for j_set in subsets(&j_universe) {
            let pair = IndexPair {
                i: i_set.clone(),
                j: j_set,
            };
            if pair.is_empty() {
                continue;
            }
            let i_list: Vec<usize> = pair.i.iter().copied().collect();
            let j_list: Vec<usize> = pair.j.iter().copied().collect();
            let mut found = false;
            for pattern in sign_patterns(j_list.len()) {
                let mut columns: Vec<Vec<Rational>> = Vec::new();
                for &i in &i_list {
                    columns.push(gradient(jet, i).to_vec());
                }
                for (slot, &j) in j_list.iter().enumerate() {
                    let s = Rational::from_integer((pattern[slot] as i64).into());
                    columns.push(jet.b[j].iter().map(|x| x * &s).collect());
                }
                if strictly_positive_combination(&columns, n) {
                    found = true;
                    break;
                }
            }
            if found {
                qualifying.push(pair);
            }
        }
    }

    let pairs: BTreeSet<IndexPair> = qualifying
        .iter()
        .filter(|p| !qualifying.iter().any(|q| q != *p && q.le(p)))
        .cloned()
        .collect();
    Ok(CombinatorialCode { m_star, i0, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jet(
        a: &[&[i64]],
        alpha: &[i64],
        b: &[&[i64]],
        beta: &[i64],
        a_star: &[i64],
    ) -> JetPoint {
        let row = |r: &&[i64]| r.iter().map(|&x| rat_int(x)).collect::<Vec<_>>();
        JetPoint {
            a: a.iter().map(row).collect(),
            alpha: alpha.iter().map(|&x| rat_int(x)).collect(),
            b: b.iter().map(row).collect(),
            beta: beta.iter().map(|&x| rat_int(x)).collect(),
            a_star: a_star.iter().map(|&x| rat_int(x)).collect(),
        }
    }

    fn pair(i: &[usize], j: &[usize]) -> IndexPair {
        IndexPair::new(i.iter().copied(), j.iter().copied())
    }

    #[test]
    fn active_set_examples() {
        let all_slack = jet(&[&[1], &[2]], &[-1, -1], &[], &[], &[1]);
        assert_eq!(active_set(&all_slack), Some(BTreeSet::new()));

        let two_active = jet(&[&[1], &[2], &[3]], &[0, -2, 0], &[], &[], &[1]);
        assert_eq!(
            active_set(&two_active),
            Some([0usize, 2].into_iter().collect())
        );

        let violated = jet(&[&[1], &[2]], &[1, -1], &[], &[], &[1]);
        assert_eq!(active_set(&violated), None);
    }

    #[test]
    fn pair_qualifies_examples() {
        // Opposing gradients on a line absorb each other with equal weights.
        let opposing = jet(&[&[1]], &[0], &[], &[], &[-1]);
        assert!(pair_qualifies(&opposing, &pair(&[0, 1], &[])).unwrap());

        // A vanishing equality gradient qualifies alone: any λ ≠ 0 works.
        let vertex = jet(&[], &[], &[&[0, 0]], &[0], &[0, 0]);
        assert!(pair_qualifies(&vertex, &pair(&[], &[0])).unwrap());

        // A single nonzero inequality gradient cannot vanish with μ > 0.
        let lone = jet(&[&[1, 0]], &[0], &[], &[], &[0, 1]);
        assert!(!pair_qualifies(&lone, &pair(&[0], &[])).unwrap());
    }

    #[test]
    fn pair_qualifies_rejects_bad_input() {
        let lone = jet(&[&[1, 0]], &[0], &[], &[], &[0, 1]);
        assert!(pair_qualifies(&lone, &pair(&[], &[])).is_err());
        assert!(pair_qualifies(&lone, &pair(&[], &[3])).is_err());
        assert!(pair_qualifies(&lone, &pair(&[2], &[])).is_err());

        let inactive = jet(&[&[1, 0]], &[-1], &[], &[], &[0, 1]);
        assert!(pair_qualifies(&inactive, &pair(&[0], &[])).is_err());
    }

    #[test]
    fn compute_code_halfline() {
        let j = jet(&[&[1]], &[0], &[], &[], &[-1]);
        let code = compute_code(&j).unwrap();
        assert_eq!(code.i0, [0usize].into_iter().collect::<BTreeSet<_>>());
        assert_eq!(
            code.pairs,
            [pair(&[0, 1], &[])].into_iter().collect::<BTreeSet<_>>()
        );
        assert!(code.is_stationary());
        assert!(!code.mfcq_violated());
        assert!(is_stationary(&j).unwrap());
        assert!(!mfcq_violated(&j).unwrap());
    }

    #[test]
    fn compute_code_cone_vertex() {
        // One equality whose gradient vanishes, objective gradient zero too:
        // both a pure equality pair and the bare objective pair qualify.
        let j = jet(&[], &[], &[&[0, 0]], &[0], &[0, 0]);
        let code = compute_code(&j).unwrap();
        let expected: BTreeSet<IndexPair> =
            [pair(&[], &[0]), pair(&[0], &[])].into_iter().collect();
        assert_eq!(code.pairs, expected);
        assert!(code.is_stationary());
        assert!(code.mfcq_violated());
        assert!(is_stationary(&j).unwrap());
        assert!(mfcq_violated(&j).unwrap());
        assert!(in_closure(&j).unwrap());
    }

    #[test]
    fn compute_code_generic_position() {
        let j = jet(&[&[1, 0]], &[0], &[], &[], &[0, 1]);
        let code = compute_code(&j).unwrap();
        assert!(code.pairs.is_empty());
        assert!(!is_stationary(&j).unwrap());
        assert!(!mfcq_violated(&j).unwrap());
        assert!(!in_closure(&j).unwrap());
    }

    #[test]
    fn infeasible_jet_gets_empty_code() {
        let j = jet(&[&[1], &[1]], &[1, 0], &[], &[], &[1]);
        let code = compute_code(&j).unwrap();
        assert!(code.pairs.is_empty());
        assert!(code.i0.is_empty());
        assert!(!is_stationary(&j).unwrap());
        assert!(!mfcq_violated(&j).unwrap());
        assert!(!in_closure(&j).unwrap());
        let brute = brute_force_code(&j).unwrap();
        assert_eq!(code, brute);
    }

    #[test]
    fn closure_on_opposing_pair() {
        // Two opposing constraint gradients, objective gradient transverse:
        // MFCQ fails, no stationarity, but the closed cone is entered.
        let j = jet(&[&[1, 0], &[-1, 0]], &[0, 0], &[], &[], &[0, 1]);
        assert!(mfcq_violated(&j).unwrap());
        assert!(!is_stationary(&j).unwrap());
        assert!(in_closure(&j).unwrap());
    }

    #[test]
    fn closure_needs_sign_patterns() {
        // One equality gradient independent from the objective gradient. A
        // naive λ = λ⁺ − λ⁻ split would call the normalized system feasible
        // (λ⁺ = λ⁻ = 1/2 sums to one while λ is really zero).
        let j = jet(&[], &[], &[&[1, 0]], &[0], &[0, 1]);
        assert!(!in_closure(&j).unwrap());
        assert!(!mfcq_violated(&j).unwrap());
        assert!(!is_stationary(&j).unwrap());
    }

    #[test]
    fn perturbation_lands_on_stationary_set() {
        let j = jet(&[&[1, 0], &[-1, 0]], &[0, 0], &[], &[], &[0, 1]);
        let mf_pair = pair(&[0, 1], &[]);
        let code = compute_code(&j).unwrap();
        assert!(code.mf_pairs().any(|p| *p == mf_pair));

        for step in [rat(1, 100), rat(1, 1_000_000)] {
            let moved = perturb_toward_sp(&j, &mf_pair, &step).unwrap();
            assert_eq!(moved.a[0][1], -step.clone());
            assert!(is_stationary(&moved).unwrap());
            assert!(compute_code(&moved).unwrap().is_stationary());
        }

        let frozen = perturb_toward_sp(&j, &mf_pair, &rat_int(0)).unwrap();
        assert_eq!(frozen, j);
        assert!(!is_stationary(&frozen).unwrap());
    }

    #[test]
    fn perturbation_rejects_bad_preconditions() {
        let j = jet(&[&[1, 0], &[-1, 0]], &[0, 0], &[], &[], &[0, 1]);
        let mf_pair = pair(&[0, 1], &[]);
        assert!(perturb_toward_sp(&j, &mf_pair, &rat(-1, 2)).is_err());
        assert!(perturb_toward_sp(&j, &pair(&[0], &[]), &rat(1, 2)).is_err());

        let stationary_jet = jet(&[&[1]], &[0], &[], &[], &[-1]);
        assert!(perturb_toward_sp(&stationary_jet, &pair(&[0], &[]), &rat(1, 2)).is_err());
    }

    #[test]
    fn brute_force_mirrors_simple_codes() {
        for j in [
            jet(&[&[1]], &[0], &[], &[], &[-1]),
            jet(&[], &[], &[&[0, 0]], &[0], &[0, 0]),
            jet(&[&[1, 0]], &[0], &[], &[], &[0, 1]),
            jet(&[&[1, 0], &[-1, 0]], &[0, 0], &[], &[], &[0, 1]),
        ] {
            assert_eq!(compute_code(&j).unwrap(), brute_force_code(&j).unwrap());
        }
    }

    #[test]
    fn brute_force_rejects_large_jets() {
        let a: Vec<&[i64]> = vec![&[1]; 7];
        let j = jet(&a, &[0; 7], &[], &[], &[1]);
        assert!(brute_force_code(&j).is_err());
    }

    /// The constraint-only code must coincide with the full code of a shim
    /// jet whose objective gradient is zero, after dropping every pair that
    /// leans on the shim objective. Dropping is exact because a minimal pair
    /// avoiding `m*` cannot be dominated by one through `m*`.
    #[test]
    fn mf_code_matches_starless_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let mut nonempty = 0usize;
        for _ in 0..60 {
            let n = rng.gen_range(1..=3usize);
            let m_le = rng.gen_range(0..=3usize);
            let m_eq = rng.gen_range(0..=2usize);
            let coeff = |rng: &mut ChaCha8Rng| rat_int(rng.gen_range(-2..=2i64));
            let row = |rng: &mut ChaCha8Rng| (0..n).map(|_| coeff(rng)).collect::<Vec<_>>();
            let mf = MfJetPoint {
                a: (0..m_le).map(|_| row(&mut rng)).collect(),
                alpha: (0..m_le)
                    .map(|_| {
                        if rng.gen_bool(0.7) {
                            rat_int(0)
                        } else {
                            rat_int(-rng.gen_range(1..=2i64))
                        }
                    })
                    .collect(),
                b: (0..m_eq).map(|_| row(&mut rng)).collect(),
                beta: vec![rat_int(0); m_eq],
            };
            let shim = JetPoint {
                a: mf.a.clone(),
                alpha: mf.alpha.clone(),
                b: mf.b.clone(),
                beta: mf.beta.clone(),
                a_star: vec![rat_int(0); n],
            };
            let got = compute_mf_code(&mf).unwrap();
            let full = brute_force_code(&shim).unwrap();
            let expected: std::collections::BTreeSet<IndexPair> = full
                .pairs
                .into_iter()
                .filter(|p| !p.i.contains(&m_le))
                .collect();
            assert_eq!(got.i0, full.i0);
            assert_eq!(got.pairs, expected);
            assert_eq!(got.m_star, m_le);
            if !got.pairs.is_empty() {
                nonempty += 1;
            }
        }
        assert!(nonempty >= 8, "want degenerate draws, got {nonempty}");
    }

    fn random_jet(rng: &mut ChaCha8Rng) -> JetPoint {
        let n = rng.gen_range(1..=3);
        let m_le = rng.gen_range(0..=4);
        let m_eq = rng.gen_range(0..=2);
        let mut coeff = |rng: &mut ChaCha8Rng| rat_int(rng.gen_range(-3..=3));
        let vector =
            |rng: &mut ChaCha8Rng, coeff: &mut dyn FnMut(&mut ChaCha8Rng) -> Rational| {
                (0..n).map(|_| coeff(rng)).collect::<Vec<_>>()
            };
        let a: Vec<Vec<Rational>> = (0..m_le).map(|_| vector(rng, &mut coeff)).collect();
        let alpha: Vec<Rational> = (0..m_le)
            .map(|_| match rng.gen_range(0..12) {
                0 => rat_int(1),
                1..=6 => rat_int(0),
                _ => rat_int(-rng.gen_range(1..=3)),
            })
            .collect();
        let b: Vec<Vec<Rational>> = (0..m_eq).map(|_| vector(rng, &mut coeff)).collect();
        let beta = vec![rat_int(0); m_eq];
        let a_star = vector(rng, &mut coeff);
        JetPoint {
            a,
            alpha,
            b,
            beta,
            a_star,
        }
    }

    #[test]
    fn random_jets_agree_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut nonempty = 0usize;
        for trial in 0..80 {
            let j = random_jet(&mut rng);
            let code = compute_code(&j).unwrap();
            let brute = brute_force_code(&j).unwrap();
            assert_eq!(code, brute, "jet {:?}", j);
            if !code.pairs.is_empty() {
                nonempty += 1;
            }

            let sp = is_stationary(&j).unwrap();
            let mf = mfcq_violated(&j).unwrap();
            assert_eq!(sp, code.is_stationary());
            assert_eq!(mf, code.mfcq_violated());
            assert_eq!(in_closure(&j).unwrap(), sp || mf);

            // Minimality: dropping any single index must break qualification.
            for p in &code.pairs {
                for &i in &p.i {
                    let mut smaller = p.clone();
                    smaller.i.remove(&i);
                    if !smaller.is_empty() {
                        assert!(!pair_qualifies(&j, &smaller).unwrap());
                    }
                }
                for &jj in &p.j {
                    let mut smaller = p.clone();
                    smaller.j.remove(&jj);
                    if !smaller.is_empty() {
                        assert!(!pair_qualifies(&j, &smaller).unwrap());
                    }
                }
            }

            if trial % 8 == 0 {
                let scale = rat(3, 2);
                let mut scaled = j.clone();
                for row in scaled.a.iter_mut().chain(scaled.b.iter_mut()) {
                    for x in row.iter_mut() {
                        *x *= &scale;
                    }
                }
                for x in scaled.a_star.iter_mut() {
                    *x *= &scale;
                }
                assert_eq!(compute_code(&scaled).unwrap(), code);
            }
        }
        assert!(nonempty >= 10, "sampler too timid: {}", nonempty);
    }
}
