//! Exact linear programming over rationals: two-phase primal simplex with
//! Bland's pivoting rule.
//!
//! Variables are free (unrestricted in sign); the solver splits them into
//! nonnegative parts internally. Every pivot is exact, so feasibility and
//! optimality verdicts are decisions, not estimates, and Bland's rule
//! guarantees termination even on degenerate inputs.

use crate::error::{Error, Result};
use crate::rational::Rational;
use num::{One, Signed, Zero};

/// `maximize objective · v` subject to `row · v = rhs` for every `eq` row and
/// `row · v ≤ rhs` for every `ineq` row, with `v` free.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub var_count: usize,
    pub objective: Vec<Rational>,
    pub eq: Vec<(Vec<Rational>, Rational)>,
    pub ineq: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    /// Present when `status == Optimal`; a basic feasible solution of the
    /// internal standard form, projected back to the original variables.
    pub solution: Option<Vec<Rational>>,
    pub value: Option<Rational>,
}

struct Tableau {
    /// `rows x (cols + 1)`; last column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row; entry `cols` holds the negated objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &inv;
        }
        let src = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for (v, s) in r.iter_mut().zip(src.iter()) {
                    *v -= &f * s;
                }
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for (v, s) in self.cost.iter_mut().zip(src.iter()) {
                *v -= &f * s;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex to optimality with Bland's rule. Returns `false` when the
    /// objective is unbounded above.
    fn optimize(&mut self) -> bool {
        loop {
            // Bland: entering column is the lowest index with positive reduced cost.
            let Some(col) = (0..self.cols).find(|&j| self.cost[j].is_positive()) else {
                return true;
            };
            // Ratio test; ties broken by the lowest basis variable index.
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col].is_positive() {
                    let ratio = &row[self.cols] / &row[col];
                    let key = (ratio.clone(), self.basis[i]);
                    match &best {
                        Some((br, bb, _)) if (br, bb) <= (&key.0, &key.1) => {}
                        _ => best = Some((key.0, key.1, i)),
                    }
                }
            }
            let Some((_, _, row)) = best else {
                return false;
            };
            self.pivot(row, col);
        }
    }

    /// Recomputes the reduced-cost row for `objective` under the current basis.
    fn set_objective(&mut self, objective: &[Rational]) {
        let mut cost = objective.to_vec();
        cost.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                let f = cost[b].clone();
                let src = self.rows[i].clone();
                for (v, s) in cost.iter_mut().zip(src.iter()) {
                    *v -= &f * s;
                }
            }
        }
        self.cost = cost;
    }
}

/// Solves the LP exactly.
pub fn lp_solve(lp: &LpProblem) -> Result<LpResult> {
    let n = lp.var_count;
    for (row, _) in lp.eq.iter().chain(lp.ineq.iter()) {
        if row.len() != n {
            return Err(Error::Dimension(format!(
                "constraint row has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    if lp.objective.len() != n {
        return Err(Error::Dimension(format!(
            "objective has {} entries, expected {n}",
            lp.objective.len()
        )));
    }

    // Standard form: v = v⁺ − v⁻, one slack per inequality, rhs ≥ 0.
    let n_split = 2 * n;
    let n_slack = lp.ineq.len();
    let m = lp.eq.len() + lp.ineq.len();
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut slack_col_of_row: Vec<Option<usize>> = Vec::with_capacity(m);
    for (row, rhs) in lp.eq.iter() {
        let mut r = vec![Rational::zero(); n_split + n_slack + 1];
        for (k, v) in row.iter().enumerate() {
            r[2 * k] = v.clone();
            r[2 * k + 1] = -v.clone();
        }
        *r.last_mut().unwrap() = rhs.clone();
        rows.push(r);
        slack_col_of_row.push(None);
    }
    for (s, (row, rhs)) in lp.ineq.iter().enumerate() {
        let mut r = vec![Rational::zero(); n_split + n_slack + 1];
        for (k, v) in row.iter().enumerate() {
            r[2 * k] = v.clone();
            r[2 * k + 1] = -v.clone();
        }
        r[n_split + s] = Rational::one();
        *r.last_mut().unwrap() = rhs.clone();
        rows.push(r);
        slack_col_of_row.push(Some(n_split + s));
    }
    for (i, r) in rows.iter_mut().enumerate() {
        if r.last().unwrap().is_negative() {
            for v in r.iter_mut() {
                *v = -v.clone();
            }
            // A negated slack can no longer start in the basis.
            slack_col_of_row[i] = None;
        }
    }

    // Phase 1: artificial variables where no slack can seed the basis.
    let mut cols = n_split + n_slack;
    let mut basis = Vec::with_capacity(m);
    let mut artificial_cols = Vec::new();
    for i in 0..m {
        match slack_col_of_row[i] {
            Some(c) => basis.push(c),
            None => {
                for (k, r) in rows.iter_mut().enumerate() {
                    r.insert(cols, if k == i { Rational::one() } else { Rational::zero() });
                }
                basis.push(cols);
                artificial_cols.push(cols);
                cols += 1;
            }
        }
    }
    // rhs stays the last column.
    let mut tab = Tableau {
        rows,
        cost: vec![Rational::zero(); cols + 1],
        basis,
        cols,
    };
    if !artificial_cols.is_empty() {
        let mut phase1 = vec![Rational::zero(); cols];
        for &c in &artificial_cols {
            phase1[c] = -Rational::one();
        }
        tab.set_objective(&phase1);
        assert!(tab.optimize(), "phase-1 objective is bounded by zero");
        // Optimal phase-1 value is -(sum of artificials); stored negated.
        if !tab.cost[tab.cols].is_zero() {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                solution: None,
                value: None,
            });
        }
        // Pivot any artificial still in the basis out, or drop its row as redundant.
        let is_artificial = |c: usize| artificial_cols.contains(&c);
        let mut i = 0;
        while i < tab.rows.len() {
            if is_artificial(tab.basis[i]) {
                let pivot_col =
                    (0..n_split + n_slack).find(|&j| !tab.rows[i][j].is_zero());
                match pivot_col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        // Remove artificial columns entirely.
        for r in tab.rows.iter_mut() {
            for &c in artificial_cols.iter().rev() {
                r.remove(c);
            }
        }
        tab.cols = n_split + n_slack;
        debug_assert!(tab.basis.iter().all(|&b| b < tab.cols));
    }

    // Phase 2.
    let mut objective = vec![Rational::zero(); tab.cols];
    for (k, v) in lp.objective.iter().enumerate() {
        objective[2 * k] = v.clone();
        objective[2 * k + 1] = -v.clone();
    }
    tab.set_objective(&objective);
    if !tab.optimize() {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            solution: None,
            value: None,
        });
    }

    let mut split = vec![Rational::zero(); n_split + n_slack];
    for (i, &b) in tab.basis.iter().enumerate() {
        split[b] = tab.rows[i][tab.cols].clone();
    }
    let solution: Vec<Rational> = (0..n)
        .map(|k| &split[2 * k] - &split[2 * k + 1])
        .collect();
    let value = lp
        .objective
        .iter()
        .zip(solution.iter())
        .fold(Rational::zero(), |acc, (c, v)| acc + c * v);
    Ok(LpResult {
        status: LpStatus::Optimal,
        solution: Some(solution),
        value: Some(value),
    })
}

/// Feasibility check: is there any `v` with `eq` rows tight and `ineq` rows
/// satisfied? Status `Optimal` means feasible (with a witness point).
pub fn lp_feasible(
    var_count: usize,
    eq: Vec<(Vec<Rational>, Rational)>,
    ineq: Vec<(Vec<Rational>, Rational)>,
) -> Result<LpResult> {
    lp_solve(&LpProblem {
        var_count,
        objective: vec![Rational::zero(); var_count],
        eq,
        ineq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&v| rat_int(v)).collect()
    }

    #[test]
    fn simple_bound() {
        // max t subject to t ≤ 1.
        let lp = LpProblem {
            var_count: 1,
            objective: r(&[1]),
            eq: vec![],
            ineq: vec![(r(&[1]), rat_int(1))],
        };
        let res = lp_solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value.unwrap(), rat_int(1));
        assert_eq!(res.solution.unwrap(), r(&[1]));
    }

    #[test]
    fn symmetric_pair() {
        // max t s.t. mu1 - mu2 = 0, mu1 + mu2 = 1, mu_i ≥ t: optimum 1/2.
        let lp = LpProblem {
            var_count: 3, // mu1, mu2, t
            objective: r(&[0, 0, 1]),
            eq: vec![
                (r(&[1, -1, 0]), rat_int(0)),
                (r(&[1, 1, 0]), rat_int(1)),
            ],
            ineq: vec![
                (r(&[-1, 0, 1]), rat_int(0)),
                (r(&[0, -1, 1]), rat_int(0)),
            ],
        };
        let res = lp_solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value.unwrap(), rat(1, 2));
        let sol = res.solution.unwrap();
        assert_eq!(sol[0], rat(1, 2));
        assert_eq!(sol[1], rat(1, 2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x = 1 and x = 2 cannot hold together.
        let lp = LpProblem {
            var_count: 1,
            objective: r(&[0]),
            eq: vec![(r(&[1]), rat_int(1)), (r(&[1]), rat_int(2))],
            ineq: vec![],
        };
        assert_eq!(lp_solve(&lp).unwrap().status, LpStatus::Infeasible);

        // max x with x ≥ 0 only: unbounded.
        let lp = LpProblem {
            var_count: 1,
            objective: r(&[1]),
            eq: vec![],
            ineq: vec![(r(&[-1]), rat_int(0))],
        };
        assert_eq!(lp_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn exactness_no_drift() {
        // Fractions with awkward denominators stay exact.
        let lp = LpProblem {
            var_count: 2,
            objective: vec![rat(1, 3), rat(1, 7)],
            eq: vec![(vec![rat(2, 5), rat(3, 11)], rat(1, 2))],
            ineq: vec![
                (vec![rat_int(1), rat_int(0)], rat(9, 8)),
                (vec![rat_int(-1), rat_int(0)], rat_int(0)),
                (vec![rat_int(0), rat_int(-1)], rat_int(0)),
            ],
        };
        let res = lp_solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        let sol = res.solution.unwrap();
        // Equality holds exactly.
        let lhs = &sol[0] * rat(2, 5) + &sol[1] * rat(3, 11);
        assert_eq!(lhs, rat(1, 2));
    }

    #[test]
    fn degenerate_terminates() {
        // Redundant constraints meeting at a degenerate vertex.
        let lp = LpProblem {
            var_count: 2,
            objective: r(&[1, 1]),
            ineq: vec![
                (r(&[1, 0]), rat_int(1)),
                (r(&[0, 1]), rat_int(1)),
                (r(&[1, 1]), rat_int(2)),
                (r(&[2, 2]), rat_int(4)),
            ],
            eq: vec![],
        };
        let res = lp_solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value.unwrap(), rat_int(2));
    }

    #[test]
    fn cycling_prone_instance_terminates() {
        // Beale's classic cycling instance (cycles under the largest-coefficient
        // rule without safeguards); Bland's rule must terminate. Optimum 1/20.
        let lp = LpProblem {
            var_count: 4,
            objective: vec![rat(3, 4), rat_int(-150), rat(1, 50), rat_int(-6)],
            eq: vec![],
            ineq: vec![
                (vec![rat(1, 4), rat_int(-60), rat(-1, 25), rat_int(9)], rat_int(0)),
                (vec![rat(1, 2), rat_int(-90), rat(-1, 50), rat_int(3)], rat_int(0)),
                (vec![rat_int(0), rat_int(0), rat_int(1), rat_int(0)], rat_int(1)),
                (vec![rat_int(-1), rat_int(0), rat_int(0), rat_int(0)], rat_int(0)),
                (vec![rat_int(0), rat_int(-1), rat_int(0), rat_int(0)], rat_int(0)),
                (vec![rat_int(0), rat_int(0), rat_int(-1), rat_int(0)], rat_int(0)),
                (vec![rat_int(0), rat_int(0), rat_int(0), rat_int(-1)], rat_int(0)),
            ],
        };
        let res = lp_solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value.unwrap(), rat(1, 20));
    }

    /// Brute-force LP optimum by enumerating basic solutions of the standard
    /// form `{w ≥ 0 : A w = b}`: for every column subset of size ≤ rows, solve
    /// and keep feasible points. Independent of the simplex path.
    fn enumerate_optimum(
        objective: &[Rational],
        a: &[Vec<Rational>],
        b: &[Rational],
    ) -> Option<Rational> {
        use crate::linalg;
        let cols = objective.len();
        let rows = a.len();
        let mut best: Option<Rational> = None;
        let mut subset = vec![0usize; 0];
        fn visit(
            start: usize,
            cols: usize,
            max_size: usize,
            subset: &mut Vec<usize>,
            a: &[Vec<Rational>],
            b: &[Rational],
            objective: &[Rational],
            best: &mut Option<Rational>,
        ) {
            // Solve restricted to `subset`, zero elsewhere.
            let sub: Vec<Vec<Rational>> = a
                .iter()
                .map(|row| subset.iter().map(|&c| row[c].clone()).collect())
                .collect();
            if let Some(w) = linalg::solve(&sub, b) {
                if linalg::residual_is_zero(&sub, &w, b) && !w.iter().any(|v| v.is_negative()) {
                    let mut val = Rational::zero();
                    for (k, &c) in subset.iter().enumerate() {
                        val += &objective[c] * &w[k];
                    }
                    if best.as_ref().map_or(true, |bv| val > *bv) {
                        *best = Some(val);
                    }
                }
            }
            if subset.len() == max_size {
                return;
            }
            for c in start..cols {
                subset.push(c);
                visit(c + 1, cols, max_size, subset, a, b, objective, best);
                subset.pop();
            }
        }
        visit(0, cols, rows, &mut subset, a, b, objective, &mut best);
        best
    }

    #[test]
    fn matches_enumeration_on_random_bounded_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let rows = rng.gen_range(1..=2);
            // Random equality system with boxed variables; skip infeasible draws.
            let a: Vec<Vec<Rational>> = (0..rows)
                .map(|_| (0..n).map(|_| rat_int(rng.gen_range(-2..=2))).collect())
                .collect();
            let b: Vec<Rational> = (0..rows).map(|_| rat_int(rng.gen_range(0..=2))).collect();
            let objective: Vec<Rational> =
                (0..n).map(|_| rat_int(rng.gen_range(-3..=3))).collect();
            // Box the variables so the LP is bounded: w_k ≤ 5.
            let mut ineq: Vec<(Vec<Rational>, Rational)> = Vec::new();
            for k in 0..n {
                let mut row = vec![Rational::zero(); n];
                row[k] = rat_int(1);
                ineq.push((row.clone(), rat_int(5)));
                let mut neg = vec![Rational::zero(); n];
                neg[k] = rat_int(-1);
                ineq.push((neg, rat_int(0)));
            }
            let eq: Vec<(Vec<Rational>, Rational)> = a
                .iter()
                .cloned()
                .zip(b.iter().cloned())
                .collect();
            let res = lp_solve(&LpProblem {
                var_count: n,
                objective: objective.clone(),
                eq,
                ineq,
            })
            .unwrap();
            if res.status != LpStatus::Optimal {
                continue;
            }
            // Enumeration oracle over the boxed standard form: add slack for boxes.
            let mut full_a: Vec<Vec<Rational>> = Vec::new();
            let mut full_b: Vec<Rational> = Vec::new();
            let total = n + n; // w variables plus one slack per upper box
            for (row, rhs) in a.iter().zip(b.iter()) {
                let mut fr = vec![Rational::zero(); total];
                fr[..n].clone_from_slice(row);
                full_a.push(fr);
                full_b.push(rhs.clone());
            }
            for k in 0..n {
                let mut fr = vec![Rational::zero(); total];
                fr[k] = rat_int(1);
                fr[n + k] = rat_int(1);
                full_a.push(fr);
                full_b.push(rat_int(5));
            }
            let mut full_obj = vec![Rational::zero(); total];
            full_obj[..n].clone_from_slice(&objective);
            let oracle = enumerate_optimum(&full_obj, &full_a, &full_b).unwrap();
            assert_eq!(res.value.unwrap(), oracle);
            checked += 1;
        }
        assert!(checked >= 10, "too few feasible draws: {checked}");
    }
}
