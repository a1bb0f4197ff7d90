//! Dense exact linear algebra over rationals, sized for small systems.

use crate::rational::Rational;
use num::{One, Signed, Zero};

/// Row-reduces `m` in place (Gauss-Jordan), returning the pivot columns.
///
/// Only the first `cols` columns are eligible as pivots; trailing columns ride
/// along, which makes `[A | b]` reductions convenient.
pub fn row_reduce(m: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v /= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let src = m[r].clone();
                for (v, s) in m[i].iter_mut().zip(src.iter()) {
                    *v -= &f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix.
pub fn rank(m: &[Vec<Rational>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let mut work = m.to_vec();
    let cols = work[0].len();
    row_reduce(&mut work, cols).len()
}

/// Determinant of a square matrix by fraction-free-enough Gaussian elimination.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "square matrix required");
    let mut work = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !work[i][c].is_zero()) else {
            return Rational::zero();
        };
        if pr != c {
            work.swap(c, pr);
            det = -det;
        }
        det *= &work[c][c];
        let inv = work[c][c].clone();
        for i in (c + 1)..n {
            if !work[i][c].is_zero() {
                let f = &work[i][c] / &inv;
                let src = work[c].clone();
                for (v, s) in work[i].iter_mut().zip(src.iter()).skip(c) {
                    *v -= &f * s;
                }
            }
        }
    }
    det
}

/// Solves `A x = b` for one solution, or `None` when inconsistent.
///
/// Free coordinates are set to zero, so the result is deterministic.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    if a.is_empty() {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug, cols);
    for (i, row) in aug.iter().enumerate() {
        if i >= pivots.len() && !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Indices of a maximal linearly independent subset of `rows`, greedy from the front.
pub fn independent_rows(rows: &[Vec<Rational>]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut candidate = basis.clone();
        candidate.push(row.clone());
        if rank(&candidate) > basis.len() {
            basis.push(row.clone());
            kept.push(i);
        }
    }
    kept
}

/// Exact Euclidean projection of `c` onto the affine set `{x : rows · x = rhs}`.
///
/// Returns `None` when the constraint system is inconsistent. Redundant rows
/// are tolerated; the projection itself is unique regardless.
pub fn project_affine(
    c: &[Rational],
    rows: &[Vec<Rational>],
    rhs: &[Rational],
) -> Option<Vec<Rational>> {
    assert_eq!(rows.len(), rhs.len());
    if rows.is_empty() {
        return Some(c.to_vec());
    }
    let n = c.len();
    // Consistency check on the full system first.
    solve(rows, rhs)?;
    let keep = independent_rows(rows);
    let r: Vec<Vec<Rational>> = keep.iter().map(|&i| rows[i].clone()).collect();
    let t: Vec<Rational> = keep.iter().map(|&i| rhs[i].clone()).collect();
    let k = r.len();
    // x = c - Rᵀν with (R Rᵀ) ν = R c - t; R Rᵀ is invertible for independent rows.
    let mut gram = vec![vec![Rational::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut s = Rational::zero();
            for d in 0..n {
                s += &r[i][d] * &r[j][d];
            }
            gram[i][j] = s;
        }
    }
    let mut rcmt = Vec::with_capacity(k);
    for i in 0..k {
        let mut s = Rational::zero();
        for d in 0..n {
            s += &r[i][d] * &c[d];
        }
        rcmt.push(s - &t[i]);
    }
    let nu = solve(&gram, &rcmt).expect("gram matrix of independent rows is invertible");
    let mut x = c.to_vec();
    for i in 0..k {
        for d in 0..n {
            x[d] -= &nu[i] * &r[i][d];
        }
    }
    Some(x)
}

/// Sup-norm of the residual `A x − b`, for assertions.
pub fn residual_is_zero(a: &[Vec<Rational>], x: &[Rational], b: &[Rational]) -> bool {
    a.iter().zip(b.iter()).all(|(row, rhs)| {
        let mut s = Rational::zero();
        for (v, xv) in row.iter().zip(x.iter()) {
            s += v * xv;
        }
        (s - rhs).abs().is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| rat_int(v)).collect())
            .collect()
    }

    fn v(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn solve_and_rank() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let x = solve(&a, &v(&[5, 11])).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(2)]);
        assert_eq!(rank(&a), 2);

        // Inconsistent system.
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &v(&[1, 3])).is_none());
        assert_eq!(rank(&a), 1);

        // Underdetermined: free coordinates pinned at zero.
        let a = m(&[&[1, 1, 0]]);
        let x = solve(&a, &v(&[2])).unwrap();
        assert_eq!(x, vec![rat_int(2), rat_int(0), rat_int(0)]);
    }

    #[test]
    fn determinant_values() {
        assert_eq!(determinant(&m(&[&[1, 2], &[3, 4]])), rat_int(-2));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), rat_int(0));
        assert_eq!(
            determinant(&m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])),
            rat_int(1)
        );
    }

    #[test]
    fn projection() {
        // Project (1,1) onto {x1 = 0}: (0,1).
        let x = project_affine(&v(&[1, 1]), &m(&[&[1, 0]]), &v(&[0])).unwrap();
        assert_eq!(x, vec![rat_int(0), rat_int(1)]);
        // Redundant duplicate rows are fine.
        let x = project_affine(&v(&[1, 1]), &m(&[&[1, 0], &[2, 0]]), &v(&[0, 0])).unwrap();
        assert_eq!(x, vec![rat_int(0), rat_int(1)]);
        // Inconsistent rows.
        assert!(project_affine(&v(&[1, 1]), &m(&[&[1, 0], &[1, 0]]), &v(&[0, 1])).is_none());
        // Projection onto a line, exact fraction.
        let x = project_affine(&v(&[1, 0]), &m(&[&[1, 1]]), &v(&[1])).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(0, 1)]);
        let x = project_affine(&v(&[1, 1]), &m(&[&[1, 1]]), &v(&[1])).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }
}
// temp
