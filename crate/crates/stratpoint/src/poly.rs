//! Polynomials in decision variables `x` and parameters `y`, with exact
//! rational coefficients.
//!
//! Terms are keyed by exponent vectors over both variable blocks; the map is
//! ordered, so iteration (and therefore printing and serialization) is
//! deterministic. Zero coefficients are never stored.

use crate::error::{Error, Result};
use crate::rational::{format_rational, rat_pow, rat_to_f64, Rational};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

type Monomial = (Vec<u32>, Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    n_x: usize,
    n_y: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(n_x: usize, n_y: usize) -> Self {
        Poly {
            n_x,
            n_y,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_x: usize, n_y: usize, c: Rational) -> Self {
        let mut p = Poly::zero(n_x, n_y);
        p.add_term(c, vec![0; n_x], vec![0; n_y]);
        p
    }

    /// The monomial `x_i` (zero-based `i`).
    pub fn x_var(n_x: usize, n_y: usize, i: usize) -> Self {
        assert!(i < n_x, "x index out of range");
        let mut ex = vec![0; n_x];
        ex[i] = 1;
        let mut p = Poly::zero(n_x, n_y);
        p.add_term(Rational::one(), ex, vec![0; n_y]);
        p
    }

    /// The monomial `y_j` (zero-based `j`).
    pub fn y_var(n_x: usize, n_y: usize, j: usize) -> Self {
        assert!(j < n_y, "y index out of range");
        let mut ey = vec![0; n_y];
        ey[j] = 1;
        let mut p = Poly::zero(n_x, n_y);
        p.add_term(Rational::one(), vec![0; n_x], ey);
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(
        n_x: usize,
        n_y: usize,
        terms: impl IntoIterator<Item = (Rational, Vec<u32>, Vec<u32>)>,
    ) -> Result<Self> {
        let mut p = Poly::zero(n_x, n_y);
        for (c, ex, ey) in terms {
            if ex.len() != n_x || ey.len() != n_y {
                return Err(Error::Dimension(format!(
                    "term exponents ({}, {}) do not match variable counts ({n_x}, {n_y})",
                    ex.len(),
                    ey.len()
                )));
            }
            p.add_term(c, ex, ey);
        }
        Ok(p)
    }

    fn add_term(&mut self, c: Rational, ex: Vec<u32>, ey: Vec<u32>) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((ex, ey)) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &[u32], &[u32])> {
        self.terms.iter().map(|((ex, ey), c)| (c, &ex[..], &ey[..]))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!((self.n_x, self.n_y), (other.n_x, other.n_y));
        let mut out = self.clone();
        for ((ex, ey), c) in &other.terms {
            out.add_term(c.clone(), ex.clone(), ey.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n_x, self.n_y);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!((self.n_x, self.n_y), (other.n_x, other.n_y));
        let mut out = Poly::zero(self.n_x, self.n_y);
        for ((ax, ay), ac) in &self.terms {
            for ((bx, by), bc) in &other.terms {
                let ex: Vec<u32> = ax.iter().zip(bx).map(|(u, v)| u + v).collect();
                let ey: Vec<u32> = ay.iter().zip(by).map(|(u, v)| u + v).collect();
                out.add_term(ac * bc, ex, ey);
            }
        }
        out
    }

    /// Exact evaluation at rational points.
    pub fn eval(&self, xs: &[Rational], ys: &[Rational]) -> Result<Rational> {
        if xs.len() != self.n_x || ys.len() != self.n_y {
            return Err(Error::Dimension(format!(
                "eval point ({}, {}) does not match variable counts ({}, {})",
                xs.len(),
                ys.len(),
                self.n_x,
                self.n_y
            )));
        }
        let mut acc = Rational::zero();
        for ((ex, ey), c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in xs.iter().zip(ex.iter()) {
                if e > 0 {
                    t *= rat_pow(v, e);
                }
            }
            for (v, &e) in ys.iter().zip(ey.iter()) {
                if e > 0 {
                    t *= rat_pow(v, e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Float evaluation, for the Newton corrector.
    pub fn eval_f64(&self, xs: &[f64], ys: &[f64]) -> f64 {
        debug_assert_eq!(xs.len(), self.n_x);
        debug_assert_eq!(ys.len(), self.n_y);
        let mut acc = 0.0;
        for ((ex, ey), c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (v, &e) in xs.iter().zip(ex.iter()) {
                for _ in 0..e {
                    t *= v;
                }
            }
            for (v, &e) in ys.iter().zip(ey.iter()) {
                for _ in 0..e {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Partial derivative with respect to `x_i`.
    pub fn diff_x(&self, i: usize) -> Poly {
        assert!(i < self.n_x, "x index out of range");
        let mut out = Poly::zero(self.n_x, self.n_y);
        for ((ex, ey), c) in &self.terms {
            let e = ex[i];
            if e > 0 {
                let mut nex = ex.clone();
                nex[i] = e - 1;
                out.add_term(c * Rational::from_integer(e.into()), nex, ey.clone());
            }
        }
        out
    }

    /// Gradient in the decision variables.
    pub fn grad_x(&self) -> Vec<Poly> {
        (0..self.n_x).map(|i| self.diff_x(i)).collect()
    }

    /// Hessian in the decision variables.
    pub fn hessian_x(&self) -> Vec<Vec<Poly>> {
        (0..self.n_x)
            .map(|i| {
                let d = self.diff_x(i);
                (0..self.n_x).map(|j| d.diff_x(j)).collect()
            })
            .collect()
    }

    /// Same polynomial viewed with extra trailing variables in either block.
    pub fn extend(&self, n_x: usize, n_y: usize) -> Poly {
        assert!(n_x >= self.n_x && n_y >= self.n_y, "extend cannot shrink");
        let mut out = Poly::zero(n_x, n_y);
        for ((ex, ey), c) in &self.terms {
            let mut nex = ex.clone();
            nex.resize(n_x, 0);
            let mut ney = ey.clone();
            ney.resize(n_y, 0);
            out.add_term(c.clone(), nex, ney);
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((ex, ey), c) in &self.terms {
            let mut piece = String::new();
            let abs = c.abs();
            let has_vars = ex.iter().any(|&e| e > 0) || ey.iter().any(|&e| e > 0);
            if !has_vars || !abs.is_one() {
                piece.push_str(&format_rational(&abs));
            }
            for (i, &e) in ex.iter().enumerate() {
                if e > 0 {
                    if !piece.is_empty() {
                        piece.push('*');
                    }
                    piece.push_str(&format!("x{}", i + 1));
                    if e > 1 {
                        piece.push_str(&format!("^{e}"));
                    }
                }
            }
            for (j, &e) in ey.iter().enumerate() {
                if e > 0 {
                    if !piece.is_empty() {
                        piece.push('*');
                    }
                    piece.push_str(&format!("y{}", j + 1));
                    if e > 1 {
                        piece.push_str(&format!("^{e}"));
                    }
                }
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{piece}")?;
        }
        Ok(())
    }
}
