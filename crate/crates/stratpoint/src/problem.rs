//! Problem descriptions, jet points, and combinatorial codes.
//!
//! A problem has `n` decision variables, `m_le` inequality constraints
//! (`g_i ≤ 0`), `m_eq` equality constraints (`h_j = 0`), and `p` parameters.
//! The objective is treated as a virtual inequality with index `m_le` in
//! zero-based pair notation (one past the real inequalities), written `m*`
//! in reports.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rational;
use num::{Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// Dimensions of a parametric problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemSize {
    pub n: usize,
    pub m_le: usize,
    pub m_eq: usize,
    pub p: usize,
}

impl ProblemSize {
    /// Zero-based index reserved for the objective in pair notation.
    pub fn m_star(&self) -> usize {
        self.m_le
    }

    /// Dimension of the jet space: gradients and values of every constraint
    /// plus the objective gradient.
    pub fn jet_dim(&self) -> usize {
        self.n * self.m_le + self.m_le + self.n * self.m_eq + self.m_eq + self.n
    }
}

/// A parametric optimization problem with polynomial data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyProblem {
    pub size: ProblemSize,
    pub objective: Poly,
    pub inequalities: Vec<Poly>,
    pub equalities: Vec<Poly>,
}

/// Outcome of structural validation; empty `failures` means well-formed.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl PolyProblem {
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let ProblemSize { n, m_le, m_eq, p } = self.size;
        if self.inequalities.len() != m_le {
            failures.push(format!(
                "expected {m_le} inequality constraints, found {}",
                self.inequalities.len()
            ));
        }
        if self.equalities.len() != m_eq {
            failures.push(format!(
                "expected {m_eq} equality constraints, found {}",
                self.equalities.len()
            ));
        }
        let mut check = |label: String, poly: &Poly| {
            if poly.n_x() != n || poly.n_y() != p {
                failures.push(format!(
                    "{label} is over ({}, {}) variables, problem has ({n}, {p})",
                    poly.n_x(),
                    poly.n_y()
                ));
            }
        };
        check("objective".to_string(), &self.objective);
        for (i, g) in self.inequalities.iter().enumerate() {
            check(format!("inequality {}", i + 1), g);
        }
        for (j, h) in self.equalities.iter().enumerate() {
            check(format!("equality {}", j + 1), h);
        }
        ValidationReport { failures }
    }
}

/// First-order data of a problem at a point: constraint gradients and values
/// plus the objective gradient.
///
/// `alpha[i]` is the *value* of `g_i` at the point (so `alpha[i] = 0` marks an
/// active constraint), and `beta[j]` is the value of `h_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetPoint {
    pub a: Vec<Vec<Rational>>,
    pub alpha: Vec<Rational>,
    pub b: Vec<Vec<Rational>>,
    pub beta: Vec<Rational>,
    pub a_star: Vec<Rational>,
}

impl JetPoint {
    pub fn n(&self) -> usize {
        self.a_star.len()
    }

    pub fn m_le(&self) -> usize {
        self.a.len()
    }

    pub fn m_eq(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.alpha.len() != self.a.len() || self.beta.len() != self.b.len() {
            return Err(Error::Dimension(
                "gradient and value counts disagree".into(),
            ));
        }
        if self.a.iter().chain(self.b.iter()).any(|v| v.len() != n) {
            return Err(Error::Dimension(
                "constraint gradients must match the objective gradient length".into(),
            ));
        }
        Ok(())
    }

    /// Packs the jet into coordinates: `(a_i, α_i)` blocks, then `(b_j, β_j)`
    /// blocks, then `a_star`.
    pub fn to_coords(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.size().jet_dim());
        for (ai, alpha) in self.a.iter().zip(&self.alpha) {
            out.extend(ai.iter().cloned());
            out.push(alpha.clone());
        }
        for (bj, beta) in self.b.iter().zip(&self.beta) {
            out.extend(bj.iter().cloned());
            out.push(beta.clone());
        }
        out.extend(self.a_star.iter().cloned());
        out
    }

    pub fn size(&self) -> ProblemSize {
        ProblemSize {
            n: self.n(),
            m_le: self.m_le(),
            m_eq: self.m_eq(),
            p: 0,
        }
    }

    /// True when no inequality value is positive.
    pub fn alpha_feasible(&self) -> bool {
        !self.alpha.iter().any(|v| v.is_positive())
    }

    /// True when every equality value is zero.
    pub fn beta_zero(&self) -> bool {
        self.beta.iter().all(|v| v.is_zero())
    }
}

/// Jet of the constraint system alone (no objective gradient), used on the
/// MFCQ-violation side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MfJetPoint {
    pub a: Vec<Vec<Rational>>,
    pub alpha: Vec<Rational>,
    pub b: Vec<Vec<Rational>>,
    pub beta: Vec<Rational>,
}

impl MfJetPoint {
    pub fn n(&self) -> usize {
        self.a
            .first()
            .map(|v| v.len())
            .or_else(|| self.b.first().map(|v| v.len()))
            .unwrap_or(0)
    }

    pub fn m_le(&self) -> usize {
        self.a.len()
    }

    pub fn m_eq(&self) -> usize {
        self.b.len()
    }

    pub fn alpha_feasible(&self) -> bool {
        !self.alpha.iter().any(|v| v.is_positive())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.alpha.len() != self.a.len() || self.beta.len() != self.b.len() {
            return Err(Error::Dimension(
                "gradient and value counts disagree".into(),
            ));
        }
        if self.a.iter().chain(self.b.iter()).any(|v| v.len() != n) {
            return Err(Error::Dimension(
                "constraint gradients must share one length".into(),
            ));
        }
        Ok(())
    }
}

/// One index pair `(I, J)`: inequality indices (possibly including `m*`) and
/// equality indices, both zero-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexPair {
    pub i: BTreeSet<usize>,
    pub j: BTreeSet<usize>,
}

impl IndexPair {
    pub fn new(i: impl IntoIterator<Item = usize>, j: impl IntoIterator<Item = usize>) -> Self {
        IndexPair {
            i: i.into_iter().collect(),
            j: j.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.i.is_empty() && self.j.is_empty()
    }

    /// Componentwise subset order.
    pub fn le(&self, other: &IndexPair) -> bool {
        self.i.is_subset(&other.i) && self.j.is_subset(&other.j)
    }

    pub fn card(&self) -> usize {
        self.i.len() + self.j.len()
    }
}

/// The combinatorial code of a jet: active inequality indices and the family
/// of minimal multiplier-supporting pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialCode {
    /// Zero-based index standing for the objective inside pairs.
    pub m_star: usize,
    pub i0: BTreeSet<usize>,
    pub pairs: BTreeSet<IndexPair>,
}

impl CombinatorialCode {
    pub fn empty(m_star: usize) -> Self {
        CombinatorialCode {
            m_star,
            i0: BTreeSet::new(),
            pairs: BTreeSet::new(),
        }
    }

    /// Pairs whose `I` contains the objective index.
    pub fn sp_pairs(&self) -> impl Iterator<Item = &IndexPair> {
        self.pairs.iter().filter(|p| p.i.contains(&self.m_star))
    }

    /// Pairs whose `I` does not contain the objective index.
    pub fn mf_pairs(&self) -> impl Iterator<Item = &IndexPair> {
        self.pairs.iter().filter(|p| !p.i.contains(&self.m_star))
    }

    pub fn is_stationary(&self) -> bool {
        self.sp_pairs().next().is_some()
    }

    pub fn mfcq_violated(&self) -> bool {
        self.mf_pairs().next().is_some()
    }
}

fn fmt_index_set(set: &BTreeSet<usize>, m_star: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (k, idx) in set.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        if *idx == m_star {
            write!(f, "m*")?;
        } else {
            write!(f, "{}", idx + 1)?;
        }
    }
    write!(f, "}}")
}

impl fmt::Display for CombinatorialCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I0=")?;
        fmt_index_set(&self.i0, usize::MAX, f)?;
        write!(f, " pairs=[")?;
        for (k, pair) in self.pairs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            fmt_index_set(&pair.i, self.m_star, f)?;
            write!(f, ",")?;
            fmt_index_set(&pair.j, usize::MAX, f)?;
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

/// Multipliers certifying a first-order condition: `mu` over inequalities
/// (nonnegative), `lambda` over equalities (sign-free).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multipliers {
    pub mu: Vec<Rational>,
    pub lambda: Vec<Rational>,
}

impl Multipliers {
    pub fn validate(&self) -> Result<()> {
        if self.mu.iter().any(|v| v.is_negative()) {
            return Err(Error::Precondition(
                "inequality multipliers must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}
