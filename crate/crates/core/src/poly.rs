//! Sparse multivariate polynomials over Q with truncation semantics.
//!
//! A [`MultiPoly`] is a finite map from monomials to nonzero rational
//! coefficients. With a degree cap ([`TruncContext`]) it models an element
//! of the formal power series ring known up to that degree: every operation
//! performed under a cap discards all terms of total degree >= cap.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::PolyError;

/// Exact rational coefficient.
pub type Scalar = BigRational;

/// Exponent vector of a monomial. Ordered graded-lexicographically so that
/// map iteration (and hence printing) is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(index: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree cap for truncated arithmetic: terms of total degree >= `cap`
/// are discarded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncContext {
    pub cap: usize,
}

impl TruncContext {
    pub fn new(cap: usize) -> Self {
        TruncContext { cap }
    }
}

/// Sparse exact-rational multivariate polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Scalar>,
    nvars: usize,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
            nvars,
        }
    }

    pub fn constant(c: Scalar, nvars: usize) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MultiPoly::constant(Scalar::one(), nvars)
    }

    /// The generator x_{index+1} (zero-based index).
    pub fn var(index: usize, nvars: usize) -> Self {
        assert!(index < nvars);
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(Monomial::var(index, nvars), Scalar::one());
        p
    }

    pub fn from_terms<I>(terms: I, nvars: usize) -> Self
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    fn check_nvars(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            })
        } else {
            Ok(())
        }
    }

    /// Drop terms of total degree >= ctx.cap.
    pub fn truncate(&self, ctx: TruncContext) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() < ctx.cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            nvars: self.nvars,
        }
    }

    fn maybe_truncate(self, ctx: Option<TruncContext>) -> MultiPoly {
        match ctx {
            Some(c) => self.truncate(c),
            None => self,
        }
    }

    pub fn add(&self, other: &MultiPoly, ctx: Option<TruncContext>) -> Result<MultiPoly, PolyError> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out.maybe_truncate(ctx))
    }

    pub fn sub(&self, other: &MultiPoly, ctx: Option<TruncContext>) -> Result<MultiPoly, PolyError> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out.maybe_truncate(ctx))
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
            nvars: self.nvars,
        }
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
            nvars: self.nvars,
        }
    }

    pub fn mul(&self, other: &MultiPoly, ctx: Option<TruncContext>) -> Result<MultiPoly, PolyError> {
        self.check_nvars(other)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if let Some(c) = ctx {
                    if m.total_degree() >= c.cap {
                        continue;
                    }
                }
                out.add_term(m, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32, ctx: Option<TruncContext>) -> Result<MultiPoly, PolyError> {
        let mut out = MultiPoly::one(self.nvars);
        for _ in 0..exp {
            out = out.mul(self, ctx)?;
        }
        Ok(out)
    }

    /// Minimal total degree of a term; `None` for the zero polynomial.
    pub fn ord(&self) -> Option<usize> {
        self.terms.keys().next().map(|m| m.total_degree())
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(|m| m.total_degree())
    }

    /// Lowest homogeneous component. Errors on zero input.
    pub fn lhc(&self) -> Result<MultiPoly, PolyError> {
        let d = self.ord().ok_or(PolyError::ZeroInput)?;
        Ok(self.component(d))
    }

    /// Homogeneous component of total degree `d`.
    pub fn component(&self, d: usize) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            nvars: self.nvars,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.ord() {
            None => true,
            Some(d) => self.total_degree() == Some(d),
        }
    }

    /// d/dx_i (zero-based index).
    pub fn partial_derivative(&self, index: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] = e - 1;
            out.add_term(Monomial(exps), c * Scalar::from_integer(e.into()));
        }
        out
    }

    /// Antiderivative in x_i normalized to have no x_i-free monomial.
    pub fn partial_integrate(&self, index: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[index];
            let mut exps = m.0.clone();
            exps[index] = e + 1;
            out.add_term(
                Monomial(exps),
                c / Scalar::from_integer((e + 1).into()),
            );
        }
        out
    }

    /// Substitute `images[i]` for x_{i+1}. Used for endomorphism pullbacks.
    pub fn substitute(
        &self,
        images: &[MultiPoly],
        ctx: Option<TruncContext>,
    ) -> Result<MultiPoly, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::NvarsMismatch {
                left: self.nvars,
                right: images.len(),
            });
        }
        let target_nvars = images.first().map(|p| p.nvars).unwrap_or(self.nvars);
        // powers[i][k] = images[i]^k, filled lazily
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(p.nvars)])
            .collect();
        let mut out = MultiPoly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(c.clone(), target_nvars);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i], ctx)?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e as usize], ctx)?;
            }
            out = out.add(&term, ctx)?;
        }
        Ok(out)
    }
}

fn fmt_scalar(c: &Scalar) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 1 {
            parts.push(format!("x{}", i + 1));
        } else if e > 1 {
            parts.push(format!("x{}^{}", i + 1, e));
        }
    }
    parts.join("*")
}

impl fmt::Display for MultiPoly {
    /// Canonical form: terms in descending graded-lexicographic order,
    /// re-parsable by [`crate::parse::parse_poly`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_constant() {
                write!(f, "{}", fmt_scalar(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", fmt_monomial(m))?;
            } else {
                write!(f, "{}*{}", fmt_scalar(&abs), fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}
