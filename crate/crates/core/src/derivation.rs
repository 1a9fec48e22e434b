//! Derivations of Q[x1..xn] as generator-image vectors: application via
//! the Leibniz extension, Lie brackets, bounded local-nilpotency and
//! local-finiteness certificates, and the equivalence test for locally
//! nilpotent derivations.

use std::fmt;
use thiserror::Error;

use crate::error::PolyError;
use crate::linalg::PolySpan;
use crate::poly::{MultiPoly, Scalar, TruncContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("variable-count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },
    #[error("the zero derivation is rejected here")]
    ZeroDerivation,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A derivation of Q[x1..xn], determined by its generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    images: Vec<MultiPoly>,
}

impl Derivation {
    pub fn new(images: Vec<MultiPoly>) -> Self {
        assert!(!images.is_empty());
        let n = images.len();
        for p in &images {
            assert_eq!(p.nvars(), n, "image nvars must equal generator count");
        }
        Derivation { images }
    }

    pub fn zero(nvars: usize) -> Self {
        Derivation::new(vec![MultiPoly::zero(nvars); nvars])
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[MultiPoly] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &MultiPoly {
        &self.images[i]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|p| p.is_zero())
    }

    fn check_nvars(&self, other: &Derivation) -> Result<(), DerivationError> {
        if self.nvars() != other.nvars() {
            Err(DerivationError::NvarsMismatch {
                left: self.nvars(),
                right: other.nvars(),
            })
        } else {
            Ok(())
        }
    }

    /// Apply to a polynomial: sum_i images[i] * dp/dx_i. Linear and
    /// Leibniz by construction.
    pub fn apply(
        &self,
        p: &MultiPoly,
        ctx: Option<TruncContext>,
    ) -> Result<MultiPoly, DerivationError> {
        if p.nvars() != self.nvars() {
            return Err(DerivationError::NvarsMismatch {
                left: self.nvars(),
                right: p.nvars(),
            });
        }
        let mut out = MultiPoly::zero(self.nvars());
        for (i, image) in self.images.iter().enumerate() {
            if image.is_zero() {
                continue;
            }
            let d = p.partial_derivative(i);
            if d.is_zero() {
                continue;
            }
            out = out.add(&image.mul(&d, ctx)?, ctx)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Derivation) -> Result<Derivation, DerivationError> {
        self.check_nvars(other)?;
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.add(b, None))
            .collect::<Result<_, _>>()?;
        Ok(Derivation::new(images))
    }

    pub fn sub(&self, other: &Derivation) -> Result<Derivation, DerivationError> {
        self.check_nvars(other)?;
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.sub(b, None))
            .collect::<Result<_, _>>()?;
        Ok(Derivation::new(images))
    }

    pub fn scale(&self, c: &Scalar) -> Derivation {
        Derivation::new(self.images.iter().map(|p| p.scale(c)).collect())
    }

    /// Multiply by a polynomial coefficient: (f*d)(x_i) = f * d(x_i).
    pub fn mul_poly(&self, f: &MultiPoly) -> Result<Derivation, DerivationError> {
        let images = self
            .images
            .iter()
            .map(|p| f.mul(p, None))
            .collect::<Result<_, _>>()?;
        Ok(Derivation::new(images))
    }

    /// [d1, d2] = d1 o d2 - d2 o d1, computed on generators.
    pub fn lie_bracket(&self, other: &Derivation) -> Result<Derivation, DerivationError> {
        self.check_nvars(other)?;
        let mut images = Vec::with_capacity(self.nvars());
        for i in 0..self.nvars() {
            let a = self.apply(other.image(i), None)?;
            let b = other.apply(self.image(i), None)?;
            images.push(a.sub(&b, None)?);
        }
        Ok(Derivation::new(images))
    }

    /// If every nonzero image is homogeneous with deg(image) - 1 equal to
    /// the same e, the derivation is homogeneous of degree e.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degree = None;
        for image in &self.images {
            if image.is_zero() {
                continue;
            }
            if !image.is_homogeneous() {
                return None;
            }
            let e = image.total_degree().unwrap() as i64 - 1;
            match degree {
                None => degree = Some(e),
                Some(d) if d == e => {}
                _ => return None,
            }
        }
        degree
    }

    /// The fixed amount by which this derivation raises the order of every
    /// monomial it does not kill: every nonzero image shares the same
    /// ord(image) - 1 = e >= 1. Zero images are skipped; a derivation with
    /// no nonzero image has no raise.
    pub fn fixed_ord_raise(&self) -> Option<usize> {
        let mut raise = None;
        for image in &self.images {
            let Some(o) = image.ord() else { continue };
            if o < 2 {
                return None;
            }
            match raise {
                None => raise = Some(o - 1),
                Some(r) if r == o - 1 => {}
                _ => return None,
            }
        }
        raise
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// Parse the derivation text form `[p1, ..., pn]`.
pub fn parse_derivation(text: &str, nvars: usize) -> Result<Derivation, DerivationError> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| PolyError::Syntax {
            offset: 0,
            message: "derivation must be a bracketed list [p1, ..., pn]".into(),
        })?;
    let parts: Vec<&str> = split_top_level(inner);
    if parts.len() != nvars {
        return Err(DerivationError::NvarsMismatch {
            left: nvars,
            right: parts.len(),
        });
    }
    let images = parts
        .iter()
        .map(|s| crate::parse::parse_poly(s, nvars))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation::new(images))
}

// split on commas not inside parentheses
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, b) in s.bytes().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            b',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilpotencyStatus {
    ProvedLnd,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationWitness {
    /// A nonzero iterate on the generator repeated an earlier iterate up
    /// to scalar, for a homogeneous derivation of degree >= 0.
    ScalarRepeat {
        generator: usize,
        earlier: usize,
        repeat: usize,
    },
    /// Orders of iterates on the generator grew strictly through the whole
    /// budget while the derivation raises ord by a fixed positive amount.
    OrdGrowth {
        generator: usize,
        orders: Vec<usize>,
        raise: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotencyVerdict {
    pub status: NilpotencyStatus,
    /// For PROVED_LND: per-generator k_i with d^{k_i}(x_i) = 0 exactly.
    pub orders: Option<Vec<usize>>,
    pub refutation: Option<RefutationWitness>,
    pub bound: usize,
}

fn scalar_ratio(p: &MultiPoly, q: &MultiPoly) -> Option<Scalar> {
    // p = c*q for a scalar c, both nonzero
    if p.num_terms() != q.num_terms() {
        return None;
    }
    let mut ratio: Option<Scalar> = None;
    for ((mp, cp), (mq, cq)) in p.terms().zip(q.terms()) {
        if mp != mq {
            return None;
        }
        let r = cp / cq;
        match &ratio {
            None => ratio = Some(r),
            Some(prev) if *prev == r => {}
            _ => return None,
        }
    }
    ratio
}

/// Bounded local-nilpotency certificate. On a polynomial ring, nilpotency
/// on every generator is sufficient by the Leibniz rule.
pub fn is_lnd(d: &Derivation, bound: usize) -> NilpotencyVerdict {
    assert!(bound >= 1);
    let n = d.nvars();
    let hom_degree = d.homogeneous_degree();
    let fixed_raise = d.fixed_ord_raise();
    let mut orders = vec![None; n];
    let mut refutation = None;

    for i in 0..n {
        let mut iterates = vec![MultiPoly::var(i, n)];
        for k in 1..=bound {
            let next = d.apply(iterates.last().unwrap(), None).unwrap();
            if next.is_zero() {
                orders[i] = Some(k);
                break;
            }
            // homogeneous non-negative degree + scalar repeat is conclusive:
            // the iterate sequence cycles up to scalar and never reaches zero
            if hom_degree.is_some_and(|e| e >= 0) && refutation.is_none() {
                if let Some(earlier) = iterates
                    .iter()
                    .position(|prev| !prev.is_zero() && scalar_ratio(&next, prev).is_some())
                {
                    refutation = Some(RefutationWitness::ScalarRepeat {
                        generator: i + 1,
                        earlier,
                        repeat: k,
                    });
                }
            }
            iterates.push(next);
        }
        if orders[i].is_some() {
            continue;
        }
        if refutation.is_none() {
            if let Some(raise) = fixed_raise {
                let ords: Vec<usize> = iterates.iter().map(|p| p.ord().unwrap()).collect();
                if ords.windows(2).all(|w| w[0] < w[1]) {
                    refutation = Some(RefutationWitness::OrdGrowth {
                        generator: i + 1,
                        orders: ords,
                        raise,
                    });
                }
            }
        }
    }

    if let Some(w) = refutation {
        return NilpotencyVerdict {
            status: NilpotencyStatus::Refuted,
            orders: None,
            refutation: Some(w),
            bound,
        };
    }
    if orders.iter().all(|o| o.is_some()) {
        NilpotencyVerdict {
            status: NilpotencyStatus::ProvedLnd,
            orders: Some(orders.into_iter().map(|o| o.unwrap()).collect()),
            refutation: None,
            bound,
        }
    } else {
        NilpotencyVerdict {
            status: NilpotencyStatus::Inconclusive,
            orders: None,
            refutation: None,
            bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FinitenessStatus {
    LocallyFiniteOnSeed,
    NotLocallyFinite,
    Inconclusive,
}

/// Krylov ladder of a derivation on a seed polynomial.
#[derive(Clone, Debug)]
pub struct FinitenessReport {
    pub seed: MultiPoly,
    /// dims[k] = dim span{f, df, ..., d^k f} over Q.
    pub dims: Vec<usize>,
    /// ord(d^k f); None once an iterate is zero.
    pub orders: Vec<Option<usize>>,
    pub status: FinitenessStatus,
    pub bound: usize,
}

/// Exact Krylov span computation. Stabilization of the span certifies
/// local finiteness on the seed; a strictly increasing order ladder under
/// a certified fixed positive ord raise refutes it (exact mode only).
pub fn krylov(
    d: &Derivation,
    f: &MultiPoly,
    bound: usize,
    ctx: Option<TruncContext>,
) -> Result<FinitenessReport, DerivationError> {
    assert!(bound >= 1);
    let mut span = PolySpan::new(f.nvars());
    let mut dims = Vec::new();
    let mut orders = Vec::new();
    let mut current = f.clone();
    let mut status = FinitenessStatus::Inconclusive;
    for _k in 0..=bound {
        orders.push(current.ord());
        let grew = span.insert(&current);
        dims.push(span.dim());
        if !grew {
            // span{f..d^{k-1}f} already contains d^k f, hence is d-stable
            status = FinitenessStatus::LocallyFiniteOnSeed;
            break;
        }
        current = d.apply(&current, ctx)?;
    }
    if status == FinitenessStatus::Inconclusive && ctx.is_none() {
        let strictly_increasing = orders
            .windows(2)
            .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a < b));
        if strictly_increasing && d.fixed_ord_raise().is_some() {
            status = FinitenessStatus::NotLocallyFinite;
        }
    }
    Ok(FinitenessReport {
        seed: f.clone(),
        dims,
        orders,
        status,
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceStatus {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceWitness {
    /// The ratio c = num/den with the verified kernel identities.
    Ratio { num: MultiPoly, den: MultiPoly },
    /// Cross-proportionality d1(x_i)*d2(x_j) = d1(x_j)*d2(x_i) fails
    /// at this (1-based) index pair.
    Proportionality { i: usize, j: usize },
    /// The ratio fails the kernel-membership identity for this derivation.
    KernelMembership { derivation: usize, index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub status: EquivalenceStatus,
    pub witness: Option<EquivalenceWitness>,
}

/// Equivalence test for two LNDs: cross-proportionality of generator
/// images plus kernel membership of the ratio, checked through the
/// quotient-rule numerator identity d(num)*den - num*d(den) = 0.
pub fn equivalent(
    d1: &Derivation,
    d2: &Derivation,
    bound: usize,
) -> Result<EquivalenceVerdict, DerivationError> {
    if d1.is_zero() || d2.is_zero() {
        return Err(DerivationError::ZeroDerivation);
    }
    d1.check_nvars(d2)?;
    for d in [d1, d2] {
        match is_lnd(d, bound).status {
            NilpotencyStatus::ProvedLnd => {}
            _ => {
                return Ok(EquivalenceVerdict {
                    status: EquivalenceStatus::Inconclusive,
                    witness: None,
                })
            }
        }
    }
    let n = d1.nvars();
    for i in 0..n {
        for j in (i + 1)..n {
            let lhs = d1.image(i).mul(d2.image(j), None)?;
            let rhs = d1.image(j).mul(d2.image(i), None)?;
            if lhs != rhs {
                return Ok(EquivalenceVerdict {
                    status: EquivalenceStatus::NotEquivalent,
                    witness: Some(EquivalenceWitness::Proportionality { i: i + 1, j: j + 1 }),
                });
            }
        }
    }
    let i = (0..n)
        .find(|&i| !d2.image(i).is_zero())
        .expect("nonzero derivation has a nonzero image");
    let num = d1.image(i).clone();
    let den = d2.image(i).clone();
    for (which, d) in [(1usize, d1), (2usize, d2)] {
        let lhs = d.apply(&num, None)?.mul(&den, None)?;
        let rhs = num.mul(&d.apply(&den, None)?, None)?;
        if lhs != rhs {
            return Ok(EquivalenceVerdict {
                status: EquivalenceStatus::NotEquivalent,
                witness: Some(EquivalenceWitness::KernelMembership {
                    derivation: which,
                    index: i + 1,
                }),
            });
        }
    }
    Ok(EquivalenceVerdict {
        status: EquivalenceStatus::Equivalent,
        witness: Some(EquivalenceWitness::Ratio { num, den }),
    })
}
