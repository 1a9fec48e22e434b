//! Polynomial ring endomorphisms through pullbacks: exact exponentials of
//! locally nilpotent derivations, truncated exponentials of order-raising
//! derivations, composition, group commutators, and the h = g* - id probe
//! for algebraic behavior.
//!
//! Composition convention, stamped into every report:
//! (a o b)* = b* o a*, i.e. `compose(a, b)` applies a first on points.

use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

use crate::derivation::{is_lnd, Derivation, DerivationError, NilpotencyStatus};
use crate::error::PolyError;
use crate::linalg::PolySpan;
use crate::poly::{MultiPoly, Scalar, TruncContext};

/// The fixed pullback composition convention.
pub const COMPOSE_CONVENTION: &str = "pullback-compose: (a\u{2218}b)* = b*\u{2218}a*";

const EXP_LND_BOUND: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EndoError {
    #[error("derivation is neither proved locally nilpotent nor order-raising under a cap")]
    NotExponentiable,
    #[error("endomorphism has no tracked inverse; only exact exp-built ones do")]
    NonInvertible,
    #[error("truncation cap {cap} too small for the requested budget")]
    CapTooSmall { cap: usize },
    #[error("probe seed must be nonzero")]
    ZeroSeed,
    #[error("variable-count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// A ring endomorphism of Q[x1..xn] given by generator pullback images,
/// optionally truncated at a degree cap. Exact exp-built endomorphisms
/// carry their inverse pullback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyEndo {
    images: Vec<MultiPoly>,
    cap: Option<usize>,
    inverse_images: Option<Vec<MultiPoly>>,
}

impl PolyEndo {
    pub fn identity(nvars: usize) -> Self {
        let images: Vec<MultiPoly> = (0..nvars).map(|i| MultiPoly::var(i, nvars)).collect();
        PolyEndo {
            inverse_images: Some(images.clone()),
            images,
            cap: None,
        }
    }

    pub fn from_images(images: Vec<MultiPoly>, cap: Option<usize>) -> Self {
        assert!(!images.is_empty());
        let n = images.len();
        for p in &images {
            assert_eq!(p.nvars(), n);
        }
        PolyEndo {
            images,
            cap,
            inverse_images: None,
        }
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[MultiPoly] {
        &self.images
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse_images.is_some()
    }

    fn ctx(&self) -> Option<TruncContext> {
        self.cap.map(TruncContext::new)
    }

    /// g*(p): substitute the pullback images, truncating at the cap.
    pub fn pullback(&self, p: &MultiPoly) -> Result<MultiPoly, EndoError> {
        Ok(p.substitute(&self.images, self.ctx())?)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, p)| *p == MultiPoly::var(i, self.nvars()))
    }

    pub fn inverse(&self) -> Result<PolyEndo, EndoError> {
        let inv = self
            .inverse_images
            .clone()
            .ok_or(EndoError::NonInvertible)?;
        Ok(PolyEndo {
            images: inv,
            cap: self.cap,
            inverse_images: Some(self.images.clone()),
        })
    }
}

impl fmt::Display for PolyEndo {
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

fn exp_images(
    d: &Derivation,
    t: &Scalar,
    ctx: Option<TruncContext>,
) -> Result<Vec<MultiPoly>, EndoError> {
    let n = d.nvars();
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let mut sum = MultiPoly::var(i, n);
        let mut iterate = sum.clone();
        let mut factor = Scalar::one();
        let mut k = 0u64;
        loop {
            iterate = d.apply(&iterate, ctx)?;
            if iterate.is_zero() {
                break;
            }
            k += 1;
            factor = factor * t / Scalar::from_integer(k.into());
            sum = sum.add(&iterate.scale(&factor), ctx)?;
        }
        images.push(sum);
    }
    Ok(images)
}

/// exp(t*d) as a pullback endomorphism. Exact when d is proved locally
/// nilpotent (then the inverse exp(-t*d) is tracked); truncated when d
/// strictly raises order on every generator image and a cap is supplied.
pub fn exp_derivation(
    d: &Derivation,
    t: &Scalar,
    ctx: Option<TruncContext>,
) -> Result<PolyEndo, EndoError> {
    if t.is_zero() {
        return Ok(PolyEndo::identity(d.nvars()));
    }
    let verdict = is_lnd(d, EXP_LND_BOUND);
    if verdict.status == NilpotencyStatus::ProvedLnd {
        let images = exp_images(d, t, None)?;
        let inverse = exp_images(d, &-t.clone(), None)?;
        let endo = PolyEndo {
            images,
            cap: None,
            inverse_images: Some(inverse),
        };
        return Ok(match ctx {
            Some(c) => PolyEndo {
                images: endo.images.iter().map(|p| p.truncate(c)).collect(),
                cap: Some(c.cap),
                inverse_images: None,
            },
            None => endo,
        });
    }
    // truncated mode: every nonzero image must have ord >= 2 so the
    // series terminates below the cap
    let raises_ord = d
        .images()
        .iter()
        .all(|p| p.is_zero() || p.ord().unwrap() >= 2);
    match ctx {
        Some(c) if raises_ord => {
            let images = exp_images(d, t, Some(c))?;
            Ok(PolyEndo {
                images,
                cap: Some(c.cap),
                inverse_images: None,
            })
        }
        _ => Err(EndoError::NotExponentiable),
    }
}

/// Composition per the convention (a o b)* = b* o a*: the pullback image
/// of x_i is a's image with b's images substituted in.
pub fn compose(a: &PolyEndo, b: &PolyEndo) -> Result<PolyEndo, EndoError> {
    if a.nvars() != b.nvars() {
        return Err(EndoError::NvarsMismatch {
            left: a.nvars(),
            right: b.nvars(),
        });
    }
    let cap = match (a.cap, b.cap) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    };
    let ctx = cap.map(TruncContext::new);
    let images = a
        .images
        .iter()
        .map(|p| p.substitute(&b.images, ctx))
        .collect::<Result<Vec<_>, _>>()?;
    // (a o b)^{-1} = b^{-1} o a^{-1}
    let inverse_images = match (&a.inverse_images, &b.inverse_images) {
        (Some(ai), Some(bi)) => Some(
            bi.iter()
                .map(|p| p.substitute(ai, ctx))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        _ => None,
    };
    Ok(PolyEndo {
        images,
        cap,
        inverse_images,
    })
}

/// a o b o a^{-1} o b^{-1}; identity exactly when the exponentials commute.
pub fn group_commutator(a: &PolyEndo, b: &PolyEndo) -> Result<PolyEndo, EndoError> {
    let ai = a.inverse()?;
    let bi = b.inverse()?;
    compose(&compose(&compose(a, b)?, &ai)?, &bi)
}

/// h(p) = g*(p) - p.
pub fn h_operator(g: &PolyEndo, p: &MultiPoly) -> Result<MultiPoly, EndoError> {
    let ctx = g.ctx();
    Ok(g.pullback(p)?.sub(p, ctx)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeStatus {
    AlgebraicBehavior,
    NonAlgebraic,
    Inconclusive,
}

/// Iterated h-ladder on a seed: degrees of lowest homogeneous components
/// and exact Krylov dimensions of the iterates.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub seed: MultiPoly,
    /// deg LHC(h^i(seed)) for i = 0..=budget; None once an iterate is zero.
    pub lhc_degrees: Vec<Option<usize>>,
    pub dims: Vec<usize>,
    pub status: ProbeStatus,
    pub budget: usize,
    pub convention: &'static str,
}

/// Bounded-evidence algebraicity probe: NON_ALGEBRAIC when the LHC degree
/// ladder of h^i(seed) is strictly increasing through the full budget,
/// ALGEBRAIC_BEHAVIOR when the Krylov span of the iterates stabilizes.
pub fn algebraicity_probe(
    g: &PolyEndo,
    seed: &MultiPoly,
    budget: usize,
    ctx: TruncContext,
) -> Result<ProbeReport, EndoError> {
    if seed.is_zero() {
        return Err(EndoError::ZeroSeed);
    }
    let capped = PolyEndo {
        images: g.images.clone(),
        cap: Some(match g.cap {
            Some(c) => c.min(ctx.cap),
            None => ctx.cap,
        }),
        inverse_images: None,
    };
    let uncapped = PolyEndo {
        images: g.images.clone(),
        cap: None,
        inverse_images: None,
    };
    let mut span = PolySpan::new(seed.nvars());
    let mut lhc_degrees = Vec::new();
    let mut dims = Vec::new();
    let mut current = seed.truncate(ctx);
    let mut prev: Option<MultiPoly> = None;
    let mut status = ProbeStatus::Inconclusive;
    for _i in 0..=budget {
        if current.is_zero() {
            // a truncated-to-zero iterate is only accepted when the exact
            // image of the previous iterate genuinely vanishes
            if let Some(p) = &prev {
                if !h_operator(&uncapped, p)?.is_zero() {
                    return Err(EndoError::CapTooSmall { cap: ctx.cap });
                }
            }
        }
        lhc_degrees.push(current.ord());
        let grew = span.insert(&current);
        dims.push(span.dim());
        if !grew {
            status = ProbeStatus::AlgebraicBehavior;
            break;
        }
        prev = Some(current.clone());
        current = h_operator(&capped, &current)?;
    }
    if status == ProbeStatus::Inconclusive {
        let strictly_increasing = lhc_degrees
            .windows(2)
            .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a < b));
        // truncation only leaves low degrees intact when the pullback
        // images carry no constant part
        let degree_coherent = g.images.iter().all(|p| p.ord() != Some(0));
        if strictly_increasing && degree_coherent && lhc_degrees.len() == budget + 1 {
            status = ProbeStatus::NonAlgebraic;
        }
    }
    Ok(ProbeReport {
        seed: seed.clone(),
        lhc_degrees,
        dims,
        status,
        budget,
        convention: COMPOSE_CONVENTION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::parse_derivation;
    use crate::parse::parse_poly;

    fn p(s: &str, n: usize) -> MultiPoly {
        parse_poly(s, n).unwrap()
    }

    fn d(s: &str, n: usize) -> Derivation {
        parse_derivation(s, n).unwrap()
    }

    fn one() -> Scalar {
        Scalar::one()
    }

    #[test]
    fn exp_of_triangular_lnd() {
        let e = exp_derivation(&d("[x2^2, 0]", 2), &one(), None).unwrap();
        assert_eq!(e.images(), &[p("x1 + x2^2", 2), p("x2", 2)]);
        assert!(e.is_invertible());
    }

    #[test]
    fn exp_at_zero_time_is_identity() {
        let e = exp_derivation(&d("[x2^2, x1^2]", 2), &Scalar::zero(), None).unwrap();
        assert!(e.is_identity());
    }

    #[test]
    fn exp_semisimple_rejected() {
        let err = exp_derivation(&d("[x1, 0]", 2), &one(), None).unwrap_err();
        assert_eq!(err, EndoError::NotExponentiable);
    }

    #[test]
    fn exp_truncated_order_raising() {
        // (x2^2, x1^2) raises ord on both generators; truncated exp exists
        let ctx = TruncContext::new(6);
        let e = exp_derivation(&d("[x2^2, x1^2]", 2), &one(), Some(ctx)).unwrap();
        assert_eq!(e.cap(), Some(6));
        // first terms: x1 + x2^2 + x1^2 x2 + ...
        let img = &e.images()[0];
        assert_eq!(img.component(1), p("x1", 2));
        assert_eq!(img.component(2), p("x2^2", 2));
        assert!(!e.is_invertible());
    }

    #[test]
    fn compose_model_pair() {
        let a = exp_derivation(&d("[x2^2, 0]", 2), &one(), None).unwrap();
        let b = exp_derivation(&d("[0, x1^2]", 2), &one(), None).unwrap();
        let g = compose(&a, &b).unwrap();
        assert_eq!(g.images()[0], p("x1 + (x2 + x1^2)^2", 2));
        assert_eq!(g.images()[1], p("x2 + x1^2", 2));
    }

    #[test]
    fn compose_identity_and_inverse() {
        let a = exp_derivation(&d("[x2^2, 0]", 2), &one(), None).unwrap();
        let id = PolyEndo::identity(2);
        assert_eq!(compose(&a, &id).unwrap().images(), a.images());
        let inv = a.inverse().unwrap();
        assert!(compose(&a, &inv).unwrap().is_identity());
    }

    #[test]
    fn commutator_examples() {
        let dx = exp_derivation(&d("[1, 0]", 2), &one(), None).unwrap();
        let dy = exp_derivation(&d("[0, 1]", 2), &one(), None).unwrap();
        assert!(group_commutator(&dx, &dy).unwrap().is_identity());
        assert!(group_commutator(&dx, &dx).unwrap().is_identity());

        // a = exp(dy), b = exp(y dx): the commutator translates x by -1
        let a = exp_derivation(&d("[0, 1]", 2), &one(), None).unwrap();
        let b = exp_derivation(&d("[x2, 0]", 2), &one(), None).unwrap();
        let c = group_commutator(&a, &b).unwrap();
        assert_eq!(c.images()[0], p("x1 - 1", 2));
        assert_eq!(c.images()[1], p("x2", 2));
    }

    #[test]
    fn commutator_requires_invertibility() {
        let plain = PolyEndo::from_images(vec![p("x1^2", 2), p("x2", 2)], None);
        let a = exp_derivation(&d("[1, 0]", 2), &one(), None).unwrap();
        assert_eq!(group_commutator(&a, &plain).unwrap_err(), EndoError::NonInvertible);
    }

    #[test]
    fn h_operator_model_formula() {
        // model g at d = 2: h(x1) = (x2 + x1^2)^2 - x2^2... pullback of x1
        // is x1 + (x2+x1^2)^2, so h(x1) = (x2+x1^2)^2 with LHC x2^2
        let a = exp_derivation(&d("[x2^2, 0]", 2), &one(), None).unwrap();
        let b = exp_derivation(&d("[0, x1^2]", 2), &one(), None).unwrap();
        let g = compose(&a, &b).unwrap();
        let h1 = h_operator(&g, &p("x1", 2)).unwrap();
        assert_eq!(h1, p("(x2 + x1^2)^2", 2));
        assert_eq!(h1.lhc().unwrap(), p("x2^2", 2));

        let hxy = h_operator(&g, &p("x1*x2", 2)).unwrap();
        assert_eq!(hxy.lhc().unwrap(), p("x2^3 + x1^3", 2));

        assert!(h_operator(&PolyEndo::identity(2), &p("x1*x2", 2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn probe_translation_is_algebraic() {
        let g = exp_derivation(&d("[1, 0]", 2), &one(), None).unwrap();
        let r = algebraicity_probe(&g, &p("x1", 2), 5, TruncContext::new(8)).unwrap();
        assert_eq!(r.status, ProbeStatus::AlgebraicBehavior);
        assert_eq!(r.dims, vec![1, 2, 2]);
    }

    #[test]
    fn probe_model_non_algebraic() {
        let a = exp_derivation(&d("[x2^2, 0]", 2), &one(), None).unwrap();
        let b = exp_derivation(&d("[0, x1^2]", 2), &one(), None).unwrap();
        let g = compose(&a, &b).unwrap();
        let r = algebraicity_probe(&g, &p("x1", 2), 5, TruncContext::new(12)).unwrap();
        assert_eq!(r.status, ProbeStatus::NonAlgebraic);
        let degs: Vec<usize> = r.lhc_degrees.iter().map(|o| o.unwrap()).collect();
        assert_eq!(degs, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn probe_rejects_small_cap() {
        let a = exp_derivation(&d("[x2^2, 0]", 2), &one(), None).unwrap();
        let b = exp_derivation(&d("[0, x1^2]", 2), &one(), None).unwrap();
        let g = compose(&a, &b).unwrap();
        let err = algebraicity_probe(&g, &p("x1", 2), 8, TruncContext::new(5)).unwrap_err();
        assert!(matches!(err, EndoError::CapTooSmall { cap: 5 }));
    }

    #[test]
    fn one_parameter_group_law() {
        let del = d("[x2^2, 0]", 2);
        let t = Scalar::new(3.into(), 7.into());
        let s = Scalar::new((-2).into(), 5.into());
        let lhs = compose(
            &exp_derivation(&del, &t, None).unwrap(),
            &exp_derivation(&del, &s, None).unwrap(),
        )
        .unwrap();
        let rhs = exp_derivation(&del, &(t + s), None).unwrap();
        assert_eq!(lhs.images(), rhs.images());
    }
}
