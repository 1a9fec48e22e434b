//! End-to-end counterexample pipelines: the model pair of non-equivalent
//! locally nilpotent derivations, kernel lifting against a derivation
//! whose lowest component is d/dx1, the not-locally-finite order ladder,
//! and the non-algebraicity certificate for the composed unipotent
//! automorphism.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::derivation::{equivalent, Derivation, DerivationError, EquivalenceStatus};
use crate::endo::{algebraicity_probe, compose, exp_derivation, EndoError, ProbeReport,
    ProbeStatus};
use crate::error::PolyError;
use crate::poly::{MultiPoly, Scalar, TruncContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("model pair requires d >= 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("lift input g0 must not involve x1")]
    SeedContainsX1,
    #[error("derivation's lowest component must be d/dx1: constant part 1 on x1, none elsewhere")]
    BadLowestComponent,
    #[error("truncation cap {cap} too small: need 1 + budget*(d-1) < cap")]
    CapTooSmall { cap: usize },
    #[error("model pair failed self-validation: {0}")]
    ModelValidation(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Endo(#[from] EndoError),
}

/// The model data on Q[x1,x2]: d1 = d/dx1, d2 = d/dx2, f1 = x2^d,
/// f2 = x1^d, and del = f1*d1 + f2*d2.
#[derive(Clone, Debug)]
pub struct ModelPair {
    pub d: usize,
    pub d1: Derivation,
    pub d2: Derivation,
    pub f1: MultiPoly,
    pub f2: MultiPoly,
    pub del: Derivation,
}

/// Construct and self-validate the model pair for a given d >= 2:
/// f_i lies in ker d_i, del has the stated lowest component, and
/// d1, d2 are not equivalent.
pub fn build_model_pair(d: usize) -> Result<ModelPair, CertifyError> {
    if d < 2 {
        return Err(CertifyError::DegreeTooSmall(d));
    }
    let n = 2;
    let one = MultiPoly::one(n);
    let zero = MultiPoly::zero(n);
    let d1 = Derivation::new(vec![one.clone(), zero.clone()]);
    let d2 = Derivation::new(vec![zero.clone(), one]);
    let f1 = MultiPoly::var(1, n).pow(d as u32, None)?;
    let f2 = MultiPoly::var(0, n).pow(d as u32, None)?;
    let del = d1.mul_poly(&f1)?.add(&d2.mul_poly(&f2)?)?;
    if !d1.apply(&f1, None)?.is_zero() {
        return Err(CertifyError::ModelValidation("f1 not in ker d1".into()));
    }
    if !d2.apply(&f2, None)?.is_zero() {
        return Err(CertifyError::ModelValidation("f2 not in ker d2".into()));
    }
    if del.image(0) != &f1 || del.image(1) != &f2 {
        return Err(CertifyError::ModelValidation(
            "lowest component is not x2^d d/dx1 + x1^d d/dx2".into(),
        ));
    }
    let eq = equivalent(&d1, &d2, 4)?;
    if eq.status != EquivalenceStatus::NotEquivalent {
        return Err(CertifyError::ModelValidation(
            "d1 and d2 unexpectedly equivalent".into(),
        ));
    }
    Ok(ModelPair { d, d1, d2, f1, f2, del })
}

fn constant_part(p: &MultiPoly) -> Scalar {
    p.component(0)
        .terms()
        .next()
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Scalar::zero)
}

/// Lift g0 in Q[x2..xn] to an element of ker del, degree by degree up to
/// the cap: the x1-free monomials of the lift are exactly g0, and
/// del applied to the lift vanishes modulo the cap.
pub fn kernel_lift(
    del: &Derivation,
    g0: &MultiPoly,
    cap: usize,
) -> Result<MultiPoly, CertifyError> {
    let n = del.nvars();
    if g0.terms().any(|(m, _)| m.0[0] != 0) {
        return Err(CertifyError::SeedContainsX1);
    }
    if !constant_part(del.image(0)).is_one() {
        return Err(CertifyError::BadLowestComponent);
    }
    for i in 1..n {
        if !constant_part(del.image(i)).is_zero() {
            return Err(CertifyError::BadLowestComponent);
        }
    }
    let ctx = TruncContext::new(cap);
    // start from the x1-free skeleton; each step determines the next
    // homogeneous component from del applied to what is known so far
    let mut lift = g0.truncate(ctx);
    // killing the residue in degree k needs a degree k+1 correction, so the
    // lift itself may carry terms of degree cap
    for k in 0..cap {
        let rhs = del.apply(&lift, Some(ctx))?.component(k).neg();
        let correction = rhs.partial_integrate(0);
        lift = lift.add(&correction, None)?;
    }
    Ok(lift)
}

/// One rung of the not-locally-finite order ladder.
#[derive(Clone, Debug)]
pub struct LadderRung {
    pub k: usize,
    pub ord: Option<usize>,
    pub expected_ord: usize,
    pub ord_ok: bool,
    /// LHC coefficients are non-negative integers with positive sum.
    pub lhc_ok: bool,
}

#[derive(Clone, Debug)]
pub struct LadderReport {
    pub rungs: Vec<LadderRung>,
    /// The per-application order increase measured at the first step.
    pub step: i64,
    pub verified: bool,
}

fn lhc_nonneg_integers_positive_sum(p: &MultiPoly) -> bool {
    let Ok(lhc) = p.lhc() else { return false };
    let mut sum = Scalar::zero();
    for (_, c) in lhc.terms() {
        if !c.denom().is_one() || c.is_negative() {
            return false;
        }
        sum = sum + c;
    }
    sum.is_positive()
}

/// Verify the order ladder ord(del^{k-1} seed) = 1 + (k-1)*e for
/// k = 1..=budget, where e is the order increase measured at the first
/// application, together with the non-negative-integer LHC condition.
/// For the model pair at d = 2 this is exactly ord = k.
pub fn certify_not_locally_finite(
    del: &Derivation,
    seed: &MultiPoly,
    budget: usize,
) -> Result<LadderReport, CertifyError> {
    assert!(budget >= 2);
    let mut rungs: Vec<LadderRung> = Vec::with_capacity(budget);
    let mut current = seed.clone();
    let mut step: i64 = 0;
    let mut verified = true;
    for k in 1..=budget {
        if k == 2 {
            // measure the progression from the first application
            step = match (rungs[0].ord, current.ord()) {
                (Some(a), Some(b)) => b as i64 - a as i64,
                _ => 0,
            };
            if step < 1 {
                verified = false;
            }
        }
        let expected_ord = (1 + (k as i64 - 1) * step.max(1)) as usize;
        let ord = current.ord();
        let ord_ok = k == 1 && ord == Some(1)
            || k > 1 && step >= 1 && ord == Some(expected_ord);
        let lhc_ok = lhc_nonneg_integers_positive_sum(&current);
        if !(ord_ok && lhc_ok) {
            verified = false;
        }
        rungs.push(LadderRung {
            k,
            ord,
            expected_ord,
            ord_ok,
            lhc_ok,
        });
        if k < budget {
            current = del.apply(&current, None)?;
        }
    }
    Ok(LadderReport {
        rungs,
        step,
        verified,
    })
}

/// Non-algebraicity certificate for the composed model automorphism.
#[derive(Clone, Debug)]
pub struct NonAlgebraicReport {
    pub d: usize,
    pub budget: usize,
    pub cap: usize,
    pub probe: ProbeReport,
    /// deg LHC(h^i(x1)) matches 1 + i(d-1) at every i.
    pub degree_law_ok: bool,
    pub dims_strictly_increasing: bool,
    pub verified: bool,
}

/// Build the model pair for d, exponentiate both factors exactly, compose,
/// and probe the seed x1: verified when deg LHC(h^i(x1)) = 1 + i(d-1) at
/// every i <= budget and the Krylov dimension strictly increases.
pub fn certify_non_algebraic(
    d: usize,
    budget: usize,
    cap: usize,
) -> Result<NonAlgebraicReport, CertifyError> {
    if 1 + budget * (d.saturating_sub(1)) >= cap {
        return Err(CertifyError::CapTooSmall { cap });
    }
    let model = build_model_pair(d)?;
    let one = Scalar::one();
    let a = exp_derivation(&model.d1.mul_poly(&model.f1)?, &one, None)?;
    let b = exp_derivation(&model.d2.mul_poly(&model.f2)?, &one, None)?;
    let g = compose(&a, &b)?;
    let seed = MultiPoly::var(0, 2);
    let probe = algebraicity_probe(&g, &seed, budget, TruncContext::new(cap))?;
    let degree_law_ok = (0..=budget).all(|i| {
        probe.lhc_degrees.get(i).copied().flatten() == Some(1 + i * (d - 1))
    });
    let dims_strictly_increasing = probe.dims.windows(2).all(|w| w[0] < w[1])
        && probe.dims.len() == budget + 1;
    let verified =
        degree_law_ok && dims_strictly_increasing && probe.status == ProbeStatus::NonAlgebraic;
    Ok(NonAlgebraicReport {
        d,
        budget,
        cap,
        probe,
        degree_law_ok,
        dims_strictly_increasing,
        verified,
    })
}
