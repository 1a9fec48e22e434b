//! Jordan decomposition of locally finite derivations: closure of a seed
//! set into a finite-dimensional invariant subspace, eigenvalue-free
//! Jordan-Chevalley splitting of the restricted matrix, lifting back to a
//! commuting semisimple/nilpotent derivation pair, and conjugation by the
//! exponential of a nilpotent adjoint ladder.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::derivation::{is_lnd, krylov, Derivation, DerivationError, FinitenessReport,
    FinitenessStatus, NilpotencyStatus};
use crate::grading::{decompose_derivation, Grading, Weight};
use crate::linalg::{jordan_chevalley, PolySpan, QMatrix};
use crate::poly::{MultiPoly, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JordanError {
    #[error("span of seeds keeps growing past dimension {bound}; not locally finite on seeds")]
    NotLocallyFiniteOnSeeds { bound: usize },
    #[error("lifted maps disagree with the matrix action on the subspace")]
    LiftInconsistent,
    #[error("adjoint ladder did not reach zero within {budget} steps")]
    LadderDiverges { budget: usize },
    #[error("nilpotent part of the lift failed the nilpotency certificate")]
    NilpotentPartNotLnd,
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// A finite-dimensional delta-stable subspace with the matrix of delta in
/// its basis: column j holds the coordinates of delta(basis[j]).
#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    pub basis: Vec<MultiPoly>,
    pub matrix: QMatrix,
    pub contains_generators: bool,
}

/// Close the span of the seeds under delta until stable; errors out once
/// the dimension exceeds `bound`.
pub fn invariant_subspace(
    delta: &Derivation,
    seeds: &[MultiPoly],
    bound: usize,
) -> Result<InvariantSubspace, JordanError> {
    assert!(!seeds.is_empty());
    let n = delta.nvars();
    let mut span = PolySpan::new(n);
    let mut basis: Vec<MultiPoly> = Vec::new();
    for s in seeds {
        if span.insert(s) {
            basis.push(s.clone());
        }
    }
    let mut next = 0usize;
    while next < basis.len() {
        let image = delta.apply(&basis[next], None)?;
        if span.insert(&image) {
            if basis.len() >= bound {
                return Err(JordanError::NotLocallyFiniteOnSeeds { bound });
            }
            basis.push(image);
        }
        next += 1;
    }
    let dim = basis.len();
    let mut matrix = QMatrix::zero(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        let image = delta.apply(b, None)?;
        let coords = span
            .coordinates(&image)
            .expect("closure is delta-stable by construction");
        for (k, c) in coords.into_iter().enumerate() {
            matrix.rows[k][j] = c;
        }
    }
    let contains_generators =
        (0..n).all(|i| span.contains(&MultiPoly::var(i, n)));
    Ok(InvariantSubspace {
        basis,
        matrix,
        contains_generators,
    })
}

/// Commuting semisimple/nilpotent split of a locally finite derivation.
#[derive(Clone, Debug)]
pub struct JordanPair {
    pub semisimple: Derivation,
    pub nilpotent: Derivation,
    pub subspace: InvariantSubspace,
}

fn lift(matrix: &QMatrix, subspace: &InvariantSubspace, nvars: usize) -> Derivation {
    // generators were seeded first, so basis[i] = x_{i+1}
    let mut images = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let mut img = MultiPoly::zero(nvars);
        for (k, b) in subspace.basis.iter().enumerate() {
            if matrix.rows[k][i].is_zero() {
                continue;
            }
            img = img.add(&b.scale(&matrix.rows[k][i]), None).unwrap();
        }
        images.push(img);
    }
    Derivation::new(images)
}

fn matrix_action_matches(
    d: &Derivation,
    matrix: &QMatrix,
    subspace: &InvariantSubspace,
) -> Result<bool, DerivationError> {
    for (j, b) in subspace.basis.iter().enumerate() {
        let mut expected = MultiPoly::zero(d.nvars());
        for (k, bk) in subspace.basis.iter().enumerate() {
            expected = expected
                .add(&bk.scale(&matrix.rows[k][j]), None)
                .unwrap();
        }
        if d.apply(b, None)? != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Jordan decomposition of a derivation that is locally finite on the
/// generators: delta = semisimple + nilpotent with zero bracket.
pub fn jordan_decompose(delta: &Derivation, bound: usize) -> Result<JordanPair, JordanError> {
    let n = delta.nvars();
    let generators: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(i, n)).collect();
    let subspace = invariant_subspace(delta, &generators, bound)?;
    let (s, nil) = jordan_chevalley(&subspace.matrix);
    let semisimple = lift(&s, &subspace, n);
    let nilpotent = lift(&nil, &subspace, n);
    // the lifted generator-image maps must reproduce the matrix action on
    // the whole subspace, which is the Leibniz consistency of the lift
    if !matrix_action_matches(&semisimple, &s, &subspace)?
        || !matrix_action_matches(&nilpotent, &nil, &subspace)?
    {
        return Err(JordanError::LiftInconsistent);
    }
    if semisimple.add(&nilpotent)? != *delta {
        return Err(JordanError::LiftInconsistent);
    }
    if !semisimple.lie_bracket(&nilpotent)?.is_zero() {
        return Err(JordanError::LiftInconsistent);
    }
    let dim = subspace.basis.len();
    if is_lnd(&nilpotent, dim.max(bound) + 1).status != NilpotencyStatus::ProvedLnd {
        return Err(JordanError::NilpotentPartNotLnd);
    }
    Ok(JordanPair {
        semisimple,
        nilpotent,
        subspace,
    })
}

/// Conjugate delta by exp(dp) at the Lie-algebra level. Pullbacks compose
/// contravariantly, so the conjugated flow has generator
/// e^{-dp} delta e^{dp} = sum_k (-1)^k ad_{dp}^k(delta) / k!.
/// Requires the adjoint ladder to reach zero.
pub fn ad_conjugate(
    dp: &Derivation,
    delta: &Derivation,
    budget: usize,
) -> Result<Derivation, JordanError> {
    let mut sum = delta.clone();
    let mut term = delta.clone();
    let mut coeff = Scalar::one();
    for k in 1..=budget {
        term = dp.lie_bracket(&term)?;
        if term.is_zero() {
            return Ok(sum);
        }
        coeff = -coeff / Scalar::from_integer((k as i64).into());
        sum = sum.add(&term.scale(&coeff))?;
    }
    Err(JordanError::LadderDiverges { budget })
}

/// Per-generator local-finiteness check of delta - partial, with the
/// grading decomposition of partial echoed for context.
#[derive(Clone, Debug)]
pub struct ShiftReport {
    pub difference: Derivation,
    pub per_generator: Vec<FinitenessReport>,
    pub component_weights: Vec<Weight>,
    pub all_stabilized: bool,
}

/// Check that delta - partial stays locally finite on every generator;
/// this is the testable face of the shift lemma for abelian unipotent
/// groups.
pub fn semisimple_shift_check(
    delta: &Derivation,
    partial: &Derivation,
    g: &Grading,
    bound: usize,
) -> Result<ShiftReport, JordanError> {
    let difference = delta.sub(partial)?;
    let n = delta.nvars();
    let mut per_generator = Vec::with_capacity(n);
    for i in 0..n {
        per_generator.push(krylov(&difference, &MultiPoly::var(i, n), bound, None)?);
    }
    let all_stabilized = per_generator
        .iter()
        .all(|r| r.status == FinitenessStatus::LocallyFiniteOnSeed);
    let component_weights = if partial.is_zero() {
        Vec::new()
    } else {
        decompose_derivation(g, partial).into_keys().collect()
    };
    Ok(ShiftReport {
        difference,
        per_generator,
        component_weights,
        all_stabilized,
    })
}
