//! Z^r-gradings from integer weight matrices: homogeneous decomposition of
//! polynomials and derivations, weight polytopes with exact vertex
//! extraction (r <= 2), and the nonzero-vertex nilpotency checker.

use std::collections::BTreeMap;
use thiserror::Error;

use crate::derivation::{is_lnd, Derivation, NilpotencyVerdict};
use crate::poly::{Monomial, MultiPoly};

/// A weight vector in the character lattice Z^r.
pub type Weight = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradingError {
    #[error("grading rank {0} unsupported; only r in {{1, 2}}")]
    UnsupportedRank(usize),
    #[error("weight matrix must have {expected} columns, got {got}")]
    BadWeightMatrix { expected: usize, got: usize },
    #[error("the zero derivation has no weight polytope")]
    ZeroDerivation,
}

/// Integer weight matrix defining a Z^r-grading: column i is the weight
/// of x_{i+1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    weights: Vec<Vec<i64>>, // r rows, n columns
    nvars: usize,
}

impl Grading {
    pub fn new(weights: Vec<Vec<i64>>, nvars: usize) -> Result<Self, GradingError> {
        assert!(!weights.is_empty());
        for row in &weights {
            if row.len() != nvars {
                return Err(GradingError::BadWeightMatrix {
                    expected: nvars,
                    got: row.len(),
                });
            }
        }
        Ok(Grading { weights, nvars })
    }

    /// The total-degree grading: r = 1, all weights 1.
    pub fn total_degree(nvars: usize) -> Self {
        Grading {
            weights: vec![vec![1; nvars]],
            nvars,
        }
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Weight of the generator x_{i+1}.
    pub fn var_weight(&self, i: usize) -> Weight {
        self.weights.iter().map(|row| row[i]).collect()
    }

    pub fn monomial_weight(&self, m: &Monomial) -> Weight {
        self.weights
            .iter()
            .map(|row| {
                m.0.iter()
                    .zip(row)
                    .map(|(&e, &w)| e as i64 * w)
                    .sum()
            })
            .collect()
    }
}

/// Split a polynomial into its grading-homogeneous components; zero
/// components are omitted.
pub fn decompose_poly(g: &Grading, p: &MultiPoly) -> BTreeMap<Weight, MultiPoly> {
    let mut out: BTreeMap<Weight, MultiPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let w = g.monomial_weight(m);
        let entry = out
            .entry(w)
            .or_insert_with(|| MultiPoly::zero(p.nvars()));
        *entry = entry
            .add(
                &MultiPoly::from_terms([(m.clone(), c.clone())], p.nvars()),
                None,
            )
            .unwrap();
    }
    out
}

/// Split a derivation into weight components: the chi-component's image
/// on x_i is the (chi + w_i)-component of z(x_i), the unique convention
/// under which a chi-component sends weight mu to weight mu + chi.
pub fn decompose_derivation(g: &Grading, z: &Derivation) -> BTreeMap<Weight, Derivation> {
    let n = z.nvars();
    let mut images: BTreeMap<Weight, Vec<MultiPoly>> = BTreeMap::new();
    for i in 0..n {
        let wi = g.var_weight(i);
        for (w, comp) in decompose_poly(g, z.image(i)) {
            let chi: Weight = w.iter().zip(&wi).map(|(a, b)| a - b).collect();
            let entry = images
                .entry(chi)
                .or_insert_with(|| vec![MultiPoly::zero(n); n]);
            entry[i] = comp;
        }
    }
    images
        .into_iter()
        .map(|(chi, imgs)| (chi, Derivation::new(imgs)))
        .collect()
}

/// Weights of the nonzero components of a derivation together with the
/// extreme points of their convex hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPolytope {
    pub points: Vec<Weight>,
    pub vertices: Vec<Weight>,
}

pub fn weight_polytope(g: &Grading, z: &Derivation) -> Result<WeightPolytope, GradingError> {
    if z.is_zero() {
        return Err(GradingError::ZeroDerivation);
    }
    let points: Vec<Weight> = decompose_derivation(g, z).into_keys().collect();
    let vertices = match g.rank() {
        1 => {
            let min = points.iter().map(|w| w[0]).min().unwrap();
            let max = points.iter().map(|w| w[0]).max().unwrap();
            if min == max {
                vec![vec![min]]
            } else {
                vec![vec![min], vec![max]]
            }
        }
        2 => hull_2d(&points),
        r => return Err(GradingError::UnsupportedRank(r)),
    };
    Ok(WeightPolytope { points, vertices })
}

// Monotone-chain hull with strict turns: collinear edge-interior points
// are not vertices. Exact in i128.
fn hull_2d(points: &[Weight]) -> Vec<Weight> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|w| (w[0], w[1])).collect();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts.into_iter().map(|(a, b)| vec![a, b]).collect();
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let build = |iter: &mut dyn Iterator<Item = (i64, i64)>| {
        let mut chain: Vec<(i64, i64)> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain
    };
    let lower = build(&mut pts.iter().copied());
    let upper = build(&mut pts.iter().rev().copied());
    // vertices are returned as a sorted set, so the two chains can simply
    // be merged and deduplicated
    let mut hull: Vec<(i64, i64)> = lower;
    hull.extend(upper);
    hull.sort();
    hull.dedup();
    hull.into_iter().map(|(a, b)| vec![a, b]).collect()
}

/// Per-vertex nilpotency report for the nonzero-vertex components.
#[derive(Clone, Debug)]
pub struct VertexLndReport {
    pub polytope: WeightPolytope,
    /// (vertex weight, verdict on that component) for each nonzero vertex.
    pub verdicts: Vec<(Weight, NilpotencyVerdict)>,
    pub all_proved: bool,
}

/// For every nonzero vertex of the weight polytope, check that the
/// corresponding homogeneous component is locally nilpotent. Predicted to
/// hold whenever the input is locally finite.
pub fn check_vertex_lnd(
    g: &Grading,
    z: &Derivation,
    bound: usize,
) -> Result<VertexLndReport, GradingError> {
    let polytope = weight_polytope(g, z)?;
    let components = decompose_derivation(g, z);
    let mut verdicts = Vec::new();
    for v in &polytope.vertices {
        if v.iter().all(|&c| c == 0) {
            continue;
        }
        let comp = components
            .get(v)
            .expect("vertex weight has a nonzero component");
        verdicts.push((v.clone(), is_lnd(comp, bound)));
    }
    let all_proved = verdicts
        .iter()
        .all(|(_, v)| v.status == crate::derivation::NilpotencyStatus::ProvedLnd);
    Ok(VertexLndReport {
        polytope,
        verdicts,
        all_proved,
    })
}
