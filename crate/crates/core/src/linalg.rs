//! Exact rational linear algebra: dense matrices, univariate polynomials,
//! and incremental span computation over coefficient vectors of
//! multivariate polynomials.

use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

use crate::poly::{Monomial, MultiPoly, Scalar};

/// Dense square-capable matrix over Q, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: Vec<Vec<Scalar>>,
}

impl QMatrix {
    pub fn zero(n: usize, m: usize) -> Self {
        QMatrix {
            rows: vec![vec![Scalar::zero(); m]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.rows[i][i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        QMatrix { rows }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMatrix {
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&v| Scalar::from_integer(v.into())).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|c| c.is_zero()))
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        QMatrix {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        QMatrix {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> QMatrix {
        QMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x * c).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        let n = self.rows.len();
        let k = other.rows.len();
        let m = other.rows.first().map(|r| r.len()).unwrap_or(0);
        let mut out = QMatrix::zero(n, m);
        for i in 0..n {
            for t in 0..k {
                if self.rows[i][t].is_zero() {
                    continue;
                }
                for j in 0..m {
                    if other.rows[t][j].is_zero() {
                        continue;
                    }
                    out.rows[i][j] = &out.rows[i][j] + &self.rows[i][t] * &other.rows[t][j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        (0..self.dim()).map(|i| self.rows[i][i].clone()).sum()
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut inv = QMatrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
                inv[col][j] = &inv[col][j] / &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = &a[r][j] - &f * &a[col][j];
                    inv[r][j] = &inv[r][j] - &f * &inv[col][j];
                }
            }
        }
        Some(QMatrix { rows: inv })
    }

    /// Characteristic polynomial via the Faddeev-LeVerrier recursion,
    /// monic of degree n, coefficients ascending.
    pub fn char_poly(&self) -> QPoly {
        let n = self.dim();
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut mk = self.clone();
        for k in 1..=n {
            let c = -mk.trace() / Scalar::from_integer((k as i64).into());
            coeffs[n - k] = c.clone();
            if k < n {
                let shifted = mk.add(&QMatrix::identity(n).scale(&c));
                mk = self.mul(&shifted);
            }
        }
        QPoly { coeffs }
    }

    /// Minimal polynomial: least monic combination annihilating the matrix.
    pub fn min_poly(&self) -> QPoly {
        let n = self.dim();
        let flat = |m: &QMatrix| -> Vec<Scalar> {
            m.rows.iter().flatten().cloned().collect()
        };
        let mut elim = DenseElim::new();
        let mut power = QMatrix::identity(n);
        let mut powers = vec![flat(&power)];
        loop {
            power = power.mul(self);
            let v = flat(&power);
            if let Some(coords) = elim.coordinates_after_insert(&powers, &v) {
                // power^k = sum coords[i] * power^i  =>  minpoly
                let mut coeffs: Vec<Scalar> = coords.iter().map(|c| -c.clone()).collect();
                coeffs.push(Scalar::one());
                return QPoly { coeffs }.normalized();
            }
            powers.push(v);
        }
    }
}

/// Helper used by `min_poly`: dense elimination that, given a list of
/// independent vectors, expresses a new vector in them if dependent.
struct DenseElim;

impl DenseElim {
    fn new() -> Self {
        DenseElim
    }

    fn coordinates_after_insert(
        &mut self,
        basis: &[Vec<Scalar>],
        v: &[Scalar],
    ) -> Option<Vec<Scalar>> {
        // Solve basis^T c = v by Gaussian elimination on the augmented system.
        let m = v.len();
        let k = basis.len();
        let mut aug: Vec<Vec<Scalar>> = (0..m)
            .map(|row| {
                let mut r: Vec<Scalar> = basis.iter().map(|b| b[row].clone()).collect();
                r.push(v[row].clone());
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..k {
            let Some(p) = (rank..m).find(|&r| !aug[r][col].is_zero()) else {
                continue;
            };
            aug.swap(rank, p);
            let pv = aug[rank][col].clone();
            for j in col..=k {
                aug[rank][j] = &aug[rank][j] / &pv;
            }
            for r in 0..m {
                if r == rank || aug[r][col].is_zero() {
                    continue;
                }
                let f = aug[r][col].clone();
                for j in col..=k {
                    aug[r][j] = &aug[r][j] - &f * &aug[rank][j];
                }
            }
            pivots.push(col);
            rank += 1;
        }
        // inconsistent => v independent of basis
        for r in rank..m {
            if !aug[r][k].is_zero() {
                return None;
            }
        }
        let mut coords = vec![Scalar::zero(); k];
        for (row, &col) in pivots.iter().enumerate() {
            coords[col] = aug[row][k].clone();
        }
        Some(coords)
    }
}

/// Univariate polynomial over Q, coefficients ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<Scalar>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn normalized(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn derivative(&self) -> QPoly {
        QPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Scalar::from_integer((i as i64).into()))
                .collect(),
        }
    }

    pub fn monic(&self) -> QPoly {
        match self.degree() {
            None => QPoly::zero(),
            Some(d) => {
                let lead = self.coeffs[d].clone();
                QPoly {
                    coeffs: self.coeffs[..=d].iter().map(|c| c / &lead).collect(),
                }
            }
        }
    }

    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.clone().normalized();
        let mut quot = vec![
            Scalar::zero();
            self.degree().map_or(0, |d| d.saturating_sub(dd) + 1)
        ];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let f = &rem.coeffs[rd] / &lead;
            quot[rd - dd] = f.clone();
            for i in 0..=dd {
                rem.coeffs[rd - dd + i] =
                    &rem.coeffs[rd - dd + i] - &f * &divisor.coeffs[i];
            }
            rem = rem.normalized();
        }
        (QPoly { coeffs: quot }.normalized(), rem)
    }

    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone().normalized();
        let mut b = other.clone().normalized();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree part: self / gcd(self, self').
    pub fn squarefree_part(&self) -> QPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) || g.is_zero() {
            return self.monic();
        }
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        q.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Horner evaluation at a matrix argument.
    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.dim();
        let mut acc = QMatrix::zero(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            for i in 0..n {
                acc.rows[i][i] = &acc.rows[i][i] + c;
            }
        }
        acc
    }
}

/// Jordan-Chevalley decomposition M = S + N over Q, with no field
/// extensions: Newton iteration on the squarefree part of the
/// characteristic polynomial. S has squarefree minimal polynomial,
/// N is nilpotent, and SN = NS (S is a polynomial in M).
pub fn jordan_chevalley(m: &QMatrix) -> (QMatrix, QMatrix) {
    let n = m.dim();
    if n == 0 {
        return (QMatrix::zero(0, 0), QMatrix::zero(0, 0));
    }
    let chi = m.char_poly();
    let q = chi.squarefree_part();
    let qp = q.derivative();
    let mut s = m.clone();
    // q(S_k) stays nilpotent, so q'(S_k) is invertible; the iteration
    // squares the nilpotency order, so ceil(log2 n) + 1 steps suffice.
    let mut steps = 0usize;
    loop {
        let qs = q.eval_matrix(&s);
        if qs.is_zero() {
            break;
        }
        let inv = qp
            .eval_matrix(&s)
            .inverse()
            .expect("q'(S) invertible along the Chevalley iteration");
        s = s.sub(&qs.mul(&inv));
        steps += 1;
        assert!(steps <= n + 2, "Chevalley iteration failed to converge");
    }
    let nil = m.sub(&s);
    (s, nil)
}

/// Incremental reduced row-echelon span of polynomial coefficient vectors,
/// tracking each reduced row as a combination of the originally inserted
/// independent polynomials so members can be re-expressed in that basis.
pub struct PolySpan {
    nvars: usize,
    rows: Vec<BTreeMap<Monomial, Scalar>>,
    combos: Vec<Vec<Scalar>>, // rows[i] = sum_j combos[i][j] * original_j
    pivot_of: HashMap<Monomial, usize>,
    pivots: Vec<Monomial>,
}

impl PolySpan {
    pub fn new(nvars: usize) -> Self {
        PolySpan {
            nvars,
            rows: Vec::new(),
            combos: Vec::new(),
            pivot_of: HashMap::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn to_map(p: &MultiPoly) -> BTreeMap<Monomial, Scalar> {
        p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
    }

    /// Reduce `v` against current rows; returns residual and the
    /// combination of original basis elements that was subtracted.
    fn reduce(
        &self,
        mut v: BTreeMap<Monomial, Scalar>,
    ) -> (BTreeMap<Monomial, Scalar>, Vec<Scalar>) {
        let mut used = vec![Scalar::zero(); self.rows.len()];
        loop {
            let hit = v
                .iter()
                .find_map(|(m, _)| self.pivot_of.get(m).copied());
            let Some(row) = hit else { break };
            let pivot = &self.pivots[row];
            let f = v.get(pivot).cloned().unwrap_or_else(Scalar::zero);
            if f.is_zero() {
                unreachable!("pivot lookup returned row without pivot coefficient");
            }
            for (m, c) in &self.rows[row] {
                let entry = v.entry(m.clone()).or_insert_with(Scalar::zero);
                *entry = &*entry - &f * c;
            }
            v.retain(|_, c| !c.is_zero());
            used[row] = &used[row] + &f;
        }
        (v, used)
    }

    /// Insert a polynomial; returns true if it enlarged the span.
    pub fn insert(&mut self, p: &MultiPoly) -> bool {
        assert_eq!(p.nvars(), self.nvars);
        let (mut residual, used) = self.reduce(Self::to_map(p));
        if residual.is_empty() {
            return false;
        }
        // normalize on the leading monomial
        let pivot = residual.keys().next_back().unwrap().clone();
        let lead = residual[&pivot].clone();
        for c in residual.values_mut() {
            *c = &*c / &lead;
        }
        // residual = (p - sum used_i row_i) / lead; express in originals
        let k = self.rows.len(); // index of the new original
        let mut new_combo = vec![Scalar::zero(); k + 1];
        for (j, u) in used.iter().enumerate() {
            for (t, c) in self.combos[j].iter().enumerate() {
                new_combo[t] = &new_combo[t] - &(u * c) / &lead;
            }
        }
        new_combo[k] = Scalar::one() / &lead;
        for c in self.combos.iter_mut() {
            c.push(Scalar::zero());
        }
        // keep reduced echelon form: clear the new pivot from older rows
        let new_row = residual;
        for i in 0..self.rows.len() {
            let f = self.rows[i].get(&pivot).cloned();
            let Some(f) = f else { continue };
            for (m, c) in &new_row {
                let entry = self.rows[i].entry(m.clone()).or_insert_with(Scalar::zero);
                *entry = &*entry - &f * c;
            }
            self.rows[i].retain(|_, c| !c.is_zero());
            for (t, c) in new_combo.iter().enumerate() {
                self.combos[i][t] = &self.combos[i][t] - &f * c;
            }
        }
        self.pivot_of.insert(pivot.clone(), self.rows.len());
        self.pivots.push(pivot);
        self.rows.push(new_row);
        self.combos.push(new_combo);
        true
    }

    pub fn contains(&self, p: &MultiPoly) -> bool {
        self.reduce(Self::to_map(p)).0.is_empty()
    }

    /// Coordinates of `p` in the originally inserted independent
    /// polynomials; `None` if `p` is outside the span.
    pub fn coordinates(&self, p: &MultiPoly) -> Option<Vec<Scalar>> {
        let (residual, used) = self.reduce(Self::to_map(p));
        if residual.is_empty() {
            Some(used.iter().zip(self.combos.iter()).fold(
                vec![Scalar::zero(); self.combos.first().map_or(0, |c| c.len())],
                |mut acc, (u, combo)| {
                    for (a, c) in acc.iter_mut().zip(combo) {
                        *a = &*a + u * c;
                    }
                    acc
                },
            ))
        } else {
            None
        }
    }
}
