//! Smith and Hermite normal forms over the integers, and the two-vector
//! basis-extension machinery built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{LatticeMatrix, LatticeVector};
use crate::error::{Error, Result};

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d₁ | d₂ | …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithDecomposition {
    pub u: LatticeMatrix,
    pub d: LatticeMatrix,
    pub v: LatticeMatrix,
}

impl SmithDecomposition {
    /// The `min(rows, cols)` diagonal entries of `D`, zeros included.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Nonzero diagonal entries of `D`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Lattice basis of the integer kernel `{x : A x = 0}`: the trailing
    /// columns of `V`.
    pub fn kernel_basis(&self) -> Vec<LatticeVector> {
        (self.rank()..self.v.cols()).map(|j| self.v.column(j)).collect()
    }
}

/// Smallest nonzero |entry| in the lower-right block starting at `(t, t)`,
/// first in row-major order on ties.
fn smallest_pivot(d: &LatticeMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, b)| a < *b) {
                best = Some(((i, j), a));
            }
        }
    }
    best.map(|(pos, _)| pos)
}

pub fn smith_normal_form(a: &LatticeMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = LatticeMatrix::identity(m);
    let mut v = LatticeMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_pivot(&d, t) else {
                return SmithDecomposition { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&pivot);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&pivot);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, d, v }
}

/// Column-style Hermite form `A · W = H` with `W` unimodular.
///
/// `H` is lower echelon: each pivot is positive, entries to the right of a
/// pivot are zero and entries to its left are reduced modulo it. Columns are
/// processed in index order, so the result is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnHermite {
    pub h: LatticeMatrix,
    pub w: LatticeMatrix,
    /// `(row, column)` of each pivot.
    pub pivots: Vec<(usize, usize)>,
}

pub fn column_hermite(a: &LatticeMatrix) -> ColumnHermite {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut w = LatticeMatrix::identity(n);
    let mut pivots = Vec::new();
    let mut c = 0;
    for r in 0..m {
        if c >= n {
            break;
        }
        for j in c + 1..n {
            if h[(r, j)].is_zero() {
                continue;
            }
            if h[(r, c)].is_zero() {
                h.swap_cols(c, j);
                w.swap_cols(c, j);
                continue;
            }
            let (x, y) = (h[(r, c)].clone(), h[(r, j)].clone());
            let eg = x.extended_gcd(&y);
            let (mut g, mut s, mut t) = (eg.gcd, eg.x, eg.y);
            if g.is_negative() {
                g = -g;
                s = -s;
                t = -t;
            }
            let (xa, yb) = (&x / &g, &y / &g);
            // [[s, -yb], [t, xa]] has determinant (s·x + t·y)/g = 1.
            h.combine_cols(c, j, &s, &t, &-&yb, &xa);
            w.combine_cols(c, j, &s, &t, &-&yb, &xa);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_col(c);
            w.negate_col(c);
        }
        let pivot = h[(r, c)].clone();
        for left in 0..c {
            let q = -h[(r, left)].div_floor(&pivot);
            h.add_col_multiple(left, c, &q);
            w.add_col_multiple(left, c, &q);
        }
        pivots.push((r, c));
        c += 1;
    }
    ColumnHermite { h, w, pivots }
}

impl ColumnHermite {
    /// Whether `v` lies in the integer column span of the original matrix.
    pub fn spans(&self, v: &LatticeVector) -> bool {
        if v.rank() != self.h.rows() {
            return false;
        }
        let mut rest = v.clone().into_entries();
        for &(r, c) in &self.pivots {
            let p = &self.h[(r, c)];
            if !rest[r].is_multiple_of(p) {
                return false;
            }
            let q = &rest[r] / p;
            if q.is_zero() {
                continue;
            }
            for (i, x) in rest.iter_mut().enumerate() {
                *x -= &q * &self.h[(i, c)];
            }
        }
        rest.iter().all(Zero::is_zero)
    }
}

fn check_pair(v: &LatticeVector, w: &LatticeVector) -> Result<()> {
    if v.rank() != w.rank() {
        return Err(Error::dimension(v.rank(), w.rank()));
    }
    if v.rank() < 2 {
        return Err(Error::domain("basis extension needs ambient rank at least 2"));
    }
    if v.is_zero() || w.is_zero() {
        return Err(Error::domain("basis extension of a zero vector"));
    }
    Ok(())
}

/// Whether `v`, `w` can be completed to a basis of the lattice: the 2×n
/// matrix with rows `v`, `w` has Smith form `(I₂ | 0)`.
pub fn extends_to_basis(v: &LatticeVector, w: &LatticeVector) -> Result<bool> {
    check_pair(v, w)?;
    let a = LatticeMatrix::from_rows(v.rank(), &[v.clone(), w.clone()])?;
    let snf = smith_normal_form(&a);
    Ok(snf.diagonal().iter().all(One::is_one))
}

/// A unimodular matrix whose first two columns are `v` and `w`.
pub fn unimodular_completion(v: &LatticeVector, w: &LatticeVector) -> Result<LatticeMatrix> {
    check_pair(v, w)?;
    let n = v.rank();
    let a = LatticeMatrix::from_rows(n, &[v.clone(), w.clone()])?;
    let hermite = column_hermite(&a);
    let pivot_product = hermite
        .pivots
        .iter()
        .fold(BigInt::one(), |acc, &(r, c)| acc * &hermite.h[(r, c)]);
    if hermite.pivots.len() < 2 || !pivot_product.is_one() {
        return Err(Error::Infeasible(format!(
            "{v} and {w} cannot be included in a lattice basis"
        )));
    }
    // A = [H₂ | 0]·W⁻¹ with H₂ unimodular, so replacing the first two rows
    // of W⁻¹ by v and w keeps it unimodular.
    let w_inv = hermite.w.unimodular_inverse()?;
    let mut rows = vec![v.clone(), w.clone()];
    rows.extend((2..n).map(|i| w_inv.row(i)));
    Ok(LatticeMatrix::from_rows(n, &rows)?.transpose())
}

/// `e`, `e'` with `⟨e,v⟩ = -1, ⟨e,w⟩ = 0, ⟨e',v⟩ = 0, ⟨e',w⟩ = -1`: the
/// negated first two rows of `P⁻¹` for a unimodular completion `P`.
pub fn solve_dual_pair(v: &LatticeVector, w: &LatticeVector) -> Result<(LatticeVector, LatticeVector)> {
    let p = unimodular_completion(v, w)?;
    let p_inv = p.unimodular_inverse()?;
    let e = -&p_inv.row(0);
    let e2 = -&p_inv.row(1);
    debug_assert_eq!(e.dot(v), BigInt::from(-1));
    debug_assert!(e.dot(w).is_zero());
    debug_assert!(e2.dot(v).is_zero());
    debug_assert_eq!(e2.dot(w), BigInt::from(-1));
    Ok((e, e2))
}
