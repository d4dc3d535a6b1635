//! Dual cones by the double description method.
//!
//! The dual of `cone(g₁,…,g_k)` is `{m : ⟨m, gᵢ⟩ ≥ 0}`. Its lineality space
//! is the integer kernel of the generator matrix. Modulo that, we work in
//! coordinates `y` on the span of an independent subset `w₁,…,w_r` of the
//! generators, where the constraint cone is pointed, and map rays back by
//! `m = Σ yⱼwⱼ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{rational_rank, smith_normal_form, LatticeMatrix, LatticeVector};

/// Largest ambient rank accepted by the cone routines.
pub const MAX_RANK: usize = 6;

/// `σ∨ = cone(rays) + span(lineality)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCone {
    pub(crate) rays: Vec<LatticeVector>,
    pub(crate) lineality: Vec<LatticeVector>,
}

impl DualCone {
    /// Rays modulo the lineality space, primitive and lex-sorted.
    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    /// Lattice basis of the largest subspace contained in the dual.
    pub fn lineality(&self) -> &[LatticeVector] {
        &self.lineality
    }

    /// Rays followed by `±l` for each lineality basis vector.
    pub fn generators(&self) -> Vec<LatticeVector> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(-l);
        }
        out
    }

    /// Whether `x` pairs non-negatively with every element of this cone.
    pub fn pairs_nonnegatively(&self, x: &LatticeVector) -> bool {
        self.rays.iter().all(|f| !f.dot(x).is_negative()) && self.lineality.iter().all(|l| l.dot(x).is_zero())
    }
}

fn integer_column(inv: &[Vec<num_rational::BigRational>], j: usize) -> LatticeVector {
    let denom = inv.iter().fold(BigInt::one(), |acc, row| acc.lcm(row[j].denom()));
    let entries = inv
        .iter()
        .map(|row| (&row[j] * num_rational::BigRational::from_integer(denom.clone())).to_integer())
        .collect();
    LatticeVector::new(entries).primitive()
}

fn independent_subset(vectors: &[LatticeVector], cols: usize) -> Vec<usize> {
    let mut chosen: Vec<LatticeVector> = Vec::new();
    let mut idx = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        chosen.push(v.clone());
        if rational_rank(&chosen, cols) == chosen.len() {
            idx.push(i);
        } else {
            chosen.pop();
        }
    }
    idx
}

fn dedup_sorted(mut v: Vec<LatticeVector>) -> Vec<LatticeVector> {
    v.sort();
    v.dedup();
    v
}

pub fn dual_cone_of(rank: usize, generators: &[LatticeVector]) -> Result<DualCone> {
    if rank > MAX_RANK {
        return Err(Error::Unsupported(format!(
            "cone computations are limited to rank {MAX_RANK}, got {rank}"
        )));
    }
    for g in generators {
        if g.rank() != rank {
            return Err(Error::dimension(rank, g.rank()));
        }
    }
    let gens: Vec<LatticeVector> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
    if gens.is_empty() {
        return Ok(DualCone {
            rays: Vec::new(),
            lineality: (0..rank).map(|i| LatticeVector::unit(rank, i)).collect(),
        });
    }

    let a = LatticeMatrix::from_rows(rank, &gens)?;
    let lineality = smith_normal_form(&a).kernel_basis();

    let w: Vec<LatticeVector> = independent_subset(&gens, rank)
        .into_iter()
        .map(|i| gens[i].clone())
        .collect();
    let r = w.len();
    let cons: Vec<LatticeVector> = gens
        .iter()
        .map(|g| LatticeVector::new(w.iter().map(|wj| g.dot(wj)).collect()))
        .collect();

    let basis = independent_subset(&cons, r);
    debug_assert_eq!(basis.len(), r);
    let b = LatticeMatrix::from_rows(r, &basis.iter().map(|&i| cons[i].clone()).collect::<Vec<_>>())?;
    let inv = b.rational_inverse().expect("independent constraints");
    let mut rays: Vec<LatticeVector> = (0..r).map(|j| integer_column(&inv, j)).collect();
    let mut processed = basis.clone();

    for (i, c) in cons.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for y in &rays {
            let s = c.dot(y);
            if s.is_positive() {
                pos.push((y, s));
            } else if s.is_negative() {
                neg.push((y, s));
            } else {
                next.push(y.clone());
            }
        }
        for &(p, ref sp) in &pos {
            next.push(p.clone());
            for &(n, ref sn) in &neg {
                let tight: Vec<LatticeVector> = processed
                    .iter()
                    .map(|&k| &cons[k])
                    .filter(|ck| ck.dot(p).is_zero() && ck.dot(n).is_zero())
                    .cloned()
                    .collect();
                if r < 2 || rational_rank(&tight, r) != r - 2 {
                    continue;
                }
                let combo = &n.scale(sp) - &p.scale(sn);
                next.push(combo.primitive());
            }
        }
        processed.push(i);
        rays = dedup_sorted(next);
    }

    let back = rays
        .iter()
        .map(|y| {
            let mut m = LatticeVector::zero(rank);
            for (yj, wj) in y.entries().iter().zip(&w) {
                m = &m + &wj.scale(yj);
            }
            m.primitive()
        })
        .collect();
    Ok(DualCone {
        rays: dedup_sorted(back),
        lineality,
    })
}
