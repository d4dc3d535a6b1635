//! Hilbert bases of `σ ∩ Z^n` for pointed cones.
//!
//! The cone is triangulated by pulling its first ray; the Hilbert basis of
//! each simplicial piece lies among its rays and the lattice points of its
//! half-open fundamental parallelepiped. Those candidates are then filtered
//! for irreducibility in the whole cone.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::Cone;
use crate::error::{Error, Result};
use crate::lattice::{smith_normal_form, LatticeMatrix, LatticeVector};

/// Refuse simplices whose parallelepiped holds more points than this.
const MAX_PARALLELEPIPED: u64 = 2_000_000;

/// Irreducible elements of `σ ∩ Z^n`, cut at an ∞-norm bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertBasis {
    elements: Vec<LatticeVector>,
    bound: BigInt,
    omitted: usize,
}

impl HilbertBasis {
    /// Elements with ∞-norm at most the bound, lex-sorted.
    pub fn elements(&self) -> &[LatticeVector] {
        &self.elements
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    /// True when no irreducible element exceeds the bound.
    pub fn is_complete(&self) -> bool {
        self.omitted == 0
    }

    /// Number of irreducible elements cut off by the bound.
    pub fn omitted(&self) -> usize {
        self.omitted
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

impl Serialize for HilbertBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

/// Pulling triangulation; each simplex is a list of `dim` rays.
fn triangulate(rank: usize, rays: &[LatticeVector], dim: usize) -> Result<Vec<Vec<LatticeVector>>> {
    if rays.len() == dim {
        return Ok(vec![rays.to_vec()]);
    }
    let apex = &rays[0];
    let cone = Cone::new(rank, rays.to_vec())?;
    let mut out = Vec::new();
    for f in cone.dual().rays() {
        if !f.dot(apex).is_positive() {
            continue;
        }
        let facet: Vec<LatticeVector> = rays.iter().filter(|r| r.dot(f).is_zero()).cloned().collect();
        for mut simplex in triangulate(rank, &facet, dim - 1)? {
            simplex.insert(0, apex.clone());
            out.push(simplex);
        }
    }
    Ok(out)
}

/// Lattice points `Σ λⱼsⱼ` with `0 ≤ λⱼ < 1`, the zero vector included.
fn parallelepiped_points(simplex: &[LatticeVector]) -> Result<Vec<LatticeVector>> {
    let d = simplex.len();
    let s = LatticeMatrix::from_columns(d, simplex)?;
    let snf = smith_normal_form(&s);
    let factors = snf.diagonal();
    let count = factors.iter().fold(BigInt::from(1), |acc, x| acc * x);
    if count.to_u64().is_none_or(|c| c > MAX_PARALLELEPIPED) {
        return Err(Error::Unsupported(format!(
            "simplicial cone of index {count} is too large for Hilbert basis enumeration"
        )));
    }
    let u_inv = snf.u.unimodular_inverse()?;
    let s_inv = s.rational_inverse().expect("simplex is nonsingular");

    let mut out = Vec::new();
    let mut c = vec![BigInt::zero(); d];
    loop {
        let x = u_inv.mul_vector(&LatticeVector::new(c.clone()))?;
        let lambda: Vec<BigRational> = s_inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.entries())
                    .map(|(a, b)| a * BigRational::from_integer(b.clone()))
                    .sum()
            })
            .collect();
        let shift = LatticeVector::new(lambda.iter().map(|l| l.floor().to_integer()).collect());
        out.push(&x - &s.mul_vector(&shift)?);

        // Odometer over c_i ∈ [0, d_i).
        let mut i = 0;
        loop {
            if i == d {
                return Ok(out);
            }
            c[i] += 1;
            if c[i] < factors[i] {
                break;
            }
            c[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// Hilbert basis of a pointed full-dimensional cone in `Z^d`.
fn full_dimensional_basis(cone: &Cone) -> Result<Vec<LatticeVector>> {
    let rank = cone.rank();
    let mut candidates: Vec<LatticeVector> = cone.rays().to_vec();
    for simplex in triangulate(rank, cone.rays(), rank)? {
        for p in parallelepiped_points(&simplex)? {
            if !p.is_zero() {
                candidates.push(p);
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    let irreducible = candidates
        .iter()
        .filter(|x| !candidates.iter().any(|c| c != *x && cone.contains(&(*x - c))))
        .cloned()
        .collect();
    Ok(irreducible)
}

/// Irreducible elements of `cone ∩ Z^n` with ∞-norm at most `bound`.
///
/// The full basis is computed exactly; `bound` only limits what is returned,
/// and [`HilbertBasis::is_complete`] reports whether anything was cut.
pub fn hilbert_basis(cone: &Cone, bound: &BigInt) -> Result<HilbertBasis> {
    if !bound.is_positive() {
        return Err(Error::domain("Hilbert basis bound must be at least 1"));
    }
    if !cone.is_pointed() {
        return Err(Error::domain("Hilbert basis requires a pointed cone"));
    }
    let n = cone.rank();
    let all = if cone.rays().is_empty() {
        Vec::new()
    } else if cone.is_full_dimensional() {
        full_dimensional_basis(cone)?
    } else {
        // Work in a basis of the saturated sublattice span(σ) ∩ Z^n: the
        // first d rows of V⁻¹ for the Smith form U·R·V of the ray matrix.
        let r = LatticeMatrix::from_rows(n, cone.rays())?;
        let snf = smith_normal_form(&r);
        let d = snf.rank();
        let v_inv = snf.v.unimodular_inverse()?;
        let coords = |x: &LatticeVector| -> Result<LatticeVector> {
            let full = snf.v.transpose().mul_vector(x)?;
            Ok(LatticeVector::new(full.entries()[..d].to_vec()))
        };
        let local = Cone::new(d, cone.rays().iter().map(coords).collect::<Result<Vec<_>>>()?)?;
        full_dimensional_basis(&local)?
            .iter()
            .map(|c| {
                let mut x = LatticeVector::zero(n);
                for (ci, i) in c.entries().iter().zip(0..d) {
                    x = &x + &v_inv.row(i).scale(ci);
                }
                x
            })
            .collect()
    };
    let mut all = all;
    all.sort();
    let total = all.len();
    let elements: Vec<LatticeVector> = all.into_iter().filter(|x| x.norm_inf() <= *bound).collect();
    Ok(HilbertBasis {
        omitted: total - elements.len(),
        elements,
        bound: bound.clone(),
    })
}

/// Brute-force reference: lattice points of the cone in the box of radius
/// `bound` that are not a sum of two nonzero cone points from the box of
/// radius `search`.
pub fn hilbert_basis_by_box(cone: &Cone, bound: i64, search: i64) -> Vec<LatticeVector> {
    let points = box_points(cone, search);
    let set: std::collections::BTreeSet<&LatticeVector> = points.iter().collect();
    let bound_big = BigInt::from(bound);
    let mut out: Vec<LatticeVector> = points
        .iter()
        .filter(|x| x.norm_inf() <= bound_big)
        .filter(|x| !points.iter().any(|a| a != *x && set.contains(&(*x - a))))
        .cloned()
        .collect();
    out.sort();
    out
}

/// Nonzero lattice points of the cone with ∞-norm at most `radius`.
pub(crate) fn box_points(cone: &Cone, radius: i64) -> Vec<LatticeVector> {
    let n = cone.rank();
    let mut out = Vec::new();
    let mut x = vec![-radius; n];
    loop {
        let v = LatticeVector::from_i64s(&x);
        if !v.is_zero() && cone.contains(&v) {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            x[i] += 1;
            if x[i] <= radius {
                break;
            }
            x[i] = -radius;
            i += 1;
        }
    }
}
