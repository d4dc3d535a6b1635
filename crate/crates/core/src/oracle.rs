//! Independent reference computations used to cross-check the combinatorial
//! criteria: brute-force scans, minor gcds and symbolic commutators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{exp_t, exponential, Algebra, Derivation, Polynomial, TrinomialRing};
use crate::cone::Cone;
use crate::error::Result;
use crate::lattice::LatticeVector;
use crate::toric_lnd::{root_derivation, DemazureRoot};

/// gcd of all 2×2 minors of the matrix with rows `v` and `w`.
pub fn minors_gcd(v: &LatticeVector, w: &LatticeVector) -> BigInt {
    let n = v.rank();
    let mut g = BigInt::zero();
    for i in 0..n {
        for j in i + 1..n {
            let m = &v[i] * &w[j] - &v[j] * &w[i];
            g = g.gcd(&m);
        }
    }
    g
}

/// Demazure roots in the box of radius `bound`, found by testing every
/// lattice point. Sorted by ray, then lexicographically.
pub fn roots_by_box(cone: &Cone, bound: i64) -> Vec<(usize, LatticeVector)> {
    let n = cone.rank();
    let mut out = Vec::new();
    let mut x = vec![-bound; n];
    loop {
        let e = LatticeVector::from_i64s(&x);
        let pairings: Vec<BigInt> = cone.rays().iter().map(|v| e.dot(v)).collect();
        let minus: Vec<usize> = (0..pairings.len()).filter(|&i| pairings[i] == -BigInt::one()).collect();
        let negative = pairings.iter().filter(|p| p.is_negative()).count();
        if minus.len() == 1 && negative == 1 {
            out.push((minus[0], e));
        }
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            x[i] += 1;
            if x[i] <= bound {
                break;
            }
            x[i] = -bound;
        }
    }
}

/// `[δ_e, δ_{e'}](χ^h) = 0` for every `h` in `monomials`, computed with the
/// Leibniz rule on Laurent polynomials.
pub fn commute_on_monomials(
    cone: &Cone,
    e: &DemazureRoot,
    e2: &DemazureRoot,
    monomials: &[LatticeVector],
) -> Result<bool> {
    let d1 = root_derivation(e.e(), &cone.rays()[e.ray()])?;
    let d2 = root_derivation(e2.e(), &cone.rays()[e2.ray()])?;
    commutator_vanishes(&d1, &d2, monomials)
}

pub fn commutator_vanishes(d1: &Derivation, d2: &Derivation, monomials: &[LatticeVector]) -> Result<bool> {
    for m in monomials {
        let p = Polynomial::character(m)?;
        let lhs = d1.apply(&d2.apply(&p));
        let rhs = d2.apply(&d1.apply(&p));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A root on another ray within `bound` whose derivation commutes with
/// `δ_e` symbolically on `monomials`, by exhaustive search.
pub fn commuting_root_by_search(
    cone: &Cone,
    e: &DemazureRoot,
    bound: i64,
    monomials: &[LatticeVector],
) -> Result<Option<DemazureRoot>> {
    for (ray, f) in roots_by_box(cone, bound) {
        if ray == e.ray() {
            continue;
        }
        let other = DemazureRoot::new(cone, f)?;
        if commute_on_monomials(cone, e, &other, monomials)? {
            return Ok(Some(other));
        }
    }
    Ok(None)
}

/// `exp(tδ)(pq) = exp(tδ)(p)·exp(tδ)(q)` in the algebra.
pub fn exp_is_multiplicative(
    delta: &Derivation,
    p: &Polynomial,
    q: &Polynomial,
    cap: usize,
    algebra: &dyn Algebra,
) -> Result<bool> {
    let lhs = exp_t(delta, &(p * q), cap, algebra)?;
    let rhs = &exp_t(delta, p, cap, algebra)? * &exp_t(delta, q, cap, algebra)?;
    Ok(algebra.normalize(&lhs) == algebra.normalize(&rhs))
}

/// `exp(sδ)(exp(tδ)(p)) = exp((s+t)δ)(p)` with `t`, `s` appended as the
/// last two variables.
pub fn exp_group_law(delta: &Derivation, p: &Polynomial, cap: usize, algebra: &dyn Algebra) -> Result<bool> {
    let n = delta.nvars();
    let d = delta.extend_vars(2);
    let (t, s) = (n, n + 1);
    let p2 = p.extend_vars(2);
    let inner = exponential(&d, t, &p2, cap, algebra)?;
    let lhs = exponential(&d, s, &inner, cap, algebra)?;
    let mut images: Vec<Polynomial> = (0..n + 2).map(|i| Polynomial::var(n + 2, i)).collect();
    images[t] = &Polynomial::var(n + 2, t) + &Polynomial::var(n + 2, s);
    let rhs = inner.substitute(&images)?;
    Ok(algebra.normalize(&lhs) == algebra.normalize(&rhs))
}

/// `𝔤(exp(tδ)(T)) = 0` in the trinomial ring.
pub fn exp_preserves_relation(delta: &Derivation, ring: &TrinomialRing, cap: usize) -> Result<bool> {
    let n = ring.nvars();
    let mut images = (0..n)
        .map(|v| exp_t(delta, &Polynomial::var(n, v), cap, ring))
        .collect::<Result<Vec<_>>>()?;
    images.push(Polynomial::var(n + 1, n));
    let g = ring.relation().extend_vars(1).substitute(&images)?;
    Ok(ring.reduce(&g).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric_lnd::enumerate_roots;

    fn v(x: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(x)
    }

    #[test]
    fn exponential_laws_on_a_case2_lnd() {
        let ring = TrinomialRing::new(vec![], vec![1, 2], vec![2, 3]).unwrap();
        let x = |i| Polynomial::var(4, i);
        let mut images = vec![Polynomial::zero(4); 4];
        images[0] = (&x(2) * &x(3).pow(3)).scale(&num_rational::BigRational::from_integer(2.into()));
        images[2] = x(1).pow(2);
        let d = Derivation::new(images).unwrap();
        assert!(exp_preserves_relation(&d, &ring, 64).unwrap());
        assert!(exp_is_multiplicative(&d, &x(0), &(&x(2) + &x(1)), 64, &ring).unwrap());
        assert!(exp_group_law(&d, &(&x(0) * &x(2)), 64, &ring).unwrap());
    }

    #[test]
    fn minors() {
        assert_eq!(minors_gcd(&v(&[1, 0, 0]), &v(&[0, 1, 0])), BigInt::one());
        assert_eq!(minors_gcd(&v(&[0, 0, 1]), &v(&[2, 0, 1])), BigInt::from(2));
    }

    #[test]
    fn box_scan_matches_enumeration() {
        let c = Cone::from_i64_rays(3, &[&[0, 0, 1], &[2, 0, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap();
        let fast: Vec<(usize, LatticeVector)> = enumerate_roots(&c, 3)
            .unwrap()
            .into_iter()
            .map(|r| (r.ray(), r.e().clone()))
            .collect();
        assert_eq!(fast, roots_by_box(&c, 3));
    }

    #[test]
    fn orthant_roots_commute_symbolically() {
        let c = Cone::from_i64_rays(2, &[&[1, 0], &[0, 1]]).unwrap();
        let a = DemazureRoot::new(&c, v(&[-1, 0])).unwrap();
        let b = DemazureRoot::new(&c, v(&[0, -1])).unwrap();
        let b2 = DemazureRoot::new(&c, v(&[1, -1])).unwrap();
        let hb = [v(&[1, 0]), v(&[0, 1])];
        assert!(commute_on_monomials(&c, &a, &b, &hb).unwrap());
        assert!(!commute_on_monomials(&c, &a, &b2, &hb).unwrap());
    }
}
