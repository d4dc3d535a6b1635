use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Signed;

use super::{Algebra, Polynomial};
use crate::cone::{hilbert_basis, Cone};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

/// Default node budget for semigroup membership searches.
pub const MEMBERSHIP_BUDGET: usize = 200_000;

/// `k[S]` for a finitely generated semigroup `S ⊂ σ∨ ∩ M`, realized inside
/// the Laurent ring on the coordinates of `M`.
///
/// For the normal case `S = σ∨ ∩ M` and the generators are its Hilbert
/// basis.
#[derive(Clone, Debug)]
pub struct ToricAlgebra {
    cone: Cone,
    generators: Vec<LatticeVector>,
    normal: bool,
    grading: LatticeVector,
}

impl ToricAlgebra {
    /// The normal algebra `k[σ∨ ∩ M]`.
    pub fn normal(cone: &Cone, hilbert_bound: &BigInt) -> Result<Self> {
        check_cone(cone)?;
        let hb = hilbert_basis(&cone.dual_as_cone()?, hilbert_bound)?;
        if !hb.is_complete() {
            return Err(Error::Inconclusive(format!(
                "Hilbert basis has elements beyond the bound {}",
                hb.bound()
            )));
        }
        Ok(ToricAlgebra {
            cone: cone.clone(),
            generators: hb.elements().to_vec(),
            normal: true,
            grading: grading_of(cone),
        })
    }

    /// The algebra of the semigroup generated by `generators`.
    pub fn with_semigroup(cone: &Cone, generators: Vec<LatticeVector>) -> Result<Self> {
        check_cone(cone)?;
        for g in &generators {
            if g.rank() != cone.rank() {
                return Err(Error::dimension(cone.rank(), g.rank()));
            }
            if g.is_zero() || !cone.rays().iter().all(|v| !g.dot(v).is_negative()) {
                return Err(Error::domain(format!(
                    "semigroup generator {g} is not a nonzero element of the dual cone"
                )));
            }
        }
        let mut generators = generators;
        generators.sort();
        generators.dedup();
        Ok(ToricAlgebra {
            cone: cone.clone(),
            generators,
            normal: false,
            grading: grading_of(cone),
        })
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn semigroup_generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn in_dual_cone(&self, m: &LatticeVector) -> bool {
        self.cone.rays().iter().all(|v| !m.dot(v).is_negative())
    }

    /// Whether `χ^m` lies in the algebra.
    pub fn contains_exponent(&self, m: &LatticeVector) -> Result<bool> {
        if !self.in_dual_cone(m) {
            return Ok(false);
        }
        if self.normal {
            return Ok(true);
        }
        semigroup_contains(&self.generators, &self.cone, &self.grading, m, MEMBERSHIP_BUDGET)
    }
}

fn check_cone(cone: &Cone) -> Result<()> {
    if !cone.is_pointed() || !cone.is_full_dimensional() {
        return Err(Error::domain("toric algebras need a pointed full-dimensional cone"));
    }
    Ok(())
}

/// Sum of the rays: an interior point of `σ`, positive on `σ∨ \ {0}`.
fn grading_of(cone: &Cone) -> LatticeVector {
    cone.rays()
        .iter()
        .fold(LatticeVector::zero(cone.rank()), |acc, r| &acc + r)
}

/// Membership of `m` in the semigroup generated by `gens`, by depth-first
/// search over non-negative combinations ordered by generator index.
///
/// Remainders must stay in `σ∨` and lose degree under `grading` at every
/// step, so the search is finite; `budget` caps the number of visited nodes.
pub fn semigroup_contains(
    gens: &[LatticeVector],
    cone: &Cone,
    grading: &LatticeVector,
    m: &LatticeVector,
    budget: usize,
) -> Result<bool> {
    if m.is_zero() {
        return Ok(true);
    }
    let mut failed: HashSet<(LatticeVector, usize)> = HashSet::new();
    let mut visited = 0usize;
    search(gens, cone, grading, m, 0, budget, &mut visited, &mut failed)
}

#[allow(clippy::too_many_arguments)]
fn search(
    gens: &[LatticeVector],
    cone: &Cone,
    grading: &LatticeVector,
    m: &LatticeVector,
    start: usize,
    budget: usize,
    visited: &mut usize,
    failed: &mut HashSet<(LatticeVector, usize)>,
) -> Result<bool> {
    if failed.contains(&(m.clone(), start)) {
        return Ok(false);
    }
    *visited += 1;
    if *visited > budget {
        return Err(Error::Inconclusive(format!(
            "semigroup membership of {m} undecided after {budget} search nodes"
        )));
    }
    for (k, s) in gens.iter().enumerate().skip(start) {
        let r = m - s;
        if r.is_zero() {
            return Ok(true);
        }
        if !r.dot(grading).is_positive() || !cone.rays().iter().all(|v| !r.dot(v).is_negative()) {
            continue;
        }
        if search(gens, cone, grading, &r, k, budget, visited, failed)? {
            return Ok(true);
        }
    }
    failed.insert((m.clone(), start));
    Ok(false)
}

impl Algebra for ToricAlgebra {
    fn nvars(&self) -> usize {
        self.cone.rank()
    }

    fn generators(&self) -> Vec<Polynomial> {
        self.generators
            .iter()
            .map(|g| Polynomial::character(g).expect("small generator"))
            .collect()
    }

    fn check_closure(&self, p: &Polynomial) -> Result<()> {
        let n = self.cone.rank();
        for (e, _) in p.terms() {
            let m = LatticeVector::from_i64s(&e[..n]);
            if e[n..].iter().any(|&x| x < 0) || !self.contains_exponent(&m)? {
                return Err(Error::ClosureViolation { exponent: e.clone() });
            }
        }
        Ok(())
    }

    fn variable_names(&self) -> Vec<String> {
        (0..self.cone.rank()).map(|i| format!("x{}", i + 1)).collect()
    }
}

impl ToricAlgebra {
    pub fn grading(&self) -> &LatticeVector {
        &self.grading
    }

    pub fn degree(&self, m: &LatticeVector) -> BigInt {
        m.dot(&self.grading)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(x)
    }

    #[test]
    fn numerical_semigroup() {
        let cone = Cone::from_i64_rays(1, &[&[1]]).unwrap();
        let a = ToricAlgebra::with_semigroup(&cone, vec![v(&[2]), v(&[3])]).unwrap();
        assert!(!a.contains_exponent(&v(&[1])).unwrap());
        assert!(a.contains_exponent(&v(&[2])).unwrap());
        assert!(a.contains_exponent(&v(&[7])).unwrap());
        assert!(!a.contains_exponent(&v(&[-1])).unwrap());
    }

    #[test]
    fn normal_pyramid_generators() {
        let cone = Cone::from_i64_rays(3, &[&[0, 0, 1], &[2, 0, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap();
        let a = ToricAlgebra::normal(&cone, &BigInt::from(5)).unwrap();
        assert_eq!(a.semigroup_generators().len(), 4);
        assert!(a.check_closure(&Polynomial::character(&v(&[0, 1, 1])).unwrap()).is_ok());
        assert!(matches!(
            a.check_closure(&Polynomial::character(&v(&[0, 0, -1])).unwrap()),
            Err(Error::ClosureViolation { .. })
        ));
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let cone = Cone::from_i64_rays(1, &[&[1]]).unwrap();
        let err = semigroup_contains(&[v(&[5]), v(&[7])], &cone, &v(&[1]), &v(&[1000]), 3).unwrap_err();
        assert!(matches!(err, Error::Inconclusive(_)));
    }
}
