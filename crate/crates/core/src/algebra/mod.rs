//! Symbolic engine: Laurent polynomials with rational coefficients,
//! derivations, local nilpotency, exponentials and homogeneous components.

mod derivation;
mod polynomial;
mod toric_algebra;
mod trinomial_ring;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use derivation::Derivation;
pub use polynomial::{parse_rational, Exponent, Polynomial};
pub use toric_algebra::{semigroup_contains, ToricAlgebra, MEMBERSHIP_BUDGET};
pub use trinomial_ring::TrinomialRing;

use crate::cone::{Cone, MAX_RANK};
use crate::error::{Error, Result, Witness};
use crate::lattice::{LatticeVector, QuasitorusPresentation};

/// Default iteration cap for nilpotency checks and exponentials.
pub const DEFAULT_CAP: usize = 64;

/// A finitely generated algebra presented inside a (Laurent) polynomial
/// ring. Polynomials may carry extra trailing parameter variables beyond
/// [`Algebra::nvars`]; those are left alone.
pub trait Algebra {
    /// Number of ring variables, parameters excluded.
    fn nvars(&self) -> usize;

    /// Canonical representative modulo the defining relations.
    fn normalize(&self, p: &Polynomial) -> Polynomial {
        p.clone()
    }

    /// Algebra generators, as polynomials in `nvars` variables.
    fn generators(&self) -> Vec<Polynomial>;

    /// Fails with a closure violation if `p` is not an element.
    fn check_closure(&self, _p: &Polynomial) -> Result<()> {
        Ok(())
    }

    fn variable_names(&self) -> Vec<String> {
        (0..self.nvars()).map(|i| format!("x{i}")).collect()
    }
}

/// `k[x₀, …, x_{n-1}]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolynomialRing {
    pub nvars: usize,
}

impl Algebra for PolynomialRing {
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn generators(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| Polynomial::var(self.nvars, i)).collect()
    }

    fn check_closure(&self, p: &Polynomial) -> Result<()> {
        match p.terms().find(|(e, _)| e.iter().any(|&x| x < 0)) {
            Some((e, _)) => Err(Error::ClosureViolation { exponent: e.clone() }),
            None => Ok(()),
        }
    }
}

/// `δ(p)` normalized in the algebra, with a closure check.
pub fn apply_derivation(delta: &Derivation, p: &Polynomial, algebra: &dyn Algebra) -> Result<Polynomial> {
    if delta.nvars() != p.nvars() {
        return Err(Error::dimension(delta.nvars(), p.nvars()));
    }
    let out = algebra.normalize(&delta.apply(p));
    algebra.check_closure(&out)?;
    Ok(out)
}

/// `[δ, ∂]` with every image normalized in the algebra.
pub fn commutator(delta: &Derivation, other: &Derivation, algebra: &dyn Algebra) -> Result<Derivation> {
    if delta.nvars() != other.nvars() {
        return Err(Error::dimension(delta.nvars(), other.nvars()));
    }
    Ok(delta.commutator(other).map_images(|p| algebra.normalize(p)))
}

/// Outcome of iterating a derivation on generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Nilpotency {
    /// `orders[i]` is the least `n` with `δⁿ(gᵢ) = 0`.
    Nilpotent { orders: Vec<usize> },
    /// Some generator survived `cap` applications; not a disproof.
    Exceeded { cap: usize, generator: usize },
}

impl Nilpotency {
    pub fn is_nilpotent(&self) -> bool {
        matches!(self, Nilpotency::Nilpotent { .. })
    }
}

pub fn is_locally_nilpotent(
    delta: &Derivation,
    generators: &[Polynomial],
    cap: usize,
    algebra: &dyn Algebra,
) -> Result<Nilpotency> {
    if cap == 0 {
        return Err(Error::domain("nilpotency cap must be at least 1"));
    }
    let mut orders = Vec::with_capacity(generators.len());
    for (i, g) in generators.iter().enumerate() {
        let mut p = algebra.normalize(g);
        let mut order = 0;
        while !p.is_zero() {
            if order == cap {
                return Ok(Nilpotency::Exceeded { cap, generator: i });
            }
            p = apply_derivation(delta, &p, algebra)?;
            order += 1;
        }
        orders.push(order);
    }
    Ok(Nilpotency::Nilpotent { orders })
}

/// `exp(tδ)(p) = Σ tⁱδⁱ(p)/i!` where `t` is the variable `param`, which
/// `δ` must kill.
pub fn exponential(
    delta: &Derivation,
    param: usize,
    p: &Polynomial,
    cap: usize,
    algebra: &dyn Algebra,
) -> Result<Polynomial> {
    let n = delta.nvars();
    if p.nvars() != n {
        return Err(Error::dimension(n, p.nvars()));
    }
    if param >= n || param < algebra.nvars() || !delta.image(param).is_zero() {
        return Err(Error::domain(
            "the exponential parameter must be a variable killed by the derivation",
        ));
    }
    let t = Polynomial::var(n, param);
    let mut term = algebra.normalize(p);
    let mut t_power = Polynomial::one(n);
    let mut factorial = BigInt::one();
    let mut out = Polynomial::zero(n);
    for i in 0..=cap {
        if term.is_zero() {
            return Ok(algebra.normalize(&out));
        }
        if i > 0 {
            factorial *= i;
            t_power = &t_power * &t;
        }
        let c = BigRational::new(BigInt::one(), factorial.clone());
        out = &out + &(&t_power * &term).scale(&c);
        term = apply_derivation(delta, &term, algebra)?;
    }
    Err(Error::Refused {
        reason: format!("derivation is not nilpotent on the argument within {cap} iterations"),
        witness: Some(Witness::Condition {
            name: "cap_exceeded".into(),
            detail: format!("cap {cap}"),
        }),
    })
}

/// `exp(tδ)(p)` with a fresh parameter `t` appended as the last variable.
pub fn exp_t(delta: &Derivation, p: &Polynomial, cap: usize, algebra: &dyn Algebra) -> Result<Polynomial> {
    let d = delta.extend_vars(1);
    exponential(&d, d.nvars() - 1, &p.extend_vars(1), cap, algebra)
}

/// Degrees of the ring variables in a grading group.
#[derive(Clone, Debug)]
pub struct Grading {
    degrees: Vec<LatticeVector>,
    group: Option<QuasitorusPresentation>,
}

impl Grading {
    /// Degrees in a free lattice.
    pub fn free(degrees: Vec<LatticeVector>) -> Result<Self> {
        let r = degrees.first().map_or(0, LatticeVector::rank);
        if let Some(d) = degrees.iter().find(|d| d.rank() != r) {
            return Err(Error::dimension(r, d.rank()));
        }
        Ok(Grading { degrees, group: None })
    }

    /// Total degree: every variable has degree 1.
    pub fn standard(nvars: usize) -> Self {
        Grading {
            degrees: vec![LatticeVector::from_i64s(&[1]); nvars],
            group: None,
        }
    }

    /// Degrees in `K = Z^r / relations`.
    pub fn in_group(degrees: Vec<LatticeVector>, group: QuasitorusPresentation) -> Result<Self> {
        for d in &degrees {
            if d.rank() != group.ambient() {
                return Err(Error::dimension(group.ambient(), d.rank()));
            }
        }
        Ok(Grading {
            degrees,
            group: Some(group),
        })
    }

    pub fn rank(&self) -> usize {
        self.group
            .as_ref()
            .map_or_else(|| self.degrees.first().map_or(0, LatticeVector::rank), |g| g.ambient())
    }

    pub fn degrees(&self) -> &[LatticeVector] {
        &self.degrees
    }

    pub fn group(&self) -> Option<&QuasitorusPresentation> {
        self.group.as_ref()
    }

    fn canonical(&self, d: &LatticeVector) -> Result<LatticeVector> {
        match &self.group {
            Some(g) => g.canonical(d),
            None => Ok(d.clone()),
        }
    }

    /// Degree of a monomial; trailing parameter variables have degree 0.
    pub fn monomial_degree(&self, e: &[i64]) -> Result<LatticeVector> {
        self.canonical(&self.ambient_degree(e))
    }

    fn ambient_degree(&self, e: &[i64]) -> LatticeVector {
        let mut d = LatticeVector::zero(self.rank());
        for (k, deg) in e.iter().zip(&self.degrees) {
            if *k != 0 {
                d = &d + &deg.scale(&BigInt::from(*k));
            }
        }
        d
    }

    /// Degree of the term `x^e ∂/∂xⱼ`.
    pub fn derivation_term_degree(&self, e: &[i64], j: usize) -> Result<LatticeVector> {
        let d = self.ambient_degree(e);
        match self.degrees.get(j) {
            Some(dj) => self.canonical(&(&d - dj)),
            None => self.canonical(&d),
        }
    }

    /// Whether two ambient degree vectors agree in the grading group.
    pub fn same_degree(&self, a: &LatticeVector, b: &LatticeVector) -> Result<bool> {
        Ok(self.canonical(a)? == self.canonical(b)?)
    }

    /// Whether degree vectors can be compared as points of a real vector
    /// space (no torsion in the grading group).
    fn is_torsion_free(&self) -> bool {
        self.group.as_ref().is_none_or(QuasitorusPresentation::is_torus)
    }
}

/// One homogeneous summand of a derivation.
#[derive(Clone, Debug, Serialize)]
pub struct HomogeneousComponent {
    pub degree: LatticeVector,
    pub derivation: Derivation,
    /// Whether the degree is a vertex of the convex hull of all component
    /// degrees; `None` when that cannot be decided (torsion in the grading
    /// group or too many coordinates).
    pub vertex: Option<bool>,
}

/// Splits `δ` into homogeneous components, sorted by degree.
pub fn homogeneous_components(delta: &Derivation, grading: &Grading) -> Result<Vec<HomogeneousComponent>> {
    let n = delta.nvars();
    let mut parts: BTreeMap<LatticeVector, Vec<Polynomial>> = BTreeMap::new();
    for (j, image) in delta.images().iter().enumerate() {
        for (e, c) in image.terms() {
            let deg = grading.derivation_term_degree(e, j)?;
            let images = parts.entry(deg).or_insert_with(|| vec![Polynomial::zero(n); n]);
            images[j].add_term(e.clone(), c.clone());
        }
    }
    let degrees: Vec<LatticeVector> = parts.keys().cloned().collect();
    let vertices = if grading.is_torsion_free() {
        vertex_flags(&degrees)?
    } else {
        None
    };
    let mut out = Vec::with_capacity(parts.len());
    for (k, (degree, images)) in parts.into_iter().enumerate() {
        out.push(HomogeneousComponent {
            degree,
            derivation: Derivation::new(images)?,
            vertex: vertices.as_ref().map(|v| v[k]),
        });
    }
    Ok(out)
}

/// Vertices of the convex hull of distinct points: `(1, d)` spans an
/// extremal ray of the cone over the points.
fn vertex_flags(points: &[LatticeVector]) -> Result<Option<Vec<bool>>> {
    match points.len() {
        0 => return Ok(Some(Vec::new())),
        1 => return Ok(Some(vec![true])),
        _ => {}
    }
    let r = points[0].rank();
    let live: Vec<usize> = (0..r).filter(|&i| points.iter().any(|p| !p[i].is_zero())).collect();
    if live.len() + 1 > MAX_RANK {
        return Ok(None);
    }
    let lifted: Vec<LatticeVector> = points
        .iter()
        .map(|p| {
            let mut e = vec![BigInt::one()];
            e.extend(live.iter().map(|&i| p[i].clone()));
            LatticeVector::new(e)
        })
        .collect();
    let cone = Cone::new(live.len() + 1, lifted.clone())?;
    Ok(Some(lifted.iter().map(|p| cone.ray_index(p).is_some()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn var(i: usize) -> Polynomial {
        Polynomial::var(4, i)
    }

    /// `x·w·∂/∂y + 2x²y·∂/∂z` on `k[x,y,z,w]`.
    fn sample() -> Derivation {
        let xw = &var(0) * &var(3);
        let x2y = &var(0).pow(2) * &var(1);
        Derivation::new(vec![Polynomial::zero(4), xw, x2y.scale(&q(2)), Polynomial::zero(4)]).unwrap()
    }

    #[test]
    fn zero_derivation_orders() {
        let ring = PolynomialRing { nvars: 3 };
        let v = is_locally_nilpotent(&Derivation::zero(3), &ring.generators(), 5, &ring).unwrap();
        assert_eq!(v, Nilpotency::Nilpotent { orders: vec![1, 1, 1] });
    }

    #[test]
    fn sample_orders() {
        let ring = PolynomialRing { nvars: 4 };
        let v = is_locally_nilpotent(&sample(), &ring.generators(), DEFAULT_CAP, &ring).unwrap();
        assert_eq!(
            v,
            Nilpotency::Nilpotent {
                orders: vec![1, 2, 3, 1]
            }
        );
    }

    #[test]
    fn euler_derivation_exceeds() {
        let ring = PolynomialRing { nvars: 1 };
        let euler = Derivation::new(vec![Polynomial::var(1, 0)]).unwrap();
        let v = is_locally_nilpotent(&euler, &ring.generators(), 10, &ring).unwrap();
        assert_eq!(v, Nilpotency::Exceeded { cap: 10, generator: 0 });
        let err = exp_t(&euler, &Polynomial::var(1, 0), 10, &ring).unwrap_err();
        assert!(err.is_refusal());
    }

    #[test]
    fn exponential_of_sample() {
        let ring = PolynomialRing { nvars: 4 };
        let d = sample();
        let y = exp_t(&d, &var(1), DEFAULT_CAP, &ring).unwrap();
        // y + t·x·w
        let t = Polynomial::var(5, 4);
        let expected = &var(1).extend_vars(1) + &(&t * &(&var(0) * &var(3)).extend_vars(1));
        assert_eq!(y, expected);
        assert_eq!(
            exp_t(&Derivation::zero(4), &var(2), 3, &ring).unwrap(),
            var(2).extend_vars(1)
        );
    }

    #[test]
    fn components_split_by_degree() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let d = Derivation::new(vec![&x.pow(2) + &(&x * &y), Polynomial::zero(2)]).unwrap();
        let parts = homogeneous_components(&d, &Grading::standard(2)).unwrap();
        assert_eq!(parts.len(), 1);
        let g = Grading::free(vec![
            LatticeVector::from_i64s(&[1, 0]),
            LatticeVector::from_i64s(&[0, 1]),
        ])
        .unwrap();
        let parts = homogeneous_components(&d, &g).unwrap();
        assert_eq!(parts.len(), 2);
        let sum = parts.iter().fold(Derivation::zero(2), |acc, c| acc.add(&c.derivation));
        assert_eq!(sum, d);
        assert!(parts.iter().all(|c| c.vertex == Some(true)));
    }

    #[test]
    fn interior_component_is_not_vertex() {
        let x = Polynomial::var(1, 0);
        let d = Derivation::new(vec![&(&Polynomial::one(1) + &x) + &x.pow(2)]).unwrap();
        let parts = homogeneous_components(&d, &Grading::standard(1)).unwrap();
        let flags: Vec<_> = parts.iter().map(|c| c.vertex).collect();
        assert_eq!(flags, vec![Some(true), Some(false), Some(true)]);
    }
}
