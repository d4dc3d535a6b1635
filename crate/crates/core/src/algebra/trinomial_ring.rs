use std::ops::Range;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{Algebra, Polynomial};
use crate::error::{Error, Result};

/// `k[T₀, T₁, T₂] / (T₁^{l₁} − T₂^{l₂} − T₀^{l₀})`.
///
/// Variables are ordered block by block: `T₀` first, then `T₁`, then `T₂`.
/// With an empty `T₀` block the last term is the constant 1. Normal forms
/// contain no monomial divisible by `T₁^{l₁}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrinomialRing {
    l0: Vec<u32>,
    l1: Vec<u32>,
    l2: Vec<u32>,
    names: Vec<String>,
}

impl TrinomialRing {
    pub fn new(l0: Vec<u32>, l1: Vec<u32>, l2: Vec<u32>) -> Result<Self> {
        if l1.is_empty() || l2.is_empty() {
            return Err(Error::validation("trinomial blocks T1 and T2 must be nonempty"));
        }
        if l0.iter().chain(&l1).chain(&l2).any(|&l| l == 0) {
            return Err(Error::validation("trinomial exponents must be positive"));
        }
        let n = l0.len() + l1.len() + l2.len();
        let names = (0..n).map(|i| format!("T{i}")).collect();
        Ok(TrinomialRing { l0, l1, l2, names })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.nvars() {
            return Err(Error::dimension(self.nvars(), names.len()));
        }
        self.names = names;
        Ok(self)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        let (a, b) = (self.l0.len(), self.l1.len());
        match i {
            0 => 0..a,
            1 => a..a + b,
            _ => a + b..a + b + self.l2.len(),
        }
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        match i {
            0 => &self.l0,
            1 => &self.l1,
            _ => &self.l2,
        }
    }

    /// `T_i^{l_i}` as an exponent vector of length `nvars`.
    fn block_monomial(&self, i: usize, nvars: usize) -> Vec<i64> {
        let mut e = vec![0; nvars];
        for (k, &l) in self.block(i).zip(self.exponents(i)) {
            e[k] = l as i64;
        }
        e
    }

    /// `T₁^{l₁} − T₂^{l₂} − T₀^{l₀}` in `nvars ≥ n` variables.
    pub fn relation_in(&self, nvars: usize) -> Polynomial {
        let one = BigRational::one();
        let mut g = Polynomial::monomial(self.block_monomial(1, nvars), one.clone());
        g.add_term(self.block_monomial(2, nvars), -one.clone());
        g.add_term(self.block_monomial(0, nvars), -one);
        g
    }

    pub fn relation(&self) -> Polynomial {
        self.relation_in(self.nvars())
    }

    /// Normal form: rewrite `T₁^{l₁} → T₂^{l₂} + T₀^{l₀}` until no term is
    /// divisible by `T₁^{l₁}`. Each step lowers the `T₁`-degree.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let nv = p.nvars();
        let lead = self.block_monomial(1, nv);
        let tails = [self.block_monomial(2, nv), self.block_monomial(0, nv)];
        let t1 = self.block(1);
        let divisible = |e: &Vec<i64>| t1.clone().all(|k| e[k] >= lead[k]);
        let mut current = p.clone();
        loop {
            if !current.terms().any(|(e, _)| divisible(e)) {
                return current;
            }
            let mut next = Polynomial::zero(nv);
            for (e, c) in current.terms() {
                if !divisible(e) {
                    next.add_term(e.clone(), c.clone());
                    continue;
                }
                for tail in &tails {
                    let ex = e.iter().zip(&lead).zip(tail).map(|((a, b), t)| a - b + t).collect();
                    next.add_term(ex, c.clone());
                }
            }
            current = next;
        }
    }

    pub fn multiply(&self, p: &Polynomial, q: &Polynomial) -> Polynomial {
        self.reduce(&(p * q))
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(self.nvars(), i)
    }
}

impl Algebra for TrinomialRing {
    fn nvars(&self) -> usize {
        self.l0.len() + self.l1.len() + self.l2.len()
    }

    fn normalize(&self, p: &Polynomial) -> Polynomial {
        self.reduce(p)
    }

    fn generators(&self) -> Vec<Polynomial> {
        (0..self.nvars()).map(|i| self.var(i)).collect()
    }

    fn check_closure(&self, p: &Polynomial) -> Result<()> {
        match p.terms().find(|(e, _)| e.iter().any(|&x| x < 0)) {
            Some((e, _)) => Err(Error::ClosureViolation { exponent: e.clone() }),
            None => Ok(()),
        }
    }

    fn variable_names(&self) -> Vec<String> {
        self.names.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `x·y² = z² + 1` with blocks T₁ = (x, y), T₂ = (z).
    fn ring() -> TrinomialRing {
        TrinomialRing::new(vec![], vec![1, 2], vec![2]).unwrap()
    }

    #[test]
    fn relation_reduces_to_zero() {
        let r = ring();
        assert!(r.reduce(&r.relation()).is_zero());
    }

    #[test]
    fn single_rewrite() {
        let r = ring();
        let xy2 = &r.var(0) * &r.var(1).pow(2);
        let expected = &r.var(2).pow(2) + &Polynomial::one(3);
        assert_eq!(r.reduce(&xy2), expected);
        let w = &r.var(2) * &r.var(1);
        assert_eq!(r.reduce(&(&xy2 * &w)), &expected * &w);
    }

    #[test]
    fn reduce_is_idempotent() {
        let r = ring();
        let p = &(&r.var(0).pow(3) * &r.var(1).pow(7)) + &r.var(2);
        let once = r.reduce(&p);
        assert_eq!(r.reduce(&once), once);
        assert!(r.reduce(&(&p - &once)).is_zero());
    }

    #[test]
    fn type_two_relation() {
        let r = TrinomialRing::new(vec![2], vec![1], vec![1]).unwrap();
        let g = r.relation();
        assert_eq!(g.len(), 3);
        assert!(r.reduce(&g).is_zero());
    }

    #[test]
    fn rejects_zero_exponent() {
        assert!(matches!(
            TrinomialRing::new(vec![], vec![0], vec![2]),
            Err(Error::Validation(_))
        ));
    }
}
