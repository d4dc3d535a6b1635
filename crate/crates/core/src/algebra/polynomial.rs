use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

/// Exponent vector of a (Laurent) monomial.
pub type Exponent = Vec<i64>;

/// Finite `Q`-linear combination of Laurent monomials in `nvars` variables.
///
/// Toric coordinate rings use exponents in the character lattice, so
/// negative exponents are allowed; polynomial rings simply never produce
/// them. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exp: Exponent, c: BigRational) -> Self {
        let mut p = Self::zero(exp.len());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// `χ^m` for a lattice vector `m`.
    pub fn character(m: &LatticeVector) -> Result<Self> {
        Ok(Self::monomial(m.to_i64s()?, BigRational::one()))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, BigRational)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::dimension(nvars, e.len()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[i64]) -> BigRational {
        self.terms.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// The single term of a monomial.
    pub fn as_monomial(&self) -> Option<(&Exponent, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|e| e.iter().any(|&x| x < 0))
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiplies every term by `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Appends `extra` variables that do not occur.
    pub fn extend_vars(&self, extra: usize) -> Self {
        Polynomial {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.resize(self.nvars + extra, 0);
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// Total degree of the highest term; `None` for zero.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Whether variable `i` occurs in some term.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] != 0)
    }

    /// Substitutes polynomials for variables. Negative exponents are only
    /// allowed for variables mapped to monomials.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::dimension(self.nvars, images.len()));
        }
        let target = images.first().map_or(self.nvars, Polynomial::nvars);
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k >= 0 {
                    term = &term * &images[i].pow(k as u32);
                } else {
                    let (me, mc) = images[i]
                        .as_monomial()
                        .ok_or_else(|| Error::domain("cannot substitute a non-monomial into a negative power"))?;
                    let inv = Polynomial::monomial(me.iter().map(|x| -x).collect(), mc.recip());
                    term = &term * &inv.pow((-k) as u32);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Renders with the given variable names (`x0, x1, …` by default).
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = monomial_string(e, names);
            let (neg, abs) = (c.is_negative(), c.abs());
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{abs}*{mono}"));
            }
        }
        out
    }
}

fn monomial_string(e: &[i64], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
        if k == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{k}"));
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials live in different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials live in different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials live in different rings");
        let mut out = Polynomial::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }
}

/// JSON form of one term.
#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i64>,
    coeff: String,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(e, c)| TermJson {
                exp: e.clone(),
                coeff: c.to_string(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

/// Parses `"p/q"`, `"p"` or a JSON integer as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("{s:?} is not a rational number")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("{s:?} has zero denominator")));
            }
            Ok(BigRational::new(parse(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse(s)?)),
    }
}

impl Polynomial {
    /// Reads the `[{"exp": [...], "coeff": "p/q"}, ...]` form.
    pub fn from_json(value: &serde_json::Value, nvars: usize) -> Result<Polynomial> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse("polynomial must be a list of terms".into()))?;
        let mut p = Polynomial::zero(nvars);
        for item in items {
            let exp: Vec<i64> = serde_json::from_value(item.get("exp").cloned().unwrap_or_default())
                .map_err(|e| Error::Parse(format!("bad exponent: {e}")))?;
            if exp.len() != nvars {
                return Err(Error::dimension(nvars, exp.len()));
            }
            let coeff = match item.get("coeff") {
                Some(serde_json::Value::String(s)) => parse_rational(s)?,
                Some(serde_json::Value::Number(n)) => parse_rational(&n.to_string())?,
                None => BigRational::one(),
                Some(other) => return Err(Error::Parse(format!("bad coefficient {other}"))),
            };
            p.add_term(exp, coeff);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn characters_multiply_by_adding() {
        let a = Polynomial::monomial(vec![1, -2, 0], q(1));
        let b = Polynomial::monomial(vec![0, 3, 1], q(1));
        assert_eq!(&a * &b, Polynomial::monomial(vec![1, 1, 1], q(1)));
    }

    #[test]
    fn difference_of_squares() {
        let x = Polynomial::var(1, 0);
        let one = Polynomial::one(1);
        let p = &(&x + &one) * &(&x - &one);
        assert_eq!(p, &x.pow(2) - &one);
        assert_eq!(p.to_string(), "x0^2 - 1");
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = Polynomial::var(2, 0);
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn substitution() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = &x.pow(2) * &y;
        let s = p.substitute(&[&x + &y, y.clone()]).unwrap();
        assert_eq!(s, &(&x + &y).pow(2) * &y);
    }

    #[test]
    fn json_round_trip() {
        let p = Polynomial::from_terms(
            2,
            [(vec![1, 0], BigRational::new(1.into(), 2.into())), (vec![0, 2], q(-3))],
        )
        .unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(Polynomial::from_json(&v, 2).unwrap(), p);
        assert!(parse_rational("1/0").is_err());
    }
}
