use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a lattice `Z^n`, used for characters `m ∈ M`, one-parameter
/// subgroups `v ∈ N`, Demazure roots and grading degrees alike.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        LatticeVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        LatticeVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); rank])
    }

    pub fn unit(rank: usize, index: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[index] = BigInt::from(1);
        v
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// The natural pairing `⟨m, v⟩ = Σ mᵢvᵢ`.
    pub fn pairing(&self, other: &LatticeVector) -> Result<BigInt> {
        if self.rank() != other.rank() {
            return Err(Error::dimension(self.rank(), other.rank()));
        }
        Ok(self.dot(other))
    }

    /// Pairing for callers that have already checked ranks.
    pub(crate) fn dot(&self, other: &LatticeVector) -> BigInt {
        debug_assert_eq!(self.rank(), other.rank());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Gcd of the entries; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    /// True iff the gcd of the entries is 1.
    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::domain("primitivity is undefined for the zero vector"));
        }
        Ok(self.content() == BigInt::from(1))
    }

    /// The primitive vector on the ray through `self`.
    pub fn primitive(&self) -> LatticeVector {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        LatticeVector(self.0.iter().map(|x| x / &g).collect())
    }

    pub fn scale(&self, k: &BigInt) -> LatticeVector {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }

    /// Maximum absolute entry.
    pub fn norm_inf(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    /// Entries as machine integers, for exponent bookkeeping in polynomials.
    pub fn to_i64s(&self) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|x| {
                x.to_i64()
                    .ok_or_else(|| Error::domain(format!("entry {x} does not fit an exponent")))
            })
            .collect()
    }

    pub fn extend_zeros(&self, extra: usize) -> LatticeVector {
        let mut v = self.0.clone();
        v.resize(self.rank() + extra, BigInt::zero());
        LatticeVector(v)
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector::from_i64s(&v)
    }
}

impl From<&[i64]> for LatticeVector {
    fn from(v: &[i64]) -> Self {
        LatticeVector::from_i64s(v)
    }
}

impl std::ops::Index<usize> for LatticeVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch in lattice addition");
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch in lattice subtraction");
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Entries that fit in an `i64` are written as JSON numbers, anything larger
/// as a decimal string. Both forms are accepted when reading.
impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_bigints(&self.0, serializer)
    }
}

/// Serializes a list of integers the same way as [`LatticeVector`].
pub(crate) fn serialize_bigints<S: Serializer>(xs: &[BigInt], serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(xs.len()))?;
    for x in xs {
        match x.to_i64() {
            Some(small) => seq.serialize_element(&small)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

pub(crate) fn serialize_bigint<S: Serializer>(x: &BigInt, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(small) => serializer.serialize_i64(small),
        None => serializer.serialize_str(&x.to_string()),
    }
}

pub(crate) fn parse_bigint_value(value: &serde_json::Value) -> std::result::Result<BigInt, String> {
    match value {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("{n} is not an integer")),
        serde_json::Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| format!("{s:?} is not a decimal integer")),
        other => Err(format!("expected an integer, found {other}")),
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct VecVisitor;

        impl<'de> Visitor<'de> for VecVisitor {
            type Value = LatticeVector;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "an array of integers")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element::<serde_json::Value>()? {
                    out.push(parse_bigint_value(&v).map_err(de::Error::custom)?);
                }
                Ok(LatticeVector(out))
            }
        }

        deserializer.deserialize_seq(VecVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(x)
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(v(&[1, 2, -1]).pairing(&v(&[0, 0, 1])).unwrap(), BigInt::from(-1));
        assert_eq!(v(&[1, 2, -1]).pairing(&v(&[1, 1, 1])).unwrap(), BigInt::from(2));
        assert_eq!(v(&[0, 0, 0]).pairing(&v(&[5, -3, 7])).unwrap(), BigInt::zero());
    }

    #[test]
    fn pairing_rank_mismatch() {
        let err = v(&[1, 2]).pairing(&v(&[1, 2, 3])).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 2, found: 3 }));
    }

    #[test]
    fn primitivity() {
        assert!(v(&[2, 0, 1]).is_primitive().unwrap());
        assert!(!v(&[2, 4]).is_primitive().unwrap());
        assert!(v(&[1, 0, 0]).is_primitive().unwrap());
        assert!(matches!(v(&[0, 0]).is_primitive(), Err(Error::Domain(_))));
        assert_eq!(v(&[-4, 6]).primitive(), v(&[-2, 3]));
    }

    #[test]
    fn json_accepts_numbers_and_strings() {
        let parsed: LatticeVector = serde_json::from_str(r#"[1, "-2", "123456789012345678901234567890"]"#).unwrap();
        assert_eq!(parsed.rank(), 3);
        assert_eq!(parsed[1], BigInt::from(-2));
        let text = serde_json::to_string(&parsed).unwrap();
        assert_eq!(text, r#"[1,-2,"123456789012345678901234567890"]"#);
    }
}
