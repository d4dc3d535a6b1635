use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::normal_form::{column_hermite, smith_normal_form, ColumnHermite, SmithDecomposition};
use super::vector::serialize_bigints;
use super::{LatticeMatrix, LatticeVector};
use crate::error::{Error, Result};

/// A diagonalizable group `Hom(K, k^×)` given by its character group
/// `K = Z^n / span(relations)`.
///
/// The relation matrix has `n` rows; its columns generate the relation
/// subgroup. Free rank and torsion orders are read off its Smith form.
#[derive(Clone, Debug, Serialize)]
pub struct QuasitorusPresentation {
    #[serde(rename = "rank")]
    free_rank: usize,
    #[serde(serialize_with = "serialize_bigints")]
    torsion: Vec<BigInt>,
    ambient: usize,
    relations: LatticeMatrix,
    #[serde(skip)]
    snf: SmithDecomposition,
    #[serde(skip)]
    hermite: ColumnHermite,
}

impl PartialEq for QuasitorusPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.relations == other.relations
    }
}

impl Eq for QuasitorusPresentation {}

impl QuasitorusPresentation {
    pub fn new(relations: LatticeMatrix) -> Self {
        let snf = smith_normal_form(&relations);
        let hermite = column_hermite(&relations);
        let factors = snf.invariant_factors();
        let free_rank = relations.rows() - factors.len();
        let torsion = factors.into_iter().filter(|d| !d.is_one()).collect();
        QuasitorusPresentation {
            free_rank,
            torsion,
            ambient: relations.rows(),
            relations,
            snf,
            hermite,
        }
    }

    /// The full torus with character lattice `Z^n`.
    pub fn torus(n: usize) -> Self {
        Self::new(LatticeMatrix::zeros(n, 0))
    }

    /// `K = Z^n / span(relations)` from relation vectors.
    pub fn from_relations(n: usize, relations: &[LatticeVector]) -> Result<Self> {
        Ok(Self::new(LatticeMatrix::from_columns(n, relations)?))
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn relations(&self) -> &LatticeMatrix {
        &self.relations
    }

    pub fn smith(&self) -> &SmithDecomposition {
        &self.snf
    }

    /// All invariant factors of the relation matrix, ones included.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.snf.invariant_factors()
    }

    pub fn is_torus(&self) -> bool {
        self.torsion.is_empty()
    }

    fn check(&self, a: &LatticeVector) -> Result<()> {
        if a.rank() != self.ambient {
            return Err(Error::dimension(self.ambient, a.rank()));
        }
        Ok(())
    }

    /// Coordinates of `a` in `⊕ Z/dᵢ ⊕ Z^r`: `U·a` with the first entries
    /// reduced modulo the invariant factors. Two vectors define the same
    /// element of `K` iff their canonical forms agree.
    pub fn canonical(&self, a: &LatticeVector) -> Result<LatticeVector> {
        self.check(a)?;
        let ua = self.snf.u.mul_vector(a)?;
        let diag = self.snf.invariant_factors();
        let entries = ua
            .into_entries()
            .into_iter()
            .enumerate()
            .map(|(i, x)| match diag.get(i) {
                Some(d) => x.mod_floor(d),
                None => x,
            })
            .collect();
        Ok(LatticeVector::new(entries))
    }

    /// Equality in `K`, by membership of `a - b` in the relation lattice.
    pub fn same_element(&self, a: &LatticeVector, b: &LatticeVector) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.hermite.spans(&(a - b)))
    }

    pub fn is_zero_element(&self, a: &LatticeVector) -> Result<bool> {
        self.check(a)?;
        Ok(self.hermite.spans(a))
    }

    /// Order of `a` in `K`; `None` for elements of infinite order.
    pub fn order(&self, a: &LatticeVector) -> Result<Option<BigInt>> {
        let c = self.canonical(a)?;
        let diag = self.snf.invariant_factors();
        if c.entries()[diag.len()..].iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        let order = diag
            .iter()
            .zip(c.entries())
            .fold(BigInt::one(), |acc, (d, x)| acc.lcm(&(d / d.gcd(x))));
        Ok(Some(order))
    }

    /// `{h ∈ Hom(K, k^×) : h(d) = 1}`, presented by `K / ⟨d⟩`.
    pub fn kernel_by(&self, d: &LatticeVector) -> Result<Self> {
        self.check(d)?;
        let mut columns = self.relations.column_vectors();
        if !d.is_zero() {
            columns.push(d.clone());
        }
        Self::from_relations(self.ambient, &columns)
    }
}

/// Free function form of [`QuasitorusPresentation::kernel_by`].
pub fn quasitorus_kernel(k: &QuasitorusPresentation, d: &LatticeVector) -> Result<QuasitorusPresentation> {
    k.kernel_by(d)
}
