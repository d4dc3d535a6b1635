//! Rational polyhedral cones, their duals, two-dimensional faces and Hilbert
//! bases.

mod double_description;
mod hilbert;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use double_description::{dual_cone_of, DualCone, MAX_RANK};
pub use hilbert::{hilbert_basis, hilbert_basis_by_box, HilbertBasis};

use crate::error::{Error, Result};
use crate::lattice::{rational_rank, LatticeVector};

/// `cone(generators) ⊂ Q^n`, with its extremal rays and dual precomputed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConeSpec", into = "ConeSpec")]
pub struct Cone {
    rank: usize,
    generators: Vec<LatticeVector>,
    rays: Vec<LatticeVector>,
    dual: DualCone,
    dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeSpec {
    pub rank: usize,
    pub rays: Vec<LatticeVector>,
}

impl TryFrom<ConeSpec> for Cone {
    type Error = Error;
    fn try_from(spec: ConeSpec) -> Result<Cone> {
        Cone::new(spec.rank, spec.rays)
    }
}

impl From<Cone> for ConeSpec {
    fn from(c: Cone) -> ConeSpec {
        ConeSpec {
            rank: c.rank,
            rays: c.rays,
        }
    }
}

impl Cone {
    pub fn new(rank: usize, generators: Vec<LatticeVector>) -> Result<Cone> {
        if rank == 0 {
            return Err(Error::domain("cone ambient rank must be positive"));
        }
        for g in &generators {
            if g.rank() != rank {
                return Err(Error::dimension(rank, g.rank()));
            }
            if g.is_zero() {
                return Err(Error::domain("cone generators must be nonzero"));
            }
        }
        let dual = dual_cone_of(rank, &generators)?;
        let dim = rational_rank(&generators, rank);
        let rays = compute_rays(rank, &generators, &dual)?;
        Ok(Cone {
            rank,
            generators,
            rays,
            dual,
            dim,
        })
    }

    pub fn from_i64_rays(rank: usize, rays: &[&[i64]]) -> Result<Cone> {
        Cone::new(rank, rays.iter().map(|r| LatticeVector::from_i64s(r)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    /// Primitive extremal ray generators, lex-sorted. For a cone with a
    /// lineality space this is a minimal generating set instead.
    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn dual(&self) -> &DualCone {
        &self.dual
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.rank
    }

    /// No line is contained in the cone: the dual is full-dimensional.
    pub fn is_pointed(&self) -> bool {
        rational_rank(&self.dual.generators(), self.rank) == self.rank
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        x.rank() == self.rank && self.dual.pairs_nonnegatively(x)
    }

    /// Facet normals of a full-dimensional cone (rays of the dual).
    pub fn facet_normals(&self) -> &[LatticeVector] {
        self.dual.rays()
    }

    /// Index of the ray through `v`, if `v` spans one.
    pub fn ray_index(&self, v: &LatticeVector) -> Option<usize> {
        if v.rank() != self.rank || v.is_zero() {
            return None;
        }
        let p = v.primitive();
        self.rays.iter().position(|r| *r == p)
    }

    /// `σ∨` as a cone in the dual lattice.
    pub fn dual_as_cone(&self) -> Result<Cone> {
        Cone::new(self.rank, self.dual.generators())
    }

    /// The face cut out by `m ∈ σ∨`: rays with `⟨m, v⟩ = 0`.
    pub fn face(&self, m: &LatticeVector) -> Result<Cone> {
        let rays = self.rays.iter().filter(|r| r.dot(m).is_zero()).cloned().collect();
        Cone::new(self.rank, rays)
    }

    fn check_ray_pair(&self, i: usize, j: usize) -> Result<()> {
        if !self.is_pointed() {
            return Err(Error::domain("face adjacency needs a pointed cone"));
        }
        let k = self.rays.len();
        if i >= k || j >= k {
            return Err(Error::domain(format!("ray index out of range (cone has {k} rays)")));
        }
        if i == j {
            return Err(Error::domain("two-face adjacency needs two distinct rays"));
        }
        Ok(())
    }

    /// `ω ∈ M` vanishing on rays `i`, `j` and positive on all other rays,
    /// when it exists. Sum of the facet normals through both rays.
    pub fn two_face_witness(&self, i: usize, j: usize) -> Result<Option<LatticeVector>> {
        self.check_ray_pair(i, j)?;
        let (v, w) = (&self.rays[i], &self.rays[j]);
        let mut omega = LatticeVector::zero(self.rank);
        for f in self.dual.rays() {
            if f.dot(v).is_zero() && f.dot(w).is_zero() {
                omega = &omega + f;
            }
        }
        let ok = self
            .rays
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .all(|(_, r)| omega.dot(r).is_positive());
        Ok(ok.then_some(omega))
    }

    /// Whether rays `i` and `j` span a two-dimensional face.
    pub fn two_face_adjacent(&self, i: usize, j: usize) -> Result<bool> {
        Ok(self.two_face_witness(i, j)?.is_some())
    }

    /// Indices of the rays sharing a two-dimensional face with ray `i`.
    pub fn adjacency_set(&self, i: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for j in 0..self.rays.len() {
            if j != i && self.two_face_adjacent(i, j)? {
                out.push(j);
            }
        }
        Ok(out)
    }
}

fn compute_rays(rank: usize, generators: &[LatticeVector], dual: &DualCone) -> Result<Vec<LatticeVector>> {
    let mut prim: Vec<LatticeVector> = generators.iter().map(LatticeVector::primitive).collect();
    prim.sort();
    prim.dedup();
    let dual_gens = dual.generators();
    if rational_rank(&dual_gens, rank) == rank {
        // Pointed: a generator is extremal iff the dual generators vanishing
        // on it have rank n - 1.
        return Ok(prim
            .into_iter()
            .filter(|g| {
                let tight: Vec<LatticeVector> = dual_gens.iter().filter(|f| f.dot(g).is_zero()).cloned().collect();
                rational_rank(&tight, rank) + 1 == rank
            })
            .collect());
    }
    // With a lineality space, drop generators that lie in the cone of the
    // remaining ones.
    let mut keep = prim;
    let mut i = 0;
    while i < keep.len() {
        let others: Vec<LatticeVector> = keep
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, g)| g.clone())
            .collect();
        if dual_cone_of(rank, &others)?.pairs_nonnegatively(&keep[i]) {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(keep)
}

/// Minimal generating set of primitive vectors, lex-sorted.
pub fn extremal_rays(rank: usize, generators: &[LatticeVector]) -> Result<Vec<LatticeVector>> {
    Ok(Cone::new(rank, generators.to_vec())?.rays)
}

pub fn dual_cone(cone: &Cone) -> &DualCone {
    cone.dual()
}

pub fn is_pointed(cone: &Cone) -> bool {
    cone.is_pointed()
}
