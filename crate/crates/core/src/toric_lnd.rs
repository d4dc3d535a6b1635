//! Demazure roots and the homogeneous LNDs they define on affine toric
//! varieties: commutation, maximality, kernels, slices and isotropy data.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{semigroup_contains, Derivation, Polynomial, ToricAlgebra, MEMBERSHIP_BUDGET};
use crate::cone::{hilbert_basis, Cone};
use crate::error::{Error, Result, Witness};
use crate::lattice::{
    extends_to_basis, quasitorus_kernel, rational_rank, solve_dual_pair, LatticeMatrix, LatticeVector,
    QuasitorusPresentation,
};

pub const DEFAULT_ROOT_BOUND: i64 = 10;
pub const DEFAULT_HILBERT_BOUND: i64 = 32;

/// Largest box radius tried when searching for a local slice.
const SLICE_RADIUS_LIMIT: i64 = 256;

/// `e ∈ M` with `⟨e, vᵢ⟩ = -1` and `⟨e, vⱼ⟩ ≥ 0` for every other ray.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DemazureRoot {
    ray: usize,
    #[serde(rename = "root")]
    e: LatticeVector,
    #[serde(serialize_with = "crate::lattice::vector::serialize_bigints")]
    pairings: Vec<BigInt>,
}

impl DemazureRoot {
    pub fn new(cone: &Cone, e: LatticeVector) -> Result<Self> {
        match is_demazure_root(cone, &e)? {
            Some(ray) => {
                let pairings = cone.rays().iter().map(|v| e.dot(v)).collect();
                Ok(DemazureRoot { ray, e, pairings })
            }
            None => Err(Error::domain(format!("{e} is not a Demazure root of the cone"))),
        }
    }

    pub fn e(&self) -> &LatticeVector {
        &self.e
    }

    pub fn ray(&self) -> usize {
        self.ray
    }

    /// `⟨e, vⱼ⟩` for every ray, in ray order.
    pub fn pairings(&self) -> &[BigInt] {
        &self.pairings
    }

    /// `δ_e` on the Laurent ring of `M`: `δ_e(χ^m) = ⟨m, vᵢ⟩χ^{m+e}`.
    pub fn derivation(&self, cone: &Cone) -> Result<Derivation> {
        root_derivation(&self.e, &cone.rays()[self.ray])
    }
}

fn check_cone(cone: &Cone) -> Result<()> {
    if !cone.is_pointed() || !cone.is_full_dimensional() {
        return Err(Error::domain("Demazure roots need a pointed full-dimensional cone"));
    }
    Ok(())
}

/// Images `vⱼ·χ^{e+eⱼ}` of the coordinate derivation for `δ_e` along `v`.
pub fn root_derivation(e: &LatticeVector, v: &LatticeVector) -> Result<Derivation> {
    let n = e.rank();
    if v.rank() != n {
        return Err(Error::dimension(n, v.rank()));
    }
    let base = e.to_i64s()?;
    let images = (0..n)
        .map(|j| {
            let mut ex = base.clone();
            ex[j] += 1;
            Ok(Polynomial::monomial(ex, BigRational::from_integer(v[j].clone())))
        })
        .collect::<Result<Vec<_>>>()?;
    Derivation::new(images)
}

/// The ray index `i` for which `e` is a Demazure root, if any.
pub fn is_demazure_root(cone: &Cone, e: &LatticeVector) -> Result<Option<usize>> {
    check_cone(cone)?;
    if e.rank() != cone.rank() {
        return Err(Error::dimension(cone.rank(), e.rank()));
    }
    let minus_one = -BigInt::one();
    let mut found = None;
    for (i, v) in cone.rays().iter().enumerate() {
        let p = e.dot(v);
        if p == minus_one && found.is_none() {
            found = Some(i);
        } else if p.is_negative() {
            return Ok(None);
        }
    }
    Ok(found)
}

/// Calls `f` on every `x` with `⟨x, v⟩ = value` and `‖x‖∞ ≤ radius`, in lex
/// order of the free coordinates.
fn for_each_on_hyperplane(v: &LatticeVector, value: &BigInt, radius: i64, mut f: impl FnMut(LatticeVector)) {
    let n = v.rank();
    let Some(p) = (0..n).find(|&k| !v[k].is_zero()) else {
        return;
    };
    let free: Vec<usize> = (0..n).filter(|&k| k != p).collect();
    let mut x = vec![-radius; free.len()];
    let r = BigInt::from(radius);
    loop {
        let partial: BigInt = free.iter().zip(&x).map(|(&k, &xk)| &v[k] * xk).sum();
        let rest = value - partial;
        if rest.is_multiple_of(&v[p]) {
            let xp = &rest / &v[p];
            if xp.abs() <= r {
                let mut e = vec![BigInt::zero(); n];
                e[p] = xp;
                for (&k, &xk) in free.iter().zip(&x) {
                    e[k] = BigInt::from(xk);
                }
                f(LatticeVector::new(e));
            }
        }
        let mut i = free.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            x[i] += 1;
            if x[i] <= radius {
                break;
            }
            x[i] = -radius;
        }
    }
}

/// All Demazure roots with `‖e‖∞ ≤ bound`, grouped by ray, lex-sorted.
pub fn enumerate_roots(cone: &Cone, bound: i64) -> Result<Vec<DemazureRoot>> {
    check_cone(cone)?;
    if bound < 1 {
        return Err(Error::domain("root bound must be at least 1"));
    }
    let minus_one = -BigInt::one();
    let mut out = Vec::new();
    for (i, v) in cone.rays().iter().enumerate() {
        let mut found = Vec::new();
        for_each_on_hyperplane(v, &minus_one, bound, |e| {
            let ok = cone
                .rays()
                .iter()
                .enumerate()
                .all(|(j, w)| j == i || !e.dot(w).is_negative());
            if ok {
                found.push(e);
            }
        });
        found.sort();
        for e in found {
            let pairings = cone.rays().iter().map(|w| e.dot(w)).collect();
            out.push(DemazureRoot { ray: i, e, pairings });
        }
    }
    Ok(out)
}

/// Commutation of `δ_e` and `δ_{e'}` for roots on distinct rays:
/// `⟨e, v'⟩ = 0` and `⟨e', v⟩ = 0`.
pub fn lnds_commute(cone: &Cone, e: &DemazureRoot, e2: &DemazureRoot) -> Result<bool> {
    if e.ray == e2.ray {
        return Err(Error::domain(
            "roots on the same ray define equivalent derivations, which always commute",
        ));
    }
    let (v, v2) = (&cone.rays()[e.ray], &cone.rays()[e2.ray]);
    Ok(e.e.dot(v2).is_zero() && e2.e.dot(v).is_zero())
}

/// Whether some commuting pair of roots lives on rays `i` and `j`.
pub fn commuting_pair_exists(cone: &Cone, i: usize, j: usize) -> Result<bool> {
    check_cone(cone)?;
    Ok(cone.two_face_adjacent(i, j)? && extends_to_basis(&cone.rays()[i], &cone.rays()[j])?)
}

/// Least `k ≥ 0` with `⟨base + kω, vₘ⟩ ≥ 0` for every ray `m` outside `skip`.
fn least_shift(cone: &Cone, base: &LatticeVector, omega: &LatticeVector, skip: [usize; 2]) -> BigInt {
    let mut k = BigInt::zero();
    for (m, v) in cone.rays().iter().enumerate() {
        if skip.contains(&m) {
            continue;
        }
        let (b, w) = (base.dot(v), omega.dot(v));
        // ω is positive on every ray outside the face.
        let need = (-b).div_ceil(&w);
        if need > k {
            k = need;
        }
    }
    k
}

/// Roots `e` on ray `i` and `e'` on ray `j` with zero cross-pairings.
pub fn construct_commuting_pair(cone: &Cone, i: usize, j: usize) -> Result<(DemazureRoot, DemazureRoot)> {
    if !commuting_pair_exists(cone, i, j)? {
        return Err(Error::Infeasible(format!(
            "rays {} and {} do not admit a commuting pair of roots",
            cone.rays()[i],
            cone.rays()[j]
        )));
    }
    let (v, v2) = (&cone.rays()[i], &cone.rays()[j]);
    let (e0, e1) = solve_dual_pair(v, v2)?;
    let omega = cone.two_face_witness(i, j)?.expect("adjacent rays have a witness");
    let k = least_shift(cone, &e0, &omega, [i, j]);
    let l = least_shift(cone, &e1, &omega, [i, j]);
    let e = DemazureRoot::new(cone, &e0 + &omega.scale(&k))?;
    let e2 = DemazureRoot::new(cone, &e1 + &omega.scale(&l))?;
    debug_assert!(lnds_commute(cone, &e, &e2).unwrap_or(false));
    Ok((e, e2))
}

/// Maximality of `δ_e`, with a commuting inequivalent root when it fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalityVerdict {
    pub maximal: bool,
    pub witness: Option<DemazureRoot>,
    /// Set when the verdict only rests on a sufficient condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `δ_e` is maximal iff `⟨e, v'⟩ ≠ 0` for every ray `v'` sharing a
/// two-dimensional face with the ray of `e`.
pub fn is_maximal(cone: &Cone, e: &DemazureRoot) -> Result<MaximalityVerdict> {
    for j in cone.adjacency_set(e.ray)? {
        if e.e.dot(&cone.rays()[j]).is_zero() {
            let (_, witness) = construct_commuting_pair(cone, e.ray, j)?;
            return Ok(MaximalityVerdict {
                maximal: false,
                witness: Some(witness),
                note: None,
            });
        }
    }
    Ok(MaximalityVerdict {
        maximal: true,
        witness: None,
        note: None,
    })
}

/// [`is_maximal`] for an algebra that may be non-normal, where the face
/// criterion is only known to be sufficient.
pub fn is_maximal_in(algebra: &ToricAlgebra, e: &DemazureRoot) -> Result<MaximalityVerdict> {
    let mut verdict = is_maximal(algebra.cone(), e)?;
    if !algebra.is_normal() {
        verdict.note = Some("non-normal semigroup: the face criterion is a sufficient condition only".into());
    }
    Ok(verdict)
}

/// Weights of generators of `Ker δ_e = ⊕_{m ∈ ρᵢ⊥} kχ^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelDescription {
    pub ray: usize,
    pub generators: Vec<LatticeVector>,
    pub complete: bool,
}

/// Hilbert basis of the face `ρᵢ⊥ ∩ σ∨ ∩ M`.
pub fn kernel_of_root(cone: &Cone, e: &DemazureRoot, bound: &BigInt) -> Result<KernelDescription> {
    kernel_of_ray(cone, e.ray, bound)
}

pub fn kernel_of_ray(cone: &Cone, ray: usize, bound: &BigInt) -> Result<KernelDescription> {
    let v = &cone.rays()[ray];
    let face_rays: Vec<LatticeVector> = cone
        .dual()
        .rays()
        .iter()
        .filter(|m| m.dot(v).is_zero())
        .cloned()
        .collect();
    let face = Cone::new(cone.rank(), face_rays)?;
    let hb = hilbert_basis(&face, bound)?;
    Ok(KernelDescription {
        ray,
        generators: hb.elements().to_vec(),
        complete: hb.is_complete(),
    })
}

/// Two roots define equivalent LNDs iff they lie on the same ray.
pub fn roots_equivalent(e: &DemazureRoot, e2: &DemazureRoot) -> bool {
    e.ray == e2.ray
}

/// A local slice `f = χ^s` with `g = δ_e(f) = χ^{s+e}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSlice {
    pub f: LatticeVector,
    pub g: LatticeVector,
}

/// The slice `χ^s` with `⟨s, vᵢ⟩ = 1` and `s, s+e ∈ σ∨`, least in degree
/// `⟨s, Σvⱼ⟩` and then lexicographically.
pub fn find_local_slice(cone: &Cone, e: &DemazureRoot) -> Result<LocalSlice> {
    let n = cone.rank();
    let grading = cone.rays().iter().fold(LatticeVector::zero(n), |acc, r| &acc + r);
    // Points of σ∨ of degree ≤ D lie in the box of radius D·max(‖h‖∞/⟨h,g⟩)
    // over the dual rays h.
    let ratio = cone
        .dual()
        .rays()
        .iter()
        .map(|h| BigRational::new(h.norm_inf(), h.dot(&grading)))
        .max()
        .unwrap_or_else(BigRational::zero);
    let in_dual = |x: &LatticeVector| cone.rays().iter().all(|v| !x.dot(v).is_negative());
    let v = &cone.rays()[e.ray];
    let mut radius = 1;
    while radius <= SLICE_RADIUS_LIMIT {
        let mut best: Option<(BigInt, LatticeVector)> = None;
        for_each_on_hyperplane(v, &BigInt::one(), radius, |s| {
            let g = &s + &e.e;
            if in_dual(&s) && in_dual(&g) {
                let key = (s.dot(&grading), s);
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        });
        if let Some((deg, s)) = best {
            let reach = (BigRational::from_integer(deg) * &ratio).floor().to_integer();
            if reach <= BigInt::from(radius) {
                let g = &s + &e.e;
                return Ok(LocalSlice { f: s, g });
            }
        }
        radius *= 2;
    }
    Err(Error::NotFound(format!(
        "no local slice within box radius {SLICE_RADIUS_LIMIT}"
    )))
}

/// `h·g^l = f^r·p` for a homogeneous `h = χ^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceExpression {
    #[serde(serialize_with = "crate::lattice::vector::serialize_bigint")]
    pub r: BigInt,
    #[serde(serialize_with = "crate::lattice::vector::serialize_bigint")]
    pub l: BigInt,
    pub p: LatticeVector,
}

impl SliceExpression {
    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn l(&self) -> &BigInt {
        &self.l
    }
}

pub fn express_in_slice(
    cone: &Cone,
    e: &DemazureRoot,
    slice: &LocalSlice,
    m: &LatticeVector,
) -> Result<SliceExpression> {
    if m.rank() != cone.rank() {
        return Err(Error::dimension(cone.rank(), m.rank()));
    }
    if !cone.rays().iter().all(|v| !m.dot(v).is_negative()) {
        return Err(Error::domain(format!("{m} is not in the dual cone")));
    }
    let r = m.dot(&cone.rays()[e.ray]);
    let base = m - &slice.f.scale(&r);
    let mut l = BigInt::zero();
    for (j, v) in cone.rays().iter().enumerate() {
        if j == e.ray {
            continue;
        }
        let (b, w) = (base.dot(v), slice.g.dot(v));
        if !b.is_negative() {
            continue;
        }
        if w.is_zero() {
            return Err(Error::NotFound(format!(
                "no power of the slice image clears the ray {v} for {m}"
            )));
        }
        let need = (-b).div_ceil(&w);
        if need > l {
            l = need;
        }
    }
    let p = &base + &slice.g.scale(&l);
    Ok(SliceExpression { r, l, p })
}

/// `T_δ = {t : t^e = 1}`.
pub fn isotropy_torus(cone: &Cone, e: &DemazureRoot) -> Result<QuasitorusPresentation> {
    quasitorus_kernel(&QuasitorusPresentation::torus(cone.rank()), &e.e)
}

/// The finite group `S_δ` of lattice automorphisms of `M` that permute the
/// Hilbert basis of `σ∨ ∩ M`, fix `e` and whose dual fixes `vᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SDelta {
    pub order: usize,
    /// Kernel weights the permutations act on.
    pub kernel_weights: Vec<LatticeVector>,
    /// A generating set, as permutations of the kernel weights.
    pub generators: Vec<Vec<usize>>,
    /// All group elements as matrices acting on column vectors of `M`.
    #[serde(skip)]
    pub elements: Vec<LatticeMatrix>,
}

fn complete_hilbert_basis(cone: &Cone, bound: &BigInt) -> Result<Vec<LatticeVector>> {
    let hb = hilbert_basis(&cone.dual_as_cone()?, bound)?;
    if !hb.is_complete() {
        return Err(Error::Refused {
            reason: format!(
                "the Hilbert basis of the dual cone has {} elements beyond the bound {bound}",
                hb.omitted()
            ),
            witness: Some(Witness::Condition {
                name: "hilbert_basis_incomplete".into(),
                detail: format!("{} elements omitted at bound {bound}", hb.omitted()),
            }),
        });
    }
    Ok(hb.elements().to_vec())
}

/// The matrix `G` with `G·bₖ = cₖ` for a basis `b` of `Q^n`, if integral.
fn integral_map(sources: &[LatticeVector], targets: &[LatticeVector]) -> Option<LatticeMatrix> {
    let n = sources[0].rank();
    let b = LatticeMatrix::from_columns(n, sources).ok()?;
    let c = LatticeMatrix::from_columns(n, targets).ok()?;
    let inv = b.rational_inverse()?;
    let mut g = LatticeMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x: BigRational = (0..n)
                .map(|k| BigRational::from_integer(c[(i, k)].clone()) * &inv[k][j])
                .sum();
            if !x.is_integer() {
                return None;
            }
            g[(i, j)] = x.to_integer();
        }
    }
    Some(g)
}

fn independent_indices(vectors: &[LatticeVector], n: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut idx = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        chosen.push(v.clone());
        if rational_rank(&chosen, n) == chosen.len() {
            idx.push(i);
        } else {
            chosen.pop();
        }
    }
    idx
}

/// Permutation of `weights` induced by `g`.
fn induced_permutation(g: &LatticeMatrix, weights: &[LatticeVector]) -> Option<Vec<usize>> {
    weights
        .iter()
        .map(|w| {
            let img = g.mul_vector(w).ok()?;
            weights.iter().position(|x| *x == img)
        })
        .collect()
}

/// Smallest generating set found greedily: keep an element when it is not
/// already in the closure of the ones kept.
fn greedy_generators(perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let Some(first) = perms.first() else {
        return Vec::new();
    };
    let identity: Vec<usize> = (0..first.len()).collect();
    let mut closure: BTreeSet<Vec<usize>> = BTreeSet::from([identity]);
    let mut gens = Vec::new();
    for p in perms {
        if closure.contains(p) {
            continue;
        }
        gens.push(p.clone());
        let mut frontier: Vec<Vec<usize>> = closure.iter().cloned().collect();
        while let Some(a) = frontier.pop() {
            for g in &gens {
                let c: Vec<usize> = a.iter().map(|&i| g[i]).collect();
                if closure.insert(c.clone()) {
                    frontier.push(c);
                }
            }
        }
    }
    gens
}

/// `S_δ` by enumerating images of `n` independent Hilbert-basis elements.
pub fn s_delta(cone: &Cone, e: &DemazureRoot, hilbert_bound: &BigInt) -> Result<SDelta> {
    let n = cone.rank();
    let basis = complete_hilbert_basis(cone, hilbert_bound)?;
    let v = &cone.rays()[e.ray];
    let level: Vec<BigInt> = basis.iter().map(|h| h.dot(v)).collect();
    let src_idx = independent_indices(&basis, n);
    let sources: Vec<LatticeVector> = src_idx.iter().map(|&i| basis[i].clone()).collect();
    let set: BTreeSet<&LatticeVector> = basis.iter().collect();
    let kernel_weights: Vec<LatticeVector> = basis.iter().filter(|h| h.dot(v).is_zero()).cloned().collect();

    let mut elements = Vec::new();
    let mut choice = vec![0usize; n];
    'outer: loop {
        // Images must be distinct and keep the pairing with vᵢ.
        let distinct = choice.iter().collect::<BTreeSet<_>>().len() == n;
        let levels_ok = src_idx.iter().zip(&choice).all(|(&s, &t)| level[s] == level[t]);
        if distinct && levels_ok {
            let targets: Vec<LatticeVector> = choice.iter().map(|&t| basis[t].clone()).collect();
            if let Some(g) = integral_map(&sources, &targets) {
                let unimodular = g.determinant().map(|d| d.abs().is_one()).unwrap_or(false);
                let permutes = basis
                    .iter()
                    .all(|h| g.mul_vector(h).map(|x| set.contains(&x)).unwrap_or(false));
                let fixes_e = g.mul_vector(&e.e).map(|x| x == e.e).unwrap_or(false);
                let fixes_v = g.transpose().mul_vector(v).map(|x| x == *v).unwrap_or(false);
                if unimodular && permutes && fixes_e && fixes_v {
                    elements.push(g);
                }
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < basis.len() {
                break;
            }
            choice[i] = 0;
        }
    }
    elements.sort_by_key(|g| induced_permutation(g, &kernel_weights));
    let perms: Vec<Vec<usize>> = elements
        .iter()
        .map(|g| induced_permutation(g, &kernel_weights).expect("automorphism permutes kernel weights"))
        .collect();
    Ok(SDelta {
        order: elements.len(),
        generators: greedy_generators(&perms),
        kernel_weights,
        elements,
    })
}

/// `S_δ` by the permutation-extension test: a permutation of the kernel
/// weights together with `γ(e) = e` determines `γ`; keep it when `γ` is
/// integral, unimodular and sends every other Hilbert-basis weight to one.
pub fn s_delta_by_permutations(cone: &Cone, e: &DemazureRoot, hilbert_bound: &BigInt) -> Result<usize> {
    let n = cone.rank();
    let basis = complete_hilbert_basis(cone, hilbert_bound)?;
    let v = &cone.rays()[e.ray];
    let ys: Vec<LatticeVector> = basis.iter().filter(|h| h.dot(v).is_zero()).cloned().collect();
    let zs: BTreeSet<LatticeVector> = basis.iter().filter(|h| !h.dot(v).is_zero()).cloned().collect();
    let idx = independent_indices(&ys, n);
    let mut sources: Vec<LatticeVector> = idx.iter().map(|&i| ys[i].clone()).collect();
    sources.push(e.e.clone());
    if rational_rank(&sources, n) != n {
        return Err(Error::domain("kernel weights and the root do not span the lattice"));
    }
    let mut count = 0;
    for perm in permutations(ys.len()) {
        let mut targets: Vec<LatticeVector> = idx.iter().map(|&i| ys[perm[i]].clone()).collect();
        targets.push(e.e.clone());
        let Some(g) = integral_map(&sources, &targets) else {
            continue;
        };
        let consistent = ys
            .iter()
            .enumerate()
            .all(|(k, y)| g.mul_vector(y).ok() == Some(ys[perm[k]].clone()));
        let z_ok = zs
            .iter()
            .all(|z| g.mul_vector(z).map(|x| zs.contains(&x)).unwrap_or(false));
        let unimodular = g.determinant().map(|d| d.abs().is_one()).unwrap_or(false);
        if consistent && z_ok && unimodular {
            count += 1;
        }
    }
    Ok(count)
}

/// All permutations of `0..k` in lex order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        out.push(p.clone());
        // Next permutation in lex order.
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Whether `δ_e` maps the semigroup algebra `k[S]` into itself: for each
/// generator `m` with `⟨m, v⟩ ≠ 0`, `m + e` must lie in `S`. The ray `v` is
/// the unique ray pairing negatively with `e`.
pub fn root_admissible_nonnormal(semigroup: &[LatticeVector], cone: &Cone, e: &LatticeVector) -> Result<bool> {
    check_cone(cone)?;
    if e.rank() != cone.rank() {
        return Err(Error::dimension(cone.rank(), e.rank()));
    }
    let negative: Vec<&LatticeVector> = cone.rays().iter().filter(|v| e.dot(v).is_negative()).collect();
    let [v] = negative.as_slice() else {
        return Err(Error::domain(format!(
            "{e} must pair negatively with exactly one ray of the cone"
        )));
    };
    let algebra = ToricAlgebra::with_semigroup(cone, semigroup.to_vec())?;
    for m in algebra.semigroup_generators() {
        if m.dot(v).is_zero() {
            continue;
        }
        let target = m + e;
        if !algebra.in_dual_cone(&target)
            || !semigroup_contains(
                algebra.semigroup_generators(),
                cone,
                algebra.grading(),
                &target,
                MEMBERSHIP_BUDGET,
            )?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Options shared by the toric analyses.
#[derive(Clone, Debug)]
pub struct ToricOptions {
    pub hilbert_bound: BigInt,
}

impl Default for ToricOptions {
    fn default() -> Self {
        ToricOptions {
            hilbert_bound: BigInt::from(DEFAULT_HILBERT_BOUND),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ToricIsotropyReport {
    pub root: LatticeVector,
    pub ray: usize,
    pub ray_vector: LatticeVector,
    #[serde(serialize_with = "crate::lattice::vector::serialize_bigints")]
    pub pairings: Vec<BigInt>,
    pub maximal: bool,
    pub witness: Option<DemazureRoot>,
    pub torus: QuasitorusPresentation,
    pub s_delta_order: usize,
    pub s_delta_generators: Vec<Vec<usize>>,
    pub kernel_generators: Vec<LatticeVector>,
    pub kernel_complete: bool,
    pub slice: LocalSlice,
    pub hilbert_basis: Vec<LatticeVector>,
    #[serde(serialize_with = "crate::lattice::vector::serialize_bigint")]
    pub hilbert_bound: BigInt,
}

/// Assembles `T_δ`, `S_δ`, the kernel of the replica family and a slice for
/// a maximal root; refuses non-maximal roots with a commuting witness.
pub fn toric_isotropy_report(cone: &Cone, e: &DemazureRoot, opts: &ToricOptions) -> Result<ToricIsotropyReport> {
    let verdict = is_maximal(cone, e)?;
    if !verdict.maximal {
        let w = verdict.witness.expect("non-maximal verdicts carry a witness");
        return Err(Error::Refused {
            reason: format!(
                "δ_e for e = {} is not maximal: the root {} on ray {} commutes with it",
                e.e,
                w.e,
                cone.rays()[w.ray]
            ),
            witness: Some(Witness::ToricRoot {
                ray: w.ray,
                root: w.e.clone(),
            }),
        });
    }
    let kernel = kernel_of_root(cone, e, &opts.hilbert_bound)?;
    let sd = s_delta(cone, e, &opts.hilbert_bound)?;
    let hb = complete_hilbert_basis(cone, &opts.hilbert_bound)?;
    Ok(ToricIsotropyReport {
        root: e.e.clone(),
        ray: e.ray,
        ray_vector: cone.rays()[e.ray].clone(),
        pairings: e.pairings.clone(),
        maximal: true,
        witness: None,
        torus: isotropy_torus(cone, e)?,
        s_delta_order: sd.order,
        s_delta_generators: sd.generators,
        kernel_generators: kernel.generators,
        kernel_complete: kernel.complete,
        slice: find_local_slice(cone, e)?,
        hilbert_basis: hb,
        hilbert_bound: opts.hilbert_bound.clone(),
    })
}

/// Roots grouped by ray index, for reports.
pub fn roots_by_ray(roots: &[DemazureRoot]) -> BTreeMap<usize, Vec<LatticeVector>> {
    let mut out: BTreeMap<usize, Vec<LatticeVector>> = BTreeMap::new();
    for r in roots {
        out.entry(r.ray).or_default().push(r.e.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(x)
    }

    fn pyramid() -> Cone {
        Cone::from_i64_rays(3, &[&[0, 0, 1], &[2, 0, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap()
    }

    fn orthant(n: usize) -> Cone {
        Cone::new(n, (0..n).map(|i| LatticeVector::unit(n, i)).collect()).unwrap()
    }

    fn root(c: &Cone, e: &[i64]) -> DemazureRoot {
        DemazureRoot::new(c, v(e)).unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn pyramid_root() {
        let c = pyramid();
        let r = root(&c, &[1, 2, -1]);
        assert_eq!(c.rays()[r.ray()], v(&[0, 0, 1]));
        // rays are lex-sorted: a=(0,0,1), c=(0,1,1), d=(1,1,1), b=(2,0,1)
        let by_name: Vec<BigInt> = [&[0, 0, 1], &[2, 0, 1], &[0, 1, 1], &[1, 1, 1]]
            .iter()
            .map(|w| r.e().dot(&v(*w)))
            .collect();
        assert_eq!(by_name, vec![big(-1), big(1), big(1), big(2)]);
        assert_eq!(is_demazure_root(&c, &v(&[0, 0, 0])).unwrap(), None);
    }

    #[test]
    fn orthant_roots() {
        let c = orthant(2);
        assert_eq!(is_demazure_root(&c, &v(&[-1, 3])).unwrap(), c.ray_index(&v(&[1, 0])));
        let roots = enumerate_roots(&c, 2).unwrap();
        let e1 = c.ray_index(&v(&[1, 0])).unwrap();
        let on_e1: Vec<LatticeVector> = roots.iter().filter(|r| r.ray() == e1).map(|r| r.e().clone()).collect();
        assert_eq!(on_e1, vec![v(&[-1, 0]), v(&[-1, 1]), v(&[-1, 2])]);
        assert_eq!(roots.len(), 6);
    }

    #[test]
    fn pyramid_roots_within_three() {
        let roots = enumerate_roots(&pyramid(), 3).unwrap();
        assert!(roots.iter().any(|r| *r.e() == v(&[1, 2, -1])));
    }

    #[test]
    fn commutation_in_orthant() {
        let c = orthant(2);
        let (a, b) = (root(&c, &[-1, 0]), root(&c, &[0, -1]));
        assert!(lnds_commute(&c, &a, &b).unwrap());
        let a2 = root(&c, &[-1, 1]);
        assert!(!lnds_commute(&c, &a2, &b).unwrap());
        assert!(matches!(lnds_commute(&c, &a, &a2), Err(Error::Domain(_))));
    }

    #[test]
    fn pair_existence() {
        let c = orthant(3);
        assert!(commuting_pair_exists(&c, 0, 1).unwrap());
        let c = Cone::from_i64_rays(2, &[&[1, 1], &[1, -1]]).unwrap();
        assert!(!commuting_pair_exists(&c, 0, 1).unwrap());
        assert!(matches!(construct_commuting_pair(&c, 0, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn orthant_pair_construction() {
        let c = orthant(2);
        let i = c.ray_index(&v(&[1, 0])).unwrap();
        let j = c.ray_index(&v(&[0, 1])).unwrap();
        let (a, b) = construct_commuting_pair(&c, i, j).unwrap();
        assert_eq!((a.e().clone(), b.e().clone()), (v(&[-1, 0]), v(&[0, -1])));
        let c3 = orthant(3);
        let (a, b) = construct_commuting_pair(&c3, 0, 1).unwrap();
        assert!(lnds_commute(&c3, &a, &b).unwrap());
    }

    #[test]
    fn maximality_examples() {
        let c = pyramid();
        assert!(is_maximal(&c, &root(&c, &[1, 2, -1])).unwrap().maximal);
        let o = orthant(2);
        let verdict = is_maximal(&o, &root(&o, &[-1, 0])).unwrap();
        assert!(!verdict.maximal);
        assert_eq!(verdict.witness.unwrap().e(), &v(&[0, -1]));
        assert!(is_maximal(&o, &root(&o, &[-1, 1])).unwrap().maximal);
    }

    #[test]
    fn pyramid_kernel_and_slice() {
        let c = pyramid();
        let r = root(&c, &[1, 2, -1]);
        let k = kernel_of_root(&c, &r, &big(5)).unwrap();
        assert_eq!(k.generators, vec![v(&[0, 1, 0]), v(&[1, 0, 0])]);
        assert!(k.complete);
        let s = find_local_slice(&c, &r).unwrap();
        assert_eq!(s.f, v(&[0, -1, 1]));
        assert_eq!(s.g, v(&[1, 1, 0]));
    }

    #[test]
    fn slice_expression_reconstructs() {
        let c = pyramid();
        let r = root(&c, &[1, 2, -1]);
        let s = find_local_slice(&c, &r).unwrap();
        for m in [v(&[-1, -1, 2]), v(&[0, 1, 0]), v(&[0, -1, 1]), v(&[3, -2, 4])] {
            let x = express_in_slice(&c, &r, &s, &m).unwrap();
            assert_eq!(&m + &s.g.scale(x.l()), &s.f.scale(x.r()) + &x.p);
            assert!(c.rays().iter().all(|w| !x.p.dot(w).is_negative()));
        }
        let own = express_in_slice(&c, &r, &s, &s.f).unwrap();
        assert_eq!(
            (own.r().clone(), own.l().clone(), own.p.clone()),
            (big(1), big(0), v(&[0, 0, 0]))
        );
    }

    #[test]
    fn torus_of_primitive_root() {
        let c = pyramid();
        let t = isotropy_torus(&c, &root(&c, &[1, 2, -1])).unwrap();
        assert_eq!(t.free_rank(), 2);
        assert!(t.torsion().is_empty());
        let o = orthant(2);
        assert_eq!(isotropy_torus(&o, &root(&o, &[-1, 0])).unwrap().free_rank(), 1);
    }

    #[test]
    fn s_delta_examples() {
        let c = pyramid();
        let r = root(&c, &[1, 2, -1]);
        assert_eq!(s_delta(&c, &r, &big(8)).unwrap().order, 1);
        assert_eq!(s_delta_by_permutations(&c, &r, &big(8)).unwrap(), 1);

        let o = orthant(3);
        let r = root(&o, &[-1, 0, 0]);
        let sd = s_delta(&o, &r, &big(8)).unwrap();
        assert_eq!(sd.order, 2);
        assert_eq!(sd.generators, vec![vec![1, 0]]);
        assert_eq!(s_delta_by_permutations(&o, &r, &big(8)).unwrap(), 2);
    }

    #[test]
    fn s_delta_needs_complete_basis() {
        let c = Cone::from_i64_rays(2, &[&[1, 0], &[1, 7]]).unwrap();
        let r = enumerate_roots(&c, 5).unwrap().remove(0);
        assert!(matches!(s_delta(&c, &r, &big(1)), Err(Error::Refused { .. })));
    }

    #[test]
    fn numerical_semigroup_admissibility() {
        let c = Cone::from_i64_rays(1, &[&[1]]).unwrap();
        let s = [v(&[2]), v(&[3])];
        assert!(!root_admissible_nonnormal(&s, &c, &v(&[-1])).unwrap());
        assert!(!root_admissible_nonnormal(&s, &c, &v(&[-2])).unwrap());
        assert!(root_admissible_nonnormal(&[v(&[1])], &c, &v(&[-1])).unwrap());
    }

    #[test]
    fn report_for_pyramid() {
        let c = pyramid();
        let rep = toric_isotropy_report(&c, &root(&c, &[1, 2, -1]), &ToricOptions::default()).unwrap();
        assert!(rep.maximal);
        assert_eq!(rep.s_delta_order, 1);
        assert_eq!(rep.torus.free_rank(), 2);
        assert_eq!(rep.kernel_generators.len(), 2);
    }

    #[test]
    fn report_refuses_non_maximal() {
        let o = orthant(2);
        let err = toric_isotropy_report(&o, &root(&o, &[-1, 0]), &ToricOptions::default()).unwrap_err();
        assert!(err.is_refusal());
        assert!(matches!(err.witness(), Some(Witness::ToricRoot { .. })));
    }

    #[test]
    fn permutations_in_lex_order() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
