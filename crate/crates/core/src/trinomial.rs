//! Trinomial hypersurfaces `T₀^{l₀} + T₁^{l₁} + T₂^{l₂} = 0`: rigidity, the
//! fine grading, homogeneous LNDs of the two normal forms and their isotropy
//! data.
//!
//! A hypersurface is stored with the orientation `T₁^{l₁} = T₂^{l₂} + T₀^{l₀}`
//! (the last term is 1 for type I). In the normal forms the `T₁` block holds
//! the variables `x` (exponent 1) and `y` (exponent `a > 1`), the `T₂` block
//! the variables `z`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{exp_t, Derivation, Grading, Polynomial, TrinomialRing, DEFAULT_CAP};
use crate::error::{Error, Result, Witness};
use crate::lattice::{quasitorus_kernel, LatticeVector, QuasitorusPresentation};
use crate::toric_lnd::permutations;

/// Default bound on the total degree of sampled replica multipliers.
pub const DEFAULT_REPLICA_DEGREE: usize = 4;

/// Largest symmetric-group product enumerated for `S_δ`.
const MAX_PERMUTATIONS: usize = 1_000_000;

/// Exponent data as read from input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrinomialData {
    #[serde(default)]
    pub l0: Vec<u32>,
    pub l1: Vec<u32>,
    pub l2: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrinomialType {
    I,
    II,
}

impl TrinomialData {
    pub fn new(l0: Vec<u32>, l1: Vec<u32>, l2: Vec<u32>) -> Result<Self> {
        let data = TrinomialData {
            l0,
            l1,
            l2,
            names: None,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn type_one(l1: Vec<u32>, l2: Vec<u32>) -> Result<Self> {
        Self::new(Vec::new(), l1, l2)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        self.names = Some(names);
        self.validate()?;
        Ok(self)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let data: TrinomialData = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l1.is_empty() || self.l2.is_empty() {
            return Err(Error::validation("the blocks l1 and l2 must be nonempty"));
        }
        if self.l0.iter().chain(&self.l1).chain(&self.l2).any(|&l| l == 0) {
            return Err(Error::validation("trinomial exponents must be positive"));
        }
        if let Some(names) = &self.names {
            if names.len() != self.n() {
                return Err(Error::dimension(self.n(), names.len()));
            }
            let distinct: BTreeSet<&String> = names.iter().collect();
            if distinct.len() != names.len() || names.iter().any(|s| s.trim().is_empty()) {
                return Err(Error::validation("variable names must be distinct and nonempty"));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.l0.len() + self.l1.len() + self.l2.len()
    }

    pub fn kind(&self) -> TrinomialType {
        if self.l0.is_empty() {
            TrinomialType::I
        } else {
            TrinomialType::II
        }
    }

    fn block(&self, i: usize) -> &[u32] {
        match i {
            0 => &self.l0,
            1 => &self.l1,
            _ => &self.l2,
        }
    }
}

/// Which rigidity condition fails, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RigidityVerdict {
    pub rigid: bool,
    /// 1: some exponent equals 1. 2: `n₀ ≠ 0` and two blocks consist of even
    /// exponents, each containing a 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<u8>,
    /// Blocks witnessing the condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
}

pub fn is_rigid(data: &TrinomialData) -> RigidityVerdict {
    for i in 0..3 {
        if data.block(i).contains(&1) {
            return RigidityVerdict {
                rigid: false,
                condition: Some(1),
                blocks: Some(vec![i]),
            };
        }
    }
    if !data.l0.is_empty() {
        let even_with_two = |b: &[u32]| b.contains(&2) && b.iter().all(|l| l % 2 == 0);
        for i in 0..3 {
            for j in i + 1..3 {
                if even_with_two(data.block(i)) && even_with_two(data.block(j)) {
                    return RigidityVerdict {
                        rigid: false,
                        condition: Some(2),
                        blocks: Some(vec![i, j]),
                    };
                }
            }
        }
    }
    RigidityVerdict {
        rigid: true,
        condition: None,
        blocks: None,
    }
}

/// `K = Zⁿ / Im(Lᵀ)` with the degrees `Q(e_ij)` of the variables.
#[derive(Clone, Debug, Serialize)]
pub struct GradingGroup {
    pub group: QuasitorusPresentation,
    #[serde(serialize_with = "crate::lattice::vector::serialize_bigints")]
    pub invariant_factors: Vec<BigInt>,
    /// Canonical forms of `Q(e_ij)` in ring order.
    pub degrees: Vec<LatticeVector>,
    /// Canonical form of the common degree `μ` of the three monomials.
    pub mu: LatticeVector,
}

impl GradingGroup {
    pub fn grading(&self) -> Grading {
        let n = self.group.ambient();
        let units = (0..n).map(|i| LatticeVector::unit(n, i)).collect();
        Grading::in_group(units, self.group.clone()).expect("unit degrees match the ambient rank")
    }
}

fn block_vector(data: &TrinomialData, i: usize) -> LatticeVector {
    let mut v = vec![0i64; data.n()];
    let offset = match i {
        0 => 0,
        1 => data.l0.len(),
        _ => data.l0.len() + data.l1.len(),
    };
    for (k, &l) in data.block(i).iter().enumerate() {
        v[offset + k] = l as i64;
    }
    LatticeVector::from_i64s(&v)
}

pub fn grading_group(data: &TrinomialData) -> Result<GradingGroup> {
    data.validate()?;
    let n = data.n();
    let (m0, m1, m2) = (block_vector(data, 0), block_vector(data, 1), block_vector(data, 2));
    let rows = [&m1 - &m0, &m2 - &m0];
    let group = QuasitorusPresentation::from_relations(n, &rows)?;
    for (a, b) in [(&m0, &m1), (&m1, &m2)] {
        if !group.same_element(a, b)? {
            return Err(Error::validation("the three monomials have different degrees"));
        }
    }
    let degrees = (0..n)
        .map(|i| group.canonical(&LatticeVector::unit(n, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradingGroup {
        invariant_factors: group.invariant_factors(),
        mu: group.canonical(&m1)?,
        degrees,
        group,
    })
}

/// Variable positions of a type I hypersurface in one of the two normal forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrinomialForm {
    /// 1: a single `z`. 2: several `z`, all with exponent `> 1`.
    pub case: u8,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub a: Vec<u32>,
    pub z: Vec<usize>,
    pub l: Vec<u32>,
}

impl TrinomialForm {
    pub fn k(&self) -> usize {
        self.x.len()
    }

    pub fn m(&self) -> usize {
        self.y.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    #[serde(rename = "type")]
    pub kind: TrinomialType,
    pub equation: String,
    /// Whether the `T₁` and `T₂` blocks were exchanged to put unit
    /// exponents on the left.
    pub swapped: bool,
    pub form: Option<FormSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormSummary {
    pub case: u8,
    pub k: usize,
    pub m: usize,
    pub a: Vec<u32>,
    pub l: Vec<u32>,
}

/// An analysed hypersurface: oriented data, its ring and grading.
#[derive(Clone, Debug)]
pub struct Trinomial {
    data: TrinomialData,
    swapped: bool,
    ring: TrinomialRing,
    grading: GradingGroup,
    form: std::result::Result<TrinomialForm, String>,
}

fn default_names(data: &TrinomialData) -> Vec<String> {
    let label = |prefix: &str, count: usize, idx: usize| {
        if count == 1 {
            prefix.to_string()
        } else {
            format!("{prefix}{}", idx + 1)
        }
    };
    let mut names = Vec::with_capacity(data.n());
    for k in 0..data.l0.len() {
        names.push(label("u", data.l0.len(), k));
    }
    let xs = data.l1.iter().filter(|&&l| l == 1).count();
    let ys = data.l1.len() - xs;
    let (mut xi, mut yi) = (0, 0);
    for &l in &data.l1 {
        if l == 1 {
            names.push(label("x", xs, xi));
            xi += 1;
        } else {
            names.push(label("y", ys, yi));
            yi += 1;
        }
    }
    for k in 0..data.l2.len() {
        names.push(label("z", data.l2.len(), k));
    }
    names
}

fn detect_form(data: &TrinomialData) -> std::result::Result<TrinomialForm, String> {
    if data.kind() == TrinomialType::II {
        return Err("type II hypersurfaces have no normal form here".into());
    }
    let offset = data.l1.len();
    let x: Vec<usize> = (0..offset).filter(|&k| data.l1[k] == 1).collect();
    if x.is_empty() {
        return Err("no variable occurs with exponent 1; the hypersurface is rigid".into());
    }
    if data.l2.len() == 1 && data.l2[0] == 1 {
        return Err("z occurs linearly and the hypersurface is an affine space".into());
    }
    if data.l2.contains(&1) {
        return Err("both monomials contain a variable with exponent 1".into());
    }
    let y: Vec<usize> = (0..offset).filter(|&k| data.l1[k] > 1).collect();
    Ok(TrinomialForm {
        case: if data.l2.len() == 1 { 1 } else { 2 },
        a: y.iter().map(|&k| data.l1[k]).collect(),
        x,
        y,
        z: (offset..offset + data.l2.len()).collect(),
        l: data.l2.clone(),
    })
}

fn monomial_string(names: &[String], exps: &[(usize, u32)]) -> String {
    if exps.is_empty() {
        return "1".into();
    }
    exps.iter()
        .map(|&(i, l)| {
            if l == 1 {
                names[i].clone()
            } else {
                format!("{}^{l}", names[i])
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl Trinomial {
    pub fn new(data: &TrinomialData) -> Result<Self> {
        data.validate()?;
        let mut data = data.clone();
        let swapped = data.kind() == TrinomialType::I && !data.l1.contains(&1) && data.l2.contains(&1);
        if swapped {
            let n1 = data.l1.len();
            std::mem::swap(&mut data.l1, &mut data.l2);
            if let Some(names) = &mut data.names {
                names.rotate_left(n1);
            }
        }
        let names = data.names.clone().unwrap_or_else(|| default_names(&data));
        let ring = TrinomialRing::new(data.l0.clone(), data.l1.clone(), data.l2.clone())?.with_names(names)?;
        let grading = grading_group(&data)?;
        let form = detect_form(&data).map(|mut f| {
            // Ring order puts the T₀ block first; type I has none.
            let off = data.l0.len();
            for v in f.x.iter_mut().chain(f.y.iter_mut()).chain(f.z.iter_mut()) {
                *v += off;
            }
            f
        });
        Ok(Trinomial {
            data,
            swapped,
            ring,
            grading,
            form,
        })
    }

    pub fn data(&self) -> &TrinomialData {
        &self.data
    }

    pub fn ring(&self) -> &TrinomialRing {
        &self.ring
    }

    pub fn names(&self) -> &[String] {
        self.ring.names()
    }

    pub fn grading_group(&self) -> &GradingGroup {
        &self.grading
    }

    pub fn form(&self) -> Result<&TrinomialForm> {
        self.form.as_ref().map_err(|e| Error::domain(e.clone()))
    }

    pub fn nvars(&self) -> usize {
        self.data.n()
    }

    /// `x·y^a = z^l + 1` with the stored names.
    pub fn equation(&self) -> String {
        let names = self.names();
        let block = |i: usize| -> Vec<(usize, u32)> {
            self.ring.block(i).zip(self.ring.exponents(i).iter().copied()).collect()
        };
        let tail = if self.data.l0.is_empty() {
            "1".to_string()
        } else {
            monomial_string(names, &block(0))
        };
        format!(
            "{} = {} + {}",
            monomial_string(names, &block(1)),
            monomial_string(names, &block(2)),
            tail
        )
    }

    pub fn classify(&self) -> Classification {
        let (form, form_note) = match &self.form {
            Ok(f) => (
                Some(FormSummary {
                    case: f.case,
                    k: f.k(),
                    m: f.m(),
                    a: f.a.clone(),
                    l: f.l.clone(),
                }),
                None,
            ),
            Err(e) => (None, Some(e.clone())),
        };
        Classification {
            kind: self.data.kind(),
            equation: self.equation(),
            swapped: self.swapped,
            form,
            form_note,
        }
    }

    fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(self.nvars(), i)
    }

    fn product(&self, factors: impl IntoIterator<Item = (usize, u32)>) -> Polynomial {
        factors
            .into_iter()
            .fold(Polynomial::one(self.nvars()), |acc, (v, l)| &acc * &self.var(v).pow(l))
    }

    /// `x_{≠i}·y^a`, the monomial multiplying `δ(z)`.
    fn h1(&self, f: &TrinomialForm, i: usize) -> Polynomial {
        let xs = f.x.iter().enumerate().filter(|&(s, _)| s != i).map(|(_, &v)| (v, 1));
        let ys = f.y.iter().copied().zip(f.a.iter().copied());
        self.product(xs.chain(ys))
    }

    fn label(&self, kind: LndKind, h: &Polynomial) -> String {
        let base = match kind {
            LndKind::Case1 { i } => format!("d{}", i + 1),
            LndKind::Case2 { i, j } => format!("d{},{}", i + 1, j + 1),
        };
        if *h == Polynomial::one(self.nvars()) {
            base
        } else {
            format!("({})*{base}", h.display_with(self.names()))
        }
    }

    /// The irreducible derivation `∂_i` (case 1) or `∂_{ij}` (case 2), with
    /// zero-based indices into the `x` and `z` lists.
    pub fn irreducible(&self, kind: LndKind) -> Result<TrinomialLnd> {
        let f = self.form()?;
        let n = self.nvars();
        let mut images = vec![Polynomial::zero(n); n];
        match kind {
            LndKind::Case1 { i } => {
                if f.case != 1 || i >= f.k() {
                    return Err(Error::domain(format!("no case 1 derivation d{}", i + 1)));
                }
                let (z, l) = (f.z[0], f.l[0]);
                images[f.x[i]] = self.product([(z, l - 1)]).scale(&BigRational::from_integer(l.into()));
                images[z] = self.h1(f, i);
            }
            LndKind::Case2 { i, j } => {
                if f.case != 2 || i >= f.k() || j >= f.z.len() {
                    return Err(Error::domain(format!("no case 2 derivation d{},{}", i + 1, j + 1)));
                }
                let zs =
                    f.z.iter()
                        .zip(&f.l)
                        .enumerate()
                        .map(|(s, (&v, &l))| (v, if s == j { l - 1 } else { l }));
                images[f.x[i]] = self.product(zs).scale(&BigRational::from_integer(f.l[j].into()));
                images[f.z[j]] = self.h1(f, i);
            }
        }
        let one = Polynomial::one(n);
        Ok(TrinomialLnd {
            label: self.label(kind, &one),
            kind,
            replica: one,
            derivation: Derivation::new(images)?,
        })
    }

    /// All irreducible homogeneous LNDs of the normal form.
    pub fn lnds(&self) -> Result<Vec<TrinomialLnd>> {
        let f = self.form()?;
        let kinds: Vec<LndKind> = match f.case {
            1 => (0..f.k()).map(|i| LndKind::Case1 { i }).collect(),
            _ => (0..f.k())
                .flat_map(|i| (0..f.z.len()).map(move |j| LndKind::Case2 { i, j }))
                .collect(),
        };
        kinds.into_iter().map(|k| self.irreducible(k)).collect()
    }

    pub fn lnds_case1(&self) -> Result<Vec<TrinomialLnd>> {
        if self.form()?.case != 1 {
            return Err(Error::domain("the hypersurface is not of the single-z form"));
        }
        self.lnds()
    }

    pub fn lnds_case2(&self) -> Result<Vec<TrinomialLnd>> {
        if self.form()?.case != 2 {
            return Err(Error::domain("the hypersurface is not of the several-z form"));
        }
        self.lnds()
    }

    /// Variables killed by the irreducible derivation of `kind`.
    pub fn kernel_variables(&self, kind: LndKind) -> Result<Vec<usize>> {
        let f = self.form()?;
        let (xi, zj) = match kind {
            LndKind::Case1 { i } => (f.x[i], f.z[0]),
            LndKind::Case2 { i, j } => (f.x[i], f.z[j]),
        };
        Ok((0..self.nvars()).filter(|&v| v != xi && v != zj).collect())
    }

    fn is_homogeneous(&self, h: &Polynomial) -> Result<bool> {
        let g = self.grading.grading();
        let mut degrees = h.terms().map(|(e, _)| g.monomial_degree(e));
        let Some(first) = degrees.next().transpose()? else {
            return Ok(true);
        };
        for d in degrees {
            if d? != first {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The replica `h·∂` for `h` in the kernel of `∂`.
    pub fn replica(&self, lnd: &TrinomialLnd, h: &Polynomial) -> Result<TrinomialLnd> {
        let n = self.nvars();
        if h.nvars() != n {
            return Err(Error::dimension(n, h.nvars()));
        }
        if h.is_zero() || h.has_negative_exponents() {
            return Err(Error::domain("replica multipliers must be nonzero polynomials"));
        }
        let kernel = self.kernel_variables(lnd.kind)?;
        if let Some(v) = (0..n).find(|v| !kernel.contains(v) && h.involves(*v)) {
            return Err(Error::domain(format!(
                "the multiplier involves {}, which is not in the kernel",
                self.names()[v]
            )));
        }
        if !self.is_homogeneous(h)? {
            return Err(Error::domain("the multiplier is not homogeneous"));
        }
        let replica = &lnd.replica * h;
        let base = self.irreducible(lnd.kind)?;
        Ok(TrinomialLnd {
            label: self.label(lnd.kind, &replica),
            kind: lnd.kind,
            derivation: base.derivation.replica(&replica).map_images(|p| self.ring.reduce(p)),
            replica,
        })
    }

    /// Identifies `δ = h·∂` among the constructed derivations.
    pub fn recognize(&self, delta: &Derivation) -> Result<TrinomialLnd> {
        let n = self.nvars();
        if delta.nvars() != n {
            return Err(Error::dimension(n, delta.nvars()));
        }
        let target = delta.map_images(|p| self.ring.reduce(p));
        let foreign = || Error::Unsupported("the derivation is not a replica of a constructed LND".into());
        let f = self.form().map_err(|_| foreign())?;
        for base in self.lnds()? {
            let xi = match base.kind {
                LndKind::Case1 { i } | LndKind::Case2 { i, .. } => f.x[i],
            };
            let Some((e, c)) = base.derivation.image(xi).as_monomial() else {
                continue;
            };
            let neg: Vec<i64> = e.iter().map(|x| -x).collect();
            let h = target.image(xi).shift(&neg).scale(&c.recip());
            if h.is_zero() || h.has_negative_exponents() {
                continue;
            }
            if let Ok(candidate) = self.replica(&base, &h) {
                if candidate.derivation == target {
                    return Ok(candidate);
                }
            }
        }
        Err(foreign())
    }

    /// Maximality per the normal-form classification.
    pub fn maximality_verdict(&self, lnd: &TrinomialLnd) -> Result<TrinomialMaximality> {
        let f = self.form()?;
        match lnd.kind {
            LndKind::Case1 { .. } => Ok(TrinomialMaximality {
                maximal: true,
                witness: None,
                reason: "every homogeneous LND of the single-z form is maximal".into(),
            }),
            LndKind::Case2 { i, j } => {
                let missing = (0..f.z.len()).find(|&r| r != j && !lnd.replica.involves(f.z[r]));
                match missing {
                    None => Ok(TrinomialMaximality {
                        maximal: true,
                        witness: None,
                        reason: "the multiplier contains every z other than the one moved".into(),
                    }),
                    Some(r) => {
                        let w = self.irreducible(LndKind::Case2 { i, j: r })?;
                        Ok(TrinomialMaximality {
                            maximal: false,
                            reason: format!(
                                "the multiplier omits {}, so {} commutes with the derivation",
                                self.names()[f.z[r]],
                                w.label
                            ),
                            witness: Some(w),
                        })
                    }
                }
            }
        }
    }

    /// `deg δ = deg δ(T) − deg T`, checked on every term.
    pub fn degree(&self, delta: &Derivation) -> Result<LatticeVector> {
        let n = self.nvars();
        let group = &self.grading.group;
        let mut found: Option<LatticeVector> = None;
        for (j, image) in delta.images().iter().enumerate() {
            for (e, _) in image.terms() {
                let d = &LatticeVector::from_i64s(e) - &LatticeVector::unit(n, j);
                match &found {
                    None => found = Some(d),
                    Some(prev) => {
                        if !group.same_element(prev, &d)? {
                            return Err(Error::domain("the derivation is not homogeneous"));
                        }
                    }
                }
            }
        }
        Ok(found.unwrap_or_else(|| LatticeVector::zero(n)))
    }

    /// `H_δ = {h ∈ H : h(deg δ) = 1}`.
    pub fn h_delta(&self, lnd: &TrinomialLnd) -> Result<QuasitorusPresentation> {
        quasitorus_kernel(&self.grading.group, &self.degree(&lnd.derivation)?)
    }

    /// Variables `S_δ` may permute, grouped by their exponent in the
    /// equation.
    fn permutable_classes(&self, kind: LndKind) -> Result<Vec<Vec<usize>>> {
        let f = self.form()?;
        let (i, j) = match kind {
            LndKind::Case1 { i } => (i, None),
            LndKind::Case2 { i, j } => (i, Some(j)),
        };
        let mut classes: BTreeMap<(u8, u32), Vec<usize>> = BTreeMap::new();
        for (s, &v) in f.x.iter().enumerate() {
            if s != i {
                classes.entry((0, 1)).or_default().push(v);
            }
        }
        for (&v, &a) in f.y.iter().zip(&f.a) {
            classes.entry((1, a)).or_default().push(v);
        }
        if let Some(j) = j {
            for (s, (&v, &l)) in f.z.iter().zip(&f.l).enumerate() {
                if s != j {
                    classes.entry((2, l)).or_default().push(v);
                }
            }
        }
        Ok(classes.into_values().collect())
    }

    /// `S_δ`: permutations of equal-exponent kernel variables that fix the
    /// replica multiplier.
    pub fn s_delta(&self, lnd: &TrinomialLnd) -> Result<TrinomialSDelta> {
        let verdict = self.maximality_verdict(lnd)?;
        if !verdict.maximal {
            return Err(self.non_maximal_refusal(lnd, &verdict));
        }
        let n = self.nvars();
        let classes = self.permutable_classes(lnd.kind)?;
        let mut total: usize = 1;
        for c in &classes {
            total = (1..=c.len())
                .try_fold(total, |acc, k| acc.checked_mul(k))
                .unwrap_or(usize::MAX);
            if total > MAX_PERMUTATIONS {
                return Err(Error::Unsupported(format!(
                    "more than {MAX_PERMUTATIONS} candidate permutations"
                )));
            }
        }
        let per_class: Vec<Vec<Vec<usize>>> = classes.iter().map(|c| permutations(c.len())).collect();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut order = 0usize;
        let mut choice = vec![0usize; classes.len()];
        loop {
            let mut sigma: Vec<usize> = (0..n).collect();
            for ((c, perms), &k) in classes.iter().zip(&per_class).zip(&choice) {
                for (s, &t) in perms[k].iter().enumerate() {
                    sigma[c[s]] = c[t];
                }
            }
            let images: Vec<Polynomial> = sigma.iter().map(|&t| self.var(t)).collect();
            if lnd.replica.substitute(&images)? == lnd.replica {
                order += 1;
                for (v, &t) in sigma.iter().enumerate() {
                    union(&mut parent, v, t);
                }
            }
            let mut idx = choice.len();
            loop {
                if idx == 0 {
                    return Ok(self.s_delta_from_orbits(order, &classes, &mut parent));
                }
                idx -= 1;
                choice[idx] += 1;
                if choice[idx] < per_class[idx].len() {
                    break;
                }
                choice[idx] = 0;
            }
        }
    }

    fn s_delta_from_orbits(&self, order: usize, classes: &[Vec<usize>], parent: &mut [usize]) -> TrinomialSDelta {
        let mut orbits: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in classes.iter().flatten() {
            let r = find(parent, *v);
            orbits.entry(r).or_default().push(*v);
        }
        let mut factors: Vec<SymmetricFactor> = orbits
            .into_values()
            .filter(|o| o.len() > 1)
            .map(|mut o| {
                o.sort_unstable();
                SymmetricFactor {
                    degree: o.len(),
                    variables: o.iter().map(|&v| self.names()[v].clone()).collect(),
                }
            })
            .collect();
        factors.sort_by(|a, b| a.variables.cmp(&b.variables));
        let product: usize = factors.iter().map(|f| (1..=f.degree).product::<usize>()).product();
        TrinomialSDelta {
            order,
            direct_product: product == order,
            factors,
        }
    }

    fn non_maximal_refusal(&self, lnd: &TrinomialLnd, verdict: &TrinomialMaximality) -> Error {
        let w = verdict.witness.as_ref().map(|w| w.label.clone()).unwrap_or_default();
        Error::Refused {
            reason: format!(
                "{} is not maximal: {w} commutes with it without being equivalent",
                lnd.label
            ),
            witness: Some(Witness::TrinomialLnd { label: w }),
        }
    }

    /// Replica multipliers: monomials of total degree `≤ max_degree` in the
    /// kernel variables of `kind`, including 1.
    pub fn kernel_monomials(&self, kind: LndKind, max_degree: usize) -> Result<Vec<Polynomial>> {
        let vars = self.kernel_variables(kind)?;
        Ok(monomials_in(self.nvars(), &vars, max_degree))
    }

    /// Checks `δ ∘ exp(t·g·δ) = exp(t·g·δ) ∘ δ` on all generators.
    pub fn exp_commutes(&self, lnd: &TrinomialLnd, g: &Polynomial, cap: usize) -> Result<bool> {
        let n = self.nvars();
        let d = lnd.derivation.replica(g).map_images(|p| self.ring.reduce(p));
        let phi: Vec<Polynomial> = (0..n)
            .map(|v| exp_t(&d, &self.var(v), cap, &self.ring))
            .collect::<Result<_>>()?;
        let mut images = phi.clone();
        images.push(Polynomial::var(n + 1, n));
        let delta = lnd.derivation.extend_vars(1);
        for (v, phi_v) in phi.iter().enumerate() {
            let lhs = self.ring.reduce(&delta.apply(phi_v));
            let rhs = self
                .ring
                .reduce(&lnd.derivation.image(v).extend_vars(1).substitute(&images)?);
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Assembles `S_δ`, `H_δ` and `U(δ)` for a maximal derivation.
    pub fn isotropy_report(&self, lnd: &TrinomialLnd, opts: &TrinomialOptions) -> Result<TrinomialIsotropyReport> {
        let f = self.form()?;
        if f.case == 1 && f.k() == 1 {
            return Err(Error::Refused {
                reason: "with a single x the hypersurface is a Danielewski variety; its isotropy groups are \
                         outside this tool"
                    .into(),
                witness: Some(Witness::Condition {
                    name: "danielewski_case".into(),
                    detail: self.equation(),
                }),
            });
        }
        let verdict = self.maximality_verdict(lnd)?;
        if !verdict.maximal {
            return Err(self.non_maximal_refusal(lnd, &verdict));
        }
        let s = self.s_delta(lnd)?;
        let h = self.h_delta(lnd)?;
        let kernel = self.kernel_variables(lnd.kind)?;
        let kernel_names: Vec<String> = kernel.iter().map(|&v| self.names()[v].clone()).collect();
        let moved = match lnd.kind {
            LndKind::Case1 { .. } => f.z[0],
            LndKind::Case2 { j, .. } => f.z[j],
        };
        let mut samples = vec![Polynomial::one(self.nvars())];
        samples.extend(kernel.iter().map(|&v| self.var(v)));
        samples.push(self.product(kernel.iter().map(|&v| (v, 1))));
        samples.retain(|g| g.total_degree().unwrap_or(0) <= opts.replica_degree as i64);
        for g in &samples {
            if !self.exp_commutes(lnd, g, opts.cap)? {
                return Err(Error::Inconclusive(format!(
                    "exp of the replica by {} failed to commute with the derivation",
                    g.display_with(self.names())
                )));
            }
        }
        let degree = self.degree(&lnd.derivation)?;
        Ok(TrinomialIsotropyReport {
            equation: self.equation(),
            lnd: self.describe(lnd),
            maximal: true,
            grading_group: self.grading.group.clone(),
            degree,
            h_delta: h,
            s_delta_order: s.order,
            s_delta_factors: s.factors,
            s_delta_direct_product: s.direct_product,
            kernel_generators: kernel_names.clone(),
            replica_family: format!("h*{}, h in k[{}]", lnd.label, kernel_names.join(", ")),
            plinth_generator: lnd.derivation.image(moved).display_with(self.names()),
            exp_checks: samples.len(),
            replica_degree: opts.replica_degree,
            discrepancies: self.discrepancies(lnd, s.order)?,
        })
    }

    pub fn describe(&self, lnd: &TrinomialLnd) -> LndSummary {
        let names = self.names();
        LndSummary {
            label: lnd.label.clone(),
            kind: lnd.kind,
            replica: lnd.replica.display_with(names),
            images: lnd
                .derivation
                .images()
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(v, p)| (names[v].clone(), p.display_with(names)))
                .collect(),
        }
    }

    /// Known conflicts between reference values for a worked example and
    /// the values computed from the definitions.
    fn discrepancies(&self, lnd: &TrinomialLnd, s_order: usize) -> Result<Vec<Discrepancy>> {
        let d = &self.data;
        let reference_case = d.l0.is_empty()
            && d.l1 == [1, 1, 2, 2, 7]
            && d.l2 == [3]
            && lnd.kind == LndKind::Case1 { i: 0 }
            && lnd.replica == Polynomial::one(self.nvars());
        if !reference_case {
            return Ok(Vec::new());
        }
        let f = self.form()?;
        let names = self.names();
        Ok(vec![
            Discrepancy {
                quantity: "s_delta_order".into(),
                reference: "4 (S2 x S2, exchanging x1 with x2 and y1 with y2)".into(),
                computed: s_order.to_string(),
                note: "x1 is moved by the derivation, so only x2, y1, y2, y3 can be permuted; among them only \
                       y1 and y2 share an exponent"
                    .into(),
            },
            Discrepancy {
                quantity: "image_of_z".into(),
                reference: "x2*y1^2*y2^7*y3^2".into(),
                computed: lnd.derivation.image(f.z[0]).display_with(names),
                note: "the reference exponents of y2 and y3 are exchanged relative to the equation".into(),
            },
            Discrepancy {
                quantity: "stabilized_monomial".into(),
                reference: "x1*x2*y1^2*y2^7*y3^2".into(),
                computed: self.h1(f, 0).display_with(names),
                note: "the monomial whose stabilizer defines S_delta excludes x1".into(),
            },
        ])
    }
}

fn find(parent: &mut [usize], v: usize) -> usize {
    let mut r = v;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = v;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// All monomials of total degree `≤ max_degree` in `vars`, 1 first.
pub fn monomials_in(nvars: usize, vars: &[usize], max_degree: usize) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one(nvars)];
    let mut layer = vec![(vec![0i64; nvars], 0usize)];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for (e, start) in &layer {
            for (k, &v) in vars.iter().enumerate().skip(*start) {
                let mut e2 = e.clone();
                e2[v] += 1;
                out.push(Polynomial::monomial(e2.clone(), BigRational::one()));
                next.push((e2, k));
            }
        }
        layer = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum LndKind {
    /// `∂_i` on the single-z form; `i` indexes the `x` variables.
    Case1 { i: usize },
    /// `∂_{ij}` on the several-z form; `j` indexes the `z` variables.
    Case2 { i: usize, j: usize },
}

/// A replica `h·∂` of an irreducible normal-form derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrinomialLnd {
    pub label: String,
    pub kind: LndKind,
    pub replica: Polynomial,
    pub derivation: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LndSummary {
    pub label: String,
    #[serde(flatten)]
    pub kind: LndKind,
    pub replica: String,
    pub images: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrinomialMaximality {
    pub maximal: bool,
    pub witness: Option<TrinomialLnd>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetricFactor {
    pub degree: usize,
    pub variables: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrinomialSDelta {
    pub order: usize,
    pub factors: Vec<SymmetricFactor>,
    /// Whether the group is the full product of the symmetric groups on its
    /// orbits.
    pub direct_product: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub reference: String,
    pub computed: String,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct TrinomialOptions {
    pub cap: usize,
    pub replica_degree: usize,
}

impl Default for TrinomialOptions {
    fn default() -> Self {
        TrinomialOptions {
            cap: DEFAULT_CAP,
            replica_degree: DEFAULT_REPLICA_DEGREE,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrinomialIsotropyReport {
    pub equation: String,
    pub lnd: LndSummary,
    pub maximal: bool,
    pub grading_group: QuasitorusPresentation,
    pub degree: LatticeVector,
    pub h_delta: QuasitorusPresentation,
    pub s_delta_order: usize,
    pub s_delta_factors: Vec<SymmetricFactor>,
    pub s_delta_direct_product: bool,
    pub kernel_generators: Vec<String>,
    pub replica_family: String,
    pub plinth_generator: String,
    pub exp_checks: usize,
    pub replica_degree: usize,
    pub discrepancies: Vec<Discrepancy>,
}
