use serde::Serialize;

use super::Polynomial;
use crate::error::{Error, Result};

/// `δ = Σⱼ images[j]·∂/∂xⱼ`, extended to (Laurent) polynomials by the
/// Leibniz rule.
///
/// For an algebra presented by generators and relations the images are the
/// values on the generators; callers normalize results in the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Derivation {
    images: Vec<Polynomial>,
}

impl Derivation {
    pub fn new(images: Vec<Polynomial>) -> Result<Self> {
        let n = images.len();
        for p in &images {
            if p.nvars() != n {
                return Err(Error::dimension(n, p.nvars()));
            }
        }
        Ok(Derivation { images })
    }

    pub fn zero(nvars: usize) -> Self {
        Derivation {
            images: vec![Polynomial::zero(nvars); nvars],
        }
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image(&self, j: usize) -> &Polynomial {
        &self.images[j]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Polynomial::is_zero)
    }

    /// `δ(p)` by the Leibniz rule: `δ(x^m) = Σ mⱼ x^{m-eⱼ} δ(xⱼ)`.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        assert_eq!(
            p.nvars(),
            self.nvars(),
            "derivation and polynomial live in different rings"
        );
        let n = self.nvars();
        let mut out = Polynomial::zero(n);
        for (e, c) in p.terms() {
            for (j, image) in self.images.iter().enumerate() {
                if e[j] == 0 || image.is_zero() {
                    continue;
                }
                let mut shift = e.clone();
                shift[j] -= 1;
                let coeff = c * num_rational::BigRational::from_integer(e[j].into());
                out = &out + &image.shift(&shift).scale(&coeff);
            }
        }
        out
    }

    /// `[δ, ∂]` with images `δ(∂xⱼ) − ∂(δxⱼ)`, not yet normalized.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.nvars(), other.nvars());
        Derivation {
            images: (0..self.nvars())
                .map(|j| &self.apply(&other.images[j]) - &other.apply(&self.images[j]))
                .collect(),
        }
    }

    /// The replica `h·δ`.
    pub fn replica(&self, h: &Polynomial) -> Derivation {
        Derivation {
            images: self.images.iter().map(|p| p * h).collect(),
        }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation {
            images: self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &num_rational::BigRational) -> Derivation {
        Derivation {
            images: self.images.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Appends parameter variables killed by the derivation.
    pub fn extend_vars(&self, extra: usize) -> Derivation {
        let n = self.nvars() + extra;
        let mut images: Vec<Polynomial> = self.images.iter().map(|p| p.extend_vars(extra)).collect();
        images.resize(n, Polynomial::zero(n));
        Derivation { images }
    }

    pub fn map_images(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Derivation {
        Derivation {
            images: self.images.iter().map(f).collect(),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| {
                let name = names.get(j).cloned().unwrap_or_else(|| format!("x{j}"));
                format!("{name} -> {}", p.display_with(names))
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(", ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// `x·w·∂/∂y + 2x²y·∂/∂z` on `k[x,y,z,w]`.
    fn sample() -> Derivation {
        let v = |i| Polynomial::var(4, i);
        let xw = &v(0) * &v(3);
        let x2y = &(&v(0) * &v(0)) * &v(1);
        Derivation::new(vec![Polynomial::zero(4), xw, x2y.scale(&q(2)), Polynomial::zero(4)]).unwrap()
    }

    #[test]
    fn leibniz_on_product() {
        let d = sample();
        let v = |i| Polynomial::var(4, i);
        let f = &(&v(1) * &v(1)) + &v(2);
        let g = &v(2) * &v(3);
        let lhs = d.apply(&(&f * &g));
        let rhs = &(&f * &d.apply(&g)) + &(&g * &d.apply(&f));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn laurent_character() {
        // images vⱼ·χ^{eⱼ*+e} give δ(χ^m) = ⟨m,v⟩χ^{m+e}.
        let e = [1i64, 2, -1];
        let v = [0i64, 0, 1];
        let images = (0..3)
            .map(|j| {
                let mut ex = e.to_vec();
                ex[j] += 1;
                Polynomial::monomial(ex, q(v[j]))
            })
            .collect();
        let d = Derivation::new(images).unwrap();
        let m = Polynomial::monomial(vec![-1, -1, 2], q(1));
        assert_eq!(d.apply(&m), Polynomial::monomial(vec![0, 1, 1], q(2)));
    }

    #[test]
    fn self_commutator_vanishes() {
        let d = sample();
        assert!(d.commutator(&d).is_zero());
    }
}
