//! Hilbert `CH_N`-module structure on `H^•_N = ⊕_k Λ^k V* ⊗ H_N`.
//!
//! The right action is `(α ⊗ u)·a = α ⊗ (u ∘ a)` and the `CH`-valued product
//! is `(α ⊗ u, β ⊗ v) = g₀(α, β) u^♯ ⊗ v`, extended sesquilinearly. Distinct
//! form degrees are `g₀`-orthogonal, so mixed-degree contributions vanish.

use std::collections::BTreeMap;

use crate::compacts::CompactOp;
use crate::error::{check_dim, Error, Result};
use crate::fock::{FockVector, GradedElement, Side, WedgeIndex};
use crate::{CMat, C64};

/// Possibly non-homogeneous element of `H^•_N`, stored per degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    fiber_dim: usize,
    parts: BTreeMap<usize, GradedElement>,
}

impl ModuleElement {
    pub fn zero(fiber_dim: usize) -> Self {
        Self {
            fiber_dim,
            parts: BTreeMap::new(),
        }
    }

    pub fn from_graded(x: GradedElement) -> Self {
        let mut out = Self::zero(x.fiber_dim());
        out.parts.insert(x.degree(), x);
        out
    }

    /// Sum of graded parts; each degree may appear at most once.
    pub fn from_parts(
        fiber_dim: usize,
        parts: impl IntoIterator<Item = GradedElement>,
    ) -> Result<Self> {
        let mut out = Self::zero(fiber_dim);
        for p in parts {
            check_dim(fiber_dim, p.fiber_dim())?;
            let k = p.degree();
            if out.parts.insert(k, p).is_some() {
                return Err(Error::DegreeMismatch { left: k, right: k });
            }
        }
        Ok(out)
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn part(&self, degree: usize) -> Option<&GradedElement> {
        self.parts.get(&degree)
    }

    pub fn parts(&self) -> impl Iterator<Item = &GradedElement> {
        self.parts.values()
    }

    /// Component along a wedge basis element; zero when the degree is absent.
    pub fn component(&self, index: WedgeIndex) -> FockVector {
        self.parts
            .get(&index.degree())
            .and_then(|p| p.component(index))
            .cloned()
            .unwrap_or_else(|| FockVector::zeros(self.fiber_dim, Side::Dual))
    }

    /// Coordinates over the full wedge basis `1, ε¹, ε², ε¹∧ε²`, absent
    /// degrees filled with zeros.
    pub fn flatten(&self) -> Vec<C64> {
        all_wedge_indices()
            .flat_map(|w| {
                self.component(w)
                    .into_coords()
                    .iter()
                    .copied()
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.fiber_dim, other.fiber_dim)?;
        let mut parts = self.parts.clone();
        for (k, p) in &other.parts {
            let merged = match parts.get(k) {
                Some(q) => q.add(p)?,
                None => p.clone(),
            };
            parts.insert(*k, merged);
        }
        Ok(Self {
            fiber_dim: self.fiber_dim,
            parts,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            fiber_dim: self.fiber_dim,
            parts: self.parts.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    /// Euclidean distance of the flattened coordinates.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_dim(self.fiber_dim, other.fiber_dim)?;
        Ok(self
            .flatten()
            .iter()
            .zip(other.flatten())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

fn all_wedge_indices() -> impl Iterator<Item = WedgeIndex> {
    (0..=2).flat_map(|k| WedgeIndex::basis(k).iter().copied())
}

/// `(α ⊗ u)·a = α ⊗ (u ∘ a)` on a homogeneous element.
pub fn act_graded(x: &GradedElement, a: &CompactOp) -> Result<GradedElement> {
    check_dim(x.fiber_dim(), a.dim())?;
    Ok(x.map_components(|f| {
        a.pull_back(f)
            .expect("component sides and dims were checked")
    }))
}

pub fn act(x: &ModuleElement, a: &CompactOp) -> Result<ModuleElement> {
    check_dim(x.fiber_dim, a.dim())?;
    let parts = x
        .parts
        .iter()
        .map(|(k, p)| Ok((*k, act_graded(p, a)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(ModuleElement {
        fiber_dim: x.fiber_dim,
        parts,
    })
}

/// `CH`-valued product of two elements of the same degree.
pub fn ch_product_graded(x: &GradedElement, y: &GradedElement) -> Result<CompactOp> {
    x.check_compatible(y)?;
    let n = x.fiber_dim();
    let mut acc = CMat::zeros(n, n);
    for (u, v) in x.components().iter().zip(y.components()) {
        // u^♯ ⊗ v has entries conj(u_m) v_n
        acc += u.coords().conjugate() * v.coords().transpose();
    }
    CompactOp::new(acc)
}

pub fn ch_product(x: &ModuleElement, y: &ModuleElement) -> Result<CompactOp> {
    check_dim(x.fiber_dim, y.fiber_dim)?;
    let mut acc = CompactOp::zeros(x.fiber_dim);
    for (k, p) in &x.parts {
        if let Some(q) = y.parts.get(k) {
            acc = acc.add(&ch_product_graded(p, q)?)?;
        }
    }
    Ok(acc)
}

/// `‖x‖ = √‖(x, x)‖_CH`.
pub fn module_norm(x: &ModuleElement) -> f64 {
    ch_product(x, x)
        .expect("an element is compatible with itself")
        .op_norm()
        .sqrt()
}

/// The finite generating set `{𝔞 ⊗ w}` over the wedge basis, for a fixed
/// nonzero pivot functional `w`.
#[derive(Debug, Clone)]
pub struct Generators {
    pivot: FockVector,
    elements: Vec<(WedgeIndex, ModuleElement)>,
}

impl Generators {
    pub fn new(pivot: FockVector) -> Result<Self> {
        pivot.expect_side(Side::Dual)?;
        if pivot.norm_squared() == 0.0 {
            return Err(Error::ZeroPivot);
        }
        let elements = all_wedge_indices()
            .map(|w| {
                Ok((
                    w,
                    ModuleElement::from_graded(GradedElement::basis_tensor(w, &pivot)?),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { pivot, elements })
    }

    /// Generators with pivot `e₀`.
    pub fn standard(fiber_dim: usize) -> Self {
        Self::new(FockVector::basis(fiber_dim, 0, Side::Dual)).expect("e0 is a nonzero pivot")
    }

    pub fn pivot(&self) -> &FockVector {
        &self.pivot
    }

    pub fn elements(&self) -> impl Iterator<Item = &ModuleElement> {
        self.elements.iter().map(|(_, e)| e)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `p_{v', w}: k ↦ v'(k) w^♯ / ‖w‖²`, so that `w ∘ p_{v', w} = v'`.
    pub fn projector(&self, target: &FockVector) -> Result<CompactOp> {
        let w_sharp = self
            .pivot
            .sharp()?
            .scale(C64::new(1.0 / self.pivot.norm_squared(), 0.0));
        CompactOp::rank_one(&w_sharp, target)
    }

    /// Coefficients `a_𝔞` with `Σ (𝔞 ⊗ w)·a_𝔞 = x`, one per generator.
    pub fn reconstruct(&self, x: &ModuleElement) -> Result<Vec<CompactOp>> {
        check_dim(self.pivot.dim(), x.fiber_dim())?;
        self.elements
            .iter()
            .map(|(w, _)| self.projector(&x.component(*w)))
            .collect()
    }

    /// `Σ gen_𝔞 · a_𝔞`.
    pub fn resum(&self, coefficients: &[CompactOp]) -> Result<ModuleElement> {
        check_dim(self.elements.len(), coefficients.len())?;
        let mut acc = ModuleElement::zero(self.pivot.dim());
        for ((_, g), a) in self.elements.iter().zip(coefficients) {
            acc = acc.add(&act(g, a)?)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn e(n: usize, i: usize) -> FockVector {
        FockVector::basis(n, i, Side::Dual)
    }

    #[test]
    fn identity_acts_trivially() {
        let f = FockVector::from_slice(&[c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5)], Side::Dual);
        let x = ModuleElement::from_graded(
            GradedElement::tensor(1, &[c(1.0, 0.0), c(0.0, 2.0)], &f).unwrap(),
        );
        assert_eq!(act(&x, &CompactOp::identity(3)).unwrap(), x);
    }

    #[test]
    fn action_by_rank_one_evaluates_the_coefficient() {
        // (α ⊗ u)·(w ⊗ g) = u(w) (α ⊗ g)
        let u = FockVector::from_slice(&[c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)], Side::Dual);
        let w = FockVector::from_slice(&[c(0.5, 0.0), c(0.0, 1.0), c(1.0, 0.0)], Side::Primal);
        let g = FockVector::from_slice(&[c(0.0, 0.0), c(1.0, -1.0), c(2.0, 3.0)], Side::Dual);
        let x =
            ModuleElement::from_graded(GradedElement::basis_tensor(WedgeIndex::E2, &u).unwrap());
        let lhs = act(&x, &CompactOp::rank_one(&w, &g).unwrap()).unwrap();
        let uw = u.eval(&w).unwrap();
        let rhs = ModuleElement::from_graded(
            GradedElement::basis_tensor(WedgeIndex::E2, &g.scale(uw)).unwrap(),
        );
        assert!(lhs.distance(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn product_of_orthogonal_wedge_parts_vanishes() {
        let u = e(4, 1);
        let v = e(4, 2);
        let x =
            ModuleElement::from_graded(GradedElement::basis_tensor(WedgeIndex::E1, &u).unwrap());
        let y =
            ModuleElement::from_graded(GradedElement::basis_tensor(WedgeIndex::E2, &v).unwrap());
        assert_eq!(ch_product(&x, &y).unwrap().max_abs(), 0.0);
        let z =
            ModuleElement::from_graded(GradedElement::basis_tensor(WedgeIndex::ONE, &v).unwrap());
        assert_eq!(ch_product(&x, &z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn product_of_unit_vector_with_itself_is_a_rank_one_projection() {
        let s = 1.0 / 3f64.sqrt();
        let f = FockVector::from_slice(&[c(s, 0.0), c(0.0, s), c(-s, 0.0)], Side::Dual);
        let x =
            ModuleElement::from_graded(GradedElement::basis_tensor(WedgeIndex::ONE, &f).unwrap());
        let ev = ch_product(&x, &x).unwrap().hermitian_eigenvalues();
        assert!((ev[2] - 1.0).abs() < 1e-14);
        assert!(ev[0].abs() < 1e-14 && ev[1].abs() < 1e-14);
    }

    #[test]
    fn norm_of_zero_is_zero() {
        assert_eq!(module_norm(&ModuleElement::zero(5)), 0.0);
    }

    #[test]
    fn lemma_two_worked_example() {
        // (ε¹ ⊗ e₀)·p_{e₂, e₀} = ε¹ ⊗ e₂
        let gens = Generators::standard(4);
        let target = ModuleElement::from_graded(
            GradedElement::basis_tensor(WedgeIndex::E1, &e(4, 2)).unwrap(),
        );
        let coeffs = gens.reconstruct(&target).unwrap();
        let nonzero: Vec<usize> = (0..4).filter(|&i| coeffs[i].max_abs() > 0.0).collect();
        assert_eq!(nonzero, vec![1]);
        assert_eq!(coeffs[1], gens.projector(&e(4, 2)).unwrap());
        assert_eq!(coeffs[1], CompactOp::matrix_unit(4, 0, 2));
        assert_eq!(gens.resum(&coeffs).unwrap().distance(&target).unwrap(), 0.0);
    }

    #[test]
    fn reconstruction_of_zero_has_zero_coefficients() {
        let gens = Generators::standard(3);
        let coeffs = gens.reconstruct(&ModuleElement::zero(3)).unwrap();
        assert_eq!(coeffs.len(), 4);
        assert!(coeffs.iter().all(|a| a.max_abs() == 0.0));
    }

    #[test]
    fn zero_pivot_is_rejected() {
        assert!(matches!(
            Generators::new(FockVector::zeros(3, Side::Dual)),
            Err(Error::ZeroPivot)
        ));
    }

    #[test]
    fn duplicate_degrees_are_rejected() {
        let a = GradedElement::zero(1, 3).unwrap();
        assert!(ModuleElement::from_parts(3, [a.clone(), a]).is_err());
    }
}
