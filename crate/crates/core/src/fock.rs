//! Truncated Fock space `H_N`, its dual, the musical isomorphisms and the
//! graded spaces `Λ^k V* ⊗ H_N` for `V = ℝ²`.
//!
//! Vectors in `Ȟ` (the primal side, "functions") and in `H` (the dual side,
//! "functionals") share the same coordinate representation in the Fock basis
//! `e_0, …, e_{N-1}`. A functional `f` acts on `v ∈ Ȟ` by the bilinear pairing
//! `f(v) = Σ f_n v_n`; `♯` and `♭` are coordinate conjugation with the side
//! tag swapped.

use std::fmt;

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::C64;

/// Which copy of the truncated space a vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    /// `Ȟ`: the space the compact operators act on.
    Primal,
    /// `H`: continuous functionals on `Ȟ`; the fiber of the module.
    Dual,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Primal => write!(f, "Ȟ"),
            Side::Dual => write!(f, "H"),
        }
    }
}

/// Element of the truncated fiber in Fock coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coords: DVector<C64>,
    side: Side,
}

impl FockVector {
    pub fn new(coords: DVector<C64>, side: Side) -> Self {
        Self { coords, side }
    }

    pub fn from_slice(coords: &[C64], side: Side) -> Self {
        Self::new(DVector::from_column_slice(coords), side)
    }

    pub fn zeros(n: usize, side: Side) -> Self {
        Self::new(DVector::zeros(n), side)
    }

    /// Fock basis vector `e_level`.
    pub fn basis(n: usize, level: usize, side: Side) -> Self {
        let mut v = DVector::zeros(n);
        v[level] = C64::new(1.0, 0.0);
        Self::new(v, side)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<C64> {
        self.coords
    }

    pub fn norm_squared(&self) -> f64 {
        self.coords.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(&self.coords * c, self.side)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::new(&self.coords + &other.coords, self.side))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::new(&self.coords - &other.coords, self.side))
    }

    /// `f(v)` for a functional `self ∈ H` evaluated on `v ∈ Ȟ`.
    pub fn eval(&self, v: &FockVector) -> Result<C64> {
        self.expect_side(Side::Dual)?;
        v.expect_side(Side::Primal)?;
        check_dim(self.dim(), v.dim())?;
        Ok(self
            .coords
            .iter()
            .zip(v.coords.iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    /// `♯: H → Ȟ`.
    pub fn sharp(&self) -> Result<Self> {
        self.expect_side(Side::Dual)?;
        Ok(Self::new(self.coords.conjugate(), Side::Primal))
    }

    /// `♭: Ȟ → H`.
    pub fn flat(&self) -> Result<Self> {
        self.expect_side(Side::Primal)?;
        Ok(Self::new(self.coords.conjugate(), Side::Dual))
    }

    pub(crate) fn expect_side(&self, side: Side) -> Result<()> {
        if self.side == side {
            Ok(())
        } else {
            Err(Error::SideMismatch {
                expected: side,
                got: self.side,
            })
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        other.expect_side(self.side)?;
        check_dim(self.dim(), other.dim())
    }
}

/// Hilbert inner product, anti-linear in the left slot.
pub fn inner_product(f: &FockVector, g: &FockVector) -> Result<C64> {
    f.check_compatible(g)?;
    Ok(f.coords.dotc(&g.coords))
}

/// Basis element `ε^{i_1} ∧ … ∧ ε^{i_k}` of `Λ^k (ℝ²)*`, stored as a bit set
/// (bit 0 for `ε¹`, bit 1 for `ε²`) so that indices are strictly increasing by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WedgeIndex(u8);

impl WedgeIndex {
    pub const ONE: WedgeIndex = WedgeIndex(0b00);
    pub const E1: WedgeIndex = WedgeIndex(0b01);
    pub const E2: WedgeIndex = WedgeIndex(0b10);
    pub const E12: WedgeIndex = WedgeIndex(0b11);

    /// Build from a strictly increasing list of 1-based indices into `{ε¹, ε²}`.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        let mut last = 0usize;
        for &i in indices {
            if !(1..=2).contains(&i) || i <= last {
                return Err(Error::InvalidDegree(indices.len()));
            }
            mask |= 1 << (i - 1);
            last = i;
        }
        Ok(WedgeIndex(mask))
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> Vec<usize> {
        (1..=2).filter(|i| self.0 & (1 << (i - 1)) != 0).collect()
    }

    /// Wedge basis of degree `k`, in lexicographic order.
    pub fn basis(k: usize) -> &'static [WedgeIndex] {
        match k {
            0 => &[WedgeIndex::ONE],
            1 => &[WedgeIndex::E1, WedgeIndex::E2],
            2 => &[WedgeIndex::E12],
            _ => &[],
        }
    }

    /// Position of this index inside [`WedgeIndex::basis`] of its degree.
    pub fn position(self) -> usize {
        match self {
            WedgeIndex::E2 => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for WedgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WedgeIndex::ONE => write!(f, "1"),
            WedgeIndex::E1 => write!(f, "ε¹"),
            WedgeIndex::E2 => write!(f, "ε²"),
            _ => write!(f, "ε¹∧ε²"),
        }
    }
}

/// `dim Λ^k (ℝ²)* = C(2, k)`.
pub fn wedge_dim(k: usize) -> usize {
    WedgeIndex::basis(k).len()
}

pub(crate) fn check_degree(k: usize) -> Result<()> {
    if k <= 2 {
        Ok(())
    } else {
        Err(Error::InvalidDegree(k))
    }
}

/// Element of `H^k_N = Λ^k V* ⊗ H_N`: one dual-side Fock vector per wedge
/// basis index of degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedElement {
    degree: usize,
    components: Vec<FockVector>,
}

impl GradedElement {
    pub fn zero(degree: usize, n: usize) -> Result<Self> {
        check_degree(degree)?;
        let components = (0..wedge_dim(degree))
            .map(|_| FockVector::zeros(n, Side::Dual))
            .collect();
        Ok(Self { degree, components })
    }

    /// Components listed in the order of [`WedgeIndex::basis`].
    pub fn from_components(degree: usize, components: Vec<FockVector>) -> Result<Self> {
        check_degree(degree)?;
        check_dim(wedge_dim(degree), components.len())?;
        let n = components[0].dim();
        for c in &components {
            c.expect_side(Side::Dual)?;
            check_dim(n, c.dim())?;
        }
        Ok(Self { degree, components })
    }

    /// `α ⊗ f` where `form` lists the coefficients of `α` in the wedge basis.
    pub fn tensor(degree: usize, form: &[C64], f: &FockVector) -> Result<Self> {
        check_degree(degree)?;
        check_dim(wedge_dim(degree), form.len())?;
        f.expect_side(Side::Dual)?;
        Self::from_components(degree, form.iter().map(|&c| f.scale(c)).collect())
    }

    /// `ε ⊗ f` for a single wedge basis element.
    pub fn basis_tensor(index: WedgeIndex, f: &FockVector) -> Result<Self> {
        let k = index.degree();
        let mut form = vec![C64::new(0.0, 0.0); wedge_dim(k)];
        form[index.position()] = C64::new(1.0, 0.0);
        Self::tensor(k, &form, f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn fiber_dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[FockVector] {
        &self.components
    }

    pub fn component(&self, index: WedgeIndex) -> Option<&FockVector> {
        if index.degree() == self.degree {
            self.components.get(index.position())
        } else {
            None
        }
    }

    /// All coordinates, wedge-major.
    pub fn flatten(&self) -> Vec<C64> {
        self.components
            .iter()
            .flat_map(|c| c.coords().iter().copied())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(FockVector::is_zero)
    }

    pub fn map_components<F>(&self, f: F) -> Self
    where
        F: Fn(&FockVector) -> FockVector,
    {
        Self {
            degree: self.degree,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            degree: self.degree,
            components,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map_components(|f| f.scale(c))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        check_dim(self.fiber_dim(), other.fiber_dim())
    }
}

/// Hodge-type product on `H^k`: the wedge basis is orthonormal, so this is
/// the sum of the component inner products.
pub fn graded_inner(x: &GradedElement, y: &GradedElement) -> Result<C64> {
    x.check_compatible(y)?;
    x.components
        .iter()
        .zip(&y.components)
        .map(|(a, b)| inner_product(a, b))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basis_is_orthonormal() {
        for i in 0..4 {
            for j in 0..4 {
                let ei = FockVector::basis(4, i, Side::Dual);
                let ej = FockVector::basis(4, j, Side::Dual);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(inner_product(&ei, &ej).unwrap(), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn inner_product_is_antilinear_on_the_left() {
        let e0 = FockVector::basis(3, 0, Side::Dual);
        let ip = inner_product(&e0.scale(c(2.0, 0.0)), &e0.scale(c(3.0, 0.0))).unwrap();
        assert_eq!(ip, c(6.0, 0.0));
        let ip = inner_product(&e0.scale(c(0.0, 1.0)), &e0).unwrap();
        assert_eq!(ip, c(0.0, -1.0));
    }

    #[test]
    fn inner_product_rejects_mismatches() {
        let a = FockVector::zeros(3, Side::Dual);
        let b = FockVector::zeros(4, Side::Dual);
        assert!(matches!(
            inner_product(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        let p = FockVector::zeros(3, Side::Primal);
        assert!(matches!(
            inner_product(&a, &p),
            Err(Error::SideMismatch { .. })
        ));
    }

    #[test]
    fn musical_maps() {
        let e0 = FockVector::basis(3, 0, Side::Dual);
        assert_eq!(e0.sharp().unwrap(), FockVector::basis(3, 0, Side::Primal));
        let ie1 = FockVector::basis(3, 1, Side::Dual).scale(c(0.0, 1.0));
        let s = ie1.sharp().unwrap();
        assert_eq!(s.coords()[1], c(0.0, -1.0));
        assert_eq!(s.side(), Side::Primal);
        assert!(e0.flat().is_err());
        assert!(s.sharp().is_err());
        assert_eq!(s.flat().unwrap(), ie1);
    }

    #[test]
    fn wedge_indices() {
        assert_eq!(WedgeIndex::from_indices(&[]).unwrap(), WedgeIndex::ONE);
        assert_eq!(WedgeIndex::from_indices(&[1, 2]).unwrap(), WedgeIndex::E12);
        assert!(WedgeIndex::from_indices(&[2, 1]).is_err());
        assert!(WedgeIndex::from_indices(&[1, 1]).is_err());
        assert!(WedgeIndex::from_indices(&[3]).is_err());
        for k in 0..=2 {
            let basis = WedgeIndex::basis(k);
            assert_eq!(basis.len(), [1, 2, 1][k]);
            for (pos, w) in basis.iter().enumerate() {
                assert_eq!(w.degree(), k);
                assert_eq!(w.position(), pos);
                assert_eq!(w.indices().len(), k);
            }
        }
        assert_eq!(wedge_dim(3), 0);
    }

    #[test]
    fn graded_inner_on_basis_tensors() {
        let e0 = FockVector::basis(3, 0, Side::Dual);
        let x = GradedElement::basis_tensor(WedgeIndex::E1, &e0).unwrap();
        let y = GradedElement::basis_tensor(WedgeIndex::E2, &e0).unwrap();
        assert_eq!(graded_inner(&x, &x).unwrap(), c(1.0, 0.0));
        assert_eq!(graded_inner(&x, &y).unwrap(), c(0.0, 0.0));
        let z = GradedElement::basis_tensor(WedgeIndex::ONE, &e0).unwrap();
        assert!(matches!(
            graded_inner(&x, &z),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn graded_element_rejects_primal_components() {
        let p = FockVector::zeros(3, Side::Primal);
        assert!(GradedElement::from_components(0, vec![p]).is_err());
        assert!(GradedElement::zero(3, 4).is_err());
    }
}
