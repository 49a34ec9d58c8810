//! Truncated infinitesimal oscillator representation of `sp(2, ℝ)`.
//!
//! Ladder operators act on the Fock basis by `a|n⟩ = √n |n-1⟩` and
//! `a†|n⟩ = √(n+1) |n+1⟩`. The `su(1,1)` generators are
//! `K₀ = ½(a†a + ½)`, `K₊ = ½(a†)²`, `K₋ = ½a²`, truncated symmetrically to
//! the levels `0..N`. The real form of `sp(2, ℝ)` is spanned by the
//! skew-Hermitian matrices
//!
//! * `X₀ = i K₀` (elliptic, generates the compact `U(1)` direction),
//! * `X₁ = i (K₊ + K₋)`,
//! * `X₂ = K₊ - K₋`,
//!
//! with brackets `[X₀, X₁] = -X₂`, `[X₀, X₂] = X₁`, `[X₁, X₂] = 4 X₀`.
//!
//! `dσ̌(X)` acts on `Ȟ` by the matrix, the dual representation acts on
//! functionals by `dσ(X) f = -f ∘ dσ̌(X)`, and `dρ(X) a = [dσ̌(X), a]` is the
//! induced action on the compact operators.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::compacts::{max_abs, CompactOp};
use crate::error::Result;
use crate::fock::{FockVector, Side};
use crate::module_structure::ch_product_graded;
use crate::sampling::Sampler;
use crate::{CMat, GradedElement, C64};

/// `t` such that `exp(t X₀)` projects to one full turn of `SO(2) ⊂ Sp(2, ℝ)`.
pub const FULL_TURN: f64 = 4.0 * PI;

fn cplx(re: f64) -> C64 {
    C64::new(re, 0.0)
}

const I: C64 = C64::new(0.0, 1.0);

pub fn annihilation(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| {
        if j == i + 1 {
            cplx((j as f64).sqrt())
        } else {
            cplx(0.0)
        }
    })
}

pub fn creation(n: usize) -> CMat {
    annihilation(n).adjoint()
}

/// `K₀ = ½(a†a + ½)`, diagonal with entries `n/2 + ¼`.
pub fn k0(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            cplx(i as f64 / 2.0 + 0.25)
        } else {
            cplx(0.0)
        }
    })
}

/// `K₊ = ½(a†)²`, truncated entrywise from the infinite matrix.
pub fn kplus(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| {
        if i == j + 2 {
            cplx(0.5 * (((j + 1) * (j + 2)) as f64).sqrt())
        } else {
            cplx(0.0)
        }
    })
}

/// `K₋ = ½a²`.
pub fn kminus(n: usize) -> CMat {
    kplus(n).adjoint()
}

/// Named directions of the real form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    /// `X₀ = i K₀`.
    K0,
    /// `X₁ = i (K₊ + K₋)`.
    KPlus,
    /// `X₂ = K₊ - K₋`.
    KMinus,
}

/// Element `c₀ X₀ + c₁ X₁ + c₂ X₂` of `sp(2, ℝ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpGenerator {
    pub coefficients: [f64; 3],
}

impl SpGenerator {
    pub fn new(coefficients: [f64; 3]) -> Self {
        Self { coefficients }
    }

    pub fn from_label(label: Label) -> Self {
        match label {
            Label::K0 => Self::new([1.0, 0.0, 0.0]),
            Label::KPlus => Self::new([0.0, 1.0, 0.0]),
            Label::KMinus => Self::new([0.0, 0.0, 1.0]),
        }
    }

    pub fn k0() -> Self {
        Self::from_label(Label::K0)
    }

    /// Truncated `dσ̌(X)`, skew-Hermitian.
    pub fn matrix(&self, n: usize) -> CMat {
        let [c0, c1, c2] = self.coefficients;
        let kp = kplus(n);
        let km = kminus(n);
        k0(n) * (I * c0) + (&kp + &km) * (I * c1) + (kp - km) * cplx(c2)
    }

    pub fn operator(&self, n: usize) -> CompactOp {
        CompactOp::new(self.matrix(n)).expect("square")
    }

    /// Image in the defining representation on `ℝ²` (the projection of the
    /// metaplectic double cover).
    pub fn defining_matrix(&self) -> Matrix2<f64> {
        let [c0, c1, c2] = self.coefficients;
        let x0 = Matrix2::new(0.0, -0.5, 0.5, 0.0);
        let x1 = Matrix2::new(1.0, 0.0, 0.0, -1.0);
        let x2 = Matrix2::new(0.0, -1.0, -1.0, 0.0);
        x0 * c0 + x1 * c1 + x2 * c2
    }

    /// `true` when only the elliptic direction is present.
    pub fn is_compact_direction(&self) -> bool {
        self.coefficients[1] == 0.0 && self.coefficients[2] == 0.0
    }
}

impl From<Label> for SpGenerator {
    fn from(label: Label) -> Self {
        Self::from_label(label)
    }
}

pub fn dsigma_check(x: &SpGenerator, n: usize) -> CompactOp {
    x.operator(n)
}

/// `dσ(X) f = -f ∘ dσ̌(X)` for `f ∈ H`.
pub fn dsigma_dual(x: &SpGenerator, f: &FockVector) -> Result<FockVector> {
    f.expect_side(Side::Dual)?;
    let m = x.matrix(f.dim());
    Ok(FockVector::new(-m.tr_mul(f.coords()), Side::Dual))
}

/// `dσ^k(X)` on `Λ^k V* ⊗ H`, acting on the fiber factor only.
pub fn dsigma_graded(x: &SpGenerator, f: &GradedElement) -> GradedElement {
    f.map_components(|c| dsigma_dual(x, c).expect("components are dual"))
}

/// `dρ(X) a = [dσ̌(X), a]`.
pub fn drho(x: &SpGenerator, a: &CompactOp) -> CompactOp {
    x.operator(a.dim()).commutator(a).expect("same dimension")
}

/// `exp(t dσ̌(X))`, computed from the spectral decomposition of the
/// Hermitian matrix `-i dσ̌(X)` so that the result is unitary to rounding.
pub fn exponentiate(x: &SpGenerator, t: f64, n: usize) -> CompactOp {
    let h = x.matrix(n) * (-I);
    let h = (&h + h.adjoint()) * cplx(0.5);
    let eig = h.symmetric_eigen();
    let phases = CMat::from_diagonal(&eig.eigenvalues.map(|l| (I * (t * l)).exp()));
    let v = &eig.eigenvectors;
    CompactOp::new(v * phases * v.adjoint()).expect("square")
}

/// `σ(exp tX) f = f ∘ exp(tX)⁻¹`.
pub fn sigma_dual_exp(x: &SpGenerator, t: f64, f: &FockVector) -> Result<FockVector> {
    exponentiate(x, -t, f.dim()).pull_back(f)
}

/// Largest entry of `m` that couples Fock levels of opposite parity.
pub fn parity_defect(m: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if (i + j) % 2 == 1 {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Interior block `0..n-2` where the truncated products agree with the
/// infinite matrices.
fn interior(m: &CMat) -> CMat {
    let k = m.nrows().saturating_sub(2);
    m.view((0, 0), (k, k)).into_owned()
}

/// Defects of `[K₀, K₊] = K₊`, `[K₀, K₋] = -K₋`, `[K₊, K₋] = -2K₀` on the
/// interior block.
pub fn su11_interior_defect(n: usize) -> f64 {
    let (a, p, m) = (k0(n), kplus(n), kminus(n));
    let c1 = &a * &p - &p * &a - &p;
    let c2 = &a * &m - &m * &a + &m;
    let c3 = &p * &m - &m * &p + &a * cplx(2.0);
    [c1, c2, c3]
        .iter()
        .map(|c| max_abs(&interior(c)))
        .fold(0.0, f64::max)
}

/// Defects of the real-form brackets on the interior block.
pub fn real_form_interior_defect(n: usize) -> f64 {
    let x0 = SpGenerator::from_label(Label::K0).matrix(n);
    let x1 = SpGenerator::from_label(Label::KPlus).matrix(n);
    let x2 = SpGenerator::from_label(Label::KMinus).matrix(n);
    let br = |a: &CMat, b: &CMat| a * b - b * a;
    let r1 = br(&x0, &x1) + &x2;
    let r2 = br(&x0, &x2) - &x1;
    let r3 = br(&x1, &x2) - &x0 * cplx(4.0);
    [r1, r2, r3]
        .iter()
        .map(|c| max_abs(&interior(c)))
        .fold(0.0, f64::max)
}

/// `‖([K₊, K₋] + 2K₀) v‖` at truncation `n` for `v` given by its leading
/// coordinates (padded with zeros).
pub fn su11_defect_on(n: usize, leading: &[C64]) -> f64 {
    let v = padded(n, leading);
    let (a, p, m) = (k0(n), kplus(n), kminus(n));
    ((&p * &m - &m * &p + a * cplx(2.0)) * v).norm()
}

/// Truncation leak of the dual action: distance between `dσ(X) f` computed
/// at level `n` and the exact infinite-dimensional value (computed at
/// `n + 2`, which suffices because the generators shift levels by at most 2).
pub fn truncation_leak(x: &SpGenerator, n: usize, leading: &[C64]) -> f64 {
    let exact = x.matrix(n + 2).tr_mul(&padded(n + 2, leading));
    let truncated = x.matrix(n).tr_mul(&padded(n, leading));
    let mut lifted = nalgebra::DVector::zeros(n + 2);
    lifted.rows_mut(0, n).copy_from(&truncated);
    (exact - lifted).norm()
}

fn padded(n: usize, leading: &[C64]) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_fn(n, |i, _| leading.get(i).copied().unwrap_or(cplx(0.0)))
}

/// Fixed low-level test vector on levels `0..6` used to compare truncations.
pub fn low_level_probe() -> Vec<C64> {
    (0..6)
        .map(|k| C64::new(1.0 / (k as f64 + 1.0), 0.5 - 0.1 * k as f64))
        .collect()
}

/// Maximum residuals of the infinitesimal equivariance identities.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EquivarianceReport {
    /// `dσ(X)(f·a) - (dσ(X)f)·a - f·dρ(X)a`.
    pub action: f64,
    /// `dρ(X)(f, h) - (dσ(X)f, h) - (f, dσ(X)h)`; evaluated only for the
    /// compact direction.
    pub product: Option<f64>,
    /// `dρ(X)(v ⊗ h) - dσ̌(X)v ⊗ h - v ⊗ dσ(X)h`.
    pub rank_one: f64,
    /// `d/dt [σ(g_t) f](σ̌(g_t) v)` at `t = 0` by central differences.
    pub evaluation: f64,
    /// `|‖σ(exp tX) f‖ - ‖f‖|`; evaluated only for the compact direction.
    pub norm_invariance: Option<f64>,
    /// `‖U*U - 1‖` for the sampled exponentials.
    pub unitarity: f64,
}

impl EquivarianceReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.action,
            self.product.unwrap_or(0.0),
            self.rank_one,
            self.evaluation,
            self.norm_invariance.unwrap_or(0.0),
            self.unitarity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Step for the central differences of the exponential flow.
const FLOW_STEP: f64 = 1e-3;

/// Samples `samples` random instances with fiber vectors supported on the
/// levels `0..support` and returns the maximal residual of each identity.
pub fn equivariance_residuals(
    x: &SpGenerator,
    n: usize,
    support: usize,
    samples: usize,
    sampler: &mut Sampler,
) -> Result<EquivarianceReport> {
    let mut rep = EquivarianceReport::default();
    let compact = x.is_compact_direction();
    if compact {
        rep.product = Some(0.0);
        rep.norm_invariance = Some(0.0);
    }
    let m = x.operator(n);
    let u_plus = exponentiate(x, FLOW_STEP, n);
    let u_minus = exponentiate(x, -FLOW_STEP, n);
    rep.unitarity = u_plus.unitarity_defect().max(u_minus.unitarity_defect());

    for _ in 0..samples {
        let f = sampler.fock_supported(n, support, Side::Dual);
        let h = sampler.fock_supported(n, support, Side::Dual);
        let v = sampler.fock_supported(n, support, Side::Primal);
        let a = sampler.compact(n);

        let lhs = dsigma_dual(x, &a.pull_back(&f)?)?;
        let rhs = a
            .pull_back(&dsigma_dual(x, &f)?)?
            .add(&drho(x, &a).pull_back(&f)?)?;
        rep.action = rep.action.max(lhs.sub(&rhs)?.norm());

        let r1 = CompactOp::rank_one(&v, &h)?;
        let split = CompactOp::rank_one(&m.apply(&v)?, &h)?
            .add(&CompactOp::rank_one(&v, &dsigma_dual(x, &h)?)?)?;
        rep.rank_one = rep.rank_one.max(drho(x, &r1).sub(&split)?.max_abs());

        let pair = |t_step: &CompactOp, t_inv: &CompactOp| -> Result<C64> {
            // [σ(g) f](σ̌(g) v) = (f ∘ g⁻¹)(g v)
            t_inv.pull_back(&f)?.eval(&t_step.apply(&v)?)
        };
        let derivative = (pair(&u_plus, &u_minus)? - pair(&u_minus, &u_plus)?) / (2.0 * FLOW_STEP);
        rep.evaluation = rep.evaluation.max(derivative.norm());

        if compact {
            let fe = GradedElement::from_components(0, vec![f.clone()])?;
            let he = GradedElement::from_components(0, vec![h.clone()])?;
            let prod = ch_product_graded(&fe, &he)?;
            let lhs = drho(x, &prod);
            let rhs = ch_product_graded(&dsigma_graded(x, &fe), &he)?
                .add(&ch_product_graded(&fe, &dsigma_graded(x, &he))?)?;
            rep.product = Some(rep.product.unwrap_or(0.0).max(lhs.sub(&rhs)?.max_abs()));

            let t = sampler.uniform(-10.0, 10.0);
            let moved = sigma_dual_exp(x, t, &f)?;
            let defect = (moved.norm() - f.norm()).abs();
            rep.norm_invariance = Some(rep.norm_invariance.unwrap_or(0.0).max(defect));
        }
    }
    Ok(rep)
}

/// `(‖U(one turn) + 1‖_max, ‖U(two turns) - 1‖_max, ‖R(one turn) - 1‖_max)`
/// where `U` is the oscillator exponential of `X₀` and `R` its projection to
/// `SO(2)`.
pub fn double_cover_witness(n: usize) -> (f64, f64, f64) {
    let x = SpGenerator::k0();
    let id = CMat::identity(n, n);
    let one = exponentiate(&x, FULL_TURN, n).into_matrix();
    let two = exponentiate(&x, 2.0 * FULL_TURN, n).into_matrix();
    let projected = (x.defining_matrix() * FULL_TURN).exp();
    let proj_defect = (projected - Matrix2::identity()).abs().max();
    (max_abs(&(one + &id)), max_abs(&(two - id)), proj_defect)
}
