//! The Kuiper complex on a discrete flat torus.
//!
//! Sections of `Λ^k T*T² ⊗ H_N` are stored vertex-collocated on a periodic
//! `G×G` lattice with spacing `h = 2π/G`. The de Rham part is the forward
//! difference exterior derivative, which squares to zero by telescoping. A
//! [`GaugeField`] models the freedom in the choice of the Kuiper
//! trivialization: a section `s` in the gauged frame corresponds to
//! `s_m · g_m` in the product frame, where the product connection is flat and
//! its covariant derivative is plain differencing. The coupled derivative is
//! therefore `T⁻¹ ∘ d ∘ T`, where `T` right-multiplies each fiber coefficient
//! by `g_m`.
//!
//! In the gauged frame the compact operators transport by conjugation,
//! `a ↦ g_m a g_m⁻¹`, vectors of `Ȟ` by `v ↦ g_m v` and functionals by
//! `f ↦ f ∘ g_m⁻¹`, so evaluation, composition and the right action are all
//! preserved vertex by vertex.
//!
//! Every vertex carries the same quadrature weight, so the adjoint of a
//! differential for the quadrature inner product is its conjugate transpose.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::compacts::{max_abs, numerical_rank, numerical_rank_psd, CompactOp, RankDecision};
use crate::error::{check_dim, Error, Result};
use crate::fock::{wedge_dim, FockVector, GradedElement, Side};
use crate::module_structure::ch_product_graded;
use crate::sampling::Sampler;
use crate::{CMat, C64};

/// Betti numbers of `T²`.
pub const TORUS_BETTI: [usize; 3] = [1, 2, 1];

/// Largest admissible gauge unitarity defect.
pub const GAUGE_UNITARITY_TOL: f64 = 1e-10;

/// Harmonic-space membership tolerance used by the generator extraction.
pub const SPAN_TOL: f64 = 1e-8;

/// Periodic `G×G` lattice on `T² = (ℝ/2πℤ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorusGrid {
    g: usize,
}

impl TorusGrid {
    pub fn new(g: usize) -> Result<Self> {
        if g < 2 {
            return Err(Error::GridTooSmall(g));
        }
        Ok(Self { g })
    }

    pub fn resolution(&self) -> usize {
        self.g
    }

    pub fn vertex_count(&self) -> usize {
        self.g * self.g
    }

    /// Lattice spacing `h = 2π/G`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.g as f64
    }

    /// `(2π/G)²`, one cell per vertex.
    pub fn cell_volume(&self) -> f64 {
        self.step() * self.step()
    }

    pub fn total_volume(&self) -> f64 {
        self.cell_volume() * self.vertex_count() as f64
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        (i % self.g) * self.g + (j % self.g)
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.g, v % self.g)
    }

    /// Neighbor of `v` one step along `axis` (0 for `ε¹`, 1 for `ε²`).
    pub fn shift(&self, v: usize, axis: usize) -> usize {
        let (i, j) = self.coords(v);
        if axis == 0 {
            self.vertex(i + 1, j)
        } else {
            self.vertex(i, j + 1)
        }
    }

    /// Grid points `(x, y) = (i h, j h)`.
    pub fn position(&self, v: usize) -> (f64, f64) {
        let (i, j) = self.coords(v);
        (i as f64 * self.step(), j as f64 * self.step())
    }

    fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self.g == other.g {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.g,
                right: other.g,
            })
        }
    }
}

/// Discrete section of `Λ^k T*T² ⊗ H_N`; `degree == 3` denotes the zero space
/// that `d` maps top-degree forms into.
#[derive(Debug, Clone, PartialEq)]
pub struct CochainField {
    degree: usize,
    grid: TorusGrid,
    n: usize,
    data: Vec<C64>,
}

impl CochainField {
    pub fn zeros(degree: usize, grid: TorusGrid, n: usize) -> Result<Self> {
        if degree > 3 {
            return Err(Error::InvalidDegree(degree));
        }
        let len = grid.vertex_count() * wedge_dim(degree) * n;
        Ok(Self {
            degree,
            grid,
            n,
            data: vec![C64::new(0.0, 0.0); len],
        })
    }

    /// Field from flat coordinates in the layout `[vertex][wedge][level]`.
    pub fn from_vec(degree: usize, grid: TorusGrid, n: usize, data: Vec<C64>) -> Result<Self> {
        let mut out = Self::zeros(degree, grid, n)?;
        check_dim(out.data.len(), data.len())?;
        out.data = data;
        Ok(out)
    }

    pub fn random(degree: usize, grid: TorusGrid, n: usize, sampler: &mut Sampler) -> Result<Self> {
        let len = grid.vertex_count() * wedge_dim(degree) * n;
        Self::from_vec(degree, grid, n, sampler.complex_vec(len))
    }

    /// Constant section `α ⊗ h̲`.
    pub fn constant(degree: usize, grid: TorusGrid, form: &[C64], h: &FockVector) -> Result<Self> {
        let element = GradedElement::tensor(degree, form, h)?;
        let mut out = Self::zeros(degree, grid, h.dim())?;
        for v in 0..grid.vertex_count() {
            out.set_element(v, &element)?;
        }
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn fiber_dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vector(self) -> DVector<C64> {
        DVector::from_vec(self.data)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn offset(&self, v: usize, w: usize) -> usize {
        (v * wedge_dim(self.degree) + w) * self.n
    }

    /// Fiber coefficient at vertex `v` along the `w`-th wedge basis element.
    pub fn block(&self, v: usize, w: usize) -> &[C64] {
        let o = self.offset(v, w);
        &self.data[o..o + self.n]
    }

    pub fn block_mut(&mut self, v: usize, w: usize) -> &mut [C64] {
        let o = self.offset(v, w);
        &mut self.data[o..o + self.n]
    }

    /// All wedge components at vertex `v`.
    fn vertex_slice(&self, v: usize) -> &[C64] {
        let len = wedge_dim(self.degree) * self.n;
        &self.data[v * len..(v + 1) * len]
    }

    fn vertex_slice_mut(&mut self, v: usize) -> &mut [C64] {
        let len = wedge_dim(self.degree) * self.n;
        &mut self.data[v * len..(v + 1) * len]
    }

    /// Value `s_m ∈ H^k_N` at a vertex.
    pub fn element(&self, v: usize) -> Result<GradedElement> {
        let comps = (0..wedge_dim(self.degree))
            .map(|w| FockVector::from_slice(self.block(v, w), Side::Dual))
            .collect();
        GradedElement::from_components(self.degree, comps)
    }

    pub fn set_element(&mut self, v: usize, x: &GradedElement) -> Result<()> {
        if x.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: x.degree(),
            });
        }
        check_dim(self.n, x.fiber_dim())?;
        for (w, c) in x.components().iter().enumerate() {
            self.block_mut(v, w).copy_from_slice(c.coords().as_slice());
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            data,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            data,
            ..self.clone()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest per-vertex Euclidean norm.
    pub fn max_vertex_norm(&self) -> f64 {
        (0..self.grid.vertex_count())
            .map(|v| {
                self.vertex_slice(v)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Pointwise product `c · s` with a scalar function on the vertices.
    pub fn scalar_mul(&self, c: &[C64]) -> Result<Self> {
        check_dim(self.grid.vertex_count(), c.len())?;
        let mut out = self.clone();
        for (v, &cv) in c.iter().enumerate() {
            out.vertex_slice_mut(v).iter_mut().for_each(|z| *z *= cv);
        }
        Ok(out)
    }

    /// Right action by a constant operator.
    pub fn act(&self, a: &CompactOp) -> Result<Self> {
        check_dim(self.n, a.dim())?;
        let mut out = self.clone();
        let wd = wedge_dim(self.degree);
        for v in 0..self.grid.vertex_count() {
            for w in 0..wd {
                right_mul_in_place(out.block_mut(v, w), a.matrix());
            }
        }
        Ok(out)
    }

    /// Right action by an operator field, one operator per vertex.
    pub fn act_field(&self, a: &[CompactOp]) -> Result<Self> {
        check_dim(self.grid.vertex_count(), a.len())?;
        let mut out = self.clone();
        let wd = wedge_dim(self.degree);
        for (v, av) in a.iter().enumerate() {
            check_dim(self.n, av.dim())?;
            for w in 0..wd {
                right_mul_in_place(out.block_mut(v, w), av.matrix());
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        self.grid.check_same(&other.grid)?;
        check_dim(self.n, other.n)
    }
}

/// `f ← f ∘ m` for a coordinate row vector `f`.
fn right_mul_in_place(f: &mut [C64], m: &CMat) {
    let n = f.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (col, o) in out.iter_mut().enumerate() {
        *o = (0..n).map(|row| f[row] * m[(row, col)]).sum();
    }
    f.copy_from_slice(&out);
}

/// Per-vertex unitary change of Kuiper trivialization.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    grid: TorusGrid,
    n: usize,
    unitaries: Option<Vec<CMat>>,
}

impl GaugeField {
    pub fn identity(grid: TorusGrid, n: usize) -> Self {
        Self {
            grid,
            n,
            unitaries: None,
        }
    }

    pub fn new(grid: TorusGrid, n: usize, unitaries: Vec<CMat>) -> Result<Self> {
        check_dim(grid.vertex_count(), unitaries.len())?;
        for (vertex, u) in unitaries.iter().enumerate() {
            check_dim(n, u.nrows())?;
            check_dim(n, u.ncols())?;
            let defect = max_abs(&(u.adjoint() * u - CMat::identity(n, n)));
            if defect > GAUGE_UNITARITY_TOL {
                return Err(Error::NonUnitaryGauge { vertex, defect });
            }
        }
        Ok(Self {
            grid,
            n,
            unitaries: Some(unitaries),
        })
    }

    /// Independent random unitaries at each vertex.
    pub fn random(grid: TorusGrid, n: usize, sampler: &mut Sampler) -> Self {
        let unitaries = (0..grid.vertex_count())
            .map(|_| sampler.unitary(n))
            .collect();
        Self::new(grid, n, unitaries).expect("QR factors are unitary")
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn fiber_dim(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.unitaries.is_none()
    }

    pub fn at(&self, v: usize) -> CMat {
        match &self.unitaries {
            Some(us) => us[v].clone(),
            None => CMat::identity(self.n, self.n),
        }
    }

    fn check_field(&self, field: &CochainField) -> Result<()> {
        self.grid.check_same(&field.grid)?;
        check_dim(self.n, field.n)
    }

    /// Gauged frame → product frame: `s_m ↦ s_m · g_m`.
    pub fn to_product_frame(&self, field: &CochainField) -> Result<CochainField> {
        self.check_field(field)?;
        self.right_multiply(field, |u| u.clone())
    }

    /// Product frame → gauged frame: `s_m ↦ s_m · g_m⁻¹`.
    pub fn to_gauged_frame(&self, field: &CochainField) -> Result<CochainField> {
        self.check_field(field)?;
        self.right_multiply(field, |u| u.adjoint())
    }

    fn right_multiply<F>(&self, field: &CochainField, pick: F) -> Result<CochainField>
    where
        F: Fn(&CMat) -> CMat,
    {
        let Some(us) = &self.unitaries else {
            return Ok(field.clone());
        };
        let mut out = field.clone();
        let wd = wedge_dim(field.degree);
        for (v, u) in us.iter().enumerate() {
            let m = pick(u);
            for w in 0..wd {
                right_mul_in_place(out.block_mut(v, w), &m);
            }
        }
        Ok(out)
    }

    /// `v ↦ g_m v` on `Ȟ`.
    pub fn transport_vector(&self, v: usize, x: &FockVector) -> Result<FockVector> {
        CompactOp::new(self.at(v))?.apply(x)
    }

    /// `f ↦ f ∘ g_m⁻¹` on `H`.
    pub fn transport_functional(&self, v: usize, f: &FockVector) -> Result<FockVector> {
        CompactOp::new(self.at(v).adjoint())?.pull_back(f)
    }

    /// `a ↦ g_m a g_m⁻¹`.
    pub fn transport_operator(&self, v: usize, a: &CompactOp) -> Result<CompactOp> {
        check_dim(self.n, a.dim())?;
        let u = self.at(v);
        CompactOp::new(&u * a.matrix() * u.adjoint())
    }

    /// The constant operator `a` expressed in the gauged frame.
    pub fn transported_constant(&self, a: &CompactOp) -> Result<Vec<CompactOp>> {
        (0..self.grid.vertex_count())
            .map(|v| self.transport_operator(v, a))
            .collect()
    }
}

/// Forward-difference exterior derivative on each fiber coordinate.
pub fn discrete_d(field: &CochainField) -> CochainField {
    let grid = field.grid;
    let n = field.n;
    let inv_h = C64::new(1.0 / grid.step(), 0.0);
    let mut out = CochainField::zeros(field.degree + 1, grid, n).expect("degree at most 3");
    match field.degree {
        0 => {
            for v in 0..grid.vertex_count() {
                let here = field.block(v, 0);
                for axis in 0..2 {
                    let there = field.block(grid.shift(v, axis), 0);
                    for (o, (a, b)) in out
                        .block_mut(v, axis)
                        .iter_mut()
                        .zip(there.iter().zip(here))
                    {
                        *o = (a - b) * inv_h;
                    }
                }
            }
        }
        1 => {
            // (dα)_{12} = ∂₁α₂ - ∂₂α₁
            for v in 0..grid.vertex_count() {
                let v1 = grid.shift(v, 0);
                let v2 = grid.shift(v, 1);
                let d1a2 = field
                    .block(v1, 1)
                    .iter()
                    .zip(field.block(v, 1))
                    .map(|(a, b)| (a - b) * inv_h);
                let d2a1 = field
                    .block(v2, 0)
                    .iter()
                    .zip(field.block(v, 0))
                    .map(|(a, b)| (a - b) * inv_h);
                for (o, (x, y)) in out.block_mut(v, 0).iter_mut().zip(d1a2.zip(d2a1)) {
                    *o = x - y;
                }
            }
        }
        _ => {}
    }
    out
}

/// Exterior covariant derivative of the Kuiper connection in the gauged
/// frame: `T⁻¹ ∘ d ∘ T`.
pub fn coupled_d(field: &CochainField, gauge: &GaugeField) -> Result<CochainField> {
    gauge.check_field(field)?;
    if gauge.is_identity() {
        return Ok(discrete_d(field));
    }
    let trivial = gauge.to_product_frame(field)?;
    gauge.to_gauged_frame(&discrete_d(&trivial))
}

/// Dense matrix of `d_k^Φ` in the `[vertex][wedge][level]` layout.
pub fn assemble_d(k: usize, gauge: &GaugeField) -> Result<CMat> {
    let grid = gauge.grid;
    let n = gauge.n;
    let cols = grid.vertex_count() * wedge_dim(k) * n;
    let rows = grid.vertex_count() * wedge_dim(k + 1) * n;
    let columns: Vec<Vec<C64>> = (0..cols)
        .into_par_iter()
        .map(|c| {
            let mut e = CochainField::zeros(k, grid, n).expect("valid degree");
            e.data[c] = C64::new(1.0, 0.0);
            coupled_d(&e, gauge).expect("consistent gauge").data
        })
        .collect();
    Ok(CMat::from_fn(rows, cols, |r, c| columns[c][r]))
}

/// Max-abs entry of the assembled `d₁^Φ ∘ d₀^Φ`.
pub fn nilpotency_defect(gauge: &GaugeField) -> Result<f64> {
    let d0 = assemble_d(0, gauge)?;
    let d1 = assemble_d(1, gauge)?;
    Ok(max_abs(&(d1 * d0)))
}

/// `max_m ‖d^Φ(s·a) - (d^Φ s)·a‖` with `a` given as an operator field.
pub fn ch_equivariance_residual(
    field: &CochainField,
    a: &[CompactOp],
    gauge: &GaugeField,
) -> Result<f64> {
    let lhs = coupled_d(&field.act_field(a)?, gauge)?;
    let rhs = coupled_d(field, gauge)?.act_field(a)?;
    Ok(lhs.sub(&rhs)?.max_vertex_norm())
}

/// Equivariance under a constant operator `a`, which in the gauged frame
/// acts through its transported field `g_m a g_m⁻¹`.
pub fn ch_equivariance_check(
    field: &CochainField,
    a: &CompactOp,
    gauge: &GaugeField,
) -> Result<f64> {
    ch_equivariance_residual(field, &gauge.transported_constant(a)?, gauge)
}

/// Ranks of the cohomology of the truncated Kuiper complex.
#[derive(Debug, Clone, Serialize)]
pub struct CohomologyRanks {
    pub ranks: [usize; 3],
    pub expected: [usize; 3],
    pub differentials: [RankDecision; 2],
    pub warnings: Vec<String>,
}

impl CohomologyRanks {
    pub fn matches_betti(&self) -> bool {
        self.ranks == self.expected
    }
}

fn ambiguity_warnings(label: &str, d: &RankDecision, out: &mut Vec<String>) {
    if d.ambiguous {
        out.push(format!(
            "{label}: a singular value lies within 10x of the rank cutoff {:.3e}",
            d.cutoff
        ));
    }
}

/// `r_k = dim ker d_k - rank d_{k-1}` from singular-value ranks of the
/// assembled differentials.
pub fn cohomology_ranks(gauge: &GaugeField) -> Result<CohomologyRanks> {
    let n = gauge.n;
    let vc = gauge.grid.vertex_count();
    let (d0, d1) = rayon::join(|| assemble_d(0, gauge), || assemble_d(1, gauge));
    let (d0, d1) = (d0?, d1?);
    let (r0, r1) = rayon::join(|| numerical_rank(&d0), || numerical_rank(&d1));
    let dims: Vec<usize> = (0..3).map(|k| vc * wedge_dim(k) * n).collect();
    let ranks = [
        dims[0] - r0.rank,
        dims[1] - r1.rank - r0.rank,
        dims[2] - r1.rank,
    ];
    let expected = TORUS_BETTI.map(|b| b * n);
    let mut warnings = Vec::new();
    ambiguity_warnings("d0", &r0, &mut warnings);
    ambiguity_warnings("d1", &r1, &mut warnings);
    Ok(CohomologyRanks {
        ranks,
        expected,
        differentials: [r0, r1],
        warnings,
    })
}

/// Kernel of the Hodge Laplacian `Δ_k = d_k* d_k + d_{k-1} d_{k-1}*`.
#[derive(Debug, Clone)]
pub struct HarmonicSpace {
    pub degree: usize,
    /// Orthonormal harmonic representatives as columns.
    pub basis: CMat,
    pub decision: RankDecision,
    /// `max ‖d_k x‖` over the basis.
    pub closed_residual: f64,
    /// `max ‖d_{k-1}* x‖` over the basis.
    pub coclosed_residual: f64,
    pub warnings: Vec<String>,
}

impl HarmonicSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `‖x - P x‖ / ‖x‖` for the orthogonal projector `P` onto the space.
    pub fn distance_from(&self, x: &DVector<C64>) -> f64 {
        let norm = x.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let proj = &self.basis * (self.basis.adjoint() * x);
        (x - proj).norm() / norm
    }
}

pub fn hodge_laplacian(k: usize, gauge: &GaugeField) -> Result<CMat> {
    if k > 2 {
        return Err(Error::InvalidDegree(k));
    }
    let grid = gauge.grid;
    let dim = grid.vertex_count() * wedge_dim(k) * gauge.n;
    let mut lap = CMat::zeros(dim, dim);
    if k < 2 {
        let d = assemble_d(k, gauge)?;
        lap += d.adjoint() * &d;
    }
    if k > 0 {
        let d = assemble_d(k - 1, gauge)?;
        lap += &d * d.adjoint();
    }
    Ok(lap)
}

pub fn harmonic_space(k: usize, gauge: &GaugeField) -> Result<HarmonicSpace> {
    let lap = hodge_laplacian(k, gauge)?;
    let dim = lap.nrows();
    let eig = lap.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let positive = numerical_rank_psd(&values);
    let kernel: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] < positive.cutoff || positive.sigma_max == 0.0)
        .collect();
    let columns: Vec<DVector<C64>> = kernel
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let basis = if columns.is_empty() {
        CMat::zeros(dim, 0)
    } else {
        CMat::from_columns(&columns)
    };

    let closed_residual = if k < 2 && basis.ncols() > 0 {
        column_max_norm(&(assemble_d(k, gauge)? * &basis))
    } else {
        0.0
    };
    let coclosed_residual = if k > 0 && basis.ncols() > 0 {
        column_max_norm(&(assemble_d(k - 1, gauge)?.adjoint() * &basis))
    } else {
        0.0
    };
    let mut warnings = Vec::new();
    ambiguity_warnings(&format!("laplacian {k}"), &positive, &mut warnings);
    Ok(HarmonicSpace {
        degree: k,
        basis,
        decision: positive,
        closed_residual,
        coclosed_residual,
        warnings,
    })
}

fn column_max_norm(m: &CMat) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Complex span of `{y · b : b ∈ CH_N}` for each `y`, where `b` acts through
/// the gauged frame (`b_m = g_m b g_m⁻¹`). Columns are `y · E_{pq}`.
pub fn ch_span(elements: &[DVector<C64>], degree: usize, gauge: &GaugeField) -> Result<CMat> {
    let n = gauge.n;
    let grid = gauge.grid;
    let mut columns = Vec::with_capacity(elements.len() * n * n);
    for y in elements {
        let field = CochainField::from_vec(degree, grid, n, y.iter().copied().collect())?;
        for p in 0..n {
            for q in 0..n {
                let unit = CompactOp::matrix_unit(n, p, q);
                let acted = field.act_field(&gauge.transported_constant(&unit)?)?;
                columns.push(acted.into_vector());
            }
        }
    }
    let rows = grid.vertex_count() * wedge_dim(degree) * n;
    Ok(if columns.is_empty() {
        CMat::zeros(rows, 0)
    } else {
        CMat::from_columns(&columns)
    })
}

/// Relative least-squares residual of `x` against the column span of `span`.
pub fn span_residual(span: &CMat, x: &DVector<C64>) -> f64 {
    let norm = x.norm();
    if norm == 0.0 {
        return 0.0;
    }
    if span.ncols() == 0 {
        return 1.0;
    }
    let svd = span.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let cutoff = crate::RANK_RTOL * svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] >= cutoff)
        .collect();
    let mut residual = x.clone();
    for i in keep {
        let col = u.column(i);
        let coeff = col.dotc(x);
        residual -= col * coeff;
    }
    residual.norm() / norm
}

/// Outcome of the greedy extraction of `CH`-generators.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorExtraction {
    /// Indices of the chosen candidates.
    pub chosen: Vec<usize>,
    /// Complex dimension of the `CH`-span of the chosen elements.
    pub span_dim: usize,
}

impl GeneratorExtraction {
    pub fn count(&self) -> usize {
        self.chosen.len()
    }
}

/// Walks `candidates` in order and keeps each one that is not in the `CH`-span
/// of those kept so far (relative residual above [`SPAN_TOL`]), stopping once
/// the span reaches `target_dim`.
pub fn extract_generators(
    candidates: &[DVector<C64>],
    degree: usize,
    gauge: &GaugeField,
    target_dim: usize,
) -> Result<GeneratorExtraction> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut kept: Vec<DVector<C64>> = Vec::new();
    let mut span = ch_span(&[], degree, gauge)?;
    let mut span_dim = 0;
    for (i, cand) in candidates.iter().enumerate() {
        if span_dim >= target_dim {
            break;
        }
        if span_residual(&span, cand) > SPAN_TOL {
            chosen.push(i);
            kept.push(cand.clone());
            span = ch_span(&kept, degree, gauge)?;
            span_dim = numerical_rank(&span).rank;
        }
    }
    Ok(GeneratorExtraction { chosen, span_dim })
}

/// Elementary harmonic tensors `α ⊗ h̲` in the gauged frame: `α` runs over
/// the scalar harmonic `k`-forms (the `N = 1` harmonic space), `h` over the
/// Fock basis. These are the images of `[α] ⊗ h` under the isomorphism
/// `H^k_dR ⊗ H ≅ H^k(d^Φ)`.
pub fn elementary_harmonic_tensors(k: usize, gauge: &GaugeField) -> Result<Vec<DVector<C64>>> {
    let grid = gauge.grid;
    let n = gauge.n;
    let scalar = harmonic_space(k, &GaugeField::identity(grid, 1))?;
    let wd = wedge_dim(k);
    let mut out = Vec::new();
    for col in scalar.basis.column_iter() {
        for level in 0..n {
            let mut field = CochainField::zeros(k, grid, n)?;
            for v in 0..grid.vertex_count() {
                for w in 0..wd {
                    field.block_mut(v, w)[level] = col[v * wd + w];
                }
            }
            out.push(gauge.to_gauged_frame(&field)?.into_vector());
        }
    }
    Ok(out)
}

/// `CH`-structure of the harmonic space in degree `k`.
#[derive(Debug, Clone, Serialize)]
pub struct ChRank {
    pub degree: usize,
    pub harmonic_dim: usize,
    /// `harmonic_dim / N`: multiplicity of the fiber `H_N` as a summand.
    pub multiplicity: f64,
    /// Number of elementary harmonic tensors needed to generate.
    pub generators: usize,
    /// Largest distance of a candidate generator from the harmonic space.
    pub candidate_residual: f64,
}

pub fn ch_rank(k: usize, gauge: &GaugeField) -> Result<ChRank> {
    let harmonic = harmonic_space(k, gauge)?;
    let candidates = elementary_harmonic_tensors(k, gauge)?;
    let candidate_residual = candidates
        .iter()
        .map(|c| harmonic.distance_from(c))
        .fold(0.0, f64::max);
    let extraction = extract_generators(&candidates, k, gauge, harmonic.dim())?;
    Ok(ChRank {
        degree: k,
        harmonic_dim: harmonic.dim(),
        multiplicity: harmonic.dim() as f64 / gauge.n as f64,
        generators: extraction.count(),
        candidate_residual,
    })
}

/// Principal symbol `τ ∧ ·: Λ^k ⊗ H_N → Λ^{k+1} ⊗ H_N`.
pub fn symbol_matrix(k: usize, tau: [f64; 2], n: usize) -> CMat {
    let scalar: CMat = match k {
        0 => CMat::from_row_slice(2, 1, &[C64::new(tau[0], 0.0), C64::new(tau[1], 0.0)]),
        1 => CMat::from_row_slice(1, 2, &[C64::new(-tau[1], 0.0), C64::new(tau[0], 0.0)]),
        _ => CMat::zeros(0, 1),
    };
    scalar.kronecker(&CMat::identity(n, n))
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolExactness {
    /// `(rank s₀, rank s₁)`.
    pub ranks: [usize; 2],
    pub exact: bool,
}

/// Exactness of `0 → Λ⁰⊗H → Λ¹⊗H → Λ²⊗H → 0` under `τ ∧ ·`.
pub fn symbol_exactness(tau: [f64; 2], n: usize) -> Result<SymbolExactness> {
    if tau[0] == 0.0 && tau[1] == 0.0 {
        return Err(Error::ZeroCovector);
    }
    let s0 = numerical_rank(&symbol_matrix(0, tau, n)).rank;
    let s1 = numerical_rank(&symbol_matrix(1, tau, n)).rank;
    let injective = s0 == wedge_dim(0) * n;
    let middle = wedge_dim(1) * n - s1 == s0;
    let surjective = s1 == wedge_dim(2) * n;
    Ok(SymbolExactness {
        ranks: [s0, s1],
        exact: injective && middle && surjective,
    })
}

/// Quadrature of the pointwise `CH`-product: `Σ_m vol · (s_m, s'_m)`.
pub fn section_ch_product(s: &CochainField, t: &CochainField) -> Result<CompactOp> {
    s.check_compatible(t)?;
    let vol = C64::new(s.grid.cell_volume(), 0.0);
    let mut acc = CompactOp::zeros(s.n);
    for v in 0..s.grid.vertex_count() {
        acc = acc.add(&ch_product_graded(&s.element(v)?, &t.element(v)?)?.scale(vol))?;
    }
    Ok(acc)
}

/// Vertex-wise transport of an operator field into the gauged frame.
pub fn gauge_transport_compacts(
    a_field: &[CompactOp],
    gauge: &GaugeField,
) -> Result<Vec<CompactOp>> {
    check_dim(gauge.grid.vertex_count(), a_field.len())?;
    a_field
        .iter()
        .enumerate()
        .map(|(v, a)| gauge.transport_operator(v, a))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(g: usize) -> TorusGrid {
        TorusGrid::new(g).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let t = grid(8);
        assert_eq!(t.vertex_count(), 64);
        assert!((t.total_volume() - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(t.shift(t.vertex(7, 3), 0), t.vertex(0, 3));
        assert_eq!(t.shift(t.vertex(2, 7), 1), t.vertex(2, 0));
        assert!(TorusGrid::new(1).is_err());
    }

    #[test]
    fn d_of_constant_is_zero() {
        let t = grid(5);
        let h = FockVector::from_slice(&[C64::new(1.0, 2.0), C64::new(-0.5, 0.0)], Side::Dual);
        let f = CochainField::constant(0, t, &[C64::new(1.0, 0.0)], &h).unwrap();
        assert_eq!(discrete_d(&f).max_abs(), 0.0);
        let a =
            CochainField::constant(1, t, &[C64::new(1.0, 0.0), C64::new(0.0, 3.0)], &h).unwrap();
        assert_eq!(discrete_d(&a).max_abs(), 0.0);
    }

    #[test]
    fn d_of_top_degree_is_the_zero_space() {
        let t = grid(3);
        let f = CochainField::zeros(2, t, 2).unwrap();
        let out = discrete_d(&f);
        assert_eq!(out.degree(), 3);
        assert!(out.is_empty());
    }

    #[test]
    fn d_squared_vanishes_on_random_fields() {
        let mut s = Sampler::new(11);
        let f = CochainField::random(0, grid(6), 3, &mut s).unwrap();
        assert!(discrete_d(&discrete_d(&f)).max_abs() < 1e-12);
    }

    #[test]
    fn d_of_linear_phase_matches_forward_difference() {
        // f(x, y) = e^{i x}: (df)_1 = (e^{i(x+h)} - e^{ix})/h, (df)_2 = 0
        let t = grid(8);
        let h = t.step();
        let mut f = CochainField::zeros(0, t, 1).unwrap();
        for v in 0..t.vertex_count() {
            let (x, _) = t.position(v);
            f.block_mut(v, 0)[0] = C64::new(0.0, x).exp();
        }
        let df = discrete_d(&f);
        for v in 0..t.vertex_count() {
            let (x, _) = t.position(v);
            let expected = (C64::new(0.0, x + h).exp() - C64::new(0.0, x).exp()) / h;
            assert!((df.block(v, 0)[0] - expected).norm() < 1e-12);
            assert!(df.block(v, 1)[0].norm() < 1e-12);
        }
    }

    #[test]
    fn identity_gauge_reduces_to_discrete_d() {
        let mut s = Sampler::new(5);
        let t = grid(4);
        let gauge = GaugeField::identity(t, 3);
        for k in 0..2 {
            let f = CochainField::random(k, t, 3, &mut s).unwrap();
            assert_eq!(coupled_d(&f, &gauge).unwrap(), discrete_d(&f));
        }
    }

    #[test]
    fn non_unitary_gauge_is_rejected() {
        let t = grid(2);
        let mut us = vec![CMat::identity(2, 2); 4];
        us[3][(0, 0)] = C64::new(2.0, 0.0);
        assert!(matches!(
            GaugeField::new(t, 2, us),
            Err(Error::NonUnitaryGauge { vertex: 3, .. })
        ));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let mut s = Sampler::new(1);
        let f = CochainField::random(0, grid(3), 2, &mut s).unwrap();
        assert!(matches!(
            coupled_d(&f, &GaugeField::identity(grid(4), 2)),
            Err(Error::GridMismatch { .. })
        ));
        assert!(coupled_d(&f, &GaugeField::identity(grid(3), 3)).is_err());
    }

    #[test]
    fn symbol_of_first_covector_is_exact() {
        let r = symbol_exactness([1.0, 0.0], 1).unwrap();
        assert_eq!(r.ranks, [1, 1]);
        assert!(r.exact);
        assert!(matches!(
            symbol_exactness([0.0, 0.0], 3),
            Err(Error::ZeroCovector)
        ));
    }

    #[test]
    fn scalar_cohomology_of_the_torus() {
        let r = cohomology_ranks(&GaugeField::identity(grid(8), 1)).unwrap();
        assert_eq!(r.ranks, [1, 2, 1]);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn generic_element_is_cyclic_over_the_matrix_algebra() {
        // a harmonic 1-form with linearly independent fiber coefficients
        // generates all of ε¹⊗H ⊕ ε²⊗H once N ≥ 2
        let t = grid(3);
        let n = 2;
        let gauge = GaugeField::identity(t, n);
        let mut field = CochainField::zeros(1, t, n).unwrap();
        for v in 0..t.vertex_count() {
            field
                .block_mut(v, 0)
                .copy_from_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
            field
                .block_mut(v, 1)
                .copy_from_slice(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        }
        let ex = extract_generators(&[field.into_vector()], 1, &gauge, 4).unwrap();
        assert_eq!(ex.count(), 1);
        assert_eq!(ex.span_dim, 4);
    }
}
