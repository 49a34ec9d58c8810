//! The truncated compact-operator algebra `CH_N`: all `N×N` complex matrices
//! acting on `Ȟ`, with the adjoint as involution and the operator norm.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::fock::{FockVector, Side};
use crate::{CMat, C64, RANK_RTOL};

#[derive(Debug, Clone, PartialEq)]
pub struct CompactOp {
    entries: CMat,
}

impl CompactOp {
    pub fn new(entries: CMat) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: CMat::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: CMat::zeros(n, n),
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self {
            entries: DMatrix::from_fn(
                n,
                n,
                |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) },
            ),
        }
    }

    /// Matrix unit `E_{mn}`.
    pub fn matrix_unit(n: usize, m: usize, k: usize) -> Self {
        let mut entries = CMat::zeros(n, n);
        entries[(m, k)] = C64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    /// `u ⊗ v : w ↦ v(w) u` for `u ∈ Ȟ`, `v ∈ H`.
    pub fn rank_one(u: &FockVector, v: &FockVector) -> Result<Self> {
        u.expect_side(Side::Primal)?;
        v.expect_side(Side::Dual)?;
        check_dim(u.dim(), v.dim())?;
        Ok(Self {
            entries: u.coords() * v.coords().transpose(),
        })
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            entries: &self.entries * c,
        }
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        })
    }

    /// `a(v)` for `v ∈ Ȟ`.
    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        v.expect_side(Side::Primal)?;
        check_dim(self.dim(), v.dim())?;
        Ok(FockVector::new(&self.entries * v.coords(), Side::Primal))
    }

    /// `f ∘ a` for a functional `f ∈ H`: the coordinate row vector times the
    /// matrix.
    pub fn pull_back(&self, f: &FockVector) -> Result<FockVector> {
        f.expect_side(Side::Dual)?;
        check_dim(self.dim(), f.dim())?;
        Ok(FockVector::new(self.entries.tr_mul(f.coords()), Side::Dual))
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.entries)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    /// `‖a - a*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    /// `‖a*a - 1‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.entries.adjoint() * &self.entries - CMat::identity(n, n)))
    }

    /// Eigenvalues of the hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn rank(&self) -> usize {
        numerical_rank(&self.entries).rank
    }
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.singular_values().iter().copied().collect()
}

/// Outcome of a thresholded rank decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDecision {
    pub rank: usize,
    pub sigma_max: f64,
    /// Absolute cutoff `RANK_RTOL · σ_max`.
    pub cutoff: f64,
    /// Some singular value lies within a factor 10 of the cutoff.
    pub ambiguous: bool,
}

impl RankDecision {
    fn from_values(values: &[f64]) -> Self {
        let sigma_max = values.iter().copied().fold(0.0, f64::max);
        let cutoff = RANK_RTOL * sigma_max;
        if sigma_max == 0.0 {
            return Self {
                rank: 0,
                sigma_max,
                cutoff,
                ambiguous: false,
            };
        }
        let rank = values.iter().filter(|&&s| s >= cutoff).count();
        let ambiguous = values
            .iter()
            .any(|&s| s >= cutoff / 10.0 && s <= cutoff * 10.0);
        Self {
            rank,
            sigma_max,
            cutoff,
            ambiguous,
        }
    }
}

/// Rank from singular values, counting `σ < RANK_RTOL · σ_max` as zero.
pub fn numerical_rank(m: &CMat) -> RankDecision {
    RankDecision::from_values(&singular_values(m))
}

/// Same decision rule applied to the spectrum of a positive semidefinite
/// hermitian matrix; returns the number of eigenvalues above the cutoff.
pub fn numerical_rank_psd(eigenvalues: &[f64]) -> RankDecision {
    let clipped: Vec<f64> = eigenvalues.iter().map(|&e| e.max(0.0)).collect();
    RankDecision::from_values(&clipped)
}
