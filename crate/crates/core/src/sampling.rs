//! Seeded random instances for property checks and random gauges.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::compacts::CompactOp;
use crate::fock::{wedge_dim, FockVector, GradedElement, Side};
use crate::module_structure::ModuleElement;
use crate::{CMat, C64};

/// Deterministic generator used by every check.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream derived from `seed` and a label, so that suites do
    /// not depend on each other's consumption order.
    pub fn derived(seed: u64, label: &str) -> Self {
        // FNV-1a
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        Self::new(seed ^ h)
    }

    pub fn real(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.real(), self.real())
    }

    pub fn complex_vec(&mut self, n: usize) -> Vec<C64> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn fock(&mut self, n: usize, side: Side) -> FockVector {
        FockVector::new(DVector::from_vec(self.complex_vec(n)), side)
    }

    /// Random vector supported on Fock levels `0..support`.
    pub fn fock_supported(&mut self, n: usize, support: usize, side: Side) -> FockVector {
        let mut v = self.complex_vec(n);
        for z in v.iter_mut().skip(support) {
            *z = C64::new(0.0, 0.0);
        }
        FockVector::new(DVector::from_vec(v), side)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| self.complex())
    }

    pub fn compact(&mut self, n: usize) -> CompactOp {
        CompactOp::new(self.matrix(n, n)).expect("square")
    }

    /// Unitary from the QR factorization of a complex Gaussian matrix.
    pub fn unitary(&mut self, n: usize) -> CMat {
        self.matrix(n, n).qr().q()
    }

    pub fn graded(&mut self, degree: usize, n: usize) -> GradedElement {
        let comps = (0..wedge_dim(degree))
            .map(|_| self.fock(n, Side::Dual))
            .collect();
        GradedElement::from_components(degree, comps).expect("consistent components")
    }

    /// Pure tensor `α ⊗ f` of the given degree with random complex `α`, `f`.
    pub fn pure_tensor(
        &mut self,
        degree: usize,
        n: usize,
    ) -> (Vec<C64>, FockVector, GradedElement) {
        let form = self.complex_vec(wedge_dim(degree));
        let f = self.fock(n, Side::Dual);
        let x = GradedElement::tensor(degree, &form, &f).expect("consistent tensor");
        (form, f, x)
    }

    /// Element with random parts in every degree.
    pub fn module_element(&mut self, n: usize) -> ModuleElement {
        let parts: Vec<_> = (0..=2).map(|k| self.graded(k, n)).collect();
        ModuleElement::from_parts(n, parts).expect("distinct degrees")
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
