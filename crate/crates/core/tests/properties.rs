//! Randomized invariants. Each case draws a seed and builds its data with the
//! crate sampler so failures shrink to a single reproducible integer.

use oscillator_complex::compacts::CompactOp;
use oscillator_complex::fock::{graded_inner, inner_product, Side};
use oscillator_complex::kuiper::{self, CochainField, GaugeField, TorusGrid};
use oscillator_complex::metaplectic::{self, SpGenerator};
use oscillator_complex::module_structure::{
    act, ch_product, module_norm, Generators, ModuleElement,
};
use oscillator_complex::sampling::Sampler;
use oscillator_complex::C64;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn flat_is_antiunitary(seed: u64, n in 2usize..10) {
        let mut s = Sampler::new(seed);
        let v = s.fock(n, Side::Primal);
        let w = s.fock(n, Side::Primal);
        let lhs = inner_product(&v.flat().unwrap(), &w.flat().unwrap()).unwrap();
        let rhs = inner_product(&w, &v).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
        prop_assert_eq!(v.flat().unwrap().sharp().unwrap(), v);
    }

    #[test]
    fn graded_inner_is_hermitian(seed: u64, n in 2usize..8, k in 0usize..3) {
        let mut s = Sampler::new(seed);
        let x = s.graded(k, n);
        let y = s.graded(k, n);
        let xy = graded_inner(&x, &y).unwrap();
        let yx = graded_inner(&y, &x).unwrap();
        prop_assert!((xy - yx.conj()).norm() <= 1e-10);
    }

    #[test]
    fn rank_one_adjoint_swaps_factors(seed: u64, n in 2usize..8) {
        let mut s = Sampler::new(seed);
        let u = s.fock(n, Side::Primal);
        let v = s.fock(n, Side::Dual);
        let lhs = CompactOp::rank_one(&u, &v).unwrap().adjoint();
        let rhs = CompactOp::rank_one(&v.sharp().unwrap(), &u.flat().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn module_norm_on_pure_tensors(seed: u64, n in 2usize..8, k in 0usize..3) {
        let mut s = Sampler::new(seed);
        let (form, f, x) = s.pure_tensor(k, n);
        let g0: f64 = form.iter().map(|c| c.norm_sqr()).sum();
        let norm = module_norm(&ModuleElement::from_graded(x));
        prop_assert!((norm - g0.sqrt() * f.norm()).abs() <= 1e-10 * (1.0 + norm));
    }

    #[test]
    fn module_axioms(seed: u64, n in 2usize..7) {
        let mut s = Sampler::new(seed);
        let x = s.module_element(n);
        let y = s.module_element(n);
        let a = s.compact(n);
        let b = s.compact(n);
        let assoc = act(&act(&x, &a).unwrap(), &b).unwrap().distance(&act(&x, &a.compose(&b).unwrap()).unwrap()).unwrap();
        prop_assert!(assoc <= 1e-10);
        let xy = ch_product(&x, &y).unwrap();
        let lin = ch_product(&x, &act(&y, &a).unwrap()).unwrap().sub(&xy.compose(&a).unwrap()).unwrap();
        prop_assert!(lin.max_abs() <= 1e-10);
        prop_assert!(xy.adjoint().sub(&ch_product(&y, &x).unwrap()).unwrap().max_abs() <= 1e-10);
        let xx = ch_product(&x, &x).unwrap();
        prop_assert!(xx.hermitian_eigenvalues()[0] >= -1e-10);
    }

    #[test]
    fn generators_reconstruct_for_any_pivot(seed: u64, n in 2usize..7) {
        let mut s = Sampler::new(seed);
        let gens = Generators::new(s.fock(n, Side::Dual)).unwrap();
        let x = s.module_element(n);
        let back = gens.resum(&gens.reconstruct(&x).unwrap()).unwrap();
        prop_assert!(back.distance(&x).unwrap() <= 1e-10 * (1.0 + module_norm(&x)));
    }

    #[test]
    fn exponentials_are_unitary(c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, t in -5.0f64..5.0, n in 2usize..12) {
        let x = SpGenerator::new([c0, c1, c2]);
        prop_assert!(metaplectic::exponentiate(&x, t, n).unitarity_defect() <= 1e-10);
    }

    #[test]
    fn generators_preserve_parity(c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, n in 2usize..12) {
        let m = SpGenerator::new([c0, c1, c2]).matrix(n);
        prop_assert_eq!(metaplectic::parity_defect(&m), 0.0);
    }

    #[test]
    fn coupled_d_squares_to_zero(seed: u64, n in 1usize..4, g in 2usize..6) {
        let mut s = Sampler::new(seed);
        let grid = TorusGrid::new(g).unwrap();
        let gauge = GaugeField::random(grid, n, &mut s);
        let field = CochainField::random(0, grid, n, &mut s).unwrap();
        let dd = kuiper::coupled_d(&kuiper::coupled_d(&field, &gauge).unwrap(), &gauge).unwrap();
        prop_assert!(dd.max_abs() <= 1e-12 * (1.0 + field.max_abs() * (g * g) as f64));
    }

    #[test]
    fn symbol_is_exact_off_zero(t0 in -5.0f64..5.0, t1 in -5.0f64..5.0, n in 1usize..6) {
        prop_assume!(t0.abs() + t1.abs() > 1e-6);
        prop_assert!(kuiper::symbol_exactness([t0, t1], n).unwrap().exact);
    }

    #[test]
    fn transport_is_multiplicative(seed: u64, n in 2usize..6) {
        let mut s = Sampler::new(seed);
        let grid = TorusGrid::new(3).unwrap();
        let gauge = GaugeField::random(grid, n, &mut s);
        let a = s.compact(n);
        let b = s.compact(n);
        for v in 0..grid.vertex_count() {
            let lhs = gauge.transport_operator(v, &a.compose(&b).unwrap()).unwrap();
            let rhs = gauge.transport_operator(v, &a).unwrap().compose(&gauge.transport_operator(v, &b).unwrap()).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-10 * (1.0 + lhs.max_abs()));
        }
    }

    #[test]
    fn section_product_is_positive(seed: u64, n in 2usize..5, k in 0usize..3) {
        let mut s = Sampler::new(seed);
        let grid = TorusGrid::new(3).unwrap();
        let u = CochainField::random(k, grid, n, &mut s).unwrap();
        let uu = kuiper::section_ch_product(&u, &u).unwrap();
        prop_assert!(uu.hermitian_eigenvalues()[0] >= -1e-10 * uu.max_abs());
        prop_assert!(uu.hermitian_defect() <= 1e-10 * uu.max_abs());
    }
}

#[test]
fn scaled_elements_scale_the_product() {
    let mut s = Sampler::new(7);
    let x = s.module_element(4);
    let y = s.module_element(4);
    let c = C64::new(0.3, -1.2);
    let lhs = ch_product(&x.scale(c), &y).unwrap();
    let rhs = ch_product(&x, &y).unwrap().scale(c.conj());
    assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
}
