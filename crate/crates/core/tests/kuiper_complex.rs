use oscillator_complex::cli::suites;
use oscillator_complex::fock::Side;
use oscillator_complex::kuiper::{self, CochainField, GaugeField, TorusGrid};
use oscillator_complex::sampling::Sampler;
use oscillator_complex::{Error, C64};

fn grid(g: usize) -> TorusGrid {
    TorusGrid::new(g).unwrap()
}

#[test]
fn ranks_identity_gauge_n6_g8() {
    let r = kuiper::cohomology_ranks(&GaugeField::identity(grid(8), 6)).unwrap();
    assert_eq!(r.ranks, [6, 12, 6]);
    assert_eq!(r.expected, [6, 12, 6]);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
}

#[test]
fn ranks_random_gauge_n4_g6() {
    let mut s = Sampler::new(3);
    let gauge = GaugeField::random(grid(6), 4, &mut s);
    assert_eq!(kuiper::cohomology_ranks(&gauge).unwrap().ranks, [4, 8, 4]);
    assert_eq!(
        kuiper::cohomology_ranks(&GaugeField::identity(grid(6), 4))
            .unwrap()
            .ranks,
        [4, 8, 4]
    );
}

#[test]
fn harmonic_one_forms_n6_g8() {
    let h = kuiper::harmonic_space(1, &GaugeField::identity(grid(8), 6)).unwrap();
    assert_eq!(h.dim(), 12);
    assert!(h.closed_residual < 1e-8 && h.coclosed_residual < 1e-8);
}

#[test]
fn scalar_harmonic_one_forms_are_dx_dy() {
    let g = grid(6);
    let h = kuiper::harmonic_space(1, &GaugeField::identity(g, 1)).unwrap();
    assert_eq!(h.dim(), 2);
    for w in 0..2 {
        let mut form = CochainField::zeros(1, g, 1).unwrap();
        for v in 0..g.vertex_count() {
            form.block_mut(v, w)[0] = C64::new(1.0, 0.0);
        }
        assert!(h.distance_from(&form.into_vector()) < 1e-10);
    }
}

#[test]
fn ch_rank_under_random_gauge() {
    let mut s = Sampler::new(11);
    let gauge = GaugeField::random(grid(4), 3, &mut s);
    for (k, b) in [1usize, 2, 1].into_iter().enumerate() {
        let r = kuiper::ch_rank(k, &gauge).unwrap();
        assert_eq!(r.generators, b, "degree {k}");
        assert_eq!(r.multiplicity, b as f64);
        assert!(r.candidate_residual < 1e-8);
    }
}

#[test]
fn leibniz_rule_with_random_gauge() {
    let mut s = Sampler::new(5);
    let gauge = GaugeField::random(grid(5), 3, &mut s);
    assert!(suites::leibniz_residual(grid(5), 3, &gauge, &mut s).unwrap() < 1e-10);
}

#[test]
fn section_product_of_constant_sections() {
    let g = grid(4);
    let mut s = Sampler::new(2);
    let f = s.fock(3, Side::Dual);
    let one = [C64::new(1.0, 0.0)];
    let sf = CochainField::constant(0, g, &one, &f).unwrap();
    let p = kuiper::section_ch_product(&sf, &sf).unwrap();
    let expected = (2.0 * std::f64::consts::PI).powi(2) * f.norm_squared();
    assert!((p.op_norm() - expected).abs() < 1e-10 * expected);
}

#[test]
fn gauge_transport_residuals() {
    let mut s = Sampler::new(9);
    let gauge = GaugeField::random(grid(4), 5, &mut s);
    let r = suites::transport_residuals(grid(4), 5, &gauge, 100, &mut s).unwrap();
    assert!(r.multiplicative < 1e-10);
    assert!(r.rank_one < 1e-10);
    assert!(r.action < 1e-10);
}

#[test]
fn equivariance_needs_the_transported_operator() {
    let mut s = Sampler::new(4);
    let g = grid(4);
    let gauge = GaugeField::random(g, 3, &mut s);
    let field = CochainField::random(0, g, 3, &mut s).unwrap();
    let a = s.compact(3);
    assert!(kuiper::ch_equivariance_check(&field, &a, &gauge).unwrap() < 1e-10);
    // the untransported constant field does not commute with the gauge
    let naive = vec![a; g.vertex_count()];
    assert!(kuiper::ch_equivariance_residual(&field, &naive, &gauge).unwrap() > 1e-6);
}

#[test]
fn mismatched_grids_are_rejected() {
    let mut s = Sampler::new(1);
    let field = CochainField::random(0, grid(4), 2, &mut s).unwrap();
    let gauge = GaugeField::identity(grid(5), 2);
    assert!(matches!(
        kuiper::coupled_d(&field, &gauge),
        Err(Error::GridMismatch { .. })
    ));
    assert!(matches!(
        kuiper::symbol_exactness([0.0, 0.0], 2),
        Err(Error::ZeroCovector)
    ));
    assert!(TorusGrid::new(1).is_err());
}
