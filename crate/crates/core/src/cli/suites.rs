//! Verification suites driven by the CLI. Each suite returns one record per
//! check; names carry the suite as a prefix so the merged report has a
//! deterministic order regardless of which suite finishes first.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::config::{GaugeChoice, RunConfig};
use super::report::CheckRecord;
use crate::compacts::CompactOp;
use crate::error::Result;
use crate::fock::{graded_inner, inner_product, GradedElement, Side};
use crate::kuiper::{self, CochainField, GaugeField, TorusGrid, TORUS_BETTI};
use crate::metaplectic::{self, Label, SpGenerator};
use crate::module_structure::{act, ch_product, module_norm, Generators, ModuleElement};
use crate::sampling::Sampler;
use crate::C64;

/// Number of random gauges in the nilpotency check.
const RANDOM_GAUGES: usize = 5;

struct Checker<'a> {
    suite: &'static str,
    cfg: &'a RunConfig,
    records: Vec<CheckRecord>,
}

impl<'a> Checker<'a> {
    fn new(suite: &'static str, cfg: &'a RunConfig) -> Self {
        Self {
            suite,
            cfg,
            records: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, anchor: &str, value: f64, default: f64, strict: bool) {
        let name = format!("{}.{}", self.suite, name);
        let threshold = self.cfg.tolerance(&name, default);
        let pass = if strict {
            value < threshold
        } else {
            value <= threshold
        };
        self.records.push(CheckRecord {
            name,
            anchor: anchor.to_string(),
            value,
            threshold,
            pass,
        });
    }

    /// Passes when `value ≤ threshold`.
    fn at_most(&mut self, name: &str, anchor: &str, value: f64, default: f64) {
        self.push(name, anchor, value, default, false);
    }

    /// Passes when `value < threshold`.
    fn below(&mut self, name: &str, anchor: &str, value: f64, default: f64) {
        self.push(name, anchor, value, default, true);
    }

    fn finish(self) -> Vec<CheckRecord> {
        self.records
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Largest `‖a x‖` over unit vectors drawn uniformly from the sphere; a
/// lower bound for the operator norm.
pub fn sampled_norm_lower_bound(a: &CompactOp, samples: usize, sampler: &mut Sampler) -> f64 {
    let n = a.dim();
    (0..samples)
        .map(|_| {
            let x = DVector::from_vec(sampler.complex_vec(n)).normalize();
            (a.matrix() * x).norm()
        })
        .fold(0.0, f64::max)
}

/// Operator norm by power iteration on `a*a`, started from the best of
/// `starts` random vectors. Independent of the SVD route.
pub fn power_iteration_norm(
    a: &CompactOp,
    starts: usize,
    iterations: usize,
    sampler: &mut Sampler,
) -> f64 {
    let n = a.dim();
    let m = a.matrix();
    let gram = m.adjoint() * m;
    let mut best = DVector::from_vec(sampler.complex_vec(n)).normalize();
    for _ in 1..starts {
        let x = DVector::from_vec(sampler.complex_vec(n)).normalize();
        if (m * &x).norm() > (m * &best).norm() {
            best = x;
        }
    }
    let mut x = best;
    for _ in 0..iterations {
        let y = &gram * &x;
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        x = y / C64::new(norm, 0.0);
    }
    (m * x).norm()
}

pub fn module_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n;
    let mut s = Sampler::derived(cfg.seed, "module");
    let mut ck = Checker::new("module", cfg);

    // musical maps
    let mut involution: f64 = 0.0;
    let mut antiunitary: f64 = 0.0;
    for _ in 0..100 {
        let f = s.fock(n, Side::Dual);
        let v = s.fock(n, Side::Primal);
        let w = s.fock(n, Side::Primal);
        let back = f
            .sharp()?
            .flat()?
            .sub(&f)?
            .norm()
            .max(v.flat()?.sharp()?.sub(&v)?.norm());
        involution = involution.max(back);
        let lhs = inner_product(&v.flat()?, &w.flat()?)?;
        let rhs = inner_product(&w, &v)?;
        antiunitary = antiunitary.max((lhs - rhs).norm());
    }
    ck.at_most(
        "musical_involution",
        "Notation: sharp/flat",
        involution,
        0.0,
    );
    ck.at_most(
        "musical_antiunitarity",
        "Notation: sharp/flat",
        antiunitary,
        1e-12,
    );

    let mut graded: f64 = 0.0;
    for _ in 0..100 {
        let k = s.uniform(0.0, 3.0) as usize;
        let x = s.graded(k, n);
        let y = s.graded(k, n);
        let xx = graded_inner(&x, &x)?;
        let flat: f64 = x.flatten().iter().map(|z| z.norm_sqr()).sum();
        let sym = (graded_inner(&x, &y)? - graded_inner(&y, &x)?.conj()).norm();
        graded = graded
            .max((xx - C64::new(flat, 0.0)).norm())
            .max(sym)
            .max(-xx.re);
    }
    ck.at_most(
        "graded_inner_hodge_product",
        "Hodge-type product on forms",
        graded,
        1e-10,
    );

    // compact operators
    let mut cstar: f64 = 0.0;
    let mut submult: f64 = 0.0;
    let mut rank_one_norm: f64 = 0.0;
    let mut rank_one_comp: f64 = 0.0;
    let mut rank_one_adj: f64 = 0.0;
    for _ in 0..100 {
        let a = s.compact(n);
        let b = s.compact(n);
        let na = a.op_norm();
        cstar = cstar.max((a.adjoint().compose(&a)?.op_norm() - na * na).abs() / (na * na));
        submult = submult.max(a.compose(&b)?.op_norm() - na * b.op_norm());

        let u = s.fock(n, Side::Primal);
        let v = s.fock(n, Side::Dual);
        let w = s.fock(n, Side::Primal);
        let h = s.fock(n, Side::Dual);
        let uv = CompactOp::rank_one(&u, &v)?;
        rank_one_norm =
            rank_one_norm.max((uv.op_norm() - u.norm() * v.norm()).abs() / (u.norm() * v.norm()));
        let lhs = uv.compose(&CompactOp::rank_one(&w, &h)?)?;
        let rhs = CompactOp::rank_one(&u, &h)?.scale(v.eval(&w)?);
        rank_one_comp = rank_one_comp.max(lhs.sub(&rhs)?.max_abs() / rhs.max_abs().max(1.0));
        let adj = CompactOp::rank_one(&v.sharp()?, &u.flat()?)?;
        rank_one_adj = rank_one_adj.max(uv.adjoint().sub(&adj)?.max_abs());
    }
    ck.at_most("cstar_identity", "C*-algebra of compacts", cstar, 1e-10);
    ck.at_most(
        "submultiplicativity",
        "C*-algebra of compacts",
        submult.max(0.0),
        1e-10,
    );
    ck.at_most(
        "rank_one_norm",
        "Notation: rank-one maps",
        rank_one_norm,
        1e-10,
    );
    ck.at_most("rank_one_composition", "Lemma 9", rank_one_comp, 1e-10);
    ck.at_most("rank_one_adjoint", "Lemma 2", rank_one_adj, 0.0);

    let a = s.compact(n);
    let svd_norm = a.op_norm();
    let sampled = sampled_norm_lower_bound(&a, 10_000, &mut s);
    let power = power_iteration_norm(&a, 100, 500, &mut s);
    ck.at_most(
        "op_norm_sampled_lower_bound",
        "C*-algebra of compacts",
        (sampled - svd_norm).max(0.0),
        1e-12,
    );
    ck.at_most(
        "op_norm_power_iteration",
        "C*-algebra of compacts",
        (power - svd_norm).abs(),
        1e-3,
    );

    // Lemma 1
    let mut lemma1: f64 = 0.0;
    let mut tensor_norm: f64 = 0.0;
    let mut degree0: f64 = 0.0;
    for _ in 0..100 {
        let k = s.uniform(0.0, 3.0) as usize;
        let (form, f, x) = s.pure_tensor(k, n);
        let g0: f64 = form.iter().map(|c| c.norm_sqr()).sum();
        let norm = module_norm(&ModuleElement::from_graded(x.clone()));
        lemma1 = lemma1.max((norm - g0.sqrt() * f.norm()).abs());
        let flat: f64 = x.flatten().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        tensor_norm = tensor_norm.max((norm - flat).abs());
        let e0 = ModuleElement::from_graded(GradedElement::from_components(0, vec![f.clone()])?);
        degree0 = degree0.max((ch_product(&e0, &e0)?.op_norm() - f.norm_squared()).abs());
    }
    ck.at_most("lemma1_norm_identity", "Lemma 1", lemma1, 1e-10);
    ck.at_most("lemma1_tensor_norm", "Lemma 1", tensor_norm, 1e-10);
    ck.at_most("lemma1_degree0_product_norm", "Lemma 1", degree0, 1e-10);

    let unit = s.fock(n, Side::Dual);
    let unit = unit.scale(C64::new(1.0 / unit.norm(), 0.0));
    let x = ModuleElement::from_graded(GradedElement::from_components(0, vec![unit])?);
    let ev = ch_product(&x, &x)?.hermitian_eigenvalues();
    let projector_defect = max_of(ev.iter().enumerate().map(|(i, e)| {
        let expected = if i + 1 == ev.len() { 1.0 } else { 0.0 };
        (e - expected).abs()
    }));
    ck.at_most(
        "unit_product_is_projection",
        "Lemma 1",
        projector_defect,
        1e-10,
    );

    // Lemma 2
    let gens = Generators::standard(n);
    let twisted = Generators::new(s.fock(n, Side::Dual))?;
    let mut lemma2: f64 = 0.0;
    for _ in 0..100 {
        let x = s.module_element(n);
        for g in [&gens, &twisted] {
            let coeffs = g.reconstruct(&x)?;
            lemma2 = lemma2.max(g.resum(&coeffs)?.distance(&x)?);
        }
    }
    ck.at_most("lemma2_finite_generation", "Lemma 2", lemma2, 1e-10);
    ck.at_most(
        "lemma2_generator_count",
        "Lemma 2",
        (gens.len() as f64 - 4.0).abs(),
        0.0,
    );

    // module axioms
    let mut assoc: f64 = 0.0;
    let mut distrib: f64 = 0.0;
    let mut right_lin: f64 = 0.0;
    let mut left_anti: f64 = 0.0;
    let mut herm: f64 = 0.0;
    let mut positivity: f64 = 0.0;
    for _ in 0..1000 {
        let x = s.module_element(n);
        let y = s.module_element(n);
        let a = s.compact(n);
        let b = s.compact(n);
        assoc = assoc.max(act(&act(&x, &a)?, &b)?.distance(&act(&x, &a.compose(&b)?)?)?);
        distrib = distrib.max(act(&x.add(&y)?, &a)?.distance(&act(&x, &a)?.add(&act(&y, &a)?)?)?);
        let xy = ch_product(&x, &y)?;
        right_lin = right_lin.max(
            ch_product(&x, &act(&y, &a)?)?
                .sub(&xy.compose(&a)?)?
                .max_abs(),
        );
        left_anti = left_anti.max(
            ch_product(&act(&x, &a)?, &y)?
                .sub(&a.adjoint().compose(&xy)?)?
                .max_abs(),
        );
        herm = herm.max(xy.adjoint().sub(&ch_product(&y, &x)?)?.max_abs());
        let xx = ch_product(&x, &x)?;
        positivity = positivity
            .max(-xx.hermitian_eigenvalues()[0])
            .max(xx.hermitian_defect());
    }
    ck.at_most("axiom_associativity", "Lemma 8", assoc, 1e-10);
    ck.at_most("axiom_distributivity", "Lemma 8", distrib, 1e-10);
    ck.at_most("axiom_right_linearity", "Thm 10", right_lin, 1e-10);
    ck.at_most("axiom_left_antilinearity", "Lemma 2", left_anti, 1e-10);
    ck.at_most("axiom_hermitian_symmetry", "Lemma 2", herm, 1e-10);
    ck.at_most("axiom_positivity", "Lemma 2", positivity.max(0.0), 1e-10);

    Ok(ck.finish())
}

pub fn equivariance_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n;
    let mut s = Sampler::derived(cfg.seed, "equivariance");
    let mut ck = Checker::new("equivariance", cfg);
    let labels = [Label::K0, Label::KPlus, Label::KMinus];

    let skew = max_of(labels.iter().map(|&l| {
        let m = SpGenerator::from_label(l).matrix(n);
        crate::compacts::max_abs(&(&m + m.adjoint()))
    }));
    ck.at_most("generators_skew_hermitian", "Lemma 3", skew, 1e-12);
    let parity = max_of(
        labels
            .iter()
            .map(|&l| metaplectic::parity_defect(&SpGenerator::from_label(l).matrix(n))),
    );
    ck.at_most(
        "generators_preserve_parity",
        "even/odd decomposition",
        parity,
        0.0,
    );
    let commutators =
        metaplectic::su11_interior_defect(n).max(metaplectic::real_form_interior_defect(n));
    ck.at_most("su11_commutators_interior", "Lemma 3", commutators, 1e-10);

    // K0 preserves the truncation, so every identity is checked on full
    // support; K± only on levels 0..N-3.
    let mut action: f64 = 0.0;
    let mut rank_one: f64 = 0.0;
    let mut evaluation: f64 = 0.0;
    let mut unitarity: f64 = 0.0;
    let mut product = 0.0;
    let mut norm_inv = 0.0;
    for &l in &labels {
        let x = SpGenerator::from_label(l);
        let support = if l == Label::K0 {
            n
        } else {
            n.saturating_sub(2)
        };
        let rep = metaplectic::equivariance_residuals(&x, n, support, 100, &mut s)?;
        action = action.max(rep.action);
        rank_one = rank_one.max(rep.rank_one);
        evaluation = evaluation.max(rep.evaluation);
        unitarity = unitarity.max(rep.unitarity);
        if let Some(p) = rep.product {
            product = p;
        }
        if let Some(v) = rep.norm_invariance {
            norm_inv = v;
        }
    }
    ck.at_most("action_equivariance", "Lemma 3", action, 1e-10);
    ck.at_most("rank_one_equivariance", "Lemma 3", rank_one, 1e-10);
    ck.at_most("evaluation_invariance", "Lemma 3", evaluation, 1e-10);
    ck.at_most("product_equivariance_k0", "Lemma 3", product, 1e-10);
    ck.at_most("norm_invariance_k0", "Lemma 3", norm_inv, 1e-10);
    ck.at_most(
        "exponential_unitarity",
        "Segal-Shale-Weil representation",
        unitarity,
        1e-10,
    );

    let probe = metaplectic::low_level_probe();
    let leak_interior = max_of([Label::KPlus, Label::KMinus].iter().map(|&l| {
        metaplectic::truncation_leak(&SpGenerator::from_label(l), probe.len() + 2, &probe)
    }));
    ck.at_most("truncation_leak_interior", "Lemma 3", leak_interior, 1e-10);
    let leak = |m: usize| {
        max_of(
            [Label::KPlus, Label::KMinus]
                .iter()
                .map(|&l| metaplectic::truncation_leak(&SpGenerator::from_label(l), m, &probe)),
        ) + metaplectic::su11_defect_on(m, &probe)
    };
    ck.below(
        "truncation_decay_12_vs_6",
        "Lemma 3",
        leak(12) / leak(6),
        1.0,
    );

    let (one, two, projected) = metaplectic::double_cover_witness(n);
    ck.at_most(
        "double_cover_one_turn",
        "metaplectic double cover",
        one,
        1e-8,
    );
    ck.at_most(
        "double_cover_two_turns",
        "metaplectic double cover",
        two,
        1e-8,
    );
    ck.at_most(
        "double_cover_projected_turn",
        "metaplectic double cover",
        projected,
        1e-12,
    );

    Ok(ck.finish())
}

fn configured_gauge(cfg: &RunConfig, grid: TorusGrid, n: usize, s: &mut Sampler) -> GaugeField {
    match cfg.gauge {
        GaugeChoice::Identity => GaugeField::identity(grid, n),
        GaugeChoice::Random => GaugeField::random(grid, n, s),
    }
}

fn rank_gap(ranks: [usize; 3], expected: [usize; 3]) -> f64 {
    max_of(
        ranks
            .iter()
            .zip(expected)
            .map(|(&r, e)| (r as f64 - e as f64).abs()),
    )
}

pub fn cohomology_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n;
    let grid = TorusGrid::new(cfg.grid)?;
    let mut s = Sampler::derived(cfg.seed, "cohomology");
    let mut ck = Checker::new("cohomology", cfg);
    let gauge = configured_gauge(cfg, grid, n, &mut s);
    let identity = GaugeField::identity(grid, n);

    let mut nil = kuiper::nilpotency_defect(&identity)?;
    for _ in 0..RANDOM_GAUGES {
        nil = nil.max(kuiper::nilpotency_defect(&GaugeField::random(
            grid, n, &mut s,
        ))?);
    }
    ck.at_most("d_squared_zero", "Thm 16", nil, 1e-12);

    let mut same: f64 = 0.0;
    let mut equiv_identity: f64 = 0.0;
    let mut equiv_gauge: f64 = 0.0;
    let random_gauge = GaugeField::random(grid, n, &mut s);
    for i in 0..100 {
        let k = i % 2;
        let field = CochainField::random(k, grid, n, &mut s)?;
        let a = s.compact(n);
        same = same.max(
            kuiper::coupled_d(&field, &identity)?
                .sub(&kuiper::discrete_d(&field))?
                .max_abs(),
        );
        equiv_identity = equiv_identity.max(kuiper::ch_equivariance_check(&field, &a, &identity)?);
        equiv_gauge = equiv_gauge.max(kuiper::ch_equivariance_check(&field, &a, &random_gauge)?);
    }
    ck.at_most(
        "product_connection_is_plain_d",
        "Kuiper connection",
        same,
        0.0,
    );
    ck.at_most(
        "ch_equivariance_identity_gauge",
        "Thm 16",
        equiv_identity,
        1e-12,
    );
    ck.at_most("ch_equivariance_random_gauge", "Thm 16", equiv_gauge, 1e-10);

    // constant fiber section times a scalar form: d(α ⊗ h̲) = dα ⊗ h̲
    let mut constant_section: f64 = 0.0;
    for k in 0..2 {
        let alpha = CochainField::random(k, grid, 1, &mut s)?;
        let h = s.fock(n, Side::Dual);
        let tensor = |f: &CochainField| -> Result<CochainField> {
            let data = f
                .data()
                .iter()
                .flat_map(|c| h.coords().iter().map(move |x| c * x))
                .collect();
            CochainField::from_vec(f.degree(), grid, n, data)
        };
        let lhs = kuiper::coupled_d(&tensor(&alpha)?, &identity)?;
        let rhs = tensor(&kuiper::discrete_d(&alpha))?;
        constant_section = constant_section.max(lhs.sub(&rhs)?.max_abs());
    }
    ck.at_most(
        "constant_fiber_sections",
        "Lemma 17",
        constant_section,
        1e-10,
    );

    let leibniz = leibniz_residual(grid, n, &gauge, &mut s)?;
    ck.at_most("leibniz_rule", "Lemma 17", leibniz, 1e-10);

    let ranks = kuiper::cohomology_ranks(&gauge)?;
    ck.at_most(
        "ranks_match_betti_times_n",
        "Thm 18",
        rank_gap(ranks.ranks, ranks.expected),
        0.0,
    );
    ck.at_most(
        "rank_threshold_unambiguous",
        "Thm 18",
        ranks.warnings.len() as f64,
        0.0,
    );
    let scalar = kuiper::cohomology_ranks(&GaugeField::identity(grid, 1))?;
    ck.at_most(
        "scalar_ranks_are_betti",
        "Thm 18",
        rank_gap(scalar.ranks, TORUS_BETTI),
        0.0,
    );
    let other = if gauge.is_identity() {
        random_gauge.clone()
    } else {
        identity.clone()
    };
    let other_ranks = kuiper::cohomology_ranks(&other)?;
    ck.at_most(
        "ranks_gauge_invariant",
        "Thm 18",
        rank_gap(ranks.ranks, other_ranks.ranks),
        0.0,
    );

    let mut not_exact = 0usize;
    for _ in 0..50 {
        let tau = loop {
            let t = [s.real(), s.real()];
            if t != [0.0, 0.0] {
                break t;
            }
        };
        if !kuiper::symbol_exactness(tau, n)?.exact {
            not_exact += 1;
        }
    }
    ck.at_most("symbol_sequence_exact", "Thm 18", not_exact as f64, 0.0);
    let zero_rejected = kuiper::symbol_exactness([0.0, 0.0], n).is_err();
    ck.at_most(
        "symbol_rejects_zero_covector",
        "Thm 18",
        if zero_rejected { 0.0 } else { 1.0 },
        0.0,
    );

    // section-level CH-product
    let f = s.fock(n, Side::Dual);
    let g = s.fock(n, Side::Dual);
    let one = [C64::new(1.0, 0.0)];
    let sf = CochainField::constant(0, grid, &one, &f)?;
    let sg = CochainField::constant(0, grid, &one, &g)?;
    let expected = CompactOp::rank_one(&f.sharp()?, &g)?.scale(C64::new(4.0 * PI * PI, 0.0));
    let got = kuiper::section_ch_product(&sf, &sg)?;
    ck.at_most(
        "section_product_constant",
        "Pettis integral",
        got.sub(&expected)?.max_abs() / expected.max_abs(),
        1e-10,
    );
    let mut section_lin: f64 = 0.0;
    let mut section_pos: f64 = 0.0;
    for k in 0..3 {
        let u = CochainField::random(k, grid, n, &mut s)?;
        let v = CochainField::random(k, grid, n, &mut s)?;
        let a = s.compact(n);
        let lhs = kuiper::section_ch_product(&u, &v.act(&a)?)?;
        let rhs = kuiper::section_ch_product(&u, &v)?.compose(&a)?;
        section_lin = section_lin.max(lhs.sub(&rhs)?.max_abs() / rhs.max_abs());
        let uu = kuiper::section_ch_product(&u, &u)?;
        section_pos = section_pos
            .max(-uu.hermitian_eigenvalues()[0])
            .max(uu.hermitian_defect() / uu.max_abs());
    }
    ck.at_most(
        "section_product_right_linear",
        "Pettis integral",
        section_lin,
        1e-10,
    );
    ck.at_most(
        "section_product_positive",
        "Pettis integral",
        section_pos.max(0.0),
        1e-10,
    );

    let transport = transport_residuals(grid, n, &random_gauge, 100, &mut s)?;
    ck.at_most(
        "transport_multiplicative",
        "Lemma 9",
        transport.multiplicative,
        1e-10,
    );
    ck.at_most(
        "transport_rank_one_coherent",
        "Thm 7",
        transport.rank_one,
        1e-10,
    );
    ck.at_most(
        "transport_action_compatible",
        "Lemma 9",
        transport.action,
        1e-10,
    );
    let ops: Vec<CompactOp> = (0..grid.vertex_count()).map(|_| s.compact(n)).collect();
    let identity_transport = kuiper::gauge_transport_compacts(&ops, &identity)?;
    let id_defect = max_of(
        ops.iter()
            .zip(&identity_transport)
            .map(|(a, b)| a.sub(b).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)),
    );
    ck.at_most("transport_identity_gauge", "Lemma 11", id_defect, 0.0);

    Ok(ck.finish())
}

/// `max ‖d(c·s) - Σ εⁱ∧ (Δᵢc) s(· + eᵢ) - c·d s‖` on random data, using the
/// discrete product rule `Δ(cs)(m) = Δc(m) s(m+e) + c(m) Δs(m)`.
pub fn leibniz_residual(
    grid: TorusGrid,
    n: usize,
    gauge: &GaugeField,
    s: &mut Sampler,
) -> Result<f64> {
    let c: Vec<C64> = s.complex_vec(grid.vertex_count());
    let inv_h = 1.0 / grid.step();
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        let field = CochainField::random(k, grid, n, s)?;
        let lhs = kuiper::coupled_d(&field.scalar_mul(&c)?, gauge)?;
        let mut rhs = kuiper::coupled_d(&field, gauge)?.scalar_mul(&c)?;
        // dc ∧ (shifted, transported) s
        let trivial = gauge.to_product_frame(&field)?;
        let mut wedge = CochainField::zeros(k + 1, grid, n)?;
        for v in 0..grid.vertex_count() {
            let dc = [0, 1].map(|axis| (c[grid.shift(v, axis)] - c[v]) * inv_h);
            if k == 0 {
                for (axis, dci) in dc.into_iter().enumerate() {
                    let shifted: Vec<C64> = trivial.block(grid.shift(v, axis), 0).to_vec();
                    for (o, x) in wedge.block_mut(v, axis).iter_mut().zip(shifted) {
                        *o = dci * x;
                    }
                }
            } else {
                // (dc ∧ α)_{12} = Δ₁c α₂(m+e₁) - Δ₂c α₁(m+e₂)
                let a2: Vec<C64> = trivial.block(grid.shift(v, 0), 1).to_vec();
                let a1: Vec<C64> = trivial.block(grid.shift(v, 1), 0).to_vec();
                for (o, (x, y)) in wedge.block_mut(v, 0).iter_mut().zip(a2.into_iter().zip(a1)) {
                    *o = dc[0] * x - dc[1] * y;
                }
            }
        }
        rhs = rhs.add(&gauge.to_gauged_frame(&wedge)?)?;
        worst = worst.max(lhs.sub(&rhs)?.max_abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TransportResiduals {
    pub multiplicative: f64,
    pub rank_one: f64,
    pub action: f64,
}

/// Residuals of the operator transport: `T(ab) = T(a)T(b)`,
/// `T(v ⊗ f) = (g v) ⊗ (f ∘ g⁻¹)` and `T(f)·T(a) = T(f·a)`.
pub fn transport_residuals(
    grid: TorusGrid,
    n: usize,
    gauge: &GaugeField,
    instances: usize,
    s: &mut Sampler,
) -> Result<TransportResiduals> {
    let mut out = TransportResiduals::default();
    let vc = grid.vertex_count();
    for i in 0..instances {
        let v = i % vc;
        let a = s.compact(n);
        let b = s.compact(n);
        let ab = gauge.transport_operator(v, &a.compose(&b)?)?;
        let split = gauge
            .transport_operator(v, &a)?
            .compose(&gauge.transport_operator(v, &b)?)?;
        out.multiplicative = out
            .multiplicative
            .max(ab.sub(&split)?.max_abs() / ab.max_abs());

        let x = s.fock(n, Side::Primal);
        let f = s.fock(n, Side::Dual);
        let lhs = gauge.transport_operator(v, &CompactOp::rank_one(&x, &f)?)?;
        let rhs = CompactOp::rank_one(
            &gauge.transport_vector(v, &x)?,
            &gauge.transport_functional(v, &f)?,
        )?;
        out.rank_one = out.rank_one.max(lhs.sub(&rhs)?.max_abs() / lhs.max_abs());

        let moved = gauge
            .transport_operator(v, &a)?
            .pull_back(&gauge.transport_functional(v, &f)?)?;
        let direct = gauge.transport_functional(v, &a.pull_back(&f)?)?;
        out.action = out.action.max(moved.sub(&direct)?.norm() / direct.norm());
    }
    Ok(out)
}

pub fn hodge_suite(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n;
    let grid = TorusGrid::new(cfg.grid)?;
    let mut s = Sampler::derived(cfg.seed, "hodge");
    let mut ck = Checker::new("hodge", cfg);
    let gauge = configured_gauge(cfg, grid, n, &mut s);

    let ranks = kuiper::cohomology_ranks(&gauge)?;
    let mut dims = [0usize; 3];
    let mut closed: f64 = 0.0;
    let mut coclosed: f64 = 0.0;
    let mut warnings = 0usize;
    let mut generators = [0usize; 3];
    let mut candidate: f64 = 0.0;
    for k in 0..3 {
        let h = kuiper::harmonic_space(k, &gauge)?;
        dims[k] = h.dim();
        closed = closed.max(h.closed_residual);
        coclosed = coclosed.max(h.coclosed_residual);
        warnings += h.warnings.len();
        let r = kuiper::ch_rank(k, &gauge)?;
        generators[k] = r.generators;
        candidate = candidate.max(r.candidate_residual);
    }
    ck.at_most(
        "harmonic_dims_equal_ranks",
        "Thm 18",
        rank_gap(dims, ranks.ranks),
        0.0,
    );
    ck.at_most("harmonic_closed", "Thm 18", closed, 1e-8);
    ck.at_most("harmonic_coclosed", "Thm 18", coclosed, 1e-8);
    ck.at_most(
        "eigenvalue_threshold_unambiguous",
        "Thm 18",
        warnings as f64,
        0.0,
    );
    ck.at_most("elementary_tensors_harmonic", "Thm 18", candidate, 1e-8);
    ck.at_most(
        "ch_generators_equal_betti",
        "Thm 18",
        rank_gap(generators, TORUS_BETTI),
        0.0,
    );

    // scalar harmonic 1-forms are the constant forms
    let scalar = kuiper::harmonic_space(1, &GaugeField::identity(grid, 1))?;
    let mut constants = 0.0f64;
    for w in 0..2 {
        let mut form = CochainField::zeros(1, grid, 1)?;
        for v in 0..grid.vertex_count() {
            form.block_mut(v, w)[0] = C64::new(1.0, 0.0);
        }
        constants = constants.max(scalar.distance_from(&form.into_vector()));
    }
    ck.at_most(
        "scalar_harmonic_forms_constant",
        "Thm 18",
        constants.max((scalar.dim() as f64 - 2.0).abs()),
        1e-8,
    );

    Ok(ck.finish())
}
