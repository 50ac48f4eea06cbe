use eos_core::fock::{
    build_generator, closed_form, coherent_amplitudes, exact_variance, expm_apply, generator,
    heisenberg_variances, inner, norm_sqr, perturbative_components, perturbative_variance,
    two_channel_oracle, Channel, Cutoffs, FockSpace, Ladder, Operator, ThreeModeModel,
};
use eos_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn small() -> Cutoffs {
    Cutoffs {
        probe: 10,
        mir: 4,
        nir: 4,
    }
}

fn basis(dim: usize, n: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); dim];
    v[n] = c(1.0, 0.0);
    v
}

fn coupling() -> impl Strategy<Value = Complex64> {
    (-0.1f64..0.1, -0.1f64..0.1).prop_map(|(a, b)| c(a, b))
}

fn amplitude(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0f64..max, 0.0f64..std::f64::consts::TAU).prop_map(|(r, phi)| Complex64::from_polar(r, phi))
}

#[test]
fn uncoupled_model_is_pure_shot_noise() {
    let alpha = c(0.8, -0.3);
    let m = ThreeModeModel::single(c(0.0, 0.0), c(0.0, 0.0), alpha);
    assert!((perturbative_variance(&m).unwrap() - alpha.norm_sqr()).abs() < 1e-12);
    let e = exact_variance(&m).unwrap();
    assert!((e.variance - alpha.norm_sqr()).abs() < 1e-12);
    assert_eq!(
        build_generator(&m.clone().with_cutoffs(small()))
            .unwrap()
            .max_abs(),
        0.0
    );
}

#[test]
fn worked_example_variance() {
    let m = ThreeModeModel::single(c(0.0, 0.1), c(0.0, 0.0), c(0.5, 0.0));
    let v = perturbative_variance(&m).unwrap();
    assert!((v - 0.25125).abs() < 1e-10, "{v}");
}

#[test]
fn worked_example_first_order_norm() {
    let m = ThreeModeModel::single(c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.0));
    let p = perturbative_components(&m).unwrap();
    assert!((p.sig1_sq - 0.04).abs() < 1e-10);
    let total = perturbative_variance(&m).unwrap();
    assert!((p.sig1_sq + p.sig0_sig2 - (total - 1.0)).abs() < 1e-10);
}

#[test]
fn equal_real_couplings_cancel_the_eo_term() {
    let alpha = c(0.9, 0.2);
    let m = ThreeModeModel::single(c(0.07, 0.0), c(0.07, 0.0), alpha);
    assert!((perturbative_variance(&m).unwrap() - alpha.norm_sqr()).abs() < 1e-10);
}

#[test]
fn equal_magnitudes_remove_the_quartic_heisenberg_term() {
    let (a, cc) = (
        c(0.06, 0.03),
        Complex64::from_polar(c(0.06, 0.03).norm(), 1.1),
    );
    for alpha in [c(0.5, 0.0), c(1.0, 0.0)] {
        let h = heisenberg_variances(&ThreeModeModel::single(a, cc, alpha)).unwrap();
        let n = alpha.norm_sqr();
        let quadratic = -(a.norm_sqr() + cc.norm_sqr() - (a * cc + a.conj() * cc.conj()).re) * n;
        assert!((h.s2s0_sym - quadratic).abs() < 1e-10);
    }
}

#[test]
fn first_order_state_structure() {
    let (a, alpha) = (c(0.04, -0.02), c(0.6, 0.1));
    let m = ThreeModeModel::single(a, c(0.0, 0.0), alpha);
    let space = m.space();
    let psi = m.initial_state(&space).unwrap();
    let (coh, _) = coherent_amplitudes(alpha, m.cutoffs.probe);
    let one = |k: usize| {
        let mut v = vec![c(0.0, 0.0); k + 1];
        v[1] = c(1.0, 0.0);
        v
    };
    let target = space.product_state(&[one(m.cutoffs.mir), coh, one(m.cutoffs.nir)]);
    let out1 = generator(&m).apply(&space, &psi);
    let amp = inner(&target, &out1);
    assert!((amp - a * alpha).norm() < 1e-10, "{amp}");
}

#[test]
fn two_channel_worked_example() {
    let ch = Channel::new(c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0));
    let o = two_channel_oracle(&ThreeModeModel::two_channel(ch, ch)).unwrap();
    assert!((o.cross_sig1 - 0.0025).abs() < 1e-10);
    assert!(o.base_cross.abs() < 1e-12);
}

#[test]
fn equal_amplitudes_do_not_reproduce_the_single_channel_result() {
    let (a, cc, alpha) = (c(0.05, 0.02), c(0.03, -0.01), c(0.5, 0.0));
    let two = two_channel_oracle(&ThreeModeModel::two_channel(
        Channel::new(a, cc, alpha),
        Channel::new(a, cc, alpha),
    ))
    .unwrap();
    let single = perturbative_components(&ThreeModeModel::single(a, cc, alpha)).unwrap();
    let two_total = two.cross_sig1 + two.cross_sig02;
    let one_total = single.sig1_sq + single.sig0_sig2;
    assert!((two_total - one_total).abs() > 1e-4 * one_total.abs().max(two_total.abs()));
}

#[test]
fn exact_residual_is_higher_order() {
    let alpha = c(1.0, 0.0);
    let residual = |k: f64| {
        let m = ThreeModeModel::single(c(0.08 * k, 0.0), c(0.0, 0.03 * k), alpha);
        (exact_variance(&m).unwrap().variance - perturbative_variance(&m).unwrap()).abs()
    };
    let (r1, r2) = (residual(1.0), residual(0.5));
    assert!(r1 / r2 >= 8.0, "{r1} / {r2}");
}

#[test]
fn exact_evolution_is_unitary() {
    let m = ThreeModeModel::single(c(0.05, 0.02), c(-0.01, 0.04), c(1.2, 0.3));
    let e = exact_variance(&m).unwrap();
    assert!(e.norm_defect < 1e-10 + e.boundary_population);
    assert!(e.boundary_population < 1e-8);
}

#[test]
fn expm_of_the_zero_operator_is_the_identity() {
    let space = FockSpace::new(&[("a", 3), ("b", 2)]);
    let psi: Vec<Complex64> = (0..space.dim()).map(|k| c(k as f64, 1.0)).collect();
    assert_eq!(expm_apply(&Operator::zero(), &space, &psi).unwrap(), psi);
}

#[test]
fn ladder_commutator_below_the_cutoff() {
    let cut = 7;
    let space = FockSpace::new(&[("m", cut)]);
    let mut ada = Operator::zero();
    ada.push(c(1.0, 0.0), &[(0, Ladder::Create), (0, Ladder::Annihilate)]);
    let mut aad = Operator::zero();
    aad.push(c(1.0, 0.0), &[(0, Ladder::Annihilate), (0, Ladder::Create)]);
    for n in 0..cut {
        let v = basis(space.dim(), n);
        let comm: Vec<Complex64> = aad
            .apply(&space, &v)
            .iter()
            .zip(ada.apply(&space, &v))
            .map(|(x, y)| x - y)
            .collect();
        let err = comm
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-14, "n = {n}");
    }
    let mut a = Operator::zero();
    a.push(c(1.0, 0.0), &[(0, Ladder::Annihilate)]);
    let lowered = a.apply(&space, &basis(space.dim(), 5));
    assert!((lowered[4] - c(5f64.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn generator_is_anti_hermitian() {
    let m =
        ThreeModeModel::single(c(0.09, -0.04), c(0.02, 0.07), c(0.5, 0.5)).with_cutoffs(small());
    let g = build_generator(&m).unwrap();
    assert!(g.add(&g.adjoint()).max_abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn single_channel_closed_forms(a in coupling(), cc in coupling(), alpha in amplitude(1.0)) {
        let m = ThreeModeModel::single(a, cc, alpha);
        let p = perturbative_components(&m).unwrap();
        prop_assert!((p.variance() - closed_form::variance(a, cc, alpha)).abs() < 1e-10);
        prop_assert!((p.sig1_sq - closed_form::sig1_sq(a, alpha)).abs() < 1e-10);
        prop_assert!((p.sig0_sig2 - closed_form::sig0_sig2(a, cc, alpha)).abs() < 1e-10);
        prop_assert!(p.sig0_sig1.abs() < 1e-12);
        let h = heisenberg_variances(&m).unwrap();
        prop_assert!((h.s1_sq - closed_form::s1_sq(a, cc, alpha)).abs() < 1e-10);
        prop_assert!((h.s2s0_sym - closed_form::s2s0_sym(a, cc, alpha)).abs() < 1e-10);
        prop_assert!(h.imag_residue < 1e-12);
        // both decompositions give the same second-order total
        prop_assert!((h.s1_sq + h.s2s0_sym - p.sig1_sq - p.sig0_sig2).abs() < 1e-10);
    }

    #[test]
    fn two_channel_closed_forms(
        a1 in coupling(), c1 in coupling(), x1 in amplitude(0.6),
        a2 in coupling(), c2 in coupling(), x2 in amplitude(0.6),
    ) {
        let m = ThreeModeModel::two_channel(Channel::new(a1, c1, x1), Channel::new(a2, c2, x2));
        let o = two_channel_oracle(&m).unwrap();
        prop_assert!((o.cross_sig1 - closed_form::cross_sig1(a1, a2, x1, x2)).abs() < 1e-10);
        prop_assert!((o.cross_sig02 - closed_form::cross_sig02(a1, c1, a2, c2, x1, x2)).abs() < 1e-10);
        prop_assert!(o.base_cross.abs() < 1e-12);
    }

    #[test]
    fn signal_mean_vanishes(a in coupling(), cc in coupling(), alpha in amplitude(1.5)) {
        let m = ThreeModeModel::single(a, cc, alpha);
        let space = m.space();
        let psi = m.initial_state(&space).unwrap();
        let s = m.signal(0).apply(&space, &psi);
        prop_assert!(inner(&psi, &s).norm() < 1e-12);
        prop_assert!((norm_sqr(&psi) - 1.0).abs() < 1e-12);
    }
}
