use std::f64::consts::PI;

use eos_core::params::{
    absorption, omega_from_thz, thz_from_omega, DispersionModel, ParameterSet, PhysicalConstants,
    ProbeSpectrum, SetLabel,
};
use eos_core::Error;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Real part of the principal square root of x + iy, written out by hand.
fn sqrt_re(x: f64, y: f64) -> f64 {
    let m = (x * x + y * y).sqrt();
    ((m + x) / 2.0).sqrt()
}

#[test]
fn lorentzian_dc_limit() {
    let n = DispersionModel::set1()
        .refractive_index(omega_from_thz(1e-9))
        .unwrap();
    let expect = 6.7f64.sqrt() * 6.2 / 5.3;
    assert!(rel(n, expect) < 1e-12, "{n} vs {expect}");
    assert!((n - 3.028).abs() < 5e-4);
}

#[test]
fn polynomial_constant_term() {
    assert_eq!(
        DispersionModel::set2().refractive_index(0.0).unwrap(),
        3.0657
    );
}

#[test]
fn lorentzian_at_30_thz_matches_hand_rolled_sqrt() {
    let nu: f64 = 30.0;
    // 6.7·[1 + (6.2² − 5.3²)/(5.3² − ν² − 0.09iν)]
    let (dr, di) = (5.3f64 * 5.3 - nu * nu, -0.09 * nu);
    let num = 6.2f64 * 6.2 - 5.3 * 5.3;
    let den = dr * dr + di * di;
    let (qr, qi) = (num * dr / den, -num * di / den);
    let (er, ei) = (6.7 * (1.0 + qr), 6.7 * qi);
    let expect = sqrt_re(er, ei);
    let n = DispersionModel::set1()
        .refractive_index(omega_from_thz(nu))
        .unwrap();
    assert!(rel(n, expect) < 1e-13, "{n} vs {expect}");
}

#[test]
fn outside_validity_is_a_domain_error() {
    let e = DispersionModel::set2()
        .refractive_index(omega_from_thz(4.0))
        .unwrap_err();
    match e {
        Error::Domain { lo_thz, hi_thz, .. } => assert_eq!((lo_thz, hi_thz), (0.0, 3.0)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(e.to_string().contains("[0, 3] THz"));
}

#[test]
fn absorption_examples() {
    assert_eq!(absorption(0.0), 1.0);
    let direct = (-0.000618 * 256.0 - 0.0000879 * 64.0f64).exp();
    assert!(rel(absorption(omega_from_thz(2.0)), direct) < 1e-14);
    assert!((absorption(omega_from_thz(2.0)) - 0.8489).abs() < 1e-4);
    let c = ParameterSet::set1().crystal;
    assert!(!c.absorption_enabled);
    for nu in [0.0, 1.0, 2.0, 40.0] {
        assert_eq!(c.absorption_factor(omega_from_thz(nu)), 1.0);
    }
}

#[test]
fn constants_are_codata() {
    let c = PhysicalConstants::CODATA;
    assert_eq!(c.c0, 299_792_458.0);
    assert_eq!(c.hbar, 1.054_571_817e-34);
    assert!((c.eps0 / 8.854_187_812_8e-12 - 1.0).abs() < 1e-10);
}

#[test]
fn unit_conversions_round_trip() {
    assert!((omega_from_thz(1.0) - 2.0 * PI).abs() < 1e-15);
    assert!((thz_from_omega(omega_from_thz(247.0)) - 247.0).abs() < 1e-12);
}

#[test]
fn presets() {
    let s1 = ParameterSet::set1();
    assert_eq!(s1.label, SetLabel::Set1);
    assert!((thz_from_omega(s1.probe.omega_p()) - 247.0).abs() < 1e-9);
    assert_eq!(s1.probe.bandwidth_thz, 150.0);
    let c = &s1.crystal;
    assert_eq!(
        (
            c.w0_um,
            c.length_um,
            c.r41_pm_per_v,
            c.n,
            c.n_g,
            c.mir_window_thz,
            c.absorption_enabled
        ),
        (3.0, 7.0, 3.9, 2.76, 2.9, [18.0, 150.0], false)
    );
    let s2 = ParameterSet::set2();
    assert!((thz_from_omega(s2.probe.omega_p()) - 375.0).abs() < 1e-9);
    assert_eq!(s2.probe.bandwidth_thz, 2.77);
    let c = &s2.crystal;
    assert_eq!(
        (
            c.w0_um,
            c.length_um,
            c.r41_pm_per_v,
            c.n,
            c.n_g,
            c.absorption_enabled
        ),
        (125.0, 3000.0, 3.9, 2.85, 3.18, true)
    );
    assert_eq!(c.d(), -(2.85f64.powi(4)) * 3.9);
}

#[test]
fn probe_normalization() {
    for p in [ParameterSet::set1().probe, ParameterSet::set2().probe] {
        assert!((p.kappa() - 1.0).abs() < 1e-12);
        assert!(p.support().0 > 0.0);
    }
    assert!(ProbeSpectrum::rectangular(10.0, 30.0, 1e8).is_err());
}

#[test]
fn thin_crystal_is_a_warning_not_an_error() {
    let mut p = ParameterSet::set1();
    p.crystal.length_um = 1e6;
    assert!(p.validate().is_ok());
    assert!(p.crystal.thin_crystal_check().iter().any(|e| !e.satisfied));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rectangular_omega_p_closed_form(center in 1.0f64..1000.0, frac in 0.01f64..0.99) {
        let p = ProbeSpectrum::rectangular(center, 2.0 * center * frac, 1e8).unwrap();
        prop_assert!(rel(p.omega_p(), p.omega_p_rectangular_closed_form()) < 1e-12);
        let (wc, dw) = (omega_from_thz(center), omega_from_thz(2.0 * center * frac));
        let closed = dw / ((wc + dw / 2.0) / (wc - dw / 2.0)).ln();
        prop_assert!(rel(p.omega_p(), closed) < 1e-12);
    }

    #[test]
    fn dispersion_is_even(nu in 0.0f64..3.0) {
        for m in [DispersionModel::set1(), DispersionModel::set2()] {
            let w = omega_from_thz(nu);
            prop_assert_eq!(m.refractive_index(w).unwrap(), m.refractive_index(-w).unwrap());
        }
    }

    #[test]
    fn lorentzian_is_even_and_positive(nu in 0.0f64..150.0) {
        let m = DispersionModel::set1();
        let w = omega_from_thz(nu);
        let n = m.refractive_index(w).unwrap();
        prop_assert!(n > 0.0);
        prop_assert_eq!(n, m.refractive_index(-w).unwrap());
    }

    #[test]
    fn absorption_nonincreasing(a in 0.0f64..4.0, b in 0.0f64..4.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(absorption(omega_from_thz(hi)) <= absorption(omega_from_thz(lo)));
        prop_assert!(absorption(omega_from_thz(-hi)) <= absorption(omega_from_thz(lo)));
    }
}
