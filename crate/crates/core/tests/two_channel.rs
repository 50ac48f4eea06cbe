use std::f64::consts::PI;
use std::sync::OnceLock;
use std::thread;

use eos_core::kernels::{KernelContext, Sign};
use eos_core::params::{ParameterSet, ProbeSpectrum, TabulatedSpectrum};
use eos_core::quad::QuadratureConfig;
use eos_core::single_channel::{integral_s1, integral_s2sq, integral_s3s1, var_s1};
use eos_core::two_channel::{
    g2_cross_nir, g2_main, max_abs, mean_probed_frequency, tau_grid, term_integral, v04, v13, v22,
    zero_crossings, BeamSplitter, CorrelationTrace, TracePlan, TwoChannelConfig, TwoChannelTerm,
    V13Part, V22Part,
};
use eos_core::Complex64;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(1e-7)
}

fn ctx() -> &'static KernelContext {
    static C: OnceLock<KernelContext> = OnceLock::new();
    C.get_or_init(|| KernelContext::new(ParameterSet::set2().with_absorption(false)).unwrap())
}

fn trace_at(n: f64, tau: Vec<f64>, terms: &[TwoChannelTerm]) -> CorrelationTrace {
    let mut config = TwoChannelConfig::new(n);
    config.tau_fs = tau;
    config.terms = terms.iter().copied().collect();
    let plan = TracePlan::new(&ParameterSet::set2(), &config, &cfg()).unwrap();
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(config.tau_fs.len().max(1));
    let chunk = config.tau_fs.len().div_ceil(workers);
    let points = thread::scope(|s| {
        let handles: Vec<_> = config
            .tau_fs
            .chunks(chunk)
            .map(|taus| {
                let plan = &plan;
                s.spawn(move || {
                    taus.iter()
                        .map(|&t| plan.point(t).unwrap())
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    });
    plan.assemble(points).unwrap()
}

fn full_trace() -> &'static CorrelationTrace {
    static T: OnceLock<CorrelationTrace> = OnceLock::new();
    T.get_or_init(|| trace_at(1e11, tau_grid(2000.0, 41), &TwoChannelTerm::ALL))
}

fn unscaled(term: TwoChannelTerm, tau_ps: f64) -> f64 {
    term_integral(term, ctx(), tau_ps, &cfg(), None)
        .unwrap()
        .0
        .value
        .re
}

#[test]
fn splitter_is_lossless() {
    let (a, b) = BeamSplitter::ideal().unitarity_defect();
    assert!(a.abs() < 1e-15 && b < 1e-15);
}

#[test]
fn main2_at_zero_delay_is_twice_the_one_sided_s1() {
    let n = 1e11;
    let two = g2_main(0.0, n, ctx(), &cfg()).unwrap();
    let one = var_s1(n, ctx(), &cfg()).unwrap().value;
    assert!((two / (2.0 * one) - 1.0).abs() < 1e-9);
}

#[test]
fn second_order_terms_are_even() {
    for tau in [40.0, 333.0, 1200.0] {
        let a = g2_main(tau, 1e10, ctx(), &cfg()).unwrap();
        let b = g2_main(-tau, 1e10, ctx(), &cfg()).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let c = g2_cross_nir(tau, 1e10, ctx(), &cfg()).unwrap();
        assert_eq!(c, g2_cross_nir(-tau, 1e10, ctx(), &cfg()).unwrap());
    }
}

#[test]
fn main2_is_bounded_by_its_zero_delay_value() {
    let t = full_trace();
    let m = t.term(TwoChannelTerm::Main2).unwrap();
    assert!(m.iter().all(|v| v.abs() <= m[0] * (1.0 + 1e-12)));
}

#[test]
fn symmetry_forbidden_terms_vanish() {
    let t = full_trace();
    let main0 = t.term(TwoChannelTerm::Main2).unwrap()[0];
    let v22a0 = t.term(TwoChannelTerm::V22A).unwrap()[0];
    assert!(max_abs(t.term(TwoChannelTerm::Cross2).unwrap()) <= 1e-8 * main0);
    assert!(max_abs(t.term(TwoChannelTerm::V04A).unwrap()) <= 1e-8 * v22a0);
    assert!(max_abs(t.term(TwoChannelTerm::V04B).unwrap()) <= 1e-8 * v22a0);
}

#[test]
fn fourth_order_parts_are_even() {
    use TwoChannelTerm::*;
    for term in [V22A, V22B, V22C, V13A, V13B, V04C] {
        let (a, b) = (unscaled(term, 0.21), unscaled(term, -0.21));
        assert!(
            (a - b).abs() <= 1e-6 * a.abs(),
            "{}: {a} vs {b}",
            term.label()
        );
    }
}

#[test]
fn zero_delay_reductions() {
    let sq = integral_s2sq(ctx(), &cfg()).unwrap().value;
    let s31 = integral_s3s1(ctx(), &cfg()).unwrap().value;
    let a = unscaled(TwoChannelTerm::V22A, 0.0);
    let b = unscaled(TwoChannelTerm::V13A, 0.0);
    assert!((a / (2.0 * sq) - 1.0).abs() < 1e-6, "{a} vs {}", 2.0 * sq);
    assert!((b / (2.0 * s31) - 1.0).abs() < 1e-6, "{b} vs {}", 2.0 * s31);
}

#[test]
fn v13_is_negative_and_decays() {
    let t = full_trace();
    let v22 = t.term(TwoChannelTerm::V22A).unwrap();
    for part in [TwoChannelTerm::V13A, TwoChannelTerm::V13B] {
        let v = t.term(part).unwrap();
        assert!(v[0] < 0.0 && v22[0] > 0.0);
        let last = *v.last().unwrap();
        assert!(
            last.abs() < 0.05 * v[0].abs(),
            "{}: {last} vs {}",
            part.label(),
            v[0]
        );
    }
}

#[test]
fn v04c_is_the_surviving_v04_part() {
    let t = full_trace();
    let v = t.term(TwoChannelTerm::V04C).unwrap();
    assert!(v[0].abs() > 0.1 * t.term(TwoChannelTerm::V22A).unwrap()[0]);
    let (a, b) = (
        unscaled(TwoChannelTerm::V04C, 0.35),
        unscaled(TwoChannelTerm::V04C, -0.35),
    );
    assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-3 * v[0].abs()));
    // decays from its zero-delay lobe
    assert!(v.last().unwrap().abs() < 0.05 * v[0].abs());
}

#[test]
fn photon_number_scaling() {
    let (n, tau) = (1e9, 150.0);
    let ctx = ctx();
    let pairs = [
        (
            g2_main(tau, n, ctx, &cfg()).unwrap(),
            g2_main(tau, 10.0 * n, ctx, &cfg()).unwrap(),
            2.0,
        ),
        (
            v22(tau, n, V22Part::B, ctx, &cfg()).unwrap(),
            v22(tau, 10.0 * n, V22Part::B, ctx, &cfg()).unwrap(),
            3.0,
        ),
        (
            v13(tau, n, V13Part::A, ctx, &cfg()).unwrap(),
            v13(tau, 10.0 * n, V13Part::A, ctx, &cfg()).unwrap(),
            3.0,
        ),
        (
            v04(tau, n, V22Part::C, ctx, &cfg()).unwrap(),
            v04(tau, 10.0 * n, V22Part::C, ctx, &cfg()).unwrap(),
            3.0,
        ),
    ];
    for (lo, hi, e) in pairs {
        assert!(((hi / lo).log10() - e).abs() < 1e-3);
    }
    for t in TwoChannelTerm::ALL {
        assert_eq!(t.exponent(), if t.is_second_order() { 2 } else { 3 });
    }
}

#[test]
fn order_ratio_depends_on_photon_number() {
    let high = full_trace().order_ratio();
    assert!((0.1..10.0).contains(&high), "{high}");
    let low = trace_at(1e8, tau_grid(2000.0, 11), &TwoChannelTerm::ALL).order_ratio();
    assert!(low <= 1e-2, "{low}");
}

#[test]
fn traces_are_real() {
    let t = full_trace();
    for term in TwoChannelTerm::ALL {
        assert!(t.imag_residue(term) < 1e-10, "{}", term.label());
    }
    assert!(t.converged.iter().all(|&c| c));
}

#[test]
fn catalog_has_no_shot_noise_product() {
    assert_eq!(TwoChannelTerm::ALL.len(), 10);
    assert!(TwoChannelTerm::ALL
        .iter()
        .all(|t| !t.label().contains("s0") && t.exponent() >= 2));
    let t = full_trace();
    let big = t.big_g();
    for (i, &g) in t.g().iter().enumerate() {
        assert_eq!(g, t.g_total_2nd[i] + t.g_total_4th[i]);
        assert_eq!(big[i], g / t.normalization);
    }
}

#[test]
fn oscillation_period_tracks_the_mean_probed_frequency() {
    let t = trace_at(1e11, tau_grid(2000.0, 201), &[TwoChannelTerm::Main2]);
    let z = zero_crossings(&t.tau_fs, t.term(TwoChannelTerm::Main2).unwrap());
    let period = 4.0 * z[0];
    let wm = mean_probed_frequency(ctx(), &cfg()).unwrap();
    let expect = 2.0 * PI / wm * 1e3;
    assert!((period / expect - 1.0).abs() < 0.1, "{period} vs {expect}");
}

#[test]
fn sawtooth_cross_term_matches_midpoint_oracle() {
    let mut p = ParameterSet::set2().with_absorption(false);
    let (lo, hi) = p.probe.support();
    let nu: Vec<f64> = (0..41)
        .map(|k| (lo + (hi - lo) * k as f64 / 40.0) / (2.0 * PI))
        .collect();
    let amp: Vec<f64> = (0..41).map(|k| 0.2 + (k % 10) as f64 / 10.0).collect();
    p.probe = ProbeSpectrum::tabulated(TabulatedSpectrum::new(nu, amp).unwrap(), 1e11).unwrap();
    let ctx = KernelContext::new(p.clone()).unwrap();
    let loose = QuadratureConfig::default().with_rel_tol(1e-6);
    let tau = 0.12;
    let got = term_integral(TwoChannelTerm::Cross2, &ctx, tau, &loose, None)
        .unwrap()
        .0
        .value
        .re;
    let [_, band_hi] = ctx.band();
    let (wp, n) = (ctx.omega_p(), p.crystal.n);
    let norm = ctx.d() * ctx.half_l_over_c0() * wp / n;
    let cells = 20_000;
    let h = 2.0 * band_hi / cells as f64;
    let oracle: f64 = (0..cells)
        .map(|k| {
            let w = -band_hi + (k as f64 + 0.5) * h;
            let z = Complex64::new(0.0, 1.0) * ctx.zeta(wp, w).unwrap() / norm;
            let d = z * ctx.probe_overlap(w, Sign::Minus) * ctx.gating_r(w).unwrap().conj();
            d.re * w * n / ctx.refractive_index(w).unwrap() * (w * tau).cos()
        })
        .sum::<f64>()
        * h
        * (-2.0 / 3f64.sqrt());
    let main = 2.0 * integral_s1(&ctx, &loose).unwrap().value;
    assert!((got - oracle).abs() <= 1e-6 * main, "{got} vs {oracle}");
}
