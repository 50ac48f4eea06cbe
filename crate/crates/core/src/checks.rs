//! Identity and symmetry checks run by the `selftest` command.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::fock::{self, ThreeModeModel};
use crate::kernels::{KernelContext, KernelIndex, Sign};
use crate::params::ParameterSet;
use crate::quad::QuadratureConfig;
use crate::single_channel::{self as sc, Term};
use crate::two_channel::{self as tc, BeamSplitter, TwoChannelTerm};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(out: &mut Vec<Check>, name: String, passed: bool, detail: String) {
    out.push(Check {
        name,
        passed,
        detail,
    });
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Runs every check; an `Err` means a computation failed outright.
pub fn run(cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    check(
        &mut out,
        "shot noise equals N".into(),
        sc::var_base_shot(1.0) == 1.0 && sc::var_base_shot(1e8) == 1e8,
        "var(1) = 1, var(1e8) = 1e8".into(),
    );
    let (a, b) = BeamSplitter::ideal().unitarity_defect();
    check(
        &mut out,
        "beam splitter lossless".into(),
        a.abs() < 1e-15 && b < 1e-15,
        format!("defects {a:e}, {b:e}"),
    );

    for params in [ParameterSet::set1(), ParameterSet::set2()] {
        let label = params.label.as_str();
        let ctx = KernelContext::new(params.clone())?;
        let p = &params.probe;
        let e = rel(p.omega_p(), p.omega_p_rectangular_closed_form());
        check(
            &mut out,
            format!("{label}: rectangular ω_p closed form"),
            e < 1e-12,
            format!("rel {e:e}"),
        );

        let [lo, hi] = ctx.band();
        let mut worst: f64 = 0.0;
        for k in 0..200 {
            let w = lo + (hi - lo) * (k as f64 + 0.5) / 200.0;
            let r = ctx.gating_r(w)?;
            let s = ctx.rgate(w, KernelIndex::Zero, 0.0, 0.0, Sign::Plus)?
                + ctx.rgate(w, KernelIndex::Zero, 0.0, 0.0, Sign::Minus)?;
            if r.norm() > 0.0 {
                worst = worst.max((s - r).norm() / r.norm());
            }
        }
        check(
            &mut out,
            format!("{label}: Σ_s R0 = R"),
            worst < 1e-10,
            format!("max rel {worst:e}"),
        );

        let c1 = ctx.coeff_c(1, 1e9)?;
        let e = rel(ctx.coeff_c(1, 2e9)?, 4.0 * c1);
        check(
            &mut out,
            format!("{label}: C1 ∝ N²"),
            e < 1e-14,
            format!("rel {e:e}"),
        );
        let wide = KernelContext::new(params.with_waist(2.0 * params.crystal.w0_um))?;
        let e = rel(wide.coeff_c(1, 1e9)?, 0.25 * c1);
        check(
            &mut out,
            format!("{label}: C1 ∝ w0⁻²"),
            e < 1e-14,
            format!("rel {e:e}"),
        );

        let co = sc::Coefficients::compute_terms(
            &ctx,
            cfg,
            &[Term::S1S1, Term::S2S0, Term::S2SQ, Term::S3S1, Term::S4S0],
        )?;
        let v = |t: Term| co.integrals[&t].value;
        let r = (v(Term::S2S0) / v(Term::S1S1)).abs();
        check(
            &mut out,
            format!("{label}: S2S0 vanishes"),
            r < 1e-8,
            format!("|S2S0/S1S1| = {r:e}"),
        );
        let r = (v(Term::S4S0) / v(Term::S2SQ)).abs();
        check(
            &mut out,
            format!("{label}: S4S0 vanishes"),
            r < 1e-8,
            format!("|S4S0/S2SQ| = {r:e}"),
        );
        check(
            &mut out,
            format!("{label}: S3S1 opposes S2SQ"),
            v(Term::S2SQ) > 0.0 && v(Term::S3S1) < 0.0,
            format!("S2SQ {:e}, S3S1 {:e}", v(Term::S2SQ), v(Term::S3S1)),
        );

        let tctx = KernelContext::new(params.with_absorption(false))?;
        let base = sc::Coefficients::compute_terms(&tctx, cfg, &[Term::S2SQ, Term::S3S1])?;
        let at = |t: TwoChannelTerm, tau: f64| -> Result<f64> {
            Ok(tc::term_integral(t, &tctx, tau, cfg, None)?.0.value.re)
        };
        let e = rel(
            at(TwoChannelTerm::V22A, 0.0)?,
            2.0 * base.integrals[&Term::S2SQ].value,
        );
        check(
            &mut out,
            format!("{label}: V22A(0) = 2·S2SQ"),
            e < 1e-6,
            format!("rel {e:e}"),
        );
        let e = rel(
            at(TwoChannelTerm::V13A, 0.0)?,
            2.0 * base.integrals[&Term::S3S1].value,
        );
        check(
            &mut out,
            format!("{label}: V13A(0) = 2·S3S1"),
            e < 1e-6,
            format!("rel {e:e}"),
        );

        let tau = 0.3;
        let m = at(TwoChannelTerm::Main2, tau)?;
        let e = rel(m, at(TwoChannelTerm::Main2, -tau)?);
        check(
            &mut out,
            format!("{label}: MAIN2 even in τ"),
            e < 1e-12,
            format!("rel {e:e}"),
        );
        let m0 = at(TwoChannelTerm::Main2, 0.0)?;
        check(
            &mut out,
            format!("{label}: |MAIN2(τ)| ≤ MAIN2(0)"),
            m.abs() <= m0,
            format!("{m:e} vs {m0:e}"),
        );
        let r = (at(TwoChannelTerm::Cross2, tau)? / m0).abs();
        check(
            &mut out,
            format!("{label}: CROSS2 vanishes"),
            r < 1e-8,
            format!("ratio {r:e}"),
        );
        let v22 = at(TwoChannelTerm::V22A, 0.0)?.abs();
        for t in [TwoChannelTerm::V04A, TwoChannelTerm::V04B] {
            let r = (at(t, tau)? / v22).abs();
            check(
                &mut out,
                format!("{label}: {} vanishes", t.label()),
                r < 1e-8,
                format!("ratio {r:e}"),
            );
        }
    }

    let c = |re: f64, im: f64| Complex64::new(re, im);
    let alpha = c(0.8, -0.3);
    let free = ThreeModeModel::single(c(0.0, 0.0), c(0.0, 0.0), alpha);
    let v = fock::perturbative_variance(&free)?;
    check(
        &mut out,
        "fock: no coupling gives |α|²".into(),
        rel(v, alpha.norm_sqr()) < 1e-12,
        format!("{v}"),
    );
    let ex = fock::exact_variance(&free)?.variance;
    check(
        &mut out,
        "fock: exact without coupling".into(),
        rel(ex, alpha.norm_sqr()) < 1e-12,
        format!("{ex}"),
    );
    let eq = ThreeModeModel::single(c(0.07, 0.0), c(0.07, 0.0), alpha);
    let v = fock::perturbative_variance(&eq)?;
    check(
        &mut out,
        "fock: real 𝒜 = 𝒞 cancels".into(),
        rel(v, alpha.norm_sqr()) < 1e-12,
        format!("{v}"),
    );
    let m =
        ThreeModeModel::single(c(0.05, 0.02), c(-0.03, 0.04), alpha).with_cutoffs(fock::Cutoffs {
            probe: 8,
            mir: 3,
            nir: 3,
        });
    let g = fock::build_generator(&m)?;
    let ah = g.add(&g.adjoint()).max_abs();
    check(
        &mut out,
        "fock: ln U anti-Hermitian".into(),
        ah < 1e-12,
        format!("max {ah:e}"),
    );
    let two = ThreeModeModel::two_channel(
        fock::Channel::new(c(0.05, 0.0), c(0.02, 0.01), c(0.5, 0.0)),
        fock::Channel::new(c(0.03, 0.01), c(0.0, 0.02), c(0.0, 0.5)),
    );
    let o = fock::two_channel_oracle(&two)?;
    check(
        &mut out,
        "fock: no base shot-noise cross term".into(),
        o.base_cross.abs() < 1e-15,
        format!("{:e}", o.base_cross),
    );
    Ok(out)
}
