//! Single-channel signal-variance contributions, the shot-noise/back-action
//! crossover and the beam-waist sweep.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{KernelContext, KernelIndex, Sign};
use crate::mir::{self, PlaneDomain};
use crate::params::PhysicalConstants;
use crate::quad::{try_integrate_1d_breaks, IntegralResult, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    S0S0,
    S1S1,
    S2S0,
    S2SQ,
    S3S1,
    S4S0,
    Chi3,
}

impl Term {
    pub const ALL: [Term; 7] = [
        Term::S0S0,
        Term::S1S1,
        Term::S2S0,
        Term::S2SQ,
        Term::S3S1,
        Term::S4S0,
        Term::Chi3,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Term::S0S0 => "S0S0",
            Term::S1S1 => "S1S1",
            Term::S2S0 => "S2S0",
            Term::S2SQ => "S2SQ",
            Term::S3S1 => "S3S1",
            Term::S4S0 => "S4S0",
            Term::Chi3 => "CHI3",
        }
    }

    /// Power of N multiplying the term.
    pub fn exponent(&self) -> i32 {
        match self {
            Term::S0S0 => 1,
            Term::S1S1 | Term::S2S0 => 2,
            _ => 3,
        }
    }
}

/// Third-order susceptibility X = χ_xxzz + χ_xzxz + χ_xzzx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi3Params {
    /// m²/V²
    pub x: f64,
    pub enabled: bool,
}

impl Chi3Params {
    /// Literature-scale value for ZnTe-like crystals (all three components equal).
    pub const LITERATURE_X: f64 = 5.0e-20;
}

impl Default for Chi3Params {
    fn default() -> Self {
        Chi3Params {
            x: Self::LITERATURE_X,
            enabled: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceBreakdown {
    pub n: f64,
    pub terms: BTreeMap<Term, f64>,
    pub total: f64,
    pub rms_per_photon: f64,
}

impl VarianceBreakdown {
    pub fn get(&self, t: Term) -> f64 {
        self.terms.get(&t).copied().unwrap_or(0.0)
    }

    /// √var/N of one term (zero for negative terms).
    pub fn rms_of(&self, t: Term) -> f64 {
        self.get(t).max(0.0).sqrt() / self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BreakdownOptions {
    pub chi3: Chi3Params,
    pub chi3_in_total: bool,
}

/// Shot-noise variance N.
pub fn var_base_shot(n: f64) -> f64 {
    n
}

/// Term integral with the C_j prefactor removed (for CHI3, the prefactor at
/// X = 1 m²/V² and N = 1 is kept, see [`chi3_prefactor`]).
pub fn term_integral(
    term: Term,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    match term {
        Term::S0S0 => Ok(IntegralResult {
            value: 1.0,
            ..IntegralResult::zero()
        }),
        Term::S1S1 => integral_s1(ctx, cfg),
        Term::S2S0 => integral_s2s0(ctx, cfg),
        Term::S2SQ => integral_s2sq(ctx, cfg),
        Term::S3S1 => integral_s3s1(ctx, cfg),
        Term::S4S0 => integral_s4s0(ctx, cfg),
        Term::Chi3 => integral_chi3(ctx, cfg),
    }
}

/// ∫₀^∞ dΩ Ω (n/n_Ω)|R(Ω)|².
pub fn integral_s1(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<IntegralResult<f64>> {
    let n = ctx.params().crystal.n;
    Ok(mir::one_sided(ctx, cfg, |w| {
        let r = ctx.gating_r(w)?;
        if r.norm_sqr() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(Complex64::new(
            w * n / ctx.refractive_index(w)? * r.norm_sqr(),
            0.0,
        ))
    })?
    .re())
}

/// iζ_{ω,Ω}/(dLω/2c0n), which reduces to the phase-matching factor.
fn zeta_reduced(ctx: &KernelContext, w: f64) -> Result<Complex64> {
    let wp = ctx.omega_p();
    let norm = ctx.d() * ctx.half_l_over_c0() * wp / ctx.params().crystal.n;
    Ok(Complex64::new(0.0, 1.0) * ctx.zeta(wp, w)? / norm)
}

/// Integrand of the SN × Ŝ⁽²⁾ crossterm, shared with its two-channel analogue.
pub(crate) fn crossterm_density(ctx: &KernelContext, w: f64) -> Result<Complex64> {
    let r = ctx.gating_r(w)?;
    if r.norm_sqr() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = ctx.params().crystal.n;
    let f_minus = ctx.probe_overlap(w, Sign::Minus);
    Ok(zeta_reduced(ctx, w)? * f_minus * r.conj() * (w * n / ctx.refractive_index(w)?))
}

/// −(2/√3)∫dΩ Ω(n/n_Ω)[iζ f₋ R*/(dLω/2c0n)], real part.
pub fn integral_s2s0(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<IntegralResult<f64>> {
    let r = mir::two_sided(ctx, cfg, |w| crossterm_density(ctx, w))?;
    Ok(r.scale(-2.0 / 3f64.sqrt()).re())
}

/// Per-point factors shared by the 4th-order integrands.
pub(crate) struct PointFactors {
    /// P*(Ω)P(Ω′)/ω_p
    pub pp: Complex64,
}

pub(crate) fn point_factors(ctx: &KernelContext, w: f64, w2: f64) -> Result<PointFactors> {
    Ok(PointFactors {
        pp: ctx.phase_matching(w)?.conj() * ctx.phase_matching(w2)? / ctx.omega_p(),
    })
}

fn r0(ctx: &KernelContext, w: f64, s: Sign) -> Result<Complex64> {
    ctx.rgate(w, KernelIndex::Zero, 0.0, 0.0, s)
}

fn w0(ctx: &KernelContext, w: f64, w2: f64, s: Sign) -> Complex64 {
    ctx.wgate(w, w2, KernelIndex::Zero, 0.0, 0.0, s)
}

/// (1/3)Σ_t ∬ ΩΩ′ R*(Ω′) G₀₀^{(t,+)}(Ω, Ω′, 0, 0, 0).
pub fn integral_s2sq(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<IntegralResult<f64>> {
    let (r, _) = mir::plane(ctx, cfg, PlaneDomain::Full, None, |w, w2| {
        let wp = w0(ctx, w, w2, Sign::Plus);
        if wp.re == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let rp = ctx.gating_r(w2)?.conj();
        let pf = point_factors(ctx, w, w2)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in Sign::ALL {
            acc += r0(ctx, w, t)? * wp;
        }
        Ok(acc * pf.pp * rp * (w * w2 / 3.0))
    })?;
    Ok(r.re())
}

/// −(1/√2)Σ_{t,s} ∬_{Ω′≥0} ΩΩ′ R*(Ω′) G₀₀^{(t,s)}(Ω, Ω′, 0, 0, 0)(n/n_{Ω′}).
pub fn integral_s3s1(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<IntegralResult<f64>> {
    let n = ctx.params().crystal.n;
    let (r, _) = mir::plane(ctx, cfg, PlaneDomain::PrimeNonnegative, None, |w, w2| {
        let wsum = w0(ctx, w, w2, Sign::Plus) + w0(ctx, w, w2, Sign::Minus);
        if wsum.re == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let rp = ctx.gating_r(w2)?.conj();
        let pf = point_factors(ctx, w, w2)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in Sign::ALL {
            let rt = r0(ctx, w, t)?;
            for s in Sign::ALL {
                acc += rt * w0(ctx, w, w2, s);
            }
        }
        Ok(acc * pf.pp * rp * (-w * w2 / SQRT_2 * n / ctx.refractive_index(w2)?))
    })?;
    Ok(r.re())
}

/// (1/√5)Σ_{t,s} ∬ ΩΩ′ R₀^{(+)*}(Ω′) G₀₀^{(t,s)}(Ω, Ω′, 0, 0, 0).
pub fn integral_s4s0(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<IntegralResult<f64>> {
    let (r, _) = mir::plane(ctx, cfg, PlaneDomain::Full, None, |w, w2| {
        let rp = r0(ctx, w2, Sign::Plus)?.conj();
        if rp.norm_sqr() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let pf = point_factors(ctx, w, w2)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in Sign::ALL {
            let rt = r0(ctx, w, t)?;
            for s in Sign::ALL {
                acc += rt * w0(ctx, w, w2, s);
            }
        }
        Ok(acc * pf.pp * rp * (w * w2 / 5f64.sqrt()))
    })?;
    Ok(r.re())
}

/// (4/3)(Lω_p/(nc0))²(ℏ/(4π²ε0c0nw0²))² in ps⁴ per (m²/V²)².
pub fn chi3_prefactor(ctx: &KernelContext) -> f64 {
    let pc = PhysicalConstants::CODATA;
    let c = &ctx.params().crystal;
    let l = c.length_um * 1e-6;
    let w0 = c.w0_um * 1e-6;
    let wp = ctx.omega_p() * 1e12;
    let a = l * wp / (c.n * pc.c0);
    let vac = pc.hbar / (4.0 * PI * PI * pc.eps0 * pc.c0 * c.n * w0 * w0);
    4.0 / 3.0 * a * a * vac * vac * 1e48
}

/// chi3_prefactor × ∭dω dω′ dω″ (n/n_{ω′}) ω′ F(ω′−ω) F*(ω′−ω″) α*(ω) α(ω″)/β,
/// evaluated as ∫dω′ ω′ |h(ω′)|²/β with h(ω′) = ∫dω F(ω′−ω) α(ω) and n_{ω′} = n
/// in the NIR.
pub fn integral_chi3(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<IntegralResult<f64>> {
    let probe = &ctx.params().probe;
    let (a, b) = probe.support();
    let d = ctx.overlap_support();
    let beta = probe.beta();
    let inner_cfg = cfg.with_rel_tol(cfg.rel_tol * 1e-2);
    let h = |wp: f64| -> Result<f64> {
        let mut breaks: Vec<f64> = [a, b, wp, wp - d, wp + d]
            .into_iter()
            .filter(|&x| x >= a && x <= b)
            .collect();
        breaks.sort_unstable_by(|x, y| x.total_cmp(y));
        breaks.dedup();
        Ok(try_integrate_1d_breaks(
            |w| Ok(ctx.big_f(wp - w).re * probe.amplitude(w)),
            &breaks,
            &inner_cfg,
        )?
        .value)
    };
    let lo = (a - d).max(0.0);
    let hi = b + d;
    let mut breaks: Vec<f64> = [lo, a, b, a + d, b - d, hi]
        .into_iter()
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    breaks.sort_unstable_by(|x, y| x.total_cmp(y));
    breaks.dedup();
    let r = try_integrate_1d_breaks(
        |wp| {
            let hv = h(wp)?;
            Ok(wp * hv * hv / beta)
        },
        &breaks,
        cfg,
    )?;
    Ok(r.scale(chi3_prefactor(ctx)))
}

/// N-independent integrals from which every term at any N follows.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub integrals: BTreeMap<Term, IntegralResult<f64>>,
    /// C₁/N² in ps²
    pub k: f64,
}

impl Coefficients {
    pub fn compute(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<Self> {
        Self::compute_terms(ctx, cfg, &Term::ALL)
    }

    pub fn compute_terms(
        ctx: &KernelContext,
        cfg: &QuadratureConfig,
        terms: &[Term],
    ) -> Result<Self> {
        let mut integrals = BTreeMap::new();
        for &t in terms {
            integrals.insert(t, term_integral(t, ctx, cfg)?);
        }
        Ok(Self::from_integrals(ctx, integrals))
    }

    pub fn from_integrals(
        ctx: &KernelContext,
        integrals: BTreeMap<Term, IntegralResult<f64>>,
    ) -> Self {
        Coefficients {
            integrals,
            k: ctx.coupling_k(),
        }
    }

    /// Same integrals for another beam waist: only the C_j and the χ⁽³⁾
    /// prefactor carry w0 (as w0⁻² and w0⁻⁴).
    pub fn rescaled_waist(&self, w0_from: f64, w0_to: f64) -> Self {
        let r2 = (w0_from / w0_to).powi(2);
        let mut integrals = self.integrals.clone();
        if let Some(c) = integrals.get_mut(&Term::Chi3) {
            *c = c.scale(r2 * r2);
        }
        Coefficients {
            integrals,
            k: self.k * r2,
        }
    }

    /// Multiplier turning the stored integral into the variance at N.
    pub fn scale(&self, term: Term, n: f64, chi3: &Chi3Params) -> f64 {
        match term {
            Term::S0S0 => n,
            Term::S1S1 | Term::S2S0 => n * n * self.k,
            Term::Chi3 => {
                if chi3.enabled {
                    n * n * n * chi3.x * chi3.x
                } else {
                    0.0
                }
            }
            _ => n * n * n * self.k * self.k,
        }
    }

    pub fn term(&self, term: Term, n: f64, chi3: &Chi3Params) -> Option<IntegralResult<f64>> {
        self.integrals
            .get(&term)
            .map(|r| r.scale(self.scale(term, n, chi3)))
    }

    pub fn breakdown(&self, n: f64, opts: &BreakdownOptions) -> Result<VarianceBreakdown> {
        if !(n > 0.0) {
            return Err(Error::invalid("N", "photon number must be positive"));
        }
        let mut terms = BTreeMap::new();
        let mut total = 0.0;
        for (&t, r) in &self.integrals {
            let v = r.value * self.scale(t, n, &opts.chi3);
            if t != Term::Chi3 || opts.chi3_in_total {
                total += v;
            }
            terms.insert(t, v);
        }
        if !(total > 0.0) {
            return Err(Error::invalid(
                "N",
                "total variance is not positive; perturbation series has broken down",
            ));
        }
        Ok(VarianceBreakdown {
            n,
            terms,
            total,
            rms_per_photon: total.sqrt() / n,
        })
    }
}

fn single_term(
    term: Term,
    n: f64,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
    chi3: &Chi3Params,
) -> Result<IntegralResult<f64>> {
    let c = Coefficients::compute_terms(ctx, cfg, &[term])?;
    Ok(c.term(term, n, chi3).expect("term was computed"))
}

pub fn var_s1(n: f64, ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<IntegralResult<f64>> {
    single_term(Term::S1S1, n, ctx, cfg, &Chi3Params::default())
}

pub fn var_s2_s0(
    n: f64,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    single_term(Term::S2S0, n, ctx, cfg, &Chi3Params::default())
}

pub fn var_s2_sq(
    n: f64,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    single_term(Term::S2SQ, n, ctx, cfg, &Chi3Params::default())
}

pub fn var_s3_s1(
    n: f64,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    single_term(Term::S3S1, n, ctx, cfg, &Chi3Params::default())
}

pub fn var_s4_s0(
    n: f64,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    single_term(Term::S4S0, n, ctx, cfg, &Chi3Params::default())
}

pub fn var_chi3(
    n: f64,
    chi3: &Chi3Params,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<f64>> {
    if !chi3.enabled {
        return Ok(IntegralResult::zero());
    }
    single_term(Term::Chi3, n, ctx, cfg, chi3)
}

pub fn breakdown(
    n: f64,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
    opts: &BreakdownOptions,
) -> Result<VarianceBreakdown> {
    Coefficients::compute(ctx, cfg)?.breakdown(n, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NminResult {
    pub n_min: f64,
    pub rms_per_photon: f64,
    /// Bound on |ΔN_min| from the search tolerance and the quadrature errors.
    pub error_estimate: f64,
    pub breakdown: VarianceBreakdown,
}

/// Relative tolerance of the golden-section search in N.
pub const NMIN_REL_TOL: f64 = 1e-3;

/// Golden-section minimum of `g` over log N on the bracket, after checking
/// unimodality on a log-spaced sample.
pub fn golden_min_log(
    mut g: impl FnMut(f64) -> Result<f64>,
    bracket: [f64; 2],
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let [n_lo, n_hi] = bracket;
    if !(n_lo > 0.0 && n_hi > n_lo) {
        return Err(Error::invalid("bracket", "needs 0 < N_lo < N_hi"));
    }
    let (a0, b0) = (n_lo.ln(), n_hi.ln());
    let samples: Vec<(f64, f64)> = (0..=40)
        .map(|k| {
            let n = (a0 + (b0 - a0) * k as f64 / 40.0).exp();
            g(n).map(|v| (n, v))
        })
        .collect::<Result<_>>()?;
    let mut rising = false;
    for w in samples.windows(2) {
        let dv = w[1].1 - w[0].1;
        if dv > 1e-12 * w[0].1.abs() {
            rising = true;
        } else if rising && dv < -1e-12 * w[0].1.abs() {
            return Err(Error::NotUnimodal { samples });
        }
    }
    let imin = samples
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if imin == 0 || imin == samples.len() - 1 {
        return Err(Error::NotUnimodal { samples });
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a0, b0);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (g(c.exp())?, g(d.exp())?);
    let tol = (1.0 + rel_tol).ln();
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = g(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = g(d.exp())?;
        }
    }
    let x = (0.5 * (a + b)).exp();
    Ok((x, g(x)?))
}

impl Coefficients {
    /// Golden-section N_min of the rms signal per photon.
    pub fn find_nmin(&self, bracket: [f64; 2], opts: &BreakdownOptions) -> Result<NminResult> {
        let (n_min, rms) = golden_min_log(
            |n| Ok(self.breakdown(n, opts)?.rms_per_photon),
            bracket,
            NMIN_REL_TOL,
        )?;
        // var ≈ N + aN² + bN³ near the minimum; N_min ∝ b^{-1/2}
        let b_term: f64 = [Term::S2SQ, Term::S3S1, Term::S4S0]
            .iter()
            .filter_map(|t| self.integrals.get(t))
            .map(|r| r.value)
            .sum();
        let b_err: f64 = [Term::S2SQ, Term::S3S1, Term::S4S0]
            .iter()
            .filter_map(|t| self.integrals.get(t))
            .map(|r| r.error_estimate)
            .sum();
        let rel = NMIN_REL_TOL + 0.5 * b_err / b_term.abs().max(f64::MIN_POSITIVE);
        Ok(NminResult {
            n_min,
            rms_per_photon: rms,
            error_estimate: rel * n_min,
            breakdown: self.breakdown(n_min, opts)?,
        })
    }
}

pub fn find_nmin(
    ctx: &KernelContext,
    bracket: [f64; 2],
    cfg: &QuadratureConfig,
    opts: &BreakdownOptions,
) -> Result<NminResult> {
    let terms = [
        Term::S0S0,
        Term::S1S1,
        Term::S2S0,
        Term::S2SQ,
        Term::S3S1,
        Term::S4S0,
    ];
    Coefficients::compute_terms(ctx, cfg, &terms)?.find_nmin(bracket, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaistRow {
    pub w0_um: f64,
    pub l_over_w0: f64,
    pub n_min: f64,
    pub rms_total: f64,
    pub rms_sn: f64,
    pub rms_s1: f64,
}

/// Default N bracket for the crossover search.
pub const NMIN_BRACKET: [f64; 2] = [1e6, 1e16];

/// N_min and the rms contributions there for each waist; the integrals do
/// not depend on w0, so they are computed once and the C_j are rescaled.
pub fn waist_sweep(
    ctx: &KernelContext,
    w0_grid: &[f64],
    cfg: &QuadratureConfig,
    opts: &BreakdownOptions,
) -> Result<Vec<WaistRow>> {
    if w0_grid.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::invalid("w0_grid", "waists must be positive"));
    }
    let terms = [
        Term::S0S0,
        Term::S1S1,
        Term::S2S0,
        Term::S2SQ,
        Term::S3S1,
        Term::S4S0,
    ];
    let base = Coefficients::compute_terms(ctx, cfg, &terms)?;
    waist_sweep_from(ctx, &base, w0_grid, opts)
}

pub fn waist_sweep_from(
    ctx: &KernelContext,
    base: &Coefficients,
    w0_grid: &[f64],
    opts: &BreakdownOptions,
) -> Result<Vec<WaistRow>> {
    let w_ref = ctx.params().crystal.w0_um;
    let l = ctx.params().crystal.length_um;
    w0_grid
        .iter()
        .map(|&w0| {
            let c = base.rescaled_waist(w_ref, w0);
            let m = c.find_nmin(NMIN_BRACKET, opts)?;
            Ok(WaistRow {
                w0_um: w0,
                l_over_w0: l / w0,
                n_min: m.n_min,
                rms_total: m.rms_per_photon,
                rms_sn: m.breakdown.rms_of(Term::S0S0),
                rms_s1: m.breakdown.rms_of(Term::S1S1),
            })
        })
        .collect()
}
