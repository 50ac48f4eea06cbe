//! Delay-dependent correlation of two probe channels sampling the same MIR
//! vacuum behind an ideal 50:50 beam splitter.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{KernelContext, KernelIndex, Sign};
use crate::mir::{self, PlaneDomain};
use crate::params::{ParameterSet, PhysicalConstants};
use crate::quad::{IntegralResult, QuadratureConfig, Rect};
use crate::single_channel::crossterm_density;
use KernelIndex::{Cos as K1, Sin as K2, Zero as K0};
use Sign::Plus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TwoChannelTerm {
    Main2,
    Cross2,
    V22A,
    V22B,
    V22C,
    V13A,
    V13B,
    V04A,
    V04B,
    V04C,
}

impl TwoChannelTerm {
    pub const ALL: [TwoChannelTerm; 10] = [
        TwoChannelTerm::Main2,
        TwoChannelTerm::Cross2,
        TwoChannelTerm::V22A,
        TwoChannelTerm::V22B,
        TwoChannelTerm::V22C,
        TwoChannelTerm::V13A,
        TwoChannelTerm::V13B,
        TwoChannelTerm::V04A,
        TwoChannelTerm::V04B,
        TwoChannelTerm::V04C,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            TwoChannelTerm::Main2 => "main2",
            TwoChannelTerm::Cross2 => "cross2",
            TwoChannelTerm::V22A => "v22a",
            TwoChannelTerm::V22B => "v22b",
            TwoChannelTerm::V22C => "v22c",
            TwoChannelTerm::V13A => "v13a",
            TwoChannelTerm::V13B => "v13b",
            TwoChannelTerm::V04A => "v04a",
            TwoChannelTerm::V04B => "v04b",
            TwoChannelTerm::V04C => "v04c",
        }
    }

    pub fn is_second_order(&self) -> bool {
        matches!(self, TwoChannelTerm::Main2 | TwoChannelTerm::Cross2)
    }

    pub fn exponent(&self) -> i32 {
        if self.is_second_order() {
            2
        } else {
            3
        }
    }

    fn domain(&self) -> PlaneDomain {
        match self {
            TwoChannelTerm::V13A | TwoChannelTerm::V13B => PlaneDomain::PrimeNonnegative,
            _ => PlaneDomain::Full,
        }
    }
}

/// Lossless splitter with amplitude coefficients t, r (primed for the other input).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    pub t: Complex64,
    pub r: Complex64,
    pub t2: Complex64,
    pub r2: Complex64,
}

impl BeamSplitter {
    pub fn ideal() -> Self {
        let h = 1.0 / SQRT_2;
        BeamSplitter {
            t: Complex64::new(h, 0.0),
            r: Complex64::new(0.0, h),
            t2: Complex64::new(h, 0.0),
            r2: Complex64::new(0.0, h),
        }
    }

    /// |t|² + |r|² − 1 and |t r* + r′ t′*|, both zero when lossless.
    pub fn unitarity_defect(&self) -> (f64, f64) {
        (
            self.t.norm_sqr() + self.r.norm_sqr() - 1.0,
            (self.t * self.r.conj() + self.r2 * self.t2.conj()).norm(),
        )
    }
}

/// How the per-channel photon number relates to the configured N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhotonConvention {
    /// each output channel carries N, as in the single-channel runs
    #[default]
    PerChannel,
    /// N is the number before the splitter; each channel carries N/2
    PreSplitter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoChannelConfig {
    pub splitter: BeamSplitter,
    pub photons: f64,
    pub convention: PhotonConvention,
    pub tau_fs: Vec<f64>,
    pub terms: BTreeSet<TwoChannelTerm>,
    pub absorption: bool,
}

impl TwoChannelConfig {
    /// 0 to 2000 fs, 400 points, all terms, no absorption.
    pub fn new(photons: f64) -> Self {
        TwoChannelConfig {
            splitter: BeamSplitter::ideal(),
            photons,
            convention: PhotonConvention::PerChannel,
            tau_fs: tau_grid(2000.0, 400),
            terms: TwoChannelTerm::ALL.into_iter().collect(),
            absorption: false,
        }
    }

    pub fn channel_photons(&self) -> f64 {
        match self.convention {
            PhotonConvention::PerChannel => self.photons,
            PhotonConvention::PreSplitter => 0.5 * self.photons,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.photons > 0.0 && self.photons.is_finite()) {
            return Err(Error::invalid("photons", "must be positive and finite"));
        }
        if self.tau_fs.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("tau_fs", "delays must be finite"));
        }
        let (a, b) = self.splitter.unitarity_defect();
        if a.abs() > 1e-12 || b > 1e-12 {
            return Err(Error::invalid("splitter", "beam splitter is not lossless"));
        }
        Ok(())
    }
}

/// `points` delays evenly spaced on [0, max] in fs.
pub fn tau_grid(max_fs: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..points)
            .map(|k| max_fs * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn rz(ctx: &KernelContext, w: f64, s: Sign) -> Result<Complex64> {
    ctx.rgate(w, KernelIndex::Zero, 0.0, 0.0, s)
}

fn g(
    ctx: &KernelContext,
    w: f64,
    w2: f64,
    ij: (KernelIndex, KernelIndex),
    xy: (f64, f64),
    tau: f64,
    s: (Sign, Sign),
) -> Result<Complex64> {
    ctx.ggate(w, w2, ij.0, ij.1, xy.0, xy.1, tau, s.0, s.1)
}

/// Integrand of a 4th-order term without C₂; `tau` in ps.
fn v_integrand(
    term: TwoChannelTerm,
    ctx: &KernelContext,
    w: f64,
    w2: f64,
    tau: f64,
) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let ww = w * w2;
    let cc = (w * tau).cos() + (w2 * tau).cos();
    let n_ratio = || -> Result<f64> { Ok(ctx.params().crystal.n / ctx.refractive_index(w2)?) };
    let v = match term {
        TwoChannelTerm::V22A => {
            let r = ctx.gating_r(w2)?.conj();
            if r == zero {
                return Ok(zero);
            }
            let mut acc = zero;
            for t in Sign::ALL {
                acc += g(ctx, w, w2, (K0, K0), (0.0, 0.0), 0.0, (t, Plus))?;
            }
            r * acc * (ww * cc / 3.0)
        }
        TwoChannelTerm::V22B => {
            let r = ctx.gating_r(w2)?.conj();
            if r == zero {
                return Ok(zero);
            }
            let gb = g(ctx, w, w2, (K1, K1), (w2, 0.0), tau, (Plus, Plus))?
                + g(ctx, w, w2, (K2, K2), (w2, 0.0), tau, (Plus, Plus))?;
            r * gb * (ww / 3.0)
        }
        TwoChannelTerm::V22C => {
            let r1 = ctx.rgate(w2, K1, w, tau, Plus)?.conj();
            let r2 = ctx.rgate(w2, K2, w, tau, Plus)?.conj();
            let mut acc = zero;
            for s in Sign::ALL {
                acc += r1 * g(ctx, w, w2, (K0, K1), (0.0, 0.0), tau, (s, Plus))?
                    + r2 * g(ctx, w, w2, (K0, K2), (0.0, 0.0), tau, (s, Plus))?;
            }
            acc * (ww / 3.0)
        }
        TwoChannelTerm::V13A => {
            let r = ctx.gating_r(w2)?.conj();
            if r == zero {
                return Ok(zero);
            }
            let mut acc = zero;
            for t in Sign::ALL {
                for s in Sign::ALL {
                    acc += g(ctx, w, w2, (K0, K0), (0.0, 0.0), 0.0, (t, s))?;
                }
            }
            r * acc * (-ww * cc / SQRT_2 * n_ratio()?)
        }
        TwoChannelTerm::V13B => {
            let r = ctx.gating_r(w2)?.conj();
            if r == zero {
                return Ok(zero);
            }
            let mut acc = zero;
            for t in Sign::ALL {
                acc += g(ctx, w, w2, (K1, K1), (w2, 0.0), tau, (t, t))?
                    + g(ctx, w, w2, (K2, K2), (w2, 0.0), tau, (t, t))?;
            }
            r * acc * (-ww / SQRT_2 * n_ratio()?)
        }
        TwoChannelTerm::V04A => {
            let r = rz(ctx, w2, Plus)?.conj();
            if r == zero {
                return Ok(zero);
            }
            let mut acc = zero;
            for t in Sign::ALL {
                for s in Sign::ALL {
                    acc += g(ctx, w, w2, (K0, K0), (0.0, 0.0), 0.0, (t, s))?;
                }
            }
            r * acc * (ww * cc / 5f64.sqrt())
        }
        TwoChannelTerm::V04B => {
            let r = rz(ctx, w2, Plus)?.conj();
            if r == zero {
                return Ok(zero);
            }
            let mut acc = zero;
            for t in Sign::ALL {
                acc += g(ctx, w, w2, (K1, K1), (w2, 0.0), tau, (t, t))?
                    + g(ctx, w, w2, (K2, K2), (w2, 0.0), tau, (t, t))?;
            }
            r * acc * (ww / 5f64.sqrt())
        }
        TwoChannelTerm::V04C => {
            let r1 = ctx.rgate(w2, K1, w, tau, Plus)?.conj();
            let r2 = ctx.rgate(w2, K2, w, tau, Plus)?.conj();
            let mut acc = zero;
            for t in Sign::ALL {
                acc += r1 * g(ctx, w, w2, (K0, K1), (0.0, 0.0), tau, (t, Plus))?
                    + r2 * g(ctx, w, w2, (K0, K2), (0.0, 0.0), tau, (t, Plus))?;
            }
            acc * (ww / 5f64.sqrt())
        }
        TwoChannelTerm::Main2 | TwoChannelTerm::Cross2 => {
            return Err(Error::Contract(
                "second-order terms are one-dimensional".into(),
            ))
        }
    };
    Ok(v)
}

fn main_density(ctx: &KernelContext, w: f64, tau: f64) -> Result<Complex64> {
    let r = ctx.gating_r(w)?;
    if r.norm_sqr() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = ctx.params().crystal.n;
    // even in Ω: each mode contributes with its positive frequency
    Ok(Complex64::new(
        w.abs() * n / ctx.refractive_index(w)? * r.norm_sqr() * (w * tau).cos(),
        0.0,
    ))
}

/// Starting mesh of one term, reused across delays.
#[derive(Debug, Clone, PartialEq)]
pub enum Partition {
    Line(Vec<[f64; 2]>),
    Plane(Vec<Rect>),
}

/// Term integral without the C_j prefactor at delay `tau_ps`.
pub fn term_integral(
    term: TwoChannelTerm,
    ctx: &KernelContext,
    tau_ps: f64,
    cfg: &QuadratureConfig,
    start: Option<&Partition>,
) -> Result<(IntegralResult<Complex64>, Partition)> {
    match term {
        TwoChannelTerm::Main2 | TwoChannelTerm::Cross2 => {
            let p = match start {
                Some(Partition::Line(p)) => Some(p.as_slice()),
                _ => None,
            };
            let (r, part) = if term == TwoChannelTerm::Main2 {
                mir::two_sided_partitioned(ctx, cfg, p, |w| main_density(ctx, w, tau_ps))?
            } else {
                let (r, part) = mir::two_sided_partitioned(ctx, cfg, p, |w| {
                    Ok(crossterm_density(ctx, w)? * (w * tau_ps).cos())
                })?;
                (r.scale(-2.0 / 3f64.sqrt()), part)
            };
            Ok((r, Partition::Line(part)))
        }
        _ => {
            let p = match start {
                Some(Partition::Plane(p)) => Some(p.as_slice()),
                _ => None,
            };
            let (r, part) = mir::plane(ctx, cfg, term.domain(), p, |w, w2| {
                v_integrand(term, ctx, w, w2, tau_ps)
            })?;
            Ok((r, Partition::Plane(part)))
        }
    }
}

/// C₁ or C₂ for the term at per-channel photon number `n`.
pub fn term_prefactor(term: TwoChannelTerm, ctx: &KernelContext, n: f64) -> Result<f64> {
    ctx.coeff_c(if term.is_second_order() { 1 } else { 2 }, n)
}

fn scaled(
    term: TwoChannelTerm,
    ctx: &KernelContext,
    n: f64,
    tau_fs: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (r, _) = term_integral(term, ctx, tau_fs * 1e-3, cfg, None)?;
    Ok(r.value.re * term_prefactor(term, ctx, n)?)
}

/// C₁∫dΩ Ω(n/n_Ω)|R(Ω)|² cos Ωτ over both signs of Ω.
pub fn g2_main(tau_fs: f64, n: f64, ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<f64> {
    scaled(TwoChannelTerm::Main2, ctx, n, tau_fs, cfg)
}

pub fn g2_cross_nir(
    tau_fs: f64,
    n: f64,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    scaled(TwoChannelTerm::Cross2, ctx, n, tau_fs, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum V22Part {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum V13Part {
    A,
    B,
}

pub fn v22(
    tau_fs: f64,
    n: f64,
    part: V22Part,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let term = match part {
        V22Part::A => TwoChannelTerm::V22A,
        V22Part::B => TwoChannelTerm::V22B,
        V22Part::C => TwoChannelTerm::V22C,
    };
    scaled(term, ctx, n, tau_fs, cfg)
}

pub fn v13(
    tau_fs: f64,
    n: f64,
    part: V13Part,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let term = match part {
        V13Part::A => TwoChannelTerm::V13A,
        V13Part::B => TwoChannelTerm::V13B,
    };
    scaled(term, ctx, n, tau_fs, cfg)
}

pub fn v04(
    tau_fs: f64,
    n: f64,
    part: V22Part,
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let term = match part {
        V22Part::A => TwoChannelTerm::V04A,
        V22Part::B => TwoChannelTerm::V04B,
        V22Part::C => TwoChannelTerm::V04C,
    };
    scaled(term, ctx, n, tau_fs, cfg)
}

/// Per-term values at one delay.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub tau_fs: f64,
    pub terms: BTreeMap<TwoChannelTerm, IntegralResult<Complex64>>,
}

impl TracePoint {
    pub fn converged(&self) -> bool {
        self.terms.values().all(|r| r.converged)
    }
}

/// Precomputed meshes and prefactors for evaluating a trace point by point.
#[derive(Debug, Clone)]
pub struct TracePlan {
    ctx: KernelContext,
    cfg: QuadratureConfig,
    terms: Vec<TwoChannelTerm>,
    partitions: BTreeMap<TwoChannelTerm, Partition>,
    photons: f64,
}

impl TracePlan {
    /// Builds the two-channel context (absorption per `config`) and refines
    /// each term's mesh at τ = 0.
    pub fn new(
        params: &ParameterSet,
        config: &TwoChannelConfig,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        config.validate()?;
        cfg.validate()?;
        let ctx = KernelContext::new(params.with_absorption(config.absorption))?;
        let terms: Vec<_> = config.terms.iter().copied().collect();
        let mut partitions = BTreeMap::new();
        for &t in &terms {
            let (_, p) = term_integral(t, &ctx, 0.0, cfg, None)?;
            partitions.insert(t, p);
        }
        Ok(TracePlan {
            ctx,
            cfg: *cfg,
            terms,
            partitions,
            photons: config.channel_photons(),
        })
    }

    pub fn context(&self) -> &KernelContext {
        &self.ctx
    }

    pub fn photons(&self) -> f64 {
        self.photons
    }

    /// Unscaled term integrals at one delay; independent of any other point.
    pub fn point(&self, tau_fs: f64) -> Result<TracePoint> {
        let tau = tau_fs.abs() * 1e-3;
        let mut terms = BTreeMap::new();
        for &t in &self.terms {
            let (r, _) = term_integral(t, &self.ctx, tau, &self.cfg, self.partitions.get(&t))?;
            terms.insert(t, r);
        }
        Ok(TracePoint { tau_fs, terms })
    }

    pub fn assemble(&self, points: Vec<TracePoint>) -> Result<CorrelationTrace> {
        let c1 = self.ctx.coeff_c(1, self.photons)?;
        let c2 = self.ctx.coeff_c(2, self.photons)?;
        let c = normalization(self.ctx.params(), self.photons);
        let mut trace = CorrelationTrace {
            tau_fs: points.iter().map(|p| p.tau_fs).collect(),
            terms: BTreeMap::new(),
            errors: BTreeMap::new(),
            imag: BTreeMap::new(),
            normalization: c,
            g_total_2nd: alloc::vec![0.0; points.len()],
            g_total_4th: alloc::vec![0.0; points.len()],
            converged: points.iter().map(|p| p.converged()).collect(),
            photons: self.photons,
        };
        for &t in &self.terms {
            let k = if t.is_second_order() { c1 } else { c2 };
            let mut vals = Vec::with_capacity(points.len());
            let mut errs = Vec::with_capacity(points.len());
            let mut imag = Vec::with_capacity(points.len());
            for (i, p) in points.iter().enumerate() {
                let r = p
                    .terms
                    .get(&t)
                    .ok_or_else(|| Error::Contract("trace point is missing a term".into()))?;
                let v = r.value.re * k;
                vals.push(v);
                errs.push(r.error_estimate * k);
                imag.push(r.value.im * k);
                if t.is_second_order() {
                    trace.g_total_2nd[i] += v;
                } else {
                    trace.g_total_4th[i] += v;
                }
            }
            trace.terms.insert(t, vals);
            trace.errors.insert(t, errs);
            trace.imag.insert(t, imag);
        }
        Ok(trace)
    }
}

/// C = (n³Lω_p r41 N/c0)² in m²/V².
pub fn normalization(params: &ParameterSet, photons: f64) -> f64 {
    let c = &params.crystal;
    let wp = params.probe.omega_p() * 1e12;
    let v = c.n.powi(3) * c.length_um * 1e-6 * wp * c.r41_pm_per_v * 1e-12 * photons
        / PhysicalConstants::CODATA.c0;
    v * v
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace {
    pub tau_fs: Vec<f64>,
    pub terms: BTreeMap<TwoChannelTerm, Vec<f64>>,
    pub errors: BTreeMap<TwoChannelTerm, Vec<f64>>,
    /// imaginary quadrature residue, same scaling as `terms`
    pub imag: BTreeMap<TwoChannelTerm, Vec<f64>>,
    /// m²/V²
    pub normalization: f64,
    pub g_total_2nd: Vec<f64>,
    pub g_total_4th: Vec<f64>,
    pub converged: Vec<bool>,
    pub photons: f64,
}

impl CorrelationTrace {
    pub fn g(&self) -> Vec<f64> {
        self.g_total_2nd
            .iter()
            .zip(&self.g_total_4th)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// G(τ) = g(τ)/C.
    pub fn big_g(&self) -> Vec<f64> {
        self.g()
            .into_iter()
            .map(|v| v / self.normalization)
            .collect()
    }

    pub fn term(&self, t: TwoChannelTerm) -> Option<&[f64]> {
        self.terms.get(&t).map(|v| v.as_slice())
    }

    /// max|g_4th| / max|g_2nd|.
    pub fn order_ratio(&self) -> f64 {
        max_abs(&self.g_total_4th) / max_abs(&self.g_total_2nd)
    }

    /// Largest imaginary residue relative to the largest real value of the
    /// same perturbative order.
    pub fn imag_residue(&self, t: TwoChannelTerm) -> f64 {
        let scale = if t.is_second_order() {
            max_abs(&self.g_total_2nd)
        } else {
            max_abs(&self.g_total_4th)
        };
        self.imag.get(&t).map_or(0.0, |v| max_abs(v) / scale)
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Sequential evaluation of the whole trace.
pub fn correlation_trace(
    params: &ParameterSet,
    config: &TwoChannelConfig,
    cfg: &QuadratureConfig,
) -> Result<CorrelationTrace> {
    let plan = TracePlan::new(params, config, cfg)?;
    let points = config
        .tau_fs
        .iter()
        .map(|&t| plan.point(t))
        .collect::<Result<Vec<_>>>()?;
    plan.assemble(points)
}

/// Mean of Ω under the weight Ω(n/n_Ω)|R(Ω)|² on the band.
pub fn mean_probed_frequency(ctx: &KernelContext, cfg: &QuadratureConfig) -> Result<f64> {
    let n = ctx.params().crystal.n;
    let w = |w: f64, k: i32| -> Result<Complex64> {
        let r = ctx.gating_r(w)?;
        if r.norm_sqr() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(Complex64::new(
            w.powi(k) * n / ctx.refractive_index(w)? * r.norm_sqr(),
            0.0,
        ))
    };
    let m1 = mir::one_sided(ctx, cfg, |x| w(x, 1))?.value.re;
    let m2 = mir::one_sided(ctx, cfg, |x| w(x, 2))?.value.re;
    Ok(m2 / m1)
}

/// Delays (fs) where a sampled trace changes sign, linearly interpolated.
pub fn zero_crossings(tau_fs: &[f64], v: &[f64]) -> Vec<f64> {
    tau_fs
        .windows(2)
        .zip(v.windows(2))
        .filter(|(_, y)| y[0] != 0.0 && y[0].signum() != y[1].signum())
        .map(|(t, y)| t[0] + (t[1] - t[0]) * y[0] / (y[0] - y[1]))
        .collect()
}
