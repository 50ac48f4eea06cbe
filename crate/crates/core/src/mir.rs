//! Integration over the MIR band.
//!
//! Two-sided integrals are folded onto the one-sided band [lo, hi], summing
//! the integrand over the sign combinations of its arguments. Double
//! integrals over the folded square use u = Ω + Ω′, v = Ω − Ω′ with
//! v = s·w(u), so the diagonal and the anti-diagonal Ω + Ω′ = Δω (where the
//! probe overlaps have kinks) lie on cell edges.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Result;
use crate::kernels::KernelContext;
use crate::quad::{
    try_integrate_1d_partitioned, try_integrate_2d_partitioned, Folded, IntegralResult,
    QuadratureConfig, Rect,
};

/// Which half of the (Ω, Ω′) plane is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneDomain {
    /// Ω, Ω′ ∈ (−∞, ∞)
    Full,
    /// Ω ∈ (−∞, ∞), Ω′ ≥ 0
    PrimeNonnegative,
}

/// ∫₀^∞ f(Ω) dΩ restricted to the band.
pub fn one_sided(
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
    f: impl FnMut(f64) -> Result<Complex64>,
) -> Result<IntegralResult<Complex64>> {
    let [lo, hi] = ctx.band();
    let init = split(lo, hi, cfg.initial_pieces());
    Ok(try_integrate_1d_partitioned(f, &init, cfg)?.0)
}

/// ∫_{−∞}^{∞} f(Ω) dΩ restricted to |Ω| in the band.
pub fn two_sided(
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
    f: impl FnMut(f64) -> Result<Complex64>,
) -> Result<IntegralResult<Complex64>> {
    Ok(two_sided_partitioned(ctx, cfg, None, f)?.0)
}

/// As [`two_sided`], starting from (and returning) a partition of the band.
pub fn two_sided_partitioned(
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
    partition: Option<&[[f64; 2]]>,
    mut f: impl FnMut(f64) -> Result<Complex64>,
) -> Result<(IntegralResult<Complex64>, Vec<[f64; 2]>)> {
    let [lo, hi] = ctx.band();
    let init = match partition {
        Some(p) if !p.is_empty() => p.to_vec(),
        _ => split(lo, hi, cfg.initial_pieces()),
    };
    let (r, p) = try_integrate_1d_partitioned(|w| Ok(Folded::new(&[f(w)?, f(-w)?])), &init, cfg)?;
    Ok((r.unfold(), p))
}

fn split(lo: f64, hi: f64, pieces: usize) -> Vec<[f64; 2]> {
    if hi <= lo {
        return Vec::new();
    }
    (0..pieces)
        .map(|k| {
            let a = lo + (hi - lo) * k as f64 / pieces as f64;
            let b = if k + 1 == pieces {
                hi
            } else {
                lo + (hi - lo) * (k + 1) as f64 / pieces as f64
            };
            [a, b]
        })
        .collect()
}

/// Initial (u, s) cells covering the folded square.
pub fn plane_partition(ctx: &KernelContext, cfg: &QuadratureConfig) -> Vec<Rect> {
    let [lo, hi] = ctx.band();
    if hi <= lo {
        return Vec::new();
    }
    let mut ub = alloc::vec![2.0 * lo, lo + hi, 2.0 * hi];
    let d = ctx.overlap_support();
    if d > 2.0 * lo && d < 2.0 * hi && d != lo + hi {
        ub.push(d);
    }
    ub.sort_unstable_by(|a, b| a.total_cmp(b));
    let p = cfg.initial_pieces();
    let mut cells = Vec::new();
    for w in ub.windows(2) {
        for u in split(w[0], w[1], p) {
            for s in split(-1.0, 0.0, p).into_iter().chain(split(0.0, 1.0, p)) {
                cells.push(Rect::new(u, s));
            }
        }
    }
    cells
}

/// ∬ f(Ω, Ω′) over the chosen domain with |Ω|, |Ω′| in the band.
pub fn plane(
    ctx: &KernelContext,
    cfg: &QuadratureConfig,
    domain: PlaneDomain,
    partition: Option<&[Rect]>,
    mut f: impl FnMut(f64, f64) -> Result<Complex64>,
) -> Result<(IntegralResult<Complex64>, Vec<Rect>)> {
    let [lo, hi] = ctx.band();
    let init = match partition {
        Some(p) if !p.is_empty() => p.to_vec(),
        _ => plane_partition(ctx, cfg),
    };
    let (r, p) = try_integrate_2d_partitioned(
        |u, s| {
            let w = (u - 2.0 * lo).min(2.0 * hi - u).max(0.0);
            let v = s * w;
            let (x, y) = (0.5 * (u + v), 0.5 * (u - v));
            let folded = match domain {
                PlaneDomain::Full => Folded::new(&[f(x, y)?, f(-x, y)?, f(x, -y)?, f(-x, -y)?]),
                PlaneDomain::PrimeNonnegative => Folded::new(&[f(x, y)?, f(-x, y)?]),
            };
            Ok(folded * (0.5 * w))
        },
        &init,
        cfg,
    )?;
    Ok((r.unfold(), p))
}
