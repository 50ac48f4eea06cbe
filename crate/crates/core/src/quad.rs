//! Globally adaptive 1D and tensor-product 2D quadrature.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Scalar types the rules can integrate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    /// Size of the terms whose sum produced this value; sets the roundoff floor.
    fn roundoff_scale(&self) -> f64 {
        self.magnitude()
    }
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Complex value that remembers the magnitude of the parts it was summed from,
/// so integrands that cancel between folded branches get a realistic
/// roundoff floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Folded {
    pub value: Complex64,
    pub scale: f64,
}

impl Folded {
    pub fn new(parts: &[Complex64]) -> Self {
        Folded {
            value: parts.iter().sum(),
            scale: parts.iter().map(|p| p.norm()).sum(),
        }
    }
}

impl Add for Folded {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Folded {
            value: self.value + o.value,
            scale: self.scale + o.scale,
        }
    }
}

impl Sub for Folded {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Folded {
            value: self.value - o.value,
            scale: self.scale + o.scale,
        }
    }
}

impl Mul<f64> for Folded {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Folded {
            value: self.value * k,
            scale: self.scale * k.abs(),
        }
    }
}

impl AddAssign for Folded {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl QuadValue for Folded {
    fn zero() -> Self {
        Folded {
            value: Complex64::new(0.0, 0.0),
            scale: 0.0,
        }
    }
    fn magnitude(&self) -> f64 {
        self.value.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.value.re.is_finite() && self.value.im.is_finite() && self.scale.is_finite()
    }
    fn roundoff_scale(&self) -> f64 {
        self.scale
    }
}

impl IntegralResult<Folded> {
    pub fn unfold(self) -> IntegralResult<Complex64> {
        IntegralResult {
            value: self.value.value,
            error_estimate: self.error_estimate,
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseRule {
    GaussKronrod15,
    ClenshawCurtis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub base_rule: BaseRule,
    /// Expected number of phase cycles across the window; sets the initial
    /// uniform partition.
    pub oscillation_hint: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_subdivisions: 4000,
            base_rule: BaseRule::GaussKronrod15,
            oscillation_hint: 0.0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureConfig { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        if !(self.oscillation_hint >= 0.0) {
            return Err(Error::invalid("oscillation_hint", "must be nonnegative"));
        }
        Ok(())
    }

    pub(crate) fn initial_pieces(&self) -> usize {
        (self.oscillation_hint.ceil() as usize).clamp(1, 4096)
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<V> {
    pub value: V,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<V: QuadValue> IntegralResult<V> {
    pub fn zero() -> Self {
        IntegralResult {
            value: V::zero(),
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// Sum of two independent results.
    pub fn combine(self, other: Self) -> Self {
        IntegralResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        IntegralResult {
            value: self.value * k,
            error_estimate: self.error_estimate * k.abs(),
            ..self
        }
    }
}

impl IntegralResult<Complex64> {
    pub fn re(self) -> IntegralResult<f64> {
        IntegralResult {
            value: self.value.re,
            error_estimate: self.error_estimate,
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes on [−1, 1] with high- and low-order weights sharing the nodes.
#[derive(Debug, Clone)]
struct Rule {
    x: Vec<f64>,
    w_hi: Vec<f64>,
    w_lo: Vec<f64>,
}

impl Rule {
    fn new(kind: BaseRule) -> Self {
        match kind {
            BaseRule::GaussKronrod15 => {
                let mut x = Vec::with_capacity(15);
                let mut w_hi = Vec::with_capacity(15);
                let mut w_lo = Vec::with_capacity(15);
                let gauss = |j: usize| match j {
                    1 | 3 | 5 => WG[(j - 1) / 2],
                    7 => WG[3],
                    _ => 0.0,
                };
                for j in 0..8 {
                    x.push(-XGK[j]);
                    w_hi.push(WGK[j]);
                    w_lo.push(gauss(j));
                }
                for j in (0..7).rev() {
                    x.push(XGK[j]);
                    w_hi.push(WGK[j]);
                    w_lo.push(gauss(j));
                }
                Rule { x, w_hi, w_lo }
            }
            BaseRule::ClenshawCurtis => {
                let w_hi = clenshaw_curtis_weights(16);
                let coarse = clenshaw_curtis_weights(8);
                let x: Vec<f64> = (0..=16).map(|j| (j as f64 * PI / 16.0).cos()).collect();
                let w_lo = (0..=16)
                    .map(|j| if j % 2 == 0 { coarse[j / 2] } else { 0.0 })
                    .collect();
                Rule { x, w_hi, w_lo }
            }
        }
    }

    fn len(&self) -> usize {
        self.x.len()
    }
}

fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..=n)
        .map(|j| {
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            let mut s = 1.0;
            for k in 1..=n / 2 {
                let b = if k == n / 2 { 1.0 } else { 2.0 };
                let kk = k as f64;
                s -= b / (4.0 * kk * kk - 1.0) * (2.0 * kk * j as f64 * PI / nf).cos();
            }
            c / nf * s
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Estimate<V> {
    value: V,
    error: f64,
    /// roundoff part of `error`
    floor: f64,
    /// error attributable to each axis; only axis 0 is used in 1D
    axis_error: [f64; 2],
}

const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

fn apply_1d<V: QuadValue, F: FnMut(f64) -> Result<V>>(
    rule: &Rule,
    f: &mut F,
    a: f64,
    b: f64,
) -> Result<Estimate<V>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut hi = V::zero();
    let mut lo = V::zero();
    let mut abs_sum = 0.0;
    for k in 0..rule.len() {
        let x = c + h * rule.x[k];
        let v = f(x)?;
        if !v.is_finite_value() {
            return Err(Error::NonFinite { at: vec![x] });
        }
        hi += v * rule.w_hi[k];
        lo += v * rule.w_lo[k];
        abs_sum += rule.w_hi[k] * v.roundoff_scale();
    }
    let hi = hi * h;
    let lo = lo * h;
    let floor = ROUNDOFF * abs_sum * h.abs();
    let error = (hi - lo).magnitude() + floor;
    Ok(Estimate {
        value: hi,
        error,
        floor,
        axis_error: [error, 0.0],
    })
}

/// Axis-aligned rectangle [x0, x1] × [y0, y1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Rect {
    pub fn new(x: [f64; 2], y: [f64; 2]) -> Self {
        Rect { x, y }
    }
}

fn apply_2d<V: QuadValue, F: FnMut(f64, f64) -> Result<V>>(
    rule: &Rule,
    f: &mut F,
    r: &Rect,
    buf: &mut Vec<V>,
) -> Result<Estimate<V>> {
    let (cx, hx) = (0.5 * (r.x[0] + r.x[1]), 0.5 * (r.x[1] - r.x[0]));
    let (cy, hy) = (0.5 * (r.y[0] + r.y[1]), 0.5 * (r.y[1] - r.y[0]));
    let m = rule.len();
    buf.clear();
    let mut abs_sum = 0.0;
    for i in 0..m {
        let x = cx + hx * rule.x[i];
        for j in 0..m {
            let y = cy + hy * rule.x[j];
            let v = f(x, y)?;
            if !v.is_finite_value() {
                return Err(Error::NonFinite { at: vec![x, y] });
            }
            abs_sum += rule.w_hi[i] * rule.w_hi[j] * v.roundoff_scale();
            buf.push(v);
        }
    }
    let mut kk = V::zero();
    let mut gk = V::zero();
    let mut kg = V::zero();
    for i in 0..m {
        let mut row_hi = V::zero();
        let mut row_lo = V::zero();
        for j in 0..m {
            let v = buf[i * m + j];
            row_hi += v * rule.w_hi[j];
            row_lo += v * rule.w_lo[j];
        }
        kk += row_hi * rule.w_hi[i];
        gk += row_hi * rule.w_lo[i];
        kg += row_lo * rule.w_hi[i];
    }
    let area = hx * hy;
    let floor = ROUNDOFF * abs_sum * area.abs();
    let ex = (kk - gk).magnitude() * area.abs() + 0.5 * floor;
    let ey = (kk - kg).magnitude() * area.abs() + 0.5 * floor;
    Ok(Estimate {
        value: kk * area,
        error: ex + ey,
        floor,
        axis_error: [ex, ey],
    })
}

struct Piece<R, V> {
    region: R,
    est: Estimate<V>,
}

impl<R, V> PartialEq for Piece<R, V> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error.total_cmp(&other.est.error) == Ordering::Equal
    }
}
impl<R, V> Eq for Piece<R, V> {}
impl<R, V> PartialOrd for Piece<R, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R, V> Ord for Piece<R, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

trait Region: Copy {
    /// Splits along the axis carrying most of the error; `None` when too small.
    fn split(&self, axis_error: [f64; 2]) -> Option<(Self, Self)>;
}

impl Region for [f64; 2] {
    fn split(&self, _: [f64; 2]) -> Option<(Self, Self)> {
        let m = 0.5 * (self[0] + self[1]);
        if !(m > self[0] && m < self[1])
            || (self[1] - self[0]) <= 1e-13 * (self[0].abs() + self[1].abs())
        {
            return None;
        }
        Some(([self[0], m], [m, self[1]]))
    }
}

impl Region for Rect {
    fn split(&self, axis_error: [f64; 2]) -> Option<(Self, Self)> {
        let along_x = axis_error[0] >= axis_error[1];
        let (first, second) = if along_x {
            (self.x.split([0.0; 2]), self.y.split([0.0; 2]))
        } else {
            (self.y.split([0.0; 2]), self.x.split([0.0; 2]))
        };
        match (first, second, along_x) {
            (Some((a, b)), _, true) => Some((Rect::new(a, self.y), Rect::new(b, self.y))),
            (Some((a, b)), _, false) => Some((Rect::new(self.x, a), Rect::new(self.x, b))),
            (None, Some((a, b)), true) => Some((Rect::new(self.x, a), Rect::new(self.x, b))),
            (None, Some((a, b)), false) => Some((Rect::new(a, self.y), Rect::new(b, self.y))),
            _ => None,
        }
    }
}

fn adapt<R: Region, V: QuadValue>(
    initial: &[R],
    cfg: &QuadratureConfig,
    evals_per_piece: usize,
    mut apply: impl FnMut(&R) -> Result<Estimate<V>>,
) -> Result<(IntegralResult<V>, Vec<R>)> {
    cfg.validate()?;
    let mut heap = BinaryHeap::with_capacity(initial.len() + 2 * cfg.max_subdivisions);
    let mut evaluations = 0;
    for r in initial {
        heap.push(Piece {
            region: *r,
            est: apply(r)?,
        });
        evaluations += evals_per_piece;
    }
    let totals = |heap: &BinaryHeap<Piece<R, V>>| {
        let mut v = V::zero();
        let mut e = 0.0;
        let mut fl = 0.0;
        for p in heap.iter() {
            v += p.est.value;
            e += p.est.error;
            fl += p.est.floor;
        }
        (v, e, fl)
    };
    // once the rule difference is below the roundoff floor, splitting cannot help
    let done = |value: &V, error: f64, floor: f64| {
        error <= cfg.tolerance_for(value.magnitude()).max(2.0 * floor)
    };
    let (mut value, mut error, mut floor) = totals(&heap);
    let mut best = (value, error, floor);
    let mut splits = 0;
    while !done(&value, error, floor) && splits < cfg.max_subdivisions {
        let Some(top) = heap.pop() else { break };
        let Some((r1, r2)) = top.region.split(top.est.axis_error) else {
            heap.push(top);
            break;
        };
        let e1 = apply(&r1)?;
        let e2 = apply(&r2)?;
        evaluations += 2 * evals_per_piece;
        heap.push(Piece {
            region: r1,
            est: e1,
        });
        heap.push(Piece {
            region: r2,
            est: e2,
        });
        splits += 1;
        (value, error, floor) = totals(&heap);
        if error < best.1 {
            best = (value, error, floor);
        }
    }
    let regions = heap.iter().map(|p| p.region).collect();
    let (value, error, floor) = best;
    Ok((
        IntegralResult {
            value,
            error_estimate: error,
            evaluations,
            converged: done(&value, error, floor),
        },
        regions,
    ))
}

fn uniform_breaks(a: f64, b: f64, pieces: usize) -> Vec<[f64; 2]> {
    (0..pieces)
        .map(|k| {
            let t0 = k as f64 / pieces as f64;
            let t1 = (k + 1) as f64 / pieces as f64;
            [
                a + (b - a) * t0,
                if k + 1 == pieces { b } else { a + (b - a) * t1 },
            ]
        })
        .collect()
}

/// Adaptive integral of `f` over [a, b].
pub fn integrate_1d<V: QuadValue>(
    mut f: impl FnMut(f64) -> V,
    window: [f64; 2],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<V>> {
    try_integrate_1d(|x| Ok(f(x)), window, cfg)
}

/// As [`integrate_1d`] for integrands that can fail.
pub fn try_integrate_1d<V: QuadValue>(
    f: impl FnMut(f64) -> Result<V>,
    window: [f64; 2],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<V>> {
    let [a, b] = window;
    if a == b {
        return Ok(IntegralResult::zero());
    }
    let init = uniform_breaks(a, b, cfg.initial_pieces());
    Ok(try_integrate_1d_partitioned(f, &init, cfg)?.0)
}

/// Adaptive integral starting from the given partition; returns the final
/// partition so that a related integrand can reuse it.
pub fn try_integrate_1d_partitioned<V: QuadValue>(
    mut f: impl FnMut(f64) -> Result<V>,
    initial: &[[f64; 2]],
    cfg: &QuadratureConfig,
) -> Result<(IntegralResult<V>, Vec<[f64; 2]>)> {
    let rule = Rule::new(cfg.base_rule);
    let n = rule.len();
    let pieces: Vec<[f64; 2]> = initial.iter().copied().filter(|r| r[1] > r[0]).collect();
    if pieces.is_empty() {
        return Ok((IntegralResult::zero(), Vec::new()));
    }
    let (res, mut regions) = adapt(&pieces, cfg, n, |r| apply_1d(&rule, &mut f, r[0], r[1]))?;
    regions.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok((res, regions))
}

/// Adaptive integral over pieces between consecutive breakpoints.
pub fn try_integrate_1d_breaks<V: QuadValue>(
    f: impl FnMut(f64) -> Result<V>,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<V>> {
    let mut init = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            init.extend(uniform_breaks(w[0], w[1], cfg.initial_pieces()));
        }
    }
    Ok(try_integrate_1d_partitioned(f, &init, cfg)?.0)
}

/// Adaptive integral of `f` over [a, b] × [c, d].
pub fn integrate_2d<V: QuadValue>(
    mut f: impl FnMut(f64, f64) -> V,
    x: [f64; 2],
    y: [f64; 2],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<V>> {
    try_integrate_2d(|a, b| Ok(f(a, b)), x, y, cfg)
}

/// As [`integrate_2d`] for integrands that can fail.
pub fn try_integrate_2d<V: QuadValue>(
    f: impl FnMut(f64, f64) -> Result<V>,
    x: [f64; 2],
    y: [f64; 2],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<V>> {
    let p = cfg.initial_pieces();
    let mut init = Vec::with_capacity(p * p);
    for xs in uniform_breaks(x[0], x[1], p) {
        for ys in uniform_breaks(y[0], y[1], p) {
            init.push(Rect::new(xs, ys));
        }
    }
    Ok(try_integrate_2d_partitioned(f, &init, cfg)?.0)
}

/// 2D analogue of [`try_integrate_1d_partitioned`].
pub fn try_integrate_2d_partitioned<V: QuadValue>(
    mut f: impl FnMut(f64, f64) -> Result<V>,
    initial: &[Rect],
    cfg: &QuadratureConfig,
) -> Result<(IntegralResult<V>, Vec<Rect>)> {
    let rule = Rule::new(cfg.base_rule);
    let n = rule.len();
    let pieces: Vec<Rect> = initial
        .iter()
        .copied()
        .filter(|r| r.x[1] > r.x[0] && r.y[1] > r.y[0])
        .collect();
    if pieces.is_empty() {
        return Ok((IntegralResult::zero(), Vec::new()));
    }
    let mut buf = Vec::with_capacity(n * n);
    let (res, mut regions) = adapt(&pieces, cfg, n * n, |r| {
        apply_2d(&rule, &mut f, r, &mut buf)
    })?;
    regions.sort_by(|a, b| a.x[0].total_cmp(&b.x[0]).then(a.y[0].total_cmp(&b.y[0])));
    Ok((res, regions))
}
