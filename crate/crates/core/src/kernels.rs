//! Phase matching, probe overlaps, gating and the R/W/G building blocks.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{g1, heaviside, interp_linear, sinc};
use crate::params::{omega_from_thz, ParameterSet, PhysicalConstants, SpectrumShape, C0_UM_PER_PS};
use crate::quad::{try_integrate_1d_breaks, IntegralResult, QuadratureConfig};

/// Half-line selector θ(±ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// K₀ = θ(±ω), K₁ = cos[τ(ω+X)]θ(±ω), K₂ = sin[τ(ω+X)]θ(±ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelIndex {
    Zero,
    Cos,
    Sin,
}

impl TryFrom<u8> for KernelIndex {
    type Error = Error;

    fn try_from(i: u8) -> Result<Self> {
        match i {
            0 => Ok(KernelIndex::Zero),
            1 => Ok(KernelIndex::Cos),
            2 => Ok(KernelIndex::Sin),
            _ => Err(Error::Contract(format!(
                "kernel index {i} is not in {{0, 1, 2}}"
            ))),
        }
    }
}

/// Weight multiplying α(ω−Ω₁)α(ω−Ω₂) inside an overlap integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Unit,
    Omega,
    /// e^{iτ(ω+X)}
    Phase {
        x: f64,
        tau: f64,
    },
    /// ω·e^{iτ(ω+X)}
    OmegaPhase {
        x: f64,
        tau: f64,
    },
}

impl Weight {
    fn eval(self, w: f64) -> Complex64 {
        match self {
            Weight::Unit => Complex64::new(1.0, 0.0),
            Weight::Omega => Complex64::new(w, 0.0),
            Weight::Phase { x, tau } => Complex64::from_polar(1.0, tau * (w + x)),
            Weight::OmegaPhase { x, tau } => Complex64::from_polar(w, tau * (w + x)),
        }
    }

    /// Exact integral over [c − h, c + h].
    fn integral(self, c: f64, h: f64) -> Complex64 {
        match self {
            Weight::Unit => Complex64::new(2.0 * h, 0.0),
            Weight::Omega => Complex64::new(2.0 * h * c, 0.0),
            Weight::Phase { x, tau } => {
                Complex64::from_polar(2.0 * h * sinc(tau * h), tau * (c + x))
            }
            Weight::OmegaPhase { x, tau } => {
                Complex64::from_polar(1.0, tau * (c + x))
                    * Complex64::new(c * 2.0 * h * sinc(tau * h), 2.0 * h * h * g1(tau * h))
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Rect { a: f64, b: f64, dw: f64, amp2: f64 },
    Tab { w: Vec<f64>, y: Vec<f64> },
}

const GL3_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

impl Shape {
    fn support(&self) -> (f64, f64) {
        match self {
            Shape::Rect { a, b, .. } => (*a, *b),
            Shape::Tab { w, .. } => (w[0], w[w.len() - 1]),
        }
    }

    /// α(ω) extended to negative frequencies by α(−ω) = α*(ω).
    fn amplitude(&self, omega: f64) -> f64 {
        let u = omega.abs();
        match self {
            Shape::Rect { a, b, amp2, .. } => {
                if u >= *a && u <= *b {
                    amp2.sqrt()
                } else {
                    0.0
                }
            }
            Shape::Tab { w, y } => interp_linear(w, y, u),
        }
    }

    /// Support of α(ω − shift) restricted to the branch with sign σ.
    fn branch(&self, sigma: f64, shift: f64) -> (f64, f64) {
        let (a, b) = self.support();
        if sigma > 0.0 {
            (shift + a, shift + b)
        } else {
            (shift - b, shift - a)
        }
    }

    fn overlap(&self, s: Sign, om1: f64, om2: f64, weight: Weight) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                let (l1, h1) = self.branch(s1, om1);
                let (l2, h2) = self.branch(s2, om2);
                let (lo0, hi0) = (l1.max(l2), h1.min(h2));
                let (lo, hi) = match s {
                    Sign::Plus => (lo0.max(0.0), hi0),
                    Sign::Minus => (lo0, hi0.min(0.0)),
                };
                if hi <= lo {
                    continue;
                }
                acc += match self {
                    Shape::Rect { dw, amp2, .. } => {
                        // avoid b − a cancellation when the probe sits far from zero
                        let width = if s1 == s2 && lo == lo0 && hi == hi0 {
                            dw - (om1 - om2).abs()
                        } else {
                            hi - lo
                        };
                        if width <= 0.0 {
                            continue;
                        }
                        weight.integral(0.5 * (lo + hi), 0.5 * width) * *amp2
                    }
                    Shape::Tab { w, y } => tab_piece(w, y, s1, om1, s2, om2, lo, hi, weight),
                };
            }
        }
        acc
    }
}

/// ∫_lo^hi K(ω) α₊(σ₁(ω−Ω₁)) α₊(σ₂(ω−Ω₂)) dω for piecewise-linear α₊; both
/// factors are linear between merged nodes, so each cell is integrated with a
/// three-point Gauss rule.
#[allow(clippy::too_many_arguments)]
fn tab_piece(
    w: &[f64],
    y: &[f64],
    s1: f64,
    om1: f64,
    s2: f64,
    om2: f64,
    lo: f64,
    hi: f64,
    weight: Weight,
) -> Complex64 {
    let mut nodes: Vec<f64> = Vec::with_capacity(2 * w.len() + 2);
    nodes.push(lo);
    nodes.push(hi);
    for &wk in w {
        for v in [om1 + s1 * wk, om2 + s2 * wk] {
            if v > lo && v < hi {
                nodes.push(v);
            }
        }
    }
    nodes.sort_unstable_by(|a, b| a.total_cmp(b));
    nodes.dedup();
    let (wa, wb) = (w[0], w[w.len() - 1]);
    // factor on one cell: zero unless the midpoint maps inside the grid, then
    // endpoint values with arguments clamped so roundoff at a support edge
    // cannot fall off the grid
    let seg = |s: f64, om: f64, u0: f64, u1: f64| -> (f64, f64) {
        let m = s * (0.5 * (u0 + u1) - om);
        if m < wa || m > wb {
            return (0.0, 0.0);
        }
        let at = |u: f64| interp_linear(w, y, (s * (u - om)).clamp(wa, wb));
        (at(u0), at(u1))
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes.len() - 1 {
        let (u0, u1) = (nodes[k], nodes[k + 1]);
        let (p1, n1) = seg(s1, om1, u0, u1);
        let (p2, n2) = seg(s2, om2, u0, u1);
        if (p1 == 0.0 && n1 == 0.0) || (p2 == 0.0 && n2 == 0.0) {
            continue;
        }
        let (c, h) = (0.5 * (u0 + u1), 0.5 * (u1 - u0));
        for (x, wt) in GL3_X.iter().zip(GL3_W.iter()) {
            let t = 0.5 * (1.0 + x);
            let a1 = p1 + t * (n1 - p1);
            let a2 = p2 + t * (n2 - p2);
            acc += weight.eval(c + h * x) * (wt * h * a1 * a2);
        }
    }
    acc
}

/// Parameter set plus the derived quantities every kernel needs.
#[derive(Debug, Clone)]
pub struct KernelContext {
    params: ParameterSet,
    d: f64,
    omega_p: f64,
    half_l_over_c0: f64,
    shape: Shape,
}

impl KernelContext {
    pub fn new(params: ParameterSet) -> Result<Self> {
        params.validate()?;
        let shape = match &params.probe.shape {
            SpectrumShape::Rectangular => {
                let (a, b) = params.probe.support();
                Shape::Rect {
                    a,
                    b,
                    dw: params.probe.delta_omega(),
                    amp2: 1.0 / params.probe.delta_omega(),
                }
            }
            SpectrumShape::Tabulated(t) => Shape::Tab {
                w: t.omega_grid(),
                y: t.amplitude().to_vec(),
            },
        };
        Ok(KernelContext {
            d: params.crystal.d(),
            omega_p: params.probe.omega_p(),
            half_l_over_c0: params.crystal.length_um / (2.0 * C0_UM_PER_PS),
            shape,
            params,
        })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    /// d = −n⁴r41 in pm/V.
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    /// L/(2c0) in ps.
    pub fn half_l_over_c0(&self) -> f64 {
        self.half_l_over_c0
    }

    pub fn refractive_index(&self, omega: f64) -> Result<f64> {
        self.params.crystal.dispersion.refractive_index(omega)
    }

    pub fn absorption(&self, omega: f64) -> f64 {
        self.params.crystal.absorption_factor(omega)
    }

    /// φ(Ω) = (LΩ/2c0)(n_Ω − n_g).
    pub fn phase_mismatch(&self, omega: f64) -> Result<f64> {
        let n = self.refractive_index(omega)?;
        Ok(self.half_l_over_c0 * omega * (n - self.params.crystal.n_g))
    }

    /// sinc(φ)e^{iφ}.
    pub fn phase_matching(&self, omega: f64) -> Result<Complex64> {
        let phi = self.phase_mismatch(omega)?;
        Ok(Complex64::from_polar(sinc(phi), phi))
    }

    /// ζ_{ω,Ω} = −i d (Lω/2c0n) sinc(φ)e^{iφ}, in pm/V.
    pub fn zeta(&self, omega_nir: f64, omega: f64) -> Result<Complex64> {
        let n = self.params.crystal.n;
        let pre = self.d * self.half_l_over_c0 * omega_nir / n;
        Ok(Complex64::new(0.0, -pre) * self.phase_matching(omega)?)
    }

    /// Smallest |Ω| in the bracket where |φ(Ω)| = π, the first zero of |ζ|.
    pub fn phase_matching_zero(&self, bracket: [f64; 2]) -> Result<f64> {
        let g = |w: f64| -> Result<f64> { Ok(self.phase_mismatch(w)?.abs() - PI) };
        let [mut a, mut b] = bracket;
        let (mut fa, mut fb) = (g(a)?, g(b)?);
        if fa.signum() == fb.signum() {
            return Err(Error::invalid("bracket", "|φ| − π does not change sign"));
        }
        // Illinois false position
        let mut side = 0;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let fc = g(c)?;
            if fc == 0.0 || (b - a).abs() < 1e-14 * c.abs() {
                return Ok(c);
            }
            if fc.signum() == fb.signum() {
                b = c;
                fb = fc;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            } else {
                a = c;
                fa = fc;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            }
            if (b - a).abs() < 1e-14 * a.abs().max(b.abs()) {
                break;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// Generic overlap ∫dω θ(sω) K(ω) α(ω−Ω₁) α(ω−Ω₂), with the spectrum
    /// mirrored to negative frequencies and normalized by κ.
    pub fn overlap(&self, s: Sign, om1: f64, om2: f64, weight: Weight) -> Complex64 {
        self.shape.overlap(s, om1, om2, weight)
    }

    /// Same integral by adaptive quadrature of the pointwise integrand.
    pub fn overlap_quadrature(
        &self,
        s: Sign,
        om1: f64,
        om2: f64,
        weight: Weight,
        cfg: &QuadratureConfig,
    ) -> Result<IntegralResult<Complex64>> {
        let mut breaks: Vec<f64> = Vec::new();
        let push_nodes = |breaks: &mut Vec<f64>, shift: f64| match &self.shape {
            Shape::Rect { a, b, .. } => breaks.extend([shift + a, shift + b, shift - b, shift - a]),
            Shape::Tab { w, .. } => {
                for &wk in w {
                    breaks.extend([shift + wk, shift - wk]);
                }
            }
        };
        push_nodes(&mut breaks, om1);
        push_nodes(&mut breaks, om2);
        breaks.push(0.0);
        breaks.retain(|&v| v * s.value() >= 0.0);
        breaks.sort_unstable_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let shape = &self.shape;
        try_integrate_1d_breaks(
            |w| {
                let a = shape.amplitude(w - om1) * shape.amplitude(w - om2);
                Ok(weight.eval(w) * (heaviside(s.value() * w) * a))
            },
            &breaks,
            cfg,
        )
    }

    /// f₋(Ω) (sign Minus) or f₊(Ω) (sign Plus).
    pub fn probe_overlap(&self, omega: f64, sign: Sign) -> Complex64 {
        match sign {
            Sign::Minus => self.overlap(Sign::Plus, 0.0, omega, Weight::Unit),
            Sign::Plus => self.overlap(Sign::Plus, 0.0, -omega, Weight::Unit),
        }
    }

    /// F(Ω) = ½[f₊*(Ω) + f₋(Ω)].
    pub fn big_f(&self, omega: f64) -> Complex64 {
        (self.probe_overlap(omega, Sign::Plus).conj() + self.probe_overlap(omega, Sign::Minus))
            * 0.5
    }

    /// Width beyond which every probe overlap vanishes.
    pub fn overlap_support(&self) -> f64 {
        match &self.shape {
            Shape::Rect { dw, .. } => *dw,
            Shape::Tab { w, .. } => w[w.len() - 1] - w[0],
        }
    }

    /// R(Ω) = sinc(φ)e^{iφ}F(Ω), times the absorption factor when enabled.
    pub fn gating_r(&self, omega: f64) -> Result<Complex64> {
        let f = self.big_f(omega);
        if f == Complex64::new(0.0, 0.0) {
            return Ok(f);
        }
        Ok(self.phase_matching(omega)? * f * self.absorption(omega))
    }

    /// R_i^{(s)}(Ω, X, τ).
    pub fn rgate(
        &self,
        omega: f64,
        i: KernelIndex,
        x: f64,
        tau: f64,
        s: Sign,
    ) -> Result<Complex64> {
        let ov = match i {
            KernelIndex::Zero => self.overlap(s, 0.0, omega, Weight::Unit).re,
            KernelIndex::Cos => self.overlap(s, 0.0, omega, Weight::Phase { x, tau }).re,
            KernelIndex::Sin => self.overlap(s, 0.0, omega, Weight::Phase { x, tau }).im,
        };
        if ov == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.phase_matching(omega)? * (0.5 * ov * self.absorption(omega)))
    }

    /// W_i^{(s)}(Ω, Ω′, X, τ).
    pub fn wgate(
        &self,
        omega: f64,
        omega2: f64,
        i: KernelIndex,
        x: f64,
        tau: f64,
        s: Sign,
    ) -> Complex64 {
        let v = match i {
            KernelIndex::Zero => self.overlap(s, omega, omega2, Weight::Omega).re,
            KernelIndex::Cos => {
                self.overlap(s, omega, omega2, Weight::OmegaPhase { x, tau })
                    .re
            }
            KernelIndex::Sin => {
                self.overlap(s, omega, omega2, Weight::OmegaPhase { x, tau })
                    .im
            }
        };
        Complex64::new(v, 0.0)
    }

    /// W_i^{(s)} through adaptive quadrature instead of the closed forms.
    pub fn wgate_quadrature(
        &self,
        omega: f64,
        omega2: f64,
        i: KernelIndex,
        x: f64,
        tau: f64,
        s: Sign,
        cfg: &QuadratureConfig,
    ) -> Result<Complex64> {
        let r = match i {
            KernelIndex::Zero => {
                self.overlap_quadrature(s, omega, omega2, Weight::Omega, cfg)?
                    .value
                    .re
            }
            KernelIndex::Cos => {
                self.overlap_quadrature(s, omega, omega2, Weight::OmegaPhase { x, tau }, cfg)?
                    .value
                    .re
            }
            KernelIndex::Sin => {
                self.overlap_quadrature(s, omega, omega2, Weight::OmegaPhase { x, tau }, cfg)?
                    .value
                    .im
            }
        };
        Ok(Complex64::new(r, 0.0))
    }

    /// G_ij^{(s,s′)} = (dLω_p^{3/2}/2c0n)⁻² ζ*_{ω_p,Ω} ζ_{ω_p,Ω′} R_i^{(s)}(Ω,X,τ) W_j^{(s′)}(Ω,Ω′,Y,τ).
    #[allow(clippy::too_many_arguments)]
    pub fn ggate(
        &self,
        omega: f64,
        omega2: f64,
        i: KernelIndex,
        j: KernelIndex,
        x: f64,
        y: f64,
        tau: f64,
        s: Sign,
        s2: Sign,
    ) -> Result<Complex64> {
        let r = self.rgate(omega, i, x, tau, s)?;
        if r == Complex64::new(0.0, 0.0) {
            return Ok(r);
        }
        let w = self.wgate(omega, omega2, j, y, tau, s2);
        if w == Complex64::new(0.0, 0.0) {
            return Ok(w);
        }
        let pair = self.phase_matching(omega)?.conj() * self.phase_matching(omega2)?;
        Ok(pair * r * w / self.omega_p)
    }

    /// (dLω_p^{3/2}/2c0n), the normalization of G, in pm/V·ps^{-1/2}.
    pub fn g_normalization(&self) -> f64 {
        self.d * self.half_l_over_c0 * self.omega_p.powf(1.5) / self.params.crystal.n
    }

    /// C_j in ps^{2j}.
    pub fn coeff_c(&self, jj: u32, photons: f64) -> Result<f64> {
        if jj < 1 {
            return Err(Error::Contract(format!("C_j requires j ≥ 1, got {jj}")));
        }
        Ok(photons.powi(jj as i32 + 1) * self.coupling_k().powi(jj as i32))
    }

    /// k = C₁/N² in ps², composed in SI units.
    pub fn coupling_k(&self) -> f64 {
        let pc = PhysicalConstants::CODATA;
        let c = &self.params.crystal;
        let l = c.length_um * 1e-6;
        let w0 = c.w0_um * 1e-6;
        let r41 = c.r41_pm_per_v * 1e-12;
        let wp = self.omega_p * 1e12;
        let eo = c.n.powi(3) * l * wp * r41 / pc.c0;
        let vac = pc.hbar / (4.0 * PI * PI * pc.eps0 * pc.c0 * c.n * w0 * w0);
        eo * eo * vac * 1e24
    }

    /// One-sided MIR band [lo, hi] in rad/ps outside of which every integrand
    /// vanishes: the crystal window clipped to the overlap support.
    pub fn band(&self) -> [f64; 2] {
        let [lo, hi] = self.params.crystal.mir_window_thz;
        let hi = omega_from_thz(hi).min(self.overlap_support());
        [omega_from_thz(lo).min(hi), hi]
    }
}

/// Spatial overlap A^{(j+1)} of the j-th order signal; units µm^{-p} with p
/// the returned power.
pub fn overlap_a(j: u32, w0_um: f64) -> Result<(f64, i32)> {
    let (k, p) = match j {
        2 => (2.0 / (3.0 * PI * PI).sqrt(), 2),
        3 => ((2.0 / (PI * PI * PI)).sqrt(), 3),
        4 => (4.0 / (5.0f64.sqrt() * PI * PI), 4),
        _ => {
            return Err(Error::Contract(format!(
                "overlap A is defined for j ∈ {{2, 3, 4}}, got {j}"
            )))
        }
    };
    Ok((k / w0_um.powi(p), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ParameterSet, ProbeSpectrum, TabulatedSpectrum};

    fn set1() -> KernelContext {
        KernelContext::new(ParameterSet::set1()).unwrap()
    }

    fn set2() -> KernelContext {
        KernelContext::new(ParameterSet::set2()).unwrap()
    }

    #[test]
    fn zeta_at_zero_frequency() {
        let k = set1();
        let w = k.omega_p();
        let z = k.zeta(w, 0.0).unwrap();
        let modulus = k.d().abs() * k.half_l_over_c0() * w / k.params().crystal.n;
        assert!((z.norm() / modulus - 1.0).abs() < 1e-14);
        // d < 0, so −i·d points along +i
        assert!((z.arg() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn overlap_limits() {
        let k = set1();
        assert!((k.probe_overlap(0.0, Sign::Minus).re - 1.0).abs() < 1e-14);
        let dw = k.params().probe.delta_omega();
        assert!((k.probe_overlap(0.5 * dw, Sign::Minus).re - 0.5).abs() < 1e-14);
        assert!((k.probe_overlap(-0.25 * dw, Sign::Plus).re - 0.75).abs() < 1e-14);
        assert_eq!(k.probe_overlap(1.01 * dw, Sign::Minus).re, 0.0);
    }

    #[test]
    fn gating_at_zero_is_one() {
        for k in [set1(), set2()] {
            let r = k.gating_r(0.0).unwrap();
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-14, "{r}");
        }
    }

    #[test]
    fn rgate_collapses_at_zero_delay() {
        let k = set2();
        let w = 3.0;
        for s in Sign::ALL {
            let r0 = k.rgate(w, KernelIndex::Zero, 0.0, 0.0, s).unwrap();
            let r1 = k.rgate(w, KernelIndex::Cos, 1.7, 0.0, s).unwrap();
            let r2 = k.rgate(w, KernelIndex::Sin, 1.7, 0.0, s).unwrap();
            assert!((r0 - r1).norm() < 1e-15 * r0.norm().max(1.0));
            assert_eq!(r2.norm(), 0.0);
        }
    }

    #[test]
    fn index_out_of_range() {
        assert!(KernelIndex::try_from(3).is_err());
        assert_eq!(KernelIndex::try_from(2).unwrap(), KernelIndex::Sin);
    }

    #[test]
    fn ggate_vanishes_with_r() {
        let k = set2();
        let g = k
            .ggate(
                3.0,
                2.0,
                KernelIndex::Sin,
                KernelIndex::Zero,
                0.5,
                0.0,
                0.0,
                Sign::Plus,
                Sign::Plus,
            )
            .unwrap();
        assert_eq!(g.norm(), 0.0);
    }

    #[test]
    fn overlap_a_values() {
        assert!((overlap_a(2, 1.0).unwrap().0 - 0.36755).abs() < 1e-5);
        assert!((overlap_a(3, 1.0).unwrap().0 - 0.25397).abs() < 1e-5);
        for j in 2..=4 {
            let (a1, p) = overlap_a(j, 1.3).unwrap();
            let (a2, _) = overlap_a(j, 2.6).unwrap();
            assert!((a2 / a1 - 2f64.powi(-p)).abs() < 1e-14);
        }
        assert!(overlap_a(5, 1.0).is_err());
        assert!(overlap_a(1, 1.0).is_err());
    }

    #[test]
    fn coeff_scaling() {
        let k = set1();
        for jj in 1..=2 {
            let r = k.coeff_c(jj, 1e8).unwrap() / k.coeff_c(jj, 1.0).unwrap();
            assert!((r / 1e8f64.powi(jj as i32 + 1) - 1.0).abs() < 1e-14);
        }
        let n = 3.7e9;
        let c1 = k.coeff_c(1, n).unwrap();
        let c2 = k.coeff_c(2, n).unwrap();
        assert!((c2 / (c1 * c1) * n - 1.0).abs() < 1e-14);
        assert!(k.coeff_c(0, n).is_err());
    }

    #[test]
    fn tabulated_flat_matches_rectangular() {
        let rect = set2();
        let (a, b) = rect.params().probe.support();
        let nu: Vec<f64> = (0..=40)
            .map(|k| crate::params::thz_from_omega(a + (b - a) * k as f64 / 40.0))
            .collect();
        let tab = TabulatedSpectrum::new(nu, alloc::vec![1.0; 41]).unwrap();
        let mut p = rect.params().clone();
        p.probe = ProbeSpectrum::tabulated(tab, 1e8).unwrap();
        let t = KernelContext::new(p).unwrap();
        for &(w1, w2) in &[(0.0, 3.0), (2.0, -4.0), (5.5, 1.0)] {
            for s in Sign::ALL {
                for wt in [
                    Weight::Unit,
                    Weight::Omega,
                    Weight::OmegaPhase { x: 0.3, tau: 0.4 },
                ] {
                    let x = rect.overlap(s, w1, w2, wt);
                    let y = t.overlap(s, w1, w2, wt);
                    assert!(
                        (x - y).norm() <= 1e-9 * x.norm().max(1e-12),
                        "{w1} {w2} {s:?} {wt:?}: {x} {y}"
                    );
                }
            }
        }
    }
}
