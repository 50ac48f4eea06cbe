//! Few-mode Fock-space model of the back-action process, evaluated with
//! explicit ladder operators as an independent check of the closed forms.
//!
//! One channel has a probe mode p, an MIR mode M and an NIR mode N with
//! ln U = 𝒜 M†N†p − 𝒜* M N p† + 𝒞 M N† p − 𝒞* M† N p†. A second channel
//! adds its own probe and NIR modes and couples to the same M.

mod dense;
mod space;

pub use dense::DenseMatrix;
pub use space::{coherent_amplitudes, inner, norm_sqr, FockSpace, Ladder, Monomial, Operator};

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use space::{axpy, scale, sub};

/// Coupling and coherent amplitude of one probe channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub a: Complex64,
    pub c: Complex64,
    pub alpha: Complex64,
}

impl Channel {
    pub fn new(a: Complex64, c: Complex64, alpha: Complex64) -> Self {
        Channel { a, c, alpha }
    }
}

/// Largest occupation kept per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoffs {
    pub probe: usize,
    pub mir: usize,
    pub nir: usize,
}

impl Cutoffs {
    pub const SINGLE: Cutoffs = Cutoffs {
        probe: 24,
        mir: 6,
        nir: 6,
    };
    pub const TWO_CHANNEL: Cutoffs = Cutoffs {
        probe: 8,
        mir: 4,
        nir: 4,
    };
}

/// Threshold above which |𝒜α| or |𝒞α| make the expansion unreliable.
pub const PERTURBATIVE_LIMIT: f64 = 0.3;
/// Largest tolerated truncation loss.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeModeModel {
    pub channels: Vec<Channel>,
    pub cutoffs: Cutoffs,
}

impl ThreeModeModel {
    pub fn single(a: Complex64, c: Complex64, alpha: Complex64) -> Self {
        ThreeModeModel {
            channels: alloc::vec![Channel::new(a, c, alpha)],
            cutoffs: Cutoffs::SINGLE,
        }
    }

    pub fn two_channel(ch1: Channel, ch2: Channel) -> Self {
        ThreeModeModel {
            channels: alloc::vec![ch1, ch2],
            cutoffs: Cutoffs::TWO_CHANNEL,
        }
    }

    pub fn with_cutoffs(mut self, cutoffs: Cutoffs) -> Self {
        self.cutoffs = cutoffs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.channels.len()) {
            return Err(Error::invalid(
                "channels",
                "one or two channels are supported",
            ));
        }
        let c = self.cutoffs;
        if c.probe < 1 || c.mir < 2 || c.nir < 2 {
            return Err(Error::invalid("cutoffs", "need probe ≥ 1 and MIR, NIR ≥ 2"));
        }
        for ch in &self.channels {
            for v in [ch.a, ch.c, ch.alpha] {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::invalid(
                        "model",
                        "couplings and amplitudes must be finite",
                    ));
                }
            }
        }
        Ok(())
    }

    /// False when some |𝒜α| or |𝒞α| reaches [`PERTURBATIVE_LIMIT`].
    pub fn perturbative(&self) -> bool {
        self.channels.iter().all(|ch| {
            (ch.a * ch.alpha).norm() < PERTURBATIVE_LIMIT
                && (ch.c * ch.alpha).norm() < PERTURBATIVE_LIMIT
        })
    }

    /// Modes ordered M, then p and N of each channel.
    pub fn space(&self) -> FockSpace {
        let c = self.cutoffs;
        match self.channels.len() {
            1 => FockSpace::new(&[("mir", c.mir), ("probe", c.probe), ("nir", c.nir)]),
            _ => FockSpace::new(&[
                ("mir", c.mir),
                ("probe1", c.probe),
                ("nir1", c.nir),
                ("probe2", c.probe),
                ("nir2", c.nir),
            ]),
        }
    }

    fn probe_mode(ch: usize) -> usize {
        1 + 2 * ch
    }

    fn nir_mode(ch: usize) -> usize {
        2 + 2 * ch
    }

    /// Coherent probes, MIR and NIR in vacuum. Fails when the probe cutoff
    /// loses more than [`TRUNCATION_LIMIT`] of the norm.
    pub fn initial_state(&self, space: &FockSpace) -> Result<Vec<Complex64>> {
        let mut factors = alloc::vec![vacuum(self.cutoffs.mir)];
        for ch in &self.channels {
            let (c, norm) = coherent_amplitudes(ch.alpha, self.cutoffs.probe);
            if 1.0 - norm > TRUNCATION_LIMIT {
                return Err(Error::Truncation {
                    population: 1.0 - norm,
                });
            }
            factors.push(c);
            factors.push(vacuum(self.cutoffs.nir));
        }
        Ok(space.product_state(&factors))
    }

    /// Polarization signal i(p†N − N†p) of channel `ch`.
    pub fn signal(&self, ch: usize) -> Operator {
        let (p, n) = (Self::probe_mode(ch), Self::nir_mode(ch));
        let mut s = Operator::zero();
        s.push(
            Complex64::new(0.0, 1.0),
            &[(p, Ladder::Create), (n, Ladder::Annihilate)],
        );
        s.push(
            Complex64::new(0.0, -1.0),
            &[(n, Ladder::Create), (p, Ladder::Annihilate)],
        );
        s
    }
}

fn vacuum(cutoff: usize) -> Vec<Complex64> {
    let mut v = alloc::vec![Complex64::new(0.0, 0.0); cutoff + 1];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

/// ln U of the model as a matrix-free operator.
pub fn generator(model: &ThreeModeModel) -> Operator {
    use Ladder::{Annihilate as An, Create as Cr};
    let m = 0;
    let mut g = Operator::zero();
    for (k, ch) in model.channels.iter().enumerate() {
        let (p, n) = (ThreeModeModel::probe_mode(k), ThreeModeModel::nir_mode(k));
        g.push(ch.a, &[(m, Cr), (n, Cr), (p, An)]);
        g.push(-ch.a.conj(), &[(m, An), (n, An), (p, Cr)]);
        g.push(ch.c, &[(m, An), (n, Cr), (p, An)]);
        g.push(-ch.c.conj(), &[(m, Cr), (n, An), (p, Cr)]);
    }
    g
}

/// ln U as a dense matrix; only sensible for small truncations.
pub fn build_generator(model: &ThreeModeModel) -> Result<DenseMatrix> {
    model.validate()?;
    let space = model.space();
    Ok(generator(model).to_dense(&space))
}

/// Shared evaluation state: space, operators and initial vector.
struct Setup {
    space: FockSpace,
    g: Operator,
    psi: Vec<Complex64>,
}

impl Setup {
    fn new(model: &ThreeModeModel) -> Result<Self> {
        model.validate()?;
        let space = model.space();
        let psi = model.initial_state(&space)?;
        Ok(Setup {
            g: generator(model),
            space,
            psi,
        })
    }

    fn apply(&self, op: &Operator, v: &[Complex64]) -> Vec<Complex64> {
        op.apply(&self.space, v)
    }

    /// |out₁⟩ = G|ψ⟩, |out₂⟩ = ½G²|ψ⟩.
    fn outs(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let o1 = self.apply(&self.g, &self.psi);
        let o2 = scale(&self.apply(&self.g, &o1), Complex64::new(0.5, 0.0));
        (o1, o2)
    }

    /// [A, G] applied to v, given A as a closure.
    fn commutator_g(
        &self,
        a: impl Fn(&[Complex64]) -> Vec<Complex64>,
        v: &[Complex64],
    ) -> Vec<Complex64> {
        let agv = a(&self.apply(&self.g, v));
        let gav = self.apply(&self.g, &a(v));
        sub(&agv, &gav)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeComponents {
    /// ⟨sig₁|sig₁⟩
    pub sig1_sq: f64,
    /// ⟨sig₀|sig₂⟩ + c.c.
    pub sig0_sig2: f64,
    /// ⟨sig₀|sig₀⟩
    pub sig0_sq: f64,
    /// 2 Re⟨sig₀|sig₁⟩, zero by MIR photon-number parity
    pub sig0_sig1: f64,
    pub boundary_population: f64,
    pub perturbative: bool,
}

impl PerturbativeComponents {
    pub fn variance(&self) -> f64 {
        self.sig0_sq + self.sig0_sig1 + self.sig1_sq + self.sig0_sig2
    }
}

pub fn perturbative_components(model: &ThreeModeModel) -> Result<PerturbativeComponents> {
    let st = Setup::new(model)?;
    let s = model.signal(0);
    let (o1, o2) = st.outs();
    let sig0 = st.apply(&s, &st.psi);
    let sig1 = st.apply(&s, &o1);
    let sig2 = st.apply(&s, &o2);
    let mut full = st.psi.clone();
    axpy(&mut full, Complex64::new(1.0, 0.0), &o1);
    axpy(&mut full, Complex64::new(1.0, 0.0), &o2);
    Ok(PerturbativeComponents {
        sig1_sq: norm_sqr(&sig1),
        sig0_sig2: 2.0 * inner(&sig0, &sig2).re,
        sig0_sq: norm_sqr(&sig0),
        sig0_sig1: 2.0 * inner(&sig0, &sig1).re,
        boundary_population: st.space.boundary_population(&full),
        perturbative: model.perturbative(),
    })
}

/// ⟨S²⟩ through second order in the couplings.
pub fn perturbative_variance(model: &ThreeModeModel) -> Result<f64> {
    Ok(perturbative_components(model)?.variance())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergVariances {
    /// ⟨[Ŝ⁽¹⁾]²⟩ with Ŝ⁽¹⁾ = [S, ln U]
    pub s1_sq: f64,
    /// ⟨Ŝ⁽²⁾Ŝ⁽⁰⁾ + Ŝ⁽⁰⁾Ŝ⁽²⁾⟩ with Ŝ⁽²⁾ = ½[Ŝ⁽¹⁾, ln U]
    pub s2s0_sym: f64,
    /// largest anti-Hermitian part of ⟨Ŝ⁽¹⁾²⟩ or the symmetric product
    pub imag_residue: f64,
}

pub fn heisenberg_variances(model: &ThreeModeModel) -> Result<HeisenbergVariances> {
    let st = Setup::new(model)?;
    let s = model.signal(0);
    let s0 = |v: &[Complex64]| st.apply(&s, v);
    let s1 = |v: &[Complex64]| st.commutator_g(s0, v);
    let s2 = |v: &[Complex64]| scale(&st.commutator_g(s1, v), Complex64::new(0.5, 0.0));
    let s1psi = s1(&st.psi);
    let s1s1 = inner(&st.psi, &s1(&s1psi));
    let s2psi = s2(&st.psi);
    let s0psi = s0(&st.psi);
    let sym = inner(&st.psi, &s2(&s0psi)) + inner(&st.psi, &s0(&s2psi));
    Ok(HeisenbergVariances {
        s1_sq: s1s1.re,
        s2s0_sym: sym.re,
        imag_residue: s1s1.im.abs().max(sym.im.abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactVariance {
    pub variance: f64,
    /// |‖U ψ‖² − 1|
    pub norm_defect: f64,
    pub boundary_population: f64,
}

/// e^{G}ψ by scaling the step until ‖G‖·h ≤ ½ and summing each step's
/// Taylor series to machine precision.
pub fn expm_apply(op: &Operator, space: &FockSpace, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = op.one_norm(space);
    if !norm.is_finite() {
        return Err(Error::Expm { norm });
    }
    let steps = (2.0 * norm).ceil().max(1.0);
    if steps > 1e6 {
        return Err(Error::Expm { norm });
    }
    let h = Complex64::new(1.0 / steps, 0.0);
    let mut v = psi.to_vec();
    for _ in 0..steps as usize {
        let mut term = v.clone();
        let mut sum = v.clone();
        let base = norm_sqr(&v).sqrt();
        let mut ok = false;
        for k in 1..=60 {
            term = scale(&op.apply(space, &term), h / k as f64);
            axpy(&mut sum, Complex64::new(1.0, 0.0), &term);
            if norm_sqr(&term).sqrt() <= 1e-17 * base {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Expm { norm });
        }
        v = sum;
    }
    Ok(v)
}

/// ⟨S²⟩ after the full evolution U = e^{ln U}.
pub fn exact_variance(model: &ThreeModeModel) -> Result<ExactVariance> {
    let st = Setup::new(model)?;
    let out = expm_apply(&st.g, &st.space, &st.psi)?;
    let sig = st.apply(&model.signal(0), &out);
    Ok(ExactVariance {
        variance: norm_sqr(&sig),
        norm_defect: (norm_sqr(&out) - 1.0).abs(),
        boundary_population: st.space.boundary_population(&out),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoChannelOracle {
    /// 2 Re⟨S₁ out₁|S₂ out₁⟩
    pub cross_sig1: f64,
    /// second-order cross terms between |ψ⟩ and |out₂⟩
    pub cross_sig02: f64,
    /// Re⟨S₁ψ|S₂ψ⟩, the base shot-noise correlation
    pub base_cross: f64,
    pub boundary_population: f64,
}

pub fn two_channel_oracle(model: &ThreeModeModel) -> Result<TwoChannelOracle> {
    if model.channels.len() != 2 {
        return Err(Error::invalid(
            "channels",
            "the two-channel oracle needs two channels",
        ));
    }
    let st = Setup::new(model)?;
    let (s1, s2) = (model.signal(0), model.signal(1));
    let (o1, o2) = st.outs();
    let a1 = st.apply(&s1, &o1);
    let b1 = st.apply(&s2, &o1);
    let s1psi = st.apply(&s1, &st.psi);
    let s2psi = st.apply(&s2, &st.psi);
    let s1o2 = st.apply(&s1, &o2);
    let s2o2 = st.apply(&s2, &o2);
    let cross02 =
        inner(&s1psi, &s2o2) + inner(&s2o2, &s1psi) + inner(&s1o2, &s2psi) + inner(&s2psi, &s1o2);
    let mut full = st.psi.clone();
    axpy(&mut full, Complex64::new(1.0, 0.0), &o1);
    axpy(&mut full, Complex64::new(1.0, 0.0), &o2);
    Ok(TwoChannelOracle {
        cross_sig1: 2.0 * inner(&a1, &b1).re,
        cross_sig02: cross02.re,
        base_cross: inner(&s1psi, &s2psi).re,
        boundary_population: st.space.boundary_population(&full),
    })
}

/// Closed forms the matrix evaluations are checked against.
pub mod closed_form {
    use num_complex::Complex64;

    fn mix(a: Complex64, c: Complex64) -> f64 {
        (a * c + a.conj() * c.conj()).re
    }

    /// |α|² + (2|𝒜|² − 𝒜𝒞 − 𝒜*𝒞*)|α|⁴
    pub fn variance(a: Complex64, c: Complex64, alpha: Complex64) -> f64 {
        let n = alpha.norm_sqr();
        n + (2.0 * a.norm_sqr() - mix(a, c)) * n * n
    }

    /// |𝒜|²|α|²(1 + 3|α|²)
    pub fn sig1_sq(a: Complex64, alpha: Complex64) -> f64 {
        let n = alpha.norm_sqr();
        a.norm_sqr() * n * (1.0 + 3.0 * n)
    }

    /// −|𝒜|²|α|² − (|𝒜|² + 𝒜𝒞 + 𝒜*𝒞*)|α|⁴
    pub fn sig0_sig2(a: Complex64, c: Complex64, alpha: Complex64) -> f64 {
        let n = alpha.norm_sqr();
        -a.norm_sqr() * n - (a.norm_sqr() + mix(a, c)) * n * n
    }

    /// (|𝒜|² + |𝒞|² − 𝒜𝒞 − 𝒜*𝒞*)(|α|² + |α|⁴)
    pub fn s1_sq(a: Complex64, c: Complex64, alpha: Complex64) -> f64 {
        let n = alpha.norm_sqr();
        (a.norm_sqr() + c.norm_sqr() - mix(a, c)) * (n + n * n)
    }

    /// −(|𝒜|² + |𝒞|² − 𝒜𝒞 − 𝒜*𝒞*)|α|² + (|𝒜|² − |𝒞|²)|α|⁴
    pub fn s2s0_sym(a: Complex64, c: Complex64, alpha: Complex64) -> f64 {
        let n = alpha.norm_sqr();
        -(a.norm_sqr() + c.norm_sqr() - mix(a, c)) * n + (a.norm_sqr() - c.norm_sqr()) * n * n
    }

    /// 2(𝒜₁*𝒜₂ + 𝒜₁𝒜₂*)|α₁α₂|²
    pub fn cross_sig1(a1: Complex64, a2: Complex64, alpha1: Complex64, alpha2: Complex64) -> f64 {
        2.0 * (a1.conj() * a2 + a1 * a2.conj()).re * (alpha1 * alpha2).norm_sqr()
    }

    /// −(𝒜₁𝒞₂ + 𝒜₂𝒞₁ + 𝒜₁*𝒞₂* + 𝒜₂*𝒞₁*)|α₁α₂|²
    pub fn cross_sig02(
        a1: Complex64,
        c1: Complex64,
        a2: Complex64,
        c2: Complex64,
        alpha1: Complex64,
        alpha2: Complex64,
    ) -> f64 {
        -(mix(a1, c2) + mix(a2, c1)) * (alpha1 * alpha2).norm_sqr()
    }
}
