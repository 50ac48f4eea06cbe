//! Physical constants, probe and crystal parameter sets, dispersion and
//! absorption models.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Speed of light in µm/ps.
pub const C0_UM_PER_PS: f64 = 299.792_458;

/// Angular frequency in rad/ps for a linear frequency in THz.
pub fn omega_from_thz(nu: f64) -> f64 {
    2.0 * PI * nu
}

/// Linear frequency in THz for an angular frequency in rad/ps.
pub fn thz_from_omega(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// m/s
    pub c0: f64,
    /// J·s
    pub hbar: f64,
    /// F/m
    pub eps0: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        c0: 299_792_458.0,
        hbar: 1.054_571_817e-34,
        eps0: 8.854_187_812_8e-12,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumShape {
    /// Flat amplitude on [ν_c − Δν/2, ν_c + Δν/2].
    Rectangular,
    /// Piecewise-linear amplitude on a sorted THz grid, normalized on construction.
    Tabulated(TabulatedSpectrum),
}

/// Amplitude samples on a strictly increasing, strictly positive frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    nu_thz: Vec<f64>,
    amplitude: Vec<f64>,
}

impl TabulatedSpectrum {
    /// Builds a spectrum and rescales the amplitude so that ∫₀^∞|α(ω)|²dω = 1
    /// with ω in rad/ps.
    pub fn new(nu_thz: Vec<f64>, amplitude: Vec<f64>) -> Result<Self> {
        if nu_thz.len() < 2 || nu_thz.len() != amplitude.len() {
            return Err(Error::invalid(
                "probe.shape",
                "needs at least two (ν, amplitude) samples of equal length",
            ));
        }
        if nu_thz[0] <= 0.0 {
            return Err(Error::invalid(
                "probe.shape",
                "support must be strictly positive",
            ));
        }
        if nu_thz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "probe.shape",
                "grid must be strictly increasing",
            ));
        }
        if amplitude.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("probe.shape", "amplitudes must be finite"));
        }
        let mut s = TabulatedSpectrum { nu_thz, amplitude };
        let kappa = s.raw_kappa();
        if kappa <= 0.0 {
            return Err(Error::invalid("probe.shape", "spectrum has zero energy"));
        }
        let scale = 1.0 / kappa.sqrt();
        for a in &mut s.amplitude {
            *a *= scale;
        }
        Ok(s)
    }

    fn raw_kappa(&self) -> f64 {
        let w = self.omega_grid();
        w.windows(2)
            .zip(self.amplitude.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] * y[0] + y[0] * y[1] + y[1] * y[1]) / 3.0)
            .sum()
    }

    pub fn nu_thz(&self) -> &[f64] {
        &self.nu_thz
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    /// Grid as angular frequencies in rad/ps.
    pub fn omega_grid(&self) -> Vec<f64> {
        self.nu_thz.iter().map(|&v| omega_from_thz(v)).collect()
    }
}

/// Probe amplitude shape with flat spectral phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpectrum {
    pub center_thz: f64,
    pub bandwidth_thz: f64,
    pub shape: SpectrumShape,
    pub photons_per_pulse: f64,
}

impl ProbeSpectrum {
    pub fn rectangular(center_thz: f64, bandwidth_thz: f64, photons: f64) -> Result<Self> {
        let p = ProbeSpectrum {
            center_thz,
            bandwidth_thz,
            shape: SpectrumShape::Rectangular,
            photons_per_pulse: photons,
        };
        p.validate()?;
        Ok(p)
    }

    /// Rectangular spectrum whose mean inverse frequency β/κ equals 1/ω_p.
    pub fn rectangular_from_omega_p(
        nu_p_thz: f64,
        bandwidth_thz: f64,
        photons: f64,
    ) -> Result<Self> {
        if !(nu_p_thz > 0.0 && bandwidth_thz > 0.0) {
            return Err(Error::invalid(
                "probe",
                "ω_p and bandwidth must be positive",
            ));
        }
        let x = bandwidth_thz / nu_p_thz;
        let center = 0.5 * bandwidth_thz / (0.5 * x).tanh();
        Self::rectangular(center, bandwidth_thz, photons)
    }

    /// Tabulated spectrum; center and bandwidth describe the grid extent.
    pub fn tabulated(tab: TabulatedSpectrum, photons: f64) -> Result<Self> {
        let lo = tab.nu_thz[0];
        let hi = *tab.nu_thz.last().unwrap_or(&lo);
        let p = ProbeSpectrum {
            center_thz: 0.5 * (lo + hi),
            bandwidth_thz: hi - lo,
            shape: SpectrumShape::Tabulated(tab),
            photons_per_pulse: photons,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_thz > 0.0) {
            return Err(Error::invalid("probe.bandwidth_thz", "must be positive"));
        }
        if !(self.center_thz - 0.5 * self.bandwidth_thz > 0.0) {
            return Err(Error::invalid(
                "probe.center_thz",
                "support must be strictly positive (center > bandwidth/2)",
            ));
        }
        if !(self.photons_per_pulse > 0.0) {
            return Err(Error::invalid("probe.photons", "must be positive"));
        }
        Ok(())
    }

    pub fn with_photons(&self, photons: f64) -> Self {
        ProbeSpectrum {
            photons_per_pulse: photons,
            ..self.clone()
        }
    }

    pub fn omega_c(&self) -> f64 {
        omega_from_thz(self.center_thz)
    }

    pub fn delta_omega(&self) -> f64 {
        omega_from_thz(self.bandwidth_thz)
    }

    /// Positive-frequency support [lo, hi] in rad/ps.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            SpectrumShape::Rectangular => {
                let h = 0.5 * self.delta_omega();
                (self.omega_c() - h, self.omega_c() + h)
            }
            SpectrumShape::Tabulated(t) => {
                let w = t.omega_grid();
                (w[0], w[w.len() - 1])
            }
        }
    }

    /// Normalized amplitude α_p(ω) for ω ≥ 0 (zero for ω < 0).
    pub fn amplitude(&self, omega: f64) -> f64 {
        match &self.shape {
            SpectrumShape::Rectangular => {
                let (a, b) = self.support();
                if omega >= a && omega <= b {
                    1.0 / self.delta_omega().sqrt()
                } else {
                    0.0
                }
            }
            SpectrumShape::Tabulated(t) => {
                crate::math::interp_linear(&t.omega_grid(), t.amplitude(), omega)
            }
        }
    }

    /// κ = ∫₀^∞|α_p|²dω, equal to one by construction.
    pub fn kappa(&self) -> f64 {
        match &self.shape {
            SpectrumShape::Rectangular => 1.0,
            SpectrumShape::Tabulated(t) => t.raw_kappa(),
        }
    }

    /// β = ∫₀^∞|α_p|²/ω dω.
    pub fn beta(&self) -> f64 {
        match &self.shape {
            SpectrumShape::Rectangular => {
                let (a, b) = self.support();
                (b / a).ln() / self.delta_omega()
            }
            SpectrumShape::Tabulated(t) => {
                const X: [f64; 5] = [
                    -0.906_179_845_938_664,
                    -0.538_469_310_105_683,
                    0.0,
                    0.538_469_310_105_683,
                    0.906_179_845_938_664,
                ];
                const W: [f64; 5] = [
                    0.236_926_885_056_189,
                    0.478_628_670_499_366,
                    0.568_888_888_888_889,
                    0.478_628_670_499_366,
                    0.236_926_885_056_189,
                ];
                let w = t.omega_grid();
                let y = t.amplitude();
                let mut acc = 0.0;
                for k in 0..w.len() - 1 {
                    let (c, h) = (0.5 * (w[k] + w[k + 1]), 0.5 * (w[k + 1] - w[k]));
                    for (x, wt) in X.iter().zip(W.iter()) {
                        let om = c + h * x;
                        let a = y[k] + (om - w[k]) / (w[k + 1] - w[k]) * (y[k + 1] - y[k]);
                        acc += wt * h * a * a / om;
                    }
                }
                acc
            }
        }
    }

    /// Effective probe frequency ω_p = κ/β in rad/ps.
    pub fn omega_p(&self) -> f64 {
        self.kappa() / self.beta()
    }

    /// Closed form Δω / ln[(ω_c+Δω/2)/(ω_c−Δω/2)].
    pub fn omega_p_rectangular_closed_form(&self) -> f64 {
        let h = 0.5 * self.delta_omega();
        let wc = self.omega_c();
        self.delta_omega() / ((wc + h) / (wc - h)).ln()
    }
}

/// MIR refractive-index model. Arguments are angular frequencies in rad/ps;
/// ν̃ = |Ω|/2π in THz.
#[derive(Debug, Clone, PartialEq)]
pub enum DispersionModel {
    Set1Lorentzian {
        eps_inf: f64,
        f_long: f64,
        f_trans: f64,
        damping: f64,
    },
    /// Coefficients c6..c0 of a polynomial in ν̃.
    Set2Polynomial { coeffs: [f64; 7] },
    /// (ν̃, n) samples, linearly interpolated.
    Tabulated { nu_thz: Vec<f64>, n: Vec<f64> },
}

impl DispersionModel {
    pub fn set1() -> Self {
        DispersionModel::Set1Lorentzian {
            eps_inf: 6.7,
            f_long: 6.2,
            f_trans: 5.3,
            damping: 0.09,
        }
    }

    pub fn set2() -> Self {
        DispersionModel::Set2Polynomial {
            coeffs: [-0.0164, 0.1478, -0.5185, 0.8974, -0.7782, 0.3283, 3.0657],
        }
    }

    pub fn tabulated(nu_thz: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        if nu_thz.len() < 2 || nu_thz.len() != n.len() {
            return Err(Error::invalid(
                "crystal.dispersion",
                "needs at least two (ν, n) rows",
            ));
        }
        if nu_thz[0] < 0.0 || nu_thz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "crystal.dispersion",
                "frequencies must be nonnegative and strictly increasing",
            ));
        }
        if n.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::invalid(
                "crystal.dispersion",
                "indices must be positive",
            ));
        }
        Ok(DispersionModel::Tabulated { nu_thz, n })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DispersionModel::Set1Lorentzian { .. } => "set1 Lorentzian",
            DispersionModel::Set2Polynomial { .. } => "set2 polynomial",
            DispersionModel::Tabulated { .. } => "tabulated dispersion",
        }
    }

    /// Validity window [lo, hi] in THz of |ν̃|.
    pub fn validity_thz(&self) -> (f64, f64) {
        match self {
            DispersionModel::Set1Lorentzian { .. } => (0.0, 150.0),
            DispersionModel::Set2Polynomial { .. } => (0.0, 3.0),
            DispersionModel::Tabulated { nu_thz, .. } => (nu_thz[0], nu_thz[nu_thz.len() - 1]),
        }
    }

    pub fn refractive_index(&self, omega: f64) -> Result<f64> {
        let nu = thz_from_omega(omega).abs();
        let (lo, hi) = self.validity_thz();
        if !(nu >= lo && nu <= hi) {
            return Err(Error::Domain {
                model: self.name(),
                nu_thz: nu,
                lo_thz: lo,
                hi_thz: hi,
            });
        }
        Ok(match self {
            DispersionModel::Set1Lorentzian {
                eps_inf,
                f_long,
                f_trans,
                damping,
            } => {
                let den = Complex64::new(f_trans * f_trans - nu * nu, -damping * nu);
                let eps = (Complex64::new(f_long * f_long - f_trans * f_trans, 0.0) / den + 1.0)
                    * eps_inf;
                eps.sqrt().re
            }
            DispersionModel::Set2Polynomial { coeffs } => {
                coeffs.iter().fold(0.0, |acc, c| acc * nu + c)
            }
            DispersionModel::Tabulated { nu_thz, n } => crate::math::interp_linear(nu_thz, n, nu),
        })
    }
}

/// exp[−0.000618 ν̃⁸ − 0.0000879 ν̃⁶] with ν̃ = |Ω|/2π in THz.
pub fn absorption(omega: f64) -> f64 {
    let v2 = {
        let v = thz_from_omega(omega);
        v * v
    };
    let v6 = v2 * v2 * v2;
    (-0.000_618 * v6 * v2 - 0.000_087_9 * v6).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalParams {
    pub length_um: f64,
    pub r41_pm_per_v: f64,
    pub n: f64,
    pub n_g: f64,
    pub w0_um: f64,
    pub dispersion: DispersionModel,
    pub absorption_enabled: bool,
    /// [ν_min, ν_max] in THz.
    pub mir_window_thz: [f64; 2],
}

/// Rayleigh-length comparison at one window edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinCrystalEdge {
    pub nu_thz: f64,
    pub rayleigh_um: f64,
    pub satisfied: bool,
}

impl CrystalParams {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.mir_window_thz;
        if !(lo >= 0.0) {
            return Err(Error::invalid(
                "crystal.mir_window_thz",
                "ν_min must be ≥ 0",
            ));
        }
        if !(hi > lo) {
            return Err(Error::invalid(
                "crystal.mir_window_thz",
                "ν_max must exceed ν_min",
            ));
        }
        for (name, v) in [
            ("crystal.length_um", self.length_um),
            ("crystal.n", self.n),
            ("crystal.n_g", self.n_g),
            ("crystal.w0_um", self.w0_um),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "must be positive and finite"));
            }
        }
        if !(self.r41_pm_per_v != 0.0 && self.r41_pm_per_v.is_finite()) {
            return Err(Error::invalid(
                "crystal.r41_pm_per_v",
                "must be nonzero and finite",
            ));
        }
        Ok(())
    }

    /// Effective susceptibility d = −n⁴ r41 in pm/V.
    pub fn d(&self) -> f64 {
        -self.n.powi(4) * self.r41_pm_per_v
    }

    pub fn absorption_factor(&self, omega: f64) -> f64 {
        if self.absorption_enabled {
            absorption(omega)
        } else {
            1.0
        }
    }

    /// Checks L ≪ n_Λ Λ w0²/(2c0) at the nonzero window edges (clamped into the
    /// dispersion model's range).
    pub fn thin_crystal_check(&self) -> Vec<ThinCrystalEdge> {
        let (_, vhi) = self.dispersion.validity_thz();
        self.mir_window_thz
            .iter()
            .filter(|&&nu| nu > 0.0)
            .map(|&nu| {
                let nu_eval = nu.min(vhi);
                let lam = omega_from_thz(nu_eval);
                let n = self.dispersion.refractive_index(lam).unwrap_or(self.n);
                let rayleigh_um = n * lam * self.w0_um * self.w0_um / (2.0 * C0_UM_PER_PS);
                ThinCrystalEdge {
                    nu_thz: nu,
                    rayleigh_um,
                    satisfied: self.length_um < rayleigh_um,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetLabel {
    Set1,
    Set2,
    Custom,
}

impl SetLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SetLabel::Set1 => "set1",
            SetLabel::Set2 => "set2",
            SetLabel::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub probe: ProbeSpectrum,
    pub crystal: CrystalParams,
    pub label: SetLabel,
}

impl ParameterSet {
    /// ω_p/2π = 247 THz, Δν = 150 THz, 7 µm crystal, 3 µm waist.
    pub fn set1() -> Self {
        ParameterSet {
            probe: ProbeSpectrum::rectangular_from_omega_p(247.0, 150.0, 1e8)
                .expect("set1 probe is valid"),
            crystal: CrystalParams {
                length_um: 7.0,
                r41_pm_per_v: 3.9,
                n: 2.76,
                n_g: 2.9,
                w0_um: 3.0,
                dispersion: DispersionModel::set1(),
                absorption_enabled: false,
                mir_window_thz: [18.0, 150.0],
            },
            label: SetLabel::Set1,
        }
    }

    /// ω_p/2π = 375 THz, Δν = 2.77 THz, 3 mm crystal, 125 µm waist.
    pub fn set2() -> Self {
        ParameterSet {
            probe: ProbeSpectrum::rectangular_from_omega_p(375.0, 2.77, 1e8)
                .expect("set2 probe is valid"),
            crystal: CrystalParams {
                length_um: 3000.0,
                r41_pm_per_v: 3.9,
                n: 2.85,
                n_g: 3.18,
                w0_um: 125.0,
                dispersion: DispersionModel::set2(),
                absorption_enabled: true,
                mir_window_thz: [0.0, 10.0],
            },
            label: SetLabel::Set2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.probe.validate()?;
        self.crystal.validate()
    }

    pub fn with_photons(&self, photons: f64) -> Self {
        ParameterSet {
            probe: self.probe.with_photons(photons),
            ..self.clone()
        }
    }

    pub fn with_waist(&self, w0_um: f64) -> Self {
        let mut p = self.clone();
        p.crystal.w0_um = w0_um;
        p
    }

    pub fn with_absorption(&self, enabled: bool) -> Self {
        let mut p = self.clone();
        p.crystal.absorption_enabled = enabled;
        p
    }

    pub fn describe(&self) -> String {
        alloc::format!(
            "{} (ν_c = {:.4} THz, Δν = {} THz, L = {} µm, w0 = {} µm)",
            self.label.as_str(),
            self.probe.center_thz,
            self.probe.bandwidth_thz,
            self.crystal.length_um,
            self.crystal.w0_um
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_dc_limit() {
        let n = DispersionModel::set1().refractive_index(0.0).unwrap();
        assert!((n - 6.7f64.sqrt() * 6.2 / 5.3).abs() < 1e-12);
        assert!((n - 3.028).abs() < 1e-3);
    }

    #[test]
    fn polynomial_constant_term() {
        assert_eq!(
            DispersionModel::set2().refractive_index(0.0).unwrap(),
            3.0657
        );
    }

    #[test]
    fn outside_window_names_it() {
        let err = DispersionModel::set2()
            .refractive_index(omega_from_thz(4.0))
            .unwrap_err();
        match err {
            Error::Domain { lo_thz, hi_thz, .. } => assert_eq!((lo_thz, hi_thz), (0.0, 3.0)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn absorption_values() {
        assert_eq!(absorption(0.0), 1.0);
        let expected = (-0.000618f64 * 256.0 - 0.0000879 * 64.0).exp();
        assert!((absorption(omega_from_thz(2.0)) - expected).abs() < 1e-15);
        assert!((expected - 0.8489).abs() < 1e-4);
        let mut c = ParameterSet::set2().crystal;
        c.absorption_enabled = false;
        assert_eq!(c.absorption_factor(omega_from_thz(2.0)), 1.0);
    }

    #[test]
    fn presets_hit_quoted_omega_p() {
        let s1 = ParameterSet::set1();
        assert!((thz_from_omega(s1.probe.omega_p()) - 247.0).abs() < 1e-9);
        let s2 = ParameterSet::set2();
        assert!((thz_from_omega(s2.probe.omega_p()) - 375.0).abs() < 1e-9);
        assert!(s1.probe.center_thz > 247.0);
    }

    #[test]
    fn d_is_recomputed() {
        let mut c = ParameterSet::set1().crystal;
        assert!((c.d() + 2.76f64.powi(4) * 3.9).abs() < 1e-12);
        c.n = 2.0;
        assert!((c.d() + 16.0 * 3.9).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(ProbeSpectrum::rectangular(50.0, 150.0, 1.0).is_err());
        let mut c = ParameterSet::set1().crystal;
        c.mir_window_thz = [5.0, 5.0];
        assert!(c.validate().is_err());
        c.mir_window_thz = [-1.0, 5.0];
        assert!(c.validate().is_err());
    }

    #[test]
    fn tabulated_normalization_and_omega_p() {
        let nu: Vec<f64> = (0..=200).map(|k| 100.0 + k as f64).collect();
        let amp = alloc::vec![1.0; nu.len()];
        let tab = TabulatedSpectrum::new(nu, amp).unwrap();
        let p = ProbeSpectrum::tabulated(tab, 1.0).unwrap();
        assert!((p.kappa() - 1.0).abs() < 1e-12);
        let rect = ProbeSpectrum::rectangular(200.0, 200.0, 1.0).unwrap();
        assert!((p.omega_p() / rect.omega_p() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn thin_crystal_flags() {
        let edges = ParameterSet::set2().crystal.thin_crystal_check();
        assert_eq!(edges.len(), 1);
        assert!(edges[0].rayleigh_um > 0.0);
    }
}
