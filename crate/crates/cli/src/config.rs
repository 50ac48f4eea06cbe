//! TOML parameter files layered over a preset.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use eos_core::params::{DispersionModel, ParameterSet, ProbeSpectrum, SetLabel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub crystal: CrystalSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub center_thz: Option<f64>,
    pub bandwidth_thz: Option<f64>,
    pub photons: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub length_um: Option<f64>,
    pub r41_pm_per_v: Option<f64>,
    pub n: Option<f64>,
    pub n_g: Option<f64>,
    pub w0_um: Option<f64>,
    /// "set1", "set2" or a path to a two-column (ν THz, n) CSV file
    pub dispersion: Option<String>,
    pub absorption: Option<bool>,
    pub mir_window_thz: Option<[f64; 2]>,
}

/// Flat record of the parameters a run used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedParams {
    pub label: String,
    pub probe_center_thz: f64,
    pub probe_bandwidth_thz: f64,
    pub probe_omega_p_thz: f64,
    pub probe_photons: f64,
    pub crystal_length_um: f64,
    pub crystal_r41_pm_per_v: f64,
    pub crystal_n: f64,
    pub crystal_n_g: f64,
    pub crystal_w0_um: f64,
    pub crystal_dispersion: String,
    pub crystal_absorption: bool,
    pub crystal_mir_window_thz: [f64; 2],
}

impl ResolvedParams {
    pub fn from_params(p: &ParameterSet) -> Self {
        let c = &p.crystal;
        ResolvedParams {
            label: p.label.as_str().to_string(),
            probe_center_thz: p.probe.center_thz,
            probe_bandwidth_thz: p.probe.bandwidth_thz,
            probe_omega_p_thz: eos_core::params::thz_from_omega(p.probe.omega_p()),
            probe_photons: p.probe.photons_per_pulse,
            crystal_length_um: c.length_um,
            crystal_r41_pm_per_v: c.r41_pm_per_v,
            crystal_n: c.n,
            crystal_n_g: c.n_g,
            crystal_w0_um: c.w0_um,
            crystal_dispersion: c.dispersion.name().to_string(),
            crystal_absorption: c.absorption_enabled,
            crystal_mir_window_thz: c.mir_window_thz,
        }
    }
}

pub fn preset(set: u8) -> anyhow::Result<ParameterSet> {
    match set {
        1 => Ok(ParameterSet::set1()),
        2 => Ok(ParameterSet::set2()),
        other => bail!("unknown parameter set {other}; expected 1 or 2"),
    }
}

pub fn load(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn read_dispersion_table(path: &Path) -> anyhow::Result<DispersionModel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening dispersion table {}", path.display()))?;
    let (mut nu, mut n) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: Option<(f64, f64)> = match (rec.get(0), rec.get(1)) {
            (Some(a), Some(b)) => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some((a, b)) => {
                nu.push(a);
                n.push(b);
            }
            // a header line is allowed before the data
            None if i == 0 => {}
            None => bail!("{}: row {} is not a (ν, n) pair", path.display(), i + 1),
        }
    }
    Ok(DispersionModel::tabulated(nu, n)?)
}

/// Applies every key present in `cfg` to `base`; the label becomes Custom
/// when anything changed.
pub fn apply(base: ParameterSet, cfg: &ConfigFile, dir: &Path) -> anyhow::Result<ParameterSet> {
    let mut p = base;
    let before = p.clone();
    let pr = &cfg.probe;
    if pr.center_thz.is_some() || pr.bandwidth_thz.is_some() {
        let center = pr.center_thz.unwrap_or(p.probe.center_thz);
        let bw = pr.bandwidth_thz.unwrap_or(p.probe.bandwidth_thz);
        p.probe = ProbeSpectrum::rectangular(center, bw, p.probe.photons_per_pulse)?;
    }
    if let Some(n) = pr.photons {
        p = p.with_photons(n);
    }
    let c = &cfg.crystal;
    let cr = &mut p.crystal;
    if let Some(v) = c.length_um {
        cr.length_um = v;
    }
    if let Some(v) = c.r41_pm_per_v {
        cr.r41_pm_per_v = v;
    }
    if let Some(v) = c.n {
        cr.n = v;
    }
    if let Some(v) = c.n_g {
        cr.n_g = v;
    }
    if let Some(v) = c.w0_um {
        cr.w0_um = v;
    }
    if let Some(v) = c.absorption {
        cr.absorption_enabled = v;
    }
    if let Some(v) = c.mir_window_thz {
        cr.mir_window_thz = v;
    }
    if let Some(d) = &c.dispersion {
        cr.dispersion = match d.as_str() {
            "set1" => DispersionModel::set1(),
            "set2" => DispersionModel::set2(),
            path => {
                let mut pb = PathBuf::from(path);
                if pb.is_relative() {
                    pb = dir.join(pb);
                }
                read_dispersion_table(&pb)?
            }
        };
    }
    if p != before {
        p.label = SetLabel::Custom;
    }
    p.validate()?;
    Ok(p)
}

/// Preset `set`, overlaid with the config file when one is given.
pub fn resolve(set: u8, config: Option<&Path>) -> anyhow::Result<ParameterSet> {
    let base = preset(set)?;
    match config {
        None => Ok(base),
        Some(path) => {
            let cfg = load(path)?;
            let dir = path.parent().unwrap_or(Path::new("."));
            apply(base, &cfg, dir)
        }
    }
}
