use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context};
use eos_core::fock::{self, Channel, Cutoffs, ThreeModeModel};
use eos_core::kernels::KernelContext;
use eos_core::params::{omega_from_thz, thz_from_omega, ParameterSet};
use eos_core::quad::QuadratureConfig;
use eos_core::single_channel::{self as sc, BreakdownOptions, Chi3Params, Coefficients, Term};
use eos_core::two_channel::{
    self as tc, PhotonConvention, TracePlan, TwoChannelConfig, TwoChannelTerm,
};
use eos_core::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{self, Cli, Command, Common};
use crate::config::{self, ResolvedParams};
use crate::output::{self, Manifest, Table, Tolerances};

/// What a command produced, before it is written anywhere.
struct Artifact {
    body: Body,
    params: Option<ParameterSet>,
    settings: Value,
    convergence: BTreeMap<String, bool>,
}

enum Body {
    Table(Table),
    Json(Value),
}

pub fn execute(cli: Cli) -> anyhow::Result<i32> {
    let common = &cli.common;
    let cfg = common.quadrature();
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build()?;

    let started = Instant::now();
    let (name, artifact) = match &cli.command {
        Command::SweepN(a) => ("sweep-n", sweep_n(common, &cfg, a)?),
        Command::WaistSweep(a) => (
            "waist-sweep",
            pool.install(|| waist_sweep(common, &cfg, a))?,
        ),
        Command::Gating(a) => ("gating", gating(common, a)?),
        Command::Correlate(a) => ("correlate", pool.install(|| correlate(common, &cfg, a))?),
        Command::Chi3(a) => ("chi3", chi3(common, &cfg, a)?),
        Command::Oracle(a) => ("oracle", oracle(a)?),
        Command::Selftest => return selftest(&cfg),
    };
    let wall = started.elapsed().as_secs_f64();

    let converged = artifact.convergence.values().all(|&c| c);
    if common.strict && !converged {
        let bad: Vec<_> = artifact
            .convergence
            .iter()
            .filter(|(_, &c)| !c)
            .map(|(k, _)| k.as_str())
            .collect();
        eprintln!("error: quadrature did not converge for: {}", bad.join(", "));
        return Ok(1);
    }

    let bytes = match &artifact.body {
        Body::Table(t) => t.render(common.format)?,
        Body::Json(v) => {
            let mut b = serde_json::to_vec_pretty(v)?;
            b.push(b'\n');
            b
        }
    };
    let Some(out) = &common.out else {
        std::io::stdout().write_all(&bytes)?;
        if !converged {
            eprintln!("warning: some integrals did not reach the requested tolerance");
        }
        return Ok(0);
    };
    output::write_atomic(out, &bytes)?;
    let resolved = artifact.params.as_ref().map(ResolvedParams::from_params);
    let manifest = Manifest {
        command: name.to_string(),
        parameter_set: resolved
            .as_ref()
            .map_or_else(|| "none".to_string(), |r| r.label.clone()),
        config: serde_json::to_value(&resolved)?,
        tolerances: Tolerances {
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.abs_tol,
            max_subdivisions: cfg.max_subdivisions,
        },
        settings: artifact.settings,
        converged,
        convergence: serde_json::to_value(&artifact.convergence)?,
        outputs: vec![out.display().to_string()],
        hash: String::new(),
        wall_time_s: wall,
    }
    .seal()?;
    let mut m = serde_json::to_vec_pretty(&manifest)?;
    m.push(b'\n');
    output::write_atomic(&output::manifest_path(out), &m)?;
    if !converged {
        eprintln!("warning: some integrals did not reach the requested tolerance");
    }
    Ok(0)
}

fn params_for(common: &Common, default_set: u8) -> anyhow::Result<ParameterSet> {
    config::resolve(common.set.unwrap_or(default_set), common.config.as_deref())
}

fn grid(from: f64, to: f64, points: usize, log: bool) -> anyhow::Result<Vec<f64>> {
    if points == 0 {
        bail!("--points must be at least 1");
    }
    if !(from.is_finite() && to.is_finite() && to >= from) {
        bail!("grid bounds must be finite with from ≤ to");
    }
    if log && !(from > 0.0) {
        bail!("logarithmic grids need a positive lower bound");
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = |k: usize| k as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|k| match k {
            0 => from,
            k if k == points - 1 => to,
            k if log => (from.ln() + (to.ln() - from.ln()) * step(k)).exp(),
            k => from + (to - from) * step(k),
        })
        .collect())
}

fn term_convergence(c: &Coefficients) -> BTreeMap<String, bool> {
    c.integrals
        .iter()
        .map(|(t, r)| (t.label().to_string(), r.converged))
        .collect()
}

/// sign(v)·√|v|/N, so negative contributions stay visible.
fn signed_rms(v: f64, n: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    v.signum() * v.abs().sqrt() / n
}

fn sweep_n(common: &Common, cfg: &QuadratureConfig, a: &args::SweepN) -> anyhow::Result<Artifact> {
    let params = params_for(common, 1)?;
    let ctx = KernelContext::new(params.clone())?;
    let ns = grid(a.n_from, a.n_to, a.points, !a.linear)?;
    let coeffs = Coefficients::compute(&ctx, cfg)?;
    let chi3 = Chi3Params {
        x: a.chi3_x.unwrap_or(Chi3Params::LITERATURE_X),
        enabled: true,
    };
    let opts = BreakdownOptions {
        chi3,
        chi3_in_total: false,
    };
    let mut table = Table::new(&[
        "N",
        "rms_total_per_photon",
        "rms_sn",
        "rms_s1",
        "s2sq",
        "s3s1",
        "s2s0",
        "s4s0",
        "chi3",
    ]);
    for &n in &ns {
        let b = coeffs.breakdown(n, &opts)?;
        table.push(vec![
            n,
            b.rms_per_photon,
            b.rms_of(Term::S0S0),
            b.rms_of(Term::S1S1),
            signed_rms(b.get(Term::S2SQ), n),
            signed_rms(b.get(Term::S3S1), n),
            signed_rms(b.get(Term::S2S0), n),
            signed_rms(b.get(Term::S4S0), n),
            signed_rms(b.get(Term::Chi3), n),
        ]);
    }
    Ok(Artifact {
        body: Body::Table(table),
        settings: json!({
            "n_from": a.n_from, "n_to": a.n_to, "points": a.points,
            "spacing": if a.linear { "linear" } else { "log" },
            "chi3_x": chi3.x,
        }),
        convergence: term_convergence(&coeffs),
        params: Some(params),
    })
}

fn waist_sweep(
    common: &Common,
    cfg: &QuadratureConfig,
    a: &args::WaistSweep,
) -> anyhow::Result<Artifact> {
    let params = params_for(common, 1)?;
    let ctx = KernelContext::new(params.clone())?;
    let w0 = params.crystal.w0_um;
    let grid = grid(
        a.w0_from.unwrap_or(0.25 * w0),
        a.w0_to.unwrap_or(4.0 * w0),
        a.points,
        false,
    )?;
    if grid.iter().any(|&w| !(w > 0.0)) {
        bail!("waists must be positive");
    }
    let terms = [
        Term::S0S0,
        Term::S1S1,
        Term::S2S0,
        Term::S2SQ,
        Term::S3S1,
        Term::S4S0,
    ];
    let base = Coefficients::compute_terms(&ctx, cfg, &terms)?;
    let opts = BreakdownOptions::default();
    let rows = grid
        .par_iter()
        .map(|&w| sc::waist_sweep_from(&ctx, &base, &[w], &opts).map(|r| r[0]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&[
        "w0_um",
        "L_over_w0",
        "N_min",
        "rms_total",
        "rms_sn",
        "rms_s1",
    ]);
    for r in rows {
        table.push(vec![
            r.w0_um,
            r.l_over_w0,
            r.n_min,
            r.rms_total,
            r.rms_sn,
            r.rms_s1,
        ]);
    }
    Ok(Artifact {
        body: Body::Table(table),
        settings: json!({ "w0_um": grid, "n_bracket": sc::NMIN_BRACKET }),
        convergence: term_convergence(&base),
        params: Some(params),
    })
}

fn gating(common: &Common, a: &args::Gating) -> anyhow::Result<Artifact> {
    let params = params_for(common, 1)?;
    let ctx = KernelContext::new(params.clone())?;
    let [lo, hi] = ctx.band();
    let nus = grid(
        a.nu_from.unwrap_or(thz_from_omega(lo)),
        a.nu_to.unwrap_or(thz_from_omega(hi)),
        a.points,
        false,
    )?;
    let wp = ctx.omega_p();
    let zeta_scale = ctx.d().abs() * ctx.half_l_over_c0() * wp / params.crystal.n;
    let mut table = Table::new(&["nu_thz", "R_sq", "zeta_over_dLw", "abs"]);
    for &nu in &nus {
        let w = omega_from_thz(nu);
        let r = ctx.gating_r(w).with_context(|| format!("at {nu} THz"))?;
        let z = ctx.zeta(wp, w).with_context(|| format!("at {nu} THz"))?;
        table.push(vec![
            nu,
            r.norm_sqr(),
            z.norm() / zeta_scale,
            ctx.absorption(w),
        ]);
    }
    Ok(Artifact {
        body: Body::Table(table),
        settings: json!({ "nu_thz": [nus[0], nus[nus.len() - 1]], "points": a.points }),
        convergence: BTreeMap::new(),
        params: Some(params),
    })
}

fn parse_terms(names: &[String]) -> anyhow::Result<BTreeSet<TwoChannelTerm>> {
    names
        .iter()
        .map(|s| {
            let s = s.trim().to_ascii_lowercase();
            TwoChannelTerm::ALL
                .into_iter()
                .find(|t| t.label() == s)
                .with_context(|| format!("unknown term `{s}`"))
        })
        .collect()
}

fn correlate(
    common: &Common,
    cfg: &QuadratureConfig,
    a: &args::Correlate,
) -> anyhow::Result<Artifact> {
    let params = params_for(common, 2)?;
    let mut tcfg = TwoChannelConfig::new(a.photons);
    tcfg.tau_fs = tc::tau_grid(a.tau_max_fs, a.points);
    tcfg.absorption = a.absorption;
    if a.pre_splitter {
        tcfg.convention = PhotonConvention::PreSplitter;
    }
    if let Some(t) = &a.terms {
        tcfg.terms = parse_terms(t)?;
    }
    let plan = TracePlan::new(&params, &tcfg, cfg)?;
    let points = tcfg
        .tau_fs
        .par_iter()
        .map(|&t| plan.point(t))
        .collect::<Result<Vec<_>, _>>()?;
    let trace = plan.assemble(points)?;

    let mut cols = vec!["tau_fs"];
    cols.extend(TwoChannelTerm::ALL.iter().map(|t| t.label()));
    cols.extend(["g2", "g4", "G"]);
    let mut table = Table::new(&cols);
    let big_g = trace.big_g();
    for (i, &tau) in trace.tau_fs.iter().enumerate() {
        let mut row = vec![tau];
        row.extend(
            TwoChannelTerm::ALL
                .iter()
                .map(|t| trace.term(*t).map_or(0.0, |v| v[i])),
        );
        row.extend([trace.g_total_2nd[i], trace.g_total_4th[i], big_g[i]]);
        table.push(row);
    }
    let mut convergence = BTreeMap::new();
    for (i, &tau) in trace.tau_fs.iter().enumerate() {
        if !trace.converged[i] {
            convergence.insert(format!("tau={tau}"), false);
        }
    }
    convergence.insert("all_points".into(), trace.converged.iter().all(|&c| c));
    Ok(Artifact {
        body: Body::Table(table),
        settings: json!({
            "photons": a.photons,
            "photons_per_channel": trace.photons,
            "convention": if a.pre_splitter { "pre-splitter" } else { "per-channel" },
            "tau_max_fs": a.tau_max_fs,
            "points": a.points,
            "absorption": a.absorption,
            "terms": tcfg.terms.iter().map(|t| t.label()).collect::<Vec<_>>(),
            "normalization_m2_per_v2": trace.normalization,
            "order_ratio": trace.order_ratio(),
        }),
        convergence,
        params: Some(params),
    })
}

fn chi3(common: &Common, cfg: &QuadratureConfig, a: &args::Chi3) -> anyhow::Result<Artifact> {
    let params = params_for(common, 1)?;
    let ctx = KernelContext::new(params.clone())?;
    let ns = grid(a.n_from, a.n_to, a.points, !a.linear)?;
    let chi3 = Chi3Params {
        x: a.x.unwrap_or(Chi3Params::LITERATURE_X),
        enabled: true,
    };
    let coeffs = Coefficients::compute(&ctx, cfg)?;
    let opts = BreakdownOptions {
        chi3,
        chi3_in_total: false,
    };
    let mut table = Table::new(&["N", "var_chi3", "var_chi3_over_N3", "var_total", "rms_chi3"]);
    for &n in &ns {
        let b = coeffs.breakdown(n, &opts)?;
        let v = b.get(Term::Chi3);
        table.push(vec![n, v, v / (n * n * n), b.total, b.rms_of(Term::Chi3)]);
    }
    Ok(Artifact {
        body: Body::Table(table),
        settings: json!({
            "n_from": a.n_from, "n_to": a.n_to, "points": a.points,
            "spacing": if a.linear { "linear" } else { "log" },
            "chi3_x": chi3.x,
        }),
        convergence: term_convergence(&coeffs),
        params: Some(params),
    })
}

fn pick(v: &[f64], i: usize) -> f64 {
    v.get(i).or(v.last()).copied().unwrap_or(0.0)
}

fn cplx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn oracle(a: &args::Oracle) -> anyhow::Result<Artifact> {
    let channels: Vec<Channel> = (0..a.channels as usize)
        .map(|i| {
            Channel::new(
                Complex64::new(pick(&a.a_re, i), pick(&a.a_im, i)),
                Complex64::new(pick(&a.c_re, i), pick(&a.c_im, i)),
                Complex64::new(pick(&a.alpha, i), pick(&a.alpha_im, i)),
            )
        })
        .collect();
    let mut model = if a.channels == 1 {
        ThreeModeModel::single(channels[0].a, channels[0].c, channels[0].alpha)
    } else {
        ThreeModeModel::two_channel(channels[0], channels[1])
    };
    if let Some(c) = &a.cutoffs {
        let [probe, mir, nir] = c[..] else {
            bail!("--cutoffs takes three values: probe,mir,nir");
        };
        model = model.with_cutoffs(Cutoffs { probe, mir, nir });
    }
    model.validate()?;
    let ch = channels[0];
    let p = fock::perturbative_components(&model)?;
    let h = fock::heisenberg_variances(&model)?;
    let mut out = json!({
        "model": {
            "channels": channels.iter().map(|c| json!({"A": cplx(c.a), "C": cplx(c.c), "alpha": cplx(c.alpha)})).collect::<Vec<_>>(),
            "cutoffs": {"probe": model.cutoffs.probe, "mir": model.cutoffs.mir, "nir": model.cutoffs.nir},
            "perturbative": model.perturbative(),
        },
        "perturbative": {
            "variance": p.variance(),
            "sig0_sq": p.sig0_sq,
            "sig0_sig1": p.sig0_sig1,
            "sig1_sq": p.sig1_sq,
            "sig0_sig2": p.sig0_sig2,
            "boundary_population": p.boundary_population,
        },
        "heisenberg": {
            "s1_sq": h.s1_sq,
            "s2s0_sym": h.s2s0_sym,
            "imag_residue": h.imag_residue,
        },
        "closed_form": {
            "variance": fock::closed_form::variance(ch.a, ch.c, ch.alpha),
            "sig1_sq": fock::closed_form::sig1_sq(ch.a, ch.alpha),
            "sig0_sig2": fock::closed_form::sig0_sig2(ch.a, ch.c, ch.alpha),
            "s1_sq": fock::closed_form::s1_sq(ch.a, ch.c, ch.alpha),
            "s2s0_sym": fock::closed_form::s2s0_sym(ch.a, ch.c, ch.alpha),
        },
    });
    if a.channels == 2 {
        let o = fock::two_channel_oracle(&model)?;
        let (c1, c2) = (channels[0], channels[1]);
        out["two_channel"] = json!({
            "cross_sig1": o.cross_sig1,
            "cross_sig02": o.cross_sig02,
            "base_cross": o.base_cross,
            "boundary_population": o.boundary_population,
            "closed_form": {
                "cross_sig1": fock::closed_form::cross_sig1(c1.a, c2.a, c1.alpha, c2.alpha),
                "cross_sig02": fock::closed_form::cross_sig02(c1.a, c1.c, c2.a, c2.c, c1.alpha, c2.alpha),
            },
        });
    }
    if a.exact {
        let e = fock::exact_variance(&model)?;
        out["exact"] = json!({
            "variance": e.variance,
            "norm_defect": e.norm_defect,
            "boundary_population": e.boundary_population,
            "residual": e.variance - p.variance(),
        });
    }
    Ok(Artifact {
        body: Body::Json(out),
        params: None,
        settings: json!({ "channels": a.channels, "exact": a.exact }),
        convergence: BTreeMap::new(),
    })
}

fn selftest(cfg: &QuadratureConfig) -> anyhow::Result<i32> {
    let checks = eos_core::checks::run(cfg)?;
    let mut failed = 0;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        failed += usize::from(!c.passed);
    }
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints() {
        let g = grid(1e6, 1e13, 60, true).unwrap();
        assert_eq!(g.len(), 60);
        assert_eq!((g[0], g[59]), (1e6, 1e13));
        assert!(g
            .windows(2)
            .all(|w| (w[1] / w[0] - g[1] / g[0]).abs() < 1e-12));
        assert!(grid(0.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn term_names_parse() {
        let t = parse_terms(&["main2".into(), " V04C".into()]).unwrap();
        assert_eq!(t.len(), 2);
        assert!(parse_terms(&["v99".into()]).is_err());
    }
}
