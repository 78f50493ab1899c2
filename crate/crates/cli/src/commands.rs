use rayon::prelude::*;
use tunnelwell::diagnostics::{tags, Warning};
use tunnelwell::exact::splitting_exact;
use tunnelwell::potential::{characterize_with, Strictness, NEAR_RESONANCE};
use tunnelwell::semiclassical::{tunneling_amplitude, tunneling_amplitude_with, TunnelingResult};
use tunnelwell::twolevel::{constant_probability, transfer_time, zeno_probability, ZenoSchedule};

use crate::config::{PotentialSpec, RunConfig};
use crate::error::CliError;
use crate::output::{fmt, fmt_bool, PlotSpec, Table};

/// Preamble shared by every table.
pub struct Context {
    pub command: &'static str,
    pub config_hash: String,
}

impl Context {
    fn table(&self, suffix: impl Into<String>, header: &[&str], spec: &PotentialSpec) -> Table {
        let mut t = Table::new(suffix, header);
        t.comments.push(format!("tunnelwell {}", self.command));
        t.comments.push(format!("config_sha256: {}", self.config_hash));
        t.comments.push(crate::output::UNITS.to_string());
        t.comments.push(format!("potential: {}", spec.describe()));
        t
    }
}

fn warning_comments(t: &mut Table, warnings: &[Warning]) {
    for w in warnings {
        t.comments.push(format!("warning: {w}"));
    }
}

/// ok, near_resonance or resonance from the level offset ratio.
fn flag(ratio: f64) -> &'static str {
    if ratio >= 1.0 {
        "resonance"
    } else if ratio >= NEAR_RESONANCE {
        "near_resonance"
    } else {
        "ok"
    }
}

pub fn characterize(cfg: &RunConfig, ctx: &Context) -> Result<Vec<Table>, CliError> {
    let p = cfg.potential.build()?;
    let g = characterize_with(&p, Strictness::Lenient)?;
    let mut t = ctx.table(
        "characterize",
        &[
            "a_L", "a_C", "a_R", "omega_L", "omega_R", "eps_L", "eps_R", "V_top", "flag", "warnings",
        ],
        &cfg.potential,
    );
    warning_comments(&mut t, &g.warnings);
    t.rows.push(vec![
        fmt(g.a_l),
        fmt(g.a_c),
        fmt(g.a_r),
        fmt(g.omega_l),
        fmt(g.omega_r),
        fmt(g.eps_l),
        fmt(g.eps_r),
        fmt(g.v_top),
        flag(g.resonance_ratio()).into(),
        tags(&g.warnings),
    ]);
    Ok(vec![t])
}

pub fn amplitude(cfg: &RunConfig, ctx: &Context) -> Result<Vec<Table>, CliError> {
    let p = cfg.potential.build()?;
    let r = tunneling_amplitude(&p)?;
    let mut t = ctx.table(
        "amplitude",
        &[
            "eta",
            "nu_L",
            "nu_R",
            "A",
            "nu",
            "delta_eps",
            "Omega",
            "S_L",
            "S_R",
            "C_L",
            "C_R",
            "flag",
            "warnings",
        ],
        &cfg.potential,
    );
    warning_comments(&mut t, &r.warnings);
    t.rows.push(vec![
        fmt(cfg.potential.eta().unwrap_or(f64::NAN)),
        fmt(r.nu_l),
        fmt(r.nu_r),
        fmt(r.a),
        fmt(r.nu),
        fmt(r.delta_eps),
        fmt(r.omega_rabi),
        fmt(r.s_l),
        fmt(r.s_r),
        fmt(r.c_l),
        fmt(r.c_r),
        flag(r.geometry.resonance_ratio()).into(),
        tags(&r.warnings),
    ]);
    Ok(vec![t])
}

struct SweepRow {
    eta: f64,
    result: TunnelingResult,
}

/// Evaluate an η grid for one potential family, stopping after the first
/// row at or past resonance.
fn sweep_one(
    spec: &PotentialSpec,
    v0: Option<f64>,
    param: &str,
    etas: &[f64],
) -> Result<(f64, Vec<SweepRow>), CliError> {
    let reference = tunneling_amplitude_with(&spec.with(v0, param, 0.0).build()?, Strictness::Lenient)?.nu;
    let evaluated: Vec<Result<TunnelingResult, CliError>> = etas
        .par_iter()
        .map(|&eta| {
            let p = spec.with(v0, param, eta).build()?;
            Ok(tunneling_amplitude_with(&p, Strictness::Lenient)?)
        })
        .collect();
    let mut rows = Vec::new();
    for (&eta, r) in etas.iter().zip(evaluated) {
        let result = r?;
        let stop = result.geometry.resonance_ratio() >= 1.0;
        rows.push(SweepRow { eta, result });
        if stop {
            break;
        }
    }
    Ok((reference, rows))
}

pub fn sweep(cfg: &RunConfig, ctx: &Context) -> Result<Vec<Table>, CliError> {
    let s = cfg
        .command
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `command.sweep` block".into()))?;
    let etas = s.eta.values("command.sweep.eta")?;
    let v0s: Vec<Option<f64>> = match (&s.v0, cfg.potential.is_builtin()) {
        (Some(list), true) if list.is_empty() => {
            return Err(CliError::Config("`command.sweep.v0` must not be empty".into()))
        }
        (Some(list), true) => list.iter().map(|&v| Some(v)).collect(),
        (Some(_), false) => {
            return Err(CliError::Config(
                "`command.sweep.v0` applies to built-in families only".into(),
            ))
        }
        (None, _) => vec![None],
    };
    let param = s.param.as_str();
    if let PotentialSpec::Expr { params, .. } = &cfg.potential {
        if !params.contains_key(param) {
            return Err(CliError::Config(format!(
                "`command.sweep.param`: `{param}` is not a key of `potential.params`"
            )));
        }
    }

    let results: Vec<Result<(f64, Vec<SweepRow>), CliError>> = v0s
        .par_iter()
        .map(|&v0| sweep_one(&cfg.potential, v0, param, &etas))
        .collect();

    let mut tables = Vec::new();
    for (v0, res) in v0s.iter().zip(results) {
        let (reference, rows) = res?;
        let spec = match v0 {
            Some(v) => cfg.potential.with_v0(*v)?,
            None => cfg.potential.clone(),
        };
        let suffix = match v0 {
            Some(v) => format!("sweep_v0_{}", fmt(*v)),
            None => "sweep".to_string(),
        };
        let mut t = ctx.table(
            suffix,
            &[param, "nu_ratio", "nu", "A", "delta_eps", "Omega", "flag", "warnings"],
            &spec,
        );
        t.comments
            .push(format!("nu_ratio = nu({param})/nu(0) with nu(0) = {}", fmt(reference)));
        t.comments
            .push("rows stop at the first resonance; that row is flagged".into());
        for row in rows {
            let r = &row.result;
            t.rows.push(vec![
                fmt(row.eta),
                fmt(r.nu / reference),
                fmt(r.nu),
                fmt(r.a),
                fmt(r.delta_eps),
                fmt(r.omega_rabi),
                flag(r.geometry.resonance_ratio()).into(),
                tags(&r.warnings),
            ]);
        }
        t.plot = Some(PlotSpec {
            x: 0,
            ys: vec![1],
            xlabel: param.to_string(),
            ylabel: "nu/nu(0)".into(),
            logscale_y: false,
        });
        tables.push(t);
    }
    Ok(tables)
}

pub fn exact_compare(cfg: &RunConfig, ctx: &Context) -> Result<Vec<Table>, CliError> {
    let e = cfg
        .command
        .exact_compare
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `command.exact_compare` block".into()))?;
    let v0s = e.v0.values("command.exact_compare.v0")?;
    let specs = v0s
        .iter()
        .map(|&v| cfg.potential.with_v0(v))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Result<Vec<String>, CliError>> = specs
        .par_iter()
        .zip(v0s.par_iter())
        .map(|(spec, &v0)| {
            let p = spec.build()?;
            let ex = splitting_exact(&p, e.n, e.m)?;
            let sc = tunneling_amplitude_with(&p, Strictness::Lenient)?;
            let gap = sc.omega_rabi;
            Ok(vec![
                fmt(v0),
                fmt(ex.splitting),
                fmt(gap),
                fmt((gap - ex.splitting).abs() / ex.splitting),
                fmt_bool(ex.converged),
                fmt(ex.history.last().map(|h| h.n as f64).unwrap_or(f64::NAN)),
                flag(sc.geometry.resonance_ratio()).into(),
                tags(&sc.warnings),
            ])
        })
        .collect();
    let mut t = ctx.table(
        "exact_compare",
        &[
            "v0",
            "E1_minus_E0",
            "hbar_Omega_semiclassical",
            "rel_diff",
            "converged",
            "N_final",
            "flag",
            "warnings",
        ],
        &cfg.potential,
    );
    t.comments
        .push(format!("grid: N = {} doubled to convergence, M = {}", e.n, fmt(e.m)));
    for r in rows {
        t.rows.push(r?);
    }
    t.plot = Some(PlotSpec {
        x: 0,
        ys: vec![1, 2],
        xlabel: "V0/hbar omega".into(),
        ylabel: "splitting".into(),
        logscale_y: true,
    });
    Ok(vec![t])
}

pub fn zeno(cfg: &RunConfig, ctx: &Context) -> Result<Vec<Table>, CliError> {
    let z = cfg.command.zeno.clone().unwrap_or_default();
    if z.samples == 0 {
        return Err(CliError::Config("`command.zeno.samples` must be positive".into()));
    }
    let p = cfg.potential.build()?;
    let g = characterize_with(&p, Strictness::Lenient)?;
    let nu0 = match z.nu0 {
        Some(v) => v,
        None => tunneling_amplitude_with(&p, Strictness::Lenient)?.nu,
    };
    if !(nu0.is_finite() && nu0 > 0.0) {
        return Err(CliError::Config(format!(
            "`command.zeno.nu0` must be positive, got {nu0}"
        )));
    }
    let big_t = transfer_time(nu0);
    let t0 = z.t0_over_transfer * big_t;
    let schedule = ZenoSchedule::new(
        nu0,
        z.nu1_over_nu0 * nu0,
        t0,
        z.t1_over_t0 * t0,
        z.horizon_over_transfer * big_t,
    )?;
    let mut t = ctx.table("zeno", &["t", "P_L_schedule", "P_L_const", "nu_ratio"], &cfg.potential);
    t.comments.push(format!(
        "schedule: nu0 = {}, nu1 = {}, t0 = {}, t1 = {}, T = {}",
        fmt(schedule.nu0),
        fmt(schedule.nu1),
        fmt(schedule.t0),
        fmt(schedule.t1),
        fmt(big_t)
    ));
    if let Some(w) = schedule.adiabaticity(&g) {
        t.comments.push(format!("warning: {w}"));
    }
    for i in 0..=z.samples {
        let time = schedule.horizon * i as f64 / z.samples as f64;
        t.rows.push(vec![
            fmt(time),
            fmt(zeno_probability(&schedule, time)?),
            fmt(constant_probability(nu0, time)?),
            fmt(schedule.nu_at(time)? / nu0),
        ]);
    }
    t.plot = Some(PlotSpec {
        x: 0,
        ys: vec![1, 2, 3],
        xlabel: "t".into(),
        ylabel: "P_L".into(),
        logscale_y: false,
    });
    Ok(vec![t])
}
