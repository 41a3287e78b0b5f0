//! One function per task; each returns the JSON result block and its tables.

use mri_core::dispersion::{asymptotic_roots, dispersion_roots, local_vs_global, relative_residual, DispersionInput};
use mri_core::euler::{euler_report, rayleigh_classify, report_is_consistent};
use mri_core::linsim::{assemble_euler_generator, assemble_generator, run_simulation_every, LinearState};
use mri_core::modes::{growth_rate_any, ModeSolution, ModeSource};
use mri_core::operators::{unstable_mode_count, RadialGrid};
use mri_core::profiles::RadialProfile;
use mri_core::thresholds::{classify, compute_b0, compute_eps_max, compute_eps_min, kernel_perturbation_sign, Threshold};
use mri_core::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{InitConfig, SystemConfig};
use crate::output::{jnum, jopt, jvec, num, opt, Table};

pub struct TaskOutput {
    pub result: Value,
    pub tables: Vec<Table>,
}

fn source_str(s: ModeSource) -> &'static str {
    match s {
        ModeSource::Shooting => "shooting",
        ModeSource::Generator => "generator",
    }
}

pub fn stability(p: &RadialProfile<f64>, g: &RadialGrid<f64>, k_max_hint: usize) -> Result<TaskOutput> {
    let v = classify(p, g)?;
    let mut table = Table::new("stability_per_k.csv", &["k", "n_neg_Lk"]);
    let (count, count_error) = match unstable_mode_count(p, g, k_max_hint) {
        Ok(mc) => {
            for (i, n) in mc.per_k.iter().enumerate() {
                table.push(vec![(i + 1).to_string(), n.to_string()]);
            }
            (json!({ "total": mc.total, "per_k": mc.per_k, "k_certified": mc.k_certified }), Value::Null)
        }
        Err(e @ Error::IncompleteCount { .. }) => {
            if let Error::IncompleteCount { per_k, .. } = &e {
                for (i, n) in per_k.iter().enumerate() {
                    table.push(vec![(i + 1).to_string(), n.to_string()]);
                }
            }
            (Value::Null, Value::String(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let result = json!({
        "verdict": if v.stable { "stable" } else { "unstable" },
        "n_neg_L1": v.n_neg_l1,
        "criterion": v.criterion,
        "rayleigh_stable": rayleigh_classify(p, g),
        "mode_count": count,
        "mode_count_error": count_error,
    });
    Ok(TaskOutput { result, tables: vec![table] })
}

fn threshold_json(t: &Result<Threshold<f64>>) -> Value {
    match t {
        Ok(t) => json!({ "value": jnum(t.value), "sqrt_value": jnum(t.value.sqrt()), "error": null }),
        Err(e) => json!({ "value": null, "sqrt_value": null, "error": e.to_string() }),
    }
}

/// Each quantity is computed independently; regime errors are recorded per quantity.
pub fn thresholds(p: &RadialProfile<f64>, g: &RadialGrid<f64>) -> Result<TaskOutput> {
    let b0 = compute_b0(p, g);
    let emin = compute_eps_min(p, g);
    let emax = compute_eps_max(p, g);
    for t in [&b0, &emin, &emax] {
        if let Err(e) = t {
            if !e.is_regime() {
                return Err(e.clone());
            }
        }
    }
    let kernel = match kernel_perturbation_sign(p, g) {
        Ok(k) => json!({ "sign": k.sign, "limit": jnum(k.limit), "kernel_eigenvalue": jnum(k.kernel_eigenvalue), "error": null }),
        Err(e) if e.is_regime() => json!({ "sign": null, "limit": null, "kernel_eigenvalue": null, "error": e.to_string() }),
        Err(e) => return Err(e),
    };
    let mut summary = Table::new("thresholds.csv", &["quantity", "value", "error"]);
    for (name, t) in [("B0_squared", &b0), ("eps_min_squared", &emin), ("eps_max_squared", &emax)] {
        match t {
            Ok(t) => summary.push(vec![name.into(), num(t.value), String::new()]),
            Err(e) => summary.push(vec![name.into(), String::new(), e.to_string()]),
        }
    }
    let mut maxi = Table::new("threshold_maximizers.csv", &["r", "B0_squared", "eps_min_squared", "eps_max_squared"]);
    let col = |t: &Result<Threshold<f64>>, i: usize| t.as_ref().map(|t| num(t.maximizer[i])).unwrap_or_default();
    for (i, r) in g.nodes().iter().enumerate() {
        maxi.push(vec![num(*r), col(&b0, i), col(&emin, i), col(&emax, i)]);
    }
    let result = json!({
        "B0_squared": threshold_json(&b0),
        "eps_min_squared": threshold_json(&emin),
        "eps_max_squared": threshold_json(&emax),
        "kernel_perturbation": kernel,
        "eps": jnum(p.eps),
    });
    Ok(TaskOutput { result, tables: vec![summary, maxi] })
}

fn mode_table(m: &ModeSolution<f64>) -> Table {
    let mut t = Table::new(format!("mode_k{}.csv", m.k), &["r", "phi", "u_r", "u_theta", "u_z", "B_theta"]);
    let f = &m.fields;
    for i in 0..m.r.len() {
        t.push(vec![num(m.r[i]), num(m.phi[i]), num(f.u_r[i]), num(f.u_theta[i]), num(f.u_z[i]), num(f.b_theta[i])]);
    }
    t
}

pub fn modes(p: &RadialProfile<f64>, g: &RadialGrid<f64>, ks: &[usize], profiles: bool) -> Result<TaskOutput> {
    let sols: Vec<Option<ModeSolution<f64>>> = ks.par_iter().map(|&k| growth_rate_any(p, g, k)).collect::<Result<_>>()?;
    let mut rates = Table::new("growth_rates.csv", &["k", "lambda", "n_roots", "source", "near_upper_bound"]);
    let mut tables = Vec::new();
    let mut rows = Vec::new();
    let mut fastest: Option<(usize, f64)> = None;
    for (&k, s) in ks.iter().zip(&sols) {
        match s {
            Some(m) => {
                rates.push(vec![k.to_string(), num(m.lambda), m.roots.len().to_string(), source_str(m.source).into(), m.near_upper_bound.to_string()]);
                rows.push(json!({ "k": k, "lambda": jnum(m.lambda), "roots": jvec(&m.roots), "source": source_str(m.source), "near_upper_bound": m.near_upper_bound }));
                if fastest.is_none_or(|(_, l)| m.lambda > l) {
                    fastest = Some((k, m.lambda));
                }
                if profiles {
                    tables.push(mode_table(m));
                }
            }
            None => {
                rates.push(vec![k.to_string(), String::new(), "0".into(), String::new(), String::new()]);
                rows.push(json!({ "k": k, "lambda": null, "roots": [], "source": null, "near_upper_bound": false }));
            }
        }
    }
    tables.insert(0, rates);
    let result = json!({
        "rates": rows,
        "fastest": fastest.map_or(Value::Null, |(k, l)| json!({ "k": k, "lambda": jnum(l) })),
    });
    Ok(TaskOutput { result, tables })
}

pub fn dispersion(p: &RadialProfile<f64>, g: &RadialGrid<f64>, r0s: &[f64], ks: &[f64], krs: &[f64], global_k: Option<usize>) -> Result<TaskOutput> {
    let mid = [0.5 * (p.r1 + p.r2)];
    let r0s = if r0s.is_empty() { &mid[..] } else { r0s };
    let mut t = Table::new("dispersion.csv", &["r0", "k", "kr", "branch", "X", "lambda2", "residual", "asymptotic_lambda2"]);
    let mut max_res = 0.0f64;
    let mut max_mri: Option<f64> = None;
    for &r0 in r0s {
        for &k in ks {
            for &kr in krs {
                let d = DispersionInput::at(p, r0, k, kr);
                let roots = dispersion_roots(&d)?;
                let asym = asymptotic_roots(&d).ok();
                for j in 0..2 {
                    let res = relative_residual(&d, roots.x[j]);
                    max_res = max_res.max(res);
                    let a = asym.map(|a| if j == 0 { a.epicyclic_lambda2 } else { a.mri_lambda2 });
                    if j == 1 {
                        max_mri = Some(max_mri.map_or(roots.lambda2[1], |m: f64| m.max(roots.lambda2[1])));
                    }
                    t.push(vec![num(r0), num(k), num(kr), roots.labels[j].as_str().into(), num(roots.x[j]), num(roots.lambda2[j]), num(res), opt(a)]);
                }
            }
        }
    }
    let mut tables = vec![t];
    let mut lvg = Value::Null;
    if let Some(k) = global_k {
        let rows = local_vs_global(p, g, k, krs)?;
        let mut lt = Table::new("local_vs_global.csv", &["kr", "r0_argmax", "lambda2_local", "lambda_global"]);
        let mut js = Vec::new();
        for r in &rows {
            lt.push(vec![num(r.kr), num(r.r0_argmax), num(r.lambda2_local), opt(r.lambda_global)]);
            js.push(json!({ "kr": jnum(r.kr), "r0_argmax": jnum(r.r0_argmax), "lambda2_local": jnum(r.lambda2_local), "lambda_global": jopt(r.lambda_global) }));
        }
        tables.push(lt);
        lvg = json!({ "k": k, "rows": js });
    }
    let result = json!({
        "points": r0s.len() * ks.len() * krs.len(),
        "max_relative_residual": jnum(max_res),
        "max_lambda2_mri": jopt(max_mri),
        "local_vs_global": lvg,
    });
    Ok(TaskOutput { result, tables })
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    p: &RadialProfile<f64>,
    g: &RadialGrid<f64>,
    k: usize,
    system: SystemConfig,
    t_end: Option<f64>,
    dt: Option<f64>,
    init: InitConfig,
    seed: u64,
    stride: usize,
) -> Result<TaskOutput> {
    let gen = match system {
        SystemConfig::Mhd => assemble_generator(p, g, k)?,
        SystemConfig::Euler => assemble_euler_generator(p, g, k)?,
    };
    let lam = gen.unstable_rates().first().copied();
    let t_end = t_end.unwrap_or_else(|| lam.map_or(200.0, |l| 10.0 / l));
    let dt = dt.unwrap_or_else(|| lam.map_or(0.2 / gen.norm_estimate().max(1e-12), |l| 0.01 / l));
    let x0 = match init {
        InitConfig::Smooth => LinearState::smooth(&gen),
        InitConfig::Random => LinearState::random(&gen, seed),
    };
    let rep = run_simulation_every(&gen, &x0, t_end, dt, stride)?;
    let mut t = Table::new("simulation.csv", &["t", "norm", "form", "log_norm"]);
    for i in 0..rep.times.len() {
        t.push(vec![num(rep.times[i]), num(rep.norms[i]), opt(rep.form_values.get(i).copied()), num(rep.norms[i].ln())]);
    }
    let result = json!({
        "system": match system { SystemConfig::Mhd => "mhd", SystemConfig::Euler => "euler" },
        "k": k,
        "lambda_generator": jopt(lam),
        "t_end": jnum(t_end),
        "dt": jnum(dt),
        "samples": rep.times.len(),
        "fitted_rate": jopt(rep.fitted_rate),
        "fit_window": rep.fit_window.map_or(Value::Null, |(a, b)| json!([jnum(a), jnum(b)])),
        "whole_run_slope": jnum(rep.whole_run_slope),
        "form_drift": jopt(rep.form_drift),
        "poly_bound": jnum(rep.poly_bound),
        "overflow": rep.overflow,
    });
    Ok(TaskOutput { result, tables: vec![t] })
}

pub fn euler(p: &RadialProfile<f64>, g: &RadialGrid<f64>, ks: &[usize], eps_list: &[f64], compare_k: usize) -> Result<TaskOutput> {
    let rep = euler_report(p, g, ks, eps_list, compare_k)?;
    let mut lt = Table::new("euler_lambda.csv", &["k", "lambda2"]);
    for (k, l) in &rep.lambda_k2 {
        lt.push(vec![k.to_string(), num(*l)]);
    }
    let mut tables = vec![lt];
    let comparisons = match &rep.comparisons {
        Some(c) => {
            // Rayleigh-stable: Λ_k² itself scales like ε²; otherwise the gap does.
            let slope = if rep.rayleigh_stable { c.slope_big_lambda2 } else { c.slope_gap };
            let mut ct = Table::new("euler_comparison.csv", &["eps", "k", "Lambda2", "lambda2", "gap", "slope_fit"]);
            for r in &c.rows {
                ct.push(vec![num(r.eps), r.k.to_string(), num(r.big_lambda2), num(r.lambda2), num(r.gap), opt(slope)]);
            }
            tables.push(ct);
            json!({
                "rows": c.rows.iter().map(|r| json!({ "eps": jnum(r.eps), "k": r.k, "Lambda2": jnum(r.big_lambda2), "lambda2": jnum(r.lambda2), "gap": jnum(r.gap) })).collect::<Vec<_>>(),
                "slope_Lambda2": jopt(c.slope_big_lambda2),
                "slope_gap": jopt(c.slope_gap),
            })
        }
        None => Value::Null,
    };
    let result = json!({
        "rayleigh_stable": rep.rayleigh_stable,
        "a1": jnum(rep.a1),
        "lambda_k2": rep.lambda_k2.iter().map(|(k, l)| json!({ "k": k, "lambda2": jnum(*l) })).collect::<Vec<_>>(),
        "consistent": report_is_consistent(&rep),
        "comparisons": comparisons,
    });
    Ok(TaskOutput { result, tables })
}
