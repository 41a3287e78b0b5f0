//! Cartesian sweep over (eps, k, n), resumable by row key.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::path::Path;
use std::sync::mpsc;

use anyhow::{bail, Context, Result};
use mri_core::modes::growth_rate_any;
use mri_core::operators::{assemble_lk, inertia, DEFAULT_ZERO_TOL};
use mri_core::profiles::RadialProfile;
use mri_core::thresholds::classify;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde_json::{json, Value};

use crate::config::{Axes, GridConfig};
use crate::output::num;

pub const SWEEP_FILE: &str = "sweep.csv";
pub const HEADER: [&str; 7] = ["eps", "k", "n", "verdict", "n_neg_L1", "n_neg_Lk", "lambda"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub eps: f64,
    pub k: usize,
    pub n: usize,
}

impl Point {
    fn key(&self) -> (String, String, String) {
        (num(self.eps), self.k.to_string(), self.n.to_string())
    }
}

/// Points in canonical order: eps outermost, n innermost. Empty axes fall back to the base config.
pub fn points(axes: &Axes, base_eps: f64, base_n: usize) -> Result<Vec<Point>> {
    let eps = axes.eps.as_ref().map(|a| a.values()).unwrap_or_else(|| vec![base_eps]);
    let ks = match &axes.k {
        Some(a) => a.values()?,
        None => vec![1],
    };
    let ns = match &axes.n {
        Some(a) => a.values()?,
        None => vec![base_n],
    };
    let eps = if eps.is_empty() { vec![base_eps] } else { eps };
    let ks = if ks.is_empty() { vec![1] } else { ks };
    let ns = if ns.is_empty() { vec![base_n] } else { ns };
    let mut out = Vec::with_capacity(eps.len() * ks.len() * ns.len());
    for &e in &eps {
        for &k in &ks {
            for &n in &ns {
                out.push(Point { eps: e, k, n });
            }
        }
    }
    Ok(out)
}

fn evaluate(base: &RadialProfile<f64>, grid: &GridConfig, pt: Point, growth: bool) -> mri_core::Result<Vec<String>> {
    let p = base.with_eps(pt.eps);
    let g = grid.build(&p, pt.n)?;
    let v = classify(&p, &g)?;
    let nk = inertia(&assemble_lk(&p, &g, pt.k)?, DEFAULT_ZERO_TOL).n_neg;
    let lambda = if growth { growth_rate_any(&p, &g, pt.k)?.map(|m| num(m.lambda)).unwrap_or_default() } else { String::new() };
    let (e, k, n) = pt.key();
    Ok(vec![e, k, n, if v.stable { "stable" } else { "unstable" }.into(), v.n_neg_l1.to_string(), nk.to_string(), lambda])
}

fn read_existing(path: &Path) -> Result<Vec<Vec<String>>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut r = csv::ReaderBuilder::new().flexible(false).from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    if r.headers()?.iter().ne(HEADER) {
        bail!("{} exists with a different header; refusing to resume into it", path.display());
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        match rec {
            Ok(rec) => rows.push(rec.iter().map(String::from).collect()),
            // A run killed mid-write can leave a truncated last line; it is recomputed.
            Err(_) => break,
        }
    }
    Ok(rows)
}

fn write_all(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::Writer::from_path(&tmp)?;
        w.write_record(HEADER)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub struct SweepOutcome {
    pub result: Value,
    pub computed: usize,
    pub reused: usize,
}

/// Runs the missing points on `pool`; rows are appended as they finish and the
/// file is rewritten in canonical order at the end.
pub fn run_sweep(base: &RadialProfile<f64>, grid: &GridConfig, pts: &[Point], growth: bool, dir: &Path, pool: &ThreadPool) -> Result<SweepOutcome> {
    let path = dir.join(SWEEP_FILE);
    let existing = read_existing(&path)?;
    let mut by_key: HashMap<(String, String, String), Vec<String>> = HashMap::new();
    let mut foreign = Vec::new();
    let wanted: HashMap<_, _> = pts.iter().map(|p| (p.key(), ())).collect();
    for r in existing {
        let key = (r[0].clone(), r[1].clone(), r[2].clone());
        if wanted.contains_key(&key) {
            by_key.insert(key, r);
        } else {
            foreign.push(r);
        }
    }
    let missing: Vec<Point> = pts.iter().copied().filter(|p| !by_key.contains_key(&p.key())).collect();
    let reused = pts.len() - missing.len();
    // Start the append log from what is already known.
    let mut known: Vec<Vec<String>> = pts.iter().filter_map(|p| by_key.get(&p.key()).cloned()).collect();
    known.extend(foreign.iter().cloned());
    write_all(&path, &known)?;

    let (tx, rx) = mpsc::channel::<Vec<String>>();
    let compute = std::thread::scope(|s| -> Result<()> {
        let worker = s.spawn(|| pool.install(|| missing.par_iter().try_for_each_with(tx, |tx, &pt| evaluate(base, grid, pt, growth).map(|row| tx.send(row).expect("writer alive")))));
        let file = OpenOptions::new().append(true).open(&path)?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        for row in rx {
            w.write_record(&row)?;
            w.flush()?;
            by_key.insert((row[0].clone(), row[1].clone(), row[2].clone()), row);
        }
        worker.join().expect("sweep worker panicked")?;
        Ok(())
    });
    compute?;

    let mut rows: Vec<Vec<String>> = pts.iter().map(|p| by_key[&p.key()].clone()).collect();
    let result = summarize(pts, &rows);
    rows.extend(foreign);
    write_all(&path, &rows)?;
    Ok(SweepOutcome { result, computed: missing.len(), reused })
}

/// Verdict changes along eps for each (k, n), and whether n⁻(𝕃_k) is nonincreasing in k for each (eps, n).
fn summarize(pts: &[Point], rows: &[Vec<String>]) -> Value {
    let mut transitions = Vec::new();
    let mut by_kn: Vec<((usize, usize), Vec<(f64, &str)>)> = Vec::new();
    let mut by_en: Vec<((String, usize), Vec<(usize, usize)>)> = Vec::new();
    for (p, r) in pts.iter().zip(rows) {
        match by_kn.iter_mut().find(|(key, _)| *key == (p.k, p.n)) {
            Some((_, v)) => v.push((p.eps, r[3].as_str())),
            None => by_kn.push(((p.k, p.n), vec![(p.eps, r[3].as_str())])),
        }
        let nk = r[5].parse().unwrap_or(0);
        match by_en.iter_mut().find(|(key, _)| key.0 == r[0] && key.1 == p.n) {
            Some((_, v)) => v.push((p.k, nk)),
            None => by_en.push(((r[0].clone(), p.n), vec![(p.k, nk)])),
        }
    }
    for ((k, n), v) in &by_kn {
        let mut v = v.clone();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in v.windows(2) {
            if w[0].1 != w[1].1 {
                transitions.push(json!({ "k": k, "n": n, "eps_lo": w[0].0, "eps_hi": w[1].0, "from": w[0].1, "to": w[1].1 }));
            }
        }
    }
    let monotone = by_en.iter().all(|(_, v)| {
        let mut v = v.clone();
        v.sort();
        v.windows(2).all(|w| w[1].1 <= w[0].1)
    });
    json!({
        "points": pts.len(),
        "file": SWEEP_FILE,
        "verdict_transitions": transitions,
        "n_neg_Lk_nonincreasing_in_k": monotone,
    })
}
