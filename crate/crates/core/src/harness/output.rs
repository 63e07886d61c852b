//! CSV tables and the JSON run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::experiments::{BoundComparison, Concentration, KMeansDemo, MultiscaleConverse, Quadrature, RateRun};
use super::reference::ProxyError;
use crate::dimension::DimensionLadder;

pub const MANIFEST_NAME: &str = "manifest.json";

/// One named CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub csv: String,
}

/// What one subcommand produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
    pub summary: Value,
    pub proxy: Option<ProxyError>,
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn table<T: Serialize>(name: &str, rows: &[T]) -> Result<Table> {
    Ok(Table {
        name: format!("{name}.csv"),
        csv: to_csv(rows)?,
    })
}

#[derive(Serialize)]
struct RateRow {
    n: u64,
    mean: f64,
    se: f64,
    replicates: usize,
    proxy_error: f64,
}

#[derive(Serialize)]
struct ReplicateRow {
    n: u64,
    replicate: usize,
    w_p: f64,
    w_pp: f64,
}

fn rate_tables(run: &RateRun, ns: &[u64]) -> Result<Vec<Table>> {
    let rates: Vec<RateRow> = run
        .estimate
        .points
        .iter()
        .map(|p| RateRow {
            n: p.n,
            mean: p.mean,
            se: p.se,
            replicates: p.replicates,
            proxy_error: run.proxy.value,
        })
        .collect();
    let mut reps = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        for (r, (&w_p, &w_pp)) in run.distances[i].iter().zip(&run.powers[i]).enumerate() {
            reps.push(ReplicateRow {
                n,
                replicate: r,
                w_p,
                w_pp,
            });
        }
    }
    Ok(vec![table("rates", &rates)?, table("replicates", &reps)?])
}

fn rate_summary(run: &RateRun) -> Value {
    json!({
        "slope": run.estimate.slope,
        "intercept": run.estimate.intercept,
        "slope_half_width": run.estimate.slope_half_width,
        "slope_defined": run.estimate.slope.is_some(),
        "reference": run.reference,
    })
}

pub fn rates_report(run: &RateRun, config: &ExperimentConfig) -> Result<Report> {
    Ok(Report {
        command: "rates",
        tables: rate_tables(run, &config.n_grid)?,
        summary: rate_summary(run),
        proxy: Some(run.proxy.clone()),
    })
}

pub fn bounds_report(b: &BoundComparison, config: &ExperimentConfig) -> Result<Report> {
    let mut tables = rate_tables(&b.rates, &config.n_grid)?;
    tables.push(table("bounds", &b.rows)?);
    if !b.premises.is_empty() {
        tables.push(table("premises", &b.premises)?);
    }
    let mut summary = rate_summary(&b.rates);
    summary["reports"] = serde_json::to_value(&b.reports)?;
    summary["gaussian_tail"] = serde_json::to_value(&b.gaussian_tail)?;
    Ok(Report {
        command: "bounds",
        tables,
        summary,
        proxy: Some(b.rates.proxy.clone()),
    })
}

pub fn concentration_report(c: &Concentration, config: &ExperimentConfig) -> Result<Report> {
    let mut tables = rate_tables(&c.rates, &config.n_grid)?;
    tables.push(table("concentration", &c.rows)?);
    Ok(Report {
        command: "concentration",
        tables,
        summary: json!({ "all_hold": c.rows.iter().all(|r| r.holds) }),
        proxy: Some(c.rates.proxy.clone()),
    })
}

pub fn multiscale_report(m: &MultiscaleConverse) -> Result<Report> {
    Ok(Report {
        command: "multiscale",
        tables: vec![
            table("live_counts", &m.live_counts)?,
            table("windows", &m.windows)?,
            table("approximations", &m.approximations)?,
        ],
        summary: json!({
            "live_counts_ok": m.live_counts.iter().all(|r| r.ok),
            "brackets_ok": m.windows.iter().all(|w| w.bracket_ok),
            "lower_bound_ok": m.approximations.iter().all(|a| a.holds),
        }),
        proxy: Some(m.proxy.clone()),
    })
}

pub fn quadrature_report(q: &Quadrature) -> Result<Report> {
    let mut tables = vec![table("quadrature", &q.rows)?];
    if !q.premises.is_empty() {
        tables.push(table("premises", &q.premises)?);
    }
    Ok(Report {
        command: "quadrature",
        tables,
        summary: json!({
            "premises_hold": q.premises.iter().all(|p| p.holds),
            "max_gap": q.rows.iter().filter_map(|r| r.gap).fold(0.0, f64::max),
        }),
        proxy: Some(q.proxy.clone()),
    })
}

pub fn kmeans_report(k: &KMeansDemo) -> Result<Report> {
    let mut tables = vec![table("kmeans", &k.rows)?];
    if !k.premises.is_empty() {
        tables.push(table("premises", &k.premises)?);
    }
    let observed = k.rows.iter().filter(|r| r.kmeans_le_empirical).count();
    Ok(Report {
        command: "kmeans",
        tables,
        summary: json!({ "kmeans_le_empirical": observed, "runs": k.rows.len() }),
        proxy: Some(k.proxy.clone()),
    })
}

pub fn dims_report(ladder: &DimensionLadder, proxy: &ProxyError) -> Result<Report> {
    let mut buf = Vec::new();
    ladder.write_csv(&mut buf)?;
    Ok(Report {
        command: "dims",
        tables: vec![Table {
            name: "ladder.csv".into(),
            csv: String::from_utf8(buf).expect("csv output is UTF-8"),
        }],
        summary: ladder.summary_json(),
        proxy: Some(proxy.clone()),
    })
}

/// Writes every table and `manifest.json` into `out`; returns the manifest
/// path.
pub fn write_report(report: &Report, config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out)?;
    for t in &report.tables {
        std::fs::write(out.join(&t.name), &t.csv)?;
    }
    let manifest = json!({
        "command": report.command,
        "crate": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": config.hash(),
        "seed": config.seed,
        "config": config,
        "proxy_error": report.proxy,
        "outputs": report.tables.iter().map(|t| t.name.as_str()).collect::<Vec<_>>(),
        "summary": report.summary,
    });
    let path = out.join(MANIFEST_NAME);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}
