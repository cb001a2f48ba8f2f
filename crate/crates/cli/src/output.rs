//! CSV emission with a stable, mode-determined schema, plus the JSON
//! metadata sidecar.

use std::io::Write;
use std::time::Instant;

use hetsat::analytics_nearest::TierBreakdown;
use hetsat::metrics::{weighted_metric, WeightVector};
use hetsat::montecarlo::McReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Mc,
    Both,
}

impl Mode {
    pub fn includes_analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }
    pub fn includes_mc(self) -> bool {
        matches!(self, Mode::Mc | Mode::Both)
    }
    pub fn label(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Mc => "mc",
            Mode::Both => "both",
        }
    }
}

/// Analytic metric bundle for one policy at one sweep point.
#[derive(Debug, Clone, Default)]
pub struct AnalyticPolicyRow {
    pub assoc: Vec<f64>,
    pub cp: f64,
    pub nhp: f64,
    pub dop: f64,
    pub wm: f64,
}

/// Everything a metrics/sweep row can carry.
#[derive(Debug, Clone, Default)]
pub struct Row {
    pub sweep_value: f64,
    pub status: String,
    pub analytic_nearest: Option<AnalyticPolicyRow>,
    pub analytic_maxsinr: Option<AnalyticPolicyRow>,
    pub mc: Option<McReport>,
    pub mc_wm: Option<(f64, f64)>, // (nearest, maxsinr)
}

/// Column set for the metrics and sweep commands: a pure function of
/// (mode, tier count).
pub fn metric_header(mode: Mode, tiers: usize) -> Vec<String> {
    let mut cols = vec!["sweep_var".to_string(), "sweep_value".to_string(), "status".to_string()];
    for policy in ["nearest", "maxsinr"] {
        if mode.includes_analytic() {
            for t in 1..=tiers {
                cols.push(format!("{policy}_assoc_ana_t{t}"));
            }
            for m in ["cp", "nhp", "dop", "wm"] {
                cols.push(format!("{policy}_{m}_ana"));
            }
        }
        if mode.includes_mc() {
            for t in 1..=tiers {
                cols.push(format!("{policy}_assoc_mc_t{t}"));
                cols.push(format!("{policy}_assoc_mc_t{t}_stderr"));
            }
            for m in ["cp", "nhp", "dop"] {
                cols.push(format!("{policy}_{m}_mc"));
                cols.push(format!("{policy}_{m}_mc_stderr"));
            }
            cols.push(format!("{policy}_wm_mc"));
        }
    }
    cols
}

fn push_f64(record: &mut Vec<String>, v: f64) {
    record.push(format!("{v}"));
}

pub fn metric_record(row: &Row, sweep_var: &str, mode: Mode, tiers: usize) -> Vec<String> {
    let mut record = vec![sweep_var.to_string(), format!("{}", row.sweep_value), row.status.clone()];
    let analytic = [&row.analytic_nearest, &row.analytic_maxsinr];
    let mc_sides = row
        .mc
        .as_ref()
        .map(|r| [r.nearest.clone(), r.maxsinr.clone()])
        .unwrap_or([None, None]);
    for (idx, _policy) in ["nearest", "maxsinr"].iter().enumerate() {
        if mode.includes_analytic() {
            match analytic[idx] {
                Some(a) => {
                    for t in 0..tiers {
                        push_f64(&mut record, a.assoc.get(t).copied().unwrap_or(f64::NAN));
                    }
                    push_f64(&mut record, a.cp);
                    push_f64(&mut record, a.nhp);
                    push_f64(&mut record, a.dop);
                    push_f64(&mut record, a.wm);
                }
                None => {
                    for _ in 0..tiers + 4 {
                        record.push(String::new());
                    }
                }
            }
        }
        if mode.includes_mc() {
            match &mc_sides[idx] {
                Some(p) => {
                    for t in 0..tiers {
                        push_f64(&mut record, p.assoc[t].mean);
                        push_f64(&mut record, p.assoc[t].stderr);
                    }
                    push_f64(&mut record, p.cp.mean);
                    push_f64(&mut record, p.cp.stderr);
                    push_f64(&mut record, p.nhp.mean);
                    push_f64(&mut record, p.nhp.stderr);
                    push_f64(&mut record, p.dop.mean);
                    push_f64(&mut record, p.dop.stderr);
                    let wm = row.mc_wm.map(|w| if idx == 0 { w.0 } else { w.1 }).unwrap_or(f64::NAN);
                    push_f64(&mut record, wm);
                }
                None => {
                    for _ in 0..2 * tiers + 7 {
                        record.push(String::new());
                    }
                }
            }
        }
    }
    record
}

pub fn analytic_policy_row(
    assoc: &[f64],
    cp: f64,
    nhp: &TierBreakdown,
    dop: &TierBreakdown,
    weights: WeightVector,
) -> AnalyticPolicyRow {
    AnalyticPolicyRow {
        assoc: assoc.to_vec(),
        cp,
        nhp: nhp.total,
        dop: dop.total,
        wm: weighted_metric(cp, nhp.total, dop.total, weights),
    }
}

pub fn mc_weighted_metrics(report: &McReport, weights: WeightVector) -> (f64, f64) {
    let wm = |p: &Option<hetsat::montecarlo::PolicyEstimates>| {
        p.as_ref()
            .map(|e| weighted_metric(e.cp.mean, e.nhp.mean, e.dop.mean, weights))
            .unwrap_or(f64::NAN)
    };
    (wm(&report.nearest), wm(&report.maxsinr))
}

/// Run-level metadata written next to the CSV.
pub struct Metadata<'a> {
    pub config_hash: String,
    pub seed: u64,
    pub trials: usize,
    pub command: &'a str,
    pub mode: Mode,
    pub threads: usize,
    pub warnings: Vec<String>,
    pub rows: usize,
    pub failed_rows: usize,
    pub decay_warning: bool,
    pub started: Instant,
}

pub fn write_metadata(path: &str, meta: &Metadata) -> std::io::Result<()> {
    let sidecar = serde_json::json!({
        "tool": "hetsat",
        "version": env!("CARGO_PKG_VERSION"),
        "command": meta.command,
        "mode": meta.mode.label(),
        "config_hash_sha256": meta.config_hash,
        "seed": meta.seed,
        "trials": meta.trials,
        "threads": meta.threads,
        "rows": meta.rows,
        "rows_with_numerical_failures": meta.failed_rows,
        "kernel_decay_warning": meta.decay_warning,
        "warnings": meta.warnings,
        "wall_time_s": meta.started.elapsed().as_secs_f64(),
    });
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{}", serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}
