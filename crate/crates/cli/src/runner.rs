//! Command execution: metrics, sweeps, weight scans and the Walker-delta
//! calibration comparison.

use hetsat::analytics_maxsinr::{
    assoc_probs_maxsinr, coverage_prob_maxsinr, dop_maxsinr, nhp_brackets,
};
use hetsat::analytics_nearest::{
    assoc_probs_nearest, coverage_prob_nearest, dop_nearest, TierBreakdown,
};
use hetsat::metrics::{weight_grid_scan, PolicyTriple};
use hetsat::montecarlo::{estimate, estimate_walker, McConfig, McReport};
use hetsat::scenario::Scenario;

use crate::config::{apply_sweep_value, sweep_values, LoadedScenario};
use crate::output::{
    analytic_policy_row, mc_weighted_metrics, metric_header, metric_record, Mode, Row,
};

pub struct RunOutcome {
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
    pub failed_rows: usize,
    pub decay_warning: bool,
}

fn evaluate_point(
    scenario: &Scenario,
    mc_config: &McConfig,
    mode: Mode,
    loaded: &LoadedScenario,
) -> (Row, bool, bool) {
    let mut row = Row { status: "ok".into(), ..Default::default() };
    let mut decay = false;
    let mut failures: Vec<String> = Vec::new();

    if mode.includes_analytic() {
        let analytic = (|| -> hetsat::Result<()> {
            let assoc_e = assoc_probs_nearest(scenario)?;
            let assoc_m = assoc_probs_maxsinr(scenario)?;
            let cp_e = coverage_prob_nearest(scenario)?;
            let cp_m = coverage_prob_maxsinr(scenario)?;
            decay |= cp_m.decay_warning;
            let brackets = nhp_brackets(scenario)?;
            let weigh = |assoc: &[f64]| TierBreakdown {
                total: brackets.iter().zip(assoc).map(|(b, a)| b * a).sum(),
                per_tier: brackets.iter().zip(assoc).map(|(b, a)| b * a).collect(),
            };
            let nhp_e = weigh(&assoc_e);
            let nhp_m = weigh(&assoc_m);
            let dop_e = dop_nearest(scenario)?;
            let dop_m = dop_maxsinr(scenario)?;
            row.analytic_nearest =
                Some(analytic_policy_row(&assoc_e, cp_e.total, &nhp_e, &dop_e, loaded.weights));
            row.analytic_maxsinr =
                Some(analytic_policy_row(&assoc_m, cp_m.total, &nhp_m, &dop_m, loaded.weights));
            Ok(())
        })();
        if let Err(e) = analytic {
            failures.push(format!("analytic: {e}"));
        }
    }

    if mode.includes_mc() {
        match estimate(mc_config, scenario) {
            Ok(report) => {
                row.mc_wm = Some(mc_weighted_metrics(&report, loaded.weights));
                row.mc = Some(report);
            }
            Err(e) => failures.push(format!("mc: {e}")),
        }
    }

    let failed = !failures.is_empty();
    if failed {
        row.status = failures.join("; ");
    }
    (row, failed, decay)
}

pub fn run_metrics(loaded: &LoadedScenario, mc_config: &McConfig, mode: Mode) -> RunOutcome {
    let tiers = loaded.scenario.tiers.len();
    let (mut row, failed, decay) = evaluate_point(&loaded.scenario, mc_config, mode, loaded);
    row.sweep_value = 0.0;
    RunOutcome {
        header: metric_header(mode, tiers),
        records: vec![metric_record(&row, "none", mode, tiers)],
        failed_rows: failed as usize,
        decay_warning: decay,
    }
}

pub fn run_sweep(loaded: &LoadedScenario, mc_config: &McConfig, mode: Mode) -> Result<RunOutcome, String> {
    let sweep = loaded.sweep.as_ref().ok_or("the sweep command needs a [sweep] section")?;
    let tiers = loaded.scenario.tiers.len();
    let values = sweep_values(sweep);
    let mut records = Vec::with_capacity(values.len());
    let mut failed_rows = 0usize;
    let mut decay = false;
    for v in values {
        let scenario = apply_sweep_value(&loaded.scenario, &sweep.variable, v);
        let (mut row, failed, row_decay) = evaluate_point(&scenario, mc_config, mode, loaded);
        row.sweep_value = v;
        failed_rows += failed as usize;
        decay |= row_decay;
        records.push(metric_record(&row, &sweep.variable, mode, tiers));
    }
    Ok(RunOutcome { header: metric_header(mode, tiers), records, failed_rows, decay_warning: decay })
}

pub fn run_weight_scan(loaded: &LoadedScenario, mc_config: &McConfig, mode: Mode) -> Result<RunOutcome, String> {
    // The scan needs one (CP, NHP, DOP) triple per policy: the MC side when
    // the mode includes it, the closed forms otherwise.
    let s = &loaded.scenario;
    let (nearest, maxsinr) = if mode.includes_mc() {
        let report: McReport = estimate(mc_config, s).map_err(|e| format!("mc: {e}"))?;
        let n = report.nearest.as_ref().expect("both policies requested");
        let m = report.maxsinr.as_ref().expect("both policies requested");
        (
            PolicyTriple { cp: n.cp.mean, nhp: n.nhp.mean, dop: n.dop.mean },
            PolicyTriple { cp: m.cp.mean, nhp: m.nhp.mean, dop: m.dop.mean },
        )
    } else {
        let assoc_e = assoc_probs_nearest(s).map_err(|e| e.to_string())?;
        let assoc_m = assoc_probs_maxsinr(s).map_err(|e| e.to_string())?;
        let brackets = nhp_brackets(s).map_err(|e| e.to_string())?;
        let cp_e = coverage_prob_nearest(s).map_err(|e| e.to_string())?;
        let cp_m = coverage_prob_maxsinr(s).map_err(|e| e.to_string())?;
        let nhp = |assoc: &[f64]| brackets.iter().zip(assoc).map(|(b, a)| b * a).sum::<f64>();
        (
            PolicyTriple {
                cp: cp_e.total,
                nhp: nhp(&assoc_e),
                dop: dop_nearest(s).map_err(|e| e.to_string())?.total,
            },
            PolicyTriple {
                cp: cp_m.total,
                nhp: nhp(&assoc_m),
                dop: dop_maxsinr(s).map_err(|e| e.to_string())?.total,
            },
        )
    };

    let cells = weight_grid_scan(nearest, maxsinr, loaded.grid_step).map_err(|e| e.to_string())?;
    let header = vec![
        "w1".to_string(),
        "w2".to_string(),
        "w3".to_string(),
        "wm_nearest".to_string(),
        "wm_maxsinr".to_string(),
        "winner".to_string(),
    ];
    let records = cells
        .iter()
        .map(|c| {
            vec![
                format!("{}", c.w.w1),
                format!("{}", c.w.w2),
                format!("{}", c.w.w3),
                format!("{}", c.wm_nearest),
                format!("{}", c.wm_maxsinr),
                c.winner.label().to_string(),
            ]
        })
        .collect();
    Ok(RunOutcome { header, records, failed_rows: 0, decay_warning: false })
}

pub fn run_calibrate(loaded: &LoadedScenario, mc_config: &McConfig) -> Result<RunOutcome, String> {
    // Poisson reference matched to the Walker shell: same altitude, same
    // expected count, first tier's radio parameters.
    let walker = &loaded.walker;
    let base = &loaded.scenario.tiers[0];
    let geometry = hetsat::geometry::TierGeometry::new(
        walker.altitude_m,
        base.geometry.phi_m_beam,
        base.geometry.phi_d,
        hetsat::EARTH_RADIUS_M,
    )
    .map_err(|e| e.to_string())?;
    let total = (walker.planes * walker.sats_per_plane) as f64;
    let tier = hetsat::constellation::TierConfig::new(
        geometry,
        hetsat::constellation::TierSize::Count(total),
        base.power_w,
        base.gain_main,
        base.gain_side,
        base.velocity_m_s,
        base.gamma_th,
        base.t_th_s,
        base.delay_bound_s,
    )
    .map_err(|e| e.to_string())?;
    let mut ppp = loaded.scenario.clone();
    ppp.tiers = vec![tier];

    let ppp_report = estimate(mc_config, &ppp).map_err(|e| e.to_string())?;
    let walker_report =
        estimate_walker(mc_config, &loaded.scenario, walker).map_err(|e| e.to_string())?;

    let header = vec![
        "variant".to_string(),
        "policy".to_string(),
        "trials".to_string(),
        "cp".to_string(),
        "cp_stderr".to_string(),
        "nhp".to_string(),
        "nhp_stderr".to_string(),
        "dop".to_string(),
        "dop_stderr".to_string(),
    ];
    let mut records = Vec::new();
    for (variant, report) in [("ppp", &ppp_report), ("walker", &walker_report)] {
        for (policy, est) in [("nearest", &report.nearest), ("maxsinr", &report.maxsinr)] {
            let p = est.as_ref().expect("both policies estimated");
            records.push(vec![
                variant.to_string(),
                policy.to_string(),
                format!("{}", report.trials),
                format!("{}", p.cp.mean),
                format!("{}", p.cp.stderr),
                format!("{}", p.nhp.mean),
                format!("{}", p.nhp.stderr),
                format!("{}", p.dop.mean),
                format!("{}", p.dop.stderr),
            ]);
        }
    }
    Ok(RunOutcome { header, records, failed_rows: 0, decay_warning: false })
}
