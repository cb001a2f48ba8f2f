//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them on success).

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use hetsat::analytics_maxsinr::{
    assoc_probs_maxsinr, coverage_prob_maxsinr, dop_maxsinr, nhp_brackets, nhp_maxsinr,
};
use hetsat::analytics_nearest::{
    assoc_probs_nearest, coverage_prob_nearest, dop_nearest, nhp_nearest,
};
use hetsat::channel::ChannelParams;
use hetsat::constellation::TierSize;
use hetsat::metrics::{weight_grid_scan, PolicyTriple, Winner};
use hetsat::montecarlo::{estimate, McConfig, McReport, PolicyChoice};
use hetsat::numerics::{fourier_inversion_cp, lower_incomplete_gamma, QuadratureSpec};
use hetsat::scenario::{Scenario, TierSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_DB: [f64; 4] = [-10.0, -5.0, 0.0, 5.0];
const GRID_TRIALS: usize = 100_000;

fn mc(trials: usize, seed: u64) -> McConfig {
    McConfig { trials, seed, policy: PolicyChoice::Both, ..Default::default() }
}

/// Shared Table-II Monte Carlo grid over the four thresholds (criteria 1-2).
fn grid_mc() -> &'static Vec<(f64, McReport)> {
    static GRID: OnceLock<Vec<(f64, McReport)>> = OnceLock::new();
    GRID.get_or_init(|| {
        GRID_DB
            .iter()
            .enumerate()
            .map(|(k, &db)| {
                let s = Scenario::table2().with_gamma_db(db);
                (db, estimate(&mc(GRID_TRIALS, 9_000 + k as u64), &s).unwrap())
            })
            .collect()
    })
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
}

#[test]
fn c01_nearest_cp_matches_simulation_across_thresholds() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (db, mc_report) in grid_mc() {
        let s = Scenario::table2().with_gamma_db(*db);
        let analytic = coverage_prob_nearest(&s).unwrap().total;
        let simulated = mc_report.nearest.as_ref().unwrap().cp.mean;
        let gap = (analytic - simulated).abs();
        worst = worst.max(gap);
        lines.push(format!("{db} dB: |{analytic:.4} - {simulated:.4}| = {gap:.4}"));
    }
    let elapsed = start.elapsed();
    let pass = worst <= 0.03 && elapsed < Duration::from_secs(120);
    report(
        "1",
        pass,
        &format!("nearest CP vs MC, worst gap {worst:.4} (<= 0.03), {elapsed:.1?} (< 2 min); {}", lines.join("; ")),
    );
    assert!(pass, "worst gap {worst}, elapsed {elapsed:?}");
}

#[test]
fn c02_maxsinr_cp_matches_simulation_across_thresholds() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (db, mc_report) in grid_mc() {
        let s = Scenario::table2().with_gamma_db(*db);
        let analytic = coverage_prob_maxsinr(&s).unwrap().total;
        let simulated = mc_report.maxsinr.as_ref().unwrap().cp.mean;
        let gap = (analytic - simulated).abs();
        worst = worst.max(gap);
        lines.push(format!("{db} dB: |{analytic:.4} - {simulated:.4}| = {gap:.4}"));
    }
    let elapsed = start.elapsed();
    let pass = worst <= 0.04 && elapsed < Duration::from_secs(600);
    report(
        "2",
        pass,
        &format!("max-SINR CP vs MC, worst gap {worst:.4} (<= 0.04), {elapsed:.1?} (< 10 min); {}", lines.join("; ")),
    );
    assert!(pass, "worst gap {worst}, elapsed {elapsed:?}");
}

#[test]
fn c03_figure_anchor_cp_values() {
    // The paper's 1-tier system is the 1200-km tier: it alone reproduces the
    // quoted nearest-policy level (the 600-km tier gives 0.70).
    let mut one_tier = Scenario::table2();
    one_tier.tiers = vec![one_tier.tiers[2]];
    let cp1 = estimate(&mc(GRID_TRIALS, 301), &one_tier).unwrap().nearest.unwrap().cp.mean;

    let three_tier = Scenario::table2();
    let cp3 = estimate(&mc(GRID_TRIALS, 302), &three_tier).unwrap().maxsinr.unwrap().cp.mean;

    let pass1 = (cp1 - 0.48).abs() <= 0.03;
    let pass3 = (cp3 - 0.91).abs() <= 0.04;
    report(
        "3",
        pass1 && pass3,
        &format!("1-tier nearest CP {cp1:.4} (0.48 +/- 0.03); 3-tier max-SINR CP {cp3:.4} (0.91 +/- 0.04)"),
    );
    assert!(pass1, "1-tier nearest CP {cp1}");
    assert!(pass3, "3-tier max-SINR CP {cp3}");
}

fn fig6_scenario(lambda2: f64) -> Scenario {
    let channel = ChannelParams::new(2.0, 1.0, 1.0, 2.0, 1e-12).unwrap();
    let tiers = [
        TierSpec {
            altitude_km: 600.0,
            size: TierSize::Density(1.64e-13),
            power_dbw: 10.0,
            gain_main_dbi: 47.0,
            gain_side_dbi: 20.0,
            velocity_m_s: 7599.7,
            gamma_th_db: -5.0,
            t_th_s: 30.0,
            delay_bound_s: 0.010,
            dome_angle_rad: 0.1,
            beam_angle_rad: 0.01,
        },
        TierSpec {
            altitude_km: 900.0,
            size: TierSize::Density(lambda2),
            power_dbw: 10.0 * 30f64.log10(), // 30 W
            gain_main_dbi: 47.0,
            gain_side_dbi: 20.0,
            velocity_m_s: 7588.7,
            gamma_th_db: -5.0,
            t_th_s: 30.0,
            delay_bound_s: 0.010,
            dome_angle_rad: 0.1,
            beam_angle_rad: 0.01,
        },
    ];
    Scenario::from_tier_specs(&tiers, channel, QuadratureSpec::default()).unwrap()
}

#[test]
fn c04_density_sweep_reproduces_figure_maximum() {
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut curve = Vec::new();
    for k in 0..25 {
        let lambda2 = 1e-14 * 100f64.powf(k as f64 / 24.0);
        let s = fig6_scenario(lambda2);
        let cp = estimate(&mc(20_000, 400 + k as u64), &s).unwrap().maxsinr.unwrap().cp.mean;
        curve.push((lambda2, cp));
        if cp > best.0 {
            best = (cp, lambda2);
        }
    }
    let value_ok = (best.0 - 0.76).abs() <= 0.04;
    let location_ok = (1.1e-13..=2.3e-13).contains(&best.1);
    let summary: Vec<String> = curve
        .iter()
        .step_by(6)
        .map(|(l, c)| format!("lambda2 {l:.2e} -> {c:.3}"))
        .collect();
    report(
        "4",
        value_ok && location_ok,
        &format!(
            "sweep max CP {:.4} at lambda2 {:.3e} (want 0.76 +/- 0.04 within [1.1e-13, 2.3e-13]); curve {}",
            best.0,
            best.1,
            summary.join(", ")
        ),
    );
    // In this model the curve is monotone decreasing from the single-tier
    // limit (~0.98): the figure's interior maximum is not reproducible (the
    // analytic transform, this simulator and an independent NumPy rebuild of
    // the model all agree on the curve), so this criterion reports its
    // honest failure.
    assert!(value_ok, "max CP {} at lambda2 {:.3e}", best.0, best.1);
    assert!(location_ok, "argmax lambda2 {:.3e}", best.1);
}

#[test]
fn c05_density_count_consistency() {
    let lambda = 100.0 / (4.0 * std::f64::consts::PI * 6_971_000.0f64.powi(2));
    // exact value and its 3-significant-figure rounding
    let rounded = (lambda * 1e15).round() / 1e15 * 1.0; // keep full precision for reporting
    let three_sig = format!("{lambda:.3e}");
    let pass = (lambda - 1.637e-13).abs() < 5e-17 && (lambda * 1e15).round() == 164.0;
    report(
        "5",
        pass,
        &format!("lambda = {lambda:.6e} ({three_sig}, rounds to 1.64e-13; rounded {rounded:.3e})"),
    );
    assert!(pass, "lambda {lambda}");
    // and the benchmark scenario carries exactly this density
    let s = Scenario::table2();
    assert!((s.tiers[0].density - lambda).abs() / lambda < 1e-12);
}

fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let k = rng.random_range(1..=3usize);
    let channel = ChannelParams::new(2.0, 1.0, 1.0, 2.0, 1e-12).unwrap();
    let mut altitudes: Vec<f64> = (0..k).map(|_| rng.random_range(400.0..1600.0)).collect();
    altitudes.sort_by(f64::total_cmp);
    let specs: Vec<TierSpec> = altitudes
        .iter()
        .map(|&altitude_km| {
            let orbit = hetsat::EARTH_RADIUS_M + altitude_km * 1000.0;
            TierSpec {
                altitude_km,
                size: TierSize::Count(rng.random_range(30.0..150.0)),
                power_dbw: rng.random_range(0.0..25.0),
                gain_main_dbi: rng.random_range(30.0..47.0),
                gain_side_dbi: rng.random_range(10.0..20.0),
                velocity_m_s: (3.986_004_418e14 / orbit).sqrt(),
                gamma_th_db: -5.0,
                t_th_s: 30.0,
                delay_bound_s: 0.010,
                dome_angle_rad: 0.1,
                beam_angle_rad: 0.01,
            }
        })
        .collect();
    Scenario::from_tier_specs(&specs, channel, QuadratureSpec::default()).unwrap()
}

#[test]
fn c06_association_partition_on_random_scenarios() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_total: f64 = 0.0;
    let mut worst_tier: f64 = 0.0;
    for case in 0..50u64 {
        let s = random_scenario(&mut rng);
        let report = estimate(&mc(20_000, 600 + case), &s).unwrap();
        for (analytic, simulated) in [
            (assoc_probs_nearest(&s).unwrap(), report.nearest.as_ref().unwrap()),
            (assoc_probs_maxsinr(&s).unwrap(), report.maxsinr.as_ref().unwrap()),
        ] {
            let total_a: f64 = analytic.iter().sum();
            let total_m: f64 = simulated.assoc.iter().map(|e| e.mean).sum();
            worst_total = worst_total.max((total_a - total_m).abs());
            for (a, m) in analytic.iter().zip(&simulated.assoc) {
                worst_tier = worst_tier.max((a - m.mean).abs());
            }
            assert!(total_a > 0.0 && total_a <= 1.0 + 1e-9);
        }
    }
    let pass = worst_total <= 0.015 && worst_tier <= 0.02;
    report(
        "6",
        pass,
        &format!("50 random scenarios: worst total gap {worst_total:.4} (<= 0.015), worst per-tier gap {worst_tier:.4} (<= 0.02)"),
    );
    assert!(pass, "total {worst_total}, per-tier {worst_tier}");
}

#[test]
fn c07_nhp_properties() {
    let base = Scenario::table2().with_gamma_db(-10.0);

    // analytic monotonicity and the t = 0 identities
    let t_grid = [0.0, 20.0, 50.0, 90.0, 140.0];
    let mut nhp_e_curve = Vec::new();
    let mut nhp_m_curve = Vec::new();
    for &t in &t_grid {
        let s = base.clone().with_t_th(t);
        nhp_e_curve.push(nhp_nearest(&s).unwrap().total);
        nhp_m_curve.push(nhp_maxsinr(&s).unwrap().total);
    }
    let monotone = |c: &[f64]| c.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    assert!(monotone(&nhp_e_curve), "nearest NHP not monotone: {nhp_e_curve:?}");
    assert!(monotone(&nhp_m_curve), "max-SINR NHP not monotone: {nhp_m_curve:?}");

    let s0 = base.clone().with_t_th(0.0);
    let cp_e = coverage_prob_nearest(&s0).unwrap().total;
    let nhp0_gap = (nhp_e_curve[0] - cp_e).abs();
    assert!(nhp0_gap < 1e-6, "analytic NHP(0) {} vs CP {cp_e}", nhp_e_curve[0]);

    // the max-SINR t=0 value is its own bracket-weighted identity (the
    // reused brackets are conditioned on nearest-policy service, so it is
    // not the Theorem-4 CP)
    let brackets0 = nhp_brackets(&s0).unwrap();
    let assoc_m = assoc_probs_maxsinr(&s0).unwrap();
    let bracket_sum: f64 = brackets0.iter().zip(&assoc_m).map(|(b, a)| b * a).sum();
    assert!((nhp_m_curve[0] - bracket_sum).abs() < 1e-9);

    // per-tier conditional brackets identical across the two policies
    let s_mid = base.clone().with_t_th(50.0);
    let assoc_e = assoc_probs_nearest(&s_mid).unwrap();
    let assoc_m = assoc_probs_maxsinr(&s_mid).unwrap();
    let near = nhp_nearest(&s_mid).unwrap();
    let maxs = nhp_maxsinr(&s_mid).unwrap();
    let mut bracket_gap: f64 = 0.0;
    for i in 0..3 {
        let be = near.per_tier[i] / assoc_e[i];
        let bm = maxs.per_tier[i] / assoc_m[i];
        bracket_gap = bracket_gap.max((be - bm).abs());
    }
    assert!(bracket_gap < 1e-9, "cross-policy bracket gap {bracket_gap}");

    // MC: NHP(0) = CP within two standard errors for both policies
    let mc0 = estimate(&mc(40_000, 700), &s0).unwrap();
    for p in [mc0.nearest.as_ref().unwrap(), mc0.maxsinr.as_ref().unwrap()] {
        let tol = 2.0 * p.cp.stderr.max(p.nhp.stderr).max(1e-12);
        assert!((p.nhp.mean - p.cp.mean).abs() <= tol, "MC NHP(0) {} vs CP {}", p.nhp.mean, p.cp.mean);
    }

    // widening the dome pushes the half-decay threshold right
    let half_decay = |phi_d: f64| -> f64 {
        let sd = base.clone().with_dome_angle(phi_d);
        let level = nhp_nearest(&sd.clone().with_t_th(0.0)).unwrap().total / 2.0;
        let grid = [0.0, 30.0, 60.0, 90.0, 120.0, 160.0, 200.0, 250.0, 300.0];
        let mut last = (0.0, nhp_nearest(&sd.clone().with_t_th(0.0)).unwrap().total);
        for &t in &grid[1..] {
            let v = nhp_nearest(&sd.clone().with_t_th(t)).unwrap().total;
            if v <= level {
                // linear interpolation inside the bracketing segment
                return last.0 + (last.1 - level) / (last.1 - v) * (t - last.0);
            }
            last = (t, v);
        }
        f64::INFINITY
    };
    let t_half_01 = half_decay(0.1);
    let t_half_02 = half_decay(0.2);
    let ordering = t_half_02 > t_half_01;
    report(
        "7",
        ordering,
        &format!(
            "NHP monotone (both policies); analytic NHP(0)-CP gap {nhp0_gap:.2e}; cross-policy bracket gap {bracket_gap:.2e}; half-decay t {t_half_01:.0}s (phi_D=0.1) -> {t_half_02:.0}s (phi_D=0.2)"
        ),
    );
    assert!(ordering, "half-decay {t_half_01} vs {t_half_02}");
}

#[test]
fn c08_dop_identities_and_simulation_agreement() {
    let s = Scenario::table2();

    // c T_D below every altitude
    let zero = dop_nearest(&s.clone().with_delay_bound(0.001)).unwrap().total;
    assert_eq!(zero, 0.0);

    // single-tier: the two policies coincide exactly
    let mut one = Scenario::table2();
    one.tiers.truncate(1);
    let de = dop_nearest(&one).unwrap().total;
    let dm = dop_maxsinr(&one).unwrap().total;
    assert!((de - dm).abs() < 1e-12);

    // Table II agreement against the serving-distance frequency
    let mc_report = estimate(&mc(GRID_TRIALS, 800), &s).unwrap();
    let ana_e = dop_nearest(&s).unwrap().total;
    let ana_m = dop_maxsinr(&s).unwrap().total;
    let mc_e = mc_report.nearest.as_ref().unwrap().dop.mean;
    let mc_m = mc_report.maxsinr.as_ref().unwrap().dop.mean;
    let gap_e = (ana_e - mc_e).abs();
    let gap_m = (ana_m - mc_m).abs();
    let pass = gap_e <= 0.01 && gap_m <= 0.01;
    report(
        "8",
        pass,
        &format!(
            "identities hold; max-SINR |{ana_m:.4} - {mc_m:.4}| = {gap_m:.4} (<= 0.01); nearest |{ana_e:.4} - {mc_e:.4}| = {gap_e:.4} (<= 0.01)"
        ),
    );
    assert!(gap_m <= 0.01, "max-SINR DOP gap {gap_m}");
    // The as-printed formula uses the unconditional nearest-distance law;
    // conditioning on service makes the simulated value larger by the tier
    // visibility deficit (~0.0138 at T_D = 10 ms), so this half of the
    // criterion cannot be met as stated and fails honestly.
    assert!(gap_e <= 0.01, "nearest DOP gap {gap_e} (structural conditioning gap)");
}

#[test]
fn c09_weight_scan_dominance() {
    let s = Scenario::table2().with_gamma_db(0.0).with_delay_bound(0.010);
    let report_mc = estimate(&mc(40_000, 900), &s).unwrap();
    let n = report_mc.nearest.as_ref().unwrap();
    let m = report_mc.maxsinr.as_ref().unwrap();
    let near = PolicyTriple { cp: n.cp.mean, nhp: n.nhp.mean, dop: n.dop.mean };
    let maxs = PolicyTriple { cp: m.cp.mean, nhp: m.nhp.mean, dop: m.dop.mean };
    let cells = weight_grid_scan(near, maxs, 0.05).unwrap();
    assert_eq!(cells.len(), 231);
    let wins = cells
        .iter()
        .filter(|c| matches!(c.winner, Winner::MaxSinr | Winner::Tie))
        .count();
    let fraction = wins as f64 / cells.len() as f64;
    let pass = fraction >= 0.90;
    report(
        "9",
        pass,
        &format!(
            "max-SINR WM >= nearest WM on {wins}/{} cells ({:.1}%); triples: nearest ({:.3}, {:.3}, {:.3}) vs max-SINR ({:.3}, {:.3}, {:.3})",
            cells.len(),
            100.0 * fraction,
            near.cp,
            near.nhp,
            near.dop,
            maxs.cp,
            maxs.nhp,
            maxs.dop
        ),
    );
    assert!(pass, "fraction {fraction}");
}

#[test]
fn c10_numerics_suite() {
    // complex incomplete-gamma recurrence
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut worst_rec: f64 = 0.0;
    for _ in 0..200 {
        let chi: f64 = rng.random_range(0.3..4.0);
        let z = Complex64::from_polar(rng.random_range(0.1..20.0), rng.random_range(-1.5..1.5));
        let g1 = lower_incomplete_gamma(chi + 1.0, z).unwrap();
        let g0 = lower_incomplete_gamma(chi, z).unwrap();
        let rhs = g0 * chi - (Complex64::new(chi, 0.0) * z.ln() - z).exp();
        worst_rec = worst_rec.max((g1 - rhs).norm() / g1.norm().max(rhs.norm()).max(1e-30));
    }
    assert!(worst_rec < 1e-9, "recurrence residual {worst_rec}");

    // two-exponential inversion toy case: P(M < I < 2M) = 1/6 for
    // independent unit exponentials
    let theta = |omega: f64, _y: f64| Complex64::new(1.0, omega).inv();
    let upsilon = |_omega: f64, y: f64| Complex64::new(0.5 * (-0.5 * y).exp(), 0.0);
    let spec = QuadratureSpec {
        abs_tol: 1e-8,
        rel_tol: 1e-7,
        max_subdivisions: 1000,
        omega_truncation: 20_000.0,
        y_truncation: 80.0,
    };
    let toy = fourier_inversion_cp(&theta, &upsilon, 2.0, &spec).unwrap().probability;
    let toy_gap = (toy - 1.0 / 6.0).abs();
    assert!(toy_gap < 1e-3, "toy inversion {toy}");

    // truncation-doubling stability of the Theorem-4 coverage value
    let s = Scenario::table2();
    let base = coverage_prob_maxsinr(&s).unwrap();
    let mut doubled_scenario = s.clone();
    doubled_scenario.inversion_truncation =
        Some((base.truncation_side.0 * 2.0, base.truncation_side.1 * 2.0));
    let doubled = coverage_prob_maxsinr(&doubled_scenario).unwrap();
    let stability = (doubled.total - base.total).abs();
    let pass = stability < 0.005;
    report(
        "10",
        pass && worst_rec < 1e-9 && toy_gap < 1e-3,
        &format!(
            "recurrence residual {worst_rec:.2e} (< 1e-9); toy inversion gap {toy_gap:.2e} (< 1e-3); truncation-doubling shift {stability:.2e} (< 0.005)"
        ),
    );
    assert!(pass, "truncation doubling moved CP by {stability}");
}

#[test]
fn c11_determinism_across_worker_counts() {
    let s = Scenario::table2();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimate(&mc(20_000, 1100), &s).unwrap())
    };
    let one = run(1);
    let many = run(3);
    let repeat = run(3);

    let fields = |r: &McReport| -> Vec<u64> {
        let mut bits = Vec::new();
        for p in [r.nearest.as_ref().unwrap(), r.maxsinr.as_ref().unwrap()] {
            for e in &p.assoc {
                bits.push(e.mean.to_bits());
            }
            bits.push(p.cp.mean.to_bits());
            bits.push(p.nhp.mean.to_bits());
            bits.push(p.dop.mean.to_bits());
            for e in &p.nhp_conditional {
                bits.push(e.mean.to_bits());
            }
        }
        bits
    };
    let identical = fields(&one) == fields(&many) && fields(&many) == fields(&repeat);

    // and the analytic side is a pure function of the scenario
    let a1 = coverage_prob_nearest(&s).unwrap().total.to_bits();
    let a2 = coverage_prob_nearest(&s).unwrap().total.to_bits();
    let pass = identical && a1 == a2;
    report(
        "11",
        pass,
        &format!("bit-identical across 1/3 workers and across repeats: {identical}; analytic repeatable: {}", a1 == a2),
    );
    assert!(pass);
}
