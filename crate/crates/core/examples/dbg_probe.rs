use hetsat::analytics_maxsinr::coverage_prob_maxsinr;
use hetsat::scenario::Scenario;
use std::time::Instant;

fn main() {
    for db in [-10.0, -5.0, 0.0, 5.0] {
        let s = Scenario::table2().with_gamma_db(db);
        let t0 = Instant::now();
        match coverage_prob_maxsinr(&s) {
            Ok(r) => println!(
                "{db:>6.1} dB: CP^M {:.4} (side {:.4}, warn {}, trunc side {:?})  [{:?}]",
                r.total, r.side_branch, r.decay_warning, r.truncation_side, t0.elapsed()
            ),
            Err(e) => println!("{db:>6.1} dB: ERROR {e}"),
        }
    }
    let mut s1 = Scenario::table2();
    s1.tiers.truncate(1);
    let t0 = Instant::now();
    let r = coverage_prob_maxsinr(&s1).unwrap();
    println!("1-tier: CP^M {:.4} (warn {})  [{:?}]", r.total, r.decay_warning, t0.elapsed());
}
