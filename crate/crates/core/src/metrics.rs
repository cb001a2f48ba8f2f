//! Weighted-metric composition and the weight-grid scan comparing the two
//! association policies across the simplex of (coverage, non-handover,
//! delay) weights.

use crate::{Error, Result};

/// Convex weights for (CP, NHP, DOP).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl WeightVector {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self> {
        if w1 < 0.0 || w2 < 0.0 || w3 < 0.0 {
            return Err(Error::domain("WeightVector", format!("weights must be nonnegative: ({w1}, {w2}, {w3})")));
        }
        if ((w1 + w2 + w3) - 1.0).abs() > 1e-12 {
            return Err(Error::domain(
                "WeightVector",
                format!("weights must sum to one, got {}", w1 + w2 + w3),
            ));
        }
        Ok(WeightVector { w1, w2, w3 })
    }
}

/// The scalarized metric `w1·CP + w2·NHP + w3·DOP`.
pub fn weighted_metric(cp: f64, nhp: f64, dop: f64, w: WeightVector) -> f64 {
    w.w1 * cp + w.w2 * nhp + w.w3 * dop
}

/// The three per-policy inputs of a weight scan.
#[derive(Debug, Clone, Copy)]
pub struct PolicyTriple {
    pub cp: f64,
    pub nhp: f64,
    pub dop: f64,
}

/// Which policy wins a grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Nearest,
    MaxSinr,
    Tie,
}

impl Winner {
    pub fn label(self) -> &'static str {
        match self {
            Winner::Nearest => "nearest",
            Winner::MaxSinr => "max-sinr",
            Winner::Tie => "tie",
        }
    }
}

/// One valid cell of the scanned weight simplex.
#[derive(Debug, Clone, Copy)]
pub struct ScanCell {
    pub w: WeightVector,
    pub wm_nearest: f64,
    pub wm_maxsinr: f64,
    pub winner: Winner,
}

/// Enumerates `(w1, w3)` on a step grid with `w2 = 1 − w1 − w3 ≥ 0`
/// (cells violating the constraint are skipped) and labels the per-cell
/// winner from precomputed policy triples.
pub fn weight_grid_scan(nearest: PolicyTriple, maxsinr: PolicyTriple, grid_step: f64) -> Result<Vec<ScanCell>> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::domain("weight_grid_scan", format!("grid step must lie in (0, 1], got {grid_step}")));
    }
    let n = (1.0 / grid_step).round() as usize;
    let mut cells = Vec::new();
    for i in 0..=n {
        for k in 0..=n {
            let w1 = i as f64 * grid_step;
            let w3 = k as f64 * grid_step;
            let w2 = 1.0 - w1 - w3;
            if w2 < -1e-12 {
                continue;
            }
            let w = WeightVector { w1, w2: w2.max(0.0), w3 };
            let wm_nearest = weighted_metric(nearest.cp, nearest.nhp, nearest.dop, w);
            let wm_maxsinr = weighted_metric(maxsinr.cp, maxsinr.nhp, maxsinr.dop, w);
            let winner = if (wm_maxsinr - wm_nearest).abs() < 1e-15 {
                Winner::Tie
            } else if wm_maxsinr > wm_nearest {
                Winner::MaxSinr
            } else {
                Winner::Nearest
            };
            cells.push(ScanCell { w, wm_nearest, wm_maxsinr, winner });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn corner_weights_recover_components() {
        let w_cp = WeightVector::new(1.0, 0.0, 0.0).unwrap();
        let w_dop = WeightVector::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(weighted_metric(0.7, 0.5, 0.3, w_cp), 0.7);
        assert_eq!(weighted_metric(0.7, 0.5, 0.3, w_dop), 0.3);
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(0.5, 0.5, 0.1).is_err());
        assert!(WeightVector::new(-0.1, 0.6, 0.5).is_err());
        assert!(WeightVector::new(0.2, 0.3, 0.5).is_ok());
    }

    proptest! {
        #[test]
        fn equal_components_are_a_fixed_point(p in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            prop_assume!(a + b <= 1.0);
            let w = WeightVector { w1: a, w2: 1.0 - a - b, w3: b };
            let wm = weighted_metric(p, p, p, w);
            prop_assert!((wm - p).abs() < 1e-12);
        }

        #[test]
        fn slope_in_w1_at_fixed_w3_is_cp_minus_nhp(cp in 0.0f64..1.0, nhp in 0.0f64..1.0, dop in 0.0f64..1.0, w3 in 0.0f64..0.5) {
            // trading w1 against w2 at fixed w3
            let eps = 1e-6;
            let at = |w1: f64| weighted_metric(cp, nhp, dop, WeightVector { w1, w2: 1.0 - w1 - w3, w3 });
            let slope = (at(0.3 + eps) - at(0.3)) / eps;
            prop_assert!((slope - (cp - nhp)).abs() < 1e-6);
        }
    }

    #[test]
    fn unit_step_gives_three_corner_cells() {
        let near = PolicyTriple { cp: 0.4, nhp: 0.3, dop: 0.9 };
        let max = PolicyTriple { cp: 0.8, nhp: 0.6, dop: 0.7 };
        let cells = weight_grid_scan(near, max, 1.0).unwrap();
        assert_eq!(cells.len(), 3);
        for c in &cells {
            let expect_near = weighted_metric(near.cp, near.nhp, near.dop, c.w);
            let expect_max = weighted_metric(max.cp, max.nhp, max.dop, c.w);
            assert_relative_eq!(c.wm_nearest, expect_near, epsilon = 1e-15);
            assert_relative_eq!(c.wm_maxsinr, expect_max, epsilon = 1e-15);
            let expected_winner = if expect_max > expect_near { Winner::MaxSinr } else { Winner::Nearest };
            assert_eq!(c.winner, expected_winner);
        }
    }

    #[test]
    fn grid_cell_count_matches_simplex_formula() {
        let near = PolicyTriple { cp: 0.4, nhp: 0.3, dop: 0.9 };
        let max = PolicyTriple { cp: 0.8, nhp: 0.6, dop: 0.7 };
        // step 0.05: sum_{k=0..20} (21 - k) = 231 valid cells
        let cells = weight_grid_scan(near, max, 0.05).unwrap();
        assert_eq!(cells.len(), 231);
        assert!(cells.iter().all(|c| c.w.w2 >= 0.0));
    }

    #[test]
    fn dominant_policy_wins_every_cell() {
        let near = PolicyTriple { cp: 0.4, nhp: 0.3, dop: 0.7 };
        let max = PolicyTriple { cp: 0.8, nhp: 0.6, dop: 0.7 };
        let cells = weight_grid_scan(near, max, 0.1).unwrap();
        // DOP ties exactly at the w3 = 1 corner; everywhere else max-SINR wins
        assert!(cells
            .iter()
            .all(|c| c.winner == Winner::MaxSinr || (c.winner == Winner::Tie && c.w.w3 == 1.0)));
    }

    #[test]
    fn winners_invariant_under_common_rescaling() {
        let near = PolicyTriple { cp: 0.4, nhp: 0.3, dop: 0.9 };
        let max = PolicyTriple { cp: 0.8, nhp: 0.6, dop: 0.7 };
        let scale = 0.37;
        let scaled = |t: PolicyTriple| PolicyTriple { cp: t.cp * scale, nhp: t.nhp * scale, dop: t.dop * scale };
        let a = weight_grid_scan(near, max, 0.2).unwrap();
        let b = weight_grid_scan(scaled(near), scaled(max), 0.2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.winner, y.winner);
        }
    }
}
