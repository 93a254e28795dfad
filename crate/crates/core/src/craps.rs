//! Absorbing-chain model of the game of craps.
//!
//! Nine states: a come-out roll, six point states (4, 5, 6, 8, 9, 10),
//! and absorbing win/lose states. Transition probabilities come from dice
//! combinatorics; absorption analysis recovers the classical win
//! probability 244/495 and expected game length. The same machinery that
//! analyzes transfer-pool chains runs here unchanged, which makes this a
//! ready-made end-to-end check with an exactly known answer.

use crate::error::{Error, Result};
use crate::markov::{self, StationaryDistribution, TransitionMatrix};
use crate::matrix::Matrix;

pub const COMEOUT: &str = "comeout";
pub const WIN: &str = "win";
pub const LOSE: &str = "lose";

/// State order: come-out, points 4, 5, 6, 8, 9, 10, then win and lose.
pub const STATE_LABELS: [&str; 9] = [
    COMEOUT, "point4", "point5", "point6", "point8", "point9", "point10", WIN, LOSE,
];

/// Point values in state order and the number of dice combinations that
/// roll each: 4 and 10 in 3 ways, 5 and 9 in 4, 6 and 8 in 5.
const POINTS: [(u32, f64); 6] = [(4, 3.0), (5, 4.0), (6, 5.0), (8, 5.0), (9, 4.0), (10, 3.0)];

/// The craps transition matrix, entries in 36ths.
///
/// Come-out: 7 or 11 wins (8/36), 2, 3, or 12 loses (4/36), anything else
/// establishes the matching point. From point `k`: rolling `k` again wins
/// (ways(k)/36), a 7 loses (6/36), everything else stays on the point.
pub fn build_craps_chain() -> Result<TransitionMatrix> {
    let mut rows = vec![vec![0.0; 9]; 9];
    rows[0][7] = 8.0 / 36.0;
    rows[0][8] = 4.0 / 36.0;
    for (i, &(_, ways)) in POINTS.iter().enumerate() {
        rows[0][1 + i] = ways / 36.0;
        rows[1 + i][7] = ways / 36.0;
        rows[1 + i][8] = 6.0 / 36.0;
        rows[1 + i][1 + i] = (30.0 - ways) / 36.0;
    }
    rows[7][7] = 1.0;
    rows[8][8] = 1.0;
    TransitionMatrix::new(
        STATE_LABELS.iter().map(|s| s.to_string()).collect(),
        Matrix::from_rows(&rows)?,
    )
}

/// Probability that a game starting from the come-out roll ends in a win:
/// exactly 244/495.
pub fn craps_win_probability() -> Result<f64> {
    let chain = build_craps_chain()?;
    markov::absorption_probabilities(&chain)?.absorb_probability(COMEOUT, WIN)
}

/// Expected number of rolls until the game ends, from the come-out roll.
pub fn craps_expected_rolls() -> Result<f64> {
    let chain = build_craps_chain()?;
    markov::absorption_probabilities(&chain)?.steps_to_absorption(COMEOUT)
}

/// The craps win probability set against a two-state pool chain's
/// stationary share of the receiving state.
#[derive(Clone, Debug, PartialEq)]
pub struct PoolComparison {
    pub craps_win: f64,
    pub pool_receiver: f64,
    /// Absolute gap between the two probabilities.
    pub difference: f64,
}

/// Compares the craps win probability with the long-run receiver share of a
/// two-state pool. Uses the state labeled "receiver" when present, the
/// second state otherwise. Errors with `Dimension` unless the distribution
/// has exactly two states.
pub fn compare_with_pool(pool: &StationaryDistribution) -> Result<PoolComparison> {
    if pool.states().len() != 2 {
        return Err(Error::Dimension(format!(
            "pool comparison needs a 2-state distribution, got {}",
            pool.states().len()
        )));
    }
    let pool_receiver = pool
        .probability("receiver")
        .unwrap_or_else(|_| pool.pi()[1]);
    let craps_win = craps_win_probability()?;
    Ok(PoolComparison {
        craps_win,
        pool_receiver,
        difference: (craps_win - pool_receiver).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Directly enumerated win probability: win on the come-out with 8/36,
    /// or establish point k and then win the geometric race, which pays
    /// ways(k) / (ways(k) + 6) because only k or 7 ends the point phase.
    fn enumerated_win_probability() -> f64 {
        let mut p = 8.0 / 36.0;
        for &(_, ways) in &POINTS {
            p += (ways / 36.0) * (ways / (ways + 6.0));
        }
        p
    }

    /// Expected rolls, enumerated: one come-out roll plus, per point, the
    /// mean of the geometric number of follow-up rolls, 36 / (ways + 6).
    fn enumerated_expected_rolls() -> f64 {
        let mut r = 1.0;
        for &(_, ways) in &POINTS {
            r += (ways / 36.0) * (36.0 / (ways + 6.0));
        }
        r
    }

    #[test]
    fn chain_rows_match_dice_combinatorics() {
        let chain = build_craps_chain().unwrap();
        assert_eq!(chain.n_states(), 9);
        assert!((chain.entry(0, 7) - 8.0 / 36.0).abs() < 1e-15);
        assert!((chain.entry(0, 8) - 4.0 / 36.0).abs() < 1e-15);
        // Point 6: five ways in, five ways to win, six ways to lose.
        let p6 = chain.index_of("point6").unwrap();
        assert!((chain.entry(0, p6) - 5.0 / 36.0).abs() < 1e-15);
        assert!((chain.entry(p6, 7) - 5.0 / 36.0).abs() < 1e-15);
        assert!((chain.entry(p6, 8) - 6.0 / 36.0).abs() < 1e-15);
        assert!((chain.entry(p6, p6) - 25.0 / 36.0).abs() < 1e-15);
        // Point 10: three ways in, holds with 27/36.
        let p10 = chain.index_of("point10").unwrap();
        assert!((chain.entry(p10, p10) - 27.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn structure_is_absorbing_with_transient_points() {
        let c = crate::markov::classify(&build_craps_chain().unwrap());
        assert_eq!(c.absorbing_states, vec![7, 8]);
        assert_eq!(c.transient_states, vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(c.recurrent_states, vec![7, 8]);
        assert!(!c.irreducible);
    }

    #[test]
    fn win_probability_is_exactly_244_over_495() {
        let p = craps_win_probability().unwrap();
        assert!((p - 244.0 / 495.0).abs() < 1e-12, "{p}");
        assert!((p - enumerated_win_probability()).abs() < 1e-12);
        assert!((p - 0.4929).abs() < 5e-5);
    }

    #[test]
    fn win_and_lose_probabilities_sum_to_one_from_every_start() {
        let chain = build_craps_chain().unwrap();
        let a = crate::markov::absorption_probabilities(&chain).unwrap();
        for state in STATE_LABELS.iter().take(7) {
            let w = a.absorb_probability(state, WIN).unwrap();
            let l = a.absorb_probability(state, LOSE).unwrap();
            assert!((w + l - 1.0).abs() < 1e-10, "{state}: {w} + {l}");
        }
        // Point 6 is the most favorable point: 5/11 to win it.
        let w6 = a.absorb_probability("point6", WIN).unwrap();
        assert!((w6 - 5.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn expected_rolls_match_the_geometric_enumeration() {
        let r = craps_expected_rolls().unwrap();
        assert!((r - enumerated_expected_rolls()).abs() < 1e-12, "{r}");
        // 557/165 rolls, about 3.38.
        assert!((r - 557.0 / 165.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_against_the_pool_chain() {
        let pool =
            crate::markov::stationary_distribution(&crate::markov::tests::pool_chain()).unwrap();
        let cmp = compare_with_pool(&pool).unwrap();
        assert!((cmp.craps_win - 244.0 / 495.0).abs() < 1e-12);
        assert!((cmp.pool_receiver - 0.444).abs() < 1e-3);
        assert!((cmp.difference - 0.0488).abs() < 1e-3, "{}", cmp.difference);
        // The receiver lookup falls back to the second state for unlabeled
        // two-state pools.
        let anon = StationaryDistribution::new(vec!["x".into(), "y".into()], vec![0.5071, 0.4929])
            .unwrap();
        let cmp = compare_with_pool(&anon).unwrap();
        assert!(cmp.difference < 1e-4);
        let three = StationaryDistribution::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.4, 0.3, 0.3],
        )
        .unwrap();
        assert!(matches!(
            compare_with_pool(&three),
            Err(Error::Dimension(_))
        ));
    }
}
