//! Seeded Monte Carlo simulation of plan trajectories.
//!
//! Each plan follows the chain independently for a fixed horizon, drawing
//! one uniform variate per year from its own counter-derived stream, so
//! results are byte-identical for a given seed regardless of how many
//! threads the run is split across. Aggregated counts ([`TrajectoryStats`])
//! stay in integer arithmetic for the same reason.
//!
//! Year-by-year occupancy, transition counts, and sojourn run lengths give
//! the empirical side of every analytical quantity in this crate: k-step
//! probabilities, the stationary distribution, expected sojourn times, and
//! transition estimates.
//!
//! Sojourn means deserve care: [`TrajectoryStats::empirical_sojourn_mean`]
//! uses completed runs only, and dropping the run in progress at the horizon
//! biases the mean low by roughly `mean * (mean - 1) / horizon` years. Keep
//! the horizon much larger than the squared sojourn mean when validating
//! against `1 / (1 - P_ii)`; a long horizon with fewer plans beats a short
//! horizon with many.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::contingency::ContingencyTable;
use crate::error::{Error, Result};
use crate::markov::TransitionMatrix;

/// Golden-ratio increment of the splitmix64 counter.
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// Fewer completed runs than this and a sojourn mean is noise.
pub const MIN_SOJOURN_SAMPLES: u64 = 30;

/// splitmix64: a 64-bit counter passed through a finalizing mixer.
///
/// Small, fast, and equidistributed enough for transition sampling; the
/// fixed reference outputs (seed 0 produces 0xe220a8397b1dcdaf, ...) are
/// pinned by tests so streams never drift between releases.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform variate in [0, 1) with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53
        (self.next_u64() >> 11) as f64 * SCALE
    }
}

/// Marsaglia-style 64-bit finalizer used by splitmix64.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the plan's private stream: the run seed and the plan index are
/// both mixed before combining, so adjacent plans share no structure.
/// (A plain `seed + index * GAMMA` offset would hand every plan the same
/// stream shifted by one draw.)
pub fn plan_seed(seed: u64, plan_index: u64) -> u64 {
    mix64(seed ^ mix64(plan_index.wrapping_mul(GAMMA)))
}

/// Where each plan starts at year zero.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Every plan starts in this state; consumes no random draw.
    Fixed(usize),
    /// Each plan draws its starting state from this distribution first.
    Distribution(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub n_plans: u64,
    pub horizon_years: u32,
    pub seed: u64,
    pub initial: InitialState,
}

impl SimulationConfig {
    /// At least one plan, at least two years (one transition), and an
    /// initial state that fits the chain.
    pub fn validate(&self, n_states: usize) -> Result<()> {
        if self.n_plans == 0 {
            return Err(Error::Domain("simulation needs at least one plan".into()));
        }
        if self.horizon_years < 2 {
            return Err(Error::Domain(format!(
                "horizon of {} years records no transitions; need at least 2",
                self.horizon_years
            )));
        }
        match &self.initial {
            InitialState::Fixed(i) => {
                if *i >= n_states {
                    return Err(Error::Domain(format!(
                        "initial state {i} out of range for {n_states} states"
                    )));
                }
            }
            InitialState::Distribution(w) => {
                if w.len() != n_states {
                    return Err(Error::Dimension(format!(
                        "initial distribution has {} entries for {n_states} states",
                        w.len()
                    )));
                }
                let mut sum = 0.0;
                for &v in w {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::Domain(format!(
                            "initial distribution entry {v} is not a probability"
                        )));
                    }
                    sum += v;
                }
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::Domain(format!(
                        "initial distribution sums to {sum}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Inverse-CDF draw by forward scan. When rounding leaves the cumulative
/// mass short of `u`, land on the last state with any probability.
pub(crate) fn draw_from(probs: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

fn path_into(
    tm: &TransitionMatrix,
    config: &SimulationConfig,
    plan_index: u64,
    path: &mut Vec<usize>,
) {
    let mut rng = SplitMix64::new(plan_seed(config.seed, plan_index));
    path.clear();
    let mut state = match &config.initial {
        InitialState::Fixed(i) => *i,
        InitialState::Distribution(w) => draw_from(w, rng.next_f64()),
    };
    path.push(state);
    for _ in 1..config.horizon_years {
        state = draw_from(tm.matrix().row(state), rng.next_f64());
        path.push(state);
    }
}

/// One plan's state per year, `horizon_years` entries long. The path is a
/// pure function of `(config.seed, plan_index)`.
pub fn simulate_path(
    tm: &TransitionMatrix,
    config: &SimulationConfig,
    plan_index: u64,
) -> Result<Vec<usize>> {
    config.validate(tm.n_states())?;
    let mut path = Vec::with_capacity(config.horizon_years as usize);
    path_into(tm, config, plan_index, &mut path);
    Ok(path)
}

/// Runs ending at the horizon, excluded from completed-run sojourn means.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CensoredRuns {
    pub runs: u64,
    pub total_years: u64,
}

/// Integer-exact aggregation over all simulated plans.
///
/// Everything here is a count, so merging partial results is associative
/// and the totals do not depend on thread scheduling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryStats {
    states: Vec<String>,
    horizon_years: u32,
    n_plans: u64,
    /// `[year][state]`: plans occupying `state` at `year`.
    occupancy: Vec<Vec<u64>>,
    /// `[from][to]`: observed year-to-year transitions.
    transitions: Vec<Vec<u64>>,
    /// `[initial][year][state]`: occupancy conditional on the starting state.
    conditional: Vec<Vec<Vec<u64>>>,
    /// Per state: completed run length -> number of runs.
    sojourn_completed: Vec<BTreeMap<u32, u64>>,
    /// Per state: runs still in progress when the horizon ended.
    censored: Vec<CensoredRuns>,
}

impl TrajectoryStats {
    fn empty(states: Vec<String>, horizon_years: u32) -> Self {
        let n = states.len();
        let h = horizon_years as usize;
        Self {
            states,
            horizon_years,
            n_plans: 0,
            occupancy: vec![vec![0; n]; h],
            transitions: vec![vec![0; n]; n],
            conditional: vec![vec![vec![0; n]; h]; n],
            sojourn_completed: vec![BTreeMap::new(); n],
            censored: vec![CensoredRuns::default(); n],
        }
    }

    fn record(&mut self, path: &[usize]) {
        self.n_plans += 1;
        let initial = path[0];
        for (year, &s) in path.iter().enumerate() {
            self.occupancy[year][s] += 1;
            self.conditional[initial][year][s] += 1;
        }
        for w in path.windows(2) {
            self.transitions[w[0]][w[1]] += 1;
        }
        let mut run_state = path[0];
        let mut run_len = 1u32;
        for &s in &path[1..] {
            if s == run_state {
                run_len += 1;
            } else {
                *self.sojourn_completed[run_state]
                    .entry(run_len)
                    .or_insert(0) += 1;
                run_state = s;
                run_len = 1;
            }
        }
        self.censored[run_state].runs += 1;
        self.censored[run_state].total_years += u64::from(run_len);
    }

    fn merge(mut self, other: Self) -> Self {
        self.n_plans += other.n_plans;
        for (a, b) in self.occupancy.iter_mut().zip(&other.occupancy) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.transitions.iter_mut().zip(&other.transitions) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.conditional.iter_mut().zip(&other.conditional) {
            for (ya, yb) in a.iter_mut().zip(b) {
                for (x, y) in ya.iter_mut().zip(yb) {
                    *x += y;
                }
            }
        }
        for (a, b) in self
            .sojourn_completed
            .iter_mut()
            .zip(&other.sojourn_completed)
        {
            for (&len, &count) in b {
                *a.entry(len).or_insert(0) += count;
            }
        }
        for (a, b) in self.censored.iter_mut().zip(&other.censored) {
            a.runs += b.runs;
            a.total_years += b.total_years;
        }
        self
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn n_plans(&self) -> u64 {
        self.n_plans
    }

    pub fn horizon_years(&self) -> u32 {
        self.horizon_years
    }

    pub fn occupancy_counts(&self, year: u32) -> Result<&[u64]> {
        self.occupancy
            .get(year as usize)
            .map(Vec::as_slice)
            .ok_or_else(|| {
                Error::Domain(format!("year {year} beyond horizon {}", self.horizon_years))
            })
    }

    /// Fraction of all plans in each state at `year`.
    pub fn occupancy_frequency(&self, year: u32) -> Result<Vec<f64>> {
        let counts = self.occupancy_counts(year)?;
        Ok(counts
            .iter()
            .map(|&c| c as f64 / self.n_plans as f64)
            .collect())
    }

    /// Fraction of plans that started in `initial` occupying each state at
    /// `year`: the empirical `year`-step transition row.
    pub fn k_step_frequency(&self, initial: usize, year: u32) -> Result<Vec<f64>> {
        if initial >= self.states.len() {
            return Err(Error::Domain(format!(
                "initial state {initial} out of range for {} states",
                self.states.len()
            )));
        }
        let rows = &self.conditional[initial];
        let row = rows.get(year as usize).ok_or_else(|| {
            Error::Domain(format!("year {year} beyond horizon {}", self.horizon_years))
        })?;
        let started = rows[0][initial];
        if started == 0 {
            return Err(Error::InsufficientData(format!(
                "no plans started in state {initial}"
            )));
        }
        Ok(row.iter().map(|&c| c as f64 / started as f64).collect())
    }

    pub fn transition_counts(&self) -> &[Vec<u64>] {
        &self.transitions
    }

    /// Observed transitions as a labeled count table, ready for
    /// re-estimation.
    pub fn empirical_transition_table(&self) -> Result<ContingencyTable> {
        ContingencyTable::new(
            self.states.to_vec(),
            self.states.to_vec(),
            self.transitions.clone(),
        )
    }

    pub fn completed_sojourn_counts(&self, state: usize) -> &BTreeMap<u32, u64> {
        &self.sojourn_completed[state]
    }

    pub fn censored_runs(&self, state: usize) -> &CensoredRuns {
        &self.censored[state]
    }

    /// Mean length of completed runs in `state`. Runs still open at the
    /// horizon are excluded; see the module notes on the truncation bias
    /// this introduces for short horizons. Errors with `InsufficientData`
    /// below [`MIN_SOJOURN_SAMPLES`] completed runs.
    pub fn empirical_sojourn_mean(&self, state: usize) -> Result<f64> {
        if state >= self.states.len() {
            return Err(Error::Domain(format!(
                "state {state} out of range for {} states",
                self.states.len()
            )));
        }
        let runs: u64 = self.sojourn_completed[state].values().sum();
        if runs < MIN_SOJOURN_SAMPLES {
            return Err(Error::InsufficientData(format!(
                "only {runs} completed runs in state '{}'; need {MIN_SOJOURN_SAMPLES}",
                self.states[state]
            )));
        }
        let total: u64 = self.sojourn_completed[state]
            .iter()
            .map(|(&len, &count)| u64::from(len) * count)
            .sum();
        Ok(total as f64 / runs as f64)
    }
}

/// Simulates every plan and aggregates counts, splitting plans across
/// threads. Byte-identical output for a given config on any thread count.
pub fn simulate_trajectories(
    tm: &TransitionMatrix,
    config: &SimulationConfig,
) -> Result<TrajectoryStats> {
    config.validate(tm.n_states())?;
    let empty = || TrajectoryStats::empty(tm.states().to_vec(), config.horizon_years);
    let stats = (0..config.n_plans)
        .into_par_iter()
        .fold(empty, |mut acc, plan| {
            let mut path = Vec::with_capacity(config.horizon_years as usize);
            path_into(tm, config, plan, &mut path);
            acc.record(&path);
            acc
        })
        .reduce(empty, TrajectoryStats::merge);
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::tests::pool_chain;

    #[test]
    fn splitmix_reference_sequence_from_seed_zero() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(rng.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(rng.next_u64(), 0x06c4_5d18_8009_454f);
    }

    #[test]
    fn splitmix_reference_sequence_from_nonzero_seed() {
        let mut rng = SplitMix64::new(0x0123_4567_89AB_CDEF);
        assert_eq!(rng.next_u64(), 0x157a_3807_a48f_aa9d);
        assert_eq!(rng.next_u64(), 0xd573_529b_34a1_d093);
        assert_eq!(rng.next_u64(), 0x2f90_b72e_996d_ccbe);
    }

    #[test]
    fn uniform_draws_stay_in_the_unit_interval() {
        let mut rng = SplitMix64::new(7);
        let mut lo = 1.0f64;
        let mut hi = 0.0f64;
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u), "{u}");
            lo = lo.min(u);
            hi = hi.max(u);
        }
        // The stream actually spreads over the interval.
        assert!(lo < 0.01, "{lo}");
        assert!(hi > 0.99, "{hi}");
    }

    #[test]
    fn plan_seeds_are_mixed_not_offset() {
        assert_eq!(plan_seed(42, 0), 0xa759_ea27_d472_7622);
        assert_eq!(plan_seed(42, 1), 0x4579_b960_bb00_7f46);
        // Offset seeding would make adjacent plans share nearly all draws
        // one step apart; mixed seeding must not.
        let mut a = SplitMix64::new(plan_seed(9, 100));
        let mut b = SplitMix64::new(plan_seed(9, 101));
        let overlap = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(overlap, 0);
    }

    #[test]
    fn draw_from_scans_and_falls_back() {
        assert_eq!(draw_from(&[0.5, 0.5], 0.0), 0);
        assert_eq!(draw_from(&[0.5, 0.5], 0.4999), 0);
        assert_eq!(draw_from(&[0.5, 0.5], 0.5), 1);
        assert_eq!(draw_from(&[1.0, 0.0], 0.999_999_999), 0);
        // Cumulative mass shy of u: land on the last positive-mass state.
        assert_eq!(draw_from(&[0.5, 0.5 - 1e-10, 0.0], 0.999_999_999_99), 1);
    }

    #[test]
    fn paths_are_deterministic_per_plan() {
        let tm = pool_chain();
        let config = SimulationConfig {
            n_plans: 10,
            horizon_years: 50,
            seed: 42,
            initial: InitialState::Fixed(0),
        };
        let a = simulate_path(&tm, &config, 3).unwrap();
        let b = simulate_path(&tm, &config, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert_eq!(a[0], 0);
        let c = simulate_path(&tm, &config, 4).unwrap();
        assert_ne!(a, c);
        assert!(a.iter().all(|&s| s < 2));
    }

    #[test]
    fn initial_distribution_draws_the_first_state() {
        let tm = pool_chain();
        let all_receiver = SimulationConfig {
            n_plans: 5,
            horizon_years: 4,
            seed: 1,
            initial: InitialState::Distribution(vec![0.0, 1.0]),
        };
        for plan in 0..5 {
            assert_eq!(simulate_path(&tm, &all_receiver, plan).unwrap()[0], 1);
        }
    }

    #[test]
    fn absorbing_state_holds_forever() {
        let tm = TransitionMatrix::new(
            vec!["open".into(), "closed".into()],
            crate::matrix::Matrix::from_rows(&[vec![0.7, 0.3], vec![0.0, 1.0]]).unwrap(),
        )
        .unwrap();
        let config = SimulationConfig {
            n_plans: 200,
            horizon_years: 40,
            seed: 5,
            initial: InitialState::Fixed(0),
        };
        for plan in 0..200 {
            let path = simulate_path(&tm, &config, plan).unwrap();
            if let Some(first) = path.iter().position(|&s| s == 1) {
                assert!(path[first..].iter().all(|&s| s == 1));
            }
        }
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let tm = pool_chain();
        let base = SimulationConfig {
            n_plans: 1,
            horizon_years: 2,
            seed: 0,
            initial: InitialState::Fixed(0),
        };
        assert!(base.validate(2).is_ok());
        let mut c = base.clone();
        c.n_plans = 0;
        assert!(matches!(c.validate(2), Err(Error::Domain(_))));
        let mut c = base.clone();
        c.horizon_years = 1;
        assert!(matches!(c.validate(2), Err(Error::Domain(_))));
        let mut c = base.clone();
        c.initial = InitialState::Fixed(2);
        assert!(matches!(c.validate(2), Err(Error::Domain(_))));
        let mut c = base.clone();
        c.initial = InitialState::Distribution(vec![0.5, 0.5, 0.0]);
        assert!(matches!(c.validate(2), Err(Error::Dimension(_))));
        let mut c = base.clone();
        c.initial = InitialState::Distribution(vec![0.9, 0.2]);
        assert!(matches!(c.validate(2), Err(Error::Domain(_))));
        let mut c = base.clone();
        c.initial = InitialState::Distribution(vec![1.1, -0.1]);
        assert!(matches!(c.validate(2), Err(Error::Domain(_))));
        assert!(matches!(simulate_path(&tm, &c, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn aggregate_counts_balance() {
        let tm = pool_chain();
        let config = SimulationConfig {
            n_plans: 1_000,
            horizon_years: 12,
            seed: 99,
            initial: InitialState::Distribution(vec![0.5, 0.5]),
        };
        let stats = simulate_trajectories(&tm, &config).unwrap();
        assert_eq!(stats.n_plans(), 1_000);
        for year in 0..12 {
            let total: u64 = stats.occupancy_counts(year).unwrap().iter().sum();
            assert_eq!(total, 1_000);
        }
        let transitions: u64 = stats.transition_counts().iter().flatten().sum();
        assert_eq!(transitions, 1_000 * 11);
        // Conditional counts partition the unconditional ones.
        for year in 0..12u32 {
            for s in 0..2 {
                let split: u64 = (0..2)
                    .map(|init| stats.conditional[init][year as usize][s])
                    .sum();
                assert_eq!(split, stats.occupancy_counts(year).unwrap()[s]);
            }
        }
        // Every plan-year lands in exactly one run, completed or censored.
        let mut run_years = 0u64;
        for s in 0..2 {
            run_years += stats
                .completed_sojourn_counts(s)
                .iter()
                .map(|(&len, &count)| u64::from(len) * count)
                .sum::<u64>();
            run_years += stats.censored_runs(s).total_years;
        }
        assert_eq!(run_years, 1_000 * 12);
        // Censored runs: exactly one per plan.
        let censored_runs: u64 = (0..2).map(|s| stats.censored_runs(s).runs).sum();
        assert_eq!(censored_runs, 1_000);
    }

    #[test]
    fn parallel_aggregation_matches_serial_exactly() {
        let tm = pool_chain();
        let config = SimulationConfig {
            n_plans: 2_000,
            horizon_years: 9,
            seed: 123,
            initial: InitialState::Fixed(1),
        };
        let parallel = simulate_trajectories(&tm, &config).unwrap();
        let repeat = simulate_trajectories(&tm, &config).unwrap();
        assert_eq!(parallel, repeat);
        let mut serial = TrajectoryStats::empty(tm.states().to_vec(), config.horizon_years);
        for plan in 0..config.n_plans {
            serial.record(&simulate_path(&tm, &config, plan).unwrap());
        }
        assert_eq!(parallel, serial);
    }

    #[test]
    fn empirical_table_recovers_the_chain() {
        let tm = pool_chain();
        let config = SimulationConfig {
            n_plans: 20_000,
            horizon_years: 12,
            seed: 2024,
            initial: InitialState::Distribution(vec![0.5, 0.5]),
        };
        let stats = simulate_trajectories(&tm, &config).unwrap();
        let table = stats.empirical_transition_table().unwrap();
        assert_eq!(table.row_labels(), tm.states());
        let refit = crate::markov::estimate_from_counts(&table).unwrap();
        for i in 0..2 {
            let n_i = stats.transition_counts()[i].iter().sum::<u64>() as f64;
            for j in 0..2 {
                let p = tm.entry(i, j);
                let four_se = 4.0 * (p * (1.0 - p) / n_i).sqrt();
                assert!(
                    (refit.entry(i, j) - p).abs() < four_se,
                    "entry ({i},{j}): {} vs {p} (4 SE = {four_se})",
                    refit.entry(i, j)
                );
            }
        }
    }

    #[test]
    fn sojourn_accounting_and_small_sample_guard() {
        let tm = pool_chain();
        let config = SimulationConfig {
            n_plans: 2,
            horizon_years: 5,
            seed: 11,
            initial: InitialState::Fixed(0),
        };
        let stats = simulate_trajectories(&tm, &config).unwrap();
        assert!(matches!(
            stats.empirical_sojourn_mean(0),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            stats.empirical_sojourn_mean(7),
            Err(Error::Domain(_))
        ));
    }
}
