//! Discrete-time Markov chain estimation and analysis over labeled states.
//!
//! The entry point is [`TransitionMatrix`], estimated from a transition count
//! table or built directly. On top of it: k-step projections, structural
//! classification (communicating classes, recurrence, periodicity),
//! stationary and limiting behavior, sojourn times, convergence horizons,
//! and absorption analysis for chains with absorbing states.

use crate::contingency::ContingencyTable;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Row sums may deviate from 1 by at most this much.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;
/// Entries may stray outside [0, 1] by at most this much.
pub const ENTRY_TOLERANCE: f64 = 1e-12;
/// Entries above this count as edges of the support graph.
pub const SUPPORT_EPS: f64 = 1e-12;
/// States with self-probability at least `1 - ABSORBING_EPS` are absorbing.
pub const ABSORBING_EPS: f64 = 1e-12;
/// Iteration cap for [`convergence_horizon`].
pub const HORIZON_CAP: u32 = 10_000;

/// A row-stochastic matrix over uniquely labeled states.
///
/// Invariants held by construction: square with one label per row, labels
/// unique and non-empty, every entry in [0, 1] within [`ENTRY_TOLERANCE`],
/// every row summing to 1 within [`ROW_SUM_TOLERANCE`].
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    states: Vec<String>,
    p: Matrix,
}

impl TransitionMatrix {
    pub fn new(states: Vec<String>, p: Matrix) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::Dimension(format!(
                "transition matrix must be square, got {}x{}",
                p.rows(),
                p.cols()
            )));
        }
        if states.len() != p.rows() {
            return Err(Error::Dimension(format!(
                "{} labels for a {}-state matrix",
                states.len(),
                p.rows()
            )));
        }
        for (i, s) in states.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Label(format!("state label {i} is empty")));
            }
            if states[..i].contains(s) {
                return Err(Error::Label(format!("duplicate state label '{s}'")));
            }
        }
        for row in 0..p.rows() {
            let mut sum = 0.0;
            for col in 0..p.cols() {
                let v = p.get(row, col);
                if !(-ENTRY_TOLERANCE..=1.0 + ENTRY_TOLERANCE).contains(&v) {
                    return Err(Error::Stochasticity {
                        row,
                        reason: format!("entry {v} at column {col} is outside [0, 1]"),
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Stochasticity {
                    row,
                    reason: format!("row sums to {sum}, expected 1"),
                });
            }
        }
        Ok(Self { states, p })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.p.get(from, to)
    }

    /// Index of a state label. Errors with `Label` for unknown labels.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::Label(format!("unknown state label '{label}'")))
    }

    /// Copy with every entry rounded to `decimals` places (ties away from
    /// zero). If rounding breaks a row sum the row is renormalized; for
    /// matrices whose rounded rows already sum to one this is a no-op.
    pub fn rounded(&self, decimals: u32) -> Result<TransitionMatrix> {
        let scale = 10f64.powi(decimals as i32);
        let n = self.n_states();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: Vec<f64> = self
                .p
                .row(i)
                .iter()
                .map(|v| (v * scale).round() / scale)
                .collect();
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                for v in &mut row {
                    *v /= sum;
                }
            }
            rows.push(row);
        }
        TransitionMatrix::new(self.states.clone(), Matrix::from_rows(&rows)?)
    }
}

/// Maximum-likelihood transition estimate from a square count table:
/// `P_ij = n_ij / n_i`.
///
/// The table must be square with row and column labels equal as sets
/// (columns are aligned to row order, so axis order may differ). Errors:
/// `Dimension` for non-square tables, `Label` for mismatched label sets,
/// `DegenerateTable` when a row total is zero (that state was never
/// observed, so its exit distribution is undefined).
pub fn estimate_from_counts(table: &ContingencyTable) -> Result<TransitionMatrix> {
    if table.n_rows() != table.n_cols() {
        return Err(Error::Dimension(format!(
            "transition counts must be square, got {}x{}",
            table.n_rows(),
            table.n_cols()
        )));
    }
    let states: Vec<String> = table.row_labels().to_vec();
    let col_of: Vec<usize> = states
        .iter()
        .map(|s| {
            table
                .col_labels()
                .iter()
                .position(|c| c == s)
                .ok_or_else(|| Error::Label(format!("row label '{s}' missing from columns")))
        })
        .collect::<Result<_>>()?;

    let totals = table.row_totals();
    if let Some(i) = totals.iter().position(|&t| t == 0) {
        return Err(Error::DegenerateTable(format!(
            "state '{}' has no observed transitions",
            states[i]
        )));
    }

    let n = states.len();
    let mut entries = Vec::with_capacity(n * n);
    for (i, &total) in totals.iter().enumerate() {
        for &cj in &col_of {
            entries.push(table.count(i, cj) as f64 / total as f64);
        }
    }
    TransitionMatrix::new(states, Matrix::new(n, n, entries)?)
}

/// k-step transition probabilities `P^(k)`; `k = 0` is the identity.
pub fn k_step(tm: &TransitionMatrix, k: u32) -> Result<TransitionMatrix> {
    TransitionMatrix::new(tm.states.to_vec(), tm.p.pow(k)?)
}

/// Second eigenvalue `p00 + p11 - 1` of a two-state chain, the geometric
/// rate at which `P^(k)` approaches its limit. Errors with `Dimension` for
/// chains with more than two states.
pub fn second_eigenvalue(tm: &TransitionMatrix) -> Result<f64> {
    if tm.n_states() != 2 {
        return Err(Error::Dimension(format!(
            "second eigenvalue shortcut needs a 2-state chain, got {}",
            tm.n_states()
        )));
    }
    Ok(tm.entry(0, 0) + tm.entry(1, 1) - 1.0)
}

/// Structural classification of a chain's support graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainClassification {
    /// Communicating classes, each sorted, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Period of each class, in class order; `None` for transient classes.
    pub class_periods: Vec<Option<u64>>,
    /// States inside closed classes (recurrent in a finite chain), sorted.
    pub recurrent_states: Vec<usize>,
    /// States outside every closed class, sorted.
    pub transient_states: Vec<usize>,
    /// States with self-probability at least `1 - 1e-12`, sorted.
    pub absorbing_states: Vec<usize>,
    /// Exactly one communicating class.
    pub irreducible: bool,
    /// Every recurrent class has period 1.
    pub aperiodic: bool,
}

/// Classifies states by reachability on the support graph (entries above
/// [`SUPPORT_EPS`] are edges): communicating classes, recurrence via closed
/// classes, absorbing states, and periodicity per recurrent class.
pub fn classify(tm: &TransitionMatrix) -> ChainClassification {
    let n = tm.n_states();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| tm.entry(i, j) > SUPPORT_EPS).collect())
        .collect();

    // Transitive closure, with every state reaching itself in zero steps.
    let mut reach = adj.clone();
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    transitive_closure(&mut reach);

    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &m in &members {
            class_of[m] = classes.len();
        }
        classes.push(members);
    }

    let closed: Vec<bool> = classes
        .iter()
        .map(|c| {
            c.iter()
                .all(|&i| (0..n).all(|j| !adj[i][j] || class_of[j] == class_of[i]))
        })
        .collect();

    let mut recurrent_states = Vec::new();
    let mut transient_states = Vec::new();
    for (ci, c) in classes.iter().enumerate() {
        if closed[ci] {
            recurrent_states.extend(c.iter().copied());
        } else {
            transient_states.extend(c.iter().copied());
        }
    }
    recurrent_states.sort_unstable();
    transient_states.sort_unstable();

    let absorbing_states: Vec<usize> = (0..n)
        .filter(|&i| tm.entry(i, i) >= 1.0 - ABSORBING_EPS)
        .collect();

    let class_periods: Vec<Option<u64>> = classes
        .iter()
        .zip(&closed)
        .map(|(c, &cl)| {
            if cl {
                Some(class_period(&adj, c))
            } else {
                None
            }
        })
        .collect();
    let aperiodic = class_periods.iter().flatten().all(|&d| d == 1);

    ChainClassification {
        irreducible: classes.len() == 1,
        classes,
        class_periods,
        recurrent_states,
        transient_states,
        absorbing_states,
        aperiodic,
    }
}

/// In-place Warshall transitive closure over a boolean adjacency matrix.
fn transitive_closure(reach: &mut [Vec<bool>]) {
    let n = reach.len();
    for k in 0..n {
        let via_k = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (j, &through) in via_k.iter().enumerate() {
                    if through {
                        row[j] = true;
                    }
                }
            }
        }
    }
}

/// Period of a closed class: gcd of `d(u) + 1 - d(v)` over intra-class edges
/// `(u, v)`, with `d` a breadth-first distance from an arbitrary root.
fn class_period(adj: &[Vec<bool>], class: &[usize]) -> u64 {
    let root = class[0];
    let n = adj.len();
    let mut dist = vec![u64::MAX; n];
    dist[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    let in_class = {
        let mut m = vec![false; n];
        for &s in class {
            m[s] = true;
        }
        m
    };
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if adj[u][v] && in_class[v] && dist[v] == u64::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0u64;
    for &u in class {
        for v in 0..n {
            if adj[u][v] && in_class[v] {
                g = gcd(g, dist[u] + 1 - dist[v]);
            }
        }
    }
    g
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A probability distribution over labeled states.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryDistribution {
    states: Vec<String>,
    pi: Vec<f64>,
}

impl StationaryDistribution {
    /// Validates that `pi` is a distribution: entries in [0, 1] within
    /// [`ENTRY_TOLERANCE`], summing to 1 within [`ROW_SUM_TOLERANCE`].
    pub fn new(states: Vec<String>, pi: Vec<f64>) -> Result<Self> {
        if states.len() != pi.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} probabilities",
                states.len(),
                pi.len()
            )));
        }
        let mut sum = 0.0;
        for (i, &v) in pi.iter().enumerate() {
            if !v.is_finite() || !(-ENTRY_TOLERANCE..=1.0 + ENTRY_TOLERANCE).contains(&v) {
                return Err(Error::Stochasticity {
                    row: 0,
                    reason: format!("probability {v} at state {i} is outside [0, 1]"),
                });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::Stochasticity {
                row: 0,
                reason: format!("probabilities sum to {sum}, expected 1"),
            });
        }
        Ok(Self { states, pi })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Probability of one labeled state. Errors with `Label` if unknown.
    pub fn probability(&self, label: &str) -> Result<f64> {
        self.states
            .iter()
            .position(|s| s == label)
            .map(|i| self.pi[i])
            .ok_or_else(|| Error::Label(format!("unknown state label '{label}'")))
    }
}

/// Unique stationary distribution of an irreducible aperiodic chain.
///
/// Two-state chains use the closed form `pi0 = p10 / (p01 + p10)`; larger
/// chains solve the balance equations with one equation replaced by the
/// normalization row. The solution is cross-checked against power iteration
/// from the uniform distribution (at least ten steps, continued geometrically
/// for slowly mixing chains) and must agree within 1e-6.
///
/// Errors with `NoUniqueLimit` for reducible or periodic chains.
pub fn stationary_distribution(tm: &TransitionMatrix) -> Result<StationaryDistribution> {
    let classification = classify(tm);
    if !classification.irreducible {
        return Err(Error::NoUniqueLimit(format!(
            "chain is reducible ({} communicating classes)",
            classification.classes.len()
        )));
    }
    if !classification.aperiodic {
        let d = classification.class_periods[0].unwrap_or(0);
        return Err(Error::NoUniqueLimit(format!(
            "chain is periodic with period {d}"
        )));
    }

    let n = tm.n_states();
    let mut pi = match n {
        1 => vec![1.0],
        2 => {
            let p01 = tm.entry(0, 1);
            let p10 = tm.entry(1, 0);
            let pi0 = p10 / (p01 + p10);
            vec![pi0, 1.0 - pi0]
        }
        _ => {
            // (P^T - I) pi = 0 with the last balance equation replaced by
            // sum(pi) = 1. Dropping any one row of P^T - I keeps full rank
            // for irreducible chains, so the system is well-posed.
            let mut a = tm.p.transpose();
            let mut entries = a.entries().to_vec();
            for i in 0..n {
                entries[i * n + i] -= 1.0;
            }
            for j in 0..n {
                entries[(n - 1) * n + j] = 1.0;
            }
            a = Matrix::new(n, n, entries)?;
            let mut rhs = vec![0.0; n];
            rhs[n - 1] = 1.0;
            let x = a.solve(&Matrix::new(n, 1, rhs)?)?;
            (0..n).map(|i| x.get(i, 0)).collect()
        }
    };

    // Exact renormalization, then the fixed-point residual check.
    let sum: f64 = pi.iter().sum();
    for v in &mut pi {
        *v /= sum;
    }
    let pi_row = Matrix::new(1, n, pi.clone())?;
    let residual = pi_row.matmul(&tm.p)?.max_abs_diff(&pi_row)?;
    if residual > 1e-10 {
        return Err(Error::Convergence {
            limit: 0,
            context: format!("stationary solve residual {residual} exceeds 1e-10"),
        });
    }
    power_iteration_cross_check(&tm.p, &pi_row)?;

    StationaryDistribution::new(tm.states.to_vec(), pi)
}

/// Independent route to the stationary solution: iterate the uniform row
/// distribution through `P` and require 1e-6 agreement. Runs at least ten
/// explicit steps; if the chain mixes too slowly for stepping, continues
/// with repeated squaring so any strictly subunit second eigenvalue still
/// converges.
fn power_iteration_cross_check(p: &Matrix, pi: &Matrix) -> Result<()> {
    const AGREEMENT: f64 = 1e-6;
    let n = p.rows();
    let mut v = Matrix::new(1, n, vec![1.0 / n as f64; n])?;
    for step in 1..=1024u32 {
        v = v.matmul(p)?;
        if step >= 10 && v.max_abs_diff(pi)? < AGREEMENT {
            return Ok(());
        }
    }
    let mut block = p.pow(1024)?;
    for _ in 0..54 {
        v = v.matmul(&block)?;
        if v.max_abs_diff(pi)? < AGREEMENT {
            return Ok(());
        }
        block = block.matmul(&block)?;
    }
    Err(Error::Convergence {
        limit: 1024 + 54,
        context: "power iteration does not reproduce the stationary solve".into(),
    })
}

/// Limiting matrix `P^(infinity)`: every row is the stationary distribution.
/// Same error conditions as [`stationary_distribution`].
pub fn limiting_matrix(tm: &TransitionMatrix) -> Result<TransitionMatrix> {
    let st = stationary_distribution(tm)?;
    let n = tm.n_states();
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n {
        entries.extend_from_slice(st.pi());
    }
    TransitionMatrix::new(tm.states.to_vec(), Matrix::new(n, n, entries)?)
}

/// Expected consecutive years spent in `state` per visit: `1 / (1 - P_ii)`,
/// the mean of the geometric holding time. Errors with `Label` for unknown
/// states and `InfiniteSojourn` when the state never exits.
pub fn expected_sojourn(tm: &TransitionMatrix, state: &str) -> Result<f64> {
    let i = tm.index_of(state)?;
    let pii = tm.entry(i, i);
    if pii >= 1.0 {
        return Err(Error::InfiniteSojourn {
            state: state.to_string(),
        });
    }
    Ok(1.0 / (1.0 - pii))
}

/// Two-state sojourn means computed through the stationary-ratio identity
/// `pi0 / (pi1 * p10)` and `(1 - pi0) / (pi1 * p10)` with the stationary
/// probabilities rounded to three decimals first.
///
/// This reproduces analyses that carry intermediate quantities at
/// three-decimal display precision; the double rounding makes the result
/// differ in the second decimal from the full-precision `1 / (1 - P_ii)`.
/// Errors: `Dimension` unless the chain has two states, `NoUniqueLimit`
/// from the stationary solve, `Domain` if the rounded probabilities vanish.
pub fn sojourn_via_rounded_stationary(tm: &TransitionMatrix) -> Result<[f64; 2]> {
    if tm.n_states() != 2 {
        return Err(Error::Dimension(format!(
            "stationary-ratio sojourn needs a 2-state chain, got {}",
            tm.n_states()
        )));
    }
    let st = stationary_distribution(tm)?;
    let pi0 = (st.pi()[0] * 1000.0).round() / 1000.0;
    let pi1 = (st.pi()[1] * 1000.0).round() / 1000.0;
    let p10 = tm.entry(1, 0);
    let denom = pi1 * p10;
    if denom <= 0.0 {
        return Err(Error::Domain(
            "rounded stationary probability vanishes; ratio sojourn undefined".into(),
        ));
    }
    Ok([pi0 / denom, (1.0 - pi0) / denom])
}

/// Smallest `k` with `max |P^(k) - P^(infinity)| < tol`, entry-wise.
///
/// `tol` must be positive and finite (`Domain`); reducible or periodic
/// chains error via the limiting matrix; chains mixing too slowly to meet
/// `tol` within [`HORIZON_CAP`] steps error with `Convergence`.
pub fn convergence_horizon(tm: &TransitionMatrix, tol: f64) -> Result<u32> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let limit = limiting_matrix(tm)?;
    let mut power = Matrix::identity(tm.n_states());
    for k in 0..=HORIZON_CAP {
        if power.max_abs_diff(limit.matrix())? < tol {
            return Ok(k);
        }
        power = power.matmul(&tm.p)?;
    }
    Err(Error::Convergence {
        limit: HORIZON_CAP as usize,
        context: format!("k-step probabilities do not reach tolerance {tol}"),
    })
}

/// Absorption analysis of a chain with absorbing states.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorptionResult {
    states: Vec<String>,
    transient: Vec<usize>,
    absorbing: Vec<usize>,
    /// `|transient| x |absorbing|` absorption probabilities; `None` when the
    /// chain has no transient states.
    probabilities: Option<Matrix>,
    /// Expected steps to absorption per transient state.
    expected_steps: Vec<f64>,
}

impl AbsorptionResult {
    pub fn transient_states(&self) -> &[usize] {
        &self.transient
    }

    pub fn absorbing_states(&self) -> &[usize] {
        &self.absorbing
    }

    pub fn probabilities(&self) -> Option<&Matrix> {
        self.probabilities.as_ref()
    }

    /// Probability of eventually absorbing in `to` starting from `from`.
    pub fn absorb_probability(&self, from: &str, to: &str) -> Result<f64> {
        let fi = self.transient_index(from)?;
        let ti = self
            .absorbing
            .iter()
            .position(|&a| self.states[a] == to)
            .ok_or_else(|| Error::Label(format!("'{to}' is not an absorbing state")))?;
        Ok(self
            .probabilities
            .as_ref()
            .expect("transient index exists, so the matrix does")
            .get(fi, ti))
    }

    /// Expected steps until absorption starting from transient state `from`.
    pub fn steps_to_absorption(&self, from: &str) -> Result<f64> {
        Ok(self.expected_steps[self.transient_index(from)?])
    }

    pub fn expected_steps(&self) -> &[f64] {
        &self.expected_steps
    }

    fn transient_index(&self, label: &str) -> Result<usize> {
        self.transient
            .iter()
            .position(|&t| self.states[t] == label)
            .ok_or_else(|| Error::Label(format!("'{label}' is not a transient state")))
    }
}

/// Fundamental-matrix absorption analysis: with transient block `T` and
/// transient-to-absorbing block `R`, absorption probabilities are
/// `(I - T)^-1 R` and expected steps are `(I - T)^-1 1`.
///
/// Errors with `NoAbsorbingState` when nothing absorbs and
/// `NonAbsorbingChain` when some transient state cannot reach any absorbing
/// state (a trapped recurrent class).
pub fn absorption_probabilities(tm: &TransitionMatrix) -> Result<AbsorptionResult> {
    let n = tm.n_states();
    let absorbing: Vec<usize> = (0..n)
        .filter(|&i| tm.entry(i, i) >= 1.0 - ABSORBING_EPS)
        .collect();
    if absorbing.is_empty() {
        return Err(Error::NoAbsorbingState);
    }
    let transient: Vec<usize> = (0..n).filter(|i| !absorbing.contains(i)).collect();
    if transient.is_empty() {
        return Ok(AbsorptionResult {
            states: tm.states.to_vec(),
            transient,
            absorbing,
            probabilities: None,
            expected_steps: Vec::new(),
        });
    }

    // Reachability on the support graph: every transient state must be able
    // to hit some absorbing state.
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| tm.entry(i, j) > SUPPORT_EPS).collect())
        .collect();
    transitive_closure(&mut reach);
    let trapped: Vec<&usize> = transient
        .iter()
        .filter(|&&t| !absorbing.iter().any(|&a| reach[t][a]))
        .collect();
    if !trapped.is_empty() {
        let names: Vec<&str> = trapped.iter().map(|&&t| tm.states[t].as_str()).collect();
        return Err(Error::NonAbsorbingChain(format!(
            "states {{{}}} cannot reach any absorbing state",
            names.join(", ")
        )));
    }

    let t_n = transient.len();
    let a_n = absorbing.len();
    let mut i_minus_t = Vec::with_capacity(t_n * t_n);
    for (ri, &i) in transient.iter().enumerate() {
        for (ci, &j) in transient.iter().enumerate() {
            let v = tm.entry(i, j);
            i_minus_t.push(if ri == ci { 1.0 - v } else { -v });
        }
    }
    let mut r = Vec::with_capacity(t_n * a_n);
    for &i in &transient {
        for &a in &absorbing {
            r.push(tm.entry(i, a));
        }
    }
    let system = Matrix::new(t_n, t_n, i_minus_t)?;
    let probabilities = system.solve(&Matrix::new(t_n, a_n, r)?)?;
    let steps = system.solve(&Matrix::new(t_n, 1, vec![1.0; t_n])?)?;
    let expected_steps = (0..t_n).map(|i| steps.get(i, 0)).collect();

    Ok(AbsorptionResult {
        states: tm.states.to_vec(),
        transient,
        absorbing,
        probabilities: Some(probabilities),
        expected_steps,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn pool_chain() -> TransitionMatrix {
        TransitionMatrix::new(
            vec!["payer".into(), "receiver".into()],
            Matrix::from_rows(&[
                vec![31.0 / 39.0, 8.0 / 39.0],
                vec![19.0 / 74.0, 55.0 / 74.0],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn chain(rows: &[Vec<f64>]) -> TransitionMatrix {
        let labels = ["s0", "s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8"];
        TransitionMatrix::new(
            labels[..rows.len()].iter().map(|s| s.to_string()).collect(),
            Matrix::from_rows(rows).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn estimates_the_pool_chain_from_counts() {
        let tm = estimate_from_counts(&crate::contingency::tests::pool_table()).unwrap();
        assert_eq!(tm.states(), ["payer".to_string(), "receiver".to_string()]);
        assert!((tm.entry(0, 0) - 31.0 / 39.0).abs() < 1e-15);
        assert!((tm.entry(0, 1) - 8.0 / 39.0).abs() < 1e-15);
        assert!((tm.entry(1, 0) - 19.0 / 74.0).abs() < 1e-15);
        assert!((tm.entry(1, 1) - 55.0 / 74.0).abs() < 1e-15);
        // Three-decimal display values.
        assert!((tm.entry(0, 0) - 0.795).abs() < 5e-4);
        assert!((tm.entry(1, 0) - 0.257).abs() < 5e-4);
    }

    #[test]
    fn estimate_aligns_permuted_column_labels() {
        let table = ContingencyTable::new(
            vec!["payer".into(), "receiver".into()],
            vec!["receiver".into(), "payer".into()],
            vec![vec![8, 31], vec![55, 19]],
        )
        .unwrap();
        let tm = estimate_from_counts(&table).unwrap();
        assert!((tm.entry(0, 0) - 31.0 / 39.0).abs() < 1e-15);
        assert!((tm.entry(1, 1) - 55.0 / 74.0).abs() < 1e-15);
    }

    #[test]
    fn estimate_rejects_bad_tables() {
        let not_square = ContingencyTable::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![1, 2, 3], vec![4, 5, 6]],
        )
        .unwrap();
        assert!(matches!(
            estimate_from_counts(&not_square),
            Err(Error::Dimension(_))
        ));

        let wrong_labels = ContingencyTable::new(
            vec!["a".into(), "b".into()],
            vec!["a".into(), "c".into()],
            vec![vec![1, 2], vec![3, 4]],
        )
        .unwrap();
        assert!(matches!(
            estimate_from_counts(&wrong_labels),
            Err(Error::Label(_))
        ));

        let zero_row = ContingencyTable::new(
            vec!["a".into(), "b".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0, 0], vec![3, 4]],
        )
        .unwrap();
        assert!(matches!(
            estimate_from_counts(&zero_row),
            Err(Error::DegenerateTable(_))
        ));
    }

    #[test]
    fn ten_step_projection_matches_published_display() {
        let p10 = k_step(&pool_chain(), 10).unwrap();
        assert!(
            (p10.entry(0, 0) - 0.557).abs() < 1e-3,
            "{}",
            p10.entry(0, 0)
        );
        assert!((p10.entry(0, 1) - 0.443).abs() < 1e-3);
        assert!((p10.entry(1, 0) - 0.555).abs() < 1e-3);
        assert!((p10.entry(1, 1) - 0.445).abs() < 1e-3);
    }

    #[test]
    fn eight_step_projection_nears_the_limit() {
        let p8 = k_step(&pool_chain(), 8).unwrap();
        assert!((p8.entry(0, 0) - 0.559).abs() < 1e-3, "{}", p8.entry(0, 0));
        assert!((p8.entry(0, 1) - 0.441).abs() < 1e-3);
        assert!((p8.entry(1, 0) - 0.552).abs() < 1e-3);
        assert!((p8.entry(1, 1) - 0.448).abs() < 1e-3);
    }

    #[test]
    fn zero_step_projection_is_identity() {
        let p0 = k_step(&pool_chain(), 0).unwrap();
        assert_eq!(p0.matrix(), &Matrix::identity(2));
    }

    #[test]
    fn rounded_matrix_matches_three_decimal_display() {
        let r = pool_chain().rounded(3).unwrap();
        assert_eq!(r.entry(0, 0), 0.795);
        assert_eq!(r.entry(0, 1), 0.205);
        assert_eq!(r.entry(1, 0), 0.257);
        assert_eq!(r.entry(1, 1), 0.743);
    }

    #[test]
    fn second_eigenvalue_of_the_pool_chain() {
        let lambda = second_eigenvalue(&pool_chain()).unwrap();
        assert!((lambda - 0.538).abs() < 1e-3, "{lambda}");
        let three = chain(&[
            vec![0.5, 0.25, 0.25],
            vec![0.25, 0.5, 0.25],
            vec![0.25, 0.25, 0.5],
        ]);
        assert!(matches!(
            second_eigenvalue(&three),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn pool_chain_is_irreducible_aperiodic_recurrent() {
        let c = classify(&pool_chain());
        assert!(c.irreducible);
        assert!(c.aperiodic);
        assert_eq!(c.classes, vec![vec![0, 1]]);
        assert_eq!(c.recurrent_states, vec![0, 1]);
        assert!(c.transient_states.is_empty());
        assert!(c.absorbing_states.is_empty());
        assert_eq!(c.class_periods, vec![Some(1)]);
    }

    #[test]
    fn identity_chain_is_reducible_with_two_absorbing_states() {
        let c = classify(&chain(&[vec![1.0, 0.0], vec![0.0, 1.0]]));
        assert!(!c.irreducible);
        assert_eq!(c.classes.len(), 2);
        assert_eq!(c.recurrent_states, vec![0, 1]);
        assert_eq!(c.absorbing_states, vec![0, 1]);
        assert!(c.aperiodic);
    }

    #[test]
    fn alternating_chain_has_period_two() {
        let c = classify(&chain(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
        assert!(c.irreducible);
        assert!(!c.aperiodic);
        assert_eq!(c.class_periods, vec![Some(2)]);
    }

    #[test]
    fn transient_state_feeding_an_absorbing_state() {
        let c = classify(&chain(&[vec![0.9, 0.1], vec![0.0, 1.0]]));
        assert_eq!(c.transient_states, vec![0]);
        assert_eq!(c.recurrent_states, vec![1]);
        assert_eq!(c.absorbing_states, vec![1]);
        assert!(!c.irreducible);
        assert!(c.aperiodic);
    }

    #[test]
    fn three_cycle_has_period_three() {
        let c = classify(&chain(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ]));
        assert!(c.irreducible);
        assert_eq!(c.class_periods, vec![Some(3)]);
        assert!(!c.aperiodic);
    }

    #[test]
    fn stationary_distribution_of_the_pool_chain() {
        let st = stationary_distribution(&pool_chain()).unwrap();
        assert!((st.pi()[0] - 0.556).abs() < 1e-3, "{}", st.pi()[0]);
        assert!((st.pi()[1] - 0.444).abs() < 1e-3);
        // Closed form against the long-power oracle.
        let p200 = pool_chain().matrix().pow(200).unwrap();
        assert!((st.pi()[0] - p200.get(0, 0)).abs() < 1e-12);
        assert!((st.pi()[0] - p200.get(1, 0)).abs() < 1e-12);
        assert!((st.probability("payer").unwrap() - st.pi()[0]).abs() < 1e-15);
        assert!(st.probability("nope").is_err());
    }

    #[test]
    fn stationary_distribution_of_a_three_state_chain() {
        let tm = chain(&[
            vec![0.5, 0.3, 0.2],
            vec![0.1, 0.6, 0.3],
            vec![0.2, 0.3, 0.5],
        ]);
        let st = stationary_distribution(&tm).unwrap();
        let oracle = tm.matrix().pow(200).unwrap();
        for j in 0..3 {
            assert!(
                (st.pi()[j] - oracle.get(0, j)).abs() < 1e-6,
                "state {j}: {} vs {}",
                st.pi()[j],
                oracle.get(0, j)
            );
        }
        let sum: f64 = st.pi().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stationary_cross_check_survives_slow_mixing() {
        // Second eigenvalue 0.9999: plain ten-step iteration cannot reach
        // 1e-6 agreement, the geometric continuation must.
        let tm = chain(&[vec![0.99995, 0.00005], vec![0.00005, 0.99995]]);
        let st = stationary_distribution(&tm).unwrap();
        assert!((st.pi()[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn reducible_and_periodic_chains_have_no_unique_limit() {
        assert!(matches!(
            stationary_distribution(&chain(&[vec![1.0, 0.0], vec![0.0, 1.0]])),
            Err(Error::NoUniqueLimit(_))
        ));
        assert!(matches!(
            stationary_distribution(&chain(&[vec![0.0, 1.0], vec![1.0, 0.0]])),
            Err(Error::NoUniqueLimit(_))
        ));
        assert!(matches!(
            limiting_matrix(&chain(&[vec![1.0, 0.0], vec![0.0, 1.0]])),
            Err(Error::NoUniqueLimit(_))
        ));
    }

    #[test]
    fn limiting_matrix_rows_equal_the_stationary_distribution() {
        let tm = pool_chain();
        let st = stationary_distribution(&tm).unwrap();
        let lim = limiting_matrix(&tm).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((lim.entry(i, j) - st.pi()[j]).abs() < 1e-15);
            }
        }
        // And the 8-step power already sits within a few thousandths of it.
        let p8 = k_step(&tm, 8).unwrap();
        assert!(p8.matrix().max_abs_diff(lim.matrix()).unwrap() < 0.005);
    }

    #[test]
    fn sojourn_times_from_the_pool_chain() {
        let tm = pool_chain();
        assert!((expected_sojourn(&tm, "payer").unwrap() - 39.0 / 8.0).abs() < 1e-12);
        assert!((expected_sojourn(&tm, "receiver").unwrap() - 74.0 / 19.0).abs() < 1e-12);
        assert!(matches!(
            expected_sojourn(&tm, "nope"),
            Err(Error::Label(_))
        ));
        let coin = chain(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!((expected_sojourn(&coin, "s0").unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn absorbing_state_sojourn_is_infinite() {
        let tm = chain(&[vec![0.9, 0.1], vec![0.0, 1.0]]);
        assert!(matches!(
            expected_sojourn(&tm, "s1"),
            Err(Error::InfiniteSojourn { .. })
        ));
    }

    #[test]
    fn rounded_stationary_ratio_reproduces_two_decimal_display() {
        // pi rounded to (0.556, 0.444), then 0.556 / (0.444 * 0.257):
        // the double rounding lands on 4.87 / 3.89 at two decimals.
        let rounded = pool_chain().rounded(3).unwrap();
        let s = sojourn_via_rounded_stationary(&rounded).unwrap();
        assert_eq!((s[0] * 100.0).round() / 100.0, 4.87, "{}", s[0]);
        assert_eq!((s[1] * 100.0).round() / 100.0, 3.89, "{}", s[1]);
        // Full-precision route rounds to 4.88 instead; the difference is the
        // intermediate rounding, which is the point of this variant.
        assert_eq!(
            (expected_sojourn(&rounded, "payer").unwrap() * 100.0).round() / 100.0,
            4.88
        );
    }

    #[test]
    fn convergence_horizon_of_the_pool_chain_is_eight_years() {
        let tm = pool_chain();
        assert_eq!(convergence_horizon(&tm, 0.005).unwrap(), 8);
        // One year earlier the deviation is still ~0.0073.
        let p7 = k_step(&tm, 7).unwrap();
        let lim = limiting_matrix(&tm).unwrap();
        assert!(p7.matrix().max_abs_diff(lim.matrix()).unwrap() > 0.005);
    }

    #[test]
    fn horizon_edge_cases() {
        let tm = pool_chain();
        // Deviation at k = 0 is max(1 - pi0, 1 - pi1) < 1.
        assert_eq!(convergence_horizon(&tm, 1.0).unwrap(), 0);
        let coin = chain(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(convergence_horizon(&coin, 1e-9).unwrap(), 1);
        assert!(matches!(
            convergence_horizon(&tm, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            convergence_horizon(&tm, -0.1),
            Err(Error::Domain(_))
        ));
        // Slow mixing with a tight tolerance hits the iteration cap.
        let slow = chain(&[vec![0.99995, 0.00005], vec![0.00005, 0.99995]]);
        assert!(matches!(
            convergence_horizon(&slow, 1e-9),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn diagonal_partial_sums_diverge_for_recurrent_states() {
        // Sum of k-step return probabilities grows without bound; by
        // K = 1000 it clears 100 comfortably (each term is ~0.556).
        let tm = pool_chain();
        let mut power = Matrix::identity(2);
        let mut partial = 0.0;
        let mut cleared = false;
        for _ in 1..=1000 {
            power = power.matmul(tm.matrix()).unwrap();
            partial += power.get(0, 0);
            if partial > 100.0 {
                cleared = true;
                break;
            }
        }
        assert!(cleared, "partial sum only reached {partial}");
    }

    #[test]
    fn gamblers_ruin_absorption() {
        // Fair five-point random walk absorbing at both ends.
        let tm = chain(&[
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.5, 0.0, 0.5, 0.0, 0.0],
            vec![0.0, 0.5, 0.0, 0.5, 0.0],
            vec![0.0, 0.0, 0.5, 0.0, 0.5],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
        ]);
        let result = absorption_probabilities(&tm).unwrap();
        assert_eq!(result.transient_states(), &[1, 2, 3]);
        assert_eq!(result.absorbing_states(), &[0, 4]);
        assert!((result.absorb_probability("s2", "s4").unwrap() - 0.5).abs() < 1e-10);
        assert!((result.absorb_probability("s1", "s0").unwrap() - 0.75).abs() < 1e-10);
        assert!((result.steps_to_absorption("s2").unwrap() - 4.0).abs() < 1e-10);
        assert!((result.steps_to_absorption("s1").unwrap() - 3.0).abs() < 1e-10);
        // Rows of the absorption matrix are distributions.
        let b = result.probabilities().unwrap();
        for i in 0..3 {
            let sum: f64 = (0..2).map(|j| b.get(i, j)).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
        for &s in result.expected_steps() {
            assert!(s >= 1.0);
        }
    }

    #[test]
    fn absorption_error_paths() {
        assert!(matches!(
            absorption_probabilities(&pool_chain()),
            Err(Error::NoAbsorbingState)
        ));
        // States 1 and 2 form a trapped recurrent pair.
        let trapped = chain(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.0, 0.5, 0.5],
        ]);
        assert!(matches!(
            absorption_probabilities(&trapped),
            Err(Error::NonAbsorbingChain(_))
        ));
        // All states absorbing: trivially fine, nothing transient.
        let frozen = chain(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let result = absorption_probabilities(&frozen).unwrap();
        assert!(result.transient_states().is_empty());
        assert!(result.probabilities().is_none());
    }

    #[test]
    fn construction_guards() {
        assert!(matches!(
            TransitionMatrix::new(vec!["a".into()], Matrix::new(1, 2, vec![0.5, 0.5]).unwrap()),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            TransitionMatrix::new(
                vec!["a".into(), "b".into(), "c".into()],
                Matrix::identity(2)
            ),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            TransitionMatrix::new(
                vec!["a".into(), "a".into()],
                Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
            ),
            Err(Error::Label(_))
        ));
        assert!(matches!(
            TransitionMatrix::new(
                vec!["a".into(), "b".into()],
                Matrix::from_rows(&[vec![0.8, 0.0], vec![0.5, 0.5]]).unwrap()
            ),
            Err(Error::Stochasticity { row: 0, .. })
        ));
        assert!(matches!(
            TransitionMatrix::new(
                vec!["a".into(), "b".into()],
                Matrix::from_rows(&[vec![1.2, -0.2], vec![0.5, 0.5]]).unwrap()
            ),
            Err(Error::Stochasticity { .. })
        ));
    }

    #[test]
    fn stationary_distribution_constructor_guards() {
        assert!(StationaryDistribution::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            StationaryDistribution::new(vec!["a".into()], vec![0.5, 0.5]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            StationaryDistribution::new(vec!["a".into(), "b".into()], vec![0.7, 0.7]),
            Err(Error::Stochasticity { .. })
        ));
    }
}
