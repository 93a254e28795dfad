//! Report types and rendering.
//!
//! One struct per subcommand, each carrying `schema`, `tool_version`, and
//! the input digest up front. JSON serialization is deterministic: struct
//! fields keep declaration order, collections are vectors, and every float
//! goes through [`F17`], which prints exactly 17 significant digits so the
//! value round-trips bit-for-bit. Three-decimal rendering appears only in
//! the human format, produced by each report's `human()` method.

use serde::{Deserialize, Serialize};

use poolchain_core::{ChainClassification, Matrix, TransitionMatrix};

/// JSON schema version stamped as the first field of every report.
pub const SCHEMA_VERSION: u32 = 1;

/// A float serialized with 17 significant digits (`{:.16e}`), enough to
/// reproduce the exact f64 on parse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = serde_json::value::RawValue::from_string(format!("{:.16e}", self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        f64::deserialize(deserializer).map(F17)
    }
}

pub(crate) fn wrap(values: &[f64]) -> Vec<F17> {
    values.iter().map(|&v| F17(v)).collect()
}

pub(crate) fn wrap_matrix(m: &Matrix) -> Vec<Vec<F17>> {
    (0..m.rows()).map(|i| wrap(m.row(i))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub states: Vec<String>,
    pub rows: Vec<Vec<F17>>,
}

impl MatrixReport {
    pub fn from_transition(tm: &TransitionMatrix) -> Self {
        Self {
            states: tm.states().to_vec(),
            rows: wrap_matrix(tm.matrix()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestSummary {
    pub statistic: F17,
    pub degrees_of_freedom: u32,
    pub p_value: F17,
    pub correction: String,
    pub alpha: F17,
    pub decision: String,
    pub expected_counts: Vec<Vec<F17>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KStepReport {
    pub years: u32,
    pub matrix: MatrixReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub states: Vec<String>,
    pub probabilities: Vec<F17>,
}

impl DistributionReport {
    pub fn new(states: Vec<String>, probabilities: &[f64]) -> Self {
        Self {
            states,
            probabilities: wrap(probabilities),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SojournReport {
    pub states: Vec<String>,
    pub years: Vec<F17>,
    /// "geometric_holding" (1 / (1 - P_ii)) or "rounded_stationary_ratio"
    /// (three-decimal stationary probabilities pushed through the balance
    /// identity, matching published display arithmetic).
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonReport {
    pub years: u32,
    pub tolerance: F17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub classes: Vec<Vec<String>>,
    pub recurrent: Vec<String>,
    pub transient: Vec<String>,
    pub absorbing: Vec<String>,
    pub irreducible: bool,
    pub aperiodic: bool,
}

impl ClassificationSummary {
    pub fn from_classification(c: &ChainClassification, states: &[String]) -> Self {
        let names = |ix: &[usize]| ix.iter().map(|&i| states[i].clone()).collect();
        Self {
            classes: c.classes.iter().map(|cl| names(cl)).collect(),
            recurrent: names(&c.recurrent_states),
            transient: names(&c.transient_states),
            absorbing: names(&c.absorbing_states),
            irreducible: c.irreducible,
            aperiodic: c.aperiodic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    /// "exact" or "three_decimal" (the latter under --paper-rounding).
    pub rounding: String,
    pub test: TestSummary,
    pub transition: MatrixReport,
    pub k_step_results: Vec<KStepReport>,
    pub stationary: DistributionReport,
    pub sojourn: SojournReport,
    pub horizon: HorizonReport,
    pub classification: ClassificationSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectReport {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    pub row_sum_adjustment: F17,
    pub years: u32,
    pub matrix: MatrixReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryCmdReport {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    pub row_sum_adjustment: F17,
    pub stationary: DistributionReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SojournCmdReport {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    pub row_sum_adjustment: F17,
    pub sojourn: SojournReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonCmdReport {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    pub row_sum_adjustment: F17,
    pub horizon: HorizonReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    pub row_sum_adjustment: F17,
    pub n_plans: u64,
    pub horizon_years: u32,
    pub seed: u64,
    /// A state label, or "uniform" when no initial state was given.
    pub initial: String,
    pub final_year: u32,
    pub final_occupancy: DistributionReport,
    /// Null when some state was never occupied, leaving its row undefined.
    pub empirical_transition: Option<MatrixReport>,
    pub completed_runs: Vec<u64>,
    /// Mean completed-run length per state; null with fewer than 30
    /// completed runs.
    pub sojourn_means: Vec<Option<F17>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointWinReport {
    pub state: String,
    pub win_probability: F17,
    pub expected_rolls: F17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrapsReport {
    pub schema: u32,
    pub tool_version: String,
    pub win_probability: F17,
    pub lose_probability: F17,
    pub expected_rolls: F17,
    pub point_states: Vec<PointWinReport>,
    /// Digest of the bundled pool table the comparison is made against.
    pub pool_input_digest: String,
    pub pool_receiver_share: F17,
    pub difference: F17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub states: Vec<String>,
    pub eigenvalues: Vec<F17>,
    pub q: Vec<Vec<F17>>,
    pub q_inv: Vec<Vec<F17>>,
}

impl EigenReport {
    pub fn new(states: Vec<String>, eig: &poolchain_core::EigenSystem) -> Self {
        Self {
            states,
            eigenvalues: wrap(&eig.eigenvalues),
            q: wrap_matrix(&eig.q),
            q_inv: wrap_matrix(&eig.q_inv),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrapsSection {
    pub win_probability: F17,
    pub expected_rolls: F17,
    pub pool_receiver_share: F17,
    pub difference: F17,
}

/// End-to-end reproduction of the published two-state pool analysis on the
/// bundled data: test, three-decimal transition arithmetic, projections,
/// stationary and sojourn behavior, eigendecomposition, and the craps
/// comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullReport {
    pub schema: u32,
    pub tool_version: String,
    pub input_digest: String,
    pub counts: Vec<Vec<u64>>,
    pub test: TestSummary,
    pub transition: MatrixReport,
    pub k_step_results: Vec<KStepReport>,
    pub stationary: DistributionReport,
    pub sojourn: SojournReport,
    pub horizon: HorizonReport,
    pub classification: ClassificationSummary,
    pub eigen: EigenReport,
    pub craps: CrapsSection,
    pub data_note: String,
}

// ---------------------------------------------------------------------------
// Human rendering: three-decimal tables, one section per analysis step.
// ---------------------------------------------------------------------------

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

/// Column width that fits every label and a "-0.000" cell.
fn width(states: &[String]) -> usize {
    states.iter().map(|s| s.len()).max().unwrap_or(0).max(8)
}

fn grid_rows(out: &mut String, states: &[String], rows: &[Vec<F17>]) {
    let w = width(states);
    out.push_str(&" ".repeat(w + 2));
    for s in states {
        out.push_str(&format!("  {s:>w$}"));
    }
    out.push('\n');
    for (label, row) in states.iter().zip(rows) {
        out.push_str(&format!("  {label:>w$}"));
        for cell in row {
            out.push_str(&format!("  {:>w$}", f3(cell.0)));
        }
        out.push('\n');
    }
}

fn named_values(out: &mut String, states: &[String], values: &[String]) {
    let w = width(states);
    for (label, v) in states.iter().zip(values) {
        out.push_str(&format!("  {label:>w$}  {v}\n"));
    }
}

fn test_section(out: &mut String, t: &TestSummary) {
    out.push_str("Independence test (chi-square)\n");
    out.push_str(&format!("  statistic   {}\n", f3(t.statistic.0)));
    out.push_str(&format!("  df          {}\n", t.degrees_of_freedom));
    out.push_str(&format!("  p-value     {:.3e}\n", t.p_value.0));
    out.push_str(&format!("  correction  {}\n", t.correction));
    out.push_str(&format!("  alpha       {}\n", f3(t.alpha.0)));
    out.push_str(&format!("  decision    {}\n", t.decision));
}

fn classification_section(out: &mut String, c: &ClassificationSummary) {
    out.push_str("Classification\n");
    let shape = match (c.irreducible, c.aperiodic) {
        (true, true) => "irreducible, aperiodic",
        (true, false) => "irreducible, periodic",
        (false, true) => "reducible, aperiodic",
        (false, false) => "reducible, periodic",
    };
    out.push_str(&format!("  structure   {shape}\n"));
    let list = |v: &[String]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.join(", ")
        }
    };
    out.push_str(&format!("  recurrent   {}\n", list(&c.recurrent)));
    out.push_str(&format!("  transient   {}\n", list(&c.transient)));
    out.push_str(&format!("  absorbing   {}\n", list(&c.absorbing)));
}

fn analysis_sections(r: &AnalysisReport) -> String {
    let mut out = String::new();
    test_section(&mut out, &r.test);
    out.push('\n');
    out.push_str(&format!("Transition matrix ({} estimation)\n", r.rounding));
    grid_rows(&mut out, &r.transition.states, &r.transition.rows);
    for k in &r.k_step_results {
        out.push('\n');
        out.push_str(&format!("Projection after {} years\n", k.years));
        grid_rows(&mut out, &k.matrix.states, &k.matrix.rows);
    }
    out.push('\n');
    out.push_str("Stationary distribution\n");
    named_values(
        &mut out,
        &r.stationary.states,
        &r.stationary
            .probabilities
            .iter()
            .map(|v| f3(v.0))
            .collect::<Vec<_>>(),
    );
    out.push('\n');
    out.push_str("Expected sojourn (years per visit)\n");
    named_values(
        &mut out,
        &r.sojourn.states,
        &r.sojourn.years.iter().map(|v| f3(v.0)).collect::<Vec<_>>(),
    );
    out.push('\n');
    out.push_str(&format!(
        "Convergence horizon\n  {} years to come within {} of the limit\n",
        r.horizon.years, r.horizon.tolerance.0
    ));
    out.push('\n');
    classification_section(&mut out, &r.classification);
    out
}

impl AnalysisReport {
    pub fn human(&self) -> String {
        analysis_sections(self)
    }
}

impl ProjectReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Projection after {} years\n", self.years));
        grid_rows(&mut out, &self.matrix.states, &self.matrix.rows);
        out
    }
}

impl StationaryCmdReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str("Stationary distribution\n");
        named_values(
            &mut out,
            &self.stationary.states,
            &self
                .stationary
                .probabilities
                .iter()
                .map(|v| f3(v.0))
                .collect::<Vec<_>>(),
        );
        out
    }
}

impl SojournCmdReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str("Expected sojourn (years per visit)\n");
        named_values(
            &mut out,
            &self.sojourn.states,
            &self
                .sojourn
                .years
                .iter()
                .map(|v| f3(v.0))
                .collect::<Vec<_>>(),
        );
        out
    }
}

impl HorizonCmdReport {
    pub fn human(&self) -> String {
        format!(
            "Convergence horizon\n  {} years to come within {} of the limit\n",
            self.horizon.years, self.horizon.tolerance.0
        )
    }
}

impl SimulateReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Simulation: {} plans, {} years, seed {}, initial {}\n\n",
            self.n_plans, self.horizon_years, self.seed, self.initial
        ));
        out.push_str(&format!("Occupancy at year {}\n", self.final_year));
        named_values(
            &mut out,
            &self.final_occupancy.states,
            &self
                .final_occupancy
                .probabilities
                .iter()
                .map(|v| f3(v.0))
                .collect::<Vec<_>>(),
        );
        out.push('\n');
        match &self.empirical_transition {
            Some(m) => {
                out.push_str("Empirical transition estimate\n");
                grid_rows(&mut out, &m.states, &m.rows);
            }
            None => out.push_str(
                "Empirical transition estimate\n  undefined: some state was never occupied\n",
            ),
        }
        out.push('\n');
        out.push_str("Mean completed sojourn (years per visit)\n");
        let cells: Vec<String> = self
            .sojourn_means
            .iter()
            .zip(&self.completed_runs)
            .map(|(m, runs)| match m {
                Some(v) => format!("{} ({runs} runs)", f3(v.0)),
                None => format!("too few completed runs ({runs})"),
            })
            .collect();
        named_values(&mut out, &self.final_occupancy.states, &cells);
        out
    }
}

impl CrapsReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str("Craps absorption analysis\n");
        out.push_str(&format!(
            "  win probability    {}  (244/495)\n",
            f3(self.win_probability.0)
        ));
        out.push_str(&format!(
            "  lose probability   {}\n",
            f3(self.lose_probability.0)
        ));
        out.push_str(&format!(
            "  expected rolls     {}\n",
            f3(self.expected_rolls.0)
        ));
        out.push('\n');
        out.push_str("Win probability and expected rolls by point\n");
        let states: Vec<String> = self.point_states.iter().map(|p| p.state.clone()).collect();
        let cells: Vec<String> = self
            .point_states
            .iter()
            .map(|p| {
                format!(
                    "{}  ({} rolls)",
                    f3(p.win_probability.0),
                    f3(p.expected_rolls.0)
                )
            })
            .collect();
        named_values(&mut out, &states, &cells);
        out.push('\n');
        out.push_str("Against the bundled transfer pool\n");
        out.push_str(&format!(
            "  craps win          {}\n",
            f3(self.win_probability.0)
        ));
        out.push_str(&format!(
            "  receiver share     {}\n",
            f3(self.pool_receiver_share.0)
        ));
        out.push_str(&format!("  difference         {}\n", f3(self.difference.0)));
        out
    }
}

impl FullReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str("Observed payer/receiver counts\n");
        let states = &self.transition.states;
        let w = width(states);
        out.push_str(&" ".repeat(w + 2));
        for s in states {
            out.push_str(&format!("  {s:>w$}"));
        }
        out.push('\n');
        for (label, row) in states.iter().zip(&self.counts) {
            out.push_str(&format!("  {label:>w$}"));
            for cell in row {
                out.push_str(&format!("  {cell:>w$}"));
            }
            out.push('\n');
        }
        out.push('\n');
        test_section(&mut out, &self.test);
        out.push('\n');
        out.push_str("Transition matrix (three-decimal display arithmetic)\n");
        grid_rows(&mut out, states, &self.transition.rows);
        for k in &self.k_step_results {
            out.push('\n');
            out.push_str(&format!("Projection after {} years\n", k.years));
            grid_rows(&mut out, &k.matrix.states, &k.matrix.rows);
        }
        out.push('\n');
        out.push_str("Stationary distribution\n");
        named_values(
            &mut out,
            &self.stationary.states,
            &self
                .stationary
                .probabilities
                .iter()
                .map(|v| f3(v.0))
                .collect::<Vec<_>>(),
        );
        out.push('\n');
        out.push_str("Expected sojourn via rounded stationary ratio\n");
        let sojourn: Vec<String> = self
            .sojourn
            .years
            .iter()
            .map(|v| format!("{:.2} years", v.0))
            .collect();
        named_values(&mut out, &self.sojourn.states, &sojourn);
        out.push('\n');
        out.push_str(&format!(
            "Convergence horizon\n  {} years to come within {} of the limit\n",
            self.horizon.years, self.horizon.tolerance.0
        ));
        out.push('\n');
        out.push_str("Eigendecomposition P = Q diag(lambda) Q^-1\n");
        out.push_str(&format!(
            "  eigenvalues  {}  {}\n",
            f3(self.eigen.eigenvalues[0].0),
            f3(self.eigen.eigenvalues[1].0)
        ));
        out.push_str("  Q (columns are eigenvectors)\n");
        for row in &self.eigen.q {
            out.push_str(&format!("    {:>8}  {:>8}\n", f3(row[0].0), f3(row[1].0)));
        }
        out.push('\n');
        classification_section(&mut out, &self.classification);
        out.push('\n');
        out.push_str("Craps comparison\n");
        out.push_str(&format!(
            "  craps win probability   {}\n",
            f3(self.craps.win_probability.0)
        ));
        out.push_str(&format!(
            "  expected rolls          {}\n",
            f3(self.craps.expected_rolls.0)
        ));
        out.push_str(&format!(
            "  pool receiver share     {}\n",
            f3(self.craps.pool_receiver_share.0)
        ));
        out.push_str(&format!(
            "  difference              {}\n",
            f3(self.craps.difference.0)
        ));
        out.push('\n');
        out.push_str(&format!("Note: {}\n", self.data_note));
        out
    }
}
