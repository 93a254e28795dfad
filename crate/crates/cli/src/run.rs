//! Subcommand implementations: load input, run the core analysis, build a
//! report, and emit it as deterministic JSON or a human summary.

use std::path::Path;

use serde::Serialize;

use poolchain_core::{
    absorption_probabilities, build_craps_chain, chi_square_test, classify, compare_with_pool,
    convergence_horizon, craps_expected_rolls, craps_win_probability, estimate_from_counts,
    expected_sojourn, independence_decision, k_step, sojourn_via_rounded_stationary,
    stationary_distribution, two_state, ContingencyTable, Correction, Decision, Error,
    InitialState, SimulationConfig, StationaryDistribution, TestResult, TransitionMatrix,
    STATE_LABELS, WIN,
};

use crate::error::CliError;
use crate::input;
use crate::report::{
    wrap, wrap_matrix, AnalysisReport, ClassificationSummary, CrapsReport, CrapsSection,
    DistributionReport, EigenReport, FullReport, HorizonCmdReport, HorizonReport, KStepReport,
    MatrixReport, PointWinReport, ProjectReport, SimulateReport, SojournCmdReport, SojournReport,
    StationaryCmdReport, TestSummary, F17, SCHEMA_VERSION,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The payer/receiver contingency table every report offers as a baseline:
/// 113 plans observed over one transition.
pub const BUNDLED_TABLE: &str = include_str!("../fixtures/table1.csv");

const DEFAULT_HORIZON_TOLERANCE: f64 = 0.005;
const PROJECTION_YEARS: [u32; 2] = [8, 10];

const DATA_NOTE: &str = "The chi-square statistic computed from these counts is 29.979, while \
some published analyses report 31.158 for the same table; the published figure is not \
reproducible from the counts, so this tool reports the value the data implies.";

/// Output format selected with `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Pretty-printed JSON with every float at 17 significant digits.
    Json,
    /// Plain-text summary with three-decimal tables.
    Human,
}

/// Where and how a finished report leaves the process.
pub struct Sink<'a> {
    pub format: OutputFormat,
    pub out: Option<&'a Path>,
}

fn emit<T: Serialize>(report: &T, human: String, sink: &Sink<'_>) -> Result<(), CliError> {
    let text = match sink.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Render(e.to_string()))?;
            s.push('\n');
            s
        }
        OutputFormat::Human => human,
    };
    match sink.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn correction_name(c: Correction) -> &'static str {
    match c {
        Correction::None => "none",
        Correction::Yates => "yates",
    }
}

fn test_summary(test: &TestResult, alpha: f64, decision: Decision) -> TestSummary {
    TestSummary {
        statistic: F17(test.statistic),
        degrees_of_freedom: test.df,
        p_value: F17(test.p_value),
        correction: correction_name(test.correction).to_string(),
        alpha: F17(alpha),
        decision: match decision {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail_to_reject",
        }
        .to_string(),
        expected_counts: wrap_matrix(&test.expected),
    }
}

fn distribution_report(dist: &StationaryDistribution) -> DistributionReport {
    DistributionReport::new(dist.states().to_vec(), dist.pi())
}

fn geometric_sojourn(tm: &TransitionMatrix) -> Result<SojournReport, CliError> {
    let years = tm
        .states()
        .iter()
        .map(|s| expected_sojourn(tm, s))
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok(SojournReport {
        states: tm.states().to_vec(),
        years: wrap(&years),
        method: "geometric_holding".to_string(),
    })
}

/// Full pipeline shared by `analyze` and the bundled-data reproduction:
/// independence test, transition estimate (optionally coarsened to the
/// three decimals a published table displays), 8- and 10-year projections,
/// stationary distribution, sojourn times, convergence horizon, and
/// structural classification.
pub fn build_analysis(
    table: &ContingencyTable,
    correction: Correction,
    alpha: f64,
    three_decimal: bool,
    input_digest: String,
) -> Result<AnalysisReport, CliError> {
    let test = chi_square_test(table, correction)?;
    let decision = independence_decision(&test, alpha)?;

    let exact = estimate_from_counts(table)?;
    let tm = if three_decimal {
        exact.rounded(3)?
    } else {
        exact
    };

    let k_step_results = PROJECTION_YEARS
        .iter()
        .map(|&years| {
            k_step(&tm, years).map(|m| KStepReport {
                years,
                matrix: MatrixReport::from_transition(&m),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let stationary = stationary_distribution(&tm)?;

    let sojourn = if three_decimal && tm.n_states() == 2 {
        let years = sojourn_via_rounded_stationary(&tm)?;
        SojournReport {
            states: tm.states().to_vec(),
            years: wrap(&years),
            method: "rounded_stationary_ratio".to_string(),
        }
    } else {
        geometric_sojourn(&tm)?
    };

    let horizon_years = convergence_horizon(&tm, DEFAULT_HORIZON_TOLERANCE)?;
    let classification = classify(&tm);

    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_digest,
        rounding: if three_decimal {
            "three_decimal"
        } else {
            "exact"
        }
        .to_string(),
        test: test_summary(&test, alpha, decision),
        transition: MatrixReport::from_transition(&tm),
        k_step_results,
        stationary: distribution_report(&stationary),
        sojourn,
        horizon: HorizonReport {
            years: horizon_years,
            tolerance: F17(DEFAULT_HORIZON_TOLERANCE),
        },
        classification: ClassificationSummary::from_classification(&classification, tm.states()),
    })
}

pub fn analyze(
    input: &Path,
    correction: Correction,
    alpha: f64,
    three_decimal: bool,
    sink: &Sink<'_>,
) -> Result<(), CliError> {
    let content = input::read(input)?;
    let digest = input::digest(&content);
    let table = input::parse_contingency_str(input, &content)?;
    let report = build_analysis(&table, correction, alpha, three_decimal, digest)?;
    emit(&report, report.human(), sink)
}

fn load_matrix(path: &Path) -> Result<(TransitionMatrix, f64, String), CliError> {
    let content = input::read(path)?;
    let digest = input::digest(&content);
    let (tm, adjustment) = input::parse_matrix_str(path, &content)?;
    Ok((tm, adjustment, digest))
}

pub fn project(matrix: &Path, years: u32, sink: &Sink<'_>) -> Result<(), CliError> {
    let (tm, adjustment, digest) = load_matrix(matrix)?;
    let powered = k_step(&tm, years)?;
    let report = ProjectReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_digest: digest,
        row_sum_adjustment: F17(adjustment),
        years,
        matrix: MatrixReport::from_transition(&powered),
    };
    emit(&report, report.human(), sink)
}

pub fn stationary(matrix: &Path, sink: &Sink<'_>) -> Result<(), CliError> {
    let (tm, adjustment, digest) = load_matrix(matrix)?;
    let dist = stationary_distribution(&tm)?;
    let report = StationaryCmdReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_digest: digest,
        row_sum_adjustment: F17(adjustment),
        stationary: distribution_report(&dist),
    };
    emit(&report, report.human(), sink)
}

pub fn sojourn(matrix: &Path, sink: &Sink<'_>) -> Result<(), CliError> {
    let (tm, adjustment, digest) = load_matrix(matrix)?;
    let report = SojournCmdReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_digest: digest,
        row_sum_adjustment: F17(adjustment),
        sojourn: geometric_sojourn(&tm)?,
    };
    emit(&report, report.human(), sink)
}

pub fn horizon(matrix: &Path, tol: f64, sink: &Sink<'_>) -> Result<(), CliError> {
    let (tm, adjustment, digest) = load_matrix(matrix)?;
    let years = convergence_horizon(&tm, tol)?;
    let report = HorizonCmdReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_digest: digest,
        row_sum_adjustment: F17(adjustment),
        horizon: HorizonReport {
            years,
            tolerance: F17(tol),
        },
    };
    emit(&report, report.human(), sink)
}

pub fn simulate(
    matrix: &Path,
    plans: u64,
    years: u32,
    seed: u64,
    initial: Option<&str>,
    sink: &Sink<'_>,
) -> Result<(), CliError> {
    let (tm, adjustment, digest) = load_matrix(matrix)?;
    let n = tm.n_states();
    let (initial_state, initial_name) = match initial {
        Some(label) => (InitialState::Fixed(tm.index_of(label)?), label.to_string()),
        None => (
            InitialState::Distribution(vec![1.0 / n as f64; n]),
            "uniform".to_string(),
        ),
    };
    let config = SimulationConfig {
        n_plans: plans,
        horizon_years: years,
        seed,
        initial: initial_state,
    };
    let stats = poolchain_core::simulate_trajectories(&tm, &config)?;

    let final_year = years - 1;
    let occupancy = stats.occupancy_frequency(final_year)?;

    // A state that was never occupied leaves a zero row in the transition
    // counts; the empirical estimate is then undefined rather than an error.
    let empirical = match estimate_from_counts(&stats.empirical_transition_table()?) {
        Ok(est) => Some(MatrixReport::from_transition(&est)),
        Err(Error::DegenerateTable(_)) => None,
        Err(e) => return Err(e.into()),
    };

    let mut completed_runs = Vec::with_capacity(n);
    let mut sojourn_means = Vec::with_capacity(n);
    for state in 0..n {
        completed_runs.push(stats.completed_sojourn_counts(state).values().sum::<u64>());
        match stats.empirical_sojourn_mean(state) {
            Ok(mean) => sojourn_means.push(Some(F17(mean))),
            Err(Error::InsufficientData(_)) => sojourn_means.push(None),
            Err(e) => return Err(e.into()),
        }
    }

    let report = SimulateReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_digest: digest,
        row_sum_adjustment: F17(adjustment),
        n_plans: plans,
        horizon_years: years,
        seed,
        initial: initial_name,
        final_year,
        final_occupancy: DistributionReport::new(stats.states().to_vec(), &occupancy),
        empirical_transition: empirical,
        completed_runs,
        sojourn_means,
    };
    emit(&report, report.human(), sink)
}

/// Stationary distribution of the bundled two-state pool, full precision.
fn bundled_pool_stationary() -> Result<StationaryDistribution, CliError> {
    let table = input::parse_contingency_str(Path::new("<bundled>"), BUNDLED_TABLE)?;
    let tm = estimate_from_counts(&table)?;
    Ok(stationary_distribution(&tm)?)
}

pub fn craps(sink: &Sink<'_>) -> Result<(), CliError> {
    let chain = build_craps_chain()?;
    let absorption = absorption_probabilities(&chain)?;
    let win = craps_win_probability()?;
    let rolls = craps_expected_rolls()?;

    let point_states = STATE_LABELS
        .iter()
        .skip(1)
        .take(6)
        .map(|&label| {
            Ok(PointWinReport {
                state: label.to_string(),
                win_probability: F17(absorption.absorb_probability(label, WIN)?),
                expected_rolls: F17(absorption.steps_to_absorption(label)?),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let pool = bundled_pool_stationary()?;
    let comparison = compare_with_pool(&pool)?;

    let report = CrapsReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        win_probability: F17(win),
        lose_probability: F17(1.0 - win),
        expected_rolls: F17(rolls),
        point_states,
        pool_input_digest: input::digest(BUNDLED_TABLE),
        pool_receiver_share: F17(comparison.pool_receiver),
        difference: F17(comparison.difference),
    };
    emit(&report, report.human(), sink)
}

/// Reproduce the published analysis of the bundled data end to end, with
/// the same three-decimal display arithmetic the source tables use.
pub fn paper(sink: &Sink<'_>) -> Result<(), CliError> {
    let digest = input::digest(BUNDLED_TABLE);
    let table = input::parse_contingency_str(Path::new("<bundled>"), BUNDLED_TABLE)?;
    let analysis = build_analysis(&table, Correction::None, 0.05, true, digest.clone())?;

    let counts: Vec<Vec<u64>> = (0..table.n_rows())
        .map(|i| (0..table.n_cols()).map(|j| table.count(i, j)).collect())
        .collect();

    let rounded = estimate_from_counts(&table)?.rounded(3)?;
    let eigen = two_state(rounded.matrix())?;

    let win = craps_win_probability()?;
    let pool = bundled_pool_stationary()?;
    let comparison = compare_with_pool(&pool)?;

    let report = FullReport {
        schema: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input_digest: digest,
        counts,
        test: analysis.test,
        transition: analysis.transition,
        k_step_results: analysis.k_step_results,
        stationary: analysis.stationary,
        sojourn: analysis.sojourn,
        horizon: analysis.horizon,
        classification: analysis.classification,
        eigen: EigenReport::new(rounded.states().to_vec(), &eigen),
        craps: CrapsSection {
            win_probability: F17(win),
            expected_rolls: F17(craps_expected_rolls()?),
            pool_receiver_share: F17(comparison.pool_receiver),
            difference: F17(comparison.difference),
        },
        data_note: DATA_NOTE.to_string(),
    };
    emit(&report, report.human(), sink)
}
