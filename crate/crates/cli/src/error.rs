//! CLI error wrapper: file and parse failures plus everything the core
//! library can raise, each mapped to a stable exit code and a one-line
//! machine-readable JSON object on stderr.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Io {
        path: PathBuf,
        message: String,
    },
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    Core(poolchain_core::Error),
    /// Report serialization failed (non-finite value reached the renderer).
    Render(String),
}

impl From<poolchain_core::Error> for CliError {
    fn from(e: poolchain_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "{}:{line}:{column}: {message}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Render(message) => write!(f, "cannot render report: {message}"),
        }
    }
}

impl CliError {
    /// Stable exit codes: 0 success, 1 I/O, 2 parse, 3 stochasticity,
    /// 4 no unique limit, 5 degenerate table, 6 label, 7 other analysis
    /// errors.
    pub fn exit_code(&self) -> i32 {
        use poolchain_core::Error as E;
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse { .. } => 2,
            CliError::Render(_) => 7,
            CliError::Core(e) => match e {
                E::Stochasticity { .. } => 3,
                E::NoUniqueLimit(_) => 4,
                E::DegenerateTable(_) => 5,
                E::Label(_) => 6,
                _ => 7,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        use poolchain_core::Error as E;
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Render(_) => "render",
            CliError::Core(e) => match e {
                E::Dimension(_) => "dimension",
                E::Stochasticity { .. } => "stochasticity",
                E::SingularMatrix { .. } => "singular_matrix",
                E::Domain(_) => "domain",
                E::DegenerateTable(_) => "degenerate_table",
                E::Label(_) => "label",
                E::NoUniqueLimit(_) => "no_unique_limit",
                E::InfiniteSojourn { .. } => "infinite_sojourn",
                E::Convergence { .. } => "convergence",
                E::NoAbsorbingState => "no_absorbing_state",
                E::NonAbsorbingChain(_) => "non_absorbing_chain",
                E::InsufficientData(_) => "insufficient_data",
            },
        }
    }

    /// One-line JSON for stderr: `{"error":{"kind":...,"message":...}}`.
    pub fn to_stderr_json(&self) -> String {
        #[derive(serde::Serialize)]
        struct Inner<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(serde::Serialize)]
        struct Wrapper<'a> {
            error: Inner<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Inner {
                kind: self.kind(),
                message: self.to_string(),
            },
        })
        .expect("error serialization cannot fail")
    }
}
