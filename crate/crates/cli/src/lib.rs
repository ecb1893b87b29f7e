//! Batch driver around the estimation library: a JSON experiment
//! configuration fans out into simulate-then-estimate replications over a
//! grid of (n, ε) cells, collected into CSV reports.

pub mod config;
pub mod report;
pub mod runner;

/// Driver-level error split by exit code: configuration problems (exit 1)
/// versus runtime failures (exit 2).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}
