//! Command-line front end for the `bandedge` solvers.
//!
//! Exit codes: 0 success, 1 validation tolerance failure, 2 usage or
//! configuration error, 3 numerical failure. Errors are reported on stderr as
//! a single JSON line `{"error": kind, "message": text}`.

pub mod args;
pub mod commands;
pub mod config;
pub mod table;

use std::path::Path;

use serde_json::json;

use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            kind: "config".into(),
            message: message.into(),
        }
    }

    pub fn numerical(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            kind: kind.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            code: EXIT_CONFIG,
            kind: "io".into(),
            message: format!("{}: {e}", path.display()),
        }
    }

    pub fn report(&self) {
        self.report_with(None);
    }

    /// Print the machine-readable line, optionally tagged with a sweep value.
    pub fn report_with(&self, sweep: Option<(&str, f64)>) {
        let mut v = json!({ "error": self.kind, "message": self.message });
        if let Some((param, value)) = sweep {
            v["param"] = json!(param);
            v["value"] = json!(value);
        }
        eprintln!("{v}");
    }
}

impl From<bandedge::Error> for CliError {
    fn from(e: bandedge::Error) -> Self {
        let code = if e.is_config_error() {
            EXIT_CONFIG
        } else {
            EXIT_NUMERICAL
        };
        CliError {
            code,
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Trace(a) => commands::trace(a).map(|_| EXIT_OK),
        Command::Sweep(a) => commands::sweep(a).map(|ok| if ok { EXIT_OK } else { EXIT_NUMERICAL }),
        Command::Validate(a) => match commands::validate(a) {
            Ok(checks) => {
                for c in &checks {
                    println!("{}", c.line());
                }
                Ok(if checks.iter().all(|c| c.passed()) {
                    EXIT_OK
                } else {
                    EXIT_VALIDATION
                })
            }
            // a grid the solver refuses is a failed validation, not a usage error
            Err(e) if e.kind == "step_too_large" => {
                println!("FAIL step_precondition");
                Err(CliError {
                    code: EXIT_VALIDATION,
                    ..e
                })
            }
            Err(e) => Err(e),
        },
        Command::Roots(a) => commands::roots(a).map(|v| {
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("json serialization")
            );
            EXIT_OK
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            e.report();
            e.code
        }
    }
}
