//! Hamiltonian ingestion and evolution-time resolution.

use std::path::Path;
use std::str::FromStr;

use trotter_core::hamiltonian::{builtin_fixture, trotter_time, QubitHamiltonian, FIXTURE_NAMES};
use trotter_core::sim::ground_state;

use crate::error::{CliError, Result};

/// Loads `fixture:<name>`, a file path, or a bare built-in fixture name.
pub fn load_hamiltonian(spec: &str) -> Result<QubitHamiltonian> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        return Ok(builtin_fixture(name)?);
    }
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let h = QubitHamiltonian::parse(&text)?;
        return Ok(if h.label().is_empty() {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
            h.with_label(stem)
        } else {
            h
        });
    }
    if FIXTURE_NAMES.contains(&spec) {
        return Ok(builtin_fixture(spec)?);
    }
    Err(CliError::Input(format!(
        "`{spec}` is neither a readable file nor a built-in fixture"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeArg {
    /// Pick `t` from a reference energy.
    Auto,
    Fixed(f64),
}

impl FromStr for TimeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(TimeArg::Auto);
        }
        let t: f64 = s
            .parse()
            .map_err(|_| format!("expected `auto` or a number, got `{s}`"))?;
        if !t.is_finite() || t == 0.0 {
            return Err(format!("time must be finite and non-zero, got {t}"));
        }
        Ok(TimeArg::Fixed(t))
    }
}

/// Evolution time. `auto` uses `reference` when given, otherwise the exact
/// ground-state energy of `h`.
pub fn resolve_time(arg: TimeArg, h: &QubitHamiltonian, reference: Option<f64>) -> Result<f64> {
    match arg {
        TimeArg::Fixed(t) => Ok(t),
        TimeArg::Auto => {
            let e = match reference {
                Some(e) => e,
                None => ground_state(h)?.energy,
            };
            Ok(trotter_time(e))
        }
    }
}
