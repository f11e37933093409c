//! Batch runner: one TOML document in, CSV tables and a `metadata.json`
//! out.
//!
//! Every run is computed in memory before anything is written, so a
//! configuration or capacity error leaves the output directory untouched.
//! When a built-in verdict fails (the equivalence check), the artifacts are
//! written and the run reports [`Error::Validation`].

pub mod config;
mod models;
mod output;
mod runs;

pub use config::DriveModel;
pub use models::{build_model, BuiltModel, GAUGE_TOL};
pub use output::{fmt_f64, CsvTable};
pub use runs::{
    bessel_factor, bond_split, default_cutoff, equivalence_couplings, equivalence_rows,
    penalty_residual, EquivalenceRow, RunOutput, MAX_EQUIVALENCE_SITES,
};

use crate::{Error, Result};
use config::OutputSection;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Spectrum,
    Evolve,
    Trotter,
    FloquetCompare,
    Shaking,
    Hofstadter,
    Chern,
    Berry,
    PenaltyCheck,
    EquivalenceCheck,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 10] = [
        ScenarioKind::Spectrum,
        ScenarioKind::Evolve,
        ScenarioKind::Trotter,
        ScenarioKind::FloquetCompare,
        ScenarioKind::Shaking,
        ScenarioKind::Hofstadter,
        ScenarioKind::Chern,
        ScenarioKind::Berry,
        ScenarioKind::PenaltyCheck,
        ScenarioKind::EquivalenceCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Spectrum => "spectrum",
            ScenarioKind::Evolve => "evolve",
            ScenarioKind::Trotter => "trotter",
            ScenarioKind::FloquetCompare => "floquet-compare",
            ScenarioKind::Shaking => "shaking",
            ScenarioKind::Hofstadter => "hofstadter",
            ScenarioKind::Chern => "chern",
            ScenarioKind::Berry => "berry",
            ScenarioKind::PenaltyCheck => "penalty-check",
            ScenarioKind::EquivalenceCheck => "equivalence-check",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

/// What a finished run produced.
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub summary: serde_json::Value,
}

/// Rejects `nan` and `inf` anywhere in the document, naming the key.
fn check_finite(value: &toml::Value, path: &str) -> Result<()> {
    match value {
        toml::Value::Float(x) if !x.is_finite() => {
            Err(Error::Config(format!("{path}: non-finite value {x}")))
        }
        toml::Value::Table(t) => t.iter().try_for_each(|(k, v)| {
            check_finite(
                v,
                &if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                },
            )
        }),
        toml::Value::Array(a) => a
            .iter()
            .enumerate()
            .try_for_each(|(i, v)| check_finite(v, &format!("{path}[{i}]"))),
        _ => Ok(()),
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    check_finite(&toml::Value::Table(table), "")?;
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Parses and runs `kind` on a config document. Artifacts go to `out_dir`
/// or, when absent, to the `[output] dir` of the document.
pub fn run_scenario(
    kind: ScenarioKind,
    config_text: &str,
    out_dir: Option<&Path>,
) -> Result<ScenarioReport> {
    use config::*;
    match kind {
        ScenarioKind::Spectrum => execute(
            kind,
            parse::<SpectrumConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_spectrum,
        ),
        ScenarioKind::Evolve => execute(
            kind,
            parse::<EvolveConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_evolve,
        ),
        ScenarioKind::Trotter => execute(
            kind,
            parse::<TrotterConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_trotter,
        ),
        ScenarioKind::FloquetCompare => execute(
            kind,
            parse::<FloquetConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_floquet,
        ),
        ScenarioKind::Shaking => execute(
            kind,
            parse::<ShakingConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_shaking,
        ),
        ScenarioKind::Hofstadter => execute(
            kind,
            parse::<HofstadterConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_hofstadter,
        ),
        ScenarioKind::Chern => execute(
            kind,
            parse::<HofstadterConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_chern,
        ),
        ScenarioKind::Berry => execute(
            kind,
            parse::<BerryConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_berry,
        ),
        ScenarioKind::PenaltyCheck => execute(
            kind,
            parse::<PenaltyCheckConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_penalty_check,
        ),
        ScenarioKind::EquivalenceCheck => execute(
            kind,
            parse::<EquivalenceConfig>(config_text)?,
            |c| &c.output,
            out_dir,
            runs::run_equivalence,
        ),
    }
}

fn execute<C, O, R>(
    kind: ScenarioKind,
    config: C,
    output: O,
    out_dir: Option<&Path>,
    run: R,
) -> Result<ScenarioReport>
where
    C: Serialize,
    O: Fn(&C) -> &Option<OutputSection>,
    R: Fn(&C) -> Result<RunOutput>,
{
    let dir = match (out_dir, output(&config)) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(section)) => section.dir.clone(),
        (None, None) => {
            return Err(Error::Config(
                "no output directory: pass --out or set [output] dir".into(),
            ))
        }
    };
    log::info!("running scenario {kind}");
    let start = Instant::now();
    let result = run(&config)?;
    let elapsed = start.elapsed().as_secs_f64();
    log::info!("scenario {kind} computed in {elapsed:.3} s");
    let files: Vec<String> = result.tables.iter().map(|t| t.name.clone()).collect();
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let metadata = serde_json::json!({
        "scenario": kind.name(),
        "library_version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(&config).map_err(|e| Error::Config(e.to_string()))?,
        "results": result.summary,
        "files": files,
        "timing": { "compute_seconds": elapsed, "threads": rayon::current_num_threads() },
        "timestamp": timestamp,
    });
    output::write_artifacts(&dir, &result.tables, &metadata)?;
    if let Some(reason) = result.failure {
        return Err(Error::Validation(reason));
    }
    Ok(ScenarioReport {
        out_dir: dir,
        files,
        summary: result.summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.name().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!(matches!(
            "plot".parse::<ScenarioKind>(),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unknown_keys_and_nan_are_config_errors() {
        let text = "[model]\nkind = \"encoded\"\nn_sites = 4\nt = 1.0\nm = 0.5\ng2 = 1.0\nbackground = 0.0\ncolour = 1\n";
        let err = run_scenario(
            ScenarioKind::Spectrum,
            text,
            Some(Path::new("/nonexistent")),
        )
        .unwrap_err();
        assert!(
            matches!(&err, Error::Config(m) if m.contains("colour") && m.contains("line")),
            "{err}"
        );
        let text = "[model]\nkind = \"encoded\"\nn_sites = 4\nt = nan\nm = 0.5\ng2 = 1.0\nbackground = 0.0\n";
        let err = run_scenario(
            ScenarioKind::Spectrum,
            text,
            Some(Path::new("/nonexistent")),
        )
        .unwrap_err();
        assert!(
            matches!(&err, Error::Config(m) if m.contains("model.t")),
            "{err}"
        );
    }

    #[test]
    fn missing_output_directory_is_a_config_error() {
        let text = "p = 1\nq = 3\nt = 1.0\n";
        assert!(matches!(
            run_scenario(ScenarioKind::Hofstadter, text, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn output_section_is_used() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("run");
        let text = format!(
            "p = 1\nq = 3\nt = 1.0\nnk = [4, 4]\n[output]\ndir = {:?}\n",
            target.to_str().unwrap()
        );
        let report = run_scenario(ScenarioKind::Hofstadter, &text, None).unwrap();
        assert_eq!(report.out_dir, target);
        assert!(target.join("bands.csv").exists() && target.join("metadata.json").exists());
    }
}
