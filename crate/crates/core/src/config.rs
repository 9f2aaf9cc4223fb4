//! TOML run configuration. Keys mirror the command-line flags one to one;
//! an explicit flag always beats the file, the file beats the built-in
//! defaults. `m`, `k0`, and `alpha` have no defaults and must come from the
//! file or from flags.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sim::EnsembleSpec;

pub const DEFAULT_N_NODES: usize = 100;
pub const DEFAULT_T0: f64 = 1.0;
pub const DEFAULT_M0: u64 = 0;
pub const DEFAULT_RUNS: u32 = 1;
pub const DEFAULT_MASTER_SEED: u64 = 0;
pub const DEFAULT_STEPS: u64 = 1000;
pub const DEFAULT_RECORD_EVERY: u64 = 1;

/// Raw file contents; every key optional so partial files merge cleanly.
/// Unknown keys are rejected rather than silently ignored.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n_nodes: Option<usize>,
    pub m: Option<u32>,
    pub m0: Option<u64>,
    pub k0: Option<f64>,
    pub t0: Option<f64>,
    pub alpha: Option<f64>,
    pub runs: Option<u32>,
    pub master_seed: Option<u64>,
    pub steps: Option<u64>,
    pub record_every: Option<u64>,
}

/// Values supplied as explicit flags; `None` means the flag was absent.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Overlay {
    pub n_nodes: Option<usize>,
    pub m: Option<u32>,
    pub m0: Option<u64>,
    pub k0: Option<f64>,
    pub t0: Option<f64>,
    pub alpha: Option<f64>,
    pub runs: Option<u32>,
    pub master_seed: Option<u64>,
    pub steps: Option<u64>,
    pub record_every: Option<u64>,
}

pub fn parse_file(source: &str) -> Result<FileConfig> {
    toml::from_str(source).map_err(|e| Error::Config(format!("config: {e}")))
}

fn require<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| {
        Error::Config(format!(
            "{field}: missing; set it in the config file or pass --{}",
            field.replace('_', "-")
        ))
    })
}

/// Merges flags over file over defaults and validates the result.
pub fn resolve(file: &FileConfig, flags: &Overlay) -> Result<(ModelParams, EnsembleSpec)> {
    let params = ModelParams {
        n_nodes: flags.n_nodes.or(file.n_nodes).unwrap_or(DEFAULT_N_NODES),
        m: require(flags.m.or(file.m), "m")?,
        m0: flags.m0.or(file.m0).unwrap_or(DEFAULT_M0),
        k0: require(flags.k0.or(file.k0), "k0")?,
        t0: flags.t0.or(file.t0).unwrap_or(DEFAULT_T0),
        alpha: require(flags.alpha.or(file.alpha), "alpha")?,
    };
    params.validate()?;
    let ensemble = EnsembleSpec {
        runs: flags.runs.or(file.runs).unwrap_or(DEFAULT_RUNS),
        master_seed: flags
            .master_seed
            .or(file.master_seed)
            .unwrap_or(DEFAULT_MASTER_SEED),
        steps: flags.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
        record_every: flags
            .record_every
            .or(file.record_every)
            .unwrap_or(DEFAULT_RECORD_EVERY),
    };
    ensemble.validate()?;
    Ok((params, ensemble))
}

/// Parses a complete configuration from TOML alone.
pub fn parse_config(source: &str) -> Result<(ModelParams, EnsembleSpec)> {
    resolve(&parse_file(source)?, &Overlay::default())
}

/// Renders the merged configuration with every key explicit. Feeding the
/// output back through `parse_config` reproduces the same values.
pub fn render_config(params: &ModelParams, ensemble: &EnsembleSpec) -> String {
    format!(
        "n_nodes = {}\nm = {}\nm0 = {}\nk0 = {}\nt0 = {}\nalpha = {}\nruns = {}\nmaster_seed = {}\nsteps = {}\nrecord_every = {}\n",
        params.n_nodes,
        params.m,
        params.m0,
        params.k0,
        params.t0,
        params.alpha,
        ensemble.runs,
        ensemble.master_seed,
        ensemble.steps,
        ensemble.record_every
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_fills_defaults() {
        let (params, ensemble) =
            parse_config("m = 2\nk0 = 10.0\nalpha = 4.0\n").unwrap();
        assert_eq!(params.n_nodes, 100);
        assert_eq!(params.m0, 0);
        assert_eq!(params.t0, 1.0);
        assert_eq!(ensemble.runs, 1);
        assert_eq!(ensemble.master_seed, 0);
        assert_eq!(ensemble.steps, 1000);
        assert_eq!(ensemble.record_every, 1);
    }

    #[test]
    fn missing_required_field_is_named() {
        let err = parse_config("m = 2\nk0 = 10.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha"), "{msg}");
        assert!(msg.contains("--alpha"), "{msg}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_config("m = 2\nk0 = 10.0\nalpha = 4.0\nalpa = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("alpa"), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_file("m = 2\nk0 = = 10.0\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn flags_override_file_values() {
        let file = parse_file("m = 2\nk0 = 10.0\nalpha = 4.0\nmaster_seed = 7\n").unwrap();
        let flags = Overlay {
            alpha: Some(5.0),
            master_seed: Some(11),
            ..Overlay::default()
        };
        let (params, ensemble) = resolve(&file, &flags).unwrap();
        assert_eq!(params.alpha, 5.0);
        assert_eq!(params.m, 2);
        assert_eq!(ensemble.master_seed, 11);
    }

    #[test]
    fn merged_values_are_validated() {
        let err = parse_config("m = 0\nk0 = 10.0\nalpha = 4.0\n").unwrap_err();
        assert!(err.to_string().contains('m'), "{err}");
        let err = parse_config("n_nodes = 1\nm = 1\nk0 = 10.0\nalpha = 4.0\n").unwrap_err();
        assert!(err.to_string().contains("n_nodes"), "{err}");
    }

    #[test]
    fn render_roundtrips() {
        let (params, ensemble) = parse_config(
            "n_nodes = 50\nm = 3\nm0 = 5\nk0 = 2.25\nt0 = 4.0\nalpha = 10.0\nruns = 8\nmaster_seed = 42\nsteps = 500\nrecord_every = 10\n",
        )
        .unwrap();
        let rendered = render_config(&params, &ensemble);
        let (params2, ensemble2) = parse_config(&rendered).unwrap();
        assert_eq!(params, params2);
        assert_eq!(ensemble, ensemble2);
    }
}
