// SPDX-License-Identifier: Apache-2.0

//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use twophoton_core::{AtomPreparation, ModelParams};

use crate::preset::{Physics, Preset};

pub const DEFAULT_GT_MAX: f64 = 25.0;
pub const DEFAULT_GT_STEPS: usize = 500;
pub const DEFAULT_OUTPUT: &str = "negativity.csv";

#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("invalid {field}: {reason}")]
    Field { field: String, reason: String },
    #[error("cannot read config file {path}: {source}")]
    ConfigIo { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    ConfigSyntax { path: PathBuf, line: usize, reason: String },
}

fn field(field: impl Into<String>, reason: impl Into<String>) -> UsageError {
    UsageError::Field { field: field.into(), reason: reason.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Numeric,
    Analytic,
    /// Numeric values plus the per-point analytic disagreement.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Dipole coupling ratio.
    Alpha,
    /// Mean photon number, applied to both modes.
    Nbar,
    /// Relative phase phi1 - phi2 (units of pi), varying phi1.
    Dphi,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Nbar => "nbar",
            SweepAxis::Dphi => "dphi",
        }
    }
}

/// Decimal or `p/q` number.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
            let q: f64 = q.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
            p / q
        }
        None => s.parse().map_err(|e| format!("{s:?}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not a finite number"))
    }
}

/// Two-photon Tavis-Cummings negativity time series.
///
/// Angles (theta, phi, dphi) are in units of pi and accept fractions such as
/// 1/6. Without a preset the physics defaults to alpha 0.1, nbar 0.01 in both
/// modes and the |+,-> preparation. Flags override values from --config.
#[derive(Parser, Debug, Default, Clone)]
#[command(name = "twophoton", version, allow_negative_numbers = true)]
pub struct Args {
    /// Named parameter set; overrides the physics flags.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Dipole coupling over field coupling, >= 0.
    #[arg(long, value_parser = parse_number)]
    pub alpha: Option<f64>,
    /// Mean thermal photon number of mode 1.
    #[arg(long, value_parser = parse_number)]
    pub nbar1: Option<f64>,
    /// Mean thermal photon number of mode 2.
    #[arg(long, value_parser = parse_number)]
    pub nbar2: Option<f64>,
    /// Atom 1 amplitude angle (units of pi).
    #[arg(long, value_parser = parse_number)]
    pub theta1: Option<f64>,
    /// Atom 2 amplitude angle (units of pi).
    #[arg(long, value_parser = parse_number)]
    pub theta2: Option<f64>,
    /// Atom 1 phase (units of pi).
    #[arg(long, value_parser = parse_number)]
    pub phi1: Option<f64>,
    /// Atom 2 phase (units of pi).
    #[arg(long, value_parser = parse_number)]
    pub phi2: Option<f64>,
    /// Largest gt of the uniform grid [default: 25].
    #[arg(long, value_parser = parse_number)]
    pub gt_max: Option<f64>,
    /// Grid points, both ends included [default: 500].
    #[arg(long)]
    pub gt_steps: Option<usize>,
    /// Propagator path [default: numeric].
    #[arg(long, value_enum)]
    pub engine: Option<EngineChoice>,
    /// Thermal weight tail allowed per mode [default: 1e-8].
    #[arg(long, value_parser = parse_number)]
    pub cutoff_tail: Option<f64>,
    /// Hard cap on the per-mode Fock cutoff [default: 2048].
    #[arg(long)]
    pub cutoff_cap: Option<u32>,
    /// Parameter to sweep; one CSV per value.
    #[arg(long, value_enum, requires = "sweep_values")]
    pub sweep: Option<SweepAxis>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', requires = "sweep")]
    pub sweep_values: Option<Vec<String>>,
    /// CSV path [default: negativity.csv].
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON report path [default: CSV path with .report.json].
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Compare the printed closed-form elements with the engine.
    #[arg(long)]
    pub appendix_check: bool,
    /// key=value file using the flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Args {
    /// `self` wins; `other` fills the gaps.
    fn or(self, other: Args) -> Args {
        Args {
            preset: self.preset.or(other.preset),
            alpha: self.alpha.or(other.alpha),
            nbar1: self.nbar1.or(other.nbar1),
            nbar2: self.nbar2.or(other.nbar2),
            theta1: self.theta1.or(other.theta1),
            theta2: self.theta2.or(other.theta2),
            phi1: self.phi1.or(other.phi1),
            phi2: self.phi2.or(other.phi2),
            gt_max: self.gt_max.or(other.gt_max),
            gt_steps: self.gt_steps.or(other.gt_steps),
            engine: self.engine.or(other.engine),
            cutoff_tail: self.cutoff_tail.or(other.cutoff_tail),
            cutoff_cap: self.cutoff_cap.or(other.cutoff_cap),
            sweep: self.sweep.or(other.sweep),
            sweep_values: self.sweep_values.or(other.sweep_values),
            output: self.output.or(other.output),
            report: self.report.or(other.report),
            appendix_check: self.appendix_check || other.appendix_check,
            config: self.config,
            threads: self.threads.or(other.threads),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    /// As given, used in file names.
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    /// Angles in units of pi.
    pub physics: Physics,
    pub cutoff_tail: f64,
    pub cutoff_cap: u32,
    pub gt_max: f64,
    pub gt_steps: usize,
    pub engine: EngineChoice,
    pub sweep: Option<Sweep>,
    pub output: PathBuf,
    /// Explicit report path; otherwise beside each CSV.
    pub report: Option<PathBuf>,
    pub appendix_check: bool,
    pub threads: Option<usize>,
    /// Flags ignored because a preset fixes them.
    pub warnings: Vec<String>,
}

impl RunConfig {
    /// Model parameters and preparation for one physics point.
    pub fn model(&self, physics: &Physics) -> Result<(ModelParams, AtomPreparation), UsageError> {
        let params = ModelParams::new(physics.alpha, physics.nbar1, physics.nbar2)
            .and_then(|p| p.with_cutoff(self.cutoff_tail, self.cutoff_cap))
            .map_err(core_usage)?;
        let prep = AtomPreparation::new(physics.theta1 * PI, physics.phi1 * PI, physics.theta2 * PI, physics.phi2 * PI)
            .map_err(core_usage)?;
        Ok((params, prep))
    }

    /// Every physics point to run, with its sweep label.
    pub fn points(&self) -> Vec<(Option<String>, Physics)> {
        let Some(sweep) = &self.sweep else {
            return vec![(None, self.physics)];
        };
        sweep
            .labels
            .iter()
            .zip(&sweep.values)
            .map(|(label, &v)| {
                let mut p = self.physics;
                match sweep.axis {
                    SweepAxis::Alpha => p.alpha = v,
                    SweepAxis::Nbar => {
                        p.nbar1 = v;
                        p.nbar2 = v;
                    }
                    SweepAxis::Dphi => p.phi1 = p.phi2 + v,
                }
                (Some(label.clone()), p)
            })
            .collect()
    }
}

fn core_usage(e: twophoton_core::Error) -> UsageError {
    match e {
        twophoton_core::Error::InvalidParameter { field: f, reason } => field(f.replace('_', "-"), reason),
        other => field("parameters", other.to_string()),
    }
}

/// Parse `argv` (program name first), merging `--config` if given.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let args = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|source| UsageError::ConfigIo { path: path.clone(), source })?;
            let file = parse_config_text(&text, path)?;
            args.or(file)
        }
        None => args,
    };
    resolve(args)
}

/// Flat `key = value` text; `#` starts a comment.
pub fn parse_config_text(text: &str, path: &Path) -> Result<Args, UsageError> {
    let mut argv = vec!["twophoton".to_string()];
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: String| UsageError::ConfigSyntax { path: path.to_path_buf(), line: k + 1, reason };
        let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected key = value".into()))?;
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        match key {
            "config" => return Err(syntax("config files cannot include other config files".into())),
            "appendix-check" => match value {
                "true" => argv.push("--appendix-check".into()),
                "false" => {}
                _ => return Err(syntax(format!("appendix-check must be true or false, got {value:?}"))),
            },
            _ => {
                argv.push(format!("--{key}"));
                argv.push(value.to_string());
            }
        }
    }
    Args::try_parse_from(argv).map_err(|e| UsageError::ConfigSyntax {
        path: path.to_path_buf(),
        line: 0,
        reason: e.render().to_string().lines().next().unwrap_or("").to_string(),
    })
}

fn resolve(args: Args) -> Result<RunConfig, UsageError> {
    let mut warnings = Vec::new();
    let defaults = Preset::Fig1a.physics();
    let physics = match args.preset {
        Some(preset) => {
            let set = [
                ("alpha", args.alpha),
                ("nbar1", args.nbar1),
                ("nbar2", args.nbar2),
                ("theta1", args.theta1),
                ("theta2", args.theta2),
                ("phi1", args.phi1),
                ("phi2", args.phi2),
            ];
            for (name, v) in set {
                if v.is_some() {
                    warnings.push(format!("--preset {} fixes {name}; --{name} ignored", preset.name()));
                }
            }
            preset.physics()
        }
        None => Physics {
            alpha: args.alpha.unwrap_or(defaults.alpha),
            nbar1: args.nbar1.unwrap_or(defaults.nbar1),
            nbar2: args.nbar2.unwrap_or(defaults.nbar2),
            theta1: args.theta1.unwrap_or(defaults.theta1),
            phi1: args.phi1.unwrap_or(defaults.phi1),
            theta2: args.theta2.unwrap_or(defaults.theta2),
            phi2: args.phi2.unwrap_or(defaults.phi2),
        },
    };

    let gt_max = args.gt_max.unwrap_or(DEFAULT_GT_MAX);
    if !(gt_max > 0.0) {
        return Err(field("gt-max", format!("must be > 0, got {gt_max}")));
    }
    let gt_steps = args.gt_steps.unwrap_or(DEFAULT_GT_STEPS);
    if gt_steps < 1 {
        return Err(field("gt-steps", "must be >= 1"));
    }
    if args.threads == Some(0) {
        return Err(field("threads", "must be >= 1"));
    }

    let sweep = match (args.sweep, args.sweep_values) {
        (Some(axis), Some(tokens)) => {
            let labels: Vec<String> = tokens.iter().map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect();
            if labels.is_empty() {
                return Err(field("sweep-values", "no values given"));
            }
            let values = labels
                .iter()
                .map(|t| parse_number(t).map_err(|r| field("sweep-values", r)))
                .collect::<Result<Vec<_>, _>>()?;
            Some(Sweep { axis, labels, values })
        }
        _ => None,
    };

    let output = args.output.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let config = RunConfig {
        preset: args.preset,
        physics,
        cutoff_tail: args.cutoff_tail.unwrap_or(twophoton_core::model::DEFAULT_CUTOFF_TAIL),
        cutoff_cap: args.cutoff_cap.unwrap_or(twophoton_core::model::DEFAULT_CUTOFF_CAP),
        gt_max,
        gt_steps,
        engine: args.engine.unwrap_or(EngineChoice::Numeric),
        sweep,
        output,
        report: args.report,
        appendix_check: args.appendix_check,
        threads: args.threads,
        warnings,
    };
    for (_, p) in config.points() {
        config.model(&p)?;
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig, UsageError> {
        parse_config(std::iter::once("twophoton").chain(s.split_whitespace()))
    }

    #[test]
    fn fig1a_preset() {
        let c = parse("--preset fig1a --gt-max 25 --gt-steps 500").unwrap();
        let (params, prep) = c.model(&c.physics).unwrap();
        assert_eq!((params.alpha, params.nbar1, params.nbar2), (0.1, 0.01, 0.01));
        assert_eq!((prep.theta1, prep.theta2), (0.0, PI / 2.0));
        assert_eq!(c.gt_steps, 500);
    }

    #[test]
    fn fig3b_preset() {
        let c = parse("--preset fig3b").unwrap();
        let (params, prep) = c.model(&c.physics).unwrap();
        assert_eq!((params.alpha, params.nbar1, params.nbar2), (0.1, 40.0, 40.0));
        assert_eq!((prep.theta1, prep.phi1, prep.theta2, prep.phi2), (PI / 4.0, 0.0, PI / 4.0, PI));
    }

    #[test]
    fn negative_alpha_is_a_usage_error() {
        match parse("--alpha -1") {
            Err(UsageError::Field { field, .. }) => assert_eq!(field, "alpha"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn preset_wins_with_warning() {
        let c = parse("--preset fig2a --alpha 5").unwrap();
        assert_eq!(c.physics.alpha, 0.1);
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn fractions_and_sweeps() {
        let c = parse("--preset fig2a --sweep dphi --sweep-values 0,1/6,1").unwrap();
        let pts = c.points();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1].1.phi1, 1.0 / 6.0);
        assert_eq!(pts[2].0.as_deref(), Some("1"));
        assert!(parse("--sweep alpha").is_err());
        assert!(parse("--sweep nbar --sweep-values 0.1,-2").is_err());
    }

    #[test]
    fn bad_grid() {
        assert!(matches!(parse("--gt-max 0"), Err(UsageError::Field { .. })));
        assert!(matches!(parse("--gt-steps 0"), Err(UsageError::Field { .. })));
        assert!(matches!(parse("--cutoff-tail 0.5"), Err(UsageError::Field { .. })));
    }

    #[test]
    fn config_file_fills_gaps_and_flags_win() {
        let text = "# sweep setup\nalpha = 0.3\nnbar1=0.2 # comment\nappendix-check = true\ngt-steps = 11\n";
        let file = parse_config_text(text, Path::new("x.cfg")).unwrap();
        let flags = Args::try_parse_from(["twophoton", "--alpha", "0.5"]).unwrap();
        let c = resolve(flags.or(file)).unwrap();
        assert_eq!(c.physics.alpha, 0.5);
        assert_eq!(c.physics.nbar1, 0.2);
        assert_eq!(c.gt_steps, 11);
        assert!(c.appendix_check);
    }

    #[test]
    fn config_file_errors_name_the_line() {
        match parse_config_text("alpha 0.3\n", Path::new("x.cfg")) {
            Err(UsageError::ConfigSyntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        assert!(parse_config_text("bogus = 1\n", Path::new("x.cfg")).is_err());
        assert!(parse_config_text("config = y\n", Path::new("x.cfg")).is_err());
    }
}
