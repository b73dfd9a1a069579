// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: named presets, sweeps, CSV and JSON output.

pub mod config;
pub mod preset;
pub mod run;

pub use config::{parse_config, EngineChoice, RunConfig, SweepAxis, UsageError};
pub use preset::{Physics, Preset};
pub use run::{compute, csv_string, run, RunError, Series, Written};

/// Parse, run and map failures to exit codes: 0 success, 1 numerical or I/O
/// failure, 2 usage error.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_config(argv) {
        Ok(c) => c,
        Err(UsageError::Clap(e)) => {
            let _ = e.print();
            return e.exit_code();
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    for w in &config.warnings {
        eprintln!("warning: {w}");
    }
    let outcome = match config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&config)),
            Err(e) => {
                eprintln!("error: cannot start {n} worker threads: {e}");
                return 1;
            }
        },
        None => run(&config),
    };
    match outcome {
        Ok(written) => {
            for w in &written {
                if w.series.trace.truncation_warning {
                    eprintln!("warning: Fock cutoff clamped for {}", w.csv.display());
                }
                eprintln!(
                    "wrote {} ({} rows, max epsilon {:.6}, cutoffs {:?}) and {}",
                    w.csv.display(),
                    w.series.trace.points.len(),
                    w.series.max_epsilon(),
                    w.series.trace.cutoffs,
                    w.report.display()
                );
            }
            0
        }
        Err(RunError::Usage(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
