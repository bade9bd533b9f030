// Copyright 2026 The detector-efficiency Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The `deteff` command line.
//!
//! Exit codes: 0 on success, 1 when a check fails (invalid POVM, violated
//! bound), 2 on input errors. A `--config` JSON object may set any flag by
//! its long name (`{"eta": 0.5, "seed": 3}`); explicit flags win.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::efficiency::{cutoff_sweep, estimate_efficiency, EfficiencyOptions};
use crate::error::{Error, Result};
use crate::io::{load_povm, povm_to_string, ExperimentConfig, LoadedPovm, DIAGONAL_WRITE_TOL};
use crate::loss::{apply_loss_to_diagonal, apply_loss_to_povm, invert_loss, invert_loss_diagonal, Transmissivity};
use crate::povm::{PovmTolerances, DEFAULT_POVM_TOL};
use crate::virtual_detector::nogo_experiment;

#[derive(Debug, Parser)]
#[command(name = "deteff", version, about = "Generalized efficiency of photodetectors")]
pub struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check positivity and completeness of a POVM file.
    Validate {
        povm: PathBuf,
        #[arg(long)]
        pos_tol: Option<f64>,
        #[arg(long)]
        completeness_tol: Option<f64>,
    },
    /// Put an attenuator in front of a detector, or formally remove one.
    Loss {
        povm: PathBuf,
        #[arg(long)]
        eta: Option<f64>,
        /// Apply the formal inverse; the result may be unphysical.
        #[arg(long)]
        invert: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Estimate the generalized efficiency.
    Eff {
        povm: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        pos_tol: Option<f64>,
        /// Report the estimate for every cutoff up to the file's.
        #[arg(long)]
        cutoff_sweep: bool,
    },
    /// Effective POVM and efficiency of a virtual detector.
    Simulate {
        experiment: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monte-Carlo check of the efficiency bound.
    Nogo {
        experiment: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Flag values read from `--config`.
struct Flags(BTreeMap<String, serde_json::Value>);

impl Flags {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Flags(BTreeMap::new()));
        };
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map(Flags)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn get<T: DeserializeOwned>(&self, explicit: Option<T>, name: &str) -> Result<Option<T>> {
        if explicit.is_some() {
            return Ok(explicit);
        }
        self.0
            .get(name)
            .map(|v| serde_json::from_value(v.clone()))
            .transpose()
            .map_err(|e| Error::Config(format!("config flag '{name}': {e}")))
    }

    fn switch(&self, explicit: bool, name: &str) -> Result<bool> {
        Ok(explicit || self.get::<bool>(None, name)?.unwrap_or(false))
    }
}

/// Failure of a check, as opposed to bad input.
struct CheckFailed;

type Outcome = std::result::Result<(), CheckFailed>;

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn options(flags: &Flags, tol: Option<f64>, pos_tol: Option<f64>) -> Result<EfficiencyOptions> {
    let d = EfficiencyOptions::default();
    let o = EfficiencyOptions {
        bisection_tol: flags.get(tol, "tol")?.unwrap_or(d.bisection_tol),
        pos_tol: flags.get(pos_tol, "pos_tol")?.unwrap_or(d.pos_tol),
    };
    if !(o.bisection_tol > 0.0 && o.pos_tol > 0.0) {
        return Err(Error::Config("tolerances must be positive".into()));
    }
    Ok(o)
}

fn cmd_validate(flags: &Flags, path: &Path, pos: Option<f64>, comp: Option<f64>, out: &mut dyn Write) -> Result<Outcome> {
    let (p, _) = load_povm(path)?;
    let tol = PovmTolerances {
        positivity: flags.get(pos, "pos_tol")?.unwrap_or(DEFAULT_POVM_TOL),
        completeness: flags.get(comp, "completeness_tol")?.unwrap_or(DEFAULT_POVM_TOL),
    };
    let report = p.validate(tol);
    writeln!(out, "{report}")?;
    Ok(if report.passed() { Ok(()) } else { Err(CheckFailed) })
}

fn cmd_loss(
    flags: &Flags,
    path: &Path,
    eta: Option<f64>,
    invert: bool,
    output: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let eta = flags
        .get(eta, "eta")?
        .ok_or_else(|| Error::Config("--eta is required".into()))?;
    let eta = Transmissivity::physical(eta)?;
    let invert = flags.switch(invert, "invert")?;
    let (p, mut meta) = load_povm(path)?;
    let mapped = match (&p, invert) {
        (LoadedPovm::Diagonal(d), false) => LoadedPovm::Diagonal(apply_loss_to_diagonal(d, eta)?),
        (LoadedPovm::Diagonal(d), true) => LoadedPovm::Diagonal(invert_loss_diagonal(d, eta)?),
        (LoadedPovm::Dense(d), false) => LoadedPovm::Dense(apply_loss_to_povm(d, eta)?),
        (LoadedPovm::Dense(d), true) => LoadedPovm::Dense(invert_loss(d, eta)?),
    };
    if invert {
        meta.insert("unphysical".into(), json!(true));
        meta.insert("note".into(), json!("formal inverse of loss; may be unphysical"));
    }
    let text = povm_to_string(&mapped, meta)?;
    match flags.get(output, "output")? {
        Some(o) => fs::write(o, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Ok(()))
}

fn cmd_eff(
    flags: &Flags,
    path: &Path,
    tol: Option<f64>,
    pos_tol: Option<f64>,
    sweep: bool,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let opts = options(flags, tol, pos_tol)?;
    let (p, _) = load_povm(path)?;
    let estimate = estimate_efficiency(&p, &opts)?;
    let mut value = json!({ "estimate": estimate, "midpoint": estimate.midpoint() });
    if flags.switch(sweep, "cutoff_sweep")? {
        value["cutoff_sweep"] = serde_json::to_value(
            cutoff_sweep(&p, &opts)?
                .iter()
                .map(|e| json!({ "cutoff": e.cutoff, "lower": e.lower, "upper": e.upper }))
                .collect::<Vec<_>>(),
        )?;
    }
    write_json(out, &value)?;
    Ok(Ok(()))
}

fn cmd_simulate(flags: &Flags, path: &Path, output: Option<PathBuf>, out: &mut dyn Write) -> Result<Outcome> {
    let config = ExperimentConfig::load(path)?;
    let opts = config.tolerances.options()?;
    let detector = config.virtual_detector()?;
    let povm = detector.effective_povm()?;
    let report = povm.validate(PovmTolerances::uniform(1e-8));
    let compact = LoadedPovm::compact(&povm, DIAGONAL_WRITE_TOL);
    let text = povm_to_string(&compact, BTreeMap::new())?;
    let estimate = if report.passed() {
        Some(estimate_efficiency(&povm, &opts)?)
    } else {
        None
    };
    let mut value = json!({
        "validation": report,
        "efficiency": estimate,
        "max_nominal_efficiency": detector.max_nominal_efficiency(),
    });
    match flags.get(output, "output")? {
        Some(o) => {
            fs::write(&o, text)?;
            value["povm_file"] = json!(o);
        }
        None => value["povm"] = serde_json::from_str(&text)?,
    }
    write_json(out, &value)?;
    Ok(if report.passed() { Ok(()) } else { Err(CheckFailed) })
}

fn cmd_nogo(
    flags: &Flags,
    path: &Path,
    trials: Option<usize>,
    seed: Option<u64>,
    csv: Option<PathBuf>,
    json_path: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let config = ExperimentConfig::load(path)?.nogo(flags.get(trials, "trials")?, flags.get(seed, "seed")?)?;
    let report = nogo_experiment(&config)?;
    if let Some(p) = flags.get(csv, "csv")? {
        report.write_csv(fs::File::create(p)?)?;
    }
    let summary = report.summary();
    if let Some(p) = flags.get(json_path, "json")? {
        fs::write(p, serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    write_json(out, &summary)?;
    Ok(if report.passed() { Ok(()) } else { Err(CheckFailed) })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    let flags = Flags::load(cli.config.as_deref())?;
    match cli.command {
        Command::Validate {
            povm,
            pos_tol,
            completeness_tol,
        } => cmd_validate(&flags, &povm, pos_tol, completeness_tol, out),
        Command::Loss {
            povm,
            eta,
            invert,
            output,
        } => cmd_loss(&flags, &povm, eta, invert, output, out),
        Command::Eff {
            povm,
            tol,
            pos_tol,
            cutoff_sweep,
        } => cmd_eff(&flags, &povm, tol, pos_tol, cutoff_sweep, out),
        Command::Simulate { experiment, output } => cmd_simulate(&flags, &experiment, output, out),
        Command::Nogo {
            experiment,
            trials,
            seed,
            csv,
            json,
        } => cmd_nogo(&flags, &experiment, trials, seed, csv, json, out),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(Ok(())) => 0,
        Ok(Err(CheckFailed)) => 1,
        // An unusable detector is a failed check rather than bad input.
        Err(e @ (Error::InvalidPovm(_) | Error::InfeasibleAtUnity(_))) => {
            let _ = writeln!(err, "invalid POVM: {e}");
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            code
        }
    }
}
