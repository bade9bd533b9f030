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

//! Monte-Carlo harness for the efficiency bound on virtual detectors.
//!
//! Every trial instantiates each template with random ingredients, computes
//! the effective POVMs and their efficiency brackets, and compares the
//! sorted virtual efficiencies (upper brackets, the pessimistic side) with
//! the sorted per-detector maxima of the physical efficiencies. Physical
//! detectors are built as `F_eta` applied to an ideal detector, so their
//! efficiency is known by construction.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::efficiency::{estimate_efficiency, EfficiencyOptions};
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::interferometer::Interferometer;
use crate::loss::{apply_loss_to_diagonal, Transmissivity};
use crate::povm::{click_detector, pnr_detector};
use crate::random::{haar_unitary, random_density, random_ideal_partition, random_ket};

use super::{
    effective_povm, effective_povm_adaptive, mixed_radix, AdaptiveDetectorSpec, AdaptivePolicy, AdaptiveStage,
    Ancilla, DetectorSlot, Grouping, SlotDetector, VirtualDetectorSpec, DISCARD_LABEL,
};

/// How a pool detector is built in each trial.
#[derive(Clone, Debug)]
pub enum DetectorKind {
    Click,
    PhotonNumberResolving,
    /// `F_eta` applied to a random photon-number partition.
    RandomDiagonal { outcomes: usize },
    /// One of the above, drawn per trial.
    Random,
    /// A fixed detector; its efficiency is whatever the pool entry claims.
    Fixed(SlotDetector),
}

#[derive(Clone, Debug)]
pub struct PoolDetector {
    /// Identifier; ids must be unique across all templates.
    pub id: String,
    pub kind: DetectorKind,
    /// Efficiency used to build the detector.
    pub efficiency: f64,
    /// Efficiency the bound is checked against; defaults to `efficiency`.
    pub nominal_efficiency: Option<f64>,
}

impl PoolDetector {
    pub fn new(id: impl Into<String>, kind: DetectorKind, efficiency: f64) -> Self {
        PoolDetector {
            id: id.into(),
            kind,
            efficiency,
            nominal_efficiency: None,
        }
    }

    pub fn reported_efficiency(&self) -> f64 {
        self.nominal_efficiency.unwrap_or(self.efficiency)
    }
}

#[derive(Clone, Debug)]
pub enum InterferometerChoice {
    Haar,
    Fixed(Interferometer),
}

#[derive(Clone, Debug)]
pub enum AncillaChoice {
    Vacuum,
    /// Random ket per ancillary mode.
    RandomProduct,
    /// Random mixed state on all ancillary modes.
    RandomJoint,
    Fixed(Ancilla),
}

#[derive(Clone, Debug)]
pub struct VirtualDetectorTemplate {
    pub interferometer: InterferometerChoice,
    /// Draw a fresh Haar unitary for every stage and every history.
    pub adaptive: bool,
    pub ancilla: AncillaChoice,
    /// Detector on output mode `j` is `pool[j]`; the template has
    /// `pool.len()` modes.
    pub pool: Vec<PoolDetector>,
}

impl VirtualDetectorTemplate {
    pub fn modes(&self) -> usize {
        self.pool.len()
    }

    pub fn max_efficiency(&self) -> f64 {
        self.pool.iter().map(PoolDetector::reported_efficiency).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct NogoConfig {
    pub templates: Vec<VirtualDetectorTemplate>,
    pub trials: usize,
    pub seed: u64,
    pub total_cutoff: usize,
    pub signal_cutoff: usize,
    pub ancilla_max_photons: usize,
    pub options: EfficiencyOptions,
    /// Replace every non-fixed pool efficiency with a uniform draw from
    /// `[0.05, 1]` in each trial.
    pub random_efficiencies: bool,
}

impl NogoConfig {
    /// `2 * bisection_tol + 1e-6`.
    pub fn slack(&self) -> f64 {
        2.0 * self.options.bisection_tol + 1e-6
    }

    fn check(&self) -> Result<()> {
        if self.templates.is_empty() {
            return Err(Error::Config("no virtual detectors".into()));
        }
        if self.signal_cutoff == 0 || self.signal_cutoff + self.ancilla_max_photons > self.total_cutoff {
            return Err(Error::Config(format!(
                "signal cutoff {} plus ancilla photons {} must be positive and fit the joint cutoff {}",
                self.signal_cutoff, self.ancilla_max_photons, self.total_cutoff
            )));
        }
        let mut ids = BTreeSet::new();
        for t in &self.templates {
            if t.pool.is_empty() {
                return Err(Error::Config("virtual detector with an empty pool".into()));
            }
            if t.adaptive && t.modes() < 2 {
                return Err(Error::Config("adaptive virtual detectors need two modes".into()));
            }
            if let InterferometerChoice::Fixed(w) = &t.interferometer {
                if w.modes() != t.modes() {
                    return Err(Error::Config(format!(
                        "{}-mode interferometer for a pool of {}",
                        w.modes(),
                        t.modes()
                    )));
                }
            }
            for d in &t.pool {
                if !ids.insert(d.id.clone()) {
                    return Err(Error::SharedDetector(d.id.clone()));
                }
                if !(d.efficiency > 0.0 && d.efficiency <= 1.0) {
                    return Err(Error::InvalidTransmissivity {
                        value: d.efficiency,
                        expected: "(0, 1]",
                    });
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one virtual detector in one trial.
#[derive(Clone, Debug, Serialize)]
pub struct VirtualOutcome {
    /// Efficiencies of the pool as used for the bound.
    pub pool: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub detectors: Vec<VirtualOutcome>,
    /// Per-detector maxima, sorted non-increasing.
    pub bound: Vec<f64>,
    /// Upper brackets, sorted non-increasing.
    pub virtual_sorted: Vec<f64>,
    /// `min_i (bound_i - virtual_sorted_i)`.
    pub margin: f64,
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NogoReport {
    pub seed: u64,
    pub slack: f64,
    pub trials: Vec<TrialRecord>,
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
struct CsvRow {
    trial: usize,
    pool_efficiencies: String,
    bound: String,
    virtual_lower: String,
    virtual_upper: String,
    margin: f64,
    violation: bool,
}

impl NogoReport {
    pub fn violations(&self) -> usize {
        self.trials.iter().filter(|t| t.violation).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    /// Smallest margin and the trial it occurred in.
    pub fn worst(&self) -> Option<(usize, f64)> {
        self.trials
            .iter()
            .map(|t| (t.trial, t.margin))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// One row per trial. Lists are `;`-separated; pools of different
    /// virtual detectors are separated by `|`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for t in &self.trials {
            out.serialize(CsvRow {
                trial: t.trial,
                pool_efficiencies: t.detectors.iter().map(|d| fmt_list(&d.pool)).collect::<Vec<_>>().join("|"),
                bound: fmt_list(&t.bound),
                virtual_lower: fmt_list(&t.detectors.iter().map(|d| d.lower).collect::<Vec<_>>()),
                virtual_upper: fmt_list(&t.detectors.iter().map(|d| d.upper).collect::<Vec<_>>()),
                margin: t.margin,
                violation: t.violation,
            })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> serde_json::Value {
        let worst = self.worst();
        serde_json::json!({
            "trials": self.trials.len(),
            "seed": self.seed,
            "slack": self.slack,
            "violations": self.violations(),
            "worst_margin": worst.map(|w| w.1),
            "worst_trial": worst.map(|w| w.0),
            "passed": self.passed(),
        })
    }
}

fn build_detector(
    d: &PoolDetector,
    eta: f64,
    n_max: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SlotDetector> {
    let kind = match &d.kind {
        DetectorKind::Random => match rng.random_range(0..3) {
            0 => DetectorKind::Click,
            1 => DetectorKind::PhotonNumberResolving,
            _ => DetectorKind::RandomDiagonal {
                outcomes: rng.random_range(2..=4),
            },
        },
        k => k.clone(),
    };
    Ok(match kind {
        DetectorKind::Click => SlotDetector::Diagonal(click_detector(eta, n_max)?),
        DetectorKind::PhotonNumberResolving => SlotDetector::Diagonal(pnr_detector(eta, n_max)?),
        DetectorKind::RandomDiagonal { outcomes } => {
            let ideal = random_ideal_partition(n_max, outcomes, rng);
            SlotDetector::Diagonal(apply_loss_to_diagonal(&ideal, Transmissivity::physical(eta)?)?)
        }
        DetectorKind::Fixed(s) => s,
        DetectorKind::Random => unreachable!("resolved above"),
    })
}

fn slot_labels(d: &SlotDetector) -> Vec<String> {
    match d {
        SlotDetector::Dense(p) => p.labels().to_vec(),
        SlotDetector::Diagonal(p) => p.labels().to_vec(),
        SlotDetector::Discard => vec![DISCARD_LABEL.to_string()],
    }
}

fn haar(m: usize, rng: &mut ChaCha8Rng) -> Interferometer {
    Interferometer::new(haar_unitary(m, rng)).expect("Haar unitaries are unitary")
}

fn draw_ancilla(choice: &AncillaChoice, modes: usize, max_photons: usize, rng: &mut ChaCha8Rng) -> Result<Ancilla> {
    if modes == 0 {
        return Ok(Ancilla::Vacuum);
    }
    Ok(match choice {
        AncillaChoice::Vacuum => Ancilla::Vacuum,
        AncillaChoice::RandomProduct => {
            let per_mode = max_photons / modes;
            let single = FockBasis::single_mode(per_mode);
            Ancilla::ProductKets((0..modes).map(|_| random_ket(&single, per_mode, rng)).collect())
        }
        AncillaChoice::RandomJoint => {
            let basis = FockBasis::new(modes, max_photons)?;
            Ancilla::Joint(random_density(&basis, max_photons, rng))
        }
        AncillaChoice::Fixed(a) => a.clone(),
    })
}

/// Random adaptive policy: a fresh Haar unitary for every stage and every
/// reachable history.
fn random_policy(m: usize, labels: &[Vec<String>], rng: &mut ChaCha8Rng) -> AdaptivePolicy {
    let initial = haar(m, rng);
    let stages = (0..m.saturating_sub(2))
        .map(|i| {
            let k = m - 1 - i;
            // History so far: outcomes of modes m-1 down to m-1-i.
            let radix: Vec<usize> = (0..=i).map(|s| labels[m - 1 - s].len()).collect();
            let table = mixed_radix(radix)
                .map(|choice| {
                    let h: Vec<String> = choice
                        .iter()
                        .enumerate()
                        .map(|(s, &c)| labels[m - 1 - s][c].clone())
                        .collect();
                    (h, haar(k, rng))
                })
                .collect();
            AdaptiveStage {
                modes: k,
                table,
                default: None,
            }
        })
        .collect();
    AdaptivePolicy { initial, stages }
}

fn run_template(
    t: &VirtualDetectorTemplate,
    config: &NogoConfig,
    rng: &mut ChaCha8Rng,
) -> Result<VirtualOutcome> {
    let m = t.modes();
    let n = config.total_cutoff;
    let mut pool = Vec::with_capacity(m);
    let mut slots = Vec::with_capacity(m);
    for (mode, d) in t.pool.iter().enumerate() {
        let fixed = matches!(d.kind, DetectorKind::Fixed(_));
        let eta = if config.random_efficiencies && !fixed {
            rng.random_range(0.05..=1.0)
        } else {
            d.efficiency
        };
        let reported = if config.random_efficiencies && !fixed {
            eta
        } else {
            d.reported_efficiency()
        };
        pool.push(reported);
        slots.push(DetectorSlot::new(mode, build_detector(d, eta, n, rng)?).with_nominal_efficiency(reported));
    }
    let ancilla = draw_ancilla(&t.ancilla, m - 1, config.ancilla_max_photons, rng)?;

    let povm = if t.adaptive {
        let labels: Vec<Vec<String>> = slots.iter().map(|s| slot_labels(&s.detector)).collect();
        let policy = match &t.interferometer {
            InterferometerChoice::Haar => random_policy(m, &labels, rng),
            InterferometerChoice::Fixed(w) => {
                let mut p = random_policy(m, &labels, rng);
                p.initial = w.clone();
                p
            }
        };
        effective_povm_adaptive(&AdaptiveDetectorSpec {
            policy,
            ancilla,
            slots,
            grouping: Grouping::Joint,
            signal_cutoff: config.signal_cutoff,
            total_cutoff: n,
        })?
    } else {
        let interferometer = match &t.interferometer {
            InterferometerChoice::Haar => haar(m, rng),
            InterferometerChoice::Fixed(w) => w.clone(),
        };
        effective_povm(&VirtualDetectorSpec {
            interferometer,
            ancilla,
            slots,
            grouping: Grouping::Joint,
            signal_cutoff: config.signal_cutoff,
            total_cutoff: n,
        })?
    };
    let est = estimate_efficiency(&povm, &config.options)?;
    Ok(VirtualOutcome {
        pool,
        lower: est.lower,
        upper: est.upper,
    })
}

/// Runs one trial; randomness depends only on `(seed, trial)`.
pub fn run_trial(config: &NogoConfig, trial: usize) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let detectors = config
        .templates
        .iter()
        .map(|t| run_template(t, config, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let bound = sorted_desc(detectors.iter().map(|d| d.pool.iter().copied().fold(0.0, f64::max)).collect());
    let virtual_sorted = sorted_desc(detectors.iter().map(|d| d.upper).collect());
    let margin = bound
        .iter()
        .zip(&virtual_sorted)
        .map(|(b, v)| b - v)
        .fold(f64::INFINITY, f64::min);
    Ok(TrialRecord {
        trial,
        detectors,
        bound,
        virtual_sorted,
        margin,
        violation: margin < -config.slack(),
    })
}

/// Runs all trials in parallel; the report is ordered by trial index.
pub fn nogo_experiment(config: &NogoConfig) -> Result<NogoReport> {
    config.check()?;
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(NogoReport {
        seed: config.seed,
        slack: config.slack(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(templates: Vec<VirtualDetectorTemplate>, trials: usize) -> NogoConfig {
        NogoConfig {
            templates,
            trials,
            seed: 11,
            total_cutoff: 4,
            signal_cutoff: 2,
            ancilla_max_photons: 2,
            options: EfficiencyOptions::default(),
            random_efficiencies: false,
        }
    }

    fn template(effs: &[(&str, f64)]) -> VirtualDetectorTemplate {
        VirtualDetectorTemplate {
            interferometer: InterferometerChoice::Haar,
            adaptive: false,
            ancilla: AncillaChoice::RandomJoint,
            pool: effs
                .iter()
                .map(|&(id, e)| PoolDetector::new(id, DetectorKind::Random, e))
                .collect(),
        }
    }

    #[test]
    fn bound_holds_for_a_small_pool() {
        let report = nogo_experiment(&config(vec![template(&[("a", 0.8), ("b", 0.3)])], 12)).unwrap();
        assert!(report.passed(), "{:?}", report.worst());
        assert!(report.trials.iter().all(|t| t.detectors[0].upper <= 0.8 + report.slack));
    }

    #[test]
    fn shared_ids_are_rejected() {
        let c = config(vec![template(&[("a", 0.8)]), template(&[("a", 0.5)])], 1);
        assert!(matches!(nogo_experiment(&c), Err(Error::SharedDetector(id)) if id == "a"));
    }

    #[test]
    fn reruns_are_identical() {
        let c = config(vec![template(&[("a", 0.9)]), template(&[("b", 0.6), ("c", 0.4)])], 4);
        let mut x = Vec::new();
        let mut y = Vec::new();
        nogo_experiment(&c).unwrap().write_csv(&mut x).unwrap();
        nogo_experiment(&c).unwrap().write_csv(&mut y).unwrap();
        assert_eq!(x, y);
        assert_eq!(String::from_utf8(x).unwrap().lines().count(), 5);
    }

    #[test]
    fn mislabeled_detectors_are_caught() {
        let mut t = template(&[("a", 0.9), ("b", 0.9), ("c", 0.9)]);
        t.ancilla = AncillaChoice::Vacuum;
        for d in &mut t.pool {
            d.kind = DetectorKind::Click;
            d.nominal_efficiency = Some(0.5);
        }
        let report = nogo_experiment(&config(vec![t], 3)).unwrap();
        assert_eq!(report.violations(), 3);
    }
}
