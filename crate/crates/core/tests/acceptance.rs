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

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use detector_efficiency::fock::FockBasis;
use detector_efficiency::loss::{apply_loss_to_state, LossChannel};
use detector_efficiency::random::{haar_unitary, random_density, random_diagonal_povm, random_positive};
use detector_efficiency::virtual_detector::{
    commutation_check, effective_povm, effective_povm_adaptive, nogo_experiment, AdaptiveDetectorSpec,
    AdaptivePolicy, AdaptiveStage, Ancilla, AncillaChoice, DetectorKind, DetectorSlot, Grouping,
    InterferometerChoice, NogoConfig, PoolDetector, SlotDetector, VirtualDetectorSpec, VirtualDetectorTemplate,
};
use detector_efficiency::{
    apply_loss_to_diagonal, apply_loss_to_element, apply_loss_to_povm, click_detector, estimate_efficiency,
    invert_loss, EfficiencyOptions, Interferometer, MultiModeLoss, Transmissivity,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn t(v: f64) -> Transmissivity {
    Transmissivity::physical(v).unwrap()
}

fn click_efficiency_matches_eta() -> Outcome {
    let opts = EfficiencyOptions::default();
    let mut worst_offset = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut ok = true;
    for eta in [0.3, 0.5, 0.6, 0.9] {
        let det = click_detector(eta, 10).unwrap();
        let start = Instant::now();
        let est = estimate_efficiency(&det, &opts).unwrap();
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        worst_offset = worst_offset.max((est.midpoint() - eta).abs());
        ok &= est.brackets(eta, 1e-6) && est.width() <= 1e-6 && elapsed < Duration::from_secs(1);
    }
    outcome(
        ok,
        format!("max |midpoint - eta| = {worst_offset:.2e}, slowest {slowest:?}"),
    )
}

fn loss_composes_multiplicatively() -> Outcome {
    let grid = [0.1, 0.3, 0.5, 0.7, 0.95];
    let mut worst = 0.0f64;
    for &eta in &grid {
        for &eta2 in &grid {
            let lossy = apply_loss_to_povm(&click_detector(eta, 10).unwrap().to_povm(), t(eta2)).unwrap();
            let target = click_detector(eta * eta2, 10).unwrap().to_povm();
            worst = worst.max(lossy.max_abs_diff(&target).unwrap());
        }
    }
    let inv = invert_loss(&click_detector(0.6, 10).unwrap().to_povm(), t(0.5)).unwrap();
    let entry = inv.get("off").unwrap().matrix()[(1, 1)].re;
    let expected = 1.0 - 0.6 / 0.5;
    let inv_err = (entry - expected).abs();
    outcome(
        worst <= 1e-12 && inv_err <= 1e-12,
        format!("grid deviation {worst:.2e}; inverse off(1) = {entry:.15} (expected {expected})"),
    )
}

fn state_and_povm_maps_are_adjoint() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let basis = FockBasis::single_mode(8);
    let mut worst = 0.0f64;
    let triples = 250;
    for _ in 0..triples {
        let rho = random_density(&basis, 8, &mut rng);
        let p = random_positive(&basis, &mut rng);
        let eta = t(rng.random_range(0.01..=1.0));
        let lhs = rho.expectation(&apply_loss_to_element(&p, eta).unwrap());
        let rhs = apply_loss_to_state(&rho, eta).unwrap().expectation(&p);
        worst = worst.max((lhs - rhs).abs());
    }
    outcome(worst <= 1e-10, format!("{triples} triples, max deviation {worst:.2e}"))
}

fn closed_form_matches_kraus_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n_max = 6;
    let basis = FockBasis::single_mode(n_max);
    let mut worst = 0.0f64;
    let count = 60;
    for _ in 0..count {
        let p = random_positive(&basis, &mut rng);
        let eta = t(rng.random_range(0.01..=1.0));
        let closed = apply_loss_to_element(&p, eta).unwrap();
        let oracle = LossChannel::new(eta, n_max).unwrap().apply_to_effect(&p).unwrap();
        worst = worst.max(closed.max_abs_diff(&oracle));
    }
    let mut worst_diag = 0.0f64;
    for _ in 0..count {
        let d = random_diagonal_povm(n_max, 3, &mut rng);
        let eta = t(rng.random_range(0.01..=1.0));
        let fast = apply_loss_to_diagonal(&d, eta).unwrap().to_povm();
        let general = apply_loss_to_povm(&d.to_povm(), eta).unwrap();
        worst_diag = worst_diag.max(fast.max_abs_diff(&general).unwrap());
    }
    outcome(
        worst <= 1e-10 && worst_diag <= 1e-12,
        format!("{count} dense elements vs Kraus: {worst:.2e}; diagonal vs general: {worst_diag:.2e}"),
    )
}

fn attenuators_commute_with_interferometers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let basis = FockBasis::new(3, 4).unwrap();
    let start = Instant::now();
    let mut worst = 0.0f64;
    let count = 24;
    for _ in 0..count {
        let w = Interferometer::new(haar_unitary(3, &mut rng)).unwrap();
        let loss = MultiModeLoss::uniform(&basis, t(rng.random_range(0.05..=1.0))).unwrap();
        worst = worst.max(commutation_check(&w, &loss).unwrap());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-8 && elapsed < Duration::from_secs(30),
        format!("{count} random (W, eta): max deviation {worst:.2e} in {elapsed:?}"),
    )
}

fn nogo_config(templates: Vec<VirtualDetectorTemplate>, trials: usize, seed: u64) -> NogoConfig {
    NogoConfig {
        templates,
        trials,
        seed,
        total_cutoff: 4,
        signal_cutoff: 2,
        ancilla_max_photons: 2,
        options: EfficiencyOptions::default(),
        random_efficiencies: true,
    }
}

fn random_template(prefix: &str, adaptive: bool) -> VirtualDetectorTemplate {
    VirtualDetectorTemplate {
        interferometer: InterferometerChoice::Haar,
        adaptive,
        ancilla: AncillaChoice::RandomJoint,
        pool: (0..3)
            .map(|j| PoolDetector::new(format!("{prefix}{j}"), DetectorKind::Random, 1.0))
            .collect(),
    }
}

fn nogo_bound_holds() -> Outcome {
    let config = nogo_config(vec![random_template("a", false), random_template("b", false)], 200, 2024);
    let report = nogo_experiment(&config).unwrap();
    let (worst_trial, worst) = report.worst().unwrap();

    let mut mislabeled = random_template("m", false);
    mislabeled.ancilla = AncillaChoice::Vacuum;
    for d in &mut mislabeled.pool {
        d.kind = DetectorKind::Click;
        d.efficiency = 0.9;
        d.nominal_efficiency = Some(0.5);
    }
    let mut sensitivity = nogo_config(vec![mislabeled], 5, 7);
    sensitivity.random_efficiencies = false;
    let caught = nogo_experiment(&sensitivity).unwrap();
    outcome(
        report.passed() && report.trials.len() == 200 && caught.violations() > 0,
        format!(
            "200 trials, {} violations, worst margin {worst:.3e} (trial {worst_trial}); mislabeled pool: {} of {} trials flagged, margin {:.3}",
            report.violations(),
            caught.violations(),
            caught.trials.len(),
            caught.worst().unwrap().1
        ),
    )
}

fn adaptive_nogo_bound_holds() -> Outcome {
    let config = nogo_config(vec![random_template("a", true)], 50, 77);
    let report = nogo_experiment(&config).unwrap();
    let (_, worst) = report.worst().unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let initial = Interferometer::new(haar_unitary(3, &mut rng)).unwrap();
    let second = Interferometer::new(haar_unitary(2, &mut rng)).unwrap();
    let ancilla = Ancilla::Joint(random_density(&FockBasis::new(2, 2).unwrap(), 2, &mut rng));
    let slots: Vec<DetectorSlot> = [0.9, 0.7, 0.5]
        .iter()
        .enumerate()
        .map(|(j, &eta)| DetectorSlot::new(j, SlotDetector::Diagonal(click_detector(eta, 4).unwrap())))
        .collect();
    let adaptive = effective_povm_adaptive(&AdaptiveDetectorSpec {
        policy: AdaptivePolicy {
            initial: initial.clone(),
            stages: vec![AdaptiveStage::constant(second.clone())],
        },
        ancilla: ancilla.clone(),
        slots: slots.clone(),
        grouping: Grouping::Joint,
        signal_cutoff: 2,
        total_cutoff: 4,
    })
    .unwrap();
    let fixed = effective_povm(&VirtualDetectorSpec {
        interferometer: second.embed(3).unwrap().compose(&initial).unwrap(),
        ancilla,
        slots,
        grouping: Grouping::Joint,
        signal_cutoff: 2,
        total_cutoff: 4,
    })
    .unwrap();
    let diff = adaptive.max_abs_diff(&fixed).unwrap();
    outcome(
        report.passed() && diff <= 1e-10,
        format!(
            "50 adaptive trials, {} violations, worst margin {worst:.3e}; constant policy vs static: {diff:.2e}",
            report.violations()
        ),
    )
}

fn beamsplitter_model_is_loss() -> Outcome {
    let n = 6;
    let mut worst = 0.0f64;
    for tr in [0.25, 0.5, 0.75] {
        let spec = VirtualDetectorSpec {
            interferometer: Interferometer::beamsplitter(2, 0, 1, tr).unwrap(),
            ancilla: Ancilla::Vacuum,
            slots: vec![
                DetectorSlot::new(0, SlotDetector::Diagonal(click_detector(1.0, n).unwrap())),
                DetectorSlot::discard(1),
            ],
            grouping: Grouping::Table {
                entries: BTreeMap::from([
                    (vec!["off".into(), "discard".into()], "off".into()),
                    (vec!["on".into(), "discard".into()], "on".into()),
                ]),
                default: None,
            },
            signal_cutoff: n,
            total_cutoff: n,
        };
        let povm = effective_povm(&spec).unwrap();
        worst = worst.max(povm.max_abs_diff(&click_detector(tr, n).unwrap().to_povm()).unwrap());
    }
    outcome(worst <= 1e-10, format!("max deviation from click(T): {worst:.2e}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("click detector efficiency equals eta", click_efficiency_matches_eta),
        ("loss composes; inverse has negative entry", loss_composes_multiplicatively),
        ("state and POVM loss maps are adjoint", state_and_povm_maps_are_adjoint),
        ("closed-form loss matches Kraus oracle", closed_form_matches_kraus_oracle),
        ("attenuators commute with interferometers", attenuators_commute_with_interferometers),
        ("virtual detectors never beat the best physical one", nogo_bound_holds),
        ("bound holds for adaptive virtual detectors", adaptive_nogo_bound_holds),
        ("beamsplitter + perfect click reproduces click(T)", beamsplitter_model_is_loss),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!(
            "criterion {}: {} - {name} ({}; {:.2?})",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
