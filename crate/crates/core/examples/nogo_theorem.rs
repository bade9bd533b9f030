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

//! Monte-Carlo search for a virtual detector that beats its physical
//! detectors, followed by a deliberately mislabeled pool that must be caught.
//!
//!     cargo run --release --example nogo_theorem

use detector_efficiency::virtual_detector::{
    nogo_experiment, AncillaChoice, DetectorKind, InterferometerChoice, NogoConfig, PoolDetector,
    VirtualDetectorTemplate,
};
use detector_efficiency::EfficiencyOptions;

fn template(pool: &[(&str, f64)], adaptive: bool) -> VirtualDetectorTemplate {
    VirtualDetectorTemplate {
        interferometer: InterferometerChoice::Haar,
        adaptive,
        ancilla: AncillaChoice::RandomJoint,
        pool: pool.iter().map(|&(id, e)| PoolDetector::new(id, DetectorKind::Random, e)).collect(),
    }
}

fn main() -> detector_efficiency::Result<()> {
    let mut config = NogoConfig {
        templates: vec![template(&[("a", 0.9)], false), template(&[("b", 0.6), ("c", 0.4)], true)],
        trials: 100,
        seed: 42,
        total_cutoff: 4,
        signal_cutoff: 2,
        ancilla_max_photons: 2,
        options: EfficiencyOptions::default(),
        random_efficiencies: false,
    };
    let report = nogo_experiment(&config)?;
    println!("{}", serde_json::to_string_pretty(&report.summary())?);

    let mut liar = template(&[("x", 0.9), ("y", 0.9)], false);
    liar.ancilla = AncillaChoice::Vacuum;
    for d in &mut liar.pool {
        d.kind = DetectorKind::Click;
        d.nominal_efficiency = Some(0.5);
    }
    config.templates = vec![liar];
    config.trials = 5;
    let caught = nogo_experiment(&config)?;
    println!("mislabeled pool: {} of {} trials violate the bound", caught.violations(), config.trials);
    Ok(())
}
