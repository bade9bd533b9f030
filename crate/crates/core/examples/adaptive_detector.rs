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

//! A three-mode virtual detector whose second interferometer depends on
//! what the first measured detector saw.
//!
//!     cargo run --example adaptive_detector

use std::collections::BTreeMap;

use detector_efficiency::virtual_detector::{
    effective_povm_adaptive, AdaptiveDetectorSpec, AdaptivePolicy, AdaptiveStage, Ancilla, DetectorSlot,
    Grouping, SlotDetector,
};
use detector_efficiency::{
    click_detector, estimate_efficiency, EfficiencyOptions, Interferometer, PovmTolerances, TwoModeElement,
};

fn main() -> detector_efficiency::Result<()> {
    let initial = Interferometer::from_elements(
        3,
        &[
            TwoModeElement::Beamsplitter { modes: [0, 1], theta: 0.6 },
            TwoModeElement::Beamsplitter { modes: [1, 2], theta: 0.9 },
        ],
    )?;
    let stage = AdaptiveStage {
        modes: 2,
        table: BTreeMap::from([
            (vec!["off".to_string()], Interferometer::beamsplitter(2, 0, 1, 0.9)?),
            (vec!["on".to_string()], Interferometer::beamsplitter(2, 0, 1, 0.1)?),
        ]),
        default: None,
    };
    let effs = [0.9, 0.7, 0.5];
    let spec = AdaptiveDetectorSpec {
        policy: AdaptivePolicy { initial, stages: vec![stage] },
        ancilla: Ancilla::Vacuum,
        slots: effs
            .iter()
            .enumerate()
            .map(|(j, &e)| DetectorSlot::new(j, SlotDetector::Diagonal(click_detector(e, 4).unwrap())))
            .collect(),
        grouping: Grouping::Joint,
        signal_cutoff: 2,
        total_cutoff: 4,
    };
    let povm = effective_povm_adaptive(&spec)?;
    println!("outcomes: {:?}", povm.labels());
    println!("valid: {}", povm.validate(PovmTolerances::uniform(1e-8)).passed());
    let est = estimate_efficiency(&povm, &EfficiencyOptions::default())?;
    println!("efficiency [{:.6}, {:.6}], best physical detector {}", est.lower, est.upper, effs[0]);
    Ok(())
}
