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

//! Effective POVMs of virtual detectors: a beamsplitter in front of a perfect
//! detector is just loss, and ancillary light does not help.
//!
//!     cargo run --example virtual_detector

use std::collections::BTreeMap;

use detector_efficiency::fock::C64;
use detector_efficiency::virtual_detector::{
    effective_povm, Ancilla, DetectorSlot, Grouping, SlotDetector, VirtualDetectorSpec,
};
use detector_efficiency::{click_detector, estimate_efficiency, EfficiencyOptions, Interferometer};

fn main() -> detector_efficiency::Result<()> {
    let opts = EfficiencyOptions::default();

    // Beamsplitter of transmissivity 0.3, vacuum in the second port, the
    // reflected light thrown away.
    let spec = VirtualDetectorSpec {
        interferometer: Interferometer::beamsplitter(2, 0, 1, 0.3)?,
        ancilla: Ancilla::Vacuum,
        slots: vec![
            DetectorSlot::new(0, SlotDetector::Diagonal(click_detector(1.0, 6)?)),
            DetectorSlot::discard(1),
        ],
        grouping: Grouping::Table {
            entries: BTreeMap::from([
                (vec!["off".into(), "discard".into()], "off".into()),
                (vec!["on".into(), "discard".into()], "on".into()),
            ]),
            default: None,
        },
        signal_cutoff: 6,
        total_cutoff: 6,
    };
    let povm = effective_povm(&spec)?;
    let diff = povm.max_abs_diff(&click_detector(0.3, 6)?.to_povm()).unwrap();
    let est = estimate_efficiency(&povm, &opts)?;
    println!("BS(0.3) + perfect click: |P - click(0.3)| = {diff:.1e}, efficiency [{:.6}, {:.6}]", est.lower, est.upper);

    // Two imperfect detectors and a coherent-ish ancilla photon superposition.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let spec = VirtualDetectorSpec {
        interferometer: Interferometer::beamsplitter(2, 0, 1, 0.5)?,
        ancilla: Ancilla::ProductKets(vec![vec![C64::new(s, 0.0), C64::new(0.0, s)]]),
        slots: vec![
            DetectorSlot::new(0, SlotDetector::Diagonal(click_detector(0.8, 3)?)).with_nominal_efficiency(0.8),
            DetectorSlot::new(1, SlotDetector::Diagonal(click_detector(0.6, 3)?)).with_nominal_efficiency(0.6),
        ],
        grouping: Grouping::Joint,
        signal_cutoff: 2,
        total_cutoff: 3,
    };
    let povm = effective_povm(&spec)?;
    let est = estimate_efficiency(&povm, &opts)?;
    println!(
        "50:50 + ancilla, detectors 0.8 / 0.6: {} outcomes, efficiency [{:.6}, {:.6}] <= {}",
        povm.len(),
        est.lower,
        est.upper,
        spec.max_nominal_efficiency()
    );
    Ok(())
}
