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

//! Generalized efficiency of click and photon-number-resolving detectors,
//! and how the estimate converges with the Fock cutoff.
//!
//!     cargo run --example click_detector_efficiency

use detector_efficiency::{click_detector, cutoff_sweep, estimate_efficiency, pnr_detector, EfficiencyOptions};

fn main() -> detector_efficiency::Result<()> {
    let opts = EfficiencyOptions::default();
    println!("{:>6} {:>12} {:>12} {:>8}", "eta", "lower", "upper", "probes");
    for eta in [0.3, 0.5, 0.6, 0.9] {
        let est = estimate_efficiency(&click_detector(eta, 10)?, &opts)?;
        println!(
            "{eta:>6} {:>12.8} {:>12.8} {:>8}",
            est.lower,
            est.upper,
            est.feasibility_trace.len()
        );
    }

    // A PNR detector with the same loss has the same efficiency.
    let pnr = pnr_detector(0.75, 6)?;
    let est = estimate_efficiency(&pnr, &opts)?;
    println!("\npnr(0.75): [{:.8}, {:.8}]", est.lower, est.upper);

    println!("\ncutoff sweep for pnr(0.75):");
    for e in cutoff_sweep(&pnr, &opts)? {
        println!("  n_max = {}  [{:.8}, {:.8}]", e.cutoff, e.lower, e.upper);
    }
    Ok(())
}
