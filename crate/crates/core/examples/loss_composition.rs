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

//! Attenuators compose multiplicatively; removing more loss than a detector
//! has yields a POVM with negative entries.
//!
//!     cargo run --example loss_composition

use detector_efficiency::{
    apply_loss_to_diagonal, click_detector, invert_loss_diagonal, PovmTolerances, Transmissivity,
};

fn main() -> detector_efficiency::Result<()> {
    let det = click_detector(0.8, 5)?;
    let lossy = apply_loss_to_diagonal(&det, Transmissivity::physical(0.5)?)?;
    let diff = lossy.max_abs_diff(&click_detector(0.4, 5)?).unwrap();
    println!("click(0.8) behind a 0.5 attenuator vs click(0.4): {diff:.2e}");

    let c = click_detector(0.6, 5)?;
    let inv = invert_loss_diagonal(&c, Transmissivity::physical(0.5)?)?;
    println!("\nremoving eta = 0.5 from click(0.6):");
    for (label, d) in inv.outcomes() {
        let row: Vec<String> = d.iter().map(|x| format!("{x:+.4}")).collect();
        println!("  {label:>4}: {}", row.join(" "));
    }
    let report = inv.validate(PovmTolerances::default());
    println!("valid POVM: {}  (min eigenvalue {:+.4})", report.passed(), report.min_eigenvalue());
    Ok(())
}
