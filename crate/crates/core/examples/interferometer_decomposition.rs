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

//! Factor a random interferometer into beamsplitters and phase shifters.
//!
//!     cargo run --example interferometer_decomposition

use detector_efficiency::fock::max_abs_diff;
use detector_efficiency::random::haar_unitary;
use detector_efficiency::{decompose, Interferometer, TwoModeElement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> detector_efficiency::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = Interferometer::new(haar_unitary(4, &mut rng))?;
    let d = decompose(&w);
    for e in &d.elements {
        match e {
            TwoModeElement::Beamsplitter { modes, theta } => {
                println!("BS  {modes:?}  theta = {theta:.6}  T = {:.6}", theta.cos().powi(2))
            }
            TwoModeElement::Phase { mode, phi } => println!("PS  [{mode}]     phi = {phi:.6}"),
        }
    }
    println!("output phases: {:?}", d.output_phases.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>());
    println!("reconstruction error: {:.2e}", max_abs_diff(&d.recompose(), w.matrix()));
    Ok(())
}
