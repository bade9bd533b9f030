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

//! Equal loss on every mode can be moved from after an interferometer to
//! before it.
//!
//!     cargo run --example attenuator_commutation

use detector_efficiency::fock::FockBasis;
use detector_efficiency::random::haar_unitary;
use detector_efficiency::virtual_detector::commutation_check;
use detector_efficiency::{Interferometer, MultiModeLoss, Transmissivity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> detector_efficiency::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let basis = FockBasis::new(3, 4)?;
    let w = Interferometer::new(haar_unitary(3, &mut rng))?;
    for eta in [0.2, 0.6, 1.0] {
        let loss = MultiModeLoss::uniform(&basis, Transmissivity::physical(eta)?)?;
        println!("uniform eta = {eta}: deviation {:.2e}", commutation_check(&w, &loss)?);
    }
    let etas = [0.9, 0.5, 0.2].map(|e| Transmissivity::physical(e).unwrap());
    let loss = MultiModeLoss::per_mode(&basis, &etas)?;
    println!("unequal losses:   deviation {:.2e}", commutation_check(&w, &loss)?);
    Ok(())
}
