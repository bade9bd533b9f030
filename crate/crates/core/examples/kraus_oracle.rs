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

//! The closed-form loss map on POVM elements against the Kraus operators of
//! a beamsplitter with a vacuum environment.
//!
//!     cargo run --example kraus_oracle

use detector_efficiency::fock::FockBasis;
use detector_efficiency::random::random_positive;
use detector_efficiency::{apply_loss_to_element, LossChannel, Transmissivity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> detector_efficiency::Result<()> {
    let n_max = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let basis = FockBasis::single_mode(n_max);
    for eta in [0.1, 0.5, 0.9] {
        let eta = Transmissivity::physical(eta)?;
        let channel = LossChannel::new(eta, n_max)?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let p = random_positive(&basis, &mut rng);
            let closed = apply_loss_to_element(&p, eta)?;
            worst = worst.max(closed.max_abs_diff(&channel.apply_to_effect(&p)?));
        }
        println!(
            "eta = {:.1}: {} Kraus operators, completeness {:.1e}, max deviation {worst:.1e}",
            eta.value(),
            channel.kraus().len(),
            channel.completeness_residual()
        );
    }
    Ok(())
}
