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

//! Two single photons on a balanced beamsplitter never leave in different
//! ports.
//!
//!     cargo run --example hong_ou_mandel

use detector_efficiency::fock::FockBasis;
use detector_efficiency::{lift, Interferometer};

fn main() -> detector_efficiency::Result<()> {
    let basis = FockBasis::new(2, 2)?;
    let u = lift(&Interferometer::beamsplitter(2, 0, 1, 0.5)?, &basis)?;
    let input = basis.index_of(&[1, 1]).unwrap();
    for (i, state) in basis.states().enumerate() {
        if basis.total(i) == 2 {
            println!("|{},{}>  p = {:.6}", state[0], state[1], u[(i, input)].norm_sqr());
        }
    }
    Ok(())
}
