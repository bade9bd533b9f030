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

//! Numerical check that a passive network commutes with loss.
//!
//! Uniform loss on every mode commutes with any interferometer. The check
//! compares `E(U X U^dag)` with `U E(X) U^dag` on every matrix unit
//! `X = |i><j|` of the truncated basis, which covers all operators by
//! linearity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{max_abs_diff, CMatrix, C64};
use crate::interferometer::{lift, Interferometer};
use crate::loss::MultiModeLoss;

/// Largest entrywise deviation between `E(U X U^dag)` and `U E(X) U^dag`
/// over all matrix units `X`.
pub fn commutation_check(w: &Interferometer, loss: &MultiModeLoss) -> Result<f64> {
    let basis = loss.basis();
    if basis.modes() != w.modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode interferometer against {}-mode loss",
            w.modes(),
            basis.modes()
        )));
    }
    let u = lift(w, basis)?;
    let d = basis.dim();
    let cols: Vec<nalgebra::DVector<C64>> = (0..d).map(|i| u.column(i).into_owned()).collect();
    let outer = |a: usize, b: usize| &cols[a] * cols[b].adjoint();

    let worst = (0..d * d)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / d, ij % d);
            let left = loss.apply(&outer(i, j));
            let mut right = CMatrix::zeros(d, d);
            for (a, b, weight) in loss.unit_image(i, j) {
                right += outer(a, b) * C64::new(weight, 0.0);
            }
            max_abs_diff(&left, &right)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockBasis;
    use crate::loss::Transmissivity;
    use crate::random::haar_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_loss_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = FockBasis::new(2, 3).unwrap();
        let loss = MultiModeLoss::uniform(&basis, Transmissivity::physical(0.6).unwrap()).unwrap();
        let w = Interferometer::new(haar_unitary(2, &mut rng)).unwrap();
        assert!(commutation_check(&w, &loss).unwrap() < 1e-12);
    }

    #[test]
    fn unequal_loss_does_not_commute_with_mixing() {
        let basis = FockBasis::new(2, 2).unwrap();
        let etas = [Transmissivity::physical(0.9).unwrap(), Transmissivity::physical(0.2).unwrap()];
        let loss = MultiModeLoss::per_mode(&basis, &etas).unwrap();
        let w = Interferometer::beamsplitter(2, 0, 1, 0.5).unwrap();
        assert!(commutation_check(&w, &loss).unwrap() > 1e-3);
        // A phase shifter does commute with any per-mode loss.
        let p = Interferometer::from_elements(2, &[crate::interferometer::TwoModeElement::Phase { mode: 1, phi: 0.7 }])
            .unwrap();
        assert!(commutation_check(&p, &loss).unwrap() < 1e-12);
    }
}
