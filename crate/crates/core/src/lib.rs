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

//! Quantum-optical detectors as POVMs on truncated Fock spaces.
//!
//! The crate computes the *generalized efficiency* of a detector: the
//! smallest transmissivity `eta` such that the detector is equivalent to some
//! physical detector behind an attenuator of transmissivity `eta`. It also
//! assembles "virtual detectors" from interferometers, ancillary light and
//! physical detectors, and checks numerically that such linear-optical
//! constructions never beat the best physical detector they use.
//!
//! Modules, bottom up:
//!
//! * [`fock`]: truncated multimode Fock bases, Hermitian operators, tensor
//!   products, partial traces, spectra.
//! * [`povm`]: POVMs, validation, click / photon-number-resolving / discard
//!   detectors, coarse-graining.
//! * [`loss`]: the pure-loss channel on states and on POVMs, its formal
//!   inverse, and a Kraus-operator oracle built from a beamsplitter.
//! * [`efficiency`]: bisection for the generalized efficiency.
//! * [`interferometer`]: mode unitaries, their decomposition, and the exact
//!   lift to Fock space.
//! * [`virtual_detector`]: effective POVMs of (adaptive) virtual detectors,
//!   the attenuator commutation check, and the no-go experiment harness.
//! * [`io`] and [`cli`]: JSON/CSV file formats and the `deteff` command line.

mod dd;
pub mod cli;
pub mod efficiency;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod io;
pub mod loss;
pub mod povm;
pub mod random;
pub mod virtual_detector;

pub use efficiency::{
    cutoff_sweep, estimate_efficiency, is_feasible, Detector, EfficiencyEstimate, EfficiencyOptions, Feasibility,
};
pub use error::{Error, Result};
pub use fock::{
    lowering_operator, min_eigenvalue, partial_trace, tensor, tensor_all, CMatrix, FockBasis, HermitianOperator, C64,
};
pub use interferometer::{decompose, lift, single_photon_block, Decomposition, Interferometer, TwoModeElement};
pub use loss::{
    apply_loss_to_diagonal, apply_loss_to_element, apply_loss_to_povm, apply_loss_to_state, invert_loss,
    invert_loss_diagonal, kraus_oracle, LossChannel, MultiModeLoss, Transmissivity,
};
pub use povm::{
    click_detector, discard_detector, pnr_detector, DiagonalPovm, Povm, PovmTolerances, ValidationReport,
};
