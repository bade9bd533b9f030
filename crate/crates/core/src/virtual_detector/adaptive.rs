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

//! Adaptive virtual detectors.
//!
//! The output modes are measured one at a time from the last mode down to
//! mode 1; after each measurement the remaining unmeasured modes pass
//! through an interferometer chosen from the outcomes seen so far. Mode 0 is
//! measured last. By deferring the measurements, the effective element for
//! virtual outcome `v` is `sum_h V_h^dag G_{h,v} V_h`, where `V_h` is the
//! network applied along history `h`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::CMatrix;
use crate::interferometer::{lift, Interferometer};
use crate::povm::Povm;

use super::{prepare, Ancilla, DetectorSlot, Grouping};

/// Interferometer applied to the first `modes` modes once `M - modes` modes
/// have been measured.
#[derive(Clone, Debug)]
pub struct AdaptiveStage {
    pub modes: usize,
    /// Keyed by the labels observed so far, in measurement order.
    pub table: BTreeMap<Vec<String>, Interferometer>,
    pub default: Option<Interferometer>,
}

impl AdaptiveStage {
    /// Stage that ignores the history.
    pub fn constant(w: Interferometer) -> Self {
        AdaptiveStage {
            modes: w.modes(),
            table: BTreeMap::new(),
            default: Some(w),
        }
    }

    pub fn choose(&self, history: &[String]) -> Result<&Interferometer> {
        self.table
            .get(history)
            .or(self.default.as_ref())
            .ok_or_else(|| Error::UnreachableHistory(history.to_vec()))
    }
}

/// Initial `M`-mode interferometer followed by `M - 2` history-dependent
/// stages on `M - 1, M - 2, ..., 2` modes.
#[derive(Clone, Debug)]
pub struct AdaptivePolicy {
    pub initial: Interferometer,
    pub stages: Vec<AdaptiveStage>,
}

impl AdaptivePolicy {
    pub fn modes(&self) -> usize {
        self.initial.modes()
    }

    pub fn check(&self) -> Result<()> {
        let m = self.modes();
        if m < 2 {
            return Err(Error::Config("an adaptive detector needs at least two modes".into()));
        }
        if self.stages.len() != m - 2 {
            return Err(Error::Config(format!(
                "{m}-mode adaptive policy needs {} stages, got {}",
                m - 2,
                self.stages.len()
            )));
        }
        for (i, s) in self.stages.iter().enumerate() {
            let expected = m - 1 - i;
            let sizes_ok = s.modes == expected
                && s.table.values().chain(s.default.iter()).all(|w| w.modes() == expected);
            if !sizes_ok {
                return Err(Error::Config(format!("stage {i} must act on {expected} modes")));
            }
        }
        Ok(())
    }

    /// Mode-level network along a full history (outcomes of modes
    /// `M-1, ..., 1`).
    pub fn network(&self, history: &[String]) -> Result<Interferometer> {
        let m = self.modes();
        let mut w = self.initial.clone();
        for (i, s) in self.stages.iter().enumerate() {
            w = s.choose(&history[..=i])?.embed(m)?.compose(&w)?;
        }
        Ok(w)
    }
}

#[derive(Clone, Debug)]
pub struct AdaptiveDetectorSpec {
    pub policy: AdaptivePolicy,
    pub ancilla: Ancilla,
    pub slots: Vec<DetectorSlot>,
    pub grouping: Grouping,
    pub signal_cutoff: usize,
    pub total_cutoff: usize,
}

impl AdaptiveDetectorSpec {
    pub fn modes(&self) -> usize {
        self.policy.modes()
    }
}

/// Effective single-mode POVM of an adaptive virtual detector.
pub fn effective_povm_adaptive(spec: &AdaptiveDetectorSpec) -> Result<Povm> {
    spec.policy.check()?;
    let m = spec.modes();
    let prepared = prepare(m, &spec.ancilla, &spec.slots, spec.signal_cutoff, spec.total_cutoff)?;
    let mut cache: BTreeMap<Vec<String>, CMatrix> = BTreeMap::new();
    let policy = &spec.policy;
    let basis = prepared.basis.clone();
    prepared.assemble(&spec.grouping, m - 1, |history| {
        let key = history[..m.saturating_sub(2)].to_vec();
        if let Some(u) = cache.get(&key) {
            return Ok(u.clone());
        }
        let u = lift(&policy.network(history)?, &basis)?;
        cache.insert(key, u.clone());
        Ok(u)
    })
}
