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

//! Virtual detectors: a signal mode and ancillary modes pass through an
//! interferometer, every output mode meets a physical detector (or is
//! discarded), and joint outcomes are coarse-grained into virtual outcomes.
//!
//! Mode 0 carries the signal; modes `1..M` carry the ancilla. For signal
//! state `rho` the virtual outcome `v` occurs with probability
//! `Tr[(rho ⊗ sigma) U^dag G_v U]`, where `G_v` sums the tensor products of
//! detector elements over joint outcomes mapped to `v`. The effective POVM
//! element is therefore `Tr_anc[(I ⊗ sigma) U^dag G_v U]`.
//!
//! Truncation: the joint space keeps states with at most `total_cutoff`
//! photons. With the signal below `signal_cutoff` and the ancilla below
//! `total_cutoff - signal_cutoff` photons, nothing is clipped, because the
//! interferometer conserves photon number.

mod adaptive;
mod commutation;
mod nogo;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::{tensor, CMatrix, FockBasis, HermitianOperator, C64};
use crate::interferometer::{lift, Interferometer};
use crate::povm::{DiagonalPovm, Povm};

pub use adaptive::{effective_povm_adaptive, AdaptiveDetectorSpec, AdaptivePolicy, AdaptiveStage};
pub use commutation::commutation_check;
pub use nogo::{
    nogo_experiment, run_trial, AncillaChoice, DetectorKind, InterferometerChoice, NogoConfig, NogoReport,
    PoolDetector, TrialRecord, VirtualDetectorTemplate, VirtualOutcome,
};

/// Separator used by [`Grouping::Joint`] labels.
pub const JOINT_LABEL_SEPARATOR: &str = "|";

/// Label of the single outcome of a discarded mode.
pub const DISCARD_LABEL: &str = "discard";

/// Detector placed on one output mode.
#[derive(Clone, Debug)]
pub enum SlotDetector {
    Dense(Povm),
    Diagonal(DiagonalPovm),
    /// Equivalent to a single-outcome detector `{I}`.
    Discard,
}

#[derive(Clone, Debug)]
pub struct DetectorSlot {
    pub mode: usize,
    pub detector: SlotDetector,
    /// Reported efficiency of the physical detector, for bookkeeping.
    pub nominal_efficiency: Option<f64>,
}

impl DetectorSlot {
    pub fn new(mode: usize, detector: SlotDetector) -> Self {
        DetectorSlot {
            mode,
            detector,
            nominal_efficiency: None,
        }
    }

    pub fn discard(mode: usize) -> Self {
        Self::new(mode, SlotDetector::Discard)
    }

    pub fn with_nominal_efficiency(mut self, eta: f64) -> Self {
        self.nominal_efficiency = Some(eta);
        self
    }
}

/// State of the ancillary modes `1..M`.
#[derive(Clone, Debug)]
pub enum Ancilla {
    Vacuum,
    /// One normalized ket of Fock coefficients per ancillary mode.
    ProductKets(Vec<Vec<C64>>),
    /// Joint density operator on the ancillary modes.
    Joint(HermitianOperator),
}

/// Map from joint outcome tuples (labels in mode order) to virtual labels.
#[derive(Clone, Debug, Default)]
pub enum Grouping {
    /// Every joint outcome is its own virtual outcome, labeled by joining the
    /// per-mode labels with [`JOINT_LABEL_SEPARATOR`].
    #[default]
    Joint,
    Table {
        entries: BTreeMap<Vec<String>, String>,
        /// Label for tuples missing from `entries`; without it the table must
        /// be total.
        default: Option<String>,
    },
}

impl Grouping {
    /// Two virtual outcomes: `off` when every slot reports one of its
    /// `no_click` labels, `on` otherwise.
    pub fn any_click(no_click: Vec<String>) -> Self {
        Grouping::Table {
            entries: BTreeMap::from([(no_click, "off".to_string())]),
            default: Some("on".into()),
        }
    }

    pub fn label(&self, tuple: &[String]) -> Result<String> {
        match self {
            Grouping::Joint => Ok(tuple.join(JOINT_LABEL_SEPARATOR)),
            Grouping::Table { entries, default } => entries
                .get(tuple)
                .or(default.as_ref())
                .cloned()
                .ok_or_else(|| Error::MissingLabel(tuple.join(JOINT_LABEL_SEPARATOR))),
        }
    }
}

/// Non-adaptive virtual detector.
#[derive(Clone, Debug)]
pub struct VirtualDetectorSpec {
    pub interferometer: Interferometer,
    pub ancilla: Ancilla,
    pub slots: Vec<DetectorSlot>,
    pub grouping: Grouping,
    /// Photon-number cutoff of the effective single-mode POVM.
    pub signal_cutoff: usize,
    /// Total photon cutoff of the joint space.
    pub total_cutoff: usize,
}

impl VirtualDetectorSpec {
    pub fn modes(&self) -> usize {
        self.interferometer.modes()
    }

    /// Largest nominal efficiency among the slots (0 when none is given).
    pub fn max_nominal_efficiency(&self) -> f64 {
        self.slots
            .iter()
            .filter_map(|s| s.nominal_efficiency)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
enum SlotElement {
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

impl SlotElement {
    #[inline]
    fn entry(&self, n: usize, m: usize) -> C64 {
        match self {
            SlotElement::Diagonal(d) => {
                if n == m {
                    C64::new(d[n], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            SlotElement::Dense(x) => x[(n, m)],
        }
    }
}

/// Everything about a setup that does not depend on the interferometer.
pub(crate) struct Prepared {
    pub basis: FockBasis,
    /// Outcomes per mode, truncated to the joint cutoff.
    outcomes: Vec<Vec<(String, SlotElement)>>,
    /// `I ⊗ sigma` on the joint basis.
    ancilla_factor: CMatrix,
    signal_cutoff: usize,
}

fn slot_outcomes(slot: &DetectorSlot, cutoff: usize) -> Result<Vec<(String, SlotElement)>> {
    let too_small = |have: usize| {
        Error::Config(format!(
            "detector on mode {} has cutoff {have}, below the joint cutoff {cutoff}",
            slot.mode
        ))
    };
    match &slot.detector {
        SlotDetector::Discard => Ok(vec![(DISCARD_LABEL.to_string(), SlotElement::Diagonal(vec![1.0; cutoff + 1]))]),
        SlotDetector::Diagonal(d) => {
            if d.n_max() < cutoff {
                return Err(too_small(d.n_max()));
            }
            Ok(d.outcomes()
                .map(|(l, v)| (l.to_string(), SlotElement::Diagonal(v[..=cutoff].to_vec())))
                .collect())
        }
        SlotDetector::Dense(p) => {
            if !p.basis().is_single_mode() {
                return Err(Error::Config(format!("detector on mode {} is not single-mode", slot.mode)));
            }
            if p.basis().cutoff() < cutoff {
                return Err(too_small(p.basis().cutoff()));
            }
            Ok(p.outcomes()
                .map(|(l, e)| {
                    (
                        l.to_string(),
                        SlotElement::Dense(e.matrix().view((0, 0), (cutoff + 1, cutoff + 1)).into_owned()),
                    )
                })
                .collect())
        }
    }
}

/// Ancilla density on `modes` ancillary modes, re-indexed onto the joint
/// cutoff.
fn ancilla_density(ancilla: &Ancilla, modes: usize, cutoff: usize) -> Result<HermitianOperator> {
    let basis = FockBasis::new(modes, cutoff)?;
    match ancilla {
        Ancilla::Vacuum => HermitianOperator::fock_projector(basis, &vec![0; modes]),
        Ancilla::ProductKets(kets) => {
            if kets.len() != modes {
                return Err(Error::Config(format!(
                    "{} ancilla kets for {modes} ancillary modes",
                    kets.len()
                )));
            }
            for (j, k) in kets.iter().enumerate() {
                let norm: f64 = k.iter().map(|z| z.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::NotDensity(format!("ancilla ket {j} has squared norm {norm}")));
                }
            }
            let support: usize = kets
                .iter()
                .map(|k| k.iter().rposition(|z| z.norm() > 0.0).unwrap_or(0))
                .sum();
            if support > cutoff {
                return Err(Error::Config(format!(
                    "ancilla support of {support} photons exceeds the joint cutoff {cutoff}"
                )));
            }
            let ket: Vec<C64> = basis
                .states()
                .map(|s| {
                    s.iter()
                        .zip(kets)
                        .map(|(&n, k)| k.get(n).copied().unwrap_or_default())
                        .product()
                })
                .collect();
            HermitianOperator::projector(basis, &ket)
        }
        Ancilla::Joint(rho) => {
            if rho.basis().modes() != modes {
                return Err(Error::Config(format!(
                    "joint ancilla on {} modes, expected {modes}",
                    rho.basis().modes()
                )));
            }
            rho.check_density(1e-9)?;
            let src = rho.basis();
            let d = basis.dim();
            let mut m = CMatrix::zeros(d, d);
            for (i, si) in src.states().enumerate() {
                for (j, sj) in src.states().enumerate() {
                    let z = rho.matrix()[(i, j)];
                    match (basis.index_of(si), basis.index_of(sj)) {
                        (Some(a), Some(b)) => m[(a, b)] = z,
                        _ if z.norm() > 0.0 => {
                            return Err(Error::Config(format!(
                                "joint ancilla has support above the joint cutoff {cutoff}"
                            )))
                        }
                        _ => {}
                    }
                }
            }
            HermitianOperator::new(basis, m)
        }
    }
}

fn support_photons(rho: &HermitianOperator) -> usize {
    (0..rho.dim())
        .filter(|&i| rho.matrix()[(i, i)].re > 1e-15)
        .map(|i| rho.basis().total(i))
        .max()
        .unwrap_or(0)
}

pub(crate) fn prepare(
    modes: usize,
    ancilla: &Ancilla,
    slots: &[DetectorSlot],
    signal_cutoff: usize,
    total_cutoff: usize,
) -> Result<Prepared> {
    if signal_cutoff > total_cutoff {
        return Err(Error::Config(format!(
            "signal cutoff {signal_cutoff} exceeds the joint cutoff {total_cutoff}"
        )));
    }
    let mut by_mode: Vec<Option<&DetectorSlot>> = vec![None; modes];
    for s in slots {
        if s.mode >= modes {
            return Err(Error::Config(format!("slot on mode {} of a {modes}-mode setup", s.mode)));
        }
        if by_mode[s.mode].replace(s).is_some() {
            return Err(Error::Config(format!("two slots on mode {}", s.mode)));
        }
    }
    let outcomes = by_mode
        .iter()
        .enumerate()
        .map(|(m, s)| match s {
            Some(s) => slot_outcomes(s, total_cutoff),
            None => Err(Error::Config(format!("output mode {m} has no slot"))),
        })
        .collect::<Result<Vec<_>>>()?;

    let basis = FockBasis::new(modes, total_cutoff)?;
    let ancilla_factor = if modes == 1 {
        if !matches!(ancilla, Ancilla::Vacuum) {
            return Err(Error::Config("a one-mode setup has no ancilla".into()));
        }
        CMatrix::identity(basis.dim(), basis.dim())
    } else {
        let sigma = ancilla_density(ancilla, modes - 1, total_cutoff)?;
        let support = support_photons(&sigma);
        if signal_cutoff + support > total_cutoff {
            return Err(Error::Config(format!(
                "signal cutoff {signal_cutoff} plus ancilla support {support} exceeds the joint cutoff {total_cutoff}"
            )));
        }
        let id = HermitianOperator::identity(FockBasis::single_mode(total_cutoff));
        tensor(&id, &sigma, total_cutoff)?.into_matrix()
    };
    Ok(Prepared {
        basis,
        outcomes,
        ancilla_factor,
        signal_cutoff,
    })
}

impl Prepared {
    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn outcome_count(&self, mode: usize) -> usize {
        self.outcomes[mode].len()
    }

    /// `⊗_j P^{(j)}_{choice_j}` on the joint basis, added into `acc`.
    fn add_joint_element(&self, choice: &[usize], acc: &mut CMatrix) {
        let elements: Vec<&SlotElement> = choice
            .iter()
            .enumerate()
            .map(|(mode, &c)| &self.outcomes[mode][c].1)
            .collect();
        let all_diagonal = elements.iter().all(|e| matches!(e, SlotElement::Diagonal(_)));
        for (i, si) in self.basis.states().enumerate() {
            if all_diagonal {
                let v: f64 = elements
                    .iter()
                    .zip(si)
                    .map(|(e, &n)| e.entry(n, n).re)
                    .product();
                acc[(i, i)] += C64::new(v, 0.0);
                continue;
            }
            for (j, sj) in self.basis.states().enumerate() {
                let mut z = C64::new(1.0, 0.0);
                for (e, (&n, &m)) in elements.iter().zip(si.iter().zip(sj)) {
                    z *= e.entry(n, m);
                    if z.re == 0.0 && z.im == 0.0 {
                        break;
                    }
                }
                acc[(i, j)] += z;
            }
        }
    }

    /// Joint label tuple in mode order.
    fn tuple(&self, choice: &[usize]) -> Vec<String> {
        choice
            .iter()
            .enumerate()
            .map(|(mode, &c)| self.outcomes[mode][c].0.clone())
            .collect()
    }

    /// Sums `U_h^dag G_{h,v} U_h` over branches. A branch fixes the outcomes
    /// of modes `M-1, ..., M-len` (measurement order) and supplies the
    /// unitary for that history; the remaining modes are summed inside
    /// `G_{h,v}`.
    pub fn assemble(
        &self,
        grouping: &Grouping,
        history_len: usize,
        mut unitary_for: impl FnMut(&[String]) -> Result<CMatrix>,
    ) -> Result<Povm> {
        let m = self.modes();
        let d = self.basis.dim();
        // Labels in order of first appearance over joint outcomes, so the
        // output order does not depend on `history_len`.
        let mut order: Vec<String> = Vec::new();
        for choice in mixed_radix((0..m).map(|j| self.outcome_count(j)).collect()) {
            let label = grouping.label(&self.tuple(&choice))?;
            if !order.contains(&label) {
                order.push(label);
            }
        }
        let mut totals: BTreeMap<String, CMatrix> = BTreeMap::new();

        for branch in mixed_radix((m - history_len..m).rev().map(|j| self.outcome_count(j)).collect()) {
            let history: Vec<String> = branch
                .iter()
                .zip((m - history_len..m).rev())
                .map(|(&c, mode)| self.outcomes[mode][c].0.clone())
                .collect();
            let u = unitary_for(&history)?;

            let mut groups: Vec<(String, CMatrix)> = Vec::new();
            for inner in mixed_radix((0..m - history_len).map(|j| self.outcome_count(j)).collect()) {
                let mut choice = inner.clone();
                choice.extend(branch.iter().rev());
                let label = grouping.label(&self.tuple(&choice))?;
                let idx = match groups.iter().position(|(l, _)| *l == label) {
                    Some(i) => i,
                    None => {
                        groups.push((label, CMatrix::zeros(d, d)));
                        groups.len() - 1
                    }
                };
                self.add_joint_element(&choice, &mut groups[idx].1);
            }
            for (label, g) in groups {
                let x = u.adjoint() * g * &u;
                match totals.get_mut(&label) {
                    Some(acc) => *acc += x,
                    None => {
                        totals.insert(label, x);
                    }
                }
            }
        }

        let keep = self.signal_cutoff + 1;
        let outcomes = order
            .into_iter()
            .map(|label| {
                let x = totals.remove(&label).expect("present");
                let y = self.reduce(&x);
                let y = y.view((0, 0), (keep, keep)).into_owned();
                let y = (&y + y.adjoint()).scale(0.5);
                HermitianOperator::new(FockBasis::single_mode(self.signal_cutoff), y).map(|e| (label, e))
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::new(outcomes)
    }

    /// `Tr_anc[(I ⊗ sigma) X]` on the signal mode at the joint cutoff.
    fn reduce(&self, x: &CMatrix) -> CMatrix {
        let prod = &self.ancilla_factor * x;
        let op = HermitianOperator::from_parts_unchecked(self.basis.clone(), prod);
        crate::fock::partial_trace(&op, &[0])
            .expect("mode 0 exists")
            .into_matrix()
    }
}

/// All tuples `(c_0, ..., c_{k-1})` with `c_i < radix[i]`, first index
/// slowest.
pub(crate) fn mixed_radix(radix: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let total: usize = radix.iter().product();
    (0..total).map(move |mut n| {
        let mut out = vec![0; radix.len()];
        for i in (0..radix.len()).rev() {
            out[i] = n % radix[i];
            n /= radix[i];
        }
        out
    })
}

/// Effective single-mode POVM of a virtual detector on the signal mode.
pub fn effective_povm(spec: &VirtualDetectorSpec) -> Result<Povm> {
    let prepared = prepare(
        spec.modes(),
        &spec.ancilla,
        &spec.slots,
        spec.signal_cutoff,
        spec.total_cutoff,
    )?;
    let u = lift(&spec.interferometer, &prepared.basis)?;
    prepared.assemble(&spec.grouping, 0, |_| Ok(u.clone()))
}
