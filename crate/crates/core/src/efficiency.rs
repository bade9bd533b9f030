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

//! Generalized detector efficiency.
//!
//! The efficiency of a POVM `S` is the infimum of `eta` such that
//! `S = F_eta(P)` for some physical POVM `P`. On a truncated space the
//! preimage is unique, `P = F_{1/eta}(S)`, so membership reduces to a
//! spectral test. Feasibility is monotone in `eta` (a feasible `P` at `eta`
//! yields `F_{eta/eta''}(P)` at any `eta'' > eta`), so bisection over `[0, 1]`
//! finds the threshold.
//!
//! For a POVM defined on the full Fock space the truncated estimate is a
//! lower bound, non-decreasing in the cutoff; [`cutoff_sweep`] shows the
//! convergence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loss::{inverse_min_eigenvalue, inverse_min_entry, Transmissivity};
use crate::povm::{DiagonalPovm, Povm, PovmTolerances, ValidationReport, DEFAULT_POVM_TOL};

/// A single-mode measurement whose loss preimage can be probed.
pub trait Detector {
    /// Photon-number cutoff of the single-mode space.
    fn cutoff(&self) -> usize;

    fn validation(&self, tol: PovmTolerances) -> ValidationReport;

    /// Smallest eigenvalue over all elements of `F_{1/eta}(self)`.
    fn inverse_min_eigenvalue(&self, eta: Transmissivity) -> Result<f64>;

    /// Leading block on photon numbers `0..=n_max`.
    fn truncated(&self, n_max: usize) -> Result<Self>
    where
        Self: Sized;
}

impl Detector for Povm {
    fn cutoff(&self) -> usize {
        self.basis().cutoff()
    }

    fn validation(&self, tol: PovmTolerances) -> ValidationReport {
        self.validate(tol)
    }

    fn inverse_min_eigenvalue(&self, eta: Transmissivity) -> Result<f64> {
        if !self.basis().is_single_mode() {
            return Err(Error::InvalidBasis("efficiency is defined for single-mode POVMs".into()));
        }
        inverse_min_eigenvalue(self, eta)
    }

    fn truncated(&self, n_max: usize) -> Result<Self> {
        self.truncate(n_max)
    }
}

impl Detector for DiagonalPovm {
    fn cutoff(&self) -> usize {
        self.n_max()
    }

    fn validation(&self, tol: PovmTolerances) -> ValidationReport {
        self.validate(tol)
    }

    fn inverse_min_eigenvalue(&self, eta: Transmissivity) -> Result<f64> {
        inverse_min_entry(self, eta)
    }

    fn truncated(&self, n_max: usize) -> Result<Self> {
        self.truncate(n_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub eta: f64,
    pub feasible: bool,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyOptions {
    pub bisection_tol: f64,
    pub pos_tol: f64,
}

impl Default for EfficiencyOptions {
    fn default() -> Self {
        EfficiencyOptions {
            bisection_tol: 1e-6,
            pos_tol: DEFAULT_POVM_TOL,
        }
    }
}

/// Bracket `[lower, upper]` around the generalized efficiency: `upper` is
/// feasible, `lower` is infeasible unless it is 0.
#[derive(Clone, Debug, Serialize)]
pub struct EfficiencyEstimate {
    pub lower: f64,
    pub upper: f64,
    pub cutoff: usize,
    pub bisection_tol: f64,
    pub pos_tol: f64,
    pub feasibility_trace: Vec<Feasibility>,
}

impl EfficiencyEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Whether `value` lies in the bracket widened by `slack`.
    pub fn brackets(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }

    /// Probes sorted by `eta`, with non-decreasing minimum eigenvalues.
    pub fn is_monotone(&self) -> bool {
        let mut probes = self.feasibility_trace.clone();
        probes.sort_by(|a, b| a.eta.total_cmp(&b.eta));
        probes.windows(2).all(|w| {
            w[0].min_eigenvalue <= w[1].min_eigenvalue + self.pos_tol && (!w[0].feasible || w[1].feasible)
        })
    }
}

fn probe<D: Detector + ?Sized>(detector: &D, eta: f64, pos_tol: f64) -> Result<Feasibility> {
    let min_eigenvalue = detector.inverse_min_eigenvalue(Transmissivity::physical(eta)?)?;
    Ok(Feasibility {
        eta,
        feasible: min_eigenvalue >= -pos_tol,
        min_eigenvalue,
    })
}

fn require_valid<D: Detector + ?Sized>(detector: &D, pos_tol: f64) -> Result<()> {
    let report = detector.validation(PovmTolerances::uniform(pos_tol));
    if !report.passed() {
        return Err(Error::InvalidPovm(format!(
            "min eigenvalue {:e}, completeness residual {:e}",
            report.min_eigenvalue(),
            report.completeness_residual
        )));
    }
    Ok(())
}

/// Is the detector `F_eta(P)` for some physical `P`?
pub fn is_feasible<D: Detector + ?Sized>(detector: &D, eta: f64, pos_tol: f64) -> Result<Feasibility> {
    require_valid(detector, pos_tol)?;
    probe(detector, eta, pos_tol)
}

/// Bisection for the generalized efficiency.
pub fn estimate_efficiency<D: Detector + ?Sized>(
    detector: &D,
    options: &EfficiencyOptions,
) -> Result<EfficiencyEstimate> {
    let tol = options.bisection_tol;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Config(format!("bisection tolerance {tol} outside (0, 1)")));
    }
    let report = detector.validation(PovmTolerances::uniform(options.pos_tol));
    if !report.complete {
        return Err(Error::InvalidPovm(format!(
            "completeness residual {:e}",
            report.completeness_residual
        )));
    }

    let mut trace = Vec::new();
    let at_one = probe(detector, 1.0, options.pos_tol)?;
    trace.push(at_one);
    if !at_one.feasible {
        return Err(Error::InfeasibleAtUnity(at_one.min_eigenvalue));
    }

    let finish = |lower, upper, trace| EfficiencyEstimate {
        lower,
        upper,
        cutoff: detector.cutoff(),
        bisection_tol: tol,
        pos_tol: options.pos_tol,
        feasibility_trace: trace,
    };

    let at_floor = probe(detector, tol, options.pos_tol)?;
    trace.push(at_floor);
    if at_floor.feasible {
        return Ok(finish(0.0, tol, trace));
    }

    let (mut lo, mut hi) = (tol, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let p = probe(detector, mid, options.pos_tol)?;
        trace.push(p);
        if p.feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(finish(lo, hi, trace))
}

/// Estimates on the leading blocks `0..=c` for `c = 1..=cutoff`.
pub fn cutoff_sweep<D: Detector>(detector: &D, options: &EfficiencyOptions) -> Result<Vec<EfficiencyEstimate>> {
    (1..=detector.cutoff())
        .map(|c| estimate_efficiency(&detector.truncated(c)?, options))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{click_detector, discard_detector, pnr_detector};

    #[test]
    fn click_detector_estimates_bracket_eta() {
        let opts = EfficiencyOptions::default();
        for eta in [0.3, 0.5, 0.9] {
            let est = estimate_efficiency(&click_detector(eta, 10).unwrap(), &opts).unwrap();
            assert!(est.width() <= 1e-6);
            assert!(est.brackets(eta, 1e-6), "{eta}: {est:?}");
            assert!(est.is_monotone());
        }
    }

    #[test]
    fn dense_and_diagonal_paths_agree() {
        let opts = EfficiencyOptions::default();
        let c = click_detector(0.45, 6).unwrap();
        let a = estimate_efficiency(&c, &opts).unwrap();
        let b = estimate_efficiency(&c.to_povm(), &opts).unwrap();
        assert!((a.midpoint() - b.midpoint()).abs() <= 1e-6);
    }

    #[test]
    fn discard_has_zero_efficiency() {
        let est = estimate_efficiency(&discard_detector(6), &EfficiencyOptions::default()).unwrap();
        assert_eq!(est.lower, 0.0);
        assert!(est.upper <= 1e-6);
    }

    #[test]
    fn ideal_pnr_has_unit_efficiency() {
        let est = estimate_efficiency(&pnr_detector(1.0, 5).unwrap(), &EfficiencyOptions::default()).unwrap();
        assert!(est.lower >= 1.0 - 1e-6);
        for eta in [0.99, 0.9, 0.5, 0.1] {
            assert!(!is_feasible(&pnr_detector(1.0, 5).unwrap(), eta, 1e-9).unwrap().feasible);
        }
    }

    #[test]
    fn feasibility_examples() {
        let c = click_detector(0.6, 10).unwrap();
        assert!(is_feasible(&c, 0.7, 1e-9).unwrap().feasible);
        let f = is_feasible(&c, 0.5, 1e-9).unwrap();
        assert!(!f.feasible);
        assert!((f.min_eigenvalue + 0.2).abs() < 1e-12);
        assert!(is_feasible(&c, 1.0, 1e-9).unwrap().feasible);
        assert!(is_feasible(&c, 1.5, 1e-9).is_err());
    }

    #[test]
    fn invalid_input_is_reported() {
        let bad = DiagonalPovm::new(1, vec![("a".into(), vec![1.2, 0.5]), ("b".into(), vec![-0.2, 0.5])]).unwrap();
        assert!(matches!(
            estimate_efficiency(&bad, &EfficiencyOptions::default()),
            Err(Error::InfeasibleAtUnity(_))
        ));
        assert!(is_feasible(&bad, 0.5, 1e-9).is_err());
        let incomplete = DiagonalPovm::new(1, vec![("a".into(), vec![0.5, 0.5])]).unwrap();
        assert!(estimate_efficiency(&incomplete, &EfficiencyOptions::default()).is_err());
    }

    #[test]
    fn cutoff_sweep_is_non_decreasing() {
        let opts = EfficiencyOptions::default();
        let sweep = cutoff_sweep(&pnr_detector(0.75, 6).unwrap(), &opts).unwrap();
        assert_eq!(sweep.len(), 6);
        for w in sweep.windows(2) {
            assert!(w[1].upper >= w[0].lower - 1e-6);
        }
        assert!(sweep.last().unwrap().brackets(0.75, 1e-6));
    }
}
