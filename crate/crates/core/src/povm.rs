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

//! POVMs on a single truncated mode (or a multimode basis) and the detector
//! constructors built on them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{min_eigenvalue, CMatrix, FockBasis, HermitianOperator, C64};

/// Default positivity and completeness tolerance.
pub const DEFAULT_POVM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmTolerances {
    pub positivity: f64,
    pub completeness: f64,
}

impl Default for PovmTolerances {
    fn default() -> Self {
        PovmTolerances {
            positivity: DEFAULT_POVM_TOL,
            completeness: DEFAULT_POVM_TOL,
        }
    }
}

impl PovmTolerances {
    pub fn uniform(tol: f64) -> Self {
        PovmTolerances {
            positivity: tol,
            completeness: tol,
        }
    }
}

/// Outcome of [`Povm::validate`]. Never an error: unphysical input is
/// reported, not rejected.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub min_eigenvalues: Vec<(String, f64)>,
    pub completeness_residual: f64,
    pub positivity_tol: f64,
    pub completeness_tol: f64,
    pub positive: bool,
    pub complete: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.positive && self.complete
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues
            .iter()
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min)
    }

    fn build(min_eigenvalues: Vec<(String, f64)>, completeness_residual: f64, tol: PovmTolerances) -> Self {
        let positive = min_eigenvalues
            .iter()
            .all(|(_, v)| v.is_finite() && *v >= -tol.positivity);
        ValidationReport {
            min_eigenvalues,
            completeness_residual,
            positivity_tol: tol.positivity,
            completeness_tol: tol.completeness,
            positive,
            complete: completeness_residual <= tol.completeness,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, v) in &self.min_eigenvalues {
            let flag = if *v >= -self.positivity_tol { "ok" } else { "NEGATIVE" };
            writeln!(f, "  {label:>12}  min eigenvalue {v:+.6e}  {flag}")?;
        }
        writeln!(
            f,
            "  completeness residual {:.3e} (tol {:.1e})  {}",
            self.completeness_residual,
            self.completeness_tol,
            if self.complete { "ok" } else { "FAIL" }
        )?;
        write!(f, "  result: {}", if self.passed() { "pass" } else { "fail" })
    }
}

fn check_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Result<usize> {
    let mut seen = HashSet::new();
    let mut count = 0;
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidPovm(format!("duplicate outcome label `{l}`")));
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidPovm("a POVM needs at least one outcome".into()));
    }
    Ok(count)
}

/// Labeled list of Hermitian elements on a shared basis.
///
/// Construction only checks structure; positivity and completeness are
/// diagnosed by [`Povm::validate`], since formal inverse images under loss
/// are deliberately allowed to be unphysical.
#[derive(Clone, Debug)]
pub struct Povm {
    basis: FockBasis,
    labels: Vec<String>,
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(outcomes: Vec<(String, HermitianOperator)>) -> Result<Self> {
        check_labels(outcomes.iter().map(|(l, _)| l.as_str()))?;
        let basis = outcomes[0].1.basis().clone();
        if outcomes.iter().any(|(_, e)| e.basis() != &basis) {
            return Err(Error::InvalidPovm("elements live on different bases".into()));
        }
        let (labels, elements) = outcomes.into_iter().unzip();
        Ok(Povm {
            basis,
            labels,
            elements,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (&str, &HermitianOperator)> {
        self.labels.iter().map(String::as_str).zip(self.elements.iter())
    }

    pub fn get(&self, label: &str) -> Option<&HermitianOperator> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.elements[i])
    }

    /// Outcome probabilities `Tr[rho E_l]`, in outcome order.
    pub fn probabilities(&self, rho: &HermitianOperator) -> Result<Vec<f64>> {
        if rho.basis() != &self.basis {
            return Err(Error::DimensionMismatch("state and POVM bases differ".into()));
        }
        Ok(self.elements.iter().map(|e| e.expectation(rho)).collect())
    }

    /// Max-abs entrywise deviation of the element sum from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.basis.dim();
        let mut sum = CMatrix::zeros(d, d);
        for e in &self.elements {
            sum += e.matrix();
        }
        crate::fock::max_abs_diff(&sum, &CMatrix::identity(d, d))
    }

    pub fn validate(&self, tol: PovmTolerances) -> ValidationReport {
        let mins = self
            .outcomes()
            .map(|(l, e)| (l.to_string(), min_eigenvalue(e).unwrap_or(f64::NEG_INFINITY)))
            .collect();
        ValidationReport::build(mins, self.completeness_residual(), tol)
    }

    /// Merges outcomes by summing elements. New outcomes appear in order of
    /// first occurrence.
    pub fn coarse_grain(&self, grouping: &BTreeMap<String, String>) -> Result<Povm> {
        let mut order: Vec<String> = Vec::new();
        let mut sums: BTreeMap<String, CMatrix> = BTreeMap::new();
        for (label, e) in self.outcomes() {
            let target = grouping
                .get(label)
                .ok_or_else(|| Error::MissingLabel(label.to_string()))?;
            match sums.get_mut(target) {
                Some(acc) => *acc += e.matrix(),
                None => {
                    order.push(target.clone());
                    sums.insert(target.clone(), e.matrix().clone());
                }
            }
        }
        let outcomes = order
            .into_iter()
            .map(|l| {
                let m = sums.remove(&l).expect("present");
                (l, HermitianOperator::from_parts_unchecked(self.basis.clone(), m))
            })
            .collect();
        Povm::new(outcomes)
    }

    /// Leading block on photon numbers `0..=n_max` of a single-mode POVM.
    pub fn truncate(&self, n_max: usize) -> Result<Povm> {
        let outcomes = self
            .outcomes()
            .map(|(l, e)| Ok((l.to_string(), e.truncate(n_max)?)))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(outcomes)
    }

    /// Largest entrywise difference between matching elements; `None` when
    /// the label lists differ.
    pub fn max_abs_diff(&self, other: &Povm) -> Option<f64> {
        if self.labels != other.labels || self.basis != other.basis {
            return None;
        }
        Some(
            self.elements
                .iter()
                .zip(&other.elements)
                .map(|(a, b)| a.max_abs_diff(b))
                .fold(0.0, f64::max),
        )
    }

    pub(crate) fn map_elements(
        &self,
        mut f: impl FnMut(&HermitianOperator) -> Result<HermitianOperator>,
    ) -> Result<Povm> {
        let elements = self.elements.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let basis = elements[0].basis().clone();
        Ok(Povm {
            basis,
            labels: self.labels.clone(),
            elements,
        })
    }
}

/// Phase-insensitive POVM stored as one diagonal per outcome over photon
/// numbers `0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPovm {
    n_max: usize,
    labels: Vec<String>,
    diagonals: Vec<Vec<f64>>,
}

impl DiagonalPovm {
    pub fn new(n_max: usize, outcomes: Vec<(String, Vec<f64>)>) -> Result<Self> {
        check_labels(outcomes.iter().map(|(l, _)| l.as_str()))?;
        for (l, d) in &outcomes {
            if d.len() != n_max + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "outcome `{l}` has {} entries, expected {}",
                    d.len(),
                    n_max + 1
                )));
            }
            if d.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let (labels, diagonals) = outcomes.into_iter().unzip();
        Ok(DiagonalPovm {
            n_max,
            labels,
            diagonals,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn basis(&self) -> FockBasis {
        FockBasis::single_mode(self.n_max)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn diagonals(&self) -> &[Vec<f64>] {
        &self.diagonals
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.diagonals.iter().map(Vec::as_slice))
    }

    pub fn get(&self, label: &str) -> Option<&[f64]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.diagonals[i].as_slice())
    }

    pub fn completeness_residual(&self) -> f64 {
        (0..=self.n_max)
            .map(|n| (self.diagonals.iter().map(|d| d[n]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self, tol: PovmTolerances) -> ValidationReport {
        let mins = self
            .outcomes()
            .map(|(l, d)| (l.to_string(), d.iter().copied().fold(f64::INFINITY, f64::min)))
            .collect();
        ValidationReport::build(mins, self.completeness_residual(), tol)
    }

    /// Dense embedding.
    pub fn to_povm(&self) -> Povm {
        let basis = self.basis();
        let outcomes = self
            .outcomes()
            .map(|(l, d)| {
                let v = nalgebra::DVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0)));
                (
                    l.to_string(),
                    HermitianOperator::from_parts_unchecked(basis.clone(), CMatrix::from_diagonal(&v)),
                )
            })
            .collect();
        Povm::new(outcomes).expect("labels already checked")
    }

    pub fn truncate(&self, n_max: usize) -> Result<DiagonalPovm> {
        if n_max > self.n_max {
            return Err(Error::InvalidBasis(format!(
                "cannot truncate cutoff {} to {n_max}",
                self.n_max
            )));
        }
        Ok(DiagonalPovm {
            n_max,
            labels: self.labels.clone(),
            diagonals: self.diagonals.iter().map(|d| d[..=n_max].to_vec()).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &DiagonalPovm) -> Option<f64> {
        if self.labels != other.labels || self.n_max != other.n_max {
            return None;
        }
        Some(
            self.diagonals
                .iter()
                .flatten()
                .zip(other.diagonals.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub(crate) fn from_parts_unchecked(n_max: usize, labels: Vec<String>, diagonals: Vec<Vec<f64>>) -> Self {
        DiagonalPovm {
            n_max,
            labels,
            diagonals,
        }
    }
}

/// Non-discriminating ("click") detector of efficiency `eta`:
/// `off = sum (1-eta)^n |n><n|`, `on = I - off`.
pub fn click_detector(eta: f64, n_max: usize) -> Result<DiagonalPovm> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidTransmissivity {
            value: eta,
            expected: "[0, 1]",
        });
    }
    let off: Vec<f64> = (0..=n_max).map(|n| (1.0 - eta).powi(n as i32)).collect();
    let on = off.iter().map(|p| 1.0 - p).collect();
    Ok(DiagonalPovm::from_parts_unchecked(
        n_max,
        vec!["off".into(), "on".into()],
        vec![off, on],
    ))
}

/// Photon-number-resolving detector of efficiency `eta`: outcome `k` has
/// diagonal `binom(n, k) eta^k (1-eta)^(n-k)`. Outcomes are labeled by their
/// count.
pub fn pnr_detector(eta: f64, n_max: usize) -> Result<DiagonalPovm> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidTransmissivity {
            value: eta,
            expected: "(0, 1]",
        });
    }
    let binom = crate::loss::binomial_table(n_max);
    let mut diagonals = vec![vec![0.0; n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        let mut rest = 1.0;
        for k in 0..n {
            let p = binom[n][k] * eta.powi(k as i32) * (1.0 - eta).powi((n - k) as i32);
            diagonals[k][n] = p;
            rest -= p;
        }
        // The top entry of each column closes completeness exactly.
        diagonals[n][n] = rest;
    }
    let labels = (0..=n_max).map(|k| k.to_string()).collect();
    Ok(DiagonalPovm::from_parts_unchecked(n_max, labels, diagonals))
}

/// Single-outcome POVM `{I}`: discarding a mode.
pub fn discard_detector(n_max: usize) -> Povm {
    Povm::new(vec![(
        "discard".into(),
        HermitianOperator::identity(FockBasis::single_mode(n_max)),
    )])
    .expect("single outcome")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> PovmTolerances {
        PovmTolerances::uniform(1e-12)
    }

    #[test]
    fn identity_povm_passes() {
        let r = discard_detector(4).validate(tight());
        assert!(r.passed());
        assert_eq!(r.min_eigenvalue(), 1.0);
    }

    #[test]
    fn click_detector_entries() {
        let c = click_detector(1.0, 4).unwrap();
        assert_eq!(c.get("off").unwrap(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.get("on").unwrap(), &[0.0, 1.0, 1.0, 1.0, 1.0]);

        let blind = click_detector(0.0, 3).unwrap();
        assert_eq!(blind.get("off").unwrap(), &[1.0; 4]);
        assert_eq!(blind.get("on").unwrap(), &[0.0; 4]);

        let c = click_detector(0.6, 4).unwrap();
        assert!((c.get("off").unwrap()[2] - 0.16).abs() < 1e-15);
        assert!(c.validate(tight()).passed());
        assert!(click_detector(1.2, 3).is_err());
        assert!(click_detector(-0.1, 3).is_err());
    }

    #[test]
    fn click_off_entries_are_geometric() {
        let eta = 0.37;
        let c = click_detector(eta, 20).unwrap();
        let off = c.get("off").unwrap();
        for n in 1..=20 {
            assert!((off[n] / off[n - 1] - (1.0 - eta)).abs() < 1e-12);
        }
    }

    #[test]
    fn pnr_detector_entries() {
        let ideal = pnr_detector(1.0, 3).unwrap();
        for (k, d) in ideal.diagonals().iter().enumerate() {
            for (n, &x) in d.iter().enumerate() {
                assert_eq!(x, if n == k { 1.0 } else { 0.0 });
            }
        }
        let p = pnr_detector(0.5, 4).unwrap();
        assert!((p.get("1").unwrap()[2] - 0.5).abs() < 1e-15);
        assert_eq!(p.completeness_residual(), 0.0);
        assert!(p.validate(tight()).passed());
        assert!(pnr_detector(0.0, 3).is_err());
    }

    #[test]
    fn validate_reports_negative_complement() {
        let bad = DiagonalPovm::new(1, vec![("a".into(), vec![1.2, 0.5]), ("b".into(), vec![-0.2, 0.5])]).unwrap();
        let r = bad.validate(PovmTolerances::default());
        assert!(!r.positive);
        assert!(r.complete);
        assert!((r.min_eigenvalue() + 0.2).abs() < 1e-15);
        let dense = bad.to_povm().validate(PovmTolerances::default());
        assert!(!dense.passed());
        assert!((dense.min_eigenvalue() + 0.2).abs() < 1e-12);
    }

    #[test]
    fn structural_errors() {
        assert!(DiagonalPovm::new(1, vec![]).is_err());
        assert!(DiagonalPovm::new(1, vec![("a".into(), vec![1.0])]).is_err());
        assert!(DiagonalPovm::new(0, vec![("a".into(), vec![1.0]), ("a".into(), vec![0.0])]).is_err());
        let a = HermitianOperator::identity(FockBasis::single_mode(1));
        let b = HermitianOperator::identity(FockBasis::single_mode(2));
        assert!(Povm::new(vec![("a".into(), a), ("b".into(), b)]).is_err());
    }

    #[test]
    fn coarse_graining() {
        let p = pnr_detector(0.7, 3).unwrap().to_povm();
        let all: BTreeMap<_, _> = p.labels().iter().map(|l| (l.clone(), "any".to_string())).collect();
        let merged = p.coarse_grain(&all).unwrap();
        assert_eq!(merged.len(), 1);
        assert!(merged.elements()[0].max_abs_diff(&HermitianOperator::identity(p.basis().clone())) < 1e-15);

        let same: BTreeMap<_, _> = p.labels().iter().map(|l| (l.clone(), l.clone())).collect();
        assert_eq!(p.coarse_grain(&same).unwrap().max_abs_diff(&p), Some(0.0));

        let mut partial = same.clone();
        partial.remove("2");
        assert!(matches!(p.coarse_grain(&partial), Err(Error::MissingLabel(l)) if l == "2"));
    }

    #[test]
    fn truncation_keeps_leading_block() {
        let c = click_detector(0.4, 8).unwrap();
        let t = c.truncate(3).unwrap();
        assert_eq!(t.n_max(), 3);
        assert_eq!(t.get("off").unwrap(), &c.get("off").unwrap()[..4]);
        let d = c.to_povm().truncate(3).unwrap();
        assert_eq!(d.max_abs_diff(&t.to_povm()), Some(0.0));
    }
}
