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

//! JSON file formats for POVMs and experiments.
//!
//! Complex numbers are `[re, im]` pairs. A POVM file lists outcomes either as
//! `{"label", "diagonal": [..]}` or `{"label", "matrix": [[[re, im], ..], ..]}`;
//! a file whose outcomes are all diagonal loads as a [`DiagonalPovm`].
//! Relative paths inside experiment files resolve against the working
//! directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::efficiency::{Detector, EfficiencyOptions};
use crate::error::{Error, Result};
use crate::fock::{CMatrix, FockBasis, HermitianOperator, C64};
use crate::interferometer::{Interferometer, TwoModeElement};
use crate::povm::{click_detector, pnr_detector, DiagonalPovm, Povm, PovmTolerances, ValidationReport};
use crate::virtual_detector::{
    AdaptiveDetectorSpec, AdaptivePolicy, AdaptiveStage, Ancilla, AncillaChoice, DetectorKind, DetectorSlot,
    Grouping, InterferometerChoice, NogoConfig, PoolDetector, SlotDetector, VirtualDetectorSpec,
    VirtualDetectorTemplate,
};

pub const POVM_SCHEMA: u32 = 1;

/// Off-diagonal entries below this are dropped when writing compact files.
pub const DIAGONAL_WRITE_TOL: f64 = 1e-13;

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<ComplexRows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub schema: u32,
    pub cutoff: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub outcomes: Vec<OutcomeEntry>,
}

/// A POVM as read from disk.
#[derive(Clone, Debug)]
pub enum LoadedPovm {
    Diagonal(DiagonalPovm),
    Dense(Povm),
}

impl LoadedPovm {
    pub fn to_povm(&self) -> Povm {
        match self {
            LoadedPovm::Diagonal(d) => d.to_povm(),
            LoadedPovm::Dense(p) => p.clone(),
        }
    }

    pub fn cutoff(&self) -> usize {
        match self {
            LoadedPovm::Diagonal(d) => d.n_max(),
            LoadedPovm::Dense(p) => p.basis().cutoff(),
        }
    }

    pub fn validate(&self, tol: PovmTolerances) -> ValidationReport {
        match self {
            LoadedPovm::Diagonal(d) => d.validate(tol),
            LoadedPovm::Dense(p) => p.validate(tol),
        }
    }

    /// Diagonal form when every element is diagonal up to `tol`.
    pub fn compact(povm: &Povm, tol: f64) -> LoadedPovm {
        let diagonal = povm.elements().iter().all(|e| {
            let n = e.dim();
            (0..n).all(|i| (0..n).all(|j| i == j || e.matrix()[(i, j)].norm() <= tol))
        });
        if diagonal && povm.basis().is_single_mode() {
            let outcomes = povm.outcomes().map(|(l, e)| (l.to_string(), e.diagonal())).collect();
            if let Ok(d) = DiagonalPovm::new(povm.basis().cutoff(), outcomes) {
                return LoadedPovm::Diagonal(d);
            }
        }
        LoadedPovm::Dense(povm.clone())
    }

    pub fn into_slot_detector(self) -> SlotDetector {
        match self {
            LoadedPovm::Diagonal(d) => SlotDetector::Diagonal(d),
            LoadedPovm::Dense(p) => SlotDetector::Dense(p),
        }
    }
}

fn complex_rows(m: &CMatrix) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_rows(rows: &ComplexRows, what: &str) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::Config(format!("{what}: ragged or empty matrix")));
    }
    Ok(CMatrix::from_fn(n, rows[0].len(), |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn complex_vec(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|z| C64::new(z[0], z[1])).collect()
}

impl PovmFile {
    pub fn from_loaded(p: &LoadedPovm) -> PovmFile {
        let (cutoff, outcomes) = match p {
            LoadedPovm::Diagonal(d) => (
                d.n_max(),
                d.outcomes()
                    .map(|(l, v)| OutcomeEntry {
                        label: l.to_string(),
                        diagonal: Some(v.to_vec()),
                        matrix: None,
                    })
                    .collect(),
            ),
            LoadedPovm::Dense(p) => (
                p.basis().cutoff(),
                p.outcomes()
                    .map(|(l, e)| OutcomeEntry {
                        label: l.to_string(),
                        diagonal: None,
                        matrix: Some(complex_rows(e.matrix())),
                    })
                    .collect(),
            ),
        };
        PovmFile {
            schema: POVM_SCHEMA,
            cutoff,
            metadata: BTreeMap::new(),
            outcomes,
        }
    }

    /// Structural checks only; positivity and completeness are left to
    /// [`LoadedPovm::validate`].
    pub fn to_loaded(&self) -> Result<LoadedPovm> {
        if self.schema != POVM_SCHEMA {
            return Err(Error::Config(format!("unsupported POVM schema {}", self.schema)));
        }
        let d = self.cutoff + 1;
        if self.outcomes.iter().all(|o| o.diagonal.is_some() && o.matrix.is_none()) {
            let outcomes = self
                .outcomes
                .iter()
                .map(|o| (o.label.clone(), o.diagonal.clone().expect("checked")))
                .collect();
            return Ok(LoadedPovm::Diagonal(DiagonalPovm::new(self.cutoff, outcomes)?));
        }
        let basis = FockBasis::single_mode(self.cutoff);
        let mut elements = Vec::with_capacity(self.outcomes.len());
        for o in &self.outcomes {
            let m = match (&o.diagonal, &o.matrix) {
                (Some(diag), None) => {
                    if diag.len() != d {
                        return Err(Error::DimensionMismatch(format!(
                            "outcome '{}' has {} diagonal entries, expected {d}",
                            o.label,
                            diag.len()
                        )));
                    }
                    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                        d,
                        diag.iter().map(|&x| C64::new(x, 0.0)),
                    ))
                }
                (None, Some(rows)) => {
                    let m = matrix_from_rows(rows, &format!("outcome '{}'", o.label))?;
                    if m.nrows() != d || m.ncols() != d {
                        return Err(Error::DimensionMismatch(format!(
                            "outcome '{}' is {}x{}, expected {d}x{d}",
                            o.label,
                            m.nrows(),
                            m.ncols()
                        )));
                    }
                    m
                }
                _ => {
                    return Err(Error::Config(format!(
                        "outcome '{}' needs exactly one of 'diagonal' or 'matrix'",
                        o.label
                    )))
                }
            };
            elements.push((o.label.clone(), HermitianOperator::new(basis.clone(), m)?));
        }
        Ok(LoadedPovm::Dense(Povm::new(elements)?))
    }
}

pub fn parse_povm(text: &str) -> Result<(LoadedPovm, BTreeMap<String, serde_json::Value>)> {
    let file: PovmFile = serde_json::from_str(text)?;
    Ok((file.to_loaded()?, file.metadata))
}

pub fn load_povm(path: &Path) -> Result<(LoadedPovm, BTreeMap<String, serde_json::Value>)> {
    parse_povm(&fs::read_to_string(path)?).map_err(|e| match e {
        Error::Json(j) => Error::Config(format!("{}: {j}", path.display())),
        e => e,
    })
}

pub fn povm_to_string(p: &LoadedPovm, metadata: BTreeMap<String, serde_json::Value>) -> Result<String> {
    let mut f = PovmFile::from_loaded(p);
    f.metadata = metadata;
    let mut s = serde_json::to_string_pretty(&f)?;
    s.push('\n');
    Ok(s)
}

pub fn save_povm(path: &Path, p: &LoadedPovm, metadata: BTreeMap<String, serde_json::Value>) -> Result<()> {
    fs::write(path, povm_to_string(p, metadata)?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Experiment files

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InterferometerConfig {
    /// Fresh Haar-random unitary (no-go experiments only).
    Haar,
    Identity { modes: usize },
    Matrix(ComplexRows),
    /// Elements in application order.
    Elements { modes: usize, elements: Vec<TwoModeElement> },
}

impl InterferometerConfig {
    pub fn build(&self) -> Result<Interferometer> {
        match self {
            InterferometerConfig::Haar => Err(Error::Config("a Haar interferometer needs a random draw".into())),
            InterferometerConfig::Identity { modes } => Ok(Interferometer::identity(*modes)),
            InterferometerConfig::Matrix(rows) => Interferometer::new(matrix_from_rows(rows, "interferometer")?),
            InterferometerConfig::Elements { modes, elements } => Interferometer::from_elements(*modes, elements),
        }
    }

    fn choice(&self) -> Result<InterferometerChoice> {
        match self {
            InterferometerConfig::Haar => Ok(InterferometerChoice::Haar),
            other => Ok(InterferometerChoice::Fixed(other.build()?)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AncillaConfig {
    Vacuum,
    /// Fock coefficients per ancillary mode.
    Product(Vec<Vec<[f64; 2]>>),
    /// Density matrix on the ancillary modes with total cutoff `cutoff`.
    Joint { cutoff: usize, matrix: ComplexRows },
    RandomProduct,
    RandomJoint,
}

impl AncillaConfig {
    fn build(&self, ancilla_modes: usize) -> Result<Ancilla> {
        match self {
            AncillaConfig::Vacuum => Ok(Ancilla::Vacuum),
            AncillaConfig::Product(kets) => Ok(Ancilla::ProductKets(kets.iter().map(|k| complex_vec(k)).collect())),
            AncillaConfig::Joint { cutoff, matrix } => {
                let basis = FockBasis::new(ancilla_modes, *cutoff)?;
                let m = matrix_from_rows(matrix, "joint ancilla")?;
                if m.nrows() != basis.dim() || m.ncols() != basis.dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "joint ancilla is {}x{}, expected {}x{}",
                        m.nrows(),
                        m.ncols(),
                        basis.dim(),
                        basis.dim()
                    )));
                }
                Ok(Ancilla::Joint(HermitianOperator::new(basis, m)?))
            }
            AncillaConfig::RandomProduct | AncillaConfig::RandomJoint => {
                Err(Error::Config("random ancillas are for no-go experiments only".into()))
            }
        }
    }

    fn choice(&self, ancilla_modes: usize) -> Result<AncillaChoice> {
        Ok(match self {
            AncillaConfig::RandomProduct => AncillaChoice::RandomProduct,
            AncillaConfig::RandomJoint => AncillaChoice::RandomJoint,
            AncillaConfig::Vacuum => AncillaChoice::Vacuum,
            other => AncillaChoice::Fixed(other.build(ancilla_modes)?),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DetectorConfig {
    /// Cutoff defaults to the joint cutoff.
    Click { eta: f64, #[serde(default)] cutoff: Option<usize> },
    Pnr { eta: f64, #[serde(default)] cutoff: Option<usize> },
    File(PathBuf),
    Discard,
}

impl DetectorConfig {
    fn build(&self, total_cutoff: usize) -> Result<SlotDetector> {
        Ok(match self {
            DetectorConfig::Click { eta, cutoff } => {
                SlotDetector::Diagonal(click_detector(*eta, cutoff.unwrap_or(total_cutoff))?)
            }
            DetectorConfig::Pnr { eta, cutoff } => {
                SlotDetector::Diagonal(pnr_detector(*eta, cutoff.unwrap_or(total_cutoff))?)
            }
            DetectorConfig::File(path) => load_povm(path)?.0.into_slot_detector(),
            DetectorConfig::Discard => SlotDetector::Discard,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotConfig {
    pub mode: usize,
    pub detector: DetectorConfig,
    #[serde(default)]
    pub nominal_efficiency: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupEntry {
    pub outcomes: Vec<String>,
    pub label: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupingConfig {
    #[default]
    Joint,
    Table {
        entries: Vec<GroupEntry>,
        #[serde(default)]
        default: Option<String>,
    },
}

impl GroupingConfig {
    fn build(&self) -> Result<Grouping> {
        match self {
            GroupingConfig::Joint => Ok(Grouping::Joint),
            GroupingConfig::Table { entries, default } => {
                let mut map = BTreeMap::new();
                for e in entries {
                    if map.insert(e.outcomes.clone(), e.label.clone()).is_some() {
                        return Err(Error::Config(format!("outcome tuple {:?} grouped twice", e.outcomes)));
                    }
                }
                Ok(Grouping::Table {
                    entries: map,
                    default: default.clone(),
                })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryEntry {
    /// Labels observed so far, in measurement order.
    pub history: Vec<String>,
    pub interferometer: InterferometerConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    #[serde(default)]
    pub table: Vec<HistoryEntry>,
    #[serde(default)]
    pub default: Option<InterferometerConfig>,
}

impl StageConfig {
    fn build(&self) -> Result<AdaptiveStage> {
        let mut table = BTreeMap::new();
        for e in &self.table {
            if table.insert(e.history.clone(), e.interferometer.build()?).is_some() {
                return Err(Error::Config(format!("history {:?} listed twice", e.history)));
            }
        }
        let default = self.default.as_ref().map(InterferometerConfig::build).transpose()?;
        let modes = table
            .values()
            .chain(default.iter())
            .map(Interferometer::modes)
            .next()
            .ok_or_else(|| Error::Config("adaptive stage without interferometers".into()))?;
        Ok(AdaptiveStage { modes, table, default })
    }
}

/// A (possibly adaptive) virtual detector.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirtualDetectorConfig {
    /// For adaptive detectors, the initial interferometer.
    pub interferometer: InterferometerConfig,
    #[serde(default = "vacuum")]
    pub ancilla: AncillaConfig,
    pub slots: Vec<SlotConfig>,
    #[serde(default)]
    pub grouping: GroupingConfig,
    /// Stages on `M-1, ..., 2` modes; present only for adaptive detectors.
    #[serde(default)]
    pub adaptive: Option<Vec<StageConfig>>,
}

fn vacuum() -> AncillaConfig {
    AncillaConfig::Vacuum
}

/// Either kind of virtual detector, ready to evaluate.
#[derive(Clone, Debug)]
pub enum BuiltDetector {
    Static(VirtualDetectorSpec),
    Adaptive(AdaptiveDetectorSpec),
}

impl BuiltDetector {
    pub fn effective_povm(&self) -> Result<Povm> {
        match self {
            BuiltDetector::Static(s) => crate::virtual_detector::effective_povm(s),
            BuiltDetector::Adaptive(s) => crate::virtual_detector::effective_povm_adaptive(s),
        }
    }

    pub fn max_nominal_efficiency(&self) -> Option<f64> {
        let slots = match self {
            BuiltDetector::Static(s) => &s.slots,
            BuiltDetector::Adaptive(s) => &s.slots,
        };
        slots.iter().filter_map(|s| s.nominal_efficiency).reduce(f64::max)
    }
}

impl VirtualDetectorConfig {
    pub fn build(&self, signal_cutoff: usize, total_cutoff: usize) -> Result<BuiltDetector> {
        let w = self.interferometer.build()?;
        let ancilla = self.ancilla.build(w.modes().saturating_sub(1))?;
        let slots = self
            .slots
            .iter()
            .map(|s| {
                let mut slot = DetectorSlot::new(s.mode, s.detector.build(total_cutoff)?);
                slot.nominal_efficiency = s.nominal_efficiency;
                Ok(slot)
            })
            .collect::<Result<Vec<_>>>()?;
        let grouping = self.grouping.build()?;
        Ok(match &self.adaptive {
            None => BuiltDetector::Static(VirtualDetectorSpec {
                interferometer: w,
                ancilla,
                slots,
                grouping,
                signal_cutoff,
                total_cutoff,
            }),
            Some(stages) => BuiltDetector::Adaptive(AdaptiveDetectorSpec {
                policy: AdaptivePolicy {
                    initial: w,
                    stages: stages.iter().map(StageConfig::build).collect::<Result<_>>()?,
                },
                ancilla,
                slots,
                grouping,
                signal_cutoff,
                total_cutoff,
            }),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PoolKindConfig {
    Click,
    Pnr,
    RandomDiagonal { outcomes: usize },
    Random,
    File(PathBuf),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolDetectorConfig {
    pub id: String,
    pub kind: PoolKindConfig,
    /// Required for every kind except `file`.
    #[serde(default)]
    pub efficiency: Option<f64>,
    /// Required for `file` detectors.
    #[serde(default)]
    pub nominal_efficiency: Option<f64>,
}

impl PoolDetectorConfig {
    fn build(&self) -> Result<PoolDetector> {
        let kind = match &self.kind {
            PoolKindConfig::Click => DetectorKind::Click,
            PoolKindConfig::Pnr => DetectorKind::PhotonNumberResolving,
            PoolKindConfig::RandomDiagonal { outcomes } => DetectorKind::RandomDiagonal { outcomes: *outcomes },
            PoolKindConfig::Random => DetectorKind::Random,
            PoolKindConfig::File(path) => DetectorKind::Fixed(load_povm(path)?.0.into_slot_detector()),
        };
        let efficiency = match (&self.kind, self.efficiency, self.nominal_efficiency) {
            (_, Some(e), _) => e,
            (PoolKindConfig::File(_), None, Some(n)) => n,
            (PoolKindConfig::File(_), None, None) => {
                return Err(Error::Config(format!(
                    "file detector '{}' needs a nominal efficiency",
                    self.id
                )))
            }
            (_, None, _) => return Err(Error::Config(format!("detector '{}' needs an efficiency", self.id))),
        };
        Ok(PoolDetector {
            id: self.id.clone(),
            kind,
            efficiency,
            nominal_efficiency: self.nominal_efficiency,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateConfig {
    pub interferometer: InterferometerConfig,
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default = "random_joint")]
    pub ancilla: AncillaConfig,
    pub pool: Vec<PoolDetectorConfig>,
}

fn random_joint() -> AncillaConfig {
    AncillaConfig::RandomJoint
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NogoSection {
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "two")]
    pub ancilla_max_photons: usize,
    #[serde(default)]
    pub random_efficiencies: bool,
    pub virtual_detectors: Vec<TemplateConfig>,
}

fn two() -> usize {
    2
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    #[serde(default = "default_bisection")]
    pub bisection_tol: f64,
    #[serde(default = "default_pos")]
    pub pos_tol: f64,
}

fn default_bisection() -> f64 {
    EfficiencyOptions::default().bisection_tol
}

fn default_pos() -> f64 {
    EfficiencyOptions::default().pos_tol
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        TolerancesConfig {
            bisection_tol: default_bisection(),
            pos_tol: default_pos(),
        }
    }
}

impl TolerancesConfig {
    pub fn options(&self) -> Result<EfficiencyOptions> {
        if !(self.bisection_tol > 0.0 && self.pos_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(EfficiencyOptions {
            bisection_tol: self.bisection_tol,
            pos_tol: self.pos_tol,
        })
    }
}

/// Top-level experiment file: a virtual detector to simulate, a no-go
/// experiment, or both.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub signal_cutoff: usize,
    pub total_cutoff: usize,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    #[serde(default)]
    pub virtual_detector: Option<VirtualDetectorConfig>,
    #[serde(default)]
    pub nogo: Option<NogoSection>,
}

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn virtual_detector(&self) -> Result<BuiltDetector> {
        self.virtual_detector
            .as_ref()
            .ok_or_else(|| Error::Config("experiment has no 'virtual_detector' section".into()))?
            .build(self.signal_cutoff, self.total_cutoff)
    }

    /// No-go configuration; `trials` and `seed` override the file.
    pub fn nogo(&self, trials: Option<usize>, seed: Option<u64>) -> Result<NogoConfig> {
        let section = self
            .nogo
            .as_ref()
            .ok_or_else(|| Error::Config("experiment has no 'nogo' section".into()))?;
        let templates = section
            .virtual_detectors
            .iter()
            .map(|t| {
                let modes = t.pool.len();
                Ok(VirtualDetectorTemplate {
                    interferometer: t.interferometer.choice()?,
                    adaptive: t.adaptive,
                    ancilla: t.ancilla.choice(modes.saturating_sub(1))?,
                    pool: t.pool.iter().map(PoolDetectorConfig::build).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NogoConfig {
            templates,
            trials: trials.or(section.trials).unwrap_or(DEFAULT_TRIALS),
            seed: seed.or(section.seed).unwrap_or(DEFAULT_SEED),
            total_cutoff: self.total_cutoff,
            signal_cutoff: self.signal_cutoff,
            ancilla_max_photons: section.ancilla_max_photons,
            options: self.tolerances.options()?,
            random_efficiencies: section.random_efficiencies,
        })
    }
}

impl Detector for LoadedPovm {
    fn cutoff(&self) -> usize {
        LoadedPovm::cutoff(self)
    }

    fn validation(&self, tol: PovmTolerances) -> ValidationReport {
        self.validate(tol)
    }

    fn inverse_min_eigenvalue(&self, eta: crate::loss::Transmissivity) -> Result<f64> {
        match self {
            LoadedPovm::Diagonal(d) => d.inverse_min_eigenvalue(eta),
            LoadedPovm::Dense(p) => p.inverse_min_eigenvalue(eta),
        }
    }

    fn truncated(&self, n_max: usize) -> Result<Self> {
        Ok(match self {
            LoadedPovm::Diagonal(d) => LoadedPovm::Diagonal(d.truncate(n_max)?),
            LoadedPovm::Dense(p) => LoadedPovm::Dense(p.truncate(n_max)?),
        })
    }
}
