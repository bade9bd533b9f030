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

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("operator has non-finite entries")]
    NonFinite,

    #[error("transmissivity {value} out of range, expected {expected}")]
    InvalidTransmissivity { value: f64, expected: &'static str },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("matrix is not unitary: deviation {0:e}")]
    NotUnitary(f64),

    #[error("invalid optical element: {0}")]
    InvalidElement(String),

    #[error("label `{0}` has no entry in the grouping")]
    MissingLabel(String),

    #[error("no interferometer chosen for outcome history {0:?}")]
    UnreachableHistory(Vec<String>),

    #[error("physical detector `{0}` is shared between virtual detectors")]
    SharedDetector(String),

    #[error("POVM is infeasible at unit transmissivity (min eigenvalue {0:e})")]
    InfeasibleAtUnity(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
