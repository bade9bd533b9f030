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

//! Passive linear optics: mode unitaries, their decomposition into
//! beamsplitters and phase shifters, and the induced Fock-space unitary.
//!
//! Convention: an interferometer `W` maps creation operators as
//! `U a_j^dag U^dag = sum_i W_ij a_i^dag`, so the one-photon sector of the
//! lift reproduces `W` itself (see [`single_photon_block`]). A beamsplitter of
//! angle `theta` on modes `(p, q)` is `exp(theta (a_q^dag a_p - a_p^dag a_q))`;
//! on mode amplitudes it is the rotation `[[cos, -sin], [sin, cos]]`, so
//! `cos^2 theta` is its transmissivity from `p` to `p`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{max_abs_diff, CMatrix, FockBasis, C64};

/// Tolerance on `max |W^dag W - I|` when accepting an interferometer.
pub const UNITARITY_TOL: f64 = 1e-10;

const TWO_PI: f64 = 2.0 * PI;

/// Elementary passive element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoModeElement {
    Beamsplitter { modes: [usize; 2], theta: f64 },
    Phase { mode: usize, phi: f64 },
}

impl TwoModeElement {
    /// Beamsplitter with power transmissivity `t` (`cos^2 theta = t`).
    pub fn beamsplitter_with_transmissivity(p: usize, q: usize, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidTransmissivity {
                value: t,
                expected: "[0, 1]",
            });
        }
        Ok(TwoModeElement::Beamsplitter {
            modes: [p, q],
            theta: t.sqrt().acos(),
        })
    }

    pub fn check(&self, modes: usize) -> Result<()> {
        match *self {
            TwoModeElement::Beamsplitter { modes: [p, q], theta } => {
                if p >= modes || q >= modes || p == q {
                    return Err(Error::InvalidElement(format!(
                        "beamsplitter on modes ({p}, {q}) in a {modes}-mode network"
                    )));
                }
                if !(0.0..=FRAC_PI_2).contains(&theta) {
                    return Err(Error::InvalidElement(format!("beamsplitter angle {theta} outside [0, pi/2]")));
                }
            }
            TwoModeElement::Phase { mode, phi } => {
                if mode >= modes {
                    return Err(Error::InvalidElement(format!("phase on mode {mode} in a {modes}-mode network")));
                }
                if !(0.0..TWO_PI).contains(&phi) {
                    return Err(Error::InvalidElement(format!("phase {phi} outside [0, 2pi)")));
                }
            }
        }
        Ok(())
    }

    /// Action on mode amplitudes.
    pub fn mode_matrix(&self, modes: usize) -> CMatrix {
        let mut m = CMatrix::identity(modes, modes);
        match *self {
            TwoModeElement::Beamsplitter { modes: [p, q], theta } => {
                let (s, c) = theta.sin_cos();
                m[(p, p)] = C64::new(c, 0.0);
                m[(p, q)] = C64::new(-s, 0.0);
                m[(q, p)] = C64::new(s, 0.0);
                m[(q, q)] = C64::new(c, 0.0);
            }
            TwoModeElement::Phase { mode, phi } => {
                m[(mode, mode)] = C64::from_polar(1.0, phi);
            }
        }
        m
    }
}

fn normalize_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// `M x M` unitary acting on mode annihilation operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferometer {
    matrix: CMatrix,
}

/// `max |W^dag W - I|`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

impl Interferometer {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "interferometer matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Interferometer { matrix })
    }

    pub fn identity(modes: usize) -> Self {
        Interferometer {
            matrix: CMatrix::identity(modes, modes),
        }
    }

    /// Product of elements in application order (first element acts first).
    pub fn from_elements(modes: usize, elements: &[TwoModeElement]) -> Result<Self> {
        let mut w = CMatrix::identity(modes, modes);
        for e in elements {
            e.check(modes)?;
            w = e.mode_matrix(modes) * w;
        }
        Ok(Interferometer { matrix: w })
    }

    /// Two-mode-in-`modes` beamsplitter of transmissivity `t` between `p`
    /// and `q`.
    pub fn beamsplitter(modes: usize, p: usize, q: usize, t: f64) -> Result<Self> {
        Self::from_elements(modes, &[TwoModeElement::beamsplitter_with_transmissivity(p, q, t)?])
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `self * other`: `other` acts first.
    pub fn compose(&self, other: &Interferometer) -> Result<Interferometer> {
        if self.modes() != other.modes() {
            return Err(Error::DimensionMismatch("composing interferometers of different size".into()));
        }
        Ok(Interferometer {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `W ⊕ I`: acts on the first `self.modes()` modes of a larger network.
    pub fn embed(&self, modes: usize) -> Result<Interferometer> {
        if modes < self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed {} modes into {modes}",
                self.modes()
            )));
        }
        let mut m = CMatrix::identity(modes, modes);
        m.view_mut((0, 0), (self.modes(), self.modes())).copy_from(&self.matrix);
        Ok(Interferometer { matrix: m })
    }
}

/// Elements in application order followed by output phases, such that
/// `W = diag(e^{i output_phases}) * E_L * ... * E_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub modes: usize,
    pub elements: Vec<TwoModeElement>,
    pub output_phases: Vec<f64>,
}

impl Decomposition {
    pub fn recompose(&self) -> CMatrix {
        let mut w = Interferometer::from_elements(self.modes, &self.elements)
            .expect("decomposition elements are valid")
            .matrix;
        for (i, &phi) in self.output_phases.iter().enumerate() {
            let z = C64::from_polar(1.0, phi);
            for j in 0..self.modes {
                w[(i, j)] *= z;
            }
        }
        w
    }

    /// Flat element list; nonzero output phases become trailing phase
    /// elements.
    pub fn to_elements(&self) -> Vec<TwoModeElement> {
        let mut out = self.elements.clone();
        out.extend(
            self.output_phases
                .iter()
                .enumerate()
                .filter(|(_, &phi)| phi != 0.0)
                .map(|(mode, &phi)| TwoModeElement::Phase { mode, phi }),
        );
        out
    }
}

/// Entries below this modulus are treated as already nulled.
const NULL_TOL: f64 = 1e-14;

/// Triangular nulling of `W^dag` with nearest-neighbour beamsplitters, each
/// preceded by a phase on its lower mode.
pub fn decompose(w: &Interferometer) -> Decomposition {
    let m = w.modes();
    let mut v = w.matrix.adjoint();
    let mut elements = Vec::new();
    for col in 0..m {
        for row in (col + 1..m).rev() {
            let (p, q) = (row - 1, row);
            let a = v[(p, col)];
            let b = v[(q, col)];
            if b.norm() <= NULL_TOL {
                continue;
            }
            let theta = b.norm().atan2(a.norm());
            let phi = normalize_phase(PI + a.arg() - b.arg());
            if phi != 0.0 {
                let e = TwoModeElement::Phase { mode: q, phi };
                v = e.mode_matrix(m) * v;
                elements.push(e);
            }
            let e = TwoModeElement::Beamsplitter { modes: [p, q], theta };
            v = e.mode_matrix(m) * v;
            elements.push(e);
        }
    }
    // v is now diagonal: W^dag = G^-1 D, so W = D^dag G.
    let output_phases = (0..m).map(|i| normalize_phase(-v[(i, i)].arg())).collect();
    Decomposition {
        modes: m,
        elements,
        output_phases,
    }
}

fn beamsplitter_blocks(theta: f64, cutoff: usize) -> Vec<DMatrix<f64>> {
    (0..=cutoff)
        .map(|s| {
            // Basis |s - i, i> on (p, q), i = 0..=s.
            let mut k = DMatrix::<f64>::zeros(s + 1, s + 1);
            for i in 0..=s {
                if i < s {
                    k[(i + 1, i)] = (((s - i) * (i + 1)) as f64).sqrt();
                }
                if i > 0 {
                    k[(i - 1, i)] = -((i * (s - i + 1)) as f64).sqrt();
                }
            }
            (k * theta).exp()
        })
        .collect()
}

/// Left-multiplies `u` by the lift of one element.
fn apply_element(u: &mut CMatrix, element: &TwoModeElement, basis: &FockBasis) {
    match *element {
        TwoModeElement::Phase { mode, phi } => {
            for (i, s) in basis.states().enumerate() {
                let z = C64::from_polar(1.0, phi * s[mode] as f64);
                for j in 0..u.ncols() {
                    u[(i, j)] *= z;
                }
            }
        }
        TwoModeElement::Beamsplitter { modes: [p, q], theta } => {
            let blocks = beamsplitter_blocks(theta, basis.cutoff());
            let cols = u.ncols();
            let mut occupation = vec![0; basis.modes()];
            for s in basis.states() {
                if s[q] != 0 {
                    continue;
                }
                let total = s[p];
                if total == 0 {
                    continue;
                }
                occupation.copy_from_slice(s);
                let rows: Vec<usize> = (0..=total)
                    .map(|i| {
                        occupation[p] = total - i;
                        occupation[q] = i;
                        basis.index_of(&occupation).expect("same total photon number")
                    })
                    .collect();
                let block = &blocks[total];
                let old: Vec<Vec<C64>> = rows.iter().map(|&r| (0..cols).map(|c| u[(r, c)]).collect()).collect();
                for (bi, &r) in rows.iter().enumerate() {
                    for c in 0..cols {
                        let mut acc = C64::new(0.0, 0.0);
                        for (bj, row) in old.iter().enumerate() {
                            acc += row[c] * block[(bi, bj)];
                        }
                        u[(r, c)] = acc;
                    }
                }
            }
        }
    }
}

/// Fock-space unitary of an element sequence (first element acts first).
pub fn lift_elements(elements: &[TwoModeElement], basis: &FockBasis) -> Result<CMatrix> {
    let d = basis.dim();
    let mut u = CMatrix::identity(d, d);
    for e in elements {
        e.check(basis.modes())?;
        apply_element(&mut u, e, basis);
    }
    Ok(u)
}

/// Fock-space unitary induced by `w` on `basis`. Total photon number is
/// conserved exactly: every element acts within fixed-total blocks.
pub fn lift(w: &Interferometer, basis: &FockBasis) -> Result<CMatrix> {
    if w.modes() != basis.modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode interferometer on a {}-mode basis",
            w.modes(),
            basis.modes()
        )));
    }
    lift_elements(&decompose(w).to_elements(), basis)
}

/// The one-photon sector of a lifted unitary, indexed by mode.
pub fn single_photon_block(u: &CMatrix, basis: &FockBasis) -> Result<CMatrix> {
    if basis.cutoff() < 1 {
        return Err(Error::InvalidBasis("one-photon block needs cutoff >= 1".into()));
    }
    if u.nrows() != basis.dim() || u.ncols() != basis.dim() {
        return Err(Error::DimensionMismatch("unitary does not match basis".into()));
    }
    let m = basis.modes();
    let idx: Vec<usize> = (0..m)
        .map(|i| {
            let mut occ = vec![0; m];
            occ[i] = 1;
            basis.index_of(&occ).expect("cutoff >= 1")
        })
        .collect();
    Ok(CMatrix::from_fn(m, m, |i, j| u[(idx[i], idx[j])]))
}
