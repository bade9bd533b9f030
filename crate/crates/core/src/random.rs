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

//! Random states, unitaries and POVMs for experiments and tests.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::fock::{CMatrix, FockBasis, HermitianOperator, C64};
use crate::povm::{DiagonalPovm, Povm};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed `m x m` unitary (QR of a Ginibre matrix with the
/// diagonal phases of `R` removed).
pub fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMatrix {
    let z = gaussian_matrix(m, m, rng);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Normalized random ket supported on states with at most `max_total`
/// photons.
pub fn random_ket<R: Rng + ?Sized>(basis: &FockBasis, max_total: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..basis.dim())
        .map(|i| if basis.total(i) <= max_total { gaussian(rng) } else { C64::new(0.0, 0.0) })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Random full-rank density operator (normalized Wishart) supported on
/// states with at most `max_total` photons.
pub fn random_density<R: Rng + ?Sized>(basis: &FockBasis, max_total: usize, rng: &mut R) -> HermitianOperator {
    let d = basis.dim();
    let mut g = gaussian_matrix(d, d, rng);
    for i in 0..d {
        if basis.total(i) > max_total {
            g.row_mut(i).fill(C64::new(0.0, 0.0));
        }
    }
    let mut rho = &g * g.adjoint();
    let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    rho /= C64::new(tr, 0.0);
    let rho = (&rho + rho.adjoint()).scale(0.5);
    HermitianOperator::new(basis.clone(), rho).expect("Wishart matrices are Hermitian")
}

/// Random positive operator `G G^dag` with `G` Gaussian, scaled to unit
/// spectral norm.
pub fn random_positive<R: Rng + ?Sized>(basis: &FockBasis, rng: &mut R) -> HermitianOperator {
    let d = basis.dim();
    let g = gaussian_matrix(d, d, rng);
    let a = &g * g.adjoint();
    let a = (&a + a.adjoint()).scale(0.5);
    let top = a.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
    HermitianOperator::new(basis.clone(), a.unscale(top)).expect("Hermitian by construction")
}

/// Random dense POVM with `outcomes` elements: `S^{-1/2} A_l S^{-1/2}` with
/// `A_l` random positive and `S = sum A_l`.
pub fn random_povm<R: Rng + ?Sized>(basis: &FockBasis, outcomes: usize, rng: &mut R) -> Povm {
    let parts: Vec<CMatrix> = (0..outcomes)
        .map(|_| random_positive(basis, rng).into_matrix())
        .collect();
    let d = basis.dim();
    let mut s = CMatrix::zeros(d, d);
    for p in &parts {
        s += p;
    }
    let eig = s.symmetric_eigen();
    let inv_sqrt = DVector::from_iterator(d, eig.eigenvalues.iter().map(|&l| C64::new(l.powf(-0.5), 0.0)));
    let s_inv_half = &eig.eigenvectors * CMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.adjoint();
    let elements = parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let e = &s_inv_half * p * &s_inv_half;
            let e = (&e + e.adjoint()).scale(0.5);
            (format!("e{i}"), HermitianOperator::new(basis.clone(), e).expect("Hermitian"))
        })
        .collect();
    Povm::new(elements).expect("distinct labels")
}

/// Random diagonal POVM: each column is a random probability vector.
pub fn random_diagonal_povm<R: Rng + ?Sized>(n_max: usize, outcomes: usize, rng: &mut R) -> DiagonalPovm {
    let mut diagonals = vec![vec![0.0; n_max + 1]; outcomes];
    for n in 0..=n_max {
        let w: Vec<f64> = (0..outcomes).map(|_| rng.random::<f64>()).collect();
        let total: f64 = w.iter().sum();
        let mut rest = 1.0;
        for (k, x) in w.iter().enumerate().take(outcomes - 1) {
            let p = x / total;
            diagonals[k][n] = p;
            rest -= p;
        }
        diagonals[outcomes - 1][n] = rest.max(0.0);
    }
    let outcomes = diagonals
        .into_iter()
        .enumerate()
        .map(|(i, d)| (format!("e{i}"), d))
        .collect();
    DiagonalPovm::new(n_max, outcomes).expect("well formed")
}

/// Random photon-number partition into `outcomes` classes with `0` and `1`
/// photons always in different classes (an ideal detector of efficiency 1).
pub fn random_ideal_partition<R: Rng + ?Sized>(n_max: usize, outcomes: usize, rng: &mut R) -> DiagonalPovm {
    let outcomes = outcomes.max(2);
    let mut diagonals = vec![vec![0.0; n_max + 1]; outcomes];
    diagonals[0][0] = 1.0;
    if n_max >= 1 {
        diagonals[1 + rng.random_range(0..outcomes - 1)][1] = 1.0;
    }
    for n in 2..=n_max {
        diagonals[rng.random_range(0..outcomes)][n] = 1.0;
    }
    let outcomes = diagonals
        .into_iter()
        .enumerate()
        .map(|(i, d)| (format!("c{i}"), d))
        .collect();
    DiagonalPovm::new(n_max, outcomes).expect("well formed")
}
