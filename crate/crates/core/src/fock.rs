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

//! Truncated Fock spaces and dense operators on them.
//!
//! A [`FockBasis`] is the span of occupation states `|n_1, ..., n_M>` whose
//! total photon number is at most a cutoff `N`. Truncating by total number
//! (rather than per mode) keeps passive interferometers exactly block
//! diagonal. States are ordered by total photon number, and within one total
//! in descending lexicographic order, so a single-mode basis is indexed by
//! photon number and the one-photon sector lists modes in order.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Default tolerance on `max |X_ij - conj(X_ji)|` for Hermitian operators.
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-9;

struct BasisTable {
    modes: usize,
    cutoff: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

/// Multimode Fock basis truncated by total photon number.
#[derive(Clone)]
pub struct FockBasis {
    table: Arc<BasisTable>,
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidBasis("a basis needs at least one mode".into()));
        }
        let mut states = Vec::new();
        for total in 0..=cutoff {
            compositions(total, modes, &mut Vec::with_capacity(modes), &mut states);
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(FockBasis {
            table: Arc::new(BasisTable {
                modes,
                cutoff,
                states,
                index,
            }),
        })
    }

    /// Single mode with photon numbers `0..=n_max`.
    pub fn single_mode(n_max: usize) -> Self {
        FockBasis::new(1, n_max).expect("one mode is always valid")
    }

    pub fn modes(&self) -> usize {
        self.table.modes
    }

    /// Maximum total photon number.
    pub fn cutoff(&self) -> usize {
        self.table.cutoff
    }

    pub fn dim(&self) -> usize {
        self.table.states.len()
    }

    pub fn is_single_mode(&self) -> bool {
        self.table.modes == 1
    }

    pub fn state(&self, index: usize) -> &[usize] {
        &self.table.states[index]
    }

    pub fn states(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.table.states.iter().map(Vec::as_slice)
    }

    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        self.table.index.get(occupation).copied()
    }

    pub fn total(&self, index: usize) -> usize {
        self.table.states[index].iter().sum()
    }

    pub fn vacuum_index(&self) -> usize {
        0
    }
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.modes() == other.modes() && self.cutoff() == other.cutoff()
    }
}

impl Eq for FockBasis {}

impl fmt::Debug for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockBasis")
            .field("modes", &self.modes())
            .field("cutoff", &self.cutoff())
            .field("dim", &self.dim())
            .finish()
    }
}

/// Largest `|X_ij - conj(X_ji)|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Dense Hermitian matrix on a truncated Fock space.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    basis: FockBasis,
    matrix: CMatrix,
    tol: f64,
}

impl HermitianOperator {
    pub fn new(basis: FockBasis, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(basis, matrix, DEFAULT_HERMITICITY_TOL)
    }

    pub fn with_tolerance(basis: FockBasis, matrix: CMatrix, tol: f64) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a basis of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > tol {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tol,
            });
        }
        Ok(HermitianOperator { basis, matrix, tol })
    }

    pub fn identity(basis: FockBasis) -> Self {
        let d = basis.dim();
        HermitianOperator {
            basis,
            matrix: CMatrix::identity(d, d),
            tol: DEFAULT_HERMITICITY_TOL,
        }
    }

    pub fn zeros(basis: FockBasis) -> Self {
        let d = basis.dim();
        HermitianOperator {
            basis,
            matrix: CMatrix::zeros(d, d),
            tol: DEFAULT_HERMITICITY_TOL,
        }
    }

    pub fn from_diagonal(basis: FockBasis, diagonal: &[f64]) -> Result<Self> {
        if diagonal.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "diagonal of length {} on a basis of dimension {}",
                diagonal.len(),
                basis.dim()
            )));
        }
        let v = nalgebra::DVector::from_iterator(
            diagonal.len(),
            diagonal.iter().map(|&x| C64::new(x, 0.0)),
        );
        Self::new(basis, CMatrix::from_diagonal(&v))
    }

    /// `|psi><psi|` for an (unnormalized) ket.
    pub fn projector(basis: FockBasis, ket: &[C64]) -> Result<Self> {
        if ket.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "ket of length {} on a basis of dimension {}",
                ket.len(),
                basis.dim()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(ket);
        Self::new(basis, &v * v.adjoint())
    }

    /// `|n><n|` for an occupation tuple.
    pub fn fock_projector(basis: FockBasis, occupation: &[usize]) -> Result<Self> {
        let i = basis.index_of(occupation).ok_or_else(|| {
            Error::InvalidBasis(format!("occupation {occupation:?} is outside the basis"))
        })?;
        let mut m = CMatrix::zeros(basis.dim(), basis.dim());
        m[(i, i)] = C64::new(1.0, 0.0);
        Ok(HermitianOperator {
            basis,
            matrix: m,
            tol: DEFAULT_HERMITICITY_TOL,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn hermiticity_tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Re Tr[rho X]`.
    pub fn expectation(&self, rho: &HermitianOperator) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (rho.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        acc
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Leading block on photon numbers `0..=n_max` of a single-mode operator.
    pub fn truncate(&self, n_max: usize) -> Result<HermitianOperator> {
        if !self.basis.is_single_mode() || n_max > self.basis.cutoff() {
            return Err(Error::InvalidBasis(format!(
                "cannot truncate {:?} to cutoff {n_max}",
                self.basis
            )));
        }
        let d = n_max + 1;
        Ok(HermitianOperator {
            basis: FockBasis::single_mode(n_max),
            matrix: self.matrix.view((0, 0), (d, d)).into_owned(),
            tol: self.tol,
        })
    }

    /// Hermitian part `(X + X^dagger)/2`.
    pub fn symmetrized(&self) -> CMatrix {
        (&self.matrix + self.matrix.adjoint()).scale(0.5)
    }

    /// Checks that this is a density operator within `tol`: unit trace and
    /// minimum eigenvalue at least `-tol`.
    pub fn check_density(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
        }
        let min = min_eigenvalue(self)?;
        if min < -tol {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(basis: FockBasis, matrix: CMatrix) -> Self {
        HermitianOperator {
            basis,
            matrix,
            tol: DEFAULT_HERMITICITY_TOL,
        }
    }
}

/// Annihilation operator of `mode` on `basis`.
pub fn lowering_operator(basis: &FockBasis, mode: usize) -> Result<CMatrix> {
    if mode >= basis.modes() {
        return Err(Error::InvalidBasis(format!(
            "mode {mode} out of range for {} modes",
            basis.modes()
        )));
    }
    let d = basis.dim();
    let mut a = CMatrix::zeros(d, d);
    let mut lowered = vec![0; basis.modes()];
    for (col, state) in basis.states().enumerate() {
        let n = state[mode];
        if n == 0 {
            continue;
        }
        lowered.copy_from_slice(state);
        lowered[mode] -= 1;
        let row = basis.index_of(&lowered).expect("lowered state stays in basis");
        a[(row, col)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Tensor product of several operators, projected onto the joint basis with
/// the given total cutoff. Modes are concatenated in factor order.
///
/// Each factor's own cutoff must be at least `total_cutoff`, so that every
/// joint state restricts to a state of each factor; support of the product
/// above `total_cutoff` is dropped.
pub fn tensor_all(factors: &[&HermitianOperator], total_cutoff: usize) -> Result<HermitianOperator> {
    if factors.is_empty() {
        return Err(Error::DimensionMismatch("tensor of zero factors".into()));
    }
    for f in factors {
        if f.basis().cutoff() < total_cutoff {
            return Err(Error::DimensionMismatch(format!(
                "factor cutoff {} is below the joint cutoff {total_cutoff}",
                f.basis().cutoff()
            )));
        }
    }
    let modes: usize = factors.iter().map(|f| f.basis().modes()).sum();
    let basis = FockBasis::new(modes, total_cutoff)?;
    let d = basis.dim();

    // Factor-local index of every joint state.
    let local: Vec<Vec<usize>> = basis
        .states()
        .map(|s| {
            let mut offset = 0;
            factors
                .iter()
                .map(|f| {
                    let m = f.basis().modes();
                    let idx = f.basis().index_of(&s[offset..offset + m]).expect("fits factor cutoff");
                    offset += m;
                    idx
                })
                .collect()
        })
        .collect();

    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut z = C64::new(1.0, 0.0);
            for (k, f) in factors.iter().enumerate() {
                z *= f.matrix()[(local[i][k], local[j][k])];
                if z == C64::new(0.0, 0.0) {
                    break;
                }
            }
            out[(i, j)] = z;
        }
    }
    Ok(HermitianOperator::from_parts_unchecked(basis, out))
}

/// `A ⊗ B` on the joint basis truncated at `total_cutoff`.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator, total_cutoff: usize) -> Result<HermitianOperator> {
    tensor_all(&[a, b], total_cutoff)
}

/// Traces out every mode not listed in `keep`; the kept modes appear in the
/// order given. The result keeps the total cutoff of the input.
pub fn partial_trace(op: &HermitianOperator, keep: &[usize]) -> Result<HermitianOperator> {
    let basis = op.basis();
    if keep.is_empty() {
        return Err(Error::InvalidBasis("partial trace must keep at least one mode".into()));
    }
    let mut seen = vec![false; basis.modes()];
    for &m in keep {
        if m >= basis.modes() || seen[m] {
            return Err(Error::InvalidBasis(format!(
                "keep set {keep:?} is not a set of distinct modes below {}",
                basis.modes()
            )));
        }
        seen[m] = true;
    }
    let traced: Vec<usize> = (0..basis.modes()).filter(|m| !seen[*m]).collect();
    let reduced = FockBasis::new(keep.len(), basis.cutoff())?;

    let mut groups: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
    for (i, s) in basis.states().enumerate() {
        let env: Vec<usize> = traced.iter().map(|&m| s[m]).collect();
        let kept: Vec<usize> = keep.iter().map(|&m| s[m]).collect();
        let r = reduced.index_of(&kept).expect("kept part fits the cutoff");
        groups.entry(env).or_default().push((i, r));
    }

    let d = reduced.dim();
    let mut out = CMatrix::zeros(d, d);
    for members in groups.values() {
        for &(i, ri) in members {
            for &(j, rj) in members {
                out[(ri, rj)] += op.matrix()[(i, j)];
            }
        }
    }
    Ok(HermitianOperator {
        basis: reduced,
        matrix: out,
        tol: op.hermiticity_tol(),
    })
}

/// Smallest eigenvalue of the Hermitian part of `op`.
pub fn min_eigenvalue(op: &HermitianOperator) -> Result<f64> {
    min_eigenvalue_of(op.matrix(), op.hermiticity_tol())
}

/// Smallest eigenvalue of a raw matrix after symmetrization; asymmetry
/// beyond `tol` is an error.
pub fn min_eigenvalue_of(m: &CMatrix, tol: f64) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let deviation = hermiticity_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: tol,
        });
    }
    if m.nrows() == 0 {
        return Ok(f64::INFINITY);
    }
    if is_diagonal_matrix(m) {
        return Ok(m.diagonal().iter().map(|z| z.re).fold(f64::INFINITY, f64::min));
    }
    let h = (m + m.adjoint()).scale(0.5);
    Ok(h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

fn is_diagonal_matrix(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn basis_dimension_is_binomial() {
        for modes in 1..=4 {
            for cutoff in 0..=6 {
                let b = FockBasis::new(modes, cutoff).unwrap();
                let expected = (1..=modes).fold(1usize, |acc, k| acc * (cutoff + k) / k);
                assert_eq!(b.dim(), expected, "M={modes} N={cutoff}");
                for i in 0..b.dim() {
                    assert_eq!(b.index_of(b.state(i)), Some(i));
                }
            }
        }
    }

    #[test]
    fn one_photon_sector_lists_modes_in_order() {
        let b = FockBasis::new(3, 2).unwrap();
        assert_eq!(b.state(0), &[0, 0, 0]);
        assert_eq!(b.state(1), &[1, 0, 0]);
        assert_eq!(b.state(2), &[0, 1, 0]);
        assert_eq!(b.state(3), &[0, 0, 1]);
        assert!(FockBasis::new(0, 3).is_err());
    }

    #[test]
    fn lowering_operator_matrix_elements() {
        let b = FockBasis::single_mode(2);
        let a = lowering_operator(&b, 0).unwrap();
        assert_eq!(a[(0, 1)], c(1.0));
        assert_eq!(a[(1, 2)], c(2f64.sqrt()));
        let nonzero = a.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);

        let b1 = FockBasis::single_mode(1);
        let a1 = lowering_operator(&b1, 0).unwrap();
        let vac = nalgebra::DVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!((a1 * vac).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn commutator_is_identity_below_the_cutoff() {
        let n_max = 5;
        let b = FockBasis::single_mode(n_max);
        let a = lowering_operator(&b, 0).unwrap();
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for i in 0..n_max {
            for j in 0..n_max {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - c(expected)).norm() < 1e-12);
            }
        }
        // Only the top row deviates.
        assert!((comm[(n_max, n_max)] - c(-(n_max as f64))).norm() < 1e-12);
    }

    #[test]
    fn multimode_lowering_acts_on_one_slot() {
        let b = FockBasis::new(2, 3).unwrap();
        let a1 = lowering_operator(&b, 1).unwrap();
        let from = b.index_of(&[1, 2]).unwrap();
        let to = b.index_of(&[1, 1]).unwrap();
        assert!((a1[(to, from)] - c(2f64.sqrt())).norm() < 1e-15);
        assert!(lowering_operator(&b, 2).is_err());
    }

    #[test]
    fn tensor_of_identities_and_projectors() {
        let s = FockBasis::single_mode(3);
        let id = HermitianOperator::identity(s.clone());
        let t = tensor(&id, &id, 3).unwrap();
        assert_eq!(t.matrix(), &CMatrix::identity(t.dim(), t.dim()));

        let p1 = HermitianOperator::fock_projector(s.clone(), &[1]).unwrap();
        let p0 = HermitianOperator::fock_projector(s, &[0]).unwrap();
        let t = tensor(&p1, &p0, 3).unwrap();
        let expected = HermitianOperator::fock_projector(t.basis().clone(), &[1, 0]).unwrap();
        assert_eq!(t.max_abs_diff(&expected), 0.0);

        assert!(tensor(&p1, &p0, 4).is_err());
    }

    #[test]
    fn partial_trace_of_product_and_entangled_states() {
        let s = FockBasis::single_mode(2);
        let rho = HermitianOperator::from_diagonal(s.clone(), &[0.5, 0.5, 0.0]).unwrap();
        let sigma = HermitianOperator::from_diagonal(s.clone(), &[0.25, 0.0, 0.0]).unwrap();
        let joint = tensor(&rho, &sigma, 2).unwrap();
        let red = partial_trace(&joint, &[0]).unwrap();
        for i in 0..3 {
            assert!((red.matrix()[(i, i)].re - 0.25 * rho.matrix()[(i, i)].re).abs() < 1e-15);
        }

        let b = FockBasis::new(2, 2).unwrap();
        let mut ket = vec![c(0.0); b.dim()];
        ket[b.index_of(&[1, 0]).unwrap()] = c(std::f64::consts::FRAC_1_SQRT_2);
        ket[b.index_of(&[0, 1]).unwrap()] = c(std::f64::consts::FRAC_1_SQRT_2);
        let psi = HermitianOperator::projector(b, &ket).unwrap();
        let red = partial_trace(&psi, &[0]).unwrap();
        let expected = HermitianOperator::from_diagonal(FockBasis::single_mode(2), &[0.5, 0.5, 0.0]).unwrap();
        assert!(red.max_abs_diff(&expected) < 1e-15);
        assert!((partial_trace(&psi, &[1]).unwrap().trace() - 1.0).abs() < 1e-15);

        assert!(partial_trace(&psi, &[]).is_err());
        assert!(partial_trace(&psi, &[0, 0]).is_err());
        assert!(partial_trace(&psi, &[2]).is_err());
    }

    #[test]
    fn min_eigenvalue_examples() {
        let s = FockBasis::single_mode(1);
        assert_eq!(min_eigenvalue(&HermitianOperator::identity(s.clone())).unwrap(), 1.0);
        let d = HermitianOperator::from_diagonal(s.clone(), &[0.2, -0.3]).unwrap();
        assert_eq!(min_eigenvalue(&d).unwrap(), -0.3);

        // Off-diagonal case: [[0, 1], [1, 0]] has eigenvalues -1 and 1.
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        m[(1, 0)] = c(1.0);
        let x = HermitianOperator::new(s, m.clone()).unwrap();
        assert!((min_eigenvalue(&x).unwrap() + 1.0).abs() < 1e-14);

        m[(0, 1)] = c(1.1);
        assert!(matches!(min_eigenvalue_of(&m, 1e-9), Err(Error::NotHermitian { .. })));
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(min_eigenvalue_of(&m, 1e-9), Err(Error::NonFinite)));
    }

    #[test]
    fn constructor_rejects_non_hermitian_input() {
        let s = FockBasis::single_mode(1);
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        assert!(HermitianOperator::new(s.clone(), m).is_err());
        assert!(HermitianOperator::new(s, CMatrix::zeros(3, 3)).is_err());
    }
}
