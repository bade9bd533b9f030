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

//! Pure-loss channel on a single mode, in both pictures.
//!
//! The state map `E_eta` is the generalized Bernoulli transformation: each
//! photon survives independently with probability `eta`. The POVM map
//! `F_eta` is its adjoint, `Tr[rho F_eta(P)] = Tr[E_eta(rho) P]`, with
//!
//! ```text
//! <n|F_eta(P)|m> = sum_{k <= min(n, m)} sqrt(C(m,k) C(n,k)) (1-eta)^k eta^((m+n)/2 - k) <n-k|P|m-k>
//! ```
//!
//! Both maps only read entries at or below the indices they write, so they
//! are exact on a truncated space. `F_eta` is also defined for formal
//! `eta > 1`, where `F_{1/eta}` inverts `F_eta`; that inverse is what the
//! efficiency estimator probes for positivity. The POVM-side kernels run in
//! double-double precision because the inverse produces alternating sums with
//! heavy cancellation.

use log::warn;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::fock::{CMatrix, FockBasis, HermitianOperator, C64};
use crate::interferometer::{lift_elements, TwoModeElement};
use crate::povm::{DiagonalPovm, Povm};

/// Loss parameter `eta`. Always positive and finite; values above one are
/// formal inverses and only accepted where an operation says so.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Transmissivity(f64);

impl Transmissivity {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidTransmissivity {
                value,
                expected: "(0, inf)",
            });
        }
        Ok(Transmissivity(value))
    }

    /// A transmissivity in `(0, 1]`.
    pub fn physical(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0 && value <= 1.0) {
            return Err(Error::InvalidTransmissivity {
                value,
                expected: "(0, 1]",
            });
        }
        Ok(Transmissivity(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_physical(self) -> bool {
        self.0 <= 1.0
    }
}

/// What to do when `apply_loss_to_state` receives something that is not a
/// density operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DensityPolicy {
    #[default]
    Reject,
    Warn,
}

/// Tolerance used when checking density operators.
pub const DENSITY_TOL: f64 = 1e-9;

/// Pascal triangle `C(n, k)` for `n <= n_max`, exact in `f64` up to `n = 56`.
pub fn binomial_table(n_max: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        t[n][0] = 1.0;
        for k in 1..=n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0.0 };
        }
    }
    t
}

fn require_single_mode(op: &HermitianOperator) -> Result<()> {
    if !op.basis().is_single_mode() {
        return Err(Error::InvalidBasis(format!(
            "loss maps act on one mode, got {:?}",
            op.basis()
        )));
    }
    Ok(())
}

/// `E_eta(rho)` for `eta <= 1`. Trace is preserved exactly: photon number
/// only decreases, so nothing leaks past the cutoff.
pub fn apply_loss_to_state(rho: &HermitianOperator, eta: Transmissivity) -> Result<HermitianOperator> {
    apply_loss_to_state_with(rho, eta, DensityPolicy::Reject)
}

pub fn apply_loss_to_state_with(
    rho: &HermitianOperator,
    eta: Transmissivity,
    policy: DensityPolicy,
) -> Result<HermitianOperator> {
    require_single_mode(rho)?;
    if !eta.is_physical() {
        return Err(Error::InvalidTransmissivity {
            value: eta.value(),
            expected: "(0, 1] for the state-side channel",
        });
    }
    if let Err(e) = rho.check_density(DENSITY_TOL) {
        match policy {
            DensityPolicy::Reject => return Err(e),
            DensityPolicy::Warn => warn!("applying loss to a non-density operator: {e}"),
        }
    }
    let n_max = rho.basis().cutoff();
    let binom = binomial_table(n_max);
    let eta = eta.value();
    let sqrt_eta = eta.sqrt();
    let loss = 1.0 - eta;
    let mut out = CMatrix::zeros(n_max + 1, n_max + 1);
    for m in 0..=n_max {
        for n in 0..=n_max {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..=(n_max - m.max(n)) {
                let w = (binom[m + k][k] * binom[n + k][k]).sqrt() * loss.powi(k as i32);
                acc += rho.matrix()[(m + k, n + k)] * w;
            }
            out[(m, n)] = acc * sqrt_eta.powi((m + n) as i32);
        }
    }
    Ok(HermitianOperator::from_parts_unchecked(rho.basis().clone(), out))
}

/// Core of `F_eta` for a formal transmissivity given in double-double.
///
/// `F` fixes the identity, so the `<0|P|0>` multiple of it is split off and
/// added back exactly; trivial detectors then map to themselves without
/// rounding even when `eta` is tiny or huge.
fn povm_loss_kernel(p: &CMatrix, eta: Dd) -> CMatrix {
    if eta == Dd::ONE {
        return p.clone();
    }
    let n_max = p.nrows() - 1;
    let shift = p[(0, 0)].re;
    let mut p = p.clone();
    for n in 0..=n_max {
        p[(n, n)].re -= shift;
    }
    let binom = binomial_table(n_max);
    let sqrt_eta = eta.sqrt();
    let loss = Dd::ONE - eta;
    let sqrt_pows: Vec<Dd> = (0..=2 * n_max as u32).map(|j| sqrt_eta.powi(j)).collect();
    let loss_pows: Vec<Dd> = (0..=n_max as u32).map(|k| loss.powi(k)).collect();

    let mut out = CMatrix::zeros(n_max + 1, n_max + 1);
    for n in 0..=n_max {
        for m in n..=n_max {
            let mut re = Dd::ZERO;
            let mut im = Dd::ZERO;
            for k in 0..=n {
                let entry = p[(n - k, m - k)];
                if entry.re == 0.0 && entry.im == 0.0 {
                    continue;
                }
                let c = (Dd::from(binom[m][k]) * Dd::from(binom[n][k])).sqrt()
                    * loss_pows[k]
                    * sqrt_pows[m + n - 2 * k];
                re = re + c * Dd::from(entry.re);
                im = im + c * Dd::from(entry.im);
            }
            if n == m {
                re = re + Dd::from(shift);
            }
            let z = C64::new(re.to_f64(), im.to_f64());
            out[(n, m)] = z;
            out[(m, n)] = z.conj();
        }
    }
    for n in 0..=n_max {
        // Diagonal entries of a Hermitian input are real.
        out[(n, n)].im = 0.0;
    }
    out
}

/// `F_eta` on one POVM element; `eta > 1` gives the formal inverse image.
pub fn apply_loss_to_element(op: &HermitianOperator, eta: Transmissivity) -> Result<HermitianOperator> {
    require_single_mode(op)?;
    Ok(HermitianOperator::from_parts_unchecked(
        op.basis().clone(),
        povm_loss_kernel(op.matrix(), Dd::from(eta.value())),
    ))
}

fn element_with_dd(op: &HermitianOperator, eta: Dd) -> Result<HermitianOperator> {
    require_single_mode(op)?;
    Ok(HermitianOperator::from_parts_unchecked(
        op.basis().clone(),
        povm_loss_kernel(op.matrix(), eta),
    ))
}

/// `F_eta` applied to every element. For `eta <= 1` the result is a valid
/// POVM whenever the input is; for `eta > 1` positivity is not asserted.
pub fn apply_loss_to_povm(povm: &Povm, eta: Transmissivity) -> Result<Povm> {
    povm.map_elements(|e| element_with_dd(e, Dd::from(eta.value())))
}

/// As in [`povm_loss_kernel`], the constant part `d[0]` passes through
/// exactly.
fn diagonal_kernel(d: &[f64], eta: Dd) -> Vec<f64> {
    if eta == Dd::ONE {
        return d.to_vec();
    }
    let n_max = d.len() - 1;
    let shift = d[0];
    let d: Vec<f64> = d.iter().map(|x| x - shift).collect();
    let binom = binomial_table(n_max);
    let loss = Dd::ONE - eta;
    let eta_pows: Vec<Dd> = (0..=n_max as u32).map(|k| eta.powi(k)).collect();
    let loss_pows: Vec<Dd> = (0..=n_max as u32).map(|k| loss.powi(k)).collect();
    (0..=n_max)
        .map(|n| {
            let mut acc = Dd::ZERO;
            for k in 0..=n {
                if d[k] == 0.0 {
                    continue;
                }
                acc = acc + Dd::from(binom[n][k]) * loss_pows[n - k] * eta_pows[k] * Dd::from(d[k]);
            }
            (acc + Dd::from(shift)).to_f64()
        })
        .collect()
}

/// Diagonal fast path: `<n|F(P)|n> = sum_k C(n,k) (1-eta)^(n-k) eta^k <k|P|k>`.
pub fn apply_loss_to_diagonal(povm: &DiagonalPovm, eta: Transmissivity) -> Result<DiagonalPovm> {
    Ok(diagonal_with_dd(povm, Dd::from(eta.value())))
}

fn diagonal_with_dd(povm: &DiagonalPovm, eta: Dd) -> DiagonalPovm {
    DiagonalPovm::from_parts_unchecked(
        povm.n_max(),
        povm.labels().to_vec(),
        povm.diagonals().iter().map(|d| diagonal_kernel(d, eta)).collect(),
    )
}

fn inverse_eta(eta: Transmissivity) -> Result<Dd> {
    if !eta.is_physical() {
        return Err(Error::InvalidTransmissivity {
            value: eta.value(),
            expected: "(0, 1] for inversion",
        });
    }
    Ok(Dd::ONE / Dd::from(eta.value()))
}

/// The unique `P~` with `F_eta(P~) = povm` on the truncated space, computed as
/// `F_{1/eta}`. Completeness carries over; positivity generally does not.
pub fn invert_loss(povm: &Povm, eta: Transmissivity) -> Result<Povm> {
    let inv = inverse_eta(eta)?;
    povm.map_elements(|e| element_with_dd(e, inv))
}

pub fn invert_loss_diagonal(povm: &DiagonalPovm, eta: Transmissivity) -> Result<DiagonalPovm> {
    Ok(diagonal_with_dd(povm, inverse_eta(eta)?))
}

/// Smallest eigenvalue over the elements of `F_{1/eta}(povm)`.
pub(crate) fn inverse_min_eigenvalue(povm: &Povm, eta: Transmissivity) -> Result<f64> {
    use rayon::prelude::*;
    let inv = inverse_eta(eta)?;
    let mins = povm
        .elements()
        .par_iter()
        .map(|e| {
            let m = povm_loss_kernel(e.matrix(), inv);
            crate::fock::min_eigenvalue_of(&m, f64::INFINITY)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mins.into_iter().fold(f64::INFINITY, f64::min))
}

pub(crate) fn inverse_min_entry(povm: &DiagonalPovm, eta: Transmissivity) -> Result<f64> {
    let inv = inverse_eta(eta)?;
    Ok(povm
        .diagonals()
        .iter()
        .flat_map(|d| diagonal_kernel(d, inv))
        .fold(f64::INFINITY, f64::min))
}

/// Kraus operators of the loss channel, read off a lifted two-mode
/// beamsplitter with a vacuum environment:
/// `(A_k)_{m,n} = <m, k| U_BS |n, 0>`. Independent of the closed-form maps,
/// so it serves as their oracle. Identically zero operators are dropped.
pub fn kraus_oracle(eta: Transmissivity, n_max: usize) -> Result<Vec<CMatrix>> {
    if !eta.is_physical() {
        return Err(Error::InvalidTransmissivity {
            value: eta.value(),
            expected: "(0, 1]",
        });
    }
    let joint = FockBasis::new(2, n_max)?;
    let bs = TwoModeElement::beamsplitter_with_transmissivity(0, 1, eta.value())?;
    let u = lift_elements(&[bs], &joint)?;
    let mut ops = Vec::new();
    for k in 0..=n_max {
        let mut a = CMatrix::zeros(n_max + 1, n_max + 1);
        for n in 0..=n_max {
            let col = joint.index_of(&[n, 0]).expect("in basis");
            for m in 0..=n_max - k {
                let row = joint.index_of(&[m, k]).expect("in basis");
                a[(m, n)] = u[(row, col)];
            }
        }
        if a.iter().any(|z| z.norm() > 0.0) {
            ops.push(a);
        }
    }
    Ok(ops)
}

/// Loss channel carrying its Kraus operators.
#[derive(Clone, Debug)]
pub struct LossChannel {
    eta: Transmissivity,
    basis: FockBasis,
    kraus: Vec<CMatrix>,
}

impl LossChannel {
    pub fn new(eta: Transmissivity, n_max: usize) -> Result<Self> {
        Ok(LossChannel {
            eta,
            basis: FockBasis::single_mode(n_max),
            kraus: kraus_oracle(eta, n_max)?,
        })
    }

    pub fn eta(&self) -> Transmissivity {
        self.eta
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `max |sum A_k^dag A_k - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.basis.dim();
        let mut s = CMatrix::zeros(d, d);
        for a in &self.kraus {
            s += a.adjoint() * a;
        }
        crate::fock::max_abs_diff(&s, &CMatrix::identity(d, d))
    }

    /// `sum A_k rho A_k^dag`.
    pub fn apply_to_state(&self, rho: &HermitianOperator) -> Result<HermitianOperator> {
        self.check_basis(rho)?;
        let mut out = CMatrix::zeros(self.basis.dim(), self.basis.dim());
        for a in &self.kraus {
            out += a * rho.matrix() * a.adjoint();
        }
        Ok(HermitianOperator::from_parts_unchecked(self.basis.clone(), out))
    }

    /// `sum A_k^dag P A_k`.
    pub fn apply_to_effect(&self, p: &HermitianOperator) -> Result<HermitianOperator> {
        self.check_basis(p)?;
        let mut out = CMatrix::zeros(self.basis.dim(), self.basis.dim());
        for a in &self.kraus {
            out += a.adjoint() * p.matrix() * a;
        }
        Ok(HermitianOperator::from_parts_unchecked(self.basis.clone(), out))
    }

    fn check_basis(&self, op: &HermitianOperator) -> Result<()> {
        if op.basis() != &self.basis {
            return Err(Error::DimensionMismatch(format!(
                "channel on {:?} applied to {:?}",
                self.basis,
                op.basis()
            )));
        }
        Ok(())
    }
}

/// Independent loss on every mode of a multimode basis, in the Schrödinger
/// picture. Each mode's Kraus operator `K_k` takes `|n>` to
/// `sqrt(C(n,k) (1-eta)^k eta^(n-k)) |n-k>`.
#[derive(Clone, Debug)]
pub struct MultiModeLoss {
    basis: FockBasis,
    // action[i][k] = image of basis state i under the joint Kraus operator
    // labeled by the occupation tuple with index k.
    action: Vec<Vec<Option<(usize, f64)>>>,
    // Nonzero entries of each row of `action` as (k, target, coefficient).
    sparse: Vec<Vec<(usize, usize, f64)>>,
}

impl MultiModeLoss {
    pub fn uniform(basis: &FockBasis, eta: Transmissivity) -> Result<Self> {
        Self::per_mode(basis, &vec![eta; basis.modes()])
    }

    pub fn per_mode(basis: &FockBasis, etas: &[Transmissivity]) -> Result<Self> {
        if etas.len() != basis.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{} transmissivities for {} modes",
                etas.len(),
                basis.modes()
            )));
        }
        if let Some(bad) = etas.iter().find(|e| !e.is_physical()) {
            return Err(Error::InvalidTransmissivity {
                value: bad.value(),
                expected: "(0, 1]",
            });
        }
        let binom = binomial_table(basis.cutoff());
        let d = basis.dim();
        let mut action = vec![vec![None; d]; d];
        let mut target = vec![0; basis.modes()];
        for (i, n) in basis.states().enumerate() {
            for (k_idx, k) in basis.states().enumerate() {
                if n.iter().zip(k).any(|(a, b)| b > a) {
                    continue;
                }
                let mut coeff = 1.0;
                for j in 0..basis.modes() {
                    let e = etas[j].value();
                    target[j] = n[j] - k[j];
                    coeff *= (binom[n[j]][k[j]] * (1.0 - e).powi(k[j] as i32) * e.powi(target[j] as i32)).sqrt();
                }
                let t = basis.index_of(&target).expect("fewer photons stay in basis");
                action[i][k_idx] = Some((t, coeff));
            }
        }
        let sparse = action
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter_map(|(k, a)| a.map(|(t, c)| (k, t, c)))
                    .collect()
            })
            .collect();
        Ok(MultiModeLoss {
            basis: basis.clone(),
            action,
            sparse,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    /// Applies the channel to an arbitrary (not necessarily Hermitian) matrix.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let d = self.basis.dim();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let v = x[(i, j)];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                self.add_unit_image(i, j, v, &mut out);
            }
        }
        out
    }

    /// Adds `scale * E(|i><j|)` to `out`.
    pub(crate) fn add_unit_image(&self, i: usize, j: usize, scale: C64, out: &mut CMatrix) {
        for &(k, ti, ci) in &self.sparse[i] {
            if let Some((tj, cj)) = self.action[j][k] {
                out[(ti, tj)] += scale * (ci * cj);
            }
        }
    }

    /// Nonzero terms of `E(|i><j|)` as `(row, col, weight)`.
    pub(crate) fn unit_image(&self, i: usize, j: usize) -> Vec<(usize, usize, f64)> {
        self.sparse[i]
            .iter()
            .filter_map(|&(k, ti, ci)| self.action[j][k].map(|(tj, cj)| (ti, tj, ci * cj)))
            .collect()
    }
}
