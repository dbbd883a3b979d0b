//! Transfer-operator machinery: amplitudes, normalization, n-point functions
//! in finite size and in the thermodynamic limit, and correlation lengths.
//!
//! Finite-size traces are evaluated spectrally through the eigenvalue powers
//! of the transfer operator whenever it has a well-conditioned eigenbasis. At
//! the `g = 0` transition the operator acquires a Jordan block and no
//! biorthogonal eigensystem exists; finite-size quantities then fall back to
//! scaled binary powering of the 4x4 operator, which is equally exact at any
//! chain length. Thermodynamic quantities refuse at a degenerate top
//! eigenvalue instead of silently picking a branch.

use std::fmt;
use std::str::FromStr;

use ndarray::{array, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{LadderMps, RungState};
use crate::numerics::{self, CMat, Spectrum};

/// Eigenbasis condition above which finite-size formulas switch to matrix
/// powering.
const SPECTRAL_CONDITION_LIMIT: f64 = 1e6;

/// Relative gap defining a degenerate top eigenvalue.
const TOP_DEGENERACY_TOL: f64 = 1e-12;

/// Matrix-element threshold used when hunting the decay eigenvalue of a
/// connected correlator.
const MATRIX_ELEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct TransferOperator {
    /// `E = Σ_ij A_ij ⊗ A_ij`.
    pub matrix: Array2<f64>,
    /// All eigenvalues, sorted by descending modulus.
    pub eigenvalues: Vec<Complex64>,
    pub degenerate_top: bool,
    /// Complete biorthogonal eigensystem; absent when `E` is defective
    /// (which happens exactly at the transition point of the built-in
    /// spin-flip families).
    pub eigensystem: Option<Spectrum>,
}

impl TransferOperator {
    pub fn lambda_max(&self) -> Complex64 {
        self.eigenvalues[0]
    }

    fn scale(&self) -> f64 {
        self.eigenvalues[0].norm()
    }

    pub(crate) fn spectral_ok(&self) -> bool {
        self.eigensystem
            .as_ref()
            .map(|s| s.basis_condition() < SPECTRAL_CONDITION_LIMIT)
            .unwrap_or(false)
    }

    pub(crate) fn require_thermo(&self) -> Result<&Spectrum> {
        if self.degenerate_top {
            return Err(Error::DegenerateTop {
                modulus: self.eigenvalues[0].norm(),
            });
        }
        self.eigensystem.as_ref().ok_or(Error::DefectiveMatrix)
    }
}

pub fn transfer_matrix(mps: &LadderMps) -> Result<TransferOperator> {
    let mut e = Array2::<f64>::zeros((4, 4));
    for s in RungState::ALL {
        let a = mps.matrix(s);
        e = e + numerics::kron_real(a, a);
    }
    let ec = numerics::to_complex(e.view());
    let eigenvalues = numerics::eigenvalues(&ec)?;
    let degenerate_top = eigenvalues[0].norm() - eigenvalues[1].norm()
        <= TOP_DEGENERACY_TOL * eigenvalues[0].norm();
    let eigensystem = numerics::eigen_decompose(&ec).ok();
    Ok(TransferOperator {
        matrix: e,
        eigenvalues,
        degenerate_top,
        eigensystem,
    })
}

/// Hermitian observable on one rung in the ordered basis |00>, |01>, |10>, |11>.
#[derive(Debug, Clone)]
pub struct RungOperator {
    pub name: String,
    pub matrix: CMat,
}

impl RungOperator {
    pub fn from_matrix(name: impl Into<String>, matrix: CMat) -> RungOperator {
        RungOperator {
            name: name.into(),
            matrix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RungOperatorKind {
    Identity,
    /// σx on leg 1 / leg 2.
    SigmaX1,
    SigmaX2,
    /// σz on leg 1 / leg 2.
    SigmaZ1,
    SigmaZ2,
    /// Total rung magnetization `S_z = (σz1 + σz2)/2`.
    TotalSz,
    /// Total in-plane spin component along `n = (cos θ, sin θ, 0)`.
    SpinN(f64),
    /// Total rung spin squared `S²`.
    TotalSpinSquared,
    /// Intra-rung product σz ⊗ σz.
    SigmaZ1SigmaZ2,
    /// Intra-rung product σn ⊗ σn.
    SigmaN1SigmaN2(f64),
}

impl fmt::Display for RungOperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RungOperatorKind::Identity => write!(f, "id"),
            RungOperatorKind::SigmaX1 => write!(f, "sx1"),
            RungOperatorKind::SigmaX2 => write!(f, "sx2"),
            RungOperatorKind::SigmaZ1 => write!(f, "sz1"),
            RungOperatorKind::SigmaZ2 => write!(f, "sz2"),
            RungOperatorKind::TotalSz => write!(f, "Sz"),
            RungOperatorKind::SpinN(t) => write!(f, "Sn({t})"),
            RungOperatorKind::TotalSpinSquared => write!(f, "S2"),
            RungOperatorKind::SigmaZ1SigmaZ2 => write!(f, "zz"),
            RungOperatorKind::SigmaN1SigmaN2(t) => write!(f, "nn({t})"),
        }
    }
}

impl FromStr for RungOperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_angle = |inner: &str, label: &str| -> Result<f64> {
            inner
                .parse::<f64>()
                .map_err(|_| Error::UnknownOperator(label.to_string()))
        };
        match s {
            "id" | "identity" => Ok(RungOperatorKind::Identity),
            "sx1" => Ok(RungOperatorKind::SigmaX1),
            "sx2" => Ok(RungOperatorKind::SigmaX2),
            "sz1" => Ok(RungOperatorKind::SigmaZ1),
            "sz2" => Ok(RungOperatorKind::SigmaZ2),
            "Sz" => Ok(RungOperatorKind::TotalSz),
            "S2" => Ok(RungOperatorKind::TotalSpinSquared),
            "zz" => Ok(RungOperatorKind::SigmaZ1SigmaZ2),
            other => {
                if let Some(inner) = other.strip_prefix("Sn(").and_then(|r| r.strip_suffix(')')) {
                    Ok(RungOperatorKind::SpinN(parse_angle(inner, other)?))
                } else if let Some(inner) =
                    other.strip_prefix("nn(").and_then(|r| r.strip_suffix(')'))
                {
                    Ok(RungOperatorKind::SigmaN1SigmaN2(parse_angle(inner, other)?))
                } else {
                    Err(Error::UnknownOperator(other.to_string()))
                }
            }
        }
    }
}

fn pauli(which: char) -> CMat {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    match which {
        'i' => array![[one, z], [z, one]],
        'x' => array![[z, one], [one, z]],
        'y' => array![[z, -i], [i, z]],
        'z' => array![[one, z], [z, -one]],
        _ => unreachable!(),
    }
}

fn sigma_n(theta: f64) -> CMat {
    pauli('x').mapv(|v| v * theta.cos()) + pauli('y').mapv(|v| v * theta.sin())
}

pub fn rung_operator(kind: RungOperatorKind) -> RungOperator {
    let id = pauli('i');
    let matrix = match kind {
        RungOperatorKind::Identity => numerics::kron(&id, &id),
        RungOperatorKind::SigmaX1 => numerics::kron(&pauli('x'), &id),
        RungOperatorKind::SigmaX2 => numerics::kron(&id, &pauli('x')),
        RungOperatorKind::SigmaZ1 => numerics::kron(&pauli('z'), &id),
        RungOperatorKind::SigmaZ2 => numerics::kron(&id, &pauli('z')),
        RungOperatorKind::TotalSz => {
            (numerics::kron(&pauli('z'), &id) + numerics::kron(&id, &pauli('z'))).mapv(|v| v * 0.5)
        }
        RungOperatorKind::SpinN(theta) => {
            let sn = sigma_n(theta);
            (numerics::kron(&sn, &id) + numerics::kron(&id, &sn)).mapv(|v| v * 0.5)
        }
        RungOperatorKind::TotalSpinSquared => {
            let mut s2 = CMat::zeros((4, 4));
            for p in ['x', 'y', 'z'] {
                let s = (numerics::kron(&pauli(p), &id) + numerics::kron(&id, &pauli(p)))
                    .mapv(|v| v * 0.5);
                s2 = s2 + s.dot(&s);
            }
            s2
        }
        RungOperatorKind::SigmaZ1SigmaZ2 => numerics::kron(&pauli('z'), &pauli('z')),
        RungOperatorKind::SigmaN1SigmaN2(theta) => {
            let sn = sigma_n(theta);
            numerics::kron(&sn, &sn)
        }
    };
    RungOperator {
        name: kind.to_string(),
        matrix,
    }
}

/// `E_O = Σ_ij <i|O|j> A_i ⊗ A_j` (the rung matrices are real, so no
/// conjugate is needed on the first factor).
pub fn operator_transfer(mps: &LadderMps, op: &RungOperator) -> CMat {
    let mut e = CMat::zeros((4, 4));
    for i in RungState::ALL {
        for j in RungState::ALL {
            let w = op.matrix[(i.index(), j.index())];
            if w.norm() == 0.0 {
                continue;
            }
            let k = numerics::kron_real(mps.matrix(i), mps.matrix(j));
            e = e + numerics::to_complex(k.view()).mapv(|v| v * w);
        }
    }
    e
}

/// Unnormalized amplitude `tr(A_{i1} ... A_{iN})`; callers divide by `√Z`.
pub fn amplitude(mps: &LadderMps, config: &[RungState]) -> f64 {
    let mut prod = Array2::<f64>::eye(2);
    for s in config {
        prod = prod.dot(mps.matrix(*s));
    }
    prod[(0, 0)] + prod[(1, 1)]
}

fn realize(z: Complex64, context: &str) -> f64 {
    debug_assert!(
        z.im.abs() <= 1e-8 * (1.0 + z.re.abs()),
        "unexpected imaginary part {} in {context}",
        z.im
    );
    z.re
}

/// `Z = tr(E^N) = Σ_i λ_i^N`, evaluated from the eigenvalues.
pub fn partition_norm(mps: &LadderMps, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("chain length must be >= 1".into()));
    }
    let top = transfer_matrix(mps)?;
    let z: Complex64 = top
        .eigenvalues
        .iter()
        .map(|lam| lam.powu(n as u32))
        .sum();
    let z = realize(z, "partition norm");
    if z <= 0.0 {
        return Err(Error::DegenerateState { z });
    }
    Ok(z)
}

/// `tr(M Ê^p)` for the scaled operator `Ê = E/s`.
fn trace_with_power(m: &CMat, e_scaled: &Array2<f64>, p: usize) -> Complex64 {
    let ep = numerics::matrix_power(e_scaled, p);
    let mut tr = Complex64::new(0.0, 0.0);
    for r in 0..4 {
        for c in 0..4 {
            tr += m[(r, c)] * ep[(c, r)];
        }
    }
    tr
}

fn finite_one_point(top: &TransferOperator, e_op: &CMat, n: usize) -> Result<f64> {
    let s = top.scale();
    if s == 0.0 {
        return Err(Error::DegenerateState { z: 0.0 });
    }
    if top.spectral_ok() {
        let spec = top.eigensystem.as_ref().unwrap();
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let rho = spec.eigenvalues[i] / s;
            num += rho.powu((n - 1) as u32) * spec.sandwich(e_op, i, i);
            den += rho.powu(n as u32);
        }
        Ok(realize(num / den, "one-point function") / s)
    } else {
        let e_scaled = top.matrix.mapv(|v| v / s);
        let num = trace_with_power(e_op, &e_scaled, n - 1);
        let den = {
            let en = numerics::matrix_power(&e_scaled, n);
            (0..4).map(|i| en[(i, i)]).sum::<f64>()
        };
        if den.abs() == 0.0 {
            return Err(Error::DegenerateState { z: 0.0 });
        }
        Ok(realize(num, "one-point function") / (den * s))
    }
}

/// Finite-chain one-point function `<O(k)>` on a ring of `n` rungs. Cyclic
/// invariance makes the result independent of `k`; the site index is
/// validated and the cyclic form of the trace is evaluated.
pub fn one_point(mps: &LadderMps, op: &RungOperator, k: usize, n: usize) -> Result<f64> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "site k = {k} must satisfy 1 <= k <= N = {n}"
        )));
    }
    let top = transfer_matrix(mps)?;
    let e_op = operator_transfer(mps, op);
    finite_one_point(&top, &e_op, n)
}

/// Thermodynamic one-point function `<λmax|E_O|λmax> / λmax`.
pub fn one_point_thermo(mps: &LadderMps, op: &RungOperator) -> Result<f64> {
    let top = transfer_matrix(mps)?;
    let spec = top.require_thermo()?;
    let e_op = operator_transfer(mps, op);
    let val = spec.sandwich(&e_op, 0, 0) / spec.eigenvalues[0];
    Ok(realize(val, "thermodynamic one-point function"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Finite(usize),
    Thermo,
}

/// Two-point function `<O(1) O(r)>` at rung separation `r >= 2`.
pub fn two_point(mps: &LadderMps, op: &RungOperator, r: usize, mode: Mode) -> Result<f64> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!(
            "two-point distance r = {r} must be >= 2"
        )));
    }
    let top = transfer_matrix(mps)?;
    let e_op = operator_transfer(mps, op);
    match mode {
        Mode::Thermo => {
            let spec = top.require_thermo()?;
            let lam0 = spec.eigenvalues[0];
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                let rho = spec.eigenvalues[i] / lam0;
                sum += rho.powu((r - 2) as u32)
                    * spec.sandwich(&e_op, 0, i)
                    * spec.sandwich(&e_op, i, 0);
            }
            Ok(realize(sum / (lam0 * lam0), "thermodynamic two-point function"))
        }
        Mode::Finite(n) => {
            if r > n {
                return Err(Error::InvalidParameter(format!(
                    "two-point distance r = {r} exceeds ring size N = {n}"
                )));
            }
            let s = top.scale();
            if s == 0.0 {
                return Err(Error::DegenerateState { z: 0.0 });
            }
            if top.spectral_ok() {
                let spec = top.eigensystem.as_ref().unwrap();
                let mut num = Complex64::new(0.0, 0.0);
                let mut den = Complex64::new(0.0, 0.0);
                for i in 0..4 {
                    let rho_i = spec.eigenvalues[i] / s;
                    den += rho_i.powu(n as u32);
                    for j in 0..4 {
                        let rho_j = spec.eigenvalues[j] / s;
                        num += rho_i.powu((r - 2) as u32)
                            * rho_j.powu((n - r) as u32)
                            * spec.sandwich(&e_op, j, i)
                            * spec.sandwich(&e_op, i, j);
                    }
                }
                Ok(realize(num / den, "two-point function") / (s * s))
            } else {
                let e_scaled = top.matrix.mapv(|v| v / s);
                let p_mid = numerics::matrix_power(&e_scaled, r - 2);
                let p_rest = numerics::matrix_power(&e_scaled, n - r);
                let m = e_op.dot(&numerics::to_complex(p_mid.view()))
                    .dot(&e_op)
                    .dot(&numerics::to_complex(p_rest.view()));
                let num: Complex64 = (0..4).map(|i| m[(i, i)]).sum();
                let en = numerics::matrix_power(&e_scaled, n);
                let den: f64 = (0..4).map(|i| en[(i, i)]).sum();
                if den.abs() == 0.0 {
                    return Err(Error::DegenerateState { z: 0.0 });
                }
                Ok(realize(num, "two-point function") / (den * s * s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationLength {
    Finite(f64),
    Infinite,
    /// Every subleading matrix element of `E_O` vanishes: the operator has no
    /// connected correlations at all.
    NoConnectedCorrelations,
}

impl CorrelationLength {
    pub fn finite(self) -> Option<f64> {
        match self {
            CorrelationLength::Finite(xi) => Some(xi),
            _ => None,
        }
    }
}

/// `ξ = 1 / ln(λmax / |λ1|)` with `λ1` the largest-modulus subleading
/// eigenvalue whose matrix element `<λ1|E_O|λmax>` does not vanish.
pub fn correlation_length(mps: &LadderMps, op: &RungOperator) -> Result<CorrelationLength> {
    let top = transfer_matrix(mps)?;
    let spec = top.require_thermo()?;
    let e_op = operator_transfer(mps, op);
    let lam_max = spec.eigenvalues[0].norm();
    for i in 1..4 {
        let elem = spec.sandwich(&e_op, i, 0);
        if elem.norm() > MATRIX_ELEMENT_TOL {
            let li = spec.eigenvalues[i].norm();
            if li >= lam_max * (1.0 - 1e-12) {
                return Ok(CorrelationLength::Infinite);
            }
            return Ok(CorrelationLength::Finite(1.0 / (lam_max / li).ln()));
        }
    }
    Ok(CorrelationLength::NoConnectedCorrelations)
}
