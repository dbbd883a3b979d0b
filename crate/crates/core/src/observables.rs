//! One-rung reduced density matrix, entanglement measures, intra-rung
//! correlators, distance correlators, and the closed-form reports for the
//! two studied classes.
//!
//! Every closed form here assumes the spin-flip constrained matrix shape
//! (`a' = εb`, `b' = εa`, nilpotent corners); the finite-size and
//! thermodynamic density modes work for any model.

use ndarray::{Array2, ArrayView2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{LadderMps, RungState, Sign};
use crate::numerics::{self, CMat};
use crate::transfer::{self, RungOperatorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMode {
    /// Algebraic form in the family parameters.
    ClosedForm,
    /// Exact contraction on a ring of the given size.
    Finite(usize),
    /// Top-eigenvector sandwich; needs a non-degenerate top eigenvalue.
    Thermo,
}

/// 4x4 one-rung reduced density matrix.
#[derive(Debug, Clone)]
pub struct RungDensity {
    pub matrix: Array2<f64>,
    /// Normalizer `Q = 2a² + 2b² + 2|g|` of the closed form, when the model
    /// exposes spin-flip parameters.
    pub q: Option<f64>,
    /// Eigenvalues in ascending order.
    pub eigenvalues: [f64; 4],
    params: Option<(f64, f64, f64, Sign)>,
}

impl RungDensity {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn from_matrix(matrix: Array2<f64>, params: Option<(f64, f64, f64, Sign)>) -> Result<RungDensity> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(Error::DimensionMismatch("rung density must be 4x4".into()));
        }
        let sym = (&matrix + &matrix.t()) * 0.5;
        let (vals, _) = sym.eigh(UPLO::Lower)?;
        let eigenvalues = [vals[0], vals[1], vals[2], vals[3]];
        let q = params.map(|(a, b, g, _)| 2.0 * (a * a + b * b + g.abs()));
        Ok(RungDensity {
            matrix: sym,
            q,
            eigenvalues,
            params,
        })
    }
}

pub fn rung_density(mps: &LadderMps, mode: DensityMode) -> Result<RungDensity> {
    let params = mps.spin_flip_params();
    match mode {
        DensityMode::ClosedForm => {
            let (a, b, g, eps) = params.ok_or_else(|| Error::WrongFamily(mps.family.to_string()))?;
            let q = 2.0 * (a * a + b * b + g.abs());
            let mut m = Array2::<f64>::zeros((4, 4));
            m[(0, 0)] = g.abs() / q;
            m[(3, 3)] = g.abs() / q;
            m[(1, 1)] = (a * a + b * b) / q;
            m[(2, 2)] = (a * a + b * b) / q;
            m[(1, 2)] = 2.0 * eps.value() * a * b / q;
            m[(2, 1)] = m[(1, 2)];
            RungDensity::from_matrix(m, params)
        }
        DensityMode::Finite(n) => {
            if n == 0 {
                return Err(Error::InvalidParameter("ring size must be >= 1".into()));
            }
            let top = transfer::transfer_matrix(mps)?;
            let s = top.eigenvalues[0].norm();
            if s == 0.0 {
                return Err(Error::DegenerateState { z: 0.0 });
            }
            let mut m = Array2::<f64>::zeros((4, 4));
            if top.spectral_ok() {
                let spec = top.eigensystem.as_ref().unwrap();
                let mut den = Complex64::new(0.0, 0.0);
                for k in 0..4 {
                    den += (spec.eigenvalues[k] / s).powu(n as u32);
                }
                for i in RungState::ALL {
                    for j in RungState::ALL {
                        let block = numerics::to_complex(
                            numerics::kron_real(mps.matrix(i), mps.matrix(j)).view(),
                        );
                        let mut num = Complex64::new(0.0, 0.0);
                        for k in 0..4 {
                            num += (spec.eigenvalues[k] / s).powu((n - 1) as u32)
                                * spec.sandwich(&block, k, k);
                        }
                        m[(i.index(), j.index())] = (num / den).re / s;
                    }
                }
            } else {
                let e_scaled = top.matrix.mapv(|v| v / s);
                let p = numerics::matrix_power(&e_scaled, n - 1);
                let den: f64 = {
                    let pn = p.dot(&e_scaled);
                    (0..4).map(|i| pn[(i, i)]).sum()
                };
                if den == 0.0 {
                    return Err(Error::DegenerateState { z: 0.0 });
                }
                for i in RungState::ALL {
                    for j in RungState::ALL {
                        let block = numerics::kron_real(mps.matrix(i), mps.matrix(j));
                        let num: f64 = {
                            let bp = block.dot(&p);
                            (0..4).map(|r| bp[(r, r)]).sum()
                        };
                        m[(i.index(), j.index())] = num / (den * s);
                    }
                }
            }
            RungDensity::from_matrix(m, params)
        }
        DensityMode::Thermo => {
            let top = transfer::transfer_matrix(mps)?;
            let spec = top.require_thermo()?;
            let lam0 = spec.eigenvalues[0];
            let mut m = Array2::<f64>::zeros((4, 4));
            for i in RungState::ALL {
                for j in RungState::ALL {
                    let block = numerics::to_complex(
                        numerics::kron_real(mps.matrix(i), mps.matrix(j)).view(),
                    );
                    m[(i.index(), j.index())] = (spec.sandwich(&block, 0, 0) / lam0).re;
                }
            }
            RungDensity::from_matrix(m, params)
        }
    }
}

/// Von Neumann entropy in bits, with the `0 log 0 = 0` convention. Base 2 so
/// the fully polarized large-|g| mixture carries exactly one bit.
pub fn entropy(rho: &RungDensity) -> f64 {
    rho.eigenvalues
        .iter()
        .map(|&a| {
            let a = a.max(0.0);
            if a > 0.0 {
                -a * a.log2()
            } else {
                0.0
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcurrenceMethod {
    /// `max(0, (2|ab| - |g|) / (a² + b² + |g|))` in the family parameters.
    ClosedForm,
    /// Spectral two-qubit concurrence from the density matrix itself:
    /// eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`.
    Wootters,
}

pub fn concurrence(rho: &RungDensity, method: ConcurrenceMethod) -> Result<f64> {
    match method {
        ConcurrenceMethod::ClosedForm => {
            let (a, b, g, _) = rho
                .params
                .ok_or_else(|| Error::WrongFamily("custom".into()))?;
            Ok(concurrence_closed_form(a, b, g))
        }
        ConcurrenceMethod::Wootters => wootters(&rho.matrix.view()),
    }
}

pub fn concurrence_closed_form(a: f64, b: f64, g: f64) -> f64 {
    (0.0f64).max((2.0 * (a * b).abs() - g.abs()) / (a * a + b * b + g.abs()))
}

/// Wootters concurrence of an arbitrary real two-qubit density matrix.
///
/// With `ρ = L Lᵀ` the spectrum of `ρ (σy⊗σy) ρ* (σy⊗σy)` is similar to the
/// square of the real symmetric matrix `Lᵀ (σy⊗σy) L`, so the four square
/// roots come straight out of a symmetric eigensolve without ever squaring,
/// which keeps the clamp boundary accurate to machine precision.
pub fn wootters(rho: &ArrayView2<'_, f64>) -> Result<f64> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch("density matrix must be 4x4".into()));
    }
    // σy ⊗ σy is real: antidiagonal (-1, 1, 1, -1)
    let mut yy = Array2::<f64>::zeros((4, 4));
    yy[(0, 3)] = -1.0;
    yy[(1, 2)] = 1.0;
    yy[(2, 1)] = 1.0;
    yy[(3, 0)] = -1.0;

    let sym = (rho.to_owned() + rho.t()) * 0.5;
    let (vals, vecs) = sym.eigh(UPLO::Lower)?;
    let mut l = Array2::<f64>::zeros((4, 4));
    for (col, &v) in vals.iter().enumerate() {
        let root = v.max(0.0).sqrt();
        for r in 0..4 {
            l[(r, col)] = vecs[(r, col)] * root;
        }
    }
    let m = l.t().dot(&yy).dot(&l);
    let (mvals, _) = m.eigh(UPLO::Lower)?;
    let mut roots: Vec<f64> = mvals.iter().map(|v| v.abs()).collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntraRung {
    /// `<σz σz>` between the two spins of one rung.
    pub zz: f64,
    /// `<σn σn>` for any in-plane unit vector n.
    pub nn: f64,
    /// Total rung spin `<S²>`.
    pub s2: f64,
}

pub fn intra_rung(mps: &LadderMps) -> Result<IntraRung> {
    let (a, b, g, eps) = mps
        .spin_flip_params()
        .ok_or_else(|| Error::WrongFamily(mps.family.to_string()))?;
    let denom = a * a + b * b + g.abs();
    let zz = (g.abs() - a * a - b * b) / denom;
    let nn = 2.0 * eps.value() * a * b / denom;
    let apeb = a + eps.value() * b;
    let s2 = (apeb * apeb + 2.0 * g.abs()) / denom;
    // double-entry: the same numbers must come out of tr(ρ O)
    if cfg!(debug_assertions) {
        let rho = rung_density(mps, DensityMode::ClosedForm)?;
        let s2_op = transfer::rung_operator(RungOperatorKind::TotalSpinSquared).matrix;
        let s2_tr = trace_with(&rho.matrix, &s2_op);
        debug_assert!((s2 - s2_tr).abs() <= 1e-10, "S² double entry: {s2} vs {s2_tr}");
    }
    Ok(IntraRung { zz, nn, s2 })
}

pub fn trace_with(rho: &Array2<f64>, op: &CMat) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..4 {
        for c in 0..4 {
            acc += Complex64::new(rho[(r, c)], 0.0) * op[(c, r)];
        }
    }
    debug_assert!(acc.im.abs() <= 1e-10);
    acc.re
}

/// Entanglement summary of one rung: entropy with the rest of the ladder,
/// concurrence between its two spins, and the total rung spin.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntanglementReport {
    pub entropy_bits: f64,
    pub concurrence: f64,
    pub s2_expectation: f64,
}

pub fn entanglement_report(mps: &LadderMps) -> Result<EntanglementReport> {
    let rho = rung_density(mps, DensityMode::ClosedForm)?;
    let ir = intra_rung(mps)?;
    Ok(EntanglementReport {
        entropy_bits: entropy(&rho),
        concurrence: concurrence(&rho, ConcurrenceMethod::ClosedForm)?,
        s2_expectation: ir.s2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Z,
    /// In-plane direction `n = (cos θ, sin θ, 0)`; the correlator is
    /// independent of θ by the SO(2) symmetry.
    InPlane(f64),
}

/// Closed-form thermodynamic correlator `<S_{axis,1} S_{axis,r}>`.
pub fn distance_correlator(mps: &LadderMps, axis: Axis, r: usize) -> Result<f64> {
    if r < 2 {
        return Err(Error::InvalidParameter("distance r must be >= 2".into()));
    }
    let (a, b, g, eps) = mps
        .spin_flip_params()
        .ok_or_else(|| Error::WrongFamily(mps.family.to_string()))?;
    if g == 0.0 {
        return Err(Error::DegenerateTop {
            modulus: a * a + b * b,
        });
    }
    let aa = a * a + b * b;
    let denom = (aa + g.abs()).powi(r as i32);
    match axis {
        Axis::Z => Ok(-g * g * (aa - g.abs()).powi(r as i32 - 2) / denom),
        Axis::InPlane(_) => {
            let sgn = g.signum();
            let amp = (sgn + eps.value()) * (a + sgn * b).powi(2) * (g.abs() / 2.0);
            Ok(amp * (2.0 * a * b).powi(r as i32 - 2) / denom)
        }
    }
}

/// Dimensionless correlation data of a spin-flip family point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrelationReport {
    /// `x = g / (a² + b²)`.
    pub x: f64,
    /// `2|ab| / (a² + b²) ≤ 1`.
    pub mu_t: f64,
    pub xi_z: f64,
    pub xi_n: f64,
    pub zz: f64,
    pub nn: f64,
}

pub fn correlation_report(mps: &LadderMps) -> Result<CorrelationReport> {
    let (a, b, g, _) = mps
        .spin_flip_params()
        .ok_or_else(|| Error::WrongFamily(mps.family.to_string()))?;
    let aa = a * a + b * b;
    let x = g / aa;
    let mu_t = 2.0 * (a * b).abs() / aa;
    let intra = intra_rung(mps)?;
    Ok(CorrelationReport {
        x,
        mu_t,
        xi_z: 1.0 / ((1.0 + x.abs()) / (1.0 - x.abs()).abs()).ln(),
        xi_n: 1.0 / ((1.0 + x.abs()) / mu_t).ln(),
        zz: intra.zz,
        nn: intra.nn,
    })
}

/// Parameter point of one of the two studied classes.
#[derive(Debug, Clone, Copy)]
pub enum ClassPoint {
    A { x: f64, epsilon: Sign, sigma: Sign },
    B { u: f64 },
}

/// Closed-form summary of every single-rung quantity at a class point.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub family: String,
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub x: Option<f64>,
    pub u: Option<f64>,
    pub s_bits: f64,
    pub concurrence: f64,
    pub zz: f64,
    pub nn: f64,
    pub xi_z: f64,
    pub xi_n: f64,
}

impl ClassReport {
    pub const CSV_HEADER: &'static str =
        "family,epsilon,sigma,x,u,S_bits,C,zz,nn,xi_z,xi_n";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            opt(self.epsilon),
            opt(self.sigma),
            opt(self.x),
            opt(self.u),
            format_float(self.s_bits),
            format_float(self.concurrence),
            format_float(self.zz),
            format_float(self.nn),
            format_float(self.xi_z),
            format_float(self.xi_n),
        )
    }
}

/// Fixed 17-significant-digit scientific formatting, so identical inputs
/// always produce byte-identical output files.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn class_report(point: ClassPoint) -> ClassReport {
    match point {
        ClassPoint::A { x, epsilon, sigma } => {
            let ax = x.abs();
            let s_bits = if ax == 0.0 {
                0.0
            } else {
                (ax / (1.0 + ax)) * (1.0 - ax.log2()) + (1.0 + ax).log2()
            };
            ClassReport {
                family: "class_a".into(),
                epsilon: Some(epsilon.value()),
                sigma: Some(sigma.value()),
                x: Some(x),
                u: None,
                s_bits,
                concurrence: (0.0f64).max((1.0 - ax) / (1.0 + ax)),
                zz: (ax - 1.0) / (ax + 1.0),
                nn: epsilon.value() * sigma.value() / (ax + 1.0),
                xi_z: 1.0 / ((1.0 + ax) / (1.0 - ax).abs()).ln(),
                xi_n: 1.0 / (1.0 + ax).ln(),
            }
        }
        ClassPoint::B { u } => {
            let u2 = u * u;
            let s_bits = if u2 == 0.0 {
                3.0f64.log2()
            } else {
                (u2 + 3.0).log2() - u2 * u2.log2() / (u2 + 3.0)
            };
            let corr = (1.0 - u2) / (u2 + 3.0);
            let xi = 1.0 / ((u2 + 3.0) / (u2 - 1.0).abs()).ln();
            ClassReport {
                family: "class_b".into(),
                epsilon: Some(-1.0),
                sigma: None,
                x: None,
                u: Some(u),
                s_bits,
                concurrence: (0.0f64).max((u2 - 3.0) / (u2 + 3.0)),
                zz: corr,
                nn: corr,
                xi_z: xi,
                xi_n: xi,
            }
        }
    }
}
