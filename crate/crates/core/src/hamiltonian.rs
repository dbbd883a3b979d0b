//! Parent Hamiltonian construction: the two-rung constraint map, the
//! symmetry-adapted multiplet basis of its null space, the positive local
//! operator built from weighted projectors, its periodic embedding, and the
//! extraction of spin-coupling constants from the Pauli expansion.
//!
//! Site order on two rungs is (leg1 rung1, leg2 rung1, leg1 rung2,
//! leg2 rung2); the 16-dimensional index of |i j k l> is 8i + 4j + 2k + l,
//! which coincides with (rung1 state) * 4 + (rung2 state).

use std::fmt;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Solve, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LadderMps, RungState, Sign};
use crate::numerics::{self, CMat};

/// Residual tolerance for membership of a basis vector in the null space.
pub const BASIS_RESIDUAL_TOL: f64 = 1e-10;

/// Residual tolerance for the completeness of the coupling ansatz.
pub const STRUCTURE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Irrep {
    Two,
    One,
    OnePrime,
    Zero,
}

/// Multiplet label `(l, m)`; the basis stores all twelve vectors, the weight
/// set only the eight labels with `m >= 0` (the `±m` partners share weights).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultipletLabel {
    pub irrep: Irrep,
    pub m: i8,
}

impl MultipletLabel {
    pub const fn new(irrep: Irrep, m: i8) -> MultipletLabel {
        MultipletLabel { irrep, m }
    }

    /// The eight independent labels, in the order used by [`WeightSet`].
    pub const CANONICAL: [MultipletLabel; 8] = [
        MultipletLabel::new(Irrep::Two, 2),
        MultipletLabel::new(Irrep::Two, 1),
        MultipletLabel::new(Irrep::Two, 0),
        MultipletLabel::new(Irrep::One, 1),
        MultipletLabel::new(Irrep::One, 0),
        MultipletLabel::new(Irrep::OnePrime, 1),
        MultipletLabel::new(Irrep::OnePrime, 0),
        MultipletLabel::new(Irrep::Zero, 0),
    ];
}

impl fmt::Display for MultipletLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = match self.irrep {
            Irrep::Two => "2",
            Irrep::One => "1",
            Irrep::OnePrime => "1'",
            Irrep::Zero => "0",
        };
        write!(f, "{l},{}", self.m)
    }
}

/// Twelve labeled, normalized null-space vectors of the two-rung constraint
/// map for a point of the three-symmetry class.
#[derive(Debug, Clone)]
pub struct MultipletBasis {
    pub a: f64,
    pub g: f64,
    pub epsilon: Sign,
    pub sigma: Sign,
    vectors: Vec<(MultipletLabel, Array1<f64>)>,
}

impl MultipletBasis {
    pub fn vectors(&self) -> &[(MultipletLabel, Array1<f64>)] {
        &self.vectors
    }

    pub fn get(&self, label: MultipletLabel) -> Option<&Array1<f64>> {
        self.vectors
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| v)
    }
}

/// Nonnegative projector weights for the eight independent multiplet labels.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WeightSet {
    pub mu_22: f64,
    pub mu_21: f64,
    pub mu_20: f64,
    pub mu_11: f64,
    pub mu_10: f64,
    pub mu_1p1: f64,
    pub mu_1p0: f64,
    pub mu_00: f64,
}

impl WeightSet {
    pub fn zeros() -> WeightSet {
        WeightSet::uniform(0.0)
    }

    pub fn uniform(w: f64) -> WeightSet {
        WeightSet {
            mu_22: w,
            mu_21: w,
            mu_20: w,
            mu_11: w,
            mu_10: w,
            mu_1p1: w,
            mu_1p0: w,
            mu_00: w,
        }
    }

    /// The weight pattern `μ_{2m} = 6μ`, `μ_{1m} = 2ν`, `μ_{1'm} = 2ξ`,
    /// `μ_{00} = 2η` that makes the local operator a scalar at the
    /// rotation-invariant parameter point.
    pub fn rotational(mu: f64, nu: f64, xi: f64, eta: f64) -> WeightSet {
        WeightSet {
            mu_22: 6.0 * mu,
            mu_21: 6.0 * mu,
            mu_20: 6.0 * mu,
            mu_11: 2.0 * nu,
            mu_10: 2.0 * nu,
            mu_1p1: 2.0 * xi,
            mu_1p0: 2.0 * xi,
            mu_00: 2.0 * eta,
        }
    }

    pub fn get(&self, label: MultipletLabel) -> f64 {
        use Irrep::*;
        match (label.irrep, label.m.abs()) {
            (Two, 2) => self.mu_22,
            (Two, 1) => self.mu_21,
            (Two, 0) => self.mu_20,
            (One, 1) => self.mu_11,
            (One, 0) => self.mu_10,
            (OnePrime, 1) => self.mu_1p1,
            (OnePrime, 0) => self.mu_1p0,
            (Zero, 0) => self.mu_00,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for label in MultipletLabel::CANONICAL {
            let w = self.get(label);
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    label: label.to_string(),
                    weight: w,
                });
            }
        }
        Ok(())
    }
}

/// The 4x16 map whose kernel consists of the two-rung configurations
/// annihilated by the matrix products: `M[(αβ), (ijkl)] = (A_ij A_kl)_{αβ}`.
pub fn constraint_matrix(mps: &LadderMps) -> Array2<f64> {
    let mut m = Array2::<f64>::zeros((4, 16));
    for r1 in RungState::ALL {
        for r2 in RungState::ALL {
            let prod = mps.matrix(r1).dot(mps.matrix(r2));
            let col = 4 * r1.index() + r2.index();
            for alpha in 0..2 {
                for beta in 0..2 {
                    m[(2 * alpha + beta, col)] = prod[(alpha, beta)];
                }
            }
        }
    }
    m
}

fn ket(i: usize, j: usize, k: usize, l: usize) -> Array1<f64> {
    let mut v = Array1::<f64>::zeros(16);
    v[8 * i + 4 * j + 2 * k + l] = 1.0;
    v
}

fn flip_all(v: &Array1<f64>) -> Array1<f64> {
    let mut out = Array1::<f64>::zeros(16);
    for idx in 0..16 {
        out[15 - idx] = v[idx];
    }
    out
}

/// Builds the twelve symmetry-adapted null-space vectors for parameters
/// `(a, g, ε, σ)` with `b = σa`. Every vector is normalized (the `(2,0)`
/// vector is not unit norm for generic parameters) and checked against the
/// numeric constraint map.
pub fn multiplet_basis(a: f64, g: f64, epsilon: Sign, sigma: Sign) -> Result<MultipletBasis> {
    if a == 0.0 {
        return Err(Error::InvalidParameter(
            "multiplet basis requires a != 0".into(),
        ));
    }
    let e = epsilon.value();
    let s = sigma.value();

    let mut raw: Vec<(MultipletLabel, Array1<f64>)> = Vec::with_capacity(12);
    raw.push((MultipletLabel::new(Irrep::Two, 2), ket(0, 0, 0, 0)));
    raw.push((
        MultipletLabel::new(Irrep::Two, 1),
        (-e * ket(0, 0, 0, 1) + ket(0, 0, 1, 0) - e * ket(0, 1, 0, 0) + ket(1, 0, 0, 0)) * 0.5,
    ));
    raw.push((
        MultipletLabel::new(Irrep::Two, 0),
        ((ket(0, 0, 1, 1) + ket(1, 1, 0, 0)) * (-4.0 * a * a)
            + (ket(0, 1, 0, 1) + (ket(0, 1, 1, 0) + ket(1, 0, 0, 1)) * (s * e) + ket(1, 0, 1, 0))
                * g)
            / 6.0f64.sqrt(),
    ));
    raw.push((
        MultipletLabel::new(Irrep::One, 1),
        (e * ket(0, 0, 0, 1) + ket(0, 0, 1, 0) - e * ket(0, 1, 0, 0) - ket(1, 0, 0, 0)) * 0.5,
    ));
    raw.push((
        MultipletLabel::new(Irrep::One, 0),
        (ket(0, 1, 1, 0) - ket(1, 0, 0, 1)) / 2.0f64.sqrt(),
    ));
    raw.push((
        MultipletLabel::new(Irrep::OnePrime, 1),
        (-s * e * ket(0, 0, 0, 1) + ket(0, 0, 1, 0) + e * ket(0, 1, 0, 0) - s * ket(1, 0, 0, 0))
            * 0.5,
    ));
    raw.push((
        MultipletLabel::new(Irrep::OnePrime, 0),
        (ket(0, 1, 0, 1) - ket(1, 0, 1, 0)) / 2.0f64.sqrt(),
    ));
    raw.push((
        MultipletLabel::new(Irrep::Zero, 0),
        (ket(0, 1, 0, 1) - (ket(0, 1, 1, 0) + ket(1, 0, 0, 1)) * (s * e) + ket(1, 0, 1, 0)) * 0.5,
    ));

    // m < 0 partners: flip every spin
    let negatives: Vec<(MultipletLabel, Array1<f64>)> = raw
        .iter()
        .filter(|(l, _)| l.m > 0)
        .map(|(l, v)| (MultipletLabel::new(l.irrep, -l.m), flip_all(v)))
        .collect();
    raw.extend(negatives);

    let mps = LadderMps::class_a(a, g, epsilon, sigma)?;
    let constraint = constraint_matrix(&mps);
    let mut vectors = Vec::with_capacity(12);
    for (label, v) in raw {
        let norm = v.dot(&v).sqrt();
        if norm <= 1e-14 {
            return Err(Error::InvalidParameter(format!(
                "multiplet vector |{label}> vanishes at a = {a}, g = {g}"
            )));
        }
        let v = v / norm;
        let residual = {
            let mv = constraint.dot(&v);
            mv.dot(&mv).sqrt()
        };
        if residual > BASIS_RESIDUAL_TOL {
            return Err(Error::BasisVectorOutsideNullSpace {
                label: label.to_string(),
                residual,
            });
        }
        vectors.push((label, v));
    }

    Ok(MultipletBasis {
        a,
        g,
        epsilon,
        sigma,
        vectors,
    })
}

/// Positive two-rung operator `h = Σ μ_{lm} (P_{l,m} + P_{l,-m})`, with the
/// `m = 0` projector entering once so equal weights within a multiplet make
/// `h` a scalar of the rotation group at the invariant parameter point.
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    pub h: Array2<f64>,
    pub basis: MultipletBasis,
    pub weights: WeightSet,
}

impl LocalHamiltonian {
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = self.h.eigh(UPLO::Lower)?;
        Ok(vals[0])
    }
}

pub fn local_h(basis: &MultipletBasis, weights: &WeightSet) -> Result<LocalHamiltonian> {
    weights.validate()?;
    let mut h = Array2::<f64>::zeros((16, 16));
    for (label, v) in basis.vectors() {
        let w = weights.get(*label);
        if w == 0.0 {
            continue;
        }
        for r in 0..16 {
            if v[r] == 0.0 {
                continue;
            }
            for c in 0..16 {
                h[(r, c)] += w * v[r] * v[c];
            }
        }
    }
    Ok(LocalHamiltonian {
        h,
        basis: basis.clone(),
        weights: *weights,
    })
}

/// Largest ring for the dense periodic embedding (4^6 x 4^6).
pub const MAX_EMBED_RUNGS: usize = 6;

/// `H = Σ_l h_{l,l+1}` on a periodic ring of `n` rungs, as a dense matrix.
pub fn embed_global(h: &Array2<f64>, n: usize) -> Result<Array2<f64>> {
    if h.nrows() != 16 || h.ncols() != 16 {
        return Err(Error::DimensionMismatch(
            "local term must act on two rungs (16x16)".into(),
        ));
    }
    if !(2..=MAX_EMBED_RUNGS).contains(&n) {
        return Err(Error::TooLarge {
            dim: n,
            max: MAX_EMBED_RUNGS,
        });
    }
    let dim = 4usize.pow(n as u32);
    let rest_dim = 4usize.pow((n - 2) as u32);
    let weight = |pos: usize| 4usize.pow((n - 1 - pos) as u32);
    let mut out = Array2::<f64>::zeros((dim, dim));
    for l in 0..n {
        let l2 = (l + 1) % n;
        let others: Vec<usize> = (0..n).filter(|&p| p != l && p != l2).collect();
        for hr in 0..16 {
            for hc in 0..16 {
                let v = h[(hr, hc)];
                if v == 0.0 {
                    continue;
                }
                let row_base = (hr / 4) * weight(l) + (hr % 4) * weight(l2);
                let col_base = (hc / 4) * weight(l) + (hc % 4) * weight(l2);
                for rest in 0..rest_dim {
                    let mut env = 0usize;
                    let mut rem = rest;
                    for &p in &others {
                        env += (rem % 4) * weight(p);
                        rem /= 4;
                    }
                    out[(row_base + env, col_base + env)] += v;
                }
            }
        }
    }
    Ok(out)
}

/// Spin-coupling constants of the two-leg-ladder form of the Hamiltonian,
/// in the normalization of `8h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    pub j: [f64; 14],
}

impl CouplingSet {
    pub const KEYS: [&'static str; 14] = [
        "J0", "J1", "J2", "J3", "J4", "J5", "J6", "J7", "J8", "J9", "J10", "J11", "J12", "J13",
    ];

    pub fn zeros() -> CouplingSet {
        CouplingSet { j: [0.0; 14] }
    }
}

/// Result of expanding `8h` over the coupling ansatz.
#[derive(Debug, Clone)]
pub struct PauliExpansion {
    pub couplings: CouplingSet,
    /// Largest entry of `8h - Σ J_k S_k`.
    pub residual: f64,
    /// Pauli strings (site order i, i', i+1, i'+1) carrying weight outside
    /// the ansatz, with their coefficients.
    pub outside: Vec<(String, f64)>,
}

fn pauli2(c: u8) -> CMat {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    match c {
        b'I' => ndarray::array![[one, z], [z, one]],
        b'X' => ndarray::array![[z, one], [one, z]],
        b'Y' => ndarray::array![[z, -i], [i, z]],
        b'Z' => ndarray::array![[one, z], [z, -one]],
        _ => unreachable!(),
    }
}

fn pauli_string(chars: [u8; 4]) -> CMat {
    let mut m = pauli2(chars[0]);
    for &c in &chars[1..] {
        m = numerics::kron(&m, &pauli2(c));
    }
    m
}

fn real_part(m: &CMat) -> Array2<f64> {
    debug_assert!(m.iter().all(|z| z.im.abs() <= 1e-12));
    m.mapv(|z| z.re)
}

fn zz_pair(a: usize, b: usize) -> Array2<f64> {
    let mut chars = [b'I'; 4];
    chars[a] = b'Z';
    chars[b] = b'Z';
    real_part(&pauli_string(chars))
}

fn dot_pair(a: usize, b: usize) -> Array2<f64> {
    let mut acc = CMat::zeros((16, 16));
    for p in *b"XYZ" {
        let mut chars = [b'I'; 4];
        chars[a] = p;
        chars[b] = p;
        acc = acc + pauli_string(chars);
    }
    real_part(&acc)
}

/// The fourteen coupling structures. Site pairs: legs run (0,2) and (1,3),
/// rungs are (0,1) and (2,3), diagonals (0,3) and (1,2). The identity enters
/// twice (once per leg chain) and the intra-rung structures are split across
/// the two bonds that share each rung, which fixes the factors of 2.
fn structure_operators() -> [Array2<f64>; 14] {
    [
        Array2::<f64>::eye(16) * 2.0,
        zz_pair(0, 2) + zz_pair(1, 3),
        dot_pair(0, 2) + dot_pair(1, 3),
        (dot_pair(0, 1) + dot_pair(2, 3)) * 0.5,
        dot_pair(0, 3) + dot_pair(1, 2),
        dot_pair(0, 1).dot(&dot_pair(2, 3)),
        dot_pair(0, 2).dot(&dot_pair(1, 3)),
        dot_pair(0, 3).dot(&dot_pair(1, 2)),
        (zz_pair(0, 1) + zz_pair(2, 3)) * 0.5,
        zz_pair(0, 3) + zz_pair(1, 2),
        zz_pair(0, 1).dot(&zz_pair(2, 3)),
        zz_pair(0, 1).dot(&dot_pair(2, 3)) + zz_pair(2, 3).dot(&dot_pair(0, 1)),
        zz_pair(0, 2).dot(&dot_pair(1, 3)) + zz_pair(1, 3).dot(&dot_pair(0, 2)),
        zz_pair(0, 3).dot(&dot_pair(1, 2)) + zz_pair(1, 2).dot(&dot_pair(0, 3)),
    ]
}

fn frobenius(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Expands `8h` over the coupling structures by a Frobenius least-squares
/// solve and reports everything the ansatz cannot absorb.
pub fn pauli_expand(h: &Array2<f64>) -> Result<PauliExpansion> {
    if h.nrows() != 16 || h.ncols() != 16 {
        return Err(Error::DimensionMismatch(
            "expansion target must act on two rungs (16x16)".into(),
        ));
    }
    let h8 = h * 8.0;
    let s_ops = structure_operators();
    let mut gram = Array2::<f64>::zeros((14, 14));
    let mut rhs = Array1::<f64>::zeros(14);
    for i in 0..14 {
        rhs[i] = frobenius(&s_ops[i], &h8);
        for j in i..14 {
            let g = frobenius(&s_ops[i], &s_ops[j]);
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    let sol = gram.solve(&rhs)?;
    let mut j = [0.0; 14];
    for (ji, si) in j.iter_mut().zip(sol.iter()) {
        *ji = *si;
    }

    let mut remainder = h8.clone();
    for (coeff, op) in j.iter().zip(&s_ops) {
        remainder = remainder - op * *coeff;
    }
    let residual = numerics::max_abs_real(&remainder);

    let mut outside = Vec::new();
    if residual > 1e-14 {
        let rem_c = numerics::to_complex(remainder.view());
        for code in 0..256usize {
            let chars = [
                b"IXYZ"[(code >> 6) & 3],
                b"IXYZ"[(code >> 4) & 3],
                b"IXYZ"[(code >> 2) & 3],
                b"IXYZ"[code & 3],
            ];
            let p = pauli_string(chars);
            let mut tr = Complex64::new(0.0, 0.0);
            for r in 0..16 {
                for c in 0..16 {
                    tr += rem_c[(r, c)] * p[(c, r)];
                }
            }
            let coeff = tr.re / 16.0;
            if coeff.abs() > 1e-12 {
                outside.push((String::from_utf8_lossy(&chars).into_owned(), coeff));
            }
        }
    }

    let expansion = PauliExpansion {
        couplings: CouplingSet { j },
        residual,
        outside,
    };
    if residual > STRUCTURE_RESIDUAL_TOL {
        return Err(Error::StructureResidual { residual });
    }
    Ok(expansion)
}

/// The printed closed-form coupling constants, evaluated verbatim. The
/// numerically expanded couplings are authoritative; these expressions were
/// derived with the non-unit-norm `(2,0)` projector, so their `μ20` terms
/// deviate from [`pauli_expand`] of the renormalized operator. Comparison is
/// a diagnostic, not a gate.
pub fn coupling_formulas(
    a: f64,
    g: f64,
    epsilon: Sign,
    sigma: Sign,
    weights: &WeightSet,
) -> CouplingSet {
    let e = epsilon.value();
    let s = sigma.value();
    let (m22, m21, m20) = (weights.mu_22, weights.mu_21, weights.mu_20);
    let (m11, m10) = (weights.mu_11, weights.mu_10);
    let (mp1, mp0) = (weights.mu_1p1, weights.mu_1p0);
    let m00 = weights.mu_00;
    let a2 = a * a;
    let a4 = a2 * a2;
    let g2 = g * g;

    let mut j = [0.0; 14];
    j[0] = m22 + 4.0 * (m21 + m11 + mp1) + m10 - mp0 + 2.0 * (m00 + m20) + 16.0 * a4 * m20;
    j[1] = m22 + 0.5 * (-m21 + m11 + s * mp1 + mp0 - m10)
        + (4.0 / 3.0) * a2 * (g * s * e - 2.0 * a2) * m20;
    j[2] = 0.5 * (m21 - m11 - s * mp1) - (4.0 / 3.0) * s * e * a2 * g * m20;
    j[3] = -e * (m21 - m11) - s * e * mp1 + e * s * ((2.0 / 3.0) * g2 * m20 - m00);
    j[4] = -0.5 * e * (m21 + m11 - mp1) - (4.0 / 3.0) * a2 * g * m20;
    j[5] = 0.5 * (m00 - m10 - mp0) + (1.0 / 3.0) * m20 * (g2 - 8.0 * a4);
    j[6] = (8.0 / 3.0) * a4 * m20 + 0.5 * (mp0 - m10);
    j[7] = (8.0 / 3.0) * a4 * m20 + 0.5 * (m10 - mp0);
    j[8] = 2.0 * m22 + e * (m21 - m11) + s * e * mp1 - m10 - mp0 + (s * e - 1.0) * m00
        + (2.0 / 3.0) * m20 * (8.0 * a4 - (1.0 + s * e) * g2);
    j[9] = m22 + 0.5 * e * (m21 + m11 - mp1) + 0.5 * (m10 - mp0)
        + (4.0 / 3.0) * a2 * (g - 2.0 * a2) * m20;
    j[10] = m22 + 2.0 * (e - 1.0) * m21 + (e + 1.0) * (s - 1.0) * mp1 + (1.0 - s * e) * m00
        + (2.0 / 3.0) * (1.0 + s * e) * g2 * m20
        + (8.0 / 3.0) * a2 * (2.0 * a2 - g - g * s * e) * m20;
    j[11] = 0.5 * (-e * m21 + e * m11 - e * s * mp1 + m10 + mp0) + 0.5 * (e * s - 1.0) * m00
        + (m20 / 3.0) * (8.0 * a4 - (1.0 + s * e) * g2);
    j[12] = 0.5 * (m21 - m11 - s * mp1 + m10 - mp0) - (4.0 / 3.0) * a2 * (2.0 * a2 - g * s * e) * m20;
    j[13] = 0.5 * (-e * m21 - e * m11 + e * mp1 - m10 + mp0) + (4.0 / 3.0) * a2 * m20 * (g - 2.0 * a2);
    CouplingSet { j }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{null_space, to_complex, NULL_SPACE_TOL};
    use crate::oracle;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_weights(rng: &mut ChaCha8Rng) -> WeightSet {
        WeightSet {
            mu_22: rng.gen_range(0.0..1.0),
            mu_21: rng.gen_range(0.0..1.0),
            mu_20: rng.gen_range(0.0..1.0),
            mu_11: rng.gen_range(0.0..1.0),
            mu_10: rng.gen_range(0.0..1.0),
            mu_1p1: rng.gen_range(0.0..1.0),
            mu_1p0: rng.gen_range(0.0..1.0),
            mu_00: rng.gen_range(0.0..1.0),
        }
    }

    #[test]
    fn null_space_dimensions() {
        let m = LadderMps::class_a(1.0, 0.7, Sign::Plus, Sign::Plus).unwrap();
        let nv = null_space(&to_complex(constraint_matrix(&m).view()), NULL_SPACE_TOL);
        assert_eq!(nv.len(), 12);

        let z = Array2::<f64>::zeros((2, 2));
        let zero = LadderMps::custom([z.clone(), z.clone(), z.clone(), z]).unwrap();
        let nv = null_space(&to_complex(constraint_matrix(&zero).view()), NULL_SPACE_TOL);
        assert_eq!(nv.len(), 16);

        let b = LadderMps::class_b(0.3);
        let nv = null_space(&to_complex(constraint_matrix(&b).view()), NULL_SPACE_TOL);
        assert_eq!(nv.len(), 12);
    }

    #[test]
    fn basis_vectors_are_annihilated_and_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for eps in Sign::BOTH {
            for sig in Sign::BOTH {
                for _ in 0..25 {
                    let a = rng.gen_range(0.2..2.0);
                    let g = rng.gen_range(0.05..2.0) * [-1.0, 1.0][rng.gen_range(0..2)];
                    let basis = multiplet_basis(a, g, eps, sig).unwrap();
                    assert_eq!(basis.vectors().len(), 12);
                    for (i, (_, v)) in basis.vectors().iter().enumerate() {
                        assert_abs_diff_eq!(v.dot(v).sqrt(), 1.0, epsilon = 1e-12);
                        for (_, w) in basis.vectors().iter().skip(i + 1) {
                            assert!(v.dot(w).abs() <= 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn simple_basis_vectors() {
        let basis = multiplet_basis(0.9, 0.4, Sign::Plus, Sign::Minus).unwrap();
        let v22 = basis.get(MultipletLabel::new(Irrep::Two, 2)).unwrap();
        assert_abs_diff_eq!(v22[0], 1.0, epsilon = 0.0);
        let v2m2 = basis.get(MultipletLabel::new(Irrep::Two, -2)).unwrap();
        assert_abs_diff_eq!(v2m2[15], 1.0, epsilon = 0.0);
        // |1,0> = (|0110> - |1001>)/√2
        let v10 = basis.get(MultipletLabel::new(Irrep::One, 0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v10[0b0110], s, epsilon = 1e-15);
        assert_abs_diff_eq!(v10[0b1001], -s, epsilon = 1e-15);
    }

    #[test]
    fn basis_spans_the_numeric_null_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..20 {
            let eps = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let sig = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let a = rng.gen_range(0.2..2.0);
            let g = rng.gen_range(0.05..2.0) * [-1.0, 1.0][rng.gen_range(0..2)];
            let basis = multiplet_basis(a, g, eps, sig).unwrap();
            let m = LadderMps::class_a(a, g, eps, sig).unwrap();
            let numeric = null_space(&to_complex(constraint_matrix(&m).view()), NULL_SPACE_TOL);
            assert_eq!(numeric.len(), 12);
            // project each numeric vector onto the labeled span and vice versa
            for nv in &numeric {
                let mut proj = Array1::<f64>::zeros(16);
                for (_, bv) in basis.vectors() {
                    let amp: f64 = (0..16).map(|k| bv[k] * nv[k].re).sum();
                    proj = proj + bv * amp;
                }
                let res: f64 = (0..16)
                    .map(|k| (proj[k] - nv[k].re).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-9, "numeric vector escapes the labeled span: {res}");
            }
            for (_, bv) in basis.vectors() {
                let mut proj = Array1::<f64>::zeros(16);
                for nv in &numeric {
                    let amp: f64 = (0..16).map(|k| nv[k].re * bv[k]).sum();
                    for k in 0..16 {
                        proj[k] += nv[k].re * amp;
                    }
                }
                let res: f64 = (0..16).map(|k| (proj[k] - bv[k]).powi(2)).sum::<f64>().sqrt();
                assert!(res <= 1e-9, "labeled vector escapes the numeric span: {res}");
            }
        }
    }

    #[test]
    fn rotational_point_vectors_carry_spin_quantum_numbers() {
        let basis = multiplet_basis(0.5, -1.0, Sign::Minus, Sign::Minus).unwrap();
        // total Sz and S² on four sites
        let mut sz = Array2::<f64>::zeros((16, 16));
        let mut s2 = Array2::<f64>::zeros((16, 16));
        for c in *b"XYZ" {
            let mut total = CMat::zeros((16, 16));
            for site in 0..4 {
                let mut chars = [b'I'; 4];
                chars[site] = c;
                total = total + pauli_string(chars).mapv(|z| z * 0.5);
            }
            let sq = total.dot(&total);
            s2 = s2 + sq.mapv(|z| z.re);
            if c == b'Z' {
                sz = total.mapv(|z| z.re);
            }
        }
        for (label, v) in basis.vectors() {
            let want_l = match label.irrep {
                Irrep::Two => 6.0,
                Irrep::One | Irrep::OnePrime => 2.0,
                Irrep::Zero => 0.0,
            };
            let szv = sz.dot(v);
            let s2v = s2.dot(v);
            for k in 0..16 {
                assert_abs_diff_eq!(szv[k], f64::from(label.m) * v[k], epsilon = 1e-12);
                assert_abs_diff_eq!(s2v[k], want_l * v[k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn local_h_with_zero_weights_vanishes() {
        let basis = multiplet_basis(1.0, 0.7, Sign::Plus, Sign::Plus).unwrap();
        let lh = local_h(&basis, &WeightSet::zeros()).unwrap();
        assert_eq!(numerics::max_abs_real(&lh.h), 0.0);
    }

    #[test]
    fn local_h_single_weight_is_projector_pair() {
        let basis = multiplet_basis(1.0, 0.7, Sign::Plus, Sign::Plus).unwrap();
        let mut w = WeightSet::zeros();
        w.mu_22 = 1.0;
        let lh = local_h(&basis, &w).unwrap();
        let mut expect = Array2::<f64>::zeros((16, 16));
        expect[(0, 0)] = 1.0;
        expect[(15, 15)] = 1.0;
        assert!(numerics::max_abs_real(&(&lh.h - &expect)) <= 1e-15);
    }

    #[test]
    fn negative_weight_is_rejected() {
        let basis = multiplet_basis(1.0, 0.7, Sign::Plus, Sign::Plus).unwrap();
        let mut w = WeightSet::zeros();
        w.mu_10 = -0.5;
        assert!(matches!(
            local_h(&basis, &w),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn local_h_is_symmetric_psd_and_symmetry_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let basis = multiplet_basis(1.1, -0.8, Sign::Minus, Sign::Plus).unwrap();
        let w = random_weights(&mut rng);
        let lh = local_h(&basis, &w).unwrap();
        let h = &lh.h;
        assert!(numerics::max_abs_real(&(h - &h.t().to_owned())) <= 1e-14);
        assert!(lh.min_eigenvalue().unwrap() >= -1e-12);

        // parity: |ijkl> -> |klij>; leg exchange: -> |jilk>; flip: -> complements
        let parity = |idx: usize| ((idx & 0b0011) << 2) | (idx >> 2);
        let legx = |idx: usize| {
            let (i, j, k, l) = (idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1);
            (j << 3) | (i << 2) | (l << 1) | k
        };
        let flip = |idx: usize| 15 - idx;
        for perm in [parity as fn(usize) -> usize, legx, flip] {
            let mut conj = Array2::<f64>::zeros((16, 16));
            for r in 0..16 {
                for c in 0..16 {
                    conj[(perm(r), perm(c))] = h[(r, c)];
                }
            }
            assert!(numerics::max_abs_real(&(&conj - h)) <= 1e-10);
        }

        // h commutes with the total z rotation generator
        let mut sz = Array2::<f64>::zeros((16, 16));
        for site in 0..4 {
            let mut chars = [b'I'; 4];
            chars[site] = b'Z';
            sz = sz + real_part(&pauli_string(chars)) * 0.5;
        }
        let comm = h.dot(&sz) - sz.dot(h);
        assert!(numerics::max_abs_real(&comm) <= 1e-10);
    }

    #[test]
    fn rotational_local_h_commutes_with_all_generators() {
        let basis = multiplet_basis(0.5, -1.0, Sign::Minus, Sign::Minus).unwrap();
        let lh = local_h(&basis, &WeightSet::rotational(0.7, 0.4, 0.9, 0.2)).unwrap();
        for c in *b"XYZ" {
            let mut gen = CMat::zeros((16, 16));
            for site in 0..4 {
                let mut chars = [b'I'; 4];
                chars[site] = c;
                gen = gen + pauli_string(chars).mapv(|z| z * 0.5);
            }
            let hc = numerics::to_complex(lh.h.view());
            let comm = hc.dot(&gen) - gen.dot(&hc);
            assert!(numerics::max_abs(&comm) <= 1e-10);
        }
    }

    #[test]
    fn embed_examples() {
        let zero = Array2::<f64>::zeros((16, 16));
        let h_emb = embed_global(&zero, 3).unwrap();
        assert_eq!(numerics::max_abs_real(&h_emb), 0.0);

        // N = 2: both placements, the second with the rungs swapped
        let basis = multiplet_basis(0.8, 0.5, Sign::Plus, Sign::Plus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let lh = local_h(&basis, &random_weights(&mut rng)).unwrap();
        let h2 = embed_global(&lh.h, 2).unwrap();
        let mut expect = lh.h.clone();
        for r in 0..16 {
            for c in 0..16 {
                let swap = |idx: usize| (idx % 4) * 4 + idx / 4;
                expect[(swap(r), swap(c))] += lh.h[(r, c)];
            }
        }
        assert!(numerics::max_abs_real(&(&h2 - &expect)) <= 1e-13);

        assert!(embed_global(&lh.h, 7).is_err());
    }

    #[test]
    fn frustration_free_on_dense_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..6 {
            let eps = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let sig = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let a = rng.gen_range(0.2..2.0);
            let g = rng.gen_range(0.05..2.0) * [-1.0, 1.0][rng.gen_range(0..2)];
            let basis = multiplet_basis(a, g, eps, sig).unwrap();
            let lh = local_h(&basis, &random_weights(&mut rng)).unwrap();
            let m = LadderMps::class_a(a, g, eps, sig).unwrap();
            for n in [4, 5] {
                let h_global = embed_global(&lh.h, n).unwrap();
                let psi = oracle::build_state(&m, n).unwrap();
                let res = oracle::hamiltonian_residual(&h_global, &psi).unwrap();
                assert!(res <= 1e-9, "residual {res} at N = {n}");
            }
        }
    }

    #[test]
    fn ground_state_energy_vanishes_with_dense_eigensolve() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let basis = multiplet_basis(1.0, 0.7, Sign::Plus, Sign::Plus).unwrap();
        let lh = local_h(&basis, &random_weights(&mut rng)).unwrap();
        let h4 = embed_global(&lh.h, 4).unwrap();
        let (vals, _) = h4.eigh(UPLO::Lower).unwrap();
        assert!(vals[0] >= -1e-10);
        assert!(vals[0].abs() <= 1e-10);
        let m = LadderMps::class_a(1.0, 0.7, Sign::Plus, Sign::Plus).unwrap();
        let psi = oracle::build_state(&m, 4).unwrap();
        assert!(oracle::hamiltonian_residual(&h4, &psi).unwrap() <= 1e-9);
    }

    #[test]
    fn kernel_membership_holds_at_the_transition() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let basis = multiplet_basis(0.9, 0.0, Sign::Plus, Sign::Plus).unwrap();
        let lh = local_h(&basis, &random_weights(&mut rng)).unwrap();
        let h4 = embed_global(&lh.h, 4).unwrap();
        let m = LadderMps::class_a(0.9, 0.0, Sign::Plus, Sign::Plus).unwrap();
        let psi = oracle::build_state(&m, 4).unwrap();
        assert!(oracle::hamiltonian_residual(&h4, &psi).unwrap() <= 1e-9);
    }

    #[test]
    fn pauli_expansion_roundtrip_single_projector() {
        let basis = multiplet_basis(1.0, 0.7, Sign::Plus, Sign::Plus).unwrap();
        let mut w = WeightSet::zeros();
        w.mu_22 = 1.0;
        let lh = local_h(&basis, &w).unwrap();
        let exp = pauli_expand(&lh.h).unwrap();
        assert!(exp.residual <= 1e-12);
        assert!(exp.outside.is_empty());
        // reassemble and compare
        let s_ops = structure_operators();
        let mut back = Array2::<f64>::zeros((16, 16));
        for (coeff, op) in exp.couplings.j.iter().zip(&s_ops) {
            back = back + op * *coeff;
        }
        assert!(numerics::max_abs_real(&(&back - &(lh.h.clone() * 8.0))) <= 1e-12);
    }

    #[test]
    fn pauli_expansion_is_complete_for_generic_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..10 {
            let eps = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let sig = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let a = rng.gen_range(0.2..2.0);
            let g = rng.gen_range(0.05..2.0) * [-1.0, 1.0][rng.gen_range(0..2)];
            let basis = multiplet_basis(a, g, eps, sig).unwrap();
            let lh = local_h(&basis, &random_weights(&mut rng)).unwrap();
            let exp = pauli_expand(&lh.h).unwrap();
            assert!(exp.residual <= 1e-12, "residual {}", exp.residual);
        }
    }

    #[test]
    fn rotational_limit_couplings() {
        let (mu, nu, xi, eta) = (0.9, 0.3, 0.6, 0.8);
        let basis = multiplet_basis(0.5, -1.0, Sign::Minus, Sign::Minus).unwrap();
        let lh = local_h(&basis, &WeightSet::rotational(mu, nu, xi, eta)).unwrap();
        let exp = pauli_expand(&lh.h).unwrap();
        let j = exp.couplings.j;
        // anisotropic couplings vanish
        for idx in [1, 8, 9, 10, 11, 12, 13] {
            assert!(j[idx].abs() <= 1e-10, "J{idx} = {}", j[idx]);
        }
        assert_abs_diff_eq!(j[2], 5.0 * mu - nu + xi, epsilon = 1e-9);
        assert_abs_diff_eq!(j[3], 10.0 * mu - 2.0 * nu - 2.0 * xi - 2.0 * eta, epsilon = 1e-9);
        assert_abs_diff_eq!(j[4], 5.0 * mu + nu - xi, epsilon = 1e-9);
        assert_abs_diff_eq!(j[5], mu - nu - xi + eta, epsilon = 1e-9);
        assert_abs_diff_eq!(j[6], mu + xi - nu, epsilon = 1e-9);
        assert_abs_diff_eq!(j[7], mu + nu - xi, epsilon = 1e-9);
    }

    #[test]
    fn printed_formulas_match_expansion_when_mu20_is_absent() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..8 {
            let eps = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let sig = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
            let a = rng.gen_range(0.3..1.5);
            let g = rng.gen_range(0.1..1.5) * [-1.0, 1.0][rng.gen_range(0..2)];
            let mut w = random_weights(&mut rng);
            w.mu_20 = 0.0;
            let basis = multiplet_basis(a, g, eps, sig).unwrap();
            let lh = local_h(&basis, &w).unwrap();
            let numeric = pauli_expand(&lh.h).unwrap().couplings;
            let printed = coupling_formulas(a, g, eps, sig, &w);
            for idx in 1..14 {
                assert!(
                    (numeric.j[idx] - printed.j[idx]).abs() <= 1e-9,
                    "J{idx}: numeric {} vs printed {}",
                    numeric.j[idx],
                    printed.j[idx]
                );
            }
        }
    }

    #[test]
    fn coupling_formulas_zero_weights() {
        let w = WeightSet::zeros();
        let c = coupling_formulas(1.0, 0.5, Sign::Plus, Sign::Plus, &w);
        assert_eq!(c, CouplingSet::zeros());
    }

    #[test]
    fn coupling_formulas_rotational_values() {
        let w = WeightSet::rotational(1.0, 1.0, 1.0, 1.0);
        let c = coupling_formulas(0.5, -1.0, Sign::Minus, Sign::Minus, &w);
        assert_abs_diff_eq!(c.j[2], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.j[3], 4.0, epsilon = 1e-12);
    }
}
