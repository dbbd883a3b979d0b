//! Brute-force ground truth: explicit dense states built from the trace
//! formula, expectation values and reduced density matrices on them, residuals
//! of candidate parent Hamiltonians, and the closed-form limit states.

use std::io::Write;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{LadderMps, RungState, Sign};
use crate::numerics::CMat;

/// Largest rung count for dense-state construction (4^10 ≈ 10^6 amplitudes).
pub const MAX_DENSE_RUNGS: usize = 10;

/// Explicit state vector over base-4 rung configurations. Rung 1 is the most
/// significant digit; within a rung the leg-1 bit is high, so the digit of
/// rung state |ij> is `2i + j`.
#[derive(Debug, Clone)]
pub struct DenseState {
    n_rungs: usize,
    amps: Vec<f64>,
}

impl DenseState {
    pub fn new(n_rungs: usize, amps: Vec<f64>) -> Result<DenseState> {
        if amps.len() != 4usize.pow(n_rungs as u32) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for {} rungs, got {}",
                4usize.pow(n_rungs as u32),
                n_rungs,
                amps.len()
            )));
        }
        Ok(DenseState { n_rungs, amps })
    }

    pub fn n_rungs(&self) -> usize {
        self.n_rungs
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// |<self|other>| on normalized states; the absolute value quotients out
    /// global sign conventions.
    pub fn overlap(&self, other: &DenseState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "overlap of states with different rung counts".into(),
            ));
        }
        let dot: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a * b)
            .sum();
        Ok(dot.abs() / (self.norm() * other.norm()))
    }

    /// Digit of rung `k` (1-based) in configuration `idx`.
    pub fn digit(&self, idx: usize, k: usize) -> usize {
        (idx / 4usize.pow((self.n_rungs - k) as u32)) % 4
    }

    /// Binary dump: an 8-byte little-endian rung count followed by the raw
    /// f64 amplitudes.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.n_rungs as u64).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.to_le_bytes())?;
        }
        Ok(())
    }
}

fn check_rungs(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_RUNGS {
        return Err(Error::TooLarge {
            dim: n,
            max: MAX_DENSE_RUNGS,
        });
    }
    Ok(())
}

/// Dense state with `amplitude[config] = tr(Π A)`, built by a depth-first
/// walk that reuses the partial product of each configuration prefix.
pub fn build_state(mps: &LadderMps, n: usize) -> Result<DenseState> {
    check_rungs(n)?;
    let dim = 4usize.pow(n as u32);
    let mut amps = vec![0.0; dim];
    let mats: Vec<[[f64; 2]; 2]> = RungState::ALL
        .iter()
        .map(|s| {
            let m = mps.matrix(*s);
            [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
        })
        .collect();

    fn walk(
        mats: &[[[f64; 2]; 2]],
        prefix: [[f64; 2]; 2],
        depth: usize,
        n: usize,
        base: usize,
        amps: &mut [f64],
    ) {
        if depth == n {
            amps[base] = prefix[0][0] + prefix[1][1];
            return;
        }
        for (d, m) in mats.iter().enumerate() {
            let next = [
                [
                    prefix[0][0] * m[0][0] + prefix[0][1] * m[1][0],
                    prefix[0][0] * m[0][1] + prefix[0][1] * m[1][1],
                ],
                [
                    prefix[1][0] * m[0][0] + prefix[1][1] * m[1][0],
                    prefix[1][0] * m[0][1] + prefix[1][1] * m[1][1],
                ],
            ];
            walk(mats, next, depth + 1, n, base * 4 + d, amps);
        }
    }

    walk(&mats, [[1.0, 0.0], [0.0, 1.0]], 0, n, 0, &mut amps);
    DenseState::new(n, amps)
}

/// `<ψ|O(k)|ψ> / <ψ|ψ>` for a 4x4 rung operator placed on rung `k` (1-based).
pub fn expectation(state: &DenseState, op: &CMat, k: usize) -> Result<f64> {
    expectation_impl(state, &[(k, op)])
}

/// `<ψ|O(k) O(l)|ψ> / <ψ|ψ>` for the same operator on two distinct rungs.
pub fn expectation_pair(state: &DenseState, op: &CMat, k: usize, l: usize) -> Result<f64> {
    if k == l {
        return Err(Error::InvalidParameter(
            "two-point placement requires distinct rungs".into(),
        ));
    }
    expectation_impl(state, &[(k, op), (l, op)])
}

fn expectation_impl(state: &DenseState, placements: &[(usize, &CMat)]) -> Result<f64> {
    let n = state.n_rungs;
    for (k, op) in placements {
        if *k == 0 || *k > n {
            return Err(Error::InvalidParameter(format!(
                "rung index {k} out of range 1..={n}"
            )));
        }
        if op.nrows() != 4 || op.ncols() != 4 {
            return Err(Error::DimensionMismatch("rung operator must be 4x4".into()));
        }
    }
    let mut phi: Vec<Complex64> = state
        .amps
        .iter()
        .map(|&a| Complex64::new(a, 0.0))
        .collect();
    for (k, op) in placements {
        phi = apply_rung_op(&phi, op, *k, n);
    }
    let num: Complex64 = state
        .amps
        .iter()
        .zip(&phi)
        .map(|(&a, &p)| a * p)
        .sum();
    let den = state.norm_sq();
    if den == 0.0 {
        return Err(Error::DegenerateState { z: 0.0 });
    }
    debug_assert!(num.im.abs() <= 1e-9 * (1.0 + num.re.abs()));
    Ok(num.re / den)
}

fn apply_rung_op(psi: &[Complex64], op: &CMat, k: usize, n: usize) -> Vec<Complex64> {
    let stride = 4usize.pow((n - k) as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let d = (idx / stride) % 4;
        let base = idx - d * stride;
        for dp in 0..4 {
            let w = op[(d, dp)];
            if w.norm() != 0.0 {
                *o += w * psi[base + dp * stride];
            }
        }
    }
    out
}

/// Reduced 4x4 density matrix of rung `k` on the normalized state.
pub fn reduced(state: &DenseState, k: usize) -> Result<Array2<f64>> {
    let n = state.n_rungs;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "rung index {k} out of range 1..={n}"
        )));
    }
    let den = state.norm_sq();
    if den == 0.0 {
        return Err(Error::DegenerateState { z: 0.0 });
    }
    let stride = 4usize.pow((n - k) as u32);
    let dim = state.dim();
    let mut rho = Array2::<f64>::zeros((4, 4));
    // iterate over (high, low) environment configurations around rung k
    let high_count = dim / (4 * stride);
    for h in 0..high_count {
        for low in 0..stride {
            let base = h * 4 * stride + low;
            for r in 0..4 {
                for c in 0..4 {
                    rho[(r, c)] += state.amps[base + r * stride] * state.amps[base + c * stride];
                }
            }
        }
    }
    Ok(rho / den)
}

/// `||Hψ|| / ||ψ||` for a dense Hamiltonian.
pub fn hamiltonian_residual(h: &Array2<f64>, state: &DenseState) -> Result<f64> {
    if h.nrows() != state.dim() || h.ncols() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian is {}x{} but the state has {} amplitudes",
            h.nrows(),
            h.ncols(),
            state.dim()
        )));
    }
    let norm = state.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateState { z: 0.0 });
    }
    let mut hnorm_sq = 0.0;
    for r in 0..h.nrows() {
        let mut acc = 0.0;
        for c in 0..h.ncols() {
            acc += h[(r, c)] * state.amps[c];
        }
        hnorm_sq += acc * acc;
    }
    Ok(hnorm_sq.sqrt() / norm)
}

/// Closed-form ground state at the transition `g = 0`: only configurations of
/// |u> = |01> and |d> = |10> rungs survive, with amplitude
/// `a^k (εb)^{N-k} + b^k (εa)^{N-k}` for `k` rungs in the |u> state.
pub fn g_zero_state(a: f64, b: f64, epsilon: Sign, n: usize) -> Result<DenseState> {
    check_rungs(n)?;
    let e = epsilon.value();
    let dim = 4usize.pow(n as u32);
    let mut amps = vec![0.0; dim];
    'config: for (idx, amp) in amps.iter_mut().enumerate() {
        let mut rem = idx;
        let mut ups = 0usize;
        for _ in 0..n {
            match rem % 4 {
                1 => ups += 1,
                2 => {}
                _ => continue 'config,
            }
            rem /= 4;
        }
        let k = ups as i32;
        let nk = (n - ups) as i32;
        *amp = a.powi(k) * (e * b).powi(nk) + b.powi(k) * (e * a).powi(nk);
    }
    DenseState::new(n, amps)
}

/// Squared norm of the unnormalized `g = 0` state: `2[(a²+b²)^N + (2ab)^N]`.
pub fn g_zero_norm_sq(a: f64, b: f64, n: usize) -> f64 {
    2.0 * ((a * a + b * b).powi(n as i32) + (2.0 * a * b).powi(n as i32))
}

/// Large-|g| limit state: the equal cat of the two alternating fully
/// polarized rung patterns |t1 t-1 t1 ...> and |t-1 t1 t-1 ...> with
/// |t1> = |00>, |t-1> = |11>.
///
/// The corner matrix `A00` is nilpotent, so uniform configurations carry zero
/// amplitude; the surviving large-|g| configurations alternate the two
/// polarized rung states, which requires an even ring.
pub fn ghz_state(n: usize) -> Result<DenseState> {
    check_rungs(n)?;
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "the alternating polarized cat state needs an even number of rungs".into(),
        ));
    }
    let dim = 4usize.pow(n as u32);
    let mut amps = vec![0.0; dim];
    let mut idx_a = 0usize;
    let mut idx_b = 0usize;
    for k in 0..n {
        let (da, db) = if k % 2 == 0 { (0, 3) } else { (3, 0) };
        idx_a = idx_a * 4 + da;
        idx_b = idx_b * 4 + db;
    }
    let w = 1.0 / std::f64::consts::SQRT_2;
    amps[idx_a] = w;
    amps[idx_b] = w;
    DenseState::new(n, amps)
}

/// Overlap of the model's dense state with [`ghz_state`].
pub fn ghz_overlap(mps: &LadderMps, n: usize) -> Result<f64> {
    let psi = build_state(mps, n)?;
    let cat = ghz_state(n)?;
    psi.overlap(&cat)
}
