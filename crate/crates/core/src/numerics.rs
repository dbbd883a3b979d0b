//! Small dense matrix kernel used by every other module.
//!
//! Matrices are stored as complex `ndarray` arrays even though the physical
//! rung matrices are real (time-reversal invariance): the transfer operator of
//! an unconstrained input can carry complex spectrum, and a single complex
//! code path keeps the eigen handling uniform. Eigendecompositions, singular
//! values and inverses are delegated to LAPACK.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Eig, Inverse, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

/// Largest dimension accepted by [`eigen_decompose`].
pub const MAX_EIGEN_DIM: usize = 64;

/// Default relative tolerance for [`null_space`].
pub const NULL_SPACE_TOL: f64 = 1e-9;

/// Relative gap under which two eigenvalues are grouped as degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

pub fn to_complex(m: ArrayView2<'_, f64>) -> CMat {
    m.mapv(|x| Complex64::new(x, 0.0))
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &Array2<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Kronecker product with row-major composite indexing:
/// `(a ⊗ b)[(i,k),(j,l)] = a[i,j] b[k,l]`, composite row `i * rows(b) + k`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    kron_generic(a, b)
}

pub fn kron_real(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    kron_generic(a, b)
}

fn kron_generic<T>(a: &Array2<T>, b: &Array2<T>) -> Array2<T>
where
    T: std::ops::Mul<Output = T> + Copy + num_complex::ComplexFloat,
{
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::from_elem((ar * br, ac * bc), T::zero());
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial trace of an operator on `n` sites of local dimension `local_dim`,
/// keeping the sites listed in `keep` (0-based, in increasing order).
pub fn partial_trace(m: &CMat, keep: &[usize], local_dim: usize) -> Result<CMat> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let mut n_sites = 0usize;
    let mut d = 1usize;
    while d < dim {
        d *= local_dim;
        n_sites += 1;
    }
    if d != dim {
        return Err(Error::DimensionMismatch(format!(
            "dimension {dim} is not a power of the local dimension {local_dim}"
        )));
    }
    if keep.iter().any(|&k| k >= n_sites) {
        return Err(Error::DimensionMismatch(format!(
            "kept site out of range for {n_sites} sites"
        )));
    }
    let traced: Vec<usize> = (0..n_sites).filter(|s| !keep.contains(s)).collect();
    let kdim = local_dim.pow(keep.len() as u32);
    let tdim = local_dim.pow(traced.len() as u32);

    // Site 0 is the most significant digit of the composite index.
    let digit_weight = |site: usize| local_dim.pow((n_sites - 1 - site) as u32);
    let assemble = |sites: &[usize], digits: usize| -> usize {
        let mut rem = digits;
        let mut idx = 0usize;
        for &s in sites.iter().rev() {
            idx += (rem % local_dim) * digit_weight(s);
            rem /= local_dim;
        }
        idx
    };

    let mut out = CMat::zeros((kdim, kdim));
    for kr in 0..kdim {
        for kc in 0..kdim {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..tdim {
                let row = assemble(keep, kr) + assemble(&traced, t);
                let col = assemble(keep, kc) + assemble(&traced, t);
                acc += m[(row, col)];
            }
            out[(kr, kc)] = acc;
        }
    }
    Ok(out)
}

/// Complete eigensystem of a diagonalizable matrix.
///
/// Eigenvalues are sorted by descending modulus, ties broken by descending
/// real then imaginary part. Right eigenvectors have unit norm; left
/// eigenvectors are the rows of the inverted right-eigenvector matrix, so the
/// pairing `left_i · right_j = δ_ij` (unconjugated dot) holds by construction
/// and `Σ_i λ_i r_i l_iᵀ` reconstructs the input.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub right: Vec<CVec>,
    pub left: Vec<CVec>,
    /// True for every eigenvalue that belongs to a degenerate group.
    pub degenerate: Vec<bool>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn has_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }

    /// `Σ_i λ_i r_i l_iᵀ`.
    pub fn reconstruct(&self) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros((n, n));
        for i in 0..n {
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += self.eigenvalues[i] * self.right[i][r] * self.left[i][c];
                }
            }
        }
        out
    }

    /// `l_i · M · r_j` with the stored biorthogonal pairing.
    pub fn sandwich(&self, m: &CMat, i: usize, j: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.dim() {
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..self.dim() {
                row += m[(r, c)] * self.right[j][c];
            }
            acc += self.left[i][r] * row;
        }
        acc
    }

    /// Max left-vector norm; grows like the eigenbasis condition number since
    /// right vectors are unit normalized.
    pub fn basis_condition(&self) -> f64 {
        self.left
            .iter()
            .map(|l| l.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(1.0, f64::max)
    }
}

fn sort_order(vals: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&i, &j| {
        vals[j]
            .norm()
            .partial_cmp(&vals[i].norm())
            .unwrap()
            .then(vals[j].re.partial_cmp(&vals[i].re).unwrap())
            .then(vals[j].im.partial_cmp(&vals[i].im).unwrap())
    });
    idx
}

/// Eigenvalues only, in the canonical sort order. Works for defective input.
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    check_square(m)?;
    let (vals, _) = m.eig()?;
    let vals: Vec<Complex64> = vals.to_vec();
    let order = sort_order(&vals);
    Ok(order.into_iter().map(|i| vals[i]).collect())
}

pub fn eigen_decompose(m: &CMat) -> Result<Spectrum> {
    check_square(m)?;
    let n = m.nrows();
    let (vals, vecs) = m.eig()?;
    let vals: Vec<Complex64> = vals.to_vec();
    let order = sort_order(&vals);

    let mut rmat = CMat::zeros((n, n));
    let mut eigenvalues = Vec::with_capacity(n);
    for (col, &i) in order.iter().enumerate() {
        eigenvalues.push(vals[i]);
        let v = vecs.column(i);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            rmat[(r, col)] = v[r] / norm;
        }
    }
    let lmat = rmat.inv().map_err(|_| Error::DefectiveMatrix)?;

    // A defective matrix yields nearly parallel eigenvector columns; the
    // inversion then succeeds numerically but the spectral reconstruction
    // falls apart. Gate on the reconstruction residual.
    {
        let mut recon_defect: f64 = 0.0;
        let scale = max_abs(m).max(1.0);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    acc += eigenvalues[i] * rmat[(r, i)] * lmat[(i, c)];
                }
                recon_defect = recon_defect.max((acc - m[(r, c)]).norm());
            }
        }
        if recon_defect > 1e-10 * scale {
            return Err(Error::DefectiveMatrix);
        }
    }

    let scale = eigenvalues
        .first()
        .map(|z| z.norm())
        .unwrap_or(0.0)
        .max(1.0);
    let mut degenerate = vec![false; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= DEGENERACY_TOL * scale {
                degenerate[i] = true;
                degenerate[j] = true;
            }
        }
    }

    let right = (0..n).map(|i| rmat.column(i).to_owned()).collect();
    let left = (0..n).map(|i| lmat.row(i).to_owned()).collect();
    Ok(Spectrum {
        eigenvalues,
        right,
        left,
        degenerate,
    })
}

/// Orthonormal basis of the numeric null space: right singular vectors whose
/// singular value is at most `tol * σ_max`. The empty result is valid.
pub fn null_space(m: &CMat, tol: f64) -> Vec<CVec> {
    let cols = m.ncols();
    let (_, sigma, vt) = m
        .svd(false, true)
        .expect("SVD of a finite matrix cannot fail");
    let vt = vt.expect("requested right singular vectors");
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 0..cols {
        let s = sigma.get(i).copied().unwrap_or(0.0);
        if s <= tol * smax {
            // rows of V^H conjugate back to columns of V
            out.push(vt.row(i).mapv(|z| z.conj()));
        }
    }
    out
}

fn check_square(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() > MAX_EIGEN_DIM {
        return Err(Error::TooLarge {
            dim: m.nrows(),
            max: MAX_EIGEN_DIM,
        });
    }
    Ok(())
}

/// `base^exp` by repeated squaring. Used for finite-size trace formulas at
/// points where the transfer operator has no complete eigenbasis; scale the
/// base first so powers stay in range.
pub fn matrix_power(base: &Array2<f64>, exp: usize) -> Array2<f64> {
    let n = base.nrows();
    let mut result = Array2::eye(n);
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = result.dot(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.dot(&sq);
        }
    }
    result
}
