use alloc::vec::Vec;

use super::{CMatrix, C64, HERMITIAN_TOL};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Spectrum of a Hermitian matrix: `A = V diag(values) V†`, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * self.values[k])
                .sum()
        })
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Sweeps stop once the off-diagonal Frobenius mass falls below `1e-14·‖A‖_F`.
pub fn hermitian_eigensystem(a: &CMatrix) -> Result<HermitianEigen> {
    let n = a.ensure_square()?;
    let norm = a.frobenius_norm();
    let (asymmetry, row, col) = a.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOL * norm {
        return Err(Error::NotHermitian { asymmetry, row, col });
    }

    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * norm;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

// Annihilates m[p][q] with the unitary V = diag-phase · real rotation, then
// accumulates V into the eigenvector matrix.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 || !mag.is_finite() {
        return;
    }
    let w = apq / mag;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let wc = w.conj();
    let n = m.rows();

    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * c - wc * akq * s;
        m[(k, q)] = akp * s + wc * akq * c;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = apk * c - w * aqk * s;
        m[(q, k)] = apk * s + w * aqk * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - wc * vkq * s;
        v[(k, q)] = vkp * s + wc * vkq * c;
    }
}

/// Outcome of a positive-semidefiniteness test; the minimum eigenvalue is
/// always reported as a witness.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// `λ_min(A) ≥ −tol·max(1, ‖A‖₂)`.
pub fn is_psd(a: &CMatrix, tol: f64) -> Result<PsdCheck> {
    let eig = hermitian_eigensystem(a)?;
    let min_eigenvalue = eig.min();
    Ok(PsdCheck {
        psd: min_eigenvalue >= -tol * eig.norm().max(1.0),
        min_eigenvalue,
    })
}
