//! Small complex linear algebra used throughout: a 2×2 matrix type for
//! transfer matrices and thin wrappers around nalgebra's dense routines.

use std::ops::Mul;

use nalgebra::{DMatrix, DVector};

use crate::C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A 2×2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Mat2([[m11, m12], [m21, m22]])
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Mat2([[d1, ZERO], [ZERO, d2]])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ]))
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// Frobenius norm of `self* self - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.adjoint() * *self;
        let mut acc = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                acc += (g.0[r][c] - Mat2::IDENTITY.0[r][c]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn to_dmatrix(&self) -> CMatrix {
        CMatrix::from_fn(2, 2, |r, c| self.0[r][c])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

/// Singular value decomposition with singular values sorted in descending order.
pub struct SortedSvd {
    pub singular_values: Vec<f64>,
    /// Left singular vectors, column `i` pairs with `singular_values[i]`.
    pub u: CMatrix,
    /// Right singular vectors, column `i` pairs with `singular_values[i]`.
    pub v: CMatrix,
}

impl SortedSvd {
    pub fn new(m: &CMatrix) -> SortedSvd {
        let svd = m.clone().svd(true, true);
        let u = svd.u.expect("requested U");
        let v = svd.v_t.expect("requested V^T").adjoint();
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
        let u = CMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
        let v = CMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
        SortedSvd {
            singular_values,
            u,
            v,
        }
    }

    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    pub fn condition_number(&self) -> f64 {
        let max = self.singular_values.first().copied().unwrap_or(0.0);
        let min = self.singular_values.last().copied().unwrap_or(0.0);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// The `count` right singular vectors belonging to the smallest singular values.
    pub fn null_vectors(&self, count: usize) -> Vec<CVector> {
        let n = self.v.ncols();
        (n - count..n)
            .map(|c| self.v.column(c).into_owned())
            .collect()
    }

    /// Minimum-norm solution of `A x = b` using only the leading `rank` singular triplets.
    pub fn truncated_solve(&self, b: &CVector, rank: usize) -> CVector {
        let mut x = CVector::zeros(self.v.nrows());
        for i in 0..rank {
            let coef = self.u.column(i).dotc(b) / self.singular_values[i];
            x += self.v.column(i) * coef;
        }
        x
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &CMatrix, b: &CVector) -> Option<CVector> {
    a.clone().lu().solve(b)
}

/// Eigenvalues of a square complex matrix via the Schur decomposition (shifted QR iteration).
pub fn eigenvalues(a: &CMatrix) -> Vec<C64> {
    nalgebra::linalg::Schur::new(a.clone())
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default()
}

pub fn matrix_power(a: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

/// Rescales `v` to unit norm and rotates its phase so that the first entry whose
/// modulus is within a factor two of the largest one is real and positive.
pub fn normalize_with_phase(v: &CVector) -> CVector {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() >= 0.5 * max)
        .copied()
        .unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    v * (phase / norm)
}

pub fn max_abs(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
