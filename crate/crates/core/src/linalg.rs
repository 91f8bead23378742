//! Dense complex matrix kernels.
//!
//! Everything here works at desk scale (a few hundred rows, K ≤ 64 columns).
//! Matrices are stored row-major. Kernels that matter for complexity
//! accounting have a `*_with` variant taking an [`OpCounter`].

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::OpCounter;

/// Asymmetry tolerance accepted by [`hermitian_eig`], relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("rows have inconsistent lengths")]
    RaggedRows,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NonHermitianInput { asymmetry: f64 },
    #[error("Jacobi iteration did not converge (off-diagonal norm {off_norm:e})")]
    NoConvergence { off_norm: f64 },
}

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::RaggedRows);
        }
        Self::new(rows.len(), cols, rows.iter().flatten().copied().collect())
    }

    /// Builds a matrix with real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(LinalgError::RaggedRows);
        }
        let cols = columns.len();
        let mut data = vec![C64::new(0.0, 0.0); rows * cols];
        for (c, col) in columns.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                data[r * cols + c] = v;
            }
        }
        Self::new(rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.matmul_with(rhs, &OpCounter::new())
    }

    pub fn matmul_with(&self, rhs: &Self, ops: &OpCounter) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let lhs_row = self.row(i);
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in lhs_row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        ops.add((self.rows * self.cols * rhs.cols) as u64);
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest |a_ij − conj(a_ji)|. Requires a square matrix.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// ‖self − other‖_F. Panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub(crate) fn col_mut_apply(&mut self, c: usize, mut f: impl FnMut(usize, &mut C64)) {
        for r in 0..self.rows {
            f(r, &mut self.data[r * self.cols + c]);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for z in self.row(r) {
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues in descending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    /// Eigensystem of the K×K zero matrix: zero eigenvalues, identity vectors.
    pub fn zero(k: usize) -> Self {
        Self {
            values: vec![0.0; k],
            vectors: ComplexMatrix::identity(k),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// V · diag(values) · V^H.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.dim();
        let mut out = ComplexMatrix::zeros(k, k);
        for (c, &d) in self.values.iter().enumerate() {
            for i in 0..k {
                let vi = self.vectors[(i, c)] * d;
                for j in 0..k {
                    out[(i, j)] += vi * self.vectors[(j, c)].conj();
                }
            }
        }
        out
    }

    /// ‖V^H V − I‖_F.
    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.vectors)
    }
}

/// ‖Q^H Q − I‖_F for a matrix with orthonormal columns.
pub fn orthonormality_error(q: &ComplexMatrix) -> f64 {
    let gram = gram(q);
    gram.distance(&ComplexMatrix::identity(q.cols()))
}

/// H^H H.
pub fn gram(h: &ComplexMatrix) -> ComplexMatrix {
    gram_with(h, &OpCounter::new())
}

pub fn gram_with(h: &ComplexMatrix, ops: &OpCounter) -> ComplexMatrix {
    let k = h.cols();
    let mut g = ComplexMatrix::zeros(k, k);
    for r in 0..h.rows() {
        let row = h.row(r);
        for i in 0..k {
            let a = row[i].conj();
            for j in i..k {
                g[(i, j)] += a * row[j];
            }
        }
    }
    for i in 0..k {
        g[(i, i)].im = 0.0;
        for j in (i + 1)..k {
            g[(j, i)] = g[(i, j)].conj();
        }
    }
    ops.add((h.rows() * k * (k + 1) / 2) as u64);
    g
}

/// Σ_j |h_ij|² for every row i.
pub fn row_energies(h: &ComplexMatrix) -> Vec<f64> {
    (0..h.rows())
        .map(|r| h.row(r).iter().map(C64::norm_sqr).sum())
        .collect()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

/// Maps eigenvalues in [−1e-10·d₁, 0) to zero; round-off must not push a
/// Gram spectrum negative before taking logarithms.
pub fn clamp_psd(values: &mut [f64]) {
    let top = values.iter().copied().fold(0.0f64, f64::max);
    let floor = -1e-10 * top;
    for v in values.iter_mut() {
        if *v < 0.0 && *v >= floor {
            *v = 0.0;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eig(g: &ComplexMatrix) -> Result<EigenSystem, LinalgError> {
    hermitian_eig_with(g, &OpCounter::new())
}

pub fn hermitian_eig_with(g: &ComplexMatrix, ops: &OpCounter) -> Result<EigenSystem, LinalgError> {
    if !g.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let asymmetry = g.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOL * g.max_abs().max(1.0) {
        return Err(LinalgError::NonHermitianInput { asymmetry });
    }

    let n = g.rows();
    let mut a = g.clone();
    for i in 0..n {
        a[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut converged = n == 1;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_norm(&a);
        if off <= f64::EPSILON * total || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 || mag <= 1e-3 * f64::EPSILON * total {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let back = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)] * back;
                    a[(k, p)] = akp * c - akq * s;
                    a[(k, q)] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)] * phase;
                    a[(p, k)] = apk * c - aqk * s;
                    a[(q, k)] = apk * s + aqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)] * back;
                    v[(k, p)] = vkp * c - vkq * s;
                    v[(k, q)] = vkp * s + vkq * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                ops.add(12 * n as u64);
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > 1e-12 * total {
            return Err(LinalgError::NoConvergence { off_norm: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep the solver's order
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let columns: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();
    let vectors = ComplexMatrix::from_columns(&columns)?;
    Ok(EigenSystem { values, vectors })
}

/// Modified Gram–Schmidt on the columns, in column order. A column that
/// collapses numerically is replaced by the first standard basis vector that
/// is independent of the preceding columns.
pub fn orthonormalize_columns(q: &mut ComplexMatrix) {
    let (rows, cols) = (q.rows(), q.cols());
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v = q.column(c);
        project_out(&mut v, &basis);
        let mut norm = vec_norm(&v);
        if norm < 1e-8 {
            for e in 0..rows {
                let mut cand = vec![C64::new(0.0, 0.0); rows];
                cand[e] = C64::new(1.0, 0.0);
                project_out(&mut cand, &basis);
                let n = vec_norm(&cand);
                if n > 0.5 {
                    v = cand;
                    norm = n;
                    break;
                }
            }
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        q.col_mut_apply(c, |r, z| *z = v[r]);
        basis.push(v);
    }
}

fn project_out(v: &mut [C64], basis: &[Vec<C64>]) {
    // two passes keep MGS stable when columns are nearly dependent
    for _ in 0..2 {
        for b in basis {
            let coef: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= coef * y;
            }
        }
    }
}
