//! Dense LU for element-local systems and a sparse direct solve for the
//! global trace system.

use std::ops::{Index, IndexMut};

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use thiserror::Error;
use twofloat::TwoFloat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("numerically singular matrix: pivot {pivot} below threshold")]
    Singular { pivot: usize },
    #[error("sparse factorization failed: {0}")]
    SparseSingular(String),
    #[error("index ({row}, {col}) out of range for dimension {n}")]
    OutOfRange { row: usize, col: usize, n: usize },
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { row: i / cols.max(1), col: i % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch { expected: cols, got: r.len() });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A - A^T|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(a: &DenseMatrix) -> Result<Self, LinalgError> {
        if a.rows != a.cols {
            return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
        }
        let n = a.rows;
        let threshold = 1e-14 * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n).map(|i| (i, lu[(i, k)].abs())).fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if !(pivot > threshold) {
                return Err(LinalgError::Singular { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / d;
                lu[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu.data[i * n + j] -= l * lu.data[k * n + j];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves for every column of `b`.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.dim();
        assert_eq!(b.rows, n);
        let mut out = DenseMatrix::zeros(n, b.cols);
        let mut col = vec![0.0; n];
        for j in 0..b.cols {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

pub fn dense_lu_solve(a: &DenseMatrix, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LinalgError> {
    let lu = DenseLu::factor(a)?;
    rhs.iter()
        .map(|b| {
            if b.len() != a.rows {
                return Err(LinalgError::DimensionMismatch { expected: a.rows, got: b.len() });
            }
            Ok(lu.solve(b))
        })
        .collect()
}

/// Square matrix in compressed sparse row form with a structurally
/// symmetric pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Assembles from `(row, col, value)` triplets. Duplicates are summed in
    /// input order; the transpose pattern is added with explicit zeros.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self, LinalgError> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::OutOfRange { row: i, col: j, n });
            }
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { row: i, col: j });
            }
            entries.push((i, j, v));
            if i != j {
                entries.push((j, i, 0.0));
            }
        }
        // stable: equal keys keep input order
        entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { n, row_ptr, col_idx, values })
    }

    /// Like [`SparseMatrix::from_triplets`] with double-double values.
    /// Returns the leading parts and the trailing corrections on the same
    /// pattern.
    pub fn from_triplets_dd(n: usize, triplets: &[(usize, usize, TwoFloat)]) -> Result<(Self, Self), LinalgError> {
        let mut entries: Vec<(usize, usize, TwoFloat)> = Vec::with_capacity(2 * triplets.len());
        let zero = TwoFloat::from_f64(0.0);
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::OutOfRange { row: i, col: j, n });
            }
            if !v.hi().is_finite() {
                return Err(LinalgError::NonFinite { row: i, col: j });
            }
            entries.push((i, j, v));
            if i != j {
                entries.push((j, i, zero));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<TwoFloat> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let hi = Self {
            n,
            row_ptr: row_ptr.clone(),
            col_idx: col_idx.clone(),
            values: values.iter().map(|v| v.hi()).collect(),
        };
        let lo = Self { n, row_ptr, col_idx, values: values.iter().map(|v| v.lo()).collect() };
        Ok((hi, lo))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |a_ij - a_ji|` over the stored pattern.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j > i {
                    m = m.max((v - self.get(j, i)).abs());
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }
}

/// `b - A x` with compensated products and sums (twice working precision).
fn residual(a: &SparseMatrix, correction: Option<&SparseMatrix>, x: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let r: Vec<f64> = (0..a.n)
        .map(|i| {
            let (mut s, mut c) = (b[i], 0.0);
            let extra = correction.into_iter().flat_map(|m| m.row(i));
            for (j, v) in a.row(i).chain(extra) {
                let p = -v * x[j];
                let pe = (-v).mul_add(x[j], -p);
                let t = s + p;
                let z = t - s;
                c += (s - (t - z)) + (p - z) + pe;
                s = t;
            }
            s + c
        })
        .collect();
    let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (r, rn)
}

/// Sparse LU with partial pivoting and a fill-reducing column ordering,
/// followed by iterative refinement while the residual keeps dropping.
pub fn sparse_lu_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    sparse_lu_solve_refined(a, None, b)
}

/// Solves `(a + correction) x = b`, factoring only `a`. Residuals for the
/// refinement use both parts in compensated arithmetic, so a correction
/// holding the rounding error of `a` lets the solution resolve it.
pub fn sparse_lu_solve_refined(
    a: &SparseMatrix,
    correction: Option<&SparseMatrix>,
    b: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let n = a.n;
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: b.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let triplets: Vec<Triplet<usize, usize, f64>> =
        (0..n).flat_map(|i| a.row(i).map(move |(j, v)| Triplet::new(i, j, v))).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| LinalgError::SparseSingular(format!("{e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| LinalgError::SparseSingular(format!("{e:?}")))?;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let col = Col::<f64>::from_fn(n, |i| rhs[i]);
        let x = lu.solve(&col);
        (0..n).map(|i| x[i]).collect()
    };
    let mut x = solve(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::SparseSingular("zero pivot encountered".into()));
    }
    let (mut r, mut rn) = residual(a, correction, &x, b);
    for _ in 0..REFINEMENT_STEPS {
        let dx = solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
        let (tr, tn) = residual(a, correction, &trial, b);
        if !(tn < 0.5 * rn) {
            break;
        }
        (x, r, rn) = (trial, tr, tn);
    }
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(rn.is_finite() && rn <= 1e-9 * (a.norm_inf() * xn + bn)) {
        return Err(LinalgError::SparseSingular("residual bound not met; matrix numerically singular".into()));
    }
    Ok(x)
}

const REFINEMENT_STEPS: usize = 3;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inf(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn identity_solve() {
        let x = dense_lu_solve(&DenseMatrix::identity(4), &[vec![1.0, -2.0, 3.0, 0.5]]).unwrap();
        assert_eq!(x[0], vec![1.0, -2.0, 3.0, 0.5]);
    }

    #[test]
    fn permutation_needs_pivoting() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let x = dense_lu_solve(&a, &[vec![1.0, 2.0]]).unwrap();
        assert_eq!(x[0], vec![2.0, 1.0]);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(DenseLu::factor(&a).unwrap_err(), LinalgError::Singular { pivot: 1 });
        assert!(matches!(DenseLu::factor(&DenseMatrix::zeros(2, 3)), Err(LinalgError::NotSquare { .. })));
        assert!(DenseMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }

    /// Random matrix with prescribed singular values via Householder
    /// reflections: cond = smax / smin exactly.
    fn conditioned(n: usize, cond: f64, rng: &mut ChaCha8Rng) -> DenseMatrix {
        let reflect = |m: &mut DenseMatrix, rng: &mut ChaCha8Rng, left: bool| {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let vv: f64 = v.iter().map(|x| x * x).sum();
            let mut h = DenseMatrix::identity(n);
            for i in 0..n {
                for j in 0..n {
                    h[(i, j)] -= 2.0 * v[i] * v[j] / vv;
                }
            }
            *m = if left { h.matmul(m) } else { m.matmul(&h) };
        };
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cond.powf(-(i as f64) / (n - 1) as f64);
        }
        reflect(&mut m, rng, true);
        reflect(&mut m, rng, false);
        m
    }

    #[test]
    fn random_well_conditioned_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = conditioned(30, 1e6, &mut rng);
        let b: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = &dense_lu_solve(&a, std::slice::from_ref(&b)).unwrap()[0];
        let r: Vec<f64> = a.mul_vec(x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(inf(&r) <= 1e-10 * (a.norm_inf() * inf(x) + inf(&b)));
    }

    #[test]
    fn sparse_diagonal() {
        let a = SparseMatrix::from_triplets(2, &[(0, 0, 2.0), (1, 1, -3.0)]).unwrap();
        let x = sparse_lu_solve(&a, &[2.0, -3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sparse_tridiagonal_laplacian() {
        let n = 10;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, &t).unwrap();
        let b = a.mul_vec(&vec![1.0; n]);
        let x = sparse_lu_solve(&a, &b).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn sparse_singular_is_reported() {
        let a = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(sparse_lu_solve(&a, &[1.0, 2.0]), Err(LinalgError::SparseSingular(_))));
    }

    #[test]
    fn triplets_are_summed_and_symmetrized() {
        let a = SparseMatrix::from_triplets(3, &[(0, 2, 1.0), (0, 2, 2.5), (1, 1, 4.0)]).unwrap();
        assert_eq!(a.get(0, 2), 3.5);
        assert_eq!(a.get(2, 0), 0.0);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.max_asymmetry(), 3.5);
        assert!(SparseMatrix::from_triplets(2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn double_double_triplets_split_exactly() {
        let tiny = 2f64.powi(-70);
        let t = [
            (0, 0, TwoFloat::from_f64(1.0)),
            (0, 0, TwoFloat::from_f64(tiny)),
            (1, 1, TwoFloat::new_add(2.0, 3.0 * tiny)),
            (0, 1, TwoFloat::from_f64(0.5)),
        ];
        let (hi, lo) = SparseMatrix::from_triplets_dd(2, &t).unwrap();
        assert_eq!((hi.get(0, 0), lo.get(0, 0)), (1.0, tiny));
        assert_eq!((hi.get(1, 1), lo.get(1, 1)), (2.0, 3.0 * tiny));
        assert_eq!((hi.get(0, 1), lo.get(0, 1)), (0.5, 0.0));
        assert_eq!(hi.nnz(), lo.nnz());
    }

    #[test]
    fn refinement_uses_the_correction() {
        // [[1, 1], [1, 1 + d]] with d split over hi and lo; x = (1, -1)
        let (d_hi, d_lo) = (2f64.powi(-50), 2f64.powi(-60));
        let t = [
            (0, 0, TwoFloat::from_f64(1.0)),
            (0, 1, TwoFloat::from_f64(1.0)),
            (1, 0, TwoFloat::from_f64(1.0)),
            (1, 1, TwoFloat::new_add(1.0, d_hi) + TwoFloat::from_f64(d_lo)),
        ];
        let (hi, lo) = SparseMatrix::from_triplets_dd(2, &t).unwrap();
        let b = [0.0, -(d_hi + d_lo)];
        let err = |x: &[f64]| (x[0] - 1.0).abs().max((x[1] + 1.0).abs());
        let plain = sparse_lu_solve(&hi, &b).unwrap();
        let refined = sparse_lu_solve_refined(&hi, Some(&lo), &b).unwrap();
        assert!(err(&plain) > 1e-4);
        assert!(err(&refined) < 1e-6, "{refined:?}");
    }

    #[test]
    fn sparse_empty_system() {
        let a = SparseMatrix::from_triplets(0, &[]).unwrap();
        assert!(sparse_lu_solve(&a, &[]).unwrap().is_empty());
    }

    fn random_spd(n: usize, seed: u64) -> (SparseMatrix, DenseMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + rng.gen::<f64>()));
            for _ in 0..2 {
                let j = rng.gen_range(0..n);
                if j != i {
                    let v = rng.gen_range(-0.5..0.5);
                    t.push((i, j, v));
                    t.push((j, i, v));
                }
            }
        }
        let s = SparseMatrix::from_triplets(n, &t).unwrap();
        let d = s.to_dense();
        (s, d)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn dense_and_sparse_agree_on_spd(seed in 0u64..1000, n in 2usize..40) {
            let (s, d) = random_spd(n, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xs = sparse_lu_solve(&s, &b).unwrap();
            let xd = &dense_lu_solve(&d, std::slice::from_ref(&b)).unwrap()[0];
            let diff: f64 = xs.iter().zip(xd).fold(0.0, |m, (a, b)| m.max((a - b).abs()));
            prop_assert!(diff <= 1e-10 * inf(xd));
        }

        #[test]
        fn solve_then_multiply_round_trip(seed in 0u64..1000, n in 2usize..25) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = conditioned(n, 1e4, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = &dense_lu_solve(&a, std::slice::from_ref(&b)).unwrap()[0];
            let r: Vec<f64> = a.mul_vec(x).iter().zip(&b).map(|(p, q)| p - q).collect();
            prop_assert!(inf(&r) <= 1e-10 * (a.norm_inf() * inf(x) + inf(&b)));

            let mut t = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    t.push((i, j, a[(i, j)]));
                }
            }
            let s = SparseMatrix::from_triplets(n, &t).unwrap();
            let xs = sparse_lu_solve(&s, &b).unwrap();
            let rs: Vec<f64> = s.mul_vec(&xs).iter().zip(&b).map(|(p, q)| p - q).collect();
            prop_assert!(inf(&rs) <= 1e-9 * (s.norm_inf() * inf(&xs) + inf(&b)));
        }
    }
}
