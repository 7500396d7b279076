//! Dense linear-algebra substrate: data matrices, subspaces, projections,
//! rank-r PCA and the trimmed objective optimized by every solver.
//!
//! Subspaces always pass through the origin. Nothing here centers data
//! implicitly; use [`DataMatrix::centered`] when that is wanted.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// An `n × d` table of finite reals, one row per data point.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix<T: Real> {
    values: DMatrix<T>,
}

impl<T: Real> DataMatrix<T> {
    pub fn new(values: DMatrix<T>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { values })
    }

    /// Builds from row-major data.
    pub fn from_row_slice(n: usize, d: usize, data: &[T]) -> Result<Self> {
        if data.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, d, data))
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(n * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_row_slice(n, d, &flat)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[(i, j)]
    }

    pub fn row_vec(&self, i: usize) -> Vec<T> {
        self.values.row(i).iter().copied().collect()
    }

    /// Squared Frobenius norm.
    pub fn energy(&self) -> T {
        self.values.norm_squared()
    }

    /// Column-mean-centered copy together with the subtracted means.
    pub fn centered(&self) -> (Self, Vec<T>) {
        let n = T::lit(self.nrows() as f64);
        let means: Vec<T> = (0..self.ncols())
            .map(|j| self.values.column(j).sum() / n)
            .collect();
        let values = DMatrix::from_fn(self.nrows(), self.ncols(), |i, j| {
            self.values[(i, j)] - means[j]
        });
        (Self { values }, means)
    }
}

/// A rank-r linear subspace of ℝᵈ stored as a `d × r` orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Wraps a basis that is already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<T>) -> Result<Self> {
        check_rank(basis.ncols(), basis.nrows())?;
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = orthonormality_deviation(&basis);
        if deviation > T::ORTHO_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { basis })
    }

    /// Orthonormalizes the columns of `spanning` (thin QR) and fixes signs so
    /// the first nonzero entry of every basis column is nonnegative.
    pub fn orthonormalize(spanning: DMatrix<T>) -> Result<Self> {
        let (d, r) = spanning.shape();
        check_rank(r, d)?;
        if spanning.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = spanning.amax();
        let qr = spanning.qr();
        let diag_floor = T::lit(1e-13) * scale;
        if scale == T::zero() || qr.r().diagonal().iter().any(|v| v.abs() <= diag_floor) {
            return Err(Error::RankDeficient);
        }
        let mut basis = qr.q();
        canonicalize_signs(&mut basis);
        Ok(Self { basis })
    }

    /// Span of the given column vectors (each of length d).
    pub fn span(columns: &[Vec<T>]) -> Result<Self> {
        let r = columns.len();
        let d = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: columns.iter().map(Vec::len).find(|&l| l != d).unwrap_or(0),
            });
        }
        Self::orthonormalize(DMatrix::from_fn(d, r, |i, j| columns[j][i]))
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Image under a `d × d` orthogonal map, re-orthonormalized.
    pub fn transformed(&self, q: &DMatrix<T>) -> Result<Self> {
        if q.nrows() != self.ambient_dim() || q.ncols() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: q.nrows(),
            });
        }
        Self::orthonormalize(q * &self.basis)
    }

    /// Orthogonal projection `P_V(x)`.
    pub fn project(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len())?;
        let xv = DVector::from_column_slice(x);
        let coeffs = self.basis.tr_mul(&xv);
        Ok((&self.basis * coeffs).iter().copied().collect())
    }

    /// Squared distance from every row of `data` to this subspace.
    pub fn row_distances_sq(&self, data: &DataMatrix<T>) -> Result<Vec<T>> {
        self.check_len(data.ncols())?;
        let x = data.as_matrix();
        let residual = x - (x * &self.basis) * self.basis.transpose();
        Ok(residual.row_iter().map(|row| row.norm_squared()).collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: len,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_rank(r: usize, d: usize) -> Result<()> {
    if r == 0 || r >= d {
        return Err(Error::RankOutOfRange { r, d });
    }
    Ok(())
}

fn orthonormality_deviation<T: Real>(basis: &DMatrix<T>) -> f64 {
    let gram = basis.tr_mul(basis);
    let mut worst = 0.0_f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((gram[(i, j)] - target).abs().as_f64());
        }
    }
    worst
}

fn canonicalize_signs<T: Real>(basis: &mut DMatrix<T>) {
    let eps = T::default_epsilon();
    for mut col in basis.column_iter_mut() {
        if let Some(first) = col.iter().copied().find(|v| v.abs() > eps) {
            if first < T::zero() {
                col.neg_mut();
            }
        }
    }
}

/// Strictly increasing row indices declared outliers.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutlierSet {
    indices: Vec<usize>,
}

impl OutlierSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates strict increase and `index < n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedIndices);
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(Self { indices })
    }

    /// Sorts the indices first; duplicates are rejected.
    pub fn from_unsorted(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        Self::new(indices, n)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Rows of `0..n` not in the set, ascending.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n.saturating_sub(self.len()));
        let mut it = self.indices.iter().peekable();
        for i in 0..n {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        out
    }
}

/// Best rank-r subspace for a set of rows.
#[derive(Clone, Debug)]
pub struct PcaSolution<T: Real> {
    pub subspace: Subspace<T>,
    /// Squared Frobenius residual, the sum of the discarded σᵢ².
    pub loss: T,
    /// All singular values, nonincreasing.
    pub singular_values: Vec<T>,
}

/// Outcome of [`trimmed_loss`].
#[derive(Clone, Debug)]
pub struct TrimmedLoss<T: Real> {
    pub loss: T,
    pub outliers: OutlierSet,
}

/// Euclidean distance from `x` to `v`.
pub fn dist_point_subspace<T: Real>(x: &[T], v: &Subspace<T>) -> Result<T> {
    let p = v.project(x)?;
    Ok(x.iter()
        .zip(&p)
        .map(|(&a, &b)| (a - b) * (a - b))
        .fold(T::zero(), |acc, t| acc + t)
        .sqrt())
}

/// Rank-r PCA of all rows (no centering).
pub fn pca_fit<T: Real>(data: &DataMatrix<T>, r: usize) -> Result<PcaSolution<T>> {
    let rows: Vec<usize> = (0..data.nrows()).collect();
    pca_fit_rows(data, &rows, r)
}

/// Rank-r PCA restricted to the listed rows.
pub fn pca_fit_rows<T: Real>(
    data: &DataMatrix<T>,
    rows: &[usize],
    r: usize,
) -> Result<PcaSolution<T>> {
    let d = data.ncols();
    check_rank(r, d)?;
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(&index) = rows.iter().find(|&&i| i >= data.nrows()) {
        return Err(Error::IndexOutOfRange {
            index,
            n: data.nrows(),
        });
    }
    // Zero rows pad short matrices so V is always d × d; XᵀX is unchanged.
    let m = rows.len();
    let x = data.as_matrix();
    let sub = DMatrix::from_fn(m.max(d), d, |i, j| {
        if i < m {
            x[(rows[i], j)]
        } else {
            T::zero()
        }
    });
    let svd = SVD::new(sub, false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut basis = DMatrix::from_fn(d, r, |i, j| v_t[(order[j], i)]);
    canonicalize_signs(&mut basis);
    let singular_values: Vec<T> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let loss = singular_values[r..]
        .iter()
        .fold(T::zero(), |acc, &s| acc + s * s);
    Ok(PcaSolution {
        subspace: Subspace { basis },
        loss,
        singular_values,
    })
}

/// Discards the `k` rows farthest from `v` and sums the squared distances of
/// the rest. Among equal distances the lower row index is discarded first.
pub fn trimmed_loss<T: Real>(
    data: &DataMatrix<T>,
    v: &Subspace<T>,
    k: usize,
) -> Result<TrimmedLoss<T>> {
    let n = data.nrows();
    if k >= n {
        return Err(Error::OutlierCountOutOfRange { k, n });
    }
    let dist = v.row_distances_sq(data)?;
    let outliers = farthest_k(&dist, k);
    let loss = sum_excluding(&dist, &outliers);
    Ok(TrimmedLoss { loss, outliers })
}

/// Indices of the `k` largest values; ties go to the lower index.
pub(crate) fn farthest_k<T: Real>(dist: &[T], k: usize) -> OutlierSet {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| {
        dist[b]
            .partial_cmp(&dist[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order.sort_unstable();
    OutlierSet { indices: order }
}

fn sum_excluding<T: Real>(dist: &[T], excluded: &OutlierSet) -> T {
    dist.iter()
        .enumerate()
        .filter(|(i, _)| !excluded.contains(*i))
        .fold(T::zero(), |acc, (_, &v)| acc + v)
}

/// Residual of the rows outside `outliers` with respect to `l`; outlier rows
/// contribute nothing.
pub fn pca_outlier_objective<T: Real>(
    data: &DataMatrix<T>,
    outliers: &OutlierSet,
    l: &Subspace<T>,
) -> Result<T> {
    let n = data.nrows();
    if let Some(&index) = outliers.as_slice().iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, n });
    }
    let dist = l.row_distances_sq(data)?;
    Ok(sum_excluding(&dist, outliers))
}
