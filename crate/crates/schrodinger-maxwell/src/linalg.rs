//! Complex dense/sparse matrices and the small set of operations the
//! Schrödingerisation pipeline is built from.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

pub type C64 = Complex64;

/// Matrices whose larger side reaches this size are stored sparse.
pub const DENSE_LIMIT: usize = 1024;

/// Default max-norm tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("size must be even, got {0}")]
    OddSize(usize),
    #[error("matrix is not Hermitian: max-norm deviation {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("singular linear system")]
    Singular,
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
}

/// Compressed sparse row storage with sorted column indices and no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub rows: usize,
    pub cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<C64>,
}

impl Csr {
    pub fn from_triplets(rows: usize, cols: usize, mut trips: Vec<(usize, usize, C64)>) -> Self {
        trips.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(trips.len());
        let mut values: Vec<C64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in trips {
            assert!(i < rows && j < cols, "triplet ({i},{j}) outside {rows}x{cols}");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        let mut out = Csr { rows, cols, indptr, indices, values };
        out.prune();
        out
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return;
        }
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.rows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if self.values[k] != C64::new(0.0, 0.0) {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let s = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match s.binary_search(&j) {
            Ok(k) => self.values[self.indptr[i] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.values.len());
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                out.push((i, j, v));
            }
        }
        out
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            y[i] = acc;
        }
    }
}

/// Complex matrix with dense or sparse storage.
#[derive(Clone, Debug)]
pub enum ComplexMatrix {
    Dense(DMatrix<C64>),
    Sparse(Csr),
}

impl PartialEq for ComplexMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.max_abs_diff(other) == 0.0
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, r(1.0))).collect())
    }

    pub fn from_dense(m: DMatrix<C64>) -> Self {
        ComplexMatrix::Dense(m)
    }

    /// Builds with storage chosen by size: dense below [`DENSE_LIMIT`].
    pub fn from_triplets(rows: usize, cols: usize, trips: Vec<(usize, usize, C64)>) -> Self {
        if rows.max(cols) < DENSE_LIMIT {
            let mut m = DMatrix::zeros(rows, cols);
            for (i, j, v) in trips {
                m[(i, j)] += v;
            }
            ComplexMatrix::Dense(m)
        } else {
            ComplexMatrix::Sparse(Csr::from_triplets(rows, cols, trips))
        }
    }

    pub fn sparse_from_triplets(rows: usize, cols: usize, trips: Vec<(usize, usize, C64)>) -> Self {
        ComplexMatrix::Sparse(Csr::from_triplets(rows, cols, trips))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        ComplexMatrix::Dense(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        ComplexMatrix::Dense(DMatrix::from_fn(nr, nc, |i, j| r(rows[i][j])))
    }

    pub fn diagonal(d: &[C64]) -> Self {
        Self::from_triplets(d.len(), d.len(), d.iter().enumerate().map(|(i, v)| (i, i, *v)).collect())
    }

    pub fn rows(&self) -> usize {
        match self {
            ComplexMatrix::Dense(m) => m.nrows(),
            ComplexMatrix::Sparse(s) => s.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            ComplexMatrix::Dense(m) => m.ncols(),
            ComplexMatrix::Sparse(s) => s.cols,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, ComplexMatrix::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            ComplexMatrix::Dense(m) => m[(i, j)],
            ComplexMatrix::Sparse(s) => s.get(i, j),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match self {
            ComplexMatrix::Dense(m) => {
                let mut out = Vec::new();
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        let v = m[(i, j)];
                        if v != C64::new(0.0, 0.0) {
                            out.push((i, j, v));
                        }
                    }
                }
                out
            }
            ComplexMatrix::Sparse(s) => s.triplets(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            ComplexMatrix::Dense(m) => m.iter().filter(|v| **v != C64::new(0.0, 0.0)).count(),
            ComplexMatrix::Sparse(s) => s.values.iter().filter(|v| **v != C64::new(0.0, 0.0)).count(),
        }
    }

    /// Largest number of nonzeros in any row.
    pub fn row_sparsity(&self) -> usize {
        let mut counts = vec![0usize; self.rows()];
        for (i, _, _) in self.triplets() {
            counts[i] += 1;
        }
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            ComplexMatrix::Dense(m) => m.clone(),
            ComplexMatrix::Sparse(s) => {
                let mut m = DMatrix::zeros(s.rows, s.cols);
                for (i, j, v) in s.triplets() {
                    m[(i, j)] = v;
                }
                m
            }
        }
    }

    pub fn to_csr(&self) -> Csr {
        match self {
            ComplexMatrix::Dense(_) => Csr::from_triplets(self.rows(), self.cols(), self.triplets()),
            ComplexMatrix::Sparse(s) => s.clone(),
        }
    }

    pub fn into_dense_storage(self) -> Self {
        ComplexMatrix::Dense(self.to_dense())
    }

    pub fn into_sparse_storage(self) -> Self {
        ComplexMatrix::Sparse(self.to_csr())
    }

    fn map_triplets(&self, rows: usize, cols: usize, f: impl Fn(usize, usize, C64) -> (usize, usize, C64)) -> Self {
        let trips = self.triplets().into_iter().map(|(i, j, v)| f(i, j, v)).collect();
        self.rebuild(rows, cols, trips)
    }

    fn rebuild(&self, rows: usize, cols: usize, trips: Vec<(usize, usize, C64)>) -> Self {
        if self.is_sparse() {
            Self::sparse_from_triplets(rows, cols, trips)
        } else {
            let mut m = DMatrix::zeros(rows, cols);
            for (i, j, v) in trips {
                m[(i, j)] += v;
            }
            ComplexMatrix::Dense(m)
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            ComplexMatrix::Dense(m) => ComplexMatrix::Dense(m.adjoint()),
            _ => self.map_triplets(self.cols(), self.rows(), |i, j, v| (j, i, v.conj())),
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            ComplexMatrix::Dense(m) => ComplexMatrix::Dense(m.transpose()),
            _ => self.map_triplets(self.cols(), self.rows(), |i, j, v| (j, i, v)),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ComplexMatrix::Dense(m) => ComplexMatrix::Dense(m.map(|v| v.conj())),
            _ => self.map_triplets(self.rows(), self.cols(), |i, j, v| (i, j, v.conj())),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        match self {
            ComplexMatrix::Dense(m) => ComplexMatrix::Dense(m * s),
            ComplexMatrix::Sparse(sp) => {
                let mut out = sp.clone();
                out.values.iter_mut().for_each(|v| *v *= s);
                out.prune();
                ComplexMatrix::Sparse(out)
            }
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(())
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: C64, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other)?;
        match (self, other) {
            (ComplexMatrix::Dense(a), ComplexMatrix::Dense(b)) => Ok(ComplexMatrix::Dense(a + b * s)),
            _ => {
                let mut trips = self.triplets();
                trips.extend(other.triplets().into_iter().map(|(i, j, v)| (i, j, v * s)));
                Ok(Self::sparse_from_triplets(self.rows(), self.cols(), trips))
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.add_scaled(r(1.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.add_scaled(r(-1.0), other)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols() != other.rows() {
            return Err(LinalgError::ShapeMismatch(format!(
                "{:?} times {:?}",
                self.shape(),
                other.shape()
            )));
        }
        match (self, other) {
            (ComplexMatrix::Dense(a), ComplexMatrix::Dense(b)) => Ok(ComplexMatrix::Dense(a * b)),
            _ => {
                let a = self.to_csr();
                let b = other.to_csr();
                let mut trips = Vec::new();
                let mut acc = vec![C64::new(0.0, 0.0); b.cols];
                let mut touched = Vec::new();
                for i in 0..a.rows {
                    for (k, av) in a.row(i) {
                        for (j, bv) in b.row(k) {
                            if acc[j] == C64::new(0.0, 0.0) {
                                touched.push(j);
                            }
                            acc[j] += av * bv;
                        }
                    }
                    for &j in &touched {
                        trips.push((i, j, acc[j]));
                        acc[j] = C64::new(0.0, 0.0);
                    }
                    touched.clear();
                }
                Ok(Self::sparse_from_triplets(a.rows, b.cols, trips))
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols(), "matvec length mismatch");
        match self {
            ComplexMatrix::Dense(m) => {
                let v = DVector::from_column_slice(x);
                (m * v).as_slice().to_vec()
            }
            ComplexMatrix::Sparse(s) => {
                let mut y = vec![C64::new(0.0, 0.0); s.rows];
                s.matvec_into(x, &mut y);
                y
            }
        }
    }

    pub fn max_norm(&self) -> f64 {
        match self {
            ComplexMatrix::Dense(m) => m.iter().fold(0.0, |a, v| a.max(v.norm())),
            ComplexMatrix::Sparse(s) => s.values.iter().fold(0.0, |a, v| a.max(v.norm())),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        match (self, other) {
            (ComplexMatrix::Dense(a), ComplexMatrix::Dense(b)) => {
                a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
            }
            _ => self.sub(other).map(|d| d.max_norm()).unwrap_or(f64::INFINITY),
        }
    }

    /// `‖A − A†‖_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Interval containing the spectrum of a Hermitian matrix (Gershgorin discs).
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.rows();
        let mut center = vec![0.0; n];
        let mut radius = vec![0.0; n];
        for (i, j, v) in self.triplets() {
            if i == j {
                center[i] += v.re;
            } else {
                radius[i] += v.norm();
            }
        }
        let lo = (0..n).map(|i| center[i] - radius[i]).fold(f64::INFINITY, f64::min);
        let hi = (0..n).map(|i| center[i] + radius[i]).fold(f64::NEG_INFINITY, f64::max);
        if n == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }
}

/// Largest eigenvalue of a Hermitian matrix by shifted power iteration.
pub fn lambda_max_hermitian(h: &ComplexMatrix, max_iter: usize) -> f64 {
    let n = h.rows();
    if n == 0 {
        return 0.0;
    }
    let (lo, hi) = h.gershgorin_bounds();
    if hi - lo <= 0.0 {
        return hi;
    }
    let csr = h.to_csr();
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0)).collect();
    let mut y = vec![C64::new(0.0, 0.0); n];
    let mut lam = lo;
    for _ in 0..max_iter {
        let nx = norm2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        csr.matvec_into(&x, &mut y);
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi -= xi * lo;
        }
        std::mem::swap(&mut x, &mut y);
        let done = (rq - lam).abs() <= 1e-10 * (hi - lo);
        lam = rq;
        if done {
            break;
        }
    }
    lam
}

pub fn check_finite(v: &[C64]) -> Result<(), LinalgError> {
    match v.iter().position(|x| !x.re.is_finite() || !x.im.is_finite()) {
        Some(i) => Err(LinalgError::NonFinite(i)),
        None => Ok(()),
    }
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff_vec(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let (rows, cols) = (ar * br, ac * bc);
    let bt = b.triplets();
    let mut trips = Vec::with_capacity(a.nnz() * bt.len());
    for (i, j, av) in a.triplets() {
        for &(k, l, bv) in &bt {
            trips.push((i * br + k, j * bc + l, av * bv));
        }
    }
    if a.is_sparse() || b.is_sparse() || rows.max(cols) >= DENSE_LIMIT {
        ComplexMatrix::sparse_from_triplets(rows, cols, trips)
    } else {
        ComplexMatrix::from_triplets(rows, cols, trips)
    }
}

/// Kronecker product of a list, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = kron(&out, f);
    }
    out
}

/// `(A + A†)/2` and `(A − A†)/(2i)`.
pub fn hermitian_split(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let ad = a.adjoint();
    let h1 = a.add(&ad)?.scale(r(0.5));
    let h2 = a.sub(&ad)?.scale(C64::new(0.0, -0.5));
    Ok((h1, h2))
}

/// Cyclic shift `Σ|i⟩⟨i+1| + |M−1⟩⟨0|`.
pub fn shift_matrix(m: usize) -> Result<ComplexMatrix, LinalgError> {
    if m == 0 {
        return Err(LinalgError::EmptyDimension);
    }
    let trips = (0..m).map(|i| (i, (i + 1) % m, r(1.0))).collect();
    Ok(ComplexMatrix::from_triplets(m, m, trips))
}

/// Frequencies `2π(l − n/2 − 1)/length`, `l = 1..n`.
pub fn fourier_freqs(n: usize, length: f64) -> Vec<f64> {
    (1..=n).map(|l| 2.0 * PI * (l as f64 - n as f64 / 2.0 - 1.0) / length).collect()
}

/// `Φ[j,l] = exp(i ν_l x_j)` with `x_j = j·length/n`.
pub fn fourier_basis(n: usize, length: f64) -> Result<(ComplexMatrix, Vec<f64>), LinalgError> {
    if n < 2 || n % 2 != 0 {
        return Err(LinalgError::OddSize(n));
    }
    let freqs = fourier_freqs(n, length);
    let dx = length / n as f64;
    let phi = DMatrix::from_fn(n, n, |j, l| C64::from_polar(1.0, freqs[l] * j as f64 * dx));
    Ok((ComplexMatrix::Dense(phi), freqs))
}

/// Inverse of a Fourier basis matrix: `Φ⁻¹ = Φ†/n`.
pub fn fourier_inverse(phi: &ComplexMatrix) -> ComplexMatrix {
    phi.adjoint().scale(r(1.0 / phi.rows() as f64))
}

/// Precomputed `e^{−iHt}` for a fixed Hermitian `H`.
#[derive(Clone, Debug)]
pub enum Propagator {
    Eigen { vectors: DMatrix<C64>, values: Vec<f64> },
    Chebyshev { h: Csr, center: f64, half_width: f64 },
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self, LinalgError> {
        if h.rows() != h.cols() {
            return Err(LinalgError::NonSquare { rows: h.rows(), cols: h.cols() });
        }
        let dev = h.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { deviation: dev });
        }
        match h {
            ComplexMatrix::Dense(m) => {
                let herm = (m + m.adjoint()) * r(0.5);
                let eig = herm.symmetric_eigen();
                Ok(Propagator::Eigen {
                    vectors: eig.eigenvectors,
                    values: eig.eigenvalues.iter().copied().collect(),
                })
            }
            ComplexMatrix::Sparse(s) => {
                let (lo, hi) = h.gershgorin_bounds();
                Ok(Propagator::Chebyshev {
                    h: s.clone(),
                    center: 0.5 * (lo + hi),
                    half_width: 0.5 * (hi - lo),
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Propagator::Eigen { values, .. } => values.len(),
            Propagator::Chebyshev { h, .. } => h.rows,
        }
    }

    pub fn apply(&self, t: f64, v: &[C64]) -> Vec<C64> {
        match self {
            Propagator::Eigen { vectors, values } => {
                let x = DVector::from_column_slice(v);
                let mut y = vectors.adjoint() * x;
                for (k, lam) in values.iter().enumerate() {
                    y[k] *= C64::from_polar(1.0, -lam * t);
                }
                (vectors * y).as_slice().to_vec()
            }
            Propagator::Chebyshev { h, center, half_width } => chebyshev_apply(h, *center, *half_width, t, v),
        }
    }
}

/// `e^{−iht}·v` for Hermitian `h`.
pub fn expm_apply(h: &ComplexMatrix, t: f64, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
    if v.len() != h.cols() {
        return Err(LinalgError::ShapeMismatch(format!("vector {} vs matrix {:?}", v.len(), h.shape())));
    }
    if t == 0.0 {
        let dev = h.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { deviation: dev });
        }
        return Ok(v.to_vec());
    }
    Ok(Propagator::new(h)?.apply(t, v))
}

/// Bessel functions `J_0..J_kmax` at `x ≥ 0` by Miller's backward recurrence.
pub fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; kmax + 1];
        out[0] = 1.0;
        return out;
    }
    let mut start = kmax.max(x as usize) + 30 + (x.cbrt() * 10.0) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut vals = vec![0.0; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1e-300;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            norm *= 1e-250;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * vals[k - 1];
        }
    }
    norm += vals[0];
    vals.truncate(kmax + 1);
    vals.iter().map(|v| v / norm).collect()
}

fn chebyshev_apply(h: &Csr, center: f64, half_width: f64, t: f64, v: &[C64]) -> Vec<C64> {
    let phase = C64::from_polar(1.0, -center * t);
    if half_width <= f64::EPSILON * center.abs().max(1.0) {
        return v.iter().map(|x| x * phase).collect();
    }
    let a = half_width * t.abs();
    let sign = t.signum();
    let kmax = (a + 20.0 * a.cbrt() + 30.0) as usize;
    let jk = bessel_j_sequence(a, kmax);
    let n = v.len();
    let apply_scaled = |x: &[C64], y: &mut [C64]| {
        h.matvec_into(x, y);
        for i in 0..n {
            y[i] = (y[i] - x[i] * center) / half_width;
        }
    };
    // e^{-i a s H̃} = J_0 + 2 Σ (−i s)^k J_k(a) T_k(H̃)
    let mut t_prev = v.to_vec();
    let mut t_cur = vec![C64::new(0.0, 0.0); n];
    apply_scaled(&t_prev, &mut t_cur);
    let mut out: Vec<C64> = v.iter().map(|x| x * jk[0]).collect();
    let mi = C64::new(0.0, -sign);
    let mut coef = mi;
    for (o, x) in out.iter_mut().zip(&t_cur) {
        *o += coef * 2.0 * jk[1] * x;
    }
    let mut t_next = vec![C64::new(0.0, 0.0); n];
    for k in 2..=kmax {
        apply_scaled(&t_cur, &mut t_next);
        for i in 0..n {
            t_next[i] = 2.0 * t_next[i] - t_prev[i];
        }
        coef *= mi;
        let w = coef * 2.0 * jk[k];
        for (o, x) in out.iter_mut().zip(&t_next) {
            *o += w * x;
        }
        std::mem::swap(&mut t_prev, &mut t_cur);
        std::mem::swap(&mut t_cur, &mut t_next);
        if k as f64 > a && jk[k].abs() < 1e-18 {
            break;
        }
    }
    out.iter().map(|x| x * phase).collect()
}

/// Pauli matrices σ₁, σ₂, σ₃ and the 2×2 identity.
pub fn pauli(k: usize) -> ComplexMatrix {
    let z = r(0.0);
    let o = r(1.0);
    match k {
        0 => ComplexMatrix::from_rows(&[vec![o, z], vec![z, o]]),
        1 => ComplexMatrix::from_rows(&[vec![z, o], vec![o, z]]),
        2 => ComplexMatrix::from_rows(&[vec![z, -I], vec![I, z]]),
        3 => ComplexMatrix::from_rows(&[vec![o, z], vec![z, -o]]),
        _ => panic!("pauli index {k} out of range"),
    }
}
