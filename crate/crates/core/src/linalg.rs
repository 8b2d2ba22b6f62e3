//! Thin layer over `faer` for the dense complex algebra used by the solvers.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

pub type CMat = Mat<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("eigen-decomposition did not converge ({0})")]
    EigenFailure(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> CMat {
    Mat::from_fn(rows, cols, f)
}

pub fn is_finite(m: &CMat) -> bool {
    (0..m.ncols())
        .all(|j| (0..m.nrows()).all(|i| m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite()))
}

/// Induced 1-norm (max column sum).
pub fn norm_one(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Frobenius norm.
pub fn norm_fro(m: &CMat) -> f64 {
    (0..m.ncols())
        .flat_map(|j| (0..m.nrows()).map(move |i| (i, j)))
        .map(|(i, j)| m[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn matvec(m: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(m.ncols(), x.len());
    let mut y = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for (j, xj) in x.iter().enumerate() {
        if *xj == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += m[(i, j)] * xj;
        }
    }
    y
}

pub fn column(v: &[Complex64]) -> CMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn column_to_vec(m: &CMat, j: usize) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

/// `[[a, b], [c, d]]`.
pub fn block2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (r0, c0) = (a.nrows(), a.ncols());
    assert!(b.nrows() == r0 && c.ncols() == c0 && d.nrows() == c.nrows() && d.ncols() == b.ncols());
    from_fn(r0 + c.nrows(), c0 + b.ncols(), |i, j| {
        match (i < r0, j < c0) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - c0)],
            (false, true) => c[(i - r0, j)],
            (false, false) => d[(i - r0, j - c0)],
        }
    })
}

pub fn sub(m: &CMat, r0: usize, c0: usize, nr: usize, nc: usize) -> CMat {
    from_fn(nr, nc, |i, j| m[(r0 + i, c0 + j)])
}

pub fn diag(v: &[Complex64]) -> CMat {
    from_fn(v.len(), v.len(), |i, j| {
        if i == j {
            v[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `m · diag(v)`.
pub fn scale_cols(m: &CMat, v: &[Complex64]) -> CMat {
    from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * v[j])
}

/// `diag(v) · m`.
pub fn scale_rows(v: &[Complex64], m: &CMat) -> CMat {
    from_fn(m.nrows(), m.ncols(), |i, j| v[i] * m[(i, j)])
}

pub fn scaled(m: &CMat, s: Complex64) -> CMat {
    from_fn(m.nrows(), m.ncols(), |i, j| s * m[(i, j)])
}

/// LU factorisation with a 1-norm condition estimate.
pub struct Factored {
    lu: faer::linalg::solvers::PartialPivLu<Complex64>,
    pub condition: f64,
}

impl Factored {
    pub fn new(a: &CMat) -> Result<Self, LinalgError> {
        assert_eq!(a.nrows(), a.ncols(), "factorisation needs a square matrix");
        if !is_finite(a) {
            return Err(LinalgError::NonFinite);
        }
        let lu = a.partial_piv_lu();
        let inv = lu.inverse();
        let condition = if is_finite(&inv) {
            norm_one(a) * norm_one(&inv)
        } else {
            f64::INFINITY
        };
        Ok(Self { lu, condition })
    }

    pub fn solve(&self, rhs: &CMat) -> CMat {
        self.lu.solve(rhs)
    }

    pub fn solve_vec(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        column_to_vec(&self.solve(&column(rhs)), 0)
    }

    pub fn inverse(&self) -> CMat {
        self.lu.inverse()
    }
}

/// Eigenvalues and right eigenvectors (columns, unit 2-norm).
pub fn eigen(a: &CMat) -> Result<(Vec<Complex64>, CMat), LinalgError> {
    if !is_finite(a) {
        return Err(LinalgError::NonFinite);
    }
    let evd = a
        .eigen()
        .map_err(|e| LinalgError::EigenFailure(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let n = a.nrows();
    let values: Vec<Complex64> = (0..n).map(|i| s[i]).collect();
    let mut vectors = evd.U().to_owned();
    for j in 0..n {
        let nrm = (0..n)
            .map(|i| vectors[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if nrm > 0.0 {
            for i in 0..n {
                vectors[(i, j)] /= nrm;
            }
        }
    }
    if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) || !is_finite(&vectors) {
        return Err(LinalgError::EigenFailure("non-finite eigenpairs".into()));
    }
    Ok((values, vectors))
}
