//! One-dimensional complex trigonometric polynomials `Σ_{|j|≤D} c_j e^{ijx}`.

use num_complex::Complex64;

/// Complex trigonometric polynomial on the period `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn constant(value: Complex64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![value],
        }
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    /// Builds from `(j, c_j)` pairs; repeated indices accumulate.
    pub fn from_terms(terms: &[(i32, Complex64)]) -> Self {
        let degree = terms
            .iter()
            .map(|(j, _)| j.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for &(j, c) in terms {
            coeffs[(j + degree as i32) as usize] += c;
        }
        Self { degree, coeffs }.trimmed()
    }

    /// Coefficients ordered from `-degree` to `degree`.
    pub fn from_dense(coeffs: Vec<Complex64>) -> Self {
        assert!(
            coeffs.len() % 2 == 1,
            "dense coefficient vector must have odd length"
        );
        let degree = coeffs.len() / 2;
        Self { degree, coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.degree > 0
            && self.coeffs[0] == Complex64::new(0.0, 0.0)
            && self.coeffs[2 * self.degree] == Complex64::new(0.0, 0.0)
        {
            self.coeffs.remove(0);
            self.coeffs.pop();
            self.degree -= 1;
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, j: i32) -> Complex64 {
        if j.unsigned_abs() as usize > self.degree {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(j + self.degree as i32) as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        let d = self.degree as i32;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i32 - d, *c))
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms()
            .map(|(j, c)| c * Complex64::from_polar(1.0, j as f64 * x))
            .sum()
    }

    /// Mean value over one period, `c_0`.
    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    /// Pointwise complex conjugate: `c_j ↦ conj(c_{-j})`.
    pub fn conj(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self {
            degree: self.degree,
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let degree = self.degree.max(other.degree);
        let d = degree as i32;
        let coeffs = (-d..=d).map(|j| self.coeff(j) + other.coeff(j)).collect();
        Self { degree, coeffs }.trimmed()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
        .trimmed()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Samples on `count` equispaced points of `[0, 2π)`.
    pub fn sample(&self, count: usize) -> Vec<Complex64> {
        crate::quadrature::periodic_nodes(count)
            .into_iter()
            .map(|x| self.eval(x))
            .collect()
    }
}
