use num_complex::Complex;

use crate::Real;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn from_vec(dim: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data length");
        CMatrix { dim, data }
    }

    /// |ψ⟩⟨ψ|
    pub fn outer(psi: &[Complex<T>]) -> Self {
        let dim = psi.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in psi {
            for b in psi {
                data.push(*a * b.conj());
            }
        }
        CMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.dim + j] += v;
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn scale(&mut self, s: T) {
        for v in self.data.iter_mut() {
            *v *= s;
        }
    }

    pub fn add_scaled(&mut self, other: &CMatrix<T>, s: T) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * s;
        }
    }

    /// Replace with (ρ + ρ†)/2.
    pub fn hermitize(&mut self) {
        let half = T::lit(0.5);
        for i in 0..self.dim {
            let d = self.get(i, i);
            self.set(i, i, Complex::new(d.re, T::zero()));
            for j in i + 1..self.dim {
                let v = (self.get(i, j) + self.get(j, i).conj()) * half;
                self.set(i, j, v);
                self.set(j, i, v.conj());
            }
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// tr(ρ²) for Hermitian ρ.
    pub fn purity(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Smallest eigenvalue of the Hermitian matrix (computed in double precision).
    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        let m = nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let v = self.get(i, j);
            nalgebra::Complex::new(v.re.f64(), v.im.f64())
        });
        let eig = m.symmetric_eigenvalues();
        eig.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Copy into a larger (zero-padded) or smaller (truncated) dimension.
    pub fn resized(&self, dim: usize) -> Self {
        let mut out = CMatrix::zeros(dim);
        let n = dim.min(self.dim);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }
}
