//! Small dense complex matrices and their exponential.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        DenseMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let out = &mut m.data[i * n..(i + 1) * n];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        m
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, b| a.max(b.norm()))
    }

    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// e^M by scaling and squaring with a Taylor core.
    pub fn expm(&self) -> Result<Self> {
        let norm = self.one_norm();
        if !norm.is_finite() {
            return Err(Error::Expm { norm });
        }
        let mut s = 0u32;
        while norm / f64::from(1u32 << s.min(30)) > 0.25 {
            s += 1;
            if s > 60 {
                return Err(Error::Expm { norm });
            }
        }
        let a = self.scale(Complex64::new(0.5f64.powi(s as i32), 0.0));
        let mut sum = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        let mut converged = false;
        for k in 1..=30 {
            term = term.matmul(&a).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.max_abs() <= 1e-18 * sum.max_abs() {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Expm { norm });
        }
        for _ in 0..s {
            sum = sum.matmul(&sum);
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_rotation_generator() {
        let mut m = DenseMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(-1.3, 0.0);
        m[(1, 0)] = Complex64::new(1.3, 0.0);
        let e = m.expm().unwrap();
        assert!((e[(0, 0)].re - 1.3f64.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - 1.3f64.sin()).abs() < 1e-14);
        let u = e.matmul(&e.adjoint());
        assert!((u[(0, 0)].re - 1.0).abs() < 1e-14 && u[(0, 1)].norm() < 1e-14);
    }
}
