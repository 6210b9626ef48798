//! Small dense complex matrices: gate matrices, basis changes, and unitary
//! parametrization for the resource searches.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

pub type C64 = Complex64;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    /// Builds from row-major entries. Panics if `data.len()` is not a square.
    pub fn from_rows(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data must be n*n");
        Self { n, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let n = columns.len();
        let mut m = Self::zeros(n);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n);
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
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

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let n = self.n * other.n;
        let mut m = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.n {
                    for l in 0..other.n {
                        m[(i * other.n + k, j * other.n + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max-entry deviation from the identity of `self† self`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = &self.adjoint() * self;
        let id = Self::identity(self.n);
        p.data.iter().zip(&id.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// True when `self = e^{iα} other` for some α, entrywise within `tol`.
    pub fn equals_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        let Some((k, _)) = other
            .data
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        else {
            return true;
        };
        if other.data[k].norm() < tol || self.data[k].norm() < tol {
            return false;
        }
        let phase = self.data[k] / other.data[k];
        if (phase.norm() - 1.0).abs() > tol {
            return false;
        }
        self.data.iter().zip(&other.data).all(|(a, b)| (a - phase * b).norm() <= tol)
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn exp(&self) -> Self {
        let norm = self.norm_inf();
        let mut squarings = 0u32;
        let mut scale = 1.0;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = self.scale(c(scale, 0.0));
        let mut result = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for k in 1..=18 {
            term = (&term * &a).scale(c(1.0 / k as f64, 0.0));
            result = result.add(&term);
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        result
    }

    /// `exp(i H)` where `H` is the Hermitian matrix packed in `params`
    /// (`n` diagonal reals, then real and imaginary parts of the strict upper
    /// triangle row by row; `n²` reals in total).
    pub fn unitary_from_params(n: usize, params: &[f64]) -> Self {
        assert_eq!(params.len(), n * n, "Hermitian generator needs n^2 reals");
        let mut h = Self::zeros(n);
        let mut it = params.iter().copied();
        for i in 0..n {
            h[(i, i)] = c(it.next().unwrap_or(0.0), 0.0);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let re = it.next().unwrap_or(0.0);
                let im = it.next().unwrap_or(0.0);
                h[(i, j)] = c(re, im);
                h[(j, i)] = c(re, -im);
            }
        }
        h.scale(c(0.0, 1.0)).exp()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        m
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Normalizes in place; returns the original squared norm.
pub fn normalize(v: &mut [C64]) -> f64 {
    let n2 = norm_sq(v);
    if n2 > 0.0 {
        let inv = 1.0 / n2.sqrt();
        for x in v.iter_mut() {
            *x *= inv;
        }
    }
    n2
}
