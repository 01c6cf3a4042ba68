//! Minimal dense complex linear algebra for 2x2 and 4x4 Hermitian-dominated
//! workloads.
//!
//! Conventions fixed once for the whole crate:
//! - storage is row-major;
//! - composite systems are ordered Alice (x) Bob, with the product basis
//!   |00>, |01>, |10>, |11> (first label Alice, second Bob);
//! - [`ComplexMatrix::partial_trace_second`] always traces out the second
//!   (Bob) factor.
//!
//! Matrices are capped at dim 4: branches of the network factorize, so larger
//! operators never arise.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_DIM: usize = 4;

/// Dense square complex matrix of dimension 2 or 4, stored inline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: [Complex64; MAX_DIM * MAX_DIM],
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDim(dim))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: [Complex64::ZERO; MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_entries(dim: usize, entries: &[Complex64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch(entries.len(), dim * dim));
        }
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                let v = entries[i * dim + j];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Builds a 2x2 matrix from real entries (row-major).
    pub fn from_real_2x2(entries: [f64; 4]) -> Self {
        let mut m = Self::zeros(2).expect("dim 2 is supported");
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, Complex64::new(entries[i * 2 + j], 0.0));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        self.entries[i * MAX_DIM + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.entries[i * MAX_DIM + j] = value;
    }

    /// Kronecker product. The result dimension may not exceed 4.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(Error::TensorTooLarge(self.dim, other.dim));
        }
        let mut out = Self::zeros(dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for p in 0..other.dim {
                    for q in 0..other.dim {
                        out.set(i * other.dim + p, j * other.dim + q, a * other.get(p, q));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let mut out = Self::zeros(self.dim)?;
        for i in 0..self.dim {
            for l in 0..self.dim {
                let a = self.get(i, l);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..self.dim {
                    let v = out.get(i, j) + a * other.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(i, j) + other.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, factor * self.get(i, j));
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Traces out the second (Bob) factor of a 4x4 operator on Alice (x) Bob.
    pub fn partial_trace_second(&self) -> Result<Self> {
        if self.dim != 4 {
            return Err(Error::UnsupportedDim(self.dim));
        }
        let mut out = Self::zeros(2)?;
        for i in 0..2 {
            for j in 0..2 {
                out.set(
                    i,
                    j,
                    self.get(2 * i, 2 * j) + self.get(2 * i + 1, 2 * j + 1),
                );
            }
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let v = self.get(i, j);
                v.re.is_finite() && v.im.is_finite()
            })
        })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_finite() {
            return false;
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = self.get(i, j) - self.get(j, i).conj();
                if d.norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Positive semidefiniteness: Hermitian with min eigenvalue >= -tol.
    /// Returns false (never errors) on any failure.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        self.eigenvalues_hermitian()
            .iter()
            .all(|&lambda| lambda >= -tol)
    }

    /// Eigenvalues of a Hermitian matrix, ascending. dim 2 is closed-form;
    /// dim 4 runs a fixed-budget cyclic complex Jacobi iteration.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        match self.dim {
            2 => {
                let a = self.get(0, 0).re;
                let c = self.get(1, 1).re;
                let b = self.get(0, 1);
                let mid = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b.norm_sqr()).sqrt();
                vec![mid - rad, mid + rad]
            }
            _ => self.jacobi_eigenvalues(),
        }
    }

    fn off_diag_norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s
    }

    fn jacobi_eigenvalues(&self) -> Vec<f64> {
        const MAX_SWEEPS: usize = 50;
        let n = self.dim;
        let mut a = *self;
        // Work on the Hermitian part; callers check hermiticity separately.
        a = a
            .add(&a.dagger())
            .expect("same dim")
            .scale(Complex64::new(0.5, 0.0));
        let scale: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .max(1.0);
        for _ in 0..MAX_SWEEPS {
            if a.off_diag_norm_sqr() <= 1e-30 * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    let mag = apq.norm();
                    if mag <= 1e-300 {
                        continue;
                    }
                    let phase = apq / Complex64::new(mag, 0.0);
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    // tan(2 theta) = 2|apq| / (aqq - app)
                    let tau = (aqq - app) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let mut rot = Self::identity(n).expect("valid dim");
                    rot.set(p, p, Complex64::new(c, 0.0));
                    rot.set(q, q, Complex64::new(c, 0.0));
                    rot.set(p, q, phase.scale(s));
                    rot.set(q, p, -phase.conj().scale(s));
                    a = rot
                        .dagger()
                        .matmul(&a)
                        .and_then(|m| m.matmul(&rot))
                        .expect("same dim");
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        eig
    }
}

/// Pauli sigma_x.
pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_2x2([0.0, 1.0, 1.0, 0.0])
}

/// Pauli sigma_z.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_2x2([1.0, 0.0, 0.0, -1.0])
}

/// Pauli sigma_y.
pub fn sigma_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2).expect("dim 2 is supported");
    m.set(0, 1, Complex64::new(0.0, -1.0));
    m.set(1, 0, Complex64::new(0.0, 1.0));
    m
}
