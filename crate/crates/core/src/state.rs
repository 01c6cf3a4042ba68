//! Two-qubit source states: the singlet and its white/colored noise mixtures.
//!
//! Basis order is |00>, |01>, |10>, |11> with Alice first, Bob second (the
//! crate-wide convention from [`crate::qcore`]).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::ComplexMatrix;

const STATE_TOL: f64 = 1e-10;

/// A validated two-qubit density operator: Hermitian, PSD, trace one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceState {
    rho: ComplexMatrix,
}

impl SourceState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::UnsupportedDim(rho.dim()));
        }
        if !rho.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        if !rho.is_psd(STATE_TOL) {
            return Err(Error::InvalidState("not positive semidefinite".into()));
        }
        let tr = rho.trace();
        if (tr - Complex64::ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {} != 1", tr.re)));
        }
        Ok(Self { rho })
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.rho
    }
}

/// |psi-><psi-| for |psi-> = (|01> - |10>)/sqrt(2).
pub fn singlet() -> SourceState {
    let mut rho = ComplexMatrix::zeros(4).expect("dim 4 is supported");
    let half = Complex64::new(0.5, 0.0);
    rho.set(1, 1, half);
    rho.set(2, 2, half);
    rho.set(1, 2, -half);
    rho.set(2, 1, -half);
    SourceState::new(rho).expect("singlet is a valid state")
}

/// The colored-noise floor (|01><01| + |10><10|)/2.
pub fn colored_floor() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4).expect("dim 4 is supported");
    let half = Complex64::new(0.5, 0.0);
    m.set(1, 1, half);
    m.set(2, 2, half);
    m
}

/// v |psi-><psi-| + (1-v) [ (1-r) I/4 + r M_color ].
pub fn noisy_source(v: f64, r: f64) -> Result<SourceState> {
    for (name, value) in [("v", v), ("r", r)] {
        if !(0.0..=1.0).contains(&value) || !value.is_finite() {
            return Err(Error::OutOfRange {
                name,
                value,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let white = ComplexMatrix::identity(4)
        .expect("dim 4 is supported")
        .scale(Complex64::new(0.25, 0.0));
    let noise = white
        .scale(Complex64::new(1.0 - r, 0.0))
        .add(&colored_floor().scale(Complex64::new(r, 0.0)))?;
    let rho = singlet()
        .density()
        .scale(Complex64::new(v, 0.0))
        .add(&noise.scale(Complex64::new(1.0 - v, 0.0)))?;
    SourceState::new(rho)
}
