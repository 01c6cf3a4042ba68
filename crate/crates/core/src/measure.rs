//! Measurement operators and state-update rules.
//!
//! Every observer measures in the x-z plane. Alice's settings place the axis
//! at angle x*pi/k, Bob's factors at (2y+1)*pi/2k. Post-measurement states
//! are kept unnormalized throughout: outcome probabilities are read off as
//! traces of the final state, so probability-zero branches propagate as zero
//! matrices and are never renormalized.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{sigma_x, sigma_z, ComplexMatrix};

const OBS_TOL: f64 = 1e-10;
const PHYS_TOL: f64 = 1e-12;

/// A dichotomic measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// A qubit observable with eigenvalues +-1 (unit Bloch vector).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::UnsupportedDim(matrix.dim()));
        }
        if !matrix.is_hermitian(OBS_TOL) {
            return Err(Error::InvalidState("observable is not Hermitian".into()));
        }
        // Eigenvalues +-1 <=> A^2 = I for Hermitian A.
        let sq = matrix.matmul(&matrix)?;
        let id = ComplexMatrix::identity(2)?;
        for i in 0..2 {
            for j in 0..2 {
                if (sq.get(i, j) - id.get(i, j)).norm() > OBS_TOL {
                    return Err(Error::InvalidState(
                        "observable eigenvalues are not +-1".into(),
                    ));
                }
            }
        }
        Ok(Self { matrix })
    }

    /// sin(theta) sigma_x + cos(theta) sigma_z.
    pub fn from_angle(theta: f64) -> Self {
        let m = sigma_x()
            .scale(Complex64::new(theta.sin(), 0.0))
            .add(&sigma_z().scale(Complex64::new(theta.cos(), 0.0)))
            .expect("dims match");
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Alice's observable for setting x in 0..=k (x = k realizes the chain
/// closure A^k = -A^0).
pub fn alice_observable(x: usize, k: usize) -> Result<Observable> {
    if x > k {
        return Err(Error::SettingOutOfRange { value: x, max: k });
    }
    Ok(Observable::from_angle(
        x as f64 * std::f64::consts::PI / k as f64,
    ))
}

/// Bob's per-branch factor for setting y in 0..k.
pub fn bob_factor(y: usize, k: usize) -> Result<Observable> {
    if y >= k {
        return Err(Error::SettingOutOfRange {
            value: y,
            max: k - 1,
        });
    }
    Ok(Observable::from_angle(
        (2 * y + 1) as f64 * std::f64::consts::PI / (2 * k) as f64,
    ))
}

/// Projector (I + a A)/2 onto the outcome-a eigenspace.
pub fn povm_element(obs: &Observable, a: Outcome) -> ComplexMatrix {
    ComplexMatrix::identity(2)
        .expect("dim 2 is supported")
        .add(&obs.matrix().scale(Complex64::new(a.sign(), 0.0)))
        .expect("dims match")
        .scale(Complex64::new(0.5, 0.0))
}

/// Unnormalized post-measurement state of a weak measurement with quality
/// factor `f` and precision factor `g`:
///
///   (F/2) rho + ((1 + aG - F)/2) M_+1 rho M_+1 + ((1 - aG - F)/2) M_-1 rho M_-1
///
/// The two projector weights can go negative when F > 1 - G; the output is
/// still PSD whenever F^2 + G^2 <= 1, which construction enforces.
pub fn weak_update(
    rho: &ComplexMatrix,
    obs: &Observable,
    a: Outcome,
    f: f64,
    g: f64,
) -> Result<ComplexMatrix> {
    for (name, value) in [("F", f), ("G", g)] {
        if !(0.0..=1.0).contains(&value) || !value.is_finite() {
            return Err(Error::OutOfRange {
                name,
                value,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    if f * f + g * g > 1.0 + PHYS_TOL {
        return Err(Error::UnphysicalWeakPair(f * f + g * g));
    }
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDim(rho.dim()));
    }
    let sign = a.sign();
    let keep = rho.scale(Complex64::new(f / 2.0, 0.0));
    let mut out = keep;
    for outcome in Outcome::BOTH {
        let proj = povm_element(obs, outcome);
        let weight = (1.0 + sign * outcome.sign() * g - f) / 2.0;
        let term = proj
            .matmul(rho)?
            .matmul(&proj.dagger())?
            .scale(Complex64::new(weight, 0.0));
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Unnormalized projective update M_a rho M_a^dagger; identical to
/// `weak_update` at f = 0, g = 1.
pub fn projective_update(
    rho: &ComplexMatrix,
    obs: &Observable,
    a: Outcome,
) -> Result<ComplexMatrix> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDim(rho.dim()));
    }
    let proj = povm_element(obs, a);
    proj.matmul(rho)?.matmul(&proj.dagger())
}

/// Bob's outcome-b projection on the second factor followed by the partial
/// trace over his system: the unnormalized conditional state on Alice's side.
pub fn bob_project_and_reduce(
    rho_ab: &ComplexMatrix,
    y: usize,
    b: Outcome,
    k: usize,
) -> Result<ComplexMatrix> {
    if rho_ab.dim() != 4 {
        return Err(Error::UnsupportedDim(rho_ab.dim()));
    }
    let proj = povm_element(&bob_factor(y, k)?, b);
    let lifted = ComplexMatrix::identity(2)?.tensor(&proj)?;
    lifted
        .matmul(rho_ab)?
        .matmul(&lifted.dagger())?
        .partial_trace_second()
}
