//! Bell-basis states and the metrics used to score estimates.
//!
//! Bell states are always ordered `(Phi+, Phi-, Psi+, Psi-)`. With qubit 0 as
//! the low bit, `Psi- = (|q0=0,q1=1> - |q0=1,q1=0>)/sqrt(2)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::engine::{hermitian_eigenvalues, DensityMatrix};
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Weights `(q1, q2, q3, q4)` on `(Phi+, Phi-, Psi+, Psi-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonal([f64; 4]);

impl BellDiagonal {
    pub fn new(q: [f64; 4]) -> Result<Self> {
        if q.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Probability(format!("negative Bell weight in {q:?}")));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Probability(format!("Bell weights {q:?} sum to {total}")));
        }
        Ok(Self(q))
    }

    pub fn phi_plus() -> Self {
        Self([1.0, 0.0, 0.0, 0.0])
    }

    /// Isotropic weights `(q1, r, r, r)` with `r = (1 - q1)/3`.
    pub fn isotropic(q1: f64) -> Result<Self> {
        let r = (1.0 - q1) / 3.0;
        Self::new([q1, r, r, r])
    }

    pub fn q(&self) -> [f64; 4] {
        self.0
    }

    pub fn fidelity(&self) -> f64 {
        self.0[0]
    }

    pub fn to_density(&self) -> DensityMatrix {
        bell_diagonal_to_density(self)
    }
}

/// Depolarization level `w` of `(1 - w)|Phi+><Phi+| + w I/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParam(f64);

impl WernerParam {
    pub fn new(omega: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&omega) {
            Ok(Self(omega))
        } else {
            Err(Error::Parameter(format!("Werner parameter {omega} not in [0, 1]")))
        }
    }

    /// Inverse of the isotropic map: `w = 4 (1 - q1) / 3`.
    pub fn from_fidelity(q1: f64) -> Result<Self> {
        Self::new(4.0 * (1.0 - q1) / 3.0)
    }

    pub fn omega(&self) -> f64 {
        self.0
    }

    pub fn to_bell_diagonal(&self) -> BellDiagonal {
        werner_to_bell_diagonal(*self)
    }
}

pub fn werner_to_bell_diagonal(w: WernerParam) -> BellDiagonal {
    let e = w.0 / 4.0;
    BellDiagonal([1.0 - 3.0 * e, e, e, e])
}

/// Columns are the Bell states in canonical order.
pub fn bell_basis() -> DMatrix<Complex64> {
    let s = FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let rows = [
        //  Phi+  Phi-  Psi+  Psi-
        [   s,    s,   0.0,  0.0], // |00>
        [ 0.0,  0.0,    s,    -s], // q0 = 1, q1 = 0
        [ 0.0,  0.0,    s,     s], // q0 = 0, q1 = 1
        [   s,   -s,   0.0,  0.0], // |11>
    ];
    DMatrix::from_fn(4, 4, |r, c| Complex64::new(rows[r][c], 0.0))
}

pub fn bell_diagonal_to_density(q: &BellDiagonal) -> DensityMatrix {
    let b = bell_basis();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        4,
        q.0.iter().map(|&v| Complex64::new(v, 0.0)),
    ));
    let rho = &b * diag * b.adjoint();
    DensityMatrix::from_matrix(&rho).expect("4x4 is a two-qubit matrix")
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() == 2 {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: 2,
            got: rho.n_qubits(),
        })
    }
}

/// `B^dagger rho B`, the state written in the Bell basis.
pub fn density_to_bell_basis(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    require_two_qubits(rho)?;
    let b = bell_basis();
    Ok(b.adjoint() * rho.to_matrix() * b)
}

/// Real diagonal of [`density_to_bell_basis`].
pub fn bell_populations(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let m = density_to_bell_basis(rho)?;
    Ok([m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re])
}

/// `1/2 sum |eig(a - b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::Dimension {
            expected: a.n_qubits(),
            got: b.n_qubits(),
        });
    }
    let diff = a.to_matrix() - b.to_matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// Trace distance between two Bell-diagonal states (half the L1 distance
/// of the weight vectors).
pub fn bell_diagonal_distance(a: &BellDiagonal, b: &BellDiagonal) -> f64 {
    0.5 * a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `<Phi+| rho |Phi+>`.
pub fn fidelity_with_phi_plus(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let s = 0.5;
    Ok(s * (rho.get(0, 0) + rho.get(0, 3) + rho.get(3, 0) + rho.get(3, 3)).re)
}

/// Werner state closest in trace distance to `q`, as `(w, distance)`.
///
/// The distance is piecewise linear and convex in `w`, so the minimum sits at
/// an endpoint or where one Werner weight crosses the matching `q_i`.
pub fn closest_werner(q: &BellDiagonal) -> (WernerParam, f64) {
    let mut candidates = vec![0.0, 1.0, 4.0 * (1.0 - q.0[0]) / 3.0];
    candidates.extend(q.0[1..].iter().map(|v| 4.0 * v));
    candidates
        .into_iter()
        .filter(|w| (0.0..=1.0).contains(w))
        .map(|w| {
            let werner = WernerParam(w);
            (werner, bell_diagonal_distance(&werner.to_bell_diagonal(), q))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("endpoints are always candidates")
}
