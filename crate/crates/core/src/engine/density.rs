use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::channel::NoiseChannel;
use super::gate::Gate;
use super::{kernel, MAX_QUBITS};
use crate::error::{Error, Result};

/// Acceptance tolerances for the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub hermitian: f64,
    pub trace: f64,
    /// Smallest admissible eigenvalue (a small negative number).
    pub min_eigenvalue: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            min_eigenvalue: -1e-9,
        }
    }
}

/// Mixed state of `n` qubits stored as a dense row-major `2^n x 2^n` matrix.
/// Qubit `k` is bit `k` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

fn check_size(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::Size(n_qubits))
    }
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, data })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n_qubits, data })
    }

    /// `|psi><psi|` for a normalized amplitude vector of length `2^n`.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let n_qubits = dimension_to_qubits(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!("state vector has norm^2 {norm}")));
        }
        let data = amplitudes
            .iter()
            .flat_map(|a| amplitudes.iter().map(move |b| a * b.conj()))
            .collect();
        Ok(Self { n_qubits, data })
    }

    /// Wraps a row-major matrix after checking its shape only. Use
    /// [`DensityMatrix::validate`] to check the physical invariants.
    pub fn from_row_major(n_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::Parameter(format!(
                "{} entries do not form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { n_qubits, data })
    }

    pub fn from_matrix(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Parameter("matrix is not square".into()));
        }
        let n_qubits = dimension_to_qubits(m.nrows())?;
        let dim = m.nrows();
        let data = (0..dim * dim).map(|k| m[(k / dim, k % dim)]).collect();
        Ok(Self { n_qubits, data })
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |r, c| self.data[r * dim + c])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        kernel::trace(&self.data, self.dim())
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.to_matrix())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(&Tolerance::default())
    }

    pub fn validate_with(&self, tol: &Tolerance) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol.hermitian {
            return Err(Error::Parameter(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > tol.trace {
            return Err(Error::Parameter(format!("trace is {tr}")));
        }
        let min = self.eigenvalues()[0];
        if min < tol.min_eigenvalue {
            return Err(Error::Parameter(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &q) in targets.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if targets[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// `U rho U^dagger`.
    pub fn apply_gate(&self, gate: &Gate) -> Result<Self> {
        self.check_targets(gate.targets())?;
        let mut data = self.data.clone();
        kernel::conjugate(&mut data, self.n_qubits, gate.targets(), &gate.matrix());
        Ok(Self {
            n_qubits: self.n_qubits,
            data,
        })
    }

    /// `sum_k K rho K^dagger`.
    pub fn apply_channel(&self, channel: &NoiseChannel) -> Result<Self> {
        self.check_targets(channel.targets())?;
        let data = kernel::apply_kraus(&self.data, self.n_qubits, channel.targets(), channel.kraus());
        Ok(Self {
            n_qubits: self.n_qubits,
            data,
        })
    }

    /// Reduced state on `keep`; `keep[i]` becomes qubit `i` of the result.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Parameter("partial trace must keep at least one qubit".into()));
        }
        self.check_targets(keep)?;
        Ok(Self {
            n_qubits: keep.len(),
            data: kernel::reduce(&self.data, self.n_qubits, keep),
        })
    }

    /// `self (x) other`, with `other` occupying the higher-numbered qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n_qubits = self.n_qubits + other.n_qubits;
        check_size(n_qubits)?;
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for rb in 0..db {
            for cb in 0..db {
                let w = other.get(rb, cb);
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for ra in 0..da {
                    for ca in 0..da {
                        data[(rb * da + ra) * dim + cb * da + ca] = self.get(ra, ca) * w;
                    }
                }
            }
        }
        Ok(Self { n_qubits, data })
    }

    /// `Tr(rho P)` for a Pauli string whose `k`-th character acts on qubit `k`.
    pub fn pauli_expectation(&self, label: &str) -> Result<f64> {
        let ops: Vec<char> = label.chars().collect();
        if ops.len() != self.n_qubits || ops.iter().any(|c| !"IXYZ".contains(*c)) {
            return Err(Error::PauliLabel(label.to_string()));
        }
        let flip: usize = ops
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, 'X' | 'Y'))
            .map(|(k, _)| 1 << k)
            .sum();
        let dim = self.dim();
        // P|i> = phase(i) |i ^ flip>, so Tr(rho P) = sum_i phase(i) rho[i][i ^ flip].
        let total: Complex64 = (0..dim)
            .map(|i| {
                let mut phase = Complex64::new(1.0, 0.0);
                for (k, c) in ops.iter().enumerate() {
                    let bit = i >> k & 1 == 1;
                    match c {
                        'Z' if bit => phase = -phase,
                        'Y' => {
                            phase *= Complex64::new(0.0, if bit { -1.0 } else { 1.0 });
                        }
                        _ => {}
                    }
                }
                phase * self.data[i * dim + (i ^ flip)]
            })
            .sum();
        Ok(total.re)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }
}

pub(crate) fn dimension_to_qubits(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Parameter(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    check_size(n)?;
    Ok(n)
}

/// Ascending eigenvalues of `(m + m^dagger) / 2`.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}
