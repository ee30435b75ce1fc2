//! Two-qubit state tomography by Pauli-basis linear inversion.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{run_exact_reduced, sample_counts, Basis, Circuit, DensityMatrix, Gate, NoiseChannel, Start};
use crate::error::{Error, Result};
use crate::seed;

const BASES: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

/// The nine product measurement settings and the shot budget for each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographySettings {
    shots_per_setting: u64,
}

impl TomographySettings {
    pub fn new(shots_per_setting: u64) -> Result<Self> {
        if shots_per_setting == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(Self { shots_per_setting })
    }

    pub fn shots_per_setting(&self) -> u64 {
        self.shots_per_setting
    }

    /// `(basis on the first qubit, basis on the second)`, all nine pairs.
    pub fn bases(&self) -> [(Basis, Basis); 9] {
        let mut out = [(Basis::Z, Basis::Z); 9];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (BASES[i / 3], BASES[i % 3]);
        }
        out
    }
}

fn pauli_char(b: Basis) -> char {
    match b {
        Basis::Z => 'Z',
        Basis::X => 'X',
        Basis::Y => 'Y',
    }
}

fn pauli_matrix(c: char) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match c {
        'I' => [[o, z], [z, o]],
        'X' => [[z, o], [o, z]],
        'Y' => [[z, -i], [i, z]],
        'Z' => [[o, z], [z, -o]],
        _ => unreachable!("Pauli labels are generated internally"),
    }
}

/// `1/4 sum_P <P> P` over the sixteen two-qubit Pauli strings. `expect` maps a
/// label (character `k` on qubit `k`) to its expectation value.
fn linear_inversion(mut expect: impl FnMut(&str) -> Result<f64>) -> Result<DMatrix<Complex64>> {
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    for a in ['I', 'X', 'Y', 'Z'] {
        for b in ['I', 'X', 'Y', 'Z'] {
            let label: String = [a, b].iter().collect();
            let e = expect(&label)?;
            let (pa, pb) = (pauli_matrix(a), pauli_matrix(b));
            for r in 0..4 {
                for c in 0..4 {
                    m[(r, c)] += pa[r & 1][c & 1] * pb[r >> 1][c >> 1] * (0.25 * e);
                }
            }
        }
    }
    Ok(m)
}

/// Reconstruction from exact Pauli expectations of `rho`.
pub fn qst_exact(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.n_qubits() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: rho.n_qubits(),
        });
    }
    DensityMatrix::from_matrix(&linear_inversion(|label| rho.pauli_expectation(label))?)
}

/// Nearest-spectrum physical state: negative eigenvalues clipped to zero,
/// trace renormalized to one.
pub fn project_psd(m: &DMatrix<Complex64>) -> Result<DensityMatrix> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Parameter("matrix has no positive spectrum".into()));
    }
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        clipped.len(),
        clipped.iter().map(|v| Complex64::new(v / total, 0.0)),
    ));
    let v = &eig.eigenvectors;
    DensityMatrix::from_matrix(&(v * d * v.adjoint()))
}

/// Sampled tomography of qubits `pair` at the end of `prep`. Each setting
/// appends the basis change (X: H, Y: S-dagger then H) and two fresh
/// measurements; other classical bits in `prep` are marginalized away.
pub fn qst_sampled(
    prep: &Circuit,
    pair: [usize; 2],
    settings: &TomographySettings,
    seed: u64,
) -> Result<DensityMatrix> {
    if pair[0] == pair[1] {
        return Err(Error::DuplicateQubit(pair[0]));
    }
    // Correlator of each (basis, basis) setting, and single-qubit means
    // accumulated over the three settings that share the basis.
    let mut corr = [[0.0; 3]; 3];
    let mut single = [[0.0; 3]; 2];
    for (i, (b0, b1)) in settings.bases().into_iter().enumerate() {
        let mut c = prep.clone();
        let first = c.add_clbits(2);
        for (q, b) in pair.into_iter().zip([b0, b1]) {
            match b {
                Basis::Z => {}
                Basis::X => {
                    c.h(q)?;
                }
                Basis::Y => {
                    c.sdg(q)?.h(q)?;
                }
            }
        }
        c.measure(pair[0], first, Basis::Z)?
            .measure(pair[1], first + 1, Basis::Z)?;
        let counts = sample_counts(
            &c,
            Start::Ground,
            settings.shots_per_setting,
            seed::derive(seed, i as u64),
        )?
        .marginalize(&[first, first + 1])?;
        let n = counts.total() as f64;
        let mut zz = 0.0;
        let mut z0 = 0.0;
        let mut z1 = 0.0;
        for (key, &k) in counts.counts() {
            let bytes = key.as_bytes();
            let s0 = if bytes[0] == b'1' { -1.0 } else { 1.0 };
            let s1 = if bytes[1] == b'1' { -1.0 } else { 1.0 };
            let w = k as f64 / n;
            zz += s0 * s1 * w;
            z0 += s0 * w;
            z1 += s1 * w;
        }
        let (i0, i1) = (i / 3, i % 3);
        corr[i0][i1] = zz;
        single[0][i0] += z0 / 3.0;
        single[1][i1] += z1 / 3.0;
    }
    let index = |c: char| BASES.iter().position(|b| pauli_char(*b) == c);
    let m = linear_inversion(|label| {
        let chars: Vec<char> = label.chars().collect();
        Ok(match (index(chars[0]), index(chars[1])) {
            (None, None) => 1.0,
            (Some(a), None) => single[0][a],
            (None, Some(b)) => single[1][b],
            (Some(a), Some(b)) => corr[a][b],
        })
    })?;
    project_psd(&m)
}

/// Bell pair on qubits 0 and 1 with optional single-qubit `noise` on qubit 0.
pub fn bell_prep(noise: Option<&NoiseChannel>) -> Result<Circuit> {
    let mut c = Circuit::new(2, 0)?;
    c.gate(Gate::h(0))?.cnot(0, 1)?;
    if let Some(ch) = noise {
        c.channel(ch.on(&[0])?)?;
    }
    Ok(c)
}

/// The state left on `pair` by `prep`, averaged over all measurement records.
pub fn prepared_state(prep: &Circuit, pair: [usize; 2]) -> Result<DensityMatrix> {
    let branches = run_exact_reduced(prep, Start::Ground, &pair)?;
    let mut data = vec![Complex64::new(0.0, 0.0); 16];
    for b in branches.values() {
        for (acc, z) in data.iter_mut().zip(b.state.as_slice()) {
            *acc += z * b.probability;
        }
    }
    DensityMatrix::from_row_major(2, data)
}
