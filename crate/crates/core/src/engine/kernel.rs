//! Index-level kernels shared by [`DensityMatrix`](super::DensityMatrix) and the
//! branch executor. All matrices are dense, row-major, and use the convention
//! that bit `k` of a basis index is the state of local qubit `k`.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Offsets of the `2^k` basis states spanned by `positions`, with
/// `positions[0]` as the least significant bit of the operator index.
fn span_offsets(positions: &[usize]) -> Vec<usize> {
    (0..1usize << positions.len())
        .map(|a| {
            positions
                .iter()
                .enumerate()
                .filter(|(j, _)| a >> j & 1 == 1)
                .map(|(_, &p)| 1 << p)
                .sum()
        })
        .collect()
}

/// In-place `rho <- U rho U^dagger` for an operator acting on `positions`.
pub(crate) fn conjugate(rho: &mut [Complex64], n_qubits: usize, positions: &[usize], u: &[Complex64]) {
    let dim = 1usize << n_qubits;
    let m = 1usize << positions.len();
    debug_assert_eq!(u.len(), m * m);
    let offsets = span_offsets(positions);
    let mask: usize = positions.iter().map(|&p| 1 << p).sum();
    let mut gathered = vec![ZERO; m];

    // Left multiplication acts on row indices.
    for base in (0..dim).filter(|i| i & mask == 0) {
        for col in 0..dim {
            for (a, off) in offsets.iter().enumerate() {
                gathered[a] = rho[(base | off) * dim + col];
            }
            for (b, off) in offsets.iter().enumerate() {
                let row = &u[b * m..(b + 1) * m];
                rho[(base | off) * dim + col] = row.iter().zip(&gathered).map(|(x, y)| x * y).sum();
            }
        }
    }
    // Right multiplication by U^dagger acts on column indices.
    for r in 0..dim {
        let line = &mut rho[r * dim..(r + 1) * dim];
        for base in (0..dim).filter(|i| i & mask == 0) {
            for (a, off) in offsets.iter().enumerate() {
                gathered[a] = line[base | off];
            }
            for (b, off) in offsets.iter().enumerate() {
                let row = &u[b * m..(b + 1) * m];
                line[base | off] = row.iter().zip(&gathered).map(|(x, y)| x.conj() * y).sum();
            }
        }
    }
}

/// `sum_k K rho K^dagger`, returning a fresh buffer.
pub(crate) fn apply_kraus(
    rho: &[Complex64],
    n_qubits: usize,
    positions: &[usize],
    kraus: &[Vec<Complex64>],
) -> Vec<Complex64> {
    let mut out = vec![ZERO; rho.len()];
    for k in kraus {
        let mut term = rho.to_vec();
        conjugate(&mut term, n_qubits, positions, k);
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
    }
    out
}

/// Reduced matrix over `keep` (in the given order; `keep[i]` becomes qubit `i`),
/// summing over every other qubit. With `keep` a permutation of all qubits this
/// is a pure reordering.
pub(crate) fn reduce(rho: &[Complex64], n_qubits: usize, keep: &[usize]) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
    let keep_off = span_offsets(keep);
    let trace_off = span_offsets(&traced);
    let kd = keep_off.len();
    let mut out = vec![ZERO; kd * kd];
    for (a, ka) in keep_off.iter().enumerate() {
        for (b, kb) in keep_off.iter().enumerate() {
            out[a * kd + b] = trace_off.iter().map(|e| rho[(ka | e) * dim + (kb | e)]).sum();
        }
    }
    out
}

/// Zeroes every row and column whose bit at `position` differs from `bit`
/// (the unnormalized projection `P rho P`).
pub(crate) fn project(rho: &mut [Complex64], n_qubits: usize, position: usize, bit: bool) {
    let dim = 1usize << n_qubits;
    let keep = |i: usize| (i >> position & 1 == 1) == bit;
    for r in 0..dim {
        for c in 0..dim {
            if !(keep(r) && keep(c)) {
                rho[r * dim + c] = ZERO;
            }
        }
    }
}

/// `rho (x) |0><0|` with the new qubit as the most significant bit.
pub(crate) fn append_ground(rho: &[Complex64], n_qubits: usize) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let new_dim = dim * 2;
    let mut out = vec![ZERO; new_dim * new_dim];
    for r in 0..dim {
        out[r * new_dim..r * new_dim + dim].copy_from_slice(&rho[r * dim..(r + 1) * dim]);
    }
    out
}

pub(crate) fn trace(rho: &[Complex64], dim: usize) -> Complex64 {
    (0..dim).map(|i| rho[i * dim + i]).sum()
}
