#![allow(dead_code)]

use distimation::bell::BellDiagonal;
use distimation::engine::{DensityMatrix, NoiseChannel};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Bell weights from four draws, normalized; about one weight in five is
/// exactly zero so boundary states are covered.
pub fn bell_diagonal() -> impl Strategy<Value = BellDiagonal> {
    prop::array::uniform4(prop_oneof![1 => Just(0.0), 4 => 0.0..1.0f64])
        .prop_filter("need some weight", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| {
            let total: f64 = w.iter().sum();
            let mut q = w.map(|v| v / total);
            // Absorb rounding so the weights sum to one as tightly as possible.
            let rest: f64 = q[1..].iter().sum();
            q[0] = 1.0 - rest;
            BellDiagonal::new(q.map(|v| v.max(0.0))).unwrap()
        })
}

fn complex_entries(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

/// `G G^dagger / Tr` for a random complex `G`.
pub fn density(n_qubits: usize) -> impl Strategy<Value = DensityMatrix> {
    let dim = 1usize << n_qubits;
    complex_entries(dim * dim)
        .prop_filter("nonzero", |v| v.iter().any(|z| z.norm() > 1e-3))
        .prop_map(move |v| {
            let g = DMatrix::from_row_slice(dim, dim, &v);
            let m = &g * g.adjoint();
            let tr = m.trace();
            DensityMatrix::from_matrix(&(m / tr)).unwrap()
        })
}

/// Kraus set of `rank` operators on one qubit, cut from the orthonormal
/// columns of a random `2 rank x 2` matrix.
pub fn kraus_channel(qubit: usize) -> impl Strategy<Value = NoiseChannel> {
    (1usize..=4).prop_flat_map(move |rank| {
        complex_entries(2 * rank * 2).prop_map(move |v| {
            let m = DMatrix::from_row_slice(2 * rank, 2, &v);
            let q = m.qr().q();
            let kraus = (0..rank)
                .map(|k| vec![q[(2 * k, 0)], q[(2 * k, 1)], q[(2 * k + 1, 0)], q[(2 * k + 1, 1)]])
                .collect();
            NoiseChannel::new(kraus, vec![qubit]).unwrap()
        })
    })
}
