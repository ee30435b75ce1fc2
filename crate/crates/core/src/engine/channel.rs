use num_complex::Complex64;

use super::gate::GateKind;
use crate::error::{Error, Result};

const COMPLETENESS_TOL: f64 = 1e-12;

/// A CPTP map given by Kraus operators on `targets` (first target is the
/// least significant bit of each operator's index).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    kraus: Vec<Vec<Complex64>>,
    targets: Vec<usize>,
}

impl NoiseChannel {
    pub fn new(kraus: Vec<Vec<Complex64>>, targets: Vec<usize>) -> Result<Self> {
        let k = targets.len();
        if k == 0 || kraus.is_empty() {
            return Err(Error::KrausShape(k));
        }
        for (i, &q) in targets.iter().enumerate() {
            if targets[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        let m = 1usize << k;
        if kraus.iter().any(|op| op.len() != m * m) {
            return Err(Error::KrausShape(k));
        }
        let deviation = completeness_deviation(&kraus, m);
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(deviation));
        }
        Ok(Self { kraus, targets })
    }

    /// Single-qubit Pauli channel with probabilities `(p_i, p_x, p_y, p_z)`.
    pub fn pauli(qubit: usize, probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
            return Err(Error::Probability(format!("{probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Probability(format!("{probs:?} sums to {total}")));
        }
        let paulis = [GateKind::I, GateKind::X, GateKind::Y, GateKind::Z];
        let kraus = probs
            .iter()
            .zip(paulis)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, g)| {
                let s = p.sqrt();
                g.matrix().into_iter().map(|z| z * s).collect()
            })
            .collect();
        Self::new(kraus, vec![qubit])
    }

    /// `rho -> (1 - w) rho + w I/2` on one qubit.
    pub fn depolarizing(qubit: usize, omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::Parameter(format!("depolarizing strength {omega} not in [0, 1]")));
        }
        let e = omega / 4.0;
        Self::pauli(qubit, [1.0 - 3.0 * e, e, e, e])
    }

    /// Energy relaxation `|1> -> |0>` with probability `gamma`.
    pub fn amplitude_damping(qubit: usize, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Parameter(format!("damping {gamma} not in [0, 1]")));
        }
        let c = |re: f64| Complex64::new(re, 0.0);
        let k0 = vec![c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())];
        let k1 = vec![c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)];
        Self::new(vec![k0, k1], vec![qubit])
    }

    /// The same Kraus set placed on different qubits.
    pub fn on(&self, targets: &[usize]) -> Result<Self> {
        if targets.len() != self.targets.len() {
            return Err(Error::KrausShape(targets.len()));
        }
        Ok(Self {
            kraus: self.kraus.clone(),
            targets: targets.to_vec(),
        })
    }

    pub fn kraus(&self) -> &[Vec<Complex64>] {
        &self.kraus
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

fn completeness_deviation(kraus: &[Vec<Complex64>], m: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let v: Complex64 = kraus
                .iter()
                .map(|k| (0..m).map(|r| k[r * m + i].conj() * k[r * m + j]).sum::<Complex64>())
                .sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - expect).norm());
        }
    }
    worst
}
