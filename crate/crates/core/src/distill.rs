//! The three two-copy distillation circuits and their closed-form success model.
//!
//! Pair 1 is qubits `(0, 1)` and pair 2 is qubits `(2, 3)`. Qubits 2 and 3 are
//! measured into classical bits 0 and 1, so the key `"00"` means both checks
//! passed with even parity.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::bell::BellDiagonal;
use crate::engine::{outcome_probabilities, sample_counts, Basis, Circuit, CountsTable, NoiseChannel, Start};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistillationKind {
    /// Detects X and Y errors.
    A,
    /// Detects Z and Y errors.
    B,
    /// Detects X and Z errors.
    C,
}

impl DistillationKind {
    pub const ALL: [DistillationKind; 3] = [Self::A, Self::B, Self::C];

    /// Bell weight that survives this circuit together with `Phi+`
    /// (`Phi-`, `Psi+` and `Psi-` respectively).
    fn partner(self) -> usize {
        match self {
            Self::A => 1,
            Self::B => 2,
            Self::C => 3,
        }
    }

    /// `x = q1 + q_partner`.
    pub fn x(self, q: &BellDiagonal) -> f64 {
        let q = q.q();
        q[0] + q[self.partner()]
    }
}

impl fmt::Display for DistillationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
        };
        f.write_str(s)
    }
}

/// Probability of the `"00"` outcome for each circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessProbs {
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
}

impl SuccessProbs {
    pub fn new(p_a: f64, p_b: f64, p_c: f64) -> Result<Self> {
        for p in [p_a, p_b, p_c] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Probability(format!("success probability {p} not in [0, 1]")));
            }
        }
        Ok(Self { p_a, p_b, p_c })
    }

    pub fn get(&self, kind: DistillationKind) -> f64 {
        match kind {
            DistillationKind::A => self.p_a,
            DistillationKind::B => self.p_b,
            DistillationKind::C => self.p_c,
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.p_a, self.p_b, self.p_c]
    }
}

/// Four-qubit circuit for `kind`. `noise`, a single-qubit channel, is placed
/// on qubits 0 and 2 right after the Bell preparations.
pub fn build_distillation_circuit(kind: DistillationKind, noise: Option<&NoiseChannel>) -> Result<Circuit> {
    let mut c = Circuit::new(4, 2)?;
    c.h(0)?.cnot(0, 1)?.h(2)?.cnot(2, 3)?;
    if let Some(ch) = noise {
        if ch.targets().len() != 1 {
            return Err(Error::Arity {
                name: "distillation noise",
                expected: 1,
                got: ch.targets().len(),
            });
        }
        c.channel(ch.on(&[0])?)?.channel(ch.on(&[2])?)?;
    }
    append_distillation_logic(&mut c, kind, [0, 1, 2, 3], [0, 1])?;
    Ok(c)
}

/// Appends the check of `kind` to `circuit`, treating `(qubits[0], qubits[1])`
/// as the kept pair and `(qubits[2], qubits[3])` as the sacrificed pair, whose
/// outcomes land in `clbits`.
pub fn append_distillation_logic(
    circuit: &mut Circuit,
    kind: DistillationKind,
    qubits: [usize; 4],
    clbits: [usize; 2],
) -> Result<()> {
    let [q0, q1, q2, q3] = qubits;
    match kind {
        DistillationKind::A => {
            circuit.cnot(q0, q2)?.cnot(q1, q3)?;
        }
        DistillationKind::B => {
            circuit.cnot(q3, q1)?.cnot(q2, q0)?.h(q2)?.h(q3)?;
        }
        DistillationKind::C => {
            for q in qubits {
                circuit.sdg(q)?;
            }
            circuit.cnot(q3, q1)?.cnot(q2, q0)?.s(q0)?.s(q1)?.h(q2)?.h(q3)?;
        }
    }
    circuit
        .measure(q2, clbits[0], Basis::Z)?
        .measure(q3, clbits[1], Basis::Z)?;
    Ok(())
}

/// Single-qubit Pauli probabilities `(pI, pX, pY, pZ)` that, applied to one
/// half of `Phi+`, yield the Bell-diagonal state `q`.
pub fn pauli_probs_for(q: &BellDiagonal) -> [f64; 4] {
    let [q1, q2, q3, q4] = q.q();
    [q1, q3, q4, q2]
}

pub fn bell_diagonal_noise(q: &BellDiagonal) -> Result<NoiseChannel> {
    NoiseChannel::pauli(0, pauli_probs_for(q))
}

/// `P("00") = (x^2 + (1 - x)^2) / 2`.
pub fn forward_success_prob(kind: DistillationKind, q: &BellDiagonal) -> f64 {
    both_match_prob(kind, q) / 2.0
}

/// `P("00") + P("11") = x^2 + (1 - x)^2`.
pub fn both_match_prob(kind: DistillationKind, q: &BellDiagonal) -> f64 {
    let x = kind.x(q);
    x * x + (1.0 - x) * (1.0 - x)
}

pub fn forward_success_probs(q: &BellDiagonal) -> SuccessProbs {
    let [a, b, c] = DistillationKind::ALL.map(|k| forward_success_prob(k, q));
    SuccessProbs { p_a: a, p_b: b, p_c: c }
}

/// Exact outcome distribution of `kind` run on two copies of `q`.
pub fn exact_outcomes(kind: DistillationKind, q: &BellDiagonal) -> Result<BTreeMap<String, f64>> {
    let circuit = build_distillation_circuit(kind, Some(&bell_diagonal_noise(q)?))?;
    outcome_probabilities(&circuit, Start::Ground)
}

/// Shot histograms for circuits A, B and C. Circuit `i` uses a seed derived
/// from `seed` and `i`.
pub fn sample_distillation_counts(q: &BellDiagonal, shots: u64, seed: u64) -> Result<[CountsTable; 3]> {
    let noise = bell_diagonal_noise(q)?;
    let run = |i: usize| -> Result<CountsTable> {
        let kind = DistillationKind::ALL[i];
        let circuit = build_distillation_circuit(kind, Some(&noise))?;
        sample_counts(&circuit, Start::Ground, shots, seed::derive(seed, i as u64))
    };
    Ok([run(0)?, run(1)?, run(2)?])
}

/// Sampled `"00"` frequencies for the three circuits.
pub fn measure_success_probs(q: &BellDiagonal, shots: u64, seed: u64) -> Result<SuccessProbs> {
    let [a, b, c] = sample_distillation_counts(q, shots, seed)?;
    SuccessProbs::new(a.frequency("00"), b.frequency("00"), c.frequency("00"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Gate;

    fn p(map: &BTreeMap<String, f64>, key: &str) -> f64 {
        map.get(key).copied().unwrap_or(0.0)
    }

    #[test]
    fn noiseless_circuit_a() {
        let c = build_distillation_circuit(DistillationKind::A, None).unwrap();
        let out = outcome_probabilities(&c, Start::Ground).unwrap();
        assert!((p(&out, "00") - 0.5).abs() < 1e-12);
        assert!((p(&out, "11") - 0.5).abs() < 1e-12);
        assert!(p(&out, "01") < 1e-12 && p(&out, "10") < 1e-12);
    }

    /// Two perfect pairs with `error` on qubit 0 only.
    fn one_pair_error(kind: DistillationKind, error: Gate) -> BTreeMap<String, f64> {
        let mut c = Circuit::new(4, 2).unwrap();
        c.h(0).unwrap().cnot(0, 1).unwrap().h(2).unwrap().cnot(2, 3).unwrap();
        c.gate(error).unwrap();
        append_distillation_logic(&mut c, kind, [0, 1, 2, 3], [0, 1]).unwrap();
        outcome_probabilities(&c, Start::Ground).unwrap()
    }

    #[test]
    fn deterministic_errors_on_circuit_a() {
        let x = one_pair_error(DistillationKind::A, Gate::x(0));
        assert!(p(&x, "00") < 1e-12 && p(&x, "11") < 1e-12);
        let z = one_pair_error(DistillationKind::A, Gate::z(0));
        assert!((p(&z, "00") - 0.5).abs() < 1e-12);
        assert!((p(&z, "11") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn error_detection_table() {
        use DistillationKind::*;
        let table = [
            (A, [true, false, true]),
            (B, [false, true, true]),
            (C, [true, true, false]),
        ];
        for (kind, detects) in table {
            for (error, caught) in [Gate::x(0), Gate::z(0), Gate::y(0)].into_iter().zip(detects) {
                let out = one_pair_error(kind, error.clone());
                let pass = p(&out, "00") + p(&out, "11");
                let expect = if caught { 0.0 } else { 1.0 };
                assert!((pass - expect).abs() < 1e-12, "{kind} {error:?}: {pass}");
            }
        }
    }

    #[test]
    fn forward_examples() {
        let q = BellDiagonal::new([0.7, 0.1, 0.15, 0.05]).unwrap();
        assert!((forward_success_prob(DistillationKind::A, &BellDiagonal::phi_plus()) - 0.5).abs() < 1e-15);
        assert!((forward_success_prob(DistillationKind::A, &q) - 0.34).abs() < 1e-12);
        assert!((forward_success_prob(DistillationKind::B, &q) - 0.3725).abs() < 1e-12);
        assert!((forward_success_prob(DistillationKind::C, &q) - 0.3125).abs() < 1e-12);
        for kind in DistillationKind::ALL {
            let exact = exact_outcomes(kind, &q).unwrap();
            assert!((p(&exact, "00") - forward_success_prob(kind, &q)).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_arity_checked() {
        let two = NoiseChannel::pauli(0, [1.0, 0.0, 0.0, 0.0]).unwrap().on(&[0]).unwrap();
        assert!(build_distillation_circuit(DistillationKind::A, Some(&two)).is_ok());
        let id = crate::engine::GateKind::I.matrix();
        let mut kron = vec![num_complex::Complex64::new(0.0, 0.0); 16];
        for i in 0..4 {
            kron[i * 4 + i] = id[0];
        }
        let ch = NoiseChannel::new(vec![kron], vec![0, 1]).unwrap();
        assert!(matches!(
            build_distillation_circuit(DistillationKind::B, Some(&ch)),
            Err(Error::Arity {
                expected: 1,
                got: 2,
                ..
            })
        ));
    }

    #[test]
    fn sampled_probabilities() {
        let shots = 100_000;
        let sigma = (0.25_f64 / shots as f64).sqrt();
        let perfect = measure_success_probs(&BellDiagonal::phi_plus(), shots, 11).unwrap();
        for v in perfect.to_array() {
            assert!((v - 0.5).abs() < 5.0 * sigma, "{v}");
        }
        let mixed = measure_success_probs(&BellDiagonal::new([0.25; 4]).unwrap(), shots, 12).unwrap();
        let sigma = (0.1875_f64 / shots as f64).sqrt();
        for v in mixed.to_array() {
            assert!((v - 0.25).abs() < 5.0 * sigma, "{v}");
        }
        let again = measure_success_probs(&BellDiagonal::new([0.25; 4]).unwrap(), shots, 12).unwrap();
        assert_eq!(mixed, again);
    }
}
