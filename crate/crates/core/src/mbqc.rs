//! Bell pairs between the ends of a measured linear cluster state.
//!
//! Chain qubits are `0..n`. Every intermediate qubit `j` (`1 <= j <= n - 2`)
//! is measured in the X basis into classical bit `j - 1`, as early as the
//! chain construction allows. Feed-forward Paulis on the two ends then leave
//! `(q0, q_{n-1})` in `Phi+` on every branch. When the number of measured
//! qubits is even, the pair is first an H-rotated Bell state, so a final H on
//! `q0` is part of the pattern.

use std::collections::BTreeMap;

use crate::bell::BellDiagonal;
use crate::distill::{append_distillation_logic, DistillationKind};
use crate::engine::{
    outcome_probabilities, sample_counts, Basis, Circuit, CountsTable, Gate, GateKind, NoiseChannel, Start, MAX_QUBITS,
};
use crate::error::{Error, Result};

pub const MIN_CHAIN: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterChainSpec {
    n_qubits: usize,
    noise: Option<Vec<NoiseChannel>>,
}

impl ClusterChainSpec {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(MIN_CHAIN..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::Size(n_qubits));
        }
        Ok(Self { n_qubits, noise: None })
    }

    /// One single-qubit channel per chain qubit, in chain order.
    pub fn with_noise(n_qubits: usize, noise: Vec<NoiseChannel>) -> Result<Self> {
        let mut spec = Self::new(n_qubits)?;
        if noise.len() != n_qubits {
            return Err(Error::Parameter(format!(
                "{} noise channels for a {n_qubits}-qubit chain",
                noise.len()
            )));
        }
        if let Some(ch) = noise.iter().find(|ch| ch.targets().len() != 1) {
            return Err(Error::Arity {
                name: "chain noise",
                expected: 1,
                got: ch.targets().len(),
            });
        }
        spec.noise = Some(noise);
        Ok(spec)
    }

    /// Depolarizing strength falling linearly from `max_omega` on qubit 0 to
    /// zero on the last qubit.
    pub fn depolarizing_ramp(n_qubits: usize, max_omega: f64) -> Result<Self> {
        let last = n_qubits.saturating_sub(1).max(1) as f64;
        let noise = (0..n_qubits)
            .map(|j| NoiseChannel::depolarizing(j, max_omega * (last - j as f64) / last))
            .collect::<Result<Vec<_>>>()?;
        Self::with_noise(n_qubits, noise)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn noise(&self) -> Option<&[NoiseChannel]> {
        self.noise.as_deref()
    }

    /// Number of measured intermediate qubits.
    pub fn n_measured(&self) -> usize {
        self.n_qubits - 2
    }

    pub fn last(&self) -> usize {
        self.n_qubits - 1
    }
}

/// Endpoint Paulis for one branch, as gate kinds on `(q0, q_{n-1})` applied
/// before the final H (if any). `I` means no gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Correction {
    pub first: GateKind,
    pub last: GateKind,
}

fn end_kind(n_measured: usize) -> GateKind {
    if n_measured.is_multiple_of(2) {
        GateKind::Z
    } else {
        GateKind::X
    }
}

/// Correction for the outcomes of qubits `1..=n-2` (character `j-1` is qubit
/// `j`). Outcomes on even qubits flip `q0` with Z; outcomes on odd qubits flip
/// the far end with Z or X, depending on the chain parity.
pub fn correction_pattern(outcomes: &str, n_qubits: usize) -> Result<Correction> {
    if !(MIN_CHAIN..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::Size(n_qubits));
    }
    let n_measured = n_qubits - 2;
    if outcomes.len() != n_measured {
        return Err(Error::Counts(format!(
            "{} outcomes for {n_measured} measured qubits",
            outcomes.len()
        )));
    }
    let (mut even, mut odd) = (false, false);
    for (i, c) in outcomes.chars().enumerate() {
        let bit = match c {
            '0' => false,
            '1' => true,
            _ => return Err(Error::Counts(format!("bad outcome string {outcomes:?}"))),
        };
        if (i + 1) % 2 == 0 {
            even ^= bit;
        } else {
            odd ^= bit;
        }
    }
    Ok(Correction {
        first: if even { GateKind::Z } else { GateKind::I },
        last: if odd { end_kind(n_measured) } else { GateKind::I },
    })
}

fn noise_on(spec: &ClusterChainSpec, j: usize, offset: usize, c: &mut Circuit) -> Result<()> {
    if let Some(noise) = spec.noise() {
        c.channel(noise[j].on(&[j + offset])?)?;
    }
    Ok(())
}

/// Appends the chain to `c` on qubits `offset..offset + n`, using classical
/// bits from `first_clbit` on.
fn append_chain(c: &mut Circuit, spec: &ClusterChainSpec, offset: usize, first_clbit: usize) -> Result<()> {
    let n = spec.n_qubits();
    let q = |j: usize| j + offset;
    let clbit = |j: usize| first_clbit + j - 1;
    c.h(q(0))?;
    for j in 1..n {
        c.h(q(j))?.cz(q(j - 1), q(j))?;
        // Qubit j - 1 now has both its bonds.
        if j >= 2 {
            noise_on(spec, j - 1, offset, c)?;
            c.measure(q(j - 1), clbit(j - 1), Basis::X)?;
        }
    }
    let far = end_kind(spec.n_measured());
    for j in 1..=spec.n_measured() {
        if j % 2 == 0 {
            c.conditional(Gate::z(q(0)), clbit(j), true)?;
        } else {
            c.conditional(Gate::new(far, vec![q(n - 1)])?, clbit(j), true)?;
        }
    }
    if spec.n_measured().is_multiple_of(2) {
        c.h(q(0))?;
    }
    noise_on(spec, 0, offset, c)?;
    noise_on(spec, n - 1, offset, c)?;
    Ok(())
}

/// Chain circuit leaving `(q0, q_{n-1})` in `Phi+` when noiseless. Classical
/// bit `j - 1` holds the X outcome of qubit `j`.
pub fn build_mbqc_bell_circuit(spec: &ClusterChainSpec) -> Result<Circuit> {
    let mut c = Circuit::new(spec.n_qubits(), spec.n_measured())?;
    append_chain(&mut c, spec, 0, 0)?;
    Ok(c)
}

/// Chain pair on `(0, n-1)`, a directly prepared pair on `(n, n+1)` with
/// `short_pair_noise` on qubit `n`, and the `kind` check across them. The
/// check outcomes are classical bits `n-2` and `n-1`.
pub fn build_asymmetric_circuit(
    chain: &ClusterChainSpec,
    short_pair_noise: Option<&NoiseChannel>,
    kind: DistillationKind,
) -> Result<Circuit> {
    let n = chain.n_qubits();
    if n + 2 > MAX_QUBITS {
        return Err(Error::Size(n + 2));
    }
    let k = chain.n_measured();
    let mut c = Circuit::new(n + 2, k + 2)?;
    append_chain(&mut c, chain, 0, 0)?;
    c.h(n)?.cnot(n, n + 1)?;
    if let Some(ch) = short_pair_noise {
        if ch.targets().len() != 1 {
            return Err(Error::Arity {
                name: "short pair noise",
                expected: 1,
                got: ch.targets().len(),
            });
        }
        c.channel(ch.on(&[n])?)?;
    }
    append_distillation_logic(&mut c, kind, [0, n - 1, n, n + 1], [k, k + 1])?;
    Ok(c)
}

fn check_clbits(chain: &ClusterChainSpec) -> [usize; 2] {
    let k = chain.n_measured();
    [k, k + 1]
}

/// Exact distribution of the two check bits in the asymmetric scenario.
pub fn asymmetric_exact_outcomes(
    chain: &ClusterChainSpec,
    short_pair_noise: Option<&NoiseChannel>,
    kind: DistillationKind,
) -> Result<BTreeMap<String, f64>> {
    let c = build_asymmetric_circuit(chain, short_pair_noise, kind)?;
    let k = chain.n_measured();
    let mut out = BTreeMap::new();
    for (key, p) in outcome_probabilities(&c, Start::Ground)? {
        *out.entry(key[k..].to_string()).or_insert(0.0) += p;
    }
    Ok(out)
}

/// Sampled check-bit histogram for the asymmetric scenario.
pub fn asymmetric_distimation_scenario(
    chain: &ClusterChainSpec,
    short_pair_noise: Option<&NoiseChannel>,
    kind: DistillationKind,
    shots: u64,
    seed: u64,
) -> Result<CountsTable> {
    let c = build_asymmetric_circuit(chain, short_pair_noise, kind)?;
    sample_counts(&c, Start::Ground, shots, seed)?.marginalize(&check_clbits(chain))
}

/// Pauli-twirled description of the chain pair, the Bell-basis diagonal of
/// the branch-averaged endpoint state.
pub fn chain_pair_bell_diagonal(chain: &ClusterChainSpec) -> Result<BellDiagonal> {
    let c = build_mbqc_bell_circuit(chain)?;
    let rho = crate::tomography::prepared_state(&c, [0, chain.last()])?;
    let pops = crate::bell::bell_populations(&rho)?;
    crate::estimator::physical_projection(pops)
}
