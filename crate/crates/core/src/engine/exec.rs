//! Exact branch enumeration and shot sampling.
//!
//! The executor keeps only the qubits that are currently live: in
//! [`Start::Ground`] mode a qubit is allocated on first use, and any qubit not
//! requested in the output is traced out right after its last operation. Long
//! circuits with early measurements (cluster chains) therefore run on a few
//! qubits at a time even though the register is large.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use super::circuit::{Basis, Circuit, Op};
use super::counts::CountsTable;
use super::density::DensityMatrix;
use super::gate::GateKind;
use super::kernel;
use crate::error::{Error, Result};

/// Branches below this probability are discarded.
const PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub enum Start<'a> {
    /// `|0...0>`, allocated lazily.
    Ground,
    State(&'a DensityMatrix),
}

impl<'a> From<&'a DensityMatrix> for Start<'a> {
    fn from(rho: &'a DensityMatrix) -> Self {
        Start::State(rho)
    }
}

/// One measurement record: its probability and the normalized state after it.
#[derive(Debug, Clone)]
pub struct Branch {
    pub probability: f64,
    pub state: DensityMatrix,
}

struct Local {
    qubits: Vec<usize>,
    rho: Vec<Complex64>,
}

impl Local {
    fn empty() -> Self {
        Self {
            qubits: Vec::new(),
            rho: vec![Complex64::new(1.0, 0.0)],
        }
    }

    fn n(&self) -> usize {
        self.qubits.len()
    }

    fn ensure(&mut self, q: usize) -> usize {
        match self.qubits.iter().position(|&x| x == q) {
            Some(p) => p,
            None => {
                self.rho = kernel::append_ground(&self.rho, self.n());
                self.qubits.push(q);
                self.n() - 1
            }
        }
    }

    fn positions(&mut self, qs: &[usize]) -> Vec<usize> {
        qs.iter().map(|&q| self.ensure(q)).collect()
    }

    fn trace_out(&mut self, q: usize) {
        if let Some(p) = self.qubits.iter().position(|&x| x == q) {
            let keep: Vec<usize> = (0..self.n()).filter(|&i| i != p).collect();
            self.rho = kernel::reduce(&self.rho, self.n(), &keep);
            self.qubits.remove(p);
        }
    }

    fn weight(&self) -> f64 {
        kernel::trace(&self.rho, 1 << self.n()).re
    }

    fn conjugate(&mut self, positions: &[usize], u: &[Complex64]) {
        let n = self.n();
        kernel::conjugate(&mut self.rho, n, positions, u);
    }
}

struct Path {
    record: Vec<Option<bool>>,
    local: Local,
}

/// Gates mapping the measurement basis onto Z, and back.
fn basis_change(basis: Basis) -> (&'static [GateKind], &'static [GateKind]) {
    match basis {
        Basis::Z => (&[], &[]),
        Basis::X => (&[GateKind::H], &[GateKind::H]),
        Basis::Y => (&[GateKind::Sdg, GateKind::H], &[GateKind::H, GateKind::S]),
    }
}

fn check_keep(keep: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &q) in keep.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        if keep[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

fn execute(circuit: &Circuit, start: Start<'_>, keep: &[usize], forced: Option<&[bool]>) -> Result<Vec<Path>> {
    let n = circuit.n_qubits();
    check_keep(keep, n)?;
    if let Some(f) = forced {
        if f.len() != circuit.n_clbits() {
            return Err(Error::Counts(format!(
                "forced outcome has {} bits, circuit has {}",
                f.len(),
                circuit.n_clbits()
            )));
        }
    }

    let mut last_use: Vec<Option<usize>> = vec![None; n];
    for (i, op) in circuit.ops().iter().enumerate() {
        for &q in op.qubits() {
            last_use[q] = Some(i);
        }
    }

    let local = match start {
        Start::Ground => Local::empty(),
        Start::State(rho0) => {
            if rho0.n_qubits() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: rho0.n_qubits(),
                });
            }
            let mut local = Local {
                qubits: (0..n).collect(),
                rho: rho0.as_slice().to_vec(),
            };
            for q in 0..n {
                if last_use[q].is_none() && !keep.contains(&q) {
                    local.trace_out(q);
                }
            }
            local
        }
    };
    let mut paths = vec![Path {
        record: vec![None; circuit.n_clbits()],
        local,
    }];

    for (i, op) in circuit.ops().iter().enumerate() {
        match op {
            Op::Gate(g) => {
                let u = g.matrix();
                for p in &mut paths {
                    let pos = p.local.positions(g.targets());
                    p.local.conjugate(&pos, &u);
                }
            }
            Op::Channel(ch) => {
                for p in &mut paths {
                    let pos = p.local.positions(ch.targets());
                    p.local.rho = kernel::apply_kraus(&p.local.rho, p.local.n(), &pos, ch.kraus());
                }
            }
            Op::Conditional { gate, clbit, when } => {
                let u = gate.matrix();
                for p in &mut paths {
                    let bit = p.record[*clbit].ok_or(Error::UnwrittenClbit(*clbit))?;
                    if bit == *when {
                        let pos = p.local.positions(gate.targets());
                        p.local.conjugate(&pos, &u);
                    }
                }
            }
            Op::Measure { qubit, clbit, basis } => {
                let (into_z, back) = basis_change(*basis);
                let mut next = Vec::with_capacity(paths.len() * 2);
                for mut p in paths {
                    let pos = p.local.ensure(*qubit);
                    for g in into_z {
                        p.local.conjugate(&[pos], &g.matrix());
                    }
                    let outcomes: &[bool] = match forced {
                        Some(f) if f[*clbit] => &[true],
                        Some(_) => &[false],
                        None => &[false, true],
                    };
                    for &bit in outcomes {
                        let mut rho = p.local.rho.clone();
                        kernel::project(&mut rho, p.local.n(), pos, bit);
                        let mut branch = Local {
                            qubits: p.local.qubits.clone(),
                            rho,
                        };
                        if branch.weight() <= PRUNE {
                            continue;
                        }
                        for g in back {
                            branch.conjugate(&[pos], &g.matrix());
                        }
                        let mut record = p.record.clone();
                        record[*clbit] = Some(bit);
                        next.push(Path { record, local: branch });
                    }
                }
                paths = next;
            }
        }
        for &q in op.qubits() {
            if last_use[q] == Some(i) && !keep.contains(&q) {
                for p in &mut paths {
                    p.local.trace_out(q);
                }
            }
        }
    }

    for p in &mut paths {
        let pos = p.local.positions(keep);
        p.local.rho = kernel::reduce(&p.local.rho, p.local.n(), &pos);
        p.local.qubits = keep.to_vec();
    }
    Ok(paths)
}

fn key_of(record: &[Option<bool>]) -> String {
    record
        .iter()
        .map(|b| if b.unwrap_or(false) { '1' } else { '0' })
        .collect()
}

fn collect_branches(paths: Vec<Path>, keep_len: usize) -> Result<BTreeMap<String, Branch>> {
    let mut merged: BTreeMap<String, Local> = BTreeMap::new();
    for p in paths {
        match merged.entry(key_of(&p.record)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p.local);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                for (a, b) in e.get_mut().rho.iter_mut().zip(&p.local.rho) {
                    *a += b;
                }
            }
        }
    }
    merged
        .into_iter()
        .map(|(key, local)| {
            let w = local.weight();
            let data = local.rho.iter().map(|z| z / w).collect();
            let state = DensityMatrix::from_row_major(keep_len, data)?;
            Ok((key, Branch { probability: w, state }))
        })
        .collect()
}

/// Every measurement record with its probability and full post-measurement state.
/// Records of probability zero are omitted.
pub fn run_exact<'a>(circuit: &Circuit, start: impl Into<Start<'a>>) -> Result<BTreeMap<String, Branch>> {
    let all: Vec<usize> = (0..circuit.n_qubits()).collect();
    run_exact_reduced(circuit, start, &all)
}

/// Like [`run_exact`], but each branch state is reduced to `keep` (with
/// `keep[i]` as qubit `i`). Qubits outside `keep` are discarded as soon as
/// they are no longer used.
pub fn run_exact_reduced<'a>(
    circuit: &Circuit,
    start: impl Into<Start<'a>>,
    keep: &[usize],
) -> Result<BTreeMap<String, Branch>> {
    if keep.is_empty() {
        return Err(Error::Parameter(
            "keep at least one qubit, or use outcome_probabilities".into(),
        ));
    }
    let paths = execute(circuit, start.into(), keep, None)?;
    collect_branches(paths, keep.len())
}

/// The single branch selected by `outcome` (one character per classical bit).
/// `None` when that record has probability zero.
pub fn run_branch<'a>(
    circuit: &Circuit,
    start: impl Into<Start<'a>>,
    outcome: &str,
    keep: &[usize],
) -> Result<Option<Branch>> {
    let bits = outcome
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Counts(format!("bad outcome string {outcome:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if keep.is_empty() {
        return Err(Error::Parameter("keep at least one qubit".into()));
    }
    let paths = execute(circuit, start.into(), keep, Some(&bits))?;
    Ok(collect_branches(paths, keep.len())?.into_values().next())
}

/// Outcome distribution over all classical bits.
pub fn outcome_probabilities<'a>(circuit: &Circuit, start: impl Into<Start<'a>>) -> Result<BTreeMap<String, f64>> {
    let paths = execute(circuit, start.into(), &[], None)?;
    let mut probs = BTreeMap::new();
    for p in paths {
        *probs.entry(key_of(&p.record)).or_insert(0.0) += p.local.weight();
    }
    Ok(probs)
}

/// `shots` samples from the exact outcome distribution using a ChaCha8
/// stream seeded with `seed`.
pub fn sample_counts<'a>(circuit: &Circuit, start: impl Into<Start<'a>>, shots: u64, seed: u64) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let probs = outcome_probabilities(circuit, start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CountsTable::sample((0..circuit.n_clbits()).collect(), &probs, shots, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Gate, NoiseChannel};

    fn bell_measured() -> Circuit {
        let mut c = Circuit::new(2, 2).unwrap();
        c.h(0).unwrap().cnot(0, 1).unwrap();
        c.measure(0, 0, Basis::Z).unwrap().measure(1, 1, Basis::Z).unwrap();
        c
    }

    #[test]
    fn bell_pair_outcomes() {
        let out = run_exact(&bell_measured(), Start::Ground).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out["00"].probability - 0.5).abs() < 1e-15);
        assert!((out["11"].probability - 0.5).abs() < 1e-15);
        assert!((out["11"].state.get(3, 3).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_circuit_returns_input() {
        let rho = DensityMatrix::ground(2).unwrap().apply_gate(&Gate::h(1)).unwrap();
        let c = Circuit::new(2, 0).unwrap();
        let out = run_exact(&c, &rho).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[""].probability - 1.0).abs() < 1e-15);
        for (a, b) in out[""].state.as_slice().iter().zip(rho.as_slice()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn ground_and_explicit_start_agree() {
        let mut c = bell_measured();
        c.conditional(Gate::x(1), 0, true).unwrap();
        let rho0 = DensityMatrix::ground(2).unwrap();
        let a = run_exact(&c, Start::Ground).unwrap();
        let b = run_exact(&c, &rho0).unwrap();
        for (k, br) in &a {
            assert!((br.probability - b[k].probability).abs() < 1e-15);
            assert_eq!(br.state, b[k].state);
        }
        // Feed-forward X undoes the correlated flip on qubit 1.
        assert!((a["11"].state.get(1, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_basis_measurement_post_state() {
        let mut c = Circuit::new(1, 1).unwrap();
        c.h(0).unwrap().measure(0, 0, Basis::X).unwrap();
        let out = run_exact(&c, Start::Ground).unwrap();
        assert_eq!(out.len(), 1);
        let plus = &out["0"].state;
        assert!((plus.get(0, 1).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn y_basis_measurement() {
        // S H |0> = |+i>, the +1 eigenstate of Y.
        let mut c = Circuit::new(1, 1).unwrap();
        c.h(0).unwrap().s(0).unwrap().measure(0, 0, Basis::Y).unwrap();
        let out = outcome_probabilities(&c, Start::Ground).unwrap();
        assert!((out["0"] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn forced_branch_matches_enumeration() {
        let mut c = bell_measured();
        c.channel(NoiseChannel::depolarizing(0, 0.3).unwrap().on(&[1]).unwrap())
            .unwrap();
        let all = run_exact(&c, Start::Ground).unwrap();
        let one = run_branch(&c, Start::Ground, "11", &[0, 1]).unwrap().unwrap();
        assert!((one.probability - all["11"].probability).abs() < 1e-15);
        assert_eq!(one.state, all["11"].state);
        assert!(run_branch(&c, Start::Ground, "01", &[0]).unwrap().is_none());
        assert!(run_branch(&c, Start::Ground, "0", &[0]).is_err());
    }

    #[test]
    fn reduced_output_reorders_qubits() {
        let mut c = Circuit::new(3, 0).unwrap();
        c.x(2).unwrap();
        let out = run_exact_reduced(&c, Start::Ground, &[2, 0]).unwrap();
        let st = &out[""].state;
        assert_eq!(st.n_qubits(), 2);
        assert!((st.get(1, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_counts() {
        let mut c = Circuit::new(2, 2).unwrap();
        c.x(0).unwrap().x(1).unwrap();
        c.measure(0, 0, Basis::Z).unwrap().measure(1, 1, Basis::Z).unwrap();
        for seed in [0, 7, 12345] {
            let t = sample_counts(&c, Start::Ground, 500, seed).unwrap();
            assert_eq!(t.get("11"), 500);
            assert_eq!(t.counts().len(), 1);
        }
        assert_eq!(sample_counts(&c, Start::Ground, 0, 1).unwrap_err(), Error::ZeroShots);
    }

    #[test]
    fn same_seed_same_table() {
        let c = bell_measured();
        let a = sample_counts(&c, Start::Ground, 10_000, 42).unwrap();
        let b = sample_counts(&c, Start::Ground, 10_000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bell_sampling_statistics() {
        let n = 90_000u64;
        let t = sample_counts(&bell_measured(), Start::Ground, n, 2024).unwrap();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((t.get("00") as f64 - 45_000.0).abs() <= 5.0 * sigma);
        assert_eq!(t.get("00") + t.get("11"), n);
    }

    #[test]
    fn start_state_dimension_checked() {
        let rho = DensityMatrix::ground(3).unwrap();
        assert!(matches!(
            run_exact(&bell_measured(), &rho),
            Err(Error::Dimension { expected: 2, got: 3 })
        ));
        assert!(run_exact_reduced(&bell_measured(), Start::Ground, &[0, 0]).is_err());
    }
}
