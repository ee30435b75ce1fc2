use serde::{Deserialize, Serialize};

use super::channel::NoiseChannel;
use super::gate::Gate;
use super::MAX_QUBITS;
use crate::error::{Error, Result};

/// Measurement basis. Outcome `0` is the `+1` eigenstate; the post-measurement
/// qubit is left in the corresponding eigenstate of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Gate(Gate),
    Channel(NoiseChannel),
    Measure {
        qubit: usize,
        clbit: usize,
        basis: Basis,
    },
    /// Apply `gate` when classical bit `clbit` equals `when`.
    Conditional {
        gate: Gate,
        clbit: usize,
        when: bool,
    },
}

impl Op {
    pub fn qubits(&self) -> &[usize] {
        match self {
            Op::Gate(g) | Op::Conditional { gate: g, .. } => g.targets(),
            Op::Channel(ch) => ch.targets(),
            Op::Measure { qubit, .. } => std::slice::from_ref(qubit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ClbitState {
    Unwritten,
    Unread,
    Read,
}

/// An ordered list of operations on `n_qubits` qubits and `n_clbits`
/// classical bits. Index and read-after-write checks happen on insertion, so
/// every `Circuit` value is well formed.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_clbits: usize,
    ops: Vec<Op>,
    clbits: Vec<ClbitState>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::Size(n_qubits));
        }
        Ok(Self {
            n_qubits,
            n_clbits,
            ops: Vec::new(),
            clbits: vec![ClbitState::Unwritten; n_clbits],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Appends `count` fresh classical bits, returning the index of the first.
    pub fn add_clbits(&mut self, count: usize) -> usize {
        let first = self.n_clbits;
        self.n_clbits += count;
        self.clbits.resize(self.n_clbits, ClbitState::Unwritten);
        first
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            })
        }
    }

    fn check_clbit(&self, c: usize) -> Result<()> {
        if c < self.n_clbits {
            Ok(())
        } else {
            Err(Error::ClbitOutOfRange {
                index: c,
                n_clbits: self.n_clbits,
            })
        }
    }

    pub fn push(&mut self, op: Op) -> Result<&mut Self> {
        for &q in op.qubits() {
            self.check_qubit(q)?;
        }
        match &op {
            Op::Measure { clbit, .. } => {
                self.check_clbit(*clbit)?;
                if self.clbits[*clbit] == ClbitState::Unread {
                    return Err(Error::ClbitOverwritten(*clbit));
                }
                self.clbits[*clbit] = ClbitState::Unread;
            }
            Op::Conditional { clbit, .. } => {
                self.check_clbit(*clbit)?;
                if self.clbits[*clbit] == ClbitState::Unwritten {
                    return Err(Error::UnwrittenClbit(*clbit));
                }
                self.clbits[*clbit] = ClbitState::Read;
            }
            Op::Gate(_) | Op::Channel(_) => {}
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn gate(&mut self, gate: Gate) -> Result<&mut Self> {
        self.push(Op::Gate(gate))
    }

    pub fn channel(&mut self, channel: NoiseChannel) -> Result<&mut Self> {
        self.push(Op::Channel(channel))
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize, basis: Basis) -> Result<&mut Self> {
        self.push(Op::Measure { qubit, clbit, basis })
    }

    pub fn conditional(&mut self, gate: Gate, clbit: usize, when: bool) -> Result<&mut Self> {
        self.push(Op::Conditional { gate, clbit, when })
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(Gate::h(q))
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(Gate::x(q))
    }

    pub fn s(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(Gate::s(q))
    }

    pub fn sdg(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(Gate::sdg(q))
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(Gate::cnot(control, target)?)
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.gate(Gate::cz(a, b)?)
    }

    /// Appends every operation of `other`, which must fit in this register.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        for op in other.ops() {
            self.push(op.clone())?;
        }
        Ok(self)
    }
}
