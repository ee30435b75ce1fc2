use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    I,
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    Cnot,
    Cz,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::I,
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Swap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
        }
    }

    /// Row-major unitary. For two-qubit gates the first target (the control
    /// for CNOT) is the least significant bit of the matrix index.
    pub fn matrix(self) -> Vec<Complex64> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let h = c(FRAC_1_SQRT_2, 0.0);
        match self {
            GateKind::I => vec![l, o, o, l],
            GateKind::H => vec![h, h, h, -h],
            GateKind::X => vec![o, l, l, o],
            GateKind::Y => vec![o, c(0.0, -1.0), c(0.0, 1.0), o],
            GateKind::Z => vec![l, o, o, -l],
            GateKind::S => vec![l, o, o, c(0.0, 1.0)],
            GateKind::Sdg => vec![l, o, o, c(0.0, -1.0)],
            #[rustfmt::skip]
            GateKind::Cnot => vec![
                l, o, o, o,
                o, o, o, l,
                o, o, l, o,
                o, l, o, o,
            ],
            #[rustfmt::skip]
            GateKind::Cz => vec![
                l, o, o, o,
                o, l, o, o,
                o, o, l, o,
                o, o, o, -l,
            ],
            #[rustfmt::skip]
            GateKind::Swap => vec![
                l, o, o, o,
                o, o, l, o,
                o, l, o, o,
                o, o, o, l,
            ],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate bound to register positions (control first for two-qubit gates).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::Arity {
                name: kind.name(),
                expected: kind.arity(),
                got: targets.len(),
            });
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateQubit(targets[0]));
        }
        Ok(Self { kind, targets })
    }

    fn single(kind: GateKind, q: usize) -> Self {
        Self { kind, targets: vec![q] }
    }

    pub fn i(q: usize) -> Self {
        Self::single(GateKind::I, q)
    }
    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::single(GateKind::Sdg, q)
    }
    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::new(GateKind::Cnot, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Result<Self> {
        Self::new(GateKind::Cz, vec![a, b])
    }
    pub fn swap(a: usize, b: usize) -> Result<Self> {
        Self::new(GateKind::Swap, vec![a, b])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> Vec<Complex64> {
        self.kind.matrix()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_unitarity_error(u: &[Complex64]) -> f64 {
        let m = (u.len() as f64).sqrt() as usize;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let v: Complex64 = (0..m).map(|k| u[k * m + i].conj() * u[k * m + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - expect).norm());
            }
        }
        worst
    }

    #[test]
    fn every_gate_is_unitary() {
        for kind in GateKind::ALL {
            let u = kind.matrix();
            assert_eq!(u.len(), 1 << (2 * kind.arity()), "{kind}");
            assert!(max_unitarity_error(&u) <= 1e-12, "{kind}");
        }
    }

    #[test]
    fn arity_is_checked() {
        assert!(matches!(
            Gate::new(GateKind::Cnot, vec![0]),
            Err(Error::Arity {
                expected: 2,
                got: 1,
                ..
            })
        ));
        assert!(Gate::new(GateKind::H, vec![0, 1]).is_err());
        assert_eq!(Gate::cnot(1, 1), Err(Error::DuplicateQubit(1)));
    }
}
