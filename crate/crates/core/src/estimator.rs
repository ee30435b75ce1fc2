//! Inversion of distillation success rates into state parameters.

use serde::{Deserialize, Serialize};

use crate::bell::{BellDiagonal, WernerParam};
use crate::distill::{DistillationKind, SuccessProbs};
use crate::engine::CountsTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerEstimate {
    pub omega_hat: f64,
    /// Set when `p` fell outside `[0.25, 0.5]` and the result was clamped.
    pub clamped: bool,
}

impl WernerEstimate {
    pub fn param(&self) -> WernerParam {
        WernerParam::new(self.omega_hat).expect("estimate is clamped to [0, 1]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalEstimate {
    pub q_hat_raw: [f64; 4],
    pub q_hat_physical: BellDiagonal,
    pub x_hat: [f64; 3],
    pub clamped: bool,
}

/// Everything derived from one set of A, B, C histograms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountsEstimate {
    pub p_hat: SuccessProbs,
    /// Binomial standard error `sqrt(p (1 - p) / N)` per circuit.
    pub std_err: [f64; 3],
    pub werner: [WernerEstimate; 3],
    pub bell: BellDiagonalEstimate,
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Probability(format!("success probability {p} not in [0, 1]")))
    }
}

/// `sqrt(4p - 1)` with the radicand's root clamped to `[0, 1]`.
fn root(p: f64) -> (f64, bool) {
    let r = 4.0 * p - 1.0;
    if r < 0.0 {
        (0.0, true)
    } else if r > 1.0 {
        (1.0, true)
    } else {
        (r.sqrt(), false)
    }
}

/// `w = 1 - sqrt(4p - 1)`.
pub fn estimate_werner(p_hat: f64) -> Result<WernerEstimate> {
    check_probability(p_hat)?;
    let (s, clamped) = root(p_hat);
    Ok(WernerEstimate {
        omega_hat: 1.0 - s,
        clamped,
    })
}

/// `x = (1 + sqrt(4p - 1)) / 2` per circuit, then
/// `q1 = (-1 + xa + xb + xc)/2`, `q2 = (1 + xa - xb - xc)/2`,
/// `q3 = (1 - xa + xb - xc)/2`, `q4 = (1 - xa - xb + xc)/2`.
pub fn estimate_bell_diagonal(p: &SuccessProbs) -> Result<BellDiagonalEstimate> {
    let mut x_hat = [0.0; 3];
    let mut clamped = false;
    for (x, p) in x_hat.iter_mut().zip(p.to_array()) {
        check_probability(p)?;
        let (s, c) = root(p);
        *x = 0.5 * (1.0 + s);
        clamped |= c;
    }
    let [xa, xb, xc] = x_hat;
    let q_hat_raw = [
        0.5 * (-1.0 + xa + xb + xc),
        0.5 * (1.0 + xa - xb - xc),
        0.5 * (1.0 - xa + xb - xc),
        0.5 * (1.0 - xa - xb + xc),
    ];
    Ok(BellDiagonalEstimate {
        q_hat_raw,
        q_hat_physical: physical_projection(q_hat_raw)?,
        x_hat,
        clamped,
    })
}

/// Clips negative weights to zero and renormalizes.
pub fn physical_projection(q: [f64; 4]) -> Result<BellDiagonal> {
    let clipped = q.map(|v| v.max(0.0));
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Probability(format!("cannot normalize {q:?}")));
    }
    BellDiagonal::new(clipped.map(|v| v / total))
}

fn success_frequency(table: &CountsTable) -> Result<f64> {
    if table.bit_order().len() != 2 {
        return Err(Error::Counts(format!(
            "distillation tables need 2-bit keys, got {}",
            table.bit_order().len()
        )));
    }
    if table.total() == 0 {
        return Err(Error::ZeroShots);
    }
    Ok(table.frequency("00"))
}

/// Estimates from the A, B and C histograms, in that order.
pub fn estimate_from_counts(tables: &[CountsTable; 3]) -> Result<CountsEstimate> {
    let mut p = [0.0; 3];
    let mut std_err = [0.0; 3];
    for (i, table) in tables.iter().enumerate() {
        p[i] = success_frequency(table)?;
        std_err[i] = (p[i] * (1.0 - p[i]) / table.total() as f64).sqrt();
    }
    let p_hat = SuccessProbs::new(p[0], p[1], p[2])?;
    let werner = [
        estimate_werner(p_hat.get(DistillationKind::A))?,
        estimate_werner(p_hat.get(DistillationKind::B))?,
        estimate_werner(p_hat.get(DistillationKind::C))?,
    ];
    Ok(CountsEstimate {
        p_hat,
        std_err,
        werner,
        bell: estimate_bell_diagonal(&p_hat)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn table(c00: u64, c11: u64, c10: u64, c01: u64) -> CountsTable {
        let counts: BTreeMap<String, u64> = [("00", c00), ("11", c11), ("10", c10), ("01", c01)]
            .into_iter()
            .map(|(k, n)| (k.to_string(), n))
            .collect();
        CountsTable::new(vec![0, 1], counts).unwrap()
    }

    #[test]
    fn werner_examples() {
        let e = estimate_werner(0.5).unwrap();
        assert!(e.omega_hat.abs() < 1e-15 && !e.clamped);
        let e = estimate_werner(0.25).unwrap();
        assert!((e.omega_hat - 1.0).abs() < 1e-15 && !e.clamped);
        // 1 - sqrt(4 * 23000/90000 - 1)
        let e = estimate_werner(23000.0 / 90000.0).unwrap();
        assert!((e.omega_hat - 0.850_928_801_500).abs() < 1e-11);
    }

    #[test]
    fn werner_clamping() {
        let low = estimate_werner(0.2).unwrap();
        assert_eq!(low.omega_hat, 1.0);
        assert!(low.clamped);
        let high = estimate_werner(1.0).unwrap();
        assert_eq!(high.omega_hat, 0.0);
        assert!(high.clamped);
        assert!(estimate_werner(1.5).is_err());
        assert!(estimate_werner(-0.1).is_err());
    }

    #[test]
    fn bell_diagonal_examples() {
        let e = estimate_bell_diagonal(&SuccessProbs::new(0.5, 0.5, 0.5).unwrap()).unwrap();
        assert_eq!(e.x_hat, [1.0; 3]);
        assert_eq!(e.q_hat_raw, [1.0, 0.0, 0.0, 0.0]);
        let e = estimate_bell_diagonal(&SuccessProbs::new(0.34, 0.3725, 0.3125).unwrap()).unwrap();
        for (a, b) in e.q_hat_raw.iter().zip([0.7, 0.1, 0.15, 0.05]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!e.clamped);
    }

    #[test]
    fn negative_weights_are_projected() {
        // xa = xb = 1, xc = 0.5 gives q4 = -0.25.
        let e = estimate_bell_diagonal(&SuccessProbs::new(0.5, 0.5, 0.25).unwrap()).unwrap();
        let expect_raw = [0.75, 0.25, 0.25, -0.25];
        for (a, b) in e.q_hat_raw.iter().zip(expect_raw) {
            assert!((a - b).abs() < 1e-12);
        }
        let q = e.q_hat_physical.q();
        for (a, b) in q.iter().zip([0.6, 0.2, 0.2, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_counts_clamp() {
        let t = table(100, 0, 0, 0);
        let e = estimate_from_counts(&[t.clone(), t.clone(), t]).unwrap();
        assert_eq!(e.p_hat.p_a, 1.0);
        assert!(e.werner.iter().all(|w| w.omega_hat == 0.0 && w.clamped));
        assert_eq!(e.std_err, [0.0; 3]);
    }

    #[test]
    fn malformed_tables() {
        let empty = CountsTable::new(vec![0, 1], BTreeMap::new()).unwrap();
        let good = table(1, 1, 1, 1);
        assert_eq!(
            estimate_from_counts(&[empty, good.clone(), good.clone()]).unwrap_err(),
            Error::ZeroShots
        );
        let wide = CountsTable::new(vec![0, 1, 2], BTreeMap::new()).unwrap();
        assert!(estimate_from_counts(&[good.clone(), wide, good]).is_err());
    }

    #[test]
    fn device_table_replays() {
        // Reference values evaluated independently in double precision.
        let first = [
            table(23000, 21984, 22285, 22731),
            table(22782, 22043, 22608, 22567),
            table(23049, 22117, 22472, 22362),
        ];
        let e = estimate_from_counts(&first).unwrap();
        let p = [0.255_555_555_556, 0.253_133_333_333, 0.256_100_000_000];
        for (a, b) in e.p_hat.to_array().iter().zip(p) {
            assert!((a - b).abs() < 1e-11);
        }
        let q = [
            0.354_307_140_711,
            0.220_228_458_539,
            0.201_669_044_702,
            0.223_795_356_048,
        ];
        for (a, b) in e.bell.q_hat_raw.iter().zip(q) {
            assert!((a - b).abs() < 1e-11);
        }
        let w = [0.850_928_801_500, 0.888_047_629_175, 0.843_795_006_482];
        for (a, b) in e.werner.iter().zip(w) {
            assert!((a.omega_hat - b).abs() < 1e-11);
        }

        let third = [
            table(28699, 25767, 15873, 19661),
            table(28402, 26201, 16359, 19038),
            table(28604, 26244, 16231, 18921),
        ];
        let e = estimate_from_counts(&third).unwrap();
        let p = [0.318_877_777_778, 0.315_577_777_778, 0.317_822_222_222];
        for (a, b) in e.p_hat.to_array().iter().zip(p) {
            assert!((a - b).abs() < 1e-11);
        }
        let q = [
            0.639_477_172_805,
            0.122_968_588_788,
            0.116_604_411_417,
            0.120_949_826_990,
        ];
        for (a, b) in e.bell.q_hat_raw.iter().zip(q) {
            assert!((a - b).abs() < 1e-11);
        }
    }
}
