use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Shot histogram keyed by bitstrings. Character `i` of every key holds
/// classical bit `bit_order[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    bit_order: Vec<usize>,
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl CountsTable {
    pub fn new(bit_order: Vec<usize>, counts: BTreeMap<String, u64>) -> Result<Self> {
        for key in counts.keys() {
            if key.len() != bit_order.len() || !key.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Counts(format!(
                    "key {key:?} is not a {}-bit string",
                    bit_order.len()
                )));
            }
        }
        let total = counts.values().sum();
        Ok(Self {
            bit_order,
            counts,
            total,
        })
    }

    /// Multinomial draw of `shots` outcomes from `(key, probability)` pairs.
    pub fn sample<R: Rng + ?Sized>(
        bit_order: Vec<usize>,
        probabilities: &BTreeMap<String, f64>,
        shots: u64,
        rng: &mut R,
    ) -> Result<Self> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let keys: Vec<&String> = probabilities.keys().collect();
        let probs: Vec<f64> = probabilities.values().copied().collect();
        let draws = multinomial(&probs, shots, rng)?;
        let counts = keys
            .into_iter()
            .zip(draws)
            .filter(|(_, n)| *n > 0)
            .map(|(k, n)| (k.clone(), n))
            .collect();
        Self::new(bit_order, counts)
    }

    pub fn bit_order(&self) -> &[usize] {
        &self.bit_order
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, key: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.get(key) as f64 / self.total as f64
        }
    }

    /// Histogram over a subset of the classical bits, in the given order.
    pub fn marginalize(&self, clbits: &[usize]) -> Result<Self> {
        let positions = clbits
            .iter()
            .map(|c| {
                self.bit_order
                    .iter()
                    .position(|b| b == c)
                    .ok_or_else(|| Error::Counts(format!("classical bit {c} not in table")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut counts = BTreeMap::new();
        for (key, n) in &self.counts {
            let bytes = key.as_bytes();
            let sub: String = positions.iter().map(|&p| bytes[p] as char).collect();
            *counts.entry(sub).or_insert(0) += n;
        }
        Self::new(clbits.to_vec(), counts)
    }
}

/// Sequential conditional-binomial multinomial sampler. Deterministic for a
/// given RNG state and probability order.
pub fn multinomial<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    if probs.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(Error::Probability(format!("{probs:?}")));
    }
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    let mut out = Vec::with_capacity(probs.len());
    for (i, p) in probs.iter().enumerate() {
        let p = p.max(0.0);
        let n = if i + 1 == probs.len() {
            remaining
        } else if remaining == 0 || p == 0.0 {
            0
        } else {
            let ratio = (p / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, ratio)
                .map_err(|e| Error::Probability(e.to_string()))?
                .sample(rng)
        };
        remaining -= n;
        mass -= p;
        out.push(n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn keys_are_checked() {
        let mut bad = BTreeMap::new();
        bad.insert("012".to_string(), 3);
        assert!(CountsTable::new(vec![0, 1, 2], bad).is_err());
        let mut short = BTreeMap::new();
        short.insert("0".to_string(), 3);
        assert!(CountsTable::new(vec![0, 1], short).is_err());
    }

    #[test]
    fn marginal_sums_counts() {
        let counts = [("00", 5), ("01", 2), ("11", 3)]
            .into_iter()
            .map(|(k, n)| (k.to_string(), n))
            .collect();
        let table = CountsTable::new(vec![4, 7], counts).unwrap();
        assert_eq!(table.total(), 10);
        let m = table.marginalize(&[7]).unwrap();
        assert_eq!(m.get("0"), 5);
        assert_eq!(m.get("1"), 5);
        assert_eq!(m.bit_order(), &[7]);
        assert!(table.marginalize(&[3]).is_err());
    }

    #[test]
    fn multinomial_conserves_shots() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = multinomial(&[0.2, 0.0, 0.5, 0.3], 1000, &mut rng).unwrap();
        assert_eq!(draws.iter().sum::<u64>(), 1000);
        assert_eq!(draws[1], 0);
    }

    #[test]
    fn zero_shots_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let probs = [("0".to_string(), 1.0)].into_iter().collect();
        assert_eq!(
            CountsTable::sample(vec![0], &probs, 0, &mut rng).unwrap_err(),
            Error::ZeroShots
        );
    }
}
