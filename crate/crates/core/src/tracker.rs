//! Grid-posterior tracking of drifting single-qubit Pauli error rates from
//! distillation success counts.
//!
//! Noise acts on one qubit of each pair, so rates `(px, py, pz)` give the
//! Bell-diagonal state `(1 - px - py - pz, pz, px, py)`. A step succeeds when
//! both check bits agree (`"00"` or `"11"`).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::bell::BellDiagonal;
use crate::distill::{both_match_prob, build_distillation_circuit, DistillationKind};
use crate::engine::{sample_counts, NoiseChannel, Start};
use crate::error::{Error, Result};
use crate::seed;

/// Stand-in for `ln 0` in likelihoods.
pub const LOG_ZERO: f64 = -1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliRates {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliRates {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let r = Self { p_x, p_y, p_z };
        let a = r.to_array();
        if a.iter().any(|p| !p.is_finite() || *p < 0.0) || a.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::Probability(format!("invalid Pauli rates {a:?}")));
        }
        Ok(r)
    }

    pub fn from_array(a: [f64; 3]) -> Result<Self> {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.p_x, self.p_y, self.p_z]
    }

    pub fn to_bell_diagonal(&self) -> Result<BellDiagonal> {
        let p_i = (1.0 - self.p_x - self.p_y - self.p_z).max(0.0);
        BellDiagonal::new([p_i, self.p_z, self.p_x, self.p_y])
    }

    pub fn channel(&self, qubit: usize) -> Result<NoiseChannel> {
        let p_i = (1.0 - self.p_x - self.p_y - self.p_z).max(0.0);
        NoiseChannel::pauli(qubit, [p_i, self.p_x, self.p_y, self.p_z])
    }
}

/// Both-match probability per kind, straight from the rates.
fn success_triple(r: [f64; 3]) -> [f64; 3] {
    let [px, py, pz] = r;
    [1.0 - px - py, 1.0 - py - pz, 1.0 - px - pz].map(|x| x * x + (1.0 - x) * (1.0 - x))
}

/// `x^2 + (1 - x)^2` for the kind's `x`.
pub fn predicted_success(kind: DistillationKind, rates: &PauliRates) -> Result<f64> {
    Ok(both_match_prob(kind, &rates.to_bell_diagonal()?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    steps: Vec<PauliRates>,
}

impl Trajectory {
    pub fn new(steps: Vec<PauliRates>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[PauliRates] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Per-axis time average.
    pub fn mean(&self) -> [f64; 3] {
        let mut m = [0.0; 3];
        for r in &self.steps {
            for (a, v) in m.iter_mut().zip(r.to_array()) {
                *a += v;
            }
        }
        m.map(|v| v / self.steps.len().max(1) as f64)
    }
}

/// Sinusoidal drift parameters, one entry per axis `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub base: [f64; 3],
    pub amplitude: [f64; 3],
    pub period: [f64; 3],
    pub phase: [f64; 3],
}

impl Default for Drift {
    fn default() -> Self {
        Self {
            base: [0.05, 0.05, 0.05],
            amplitude: [0.02, 0.02, 0.02],
            period: [25.0, 25.0, 25.0],
            phase: [0.0, TAU / 3.0, 2.0 * TAU / 3.0],
        }
    }
}

/// `p_i(t) = base_i + amplitude_i sin(2 pi t / period_i + phase_i)`, clipped
/// at zero, for `t = 0..steps`.
pub fn make_trajectory(steps: usize, drift: &Drift) -> Result<Trajectory> {
    if drift.period.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::Parameter(format!(
            "periods must be positive: {:?}",
            drift.period
        )));
    }
    let rates = (0..steps)
        .map(|t| {
            let mut r = [0.0; 3];
            for i in 0..3 {
                let angle = TAU * t as f64 / drift.period[i] + drift.phase[i];
                r[i] = (drift.base[i] + drift.amplitude[i] * angle.sin()).max(0.0);
            }
            PauliRates::from_array(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(rates))
}

/// Successes and trials for one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub k: u64,
    pub n: u64,
}

fn log_likelihood_triple(counts: &[Outcome; 3], p: [f64; 3]) -> f64 {
    let mut total = 0.0;
    for (c, p) in counts.iter().zip(p) {
        let (hits, misses) = (c.k as f64, (c.n - c.k) as f64);
        if hits > 0.0 {
            if p <= 0.0 {
                return LOG_ZERO;
            }
            total += hits * p.ln();
        }
        if misses > 0.0 {
            if p >= 1.0 {
                return LOG_ZERO;
            }
            total += misses * (1.0 - p).ln();
        }
    }
    total
}

fn check_counts(counts: &[Outcome; 3]) -> Result<()> {
    match counts.iter().find(|c| c.k > c.n) {
        Some(c) => Err(Error::Counts(format!("{} successes out of {} trials", c.k, c.n))),
        None => Ok(()),
    }
}

/// `sum_i k_i ln p_i + (N_i - k_i) ln(1 - p_i)` over kinds A, B, C, without
/// the binomial coefficients. Impossible data gives [`LOG_ZERO`].
pub fn log_likelihood(counts: &[Outcome; 3], rates: &PauliRates) -> Result<f64> {
    check_counts(counts)?;
    let mut p = [0.0; 3];
    for (slot, kind) in p.iter_mut().zip(DistillationKind::ALL) {
        *slot = predicted_success(kind, rates)?;
    }
    Ok(log_likelihood_triple(counts, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 25,
            lo: 0.0,
            hi: 0.25,
        }
    }
}

impl GridSpec {
    pub fn axis(&self) -> Result<Vec<f64>> {
        if self.points < 2 || !(self.lo >= 0.0 && self.hi > self.lo && self.hi <= 1.0) {
            return Err(Error::Parameter(format!("bad grid {self:?}")));
        }
        let step = self.spacing();
        Ok((0..self.points).map(|i| self.lo + step * i as f64).collect())
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }
}

/// Normalized log-mass over an `x`-major product grid. Cells with
/// `px + py + pz > 1` hold `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    axes: [Vec<f64>; 3],
    log_mass: Vec<f64>,
}

impl PosteriorGrid {
    pub fn uniform(spec: &GridSpec) -> Result<Self> {
        let axis = spec.axis()?;
        let axes = [axis.clone(), axis.clone(), axis];
        let mut g = Self {
            log_mass: vec![0.0; axes[0].len() * axes[1].len() * axes[2].len()],
            axes,
        };
        for i in 0..g.log_mass.len() {
            if g.rates_at(i).iter().sum::<f64>() > 1.0 {
                g.log_mass[i] = f64::NEG_INFINITY;
            }
        }
        g.normalize()?;
        Ok(g)
    }

    pub fn axes(&self) -> &[Vec<f64>; 3] {
        &self.axes
    }

    pub fn log_mass(&self) -> &[f64] {
        &self.log_mass
    }

    pub fn len(&self) -> usize {
        self.log_mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_mass.is_empty()
    }

    /// `(ix, iy, iz)` of flat cell `i`.
    pub fn index(&self, i: usize) -> [usize; 3] {
        let ny = self.axes[1].len();
        let nz = self.axes[2].len();
        [i / (ny * nz), i / nz % ny, i % nz]
    }

    fn rates_at(&self, i: usize) -> [f64; 3] {
        let [a, b, c] = self.index(i);
        [self.axes[0][a], self.axes[1][b], self.axes[2][c]]
    }

    pub fn rates(&self, i: usize) -> PauliRates {
        PauliRates::from_array(self.rates_at(i)).expect("grid cells with mass are valid rates")
    }

    pub fn masses(&self) -> Vec<f64> {
        self.log_mass.iter().map(|v| v.exp()).collect()
    }

    /// Delta mass on cell `i`.
    pub fn delta(spec: &GridSpec, i: usize) -> Result<Self> {
        let mut g = Self::uniform(spec)?;
        if i >= g.len() || g.log_mass[i] == f64::NEG_INFINITY {
            return Err(Error::Parameter(format!("cell {i} cannot hold mass")));
        }
        g.log_mass.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
        g.log_mass[i] = 0.0;
        Ok(g)
    }

    fn normalize(&mut self) -> Result<()> {
        let max = self.log_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max > LOG_ZERO / 2.0) {
            return Err(Error::DegeneratePosterior);
        }
        let log_z = max + self.log_mass.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        for v in &mut self.log_mass {
            *v -= log_z;
        }
        Ok(())
    }
}

/// `log_mass' = alpha * log_mass + log L`, renormalized. `alpha = 1` is the
/// plain Bayes recursion; smaller values flatten the prior so the posterior
/// can follow drift.
pub fn bayes_update(prior: &PosteriorGrid, counts: &[Outcome; 3], alpha: f64) -> Result<PosteriorGrid> {
    check_counts(counts)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("flattening exponent {alpha} not in [0, 1]")));
    }
    let mut post = prior.clone();
    for i in 0..post.len() {
        let prev = post.log_mass[i];
        if prev == f64::NEG_INFINITY {
            continue;
        }
        post.log_mass[i] = alpha * prev + log_likelihood_triple(counts, success_triple(post.rates_at(i)));
    }
    post.normalize()?;
    Ok(post)
}

/// Cell of largest mass; the first such cell in index order on ties.
pub fn map_estimate(g: &PosteriorGrid) -> Result<PauliRates> {
    let mut best = None;
    for (i, &v) in g.log_mass.iter().enumerate() {
        if v > LOG_ZERO / 2.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| g.rates(i)).ok_or(Error::DegeneratePosterior)
}

pub fn posterior_mean(g: &PosteriorGrid) -> Result<PauliRates> {
    let mut m = [0.0; 3];
    let mut total = 0.0;
    for (i, w) in g.masses().into_iter().enumerate() {
        if w > 0.0 {
            for (a, v) in m.iter_mut().zip(g.rates_at(i)) {
                *a += w * v;
            }
            total += w;
        }
    }
    if !(total > 0.0) {
        return Err(Error::DegeneratePosterior);
    }
    PauliRates::from_array(m.map(|v| v / total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Success counts drawn from the closed-form success probability.
    Binomial,
    /// Success counts from sampling the noisy distillation circuits.
    Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointEstimate {
    Map,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub shots: u64,
    pub grid: GridSpec,
    pub alpha: f64,
    pub mode: SamplingMode,
    pub estimate: PointEstimate,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            shots: 1000,
            grid: GridSpec::default(),
            alpha: 1.0,
            mode: SamplingMode::Binomial,
            estimate: PointEstimate::Map,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub truth: PauliRates,
    pub estimate: PauliRates,
    pub counts: [Outcome; 3],
    /// The update at this step was degenerate and the prior was reset.
    pub reset: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub steps: Vec<StepRecord>,
    pub rmse: [f64; 3],
    /// RMSE of the constant per-axis time average of the truth.
    pub static_rmse: [f64; 3],
}

fn rmse(pairs: impl Iterator<Item = ([f64; 3], [f64; 3])>) -> [f64; 3] {
    let mut sum = [0.0; 3];
    let mut n = 0usize;
    for (est, truth) in pairs {
        for i in 0..3 {
            sum[i] += (est[i] - truth[i]).powi(2);
        }
        n += 1;
    }
    sum.map(|s| (s / n.max(1) as f64).sqrt())
}

fn synthesize(
    rates: &PauliRates,
    cfg: &EpisodeConfig,
    t: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<[Outcome; 3]> {
    let mut out = [Outcome { k: 0, n: cfg.shots }; 3];
    for (i, kind) in DistillationKind::ALL.into_iter().enumerate() {
        out[i].k = match cfg.mode {
            SamplingMode::Binomial => {
                let p = predicted_success(kind, rates)?.clamp(0.0, 1.0);
                Binomial::new(cfg.shots, p)
                    .map_err(|e| Error::Probability(e.to_string()))?
                    .sample(rng)
            }
            SamplingMode::Circuit => {
                let circuit = build_distillation_circuit(kind, Some(&rates.channel(0)?))?;
                let stream = (t * 3 + i) as u64;
                let counts = sample_counts(&circuit, Start::Ground, cfg.shots, seed::derive(seed, stream))?;
                counts.get("00") + counts.get("11")
            }
        };
    }
    Ok(out)
}

/// Runs the filter along `traj` from a uniform prior.
pub fn run_tracking_episode(traj: &Trajectory, cfg: &EpisodeConfig, seed: u64) -> Result<Episode> {
    if cfg.shots == 0 {
        return Err(Error::ZeroShots);
    }
    if traj.is_empty() {
        return Err(Error::Parameter("empty trajectory".into()));
    }
    let uniform = PosteriorGrid::uniform(&cfg.grid)?;
    let mut posterior = uniform.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(traj.len());
    for (t, truth) in traj.steps().iter().enumerate() {
        let counts = synthesize(truth, cfg, t, seed, &mut rng)?;
        let (next, reset) = match bayes_update(&posterior, &counts, cfg.alpha) {
            Ok(g) => (g, false),
            Err(Error::DegeneratePosterior) => (
                bayes_update(&uniform, &counts, cfg.alpha).unwrap_or_else(|_| uniform.clone()),
                true,
            ),
            Err(e) => return Err(e),
        };
        posterior = next;
        let estimate = match cfg.estimate {
            PointEstimate::Map => map_estimate(&posterior)?,
            PointEstimate::Mean => posterior_mean(&posterior)?,
        };
        steps.push(StepRecord {
            t,
            truth: *truth,
            estimate,
            counts,
            reset,
        });
    }
    let mean = traj.mean();
    Ok(Episode {
        rmse: rmse(steps.iter().map(|s| (s.estimate.to_array(), s.truth.to_array()))),
        static_rmse: rmse(steps.iter().map(|s| (mean, s.truth.to_array()))),
        steps,
    })
}
