//! Experiment configuration: a TOML file merged with command-line overrides.
//!
//! ```toml
//! kind = "bd-sweep"
//! shots = 90000
//! seed = 7
//! out = "results/bd"
//!
//! [sweep]
//! q1-min = 0.5
//! q1-max = 1.0
//! step = 0.05
//!
//! [noise]
//! kind = "amplitude-damping"
//! gamma = 0.3
//! ```

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use distimation::bell::BellDiagonal;
use distimation::engine::NoiseChannel;
use distimation::tracker::{Drift, EpisodeConfig, GridSpec, PointEstimate, SamplingMode};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    WernerSweep,
    BdSweep,
    Replay,
    QstCompare,
    MbqcSweep,
    Track,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::WernerSweep => "werner-sweep",
            Self::BdSweep => "bd-sweep",
            Self::Replay => "replay",
            Self::QstCompare => "qst-compare",
            Self::MbqcSweep => "mbqc-sweep",
            Self::Track => "track",
        }
    }

    fn default_shots(self) -> u64 {
        match self {
            Self::WernerSweep => 270_000,
            Self::Track => 1000,
            _ => 90_000,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Noise applied to one qubit of every Bell pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseSpec {
    None,
    Pauli { px: f64, py: f64, pz: f64 },
    BellDiagonal { q: [f64; 4] },
    Depolarizing { omega: f64 },
    AmplitudeDamping { gamma: f64 },
}

impl NoiseSpec {
    pub fn channel(&self) -> Result<Option<NoiseChannel>> {
        let ch = match *self {
            NoiseSpec::None => return Ok(None),
            NoiseSpec::Pauli { px, py, pz } => NoiseChannel::pauli(0, [1.0 - px - py - pz, px, py, pz]),
            NoiseSpec::BellDiagonal { q } => {
                BellDiagonal::new(q).and_then(|q| distimation::distill::bell_diagonal_noise(&q))
            }
            NoiseSpec::Depolarizing { omega } => NoiseChannel::depolarizing(0, omega),
            NoiseSpec::AmplitudeDamping { gamma } => NoiseChannel::amplitude_damping(0, gamma),
        };
        ch.map(Some).map_err(|e| CliError::Config(format!("noise: {e}")))
    }
}

/// `none`, `pauli:PX,PY,PZ`, `bell-diagonal:Q1,Q2,Q3,Q4`, `depolarizing:W`
/// or `amplitude-damping:G`.
impl FromStr for NoiseSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let values = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
                .collect::<std::result::Result<Vec<_>, _>>()?
        };
        let want = |n: usize| {
            if values.len() == n {
                Ok(())
            } else {
                Err(format!("{name} takes {n} values, got {}", values.len()))
            }
        };
        match name {
            "none" => want(0).map(|_| NoiseSpec::None),
            "pauli" => want(3).map(|_| NoiseSpec::Pauli {
                px: values[0],
                py: values[1],
                pz: values[2],
            }),
            "bell-diagonal" => want(4).map(|_| NoiseSpec::BellDiagonal {
                q: [values[0], values[1], values[2], values[3]],
            }),
            "depolarizing" => want(1).map(|_| NoiseSpec::Depolarizing { omega: values[0] }),
            "amplitude-damping" => want(1).map(|_| NoiseSpec::AmplitudeDamping { gamma: values[0] }),
            other => Err(format!("unknown noise kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SweepSection {
    pub q1_min: Option<f64>,
    pub q1_max: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct MbqcSection {
    pub chain: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct TrackSection {
    pub steps: Option<usize>,
    pub grid_points: Option<usize>,
    pub grid_lo: Option<f64>,
    pub grid_hi: Option<f64>,
    pub alpha: Option<f64>,
    pub estimate: Option<PointEstimate>,
    pub mode: Option<SamplingMode>,
    pub base: Option<[f64; 3]>,
    pub amplitude: Option<[f64; 3]>,
    pub period: Option<[f64; 3]>,
    pub phase: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ReplaySection {
    pub input: Option<PathBuf>,
}

/// Contents of a config file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<ExperimentKind>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub paper_mode: Option<bool>,
    pub exact: Option<bool>,
    #[serde(default)]
    pub sweep: SweepSection,
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub mbqc: MbqcSection,
    #[serde(default)]
    pub track: TrackSection,
    #[serde(default)]
    pub replay: ReplaySection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub paper_mode: bool,
    pub exact: bool,
    pub noise: Option<NoiseSpec>,
    pub input: Option<PathBuf>,
    pub chain: Option<usize>,
    pub steps: Option<usize>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub q1_min: f64,
    pub q1_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackSpec {
    pub steps: usize,
    pub episode: EpisodeConfig,
    pub drift: Drift,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub shots: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub paper_mode: bool,
    pub exact: bool,
    pub sweep: SweepSpec,
    pub noise: NoiseSpec,
    pub chain: usize,
    pub track: TrackSpec,
    pub input: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_CHAIN: usize = 10;
pub const DEFAULT_ALPHA: f64 = 0.5;

impl ExperimentConfig {
    /// Defaults for `kind` with nothing overridden.
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self::resolve(kind, ConfigFile::default(), Overrides::default()).expect("defaults are valid")
    }

    pub fn resolve(kind: ExperimentKind, file: ConfigFile, cli: Overrides) -> Result<Self> {
        if let Some(k) = file.kind {
            if k != kind {
                return Err(CliError::Config(format!("config is for {k}, not {kind}")));
            }
        }
        let paper_mode = cli.paper_mode || file.paper_mode.unwrap_or(false);
        let default_step = if paper_mode { 0.01 } else { 0.05 };
        let t = &file.track;
        let episode = EpisodeConfig {
            shots: 0,
            grid: GridSpec {
                points: t.grid_points.unwrap_or(25),
                lo: t.grid_lo.unwrap_or(0.0),
                hi: t.grid_hi.unwrap_or(0.25),
            },
            alpha: cli.alpha.or(t.alpha).unwrap_or(DEFAULT_ALPHA),
            mode: t.mode.unwrap_or(SamplingMode::Binomial),
            estimate: t.estimate.unwrap_or(PointEstimate::Map),
        };
        let d = Drift::default();
        let mut cfg = Self {
            kind,
            shots: cli.shots.or(file.shots).unwrap_or(kind.default_shots()),
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: cli
                .out
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("results").join(kind.name())),
            paper_mode,
            exact: cli.exact || file.exact.unwrap_or(false),
            sweep: SweepSpec {
                q1_min: file.sweep.q1_min.unwrap_or(0.5),
                q1_max: file.sweep.q1_max.unwrap_or(1.0),
                step: file.sweep.step.unwrap_or(default_step),
            },
            noise: cli.noise.or(file.noise).unwrap_or(NoiseSpec::None),
            chain: cli.chain.or(file.mbqc.chain).unwrap_or(DEFAULT_CHAIN),
            track: TrackSpec {
                steps: cli.steps.or(t.steps).unwrap_or(50),
                episode,
                drift: Drift {
                    base: t.base.unwrap_or(d.base),
                    amplitude: t.amplitude.unwrap_or(d.amplitude),
                    period: t.period.unwrap_or(d.period),
                    phase: t.phase.unwrap_or(d.phase),
                },
            },
            input: cli.input.or(file.replay.input),
        };
        cfg.track.episode.shots = cfg.shots;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        let s = &self.sweep;
        if !(s.step > 0.0) {
            return bad(format!("sweep step {} must be positive", s.step));
        }
        if !(0.5 <= s.q1_min && s.q1_min <= s.q1_max && s.q1_max <= 1.0) {
            return bad(format!("q1 range [{}, {}] must lie in [0.5, 1]", s.q1_min, s.q1_max));
        }
        match self.kind {
            ExperimentKind::Replay if self.input.is_none() => bad("replay needs an input file".into()),
            ExperimentKind::MbqcSweep if !(3..=10).contains(&self.chain) => {
                bad(format!("chain length {} must be in 3..=10", self.chain))
            }
            ExperimentKind::Track => {
                if self.track.steps == 0 {
                    return bad("track needs at least one step".into());
                }
                if !(0.0..=1.0).contains(&self.track.episode.alpha) {
                    return bad(format!("alpha {} must be in [0, 1]", self.track.episode.alpha));
                }
                self.track
                    .episode
                    .grid
                    .axis()
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(())
            }
            _ => {
                self.noise.channel()?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_strings() {
        assert_eq!("none".parse::<NoiseSpec>().unwrap(), NoiseSpec::None);
        assert_eq!(
            "amplitude-damping:0.3".parse::<NoiseSpec>().unwrap(),
            NoiseSpec::AmplitudeDamping { gamma: 0.3 }
        );
        assert_eq!(
            "pauli:0.1, 0.0,0.05".parse::<NoiseSpec>().unwrap(),
            NoiseSpec::Pauli {
                px: 0.1,
                py: 0.0,
                pz: 0.05
            }
        );
        assert!("pauli:0.1".parse::<NoiseSpec>().is_err());
        assert!("thermal:0.1".parse::<NoiseSpec>().is_err());
    }

    #[test]
    fn file_and_flags_merge() {
        let file: ConfigFile = toml::from_str(
            r#"
            kind = "bd-sweep"
            shots = 1000
            seed = 3
            [sweep]
            step = 0.1
            [noise]
            kind = "depolarizing"
            omega = 0.2
            "#,
        )
        .unwrap();
        let cli = Overrides {
            seed: Some(11),
            ..Overrides::default()
        };
        let cfg = ExperimentConfig::resolve(ExperimentKind::BdSweep, file.clone(), cli).unwrap();
        assert_eq!((cfg.shots, cfg.seed, cfg.sweep.step), (1000, 11, 0.1));
        assert_eq!(cfg.noise, NoiseSpec::Depolarizing { omega: 0.2 });
        assert!(ExperimentConfig::resolve(ExperimentKind::Track, file, Overrides::default()).is_err());
    }

    #[test]
    fn defaults_per_kind() {
        assert_eq!(ExperimentConfig::defaults(ExperimentKind::WernerSweep).shots, 270_000);
        assert_eq!(ExperimentConfig::defaults(ExperimentKind::BdSweep).shots, 90_000);
        let track = ExperimentConfig::defaults(ExperimentKind::Track);
        assert_eq!(track.track.episode.shots, 1000);
        assert_eq!(track.track.episode.grid.points, 25);
        let fine = ExperimentConfig::resolve(
            ExperimentKind::BdSweep,
            ConfigFile::default(),
            Overrides {
                paper_mode: true,
                ..Overrides::default()
            },
        )
        .unwrap();
        assert_eq!(fine.sweep.step, 0.01);
    }

    #[test]
    fn invalid_values_rejected() {
        let reject = |toml_text: &str, kind| {
            let file: ConfigFile = toml::from_str(toml_text).unwrap();
            ExperimentConfig::resolve(kind, file, Overrides::default()).is_err()
        };
        assert!(reject("shots = 0", ExperimentKind::BdSweep));
        assert!(reject("[sweep]\nstep = 0.0", ExperimentKind::BdSweep));
        assert!(reject("[sweep]\nq1-min = 0.3", ExperimentKind::WernerSweep));
        assert!(reject(
            "[noise]\nkind = \"depolarizing\"\nomega = 2.0",
            ExperimentKind::QstCompare
        ));
        assert!(reject("", ExperimentKind::Replay));
        assert!(reject("[mbqc]\nchain = 11", ExperimentKind::MbqcSweep));
        assert!(toml::from_str::<ConfigFile>("typo = 1").is_err());
    }
}
