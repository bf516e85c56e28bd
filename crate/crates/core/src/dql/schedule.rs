use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnet::{AdamConfig, QNetworkConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// +1000 on a successful terminal state, 0 otherwise.
    #[default]
    SuccessFailure,
    /// −1 for every action taken.
    MinimumAction,
}

impl std::str::FromStr for RewardMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "success_failure" | "sf" => Ok(RewardMode::SuccessFailure),
            "minimum_action" | "mad" => Ok(RewardMode::MinimumAction),
            _ => Err(Error::InvalidConfig(format!("unknown reward mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardRule {
    pub success_reward: f64,
    pub failure_reward: f64,
    pub per_step_penalty: f64,
}

impl Default for RewardRule {
    fn default() -> Self {
        Self {
            success_reward: 1000.0,
            failure_reward: 0.0,
            per_step_penalty: -1.0,
        }
    }
}

impl RewardRule {
    /// Reward for one transition. `outcome` is `Some(success)` when the step
    /// ended the episode (terminal state or step cap), `None` otherwise.
    pub fn reward(&self, mode: RewardMode, outcome: Option<bool>) -> f64 {
        match mode {
            RewardMode::MinimumAction => self.per_step_penalty,
            RewardMode::SuccessFailure => match outcome {
                Some(true) => self.success_reward,
                Some(false) => self.failure_reward,
                None => 0.0,
            },
        }
    }
}

/// Exploration and curriculum schedule plus the fixed learning hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSchedule {
    pub eps_initial: f64,
    pub eps_final: f64,
    /// Number of training episodes.
    pub total_iterations: u64,
    #[serde(default = "default_p_initial")]
    pub p_initial: f64,
    #[serde(default = "default_p_final")]
    pub p_final: f64,
    pub iterations_at_p_final: u64,
    pub gamma: f64,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_sync")]
    pub target_sync_k: u64,
    #[serde(default = "default_cap")]
    pub max_episode_steps: usize,
    #[serde(default)]
    pub reward_mode: RewardMode,
    #[serde(default)]
    pub reward: RewardRule,
    #[serde(default = "default_capacity")]
    pub replay_capacity: usize,
    #[serde(default)]
    pub double_dqn: bool,
}

fn default_p_initial() -> f64 {
    0.01
}
fn default_p_final() -> f64 {
    0.10
}
fn default_batch() -> usize {
    32
}
fn default_sync() -> u64 {
    500
}
fn default_cap() -> usize {
    1000
}
fn default_capacity() -> usize {
    3_000_000
}

impl TrainSchedule {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            self.eps_initial,
            self.eps_final,
            self.p_initial,
            self.p_final,
            self.gamma,
        ];
        if let Some(&bad) = probs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidProbability(bad));
        }
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.total_iterations == 0 {
            return fail("total_iterations must be positive");
        }
        if self.iterations_at_p_final > self.total_iterations {
            return fail("iterations_at_p_final exceeds total_iterations");
        }
        if self.batch_size == 0 || self.target_sync_k == 0 || self.max_episode_steps == 0 {
            return fail("batch_size, target_sync_k and max_episode_steps must be positive");
        }
        if self.replay_capacity < self.batch_size {
            return fail("replay_capacity must hold at least one batch");
        }
        Ok(())
    }

    /// Exploration rate for episode `t`: linear from `eps_initial` at 0 to
    /// `eps_final` at the last episode, constant afterwards.
    pub fn epsilon(&self, t: u64) -> f64 {
        let span = self.total_iterations.saturating_sub(1);
        lerp(self.eps_initial, self.eps_final, t, span)
    }

    /// Error rate for episode `t`: linear from `p_initial` at 0 to `p_final`
    /// at `total_iterations − iterations_at_p_final`, constant afterwards.
    pub fn error_rate(&self, t: u64) -> f64 {
        let ramp = self.total_iterations - self.iterations_at_p_final;
        lerp(self.p_initial, self.p_final, t, ramp)
    }
}

fn lerp(a: f64, b: f64, t: u64, span: u64) -> f64 {
    if t >= span {
        return b;
    }
    a + (b - a) * (t as f64 / span as f64)
}

/// Everything needed to start a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub network: QNetworkConfig,
    pub schedule: TrainSchedule,
    #[serde(default)]
    pub adam: AdamConfig,
    /// Write a checkpoint every this many episodes (0 = only at the end).
    #[serde(default)]
    pub checkpoint_every: u64,
}

pub const PRESETS: [&str; 8] = [
    "d3", "d5", "d7", "d9", "d3_p15", "d5_p15", "d7_p15", "d9_p15",
];

impl TrainConfig {
    /// Named presets: `d3`, `d5`, `d7`, `d9`, and the `_p15` variants that
    /// raise the final error rate to 0.15.
    pub fn preset(name: &str) -> Result<Self> {
        let (base, p15) = match name.strip_suffix("_p15") {
            Some(b) => (b, true),
            None => (name, false),
        };
        let (d, eps_initial, eps_final, total, at_final, gamma) = match base {
            "d3" => (3, 0.75, 0.08, 1000, 300, 0.9),
            "d5" => (5, 0.75, 0.08, 2500, 1000, 0.95),
            "d7" => (7, 0.75, 0.08, 6000, 2000, 0.95),
            "d9" => (9, 0.5, 0.1, 8000, 3500, 0.95),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown preset {name:?}; expected one of {PRESETS:?}"
                )))
            }
        };
        let schedule = TrainSchedule {
            eps_initial,
            eps_final,
            total_iterations: total,
            p_initial: default_p_initial(),
            p_final: if p15 { 0.15 } else { default_p_final() },
            iterations_at_p_final: at_final,
            gamma,
            batch_size: default_batch(),
            target_sync_k: default_sync(),
            max_episode_steps: default_cap(),
            reward_mode: RewardMode::SuccessFailure,
            reward: RewardRule::default(),
            replay_capacity: default_capacity(),
            double_dqn: false,
        };
        Ok(Self {
            network: QNetworkConfig::standard(d),
            schedule,
            adam: AdamConfig::default(),
            checkpoint_every: 0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.schedule.validate()?;
        if !(self.adam.lr > 0.0 && self.adam.eps > 0.0) {
            return Err(Error::InvalidConfig(
                "adam lr and eps must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let cfg: Self =
            serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
