//! Deep Q-learning: replay memory, ε-greedy action selection over
//! perspectives, and the training loop with a periodically synced target
//! network.

mod memory;
mod policy;
mod schedule;
mod trainer;

pub use memory::{Experience, ReplayMemory};
pub use policy::{
    double_dqn_batch, double_dqn_target, perspective_q_values, q_max, q_max_batch, select_action,
    Choice,
};
pub use schedule::{RewardMode, RewardRule, TrainConfig, TrainSchedule, PRESETS};
pub use trainer::{
    periodic_path, sample_nontrivial, train, EpisodeRecord, LogRow, TrainOptions, TrainSummary,
    Trainer,
};
