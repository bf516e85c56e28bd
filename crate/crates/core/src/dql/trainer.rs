use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::memory::{Experience, ReplayMemory};
use super::policy::{double_dqn_batch, q_max_batch, select_action};
use super::schedule::TrainConfig;
use crate::checkpoint::{Checkpoint, TrainCursor};
use crate::error::{Error, Result};
use crate::lattice::{ErrorState, Syndrome, ToricLattice};
use crate::perspective::{perspectives_for_qubit, ActionId};
use crate::qnet::{Adam, Precision, QNetwork, Real};
use crate::rng::{self, LabRng};

/// Outcome of one training episode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub steps: usize,
    pub success: bool,
    /// Mean batch loss over the updates made during the episode.
    pub mean_loss: Option<f64>,
}

/// One row of the training log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub iter: u64,
    pub epsilon: f64,
    pub p: f64,
    pub steps: usize,
    pub success: u8,
    pub mean_loss: Option<f64>,
    pub wall_ms: u64,
}

/// Draws errors at rate `p` until the syndrome is non-empty.
pub fn sample_nontrivial<R: Rng + ?Sized>(
    lattice: ToricLattice,
    p: f64,
    rng: &mut R,
) -> Result<(ErrorState, Syndrome)> {
    if p <= 0.0 {
        return Err(Error::InvalidConfig(
            "cannot draw a non-empty syndrome at p = 0".into(),
        ));
    }
    loop {
        let errs = lattice.sample_errors_with(p, rng)?;
        let syn = lattice.compute_syndrome(&errs);
        if !syn.is_terminal() {
            return Ok((errs, syn));
        }
    }
}

#[derive(Serialize)]
struct BatchDump<'a> {
    update: u64,
    experiences: Vec<&'a Experience>,
    targets: Vec<f64>,
}

/// Active and target networks, optimiser, replay memory and the run's RNG.
pub struct Trainer<T: Real> {
    config: TrainConfig,
    lattice: ToricLattice,
    active: QNetwork<T>,
    target: QNetwork<T>,
    adam: Adam<T>,
    memory: ReplayMemory,
    rng: LabRng,
    seed: u64,
    episodes: u64,
    updates: u64,
    grads: Vec<T>,
    dump_dir: PathBuf,
}

impl<T: Real> Trainer<T> {
    pub fn new(config: TrainConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        if config.schedule.p_initial <= 0.0 {
            return Err(Error::InvalidConfig("p_initial must be positive".into()));
        }
        let lattice = ToricLattice::new(config.network.d)?;
        let active = QNetwork::new(config.network.clone(), rng::derive_seed(seed, 0))?;
        let target = active.clone();
        let adam = Adam::new(config.adam, active.param_count());
        let memory = ReplayMemory::new(config.schedule.replay_capacity);
        let grads = vec![T::zero(); active.param_count()];
        Ok(Self {
            rng: rng::stream(seed, 1),
            config,
            lattice,
            active,
            target,
            adam,
            memory,
            seed,
            episodes: 0,
            updates: 0,
            grads,
            dump_dir: std::env::temp_dir(),
        })
    }

    /// Directory that receives the batch dump if a loss turns non-finite.
    pub fn set_dump_dir(&mut self, dir: impl Into<PathBuf>) {
        self.dump_dir = dir.into();
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn active(&self) -> &QNetwork<T> {
        &self.active
    }

    pub fn target(&self) -> &QNetwork<T> {
        &self.target
    }

    pub fn memory(&self) -> &ReplayMemory {
        &self.memory
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn cursor(&self) -> TrainCursor {
        TrainCursor {
            seed: self.seed,
            episodes: self.episodes,
            updates: self.updates,
        }
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::capture(&self.config, self.cursor(), &self.active, &self.adam)
    }

    /// Plays one episode at error rate `p` and exploration `eps`, storing every
    /// transition and making one batched update per step once the memory
    /// holds a full batch.
    pub fn run_episode(&mut self, p: f64, eps: f64) -> Result<EpisodeRecord> {
        let (mut errors, mut syn) = sample_nontrivial(self.lattice, p, &mut self.rng)?;
        self.run_episode_from(&mut errors, &mut syn, eps)
    }

    /// [`Trainer::run_episode`] from a given hidden error configuration.
    pub fn run_episode_from(
        &mut self,
        errors: &mut ErrorState,
        syn: &mut Syndrome,
        eps: f64,
    ) -> Result<EpisodeRecord> {
        let s = self.config.schedule.clone();
        let mut loss_sum = 0.0;
        let mut n_updates = 0usize;
        let mut record = EpisodeRecord {
            steps: 0,
            success: false,
            mean_loss: None,
        };
        if syn.is_terminal() {
            record.success = self.lattice.is_success(errors)?;
            return Ok(record);
        }
        for step in 1..=s.max_episode_steps {
            let choice = select_action(&self.active, syn, eps, &mut self.rng)?;
            errors.flip(choice.qubit)?;
            let mut next = syn.clone();
            next.toggle_qubit(choice.qubit)?;
            let terminal = next.is_terminal();
            let outcome = if terminal {
                Some(self.lattice.is_success(errors)?)
            } else if step == s.max_episode_steps {
                Some(false)
            } else {
                None
            };
            let reward = s.reward.reward(s.reward_mode, outcome);
            self.memory.push(Experience {
                state: syn.clone(),
                action: choice.qubit,
                reward,
                next_state: next.clone(),
                terminal,
            });
            if self.memory.len() >= s.batch_size {
                loss_sum += self.update()?;
                n_updates += 1;
            }
            *syn = next;
            if let Some(success) = outcome {
                record = EpisodeRecord {
                    steps: step,
                    success,
                    mean_loss: None,
                };
                break;
            }
        }
        if n_updates > 0 {
            record.mean_loss = Some(loss_sum / n_updates as f64);
        }
        Ok(record)
    }

    /// One gradient step on a uniformly drawn batch. Returns the batch loss.
    pub fn update(&mut self) -> Result<f64> {
        let s = &self.config.schedule;
        let batch = self.memory.sample(s.batch_size, &mut self.rng);
        let targets = self.targets(&batch)?;
        // Each stored qubit is trained from every defect it borders, so both
        // views of a shared edge learn the same value.
        let cells = self.lattice.n_plaquettes();
        let mut grids = Vec::with_capacity(2 * batch.len() * cells);
        let mut actions: Vec<ActionId> = Vec::with_capacity(2 * batch.len());
        let mut row_targets = Vec::with_capacity(2 * batch.len());
        for (e, &y) in batch.iter().zip(&targets) {
            let views = perspectives_for_qubit(&e.state, e.action);
            if views.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "stored action {} touches no defect",
                    e.action
                )));
            }
            for (persp, a) in views {
                grids.extend_from_slice(persp.grid());
                actions.push(a);
                row_targets.push(T::of(y));
            }
        }
        self.grads.iter_mut().for_each(|g| *g = T::zero());
        let loss = self
            .active
            .backward_batch(&grids, &actions, &row_targets, &mut self.grads)?
            .as_f64();
        if !loss.is_finite() || self.grads.iter().any(|g| !g.is_finite()) {
            let path = self.dump_dir.join(format!(
                "toric-lab-nonfinite-{}-{}.json",
                self.seed, self.updates
            ));
            let dump = BatchDump {
                update: self.updates,
                experiences: batch,
                targets,
            };
            serde_json::to_writer_pretty(File::create(&path)?, &dump)?;
            return Err(Error::NonFiniteLoss {
                update: self.updates,
                dump: path.display().to_string(),
            });
        }
        self.adam.update(self.active.params_mut(), &self.grads)?;
        self.updates += 1;
        if self.updates.is_multiple_of(s.target_sync_k) {
            self.target.copy_from(&self.active);
        }
        Ok(loss)
    }

    /// Regression targets `r + γ·max q̂(s')`, with `q̂ = 0` on terminal states.
    pub fn targets(&self, batch: &[&Experience]) -> Result<Vec<f64>> {
        let s = &self.config.schedule;
        let next: Vec<&Syndrome> = batch.iter().map(|e| &e.next_state).collect();
        let bootstrap = if s.double_dqn {
            double_dqn_batch(&self.active, &self.target, &next)?
        } else {
            q_max_batch(&self.target, &next)?
        };
        Ok(batch
            .iter()
            .zip(bootstrap)
            .map(|(e, q)| e.reward + if e.terminal { 0.0 } else { s.gamma * q })
            .collect())
    }

    /// Runs the next scheduled episode and returns its log row.
    pub fn step_schedule(&mut self) -> Result<LogRow> {
        let t = self.episodes;
        let (eps, p) = (
            self.config.schedule.epsilon(t),
            self.config.schedule.error_rate(t),
        );
        let rec = self.run_episode(p, eps)?;
        self.episodes += 1;
        Ok(LogRow {
            iter: t,
            epsilon: eps,
            p,
            steps: rec.steps,
            success: rec.success as u8,
            mean_loss: rec.mean_loss,
            wall_ms: 0,
        })
    }
}

/// Output locations and logging switches for [`train`].
#[derive(Clone, Debug)]
pub struct TrainOptions {
    /// Final checkpoint path. Periodic checkpoints go to `<out>.ep<N>`.
    pub out: PathBuf,
    /// Training log CSV path.
    pub log: PathBuf,
    /// Record elapsed milliseconds in the log (otherwise 0, keeping the log
    /// byte-reproducible).
    pub wall_clock: bool,
}

impl TrainOptions {
    /// Checkpoint at `out`, log next to it with a `.log.csv` suffix.
    pub fn new(out: impl Into<PathBuf>) -> Self {
        let out = out.into();
        let mut log = out.clone().into_os_string();
        log.push(".log.csv");
        Self {
            out,
            log: log.into(),
            wall_clock: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub episodes: u64,
    pub updates: u64,
    pub final_success_rate: f64,
}

/// Full training run per the config's schedule.
pub fn train(
    config: &TrainConfig,
    seed: u64,
    opts: &TrainOptions,
    on_episode: impl FnMut(&LogRow),
) -> Result<TrainSummary> {
    match config.network.precision {
        Precision::F64 => train_with::<f64>(config, seed, opts, on_episode),
        Precision::F32 => train_with::<f32>(config, seed, opts, on_episode),
    }
}

fn train_with<T: Real>(
    config: &TrainConfig,
    seed: u64,
    opts: &TrainOptions,
    mut on_episode: impl FnMut(&LogRow),
) -> Result<TrainSummary> {
    let mut trainer = Trainer::<T>::new(config.clone(), seed)?;
    if let Some(dir) = opts.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        trainer.set_dump_dir(dir);
    }
    let mut log = csv::Writer::from_path(&opts.log)?;
    let start = Instant::now();
    let total = config.schedule.total_iterations;
    // Success rate over the last tenth of training.
    let tail_from = total - (total / 10).max(1);
    let (mut tail_n, mut tail_ok) = (0u64, 0u64);
    for _ in 0..total {
        let mut row = trainer.step_schedule()?;
        if opts.wall_clock {
            row.wall_ms = start.elapsed().as_millis() as u64;
        }
        if row.iter >= tail_from {
            tail_n += 1;
            tail_ok += row.success as u64;
        }
        log.serialize(&row)?;
        on_episode(&row);
        if config.checkpoint_every > 0
            && trainer.episodes() % config.checkpoint_every == 0
            && trainer.episodes() < total
        {
            log.flush()?;
            trainer
                .checkpoint()
                .save(&periodic_path(&opts.out, trainer.episodes()))?;
        }
    }
    log.flush()?;
    trainer.checkpoint().save(&opts.out)?;
    Ok(TrainSummary {
        episodes: trainer.episodes(),
        updates: trainer.updates(),
        final_success_rate: tail_ok as f64 / tail_n as f64,
    })
}

pub fn periodic_path(out: &Path, episode: u64) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(format!(".ep{episode}"));
    s.into()
}
