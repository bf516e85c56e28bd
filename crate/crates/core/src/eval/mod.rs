//! Monte-Carlo evaluation of decoders over error-rate sweeps, threshold
//! estimation, and reward-scheme comparison.

mod stats;
mod threshold;

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::dql::select_action;
use crate::error::{Error, Result};
use crate::lattice::{ErrorState, ToricLattice};
use crate::mwpm::mwpm_decode;
use crate::qnet::{AnyNetwork, QFunction};
use crate::rng;

pub use stats::{total_variation, wilson_interval, Z95};
pub use threshold::{estimate_threshold, Crossing, Curve, ThresholdEstimate};

/// Step cap for greedy evaluation episodes, shared with training.
pub const DEFAULT_MAX_STEPS: usize = 1000;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "TORIC_LAB_THREADS";

#[derive(Clone, Debug)]
pub enum Decoder {
    Mwpm,
    /// Greedy Q-network policy with a step cap.
    Rl {
        net: Arc<AnyNetwork>,
        max_steps: usize,
    },
}

impl Decoder {
    pub fn rl_from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        Ok(Decoder::Rl {
            net: Arc::new(ck.network()?),
            max_steps: ck.header.config.schedule.max_episode_steps,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Decoder::Mwpm => "mwpm",
            Decoder::Rl { .. } => "rl",
        }
    }
}

/// Serializable description of which decoder a sweep used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderSpec {
    Mwpm,
    Rl { checkpoint: PathBuf },
}

impl DecoderSpec {
    pub fn load(&self) -> Result<Decoder> {
        match self {
            DecoderSpec::Mwpm => Ok(Decoder::Mwpm),
            DecoderSpec::Rl { checkpoint } => {
                Decoder::rl_from_checkpoint(&Checkpoint::load(checkpoint)?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub d: usize,
    pub p_values: Vec<f64>,
    pub trials: u64,
    pub decoder: DecoderSpec,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        ToricLattice::new(self.d)?;
        validate_grid(&self.p_values)?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }
}

fn validate_grid(ps: &[f64]) -> Result<()> {
    if ps.is_empty() {
        return Err(Error::InvalidConfig("empty p grid".into()));
    }
    if let Some(&bad) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidProbability(bad));
    }
    if ps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "p values must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Outcome of a single decoding trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub success: bool,
    /// Actions taken (RL) or correction weight (MWPM).
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub d: usize,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_steps: f64,
    /// Episode length → count.
    pub histogram: BTreeMap<usize, u64>,
}

impl PointResult {
    pub fn from_trials(d: usize, p: f64, trials: &[Trial]) -> Self {
        let n = trials.len() as u64;
        let successes = trials.iter().filter(|t| t.success).count() as u64;
        let (ci_lo, ci_hi) = wilson_interval(successes, n);
        let mut histogram = BTreeMap::new();
        for t in trials {
            *histogram.entry(t.steps).or_insert(0) += 1;
        }
        let mean_steps = if n == 0 {
            0.0
        } else {
            trials.iter().map(|t| t.steps as f64).sum::<f64>() / n as f64
        };
        Self {
            d,
            p,
            trials: n,
            successes,
            rate: successes as f64 / n.max(1) as f64,
            ci_lo,
            ci_hi,
            mean_steps,
            histogram,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub d: usize,
    pub decoder: String,
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn curve(&self) -> Curve {
        Curve {
            d: self.d,
            points: self.points.iter().map(|r| (r.p, r.rate)).collect(),
        }
    }
}

/// Greedy (ε = 0) episode. A revisited syndrome means the deterministic
/// policy is in a cycle and would run to the cap, so it is scored as a
/// capped failure straight away.
pub fn greedy_episode<Q: QFunction + ?Sized>(
    net: &Q,
    lattice: ToricLattice,
    errors: &ErrorState,
    max_steps: usize,
) -> Result<Trial> {
    let mut errors = errors.clone();
    let mut syn = lattice.compute_syndrome(&errors);
    let mut seen = HashSet::new();
    let mut unused = rng::seeded(0);
    let mut steps = 0;
    while !syn.is_terminal() {
        if steps == max_steps || !seen.insert(syn.grid().to_vec()) {
            return Ok(Trial {
                success: false,
                steps: max_steps,
            });
        }
        let c = select_action(net, &syn, 0.0, &mut unused)?;
        errors.flip(c.qubit)?;
        syn.toggle_qubit(c.qubit)?;
        steps += 1;
    }
    Ok(Trial {
        success: lattice.is_success(&errors)?,
        steps,
    })
}

/// Decodes one error configuration.
pub fn run_trial(decoder: &Decoder, lattice: ToricLattice, errors: &ErrorState) -> Result<Trial> {
    match decoder {
        Decoder::Mwpm => {
            let corr = mwpm_decode(lattice, &lattice.compute_syndrome(errors))?;
            Ok(Trial {
                success: lattice.is_success(&errors.xor(&corr))?,
                steps: corr.weight(),
            })
        }
        Decoder::Rl { net, max_steps } => {
            if net.d() != lattice.d() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.d(),
                    found: net.d(),
                });
            }
            greedy_episode(net.as_ref(), lattice, errors, *max_steps)
        }
    }
}

/// Worker pool sized by `TORIC_LAB_THREADS`, else the number of cores.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV}={v:?} is not a count")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// Seed of the error draw for `trial` at grid point `p_index` of a size-`d`
/// sweep. Independent of the decoder, so decoders see identical errors.
pub fn trial_rng(seed: u64, d: usize, p_index: usize, trial: u64) -> rng::LabRng {
    rng::stream(
        rng::derive_seed(rng::derive_seed(seed, d as u64), p_index as u64),
        trial,
    )
}

/// Runs `trials` decodes at each p on the worker pool. Results depend only
/// on `(seed, d, p index, trial)`, never on scheduling.
pub fn run_point_trials(
    decoder: &Decoder,
    d: usize,
    p: f64,
    p_index: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<Trial>> {
    let lattice = ToricLattice::new(d)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let errors = lattice.sample_errors_with(p, &mut trial_rng(seed, d, p_index, t))?;
            run_trial(decoder, lattice, &errors)
        })
        .collect()
}

pub fn evaluate_with(
    decoder: &Decoder,
    d: usize,
    p_values: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SweepResult> {
    validate_grid(p_values)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let pool = worker_pool()?;
    let mut points = Vec::with_capacity(p_values.len());
    for (i, &p) in p_values.iter().enumerate() {
        let ts = pool.install(|| run_point_trials(decoder, d, p, i, trials, seed))?;
        points.push(PointResult::from_trials(d, p, &ts));
    }
    Ok(SweepResult {
        d,
        decoder: decoder.name().into(),
        points,
    })
}

pub fn evaluate(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let decoder = spec.decoder.load()?;
    if let Decoder::Rl { net, .. } = &decoder {
        if net.d() != spec.d {
            return Err(Error::DimensionMismatch {
                expected: spec.d,
                found: net.d(),
            });
        }
    }
    evaluate_with(&decoder, spec.d, &spec.p_values, spec.trials, spec.seed)
}

/// Two agents evaluated on the same error draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardComparison {
    pub d: usize,
    pub a: SweepResult,
    pub b: SweepResult,
    /// Total-variation distance between episode-length histograms, per p.
    pub tv: Vec<f64>,
}

pub fn compare_reward_modes(
    a: &Checkpoint,
    b: &Checkpoint,
    p_values: &[f64],
    trials: u64,
    seed: u64,
) -> Result<RewardComparison> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            expected: a.d(),
            found: b.d(),
        });
    }
    let d = a.d();
    let ra = evaluate_with(&Decoder::rl_from_checkpoint(a)?, d, p_values, trials, seed)?;
    let rb = evaluate_with(&Decoder::rl_from_checkpoint(b)?, d, p_values, trials, seed)?;
    let tv = ra
        .points
        .iter()
        .zip(&rb.points)
        .map(|(x, y)| total_variation(&x.histogram, &y.histogram))
        .collect();
    Ok(RewardComparison {
        d,
        a: ra,
        b: rb,
        tv,
    })
}

/// Parses `0.01,0.02` or the inclusive range `start:stop:step`.
pub fn parse_p_list(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse p list {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let out = match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h): (f64, f64, f64) = (
                start.trim().parse().map_err(|_| bad())?,
                stop.trim().parse().map_err(|_| bad())?,
                step.trim().parse().map_err(|_| bad())?,
            );
            if !(h > 0.0) || b < a {
                return Err(bad());
            }
            let n = ((b - a) / h).round() as usize + 1;
            // Round to 12 decimals so grid values print cleanly.
            (0..n)
                .map(|i| ((a + h * i as f64) * 1e12).round() / 1e12)
                .collect()
        }
        [_] => s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    validate_grid(&out)?;
    Ok(out)
}

pub mod io {
    //! CSV and JSON artifacts.

    use std::path::Path;

    use serde::Serialize;

    use super::{PointResult, SweepResult};
    use crate::error::Result;

    #[derive(Serialize)]
    struct CurveRow {
        d: usize,
        p: f64,
        trials: u64,
        successes: u64,
        rate: f64,
        ci_lo: f64,
        ci_hi: f64,
        mean_steps: f64,
    }

    #[derive(Serialize)]
    struct HistRow {
        d: usize,
        p: f64,
        steps: usize,
        count: u64,
    }

    #[derive(Serialize)]
    struct BenchRow {
        d: usize,
        p: f64,
        trials: u64,
        successes: u64,
        success_rate: f64,
    }

    fn points(results: &[SweepResult]) -> impl Iterator<Item = &PointResult> {
        results.iter().flat_map(|r| r.points.iter())
    }

    /// `d,p,trials,successes,rate,ci_lo,ci_hi,mean_steps`
    pub fn write_curves(path: &Path, results: &[SweepResult]) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in points(results) {
            w.serialize(CurveRow {
                d: r.d,
                p: r.p,
                trials: r.trials,
                successes: r.successes,
                rate: r.rate,
                ci_lo: r.ci_lo,
                ci_hi: r.ci_hi,
                mean_steps: r.mean_steps,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// `d,p,steps,count`
    pub fn write_histograms(path: &Path, results: &[SweepResult]) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in points(results) {
            for (&steps, &count) in &r.histogram {
                w.serialize(HistRow {
                    d: r.d,
                    p: r.p,
                    steps,
                    count,
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `d,p,trials,successes,success_rate`
    pub fn write_bench(path: &Path, results: &[SweepResult]) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in points(results) {
            w.serialize(BenchRow {
                d: r.d,
                p: r.p,
                trials: r.trials,
                successes: r.successes,
                success_rate: r.rate,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    #[derive(serde::Deserialize)]
    struct CurveIn {
        d: usize,
        p: f64,
        #[serde(alias = "success_rate")]
        rate: f64,
    }

    /// Reads `d,p,…,rate` (curves) or `d,p,…,success_rate` (bench) rows,
    /// grouped into one curve per d.
    pub fn read_curves(path: &Path) -> Result<Vec<super::Curve>> {
        let mut r = csv::Reader::from_path(path)?;
        let mut by_d: std::collections::BTreeMap<usize, Vec<(f64, f64)>> = Default::default();
        for row in r.deserialize() {
            let row: CurveIn = row?;
            by_d.entry(row.d).or_default().push((row.p, row.rate));
        }
        Ok(by_d
            .into_iter()
            .map(|(d, points)| super::Curve { d, points })
            .collect())
    }

    /// Pretty JSON with a trailing newline.
    pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }
}
