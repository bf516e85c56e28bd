//! The pieces of one training run, driven by hand: episodes fill the replay
//! memory, updates regress the active network toward targets from the
//! frozen copy.
//!
//! cargo run --release --example dqn_step

use toric_lab::dql::{TrainConfig, Trainer};
use toric_lab::qnet::{ConvSpec, QNetworkConfig};
use toric_lab::Result;

fn main() -> Result<()> {
    let mut config = TrainConfig::preset("d3")?;
    config.network = QNetworkConfig {
        conv: vec![ConvSpec {
            filters: 16,
            kernel: 3,
            stride: 2,
        }],
        fc: vec![32],
        ..config.network
    };
    config.schedule.batch_size = 16;
    config.schedule.target_sync_k = 50;
    config.schedule.max_episode_steps = 40;
    let mut trainer = Trainer::<f64>::new(config, 9)?;

    for round in 0..10 {
        let (mut ok, mut steps) = (0, 0);
        for _ in 0..50 {
            let rec = trainer.run_episode(0.05, 0.3)?;
            ok += rec.success as usize;
            steps += rec.steps;
        }
        println!(
            "round {round}: success {ok}/50, {steps} steps, memory {}, updates {}",
            trainer.memory().len(),
            trainer.updates()
        );
    }
    println!(
        "{} parameters, replay holds {} transitions",
        trainer.active().param_count(),
        trainer.memory().len()
    );
    Ok(())
}
