//! Backpropagation against central differences on a small network.
//!
//! cargo run --release --example gradient_check

use rand::Rng;
use toric_lab::qnet::{ConvSpec, QNetwork, QNetworkConfig};
use toric_lab::{rng, ActionId, Result};

fn main() -> Result<()> {
    let conv = ConvSpec {
        filters: 4,
        kernel: 3,
        stride: 2,
    };
    let config = QNetworkConfig {
        conv: vec![conv; 2],
        fc: vec![8],
        ..QNetworkConfig::standard(5)
    };
    let mut net = QNetwork::<f64>::new(config, 3)?;
    // Random non-zero biases keep pre-activations off the ReLU kink, where
    // the one-sided derivative and a central difference legitimately differ.
    let mut rng = rng::seeded(4);
    for b in net.layout().layers.clone().iter().map(|l| l.bias_range()) {
        for x in &mut net.params_mut()[b] {
            *x = rng.gen_range(-0.1..0.1);
        }
    }
    let grid: Vec<u8> = (0..25)
        .map(|i| [6, 12, 13, 21].contains(&i) as u8)
        .collect();
    let (action, target) = (ActionId::LEFT, 1.5);

    let analytic = net.backward(&grid, action, target)?;
    let loss = |n: &QNetwork<f64>| {
        let q = n.forward(&grid).unwrap()[action.index()];
        0.5 * (target - q) * (target - q)
    };
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..net.param_count() {
        let x0 = net.params()[i];
        net.params_mut()[i] = x0 + h;
        let up = loss(&net);
        net.params_mut()[i] = x0 - h;
        let down = loss(&net);
        net.params_mut()[i] = x0;
        let numeric = (up - down) / (2.0 * h);
        worst = worst
            .max((analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(1e-6));
    }
    println!(
        "{} parameters, max relative error {worst:.2e}",
        net.param_count()
    );
    Ok(())
}
