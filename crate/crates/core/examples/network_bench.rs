//! Timings of the standard network: forward, backward and Adam.
//!
//! cargo run --release --example network_bench

use std::time::Instant;

use toric_lab::qnet::{Adam, AdamConfig, QNetwork, QNetworkConfig};
use toric_lab::{ActionId, Result};

fn main() -> Result<()> {
    let reps = 20;
    for d in [3, 5, 7] {
        let net = QNetwork::<f64>::new(QNetworkConfig::standard(d), 1)?;
        let grids: Vec<u8> = (0..32 * d * d).map(|i| (i % 3 == 0) as u8).collect();
        let time = |f: &mut dyn FnMut()| {
            let t = Instant::now();
            for _ in 0..reps {
                f();
            }
            t.elapsed() / reps
        };
        let one = time(&mut || {
            net.forward(&grids[..d * d]).unwrap();
        });
        let batch = time(&mut || {
            net.forward_batch(&grids).unwrap();
        });
        let mut g = vec![0.0; net.param_count()];
        let back = time(&mut || {
            g.fill(0.0);
            net.backward_batch(&grids, &[ActionId::UP; 32], &[1.0; 32], &mut g)
                .unwrap();
        });
        let mut opt = Adam::new(AdamConfig::default(), net.param_count());
        let mut p = net.params().to_vec();
        let step = time(&mut || opt.update(&mut p, &g).unwrap());
        println!("d={d} params {:>9}  forward x1 {one:>10.2?}  forward x32 {batch:>10.2?}  backward x32 {back:>10.2?}  adam {step:>10.2?}", net.param_count());
    }
    Ok(())
}
