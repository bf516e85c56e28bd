//! Monte-Carlo checks of the evaluation harness against an independently
//! written matching decoder.

mod common;

use common::RefLattice;
use toric_lab::eval::{evaluate_with, trial_rng, wilson_interval, Decoder};
use toric_lab::lattice::ToricLattice;
use toric_lab::mwpm::{mwpm_decode_with, PathOrder};

#[test]
fn matching_rate_agrees_with_reference_decoder() {
    let (d, p, trials) = (5, 0.10, 10_000u64);
    let l = ToricLattice::new(d).unwrap();
    let reference = RefLattice { d };
    let mut ref_ok = 0u64;
    for t in 0..trials {
        let errs = l.sample_errors_with(p, &mut trial_rng(3, d, 0, t)).unwrap();
        ref_ok += reference.decode_succeeds(errs.flips()) as u64;
    }
    let ours = evaluate_with(&Decoder::Mwpm, d, &[p], trials, 3)
        .unwrap()
        .points
        .remove(0);
    let ref_rate = ref_ok as f64 / trials as f64;
    // Same draws; the two can differ only where several minimum matchings
    // fall in different classes.
    assert!(
        (ours.rate - ref_rate).abs() <= 0.01,
        "ours {} reference {ref_rate}",
        ours.rate
    );
    let (lo, hi) = wilson_interval(ref_ok, trials);
    assert!(ours.ci_lo <= hi && lo <= ours.ci_hi);
}

#[test]
fn path_orders_give_the_same_rate() {
    let (d, p, trials) = (5, 0.05, 100_000u64);
    let l = ToricLattice::new(d).unwrap();
    let (mut a, mut b) = (0u64, 0u64);
    for t in 0..trials {
        let errs = l
            .sample_errors_with(p, &mut trial_rng(11, d, 0, t))
            .unwrap();
        let syn = l.compute_syndrome(&errs);
        for (order, count) in [
            (PathOrder::RowFirst, &mut a),
            (PathOrder::ColumnFirst, &mut b),
        ] {
            let corr = mwpm_decode_with(l, &syn, order).unwrap();
            *count += l.is_success(&errs.xor(&corr)).unwrap() as u64;
        }
    }
    let (ra, rb) = (a as f64 / trials as f64, b as f64 / trials as f64);
    assert!((ra - rb).abs() <= 0.01, "{ra} vs {rb}");
}

#[test]
fn matching_success_falls_with_p() {
    let ps: Vec<f64> = (0..9).map(|i| 0.08 + 0.005 * i as f64).collect();
    let r = evaluate_with(&Decoder::Mwpm, 5, &ps, 20_000, 5).unwrap();
    for w in r.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let sigma = (a.rate * (1.0 - a.rate) / a.trials as f64
            + b.rate * (1.0 - b.rate) / b.trials as f64)
            .sqrt();
        assert!(
            b.rate <= a.rate + 3.0 * sigma,
            "p={} {} -> p={} {}",
            a.p,
            a.rate,
            b.p,
            b.rate
        );
        assert_eq!(a.histogram.values().sum::<u64>(), a.trials);
    }
}

#[test]
fn reference_decoder_fixes_single_errors() {
    for d in [3, 5, 7] {
        let reference = RefLattice { d };
        for q in 0..2 * d * d {
            let mut flips = vec![0u8; 2 * d * d];
            flips[q] = 1;
            assert!(reference.decode_succeeds(&flips));
        }
    }
}
