use serde::{Deserialize, Serialize};

/// Success rate as a function of p for one lattice size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub d: usize,
    /// `(p, success rate)`, any order.
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub d_small: usize,
    pub d_large: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdEstimate {
    Interval {
        lo: f64,
        hi: f64,
        crossings: Vec<Crossing>,
    },
    NoCrossing,
}

impl ThresholdEstimate {
    pub fn interval(&self) -> Option<(f64, f64)> {
        match *self {
            ThresholdEstimate::Interval { lo, hi, .. } => Some((lo, hi)),
            ThresholdEstimate::NoCrossing => None,
        }
    }
}

/// Crossings of `rate_large − rate_small` through zero along the shared p
/// grid of every pair of curves, located by linear interpolation between
/// adjacent grid points.
pub fn estimate_threshold(curves: &[Curve]) -> ThresholdEstimate {
    let mut crossings = Vec::new();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            if a.d == b.d {
                continue;
            }
            let (small, large) = if a.d < b.d { (a, b) } else { (b, a) };
            crossings.extend(pair_crossings(small, large));
        }
    }
    if crossings.is_empty() {
        return ThresholdEstimate::NoCrossing;
    }
    let lo = crossings.iter().map(|c| c.p).fold(f64::INFINITY, f64::min);
    let hi = crossings
        .iter()
        .map(|c| c.p)
        .fold(f64::NEG_INFINITY, f64::max);
    ThresholdEstimate::Interval { lo, hi, crossings }
}

fn pair_crossings(small: &Curve, large: &Curve) -> Vec<Crossing> {
    let mut diff: Vec<(f64, f64)> = small
        .points
        .iter()
        .filter_map(|&(p, s)| {
            large
                .points
                .iter()
                .find(|q| q.0 == p)
                .map(|&(_, l)| (p, l - s))
        })
        .collect();
    diff.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mk = |p| Crossing {
        d_small: small.d,
        d_large: large.d,
        p,
    };
    let mut out = Vec::new();
    for (k, &(p, v)) in diff.iter().enumerate() {
        if v == 0.0 {
            out.push(mk(p));
            continue;
        }
        if let Some(&(p2, v2)) = diff.get(k + 1) {
            if v2 != 0.0 && (v > 0.0) != (v2 > 0.0) {
                out.push(mk(p + (p2 - p) * v / (v - v2)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(d: usize, f: impl Fn(f64) -> f64) -> Curve {
        Curve {
            d,
            points: (0..9)
                .map(|i| 0.08 + 0.005 * i as f64)
                .map(|p| (p, f(p)))
                .collect(),
        }
    }

    #[test]
    fn synthetic_crossing_at_a_tenth() {
        let a = line(3, |p| 0.8 - 2.0 * (p - 0.1));
        let b = line(5, |p| 0.8 - 4.0 * (p - 0.1));
        let est = estimate_threshold(&[a, b]);
        let (lo, hi) = est.interval().unwrap();
        assert!((lo - 0.1).abs() < 1e-12 && (hi - 0.1).abs() < 1e-12);
    }

    #[test]
    fn interpolates_between_grid_points() {
        let a = Curve {
            d: 3,
            points: vec![(0.1, 0.5), (0.2, 0.4)],
        };
        let b = Curve {
            d: 5,
            points: vec![(0.1, 0.6), (0.2, 0.2)],
        };
        // diff 0.1 -> -0.2, zero a third of the way along.
        let (lo, _) = estimate_threshold(&[a, b]).interval().unwrap();
        assert!((lo - (0.1 + 0.1 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn parallel_curves_do_not_cross() {
        let a = line(3, |p| 0.9 - p);
        let b = line(5, |p| 0.95 - p);
        assert_eq!(estimate_threshold(&[a, b]), ThresholdEstimate::NoCrossing);
        assert_eq!(
            estimate_threshold(&[line(3, |p| p)]),
            ThresholdEstimate::NoCrossing
        );
    }

    #[test]
    fn interval_spans_all_pairs() {
        let a = line(3, |p| 1.0 - (p - 0.09));
        let b = line(5, |p| 1.0 - 2.0 * (p - 0.09));
        let c = line(7, |p| 1.0 - 3.0 * (p - 0.09));
        let est = estimate_threshold(&[a, b, c]);
        let (lo, hi) = est.interval().unwrap();
        assert!((lo - 0.09).abs() < 1e-12 && (hi - 0.09).abs() < 1e-12);
        // d=7 now meets d=3 at 0.1 and d=5 at 0.105.
        let shifted = line(7, |p| 1.39 - 4.0 * p);
        let est = estimate_threshold(&[
            line(3, |p| 1.0 - (p - 0.09)),
            line(5, |p| 1.0 - 2.0 * (p - 0.09)),
            shifted,
        ]);
        let (lo, hi) = est.interval().unwrap();
        assert!(
            (lo - 0.09).abs() < 1e-9 && (hi - 0.105).abs() < 1e-9,
            "{lo} {hi}"
        );
    }
}
