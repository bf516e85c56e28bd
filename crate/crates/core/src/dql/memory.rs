use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::Syndrome;

/// One stored transition. `action` is the absolute qubit index flipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Experience {
    pub state: Syndrome,
    pub action: usize,
    pub reward: f64,
    pub next_state: Syndrome,
    pub terminal: bool,
}

/// Bounded FIFO replay buffer.
#[derive(Clone, Debug)]
pub struct ReplayMemory {
    capacity: usize,
    buf: VecDeque<Experience>,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            buf: VecDeque::with_capacity(capacity.min(1 << 16)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Appends, evicting the oldest entry when full.
    pub fn push(&mut self, e: Experience) {
        if self.buf.len() == self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(e);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Experience> {
        self.buf.iter()
    }

    /// `n` distinct entries chosen uniformly (fewer if the buffer is smaller).
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<&Experience> {
        let n = n.min(self.buf.len());
        index::sample(rng, self.buf.len(), n)
            .into_iter()
            .map(|i| &self.buf[i])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ToricLattice;
    use crate::rng;

    fn exp(tag: usize) -> Experience {
        let l = ToricLattice::new(3).unwrap();
        Experience {
            state: l.empty_syndrome(),
            action: tag,
            reward: 0.0,
            next_state: l.empty_syndrome(),
            terminal: true,
        }
    }

    #[test]
    fn evicts_oldest_first_and_keeps_order() {
        let mut m = ReplayMemory::new(5);
        for i in 0..8 {
            m.push(exp(i));
        }
        assert_eq!(m.len(), 5);
        assert_eq!(
            m.iter().map(|e| e.action).collect::<Vec<_>>(),
            vec![3, 4, 5, 6, 7]
        );
    }

    #[test]
    fn batch_has_no_repeats() {
        let mut m = ReplayMemory::new(100);
        for i in 0..40 {
            m.push(exp(i));
        }
        let mut r = rng::seeded(1);
        for _ in 0..200 {
            let mut ids: Vec<usize> = m.sample(32, &mut r).iter().map(|e| e.action).collect();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), 32);
        }
        assert_eq!(m.sample(64, &mut r).len(), 40);
    }

    #[test]
    fn sampling_is_roughly_uniform() {
        let mut m = ReplayMemory::new(10);
        for i in 0..10 {
            m.push(exp(i));
        }
        let mut r = rng::seeded(2);
        let mut counts = [0usize; 10];
        for _ in 0..20_000 {
            for e in m.sample(3, &mut r) {
                counts[e.action] += 1;
            }
        }
        // Expected 6000 each; binomial σ ≈ 65.
        for c in counts {
            assert!((c as i64 - 6000).abs() < 400, "{counts:?}");
        }
    }
}
