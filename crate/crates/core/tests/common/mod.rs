//! Oracles shared by the integration tests. Everything here is written
//! from the lattice definition alone and does not call into the decoder
//! code it checks.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use toric_lab::lattice::{ErrorState, Syndrome, ToricLattice};
use toric_lab::mwpm::mwpm_decode;
use toric_lab::perspective::{make_perspectives, resolve_action, ActionId};
use toric_lab::qnet::{ConvSpec, QNetwork, QNetworkConfig};

/// Minimum total weight over all perfect matchings, by recursion on the
/// lowest unmatched node.
pub fn brute_force_min(w: &[Vec<i64>]) -> i64 {
    fn go(w: &[Vec<i64>], used: &mut [bool]) -> i64 {
        let Some(i) = used.iter().position(|&u| !u) else {
            return 0;
        };
        used[i] = true;
        let mut best = i64::MAX;
        for j in i + 1..w.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(w[i][j] + go(w, used));
                used[j] = false;
            }
        }
        used[i] = false;
        best
    }
    go(w, &mut vec![false; w.len()])
}

/// Maximum total weight over all (not necessarily perfect) matchings.
pub fn brute_force_max(w: &[Vec<Option<i64>>]) -> i64 {
    fn go(w: &[Vec<Option<i64>>], used: &mut [bool], from: usize) -> i64 {
        let Some(i) = (from..w.len()).find(|&i| !used[i]) else {
            return 0;
        };
        used[i] = true;
        let mut best = go(w, used, i + 1);
        for j in i + 1..w.len() {
            if let (false, Some(x)) = (used[j], w[i][j]) {
                used[j] = true;
                best = best.max(x + go(w, used, i + 1));
                used[j] = false;
            }
        }
        used[i] = false;
        best
    }
    go(w, &mut vec![false; w.len()], 0)
}

pub fn bfs_distance(l: ToricLattice, from: (usize, usize), to: (usize, usize)) -> usize {
    let d = l.d();
    let mut dist = vec![usize::MAX; d * d];
    let mut q = VecDeque::new();
    dist[from.0 * d + from.1] = 0;
    q.push_back(from);
    while let Some((r, c)) = q.pop_front() {
        let here = dist[r * d + c];
        for (nr, nc) in [
            ((r + 1) % d, c),
            ((r + d - 1) % d, c),
            (r, (c + 1) % d),
            (r, (c + d - 1) % d),
        ] {
            if dist[nr * d + nc] == usize::MAX {
                dist[nr * d + nc] = here + 1;
                q.push_back((nr, nc));
            }
        }
    }
    dist[to.0 * d + to.1]
}

pub fn random_syndrome(l: ToricLattice, n_defects: usize, rng: &mut impl Rng) -> Syndrome {
    let mut cells: Vec<(usize, usize)> = (0..l.d())
        .flat_map(|r| (0..l.d()).map(move |c| (r, c)))
        .collect();
    cells.shuffle(rng);
    Syndrome::from_defects(l, &cells[..n_defects]).unwrap()
}

pub fn random_errors(l: ToricLattice, rng: &mut impl Rng) -> ErrorState {
    let p = rng.gen_range(0.0..0.5);
    l.sample_errors_with(p, rng).unwrap()
}

/// Edge indices written out from the layout: `H(r,c) = r*d + c` is the top
/// edge of plaquette `(r,c)`, `V(r,c) = d*d + r*d + c` its left edge.
pub struct RefLattice {
    pub d: usize,
}

impl RefLattice {
    pub fn h(&self, r: usize, c: usize) -> usize {
        (r % self.d) * self.d + c % self.d
    }

    pub fn v(&self, r: usize, c: usize) -> usize {
        self.d * self.d + (r % self.d) * self.d + c % self.d
    }

    /// Plaquettes whose boundary has odd parity.
    pub fn defects(&self, flips: &[u8]) -> Vec<(usize, usize)> {
        let d = self.d;
        let mut out = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let s = flips[self.h(r, c)]
                    ^ flips[self.h(r + 1, c)]
                    ^ flips[self.v(r, c)]
                    ^ flips[self.v(r, c + 1)];
                if s == 1 {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Minimum-weight perfect matching by bitmask dynamic programming.
    pub fn matching(&self, nodes: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let n = nodes.len();
        let d = self.d;
        let dist = |a: (usize, usize), b: (usize, usize)| {
            let dr = a.0.abs_diff(b.0);
            let dc = a.1.abs_diff(b.1);
            dr.min(d - dr) + dc.min(d - dc)
        };
        let full = (1usize << n) - 1;
        let mut best = vec![usize::MAX; 1 << n];
        let mut choice = vec![0usize; 1 << n];
        best[full] = 0;
        for mask in (0..full).rev() {
            if mask.count_ones() % 2 == 1 {
                continue;
            }
            let i = (!mask).trailing_zeros() as usize;
            for j in i + 1..n {
                if mask & (1 << j) == 0 {
                    let next = mask | (1 << i) | (1 << j);
                    if best[next] != usize::MAX {
                        let w = dist(nodes[i], nodes[j]) + best[next];
                        if w < best[mask] {
                            best[mask] = w;
                            choice[mask] = j;
                        }
                    }
                }
            }
        }
        let mut pairs = Vec::new();
        let mut mask = 0;
        while mask != full {
            let i = (!mask).trailing_zeros() as usize;
            let j = choice[mask];
            pairs.push((i, j));
            mask |= (1 << i) | (1 << j);
        }
        pairs
    }

    /// Flips a shortest dual path between two plaquettes, vertical leg first.
    pub fn add_path(&self, flips: &mut [u8], a: (usize, usize), b: (usize, usize)) {
        let d = self.d as isize;
        let step = |from: usize, to: usize| {
            let fwd = (to as isize - from as isize).rem_euclid(d);
            if fwd <= d / 2 {
                fwd
            } else {
                fwd - d
            }
        };
        let (mut r, mut c) = (a.0 as isize, a.1 as isize);
        let dr = step(a.0, b.0);
        let dc = step(a.1, b.1);
        for _ in 0..dr.abs() {
            // Moving down crosses the bottom edge H(r+1, c); up crosses H(r, c).
            let crossing = if dr > 0 { r + 1 } else { r };
            flips[self.h(crossing.rem_euclid(d) as usize, c.rem_euclid(d) as usize)] ^= 1;
            r += dr.signum();
        }
        for _ in 0..dc.abs() {
            let crossing = if dc > 0 { c + 1 } else { c };
            flips[self.v(r.rem_euclid(d) as usize, crossing.rem_euclid(d) as usize)] ^= 1;
            c += dc.signum();
        }
    }

    /// Logical parities of a closed configuration on the column-`col` and
    /// row-`row` cuts.
    pub fn winding(&self, flips: &[u8], col: usize, row: usize) -> (u8, u8) {
        let h = (0..self.d).fold(0, |a, r| a ^ flips[self.v(r, col)]);
        let v = (0..self.d).fold(0, |a, c| a ^ flips[self.h(row, c)]);
        (h, v)
    }

    /// Full reference decode: true when the correction leaves no logical error.
    pub fn decode_succeeds(&self, errors: &[u8]) -> bool {
        let nodes = self.defects(errors);
        let mut combined = errors.to_vec();
        for (i, j) in self.matching(&nodes) {
            self.add_path(&mut combined, nodes[i], nodes[j]);
        }
        assert!(self.defects(&combined).is_empty());
        self.winding(&combined, self.d / 2, self.d - 1) == (0, 0)
    }
}

// Lattice properties, each returning whether it held for the given input.

pub fn parity_is_even(l: ToricLattice, e: &ErrorState) -> bool {
    l.compute_syndrome(e).defect_count().is_multiple_of(2)
}

pub fn flip_toggles_two_plaquettes(l: ToricLattice, e: &ErrorState, q: usize) -> bool {
    let before = l.compute_syndrome(e);
    let after = l.compute_syndrome(&l.apply_flip(e, q).unwrap());
    let mut expect = l.adjacent_plaquettes(q).to_vec();
    expect.sort();
    after.xor(&before).defects() == expect
}

/// XOR of random vertex stabilizers leaves a closed configuration closed and
/// in the same class.
pub fn stabilizers_preserve_homology(l: ToricLattice, e: &ErrorState, rng: &mut impl Rng) -> bool {
    let corr = mwpm_decode(l, &l.compute_syndrome(e)).unwrap();
    let closed = e.xor(&corr);
    let class = l.homology_class(&closed).unwrap();
    let mut moved = closed.clone();
    for _ in 0..rng.gen_range(1..=2 * l.d()) {
        let v = (rng.gen_range(0..l.d()), rng.gen_range(0..l.d()));
        for q in l.vertex_star(v) {
            moved.flip(q).unwrap();
        }
    }
    l.compute_syndrome(&moved).is_terminal() && l.homology_class(&moved).unwrap() == class
}

pub fn syndrome_is_translation_covariant(
    l: ToricLattice,
    e: &ErrorState,
    dr: isize,
    dc: isize,
) -> bool {
    l.compute_syndrome(&l.translate_errors(e, dr, dc)) == l.compute_syndrome(e).translate(dr, dc)
}

/// Every pair of cuts gives the same class for a closed configuration.
pub fn cuts_agree(l: ToricLattice, e: &ErrorState) -> bool {
    let closed = e.xor(&mwpm_decode(l, &l.compute_syndrome(e)).unwrap());
    let base = l.homology_class(&closed).unwrap();
    (0..l.d()).all(|k| {
        l.homology_class_on_cuts(&closed, k, (k * 2) % l.d())
            .unwrap()
            == base
    })
}

/// Perspectives undo to the source, and all of them carry the same defect
/// count with one defect on the centre.
pub fn perspectives_are_consistent(l: ToricLattice, e: &ErrorState) -> bool {
    let syn = l.compute_syndrome(e);
    if syn.is_terminal() {
        return make_perspectives(&syn).is_err();
    }
    let ps = make_perspectives(&syn).unwrap();
    let c = (l.d() / 2, l.d() / 2);
    ps.len() == syn.defect_count()
        && ps.iter().all(|p| {
            p.source() == syn
                && p.syndrome.get(c)
                && p.syndrome.defect_count() == syn.defect_count()
                && (0..4).all(|a| {
                    let q = resolve_action(p, toric_lab::ActionId::ALL[a]);
                    l.adjacent_plaquettes(q).contains(&p.origin)
                })
        })
}

// Q-network helpers.

/// Three 8-filter convolutions and two small dense layers.
pub fn tiny(d: usize) -> QNetworkConfig {
    let conv = ConvSpec {
        filters: 8,
        kernel: 3,
        stride: 2,
    };
    QNetworkConfig {
        d,
        conv: vec![conv; 3],
        fc: vec![8, 4],
        ..QNetworkConfig::standard(d)
    }
}

/// Random perspective-shaped grid: a defect on the centre plus noise.
pub fn random_grid(d: usize, rng: &mut impl Rng) -> Vec<u8> {
    let mut g: Vec<u8> = (0..d * d).map(|_| rng.gen_bool(0.3) as u8).collect();
    g[(d / 2) * d + d / 2] = 1;
    g
}

/// Largest relative error between backprop and central differences over
/// `draws` random tiny networks, inputs, actions and targets.
pub fn finite_difference_worst(draws: usize, seed: u64) -> f64 {
    let mut r = toric_lab::rng::seeded(seed);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for draw in 0..draws {
        let d = [3, 5, 7][draw % 3];
        let mut net = QNetwork::<f64>::new(tiny(d), r.gen()).unwrap();
        // Non-zero biases so that ReLUs are not all on their kink at init.
        for b in net.layout().layers.clone().iter().map(|l| l.bias_range()) {
            for x in &mut net.params_mut()[b] {
                *x = r.gen_range(-0.1..0.1);
            }
        }
        let grid = random_grid(d, &mut r);
        let action = ActionId::ALL[r.gen_range(0..4)];
        let target = r.gen_range(-2.0..2.0);
        let analytic = net.backward(&grid, action, target).unwrap();
        let loss = |n: &QNetwork<f64>| {
            let q = n.forward(&grid).unwrap()[action.index()];
            0.5 * (target - q) * (target - q)
        };
        for i in 0..net.param_count() {
            let x0 = net.params()[i];
            net.params_mut()[i] = x0 + h;
            let up = loss(&net);
            net.params_mut()[i] = x0 - h;
            let down = loss(&net);
            net.params_mut()[i] = x0;
            let numeric = (up - down) / (2.0 * h);
            let denom = analytic[i].abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((analytic[i] - numeric).abs() / denom);
        }
    }
    worst
}
