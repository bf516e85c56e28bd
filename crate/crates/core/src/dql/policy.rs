use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Syndrome;
use crate::perspective::{make_perspectives, resolve_action, ActionId, Perspective};
use crate::qnet::QFunction;

/// An action chosen on a syndrome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    /// Absolute qubit to flip.
    pub qubit: usize,
    /// Index into the row-major perspective list.
    pub perspective: usize,
    pub action: ActionId,
}

fn check_d<Q: QFunction + ?Sized>(net: &Q, syn: &Syndrome) -> Result<()> {
    if net.d() != syn.d() {
        return Err(Error::DimensionMismatch {
            expected: net.d(),
            found: syn.d(),
        });
    }
    Ok(())
}

/// Perspectives of `syn` and their q-values.
pub fn perspective_q_values<Q: QFunction + ?Sized>(
    net: &Q,
    syn: &Syndrome,
) -> Result<(Vec<Perspective>, Vec<[f64; 4]>)> {
    check_d(net, syn)?;
    let ps = make_perspectives(syn)?;
    let grids: Vec<u8> = ps.iter().flat_map(|p| p.grid().iter().copied()).collect();
    let q = net.q_values(&grids)?;
    Ok((ps, q))
}

/// Index of the largest value in perspective-major order; the first wins ties.
fn argmax(q: &[[f64; 4]]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_q = f64::NEG_INFINITY;
    for (i, row) in q.iter().enumerate() {
        for (a, &v) in row.iter().enumerate() {
            if v > best_q {
                best_q = v;
                best = (i, a);
            }
        }
    }
    best
}

/// ε-greedy choice over every (perspective, action) pair of `syn`.
pub fn select_action<Q: QFunction + ?Sized, R: Rng + ?Sized>(
    net: &Q,
    syn: &Syndrome,
    eps: f64,
    rng: &mut R,
) -> Result<Choice> {
    check_d(net, syn)?;
    if eps > 0.0 && rng.gen::<f64>() < eps {
        let ps = make_perspectives(syn)?;
        let k = rng.gen_range(0..4 * ps.len());
        let (i, a) = (k / 4, ActionId::ALL[k % 4]);
        return Ok(Choice {
            qubit: resolve_action(&ps[i], a),
            perspective: i,
            action: a,
        });
    }
    let (ps, q) = perspective_q_values(net, syn)?;
    let (i, a) = argmax(&q);
    let a = ActionId::ALL[a];
    Ok(Choice {
        qubit: resolve_action(&ps[i], a),
        perspective: i,
        action: a,
    })
}

/// Largest q-value over all perspectives and actions; 0 on a terminal state.
pub fn q_max<Q: QFunction + ?Sized>(net: &Q, syn: &Syndrome) -> Result<f64> {
    Ok(q_max_batch(net, &[syn])?[0])
}

/// [`q_max`] for many states with a single network call.
pub fn q_max_batch<Q: QFunction + ?Sized>(net: &Q, states: &[&Syndrome]) -> Result<Vec<f64>> {
    let (counts, q) = batched(net, states)?;
    let mut out = Vec::with_capacity(states.len());
    let mut at = 0;
    for n in counts {
        let v = q[at..at + n]
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(if n == 0 { 0.0 } else { v });
        at += n;
    }
    Ok(out)
}

/// Value under `target` of the action `active` would pick; 0 on a terminal state.
pub fn double_dqn_target<A: QFunction + ?Sized, T: QFunction + ?Sized>(
    active: &A,
    target: &T,
    syn: &Syndrome,
) -> Result<f64> {
    Ok(double_dqn_batch(active, target, &[syn])?[0])
}

pub fn double_dqn_batch<A: QFunction + ?Sized, T: QFunction + ?Sized>(
    active: &A,
    target: &T,
    states: &[&Syndrome],
) -> Result<Vec<f64>> {
    let (counts, qa) = batched(active, states)?;
    let (_, qt) = batched(target, states)?;
    let mut out = Vec::with_capacity(states.len());
    let mut at = 0;
    for n in counts {
        if n == 0 {
            out.push(0.0);
        } else {
            let (i, a) = argmax(&qa[at..at + n]);
            out.push(qt[at + i][a]);
        }
        at += n;
    }
    Ok(out)
}

/// Q-values for all perspectives of all non-terminal states in one call,
/// with the number of perspectives per state.
fn batched<Q: QFunction + ?Sized>(
    net: &Q,
    states: &[&Syndrome],
) -> Result<(Vec<usize>, Vec<[f64; 4]>)> {
    let mut grids = Vec::new();
    let mut counts = Vec::with_capacity(states.len());
    for s in states {
        check_d(net, s)?;
        if s.is_terminal() {
            counts.push(0);
            continue;
        }
        let ps = make_perspectives(s)?;
        counts.push(ps.len());
        for p in &ps {
            grids.extend_from_slice(p.grid());
        }
    }
    let q = if grids.is_empty() {
        Vec::new()
    } else {
        net.q_values(&grids)?
    };
    Ok((counts, q))
}
