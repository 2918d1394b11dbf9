//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use cellsim::{
    build_topology, CallRequest, Disposition, EngineParams, NetworkTopology, TopologyConfig,
};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one call as decided by the flowchart walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkerOutcome {
    pub disposition: Disposition,
    pub bsc: Option<usize>,
    pub slices: u32,
}

#[derive(Debug, Clone, Copy)]
enum State {
    AdmitHome(usize),
    InitQueue,
    QueueEmpty,
    AnyNeighborFree,
    ServeSlice,
    Finished,
    FindNeighbor,
    BlockRest,
    Done,
}

/// Walks the load-balancing flowchart one box at a time: admit on home
/// until full, queue the rest, fix the quantum, then repeatedly give the
/// queue head one slice and either re-enqueue it or hand it to the next
/// neighbor with a free channel; when no neighbor is left, block the rest.
pub fn flowchart_walk(
    channels: &[u32],
    calls: &[CallRequest],
    quantum_override: Option<f64>,
) -> Vec<WalkerOutcome> {
    let mut free: Vec<u32> = channels.to_vec();
    let mut out: Vec<Option<WalkerOutcome>> = vec![None; calls.len()];
    // (call index, slices received)
    let mut queue: VecDeque<(usize, u32)> = VecDeque::new();
    let mut quantum = 0.0;
    let mut cursor = 0usize; // index into neighbors 1..len
    let neighbors = channels.len() - 1;
    let mut current: Option<(usize, u32)> = None;
    let mut state = State::AdmitHome(0);

    loop {
        state = match state {
            State::AdmitHome(i) if i == calls.len() => State::InitQueue,
            State::AdmitHome(i) => {
                if free[0] > 0 {
                    free[0] -= 1;
                    out[i] = Some(WalkerOutcome {
                        disposition: Disposition::AcceptedHome,
                        bsc: Some(0),
                        slices: 0,
                    });
                } else {
                    queue.push_back((i, 0));
                }
                State::AdmitHome(i + 1)
            }
            State::InitQueue => {
                if !queue.is_empty() {
                    quantum = match quantum_override {
                        Some(q) => q,
                        None => {
                            let total: f64 =
                                queue.iter().map(|&(i, _)| calls[i].arrival_time_ms).sum();
                            (total / queue.len() as f64) / queue.len() as f64
                        }
                    };
                }
                State::QueueEmpty
            }
            State::QueueEmpty => {
                if queue.is_empty() {
                    State::Done
                } else {
                    State::AnyNeighborFree
                }
            }
            State::AnyNeighborFree => {
                if free[1..].iter().any(|&f| f > 0) {
                    State::ServeSlice
                } else {
                    State::BlockRest
                }
            }
            State::ServeSlice => {
                let (i, got) = queue.pop_front().unwrap();
                current = Some((i, got + 1));
                State::Finished
            }
            State::Finished => {
                let (i, got) = current.unwrap();
                let needed = (calls[i].demand_ms / quantum).ceil();
                if f64::from(got) >= needed {
                    State::FindNeighbor
                } else {
                    queue.push_back((i, got));
                    current = None;
                    State::QueueEmpty
                }
            }
            State::FindNeighbor => {
                let (i, got) = current.take().unwrap();
                let mut chosen = None;
                for k in 0..neighbors {
                    let slot = (cursor + k) % neighbors;
                    if free[1 + slot] > 0 {
                        chosen = Some(slot);
                        break;
                    }
                }
                out[i] = Some(match chosen {
                    Some(slot) => {
                        free[1 + slot] -= 1;
                        cursor = (slot + 1) % neighbors;
                        WalkerOutcome {
                            disposition: Disposition::HandedOver,
                            bsc: Some(1 + slot),
                            slices: got,
                        }
                    }
                    None => blocked(),
                });
                State::QueueEmpty
            }
            State::BlockRest => {
                while let Some((i, _)) = queue.pop_front() {
                    out[i] = Some(blocked());
                }
                State::Done
            }
            State::Done => break,
        };
    }
    out.into_iter().map(Option::unwrap).collect()
}

fn blocked() -> WalkerOutcome {
    WalkerOutcome {
        disposition: Disposition::Blocked,
        bsc: None,
        slices: 0,
    }
}

pub fn topology(channels: &[u32]) -> NetworkTopology {
    let ch: Vec<i64> = channels.iter().map(|&c| i64::from(c)).collect();
    build_topology(&TopologyConfig::uniform(&ch, 7, 1.0)).unwrap()
}

/// Sorted calls with positive arrivals and per-call demands.
pub fn random_calls(rng: &mut ChaCha8Rng, n: usize, max_demand: f64) -> Vec<CallRequest> {
    let mut arrivals: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..500.0)).collect();
    arrivals.sort_by(f64::total_cmp);
    arrivals
        .into_iter()
        .enumerate()
        .map(|(i, t)| CallRequest {
            id: i as u32,
            arrival_time_ms: t,
            position: (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)),
            demand_ms: rng.random_range(0.01..max_demand),
        })
        .collect()
}

/// One small flowchart instance: topology, calls and engine parameters.
pub struct SmallInstance {
    pub channels: Vec<u32>,
    pub calls: Vec<CallRequest>,
    pub params: EngineParams,
}

/// Every topology with 2 or 3 BSCs and 0..=4 channels each, crossed with
/// every call count 0..=12. Demands and the quantum mode are seeded per
/// instance so that re-enqueueing and out-of-order completion both occur.
pub fn small_instances() -> Vec<SmallInstance> {
    let mut topologies: Vec<Vec<u32>> = Vec::new();
    for a in 0..=4 {
        for b in 0..=4 {
            topologies.push(vec![a, b]);
            for c in 0..=4 {
                topologies.push(vec![a, b, c]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_F10C);
    let mut out = Vec::new();
    for channels in topologies {
        for n in 0..=12 {
            let fixed = rng.random_bool(0.5);
            let calls = random_calls(&mut rng, n, if fixed { 4.0 } else { 300.0 });
            let params = EngineParams {
                quantum_override_ms: fixed.then_some(1.0),
                ..Default::default()
            };
            out.push(SmallInstance {
                channels: channels.clone(),
                calls,
                params,
            });
        }
    }
    out
}

/// Converts `num / den` to f64 keeping at least 64 significant bits in
/// the integer quotient.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = (den.bits() as i64 - num.bits() as i64 + 64).max(0) as u32;
    let q: BigUint = (num << shift) / den;
    let mut v = q.to_f64().unwrap();
    // Scale down in steps so intermediate powers stay representable.
    let mut s = shift as i32;
    while s > 0 {
        let step = s.min(1000);
        v *= 2f64.powi(-step);
        s -= step;
    }
    v
}

/// Erlang B by literal summation of `(A^N/N!) / Σ A^i/i!` in exact
/// integer arithmetic, with `A = a_num / a_den`.
///
/// Multiplying through by `a_den^N · N!` gives
/// `a_num^N / Σ_i a_num^i · a_den^(N-i) · N!/i!`.
pub fn erlang_b_direct(a_num: u64, a_den: u64, n: u32) -> f64 {
    let p = BigUint::from(a_num);
    let q = BigUint::from(a_den);
    let mut sum = BigUint::zero();
    for i in 0..=n {
        // N!/i! = (i+1)(i+2)...N
        let mut falling = BigUint::one();
        for k in (i + 1)..=n {
            falling *= k;
        }
        sum += p.pow(i) * q.pow(n - i) * falling;
    }
    let top = p.pow(n);
    if sum.is_zero() {
        return 1.0;
    }
    ratio_to_f64(&top, &sum)
}

/// Rational form of the grid loads used by the acceptance suite.
pub fn load_as_ratio(a: f64) -> (u64, u64) {
    let den = 10u64;
    let num = (a * den as f64).round() as u64;
    assert!(
        (num as f64 / den as f64 - a).abs() < 1e-12,
        "{a} not representable"
    );
    (num, den)
}
