use std::collections::VecDeque;

use crate::topology::{neighbor_ids, BscId, ChannelLedger, NetworkTopology};
use crate::traffic::{average_arrival_range, CallRequest};

use super::{
    blocked_record, home_record, CallRecord, Disposition, EngineError, EngineParams,
    SimulationReport, System,
};

/// Round-robin quantum: mean arrival range divided by ready-queue size.
pub fn compute_quantum(
    avg_arrival_range_ms: f64,
    ready_queue_size: f64,
) -> Result<f64, EngineError> {
    if !(avg_arrival_range_ms > 0.0 && ready_queue_size > 0.0)
        || !avg_arrival_range_ms.is_finite()
        || !ready_queue_size.is_finite()
    {
        return Err(EngineError::NonPositiveQuantumInput {
            avg_arrival_range_ms,
            ready_queue_size,
        });
    }
    Ok(avg_arrival_range_ms / ready_queue_size)
}

/// Cost of one slice: the quantum plus the context switch that follows it.
pub fn slice_execution_time(quantum_ms: f64, context_switch_ms: f64) -> f64 {
    quantum_ms + context_switch_ms
}

/// Slices a call with `demand_ms` of work needs at `quantum_ms` per slice.
pub fn slices_needed(demand_ms: f64, quantum_ms: f64) -> u32 {
    ((demand_ms / quantum_ms).ceil() as u32).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueEntry {
    /// Position of the call in the workload.
    pub index: usize,
    pub call_id: u32,
    pub demand_ms: f64,
    pub slices_served: u32,
    slices_total: u32,
}

impl QueueEntry {
    pub fn remaining_demand_ms(&self, quantum_ms: f64) -> f64 {
        self.demand_ms - f64::from(self.slices_served) * quantum_ms
    }

    pub fn slices_left(&self) -> u32 {
        self.slices_total - self.slices_served
    }

    pub fn is_finished(&self) -> bool {
        self.slices_served >= self.slices_total
    }
}

/// FIFO of overflow calls. Unfinished calls go back to the tail.
#[derive(Debug, Clone)]
pub struct ReadyQueue {
    entries: VecDeque<QueueEntry>,
    quantum_ms: f64,
    context_switch_ms: f64,
}

impl ReadyQueue {
    pub fn new(quantum_ms: f64, context_switch_ms: f64) -> Self {
        debug_assert!(quantum_ms > 0.0 && context_switch_ms >= 0.0);
        ReadyQueue {
            entries: VecDeque::new(),
            quantum_ms,
            context_switch_ms,
        }
    }

    pub fn quantum_ms(&self) -> f64 {
        self.quantum_ms
    }

    pub fn slice_cost_ms(&self) -> f64 {
        slice_execution_time(self.quantum_ms, self.context_switch_ms)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn enqueue(&mut self, index: usize, call: &CallRequest) {
        self.entries.push_back(QueueEntry {
            index,
            call_id: call.id,
            demand_ms: call.demand_ms,
            slices_served: 0,
            slices_total: slices_needed(call.demand_ms, self.quantum_ms),
        });
    }

    /// `(call id, remaining demand)` for each queued call, head first.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries
            .iter()
            .map(|e| (e.call_id, e.remaining_demand_ms(self.quantum_ms)))
    }

    /// Gives the head call one quantum. Returns it if its demand is now
    /// met; otherwise it is moved to the tail and `None` is returned.
    pub fn serve_head(&mut self) -> Option<QueueEntry> {
        let mut head = self.entries.pop_front()?;
        head.slices_served += 1;
        if head.is_finished() {
            Some(head)
        } else {
            self.entries.push_back(head);
            None
        }
    }

    pub fn drain(&mut self) -> impl Iterator<Item = QueueEntry> + '_ {
        self.entries.drain(..)
    }

    /// Applies, in one step, the whole rounds ahead in which no call
    /// finishes. Such rounds leave the queue order intact, so the outcome is
    /// the same as serving them slice by slice.
    pub fn skip_idle_rounds(&mut self) {
        match self.entries.front() {
            Some(head) if head.slices_left() > 1 => {}
            _ => return,
        }
        let Some(min_left) = self.entries.iter().map(QueueEntry::slices_left).min() else {
            return;
        };
        if min_left > 1 {
            let rounds = min_left - 1;
            for e in &mut self.entries {
                e.slices_served += rounds;
            }
        }
    }
}

/// Cycles through neighbor BSCs, skipping any without a free channel.
#[derive(Debug, Clone)]
pub struct NeighborRotation {
    order: Vec<BscId>,
    next: usize,
}

impl NeighborRotation {
    pub fn new(order: Vec<BscId>) -> Self {
        NeighborRotation { order, next: 0 }
    }

    pub fn any_free(&self, ledger: &ChannelLedger) -> bool {
        self.order.iter().any(|&b| ledger.has_free(b))
    }

    /// Picks the next neighbor with a free channel and advances past it.
    pub fn next_free(&mut self, ledger: &ChannelLedger) -> Option<BscId> {
        let len = self.order.len();
        (0..len)
            .map(|k| (self.next + k) % len)
            .find(|&i| ledger.has_free(self.order[i]))
            .map(|i| {
                self.next = (i + 1) % len;
                self.order[i]
            })
    }
}

/// Load-balanced admission. Home overflow is queued, serviced round-robin,
/// and each call whose demand is met is handed to the next neighbor BSC in
/// rotation. Once every neighbor is full the remaining queue is blocked.
pub fn simulate_load_balanced(
    topology: &NetworkTopology,
    calls: &[CallRequest],
    params: &EngineParams,
) -> Result<SimulationReport, EngineError> {
    debug_assert!(calls
        .windows(2)
        .all(|w| w[0].arrival_time_ms <= w[1].arrival_time_ms));

    let mut ledger = ChannelLedger::new(topology);
    let mut records: Vec<Option<CallRecord>> = vec![None; calls.len()];

    let home_count = calls.len().min(topology.home_channels() as usize);
    for (slot, call) in records.iter_mut().zip(&calls[..home_count]) {
        ledger
            .assign(BscId::HOME)
            .expect("home capacity checked above");
        *slot = Some(home_record(call, params));
    }

    let overflow = &calls[home_count..];
    let mut quantum_ms = None;
    if !overflow.is_empty() {
        let quantum = match params.quantum_override_ms {
            Some(q) => q,
            None => compute_quantum(average_arrival_range(overflow)?, overflow.len() as f64)?,
        };
        quantum_ms = Some(quantum);

        let mut queue = ReadyQueue::new(quantum, params.context_switch_ms);
        for (offset, call) in overflow.iter().enumerate() {
            queue.enqueue(home_count + offset, call);
        }
        let slice_cost = queue.slice_cost_ms();
        let mut rotation = NeighborRotation::new(neighbor_ids(topology));

        while !queue.is_empty() {
            if !rotation.any_free(&ledger) {
                for entry in queue.drain() {
                    records[entry.index] = Some(blocked_record(&calls[entry.index], params));
                }
                break;
            }
            queue.skip_idle_rounds();
            let Some(done) = queue.serve_head() else {
                continue;
            };
            let call = &calls[done.index];
            records[done.index] = Some(match rotation.next_free(&ledger) {
                Some(bsc) => {
                    ledger.assign(bsc).expect("rotation only yields free BSCs");
                    CallRecord {
                        call_id: call.id,
                        disposition: Disposition::HandedOver,
                        serving_bsc: Some(bsc),
                        execution_time_ms: f64::from(done.slices_served) * slice_cost,
                        slices_used: done.slices_served,
                    }
                }
                None => blocked_record(call, params),
            });
        }
    }

    let records = records
        .into_iter()
        .map(|r| r.expect("every call receives a disposition"))
        .collect();
    Ok(SimulationReport::from_records(
        System::LoadBalanced,
        topology,
        records,
        quantum_ms,
    ))
}
