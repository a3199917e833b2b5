//! Round accounting over an execution.
//!
//! A round is the smallest execution fragment in which (i) every envelope in
//! transit at the round's start has been received and processed, and (ii)
//! every node whose input channels were all empty at the round's start has
//! since taken a step that fired a timeout or processed an envelope. Rounds
//! are an analysis device: the tracker observes the execution, it never
//! influences scheduling.

use std::collections::HashSet;

/// Raw per-step observation, also consumed by the independent checker in the
/// test suite.
#[derive(Clone, Debug)]
pub struct StepObservation {
    pub node: usize,
    /// Ids of envelopes dequeued this step (consumed or dropped).
    pub consumed_ids: Vec<u64>,
    pub timeout_fired: bool,
}

/// Snapshot taken at a round start.
#[derive(Clone, Debug)]
pub struct RoundStart {
    /// Every envelope id in transit.
    pub in_transit: Vec<u64>,
    /// Nodes with all input channels empty.
    pub all_empty_nodes: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct RoundTracker {
    outstanding: HashSet<u64>,
    must_act: HashSet<usize>,
    /// Step indices (1-based) at which each round completed.
    boundaries: Vec<u64>,
}

impl RoundTracker {
    pub fn new(start: RoundStart) -> Self {
        RoundTracker {
            outstanding: start.in_transit.into_iter().collect(),
            must_act: start.all_empty_nodes.into_iter().collect(),
            boundaries: Vec::new(),
        }
    }

    /// Feed one step; `step_index` is 1-based. Returns true when this step
    /// closed a round (the caller must then supply the next round's start
    /// snapshot via [`RoundTracker::begin_round`]).
    pub fn observe(&mut self, step_index: u64, obs: &StepObservation) -> bool {
        for id in &obs.consumed_ids {
            self.outstanding.remove(id);
        }
        if obs.timeout_fired || !obs.consumed_ids.is_empty() {
            self.must_act.remove(&obs.node);
        }
        if self.outstanding.is_empty() && self.must_act.is_empty() {
            self.boundaries.push(step_index);
            true
        } else {
            false
        }
    }

    pub fn begin_round(&mut self, start: RoundStart) {
        self.outstanding = start.in_transit.into_iter().collect();
        self.must_act = start.all_empty_nodes.into_iter().collect();
    }

    /// Completed round count.
    pub fn completed(&self) -> u64 {
        self.boundaries.len() as u64
    }

    pub fn boundaries(&self) -> &[u64] {
        &self.boundaries
    }

    /// Rounds fully completed strictly before the configuration reached after
    /// `step_index` steps.
    pub fn completed_before(&self, step_index: u64) -> u64 {
        self.boundaries.partition_point(|&b| b <= step_index) as u64
    }
}
