//! Self-stabilizing spanning-DAG orientation by bit-serial identifier
//! comparison.
//!
//! Each node walks a level counter `cnt` over the one-bits of its identifier,
//! queries every still-undecided neighbor for the position of their `cnt`-th
//! one-bit, and commits the link orientation at the first level where the
//! positions differ. The pass restarts indefinitely; replies for a level other
//! than the current counter are discarded, which is what lets the protocol
//! shed arbitrary initial channel garbage.

use crate::ident::{bit_index, Identifier, EXHAUSTED};
use crate::message::Envelope;
use crate::topology::PortId;
use rand::Rng;
use std::collections::BTreeSet;

/// Messages produced by one handler invocation, in send order.
pub type Outbox = Vec<(PortId, Envelope)>;

/// Per-node state of the orientation layer. All maps are port-indexed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DagState {
    /// Current comparison level, in `[1, bit_length(id)]`.
    pub cnt: i64,
    /// Ports whose answer for the current level is still outstanding.
    pub wait: BTreeSet<PortId>,
    /// Per-port outcome of the current pass; `None` = still undecided.
    pub tmp: Vec<Option<bool>>,
    /// Committed orientation: `true` means the neighbor's identifier is greater.
    pub ord: Vec<bool>,
}

impl DagState {
    /// The clean initial state: pass about to begin, nothing decided.
    pub fn clean(degree: usize) -> Self {
        DagState {
            cnt: 1,
            wait: (0..degree).collect(),
            tmp: vec![None; degree],
            ord: vec![false; degree],
        }
    }

    /// Arbitrary state with every field drawn from its declared domain.
    pub fn random<R: Rng>(degree: usize, id: Identifier, rng: &mut R) -> Self {
        DagState {
            cnt: rng.gen_range(1..=id.bit_length() as i64),
            wait: (0..degree).filter(|_| rng.gen_bool(0.5)).collect(),
            tmp: (0..degree)
                .map(|_| match rng.gen_range(0..3) {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                })
                .collect(),
            ord: (0..degree).map(|_| rng.gen_bool(0.5)).collect(),
        }
    }

    /// Begin a new comparison pass. `ord` deliberately persists.
    pub fn restart(&mut self, degree: usize) {
        self.cnt = 1;
        self.wait = (0..degree).collect();
        for t in self.tmp.iter_mut() {
            *t = None;
        }
    }

    /// Advance the pass if the current level is fully answered, then (re)send
    /// the current level's query to every port still waiting.
    pub fn step(&mut self, id: Identifier, degree: usize) -> Outbox {
        if self.wait.is_empty() {
            if self.cnt < id.bit_length() as i64 {
                self.cnt += 1;
                self.wait = (0..degree).filter(|&p| self.tmp[p].is_none()).collect();
            } else {
                self.restart(degree);
            }
        }
        self.wait
            .iter()
            .map(|&p| (p, Envelope::Query { level: self.cnt }))
            .collect()
    }

    /// Answer a query for level `level` with the truthful bit position, then
    /// take a step. Tolerates any adversarial level (answered with -1).
    pub fn on_query(
        &mut self,
        id: Identifier,
        degree: usize,
        level: i64,
        from: PortId,
    ) -> Outbox {
        let bit = bit_index(id, level);
        let mut out = vec![(from, Envelope::Reply { level, bit })];
        out.extend(self.step(id, degree));
        out
    }

    /// Process a reply. Replies from ports not waited on, or for a level other
    /// than the current counter, are discarded; a step runs either way.
    pub fn on_reply(
        &mut self,
        id: Identifier,
        degree: usize,
        level: i64,
        bit: i64,
        from: PortId,
    ) -> Outbox {
        if self.wait.contains(&from) && level == self.cnt {
            self.wait.remove(&from);
            let mine = bit_index(id, self.cnt);
            if bit > mine {
                self.ord[from] = true;
                self.tmp[from] = Some(true);
            } else if bit < mine || bit == EXHAUSTED {
                self.ord[from] = false;
                self.tmp[from] = Some(false);
            }
            // equal positions: comparison continues at the next level
        }
        self.step(id, degree)
    }

    /// Do-forever escape from message-less deadlock: just a step.
    pub fn on_timeout(&mut self, id: Identifier, degree: usize) -> Outbox {
        self.step(id, degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn id(v: u64) -> Identifier {
        Identifier::new(v)
    }

    #[test]
    fn restart_resets_pass_but_preserves_ord() {
        let mut s = DagState {
            cnt: 3,
            wait: BTreeSet::new(),
            tmp: vec![Some(true), Some(false), None],
            ord: vec![true, false, true],
        };
        let before_ord = s.ord.clone();
        s.restart(3);
        assert_eq!(s.cnt, 1);
        assert_eq!(s.wait, (0..3).collect());
        assert!(s.tmp.iter().all(Option::is_none));
        assert_eq!(s.ord, before_ord);
    }

    #[test]
    fn restart_on_no_ports() {
        let mut s = DagState::clean(0);
        s.restart(0);
        assert!(s.wait.is_empty());
    }

    #[test]
    fn step_with_pending_wait_only_resends() {
        let mut s = DagState::clean(2);
        s.cnt = 3;
        s.wait = [0].into_iter().collect();
        let before = s.clone();
        let out = s.step(id(10), 2);
        assert_eq!(s, before);
        assert_eq!(out, vec![(0, Envelope::Query { level: 3 })]);
    }

    #[test]
    fn step_advances_level_over_undecided_ports() {
        let mut s = DagState::clean(2);
        s.cnt = 1;
        s.wait.clear();
        s.tmp = vec![None, Some(true)];
        let out = s.step(id(10), 2); // bit_length(10) = 4
        assert_eq!(s.cnt, 2);
        assert_eq!(s.wait, [0].into_iter().collect());
        assert_eq!(out, vec![(0, Envelope::Query { level: 2 })]);
    }

    #[test]
    fn step_restarts_at_counter_ceiling() {
        let mut s = DagState::clean(3);
        s.cnt = 4; // bit_length(10) = 4
        s.wait.clear();
        s.tmp = vec![Some(true), Some(false), Some(true)];
        let out = s.step(id(10), 3);
        assert_eq!(s.cnt, 1);
        assert_eq!(s.wait, (0..3).collect());
        assert!(s.tmp.iter().all(Option::is_none));
        assert_eq!(
            out,
            (0..3).map(|p| (p, Envelope::Query { level: 1 })).collect::<Vec<_>>()
        );
    }

    #[test]
    fn query_is_answered_then_step_runs() {
        let mut s = DagState::clean(2);
        s.wait = [1].into_iter().collect();
        let out = s.on_query(id(10), 2, 1, 0);
        assert_eq!(out[0], (0, Envelope::Reply { level: 1, bit: 4 }));
        assert_eq!(out[1], (1, Envelope::Query { level: 1 }));
    }

    #[test]
    fn exhausted_and_adversarial_queries_answered_with_sentinel() {
        let mut s = DagState::clean(1);
        let out = s.on_query(id(10), 1, 99, 0);
        assert_eq!(out[0], (0, Envelope::Reply { level: 99, bit: -1 }));
        let out = s.on_query(id(10), 1, -5, 0);
        assert_eq!(out[0], (0, Envelope::Reply { level: -5, bit: -1 }));
    }

    #[test]
    fn reply_commits_greater_neighbor() {
        // id 10 at level 2 has bit position 2; neighbor (id 12) answers 3.
        let mut s = DagState::clean(1);
        s.cnt = 2;
        s.wait = [0].into_iter().collect();
        s.on_reply(id(10), 1, 2, 3, 0);
        assert_eq!(s.ord[0], true);
        assert_eq!(s.tmp[0], Some(true));
        assert!(!s.wait.contains(&0));
    }

    #[test]
    fn reply_commits_smaller_neighbor() {
        // id 12 at level 2 has bit position 3; neighbor (id 10) answers 2.
        let mut s = DagState::clean(1);
        s.cnt = 2;
        s.wait = [0].into_iter().collect();
        s.on_reply(id(12), 1, 2, 2, 0);
        assert_eq!(s.ord[0], false);
        assert_eq!(s.tmp[0], Some(false));
    }

    #[test]
    fn stale_reply_is_discarded_but_step_runs() {
        let mut s = DagState::clean(1);
        s.cnt = 2;
        s.wait = [0].into_iter().collect();
        let before = (s.wait.clone(), s.tmp.clone(), s.ord.clone());
        let out = s.on_reply(id(10), 1, 5, 1, 0);
        assert_eq!((s.wait.clone(), s.tmp.clone(), s.ord.clone()), before);
        assert!(!out.is_empty()); // step still resends the pending query
    }

    #[test]
    fn equal_bits_shrink_wait_without_committing() {
        let mut s = DagState::clean(1);
        s.cnt = 1;
        s.wait = [0].into_iter().collect();
        let ord_before = s.ord.clone();
        s.on_reply(id(10), 1, 1, 4, 0); // Bit(10,1) = 4 = B
        // tie: no commit; the step that follows advances the level and
        // re-includes the undecided port
        assert_eq!(s.tmp[0], None);
        assert_eq!(s.ord, ord_before);
        assert_eq!(s.cnt, 2);
        assert!(s.wait.contains(&0));
    }

    #[test]
    fn exhausted_reply_means_smaller_neighbor() {
        // 8 = 1000₂ vs 12 = 1100₂ at level 2: Bit(8,2) = -1 < Bit(12,2) = 3.
        let mut s = DagState::clean(1);
        s.cnt = 2;
        s.wait = [0].into_iter().collect();
        s.on_reply(id(12), 1, 2, -1, 0);
        assert_eq!(s.ord[0], false);
        assert_eq!(s.tmp[0], Some(false));
    }

    #[test]
    fn repeated_timeouts_cycle_through_restart() {
        let mut s = DagState::clean(2);
        s.wait.clear();
        let mut seen_restart = false;
        for _ in 0..3 * id(10).bit_length() as usize {
            let out = s.on_timeout(id(10), 2);
            for (_, env) in &out {
                assert!(matches!(env, Envelope::Query { level } if *level == s.cnt));
            }
            if s.cnt == 1 && s.wait.len() == 2 {
                seen_restart = true;
            }
            // deliver nothing; drain wait artificially to let cnt advance
            s.wait.clear();
        }
        assert!(seen_restart);
    }

    proptest! {
        #[test]
        fn random_init_stays_in_domain(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let idv = id(rng.gen_range(1..=4096));
            let degree = rng.gen_range(1..6usize);
            let s = DagState::random(degree, idv, &mut rng);
            prop_assert!(s.cnt >= 1 && s.cnt <= idv.bit_length() as i64);
            prop_assert!(s.wait.iter().all(|&p| p < degree));
            prop_assert_eq!(s.tmp.len(), degree);
            prop_assert_eq!(s.ord.len(), degree);
        }

        #[test]
        fn cnt_never_leaves_its_domain_under_arbitrary_events(
            seed in 0u64..500,
            raw_id in 1u64..=4096,
            events in proptest::collection::vec((0u8..3, -4i64..20, -4i64..20, 0usize..3), 1..60),
        ) {
            let idv = id(raw_id);
            let degree = 3usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = DagState::random(degree, idv, &mut rng);
            for (kind, level, bit, port) in events {
                match kind {
                    0 => { s.on_query(idv, degree, level, port); }
                    1 => { s.on_reply(idv, degree, level, bit, port); }
                    _ => { s.on_timeout(idv, degree); }
                }
                prop_assert!(s.cnt >= 1 && s.cnt <= idv.bit_length() as i64);
                prop_assert!(s.wait.iter().all(|&p| p < degree));
            }
        }

        #[test]
        fn emitted_queries_carry_current_counter(
            raw_id in 1u64..=4096,
            level in -4i64..20,
            port in 0usize..3,
        ) {
            let idv = id(raw_id);
            let mut s = DagState::clean(3);
            let out = s.on_query(idv, 3, level, port);
            for (_, env) in out {
                if let Envelope::Query { level } = env {
                    prop_assert_eq!(level, s.cnt);
                }
            }
        }
    }
}
