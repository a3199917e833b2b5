//! Self-stabilizing (Δ+1) vertex coloring on top of the DAG orientation.
//!
//! Every step a node broadcasts its color toward the neighbors involved; when
//! it learns a neighbor shares its color, the orientation decides who yields:
//! only the endpoint whose conflicting neighbors all have greater identifiers
//! recolors, picking the smallest color absent from its neighbor cache.

use crate::dag::Outbox;
use crate::message::Envelope;
use crate::topology::PortId;
use rand::Rng;

/// Per-node state of the coloring layer.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColorState {
    /// Own color, in `[1, degree + 1]`.
    pub color: i64,
    /// Last color heard from each port; `None` = unknown. Adversarial values
    /// are cached verbatim.
    pub cache: Vec<Option<i64>>,
}

impl ColorState {
    pub fn clean(degree: usize) -> Self {
        ColorState {
            color: 1,
            cache: vec![None; degree],
        }
    }

    /// Arbitrary state: own color anywhere in `[1, degree+1]`, cache entries
    /// unknown or anywhere in `[1, Δ+1]`.
    pub fn random<R: Rng>(degree: usize, max_degree: usize, rng: &mut R) -> Self {
        ColorState {
            color: rng.gen_range(1..=degree as i64 + 1),
            cache: (0..degree)
                .map(|_| {
                    if rng.gen_bool(0.4) {
                        None
                    } else {
                        Some(rng.gen_range(1..=max_degree as i64 + 1))
                    }
                })
                .collect(),
        }
    }

    /// Conflict resolution, triggered by port `trigger` (whose cached color
    /// equals ours, or by the timeout path). Recolors only when the whole
    /// cache is known and every conflicting neighbor has a greater identifier.
    pub fn conflict(&mut self, ord: &[bool], degree: usize, trigger: PortId) -> Outbox {
        let may_recolor = (0..degree).all(|w| match self.cache[w] {
            None => false,
            Some(c) => c != self.color || ord[w],
        });
        if may_recolor {
            let palette = 1..=degree as i64 + 1;
            self.color = palette
                .clone()
                .find(|c| !self.cache.iter().any(|&cached| cached == Some(*c)))
                .expect("degree+1 colors minus at most degree cached values");
            (0..degree)
                .map(|w| (w, Envelope::Color { color: self.color }))
                .collect()
        } else {
            vec![(trigger, Envelope::Color { color: self.color })]
        }
    }

    /// Record a neighbor's announced color; resolve or echo.
    pub fn on_color(
        &mut self,
        ord: &[bool],
        degree: usize,
        color: i64,
        from: PortId,
    ) -> Outbox {
        self.cache[from] = Some(color);
        if self.cache[from] == Some(self.color) {
            self.conflict(ord, degree, from)
        } else {
            vec![(from, Envelope::Color { color: self.color })]
        }
    }

    /// Do-forever refresh toward every empty input port. A recolor mid-loop
    /// applies to the remaining ports of the same invocation.
    pub fn on_timeout(&mut self, ord: &[bool], degree: usize, empty_ports: &[PortId]) -> Outbox {
        let mut out = Outbox::new();
        for &u in empty_ports {
            if self.cache[u] == Some(self.color) {
                out.extend(self.conflict(ord, degree, u));
            } else {
                out.push((u, Envelope::Color { color: self.color }));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recolor_picks_smallest_free_color_and_broadcasts() {
        let mut s = ColorState {
            color: 5,
            cache: vec![Some(5), Some(5)],
        };
        let out = s.conflict(&[true, true], 2, 0);
        assert_eq!(s.color, 1);
        assert_eq!(
            out,
            vec![(0, Envelope::Color { color: 1 }), (1, Envelope::Color { color: 1 })]
        );
    }

    #[test]
    fn unknown_cache_entry_blocks_recolor() {
        let mut s = ColorState {
            color: 2,
            cache: vec![None, Some(2)],
        };
        let out = s.conflict(&[true, true], 2, 1);
        assert_eq!(s.color, 2);
        assert_eq!(out, vec![(1, Envelope::Color { color: 2 })]);
    }

    #[test]
    fn conflict_with_smaller_neighbor_does_not_recolor() {
        // The lower-identifier neighbor is responsible for yielding.
        let mut s = ColorState {
            color: 3,
            cache: vec![Some(3), Some(1)],
        };
        let out = s.conflict(&[false, true], 2, 0);
        assert_eq!(s.color, 3);
        assert_eq!(out, vec![(0, Envelope::Color { color: 3 })]);
    }

    #[test]
    fn recolor_skips_all_cached_colors() {
        let mut s = ColorState {
            color: 1,
            cache: vec![Some(1), Some(2)],
        };
        s.conflict(&[true, true], 2, 0);
        assert_eq!(s.color, 3);
    }

    #[test]
    fn matching_color_takes_conflict_path() {
        let mut s = ColorState {
            color: 4,
            cache: vec![Some(1), None],
        };
        let out = s.on_color(&[true, true], 2, 4, 0);
        assert_eq!(s.cache[0], Some(4));
        // cache[1] unknown blocks recolor: echo to the trigger only
        assert_eq!(out, vec![(0, Envelope::Color { color: 4 })]);
    }

    #[test]
    fn differing_color_is_cached_and_echoed() {
        let mut s = ColorState {
            color: 2,
            cache: vec![None],
        };
        let out = s.on_color(&[true], 1, 7, 0);
        assert_eq!(s.cache[0], Some(7));
        assert_eq!(out, vec![(0, Envelope::Color { color: 2 })]);
    }

    #[test]
    fn adversarial_color_cached_verbatim_recolor_stays_in_palette() {
        let mut s = ColorState {
            color: 1,
            cache: vec![None, None],
        };
        s.on_color(&[true, true], 2, 999, 0);
        assert_eq!(s.cache[0], Some(999));
        // force a conflict on the other port
        let out = s.on_color(&[true, true], 2, 1, 1);
        assert!(s.color >= 1 && s.color <= 3);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn timeout_refreshes_every_empty_port() {
        let mut s = ColorState {
            color: 2,
            cache: vec![Some(1), Some(3)],
        };
        let out = s.on_timeout(&[false, false], 2, &[0, 1]);
        assert_eq!(
            out,
            vec![(0, Envelope::Color { color: 2 }), (1, Envelope::Color { color: 2 })]
        );
    }

    #[test]
    fn timeout_conflict_recolors_and_threads_state() {
        let mut s = ColorState {
            color: 1,
            cache: vec![Some(1), Some(2)],
        };
        let out = s.on_timeout(&[true, true], 2, &[0, 1]);
        assert_eq!(s.color, 3);
        // port 0 triggered a recolor broadcast; port 1 then gets the new color
        assert_eq!(
            out,
            vec![
                (0, Envelope::Color { color: 3 }),
                (1, Envelope::Color { color: 3 }),
                (1, Envelope::Color { color: 3 }),
            ]
        );
    }

    #[test]
    fn fresh_clean_state_broadcasts_on_full_timeout() {
        let mut s = ColorState::clean(3);
        let out = s.on_timeout(&[false, false, false], 3, &[0, 1, 2]);
        assert_eq!(out.len(), 3);
        for (p, env) in out {
            assert_eq!(env, Envelope::Color { color: s.color });
            assert!(p < 3);
        }
    }

    #[test]
    fn dag_source_never_changes_color() {
        // all-zero ord: every conflict is with a smaller-identifier neighbor
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut s = ColorState::random(3, 5, &mut rng);
        let initial = s.color;
        for i in 0..200 {
            let c = rng.gen_range(1..=6);
            s.on_color(&[false, false, false], 3, c, i % 3);
            s.on_timeout(&[false, false, false], 3, &[i % 3]);
            assert_eq!(s.color, initial);
        }
    }

    proptest! {
        #[test]
        fn random_init_stays_in_domain(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let degree = rng.gen_range(1..6usize);
            let max_degree = degree + rng.gen_range(0..3usize);
            let s = ColorState::random(degree, max_degree, &mut rng);
            prop_assert!(s.color >= 1 && s.color <= degree as i64 + 1);
            for entry in s.cache {
                if let Some(c) = entry {
                    prop_assert!(c >= 1 && c <= max_degree as i64 + 1);
                }
            }
        }

        #[test]
        fn recolor_palette_is_never_empty(
            cache in proptest::collection::vec(proptest::option::of(1i64..10), 1..6),
        ) {
            let degree = cache.len();
            let mut s = ColorState { color: 1, cache };
            // force the all-known, all-resolvable case
            for e in s.cache.iter_mut() {
                if e.is_none() {
                    *e = Some(1);
                }
            }
            let ord = vec![true; degree];
            s.conflict(&ord, degree, 0);
            prop_assert!(s.color >= 1 && s.color <= degree as i64 + 1);
            prop_assert!(!s.cache.contains(&Some(s.color)));
        }

        #[test]
        fn every_invocation_answers_its_trigger(
            seed in 0u64..300,
            color in 1i64..8,
            from in 0usize..3,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = ColorState::random(3, 4, &mut rng);
            let ord: Vec<bool> = (0..3).map(|_| rng.gen_bool(0.5)).collect();
            let out = s.on_color(&ord, 3, color, from);
            let answered = out
                .iter()
                .any(|&(p, env)| p == from && matches!(env, Envelope::Color { .. }));
            prop_assert!(answered);
        }
    }
}
