//! Node identifiers and the bit-serial access function.
//!
//! Nodes never ship their whole identifier over a link. Instead they expose it
//! one position at a time through [`bit_index`]: the position (counted from the
//! right, starting at 1) of the i-th one-bit (counted from the left). The
//! sentinel `-1` marks an exhausted index and orders below every real position,
//! which is what makes the level-by-level comparison in the DAG layer work.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Unique positive identifier of a node.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Identifier(u64);

impl Identifier {
    /// Panics on 0: identifiers are positive by construction.
    pub fn new(value: u64) -> Self {
        assert!(value >= 1, "identifiers are positive");
        Identifier(value)
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Number of binary digits, i.e. `⌊log₂ value⌋ + 1`.
    pub fn bit_length(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    /// Number of one-bits.
    pub fn popcount(self) -> u32 {
        self.0.count_ones()
    }
}

impl fmt::Debug for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Id({})", self.0)
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sentinel for an exhausted bit index; orders below every real position.
pub const EXHAUSTED: i64 = -1;

/// Right-based position of the `i`-th one-bit from the left, or `-1` when the
/// identifier has fewer than `i` one-bits. Total: `i < 1` also yields `-1`,
/// which is how adversarial query levels are answered.
pub fn bit_index(id: Identifier, i: i64) -> i64 {
    if i < 1 || i > id.popcount() as i64 {
        return EXHAUSTED;
    }
    let v = id.get();
    let mut seen = 0i64;
    for pos in (0..64).rev() {
        if (v >> pos) & 1 == 1 {
            seen += 1;
            if seen == i {
                return pos + 1;
            }
        }
    }
    unreachable!("popcount bound checked above")
}

/// First level at which the bit-index sequences of two distinct identifiers
/// differ. Symmetric in its arguments.
pub fn dif(a: Identifier, b: Identifier) -> i64 {
    assert_ne!(a, b, "dif is only defined on distinct identifiers");
    let mut level = 1;
    loop {
        if bit_index(a, level) != bit_index(b, level) {
            return level;
        }
        level += 1;
    }
}
