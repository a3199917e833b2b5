//! The wire vocabulary shared by both protocol layers.
//!
//! Payload fields are plain `i64` so that adversarially injected envelopes can
//! carry anything in the machine domain; handlers must tolerate all of it.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Dag,
    Color,
}

impl Layer {
    pub fn other(self) -> Layer {
        match self {
            Layer::Dag => Layer::Color,
            Layer::Color => Layer::Dag,
        }
    }
}

/// A layer-tagged protocol message.
///
/// `Junk` models an adversarially injected envelope whose layer tag is
/// malformed; correct nodes never emit it and dispatch drops it on sight.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum Envelope {
    Query { level: i64 },
    Reply { level: i64, bit: i64 },
    Color { color: i64 },
    Junk { tag: i64, a: i64, b: i64 },
}

impl Envelope {
    /// Layer this envelope belongs to; `None` for malformed tags.
    pub fn layer(&self) -> Option<Layer> {
        match self {
            Envelope::Query { .. } | Envelope::Reply { .. } => Some(Layer::Dag),
            Envelope::Color { .. } => Some(Layer::Color),
            Envelope::Junk { .. } => None,
        }
    }
}
