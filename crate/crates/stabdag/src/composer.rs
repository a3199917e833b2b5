//! Fair composition of the two protocol layers into one per-node runtime.
//!
//! A node strictly alternates DAG and coloring steps. A step consumes at most
//! one envelope per incoming channel, only of the active layer; the other
//! layer's traffic stays queued for its own turn. Malformed envelopes are
//! counted and dropped at dispatch.

use crate::coloring::ColorState;
use crate::dag::{DagState, Outbox};
use crate::ident::Identifier;
use crate::message::{Envelope, Layer};
use crate::topology::PortId;
use rand::Rng;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NodeRuntime {
    pub id: Identifier,
    pub degree: usize,
    pub dag: DagState,
    pub color: ColorState,
    /// Layer of the node's next step; alternates strictly.
    pub next_layer: Layer,
}

impl NodeRuntime {
    pub fn clean(id: Identifier, degree: usize) -> Self {
        NodeRuntime {
            id,
            degree,
            dag: DagState::clean(degree),
            color: ColorState::clean(degree),
            next_layer: Layer::Dag,
        }
    }

    pub fn random<R: Rng>(id: Identifier, degree: usize, max_degree: usize, rng: &mut R) -> Self {
        NodeRuntime {
            id,
            degree,
            dag: DagState::random(degree, id, rng),
            color: ColorState::random(degree, max_degree, rng),
            next_layer: if rng.gen_bool(0.5) { Layer::Dag } else { Layer::Color },
        }
    }
}

/// What one node step did, for instrumentation and round accounting.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub layer: Layer,
    pub outbox: Outbox,
    /// Envelopes of the active layer dispatched to handlers.
    pub consumed: usize,
    /// Malformed or misrouted envelopes dropped at dispatch.
    pub dropped: usize,
    pub timeout_fired: bool,
    /// Ports whose reception or timeout triggered a coloring invocation; each
    /// must see a Color message in the outbox (the every-step broadcast lemma).
    pub triggering_ports: Vec<PortId>,
}

/// Execute one step of the layer indicated by `next_layer`, then flip it.
///
/// `inputs` holds the at-most-one envelope dequeued per port for this step;
/// `empty_ports` are the ports whose incoming channel carried no envelope of
/// the active layer at step start. Receptions are dispatched first, then the
/// Do-forever body runs for the empty ports (if any).
pub fn node_step(
    rt: &mut NodeRuntime,
    inputs: &[Option<Envelope>],
    empty_ports: &[PortId],
) -> StepOutcome {
    debug_assert_eq!(inputs.len(), rt.degree);
    let layer = rt.next_layer;
    let mut outbox = Outbox::new();
    let mut consumed = 0;
    let mut dropped = 0;
    let mut triggering = Vec::new();

    for (port, input) in inputs.iter().enumerate() {
        let Some(env) = input else { continue };
        if env.layer() != Some(layer) {
            dropped += 1;
            continue;
        }
        consumed += 1;
        match (layer, env) {
            (Layer::Dag, Envelope::Query { level }) => {
                outbox.extend(rt.dag.on_query(rt.id, rt.degree, *level, port));
            }
            (Layer::Dag, Envelope::Reply { level, bit }) => {
                outbox.extend(rt.dag.on_reply(rt.id, rt.degree, *level, *bit, port));
            }
            (Layer::Color, Envelope::Color { color }) => {
                triggering.push(port);
                outbox.extend(rt.color.on_color(&rt.dag.ord, rt.degree, *color, port));
            }
            _ => unreachable!("layer() filtered above"),
        }
    }

    // The Do-forever guard is continuous, not an else-branch of reception:
    // a port whose channel is empty must be served even while other ports
    // keep delivering, or a pair of nodes can starve each other's channel
    // behind busy neighbors forever.
    let mut timeout_fired = false;
    if !empty_ports.is_empty() {
        timeout_fired = true;
        match layer {
            Layer::Dag => outbox.extend(rt.dag.on_timeout(rt.id, rt.degree)),
            Layer::Color => {
                triggering.extend_from_slice(empty_ports);
                outbox.extend(rt.color.on_timeout(&rt.dag.ord, rt.degree, empty_ports));
            }
        }
    }

    debug_assert!(
        outbox.iter().all(|(_, env)| env.layer() == Some(layer)),
        "tag discipline: emitted envelopes carry the executing layer"
    );

    rt.next_layer = layer.other();
    StepOutcome {
        layer,
        outbox,
        consumed,
        dropped,
        timeout_fired,
        triggering_ports: triggering,
    }
}
