//! Deterministic simulator and protocol library for two composed
//! self-stabilizing message-passing algorithms: compact spanning-DAG
//! orientation by bit-serial identifier comparison, and (Δ+1) vertex coloring
//! built on that orientation.
//!
//! The crate splits into:
//! - [`ident`], [`topology`], [`message`]: identifiers, graphs, wire vocabulary;
//! - [`dag`], [`coloring`]: the two per-node state machines, pure handlers;
//! - [`composer`]: fair alternation of the layers inside one node runtime;
//! - [`simnet`]: FIFO channels, adversarial initial configurations, schedulers,
//!   round accounting, trial execution;
//! - [`monitors`]: executable potential functions (Λ, Φ, A), legitimacy
//!   predicates and independent oracles;
//! - [`harness`]: experiment configs, sweeps, reports, trace and DOT export,
//!   and the verification battery behind the `verify` subcommand.
//!
//! See the crate examples for runnable walk-throughs of each capability.

pub mod coloring;
pub mod composer;
pub mod dag;
pub mod harness;
pub mod ident;
pub mod message;
pub mod monitors;
pub mod simnet;
pub mod topology;
