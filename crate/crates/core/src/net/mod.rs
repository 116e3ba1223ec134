//! Topology, mobility and transmission media.

mod medium;
mod mobility;
mod propagation;

use std::fmt;

pub use medium::{serialization_time, HeaderBytes, LinkOutcome, P2PLink, SimPacket, WirelessChannel, WirelessTx};
pub use mobility::{grid_position, step_random_walk, Bounds, MobilityModel, MobilityState, Position, RandomWalk};
pub use propagation::{delivery_decision, path_loss_db, propagation_delay, RadioParams, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One server-to-client stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowId(pub u32);

impl fmt::Display for FlowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("distance must be positive, got {0} m")]
    InvalidDistance(f64),
    #[error("nodes {src} -> {dst} are not attached to this medium")]
    Detached { src: NodeId, dst: NodeId },
}
