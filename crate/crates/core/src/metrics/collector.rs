use std::fmt;
use std::str::FromStr;

use super::MetricsError;
use crate::net::{FlowId, NodeId};
use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    TxPacket,
    RxPacket,
    FrameComplete,
    FrameEvicted,
    Play,
    Rebuffer,
    Stop,
    LevelUp,
    LevelDown,
    DropQueue,
    DropRange,
}

impl MetricKind {
    pub const ALL: [MetricKind; 11] = [
        MetricKind::TxPacket,
        MetricKind::RxPacket,
        MetricKind::FrameComplete,
        MetricKind::FrameEvicted,
        MetricKind::Play,
        MetricKind::Rebuffer,
        MetricKind::Stop,
        MetricKind::LevelUp,
        MetricKind::LevelDown,
        MetricKind::DropQueue,
        MetricKind::DropRange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::TxPacket => "tx_packet",
            MetricKind::RxPacket => "rx_packet",
            MetricKind::FrameComplete => "frame_complete",
            MetricKind::FrameEvicted => "frame_evicted",
            MetricKind::Play => "play",
            MetricKind::Rebuffer => "rebuffer",
            MetricKind::Stop => "stop",
            MetricKind::LevelUp => "level_up",
            MetricKind::LevelDown => "level_down",
            MetricKind::DropQueue => "drop_queue",
            MetricKind::DropRange => "drop_range",
        }
    }

    /// Kinds emitted by a client application (as opposed to the network or server).
    pub fn is_client_event(self) -> bool {
        !matches!(self, MetricKind::TxPacket | MetricKind::DropQueue | MetricKind::DropRange)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| MetricsError::UnknownKind(s.to_owned()))
    }
}

/// One measurement. `value` is bytes for packet and frame kinds, frames
/// for `play`/`rebuffer`/`stop`, and the new level for level changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricEvent {
    pub time: SimTime,
    pub node: NodeId,
    pub flow: FlowId,
    pub kind: MetricKind,
    pub value: u64,
}

/// Append-only event store; insertion order is preserved.
#[derive(Debug, Default, Clone)]
pub struct Collector {
    events: Vec<MetricEvent>,
    closed: bool,
}

impl Collector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, event: MetricEvent) -> Result<(), MetricsError> {
        if self.closed {
            return Err(MetricsError::Closed);
        }
        self.events.push(event);
        Ok(())
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn events(&self) -> &[MetricEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<MetricEvent> {
        self.events
    }
}
