//! Transmission media: full-duplex point-to-point links and a shared,
//! serialized wireless channel.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::propagation::{delivery_decision, propagation_delay, RadioParams};
use super::{FlowId, NetError, NodeId, Position};
use crate::sim::SimTime;

/// Bytes a packet's header adds on the wire beyond its payload.
pub trait HeaderBytes {
    fn header_bytes(&self) -> u32;
}

impl HeaderBytes for u32 {
    fn header_bytes(&self) -> u32 {
        *self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimPacket<H> {
    pub src: NodeId,
    pub dst: NodeId,
    pub flow: FlowId,
    pub payload_bytes: u32,
    pub header: H,
    pub enqueue_time: SimTime,
}

impl<H: HeaderBytes> SimPacket<H> {
    pub fn wire_bytes(&self) -> u64 {
        self.payload_bytes as u64 + self.header.header_bytes() as u64
    }
}

/// Serialization time of `bytes` at `rate_bps`, rounded up to the nanosecond.
pub fn serialization_time(bytes: u64, rate_bps: u64) -> SimTime {
    assert!(rate_bps > 0, "link rate must be positive");
    let bits = bytes as u128 * 8;
    let ns = (bits * 1_000_000_000).div_ceil(rate_bps as u128);
    SimTime::from_nanos(ns.min(u64::MAX as u128) as u64)
}

/// Outcome of offering a packet to a point-to-point link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkOutcome {
    Arrival { tx_start: SimTime, tx_end: SimTime, arrival: SimTime },
    QueueDrop,
}

#[derive(Debug, Clone, Default)]
struct Direction {
    busy_until: SimTime,
    /// Transmission end times of packets queued or on the wire.
    backlog: VecDeque<SimTime>,
}

/// Full-duplex link with an independent drop-tail FIFO per direction.
#[derive(Debug, Clone)]
pub struct P2PLink {
    pub endpoints: (NodeId, NodeId),
    pub rate_bps: u64,
    pub prop_delay: SimTime,
    pub queue_capacity: usize,
    dirs: [Direction; 2],
}

impl P2PLink {
    pub fn new(a: NodeId, b: NodeId, rate_bps: u64, prop_delay: SimTime, queue_capacity: usize) -> Self {
        Self { endpoints: (a, b), rate_bps, prop_delay, queue_capacity, dirs: Default::default() }
    }

    pub fn connects(&self, a: NodeId, b: NodeId) -> bool {
        self.endpoints == (a, b) || self.endpoints == (b, a)
    }

    fn direction(&self, src: NodeId, dst: NodeId) -> Result<usize, NetError> {
        if self.endpoints == (src, dst) {
            Ok(0)
        } else if self.endpoints == (dst, src) {
            Ok(1)
        } else {
            Err(NetError::Detached { src, dst })
        }
    }

    /// Packets waiting or being serialized from `src` at time `now`.
    pub fn occupancy(&mut self, src: NodeId, now: SimTime) -> usize {
        let d = if self.endpoints.0 == src { 0 } else { 1 };
        let dir = &mut self.dirs[d];
        while dir.backlog.front().is_some_and(|&end| end <= now) {
            dir.backlog.pop_front();
        }
        dir.backlog.len()
    }

    pub fn transmit<H: HeaderBytes>(&mut self, packet: &SimPacket<H>, now: SimTime) -> Result<LinkOutcome, NetError> {
        let d = self.direction(packet.src, packet.dst)?;
        if self.occupancy(packet.src, now) >= self.queue_capacity {
            return Ok(LinkOutcome::QueueDrop);
        }
        let ser = serialization_time(packet.wire_bytes(), self.rate_bps);
        let dir = &mut self.dirs[d];
        let tx_start = now.max(dir.busy_until);
        let tx_end = tx_start + ser;
        dir.busy_until = tx_end;
        dir.backlog.push_back(tx_end);
        Ok(LinkOutcome::Arrival { tx_start, tx_end, arrival: tx_end + self.prop_delay })
    }
}

/// A transmission that has just taken hold of the wireless channel.
#[derive(Debug, Clone, PartialEq)]
pub struct WirelessTx<H> {
    pub packet: SimPacket<H>,
    pub tx_start: SimTime,
    pub tx_end: SimTime,
    /// `None` when the receiver is out of range.
    pub arrival: Option<SimTime>,
}

/// Shared multi-access medium: one transmission at a time, global FIFO.
#[derive(Debug, Clone)]
pub struct WirelessChannel<H> {
    pub radio: RadioParams,
    members: BTreeSet<NodeId>,
    busy_until: SimTime,
    transmitting: bool,
    pending: VecDeque<SimPacket<H>>,
    queued_per_node: BTreeMap<NodeId, usize>,
}

impl<H: HeaderBytes> WirelessChannel<H> {
    pub fn new(radio: RadioParams) -> Self {
        Self {
            radio,
            members: BTreeSet::new(),
            busy_until: SimTime::ZERO,
            transmitting: false,
            pending: VecDeque::new(),
            queued_per_node: BTreeMap::new(),
        }
    }

    pub fn attach(&mut self, node: NodeId) {
        self.members.insert(node);
    }

    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter().copied()
    }

    pub fn is_member(&self, node: NodeId) -> bool {
        self.members.contains(&node)
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub fn queued_from(&self, node: NodeId) -> usize {
        self.queued_per_node.get(&node).copied().unwrap_or(0)
    }

    /// Queues a packet. Returns `true` when the channel is idle and the
    /// caller should start a transmission right away.
    pub fn enqueue(&mut self, packet: SimPacket<H>) -> Result<bool, NetError> {
        if !self.is_member(packet.src) || !self.is_member(packet.dst) {
            return Err(NetError::Detached { src: packet.src, dst: packet.dst });
        }
        *self.queued_per_node.entry(packet.src).or_default() += 1;
        self.pending.push_back(packet);
        Ok(!self.transmitting)
    }

    /// Puts the head-of-line packet on the air at `now`.
    ///
    /// `position` reports where a node is at `now`; delivery and
    /// propagation delay use positions at the start of transmission.
    pub fn start_next(&mut self, now: SimTime, mut position: impl FnMut(NodeId) -> Position) -> Option<WirelessTx<H>> {
        if self.transmitting {
            return None;
        }
        let packet = self.pending.pop_front()?;
        if let Some(n) = self.queued_per_node.get_mut(&packet.src) {
            *n -= 1;
        }
        let tx_start = now.max(self.busy_until);
        let tx_end = tx_start + serialization_time(packet.wire_bytes(), self.radio.phy_rate_bps);
        self.busy_until = tx_end;
        self.transmitting = true;

        let tx_pos = position(packet.src);
        let rx_pos = position(packet.dst);
        let arrival =
            delivery_decision(&self.radio, &tx_pos, &rx_pos).then(|| tx_end + propagation_delay(&tx_pos, &rx_pos));
        Some(WirelessTx { packet, tx_start, tx_end, arrival })
    }

    /// Releases the channel once the current transmission has ended.
    /// Returns `true` if more packets are waiting.
    pub fn finish(&mut self) -> bool {
        self.transmitting = false;
        !self.pending.is_empty()
    }
}
