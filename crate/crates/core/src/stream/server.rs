//! Trace-driven streaming server with a per-client quality table.

use std::collections::BTreeMap;
use std::rc::Rc;

use super::packet::{fragment_frame, ControlPacket, DataPacketHeader};
use super::{ProtoError, QualityLadder};
use crate::net::{FlowId, NodeId};
use crate::sim::{EventId, SimTime};

#[derive(Debug, Clone, PartialEq)]
pub struct ServerConfig {
    pub max_frame: u32,
    pub interval: SimTime,
    /// Largest video payload per packet, in bytes.
    pub packet_size: u32,
    pub initial_level: u16,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { max_frame: 500, interval: SimTime::from_millis(10), packet_size: 1400, initial_level: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientRecord {
    pub address: NodeId,
    pub flow: FlowId,
    pub sent_number: u32,
    pub video_level: u16,
    pub send_event: Option<EventId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiveOutcome {
    /// New client; the caller schedules its first frame send.
    Registered,
    LevelChanged {
        from: u16,
        to: u16,
    },
    LevelUnchanged,
    Malformed,
}

/// All fragments of one frame, to be sent back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBurst {
    pub flow: FlowId,
    pub fragments: Vec<(DataPacketHeader, u32)>,
    /// Whether another frame send should be scheduled.
    pub more: bool,
}

#[derive(Debug)]
pub struct Server {
    pub node: NodeId,
    config: ServerConfig,
    ladder: Rc<QualityLadder>,
    clients: BTreeMap<NodeId, ClientRecord>,
    malformed: u64,
}

impl Server {
    pub fn new(node: NodeId, config: ServerConfig, ladder: Rc<QualityLadder>) -> Result<Self, ProtoError> {
        if config.initial_level > ladder.top_level() {
            return Err(ProtoError::Config(format!(
                "initial level {} outside ladder 0..={}",
                config.initial_level,
                ladder.top_level()
            )));
        }
        if ladder.levels() > u8::MAX as usize + 1 {
            return Err(ProtoError::Config("ladder deeper than 256 levels".into()));
        }
        if config.packet_size == 0 || config.max_frame == 0 || config.interval == SimTime::ZERO {
            return Err(ProtoError::Config("packet size, max frame and interval must be positive".into()));
        }
        Ok(Self { node, config, ladder, clients: BTreeMap::new(), malformed: 0 })
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn client(&self, address: NodeId) -> Option<&ClientRecord> {
        self.clients.get(&address)
    }

    pub fn clients(&self) -> impl Iterator<Item = &ClientRecord> {
        self.clients.values()
    }

    pub fn malformed_count(&self) -> u64 {
        self.malformed
    }

    pub fn set_send_event(&mut self, address: NodeId, id: Option<EventId>) {
        if let Some(c) = self.clients.get_mut(&address) {
            c.send_event = id;
        }
    }

    /// Frames a client gets when nothing limits the server.
    pub fn frame_budget(&self) -> u32 {
        self.config.max_frame.min(self.ladder.frames_per_level() as u32)
    }

    /// Unknown senders are registered at the initial level; known senders
    /// carry an absolute level request, clamped to the ladder.
    pub fn handle_receive(&mut self, from: NodeId, flow: FlowId, payload: &[u8]) -> ReceiveOutcome {
        let top = self.ladder.top_level();
        match self.clients.get_mut(&from) {
            None => {
                self.clients.insert(
                    from,
                    ClientRecord {
                        address: from,
                        flow,
                        sent_number: 0,
                        video_level: self.config.initial_level,
                        send_event: None,
                    },
                );
                ReceiveOutcome::Registered
            }
            Some(client) => match ControlPacket::decode(payload) {
                Err(_) => {
                    self.malformed += 1;
                    ReceiveOutcome::Malformed
                }
                Ok(req) => {
                    let to = req.requested_level.min(top);
                    let from = client.video_level;
                    client.video_level = to;
                    if from == to {
                        ReceiveOutcome::LevelUnchanged
                    } else {
                        ReceiveOutcome::LevelChanged { from, to }
                    }
                }
            },
        }
    }

    /// Cuts the client's next frame at its current level into fragments.
    pub fn next_frame(&mut self, address: NodeId) -> Result<Option<FrameBurst>, ProtoError> {
        let budget = self.frame_budget();
        let packet_size = self.config.packet_size;
        let Some(client) = self.clients.get_mut(&address) else {
            return Ok(None);
        };
        if client.sent_number >= budget {
            return Ok(None);
        }
        let seq = client.sent_number;
        let level = client.video_level;
        let size = self.ladder.frame(level, seq as usize).expect("sent_number below ladder length");
        let parts = fragment_frame(size, packet_size)?;
        let count: u16 = parts.len().try_into().map_err(|_| {
            ProtoError::Config(format!("frame {seq} needs {} fragments, header allows 65535", parts.len()))
        })?;
        let fragments = parts
            .into_iter()
            .enumerate()
            .map(|(i, bytes)| {
                let h = DataPacketHeader {
                    frame_seq: seq,
                    frag_index: i as u16,
                    frag_count: count,
                    level: level as u8,
                    frame_total_bytes: size,
                };
                (h, bytes)
            })
            .collect();
        client.sent_number += 1;
        Ok(Some(FrameBurst { flow: client.flow, fragments, more: client.sent_number < budget }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::VideoTrace;

    fn ladder(levels: &[&[u32]]) -> Rc<QualityLadder> {
        let traces =
            levels.iter().enumerate().map(|(i, f)| VideoTrace::new(format!("l{i}"), f.to_vec()).unwrap()).collect();
        Rc::new(QualityLadder::new(traces).unwrap())
    }

    fn six_levels() -> Rc<QualityLadder> {
        ladder(&[&[100; 4], &[200; 4], &[300; 4], &[22500, 1027, 1027, 1251], &[30000; 4], &[40000; 4]])
    }

    const X: NodeId = NodeId(7);

    #[test]
    fn first_packet_registers_at_level_three() {
        let mut s = Server::new(NodeId(0), ServerConfig::default(), six_levels()).unwrap();
        assert_eq!(s.handle_receive(X, FlowId(0), &[0, 0]), ReceiveOutcome::Registered);
        let c = s.client(X).unwrap();
        assert_eq!((c.sent_number, c.video_level), (0, 3));
    }

    #[test]
    fn known_client_updates_and_clamps_level() {
        let mut s = Server::new(NodeId(0), ServerConfig::default(), six_levels()).unwrap();
        s.handle_receive(X, FlowId(0), &[0, 3]);
        assert_eq!(s.handle_receive(X, FlowId(0), &[0, 4]), ReceiveOutcome::LevelChanged { from: 3, to: 4 });
        assert_eq!(s.handle_receive(X, FlowId(0), &[0, 99]), ReceiveOutcome::LevelChanged { from: 4, to: 5 });
        assert_eq!(s.client(X).unwrap().video_level, 5);
        assert_eq!(s.handle_receive(X, FlowId(0), &[9]), ReceiveOutcome::Malformed);
        assert_eq!(s.malformed_count(), 1);
        assert_eq!(s.client(X).unwrap().video_level, 5);
    }

    #[test]
    fn first_frame_is_seventeen_fragments() {
        let mut s = Server::new(NodeId(0), ServerConfig::default(), six_levels()).unwrap();
        s.handle_receive(X, FlowId(0), &[]);
        let burst = s.next_frame(X).unwrap().unwrap();
        let sizes: Vec<u32> = burst.fragments.iter().map(|(_, b)| *b).collect();
        assert_eq!(sizes.len(), 17);
        assert!(sizes[..16].iter().all(|&b| b == 1400));
        assert_eq!(sizes[16], 100);
        assert!(burst.fragments.iter().all(|(h, _)| h.frame_total_bytes == 22500 && h.frag_count == 17));
        assert_eq!(s.client(X).unwrap().sent_number, 1);
        assert!(burst.more);
    }

    #[test]
    fn stops_at_max_frame() {
        let cfg = ServerConfig { max_frame: 2, ..ServerConfig::default() };
        let mut s = Server::new(NodeId(0), cfg, six_levels()).unwrap();
        s.handle_receive(X, FlowId(0), &[]);
        assert!(s.next_frame(X).unwrap().unwrap().more);
        assert!(!s.next_frame(X).unwrap().unwrap().more);
        assert_eq!(s.next_frame(X).unwrap(), None);
    }

    #[test]
    fn level_switch_keeps_frame_index() {
        // Hand replay: frame 0 at level 0, frames 1 and 2 at level 1.
        let l = ladder(&[&[10, 11, 12], &[20, 21, 22]]);
        let cfg = ServerConfig { initial_level: 0, ..ServerConfig::default() };
        let mut s = Server::new(NodeId(0), cfg, l).unwrap();
        s.handle_receive(X, FlowId(0), &[]);
        let totals: Vec<u32> = (0..3)
            .map(|i| {
                if i == 1 {
                    s.handle_receive(X, FlowId(0), &[0, 1]);
                }
                s.next_frame(X).unwrap().unwrap().fragments[0].0.frame_total_bytes
            })
            .collect();
        assert_eq!(totals, vec![10, 21, 22]);
    }

    #[test]
    fn initial_level_must_fit_ladder() {
        let l = ladder(&[&[10], &[20]]);
        assert!(Server::new(NodeId(0), ServerConfig::default(), l).is_err());
    }
}
