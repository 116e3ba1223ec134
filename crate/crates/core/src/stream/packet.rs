//! Wire formats and frame fragmentation.

use super::ProtoError;
use crate::net::HeaderBytes;

/// Per-fragment metadata carried with every video data packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DataPacketHeader {
    pub frame_seq: u32,
    pub frag_index: u16,
    pub frag_count: u16,
    pub level: u8,
    pub frame_total_bytes: u32,
}

impl DataPacketHeader {
    pub const WIRE_LEN: usize = 13;

    pub fn is_consistent(&self) -> bool {
        self.frag_count >= 1 && self.frag_index < self.frag_count
    }

    /// Big-endian: seq(4) index(2) count(2) level(1) total(4).
    pub fn encode(&self) -> [u8; Self::WIRE_LEN] {
        let mut b = [0u8; Self::WIRE_LEN];
        b[0..4].copy_from_slice(&self.frame_seq.to_be_bytes());
        b[4..6].copy_from_slice(&self.frag_index.to_be_bytes());
        b[6..8].copy_from_slice(&self.frag_count.to_be_bytes());
        b[8] = self.level;
        b[9..13].copy_from_slice(&self.frame_total_bytes.to_be_bytes());
        b
    }

    pub fn decode(buf: &[u8]) -> Result<Self, ProtoError> {
        let b: &[u8; Self::WIRE_LEN] = buf
            .try_into()
            .map_err(|_| ProtoError::Malformed(format!("data header is {} bytes, want 13", buf.len())))?;
        Ok(Self {
            frame_seq: u32::from_be_bytes([b[0], b[1], b[2], b[3]]),
            frag_index: u16::from_be_bytes([b[4], b[5]]),
            frag_count: u16::from_be_bytes([b[6], b[7]]),
            level: b[8],
            frame_total_bytes: u32::from_be_bytes([b[9], b[10], b[11], b[12]]),
        })
    }
}

/// Client request for an absolute quality level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ControlPacket {
    pub requested_level: u16,
}

impl ControlPacket {
    pub const WIRE_LEN: usize = 2;

    pub fn encode(&self) -> Vec<u8> {
        self.requested_level.to_be_bytes().to_vec()
    }

    pub fn decode(buf: &[u8]) -> Result<Self, ProtoError> {
        let b: [u8; 2] = buf
            .try_into()
            .map_err(|_| ProtoError::Malformed(format!("control payload is {} bytes, want 2", buf.len())))?;
        Ok(Self { requested_level: u16::from_be_bytes(b) })
    }
}

/// What a simulated packet carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    /// Video fragment; the payload itself is only counted, never materialized.
    Data(DataPacketHeader),
    /// Raw control bytes as sent by the client.
    Control(Vec<u8>),
}

impl HeaderBytes for Message {
    fn header_bytes(&self) -> u32 {
        match self {
            Message::Data(_) => DataPacketHeader::WIRE_LEN as u32,
            Message::Control(_) => 0,
        }
    }
}

/// Splits a frame into payload sizes of at most `max_payload` bytes; all
/// fragments but the last are full.
pub fn fragment_frame(frame_bytes: u32, max_payload: u32) -> Result<Vec<u32>, ProtoError> {
    if frame_bytes == 0 {
        return Err(ProtoError::ZeroFrame);
    }
    if max_payload == 0 {
        return Err(ProtoError::Config("packet size must be at least one byte".into()));
    }
    let count = frame_bytes.div_ceil(max_payload);
    let mut parts = vec![max_payload; count as usize];
    *parts.last_mut().expect("count >= 1") = frame_bytes - max_payload * (count - 1);
    Ok(parts)
}
