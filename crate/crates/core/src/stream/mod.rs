//! The streaming application: trace-driven source, server, fragmentation,
//! reassembly and the buffer-based rate controller.

mod client;
mod packet;
mod server;
mod trace;

use std::path::PathBuf;

pub use client::{EvictedFrame, FragmentOutcome, PlaybackState, Reassembler, TickOutcome, REASSEMBLY_TIMEOUT};
pub use packet::{fragment_frame, ControlPacket, DataPacketHeader, Message};
pub use server::{ClientRecord, FrameBurst, ReceiveOutcome, Server, ServerConfig};
pub use trace::{
    level_path, load_trace, read_trace_file, synth_ladder, LadderSpec, QualityLadder, VideoTrace, DEFAULT_LADDER_BPS,
};

#[derive(Debug, thiserror::Error)]
pub enum ProtoError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("trace line {line}: {reason}")]
    TraceParse { line: usize, reason: String },
    #[error("ladder has no levels")]
    EmptyLadder,
    #[error("invalid ladder: {0}")]
    LadderShape(String),
    #[error("frame size must be positive")]
    ZeroFrame,
    #[error("malformed packet: {0}")]
    Malformed(String),
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
