//! Splitting a frame into packets and the 13-byte data header on the wire.
//!
//! cargo run --example fragmentation

use abrsim::stream::{fragment_frame, DataPacketHeader};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frame_bytes = 22_500;
    let parts = fragment_frame(frame_bytes, 1400)?;
    println!("frame of {frame_bytes} B -> {} packets: {parts:?}", parts.len());

    for (i, &bytes) in parts.iter().enumerate().take(2) {
        let header = DataPacketHeader {
            frame_seq: 0,
            frag_index: i as u16,
            frag_count: parts.len() as u16,
            level: 3,
            frame_total_bytes: frame_bytes,
        };
        let wire = header.encode();
        assert_eq!(DataPacketHeader::decode(&wire)?, header);
        println!("fragment {i}: {bytes} B payload, header {wire:02x?}");
    }
    Ok(())
}
