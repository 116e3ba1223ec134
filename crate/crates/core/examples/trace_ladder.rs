//! Synthesising a quality ladder, writing it as level files, and reading
//! it back.
//!
//! cargo run --example trace_ladder

use abrsim::sim::RngStream;
use abrsim::stream::{synth_ladder, LadderSpec, QualityLadder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = LadderSpec { frames: 250, ..LadderSpec::default() };
    let ladder = synth_ladder(&spec, &mut RngStream::new(42, u32::MAX, "ladder"))?;
    for (level, trace) in ladder.iter().enumerate() {
        let mbps = trace.mean_frame_bytes() * 8.0 * spec.fps / 1e6;
        println!(
            "level {level}: {} frames, mean {:.0} B/frame ~ {mbps:.2} Mb/s",
            trace.len(),
            trace.mean_frame_bytes()
        );
    }

    let dir = std::env::temp_dir().join("abrsim-ladder-example");
    ladder.write_dir(&dir)?;
    let back = QualityLadder::read_dir(&dir)?;
    assert_eq!(back, ladder);
    println!("round-tripped through {}", dir.display());
    Ok(())
}
