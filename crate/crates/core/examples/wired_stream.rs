//! One server streaming to one client over a point-to-point link, in
//! three link conditions: throttled, congested and generous.
//!
//! cargo run --example wired_stream

use abrsim::metrics::TimelineEvent;
use abrsim::scenario::{build_scenario, ScenarioConfig, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (label, rate, queue) in [("throttled", 1.5, 10_000), ("congested", 5.0, 100), ("generous", 32.0, 100)] {
        let cfg = ScenarioConfig {
            scenario: ScenarioKind::A,
            seed: Some(7),
            horizon_s: 10.0,
            p2p_rate_mbps: rate,
            p2p_queue_packets: queue,
            ..ScenarioConfig::default()
        };
        let mut sim = build_scenario(&cfg)?;
        sim.run();
        let report = sim.into_report();
        println!("== {label}: {rate} Mb/s, queue {queue}");
        for row in &report.timeline {
            let note = match row.event {
                TimelineEvent::LevelUp | TimelineEvent::LevelDown => format!(" -> level {}", row.level),
                _ => String::new(),
            };
            println!("  t={} buffer {:>3} {}{note}", row.time, row.buffer_frames, row.event);
        }
        print!("{}", report.summary());
    }
    Ok(())
}
