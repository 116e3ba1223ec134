//! The four reference topologies side by side, with wired links sized to
//! each flow's share of the wireless channel.
//!
//! cargo run --example topologies

use abrsim::scenario::{build_scenario, ScenarioConfig, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kind in [ScenarioKind::A, ScenarioKind::B, ScenarioKind::C, ScenarioKind::D] {
        let cfg = ScenarioConfig {
            scenario: kind,
            seed: Some(7),
            p2p_rate_mbps: 100.0,
            wifi_phy_rate_mbps: if kind == ScenarioKind::D { 300.0 } else { 100.0 },
            ..ScenarioConfig::default()
        };
        let mut sim = build_scenario(&cfg)?;
        println!(
            "scenario {}: {} nodes, {} links, {} channels, {} flows",
            kind.as_str(),
            sim.node_count(),
            sim.link_count(),
            sim.channel_count(),
            sim.flow_count()
        );
        let events = sim.run();
        let report = sim.into_report();
        println!("  {events} events");
        for line in report.summary().lines() {
            println!("  {line}");
        }
    }
    Ok(())
}
