//! Log-distance path loss and the threshold delivery decision, then the
//! same cutoff seen end to end with a pinned station.
//!
//! cargo run --example radio_range

use abrsim::metrics::MetricKind;
use abrsim::net::{delivery_decision, FlowId, Position, RadioParams};
use abrsim::scenario::{build_scenario, ScenarioConfig, ScenarioKind, StaMobility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let radio = RadioParams::default();
    println!("maximum range {:.1} m", radio.max_range_m());
    for d in [1.0, 10.0, 100.0, 150.0, 151.0, 200.0] {
        let rx = Position::new(d, 0.0);
        println!(
            "{d:>6.1} m: rx {:>8.3} dBm, delivered {}",
            radio.rx_power_dbm(d),
            delivery_decision(&radio, &Position::ORIGIN, &rx)
        );
    }

    for d in [100.0, 200.0] {
        let cfg = ScenarioConfig {
            scenario: ScenarioKind::C,
            seed: Some(1),
            horizon_s: 10.0,
            sta_mobility: StaMobility::Constant,
            sta_min_x: d,
            wifi_phy_rate_mbps: 100.0,
            ..ScenarioConfig::default()
        };
        let mut sim = build_scenario(&cfg)?;
        sim.run();
        let r = sim.into_report();
        println!(
            "station at {d} m: {} frames, {} packets lost to range",
            r.count(FlowId(0), MetricKind::FrameComplete),
            r.count(FlowId(0), MetricKind::DropRange)
        );
    }
    Ok(())
}
