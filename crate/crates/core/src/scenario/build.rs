//! Topology builders for the four test scenarios.

use std::rc::Rc;

use super::world::{client_start, sample_mobility, ClientApp, NodeState, Role, World};
use super::{ConfigError, ScenarioConfig, ScenarioKind, StaMobility};
use crate::metrics::{FlowInfo, Report};
use crate::net::{
    grid_position, Bounds, FlowId, MobilityState, NodeId, P2PLink, Position, RadioParams, RandomWalk, WirelessChannel,
};
use crate::sim::{RngStream, SimTime, Simulator};
use crate::stream::{synth_ladder, LadderSpec, PlaybackState, QualityLadder, Server, ServerConfig};

/// Node id used for run-wide random streams that belong to no node.
const GLOBAL_STREAM_NODE: u32 = u32::MAX;

/// A built scenario, ready to run.
pub struct Simulation {
    pub sim: Simulator<World>,
    pub world: World,
}

impl Simulation {
    /// Runs to the horizon (or until no events remain) and returns the
    /// number of events executed.
    pub fn run(&mut self) -> u64 {
        let horizon = self.world.horizon;
        self.sim.run(&mut self.world, horizon)
    }

    pub fn node_count(&self) -> usize {
        self.world.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.world.links.len()
    }

    pub fn channel_count(&self) -> usize {
        usize::from(self.world.channel.is_some())
    }

    pub fn flow_count(&self) -> usize {
        self.world.flows.len()
    }

    pub fn into_report(self) -> Report {
        self.world.into_report()
    }
}

fn secs(key: &str, v: f64) -> Result<SimTime, ConfigError> {
    SimTime::try_from_secs_f64(v).map_err(|e| ConfigError::Key { key: key.into(), reason: e.to_string() })
}

fn mbps_to_bps(v: f64) -> u64 {
    (v * 1e6).round().max(1.0) as u64
}

pub fn load_ladder(cfg: &ScenarioConfig) -> Result<QualityLadder, ConfigError> {
    match &cfg.ladder_dir {
        Some(dir) => Ok(QualityLadder::read_dir(dir)?),
        None => {
            let spec = LadderSpec {
                frames: cfg.max_frame as usize,
                fps: cfg.frame_rate as f64,
                bitrates_bps: cfg.ladder_bitrates_mbps.iter().map(|&m| mbps_to_bps(m)).collect(),
                jitter: cfg.ladder_jitter,
            };
            let mut rng = RngStream::new(cfg.seed()?, GLOBAL_STREAM_NODE, "ladder");
            Ok(synth_ladder(&spec, &mut rng)?)
        }
    }
}

fn radio(cfg: &ScenarioConfig) -> RadioParams {
    RadioParams {
        phy_rate_bps: mbps_to_bps(cfg.wifi_phy_rate_mbps),
        tx_power_dbm: cfg.wifi_tx_power_dbm,
        rx_sensitivity_dbm: cfg.wifi_rx_sensitivity_dbm,
        pathloss_exponent: cfg.wifi_pathloss_exponent,
        reference_loss_db: cfg.wifi_reference_loss_db,
        reference_distance_m: cfg.wifi_reference_distance_m,
    }
}

fn walk(cfg: &ScenarioConfig) -> RandomWalk {
    RandomWalk {
        bounds: Bounds::new(cfg.walk_min_x, cfg.walk_max_x, cfg.walk_min_y, cfg.walk_max_y),
        speed_min: cfg.speed_min,
        speed_max: cfg.speed_max,
        leg_period: cfg.leg_period_s,
    }
}

fn station_state(cfg: &ScenarioConfig, seed: u64, id: NodeId, ordinal: u32) -> (MobilityState, Option<RngStream>) {
    let g = grid_position(ordinal, cfg.sta_delta_x, cfg.sta_delta_y, cfg.sta_grid_width);
    let start = Position::new(cfg.sta_min_x + g.x, cfg.sta_min_y + g.y);
    match cfg.sta_mobility {
        StaMobility::Constant => (MobilityState::constant(start), None),
        StaMobility::RandomWalk => {
            let mut rng = RngStream::new(seed, id.0, "mobility");
            (MobilityState::random_walk(start, walk(cfg), &mut rng), Some(rng))
        }
    }
}

/// Builds nodes, media and applications for the configured scenario.
/// Every client starts at t = 0; servers wait for registrations.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Simulation, ConfigError> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let horizon = secs("horizon_s", cfg.horizon_s)?;
    let bin_width = secs("bin_width_s", cfg.bin_width_s)?;
    let sample = secs("mobility_sample_s", cfg.mobility_sample_s)?;
    if bin_width == SimTime::ZERO || sample == SimTime::ZERO {
        return Err(ConfigError::Key { key: "bin_width_s".into(), reason: "below one nanosecond".into() });
    }
    let ladder = Rc::new(load_ladder(cfg)?);
    let server_cfg = ServerConfig {
        max_frame: cfg.max_frame,
        interval: secs("interval_s", cfg.interval_s)?,
        packet_size: cfg.packet_size,
        initial_level: cfg.initial_level,
    };
    if server_cfg.interval == SimTime::ZERO {
        return Err(ConfigError::Key { key: "interval_s".into(), reason: "below one nanosecond".into() });
    }

    let mut world = World::new(horizon, bin_width, sample);
    let n_servers = cfg.access_points();
    let n_clients = cfg.stations();

    // Servers take ids 0..n_servers, clients follow.
    let mut server_ids = Vec::new();
    for j in 0..n_servers {
        let id = NodeId(j);
        let pos = match cfg.scenario {
            ScenarioKind::D => grid_position(j, cfg.ap_delta_x, cfg.ap_delta_y, cfg.ap_grid_width),
            _ => Position::ORIGIN,
        };
        world.nodes.push(NodeState::new(id, Role::Server, MobilityState::constant(pos), None));
        world.servers.insert(id, Server::new(id, server_cfg.clone(), Rc::clone(&ladder))?);
        server_ids.push(id);
    }

    let p2p_delay = secs("p2p_delay_ms", cfg.p2p_delay_ms / 1e3)?;
    let wireless = match cfg.scenario {
        ScenarioKind::A | ScenarioKind::B => false,
        ScenarioKind::C | ScenarioKind::D => true,
        ScenarioKind::Custom => return Err(ConfigError::Unsupported(cfg.scenario.as_str().into())),
    };
    let mut channel = wireless.then(|| WirelessChannel::new(radio(cfg)));
    if let Some(ch) = channel.as_mut() {
        server_ids.iter().for_each(|&id| ch.attach(id));
    }

    for i in 0..n_clients {
        let id = NodeId(n_servers + i);
        let server = server_ids[(i % n_servers) as usize];
        let (mobility, rng) =
            if wireless { station_state(cfg, seed, id, i) } else { (MobilityState::constant(Position::ORIGIN), None) };
        world.nodes.push(NodeState::new(id, Role::Client, mobility, rng));
        match channel.as_mut() {
            Some(ch) => ch.attach(id),
            None => world.links.push(P2PLink::new(
                server,
                id,
                mbps_to_bps(cfg.p2p_rate_mbps),
                p2p_delay,
                cfg.p2p_queue_packets as usize,
            )),
        }
        let flow = FlowId(i);
        world.flows.push(FlowInfo { id: flow, server, client: id });
        let playback = PlaybackState::new(cfg.frame_rate, cfg.initial_level, ladder.top_level());
        world.clients.insert(id, ClientApp::new(id, server, flow, playback));
    }
    world.channel = channel;

    let mut sim = Simulator::new();
    for &client in world.clients.keys() {
        sim.schedule_at(SimTime::ZERO, move |w, sim| client_start(w, sim, client)).expect("empty queue at t=0");
    }
    if world.nodes.iter().any(NodeState::is_mobile) {
        sim.schedule_at(SimTime::ZERO, sample_mobility).expect("empty queue at t=0");
    }
    Ok(Simulation { sim, world })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ScenarioKind) -> ScenarioConfig {
        ScenarioConfig { scenario: kind, seed: Some(7), ..ScenarioConfig::default() }
    }

    #[test]
    fn topology_counts() {
        let counts = |c: &ScenarioConfig| {
            let s = build_scenario(c).unwrap();
            (s.node_count(), s.link_count(), s.channel_count(), s.flow_count())
        };
        assert_eq!(counts(&cfg(ScenarioKind::A)), (2, 1, 0, 1));
        assert_eq!(counts(&cfg(ScenarioKind::B)), (3, 2, 0, 2));
        assert_eq!(counts(&cfg(ScenarioKind::C)), (2, 0, 1, 1));
        let d = ScenarioConfig { num_ap: Some(3), num_sta: Some(3), ..cfg(ScenarioKind::D) };
        assert_eq!(counts(&d), (6, 0, 1, 3));
        let d = ScenarioConfig { num_ap: Some(2), num_sta: Some(5), ..cfg(ScenarioKind::D) };
        assert_eq!(counts(&d), (7, 0, 1, 5));
    }

    #[test]
    fn stations_associate_round_robin() {
        let d = ScenarioConfig { num_ap: Some(2), num_sta: Some(5), ..cfg(ScenarioKind::D) };
        let s = build_scenario(&d).unwrap();
        let servers: Vec<u32> = s.world.flows.iter().map(|f| f.server.0).collect();
        assert_eq!(servers, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn access_points_on_grid() {
        let d = cfg(ScenarioKind::D);
        let mut s = build_scenario(&d).unwrap();
        let pos: Vec<Position> = (0..3).map(|i| s.world.nodes[i].position_at(SimTime::ZERO)).collect();
        assert_eq!(pos, vec![Position::ORIGIN, Position::new(10.0, 0.0), Position::new(20.0, 0.0)]);
    }

    #[test]
    fn custom_kind_is_unsupported() {
        assert!(matches!(build_scenario(&cfg(ScenarioKind::Custom)), Err(ConfigError::Unsupported(_))));
    }
}
