//! Simulation state and the event handlers that tie the network and the
//! streaming applications together.

use std::collections::BTreeMap;

use tracing::debug;

use crate::metrics::{
    Collector, FlowInfo, MetricEvent, MetricKind, MobilitySample, Report, ServerLevelChange, TimelineEvent, TimelineRow,
};
use crate::net::{
    step_random_walk, FlowId, LinkOutcome, MobilityModel, MobilityState, NodeId, P2PLink, Position, SimPacket,
    WirelessChannel,
};
use crate::sim::{EventId, RngStream, SimTime, Simulator};
use crate::stream::{
    ControlPacket, FragmentOutcome, Message, PlaybackState, Reassembler, ReceiveOutcome, Server, TickOutcome,
};

const TICK: SimTime = SimTime::from_secs(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Server,
    Client,
}

#[derive(Debug)]
pub struct NodeState {
    pub id: NodeId,
    pub role: Role,
    mobility: MobilityState,
    rng: Option<RngStream>,
    updated_at: SimTime,
}

impl NodeState {
    pub fn new(id: NodeId, role: Role, mobility: MobilityState, rng: Option<RngStream>) -> Self {
        Self { id, role, mobility, rng, updated_at: SimTime::ZERO }
    }

    pub fn is_mobile(&self) -> bool {
        matches!(self.mobility.model, MobilityModel::RandomWalk2d(_))
    }

    /// Advances mobility to `now` and returns the position there.
    pub fn position_at(&mut self, now: SimTime) -> Position {
        if now > self.updated_at {
            if let Some(rng) = self.rng.as_mut() {
                let dt = (now - self.updated_at).as_secs_f64();
                self.mobility = step_random_walk(&self.mobility, dt, rng);
            }
            self.updated_at = now;
        }
        self.mobility.position
    }
}

/// Client application on a station.
#[derive(Debug)]
pub struct ClientApp {
    pub node: NodeId,
    pub server: NodeId,
    pub flow: FlowId,
    pub playback: PlaybackState,
    pub reassembly: Reassembler,
    pub registered: bool,
    retry_event: Option<EventId>,
}

impl ClientApp {
    pub fn new(node: NodeId, server: NodeId, flow: FlowId, playback: PlaybackState) -> Self {
        Self { node, server, flow, playback, reassembly: Reassembler::default(), registered: false, retry_event: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Link(usize),
    Wireless,
}

/// Owns every piece of mutable simulation state.
pub struct World {
    pub nodes: Vec<NodeState>,
    pub links: Vec<P2PLink>,
    pub channel: Option<WirelessChannel<Message>>,
    pub servers: BTreeMap<NodeId, Server>,
    pub clients: BTreeMap<NodeId, ClientApp>,
    pub flows: Vec<FlowInfo>,
    pub collector: Collector,
    pub timeline: Vec<TimelineRow>,
    pub server_levels: Vec<ServerLevelChange>,
    pub mobility_samples: Vec<MobilitySample>,
    pub channel_busy: Vec<(SimTime, SimTime)>,
    pub horizon: SimTime,
    pub bin_width: SimTime,
    pub mobility_sample_period: SimTime,
}

impl World {
    pub fn new(horizon: SimTime, bin_width: SimTime, mobility_sample_period: SimTime) -> Self {
        Self {
            nodes: Vec::new(),
            links: Vec::new(),
            channel: None,
            servers: BTreeMap::new(),
            clients: BTreeMap::new(),
            flows: Vec::new(),
            collector: Collector::new(),
            timeline: Vec::new(),
            server_levels: Vec::new(),
            mobility_samples: Vec::new(),
            channel_busy: Vec::new(),
            horizon,
            bin_width,
            mobility_sample_period,
        }
    }

    fn record(&mut self, time: SimTime, node: NodeId, flow: FlowId, kind: MetricKind, value: u64) {
        self.collector
            .record(MetricEvent { time, node, flow, kind, value })
            .expect("collector open while the simulation runs");
    }

    fn route(&self, src: NodeId, dst: NodeId) -> Option<Route> {
        if let Some(i) = self.links.iter().position(|l| l.connects(src, dst)) {
            return Some(Route::Link(i));
        }
        match &self.channel {
            Some(ch) if ch.is_member(src) && ch.is_member(dst) => Some(Route::Wireless),
            _ => None,
        }
    }

    fn node_mut(&mut self, id: NodeId) -> &mut NodeState {
        &mut self.nodes[id.0 as usize]
    }

    pub fn into_report(mut self) -> Report {
        self.collector.close();
        Report {
            horizon: self.horizon,
            bin_width: self.bin_width,
            flows: self.flows,
            events: self.collector.into_events(),
            timeline: self.timeline,
            server_levels: self.server_levels,
            mobility: self.mobility_samples,
            channel_busy: self.channel_busy,
        }
    }
}

type Sim = Simulator<World>;

fn at(sim: &mut Sim, t: SimTime, f: impl FnOnce(&mut World, &mut Sim) + 'static) -> EventId {
    sim.schedule_at(t, f).expect("handlers only schedule into the future")
}

/// Offers a packet to whichever medium joins its endpoints.
pub fn send_packet(w: &mut World, sim: &mut Sim, packet: SimPacket<Message>) {
    let now = sim.now();
    match w.route(packet.src, packet.dst) {
        Some(Route::Link(i)) => match w.links[i].transmit(&packet, now).expect("routed link") {
            LinkOutcome::Arrival { arrival, .. } => {
                at(sim, arrival, move |w, sim| deliver(w, sim, packet));
            }
            LinkOutcome::QueueDrop => {
                w.record(now, packet.src, packet.flow, MetricKind::DropQueue, packet.payload_bytes as u64);
            }
        },
        Some(Route::Wireless) => {
            let ch = w.channel.as_mut().expect("routed channel");
            if ch.enqueue(packet).expect("routed channel") {
                start_wireless(w, sim);
            }
        }
        None => panic!("no medium joins {} and {}", packet.src, packet.dst),
    }
}

fn start_wireless(w: &mut World, sim: &mut Sim) {
    let now = sim.now();
    let World { channel, nodes, .. } = w;
    let ch = channel.as_mut().expect("wireless scenario");
    let Some(tx) = ch.start_next(now, |id| nodes[id.0 as usize].position_at(now)) else {
        return;
    };
    w.channel_busy.push((tx.tx_start, tx.tx_end));
    let packet = tx.packet;
    match tx.arrival {
        Some(arrival) => {
            at(sim, arrival, move |w, sim| deliver(w, sim, packet));
        }
        None => {
            debug!(time = %now, src = %packet.src, dst = %packet.dst, "out of range, packet lost");
            w.record(now, packet.dst, packet.flow, MetricKind::DropRange, packet.payload_bytes as u64);
        }
    }
    at(sim, tx.tx_end, |w, sim| {
        if w.channel.as_mut().expect("wireless scenario").finish() {
            start_wireless(w, sim);
        }
    });
}

fn deliver(w: &mut World, sim: &mut Sim, packet: SimPacket<Message>) {
    match &packet.header {
        Message::Control(bytes) => server_receive(w, sim, packet.dst, packet.src, packet.flow, bytes),
        Message::Data(_) => client_receive(w, sim, packet),
    }
}

fn server_receive(w: &mut World, sim: &mut Sim, server: NodeId, from: NodeId, flow: FlowId, payload: &[u8]) {
    let now = sim.now();
    let srv = w.servers.get_mut(&server).expect("control packets go to servers");
    match srv.handle_receive(from, flow, payload) {
        ReceiveOutcome::Registered => {
            debug!(time = %now, %server, client = %from, "new client registered");
            let interval = srv.config().interval;
            let id = at(sim, now + interval, move |w, sim| server_send(w, sim, server, from));
            srv.set_send_event(from, Some(id));
        }
        ReceiveOutcome::LevelChanged { from: old, to } => {
            debug!(time = %now, %server, client = %from, level = to, "video level updated");
            w.server_levels.push(ServerLevelChange { time: now, server, client: from, from: old, to });
        }
        ReceiveOutcome::LevelUnchanged => {}
        ReceiveOutcome::Malformed => {
            debug!(time = %now, %server, client = %from, "malformed control packet ignored");
        }
    }
}

fn server_send(w: &mut World, sim: &mut Sim, server: NodeId, client: NodeId) {
    let now = sim.now();
    let srv = w.servers.get_mut(&server).expect("server exists");
    let burst = srv.next_frame(client).expect("frames fit the packet header");
    let Some(burst) = burst else {
        srv.set_send_event(client, None);
        return;
    };
    let next = burst.more.then(|| {
        let interval = srv.config().interval;
        at(sim, now + interval, move |w, sim| server_send(w, sim, server, client))
    });
    srv.set_send_event(client, next);
    for (header, bytes) in burst.fragments {
        debug!("At time {}s server sent {} bytes to {}", now.as_secs_f64(), bytes, client);
        w.record(now, server, burst.flow, MetricKind::TxPacket, bytes as u64);
        let packet = SimPacket {
            src: server,
            dst: client,
            flow: burst.flow,
            payload_bytes: bytes,
            header: Message::Data(header),
            enqueue_time: now,
        };
        send_packet(w, sim, packet);
    }
}

fn send_control(w: &mut World, sim: &mut Sim, client: NodeId, level: u16) {
    let app = &w.clients[&client];
    let bytes = ControlPacket { requested_level: level }.encode();
    let packet = SimPacket {
        src: client,
        dst: app.server,
        flow: app.flow,
        payload_bytes: bytes.len() as u32,
        header: Message::Control(bytes),
        enqueue_time: sim.now(),
    };
    send_packet(w, sim, packet);
}

/// Registers with the server and starts the playback clock.
pub fn client_start(w: &mut World, sim: &mut Sim, client: NodeId) {
    let now = sim.now();
    let level = w.clients[&client].playback.level_view;
    send_control(w, sim, client, level);
    at(sim, now + TICK, move |w, sim| client_tick(w, sim, client));
    let retry = at(sim, now + TICK, move |w, sim| client_retry(w, sim, client));
    w.clients.get_mut(&client).expect("client exists").retry_event = Some(retry);
}

fn client_retry(w: &mut World, sim: &mut Sim, client: NodeId) {
    let app = w.clients.get_mut(&client).expect("client exists");
    app.retry_event = None;
    if app.registered || app.playback.stopped {
        return;
    }
    let level = app.playback.level_view;
    debug!(time = %sim.now(), %client, "no data yet, registering again");
    send_control(w, sim, client, level);
    let retry = at(sim, sim.now() + TICK, move |w, sim| client_retry(w, sim, client));
    w.clients.get_mut(&client).expect("client exists").retry_event = Some(retry);
}

fn evict_stale(w: &mut World, now: SimTime, client: NodeId) {
    let app = w.clients.get_mut(&client).expect("client exists");
    let flow = app.flow;
    for ev in app.reassembly.evict(now) {
        w.record(now, client, flow, MetricKind::FrameEvicted, ev.bytes as u64);
    }
}

fn client_receive(w: &mut World, sim: &mut Sim, packet: SimPacket<Message>) {
    let now = sim.now();
    let client = packet.dst;
    let Message::Data(header) = packet.header else { return };
    let app = w.clients.get_mut(&client).expect("data packets go to clients");
    if app.playback.stopped {
        return;
    }
    if !app.registered {
        app.registered = true;
        if let Some(id) = app.retry_event.take() {
            sim.cancel(id);
        }
    }
    let flow = app.flow;
    w.record(now, client, flow, MetricKind::RxPacket, packet.payload_bytes as u64);
    evict_stale(w, now, client);
    let app = w.clients.get_mut(&client).expect("client exists");
    if let FragmentOutcome::Complete { frame_seq, bytes, .. } = app.reassembly.accept(&header, now) {
        app.playback.push_frame();
        debug!(
            "At time {}s client received frame {} and {} bytes from {}",
            now.as_secs_f64(),
            frame_seq,
            bytes,
            packet.src
        );
        w.record(now, client, flow, MetricKind::FrameComplete, bytes as u64);
    }
}

fn client_tick(w: &mut World, sim: &mut Sim, client: NodeId) {
    let now = sim.now();
    evict_stale(w, now, client);
    let app = w.clients.get_mut(&client).expect("client exists");
    let flow = app.flow;
    let buffer = app.playback.cur_buffer;
    let outcome = app.playback.read_buffer();
    let level = app.playback.level_view;
    let row = |event| TimelineRow { time: now, client, buffer_frames: buffer, level, event };

    let request = match outcome {
        TickOutcome::Stop => {
            if let Some(id) = app.retry_event.take() {
                sim.cancel(id);
            }
            debug!(time = %now, %client, "buffer stagnant, stopping client");
            w.record(now, client, flow, MetricKind::Stop, buffer as u64);
            w.timeline.push(row(TimelineEvent::Stop));
            return;
        }
        TickOutcome::Stall { .. } => {
            debug!("At time {}s: Not enough frames in the buffer, waiting", now.as_secs_f64());
            w.timeline.push(row(TimelineEvent::Stall));
            None
        }
        TickOutcome::Rebuffer { request, .. } => {
            debug!("At time {}s: Not enough frames in the buffer, rebuffering!", now.as_secs_f64());
            w.record(now, client, flow, MetricKind::Rebuffer, buffer as u64);
            w.timeline.push(row(TimelineEvent::Rebuffer));
            if let Some(l) = request {
                debug!("At time {}s: Lower the video quality level!", now.as_secs_f64());
                w.record(now, client, flow, MetricKind::LevelDown, l as u64);
                w.timeline.push(row(TimelineEvent::LevelDown));
            }
            request
        }
        TickOutcome::Play { frames, request } => {
            w.record(now, client, flow, MetricKind::Play, frames as u64);
            w.timeline.push(row(TimelineEvent::Play));
            if let Some(l) = request {
                debug!("At time {}s: Increase the video quality level to {}", now.as_secs_f64(), l);
                w.record(now, client, flow, MetricKind::LevelUp, l as u64);
                w.timeline.push(row(TimelineEvent::LevelUp));
            }
            request
        }
    };
    if let Some(level) = request {
        send_control(w, sim, client, level);
    }
    at(sim, now + TICK, move |w, sim| client_tick(w, sim, client));
}

/// Records every mobile node's position, then repeats until the horizon.
pub fn sample_mobility(w: &mut World, sim: &mut Sim) {
    let now = sim.now();
    for i in 0..w.nodes.len() {
        if !w.nodes[i].is_mobile() {
            continue;
        }
        let id = w.nodes[i].id;
        let position = w.node_mut(id).position_at(now);
        w.mobility_samples.push(MobilitySample { time: now, node: id, position });
    }
    let next = now + w.mobility_sample_period;
    if next <= w.horizon {
        at(sim, next, sample_mobility);
    }
}
