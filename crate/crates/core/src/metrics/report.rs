use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use super::{throughput_series, MetricEvent, MetricKind, MetricsError, ThroughputSeries};
use crate::net::{FlowId, NodeId, Position};
use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowInfo {
    pub id: FlowId,
    pub server: NodeId,
    pub client: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimelineEvent {
    Play,
    Rebuffer,
    /// Short buffer that did not change since the previous tick.
    Stall,
    Stop,
    LevelUp,
    LevelDown,
}

impl TimelineEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            TimelineEvent::Play => "play",
            TimelineEvent::Rebuffer => "rebuffer",
            TimelineEvent::Stall => "stall",
            TimelineEvent::Stop => "stop",
            TimelineEvent::LevelUp => "level_up",
            TimelineEvent::LevelDown => "level_down",
        }
    }
}

impl fmt::Display for TimelineEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Client playback state at a buffer tick. `buffer_frames` is the
/// occupancy at tick start; `level` is the client's level after the tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimelineRow {
    pub time: SimTime,
    pub client: NodeId,
    pub buffer_frames: u32,
    pub level: u16,
    pub event: TimelineEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServerLevelChange {
    pub time: SimTime,
    pub server: NodeId,
    pub client: NodeId,
    pub from: u16,
    pub to: u16,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilitySample {
    pub time: SimTime,
    pub node: NodeId,
    pub position: Position,
}

/// Everything a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub horizon: SimTime,
    pub bin_width: SimTime,
    pub flows: Vec<FlowInfo>,
    pub events: Vec<MetricEvent>,
    pub timeline: Vec<TimelineRow>,
    pub server_levels: Vec<ServerLevelChange>,
    pub mobility: Vec<MobilitySample>,
    /// Wireless channel occupancy intervals, in transmission order.
    pub channel_busy: Vec<(SimTime, SimTime)>,
}

impl Report {
    pub fn empty(horizon: SimTime, bin_width: SimTime) -> Self {
        Self {
            horizon,
            bin_width,
            flows: Vec::new(),
            events: Vec::new(),
            timeline: Vec::new(),
            server_levels: Vec::new(),
            mobility: Vec::new(),
            channel_busy: Vec::new(),
        }
    }

    pub fn throughput(&self, flow: FlowId) -> ThroughputSeries {
        throughput_series(&self.events, flow, self.bin_width, self.horizon)
    }

    pub fn count(&self, flow: FlowId, kind: MetricKind) -> usize {
        self.events.iter().filter(|e| e.flow == flow && e.kind == kind).count()
    }

    pub fn sum(&self, flow: FlowId, kind: MetricKind) -> u64 {
        self.events.iter().filter(|e| e.flow == flow && e.kind == kind).map(|e| e.value).sum()
    }

    pub fn timeline_of(&self, client: NodeId) -> impl Iterator<Item = &TimelineRow> {
        self.timeline.iter().filter(move |r| r.client == client)
    }

    pub fn event_log_csv(&self) -> String {
        let mut s = String::from("time_s,node,flow,kind,value\n");
        for e in &self.events {
            let _ = writeln!(s, "{},{},{},{},{}", e.time.fmt_secs6(), e.node, e.flow, e.kind, e.value);
        }
        s
    }

    pub fn throughput_csv(&self) -> String {
        let mut s = String::from("flow,t_start_s,t_end_s,bytes,mbps\n");
        for f in &self.flows {
            for b in self.throughput(f.id).bins {
                let _ = writeln!(s, "{},{},{},{},{:.6}", f.id, b.start.fmt_secs6(), b.end.fmt_secs6(), b.bytes, b.mbps);
            }
        }
        s
    }

    pub fn client_timeline_csv(&self) -> String {
        let mut s = String::from("time_s,client,buffer_frames,level,event\n");
        for r in &self.timeline {
            let _ = writeln!(s, "{},{},{},{},{}", r.time.fmt_secs6(), r.client, r.buffer_frames, r.level, r.event);
        }
        s
    }

    /// Per-flow one-line digest.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<5} {:>6} {:>6} {:>10} {:>8} {:>9} {:>8} {:>6}",
            "flow", "server", "client", "mean_mbps", "frames", "rebuffers", "switches", "stops"
        );
        for f in &self.flows {
            let switches = self.count(f.id, MetricKind::LevelUp) + self.count(f.id, MetricKind::LevelDown);
            let _ = writeln!(
                s,
                "{:<5} {:>6} {:>6} {:>10.3} {:>8} {:>9} {:>8} {:>6}",
                f.id.0,
                f.server.0,
                f.client.0,
                self.throughput(f.id).active_mean_mbps(),
                self.count(f.id, MetricKind::FrameComplete),
                self.count(f.id, MetricKind::Rebuffer),
                switches,
                self.count(f.id, MetricKind::Stop),
            );
        }
        s
    }
}

pub const EVENT_LOG_CSV: &str = "event_log.csv";
pub const THROUGHPUT_CSV: &str = "throughput.csv";
pub const CLIENT_TIMELINE_CSV: &str = "client_timeline.csv";

/// Writes the three CSV files into `out_dir`, creating it if needed.
pub fn write_csv(report: &Report, out_dir: &Path) -> Result<(), MetricsError> {
    fs::create_dir_all(out_dir).map_err(|e| MetricsError::Io { path: out_dir.to_owned(), source: e })?;
    for (name, body) in [
        (EVENT_LOG_CSV, report.event_log_csv()),
        (THROUGHPUT_CSV, report.throughput_csv()),
        (CLIENT_TIMELINE_CSV, report.client_timeline_csv()),
    ] {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| MetricsError::Io { path, source: e })?;
    }
    Ok(())
}
