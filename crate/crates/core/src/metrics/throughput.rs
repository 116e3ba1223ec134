use super::{MetricEvent, MetricKind};
use crate::net::FlowId;
use crate::sim::SimTime;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputBin {
    pub start: SimTime,
    pub end: SimTime,
    pub bytes: u64,
    pub mbps: f64,
}

/// Per-flow byte counts in contiguous bins starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputSeries {
    pub flow: FlowId,
    pub bin_width: SimTime,
    pub bins: Vec<ThroughputBin>,
}

impl ThroughputSeries {
    pub fn total_bytes(&self) -> u64 {
        self.bins.iter().map(|b| b.bytes).sum()
    }

    /// Mean Mb/s over the bins from the first to the last non-empty one;
    /// zero when the flow carried nothing.
    pub fn active_mean_mbps(&self) -> f64 {
        let first = self.bins.iter().position(|b| b.bytes > 0);
        let last = self.bins.iter().rposition(|b| b.bytes > 0);
        match (first, last) {
            (Some(f), Some(l)) => {
                let span = &self.bins[f..=l];
                span.iter().map(|b| b.mbps).sum::<f64>() / span.len() as f64
            }
            _ => 0.0,
        }
    }
}

fn mbps(bytes: u64, width: SimTime) -> f64 {
    bytes as f64 * 8.0 / (width.as_secs_f64() * 1e6)
}

fn series_of(
    events: &[MetricEvent],
    flow: FlowId,
    kind: MetricKind,
    bin_width: SimTime,
    horizon: SimTime,
) -> ThroughputSeries {
    assert!(bin_width > SimTime::ZERO, "bin width must be positive");
    let w = bin_width.as_nanos();
    let relevant = events.iter().filter(|e| e.flow == flow && e.kind == kind);
    let mut n = horizon.as_nanos().div_ceil(w) as usize;
    if let Some(last) = relevant.clone().map(|e| e.time).max() {
        n = n.max((last.as_nanos() / w + 1) as usize);
    }
    let mut bytes = vec![0u64; n];
    for e in relevant {
        bytes[(e.time.as_nanos() / w) as usize] += e.value;
    }
    let bins = bytes
        .into_iter()
        .enumerate()
        .map(|(i, b)| ThroughputBin {
            start: SimTime(i as u64 * w),
            end: SimTime((i as u64 + 1) * w),
            bytes: b,
            mbps: mbps(b, bin_width),
        })
        .collect();
    ThroughputSeries { flow, bin_width, bins }
}

/// Application-level throughput: bytes of fully reassembled frames.
pub fn throughput_series(
    events: &[MetricEvent],
    flow: FlowId,
    bin_width: SimTime,
    horizon: SimTime,
) -> ThroughputSeries {
    series_of(events, flow, MetricKind::FrameComplete, bin_width, horizon)
}

/// Raw packet throughput from `rx_packet` payload bytes.
pub fn packet_throughput_series(
    events: &[MetricEvent],
    flow: FlowId,
    bin_width: SimTime,
    horizon: SimTime,
) -> ThroughputSeries {
    series_of(events, flow, MetricKind::RxPacket, bin_width, horizon)
}
