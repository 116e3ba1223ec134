//! Run measurements and their CSV serialization.

mod collector;
mod report;
mod throughput;

use std::path::PathBuf;

pub use collector::{Collector, MetricEvent, MetricKind};
pub use report::{
    write_csv, FlowInfo, MobilitySample, Report, ServerLevelChange, TimelineEvent, TimelineRow, CLIENT_TIMELINE_CSV,
    EVENT_LOG_CSV, THROUGHPUT_CSV,
};
pub use throughput::{packet_throughput_series, throughput_series, ThroughputBin, ThroughputSeries};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("unknown metric kind {0:?}")]
    UnknownKind(String),
    #[error("collector is closed")]
    Closed,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
