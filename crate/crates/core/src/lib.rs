//! Deterministic discrete-event simulation of adaptive-bitrate video
//! streaming over point-to-point links and shared wireless channels.
//!
//! The crate is layered bottom-up:
//!
//! - [`sim`]: virtual clock, totally ordered event queue, seeded streams.
//! - [`net`]: positions and mobility, log-distance path loss with threshold
//!   delivery, point-to-point links and a serialized wireless channel.
//! - [`stream`]: frame-size traces, the streaming server with its per-client
//!   quality table, fragmentation, reassembly and the buffer-driven
//!   quality controller.
//! - [`metrics`]: event collection, throughput binning and CSV output.
//! - [`scenario`]: configuration and the four reference topologies.
//!
//! ```no_run
//! use abrsim::scenario::{parse_config, run_scenario};
//!
//! let cfg = parse_config("scenario = a\nseed = 7\nout_dir = out/a").unwrap();
//! let report = run_scenario(&cfg, &mut std::io::stdout()).unwrap();
//! println!("{} flows", report.flows.len());
//! ```

pub mod metrics;
pub mod net;
pub mod scenario;
pub mod sim;
pub mod stream;
