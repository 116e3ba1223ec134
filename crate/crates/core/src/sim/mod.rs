//! Deterministic discrete-event engine: virtual clock, totally ordered
//! event queue, and seeded random streams.

mod rng;
mod scheduler;
mod time;

pub use rng::RngStream;
pub use scheduler::{Action, EventId, Simulator};
pub use time::SimTime;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("delay must be finite and non-negative, got {0}")]
    InvalidDelay(f64),
    #[error("cannot schedule at {at} before current time {now}")]
    InPast { at: SimTime, now: SimTime },
    #[error("simulation already finished")]
    Finished,
    #[error("invalid uniform range [{lo}, {hi})")]
    InvalidRange { lo: f64, hi: f64 },
}
