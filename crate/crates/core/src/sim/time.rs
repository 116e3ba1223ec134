//! Virtual simulation time.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use super::SimError;

const NANOS_PER_SEC: u64 = 1_000_000_000;

/// Nanoseconds since simulation start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_nanos(ns: u64) -> Self {
        SimTime(ns)
    }

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms * 1_000_000)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * NANOS_PER_SEC)
    }

    /// Converts seconds to nanoseconds, truncating any sub-nanosecond
    /// remainder. Products that land within 1e-3 ns of an integer are
    /// snapped to it, so `0.57` becomes 570 ms instead of 569.999999 ms.
    pub fn try_from_secs_f64(secs: f64) -> Result<Self, SimError> {
        if !secs.is_finite() || secs < 0.0 {
            return Err(SimError::InvalidDelay(secs));
        }
        let ns = secs * NANOS_PER_SEC as f64;
        if ns >= u64::MAX as f64 {
            return Err(SimError::InvalidDelay(secs));
        }
        let nearest = ns.round();
        let ns = if (ns - nearest).abs() < 1e-3 { nearest } else { ns.trunc() };
        Ok(SimTime(ns as u64))
    }

    pub const fn as_nanos(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC as f64
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    /// Fixed-point seconds with six decimals, computed from the integer
    /// count so the text never depends on float formatting.
    pub fn fmt_secs6(self) -> String {
        let micros = self.0 / 1_000;
        format!("{}.{:06}", micros / 1_000_000, micros % 1_000_000)
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_add(rhs.0))
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        *self = *self + rhs;
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.as_secs_f64())
    }
}
