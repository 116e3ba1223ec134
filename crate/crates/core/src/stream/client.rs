//! Client side: fragment reassembly, playback buffer and the
//! buffer-driven quality controller.

use std::collections::{BTreeMap, BTreeSet};

use super::packet::DataPacketHeader;
use crate::sim::SimTime;

/// Incomplete frames older than this are dropped.
pub const REASSEMBLY_TIMEOUT: SimTime = SimTime::from_secs(2);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentOutcome {
    Partial,
    Complete {
        frame_seq: u32,
        bytes: u32,
        level: u8,
    },
    Duplicate,
    /// Header contradicts itself or earlier fragments of the same frame.
    Inconsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvictedFrame {
    pub frame_seq: u32,
    pub bytes: u32,
}

#[derive(Debug, Clone)]
struct Partial {
    first_seen: SimTime,
    frag_count: u16,
    total: u32,
    level: u8,
    received: Vec<bool>,
    missing: u16,
}

/// All-or-nothing frame reassembly keyed by frame sequence number.
#[derive(Debug, Clone)]
pub struct Reassembler {
    timeout: SimTime,
    partial: BTreeMap<u32, Partial>,
    /// Frames already completed or evicted; late fragments for them are ignored.
    closed: BTreeSet<u32>,
    inconsistent: u64,
}

impl Default for Reassembler {
    fn default() -> Self {
        Self::new(REASSEMBLY_TIMEOUT)
    }
}

impl Reassembler {
    pub fn new(timeout: SimTime) -> Self {
        Self { timeout, partial: BTreeMap::new(), closed: BTreeSet::new(), inconsistent: 0 }
    }

    pub fn in_progress(&self) -> usize {
        self.partial.len()
    }

    pub fn inconsistent_count(&self) -> u64 {
        self.inconsistent
    }

    pub fn accept(&mut self, h: &DataPacketHeader, now: SimTime) -> FragmentOutcome {
        if !h.is_consistent() {
            self.inconsistent += 1;
            return FragmentOutcome::Inconsistent;
        }
        if self.closed.contains(&h.frame_seq) {
            return FragmentOutcome::Duplicate;
        }
        let entry = self.partial.entry(h.frame_seq).or_insert_with(|| Partial {
            first_seen: now,
            frag_count: h.frag_count,
            total: h.frame_total_bytes,
            level: h.level,
            received: vec![false; h.frag_count as usize],
            missing: h.frag_count,
        });
        if entry.frag_count != h.frag_count || entry.total != h.frame_total_bytes {
            self.inconsistent += 1;
            return FragmentOutcome::Inconsistent;
        }
        let slot = &mut entry.received[h.frag_index as usize];
        if *slot {
            return FragmentOutcome::Duplicate;
        }
        *slot = true;
        entry.missing -= 1;
        if entry.missing > 0 {
            return FragmentOutcome::Partial;
        }
        let done = self.partial.remove(&h.frame_seq).expect("entry present");
        self.closed.insert(h.frame_seq);
        FragmentOutcome::Complete { frame_seq: h.frame_seq, bytes: done.total, level: done.level }
    }

    /// Drops entries first seen more than the timeout before `now`.
    pub fn evict(&mut self, now: SimTime) -> Vec<EvictedFrame> {
        let stale: Vec<u32> = self
            .partial
            .iter()
            .filter(|(_, p)| now.saturating_sub(p.first_seen) > self.timeout)
            .map(|(&seq, _)| seq)
            .collect();
        stale
            .into_iter()
            .map(|seq| {
                let p = self.partial.remove(&seq).expect("listed above");
                self.closed.insert(seq);
                EvictedFrame { frame_seq: seq, bytes: p.total }
            })
            .collect()
    }
}

/// Result of one buffer-read tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TickOutcome {
    /// Buffer unchanged and short for the third tick in a row.
    Stop,
    /// Buffer unchanged and short; counting towards a stop.
    Stall { stop_counter: u32 },
    /// Buffer short but growing; `request` carries a lower level to ask for.
    Rebuffer { rebuffer_counter: u32, request: Option<u16> },
    /// One second of video played; `request` carries a higher level.
    Play { frames: u32, request: Option<u16> },
}

/// Playback buffer and controller state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaybackState {
    pub cur_buffer: u32,
    pub last_buffer: u32,
    pub stop_counter: u32,
    pub rebuffer_counter: u32,
    pub frame_rate: u32,
    pub level_view: u16,
    pub top_level: u16,
    pub stopped: bool,
}

impl PlaybackState {
    pub const STOP_TICKS: u32 = 3;
    pub const REBUFFER_TICKS: u32 = 3;
    /// Seconds of video beyond which a higher level is requested.
    pub const UPGRADE_SECONDS: u32 = 5;

    pub fn new(frame_rate: u32, initial_level: u16, top_level: u16) -> Self {
        Self {
            cur_buffer: 0,
            last_buffer: 0,
            stop_counter: 0,
            rebuffer_counter: 0,
            frame_rate,
            level_view: initial_level.min(top_level),
            top_level,
            stopped: false,
        }
    }

    pub fn push_frame(&mut self) {
        self.cur_buffer += 1;
    }

    /// One playback tick, driven by the buffer occupancy at tick start.
    pub fn read_buffer(&mut self) -> TickOutcome {
        debug_assert!(!self.stopped, "tick on a stopped client");
        let b = self.cur_buffer;
        let outcome = if b < self.frame_rate {
            if b == self.last_buffer {
                self.stop_counter += 1;
                if self.stop_counter >= Self::STOP_TICKS {
                    self.stopped = true;
                    return TickOutcome::Stop;
                }
                TickOutcome::Stall { stop_counter: self.stop_counter }
            } else {
                self.stop_counter = 0;
                self.rebuffer_counter += 1;
                let count = self.rebuffer_counter;
                let mut request = None;
                if self.rebuffer_counter >= Self::REBUFFER_TICKS {
                    if self.level_view > 0 {
                        self.level_view -= 1;
                        request = Some(self.level_view);
                    }
                    self.rebuffer_counter = 0;
                }
                TickOutcome::Rebuffer { rebuffer_counter: count, request }
            }
        } else {
            self.stop_counter = 0;
            self.rebuffer_counter = 0;
            self.cur_buffer -= self.frame_rate;
            let mut request = None;
            if b > Self::UPGRADE_SECONDS * self.frame_rate && self.level_view < self.top_level {
                self.level_view += 1;
                request = Some(self.level_view);
            }
            TickOutcome::Play { frames: self.frame_rate, request }
        };
        self.last_buffer = b;
        outcome
    }
}
