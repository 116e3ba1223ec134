//! Event queue and run loop.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{SimError, SimTime};

/// Handle returned by [`Simulator::schedule`], usable for cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(pub u64);

/// Deferred effect run against the world when its event fires.
pub type Action<W> = Box<dyn FnOnce(&mut W, &mut Simulator<W>)>;

struct Event<W> {
    fire_at: SimTime,
    seq: u64,
    action: Action<W>,
}

// BinaryHeap is a max-heap; invert so the earliest (time, seq) pops first.
impl<W> Ord for Event<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq)).reverse()
    }
}

impl<W> PartialOrd for Event<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W> PartialEq for Event<W> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<W> Eq for Event<W> {}

/// Single-threaded discrete-event engine over a world of type `W`.
///
/// Events execute in `(fire_at, seq)` order where `seq` is the insertion
/// counter, so equal timestamps run in scheduling order.
pub struct Simulator<W> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Event<W>>,
    pending: HashSet<u64>,
    finished: bool,
}

impl<W> Default for Simulator<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W> Simulator<W> {
    pub fn new() -> Self {
        Self { now: SimTime::ZERO, next_seq: 0, queue: BinaryHeap::new(), pending: HashSet::new(), finished: false }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Number of scheduled events that have neither fired nor been cancelled.
    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    /// Schedules `action` to fire `delay_secs` seconds from now.
    pub fn schedule<F>(&mut self, delay_secs: f64, action: F) -> Result<EventId, SimError>
    where
        F: FnOnce(&mut W, &mut Simulator<W>) + 'static,
    {
        let delay = SimTime::try_from_secs_f64(delay_secs)?;
        self.schedule_in(delay, action)
    }

    pub fn schedule_in<F>(&mut self, delay: SimTime, action: F) -> Result<EventId, SimError>
    where
        F: FnOnce(&mut W, &mut Simulator<W>) + 'static,
    {
        self.schedule_at(self.now + delay, action)
    }

    pub fn schedule_at<F>(&mut self, at: SimTime, action: F) -> Result<EventId, SimError>
    where
        F: FnOnce(&mut W, &mut Simulator<W>) + 'static,
    {
        if self.finished {
            return Err(SimError::Finished);
        }
        if at < self.now {
            return Err(SimError::InPast { at, now: self.now });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.pending.insert(seq);
        self.queue.push(Event { fire_at: at, seq, action: Box::new(action) });
        Ok(EventId(seq))
    }

    /// Cancels a pending event. Cancelling a fired or already-cancelled
    /// event does nothing.
    pub fn cancel(&mut self, id: EventId) -> bool {
        self.pending.remove(&id.0)
    }

    /// Marks the simulation finished; later scheduling attempts fail.
    pub fn finish(&mut self) {
        self.finished = true;
    }

    /// Executes every event with `fire_at <= until`, returning how many ran.
    ///
    /// Afterwards the clock reads `until`, or the last fire time when
    /// `until` is [`SimTime::MAX`].
    pub fn run(&mut self, world: &mut W, until: SimTime) -> u64 {
        let mut processed = 0;
        while let Some(head) = self.queue.peek() {
            if head.fire_at > until {
                break;
            }
            let ev = self.queue.pop().expect("peeked");
            if !self.pending.remove(&ev.seq) {
                continue;
            }
            debug_assert!(ev.fire_at >= self.now);
            self.now = ev.fire_at;
            (ev.action)(world, self);
            processed += 1;
        }
        if until != SimTime::MAX && until > self.now {
            self.now = until;
        }
        processed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Log = Vec<(&'static str, SimTime)>;

    fn push(name: &'static str) -> impl FnOnce(&mut Log, &mut Simulator<Log>) {
        move |log: &mut Log, sim: &mut Simulator<Log>| log.push((name, sim.now()))
    }

    #[test]
    fn zero_delay_runs_after_current_event() {
        let mut sim = Simulator::new();
        let mut log = Log::new();
        sim.schedule(0.0, |log: &mut Log, sim: &mut Simulator<Log>| {
            sim.schedule(0.0, push("inner")).unwrap();
            log.push(("outer", sim.now()));
        })
        .unwrap();
        sim.run(&mut log, SimTime::MAX);
        assert_eq!(log, vec![("outer", SimTime::ZERO), ("inner", SimTime::ZERO)]);
    }

    #[test]
    fn equal_times_fire_in_schedule_order() {
        let mut sim = Simulator::new();
        let mut log = Log::new();
        sim.schedule(0.01, push("A")).unwrap();
        sim.schedule(0.01, push("B")).unwrap();
        sim.run(&mut log, SimTime::MAX);
        let t = SimTime::from_millis(10);
        assert_eq!(log, vec![("A", t), ("B", t)]);
    }

    #[test]
    fn negative_delay_rejected() {
        let mut sim: Simulator<Log> = Simulator::new();
        assert!(matches!(sim.schedule(-1.0, push("x")), Err(SimError::InvalidDelay(_))));
        assert!(sim.schedule(f64::NAN, push("x")).is_err());
    }

    #[test]
    fn empty_run_advances_clock() {
        let mut sim: Simulator<Log> = Simulator::new();
        assert_eq!(sim.run(&mut Log::new(), SimTime::from_secs(10)), 0);
        assert_eq!(sim.now(), SimTime::from_secs(10));
    }

    #[test]
    fn run_stops_at_horizon() {
        let mut sim = Simulator::new();
        let mut log = Log::new();
        for (n, s) in [("1", 1.0), ("2", 2.0), ("3", 3.0)] {
            sim.schedule(s, push(n)).unwrap();
        }
        assert_eq!(sim.run(&mut log, SimTime::from_secs(2)), 2);
        assert_eq!(sim.pending(), 1);
        assert_eq!(sim.run(&mut log, SimTime::MAX), 1);
        assert_eq!(sim.now(), SimTime::from_secs(3));
    }

    #[test]
    fn cancel_is_idempotent() {
        let mut sim = Simulator::new();
        let mut log = Log::new();
        let a = sim.schedule(1.0, push("a")).unwrap();
        let b = sim.schedule(2.0, push("b")).unwrap();
        assert!(sim.cancel(b));
        assert!(!sim.cancel(b));
        sim.run(&mut log, SimTime::MAX);
        assert!(!sim.cancel(a));
        assert_eq!(log, vec![("a", SimTime::from_secs(1))]);
    }

    #[test]
    fn finished_simulation_refuses_new_events() {
        let mut sim: Simulator<Log> = Simulator::new();
        sim.finish();
        assert!(matches!(sim.schedule(1.0, push("x")), Err(SimError::Finished)));
    }
}
