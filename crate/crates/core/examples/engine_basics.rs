//! The event engine on its own: scheduling, equal-time ordering and
//! cancellation over a user-defined world.
//!
//! cargo run --example engine_basics

use abrsim::sim::{SimTime, Simulator};

#[derive(Default)]
struct Log(Vec<String>);

fn main() {
    let mut sim: Simulator<Log> = Simulator::new();
    let mut log = Log::default();

    sim.schedule(1.0, |w: &mut Log, s| w.0.push(format!("{} first at one second", s.now()))).unwrap();
    sim.schedule(1.0, |w: &mut Log, s| w.0.push(format!("{} second at one second", s.now()))).unwrap();
    let doomed = sim.schedule(0.5, |w: &mut Log, _| w.0.push("never runs".into())).unwrap();
    sim.schedule_at(SimTime::from_millis(250), |w: &mut Log, s| {
        w.0.push(format!("{} rescheduling a follow-up", s.now()));
        s.schedule(2.0, |w: &mut Log, s| w.0.push(format!("{} follow-up", s.now()))).unwrap();
    })
    .unwrap();
    assert!(sim.cancel(doomed));

    let ran = sim.run(&mut log, SimTime::from_secs(10));
    for line in &log.0 {
        println!("{line}");
    }
    println!("{ran} events ran; clock at {}", sim.now());
}
