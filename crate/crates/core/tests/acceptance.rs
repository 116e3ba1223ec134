//! End-to-end acceptance checks. Run with `cargo test --test acceptance`;
//! prints one PASS/FAIL line per criterion and exits nonzero on failure.

use std::cell::RefCell;
use std::fs;
use std::process::ExitCode;
use std::rc::Rc;
use std::time::{Duration, Instant};

use abrsim::metrics::{write_csv, MetricKind, Report, TimelineEvent, EVENT_LOG_CSV};
use abrsim::scenario::{build_scenario, ScenarioConfig, ScenarioKind, StaMobility};
use abrsim::sim::{RngStream, SimTime, Simulator};
use abrsim::stream::{fragment_frame, level_path};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

const SEED: u64 = 7;

fn config(kind: ScenarioKind) -> ScenarioConfig {
    ScenarioConfig { scenario: kind, seed: Some(SEED), ..ScenarioConfig::default() }
}

fn simulate(cfg: &ScenarioConfig) -> Result<Report, String> {
    cfg.validate().map_err(|e| e.to_string())?;
    let mut sim = build_scenario(cfg).map_err(|e| e.to_string())?;
    sim.run();
    Ok(sim.into_report())
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn fragmentation_exactness() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sample = [22500u32, 1027, 1027, 1251];
    for level in 0..4u32 {
        let text: String = sample.iter().map(|&b| format!("{}\n", (b * (level + 1) / 4).max(1))).collect();
        fs::write(level_path(dir.path(), level as usize), text).map_err(|e| e.to_string())?;
    }
    let mut cfg = config(ScenarioKind::A);
    cfg.ladder_dir = Some(dir.path().to_owned());
    cfg.p2p_rate_mbps = 100.0;
    cfg.horizon_s = 3.0;
    let report = simulate(&cfg)?;

    let tx: Vec<_> = report.events.iter().filter(|e| e.kind == MetricKind::TxPacket).collect();
    ensure!(!tx.is_empty(), "no packets sent");
    let first = tx[0].time;
    let frame0: Vec<u64> = tx.iter().take_while(|e| e.time == first).map(|e| e.value).collect();
    let mut want = vec![1400u64; 16];
    want.push(100);
    ensure!(frame0 == want, "frame 0 sent as {frame0:?}");
    let rx: Vec<u64> =
        report.events.iter().filter(|e| e.kind == MetricKind::RxPacket).take(17).map(|e| e.value).collect();
    ensure!(rx == want, "frame 0 received as {rx:?}");
    let done = report.events.iter().find(|e| e.kind == MetricKind::FrameComplete).map(|e| e.value);
    ensure!(done == Some(22500), "first completed frame {done:?}");
    Ok("17 packets: 16 x 1400 B + 100 B".into())
}

fn downgrade_sequence() -> Outcome {
    let mut cfg = config(ScenarioKind::A);
    cfg.p2p_rate_mbps = 1.5;
    cfg.p2p_queue_packets = 10_000;
    cfg.horizon_s = 6.0;
    let report = simulate(&cfg)?;
    let client = report.flows[0].client;
    let ticks: Vec<_> = report.timeline_of(client).take(4).collect();
    let events: Vec<TimelineEvent> = ticks.iter().map(|r| r.event).collect();
    // The downgrading tick logs its rebuffer row followed by the request.
    let want = [TimelineEvent::Rebuffer, TimelineEvent::Rebuffer, TimelineEvent::Rebuffer, TimelineEvent::LevelDown];
    ensure!(events == want, "first rows {events:?}");
    let times: Vec<f64> = ticks.iter().map(|r| r.time.as_secs_f64()).collect();
    ensure!(times == [1.0, 2.0, 3.0, 3.0], "rows at {times:?}");
    ensure!(ticks[3].level == 2, "level after downgrade {}", ticks[3].level);

    let flow = report.flows[0].id;
    let rebuffers: Vec<SimTime> = report
        .events
        .iter()
        .filter(|e| e.flow == flow && e.kind == MetricKind::Rebuffer)
        .map(|e| e.time)
        .take(3)
        .collect();
    ensure!(rebuffers.len() == 3, "only {} rebuffer events", rebuffers.len());
    let downs: Vec<_> = report
        .events
        .iter()
        .filter(|e| e.flow == flow && e.kind == MetricKind::LevelDown && e.time <= SimTime::from_secs(3))
        .collect();
    ensure!(downs.len() == 1, "{} level_down events by t=3", downs.len());
    ensure!(downs[0].time == rebuffers[2] && downs[0].value == 2, "level_down {:?}", downs[0]);
    let server_change = report.server_levels.first();
    ensure!(
        server_change.is_some_and(|c| c.from == 3 && c.to == 2 && c.time >= downs[0].time),
        "server level change {server_change:?}"
    );
    Ok("rebuffer at 1, 2, 3 s; one level_down to 2 on the third".into())
}

fn upgrade_sequence() -> Outcome {
    let mut cfg = config(ScenarioKind::A);
    // Top level is 16 Mb/s.
    cfg.p2p_rate_mbps = 32.0;
    let report = simulate(&cfg)?;
    let flow = report.flows[0];
    let threshold = 5 * cfg.frame_rate;

    let mut level = cfg.initial_level;
    let mut ups = Vec::new();
    for row in report.timeline_of(flow.client) {
        match row.event {
            TimelineEvent::LevelDown => return Err(format!("level_down at {}", row.time)),
            TimelineEvent::LevelUp => {
                ensure!(row.level == level + 1, "jump {level} -> {} at {}", row.level, row.time);
                ensure!(
                    row.buffer_frames > threshold,
                    "raise at {} with tick-start buffer {}",
                    row.time,
                    row.buffer_frames
                );
                level = row.level;
                ups.push((row.time.as_secs_f64(), row.level, row.buffer_frames));
            }
            _ => {}
        }
        ensure!(row.level <= 5, "level {} above top", row.level);
    }
    let levels: Vec<u16> = ups.iter().map(|u| u.1).collect();
    ensure!(levels == [4, 5], "level raises {levels:?}");
    let server: Vec<(u16, u16)> = report.server_levels.iter().map(|c| (c.from, c.to)).collect();
    ensure!(server == [(3, 4), (4, 5)], "server level changes {server:?}");
    Ok(format!("raises (t, level, buffer) {ups:?}"))
}

fn throughput_parity() -> Outcome {
    // The wireless channel and each wired link both carry 100 Mb/s per flow;
    // scenario d's three flows share a 300 Mb/s channel.
    let mut means = Vec::new();
    for kind in [ScenarioKind::A, ScenarioKind::B, ScenarioKind::C, ScenarioKind::D] {
        let mut cfg = config(kind);
        cfg.p2p_rate_mbps = 100.0;
        cfg.wifi_phy_rate_mbps = if kind == ScenarioKind::D { 300.0 } else { 100.0 };
        let report = simulate(&cfg)?;
        for f in &report.flows {
            means.push((kind.as_str(), f.id, report.throughput(f.id).active_mean_mbps()));
        }
    }
    ensure!(means.len() == 7, "{} flows", means.len());
    let avg = means.iter().map(|m| m.2).sum::<f64>() / means.len() as f64;
    for (kind, flow, m) in &means {
        let rel = (m - avg).abs() / avg;
        ensure!(rel <= 0.20, "scenario {kind} flow {flow}: {m:.3} Mb/s vs mean {avg:.3} ({:.1}%)", rel * 100.0);
    }
    let (lo, hi) = means.iter().fold((f64::MAX, f64::MIN), |(lo, hi), m| (lo.min(m.2), hi.max(m.2)));
    Ok(format!("7 flows within [{lo:.3}, {hi:.3}] Mb/s, mean {avg:.3}"))
}

struct RangeRun {
    offered_frames: usize,
    completed_frames: usize,
    tx_packets: usize,
    rx_packets: usize,
    range_drops: usize,
    mean_mbps: f64,
}

fn pinned_run(distance: f64) -> Result<RangeRun, String> {
    let mut cfg = config(ScenarioKind::C);
    cfg.sta_mobility = StaMobility::Constant;
    cfg.sta_min_x = distance;
    cfg.sta_min_y = 0.0;
    cfg.wifi_phy_rate_mbps = 100.0;
    let report = simulate(&cfg)?;
    let flow = report.flows[0].id;
    let mut burst_times: Vec<SimTime> =
        report.events.iter().filter(|e| e.flow == flow && e.kind == MetricKind::TxPacket).map(|e| e.time).collect();
    burst_times.dedup();
    Ok(RangeRun {
        offered_frames: burst_times.len(),
        completed_frames: report.count(flow, MetricKind::FrameComplete),
        tx_packets: report.count(flow, MetricKind::TxPacket),
        rx_packets: report.count(flow, MetricKind::RxPacket),
        range_drops: report.count(flow, MetricKind::DropRange),
        mean_mbps: report.throughput(flow).active_mean_mbps(),
    })
}

fn range_threshold() -> Outcome {
    let near = pinned_run(10.0)?;
    let mid = pinned_run(100.0)?;
    let far = pinned_run(200.0)?;
    ensure!(mid.offered_frames > 0, "no frames offered at 100 m");
    ensure!(
        mid.completed_frames == mid.offered_frames && mid.rx_packets == mid.tx_packets && mid.range_drops == 0,
        "100 m: {}/{} frames, {}/{} packets, {} range drops",
        mid.completed_frames,
        mid.offered_frames,
        mid.rx_packets,
        mid.tx_packets,
        mid.range_drops
    );
    ensure!(
        far.completed_frames == 0 && far.rx_packets == 0 && far.range_drops > 0,
        "200 m: {} frames, {} packets received, {} range drops",
        far.completed_frames,
        far.rx_packets,
        far.range_drops
    );
    let diff = (near.mean_mbps - mid.mean_mbps).abs() / mid.mean_mbps;
    ensure!(diff < 0.01, "10 m {:.4} vs 100 m {:.4} Mb/s", near.mean_mbps, mid.mean_mbps);
    Ok(format!(
        "100 m: {}/{} frames; 200 m: 0 frames, {} range drops; 10 m vs 100 m differ {:.3}%",
        mid.completed_frames,
        mid.offered_frames,
        far.range_drops,
        diff * 100.0
    ))
}

fn stop_condition() -> Outcome {
    let mut cfg = config(ScenarioKind::A);
    cfg.max_frame = 10;
    cfg.p2p_rate_mbps = 100.0;
    let report = simulate(&cfg)?;
    let flow = report.flows[0];
    let completed = report.count(flow.id, MetricKind::FrameComplete);
    ensure!(completed == 10, "{completed} frames completed");

    let rows: Vec<_> = report.timeline_of(flow.client).collect();
    let stop_at = rows.iter().position(|r| r.event == TimelineEvent::Stop);
    let Some(stop_at) = stop_at else {
        return Err("client never stopped".into());
    };
    ensure!(stop_at == rows.len() - 1, "{} ticks after the stop", rows.len() - 1 - stop_at);
    ensure!(stop_at >= 3, "stopped on tick {}", stop_at + 1);
    // The three ticks ending at the stop each saw the same short buffer
    // as the tick before them.
    let base = rows[stop_at - 3].buffer_frames;
    ensure!(base < cfg.frame_rate, "buffer {base} not short before the stop");
    for r in &rows[stop_at - 2..=stop_at] {
        ensure!(r.buffer_frames == base, "buffer changed to {} at {}", r.buffer_frames, r.time);
    }
    ensure!(rows[stop_at - 3].event != TimelineEvent::Stall, "more than three stagnant ticks");
    let stop_time = rows[stop_at].time;
    let after = report
        .events
        .iter()
        .filter(|e| e.node == flow.client && e.kind.is_client_event() && e.time > stop_time)
        .count();
    ensure!(after == 0, "{after} client events after stop at {stop_time}");
    let stops = report.count(flow.id, MetricKind::Stop);
    ensure!(stops == 1, "{stops} stop events");
    let kinds: Vec<&str> = rows.iter().map(|r| r.event.as_str()).collect();
    Ok(format!("ticks {kinds:?}; stop at {stop_time}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for kind in [ScenarioKind::C, ScenarioKind::D] {
        let mut logs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{}-{run}", kind.as_str()));
            let report = simulate(&config(kind))?;
            write_csv(&report, &out).map_err(|e| e.to_string())?;
            logs.push(fs::read(out.join(EVENT_LOG_CSV)).map_err(|e| e.to_string())?);
        }
        ensure!(logs[0] == logs[1], "scenario {} event logs differ", kind.as_str());
        ensure!(logs[0].len() > 100, "scenario {} event log nearly empty", kind.as_str());
    }
    let a = simulate(&config(ScenarioKind::C))?;
    let mut other = config(ScenarioKind::C);
    other.seed = Some(SEED + 1);
    let b = simulate(&other)?;
    ensure!(!a.mobility.is_empty(), "no mobility samples");
    ensure!(a.mobility != b.mobility, "seeds {SEED} and {} give the same mobility", SEED + 1);
    Ok(format!("identical logs for c and d; {} mobility samples differ across seeds", a.mobility.len()))
}

fn engine_ordering() -> Outcome {
    const N: usize = 100_000;
    let mut rng = RngStream::new(SEED, 0, "engine-acceptance");
    let fired: Rc<RefCell<Vec<usize>>> = Rc::default();
    let mut sim: Simulator<()> = Simulator::new();
    let mut scheduled = Vec::with_capacity(N);
    for i in 0..N {
        // A narrow time range forces many equal timestamps.
        let at = SimTime::from_nanos((rng.next_unit() * 5_000.0) as u64);
        let log = fired.clone();
        sim.schedule_at(at, move |_, _| log.borrow_mut().push(i)).map_err(|e| e.to_string())?;
        scheduled.push((at, i));
    }
    let ran = sim.run(&mut (), SimTime::MAX);
    let mut oracle = scheduled.clone();
    oracle.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let want: Vec<usize> = oracle.iter().map(|e| e.1).collect();
    ensure!(ran as usize == N, "{ran} events ran");
    ensure!(*fired.borrow() == want, "execution order differs from (time, seq) sort");
    let ties = oracle.windows(2).filter(|w| w[0].0 == w[1].0).count();
    Ok(format!("{N} events in oracle order, {ties} tied timestamps"))
}

fn fragmentation_property() -> Outcome {
    let mut rng = RngStream::new(SEED, 0, "fragment-acceptance");
    for _ in 0..10_000 {
        let frame = 1 + (rng.next_unit() * 1_000_000.0) as u32;
        let max = 1 + (rng.next_unit() * 2_000.0) as u32;
        let parts = fragment_frame(frame, max).map_err(|e| e.to_string())?;
        let sum: u64 = parts.iter().map(|&p| p as u64).sum();
        ensure!(sum == frame as u64, "({frame}, {max}): sum {sum}");
        ensure!(parts.len() == frame.div_ceil(max) as usize, "({frame}, {max}): {} parts", parts.len());
        ensure!(parts.iter().all(|&p| p >= 1 && p <= max), "({frame}, {max}): part out of bounds");
        ensure!(parts[..parts.len() - 1].iter().all(|&p| p == max), "({frame}, {max}): short non-final part");
    }
    Ok("10000 random pairs".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("fragmentation exactness", Duration::from_secs(1), fragmentation_exactness),
        ("downgrade sequence", Duration::from_secs(5), downgrade_sequence),
        ("upgrade sequence", Duration::from_secs(5), upgrade_sequence),
        ("throughput parity", Duration::from_secs(20), throughput_parity),
        ("range threshold", Duration::from_secs(5), range_threshold),
        ("stop condition", Duration::from_secs(2), stop_condition),
        ("determinism", Duration::from_secs(10), determinism),
        ("engine ordering", Duration::from_secs(2), engine_ordering),
        ("fragmentation property", Duration::from_secs(1), fragmentation_property),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => {
                Err(format!("{detail}; took {:.2}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({:.2}s): {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({:.2}s): {why}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
