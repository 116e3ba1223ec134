//! Node placement and movement.

use std::f64::consts::TAU;

use crate::sim::RngStream;

/// Two-dimensional Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle, inclusive on all edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
}

impl Bounds {
    pub fn new(min_x: f64, max_x: f64, min_y: f64, max_y: f64) -> Self {
        Self { min_x, max_x, min_y, max_y }
    }

    pub fn contains(&self, p: &Position) -> bool {
        (self.min_x..=self.max_x).contains(&p.x) && (self.min_y..=self.max_y).contains(&p.y)
    }

    fn clamp(&self, p: Position) -> Position {
        Position::new(p.x.clamp(self.min_x, self.max_x), p.y.clamp(self.min_y, self.max_y))
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::new(-50.0, 50.0, -50.0, 50.0)
    }
}

/// Parameters of the 2-D random walk: the node travels in a straight line
/// for `leg_period` seconds, then redraws direction and speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomWalk {
    pub bounds: Bounds,
    pub speed_min: f64,
    pub speed_max: f64,
    pub leg_period: f64,
}

impl Default for RandomWalk {
    fn default() -> Self {
        Self { bounds: Bounds::default(), speed_min: 2.0, speed_max: 4.0, leg_period: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MobilityModel {
    ConstantPosition,
    RandomWalk2d(RandomWalk),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityState {
    pub position: Position,
    /// Radians in `[0, 2π)`.
    pub direction: f64,
    /// Meters per second.
    pub speed: f64,
    pub model: MobilityModel,
    /// Travel time spent on the current leg.
    pub leg_elapsed: f64,
}

impl MobilityState {
    pub fn constant(position: Position) -> Self {
        Self { position, direction: 0.0, speed: 0.0, model: MobilityModel::ConstantPosition, leg_elapsed: 0.0 }
    }

    /// Starts a random walk at `position` with an initial leg drawn from `rng`.
    pub fn random_walk(position: Position, walk: RandomWalk, rng: &mut RngStream) -> Self {
        let mut state = Self {
            position: walk.bounds.clamp(position),
            direction: 0.0,
            speed: walk.speed_min,
            model: MobilityModel::RandomWalk2d(walk),
            leg_elapsed: 0.0,
        };
        state.redraw(&walk, rng);
        state
    }

    fn redraw(&mut self, walk: &RandomWalk, rng: &mut RngStream) {
        self.direction = rng.next_uniform(0.0, TAU).expect("non-empty range");
        self.speed = if walk.speed_min < walk.speed_max {
            rng.next_uniform(walk.speed_min, walk.speed_max).expect("checked range")
        } else {
            walk.speed_min
        };
        self.leg_elapsed = 0.0;
    }
}

/// Row-major grid placement.
pub fn grid_position(index: u32, delta_x: f64, delta_y: f64, grid_width: u32) -> Position {
    assert!(grid_width >= 1, "grid width must be at least one column");
    let col = index % grid_width;
    let row = index / grid_width;
    Position::new(col as f64 * delta_x, row as f64 * delta_y)
}

fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Advances `state` by `dt` seconds of travel.
///
/// Walls reflect the path like a mirror. Each time a leg completes, a new
/// direction and speed are drawn from `rng`. Constant-position states are
/// returned unchanged.
pub fn step_random_walk(state: &MobilityState, dt: f64, rng: &mut RngStream) -> MobilityState {
    let mut next = state.clone();
    let walk = match state.model {
        MobilityModel::ConstantPosition => return next,
        MobilityModel::RandomWalk2d(w) => w,
    };
    assert!(dt > 0.0 && dt.is_finite(), "dt must be positive");

    let mut remaining = dt;
    while remaining > 0.0 {
        let leg_left = (walk.leg_period - next.leg_elapsed).max(0.0);
        let span = remaining.min(leg_left);
        travel(&mut next, &walk.bounds, span);
        next.leg_elapsed += span;
        remaining -= span;
        if next.leg_elapsed >= walk.leg_period {
            next.redraw(&walk, rng);
        }
    }
    next
}

fn travel(state: &mut MobilityState, bounds: &Bounds, mut t: f64) {
    let mut guard = 0;
    while t > 0.0 {
        let vx = state.speed * state.direction.cos();
        let vy = state.speed * state.direction.sin();
        let tx = wall_time(state.position.x, vx, bounds.min_x, bounds.max_x);
        let ty = wall_time(state.position.y, vy, bounds.min_y, bounds.max_y);
        let hit = tx.min(ty);
        if hit >= t || guard > 64 {
            state.position = bounds.clamp(Position::new(state.position.x + vx * t, state.position.y + vy * t));
            return;
        }
        state.position = bounds.clamp(Position::new(state.position.x + vx * hit, state.position.y + vy * hit));
        if tx <= hit {
            state.direction = normalize_angle(std::f64::consts::PI - state.direction);
        }
        if ty <= hit {
            state.direction = normalize_angle(-state.direction);
        }
        t -= hit;
        guard += 1;
    }
}

/// Time until the coordinate reaches the wall it is moving towards.
fn wall_time(p: f64, v: f64, lo: f64, hi: f64) -> f64 {
    // Components below this speed are rounding noise from cos/sin.
    const EPS: f64 = 1e-12;
    if v > EPS {
        ((hi - p) / v).max(0.0)
    } else if v < -EPS {
        ((lo - p) / v).max(0.0)
    } else {
        f64::INFINITY
    }
}
