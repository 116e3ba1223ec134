//! A random walk bouncing inside its rectangle.
//!
//! cargo run --example mobility

use abrsim::net::{step_random_walk, MobilityState, Position, RandomWalk};
use abrsim::sim::RngStream;

fn main() {
    let walk = RandomWalk::default();
    let mut rng = RngStream::new(5, 1, "mobility");
    let mut state = MobilityState::random_walk(Position::new(45.0, 0.0), walk, &mut rng);
    for t in 1..=20 {
        state = step_random_walk(&state, 1.0, &mut rng);
        let p = state.position;
        println!("t={t:>2}s ({:>7.2}, {:>7.2}) heading {:.2} rad at {:.2} m/s", p.x, p.y, state.direction, state.speed);
        assert!(walk.bounds.contains(&p));
    }
}
