//! Animates a random fortress in the terminal.
//!
//! `cargo run --example render -- [ticks]`

use std::time::Duration;

use fsm_fortress::engine::run_observed;
use fsm_fortress::render::render;
use fsm_fortress::{init_fortress, Rng, SimConfig};

fn main() {
    let ticks = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let config = SimConfig::new("@$%&*+".chars().collect());
    let mut fortress = init_fortress(&config, &mut Rng::new(5)).unwrap();
    let mut rng = Rng::new(fortress.seed);
    print!("{}", render(&fortress, true));
    let stop = run_observed(&mut fortress, &config, &mut rng, ticks, |f, _| {
        print!("\x1b[2J\x1b[H{}", render(f, true));
        std::thread::sleep(Duration::from_millis(150));
    });
    println!("stopped: {stop}");
}
