//! Link and the Korok: the hand-written graphs from `configs/zelda.cfg`.
//!
//! `cargo run --example zelda -- [seed]`

use fsm_fortress::render::render;
use fsm_fortress::world::Event;
use fsm_fortress::{init_fortress, run, Rng, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/zelda.cfg");
    let config = SimConfig::from_path(path)?;
    let seed = match std::env::args().nth(1) {
        Some(s) => s.parse()?,
        None => config.seed,
    };

    let mut fortress = init_fortress(&config, &mut Rng::new(seed))?;
    print!("{}", render(&fortress, false));
    let mut rng = Rng::new(fortress.seed);
    let stop = run(&mut fortress, &config, &mut rng, 200);

    for entry in fortress.log() {
        if matches!(entry.event, Event::Transform(_) | Event::Take(_)) {
            println!("{entry}");
        }
    }
    println!("stopped: {stop} at tick {}", fortress.tick());
    Ok(())
}
