//! Saves a starting fortress, reloads it and checks the rerun matches.

use fsm_fortress::world::{parse_save, render_log, save_text};
use fsm_fortress::{init_fortress, run, Rng, SimConfig};

fn main() {
    let config = SimConfig::new("@$%".chars().collect());
    let start = init_fortress(&config, &mut Rng::new(42)).unwrap();
    let saved = save_text(&start);
    print!("{saved}");

    let mut first = start;
    let mut rng = Rng::new(first.seed);
    let stop = run(&mut first, &config, &mut rng, 100);
    let mut second = parse_save(&saved).unwrap();
    let mut rng = Rng::new(second.seed);
    let again = run(&mut second, &config, &mut rng, 100);

    let (a, b) = (render_log(&first, stop), render_log(&second, again));
    println!("\n{} log lines, identical: {}", first.log().len(), a == b);
}
