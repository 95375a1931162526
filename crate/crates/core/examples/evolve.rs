//! Hillclimbs one fortress and prints its fitness curve and coverage.
//!
//! `cargo run --release --example evolve -- [generations] [seed]`

use fsm_fortress::evolution::coverage_stats;
use fsm_fortress::{hillclimb, serialize_fsm, MutationParams, Rng, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/classic.cfg");
    let config = SimConfig::from_path(path)?;
    let mut args = std::env::args().skip(1);
    let generations: usize = args.next().map_or(Ok(300), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(config.seed), |s| s.parse())?;

    let mut rng = Rng::new(seed);
    let result = hillclimb(&config, &MutationParams::default(), generations, 20, &mut rng)?;
    for pair in result.records.windows(2) {
        if pair[1].best_fitness > pair[0].best_fitness {
            println!("gen {:>4}  best {:.2}", pair[1].generation, pair[1].best_fitness);
        }
    }

    let stats = coverage_stats(&result.best_eval.fortress);
    println!(
        "start {:.2}  final {:.2}  entities {}  node {:.0}%  edge {:.0}%",
        result.records[0].best_fitness,
        result.best_eval.score,
        result.best_eval.num_entities,
        stats.mean_node * 100.0,
        stats.mean_edge * 100.0
    );
    let largest = result.best.defs.iter().max_by_key(|d| d.size()).unwrap();
    print!("\nlargest graph:\n{}", serialize_fsm(largest));
    Ok(())
}
