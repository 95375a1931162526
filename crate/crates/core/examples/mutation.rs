//! Applies a few mutations to a starting fortress and reports what changed.

use fsm_fortress::{init_fortress, mutate, Genome, MutationParams, Rng, SimConfig};

fn main() {
    let config = SimConfig::new("abc".chars().collect());
    let mut rng = Rng::new(3);
    let mut genome = Genome::from_fortress(&init_fortress(&config, &mut rng).unwrap());
    let params = MutationParams::default();

    for round in 1..=5 {
        let child = mutate(&genome, &params, &config, &mut rng);
        let sizes: Vec<String> = child
            .defs
            .iter()
            .map(|d| format!("{}:{}n/{}e", d.character(), d.nodes().len(), d.edges().len()))
            .collect();
        let changed = child
            .defs
            .iter()
            .zip(&genome.defs)
            .filter(|(a, b)| a != b)
            .count();
        println!(
            "round {round}: {changed} graphs changed, {} instances, [{}]",
            child.placements.len(),
            sizes.join(" ")
        );
        genome = child;
    }
}
