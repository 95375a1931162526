//! Generates a random entity graph, prints its text form, parses it back
//! and shows what pruning removes.

use fsm_fortress::{generate_fsm, parse_fsm, serialize_fsm, Rng, SimConfig};

fn main() {
    let config = SimConfig::new("@$%&*".chars().collect());
    let mut rng = Rng::new(11);
    let def = (0..)
        .map(|_| generate_fsm('@', &config, &mut rng))
        .find(|d| d.reachable().contains(&false))
        .unwrap();

    let text = serialize_fsm(&def);
    print!("{text}");
    assert_eq!(parse_fsm(&text).unwrap(), def);

    let pruned = def.prune();
    println!(
        "\nafter pruning {} of {} nodes remain:",
        pruned.nodes().len(),
        def.nodes().len()
    );
    print!("{}", serialize_fsm(&pruned));
}
