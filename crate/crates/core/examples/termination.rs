//! Three tiny populations, one for each way a run can end.

use fsm_fortress::fsm::Edge;
use fsm_fortress::{init_fortress, run, Action, Condition, EntityDef, Rng, SimConfig};

fn simulate(label: &str, def: EntityDef, pop_perc: f64, init_pop_perc: f64) {
    let mut config = SimConfig::new(vec![def.character()]);
    config.fixed_defs = vec![def];
    config.pop_perc = pop_perc;
    config.init_pop_perc = Some(init_pop_perc);

    let mut fortress = init_fortress(&config, &mut Rng::new(1)).unwrap();
    let mut rng = Rng::new(fortress.seed);
    let stop = run(&mut fortress, &config, &mut rng, 1000);
    println!(
        "{label:<12} {stop} at tick {} with {} alive",
        fortress.tick(),
        fortress.len()
    );
}

fn main() {
    let go = |src, dst| Edge {
        src,
        dst,
        cond: Condition::None,
    };
    simulate("idle", EntityDef::root_only('a'), 0.0, 0.0);
    let chain = EntityDef::new(
        'a',
        vec![Action::Idle, Action::Clone, Action::Move],
        vec![go(0, 1), go(1, 2)],
    );
    simulate("clone chain", chain.unwrap(), 1.0, 0.0);
    let doomed = EntityDef::new('a', vec![Action::Idle, Action::Die], vec![go(0, 1)]);
    simulate("die", doomed.unwrap(), 0.0, 0.5);
}
