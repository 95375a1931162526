//! The tick loop.
//!
//! Each tick has two passes over the instances alive when it began, both in
//! ascending id order. The action pass runs every instance's current node.
//! The transition pass then evaluates the outgoing edges of each surviving
//! instance against the updated world and moves it along the satisfied edge
//! of highest priority; the new node's action runs on the following tick.
//! Instances spawned during a tick take part from the next one.
//!
//! Random draws happen only inside actions: `move` and `push` draw a
//! direction, `clone` and `add` draw their success chance and then, on
//! success, the neighbouring tile.

use thiserror::Error;

use crate::config::SimConfig;
use crate::fsm::{Action, Condition};
use crate::rng::Rng;
use crate::world::{
    Cause, Direction, EntityId, Event, Fortress, LogEntry, StopReason, TraceEvent, TraceKind,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("fortress already terminated ({0})")]
    AlreadyTerminated(Cause),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TickReport {
    pub tick: u64,
    pub actions_logged: usize,
    pub spawned: Vec<EntityId>,
    pub removed: Vec<EntityId>,
    pub terminated: Option<Cause>,
}

/// Advances the fortress by one tick.
pub fn step(fortress: &mut Fortress, config: &SimConfig, rng: &mut Rng) -> Result<TickReport, EngineError> {
    if let Some(cause) = fortress.terminated {
        return Err(EngineError::AlreadyTerminated(cause));
    }
    fortress.tick += 1;
    let tick = fortress.tick;
    let roster = fortress.ids();
    let first_new = fortress.next_id();
    let log_start = fortress.log.len();

    for &id in &roster {
        let Some(inst) = fortress.instance(id) else {
            continue;
        };
        let (character, node) = (inst.character, inst.node);
        let Some(di) = fortress.def_index(character) else {
            continue;
        };
        let action = fortress.defs()[di].nodes()[node];
        fortress.visits[di].nodes.insert(node);
        fortress.trace.push(TraceEvent {
            tick,
            id,
            character,
            kind: TraceKind::Execute { node },
        });
        if let Some(event) = execute_action(action, id, fortress, config, rng) {
            fortress.log.push(LogEntry {
                tick,
                id,
                character,
                event,
            });
            fortress.last_action_tick = tick;
        }
    }

    for &id in &roster {
        let Some(inst) = fortress.instance(id) else {
            continue;
        };
        let (character, node) = (inst.character, inst.node);
        let Some(di) = fortress.def_index(character) else {
            continue;
        };
        let mut best: Option<(u8, usize)> = None;
        for edge in fortress.defs()[di].outgoing(node) {
            let priority = edge.cond.priority();
            if best.is_some_and(|(p, _)| p >= priority) {
                continue;
            }
            if evaluate_condition(edge.cond, id, fortress) {
                best = Some((priority, edge.dst));
            }
        }
        if let Some((_, dst)) = best {
            if let Some(inst) = fortress.instance_mut(id) {
                inst.node = dst;
            }
            fortress.visits[di].edges.insert((node, dst));
            fortress.trace.push(TraceEvent {
                tick,
                id,
                character,
                kind: TraceKind::Traverse { src: node, dst },
            });
        }
    }

    let spawned = fortress.ids().into_iter().filter(|&id| id >= first_new).collect();
    let removed = roster
        .into_iter()
        .filter(|&id| fortress.instance(id).is_none())
        .collect();
    fortress.terminated = fortress.check_termination(config.inactive_limit);
    Ok(TickReport {
        tick,
        actions_logged: fortress.log.len() - log_start,
        spawned,
        removed,
        terminated: fortress.terminated,
    })
}

/// Whether `cond` holds for instance `id`. The prober never matches itself.
pub fn evaluate_condition(cond: Condition, id: EntityId, fortress: &Fortress) -> bool {
    let Some(me) = fortress.instance(id) else {
        return false;
    };
    let (x, y) = (me.x as i64, me.y as i64);
    let matches_at = |tx: i64, ty: i64, target: char| {
        fortress.in_bounds(tx, ty)
            && fortress
                .occupants(tx as usize, ty as usize)
                .iter()
                .any(|&o| o != id && fortress.instance(o).is_some_and(|i| i.character == target))
    };
    match cond {
        Condition::None => true,
        Condition::Step(period) => fortress.tick().is_multiple_of(u64::from(period)),
        Condition::Touch(c) => matches_at(x, y, c),
        Condition::NextTo(c) => Direction::ALL.iter().any(|d| {
            let (dx, dy) = d.delta();
            matches_at(x + dx, y + dy, c)
        }),
        Condition::Within(c, dist) => {
            let d = i64::from(dist);
            (-d..=d).any(|dy| {
                let span = d - dy.abs();
                (-span..=span).any(|dx| matches_at(x + dx, y + dy, c))
            })
        }
    }
}

/// Orthogonal neighbours inside the grid, in N, S, E, W order.
fn open_neighbours(fortress: &Fortress, x: usize, y: usize) -> Vec<(usize, usize)> {
    Direction::ALL
        .iter()
        .filter_map(|d| {
            let (dx, dy) = d.delta();
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            fortress.in_bounds(nx, ny).then_some((nx as usize, ny as usize))
        })
        .collect()
}

fn spawn_near(
    fortress: &mut Fortress,
    character: char,
    x: usize,
    y: usize,
    rng: &mut Rng,
) -> Option<EntityId> {
    let around = open_neighbours(fortress, x, y);
    let (sx, sy) = if around.is_empty() {
        (x, y)
    } else {
        around[rng.below(around.len())]
    };
    fortress.spawn(character, sx, sy).ok()
}

fn offset(x: usize, y: usize, d: Direction) -> (i64, i64) {
    let (dx, dy) = d.delta();
    (x as i64 + dx, y as i64 + dy)
}

/// Runs one node's action for instance `id`. Returns the event to log, or
/// `None` when nothing changed.
pub fn execute_action(
    action: Action,
    id: EntityId,
    fortress: &mut Fortress,
    config: &SimConfig,
    rng: &mut Rng,
) -> Option<Event> {
    let me = fortress.instance(id)?.clone();
    match action {
        Action::Idle => None,
        Action::Move => {
            let dir = Direction::ALL[rng.below(4)];
            let (tx, ty) = offset(me.x, me.y, dir);
            if !fortress.in_bounds(tx, ty) {
                return None;
            }
            fortress.relocate(id, tx as usize, ty as usize);
            Some(Event::Move(dir))
        }
        Action::Die => {
            fortress.remove(id).ok()?;
            Some(Event::Die)
        }
        Action::Clone => {
            if !rng.chance(config.pop_perc) {
                return None;
            }
            spawn_near(fortress, me.character, me.x, me.y, rng).map(Event::Clone)
        }
        Action::Add(c) => {
            if !rng.chance(config.pop_perc) {
                return None;
            }
            spawn_near(fortress, c, me.x, me.y, rng).map(|new| Event::Add(c, new))
        }
        Action::Push => {
            let dir = Direction::ALL[rng.below(4)];
            let (tx, ty) = offset(me.x, me.y, dir);
            if !fortress.in_bounds(tx, ty) {
                return None;
            }
            let (tx, ty) = (tx as usize, ty as usize);
            match fortress.occupants(tx, ty).first().copied() {
                None => {
                    fortress.relocate(id, tx, ty);
                    Some(Event::PushMove(dir))
                }
                Some(victim) => {
                    let (bx, by) = offset(tx, ty, dir);
                    if !fortress.in_bounds(bx, by) {
                        return None;
                    }
                    fortress.relocate(victim, bx as usize, by as usize);
                    fortress.relocate(id, tx, ty);
                    Some(Event::Push(dir, victim))
                }
            }
        }
        Action::Take(c) => {
            let victim = fortress
                .occupants(me.x, me.y)
                .iter()
                .copied()
                .find(|&o| o != id && fortress.instance(o).is_some_and(|i| i.character == c))?;
            fortress.remove(victim).ok()?;
            Some(Event::Take(victim))
        }
        Action::Chase(c) => {
            let target = fortress
                .instances()
                .filter(|i| i.id != id && i.character == c)
                .min_by_key(|i| (me.x.abs_diff(i.x) + me.y.abs_diff(i.y), i.id))?;
            let dx = target.x as i64 - me.x as i64;
            let dy = target.y as i64 - me.y as i64;
            let horizontal = (dx != 0).then_some(if dx > 0 { Direction::East } else { Direction::West });
            let vertical = (dy != 0).then_some(if dy > 0 {
                Direction::South
            } else {
                Direction::North
            });
            let order = if dx.abs() >= dy.abs() {
                [horizontal, vertical]
            } else {
                [vertical, horizontal]
            };
            for dir in order.into_iter().flatten() {
                let (nx, ny) = offset(me.x, me.y, dir);
                if fortress.in_bounds(nx, ny) {
                    fortress.relocate(id, nx as usize, ny as usize);
                    return Some(Event::Chase(dir));
                }
            }
            None
        }
        Action::Transform(c) => {
            let inst = fortress.instance_mut(id)?;
            inst.character = c;
            inst.node = 0;
            Some(Event::Transform(c))
        }
    }
}

/// Steps until a termination predicate fires or `max_ticks` ticks have run.
pub fn run(fortress: &mut Fortress, config: &SimConfig, rng: &mut Rng, max_ticks: u64) -> StopReason {
    run_observed(fortress, config, rng, max_ticks, |_, _| {})
}

/// Like [`run`], calling `observe` after every tick.
pub fn run_observed<F>(
    fortress: &mut Fortress,
    config: &SimConfig,
    rng: &mut Rng,
    max_ticks: u64,
    mut observe: F,
) -> StopReason
where
    F: FnMut(&Fortress, &TickReport),
{
    if fortress.terminated.is_none() {
        fortress.terminated = fortress.check_termination(config.inactive_limit);
    }
    let mut ran = 0;
    loop {
        if let Some(cause) = fortress.terminated {
            return StopReason::Terminated(cause);
        }
        if ran >= max_ticks {
            return StopReason::TickLimit;
        }
        let report = step(fortress, config, rng).expect("termination checked before stepping");
        observe(fortress, &report);
        ran += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::{Edge, EntityDef};

    fn cfg() -> SimConfig {
        let mut c = SimConfig::new(vec!['a', 'b', '$', 'L', 'k']);
        c.inactive_limit = 1000;
        c
    }

    fn def(character: char, nodes: Vec<Action>, edges: Vec<(usize, usize, Condition)>) -> EntityDef {
        let edges = edges
            .into_iter()
            .map(|(src, dst, cond)| Edge { src, dst, cond })
            .collect();
        EntityDef::new(character, nodes, edges).unwrap()
    }

    fn fortress(defs: Vec<EntityDef>) -> Fortress {
        let chars: Vec<char> = defs.iter().map(|d| d.character()).collect();
        let mut all = defs;
        for c in ['a', 'b', '$', 'L', 'k'] {
            if !chars.contains(&c) {
                all.push(EntityDef::root_only(c));
            }
        }
        Fortress::new(13, 6, all, 0)
    }

    #[test]
    fn idle_root_does_nothing() {
        let mut f = fortress(vec![]);
        let id = f.spawn('a', 5, 5).unwrap();
        let mut config = cfg();
        config.inactive_limit = 5;
        let mut rng = Rng::new(1);
        for t in 1..5 {
            let r = step(&mut f, &config, &mut rng).unwrap();
            assert_eq!(r.actions_logged, 0);
            assert_eq!(r.terminated, None, "tick {t}");
        }
        assert_eq!(f.instance(id).unwrap().node, 0);
        let r = step(&mut f, &config, &mut rng).unwrap();
        assert_eq!(r.terminated, Some(Cause::Inactivity));
        assert!(f.log().is_empty());
        assert_eq!(
            step(&mut f, &config, &mut rng),
            Err(EngineError::AlreadyTerminated(Cause::Inactivity))
        );
    }

    #[test]
    fn run_with_zero_ticks_hits_limit() {
        let mut f = fortress(vec![]);
        f.spawn('a', 0, 0).unwrap();
        assert_eq!(run(&mut f, &cfg(), &mut Rng::new(0), 0), StopReason::TickLimit);
        assert_eq!(f.tick(), 0);
    }

    #[test]
    fn all_idle_terminates_by_inactivity_at_limit() {
        let mut f = fortress(vec![]);
        f.spawn('a', 0, 0).unwrap();
        let mut config = cfg();
        config.inactive_limit = 5;
        let stop = run(&mut f, &config, &mut Rng::new(0), 100);
        assert_eq!(stop, StopReason::Terminated(Cause::Inactivity));
        assert_eq!(f.tick(), 5);
    }

    #[test]
    fn conditions() {
        let mut f = fortress(vec![]);
        let link = f.spawn('L', 2, 2).unwrap();
        let seed = f.spawn('$', 4, 3).unwrap();
        assert!(evaluate_condition(Condition::None, link, &f));
        assert!(evaluate_condition(Condition::Within('$', 3), link, &f));
        assert!(!evaluate_condition(Condition::Within('$', 2), link, &f));
        assert!(!evaluate_condition(Condition::NextTo('$'), link, &f));
        assert!(!evaluate_condition(Condition::Touch('$'), link, &f));
        f.relocate(seed, 2, 1);
        assert!(evaluate_condition(Condition::NextTo('$'), link, &f));
        assert!(!evaluate_condition(Condition::NextTo('$'), link, &{
            let mut g = f.clone();
            g.relocate(seed, 3, 1);
            g
        }));
        f.relocate(seed, 2, 2);
        assert!(evaluate_condition(Condition::Touch('$'), link, &f));
        assert!(!evaluate_condition(Condition::NextTo('$'), link, &f));
        // never matches itself
        assert!(!evaluate_condition(Condition::Touch('L'), link, &f));
        assert!(!evaluate_condition(Condition::Within('L', 10), link, &f));
        f.tick = 10;
        assert!(evaluate_condition(Condition::Step(5), link, &f));
        f.tick = 7;
        assert!(!evaluate_condition(Condition::Step(5), link, &f));
    }

    #[test]
    fn within_is_manhattan_and_clipped_to_grid() {
        let mut f = fortress(vec![]);
        let a = f.spawn('a', 0, 0).unwrap();
        f.spawn('b', 2, 1).unwrap();
        assert!(evaluate_condition(Condition::Within('b', 3), a, &f));
        assert!(!evaluate_condition(Condition::Within('b', 2), a, &f));
    }

    #[test]
    fn highest_priority_edge_wins() {
        let d = def(
            'a',
            vec![Action::Idle, Action::Move, Action::Die],
            vec![(0, 1, Condition::Step(1)), (0, 2, Condition::Touch('b'))],
        );
        let mut f = fortress(vec![d]);
        let a = f.spawn('a', 3, 3).unwrap();
        f.spawn('b', 3, 3).unwrap();
        step(&mut f, &cfg(), &mut Rng::new(0)).unwrap();
        assert_eq!(f.instance(a).unwrap().node, 2);
        assert!(f.visits()[0].edges.contains(&(0, 2)));
    }

    #[test]
    fn equal_priority_takes_lowest_listed_edge() {
        let d = def(
            'a',
            vec![Action::Idle, Action::Move, Action::Die],
            vec![(0, 2, Condition::None), (0, 1, Condition::None)],
        );
        let mut f = fortress(vec![d]);
        let a = f.spawn('a', 3, 3).unwrap();
        step(&mut f, &cfg(), &mut Rng::new(0)).unwrap();
        assert_eq!(f.instance(a).unwrap().node, 1);
    }

    #[test]
    fn die_is_logged() {
        let d = def(
            'a',
            vec![Action::Idle, Action::Die],
            vec![(0, 1, Condition::None)],
        );
        let mut f = fortress(vec![d]);
        let a = f.spawn('a', 3, 3).unwrap();
        let mut rng = Rng::new(0);
        step(&mut f, &cfg(), &mut rng).unwrap();
        let r = step(&mut f, &cfg(), &mut rng).unwrap();
        assert_eq!(r.removed, vec![a]);
        assert_eq!(r.terminated, Some(Cause::Extinction));
        assert_eq!(f.log()[0].to_string(), "[t=2] 0001(a) die");
    }

    #[test]
    fn take_removes_colocated_target() {
        let mut f = fortress(vec![]);
        let link = f.spawn('L', 1, 1).unwrap();
        let seed = f.spawn('$', 1, 1).unwrap();
        let ev = execute_action(Action::Take('$'), link, &mut f, &cfg(), &mut Rng::new(0));
        assert_eq!(ev, Some(Event::Take(seed)));
        assert!(f.instance(seed).is_none());
        assert_eq!(
            execute_action(Action::Take('$'), link, &mut f, &cfg(), &mut Rng::new(0)),
            None
        );
    }

    #[test]
    fn chase_prefers_larger_axis_then_horizontal() {
        // Enumerate small offsets and check the first step against the rule.
        for dx in -3i64..=3 {
            for dy in -2i64..=2 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let mut f = fortress(vec![]);
                let me = f.spawn('a', 6, 3).unwrap();
                f.spawn('b', (6 + dx) as usize, (3 + dy) as usize).unwrap();
                let ev = execute_action(Action::Chase('b'), me, &mut f, &cfg(), &mut Rng::new(0));
                let want = if dx.abs() >= dy.abs() {
                    if dx > 0 {
                        Direction::East
                    } else {
                        Direction::West
                    }
                } else if dy > 0 {
                    Direction::South
                } else {
                    Direction::North
                };
                assert_eq!(ev, Some(Event::Chase(want)), "offset ({dx}, {dy})");
            }
        }
        let mut f = fortress(vec![]);
        let me = f.spawn('a', 1, 1).unwrap();
        f.spawn('b', 3, 2).unwrap();
        execute_action(Action::Chase('b'), me, &mut f, &cfg(), &mut Rng::new(0));
        let i = f.instance(me).unwrap();
        assert_eq!((i.x, i.y), (2, 1));
    }

    #[test]
    fn chase_picks_nearest_then_lowest_id_and_ignores_missing_target() {
        let mut f = fortress(vec![]);
        let me = f.spawn('a', 5, 3).unwrap();
        assert_eq!(
            execute_action(Action::Chase('b'), me, &mut f, &cfg(), &mut Rng::new(0)),
            None
        );
        f.spawn('b', 5, 0).unwrap();
        f.spawn('b', 3, 3).unwrap();
        f.spawn('b', 7, 3).unwrap();
        let ev = execute_action(Action::Chase('b'), me, &mut f, &cfg(), &mut Rng::new(0));
        assert_eq!(ev, Some(Event::Chase(Direction::West)));
    }

    #[test]
    fn transform_keeps_identity_and_resets_node() {
        let d = def(
            'k',
            vec![Action::Idle, Action::Transform('$')],
            vec![(0, 1, Condition::None)],
        );
        let mut f = fortress(vec![d]);
        let k = f.spawn('k', 4, 4).unwrap();
        f.instance_mut(k).unwrap().node = 1;
        let ev = execute_action(Action::Transform('$'), k, &mut f, &cfg(), &mut Rng::new(0));
        assert_eq!(ev, Some(Event::Transform('$')));
        let i = f.instance(k).unwrap();
        assert_eq!((i.character, i.node, i.x, i.y), ('$', 0, 4, 4));
    }

    #[test]
    fn move_into_wall_stays_silent() {
        // Find a seed whose first direction is north, then stand at the top edge.
        let seed = (0..100).find(|&s| Rng::new(s).below(4) == 0).unwrap();
        let mut f = fortress(vec![]);
        let me = f.spawn('a', 4, 0).unwrap();
        let mut rng = Rng::new(seed);
        assert_eq!(execute_action(Action::Move, me, &mut f, &cfg(), &mut rng), None);
        assert_eq!(rng, {
            let mut r = Rng::new(seed);
            r.next_u64();
            r
        });
        let mut rng = Rng::new(seed);
        f.relocate(me, 4, 3);
        assert_eq!(
            execute_action(Action::Move, me, &mut f, &cfg(), &mut rng),
            Some(Event::Move(Direction::North))
        );
    }

    #[test]
    fn push_moves_lowest_id_occupant() {
        let east = (0..100).find(|&s| Rng::new(s).below(4) == 2).unwrap();
        let mut f = fortress(vec![]);
        let me = f.spawn('a', 2, 2).unwrap();
        let first = f.spawn('b', 3, 2).unwrap();
        let second = f.spawn('b', 3, 2).unwrap();
        let ev = execute_action(Action::Push, me, &mut f, &cfg(), &mut Rng::new(east));
        assert_eq!(ev, Some(Event::Push(Direction::East, first)));
        let pos = |id| {
            let i = f.instance(id).unwrap();
            (i.x, i.y)
        };
        assert_eq!(pos(me), (3, 2));
        assert_eq!(pos(first), (4, 2));
        assert_eq!(pos(second), (3, 2));
        assert!(f.index_consistent());

        // blocked when the far tile is the wall
        let mut f = fortress(vec![]);
        let me = f.spawn('a', 11, 2).unwrap();
        f.spawn('b', 12, 2).unwrap();
        assert_eq!(
            execute_action(Action::Push, me, &mut f, &cfg(), &mut Rng::new(east)),
            None
        );

        // empty tile: plain move
        let mut f = fortress(vec![]);
        let me = f.spawn('a', 2, 2).unwrap();
        assert_eq!(
            execute_action(Action::Push, me, &mut f, &cfg(), &mut Rng::new(east)),
            Some(Event::PushMove(Direction::East))
        );
    }

    #[test]
    fn clone_and_add_respect_pop_perc() {
        let mut config = cfg();
        config.pop_perc = 0.0;
        let mut f = fortress(vec![]);
        let me = f.spawn('a', 0, 0).unwrap();
        assert_eq!(
            execute_action(Action::Clone, me, &mut f, &config, &mut Rng::new(0)),
            None
        );
        assert_eq!(
            execute_action(Action::Add('b'), me, &mut f, &config, &mut Rng::new(0)),
            None
        );
        config.pop_perc = 1.0;
        let ev = execute_action(Action::Clone, me, &mut f, &config, &mut Rng::new(0)).unwrap();
        let Event::Clone(new) = ev else { panic!("{ev:?}") };
        let i = f.instance(new).unwrap();
        assert_eq!(i.character, 'a');
        assert_eq!(i.x + i.y, 1, "spawned on an adjacent tile");
        let ev = execute_action(Action::Add('b'), me, &mut f, &config, &mut Rng::new(0)).unwrap();
        assert!(matches!(ev, Event::Add('b', _)));
    }

    #[test]
    fn spawn_on_a_single_tile_grid_uses_own_tile() {
        let mut config = cfg();
        config.pop_perc = 1.0;
        let mut f = Fortress::new(1, 1, vec![EntityDef::root_only('a')], 0);
        let me = f.spawn('a', 0, 0).unwrap();
        assert!(execute_action(Action::Clone, me, &mut f, &config, &mut Rng::new(0)).is_some());
        assert_eq!(f.occupants(0, 0).len(), 2);
    }

    #[test]
    fn newborns_wait_a_tick() {
        let d = def(
            'a',
            vec![Action::Idle, Action::Clone],
            vec![(0, 1, Condition::None)],
        );
        let mut config = cfg();
        config.pop_perc = 1.0;
        let mut f = fortress(vec![d]);
        let parent = f.spawn('a', 5, 3).unwrap();
        let mut rng = Rng::new(3);
        step(&mut f, &config, &mut rng).unwrap();
        let r = step(&mut f, &config, &mut rng).unwrap();
        assert_eq!(r.spawned.len(), 1);
        let child = r.spawned[0];
        assert_eq!(f.instance(child).unwrap().node, 0);
        assert!(f.trace().iter().all(|t| t.id != child));
        assert_eq!(f.instance(parent).unwrap().node, 1);
    }

    #[test]
    fn removed_entities_skip_the_rest_of_the_tick() {
        // 0001 takes 0002 during the action pass; 0002 never acts or moves.
        let taker = def(
            'L',
            vec![Action::Idle, Action::Take('$')],
            vec![(0, 1, Condition::None)],
        );
        let victim = def(
            '$',
            vec![Action::Idle, Action::Die],
            vec![(0, 1, Condition::None)],
        );
        let mut f = fortress(vec![taker, victim]);
        let l = f.spawn('L', 1, 1).unwrap();
        let s = f.spawn('$', 1, 1).unwrap();
        f.instance_mut(l).unwrap().node = 1;
        step(&mut f, &cfg(), &mut Rng::new(0)).unwrap();
        assert!(f.instance(s).is_none());
        assert!(f.trace().iter().all(|t| t.id != s));
    }

    #[test]
    fn update_order_is_ascending_id() {
        // Two pushers race for the same victim; the lower id pushes first.
        let east = (0..1000)
            .find(|&s| {
                let mut r = Rng::new(s);
                r.below(4) == 2 && r.below(4) == 3
            })
            .unwrap();
        let pusher = def(
            'a',
            vec![Action::Idle, Action::Push],
            vec![(0, 1, Condition::None)],
        );
        let mut f = fortress(vec![pusher]);
        let left = f.spawn('a', 2, 2).unwrap();
        let right = f.spawn('a', 4, 2).unwrap();
        let victim = f.spawn('b', 3, 2).unwrap();
        for id in [left, right] {
            f.instance_mut(id).unwrap().node = 1;
        }
        step(&mut f, &cfg(), &mut Rng::new(east)).unwrap();
        let log: Vec<String> = f.log().iter().map(|e| e.to_string()).collect();
        assert_eq!(
            log,
            vec!["[t=1] 0001(a) push E 0003", "[t=1] 0002(a) push W 0001"]
        );
        let v = f.instance(victim).unwrap();
        assert_eq!((v.x, v.y), (4, 2));
    }
}
