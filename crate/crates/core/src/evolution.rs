//! (1+1) hillclimbing over whole fortresses.
//!
//! A genome is the set of class graphs plus the character and position of
//! every starting instance. Each generation mutates a copy of the champion,
//! simulates it from scratch and keeps it only if it scores strictly higher
//! under `v / (u + 1) * t`, where `v` and `u` count visited and unvisited
//! nodes plus edges over every class graph and `t = v + u`.

use std::fmt::Write as _;

use crate::config::SimConfig;
use crate::engine;
use crate::fsm::{Action, Condition, Edge, EntityDef};
use crate::rng::Rng;
use crate::world::{init_fortress, Coverage, Fortress, StopReason, WorldError};

/// Upper bound on iterations of each geometric mutation loop.
pub const MAX_MUTATION_LOOPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub character: char,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genome {
    pub defs: Vec<EntityDef>,
    pub placements: Vec<Placement>,
}

impl Genome {
    /// Keeps only class graphs and where each instance stands.
    pub fn from_fortress(fortress: &Fortress) -> Self {
        Self {
            defs: fortress.defs().to_vec(),
            placements: fortress
                .instances()
                .map(|i| Placement {
                    character: i.character,
                    x: i.x,
                    y: i.y,
                })
                .collect(),
        }
    }

    /// Fresh fortress: new ids in placement order, every instance at its root.
    pub fn instantiate(&self, width: usize, height: usize, seed: u64) -> Result<Fortress, WorldError> {
        let mut fortress = Fortress::new(width, height, self.defs.clone(), seed);
        for p in &self.placements {
            fortress.spawn(p.character, p.x, p.y)?;
        }
        Ok(fortress)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationParams {
    pub node_prob: f64,
    pub edge_prob: f64,
    pub instance_prob: f64,
}

impl Default for MutationParams {
    fn default() -> Self {
        Self {
            node_prob: 0.5,
            edge_prob: 0.5,
            instance_prob: 0.5,
        }
    }
}

fn unused_actions(def: &EntityDef, config: &SimConfig) -> Vec<Action> {
    config
        .expanded_actions()
        .into_iter()
        .filter(|a| !def.nodes().contains(a))
        .collect()
}

/// Removes a random non-root node and its edges; needs more than one node.
pub fn delete_node(def: &mut EntityDef, rng: &mut Rng) {
    let n = def.nodes().len();
    if n > 1 {
        def.remove_node(1 + rng.below(n - 1));
    }
}

/// Adds an action the graph does not hold yet, if any remain.
pub fn add_node(def: &mut EntityDef, config: &SimConfig, rng: &mut Rng) {
    let unused = unused_actions(def, config);
    if !unused.is_empty() {
        def.push_node(unused[rng.below(unused.len())]);
    }
}

/// Swaps a random non-root node's action for an unused one.
pub fn alter_node(def: &mut EntityDef, config: &SimConfig, rng: &mut Rng) {
    let n = def.nodes().len();
    let unused = unused_actions(def, config);
    if n > 1 && !unused.is_empty() {
        let index = 1 + rng.below(n - 1);
        def.replace_node(index, unused[rng.below(unused.len())]);
    }
}

/// Removes a random edge; needs more than one edge.
pub fn delete_edge(def: &mut EntityDef, rng: &mut Rng) {
    let m = def.edges().len();
    if m > 1 {
        def.remove_edge_at(rng.below(m));
    }
}

/// Connects a random unconnected ordered pair with a fresh condition.
pub fn add_edge(def: &mut EntityDef, config: &SimConfig, rng: &mut Rng) {
    let free = def.free_pairs();
    if !free.is_empty() {
        let (src, dst) = free[rng.below(free.len())];
        let cond = Condition::random(config, rng);
        def.insert_edge(Edge { src, dst, cond });
    }
}

/// Redraws the condition of a random edge.
pub fn alter_edge(def: &mut EntityDef, config: &SimConfig, rng: &mut Rng) {
    let m = def.edges().len();
    if m > 0 {
        let index = rng.below(m);
        let cond = Condition::random(config, rng);
        def.set_condition(index, cond);
    }
}

/// Node, edge and instance mutation loops, then pruning of every touched
/// graph.
///
/// Three uniform draws open the loops. Each loop runs while its draw stays
/// below its probability (at most [`MAX_MUTATION_LOOPS`] times): pick an
/// operator, pick a class graph (or, for instances, a placement to remove or
/// a class and tile to add), apply, redraw.
pub fn mutate(genome: &Genome, params: &MutationParams, config: &SimConfig, rng: &mut Rng) -> Genome {
    let mut out = genome.clone();
    let mut touched = vec![false; out.defs.len()];
    let mut node_r = rng.unit();
    let mut edge_r = rng.unit();
    let mut instance_r = rng.unit();

    if !out.defs.is_empty() {
        let mut loops = 0;
        while node_r < params.node_prob && loops < MAX_MUTATION_LOOPS {
            let op = rng.below(3);
            let e = rng.below(out.defs.len());
            let def = &mut out.defs[e];
            match op {
                0 => delete_node(def, rng),
                1 => add_node(def, config, rng),
                _ => alter_node(def, config, rng),
            }
            touched[e] = true;
            node_r = rng.unit();
            loops += 1;
        }

        let mut loops = 0;
        while edge_r < params.edge_prob && loops < MAX_MUTATION_LOOPS {
            let op = rng.below(3);
            let e = rng.below(out.defs.len());
            let def = &mut out.defs[e];
            match op {
                0 => delete_edge(def, rng),
                1 => add_edge(def, config, rng),
                _ => alter_edge(def, config, rng),
            }
            touched[e] = true;
            edge_r = rng.unit();
            loops += 1;
        }

        let mut loops = 0;
        while instance_r < params.instance_prob && loops < MAX_MUTATION_LOOPS {
            if rng.below(2) == 0 {
                if !out.placements.is_empty() {
                    let i = rng.below(out.placements.len());
                    out.placements.remove(i);
                }
            } else {
                let character = out.defs[rng.below(out.defs.len())].character();
                let x = rng.below(config.width);
                let y = rng.below(config.height);
                out.placements.push(Placement { character, x, y });
            }
            instance_r = rng.unit();
            loops += 1;
        }
    }

    for (def, touched) in out.defs.iter_mut().zip(touched) {
        if touched {
            *def = def.prune();
        }
    }
    out
}

/// `v / (u + 1) * t`.
pub fn fitness_score(c: Coverage) -> f64 {
    c.visited as f64 / (c.unvisited as f64 + 1.0) * c.total as f64
}

/// Result of simulating one genome.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub score: f64,
    pub coverage: Coverage,
    pub num_entities: usize,
    pub stop: StopReason,
    /// Seed the simulation started from; replaying the genome with it
    /// reproduces `fortress` exactly.
    pub seed: u64,
    /// Final state, including the action log and visit sets.
    pub fortress: Fortress,
}

/// Simulates `genome` for at most `ticks` ticks on a fresh fortress and
/// scores the class-level coverage at the end.
pub fn evaluate(
    genome: &Genome,
    config: &SimConfig,
    rng: &mut Rng,
    ticks: u64,
) -> Result<Evaluation, WorldError> {
    let seed = rng.state();
    let mut fortress = genome.instantiate(config.width, config.height, seed)?;
    let stop = engine::run(&mut fortress, config, rng, ticks);
    let coverage = fortress.coverage();
    Ok(Evaluation {
        score: fitness_score(coverage),
        coverage,
        num_entities: fortress.len(),
        stop,
        seed,
        fortress,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub child_fitness: f64,
    pub num_entities: usize,
    pub termination: String,
}

#[derive(Debug, Clone)]
pub struct HillclimbResult {
    pub best: Genome,
    pub best_eval: Evaluation,
    pub records: Vec<EvolutionRecord>,
}

impl HillclimbResult {
    /// The champion's starting state, ready for saving and replay.
    pub fn best_start(&self, config: &SimConfig) -> Fortress {
        self.best
            .instantiate(config.width, config.height, self.best_eval.seed)
            .expect("champion genome was simulated successfully")
    }
}

/// (1+1) search. Generation 0 scores a random fortress; each later
/// generation scores one mutant of the champion and replaces the champion
/// on strict improvement.
pub fn hillclimb(
    config: &SimConfig,
    params: &MutationParams,
    generations: usize,
    ticks: u64,
    rng: &mut Rng,
) -> Result<HillclimbResult, WorldError> {
    let start = init_fortress(config, rng)?;
    let mut best = Genome::from_fortress(&start);
    let mut best_eval = evaluate(&best, config, rng, ticks)?;
    let mut records = vec![EvolutionRecord {
        generation: 0,
        best_fitness: best_eval.score,
        child_fitness: best_eval.score,
        num_entities: best_eval.num_entities,
        termination: best_eval.stop.to_string(),
    }];
    for generation in 1..generations.max(1) {
        let child = mutate(&best, params, config, rng);
        let eval = evaluate(&child, config, rng, ticks)?;
        let record = EvolutionRecord {
            generation,
            best_fitness: best_eval.score.max(eval.score),
            child_fitness: eval.score,
            num_entities: eval.num_entities,
            termination: eval.stop.to_string(),
        };
        if eval.score > best_eval.score {
            best = child;
            best_eval = eval;
        }
        records.push(record);
    }
    Ok(HillclimbResult {
        best,
        best_eval,
        records,
    })
}

pub const METRICS_HEADER: &str = "generation,best_fitness,child_fitness,num_entities,termination";

pub fn metrics_csv(records: &[EvolutionRecord]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.generation, r.best_fitness, r.child_fitness, r.num_entities, r.termination
        );
    }
    out
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<EvolutionRecord>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(METRICS_HEADER) {
        return Err("missing or wrong header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            let bad = || format!("row {}: malformed `{line}`", i + 1);
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(EvolutionRecord {
                generation: f[0].parse().map_err(|_| bad())?,
                best_fitness: f[1].parse().map_err(|_| bad())?,
                child_fitness: f[2].parse().map_err(|_| bad())?,
                num_entities: f[3].parse().map_err(|_| bad())?,
                termination: f[4].to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassCoverage {
    pub character: char,
    pub node_coverage: f64,
    /// `None` for graphs without edges.
    pub edge_coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageStats {
    pub classes: Vec<ClassCoverage>,
    /// Mean node coverage over every class.
    pub mean_node: f64,
    /// Mean edge coverage over classes that have edges.
    pub mean_edge: f64,
}

/// Per-class visited fractions of an evaluated fortress.
pub fn coverage_stats(fortress: &Fortress) -> CoverageStats {
    let classes: Vec<ClassCoverage> = fortress
        .defs()
        .iter()
        .zip(fortress.visits())
        .map(|(def, v)| ClassCoverage {
            character: def.character(),
            node_coverage: v.nodes.len() as f64 / def.nodes().len() as f64,
            edge_coverage: (!def.edges().is_empty()).then(|| v.edges.len() as f64 / def.edges().len() as f64),
        })
        .collect();
    let mean = |xs: Vec<f64>| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    CoverageStats {
        mean_node: mean(classes.iter().map(|c| c.node_coverage).collect()),
        mean_edge: mean(classes.iter().filter_map(|c| c.edge_coverage).collect()),
        classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SimConfig {
        let mut c = SimConfig::new("abcde".chars().collect());
        c.seed = 1;
        c
    }

    fn cov(visited: usize, unvisited: usize) -> Coverage {
        Coverage {
            visited,
            unvisited,
            total: visited + unvisited,
        }
    }

    #[test]
    fn fitness_substitutions() {
        assert_eq!(fitness_score(cov(1, 0)), 1.0);
        assert!((fitness_score(cov(5, 2)) - 35.0 / 3.0).abs() < 1e-12);
        assert_eq!(fitness_score(cov(4, 0)), 16.0);
        assert_eq!(fitness_score(cov(0, 9)), 0.0);
    }

    #[test]
    fn zero_probabilities_leave_genome_alone() {
        let cfg = config();
        let mut rng = Rng::new(4);
        let g = Genome::from_fortress(&init_fortress(&cfg, &mut rng).unwrap());
        let params = MutationParams {
            node_prob: 0.0,
            edge_prob: 0.0,
            instance_prob: 0.0,
        };
        assert_eq!(mutate(&g, &params, &cfg, &mut rng), g);
    }

    #[test]
    fn certain_mutation_is_capped() {
        let cfg = config();
        let mut rng = Rng::new(4);
        let g = Genome {
            defs: vec![EntityDef::root_only('a')],
            placements: vec![],
        };
        let params = MutationParams {
            node_prob: 1.0,
            edge_prob: 1.0,
            instance_prob: 1.0,
        };
        let out = mutate(&g, &params, &cfg, &mut rng);
        assert!(out.placements.len() <= MAX_MUTATION_LOOPS);
        out.defs[0].validate().unwrap();
    }

    #[test]
    fn node_ops_respect_guards() {
        let cfg = config();
        let mut rng = Rng::new(0);
        let mut root = EntityDef::root_only('a');
        delete_node(&mut root, &mut rng);
        alter_node(&mut root, &cfg, &mut rng);
        assert_eq!(root, EntityDef::root_only('a'));

        let mut small = SimConfig::new(vec!['a']);
        small.action_space = vec![crate::fsm::ActionKind::Idle, crate::fsm::ActionKind::Move];
        let mut full = EntityDef::root_only('a');
        add_node(&mut full, &small, &mut rng);
        assert_eq!(full.nodes(), &[Action::Idle, Action::Move]);
        let before = full.clone();
        add_node(&mut full, &small, &mut rng);
        assert_eq!(full, before);
    }

    #[test]
    fn edge_ops_respect_guards() {
        let cfg = config();
        let mut rng = Rng::new(0);
        let mut one = EntityDef::new(
            'a',
            vec![Action::Idle, Action::Move],
            vec![Edge {
                src: 0,
                dst: 1,
                cond: Condition::None,
            }],
        )
        .unwrap();
        let before = one.clone();
        delete_edge(&mut one, &mut rng);
        assert_eq!(one, before);

        add_edge(&mut one, &cfg, &mut rng);
        assert_eq!(one.edges().len(), 2);
        let complete = one.clone();
        add_edge(&mut one, &cfg, &mut rng);
        assert_eq!(one, complete);

        let mut bare = EntityDef::root_only('a');
        alter_edge(&mut bare, &cfg, &mut rng);
        assert_eq!(bare, EntityDef::root_only('a'));
    }

    #[test]
    fn single_visited_root_scores_one() {
        let cfg = config();
        let g = Genome {
            defs: vec![EntityDef::root_only('a')],
            placements: vec![Placement {
                character: 'a',
                x: 0,
                y: 0,
            }],
        };
        let mut cfg1 = cfg.clone();
        cfg1.characters = vec!['a'];
        let eval = evaluate(&g, &cfg1, &mut Rng::new(0), 20).unwrap();
        assert_eq!(eval.coverage, cov(1, 0));
        assert_eq!(eval.score, 1.0);
    }

    #[test]
    fn evaluation_is_repeatable() {
        let cfg = config();
        let mut rng = Rng::new(12);
        let g = Genome::from_fortress(&init_fortress(&cfg, &mut rng).unwrap());
        let a = evaluate(&g, &cfg, &mut rng.clone(), 20).unwrap();
        let b = evaluate(&g, &cfg, &mut rng.clone(), 20).unwrap();
        assert_eq!(a.score, b.score);
        assert_eq!(a.fortress.log(), b.fortress.log());
    }

    #[test]
    fn one_generation_keeps_initial_genome() {
        let cfg = config();
        let mut rng = Rng::new(cfg.seed);
        let start = init_fortress(&cfg, &mut rng.clone()).unwrap();
        let result = hillclimb(&cfg, &MutationParams::default(), 1, 20, &mut rng).unwrap();
        assert_eq!(result.records.len(), 1);
        assert_eq!(result.best, Genome::from_fortress(&start));
    }

    #[test]
    fn best_column_never_drops() {
        let cfg = config();
        let result = hillclimb(&cfg, &MutationParams::default(), 60, 20, &mut Rng::new(8)).unwrap();
        for w in result.records.windows(2) {
            assert!(w[1].best_fitness >= w[0].best_fitness);
        }
        let last = result.records.last().unwrap();
        assert_eq!(last.best_fitness, result.best_eval.score);
    }

    #[test]
    fn csv_round_trip() {
        let records = vec![
            EvolutionRecord {
                generation: 0,
                best_fitness: 11.666666666666666,
                child_fitness: 11.666666666666666,
                num_entities: 7,
                termination: "tick_limit".into(),
            },
            EvolutionRecord {
                generation: 1,
                best_fitness: 12.5,
                child_fitness: 12.5,
                num_entities: 79,
                termination: "overpopulation".into(),
            },
        ];
        let text = metrics_csv(&records);
        assert!(text.starts_with("generation,best_fitness,child_fitness,num_entities,termination\n0,"));
        assert_eq!(parse_metrics_csv(&text).unwrap(), records);
    }

    #[test]
    fn coverage_stats_edge_cases() {
        let full = EntityDef::new(
            'a',
            vec![Action::Idle, Action::Move],
            vec![Edge {
                src: 0,
                dst: 1,
                cond: Condition::None,
            }],
        )
        .unwrap();
        let unseen = EntityDef::new(
            'b',
            vec![Action::Idle, Action::Move],
            vec![Edge {
                src: 0,
                dst: 1,
                cond: Condition::None,
            }],
        )
        .unwrap();
        let mut f = Fortress::new(13, 6, vec![full, unseen], 0);
        f.visits[0].nodes.extend([0, 1]);
        f.visits[0].edges.insert((0, 1));
        let stats = coverage_stats(&f);
        assert_eq!(stats.classes[0].node_coverage, 1.0);
        assert_eq!(stats.classes[0].edge_coverage, Some(1.0));
        assert_eq!(stats.classes[1].node_coverage, 0.0);
        assert_eq!(stats.classes[1].edge_coverage, Some(0.0));
        assert_eq!(stats.mean_node, 0.5);
    }
}
