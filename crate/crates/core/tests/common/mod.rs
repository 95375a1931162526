#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use fsm_fortress::fsm::EntityDef;
use fsm_fortress::world::{Event, Fortress, LogEntry, TraceKind};
use fsm_fortress::SimConfig;

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

pub fn load(name: &str) -> SimConfig {
    SimConfig::from_path(config_path(name)).expect("bundled config parses")
}

/// Reachability by transitive closure of the adjacency matrix.
pub fn closure_reachable(def: &EntityDef) -> Vec<bool> {
    let n = def.nodes().len();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in def.edges() {
        reach[e.src][e.dst] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (cell, &hop) in row.iter_mut().zip(&via) {
                    *cell |= hop;
                }
            }
        }
    }
    reach[0].clone()
}

/// Checks every structural invariant of a class graph from scratch.
pub fn def_violations(def: &EntityDef, pruned: bool) -> Vec<String> {
    let mut out = Vec::new();
    let n = def.nodes().len();
    if def.nodes().first() != Some(&fsm_fortress::Action::Idle) {
        out.push("root is not idle".into());
    }
    let uniq: BTreeSet<_> = def.nodes().iter().collect();
    if uniq.len() != n {
        out.push("duplicate node".into());
    }
    if def.edges().len() > n * n.saturating_sub(1) {
        out.push("too many edges".into());
    }
    let mut pairs = BTreeSet::new();
    for e in def.edges() {
        if e.src >= n || e.dst >= n {
            out.push(format!("dangling edge {} -> {}", e.src, e.dst));
        }
        if e.src == e.dst {
            out.push("self-loop".into());
        }
        if !pairs.insert((e.src, e.dst)) {
            out.push("duplicate edge".into());
        }
    }
    if pruned && out.is_empty() && closure_reachable(def).iter().any(|r| !r) {
        out.push("unreachable node after pruning".into());
    }
    out
}

/// Coverage rebuilt by scanning the activity trace, ignoring the
/// fortress's own visit sets.
pub fn trace_coverage(f: &Fortress) -> (usize, usize, usize) {
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for ev in f.trace() {
        match ev.kind {
            TraceKind::Execute { node } => {
                nodes.insert((ev.character, node));
            }
            TraceKind::Traverse { src, dst } => {
                edges.insert((ev.character, src, dst));
            }
        }
    }
    let total: usize = f.defs().iter().map(|d| d.nodes().len() + d.edges().len()).sum();
    let visited = nodes.len() + edges.len();
    (visited, total - visited, total)
}

pub fn fitness_recount(v: usize, u: usize, t: usize) -> f64 {
    v as f64 / (u as f64 + 1.0) * t as f64
}

/// A Korok turned into a seed and Link later took that same instance.
pub fn korok_seed_taken(log: &[LogEntry]) -> bool {
    let mut seeded = BTreeSet::new();
    for e in log {
        match e.event {
            Event::Transform('$') if e.character == 'k' => {
                seeded.insert(e.id);
            }
            Event::Take(victim) if e.character == 'L' && seeded.contains(&victim) => return true,
            _ => {}
        }
    }
    false
}
