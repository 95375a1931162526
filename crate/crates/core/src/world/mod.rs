//! The fortress: a bordered grid holding one graph per character, the live
//! instances, a positional index, the action log and class-level visit
//! tracking.

mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use text::{parse_save, render_log, save_text};

use crate::config::SimConfig;
use crate::fsm::{generate_fsm, EntityDef};
use crate::rng::Rng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorldError {
    #[error("no entity class for character `{0}`")]
    UnknownCharacter(char),
    #[error("position ({0}, {1}) is outside the interior")]
    OutOfBounds(i64, i64),
    #[error("no instance with id {0}")]
    UnknownId(EntityId),
    #[error("configuration defines no characters")]
    NoCharacters,
}

/// Instance identifier, rendered as lowercase hex: four digits up to
/// `ffff`, eight beyond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub u32);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 <= 0xffff {
            write!(f, "{:04x}", self.0)
        } else {
            write!(f, "{:08x}", self.0)
        }
    }
}

impl std::str::FromStr for EntityId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        u32::from_str_radix(s, 16).map(EntityId)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityInstance {
    pub id: EntityId,
    pub character: char,
    pub x: usize,
    pub y: usize,
    /// Index of the current node in the class graph.
    pub node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    /// Draw order for random directions.
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::South,
        Direction::East,
        Direction::West,
    ];

    /// Grid offset; `y` grows southwards.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Direction::North => 'N',
            Direction::South => 'S',
            Direction::East => 'E',
            Direction::West => 'W',
        }
    }
}

/// Outcome of an action that changed the world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Move(Direction),
    Die,
    Clone(EntityId),
    /// Push into an empty tile: the pusher simply moved.
    PushMove(Direction),
    Push(Direction, EntityId),
    Take(EntityId),
    Chase(Direction),
    Add(char, EntityId),
    Transform(char),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Move(d) => write!(f, "move {}", d.letter()),
            Event::Die => f.write_str("die"),
            Event::Clone(id) => write!(f, "clone {id}"),
            Event::PushMove(d) => write!(f, "push-move {}", d.letter()),
            Event::Push(d, id) => write!(f, "push {} {id}", d.letter()),
            Event::Take(id) => write!(f, "take {id}"),
            Event::Chase(d) => write!(f, "chase {}", d.letter()),
            Event::Add(c, id) => write!(f, "add {c} {id}"),
            Event::Transform(c) => write!(f, "transform {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub tick: u64,
    pub id: EntityId,
    /// Character of the actor when it acted.
    pub character: char,
    pub event: Event,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[t={}] {}({}) {}",
            self.tick, self.id, self.character, self.event
        )
    }
}

/// Graph activity, recorded alongside the action log. Every node execution
/// and every transition appears here, including idle and failed actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Execute { node: usize },
    Traverse { src: usize, dst: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub tick: u64,
    pub id: EntityId,
    pub character: char,
    pub kind: TraceKind,
}

/// Nodes and edges of one class graph touched by any of its instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Visits {
    pub nodes: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cause {
    Extinction,
    Overpopulation,
    Inactivity,
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cause::Extinction => "extinction",
            Cause::Overpopulation => "overpopulation",
            Cause::Inactivity => "inactivity",
        })
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Terminated(Cause),
    TickLimit,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::Terminated(c) => c.fmt(f),
            StopReason::TickLimit => f.write_str("tick_limit"),
        }
    }
}

/// Visited, unvisited and total node+edge counts over every class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub visited: usize,
    pub unvisited: usize,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub struct Fortress {
    width: usize,
    height: usize,
    /// Seed of the stream that drives this fortress's ticks.
    pub seed: u64,
    defs: Vec<EntityDef>,
    instances: BTreeMap<EntityId, EntityInstance>,
    grid: Vec<Vec<EntityId>>,
    next_id: u32,
    pub(crate) log: Vec<LogEntry>,
    pub(crate) trace: Vec<TraceEvent>,
    pub(crate) visits: Vec<Visits>,
    pub(crate) tick: u64,
    pub(crate) last_action_tick: u64,
    pub(crate) terminated: Option<Cause>,
}

impl Fortress {
    /// Empty fortress with the given class graphs.
    pub fn new(width: usize, height: usize, defs: Vec<EntityDef>, seed: u64) -> Self {
        let visits = vec![Visits::default(); defs.len()];
        Self {
            width,
            height,
            seed,
            defs,
            instances: BTreeMap::new(),
            grid: vec![Vec::new(); width * height],
            next_id: 1,
            log: Vec::new(),
            trace: Vec::new(),
            visits,
            tick: 0,
            last_action_tick: 0,
            terminated: None,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn last_action_tick(&self) -> u64 {
        self.last_action_tick
    }

    pub fn termination(&self) -> Option<Cause> {
        self.terminated
    }

    pub fn defs(&self) -> &[EntityDef] {
        &self.defs
    }

    pub fn def_index(&self, character: char) -> Option<usize> {
        self.defs.iter().position(|d| d.character() == character)
    }

    pub fn def(&self, character: char) -> Option<&EntityDef> {
        self.def_index(character).map(|i| &self.defs[i])
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    /// Visit sets, parallel to [`Fortress::defs`].
    pub fn visits(&self) -> &[Visits] {
        &self.visits
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instance(&self, id: EntityId) -> Option<&EntityInstance> {
        self.instances.get(&id)
    }

    pub(crate) fn instance_mut(&mut self, id: EntityId) -> Option<&mut EntityInstance> {
        self.instances.get_mut(&id)
    }

    /// Instances in ascending id order.
    pub fn instances(&self) -> impl Iterator<Item = &EntityInstance> {
        self.instances.values()
    }

    pub fn ids(&self) -> Vec<EntityId> {
        self.instances.keys().copied().collect()
    }

    /// Id the next spawn will receive.
    pub fn next_id(&self) -> EntityId {
        EntityId(self.next_id)
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Ids on a tile, ascending.
    pub fn occupants(&self, x: usize, y: usize) -> &[EntityId] {
        &self.grid[y * self.width + x]
    }

    pub fn spawn(&mut self, character: char, x: usize, y: usize) -> Result<EntityId, WorldError> {
        if self.def_index(character).is_none() {
            return Err(WorldError::UnknownCharacter(character));
        }
        if !self.in_bounds(x as i64, y as i64) {
            return Err(WorldError::OutOfBounds(x as i64, y as i64));
        }
        let id = EntityId(self.next_id);
        self.next_id += 1;
        self.insert(EntityInstance {
            id,
            character,
            x,
            y,
            node: 0,
        });
        Ok(id)
    }

    /// Adds an instance carrying its own id; used when loading saves.
    pub(crate) fn insert(&mut self, inst: EntityInstance) {
        self.next_id = self.next_id.max(inst.id.0 + 1);
        let cell = &mut self.grid[inst.y * self.width + inst.x];
        let at = cell.partition_point(|&o| o < inst.id);
        cell.insert(at, inst.id);
        self.instances.insert(inst.id, inst);
    }

    pub fn remove(&mut self, id: EntityId) -> Result<EntityInstance, WorldError> {
        let inst = self.instances.remove(&id).ok_or(WorldError::UnknownId(id))?;
        self.grid[inst.y * self.width + inst.x].retain(|&o| o != id);
        Ok(inst)
    }

    pub(crate) fn relocate(&mut self, id: EntityId, x: usize, y: usize) {
        let Some(inst) = self.instances.get_mut(&id) else {
            return;
        };
        let (ox, oy) = (inst.x, inst.y);
        inst.x = x;
        inst.y = y;
        self.grid[oy * self.width + ox].retain(|&o| o != id);
        let cell = &mut self.grid[y * self.width + x];
        let at = cell.partition_point(|&o| o < id);
        cell.insert(at, id);
    }

    /// Termination predicates, in precedence order extinction,
    /// overpopulation, inactivity.
    pub fn check_termination(&self, inactive_limit: u64) -> Option<Cause> {
        if self.instances.is_empty() {
            Some(Cause::Extinction)
        } else if self.instances.len() > self.width * self.height {
            Some(Cause::Overpopulation)
        } else if self.tick - self.last_action_tick >= inactive_limit {
            Some(Cause::Inactivity)
        } else {
            None
        }
    }

    pub fn coverage(&self) -> Coverage {
        let total: usize = self.defs.iter().map(EntityDef::size).sum();
        let visited: usize = self.visits.iter().map(|v| v.nodes.len() + v.edges.len()).sum();
        Coverage {
            visited,
            unvisited: total - visited,
            total,
        }
    }

    /// Checks that the position index agrees with the instance table.
    pub fn index_consistent(&self) -> bool {
        let indexed: usize = self.grid.iter().map(Vec::len).sum();
        indexed == self.instances.len()
            && self.instances.values().all(|i| {
                self.in_bounds(i.x as i64, i.y as i64)
                    && self.occupants(i.x, i.y).contains(&i.id)
                    && self.def(i.character).is_some_and(|d| i.node < d.nodes().len())
            })
    }
}

/// Builds the starting fortress from a configuration.
///
/// Draw order: one graph per character in config order (fixed graphs draw
/// nothing), then for each spawned class a position, followed by repeated
/// extra copies while a draw falls below the initial copy probability. Extra
/// copies stop once the grid is overpopulated. The returned fortress is
/// seeded with the stream state at the end of initialization.
pub fn init_fortress(config: &SimConfig, rng: &mut Rng) -> Result<Fortress, WorldError> {
    if config.characters.is_empty() {
        return Err(WorldError::NoCharacters);
    }
    let defs = config
        .characters
        .iter()
        .map(|&c| match config.fixed_def(c) {
            Some(def) => def.clone(),
            None => generate_fsm(c, config, rng),
        })
        .collect();
    let mut fortress = Fortress::new(config.width, config.height, defs, 0);
    let capacity = config.width * config.height;
    let p = config.init_probability();
    for c in config.spawn_characters() {
        let (x, y) = (rng.below(config.width), rng.below(config.height));
        fortress.spawn(c, x, y)?;
        while fortress.len() <= capacity && rng.chance(p) {
            let (x, y) = (rng.below(config.width), rng.below(config.height));
            fortress.spawn(c, x, y)?;
        }
    }
    fortress.seed = rng.state();
    Ok(fortress)
}
