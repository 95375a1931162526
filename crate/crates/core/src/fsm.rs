//! Entity behaviour graphs: actions as nodes, conditional transitions as
//! edges, plus random generation, pruning and the plain-text format.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::config::SimConfig;
use crate::rng::Rng;

/// Action kinds without their character parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    Idle,
    Move,
    Die,
    Clone,
    Push,
    Take,
    Chase,
    Add,
    Transform,
}

impl ActionKind {
    pub const ALL: [ActionKind; 9] = [
        ActionKind::Idle,
        ActionKind::Move,
        ActionKind::Die,
        ActionKind::Clone,
        ActionKind::Push,
        ActionKind::Take,
        ActionKind::Chase,
        ActionKind::Add,
        ActionKind::Transform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Idle => "idle",
            ActionKind::Move => "move",
            ActionKind::Die => "die",
            ActionKind::Clone => "clone",
            ActionKind::Push => "push",
            ActionKind::Take => "take",
            ActionKind::Chase => "chase",
            ActionKind::Add => "add",
            ActionKind::Transform => "transform",
        }
    }

    pub fn takes_param(self) -> bool {
        matches!(
            self,
            ActionKind::Take | ActionKind::Chase | ActionKind::Add | ActionKind::Transform
        )
    }

    /// Builds the action for this kind; `None` if the parameter does not fit.
    pub fn with_param(self, param: Option<char>) -> Option<Action> {
        Some(match (self, param) {
            (ActionKind::Idle, None) => Action::Idle,
            (ActionKind::Move, None) => Action::Move,
            (ActionKind::Die, None) => Action::Die,
            (ActionKind::Clone, None) => Action::Clone,
            (ActionKind::Push, None) => Action::Push,
            (ActionKind::Take, Some(c)) => Action::Take(c),
            (ActionKind::Chase, Some(c)) => Action::Chase(c),
            (ActionKind::Add, Some(c)) => Action::Add(c),
            (ActionKind::Transform, Some(c)) => Action::Transform(c),
            _ => return None,
        })
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown action `{s}`"))
    }
}

/// A node of an entity graph. Parameterised actions carry their target
/// character; node identity is the whole value, so `Chase('a')` and
/// `Chase('b')` may coexist in one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Idle,
    Move,
    Die,
    Clone,
    Push,
    Take(char),
    Chase(char),
    Add(char),
    Transform(char),
}

impl Action {
    pub fn kind(self) -> ActionKind {
        match self {
            Action::Idle => ActionKind::Idle,
            Action::Move => ActionKind::Move,
            Action::Die => ActionKind::Die,
            Action::Clone => ActionKind::Clone,
            Action::Push => ActionKind::Push,
            Action::Take(_) => ActionKind::Take,
            Action::Chase(_) => ActionKind::Chase,
            Action::Add(_) => ActionKind::Add,
            Action::Transform(_) => ActionKind::Transform,
        }
    }

    pub fn param(self) -> Option<char> {
        match self {
            Action::Take(c) | Action::Chase(c) | Action::Add(c) | Action::Transform(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param() {
            Some(c) => write!(f, "{} {c}", self.kind()),
            None => f.write_str(self.kind().name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionKind {
    None,
    Step,
    Within,
    NextTo,
    Touch,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 5] = [
        ConditionKind::None,
        ConditionKind::Step,
        ConditionKind::Within,
        ConditionKind::NextTo,
        ConditionKind::Touch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::None => "none",
            ConditionKind::Step => "step",
            ConditionKind::Within => "within",
            ConditionKind::NextTo => "nextTo",
            ConditionKind::Touch => "touch",
        }
    }

    /// Transition priority, lowest first.
    pub fn priority(self) -> u8 {
        match self {
            ConditionKind::None => 0,
            ConditionKind::Step => 1,
            ConditionKind::Within => 2,
            ConditionKind::NextTo => 3,
            ConditionKind::Touch => 4,
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConditionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConditionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

/// Guard on a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    None,
    /// Fires when the tick counter is a multiple of the period.
    Step(u32),
    /// Some instance of the character lies within this Manhattan distance.
    Within(char, u32),
    /// Some instance of the character is orthogonally adjacent.
    NextTo(char),
    /// Some instance of the character shares the tile.
    Touch(char),
}

impl Condition {
    pub fn kind(self) -> ConditionKind {
        match self {
            Condition::None => ConditionKind::None,
            Condition::Step(_) => ConditionKind::Step,
            Condition::Within(..) => ConditionKind::Within,
            Condition::NextTo(_) => ConditionKind::NextTo,
            Condition::Touch(_) => ConditionKind::Touch,
        }
    }

    pub fn priority(self) -> u8 {
        self.kind().priority()
    }

    pub fn target(self) -> Option<char> {
        match self {
            Condition::Within(c, _) | Condition::NextTo(c) | Condition::Touch(c) => Some(c),
            _ => None,
        }
    }

    /// Draws a condition kind from the configured set, then its parameters.
    pub fn random(config: &SimConfig, rng: &mut Rng) -> Condition {
        let kind = config.edge_conditions[rng.below(config.edge_conditions.len())];
        match kind {
            ConditionKind::None => Condition::None,
            ConditionKind::Step => {
                let (lo, hi) = config.step_range;
                Condition::Step(rng.range_inclusive(lo, hi))
            }
            ConditionKind::Within => {
                let c = config.characters[rng.below(config.characters.len())];
                let (lo, hi) = config.prox_range;
                Condition::Within(c, rng.range_inclusive(lo, hi))
            }
            ConditionKind::NextTo => Condition::NextTo(config.characters[rng.below(config.characters.len())]),
            ConditionKind::Touch => Condition::Touch(config.characters[rng.below(config.characters.len())]),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Condition::None => f.write_str("none"),
            Condition::Step(n) => write!(f, "step {n}"),
            Condition::Within(c, d) => write!(f, "within {c} {d}"),
            Condition::NextTo(c) => write!(f, "nextTo {c}"),
            Condition::Touch(c) => write!(f, "touch {c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub cond: Condition,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsmError {
    #[error("node 0 must be idle")]
    RootNotIdle,
    #[error("duplicate node `{0}`")]
    DuplicateNode(Action),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge {0} -> {1} references a missing node")]
    DanglingEdge(usize, usize),
    #[error("more than one edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("condition parameter must be at least 1")]
    ZeroParameter,
}

/// The behaviour graph shared by every instance of one character.
///
/// Node 0 is always `idle`. Edges are kept sorted by `(src, dst)`, which is
/// also the tie-break order when several transitions share a priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityDef {
    character: char,
    nodes: Vec<Action>,
    edges: Vec<Edge>,
}

impl EntityDef {
    /// A graph holding only the idle root.
    pub fn root_only(character: char) -> Self {
        Self {
            character,
            nodes: vec![Action::Idle],
            edges: Vec::new(),
        }
    }

    pub fn new(character: char, nodes: Vec<Action>, mut edges: Vec<Edge>) -> Result<Self, FsmError> {
        edges.sort_by_key(|e| (e.src, e.dst));
        let def = Self {
            character,
            nodes,
            edges,
        };
        def.validate()?;
        Ok(def)
    }

    pub fn character(&self) -> char {
        self.character
    }

    pub fn nodes(&self) -> &[Action] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Nodes plus edges; the per-class size term of the fitness.
    pub fn size(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn outgoing(&self, src: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.src == src)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edge_position(src, dst).is_ok()
    }

    fn edge_position(&self, src: usize, dst: usize) -> Result<usize, usize> {
        self.edges.binary_search_by_key(&(src, dst), |e| (e.src, e.dst))
    }

    /// Structural invariants: idle root, unique nodes, no self-loops, at
    /// most one edge per ordered pair, no dangling indices.
    pub fn validate(&self) -> Result<(), FsmError> {
        if self.nodes.first() != Some(&Action::Idle) {
            return Err(FsmError::RootNotIdle);
        }
        let mut seen = BTreeSet::new();
        for &n in &self.nodes {
            if !seen.insert(n) {
                return Err(FsmError::DuplicateNode(n));
            }
        }
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            if e.src >= self.nodes.len() || e.dst >= self.nodes.len() {
                return Err(FsmError::DanglingEdge(e.src, e.dst));
            }
            if e.src == e.dst {
                return Err(FsmError::SelfLoop(e.src));
            }
            if !pairs.insert((e.src, e.dst)) {
                return Err(FsmError::DuplicateEdge(e.src, e.dst));
            }
            match e.cond {
                Condition::Step(0) | Condition::Within(_, 0) => return Err(FsmError::ZeroParameter),
                _ => {}
            }
        }
        Ok(())
    }

    /// Indices reachable from the root by following edges.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(n) = queue.pop_front() {
            for e in self.outgoing(n) {
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    queue.push_back(e.dst);
                }
            }
        }
        seen
    }

    /// Drops nodes unreachable from the root and every edge touching them.
    /// Surviving nodes keep their relative order.
    pub fn prune(&self) -> EntityDef {
        let keep = self.reachable();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, &n) in self.nodes.iter().enumerate() {
            if keep[i] {
                remap[i] = nodes.len();
                nodes.push(n);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.src] && keep[e.dst])
            .map(|e| Edge {
                src: remap[e.src],
                dst: remap[e.dst],
                cond: e.cond,
            })
            .collect();
        EntityDef {
            character: self.character,
            nodes,
            edges,
        }
    }

    /// Appends a node; returns its index, or `None` if it is already present.
    pub fn push_node(&mut self, action: Action) -> Option<usize> {
        if self.nodes.contains(&action) {
            return None;
        }
        self.nodes.push(action);
        Some(self.nodes.len() - 1)
    }

    /// Removes a non-root node with its incident edges, shifting later
    /// indices down by one.
    pub fn remove_node(&mut self, index: usize) -> bool {
        if index == 0 || index >= self.nodes.len() {
            return false;
        }
        self.nodes.remove(index);
        self.edges.retain(|e| e.src != index && e.dst != index);
        let shift = |i: usize| if i > index { i - 1 } else { i };
        for e in &mut self.edges {
            e.src = shift(e.src);
            e.dst = shift(e.dst);
        }
        true
    }

    /// Swaps the action on a non-root node; edges stay attached.
    pub fn replace_node(&mut self, index: usize, action: Action) -> bool {
        if index == 0 || index >= self.nodes.len() || self.nodes.contains(&action) {
            return false;
        }
        self.nodes[index] = action;
        true
    }

    pub fn insert_edge(&mut self, edge: Edge) -> bool {
        if edge.src == edge.dst || edge.src >= self.nodes.len() || edge.dst >= self.nodes.len() {
            return false;
        }
        match self.edge_position(edge.src, edge.dst) {
            Ok(_) => false,
            Err(pos) => {
                self.edges.insert(pos, edge);
                true
            }
        }
    }

    pub fn remove_edge_at(&mut self, index: usize) -> Option<Edge> {
        (index < self.edges.len()).then(|| self.edges.remove(index))
    }

    pub fn set_condition(&mut self, index: usize, cond: Condition) -> bool {
        match self.edges.get_mut(index) {
            Some(e) => {
                e.cond = cond;
                true
            }
            None => false,
        }
    }

    /// Ordered `(src, dst)` pairs without an edge, in lexicographic order.
    pub fn free_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.nodes.len();
        (0..n)
            .flat_map(|s| (0..n).map(move |d| (s, d)))
            .filter(|&(s, d)| s != d && !self.has_edge(s, d))
            .collect()
    }
}

/// Random graph for one character.
///
/// Draw order: total node count, then each non-root node without
/// replacement from the expanded action space, then the edge count, then
/// for each edge its free pair followed by its condition.
pub fn generate_fsm(character: char, config: &SimConfig, rng: &mut Rng) -> EntityDef {
    let mut pool: Vec<Action> = config
        .expanded_actions()
        .into_iter()
        .filter(|&a| a != Action::Idle)
        .collect();
    let max_nodes = (pool.len() + 1).min(8);
    let k = 1 + rng.below(max_nodes);
    let mut def = EntityDef::root_only(character);
    for _ in 1..k {
        let pick = pool.remove(rng.below(pool.len()));
        def.nodes.push(pick);
    }
    let mut pairs = def.free_pairs();
    let m = rng.below(k * (k - 1) + 1);
    for _ in 0..m {
        let (src, dst) = pairs.remove(rng.below(pairs.len()));
        let cond = Condition::random(config, rng);
        def.insert_edge(Edge { src, dst, cond });
    }
    def
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// Text form of one graph, edges sorted by `(src, dst)`.
pub fn serialize_fsm(def: &EntityDef) -> String {
    let mut out = format!("ENTITY {}\nNODES\n", def.character);
    for (i, n) in def.nodes.iter().enumerate() {
        out.push_str(&format!("{i}: {n}\n"));
    }
    out.push_str("EDGES\n");
    for e in &def.edges {
        out.push_str(&format!("{} -> {} :: {}\n", e.src, e.dst, e.cond));
    }
    out.push_str("END\n");
    out
}

/// Parses exactly one `ENTITY ... END` block.
pub fn parse_fsm(text: &str) -> Result<EntityDef, ParseError> {
    let mut lines = numbered_lines(text, 1);
    let def = parse_block(&mut lines)?;
    if let Some((line, rest)) = lines.next() {
        return Err(ParseError::new(
            line,
            format!("unexpected trailing content `{rest}`"),
        ));
    }
    Ok(def)
}

/// Non-blank lines paired with 1-based line numbers, starting at `first`.
pub(crate) fn numbered_lines(text: &str, first: usize) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(move |(i, l)| (i + first, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub(crate) fn parse_char(token: &str, line: usize) -> Result<char, ParseError> {
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(ParseError::new(
            line,
            format!("expected a single character, got `{token}`"),
        )),
    }
}

fn parse_positive(token: &str, line: usize) -> Result<u32, ParseError> {
    match token.parse::<u32>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(ParseError::new(
            line,
            format!("expected a positive integer, got `{token}`"),
        )),
    }
}

/// Consumes lines from `ENTITY` through `END`.
pub(crate) fn parse_block<'a, I>(lines: &mut I) -> Result<EntityDef, ParseError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (line, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(0, "expected `ENTITY <char>`, found end of input"))?;
    let character = match header.strip_prefix("ENTITY ") {
        Some(rest) => parse_char(rest.trim(), line)?,
        None => {
            return Err(ParseError::new(
                line,
                format!("expected `ENTITY <char>`, got `{header}`"),
            ))
        }
    };
    expect_line(lines, "NODES", line)?;

    let mut nodes: Vec<Action> = Vec::new();
    let mut edges = Vec::new();
    let mut pairs = BTreeSet::new();
    let mut in_edges = false;
    let mut last = line;
    for (line, text) in lines.by_ref() {
        last = line;
        match text {
            "END" => {
                let def = EntityDef::new(character, nodes, edges)
                    .map_err(|e| ParseError::new(line, e.to_string()))?;
                return Ok(def);
            }
            "EDGES" if !in_edges => {
                if nodes.is_empty() {
                    return Err(ParseError::new(line, "graph has no nodes"));
                }
                in_edges = true;
            }
            _ if !in_edges => {
                let (index, action) = parse_node_line(text, line)?;
                if index != nodes.len() {
                    return Err(ParseError::new(
                        line,
                        format!("node index {index} out of sequence, expected {}", nodes.len()),
                    ));
                }
                if index == 0 && action != Action::Idle {
                    return Err(ParseError::new(line, "node 0 must be idle"));
                }
                if nodes.contains(&action) {
                    return Err(ParseError::new(line, format!("duplicate node `{action}`")));
                }
                nodes.push(action);
            }
            _ => {
                let edge = parse_edge_line(text, line)?;
                if edge.src >= nodes.len() || edge.dst >= nodes.len() {
                    return Err(ParseError::new(
                        line,
                        format!("edge {} -> {} references a missing node", edge.src, edge.dst),
                    ));
                }
                if edge.src == edge.dst {
                    return Err(ParseError::new(line, "self-loops are not allowed"));
                }
                if !pairs.insert((edge.src, edge.dst)) {
                    return Err(ParseError::new(line, "duplicate edge"));
                }
                edges.push(edge);
            }
        }
    }
    Err(ParseError::new(last, "missing `END`"))
}

fn expect_line<'a, I>(lines: &mut I, want: &str, prev: usize) -> Result<(), ParseError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    match lines.next() {
        Some((_, text)) if text == want => Ok(()),
        Some((line, text)) => Err(ParseError::new(line, format!("expected `{want}`, got `{text}`"))),
        None => Err(ParseError::new(
            prev,
            format!("expected `{want}`, found end of input"),
        )),
    }
}

fn parse_node_line(text: &str, line: usize) -> Result<(usize, Action), ParseError> {
    let (index, rest) = text
        .split_once(": ")
        .ok_or_else(|| ParseError::new(line, format!("malformed node line `{text}`")))?;
    let index: usize = index
        .trim()
        .parse()
        .map_err(|_| ParseError::new(line, format!("bad node index `{index}`")))?;
    let mut tokens = rest.split_whitespace();
    let kind: ActionKind = tokens
        .next()
        .ok_or_else(|| ParseError::new(line, "missing action"))?
        .parse()
        .map_err(|e: String| ParseError::new(line, e))?;
    let param = tokens.next().map(|t| parse_char(t, line)).transpose()?;
    if let Some(extra) = tokens.next() {
        return Err(ParseError::new(line, format!("unexpected token `{extra}`")));
    }
    let action = kind.with_param(param).ok_or_else(|| {
        if kind.takes_param() {
            ParseError::new(line, format!("action `{kind}` needs a target character"))
        } else {
            ParseError::new(line, format!("action `{kind}` takes no parameter"))
        }
    })?;
    Ok((index, action))
}

fn parse_edge_line(text: &str, line: usize) -> Result<Edge, ParseError> {
    let malformed = || ParseError::new(line, format!("malformed edge line `{text}`"));
    let (pair, cond) = text.split_once(" :: ").ok_or_else(malformed)?;
    let (src, dst) = pair.split_once(" -> ").ok_or_else(malformed)?;
    let src: usize = src.trim().parse().map_err(|_| malformed())?;
    let dst: usize = dst.trim().parse().map_err(|_| malformed())?;
    let tokens: Vec<&str> = cond.split_whitespace().collect();
    let kind: ConditionKind = tokens
        .first()
        .ok_or_else(malformed)?
        .parse()
        .map_err(|e: String| ParseError::new(line, e))?;
    let arity = |n: usize| {
        if tokens.len() == n + 1 {
            Ok(())
        } else {
            Err(ParseError::new(
                line,
                format!(
                    "condition `{kind}` takes {n} argument(s), got {}",
                    tokens.len() - 1
                ),
            ))
        }
    };
    let cond = match kind {
        ConditionKind::None => {
            arity(0)?;
            Condition::None
        }
        ConditionKind::Step => {
            arity(1)?;
            Condition::Step(parse_positive(tokens[1], line)?)
        }
        ConditionKind::Within => {
            arity(2)?;
            Condition::Within(parse_char(tokens[1], line)?, parse_positive(tokens[2], line)?)
        }
        ConditionKind::NextTo => {
            arity(1)?;
            Condition::NextTo(parse_char(tokens[1], line)?)
        }
        ConditionKind::Touch => {
            arity(1)?;
            Condition::Touch(parse_char(tokens[1], line)?)
        }
    };
    Ok(Edge { src, dst, cond })
}
