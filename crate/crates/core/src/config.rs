//! Simulation configuration: a line-oriented `key: value` file.
//!
//! ```text
//! # comment
//! seed: 42                 # or `any`
//! characters: L, k, $
//! action_space: idle, move, chase, take, transform
//! edge_conditions: none, step, within, nextTo, touch
//! step_range: (1, 5)
//! prox_range: (1, 4)
//! ```
//!
//! | key               | default                 |
//! |-------------------|-------------------------|
//! | `seed`            | `any`                   |
//! | `characters`      | required                |
//! | `action_space`    | all nine actions        |
//! | `edge_conditions` | all five conditions     |
//! | `step_range`      | `(1, 5)`                |
//! | `prox_range`      | `(1, 4)`                |
//! | `save_log`        | `true`                  |
//! | `log_file`        | `fortress.log`          |
//! | `min_log`         | `5`                     |
//! | `inactive_limit`  | `10` (ticks)            |
//! | `pop_perc`        | `0.5`                   |
//! | `init_pop_perc`   | same as `pop_perc`      |
//! | `width`           | `13`                    |
//! | `height`          | `6`                     |
//! | `spawn`           | every character         |
//!
//! `pop_perc` gates each `clone` and `add`. `init_pop_perc` is the chance of
//! each extra starting copy of a class. `spawn` restricts which classes get
//! a starting instance. `ENTITY ... END` blocks in the file pin a class to a
//! fixed graph instead of a random one.

use std::collections::hash_map::RandomState;
use std::collections::BTreeSet;
use std::hash::{BuildHasher, Hasher};
use std::path::Path;

use thiserror::Error;

use crate::fsm::{self, Action, ActionKind, ConditionKind, EntityDef};

pub const BORDER: char = '#';

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: `{key}`: {message}")]
    Invalid {
        line: usize,
        key: String,
        message: String,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl ConfigError {
    fn invalid(line: usize, key: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Resolved seed; `any` is replaced by an entropy draw during parsing.
    pub seed: u64,
    pub characters: Vec<char>,
    pub action_space: Vec<ActionKind>,
    pub edge_conditions: Vec<ConditionKind>,
    pub step_range: (u32, u32),
    pub prox_range: (u32, u32),
    pub save_log: bool,
    pub log_file: String,
    pub min_log: u64,
    pub inactive_limit: u64,
    pub pop_perc: f64,
    pub init_pop_perc: Option<f64>,
    pub width: usize,
    pub height: usize,
    pub spawn: Option<Vec<char>>,
    pub fixed_defs: Vec<EntityDef>,
}

impl SimConfig {
    /// Defaults for everything but the character set.
    pub fn new(characters: Vec<char>) -> Self {
        Self {
            seed: 0,
            characters,
            action_space: ActionKind::ALL.to_vec(),
            edge_conditions: ConditionKind::ALL.to_vec(),
            step_range: (1, 5),
            prox_range: (1, 4),
            save_log: true,
            log_file: "fortress.log".to_string(),
            min_log: 5,
            inactive_limit: 10,
            pop_perc: 0.5,
            init_pop_perc: None,
            width: 13,
            height: 6,
            spawn: None,
            fixed_defs: Vec::new(),
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        parse_config(&text)
    }

    pub fn init_probability(&self) -> f64 {
        self.init_pop_perc.unwrap_or(self.pop_perc)
    }

    /// Characters that receive a starting instance, in config order.
    pub fn spawn_characters(&self) -> Vec<char> {
        match &self.spawn {
            Some(list) => list.clone(),
            None => self.characters.clone(),
        }
    }

    pub fn fixed_def(&self, character: char) -> Option<&EntityDef> {
        self.fixed_defs.iter().find(|d| d.character() == character)
    }

    /// Every distinct node an entity graph may contain: parameterless kinds
    /// once, parameterised kinds once per configured character.
    pub fn expanded_actions(&self) -> Vec<Action> {
        let mut out = Vec::new();
        for &kind in &self.action_space {
            if kind.takes_param() {
                out.extend(self.characters.iter().filter_map(|&c| kind.with_param(Some(c))));
            } else if let Some(a) = kind.with_param(None) {
                out.push(a);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_at(&KeyLines::default())
    }

    fn validate_at(&self, at: &KeyLines) -> Result<(), ConfigError> {
        let bad = |key: &str, msg: String| Err(ConfigError::invalid(at.line(key), key, msg));

        if self.characters.is_empty() {
            return bad("characters", "at least one character is required".into());
        }
        let mut seen = BTreeSet::new();
        for &c in &self.characters {
            if !valid_entity_char(c) {
                return bad("characters", format!("`{c}` cannot represent an entity"));
            }
            if !seen.insert(c) {
                return bad("characters", format!("`{c}` listed twice"));
            }
        }
        if !self.action_space.contains(&ActionKind::Idle) {
            return bad("action_space", "must contain idle".into());
        }
        if has_duplicates(&self.action_space) {
            return bad("action_space", "duplicate action".into());
        }
        if self.edge_conditions.is_empty() {
            return bad("edge_conditions", "at least one condition is required".into());
        }
        if has_duplicates(&self.edge_conditions) {
            return bad("edge_conditions", "duplicate condition".into());
        }
        for (key, (lo, hi)) in [("step_range", self.step_range), ("prox_range", self.prox_range)] {
            if lo < 1 || lo > hi {
                return bad(key, format!("need 1 <= min <= max, got ({lo}, {hi})"));
            }
        }
        for (key, p) in [
            ("pop_perc", Some(self.pop_perc)),
            ("init_pop_perc", self.init_pop_perc),
        ] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return bad(key, format!("{p} is outside [0, 1]"));
                }
            }
        }
        if self.width == 0 {
            return bad("width", "must be positive".into());
        }
        if self.height == 0 {
            return bad("height", "must be positive".into());
        }
        if self.inactive_limit == 0 {
            return bad("inactive_limit", "must be positive".into());
        }
        if self.log_file.trim().is_empty() {
            return bad("log_file", "must not be empty".into());
        }
        if let Some(spawn) = &self.spawn {
            for c in spawn {
                if !self.characters.contains(c) {
                    return bad("spawn", format!("`{c}` is not a configured character"));
                }
            }
        }
        let mut fixed = BTreeSet::new();
        for def in &self.fixed_defs {
            let line = at.entity_line(def.character());
            let err = |msg: String| {
                Err(ConfigError::Syntax {
                    line,
                    message: format!("ENTITY {}: {msg}", def.character()),
                })
            };
            if !self.characters.contains(&def.character()) {
                return err("not a configured character".into());
            }
            if !fixed.insert(def.character()) {
                return err("defined twice".into());
            }
            let params = def
                .nodes()
                .iter()
                .filter_map(|n| n.param())
                .chain(def.edges().iter().filter_map(|e| e.cond.target()));
            for c in params {
                if !self.characters.contains(&c) {
                    return err(format!("refers to unknown character `{c}`"));
                }
            }
        }
        Ok(())
    }
}

fn has_duplicates<T: Ord + Copy>(items: &[T]) -> bool {
    let set: BTreeSet<T> = items.iter().copied().collect();
    set.len() != items.len()
}

/// Printable ASCII that does not collide with the border, list syntax or
/// comments.
pub fn valid_entity_char(c: char) -> bool {
    c.is_ascii_graphic() && c != BORDER && c != ','
}

/// Line numbers of keys and entity blocks, for diagnostics.
#[derive(Default)]
struct KeyLines {
    keys: Vec<(String, usize)>,
    entities: Vec<(char, usize)>,
}

impl KeyLines {
    fn line(&self, key: &str) -> usize {
        self.keys.iter().find(|(k, _)| k == key).map_or(0, |&(_, l)| l)
    }

    fn entity_line(&self, c: char) -> usize {
        self.entities.iter().find(|(k, _)| *k == c).map_or(0, |&(_, l)| l)
    }
}

const KEYS: [&str; 15] = [
    "seed",
    "characters",
    "action_space",
    "edge_conditions",
    "step_range",
    "prox_range",
    "save_log",
    "log_file",
    "min_log",
    "inactive_limit",
    "pop_perc",
    "init_pop_perc",
    "width",
    "height",
    "spawn",
];

fn strip_comment(line: &str) -> &str {
    match line.find(BORDER) {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::new(Vec::new());
    let mut at = KeyLines::default();
    let mut seed: Option<u64> = None;
    let mut saw_characters = false;

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    while let Some(&(line, text)) = lines.peek() {
        if text.starts_with("ENTITY ") {
            let def = fsm::parse_block(&mut lines).map_err(|e| ConfigError::Syntax {
                line: e.line,
                message: e.message,
            })?;
            at.entities.push((def.character(), line));
            cfg.fixed_defs.push(def);
            continue;
        }
        lines.next();
        let (key, value) = text.split_once(':').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key: value`, got `{text}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::invalid(line, key, "unknown key"));
        }
        if at.keys.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::invalid(line, key, "duplicate key"));
        }
        at.keys.push((key.to_string(), line));
        let err = |msg: String| ConfigError::invalid(line, key, msg);
        match key {
            "seed" => {
                seed = match value {
                    "any" => Some(entropy_seed()),
                    v => Some(
                        v.parse()
                            .map_err(|_| err(format!("`{v}` is not a u64 or `any`")))?,
                    ),
                }
            }
            "characters" => {
                saw_characters = true;
                cfg.characters = parse_char_list(value).map_err(err)?;
            }
            "action_space" => {
                cfg.action_space = parse_list(value, |t| t.parse::<ActionKind>()).map_err(err)?
            }
            "edge_conditions" => {
                cfg.edge_conditions = parse_list(value, |t| t.parse::<ConditionKind>()).map_err(err)?
            }
            "step_range" => cfg.step_range = parse_pair(value).map_err(err)?,
            "prox_range" => cfg.prox_range = parse_pair(value).map_err(err)?,
            "save_log" => cfg.save_log = parse_bool(value).map_err(err)?,
            "log_file" => cfg.log_file = value.to_string(),
            "min_log" => cfg.min_log = parse_num(value).map_err(err)?,
            "inactive_limit" => cfg.inactive_limit = parse_num(value).map_err(err)?,
            "pop_perc" => cfg.pop_perc = parse_num(value).map_err(err)?,
            "init_pop_perc" => cfg.init_pop_perc = Some(parse_num(value).map_err(err)?),
            "width" => cfg.width = parse_num(value).map_err(err)?,
            "height" => cfg.height = parse_num(value).map_err(err)?,
            "spawn" => cfg.spawn = Some(parse_char_list(value).map_err(err)?),
            _ => unreachable!("key list checked above"),
        }
    }

    if !saw_characters {
        return Err(ConfigError::invalid(0, "characters", "required key missing"));
    }
    cfg.seed = seed.unwrap_or_else(entropy_seed);
    cfg.validate_at(&at)?;
    Ok(cfg)
}

/// Canonical text form; `parse_config(&serialize_config(c)) == c`.
pub fn serialize_config(cfg: &SimConfig) -> String {
    let join = |items: Vec<String>| items.join(", ");
    let mut out = String::new();
    out.push_str(&format!("seed: {}\n", cfg.seed));
    out.push_str(&format!(
        "characters: {}\n",
        join(cfg.characters.iter().map(char::to_string).collect())
    ));
    out.push_str(&format!(
        "action_space: {}\n",
        join(cfg.action_space.iter().map(|k| k.name().to_string()).collect())
    ));
    out.push_str(&format!(
        "edge_conditions: {}\n",
        join(cfg.edge_conditions.iter().map(|k| k.name().to_string()).collect())
    ));
    out.push_str(&format!(
        "step_range: ({}, {})\n",
        cfg.step_range.0, cfg.step_range.1
    ));
    out.push_str(&format!(
        "prox_range: ({}, {})\n",
        cfg.prox_range.0, cfg.prox_range.1
    ));
    out.push_str(&format!("save_log: {}\n", cfg.save_log));
    out.push_str(&format!("log_file: {}\n", cfg.log_file));
    out.push_str(&format!("min_log: {}\n", cfg.min_log));
    out.push_str(&format!("inactive_limit: {}\n", cfg.inactive_limit));
    out.push_str(&format!("pop_perc: {}\n", cfg.pop_perc));
    if let Some(p) = cfg.init_pop_perc {
        out.push_str(&format!("init_pop_perc: {p}\n"));
    }
    out.push_str(&format!("width: {}\n", cfg.width));
    out.push_str(&format!("height: {}\n", cfg.height));
    if let Some(spawn) = &cfg.spawn {
        out.push_str(&format!(
            "spawn: {}\n",
            join(spawn.iter().map(char::to_string).collect())
        ));
    }
    for def in &cfg.fixed_defs {
        out.push_str(&fsm::serialize_fsm(def));
    }
    out
}

fn entropy_seed() -> u64 {
    let mut h = RandomState::new().build_hasher();
    if let Ok(d) = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH) {
        h.write_u128(d.as_nanos());
    }
    h.finish()
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|t| item(t.trim())).collect()
}

fn parse_char_list(value: &str) -> Result<Vec<char>, String> {
    parse_list(value, |t| {
        let mut it = t.chars();
        match (it.next(), it.next()) {
            (Some(c), None) => Ok(c),
            _ => Err(format!("`{t}` is not a single character")),
        }
    })
}

fn parse_pair(value: &str) -> Result<(u32, u32), String> {
    let inner = value
        .strip_prefix('(')
        .and_then(|v| v.strip_suffix(')'))
        .ok_or_else(|| format!("expected `(min, max)`, got `{value}`"))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| format!("expected `(min, max)`, got `{value}`"))?;
    let a = parse_num(a.trim())?;
    let b = parse_num(b.trim())?;
    Ok((a, b))
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "True" => Ok(true),
        "false" | "False" => Ok(false),
        v => Err(format!("`{v}` is not a boolean")),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("`{value}` is not a valid number"))
}
