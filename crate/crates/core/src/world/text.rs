//! Fortress save files and run logs.
//!
//! Save:
//! ```text
//! FORTRESS seed=<u64> w=<int> h=<int>
//! ENTITY ... END            (one block per class)
//! INSTANCES
//! <char> <id> <x> <y> <node>
//! END
//! ```

use std::collections::BTreeSet;

use super::{EntityId, EntityInstance, Fortress, StopReason};
use crate::fsm::{self, numbered_lines, parse_char, ParseError};

pub fn save_text(fortress: &Fortress) -> String {
    let mut out = format!(
        "FORTRESS seed={} w={} h={}\n",
        fortress.seed,
        fortress.width(),
        fortress.height()
    );
    for def in fortress.defs() {
        out.push_str(&fsm::serialize_fsm(def));
    }
    out.push_str("INSTANCES\n");
    for i in fortress.instances() {
        out.push_str(&format!("{} {} {} {} {}\n", i.character, i.id, i.x, i.y, i.node));
    }
    out.push_str("END\n");
    out
}

fn header_field<'a>(token: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, ParseError> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| ParseError::new(line, format!("expected `{key}=<value>` in header")))
}

pub fn parse_save(text: &str) -> Result<Fortress, ParseError> {
    let mut lines = numbered_lines(text, 1).peekable();
    let (line, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(0, "empty save file"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("FORTRESS") {
        return Err(ParseError::new(line, "expected `FORTRESS` header"));
    }
    let bad = |what: &str| ParseError::new(line, format!("bad {what} in header"));
    let seed: u64 = header_field(tokens.next(), "seed", line)?
        .parse()
        .map_err(|_| bad("seed"))?;
    let width: usize = header_field(tokens.next(), "w", line)?
        .parse()
        .map_err(|_| bad("width"))?;
    let height: usize = header_field(tokens.next(), "h", line)?
        .parse()
        .map_err(|_| bad("height"))?;
    if width == 0 || height == 0 {
        return Err(bad("dimensions"));
    }

    let mut defs = Vec::new();
    let mut chars = BTreeSet::new();
    loop {
        match lines.peek() {
            Some(&(_, "INSTANCES")) => {
                lines.next();
                break;
            }
            Some(&(line, _)) => {
                let def = fsm::parse_block(&mut lines)?;
                if !chars.insert(def.character()) {
                    return Err(ParseError::new(
                        line,
                        format!("class `{}` defined twice", def.character()),
                    ));
                }
                defs.push((line, def));
            }
            None => return Err(ParseError::new(line, "missing `INSTANCES`")),
        }
    }
    for (line, def) in &defs {
        let targets = def
            .nodes()
            .iter()
            .filter_map(|n| n.param())
            .chain(def.edges().iter().filter_map(|e| e.cond.target()));
        for c in targets {
            if !chars.contains(&c) {
                return Err(ParseError::new(
                    *line,
                    format!("class `{}` refers to undefined class `{c}`", def.character()),
                ));
            }
        }
    }

    let mut fortress = Fortress::new(width, height, defs.into_iter().map(|(_, d)| d).collect(), seed);
    let mut last = line;
    for (line, text) in lines.by_ref() {
        last = line;
        if text == "END" {
            return Ok(fortress);
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(ParseError::new(line, format!("malformed instance line `{text}`")));
        }
        let character = parse_char(fields[0], line)?;
        let id: EntityId = fields[1]
            .parse()
            .map_err(|_| ParseError::new(line, format!("bad id `{}`", fields[1])))?;
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| ParseError::new(line, format!("bad number `{s}`")))
        };
        let (x, y, node) = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
        let Some(def) = fortress.def(character) else {
            return Err(ParseError::new(line, format!("no class `{character}`")));
        };
        if node >= def.nodes().len() {
            return Err(ParseError::new(
                line,
                format!("node {node} does not exist in class `{character}`"),
            ));
        }
        if !fortress.in_bounds(x as i64, y as i64) {
            return Err(ParseError::new(
                line,
                format!("position ({x}, {y}) is outside the interior"),
            ));
        }
        if id.0 == 0 || fortress.instance(id).is_some() {
            return Err(ParseError::new(line, format!("invalid or duplicate id {id}")));
        }
        fortress.insert(EntityInstance {
            id,
            character,
            x,
            y,
            node,
        });
    }
    Err(ParseError::new(last, "missing `END`"))
}

/// Full log text: one line per logged action, then the stop cause, every
/// class graph and the seed.
pub fn render_log(fortress: &Fortress, stop: StopReason) -> String {
    let mut out = String::new();
    for entry in fortress.log() {
        out.push_str(&entry.to_string());
        out.push('\n');
    }
    out.push_str(&format!("TERMINATED {stop} t={}\n", fortress.tick()));
    for def in fortress.defs() {
        out.push_str(&fsm::serialize_fsm(def));
    }
    out.push_str(&format!("SEED {}\n", fortress.seed));
    out
}
