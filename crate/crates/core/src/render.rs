//! Terminal view of a fortress.

use crate::config::BORDER;
use crate::world::Fortress;

/// Log lines shown under the map.
pub const LOG_TAIL: usize = 5;

/// Map with a `#` border, a status line and the most recent log lines.
/// When several instances share a tile the highest id is drawn. `verbose`
/// appends each instance's current node.
pub fn render(fortress: &Fortress, verbose: bool) -> String {
    let (w, h) = (fortress.width(), fortress.height());
    let mut rows = vec![vec![' '; w]; h];
    for inst in fortress.instances() {
        rows[inst.y][inst.x] = inst.character;
    }
    let wall: String = std::iter::repeat_n(BORDER, w + 2).collect();
    let mut out = String::new();
    out.push_str(&wall);
    out.push('\n');
    for row in rows {
        out.push(BORDER);
        out.extend(row);
        out.push(BORDER);
        out.push('\n');
    }
    out.push_str(&wall);
    out.push('\n');
    out.push_str(&format!(
        "tick {}  entities {}\n",
        fortress.tick(),
        fortress.len()
    ));
    let log = fortress.log();
    for entry in &log[log.len().saturating_sub(LOG_TAIL)..] {
        out.push_str(&entry.to_string());
        out.push('\n');
    }
    if verbose {
        for inst in fortress.instances() {
            if let Some(def) = fortress.def(inst.character) {
                out.push_str(&format!(
                    "{}({}): {}\n",
                    inst.id,
                    inst.character,
                    def.nodes()[inst.node]
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::EntityDef;

    #[test]
    fn border_and_topmost_glyph() {
        let defs = vec![EntityDef::root_only('a'), EntityDef::root_only('b')];
        let mut f = Fortress::new(3, 2, defs, 0);
        f.spawn('b', 1, 0).unwrap();
        f.spawn('a', 1, 0).unwrap();
        f.spawn('b', 2, 1).unwrap();
        let text = render(&f, true);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(&lines[..4], &["#####", "# a #", "#  b#", "#####"]);
        assert_eq!(lines[4], "tick 0  entities 3");
        assert_eq!(lines[5], "0001(b): idle");
    }
}
