//! Line-based machine description format.
//!
//! ```text
//! # comment
//! machine <name>
//! states <id> <id> ...
//! symbols <id> <id> ...
//! edge <state> <symbol> <state> <probability>
//! end
//! ```

use crate::error::MachineError;
use crate::machine::{Edge, EpsilonMachine};

fn syntax(line: usize, message: impl Into<String>) -> MachineError {
    MachineError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses and fully validates a machine description.
pub fn parse_machine(text: &str) -> Result<EpsilonMachine, MachineError> {
    let mut name: Option<String> = None;
    let mut states: Option<Vec<String>> = None;
    let mut symbols: Option<Vec<String>> = None;
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut ended = false;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if ended {
            return Err(syntax(line, "content after `end`"));
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().expect("non-empty line");
        let args: Vec<&str> = tokens.collect();

        match keyword {
            "machine" => {
                if name.is_some() {
                    return Err(syntax(line, "repeated `machine` line"));
                }
                if args.len() != 1 {
                    return Err(syntax(line, "expected `machine <name>`"));
                }
                name = Some(args[0].to_string());
            }
            "states" | "symbols" => {
                if name.is_none() {
                    return Err(syntax(line, "`machine` line must come first"));
                }
                let slot = if keyword == "states" {
                    &mut states
                } else {
                    &mut symbols
                };
                if slot.is_some() {
                    return Err(syntax(line, format!("repeated `{keyword}` line")));
                }
                if args.is_empty() {
                    return Err(syntax(
                        line,
                        format!("`{keyword}` needs at least one identifier"),
                    ));
                }
                let ids: Vec<String> = args.iter().map(|s| s.to_string()).collect();
                for (i, id) in ids.iter().enumerate() {
                    if ids[..i].contains(id) {
                        return Err(syntax(line, format!("identifier `{id}` listed twice")));
                    }
                }
                *slot = Some(ids);
            }
            "edge" => {
                let (Some(st), Some(sy)) = (&states, &symbols) else {
                    return Err(syntax(line, "`states` and `symbols` must precede edges"));
                };
                if args.len() != 4 {
                    return Err(syntax(
                        line,
                        "expected `edge <state> <symbol> <state> <probability>`",
                    ));
                }
                let lookup = |list: &[String], kind: &'static str, id: &str| {
                    list.iter()
                        .position(|s| s == id)
                        .ok_or_else(|| MachineError::UnknownName {
                            line,
                            kind,
                            name: id.to_string(),
                        })
                };
                let from = lookup(st, "state", args[0])?;
                let symbol = lookup(sy, "symbol", args[1])?;
                let to = lookup(st, "state", args[2])?;
                let probability: f64 = args[3]
                    .parse()
                    .map_err(|_| syntax(line, format!("`{}` is not a decimal number", args[3])))?;
                if !probability.is_finite() {
                    return Err(syntax(line, "probability must be finite"));
                }
                if !seen.insert((from, symbol)) {
                    return Err(MachineError::DuplicateEdge {
                        line,
                        state: args[0].to_string(),
                        symbol: args[1].to_string(),
                    });
                }
                edges.push(Edge {
                    from,
                    symbol,
                    to,
                    probability,
                });
            }
            "end" => {
                if !args.is_empty() {
                    return Err(syntax(line, "`end` takes no arguments"));
                }
                ended = true;
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let eof = last_line.max(1);
    if !ended {
        return Err(syntax(eof, "missing `end`"));
    }
    let name = name.ok_or_else(|| syntax(eof, "missing `machine` line"))?;
    let states = states.ok_or_else(|| syntax(eof, "missing `states` line"))?;
    let symbols = symbols.ok_or_else(|| syntax(eof, "missing `symbols` line"))?;
    EpsilonMachine::new(name, states, symbols, &edges)
}
