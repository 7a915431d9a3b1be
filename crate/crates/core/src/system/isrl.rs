//! Line-oriented text format for interpreted systems.

use std::fmt::Write as _;

use super::{AgentDef, SystemDef, SystemError, Transition};
use crate::regex::{parse_regex_with, Regex, Token};

struct RawAgent {
    line: usize,
    name: String,
    states: Vec<String>,
    init: Option<(usize, String)>,
    actions: Vec<String>,
    protocol: Vec<(usize, Vec<String>, Vec<String>)>,
    trans: Vec<(usize, String, Vec<String>, String)>,
}

fn err(line: usize, msg: impl Into<String>) -> SystemError {
    SystemError::Parse {
        line,
        msg: msg.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn idents(line: usize, words: &str) -> Result<Vec<String>, SystemError> {
    words
        .split_whitespace()
        .map(|w| {
            if is_ident(w) {
                Ok(w.to_string())
            } else {
                Err(err(line, format!("`{w}` is not an identifier")))
            }
        })
        .collect()
}

fn tuple_parts(text: &str) -> Option<Vec<String>> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(|s| s.trim().to_string()).collect())
}

pub fn parse_isrl(text: &str) -> Result<SystemDef, SystemError> {
    let mut agents: Vec<RawAgent> = Vec::new();
    let mut configs: Vec<(usize, String, String)> = Vec::new();
    let mut labels: Vec<(usize, String, String)> = Vec::new();
    let mut in_agent = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (kw, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        match kw {
            "agent" => {
                if !is_ident(rest) {
                    return Err(err(line, "expected `agent NAME`"));
                }
                agents.push(RawAgent {
                    line,
                    name: rest.to_string(),
                    states: Vec::new(),
                    init: None,
                    actions: Vec::new(),
                    protocol: Vec::new(),
                    trans: Vec::new(),
                });
                in_agent = true;
            }
            "config" | "label" => {
                in_agent = false;
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line, format!("expected `{kw} NAME = ...`")))?;
                let lhs = lhs.trim();
                if !is_ident(lhs) {
                    return Err(err(line, format!("`{lhs}` is not an identifier")));
                }
                let entry = (line, lhs.to_string(), rhs.trim().to_string());
                if kw == "config" {
                    configs.push(entry);
                } else {
                    labels.push(entry);
                }
            }
            "states" | "init" | "actions" | "protocol" | "trans" => {
                let agent = match agents.last_mut() {
                    Some(a) if in_agent => a,
                    _ => return Err(err(line, format!("`{kw}` outside an agent block"))),
                };
                match kw {
                    "states" => agent.states.extend(idents(line, rest)?),
                    "actions" => agent.actions.extend(idents(line, rest)?),
                    "init" => {
                        if !is_ident(rest) {
                            return Err(err(line, "expected `init STATE`"));
                        }
                        agent.init = Some((line, rest.to_string()));
                    }
                    "protocol" => {
                        let (states, acts) = rest
                            .split_once(':')
                            .ok_or_else(|| err(line, "expected `protocol STATE...: ACTION...`"))?;
                        let states = idents(line, states)?;
                        if states.is_empty() {
                            return Err(err(line, "protocol line names no state"));
                        }
                        agent.protocol.push((line, states, idents(line, acts)?));
                    }
                    _ => {
                        let open = rest
                            .find('(')
                            .ok_or_else(|| err(line, "expected a joint-action pattern"))?;
                        let close = rest
                            .rfind(')')
                            .filter(|&c| c > open)
                            .ok_or_else(|| err(line, "unclosed pattern"))?;
                        let from = rest[..open].trim();
                        let to = rest[close + 1..].trim();
                        if !is_ident(from) || !is_ident(to) {
                            return Err(err(line, "expected `trans STATE (PATTERN) STATE`"));
                        }
                        let slots = tuple_parts(&rest[open..=close]).expect("delimited");
                        agent
                            .trans
                            .push((line, from.to_string(), slots, to.to_string()));
                    }
                }
            }
            other => return Err(err(line, format!("unknown keyword `{other}`"))),
        }
    }

    if agents.is_empty() {
        return Err(err(1, "no agents declared"));
    }
    let mut defs = Vec::with_capacity(agents.len());
    for a in &agents {
        let state = |line: usize, s: &str| {
            a.states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| err(line, format!("agent {}: unknown state `{s}`", a.name)))
        };
        let (init_line, init_name) = a
            .init
            .as_ref()
            .ok_or_else(|| err(a.line, format!("agent {} has no `init` line", a.name)))?;
        let init = state(*init_line, init_name)?;
        let mut protocol = vec![Vec::new(); a.states.len()];
        for (line, states, acts) in &a.protocol {
            let acts = acts
                .iter()
                .map(|x| {
                    a.actions.iter().position(|y| y == x).ok_or_else(|| {
                        err(*line, format!("agent {}: unknown action `{x}`", a.name))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            for s in states {
                protocol[state(*line, s)?].extend(acts.iter().copied());
            }
        }
        let mut transitions = Vec::new();
        for (line, from, slots, to) in &a.trans {
            if slots.len() != agents.len() {
                return Err(err(
                    *line,
                    format!(
                        "pattern has {} slots, expected {}",
                        slots.len(),
                        agents.len()
                    ),
                ));
            }
            let pattern = slots
                .iter()
                .zip(&agents)
                .map(|(slot, owner)| {
                    if slot == "*" {
                        Ok(None)
                    } else {
                        owner
                            .actions
                            .iter()
                            .position(|y| y == slot)
                            .map(Some)
                            .ok_or_else(|| {
                                err(
                                    *line,
                                    format!("agent {} has no action `{slot}`", owner.name),
                                )
                            })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            transitions.push(Transition {
                from: state(*line, from)?,
                pattern,
                to: state(*line, to)?,
            });
        }
        defs.push(AgentDef {
            name: a.name.clone(),
            states: a.states.clone(),
            init,
            actions: a.actions.clone(),
            protocol,
            transitions,
        });
    }

    let mut def = SystemDef {
        agents: defs,
        aliases: Vec::new(),
        labels: Vec::new(),
    };
    let resolve_tuple = |def: &SystemDef, parts: &[String]| -> Option<Vec<usize>> {
        if parts.len() != def.agents.len() {
            return None;
        }
        parts
            .iter()
            .zip(&def.agents)
            .map(|(p, a)| a.states.iter().position(|s| s == p))
            .collect()
    };
    for (line, name, rhs) in &configs {
        let parts = tuple_parts(rhs).ok_or_else(|| err(*line, "expected `(state,...)`"))?;
        let locals = resolve_tuple(&def, &parts)
            .ok_or_else(|| err(*line, format!("`{rhs}` is not a configuration")))?;
        def.aliases.push((name.clone(), locals));
    }
    for (line, name, rhs) in &labels {
        let expr = parse_regex_with(rhs, |tok: &Token| match tok {
            Token::Ident(a) => def
                .aliases
                .iter()
                .find(|(n, _)| n == a)
                .map(|(_, l)| Regex::Symbol(def.config_index(l))),
            Token::Tuple(parts) => {
                resolve_tuple(&def, parts).map(|l| Regex::Symbol(def.config_index(&l)))
            }
            _ => None,
        })
        .map_err(|source| SystemError::Regex {
            line: *line,
            source,
        })?;
        def.labels.push((name.clone(), expr));
    }
    Ok(def)
}

/// Renders a definition so that `parse_isrl` gives it back unchanged.
pub fn print_isrl(def: &SystemDef) -> String {
    let mut out = String::new();
    for a in &def.agents {
        let _ = writeln!(out, "agent {}", a.name);
        let _ = writeln!(out, "  states {}", a.states.join(" "));
        let _ = writeln!(out, "  init {}", a.states[a.init]);
        if !a.actions.is_empty() {
            let _ = writeln!(out, "  actions {}", a.actions.join(" "));
        }
        for (l, acts) in a.protocol.iter().enumerate() {
            if acts.is_empty() {
                continue;
            }
            let names: Vec<&str> = acts.iter().map(|&x| a.actions[x].as_str()).collect();
            let _ = writeln!(out, "  protocol {}: {}", a.states[l], names.join(" "));
        }
        for t in &a.transitions {
            let slots: Vec<&str> = t
                .pattern
                .iter()
                .zip(&def.agents)
                .map(|(s, owner)| s.map_or("*", |x| owner.actions[x].as_str()))
                .collect();
            let _ = writeln!(
                out,
                "  trans {} ({}) {}",
                a.states[t.from],
                slots.join(","),
                a.states[t.to]
            );
        }
        out.push('\n');
    }
    for (name, locals) in &def.aliases {
        let parts: Vec<&str> = locals
            .iter()
            .zip(&def.agents)
            .map(|(&l, a)| a.states[l].as_str())
            .collect();
        let _ = writeln!(out, "config {name} = ({})", parts.join(","));
    }
    for (name, expr) in &def.labels {
        let text = expr
            .display_with(|g: &usize, f| f.write_str(&def.config_name(*g)))
            .to_string();
        let _ = writeln!(out, "label {name} = {text}");
    }
    out
}
