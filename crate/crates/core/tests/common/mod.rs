#![allow(dead_code)]

use ehs_core::formula::{Formula, FormulaPlus, Modality};
use ehs_core::regex::Regex;
use ehs_core::system::{parse_isrl, paths_from, InterpretedSystem, Interval, SystemDef};
use rand::rngs::StdRng;
use rand::Rng;

pub const IS_EX: &str = include_str!("../../models/is_ex.isrl");

pub fn is_ex() -> InterpretedSystem {
    InterpretedSystem::new(parse_isrl(IS_EX).unwrap()).unwrap()
}

/// Every interval of length at most `max_len` starting at a reachable
/// configuration.
pub fn model_intervals(sys: &InterpretedSystem, max_len: usize) -> Vec<Interval> {
    sys.reachable_configs()
        .into_iter()
        .flat_map(|g| paths_from(sys, g, max_len))
        .collect()
}

pub type Unary = Box<dyn Fn(FormulaPlus) -> FormulaPlus>;

pub struct Grammar {
    pub leaves: Vec<FormulaPlus>,
    pub unary: Vec<Unary>,
    /// Whether `&` is available.
    pub and: bool,
    pub or: bool,
}

pub fn var(p: &str) -> FormulaPlus {
    Formula::Atom(p.to_string())
}

pub fn dia(m: Modality) -> Unary {
    Box::new(move |f| Formula::diamond(m, f))
}

pub fn know(a: usize) -> Unary {
    Box::new(move |f| Formula::know(a, f))
}

pub fn common(g: &'static [usize]) -> Unary {
    Box::new(move |f| Formula::common(g, f))
}

pub fn not() -> Unary {
    Box::new(Formula::not)
}

impl Grammar {
    /// All formulas with exactly `n` AST nodes, for each `n` up to `max`.
    pub fn by_size(&self, max: usize) -> Vec<Vec<FormulaPlus>> {
        let mut out: Vec<Vec<FormulaPlus>> = vec![Vec::new(); max + 1];
        for n in 1..=max {
            let mut level = Vec::new();
            if n == 1 {
                level.extend(self.leaves.iter().cloned());
            } else {
                for op in &self.unary {
                    level.extend(out[n - 1].iter().cloned().map(op));
                }
                for l in 1..n - 1 {
                    let r = n - 1 - l;
                    for a in &out[l] {
                        for b in &out[r] {
                            if self.and {
                                level.push(Formula::and(a.clone(), b.clone()));
                            }
                            if self.or {
                                level.push(Formula::or(a.clone(), b.clone()));
                            }
                        }
                    }
                }
            }
            out[n] = level;
        }
        out
    }

    pub fn up_to(&self, max: usize) -> Vec<FormulaPlus> {
        self.by_size(max).into_iter().flatten().collect()
    }

    /// A uniformly chosen shape of at most `max` nodes.
    pub fn random(&self, rng: &mut StdRng, max: usize) -> FormulaPlus {
        if max <= 1 || rng.gen_bool(0.25) {
            return self.leaves[rng.gen_range(0..self.leaves.len())].clone();
        }
        let binary = self.and || self.or;
        if max >= 3 && binary && rng.gen_bool(0.35) {
            let l = rng.gen_range(1..max - 1);
            let a = self.random(rng, l);
            let b = self.random(rng, max - 1 - l);
            return if self.and && (!self.or || rng.gen_bool(0.5)) {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            };
        }
        let op = &self.unary[rng.gen_range(0..self.unary.len())];
        op(self.random(rng, max - 1))
    }
}

/// A random expression over symbols `0..n` with at most `depth` levels.
pub fn random_regex(rng: &mut StdRng, n: usize, depth: usize) -> Regex<usize> {
    if depth == 0 || rng.gen_bool(0.3) {
        return Regex::Symbol(rng.gen_range(0..n));
    }
    match rng.gen_range(0..3) {
        0 => Regex::concat(
            random_regex(rng, n, depth - 1),
            random_regex(rng, n, depth - 1),
        ),
        1 => Regex::union(
            random_regex(rng, n, depth - 1),
            random_regex(rng, n, depth - 1),
        ),
        _ => Regex::star(random_regex(rng, n, depth - 1)),
    }
}

/// Labelling expressions whose minimal automata have at most `max_states`
/// states; names are `p`, `q`, ...
pub fn random_labels(
    rng: &mut StdRng,
    n: usize,
    vars: usize,
    max_states: usize,
) -> Vec<(String, Regex<usize>)> {
    let names = ["p", "q", "r"];
    (0..vars)
        .map(|v| loop {
            let r = random_regex(rng, n, 3);
            if r.nullable() {
                continue;
            }
            let probe = SystemDef::from_graph(n, &[], 0, vec![("x".into(), r.clone())]);
            if let Ok(s) = InterpretedSystem::new(probe) {
                if s.dfa(0).num_states() <= max_states {
                    break (names[v].to_string(), r);
                }
            }
        })
        .collect()
}

/// Each configuration gets one successor.
pub fn random_deterministic(
    rng: &mut StdRng,
    max_configs: usize,
    max_states: usize,
) -> InterpretedSystem {
    let n = rng.gen_range(1..=max_configs);
    let edges: Vec<(usize, usize)> = (0..n).map(|g| (g, rng.gen_range(0..n))).collect();
    let labels = random_labels(rng, n, 1, max_states);
    InterpretedSystem::new(SystemDef::from_graph(n, &edges, 0, labels)).unwrap()
}

/// Each configuration gets one or two successors.
pub fn random_branching(
    rng: &mut StdRng,
    max_configs: usize,
    vars: usize,
    max_states: usize,
) -> InterpretedSystem {
    let n = rng.gen_range(1..=max_configs);
    let mut edges = Vec::new();
    for g in 0..n {
        let a = rng.gen_range(0..n);
        edges.push((g, a));
        if n > 1 && rng.gen_bool(0.5) {
            let b = rng.gen_range(0..n);
            if b != a {
                edges.push((g, b));
            }
        }
    }
    let labels = random_labels(rng, n, vars, max_states);
    InterpretedSystem::new(SystemDef::from_graph(n, &edges, 0, labels)).unwrap()
}
