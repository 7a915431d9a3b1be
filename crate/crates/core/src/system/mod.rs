//! Interpreted systems with regular labellings.
//!
//! A [`SystemDef`] is the raw description (what the ISRL file says); an
//! [`InterpretedSystem`] is the validated, precomputed form every engine
//! works on. Global configurations are numbered in row-major order over the
//! agents' local states, agent 0 most significant.

mod isrl;
mod relations;

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::regex::{compile, Alphabet, Dfa, LanguageShape, Regex, RegexError};

pub use isrl::{parse_isrl, print_isrl};
pub use relations::{
    allen_successors, common_class, count_paths, epi_class, epi_equiv, later_successors,
    paths_from, strictly_reachable, Relation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Regex { line: usize, source: RegexError },
    #[error("invalid system: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown configuration `{0}`")]
    UnknownConfig(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("relation {0} needs a length bound")]
    MissingBound(Relation),
}

/// Local transition `from --pattern--> to`; `None` slots match any action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub pattern: Vec<Option<usize>>,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgentDef {
    pub name: String,
    pub states: Vec<String>,
    pub init: usize,
    pub actions: Vec<String>,
    /// Permitted actions per local state.
    pub protocol: Vec<Vec<usize>>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SystemDef {
    pub agents: Vec<AgentDef>,
    /// Named configurations, as local-state indices per agent.
    pub aliases: Vec<(String, Vec<usize>)>,
    /// Labelling; letters are configuration indices.
    pub labels: Vec<(String, Regex<usize>)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl SystemDef {
    pub fn num_configs(&self) -> usize {
        self.agents.iter().map(|a| a.states.len()).product()
    }

    pub fn config_index(&self, locals: &[usize]) -> usize {
        locals
            .iter()
            .zip(&self.agents)
            .fold(0, |acc, (&l, a)| acc * a.states.len() + l)
    }

    pub fn locals_of(&self, mut g: usize) -> Vec<usize> {
        let mut out = vec![0; self.agents.len()];
        for (slot, a) in out.iter_mut().zip(&self.agents).rev() {
            *slot = g % a.states.len();
            g /= a.states.len();
        }
        out
    }

    /// Display name: the first alias, else the local-state tuple.
    pub fn config_name(&self, g: usize) -> String {
        let locals = self.locals_of(g);
        if let Some((name, _)) = self.aliases.iter().find(|(_, l)| *l == locals) {
            return name.clone();
        }
        let parts: Vec<&str> = locals
            .iter()
            .zip(&self.agents)
            .map(|(&l, a)| a.states[l].as_str())
            .collect();
        format!("({})", parts.join(","))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.agents.is_empty() {
            r.errors.push("a system needs at least one agent".into());
            return r;
        }
        let m = self.agents.len();
        for (i, a) in self.agents.iter().enumerate() {
            let who = format!("agent {i} ({})", a.name);
            if self.agents[..i].iter().any(|b| b.name == a.name) {
                r.errors.push(format!("{who}: duplicate agent name"));
            }
            if a.states.is_empty() {
                r.errors.push(format!("{who}: no local states"));
                continue;
            }
            let n = a.states.len();
            for (j, s) in a.states.iter().enumerate() {
                if a.states[..j].contains(s) {
                    r.errors.push(format!("{who}: duplicate state `{s}`"));
                }
            }
            for (j, s) in a.actions.iter().enumerate() {
                if a.actions[..j].contains(s) {
                    r.errors.push(format!("{who}: duplicate action `{s}`"));
                }
            }
            if a.init >= n {
                r.errors.push(format!("{who}: initial state out of range"));
            }
            if a.protocol.len() != n {
                r.errors.push(format!(
                    "{who}: protocol must list one action set per state"
                ));
            } else {
                for (l, acts) in a.protocol.iter().enumerate() {
                    if acts.iter().any(|&x| x >= a.actions.len()) {
                        r.errors.push(format!(
                            "{who}: protocol of `{}` uses an unknown action",
                            a.states[l]
                        ));
                    }
                    if acts.is_empty() {
                        r.warnings.push(format!(
                            "{who}: local state `{}` has no permitted action; no joint step leaves configurations containing it",
                            a.states[l]
                        ));
                    }
                }
            }
            for t in &a.transitions {
                if t.from >= n || t.to >= n {
                    r.errors
                        .push(format!("{who}: transition endpoint out of range"));
                }
                if t.pattern.len() != m {
                    r.errors.push(format!(
                        "{who}: joint-action pattern has {} slots, expected {m}",
                        t.pattern.len()
                    ));
                    continue;
                }
                for (k, slot) in t.pattern.iter().enumerate() {
                    if let Some(x) = slot {
                        if self.agents[k].actions.len() <= *x {
                            r.errors
                                .push(format!("{who}: pattern slot {k} names an unknown action"));
                        }
                    }
                }
            }
        }
        if !r.errors.is_empty() {
            return r;
        }
        let total = self.num_configs();
        for (j, (name, locals)) in self.aliases.iter().enumerate() {
            if self.aliases[..j].iter().any(|(n, _)| n == name) {
                r.errors
                    .push(format!("duplicate configuration alias `{name}`"));
            }
            if locals.len() != m
                || locals
                    .iter()
                    .zip(&self.agents)
                    .any(|(&l, a)| l >= a.states.len())
            {
                r.errors
                    .push(format!("alias `{name}` is not a configuration"));
            }
        }
        for (j, (name, expr)) in self.labels.iter().enumerate() {
            if self.labels[..j].iter().any(|(n, _)| n == name) {
                r.errors.push(format!("variable `{name}` labelled twice"));
            }
            if expr.symbols().into_iter().any(|&g| g >= total) {
                r.errors
                    .push(format!("label of `{name}` mentions a non-configuration"));
            }
            if expr.nullable() {
                r.warnings.push(format!(
                    "label of `{name}` accepts the empty word, which no interval has"
                ));
            }
        }
        r
    }

    /// Two-agent system whose global transition relation is exactly `edges`
    /// over configurations `s0..s{n-1}`.
    ///
    /// Agent 0 has one local state and chooses the next configuration;
    /// agent 1's local state is the configuration itself.
    pub fn from_graph(
        n: usize,
        edges: &[(usize, usize)],
        init: usize,
        labels: Vec<(String, Regex<usize>)>,
    ) -> SystemDef {
        let env = AgentDef {
            name: "env".into(),
            states: vec!["e".into()],
            init: 0,
            actions: (0..n).map(|j| format!("go{j}")).collect(),
            protocol: vec![(0..n).collect()],
            transitions: vec![Transition {
                from: 0,
                pattern: vec![None, None],
                to: 0,
            }],
        };
        let proc = AgentDef {
            name: "proc".into(),
            states: (0..n).map(|j| format!("c{j}")).collect(),
            init,
            actions: vec!["idle".into()],
            protocol: vec![vec![0]; n],
            transitions: edges
                .iter()
                .map(|&(u, v)| Transition {
                    from: u,
                    pattern: vec![Some(v), None],
                    to: v,
                })
                .collect(),
        };
        SystemDef {
            agents: vec![env, proc],
            aliases: (0..n).map(|j| (format!("s{j}"), vec![0, j])).collect(),
            labels,
        }
    }
}

/// A non-empty configuration sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval(Vec<usize>);

impl Interval {
    /// # Panics
    ///
    /// If `configs` is empty.
    pub fn new(configs: Vec<usize>) -> Self {
        assert!(!configs.is_empty(), "intervals are non-empty");
        Interval(configs)
    }

    pub fn point(g: usize) -> Self {
        Interval(vec![g])
    }

    pub fn configs(&self) -> &[usize] {
        &self.0
    }

    pub fn into_configs(self) -> Vec<usize> {
        self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    pub fn is_point(&self) -> bool {
        self.0.len() == 1
    }
}

/// An interval together with the path that led to it from the initial
/// configuration (excluding the interval's first configuration).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnchoredInterval {
    pub history: Vec<usize>,
    pub interval: Interval,
}

impl AnchoredInterval {
    pub fn total_len(&self) -> usize {
        self.history.len() + self.interval.len()
    }

    /// The full run from the initial configuration.
    pub fn run(&self) -> Vec<usize> {
        let mut r = self.history.clone();
        r.extend_from_slice(self.interval.configs());
        r
    }
}

#[derive(Debug, Clone)]
pub struct InterpretedSystem {
    def: SystemDef,
    names: Vec<String>,
    alphabet: Alphabet,
    succ: Vec<Vec<usize>>,
    initial: usize,
    reachable: Vec<bool>,
    // shortest path from the initial configuration, excluding the target
    history: Vec<Option<Vec<usize>>>,
    dfas: Vec<Dfa>,
    local_table: Vec<Vec<usize>>,
    warnings: Vec<String>,
}

impl InterpretedSystem {
    pub fn new(def: SystemDef) -> Result<Self, SystemError> {
        let report = def.validate();
        if !report.is_valid() {
            return Err(SystemError::Invalid(report.errors));
        }
        let total = def.num_configs();
        let names: Vec<String> = (0..total).map(|g| def.config_name(g)).collect();
        let alphabet = Alphabet::new(disambiguate(&names))
            .map_err(|e| SystemError::Invalid(vec![e.to_string()]))?;

        let succ: Vec<Vec<usize>> = (0..total).map(|g| global_successors(&def, g)).collect();
        let initial = def.config_index(&def.agents.iter().map(|a| a.init).collect::<Vec<_>>());

        let mut history: Vec<Option<Vec<usize>>> = vec![None; total];
        history[initial] = Some(Vec::new());
        let mut queue = VecDeque::from([initial]);
        while let Some(g) = queue.pop_front() {
            for &h in &succ[g] {
                if history[h].is_none() {
                    let mut path = history[g].clone().expect("visited");
                    path.push(g);
                    history[h] = Some(path);
                    queue.push_back(h);
                }
            }
        }
        let reachable = history.iter().map(Option::is_some).collect();
        let dfas = def
            .labels
            .iter()
            .map(|(_, e)| compile(e, &alphabet))
            .collect();
        let local_table = (0..total).map(|g| def.locals_of(g)).collect();
        Ok(InterpretedSystem {
            def,
            names,
            alphabet,
            succ,
            initial,
            reachable,
            history,
            dfas,
            local_table,
            warnings: report.warnings,
        })
    }

    pub fn def(&self) -> &SystemDef {
        &self.def
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn num_agents(&self) -> usize {
        self.def.agents.len()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.def.agents.iter().position(|a| a.name == name)
    }

    pub fn num_configs(&self) -> usize {
        self.names.len()
    }

    pub fn config_name(&self, g: usize) -> &str {
        &self.names[g]
    }

    /// Resolves an alias or a local-state tuple such as `(l0,l1)`.
    pub fn config_index(&self, name: &str) -> Option<usize> {
        if let Some(g) = self.names.iter().position(|n| n == name) {
            return Some(g);
        }
        if let Some((_, locals)) = self.def.aliases.iter().find(|(n, _)| n == name) {
            return Some(self.def.config_index(locals));
        }
        let inner = name.trim().strip_prefix('(')?.strip_suffix(')')?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != self.num_agents() {
            return None;
        }
        let locals = parts
            .iter()
            .zip(&self.def.agents)
            .map(|(p, a)| a.states.iter().position(|s| s == p))
            .collect::<Option<Vec<_>>>()?;
        Some(self.def.config_index(&locals))
    }

    pub fn local(&self, g: usize, agent: usize) -> usize {
        self.local_table[g][agent]
    }

    pub fn locals(&self, g: usize) -> &[usize] {
        &self.local_table[g]
    }

    pub fn initial_config(&self) -> usize {
        self.initial
    }

    pub fn successors(&self, g: usize) -> &[usize] {
        &self.succ[g]
    }

    pub fn global_step(&self, g: usize, h: usize) -> bool {
        self.succ[g].binary_search(&h).is_ok()
    }

    /// All pairs of the global transition relation, over every configuration.
    pub fn transition_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.num_configs())
            .flat_map(|g| self.succ[g].iter().map(move |&h| (g, h)))
            .collect()
    }

    pub fn is_reachable(&self, g: usize) -> bool {
        self.reachable[g]
    }

    pub fn reachable_configs(&self) -> Vec<usize> {
        (0..self.num_configs())
            .filter(|&g| self.reachable[g])
            .collect()
    }

    /// Shortest run prefix from the initial configuration up to (excluding) `g`.
    pub fn canonical_history(&self, g: usize) -> Option<&[usize]> {
        self.history[g].as_deref()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_vars(&self) -> usize {
        self.def.labels.len()
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.def.labels[v].0
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.def.labels.iter().position(|(n, _)| n == name)
    }

    pub fn label(&self, v: usize) -> &Regex<usize> {
        &self.def.labels[v].1
    }

    pub fn dfa(&self, v: usize) -> &Dfa {
        &self.dfas[v]
    }

    pub fn dfas(&self) -> &[Dfa] {
        &self.dfas
    }

    pub fn label_holds(&self, v: usize, interval: &Interval) -> bool {
        self.dfas[v].accepts(interval.configs())
    }

    pub fn label_holds_by_name(&self, var: &str, interval: &Interval) -> Result<bool, SystemError> {
        let v = self
            .var_index(var)
            .ok_or_else(|| SystemError::UnknownVariable(var.to_string()))?;
        Ok(self.label_holds(v, interval))
    }

    /// Variables whose label contains the one-letter word `g`.
    pub fn valuation(&self, g: usize) -> Vec<bool> {
        self.dfas.iter().map(|d| d.accepts(&[g])).collect()
    }

    pub fn shape(&self, v: usize) -> LanguageShape {
        self.dfas[v].language_shape()
    }

    pub fn is_point_based(&self) -> bool {
        (0..self.num_vars()).all(|v| self.shape(v) == LanguageShape::PointBased)
    }

    /// Checks that `configs` is a path with a reachable start.
    pub fn interval(&self, configs: Vec<usize>) -> Result<Interval, SystemError> {
        if configs.is_empty() {
            return Err(SystemError::InvalidInterval("empty".into()));
        }
        if let Some(&g) = configs.iter().find(|&&g| g >= self.num_configs()) {
            return Err(SystemError::InvalidInterval(format!(
                "no configuration {g}"
            )));
        }
        if !self.reachable[configs[0]] {
            return Err(SystemError::InvalidInterval(format!(
                "{} is not reachable",
                self.names[configs[0]]
            )));
        }
        for w in configs.windows(2) {
            if !self.global_step(w[0], w[1]) {
                return Err(SystemError::InvalidInterval(format!(
                    "no transition {} -> {}",
                    self.names[w[0]], self.names[w[1]]
                )));
            }
        }
        Ok(Interval(configs))
    }

    pub fn interval_by_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Interval, SystemError> {
        let configs = names
            .iter()
            .map(|n| {
                self.config_index(n.as_ref())
                    .ok_or_else(|| SystemError::UnknownConfig(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.interval(configs)
    }

    pub fn format_interval(&self, interval: &Interval) -> String {
        interval
            .configs()
            .iter()
            .map(|&g| self.names[g].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Graphviz rendering of the reachable part of the transition relation.
    pub fn tg_to_dot(&self) -> String {
        let mut out = String::from("digraph tg {\n  __start [shape=point];\n");
        let _ = writeln!(out, "  __start -> g{};", self.initial);
        for g in self.reachable_configs() {
            let _ = writeln!(out, "  g{g} [label=\"{}\"];", escape(&self.names[g]));
        }
        for g in self.reachable_configs() {
            for &h in &self.succ[g] {
                let _ = writeln!(out, "  g{g} -> g{h};");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| format!("g{g}")).collect();
        f.write_str(&parts.join(" "))
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

// Aliases can shadow tuple names in principle; suffix clashes to keep the
// alphabet duplicate-free.
fn disambiguate(names: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(names.len());
    for n in names {
        let mut candidate = n.clone();
        let mut k = 1;
        while out.contains(&candidate) {
            candidate = format!("{n}#{k}");
            k += 1;
        }
        out.push(candidate);
    }
    out
}

fn global_successors(def: &SystemDef, g: usize) -> Vec<usize> {
    let locals = def.locals_of(g);
    let m = def.agents.len();
    let mut found = std::collections::BTreeSet::new();
    let protocols: Vec<&Vec<usize>> = def
        .agents
        .iter()
        .zip(&locals)
        .map(|(a, &l)| &a.protocol[l])
        .collect();
    if protocols.iter().any(|p| p.is_empty()) {
        return Vec::new();
    }
    // odometer over joint actions permitted by every protocol
    let mut choice = vec![0usize; m];
    loop {
        let joint: Vec<usize> = (0..m).map(|i| protocols[i][choice[i]]).collect();
        let targets: Vec<Vec<usize>> = def
            .agents
            .iter()
            .zip(&locals)
            .map(|(a, &l)| {
                let mut ts: Vec<usize> = a
                    .transitions
                    .iter()
                    .filter(|t| {
                        t.from == l
                            && t.pattern
                                .iter()
                                .zip(&joint)
                                .all(|(slot, &x)| slot.is_none_or(|s| s == x))
                    })
                    .map(|t| t.to)
                    .collect();
                ts.sort_unstable();
                ts.dedup();
                ts
            })
            .collect();
        if targets.iter().all(|t| !t.is_empty()) {
            let mut pick = vec![0usize; m];
            loop {
                let next: Vec<usize> = (0..m).map(|i| targets[i][pick[i]]).collect();
                found.insert(def.config_index(&next));
                if !advance(&mut pick, |i| targets[i].len()) {
                    break;
                }
            }
        }
        if !advance(&mut choice, |i| protocols[i].len()) {
            break;
        }
    }
    found.into_iter().collect()
}

fn advance(counter: &mut [usize], limit: impl Fn(usize) -> usize) -> bool {
    for i in (0..counter.len()).rev() {
        counter[i] += 1;
        if counter[i] < limit(i) {
            return true;
        }
        counter[i] = 0;
    }
    false
}
