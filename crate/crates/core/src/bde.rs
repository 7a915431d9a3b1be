//! Decision procedure for formulas using only B, D and E.
//!
//! Every relation involved shrinks the interval, so the recursion only ever
//! visits intervals no longer than the input one. Universal choices (K, C,
//! boxes) become conjunctions over the finite class; existential ones
//! (diamonds) become disjunctions.

use std::collections::HashMap;
use std::fmt;

use crate::formula::{Formula, FormulaPlus, Fragment};
use crate::system::{allen_successors, common_class, epi_class, InterpretedSystem, Interval};
use crate::verdict::CheckError;

#[derive(Debug, Clone, Copy, Default)]
pub struct BdeOptions {
    /// Memoize verdicts per (interval, subformula).
    pub cache: bool,
    /// Build an explanation tree for the verdict.
    pub trace: bool,
}

#[derive(Debug, Clone)]
pub struct BdeReport {
    pub holds: bool,
    /// Longest interval the evaluation looked at.
    pub max_visited_len: usize,
    /// Number of (interval, subformula) evaluations.
    pub evaluations: usize,
    pub trace: Option<TraceNode>,
}

/// One step of an explanation: a subformula at an interval and why it got
/// its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceNode {
    pub formula: String,
    pub interval: String,
    pub holds: bool,
    pub note: String,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    fn write(&self, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:indent$}{} at [{}]: {}{}",
            "",
            self.formula,
            self.interval,
            if self.holds { "true" } else { "false" },
            if self.note.is_empty() {
                String::new()
            } else {
                format!(" ({})", self.note)
            },
            indent = depth * 2
        )?;
        self.children.iter().try_for_each(|c| c.write(depth + 1, f))
    }
}

impl fmt::Display for TraceNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(0, f)
    }
}

struct Evaluator<'a> {
    sys: &'a InterpretedSystem,
    cache: Option<HashMap<(usize, Vec<usize>), bool>>,
    max_len: usize,
    evaluations: usize,
}

fn key(f: &Formula<usize>) -> usize {
    f as *const Formula<usize> as usize
}

impl Evaluator<'_> {
    fn related(&self, i: &Interval, f: &Formula<usize>) -> Vec<Interval> {
        match f {
            Formula::Know(a, _) => epi_class(self.sys, i, agent(a)),
            Formula::Common(g, _) => {
                let group: Vec<usize> = g.iter().map(agent).collect();
                common_class(self.sys, i, &group)
            }
            Formula::Diamond(m, _) | Formula::Square(m, _) => {
                let rel = m.relation().expect("fragment checked");
                allen_successors(self.sys, i, rel, None).expect("bounded relation")
            }
            _ => unreachable!("not a modal node"),
        }
    }

    fn eval(&mut self, i: &Interval, f: &Formula<usize>) -> bool {
        self.max_len = self.max_len.max(i.len());
        if let Some(c) = &self.cache {
            if let Some(&v) = c.get(&(key(f), i.configs().to_vec())) {
                return v;
            }
        }
        self.evaluations += 1;
        let v = match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Pi => i.is_point(),
            Formula::Atom(v) => self.sys.label_holds(*v, i),
            Formula::Not(x) => !self.eval(i, x),
            Formula::And(l, r) => self.eval(i, l) && self.eval(i, r),
            Formula::Or(l, r) => self.eval(i, l) || self.eval(i, r),
            Formula::Implies(l, r) => !self.eval(i, l) || self.eval(i, r),
            Formula::Diamond(_, x) => {
                let js = self.related(i, f);
                js.iter().any(|j| self.eval(j, x))
            }
            Formula::Know(_, x) | Formula::Common(_, x) | Formula::Square(_, x) => {
                let js = self.related(i, f);
                js.iter().all(|j| self.eval(j, x))
            }
        };
        if let Some(c) = &mut self.cache {
            c.insert((key(f), i.configs().to_vec()), v);
        }
        v
    }

    fn explain(&mut self, i: &Interval, f: &Formula<usize>) -> TraceNode {
        let holds = self.eval(i, f);
        let mut note = String::new();
        let children = match f {
            Formula::Not(x) => vec![self.explain(i, x)],
            Formula::And(l, r) | Formula::Or(l, r) => {
                let is_and = matches!(f, Formula::And(..));
                let lv = self.eval(i, l);
                // the left operand alone decides
                if lv != is_and {
                    vec![self.explain(i, l)]
                } else {
                    vec![self.explain(i, l), self.explain(i, r)]
                }
            }
            Formula::Implies(l, r) => {
                if !self.eval(i, l) {
                    vec![self.explain(i, l)]
                } else {
                    vec![self.explain(i, l), self.explain(i, r)]
                }
            }
            Formula::Diamond(_, x) => {
                let js = self.related(i, f);
                match js.iter().find(|j| self.eval(j, x)) {
                    Some(j) => {
                        note = "witness".into();
                        vec![self.explain(j, x)]
                    }
                    None => {
                        note = format!("all {} candidates fail", js.len());
                        js.iter().map(|j| self.explain(j, x)).collect()
                    }
                }
            }
            Formula::Know(_, x) | Formula::Common(_, x) | Formula::Square(_, x) => {
                let js = self.related(i, f);
                match js.iter().find(|j| !self.eval(j, x)) {
                    Some(j) => {
                        note = "counterexample".into();
                        vec![self.explain(j, x)]
                    }
                    None => {
                        note = format!("all {} alternatives hold", js.len());
                        Vec::new()
                    }
                }
            }
            _ => Vec::new(),
        };
        TraceNode {
            formula: display(self.sys, f),
            interval: self.sys.format_interval(i),
            holds,
            note,
            children,
        }
    }
}

fn agent(a: &crate::formula::AgentRef) -> usize {
    match a {
        crate::formula::AgentRef::Index(i) => *i,
        crate::formula::AgentRef::Name(n) => unreachable!("agent `{n}` not resolved"),
    }
}

pub(crate) fn display(sys: &InterpretedSystem, f: &Formula<usize>) -> String {
    f.map_atoms(&mut |v: &usize| sys.var_name(*v).to_string())
        .to_string()
}

/// Whether `I ⊨ f`; `f` must use only B, D, E as temporal modalities.
pub fn check_bde(
    sys: &InterpretedSystem,
    interval: &Interval,
    f: &FormulaPlus,
) -> Result<bool, CheckError> {
    check_bde_with(sys, interval, f, BdeOptions::default()).map(|r| r.holds)
}

pub fn check_bde_with(
    sys: &InterpretedSystem,
    interval: &Interval,
    f: &FormulaPlus,
    options: BdeOptions,
) -> Result<BdeReport, CheckError> {
    if f.fragment() != Fragment::Bde {
        return Err(CheckError::Fragment(format!(
            "`{f}` uses modalities outside B, D, E"
        )));
    }
    let bound = f.bind(sys)?;
    let interval = sys.interval(interval.configs().to_vec())?;
    let mut ev = Evaluator {
        sys,
        cache: options.cache.then(HashMap::new),
        max_len: 0,
        evaluations: 0,
    };
    let holds = ev.eval(&interval, &bound);
    let trace = options.trace.then(|| ev.explain(&interval, &bound));
    Ok(BdeReport {
        holds,
        max_visited_len: ev.max_len,
        evaluations: ev.evaluations,
        trace,
    })
}
