//! Horizon-truncated modal context trees.
//!
//! The root records an interval's endpoints, pointhood and the state of every
//! labelling automaton after reading it. For each top-level modal
//! subformula there is one child set: the trees of all related intervals
//! (with respect to that subformula's operand), deduplicated and sorted.
//! Temporal successors are explored up to `horizon`: length at most
//! `horizon` for A and N, at most `horizon` added configurations for B̄.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::prepare;
use crate::formula::{AgentRef, Formula, FormulaPlus, ModalOp, Modality};
use crate::system::{
    allen_successors, common_class, epi_class, InterpretedSystem, Interval, Relation,
};
use crate::verdict::CheckError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MctLabel {
    pub first: usize,
    pub last: usize,
    pub point: bool,
    /// Automaton state per system variable.
    pub states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mct {
    pub label: MctLabel,
    /// One sorted, duplicate-free set per top-level subformula, in order.
    pub children: Vec<Vec<Mct>>,
}

impl Mct {
    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .flatten()
            .map(Mct::node_count)
            .sum::<usize>()
    }
}

// The formula's top-level structure, unfolded once.
struct Shape {
    id: usize,
    ops: Vec<(ModalOp, Shape)>,
}

fn shape(f: &Formula<usize>, next: &mut usize) -> Shape {
    let id = *next;
    *next += 1;
    let ops = f
        .top_level_subformulas()
        .into_iter()
        .map(|(op, x)| (op, shape(&x, next)))
        .collect();
    Shape { id, ops }
}

fn agent(a: &AgentRef) -> usize {
    match a {
        AgentRef::Index(i) => *i,
        AgentRef::Name(n) => unreachable!("agent `{n}` not resolved"),
    }
}

struct Builder<'a> {
    sys: &'a InterpretedSystem,
    horizon: usize,
    memo: HashMap<(usize, Vec<usize>), Mct>,
}

impl Builder<'_> {
    fn related(&self, i: &Interval, op: &ModalOp) -> Vec<Interval> {
        let h = self.horizon;
        match op {
            ModalOp::Know(a) => epi_class(self.sys, i, agent(a)),
            ModalOp::Common(g) => {
                let group: Vec<usize> = g.iter().map(agent).collect();
                common_class(self.sys, i, &group)
            }
            ModalOp::Diamond(Modality::A) => {
                allen_successors(self.sys, i, Relation::A, Some(h)).expect("bounded")
            }
            ModalOp::Diamond(Modality::N) => {
                allen_successors(self.sys, i, Relation::N, Some(h)).expect("bounded")
            }
            ModalOp::Diamond(Modality::Bbar) => {
                allen_successors(self.sys, i, Relation::Bbar, Some(i.len() + h)).expect("bounded")
            }
            ModalOp::Diamond(m) => unreachable!("<{m}> outside the fragment"),
        }
    }

    fn build(&mut self, s: &Shape, i: &Interval) -> Mct {
        let k = (s.id, i.configs().to_vec());
        if let Some(t) = self.memo.get(&k) {
            return t.clone();
        }
        let label = MctLabel {
            first: i.first(),
            last: i.last(),
            point: i.is_point(),
            states: self.sys.dfas().iter().map(|d| d.run(i.configs())).collect(),
        };
        let children = s
            .ops
            .iter()
            .map(|(op, sub)| {
                let mut set: Vec<Mct> = self
                    .related(i, op)
                    .iter()
                    .map(|j| self.build(sub, j))
                    .collect();
                set.sort();
                set.dedup();
                set
            })
            .collect();
        let t = Mct { label, children };
        self.memo.insert(k, t.clone());
        t
    }
}

/// The tree of `I` for `f` (after `<L>` elimination), truncated at `horizon`.
pub fn compute_mct(
    sys: &InterpretedSystem,
    interval: &Interval,
    f: &FormulaPlus,
    horizon: usize,
) -> Result<Mct, CheckError> {
    if horizon == 0 {
        return Err(CheckError::Bound("the horizon must be positive".into()));
    }
    let bound = prepare(sys, f)?;
    let interval = sys.interval(interval.configs().to_vec())?;
    let s = shape(&bound, &mut 0);
    let mut b = Builder {
        sys,
        horizon,
        memo: HashMap::new(),
    };
    Ok(b.build(&s, &interval))
}

/// Graphviz rendering; edges carry the modal operator they belong to.
pub fn mct_to_dot(
    sys: &InterpretedSystem,
    tree: &Mct,
    f: &FormulaPlus,
) -> Result<String, CheckError> {
    let bound = prepare(sys, f)?;
    let s = shape(&bound, &mut 0);
    let mut out = String::from("digraph mct {\n  node [shape=box];\n");
    let mut next = 0usize;
    write_node(sys, tree, &s, &mut next, &mut out);
    out.push_str("}\n");
    Ok(out)
}

fn write_node(
    sys: &InterpretedSystem,
    t: &Mct,
    s: &Shape,
    next: &mut usize,
    out: &mut String,
) -> usize {
    let id = *next;
    *next += 1;
    let states: Vec<String> = t
        .label
        .states
        .iter()
        .enumerate()
        .map(|(v, q)| format!("{}:z{q}", sys.var_name(v)))
        .collect();
    let _ = writeln!(
        out,
        "  n{id} [label=\"{}, {}, {}, {{{}}}\"];",
        sys.config_name(t.label.first),
        sys.config_name(t.label.last),
        if t.label.point { "T" } else { "F" },
        states.join(", ")
    );
    for ((op, sub), set) in s.ops.iter().zip(&t.children) {
        for child in set {
            let c = write_node(sys, child, sub, next, out);
            let _ = writeln!(out, "  n{id} -> n{c} [label=\"{op}\"];");
        }
    }
    id
}
