//! Exact search for intervals satisfying a modal-free formula.
//!
//! Whether such a formula holds at an interval depends only on its last
//! configuration's DFA states and on whether it is a point, so breadth-first
//! search over (configuration, DFA states, point flag) is complete.

use std::collections::{HashMap, VecDeque};

use crate::formula::{Formula, FormulaPlus};
use crate::system::{InterpretedSystem, Interval};
use crate::verdict::CheckError;

/// Where a witness interval must start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessStart {
    /// First configuration is exactly this one.
    At(usize),
    /// First configuration is any of these.
    In(Vec<usize>),
    /// The witness is a proper extension of this interval.
    Extends(Interval),
}

/// Evaluates a modal-free formula given atom values and pointhood.
pub(crate) fn eval_modal_free(
    f: &Formula<usize>,
    atom: &impl Fn(usize) -> bool,
    point: bool,
) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Pi => point,
        Formula::Atom(v) => atom(*v),
        Formula::Not(x) => !eval_modal_free(x, atom, point),
        Formula::And(l, r) => eval_modal_free(l, atom, point) && eval_modal_free(r, atom, point),
        Formula::Or(l, r) => eval_modal_free(l, atom, point) || eval_modal_free(r, atom, point),
        Formula::Implies(l, r) => {
            !eval_modal_free(l, atom, point) || eval_modal_free(r, atom, point)
        }
        _ => panic!("modal operator in a modal-free formula"),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Node {
    g: usize,
    states: Vec<usize>,
    point: bool,
}

/// Shortest witness for a bound, modal-free operand.
pub(crate) fn search(
    sys: &InterpretedSystem,
    start: &WitnessStart,
    operand: &Formula<usize>,
) -> Option<Interval> {
    let mut vars: Vec<usize> = operand.atoms().into_iter().copied().collect();
    vars.sort_unstable();
    vars.dedup();
    let slot = |v: usize| vars.binary_search(&v).expect("atom collected");
    let step = |states: &[usize], g: usize| -> Vec<usize> {
        vars.iter()
            .zip(states)
            .map(|(&v, &q)| sys.dfa(v).step(q, g))
            .collect()
    };
    let accepts = |n: &Node| {
        eval_modal_free(
            operand,
            &|v| sys.dfa(v).is_accepting(n.states[slot(v)]),
            n.point,
        )
    };
    let initial: Vec<usize> = vars.iter().map(|&v| sys.dfa(v).initial()).collect();

    let mut prefix: Vec<usize> = Vec::new();
    let mut seeds: Vec<Node> = Vec::new();
    match start {
        WitnessStart::At(g) => seeds.push(Node {
            g: *g,
            states: step(&initial, *g),
            point: true,
        }),
        WitnessStart::In(gs) => seeds.extend(gs.iter().map(|&g| Node {
            g,
            states: step(&initial, g),
            point: true,
        })),
        WitnessStart::Extends(i) => {
            prefix = i.configs().to_vec();
            let states = i
                .configs()
                .iter()
                .fold(initial.clone(), |s, &g| step(&s, g));
            seeds.extend(sys.successors(i.last()).iter().map(|&h| Node {
                g: h,
                states: step(&states, h),
                point: false,
            }));
        }
    }

    let mut parent: HashMap<Node, Option<Node>> = HashMap::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if !parent.contains_key(&s) {
            parent.insert(s.clone(), None);
            queue.push_back(s);
        }
    }
    while let Some(n) = queue.pop_front() {
        if accepts(&n) {
            let mut tail = vec![n.g];
            let mut cur = parent[&n].clone();
            while let Some(p) = cur {
                tail.push(p.g);
                cur = parent[&p].clone();
            }
            tail.reverse();
            prefix.extend(tail);
            return Some(Interval::new(prefix));
        }
        for &h in sys.successors(n.g) {
            let next = Node {
                g: h,
                states: step(&n.states, h),
                point: false,
            };
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some(n.clone()));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Shortest interval satisfying the modal-free `operand` under `start`.
pub fn regular_witness_search(
    sys: &InterpretedSystem,
    start: &WitnessStart,
    operand: &FormulaPlus,
) -> Result<Option<Interval>, CheckError> {
    if !operand.is_modal_free() {
        return Err(CheckError::Fragment(format!(
            "`{operand}` is not modal-free"
        )));
    }
    let bound = operand.bind(sys)?;
    Ok(search(sys, start, &bound))
}
