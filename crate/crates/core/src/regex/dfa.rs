//! Thompson construction, subset construction, sink completion and Hopcroft
//! minimization.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use super::{Alphabet, Regex};

/// Complete minimal deterministic automaton.
///
/// States are numbered breadth-first from the initial state (state 0),
/// following symbols in alphabet order, so equal languages always produce
/// identical automata.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet: Alphabet,
    // trans[state][symbol]
    trans: Vec<Vec<usize>>,
    accepting: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LanguageShape {
    /// Every accepted word has length one.
    PointBased,
    /// Membership depends only on the first symbol, the last symbol and
    /// whether the word has length one.
    EndpointBased,
    General,
}

impl std::fmt::Display for LanguageShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LanguageShape::PointBased => "point-based",
            LanguageShape::EndpointBased => "endpoint-based",
            LanguageShape::General => "general",
        })
    }
}

struct Nfa {
    // per state: (symbol or None for epsilon, target)
    edges: Vec<Vec<(Option<usize>, usize)>>,
}

impl Nfa {
    fn add_state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    // Returns (start, accept) of the fragment for `e`.
    fn build(&mut self, e: &Regex<usize>) -> (usize, usize) {
        match e {
            Regex::Empty => (self.add_state(), self.add_state()),
            Regex::Epsilon => {
                let (s, a) = (self.add_state(), self.add_state());
                self.edges[s].push((None, a));
                (s, a)
            }
            Regex::Symbol(x) => {
                let (s, a) = (self.add_state(), self.add_state());
                self.edges[s].push((Some(*x), a));
                (s, a)
            }
            Regex::Concat(l, r) => {
                let (ls, la) = self.build(l);
                let (rs, ra) = self.build(r);
                self.edges[la].push((None, rs));
                (ls, ra)
            }
            Regex::Union(l, r) => {
                let s = self.add_state();
                let (ls, la) = self.build(l);
                let (rs, ra) = self.build(r);
                let a = self.add_state();
                self.edges[s].push((None, ls));
                self.edges[s].push((None, rs));
                self.edges[la].push((None, a));
                self.edges[ra].push((None, a));
                (s, a)
            }
            Regex::Star(inner) => {
                let s = self.add_state();
                let (is, ia) = self.build(inner);
                let a = self.add_state();
                self.edges[s].push((None, is));
                self.edges[s].push((None, a));
                self.edges[ia].push((None, is));
                self.edges[ia].push((None, a));
                (s, a)
            }
        }
    }

    fn closure(&self, seed: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        let mut stack: Vec<usize> = seed.into_iter().collect();
        while let Some(q) = stack.pop() {
            if set.insert(q) {
                for &(label, to) in &self.edges[q] {
                    if label.is_none() && !set.contains(&to) {
                        stack.push(to);
                    }
                }
            }
        }
        set
    }
}

/// Compiles `expr` (letters are positions in `alphabet`) to its complete
/// minimal DFA.
///
/// # Panics
///
/// If `expr` mentions a symbol outside the alphabet.
pub fn compile(expr: &Regex<usize>, alphabet: &Alphabet) -> Dfa {
    let k = alphabet.len();
    assert!(
        expr.symbols().into_iter().all(|&s| s < k),
        "expression uses a symbol outside its alphabet"
    );
    let mut nfa = Nfa { edges: Vec::new() };
    let (start, accept) = nfa.build(expr);

    // Subset construction; missing transitions stay `None` until completion.
    let init = nfa.closure([start]);
    let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut sets = vec![init.clone()];
    ids.insert(init, 0);
    let mut partial: Vec<Vec<Option<usize>>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut row = vec![None; k];
        for (sym, slot) in row.iter_mut().enumerate() {
            let moved: Vec<usize> = sets[i]
                .iter()
                .flat_map(|&q| nfa.edges[q].iter())
                .filter(|(l, _)| *l == Some(sym))
                .map(|&(_, t)| t)
                .collect();
            if moved.is_empty() {
                continue;
            }
            let target = nfa.closure(moved);
            let id = *ids.entry(target.clone()).or_insert_with(|| {
                sets.push(target);
                sets.len() - 1
            });
            *slot = Some(id);
        }
        partial.push(row);
        i += 1;
    }
    let mut accepting: Vec<bool> = sets.iter().map(|s| s.contains(&accept)).collect();

    // Completion with an explicit rejecting sink.
    let needs_sink = partial.iter().any(|row| row.iter().any(Option::is_none));
    let sink = partial.len();
    let mut trans: Vec<Vec<usize>> = partial
        .into_iter()
        .map(|row| row.into_iter().map(|t| t.unwrap_or(sink)).collect())
        .collect();
    if needs_sink {
        trans.push(vec![sink; k]);
        accepting.push(false);
    }

    let (trans, accepting) = hopcroft(&trans, &accepting, k);
    canonical(alphabet.clone(), &trans, &accepting)
}

// Returns the quotient automaton (state 0 is the class of state 0).
fn hopcroft(trans: &[Vec<usize>], accepting: &[bool], k: usize) -> (Vec<Vec<usize>>, Vec<bool>) {
    let n = trans.len();
    let mut inverse = vec![vec![Vec::new(); n]; k];
    for (s, row) in trans.iter().enumerate() {
        for (a, &t) in row.iter().enumerate() {
            inverse[a][t].push(s);
        }
    }

    let (finals, others): (Vec<usize>, Vec<usize>) = (0..n).partition(|&s| accepting[s]);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![0usize; n];
    for b in [finals, others] {
        if !b.is_empty() {
            for &s in &b {
                block_of[s] = blocks.len();
            }
            blocks.push(b);
        }
    }
    let mut work: Vec<usize> = if blocks.len() == 2 {
        if blocks[0].len() <= blocks[1].len() {
            vec![0]
        } else {
            vec![1]
        }
    } else {
        Vec::new()
    };
    let mut in_work = vec![false; blocks.len()];
    for &w in &work {
        in_work[w] = true;
    }

    while let Some(splitter) = work.pop() {
        in_work[splitter] = false;
        let members = blocks[splitter].clone();
        for inv in &inverse {
            let mut hit = vec![false; n];
            let mut touched: BTreeSet<usize> = BTreeSet::new();
            for &t in &members {
                for &s in &inv[t] {
                    if !hit[s] {
                        hit[s] = true;
                        touched.insert(block_of[s]);
                    }
                }
            }
            for y in touched {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    blocks[y].iter().partition(|&&s| hit[s]);
                if inside.is_empty() || outside.is_empty() {
                    continue;
                }
                let new_id = blocks.len();
                let (keep, moved) = if inside.len() <= outside.len() {
                    (outside, inside)
                } else {
                    (inside, outside)
                };
                for &s in &moved {
                    block_of[s] = new_id;
                }
                blocks[y] = keep;
                blocks.push(moved);
                // y keeps its worklist status; the smaller half is always enough
                in_work.push(true);
                work.push(new_id);
            }
        }
    }

    let q_trans = blocks
        .iter()
        .map(|b| trans[b[0]].iter().map(|&t| block_of[t]).collect())
        .collect::<Vec<Vec<usize>>>();
    let q_acc = blocks
        .iter()
        .map(|b| accepting[b[0]])
        .collect::<Vec<bool>>();
    // move the initial class to index 0 before canonical renumbering
    let init = block_of[0];
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.swap(0, init);
    let mut pos = vec![0; blocks.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let trans = order
        .iter()
        .map(|&old| q_trans[old].iter().map(|&t| pos[t]).collect())
        .collect();
    let acc = order.iter().map(|&old| q_acc[old]).collect();
    (trans, acc)
}

// Breadth-first renumbering from state 0; drops anything unreachable.
fn canonical(alphabet: Alphabet, trans: &[Vec<usize>], accepting: &[bool]) -> Dfa {
    let mut new_id = vec![usize::MAX; trans.len()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    new_id[0] = 0;
    order.push(0);
    while let Some(s) = queue.pop_front() {
        for &t in &trans[s] {
            if new_id[t] == usize::MAX {
                new_id[t] = order.len();
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    Dfa {
        alphabet,
        trans: order
            .iter()
            .map(|&s| trans[s].iter().map(|&t| new_id[t]).collect())
            .collect(),
        accepting: order.iter().map(|&s| accepting[s]).collect(),
    }
}

impl Dfa {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states())
            .filter(|&s| self.accepting[s])
            .collect()
    }

    pub fn step(&self, state: usize, symbol: usize) -> usize {
        self.trans[state][symbol]
    }

    /// State reached from the initial state after `word`.
    pub fn run(&self, word: &[usize]) -> usize {
        self.run_from(self.initial(), word)
    }

    pub fn run_from(&self, state: usize, word: &[usize]) -> usize {
        word.iter().fold(state, |q, &a| self.step(q, a))
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.is_accepting(self.run(word))
    }

    /// The rejecting state that loops on every symbol, if the language
    /// leaves one.
    pub fn sink(&self) -> Option<usize> {
        (0..self.num_states())
            .find(|&s| !self.accepting[s] && self.trans[s].iter().all(|&t| t == s))
    }

    fn reachable_from(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if !seen[s] {
                seen[s] = true;
                stack.extend(self.trans[s].iter().copied());
            }
        }
        seen
    }

    pub fn language_shape(&self) -> LanguageShape {
        let k = self.alphabet.len();
        let q0 = self.initial();
        if self.accepting[q0] {
            return LanguageShape::General;
        }
        // states after at least two symbols
        let after_two = self.reachable_from(
            (0..k)
                .flat_map(|a| {
                    let q = self.step(q0, a);
                    (0..k).map(move |b| (q, b))
                })
                .map(|(q, b)| self.step(q, b)),
        );
        if !(0..self.num_states()).any(|s| after_two[s] && self.accepting[s]) {
            return LanguageShape::PointBased;
        }
        // For each first symbol a and last symbol b, every word a w b must
        // agree on membership.
        for a in 0..k {
            let mid = self.reachable_from([self.step(q0, a)]);
            for b in 0..k {
                let mut verdicts = (0..self.num_states())
                    .filter(|&s| mid[s])
                    .map(|s| self.accepting[self.step(s, b)]);
                let first = verdicts.next().expect("the state after `a` is reachable");
                if verdicts.any(|v| v != first) {
                    return LanguageShape::General;
                }
            }
        }
        LanguageShape::EndpointBased
    }

    /// Graphviz rendering; the sink is dashed, accepting states doubled.
    pub fn to_dot(&self, name: &str) -> String {
        let sink = self.sink();
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        out.push_str("  rankdir=LR;\n  __start [shape=point];\n  __start -> z0;\n");
        for s in 0..self.num_states() {
            let shape = if self.accepting[s] {
                "doublecircle"
            } else {
                "circle"
            };
            let style = if Some(s) == sink {
                ", style=dashed"
            } else {
                ""
            };
            let _ = writeln!(out, "  z{s} [shape={shape}{style}];");
        }
        for s in 0..self.num_states() {
            let mut grouped: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
            for (a, &t) in self.trans[s].iter().enumerate() {
                grouped.entry(t).or_default().push(self.alphabet.name(a));
            }
            for (t, labels) in grouped {
                let style = if Some(t) == sink {
                    ", style=dashed"
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    "  z{s} -> z{t} [label=\"{}\"{style}];",
                    escape(&labels.join(", "))
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::super::{denotes, parse_regex};
    use super::*;

    fn g3() -> Alphabet {
        Alphabet::new(["g1", "g2", "g3"]).unwrap()
    }

    fn dfa(text: &str) -> Dfa {
        let a = g3();
        compile(&parse_regex(text, &a).unwrap(), &a)
    }

    #[test]
    fn example_automaton_has_four_states_one_accepting() {
        let d = dfa("g1 (g1+g2)* g3");
        assert_eq!(d.num_states(), 4);
        assert_eq!(d.accepting_states().len(), 1);
        let acc = d.accepting_states()[0];
        assert_eq!(d.run(&[0, 1, 2]), acc);
        assert_eq!(d.run(&[]), d.initial());
        assert_eq!(Some(d.run(&[2])), d.sink());
    }

    #[test]
    fn trivial_languages() {
        let e = dfa("empty");
        assert_eq!(e.num_states(), 1);
        assert!(e.accepting_states().is_empty());
        let u = dfa("(g1+g2+g3)*");
        assert_eq!(u.num_states(), 1);
        assert!(u.is_accepting(0));
    }

    #[test]
    fn shapes() {
        assert_eq!(dfa("g1 + g2").language_shape(), LanguageShape::PointBased);
        assert_eq!(dfa("empty").language_shape(), LanguageShape::PointBased);
        assert_eq!(
            dfa("g1 + g1 (g1+g2+g3)* g3").language_shape(),
            LanguageShape::EndpointBased
        );
        assert_eq!(
            dfa("g1 (g1+g2)* g3").language_shape(),
            LanguageShape::General
        );
        assert_eq!(dfa("eps + g1").language_shape(), LanguageShape::General);
    }

    #[test]
    fn agrees_with_derivatives_on_short_words() {
        let a = g3();
        for text in [
            "g1 (g1+g2)* g3",
            "(g1 g2)* + g3*",
            "eps",
            "(g1+eps)(g2+eps)g3*",
        ] {
            let r = parse_regex(text, &a).unwrap();
            let d = compile(&r, &a);
            let mut words: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..4 {
                let next: Vec<Vec<usize>> = words
                    .iter()
                    .flat_map(|w| (0..3).map(move |s| [w.clone(), vec![s]].concat()))
                    .collect();
                for w in &next {
                    assert_eq!(d.accepts(w), denotes(&r, w), "{text} on {w:?}");
                }
                words = next;
            }
        }
    }

    #[test]
    fn dot_marks_accepting_and_sink() {
        let text = dfa("g1 (g1+g2)* g3").to_dot("p");
        assert_eq!(text.matches("doublecircle").count(), 1);
        assert!(text.contains("style=dashed"));
        assert_eq!(text.matches(" [shape=").count(), 5); // 4 states + start point
    }
}
