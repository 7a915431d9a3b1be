//! Brute-force bounded evaluator for every modality.
//!
//! Each quantifier ranges over anchored intervals (a run from the initial
//! configuration plus a start position) whose interval part has length at
//! most `bound`. Backward relations read the anchor's history; epistemic
//! alternatives get either the canonical history or, when the operand looks
//! backwards, every history of length at most `bound`. Atoms are decided by
//! derivatives, never by the compiled automata.

use std::collections::{BTreeSet, HashMap};

use crate::formula::{AgentRef, Formula, FormulaPlus, FormulaRe, Letter, Modality};
use crate::regex::{denotes, Regex};
use crate::system::{AnchoredInterval, InterpretedSystem, Interval, SystemError};
use crate::verdict::CheckError;

type Letters = Vec<usize>;

const UNKNOWN: usize = usize::MAX;

/// Interning memo of derivatives: a lazily built deterministic automaton.
struct Derivatives {
    ids: HashMap<Regex<Letters>, usize>,
    exprs: Vec<Regex<Letters>>,
    nullable: Vec<bool>,
    // step[id][g], UNKNOWN until first computed
    step: Vec<Vec<usize>>,
    configs: usize,
    empty: usize,
}

impl Derivatives {
    fn new(configs: usize) -> Self {
        let mut d = Derivatives {
            ids: HashMap::new(),
            exprs: Vec::new(),
            nullable: Vec::new(),
            step: Vec::new(),
            configs,
            empty: 0,
        };
        d.empty = d.intern(Regex::Empty);
        d
    }

    fn intern(&mut self, r: Regex<Letters>) -> usize {
        if let Some(&id) = self.ids.get(&r) {
            return id;
        }
        let id = self.exprs.len();
        self.nullable.push(r.nullable());
        self.exprs.push(r.clone());
        self.step.push(vec![UNKNOWN; self.configs]);
        self.ids.insert(r, id);
        id
    }

    fn next(&mut self, id: usize, g: usize) -> usize {
        let n = self.step[id][g];
        if n != UNKNOWN {
            return n;
        }
        let d =
            self.exprs[id].derivative(&g, &|set: &Letters, g: &usize| set.binary_search(g).is_ok());
        let n = self.intern(d);
        self.step[id][g] = n;
        n
    }

    fn accepts(&mut self, root: usize, word: &[usize]) -> bool {
        let empty = self.empty;
        let mut q = root;
        for &g in word {
            q = self.next(q, g);
            if q == empty {
                return false;
            }
        }
        self.nullable[q]
    }
}

#[derive(Clone)]
struct Anchored {
    run: Vec<usize>,
    start: usize,
}

impl Anchored {
    fn interval(&self) -> &[usize] {
        &self.run[self.start..]
    }

    fn len(&self) -> usize {
        self.run.len() - self.start
    }
}

fn agent(a: &AgentRef) -> usize {
    match a {
        AgentRef::Index(i) => *i,
        AgentRef::Name(n) => unreachable!("agent `{n}` not resolved"),
    }
}

struct Oracle<'a> {
    sys: &'a InterpretedSystem,
    bound: usize,
    atoms: Vec<usize>,
    derivs: Derivatives,
}

impl Oracle<'_> {
    /// Paths of length `1..=max` starting at `g`.
    fn paths(&self, g: usize, max: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![g]];
        while let Some(p) = stack.pop() {
            if p.len() > max {
                continue;
            }
            if p.len() < max {
                for &h in self.sys.successors(*p.last().expect("non-empty")) {
                    let mut q = p.clone();
                    q.push(h);
                    stack.push(q);
                }
            }
            out.push(p);
        }
        out
    }

    /// Non-empty continuations of `g` with at most `max` configurations.
    fn continuations(&self, g: usize, max: usize) -> Vec<Vec<usize>> {
        self.sys
            .successors(g)
            .iter()
            .flat_map(|&h| self.paths(h, max))
            .collect()
    }

    fn forward(&self, a: &Anchored, m: Modality) -> Vec<Anchored> {
        let k = self.bound;
        let n = a.len();
        let s = a.start;
        let run = &a.run;
        let end = run.len();
        let last = run[end - 1];
        let mut out = Vec::new();
        let push = |out: &mut Vec<Anchored>, run: Vec<usize>, start: usize| {
            if run.len() - start <= k {
                out.push(Anchored { run, start });
            }
        };
        match m {
            Modality::A => {
                for p in self.paths(last, k) {
                    let mut r = run[..end - 1].to_vec();
                    r.extend(p);
                    push(&mut out, r, end - 1);
                }
            }
            Modality::B => {
                for j in 1..n {
                    push(&mut out, run[..s + j].to_vec(), s);
                }
            }
            Modality::Bbar => {
                for q in self.continuations(last, k.saturating_sub(n)) {
                    let mut r = run.clone();
                    r.extend(q);
                    push(&mut out, r, s);
                }
            }
            Modality::D => {
                for i in 1..n {
                    for j in i + 1..n {
                        push(&mut out, run[..s + j].to_vec(), s + i);
                    }
                }
            }
            Modality::E => {
                for i in 1..n {
                    push(&mut out, run.clone(), s + i);
                }
            }
            Modality::L => {
                // gap of w intermediate configurations, w + 1 steps in total
                let mut gaps: Vec<Vec<usize>> = vec![Vec::new()];
                if k >= 2 {
                    gaps.extend(self.continuations(last, k - 2));
                }
                for w in gaps {
                    let from = w.last().copied().unwrap_or(last);
                    for p in self.continuations(from, k) {
                        let mut r = run.clone();
                        r.extend_from_slice(&w);
                        let start = r.len();
                        r.extend(p);
                        push(&mut out, r, start);
                    }
                }
            }
            Modality::N => {
                for p in self.continuations(last, k) {
                    let mut r = run.clone();
                    r.extend(p);
                    push(&mut out, r, end);
                }
            }
            Modality::O => {
                for i in 1..n {
                    for q in self.continuations(last, k) {
                        let mut r = run.clone();
                        r.extend(q);
                        push(&mut out, r, s + i);
                    }
                }
            }
            Modality::Abar => {
                for j in 0..=s {
                    push(&mut out, run[..=s].to_vec(), j);
                }
            }
            Modality::Dbar => {
                for j in 0..s {
                    for q in self.continuations(last, k) {
                        let mut r = run.clone();
                        r.extend(q);
                        push(&mut out, r, j);
                    }
                }
            }
            Modality::Ebar => {
                for j in 0..s {
                    push(&mut out, run.clone(), j);
                }
            }
            Modality::Lbar => {
                // last(I') = run[j - 1], at least one and at most k - 1 steps before first(I)
                for j in 1..=s {
                    if s - (j - 1) > k.saturating_sub(1) {
                        continue;
                    }
                    for i in 0..j {
                        push(&mut out, run[..j].to_vec(), i);
                    }
                }
            }
            Modality::Nbar => {
                for i in 0..s {
                    push(&mut out, run[..s].to_vec(), i);
                }
            }
            Modality::Obar => {
                for j in 0..s {
                    for m in 1..n {
                        push(&mut out, run[..s + m].to_vec(), j);
                    }
                }
            }
        }
        out
    }

    /// Histories leading to `g`: every one of length at most the bound, and
    /// the canonical one.
    fn histories(&self, g: usize, all: bool) -> Vec<Vec<usize>> {
        let canonical = self.sys.canonical_history(g).expect("reachable").to_vec();
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        out.insert(canonical);
        if all {
            let init = self.sys.initial_config();
            if g == init {
                out.insert(Vec::new());
            }
            for p in self.paths(init, self.bound) {
                if self
                    .sys
                    .successors(*p.last().expect("non-empty"))
                    .contains(&g)
                {
                    out.insert(p);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Every path of length `n` with a reachable first configuration.
    fn model_paths(&self, n: usize) -> Vec<Vec<usize>> {
        (0..self.sys.num_configs())
            .filter(|&g| self.sys.is_reachable(g))
            .flat_map(|g| self.paths(g, n))
            .filter(|p| p.len() == n)
            .collect()
    }

    fn indistinguishable(&self, x: &[usize], y: &[usize], a: usize) -> bool {
        x.len() == y.len()
            && x.iter()
                .zip(y)
                .all(|(&g, &h)| self.sys.local(g, a) == self.sys.local(h, a))
    }

    fn epistemic(
        &self,
        a: &Anchored,
        group: &[usize],
        closure: bool,
        sensitive: bool,
    ) -> Vec<Anchored> {
        let candidates = self.model_paths(a.len());
        let mut reached: Vec<Vec<usize>> = vec![a.interval().to_vec()];
        let mut frontier = reached.clone();
        loop {
            let mut next = Vec::new();
            for x in &frontier {
                for y in &candidates {
                    if !reached.contains(y)
                        && group.iter().any(|&i| self.indistinguishable(x, y, i))
                    {
                        reached.push(y.clone());
                        next.push(y.clone());
                    }
                }
            }
            if next.is_empty() || !closure {
                break;
            }
            frontier = next;
        }
        let mut out = Vec::new();
        for j in reached {
            for h in self.histories(j[0], sensitive) {
                let start = h.len();
                let mut run = h;
                run.extend_from_slice(&j);
                out.push(Anchored { run, start });
            }
        }
        out
    }

    fn eval(&mut self, a: &Anchored, f: &Formula<usize>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Pi => a.len() == 1,
            Formula::Atom(i) => {
                let root = self.atoms[*i];
                self.derivs.accepts(root, a.interval())
            }
            Formula::Not(x) => !self.eval(a, x),
            Formula::And(l, r) => self.eval(a, l) && self.eval(a, r),
            Formula::Or(l, r) => self.eval(a, l) || self.eval(a, r),
            Formula::Implies(l, r) => !self.eval(a, l) || self.eval(a, r),
            Formula::Know(i, x) => {
                let alts = self.epistemic(a, &[agent(i)], false, x.has_backward());
                alts.iter().all(|b| self.eval(b, x))
            }
            Formula::Common(g, x) => {
                let group: Vec<usize> = g.iter().map(agent).collect();
                let alts = self.epistemic(a, &group, true, x.has_backward());
                alts.iter().all(|b| self.eval(b, x))
            }
            Formula::Diamond(m, x) => {
                let succ = self.forward(a, *m);
                succ.iter().any(|b| self.eval(b, x))
            }
            Formula::Square(m, x) => {
                let succ = self.forward(a, *m);
                succ.iter().all(|b| self.eval(b, x))
            }
        }
    }
}

/// The anchored interval with the shortest history.
pub fn anchor(
    sys: &InterpretedSystem,
    interval: &Interval,
) -> Result<AnchoredInterval, SystemError> {
    let interval = sys.interval(interval.configs().to_vec())?;
    let history = sys
        .canonical_history(interval.first())
        .expect("validated intervals start at reachable configurations")
        .to_vec();
    Ok(AnchoredInterval { history, interval })
}

fn validate(sys: &InterpretedSystem, a: &AnchoredInterval, bound: usize) -> Result<(), CheckError> {
    if bound == 0 {
        return Err(CheckError::Bound("the bound must be positive".into()));
    }
    if a.interval.len() > bound {
        return Err(CheckError::Bound(format!(
            "interval of length {} exceeds bound {bound}",
            a.interval.len()
        )));
    }
    let run = a.run();
    let bad = || {
        SystemError::InvalidInterval(format!(
            "run {run:?} is not a path from the initial configuration"
        ))
    };
    if run[0] != sys.initial_config() || run.iter().any(|&g| g >= sys.num_configs()) {
        return Err(bad().into());
    }
    if run.windows(2).any(|w| !sys.global_step(w[0], w[1])) {
        return Err(bad().into());
    }
    Ok(())
}

fn run(
    sys: &InterpretedSystem,
    a: &AnchoredInterval,
    f: &Formula<usize>,
    atoms: Vec<Regex<Letters>>,
    bound: usize,
) -> bool {
    let mut derivs = Derivatives::new(sys.num_configs());
    let atoms = atoms.into_iter().map(|r| derivs.intern(r)).collect();
    let mut o = Oracle {
        sys,
        bound,
        atoms,
        derivs,
    };
    let start = a.history.len();
    o.eval(
        &Anchored {
            run: a.run(),
            start,
        },
        f,
    )
}

/// Bounded evaluation of a formula with plain variables.
pub fn oracle_check(
    sys: &InterpretedSystem,
    a: &AnchoredInterval,
    f: &FormulaPlus,
    bound: usize,
) -> Result<bool, CheckError> {
    validate(sys, a, bound)?;
    let bound_f = f.bind(sys)?;
    let atoms = (0..sys.num_vars())
        .map(|v| sys.label(v).map(&mut |&g: &usize| Regex::Symbol(vec![g])))
        .collect();
    Ok(run(sys, a, &bound_f, atoms, bound))
}

/// Bounded evaluation of a formula with regular atoms over variable letters.
pub fn oracle_check_re(
    sys: &InterpretedSystem,
    a: &AnchoredInterval,
    f: &FormulaRe,
    bound: usize,
) -> Result<bool, CheckError> {
    validate(sys, a, bound)?;
    let f = f.bind(sys)?;
    let names: Vec<String> = (0..sys.num_vars())
        .map(|v| sys.var_name(v).to_string())
        .collect();
    // valuations straight from the labelling expressions
    let val: Vec<Vec<bool>> = (0..sys.num_configs())
        .map(|g| {
            (0..sys.num_vars())
                .map(|v| denotes(sys.label(v), &[g]))
                .collect()
        })
        .collect();
    let configs_of = |l: &Letter| -> Letters {
        (0..sys.num_configs())
            .filter(|&g| {
                l.matches(
                    |p| names.iter().position(|n| n == p).is_some_and(|v| val[g][v]),
                    &names,
                )
            })
            .collect()
    };
    let mut atoms: Vec<Regex<Letters>> = Vec::new();
    let mut index: Vec<Regex<Letter>> = Vec::new();
    let indexed = f.map_atoms(
        &mut |r: &Regex<Letter>| match index.iter().position(|x| x == r) {
            Some(i) => i,
            None => {
                index.push(r.clone());
                atoms.push(r.map(&mut |l: &Letter| Regex::Symbol(configs_of(l))));
                index.len() - 1
            }
        },
    );
    Ok(run(sys, a, &indexed, atoms, bound))
}
