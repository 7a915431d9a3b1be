//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use ehs_core::abln::{
    check_abln, check_abln_with, compute_mct, regular_witness_search, AblnOptions, BoundMode, Mct,
    WitnessStart,
};
use ehs_core::bde::check_bde;
use ehs_core::formula::{
    fis_bound, fis_bound_with, parse_plus, parse_re, AgentRef, FisMode, FisValue, Formula,
    FormulaPlus, Modality,
};
use ehs_core::oracle::{anchor, oracle_check, oracle_check_re};
use ehs_core::reductions::{to_point_based, to_regular_labelling};
use ehs_core::regex::{denotes, Regex};
use ehs_core::system::{
    allen_successors, common_class, epi_class, paths_from, InterpretedSystem, Interval, Relation,
    SystemDef,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed_0001;

type Check = fn() -> Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: Check,
}

fn main() {
    let criteria = [
        Criterion {
            name: "example system, automaton and bounds",
            limit: Duration::from_secs(1),
            run: c1_example,
        },
        Criterion {
            name: "automaton agrees with expression semantics",
            limit: Duration::from_secs(1),
            run: c2_dfa,
        },
        Criterion {
            name: "BDE engine agrees with oracle",
            limit: Duration::from_secs(300),
            run: c3_bde,
        },
        Criterion {
            name: "ABLN engine at literal bound agrees with oracle",
            limit: Duration::from_secs(600),
            run: c4_abln,
        },
        Criterion {
            name: "witness search agrees with enumeration",
            limit: Duration::from_secs(120),
            run: c5_witness,
        },
        Criterion {
            name: "reductions preserve verdicts",
            limit: Duration::from_secs(300),
            run: c6_reductions,
        },
        Criterion {
            name: "L and N rewrites are equivalent",
            limit: Duration::from_secs(120),
            run: c7_rewrites,
        },
        Criterion {
            name: "MCT composition, congruence and counts",
            limit: Duration::from_secs(300),
            run: c8_mct,
        },
        Criterion {
            name: "separation formula",
            limit: Duration::from_secs(60),
            run: c9_separation,
        },
        Criterion {
            name: "user bound monotonicity",
            limit: Duration::from_secs(120),
            run: c10_monotone,
        },
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, c) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{}] {}: {} ({:.2}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            detail,
            took.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(text: &str) -> FormulaPlus {
    parse_plus(text).unwrap()
}

// 1 -------------------------------------------------------------------------

fn c1_example() -> Result<String, String> {
    let s = is_ex();
    ensure(s.num_configs() == 3, || "expected 3 configurations".into())?;
    let edges = s.transition_pairs();
    ensure(edges == vec![(0, 1), (1, 0), (1, 2), (2, 0)], || {
        format!("transitions {edges:?}")
    })?;
    ensure(s.dfa(0).num_states() == 4, || {
        "automaton for p should have 4 states".into()
    })?;
    for (word, expect) in [
        (vec![0, 1, 2], true),
        (vec![0, 1], false),
        (vec![0, 1, 0, 1, 2], true),
        (vec![1, 2], false),
        (vec![0], false),
    ] {
        let got = s.label_holds(0, &Interval::new(word.clone()));
        ensure(got == expect, || format!("p on {word:?} gave {got}"))?;
    }
    let fp = fis_bound(&s, &p("p")).map_err(|e| e.to_string())?;
    ensure(fp.to_u64() == Some(288), || {
        format!("f(p) = {}", fp.symbolic())
    })?;
    let fa = fis_bound(&s, &p("<A> p")).map_err(|e| e.to_string())?;
    ensure(fa.symbolic() == "288*2^288", || {
        format!("f(<A>p) = {}", fa.symbolic())
    })?;
    let expect = num_bigint::BigUint::from(288u32) << 288usize;
    ensure(fa.exact() == Some(expect), || "f(<A>p) exact value".into())?;
    let ft = fis_bound_with(&s, &p("p"), FisMode::Tight).map_err(|e| e.to_string())?;
    ensure(ft.to_u64() == Some(73), || {
        format!("tight f(p) = {}", ft.symbolic())
    })?;
    let g1 = Interval::point(0);
    let a = check_abln(&s, &g1, &p("<A> p"), BoundMode::PaperBound).map_err(|e| e.to_string())?;
    ensure(a.holds && a.regime.is_conclusive(), || {
        format!("<A> p gave {a:?}")
    })?;
    let k = check_abln(&s, &g1, &p("K{0} pi & !<A> p"), BoundMode::PaperBound)
        .map_err(|e| e.to_string())?;
    ensure(!k.holds && k.regime.is_conclusive(), || {
        format!("K{{0}} pi & !<A> p gave {k:?}")
    })?;
    Ok("3 configurations, 4 transitions, 4 automaton states, f(p)=288, f(<A>p)=288*2^288, tight 73".into())
}

// 2 -------------------------------------------------------------------------

fn words(alphabet: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..max_len {
        level = level
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..alphabet).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        all.extend(level.iter().cloned());
    }
    all
}

fn c2_dfa() -> Result<String, String> {
    let s = is_ex();
    let d = s.dfa(0);
    ensure(d.num_states() == 4, || format!("{} states", d.num_states()))?;
    ensure(d.accepting_states().len() == 1, || {
        "expected one accepting state".into()
    })?;
    let ws = words(3, 6);
    ensure(ws.len() == 1093, || format!("{} words", ws.len()))?;
    let bad: Vec<_> = ws
        .iter()
        .filter(|w| d.accepts(w) != denotes(s.label(0), w))
        .collect();
    ensure(bad.is_empty(), || format!("disagreement on {:?}", bad[0]))?;
    Ok(format!("4 states, 1 accepting, {} words agree", ws.len()))
}

// 3 -------------------------------------------------------------------------

fn bde_grammar() -> Grammar {
    Grammar {
        leaves: vec![var("p"), Formula::Pi],
        unary: vec![
            not(),
            dia(Modality::B),
            dia(Modality::D),
            dia(Modality::E),
            know(0),
            know(1),
            common(&[0, 1]),
        ],
        and: true,
        or: false,
    }
}

fn c3_bde() -> Result<String, String> {
    let s = is_ex();
    let formulas = bde_grammar().up_to(5);
    let intervals = model_intervals(&s, 4);
    let mut checked = 0u64;
    for i in &intervals {
        let a = anchor(&s, i).map_err(|e| e.to_string())?;
        for f in &formulas {
            let engine = check_bde(&s, i, f).map_err(|e| format!("{f}: {e}"))?;
            let oracle = oracle_check(&s, &a, f, i.len()).map_err(|e| format!("{f}: {e}"))?;
            ensure(engine == oracle, || {
                format!(
                    "`{f}` at {}: engine {engine}, oracle {oracle}",
                    s.format_interval(i)
                )
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "{} formulas of size <= 5 on {} intervals of length <= 4: {checked} agree",
        formulas.len(),
        intervals.len()
    ))
}

// 4 -------------------------------------------------------------------------

fn abln_grammar() -> Grammar {
    Grammar {
        leaves: vec![var("p"), Formula::Pi],
        unary: vec![
            not(),
            know(0),
            know(1),
            common(&[0, 1]),
            dia(Modality::A),
            dia(Modality::Bbar),
            dia(Modality::L),
            dia(Modality::N),
        ],
        and: true,
        or: false,
    }
}

fn temporal_depth(f: &FormulaPlus) -> usize {
    match f {
        Formula::Diamond(_, x) | Formula::Square(_, x) => 1 + temporal_depth(x),
        Formula::Not(x) | Formula::Know(_, x) | Formula::Common(_, x) => temporal_depth(x),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            temporal_depth(l).max(temporal_depth(r))
        }
        _ => 0,
    }
}

/// Largest literal bound over the operands of temporal diamonds in `f`.
fn max_operand_bound(s: &InterpretedSystem, f: &FormulaPlus) -> Result<usize, String> {
    let mut operands = Vec::new();
    f.walk(&mut |g| {
        if let Formula::Diamond(_, x) | Formula::Square(_, x) = g {
            operands.push(x.as_ref().clone());
        }
    });
    let mut best = 0;
    for x in operands {
        let v = fis_bound(s, &x).map_err(|e| e.to_string())?;
        best = best.max(
            v.to_usize()
                .ok_or_else(|| format!("bound of `{x}` is {}", v.symbolic()))?,
        );
    }
    Ok(best)
}

fn c4_abln() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 4);
    let formulas: Vec<FormulaPlus> = abln_grammar()
        .up_to(6)
        .into_iter()
        .filter(|f| f.modal_depth() <= 1)
        .collect();
    let mut checked = 0u64;
    let mut largest = 0;
    for n in 0..20 {
        let s = random_deterministic(&mut rng, 3, 3);
        let intervals = model_intervals(&s, 2);
        for f in &formulas {
            let extra = max_operand_bound(&s, f)?;
            for i in &intervals {
                let bound = i.len() + extra;
                largest = largest.max(bound);
                let v = check_abln(&s, i, f, BoundMode::PaperBound)
                    .map_err(|e| format!("system {n}, `{f}`: {e}"))?;
                ensure(v.regime.is_conclusive(), || {
                    format!("system {n}, `{f}`: {v:?}")
                })?;
                let a = anchor(&s, i).map_err(|e| e.to_string())?;
                let o = oracle_check(&s, &a, f, bound).map_err(|e| e.to_string())?;
                ensure(v.holds == o, || {
                    format!(
                        "system {n} {:?}, `{f}` at {}: engine {}, oracle {o} at bound {bound}",
                        s.transition_pairs(),
                        s.format_interval(i),
                        v.holds
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "20 systems, {} formulas, {checked} checks agree (oracle bound up to {largest})",
        formulas.len()
    ))
}

// 5 -------------------------------------------------------------------------

fn modal_free_grammar(vars: usize) -> Grammar {
    let names = ["p", "q"];
    let mut leaves: Vec<FormulaPlus> = names[..vars].iter().map(|n| var(n)).collect();
    leaves.push(Formula::Pi);
    Grammar {
        leaves,
        unary: vec![not()],
        and: true,
        or: true,
    }
}

/// Modal-free evaluation straight from the labelling expressions.
fn eval_plain(s: &InterpretedSystem, f: &FormulaPlus, w: &[usize]) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Pi => w.len() == 1,
        Formula::Atom(x) => denotes(s.label(s.var_index(x).unwrap()), w),
        Formula::Not(x) => !eval_plain(s, x, w),
        Formula::And(l, r) => eval_plain(s, l, w) && eval_plain(s, r, w),
        Formula::Or(l, r) => eval_plain(s, l, w) || eval_plain(s, r, w),
        Formula::Implies(l, r) => !eval_plain(s, l, w) || eval_plain(s, r, w),
        _ => unreachable!("modal operator"),
    }
}

/// Length of the shortest path extending `prefix` (by at least `min_extra`
/// configurations, at most `max_len` in total) that satisfies `f`.
fn shortest_by_enumeration(
    s: &InterpretedSystem,
    f: &FormulaPlus,
    starts: Vec<Vec<usize>>,
    min_len: usize,
    max_len: usize,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    let mut stack = starts;
    while let Some(w) = stack.pop() {
        if w.len() >= min_len && eval_plain(s, f, &w) {
            best = Some(best.map_or(w.len(), |b| b.min(w.len())));
        }
        if w.len() < max_len && best.is_none_or(|b| w.len() < b) {
            for &h in s.successors(*w.last().unwrap()) {
                let mut v = w.clone();
                v.push(h);
                stack.push(v);
            }
        }
    }
    best
}

/// Longest path the brute-force enumeration explores.
const ENUM_CAP: usize = 14;

fn c5_witness() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 5);
    let mut found = 0;
    let mut beyond = 0;
    for n in 0..200 {
        let vars = rng.gen_range(1..=2);
        let s = random_branching(&mut rng, 3, vars, 3);
        let f = modal_free_grammar(vars).random(&mut rng, 6);
        let reach = s.reachable_configs();
        // pigeonhole on (configuration, automaton states) pairs
        let product: usize =
            reach.len() * s.dfas().iter().map(|d| d.num_states()).product::<usize>();
        let (start, starts, min_len, max_len) = match rng.gen_range(0..3) {
            0 => {
                let g = reach[rng.gen_range(0..reach.len())];
                (WitnessStart::At(g), vec![vec![g]], 1, product + 1)
            }
            1 => {
                let set: Vec<usize> = reach
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                let starts = set.iter().map(|&g| vec![g]).collect();
                (WitnessStart::In(set), starts, 1, product + 1)
            }
            _ => {
                let all = model_intervals(&s, 2);
                let i = all[rng.gen_range(0..all.len())].clone();
                let w = i.configs().to_vec();
                let len = w.len();
                (
                    WitnessStart::Extends(i),
                    vec![w],
                    len + 1,
                    len + product + 1,
                )
            }
        };
        let cap = max_len.min(ENUM_CAP);
        let got = regular_witness_search(&s, &start, &f).map_err(|e| format!("pair {n}: {e}"))?;
        let want = shortest_by_enumeration(&s, &f, starts, min_len, cap);
        let ctx = || {
            format!(
                "pair {n}: `{f}` from {start:?} on {:?}",
                s.transition_pairs()
            )
        };
        if let Some(w) = &got {
            let c = w.configs();
            ensure(eval_plain(&s, &f, c), || {
                format!("{}: witness {c:?} does not satisfy", ctx())
            })?;
            ensure(c.windows(2).all(|x| s.global_step(x[0], x[1])), || {
                format!("{}: {c:?} is not a path", ctx())
            })?;
            let start_ok = match &start {
                WitnessStart::At(g) => c[0] == *g,
                WitnessStart::In(set) => set.contains(&c[0]),
                WitnessStart::Extends(i) => c.len() > i.len() && c.starts_with(i.configs()),
            };
            ensure(start_ok, || {
                format!("{}: witness {c:?} starts wrongly", ctx())
            })?;
        }
        match (got.as_ref().map(Interval::len), want) {
            (None, None) => {}
            (Some(a), Some(b)) if a == b => found += 1,
            // nothing up to the cap; the search may only find something longer
            (Some(a), None) if a > cap && cap < max_len => beyond += 1,
            (a, b) => {
                return Err(format!(
                    "{}: search length {a:?}, enumeration {b:?} (cap {cap})",
                    ctx()
                ))
            }
        }
    }
    Ok(format!(
        "200 pairs agree ({found} shortest witnesses matched, {beyond} beyond the enumeration cap of {ENUM_CAP})"
    ))
}

// 6 -------------------------------------------------------------------------

fn two_var_grammar(vars: usize, temporal: &[Modality]) -> Grammar {
    let names = ["p", "q"];
    let mut leaves: Vec<FormulaPlus> = names[..vars].iter().map(|n| var(n)).collect();
    leaves.push(Formula::Pi);
    let mut unary = vec![not(), know(0), know(1), common(&[0, 1])];
    unary.extend(temporal.iter().map(|&m| dia(m)));
    Grammar {
        leaves,
        unary,
        and: true,
        or: false,
    }
}

const ABLN_OPS: [Modality; 4] = [Modality::A, Modality::Bbar, Modality::L, Modality::N];
const BDE_OPS: [Modality; 3] = [Modality::B, Modality::D, Modality::E];

fn c6_reductions() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 6);
    let bound = 6;
    let mut checked = 0u64;
    for n in 0..200 {
        let vars = rng.gen_range(1..=2);
        let s = random_branching(&mut rng, 3, vars, 3);
        let ops: &[Modality] = if n % 2 == 0 { &ABLN_OPS } else { &BDE_OPS };
        let g = two_var_grammar(vars, ops);
        let f = loop {
            let f = g.random(&mut rng, 5);
            if temporal_depth(&f) <= 2 {
                break f;
            }
        };
        let (pb, fre) = to_point_based(&s, &f).map_err(|e| format!("pair {n}: {e}"))?;
        ensure(pb.is_point_based(), || {
            format!("pair {n}: image is not point-based")
        })?;
        let (back, fplus) =
            to_regular_labelling(&pb, &fre).map_err(|e| format!("pair {n}: {e}"))?;
        for i in model_intervals(&s, 3) {
            let a = anchor(&s, &i).map_err(|e| e.to_string())?;
            let orig = oracle_check(&s, &a, &f, bound).map_err(|e| e.to_string())?;
            let re = oracle_check_re(&pb, &a, &fre, bound).map_err(|e| e.to_string())?;
            let plus = oracle_check(&back, &a, &fplus, bound).map_err(|e| e.to_string())?;
            ensure(orig == re && re == plus, || {
                format!(
                    "pair {n}: `{f}` at {}: original {orig}, point-based {re}, relabelled {plus}",
                    s.format_interval(&i)
                )
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "200 pairs, {checked} interval checks agree at bound {bound}"
    ))
}

// 7 -------------------------------------------------------------------------

fn c7_rewrites() -> Result<String, String> {
    let s = is_ex();
    let bound = 6;
    let g = Grammar {
        leaves: vec![var("p"), Formula::Pi],
        unary: vec![
            not(),
            know(0),
            dia(Modality::A),
            dia(Modality::B),
            dia(Modality::Bbar),
            dia(Modality::E),
            dia(Modality::N),
        ],
        and: true,
        or: false,
    };
    let phis = g.up_to(4);
    let intervals = model_intervals(&s, 2);
    let mut checked = 0u64;
    for phi in &phis {
        let later = Formula::diamond(Modality::L, phi.clone());
        let next = Formula::diamond(Modality::N, phi.clone());
        let pairs = [
            (later.clone(), later.eliminate_l()),
            (next.clone(), next.expand_n()),
        ];
        for i in &intervals {
            let a = anchor(&s, i).map_err(|e| e.to_string())?;
            for (f, r) in &pairs {
                let x = oracle_check(&s, &a, f, bound).map_err(|e| e.to_string())?;
                let y = oracle_check(&s, &a, r, bound).map_err(|e| e.to_string())?;
                ensure(x == y, || {
                    format!(
                        "`{f}` gives {x}, `{r}` gives {y} at {}",
                        s.format_interval(i)
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{} operands, {checked} checks agree at bound {bound}",
        phis.len()
    ))
}

// 8 -------------------------------------------------------------------------

/// Satisfaction with successors cut off exactly as in the tree builder.
fn eval_h(s: &InterpretedSystem, i: &Interval, f: &FormulaPlus, h: usize) -> bool {
    let agent = |a: &AgentRef| match a {
        AgentRef::Index(k) => *k,
        AgentRef::Name(n) => s.agent_index(n).unwrap(),
    };
    let succ = |m: Modality| match m {
        Modality::A => allen_successors(s, i, Relation::A, Some(h)).unwrap(),
        Modality::N => allen_successors(s, i, Relation::N, Some(h)).unwrap(),
        Modality::Bbar => allen_successors(s, i, Relation::Bbar, Some(i.len() + h)).unwrap(),
        m => unreachable!("<{m}>"),
    };
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Pi => i.is_point(),
        Formula::Atom(x) => s.label_holds_by_name(x, i).unwrap(),
        Formula::Not(x) => !eval_h(s, i, x, h),
        Formula::And(l, r) => eval_h(s, i, l, h) && eval_h(s, i, r, h),
        Formula::Or(l, r) => eval_h(s, i, l, h) || eval_h(s, i, r, h),
        Formula::Implies(l, r) => !eval_h(s, i, l, h) || eval_h(s, i, r, h),
        Formula::Know(a, x) => epi_class(s, i, agent(a)).iter().all(|j| eval_h(s, j, x, h)),
        Formula::Common(g, x) => {
            let g: Vec<usize> = g.iter().map(agent).collect();
            common_class(s, i, &g).iter().all(|j| eval_h(s, j, x, h))
        }
        Formula::Diamond(m, x) => succ(*m).iter().any(|j| eval_h(s, j, x, h)),
        Formula::Square(m, x) => succ(*m).iter().all(|j| eval_h(s, j, x, h)),
    }
}

const MCT_FORMULAS: [&str; 6] = [
    "K{0} pi & !<A> p",
    "<Bbar> K{1} p",
    "<A> <N> p",
    "C{0,1} <A> pi",
    "<L> p | K{0} <Bbar> !p",
    "[A](p -> <N> !pi)",
];

fn c8_mct() -> Result<String, String> {
    let s = is_ex();
    let h = 4;
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    let intervals = model_intervals(&s, 6);
    let formulas: Vec<FormulaPlus> = MCT_FORMULAS.iter().map(|t| p(t)).collect();
    let mut groups: Vec<Vec<Vec<Interval>>> = Vec::new();
    let mut counts = Vec::new();
    for f in &formulas {
        let mut by_tree: BTreeMap<Mct, Vec<Interval>> = BTreeMap::new();
        for i in &intervals {
            let t = compute_mct(&s, i, f, h).map_err(|e| e.to_string())?;
            by_tree.entry(t).or_default().push(i.clone());
        }
        let fis = fis_bound(&s, f).map_err(|e| e.to_string())?;
        let distinct = by_tree.len();
        ensure(
            fis.cmp_value(&FisValue::from_u64(distinct as u64)).is_gt(),
            || format!("`{f}`: {distinct} trees, bound {}", fis.symbolic()),
        )?;
        counts.push(distinct);
        groups.push(by_tree.into_values().filter(|g| g.len() > 1).collect());
    }
    let mut composed = 0;
    let mut exact = 0;
    for n in 0..500 {
        let k = n % formulas.len();
        let f = &formulas[k];
        let gs = &groups[k];
        ensure(!gs.is_empty(), || {
            format!("`{f}`: no two intervals share a tree")
        })?;
        let grp = &gs[rng.gen_range(0..gs.len())];
        let a = &grp[rng.gen_range(0..grp.len())];
        let b = loop {
            let b = &grp[rng.gen_range(0..grp.len())];
            if b != a {
                break b;
            }
        };
        // congruence under the truncated semantics
        let elim = f.eliminate_l();
        let (va, vb) = (eval_h(&s, a, &elim, h), eval_h(&s, b, &elim, h));
        let fa = s.format_interval(a);
        let fb = s.format_interval(b);
        ensure(va == vb, || {
            format!("`{f}`: {fa} gives {va}, {fb} gives {vb} with equal trees")
        })?;
        // and under the exact semantics wherever the engine is conclusive
        let ra = check_abln(&s, a, f, BoundMode::PaperBound);
        let rb = check_abln(&s, b, f, BoundMode::PaperBound);
        if let (Ok(x), Ok(y)) = (ra, rb) {
            if x.regime.is_conclusive() && y.regime.is_conclusive() {
                ensure(x.holds == y.holds, || {
                    format!("`{f}`: {fa} and {fb} share a tree but differ")
                })?;
                exact += 1;
            }
        }
        // composition with a common continuation
        let len = rng.gen_range(1..h);
        let starts = s.successors(a.last());
        let g = starts[rng.gen_range(0..starts.len())];
        let conts: Vec<Interval> = paths_from(&s, g, len)
            .into_iter()
            .filter(|j| j.len() == len)
            .collect();
        let j = &conts[rng.gen_range(0..conts.len())];
        let join = |x: &Interval| {
            let mut c = x.configs().to_vec();
            c.extend_from_slice(j.configs());
            Interval::new(c)
        };
        let rest = h - j.len();
        let ta = compute_mct(&s, &join(a), f, rest).map_err(|e| e.to_string())?;
        let tb = compute_mct(&s, &join(b), f, rest).map_err(|e| e.to_string())?;
        ensure(ta == tb, || {
            format!(
                "`{f}`: {fa} and {fb} share a tree at horizon {h} but differ after appending {} (horizon {rest})",
                s.format_interval(j)
            )
        })?;
        composed += 1;
    }
    Ok(format!(
        "500 pairs: congruent, {exact} exact verdict matches, {composed} compositions agree; distinct trees {counts:?} below bounds"
    ))
}

// 9 -------------------------------------------------------------------------

fn c9_separation() -> Result<String, String> {
    let f = parse_re("{p} & [A]({(p;T)*} -> [N]{p;T*})").map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (name, edges, expect) in [
        ("satisfying", vec![(0, 1), (1, 0)], true),
        ("violating", vec![(0, 1), (1, 0), (1, 1)], false),
    ] {
        let def = SystemDef::from_graph(2, &edges, 0, vec![("p".into(), Regex::Symbol(0))]);
        let s = InterpretedSystem::new(def).map_err(|e| e.to_string())?;
        ensure(s.is_point_based(), || {
            format!("{name} system is not point-based")
        })?;
        let i = Interval::point(0);
        let (rs, rf) = to_regular_labelling(&s, &f).map_err(|e| e.to_string())?;
        let v = check_abln(&rs, &i, &rf, BoundMode::UserBound(8)).map_err(|e| e.to_string())?;
        let o = oracle_check_re(&s, &anchor(&s, &i).unwrap(), &f, 8).map_err(|e| e.to_string())?;
        ensure(v.holds == o && o == expect, || {
            format!(
                "{name}: engine {} ({}), oracle {o}, expected {expect}",
                v.holds, v.regime
            )
        })?;
        out.push(format!("{name} {} ({})", v.holds, v.regime));
    }
    Ok(out.join(", "))
}

// 10 ------------------------------------------------------------------------

fn c10_monotone() -> Result<String, String> {
    let s = is_ex();
    let g = Grammar {
        leaves: vec![
            var("p"),
            Formula::not(var("p")),
            Formula::Pi,
            Formula::not(Formula::Pi),
        ],
        unary: vec![
            dia(Modality::A),
            dia(Modality::Bbar),
            dia(Modality::L),
            dia(Modality::N),
            know(0),
            know(1),
        ],
        and: true,
        or: true,
    };
    let formulas = g.up_to(4);
    let intervals = model_intervals(&s, 2);
    let mut flips = BTreeSet::new();
    let mut checked = 0u64;
    for f in &formulas {
        for i in &intervals {
            let mut prev = false;
            for k in 1..=8 {
                let opts = AblnOptions {
                    mode: BoundMode::UserBound(k),
                    cache: true,
                    ..AblnOptions::default()
                };
                let v = check_abln_with(&s, i, f, opts)
                    .map_err(|e| format!("`{f}`: {e}"))?
                    .verdict;
                ensure(!prev || v.holds, || {
                    format!(
                        "`{f}` at {} holds at k={} but not at k={k}",
                        s.format_interval(i),
                        k - 1
                    )
                })?;
                if v.holds && !prev && k > 1 {
                    flips.insert(f.to_string());
                }
                prev = v.holds;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{} formulas, {checked} checks monotone; {} formulas become true as k grows",
        formulas.len(),
        flips.len()
    ))
}
