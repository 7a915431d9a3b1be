use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use ehs_core::abln::{
    check_abln_with, compute_mct, mct_to_dot, AblnOptions, BoundMode, DEFAULT_FRONTIER_CEILING,
};
use ehs_core::bde::{check_bde_with, BdeOptions};
use ehs_core::formula::{
    fis_bound_with, parse_plus, parse_re, FisMode, FisValue, Formula, FormulaPlus, FormulaRe,
    Fragment, Modality,
};
use ehs_core::oracle::{anchor, oracle_check, oracle_check_re};
use ehs_core::reductions::{to_point_based, to_regular_labelling, ReductionError};
use ehs_core::system::{parse_isrl, print_isrl, InterpretedSystem, Interval};
use ehs_core::verdict::{CheckError, Regime, Verdict};

use crate::report::*;
use crate::{BoundModeArg, CheckArgs, Direction, DotArgs, Engine, InfoArgs, Logic, ReduceArgs};

fn load_system(path: &Path) -> Result<InterpretedSystem, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::usage)?;
    let def = parse_isrl(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::usage)?;
    InterpretedSystem::new(def)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::usage)
}

fn formula_text(
    text: &Option<String>,
    file: &Option<std::path::PathBuf>,
) -> Result<String, Failure> {
    match (text, file) {
        (Some(t), _) => Ok(t.clone()),
        (None, Some(p)) => fs::read_to_string(p)
            .map(|s| s.trim().to_string())
            .with_context(|| format!("cannot read {}", p.display()))
            .map_err(Failure::usage),
        (None, None) => Err(Failure::usage(anyhow!("no formula given"))),
    }
}

fn parse_interval(sys: &InterpretedSystem, text: Option<&str>) -> Result<Interval, Failure> {
    match text {
        None => Ok(Interval::point(sys.initial_config())),
        Some(t) => {
            let names: Vec<&str> = t
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if names.is_empty() {
                return Err(Failure::usage(anyhow!("empty interval")));
            }
            sys.interval_by_names(&names).map_err(Failure::usage)
        }
    }
}

fn check_failure(e: CheckError) -> Failure {
    if e.is_infeasible() {
        Failure::inconclusive(e)
            .with_hint("try --bound-mode user --bound N, or raise --frontier-ceiling")
    } else {
        Failure::usage(e)
    }
}

fn reduction_failure(e: ReductionError) -> Failure {
    Failure::usage(e)
}

enum Parsed {
    Plus(FormulaPlus),
    Re(FormulaRe),
}

impl Parsed {
    fn fragment(&self) -> Fragment {
        match self {
            Parsed::Plus(f) => f.fragment(),
            Parsed::Re(f) => f.fragment(),
        }
    }

    fn text(&self) -> String {
        match self {
            Parsed::Plus(f) => f.to_string(),
            Parsed::Re(f) => f.to_string(),
        }
    }
}

fn parse_formula(text: &str, logic: Logic) -> Result<Parsed, Failure> {
    match logic {
        Logic::Plus => parse_plus(text).map(Parsed::Plus),
        Logic::Re => parse_re(text).map(Parsed::Re),
    }
    .map_err(Failure::usage)
}

fn exit_for(v: Verdict) -> u8 {
    match (v.regime, v.holds) {
        (Regime::Conclusive, true) => EXIT_HOLDS,
        (Regime::Conclusive, false) => EXIT_FAILS,
        (Regime::BoundedAt(_), _) => EXIT_INCONCLUSIVE,
    }
}

struct Run {
    verdict: Verdict,
    engine: &'static str,
    bound: String,
    stats: BTreeMap<&'static str, u64>,
    trace: Option<String>,
}

fn abln_options(a: &CheckArgs) -> Result<AblnOptions, Failure> {
    let mode = match a.bound_mode {
        BoundModeArg::Paper => BoundMode::PaperBound,
        BoundModeArg::Tight => BoundMode::Tight,
        BoundModeArg::User => BoundMode::UserBound(
            a.bound
                .ok_or_else(|| Failure::usage(anyhow!("--bound-mode user needs --bound")))?,
        ),
    };
    Ok(AblnOptions {
        mode,
        frontier_ceiling: a.frontier_ceiling.unwrap_or(DEFAULT_FRONTIER_CEILING),
        cache: true,
    })
}

fn bound_mode_name(m: BoundMode) -> String {
    match m {
        BoundMode::PaperBound => "paper".into(),
        BoundMode::Tight => "tight".into(),
        BoundMode::UserBound(k) => format!("user {k}"),
    }
}

fn run_engine(
    a: &CheckArgs,
    sys: &InterpretedSystem,
    interval: &Interval,
    f: &Parsed,
    engine: Engine,
) -> Result<Run, Failure> {
    match engine {
        Engine::Oracle => {
            let bound = a
                .bound
                .ok_or_else(|| Failure::usage(anyhow!("the oracle needs --bound")))?;
            let anchored = anchor(sys, interval).map_err(Failure::usage)?;
            let holds = match f {
                Parsed::Plus(f) => oracle_check(sys, &anchored, f, bound),
                Parsed::Re(f) => oracle_check_re(sys, &anchored, f, bound),
            }
            .map_err(check_failure)?;
            let regime = if f.fragment() == Fragment::Bde && bound >= interval.len() {
                Regime::Conclusive
            } else {
                Regime::BoundedAt(bound)
            };
            return Ok(Run {
                verdict: Verdict { holds, regime },
                engine: "oracle",
                bound: format!("oracle {bound}"),
                stats: BTreeMap::new(),
                trace: None,
            });
        }
        Engine::Auto => unreachable!("resolved by the caller"),
        Engine::Bde | Engine::Abln => {}
    }
    // the decision procedures work on plain variables
    let (owned, plus);
    let (sys, f) = match f {
        Parsed::Plus(f) => (sys, f),
        Parsed::Re(f) => {
            let (s, g) = to_regular_labelling(sys, f).map_err(reduction_failure)?;
            owned = s;
            plus = g;
            (&owned, &plus)
        }
    };
    if engine == Engine::Bde {
        let r = check_bde_with(
            sys,
            interval,
            f,
            BdeOptions {
                cache: true,
                trace: a.trace,
            },
        )
        .map_err(check_failure)?;
        let stats = BTreeMap::from([
            ("evaluations", r.evaluations as u64),
            ("max_visited_len", r.max_visited_len as u64),
        ]);
        return Ok(Run {
            verdict: Verdict::conclusive(r.holds),
            engine: "bde",
            bound: format!("none (intervals up to length {})", interval.len()),
            stats,
            trace: r.trace.map(|t| t.to_string()),
        });
    }
    let opts = abln_options(a)?;
    let r = check_abln_with(sys, interval, f, opts).map_err(check_failure)?;
    let stats = BTreeMap::from([
        ("enumerations", r.enumerations as u64),
        ("witness_searches", r.witness_searches as u64),
        ("max_search_len", r.max_search_len as u64),
    ]);
    Ok(Run {
        verdict: r.verdict,
        engine: "abln",
        bound: if r.enumerations == 0 {
            format!("{} (witness searches only)", bound_mode_name(opts.mode))
        } else {
            format!(
                "{} (searched up to length {})",
                bound_mode_name(opts.mode),
                r.max_search_len
            )
        },
        stats,
        trace: None,
    })
}

pub fn check(a: CheckArgs, oracle: bool) -> Outcome {
    let json = a.json;
    let result = check_inner(&a, oracle);
    if let (true, Err(e)) = (json, &result) {
        print_json(&ErrorReport {
            error: format!("{:#}", e.error),
            hint: e.hint.clone(),
            exit_code: e.code,
        });
    }
    result
}

fn check_inner(a: &CheckArgs, oracle: bool) -> Outcome {
    let sys = load_system(&a.system)?;
    let text = formula_text(&a.formula.formula, &a.formula.formula_file)?;
    let mut f = parse_formula(&text, a.formula.logic)?;
    if a.all_initial {
        f = match f {
            Parsed::Plus(f) => Parsed::Plus(Formula::square(Modality::A, f)),
            Parsed::Re(f) => Parsed::Re(Formula::square(Modality::A, f)),
        };
    }
    let interval = parse_interval(&sys, a.interval.as_deref())?;
    let engine = match (oracle, a.engine) {
        (true, _) => Engine::Oracle,
        (false, Engine::Auto) => match f.fragment() {
            Fragment::Bde => Engine::Bde,
            Fragment::Abln => Engine::Abln,
            Fragment::Full => {
                return Err(Failure::usage(anyhow!(
                    "`{}` is in neither decidable fragment",
                    f.text()
                ))
                .with_hint("use --engine oracle --bound N for a bounded answer"))
            }
        },
        (false, e) => e,
    };
    let started = Instant::now();
    let run = run_engine(a, &sys, &interval, &f, engine)?;
    let elapsed = started.elapsed();
    let code = exit_for(run.verdict);
    let report = CheckReport {
        formula: f.text(),
        interval: interval
            .configs()
            .iter()
            .map(|&g| sys.config_name(g).to_string())
            .collect(),
        engine: run.engine,
        holds: run.verdict.holds,
        conclusive: run.verdict.regime.is_conclusive(),
        regime: run.verdict.regime.to_string(),
        bound: run.bound,
        stats: run.stats,
        trace: run.trace,
        exit_code: code,
    };
    if a.json {
        print_json(&report);
    } else {
        println!("formula:  {}", report.formula);
        println!("interval: {}", report.interval.join(" "));
        println!("engine:   {}", report.engine);
        println!("verdict:  {}", if report.holds { "holds" } else { "fails" });
        println!("regime:   {}", report.regime);
        println!("bound:    {}", report.bound);
        for (k, v) in &report.stats {
            println!("{k}: {v}");
        }
        println!("elapsed:  {:.3} ms", elapsed.as_secs_f64() * 1e3);
        if let Some(t) = &report.trace {
            print!("{t}");
        }
    }
    Ok(code)
}

fn write_or_print(path: &Option<std::path::PathBuf>, text: &str) -> Result<bool, Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map(|_| true)
            .map_err(Failure::usage),
        None => Ok(false),
    }
}

pub fn reduce(a: ReduceArgs) -> Outcome {
    let sys = load_system(&a.system)?;
    let text = formula_text(&a.formula, &a.formula_file)?;
    let (out, formula) = match a.direction {
        Direction::ToRe => {
            let f = parse_plus(&text).map_err(Failure::usage)?;
            let (s, g) = to_point_based(&sys, &f).map_err(reduction_failure)?;
            let again =
                parse_re(&g.to_string()).map_err(|e| Failure::usage(anyhow!("internal: {e}")))?;
            if again != g {
                return Err(Failure::usage(anyhow!(
                    "internal: formula text does not round-trip"
                )));
            }
            (s, g.to_string())
        }
        Direction::ToPlus => {
            let f = parse_re(&text).map_err(Failure::usage)?;
            let (s, g) = to_regular_labelling(&sys, &f).map_err(reduction_failure)?;
            (s, g.to_string())
        }
    };
    let system_text = print_isrl(out.def());
    let reparsed =
        parse_isrl(&system_text).map_err(|e| Failure::usage(anyhow!("internal: {e}")))?;
    if print_isrl(&reparsed) != system_text {
        return Err(Failure::usage(anyhow!(
            "internal: system text does not round-trip"
        )));
    }
    let variables: Vec<String> = (0..out.num_vars())
        .map(|v| out.var_name(v).to_string())
        .collect();
    let wrote_system = write_or_print(&a.out_system, &system_text)?;
    let wrote_formula = write_or_print(&a.out_formula, &format!("{formula}\n"))?;
    if a.json {
        print_json(&ReduceReport {
            system: system_text,
            formula,
            variables,
        });
    } else {
        if !wrote_system {
            print!("{system_text}");
        }
        if !wrote_formula {
            println!("# formula: {formula}");
        }
    }
    Ok(EXIT_HOLDS)
}

fn variables(sys: &InterpretedSystem) -> Vec<VariableInfo> {
    (0..sys.num_vars())
        .map(|v| VariableInfo {
            name: sys.var_name(v).to_string(),
            dfa_states: sys.dfa(v).num_states(),
            shape: sys.shape(v).to_string(),
        })
        .collect()
}

fn optional_formula(a: &InfoArgs) -> Result<Option<Parsed>, Failure> {
    if a.formula.is_none() && a.formula_file.is_none() {
        return Ok(None);
    }
    let text = formula_text(&a.formula, &a.formula_file)?;
    parse_formula(&text, a.logic).map(Some)
}

pub fn classify(a: InfoArgs) -> Outcome {
    let sys = load_system(&a.system)?;
    let f = optional_formula(&a)?;
    let report = ClassifyReport {
        point_based: sys.is_point_based(),
        variables: variables(&sys),
        fragment: f.as_ref().map(|f| f.fragment().to_string()),
    };
    if a.json {
        print_json(&report);
    } else {
        for v in &report.variables {
            println!("{}: {} ({} states)", v.name, v.shape, v.dfa_states);
        }
        println!("point-based: {}", report.point_based);
        if let Some(fr) = &report.fragment {
            println!("fragment: {fr}");
        }
    }
    Ok(EXIT_HOLDS)
}

fn fis_report(v: &FisValue) -> FisReport {
    FisReport {
        symbolic: v.symbolic(),
        scientific: v.scientific(),
        exact: v.exact().map(|e| e.to_string()),
    }
}

pub fn stats(a: InfoArgs) -> Outcome {
    let sys = load_system(&a.system)?;
    let f = optional_formula(&a)?;
    let mut report = StatsReport {
        agents: sys.num_agents(),
        configurations: sys.num_configs(),
        reachable: sys.reachable_configs().len(),
        transitions: sys.transition_pairs().len(),
        variables: variables(&sys),
        formula: f.as_ref().map(Parsed::text),
        fragment: f.as_ref().map(|f| f.fragment().to_string()),
        fis_literal: None,
        fis_tight: None,
        fis_note: None,
    };
    if let Some(f) = &f {
        let (owned, plus);
        let (s, g) = match f {
            Parsed::Plus(g) => (&sys, g),
            Parsed::Re(r) => {
                let (s, g) = to_regular_labelling(&sys, r).map_err(reduction_failure)?;
                owned = s;
                plus = g;
                (&owned, &plus)
            }
        };
        match (
            fis_bound_with(s, g, FisMode::Literal),
            fis_bound_with(s, g, FisMode::Tight),
        ) {
            (Ok(l), Ok(t)) => {
                report.fis_literal = Some(fis_report(&l));
                report.fis_tight = Some(fis_report(&t));
            }
            (Err(e), _) | (_, Err(e)) => report.fis_note = Some(e.to_string()),
        }
    }
    if a.json {
        print_json(&report);
    } else {
        println!("agents: {}", report.agents);
        println!("|G|: {}", report.configurations);
        println!("reachable: {}", report.reachable);
        println!("transitions: {}", report.transitions);
        for v in &report.variables {
            println!("DFA({}): {} states, {}", v.name, v.dfa_states, v.shape);
        }
        if let Some(text) = &report.formula {
            println!("formula: {text}");
        }
        if let Some(fr) = &report.fragment {
            println!("fragment: {fr}");
        }
        let show = |name: &str, r: &Option<FisReport>| {
            if let Some(r) = r {
                match (&r.exact, &r.scientific) {
                    (Some(e), _) if *e == r.symbolic => println!("{name}: {e}"),
                    (_, Some(sci)) => println!("{name}: {} (~{sci})", r.symbolic),
                    _ => println!("{name}: {}", r.symbolic),
                }
            }
        };
        show("f^IS literal", &report.fis_literal);
        show("f^IS tight", &report.fis_tight);
        if let Some(n) = &report.fis_note {
            println!("f^IS: n/a ({n})");
        }
    }
    Ok(EXIT_HOLDS)
}

pub fn export_dot(a: DotArgs) -> Outcome {
    let sys = load_system(&a.system)?;
    let dot = if a.target == "tg" {
        sys.tg_to_dot()
    } else if let Some(var) = a.target.strip_prefix("automaton:") {
        let v = sys
            .var_index(var)
            .ok_or_else(|| Failure::usage(anyhow!("unknown variable `{var}`")))?;
        sys.dfa(v).to_dot(var)
    } else if let Some(rest) = a.target.strip_prefix("mct:") {
        let (text, horizon) = rest
            .rsplit_once(':')
            .ok_or_else(|| Failure::usage(anyhow!("expected mct:FORMULA:HORIZON")))?;
        let horizon: usize = horizon
            .trim()
            .parse()
            .map_err(|_| Failure::usage(anyhow!("bad horizon `{horizon}`")))?;
        let f = parse_plus(text).map_err(Failure::usage)?;
        let interval = parse_interval(&sys, a.interval.as_deref())?;
        let tree = compute_mct(&sys, &interval, &f, horizon).map_err(check_failure)?;
        mct_to_dot(&sys, &tree, &f).map_err(check_failure)?
    } else {
        return Err(Failure::usage(anyhow!("unknown target `{}`", a.target))
            .with_hint("targets are tg, automaton:VAR and mct:FORMULA:HORIZON"));
    };
    if !write_or_print(&a.out, &dot)? {
        print!("{dot}");
    }
    Ok(EXIT_HOLDS)
}
