//! Bounded checker for formulas over A, B̄, L and N.
//!
//! `<L>` over a modal operand is rewritten to `<A>(!pi & <A>φ)`. A diamond
//! over a modal-free operand is decided exactly by
//! [`regular_witness_search`]; any other diamond searches successors up to
//! `|I| + k`, where `k` comes from the [`BoundMode`].

mod mct;
mod witness;

use std::collections::HashMap;

use crate::formula::{fis_bound_with, AgentRef, FisMode, FisValue, Formula, FormulaPlus, Modality};
use crate::system::{
    common_class, count_paths, epi_class, strictly_reachable, InterpretedSystem, Interval, Relation,
};
use crate::verdict::{CheckError, Regime, Verdict};

pub use mct::{compute_mct, mct_to_dot, Mct, MctLabel};
pub use witness::{regular_witness_search, WitnessStart};

pub const DEFAULT_FRONTIER_CEILING: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// The literal interval-type bound of the operand.
    PaperBound,
    /// A fixed extra length.
    UserBound(usize),
    /// The tighter per-level count.
    Tight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AblnOptions {
    pub mode: BoundMode,
    /// Largest number of candidate intervals a single search may enumerate.
    pub frontier_ceiling: u128,
    pub cache: bool,
}

impl Default for AblnOptions {
    fn default() -> Self {
        AblnOptions {
            mode: BoundMode::PaperBound,
            frontier_ceiling: DEFAULT_FRONTIER_CEILING,
            cache: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AblnReport {
    pub verdict: Verdict,
    /// Longest successor length any enumeration was allowed to reach.
    pub max_search_len: usize,
    pub witness_searches: usize,
    pub enumerations: usize,
}

// Per-diamond search parameters, computed once per operand.
#[derive(Clone)]
struct Budget {
    extra: usize,
    conclusive: bool,
}

struct Checker<'a> {
    sys: &'a InterpretedSystem,
    opts: AblnOptions,
    budgets: HashMap<usize, Budget>,
    frontier: HashMap<(Relation, usize, usize), u128>,
    cache: HashMap<Memo, (bool, Regime)>,
    report: AblnReport,
}

// What a modal node's value depends on: A and N successors (and the search
// length |I| + k) only see `last(I)` and `|I|`.
#[derive(PartialEq, Eq, Hash)]
enum Memo {
    Diamond(usize, Modality, Vec<usize>),
    Class(usize, Vec<usize>),
}

fn key(f: &Formula<usize>) -> usize {
    f as *const Formula<usize> as usize
}

fn agent(a: &AgentRef) -> usize {
    match a {
        AgentRef::Index(i) => *i,
        AgentRef::Name(n) => unreachable!("agent `{n}` not resolved"),
    }
}

impl Checker<'_> {
    fn budget(&mut self, operand: &Formula<usize>) -> Result<Budget, CheckError> {
        if let Some(b) = self.budgets.get(&key(operand)) {
            return Ok(b.clone());
        }
        let literal = fis_bound_with(self.sys, operand, FisMode::Literal)?;
        let (extra, value): (Option<usize>, FisValue) = match self.opts.mode {
            BoundMode::PaperBound => (literal.to_usize(), literal.clone()),
            BoundMode::Tight => {
                let t = fis_bound_with(self.sys, operand, FisMode::Tight)?;
                (t.to_usize(), t)
            }
            BoundMode::UserBound(k) => (Some(k), FisValue::from_u64(k as u64)),
        };
        let extra = extra.ok_or_else(|| CheckError::Infeasible {
            what: format!("a witness bound of {value}"),
            estimate: value.to_string(),
            ceiling: self.opts.frontier_ceiling,
        })?;
        let b = Budget {
            extra,
            conclusive: literal.cmp_value(&value).is_le(),
        };
        self.budgets.insert(key(operand), b.clone());
        Ok(b)
    }

    // Rejects searches whose candidate count would exceed the ceiling.
    fn guard(&mut self, rel: Relation, i: &Interval, max_len: usize) -> Result<(), CheckError> {
        let (starts, len) = match rel {
            Relation::A => (vec![i.last()], max_len),
            Relation::N => (self.sys.successors(i.last()).to_vec(), max_len),
            _ => (vec![i.last()], max_len + 1 - i.len()),
        };
        let cap = self.opts.frontier_ceiling;
        let k = (rel, i.last(), len);
        let count = match self.frontier.get(&k) {
            Some(&c) => c,
            None => {
                let c = count_paths(self.sys, &starts, len, cap);
                self.frontier.insert(k, c);
                c
            }
        };
        if count > cap {
            return Err(CheckError::Infeasible {
                what: format!(
                    "<{rel}> search from {} up to length {max_len}",
                    self.sys.config_name(i.last())
                ),
                estimate: if count == u128::MAX {
                    "more than 2^128".into()
                } else {
                    format!("more than {cap}")
                },
                ceiling: cap,
            });
        }
        Ok(())
    }

    fn eval(&mut self, i: &Interval, f: &Formula<usize>) -> Result<(bool, Regime), CheckError> {
        let conclusive = |b: bool| Ok((b, Regime::Conclusive));
        match f {
            Formula::True => conclusive(true),
            Formula::False => conclusive(false),
            Formula::Pi => conclusive(i.is_point()),
            Formula::Atom(v) => conclusive(self.sys.label_holds(*v, i)),
            Formula::Not(x) => self.eval(i, x).map(|(b, r)| (!b, r)),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                let (lv, lr) = self.eval(i, l)?;
                let short = match f {
                    Formula::And(..) => (!lv).then_some(false),
                    Formula::Or(..) => lv.then_some(true),
                    _ => (!lv).then_some(true),
                };
                if let Some(v) = short {
                    return Ok((v, lr));
                }
                let (rv, rr) = self.eval(i, r)?;
                Ok((rv, lr.meet(rr)))
            }
            Formula::Know(..) | Formula::Common(..) => {
                // an agent's class only sees its own local states
                let seen = match f {
                    Formula::Know(a, _) => i
                        .configs()
                        .iter()
                        .map(|&g| self.sys.local(g, agent(a)))
                        .collect(),
                    _ => i.configs().to_vec(),
                };
                let memo = Memo::Class(key(f), seen);
                if let Some(&hit) = self.cache.get(&memo) {
                    return Ok(hit);
                }
                let out = self.class(i, f)?;
                if self.opts.cache {
                    self.cache.insert(memo, out);
                }
                Ok(out)
            }
            Formula::Diamond(m, x) => self.diamond(i, *m, x),
            Formula::Square(..) => unreachable!("boxes are desugared"),
        }
    }

    fn class(&mut self, i: &Interval, f: &Formula<usize>) -> Result<(bool, Regime), CheckError> {
        let (js, x) = match f {
            Formula::Know(a, x) => (epi_class(self.sys, i, agent(a)), x),
            Formula::Common(g, x) => {
                let group: Vec<usize> = g.iter().map(agent).collect();
                (common_class(self.sys, i, &group), x)
            }
            _ => unreachable!(),
        };
        let mut regime = Regime::Conclusive;
        for j in &js {
            let (v, r) = self.eval(j, x)?;
            regime = regime.meet(r);
            if !v {
                return Ok((false, regime));
            }
        }
        Ok((true, regime))
    }

    fn diamond(
        &mut self,
        i: &Interval,
        m: Modality,
        x: &Formula<usize>,
    ) -> Result<(bool, Regime), CheckError> {
        if self.opts.cache {
            let seen = match m {
                Modality::A | Modality::N | Modality::L => vec![i.last(), i.len()],
                _ => i.configs().to_vec(),
            };
            let k = Memo::Diamond(key(x), m, seen);
            if let Some(&hit) = self.cache.get(&k) {
                return Ok(hit);
            }
            let out = self.diamond_uncached(i, m, x)?;
            self.cache.insert(k, out);
            return Ok(out);
        }
        self.diamond_uncached(i, m, x)
    }

    fn diamond_uncached(
        &mut self,
        i: &Interval,
        m: Modality,
        x: &Formula<usize>,
    ) -> Result<(bool, Regime), CheckError> {
        if m == Modality::L {
            // only kept over modal-free operands
            self.report.witness_searches += 1;
            let start = WitnessStart::In(strictly_reachable(self.sys, i.last()));
            return Ok((
                witness::search(self.sys, &start, x).is_some(),
                Regime::Conclusive,
            ));
        }
        let rel = m
            .relation()
            .filter(|r| r.is_unbounded())
            .expect("fragment checked");
        // operand nodes live as long as the prepared formula, so their
        // addresses are stable keys
        if x.is_modal_free() {
            self.report.witness_searches += 1;
            let start = match rel {
                Relation::A => WitnessStart::At(i.last()),
                Relation::N => WitnessStart::In(self.sys.successors(i.last()).to_vec()),
                _ => WitnessStart::Extends(i.clone()),
            };
            return Ok((
                witness::search(self.sys, &start, x).is_some(),
                Regime::Conclusive,
            ));
        }
        let budget = self.budget(x)?;
        let max_len = i
            .len()
            .checked_add(budget.extra)
            .ok_or_else(|| CheckError::Infeasible {
                what: "witness length".into(),
                estimate: "overflow".into(),
                ceiling: self.opts.frontier_ceiling,
            })?;
        self.guard(rel, i, max_len)?;
        self.report.enumerations += 1;
        self.report.max_search_len = self.report.max_search_len.max(max_len);
        let mut regime = if budget.conclusive {
            Regime::Conclusive
        } else {
            Regime::BoundedAt(max_len)
        };
        let (mut path, eval_from) = match rel {
            Relation::A => (vec![i.last()], 1),
            Relation::N => (Vec::new(), 1),
            _ => (i.configs().to_vec(), i.len() + 1),
        };
        let found = if rel == Relation::N {
            let mut found = false;
            for &h in self.sys.successors(i.last()) {
                path.push(h);
                found = self.search(&mut path, eval_from, max_len, x, &mut regime)?;
                path.pop();
                if found {
                    break;
                }
            }
            found
        } else {
            self.search(&mut path, eval_from, max_len, x, &mut regime)?
        };
        Ok((found, regime))
    }

    fn search(
        &mut self,
        path: &mut Vec<usize>,
        eval_from: usize,
        max_len: usize,
        x: &Formula<usize>,
        regime: &mut Regime,
    ) -> Result<bool, CheckError> {
        if path.len() >= eval_from {
            let (v, r) = self.eval(&Interval::new(path.clone()), x)?;
            *regime = regime.meet(r);
            if v {
                return Ok(true);
            }
        }
        if path.len() < max_len {
            let last = *path.last().expect("non-empty");
            for &h in self.sys.successors(last) {
                path.push(h);
                let found = self.search(path, eval_from, max_len, x, regime)?;
                path.pop();
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// Rewrites `<L>` and the Boolean/box sugar, checks the fragment and binds
/// names.
pub(crate) fn prepare(
    sys: &InterpretedSystem,
    f: &FormulaPlus,
) -> Result<Formula<usize>, CheckError> {
    check_fragment(f, &f.eliminate_l().desugar(), sys)
}

// Like `prepare`, but keeps `<L>` wherever its operand is modal-free.
fn prepare_for_check(
    sys: &InterpretedSystem,
    f: &FormulaPlus,
) -> Result<Formula<usize>, CheckError> {
    fn go(f: &FormulaPlus) -> FormulaPlus {
        match f {
            Formula::Diamond(Modality::L, x) => {
                let x = go(x);
                if x.is_modal_free() {
                    Formula::diamond(Modality::L, x)
                } else {
                    Formula::diamond(
                        Modality::A,
                        Formula::and(Formula::not(Formula::Pi), Formula::diamond(Modality::A, x)),
                    )
                }
            }
            Formula::Diamond(m, x) => Formula::diamond(*m, go(x)),
            Formula::Not(x) => Formula::not(go(x)),
            Formula::And(l, r) => Formula::and(go(l), go(r)),
            Formula::Know(a, x) => Formula::Know(a.clone(), Box::new(go(x))),
            Formula::Common(g, x) => Formula::Common(g.clone(), Box::new(go(x))),
            other => other.clone(),
        }
    }
    check_fragment(f, &go(&f.desugar()), sys)
}

fn check_fragment(
    f: &FormulaPlus,
    g: &FormulaPlus,
    sys: &InterpretedSystem,
) -> Result<Formula<usize>, CheckError> {
    if let Some(m) = g
        .temporal_modalities()
        .into_iter()
        .find(|m| !matches!(m, Modality::A | Modality::Bbar | Modality::L | Modality::N))
    {
        let why = if m.is_backward() {
            "backward modalities depend on histories"
        } else {
            "only A, Bbar, L and N are supported"
        };
        return Err(CheckError::Fragment(format!("<{m}> in `{f}`: {why}")));
    }
    Ok(g.bind(sys)?)
}

pub fn check_abln(
    sys: &InterpretedSystem,
    interval: &Interval,
    f: &FormulaPlus,
    mode: BoundMode,
) -> Result<Verdict, CheckError> {
    let opts = AblnOptions {
        mode,
        ..AblnOptions::default()
    };
    check_abln_with(sys, interval, f, opts).map(|r| r.verdict)
}

pub fn check_abln_with(
    sys: &InterpretedSystem,
    interval: &Interval,
    f: &FormulaPlus,
    opts: AblnOptions,
) -> Result<AblnReport, CheckError> {
    if let BoundMode::UserBound(0) = opts.mode {
        return Err(CheckError::Bound("a user bound must be at least 1".into()));
    }
    let bound = prepare_for_check(sys, f)?;
    let interval = sys.interval(interval.configs().to_vec())?;
    let mut c = Checker {
        sys,
        opts,
        budgets: HashMap::new(),
        frontier: HashMap::new(),
        cache: HashMap::new(),
        report: AblnReport {
            verdict: Verdict::conclusive(false),
            max_search_len: 0,
            witness_searches: 0,
            enumerations: 0,
        },
    };
    let (holds, regime) = c.eval(&interval, &bound)?;
    c.report.verdict = Verdict { holds, regime };
    Ok(c.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_plus;
    use crate::regex::Regex;
    use crate::system::{parse_isrl, SystemDef};

    fn is_ex() -> InterpretedSystem {
        InterpretedSystem::new(parse_isrl(include_str!("../../models/is_ex.isrl")).unwrap())
            .unwrap()
    }

    fn run(
        s: &InterpretedSystem,
        i: Vec<usize>,
        f: &str,
        mode: BoundMode,
    ) -> Result<Verdict, CheckError> {
        check_abln(s, &Interval::new(i), &parse_plus(f).unwrap(), mode)
    }

    #[test]
    fn examples() {
        let s = is_ex();
        assert_eq!(
            run(&s, vec![0], "<A> p", BoundMode::UserBound(3)),
            Ok(Verdict::conclusive(true))
        );
        for mode in [
            BoundMode::PaperBound,
            BoundMode::Tight,
            BoundMode::UserBound(1),
        ] {
            assert_eq!(
                run(&s, vec![0], "K{0} pi & !<A> p", mode),
                Ok(Verdict::conclusive(false))
            );
        }
    }

    #[test]
    fn self_loop_system() {
        let gg = Regex::concat(Regex::Symbol(0), Regex::Symbol(0));
        let s = InterpretedSystem::new(SystemDef::from_graph(
            1,
            &[(0, 0)],
            0,
            vec![("p".into(), gg)],
        ))
        .unwrap();
        assert_eq!(
            run(&s, vec![0], "<A> p", BoundMode::PaperBound),
            Ok(Verdict::conclusive(true))
        );
        // nested operand: the literal bound is far beyond the ceiling
        let e = run(&s, vec![0], "<A> <A> p", BoundMode::PaperBound).unwrap_err();
        assert!(e.is_infeasible());
        let v = run(&s, vec![0], "<A> <A> p", BoundMode::UserBound(2)).unwrap();
        assert_eq!(v.regime, Regime::BoundedAt(3));
        let v = run(&s, vec![0], "<A> <A> p", BoundMode::Tight).unwrap();
        assert!(v.holds && !v.regime.is_conclusive());
    }

    #[test]
    fn later_and_next() {
        let s = is_ex();
        // modal-free operands need no length bound
        assert_eq!(
            run(&s, vec![0], "<L> p", BoundMode::PaperBound),
            Ok(Verdict::conclusive(true))
        );
        assert_eq!(
            run(&s, vec![2], "[L] !pi", BoundMode::PaperBound),
            Ok(Verdict::conclusive(false))
        );
        assert!(run(&s, vec![0], "<L>(pi & <A> p)", BoundMode::PaperBound)
            .unwrap_err()
            .is_infeasible());
        let v = run(&s, vec![0], "<L>(pi & <A> p)", BoundMode::UserBound(3)).unwrap();
        assert!(v.holds);
        assert!(
            run(&s, vec![0], "<L> p", BoundMode::UserBound(4))
                .unwrap()
                .holds
        );
        assert!(
            !run(&s, vec![0], "[L] p", BoundMode::UserBound(4))
                .unwrap()
                .holds
        );
        assert!(
            run(&s, vec![0, 1], "<N> p", BoundMode::UserBound(4))
                .unwrap()
                .holds
        );
        assert!(
            run(&s, vec![0], "<Bbar> p", BoundMode::UserBound(4))
                .unwrap()
                .holds
        );
    }

    #[test]
    fn rejections() {
        let s = is_ex();
        assert!(matches!(
            run(&s, vec![0], "<Lbar> p", BoundMode::Tight),
            Err(CheckError::Fragment(_))
        ));
        assert!(matches!(
            run(&s, vec![0], "<D> p", BoundMode::Tight),
            Err(CheckError::Fragment(_))
        ));
        assert!(matches!(
            run(&s, vec![0], "p", BoundMode::UserBound(0)),
            Err(CheckError::Bound(_))
        ));
        // branching system, nested operand, astronomically large bound
        let e = run(&s, vec![0], "<A> <A> p", BoundMode::PaperBound).unwrap_err();
        assert!(e.is_infeasible());
    }

    #[test]
    fn ceiling_is_enforced_in_user_mode() {
        let s = is_ex();
        let opts = AblnOptions {
            mode: BoundMode::UserBound(30),
            frontier_ceiling: 100,
            cache: false,
        };
        let r = check_abln_with(
            &s,
            &Interval::point(0),
            &parse_plus("<A>(p & <A> p)").unwrap(),
            opts,
        );
        assert!(r.unwrap_err().is_infeasible());
    }
}
