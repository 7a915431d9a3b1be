//! Formula syntax for both logics, plus the structural operations the
//! engines rely on.

mod fis;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::regex::{Regex, RegexError};
use crate::system::{InterpretedSystem, Relation};

pub use fis::{fis_bound, fis_bound_with, FisMode, FisValue};
pub use parse::{parse_plus, parse_re};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown modality `{name}` at {pos}")]
    UnknownModality { pos: usize, name: String },
    #[error("in regex atom at {pos}: {source}")]
    Regex { pos: usize, source: RegexError },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("{0}")]
    Fragment(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modality {
    A,
    Abar,
    B,
    Bbar,
    D,
    Dbar,
    E,
    Ebar,
    L,
    Lbar,
    N,
    Nbar,
    O,
    Obar,
}

impl Modality {
    pub const ALL: [Modality; 14] = [
        Modality::A,
        Modality::Abar,
        Modality::B,
        Modality::Bbar,
        Modality::D,
        Modality::Dbar,
        Modality::E,
        Modality::Ebar,
        Modality::L,
        Modality::Lbar,
        Modality::N,
        Modality::Nbar,
        Modality::O,
        Modality::Obar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Modality::A => "A",
            Modality::Abar => "Abar",
            Modality::B => "B",
            Modality::Bbar => "Bbar",
            Modality::D => "D",
            Modality::Dbar => "Dbar",
            Modality::E => "E",
            Modality::Ebar => "Ebar",
            Modality::L => "L",
            Modality::Lbar => "Lbar",
            Modality::N => "N",
            Modality::Nbar => "Nbar",
            Modality::O => "O",
            Modality::Obar => "Obar",
        }
    }

    pub fn from_name(name: &str) -> Option<Modality> {
        Modality::ALL.into_iter().find(|m| m.name() == name)
    }

    /// The inverse relations, which need the interval's past.
    pub fn is_backward(self) -> bool {
        matches!(
            self,
            Modality::Abar
                | Modality::Dbar
                | Modality::Ebar
                | Modality::Lbar
                | Modality::Nbar
                | Modality::Obar
        )
    }

    /// The successor relation enumerated by the engines, if there is one.
    pub fn relation(self) -> Option<Relation> {
        match self {
            Modality::A => Some(Relation::A),
            Modality::B => Some(Relation::B),
            Modality::Bbar => Some(Relation::Bbar),
            Modality::D => Some(Relation::D),
            Modality::E => Some(Relation::E),
            Modality::N => Some(Relation::N),
            _ => None,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentRef {
    Index(usize),
    Name(String),
}

impl AgentRef {
    pub fn resolve(&self, sys: &InterpretedSystem) -> Result<usize, FormulaError> {
        match self {
            AgentRef::Index(i) if *i < sys.num_agents() => Ok(*i),
            AgentRef::Index(i) => Err(FormulaError::UnknownAgent(i.to_string())),
            AgentRef::Name(n) => sys
                .agent_index(n)
                .ok_or_else(|| FormulaError::UnknownAgent(n.clone())),
        }
    }
}

impl fmt::Display for AgentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentRef::Index(i) => write!(f, "{i}"),
            AgentRef::Name(n) => f.write_str(n),
        }
    }
}

/// Letter predicates of regular atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// Configurations whose valuation contains the variable.
    Var(String),
    /// Configurations whose valuation lacks the variable.
    NotVar(String),
    Any,
    /// Configurations whose valuation is exactly this set.
    Set(Vec<String>),
}

impl Letter {
    /// Whether a configuration with valuation `holds` (by variable name) matches.
    pub fn matches(&self, holds: impl Fn(&str) -> bool, all_vars: &[String]) -> bool {
        match self {
            Letter::Var(p) => holds(p),
            Letter::NotVar(p) => !holds(p),
            Letter::Any => true,
            Letter::Set(xs) => all_vars.iter().all(|v| holds(v) == xs.contains(v)),
        }
    }

    pub fn variables(&self) -> Vec<&str> {
        match self {
            Letter::Var(p) | Letter::NotVar(p) => vec![p.as_str()],
            Letter::Any => Vec::new(),
            Letter::Set(xs) => xs.iter().map(String::as_str).collect(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Var(p) => f.write_str(p),
            Letter::NotVar(p) => write!(f, "!{p}"),
            Letter::Any => f.write_str("T"),
            Letter::Set(xs) => write!(f, "[{}]", xs.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula<A> {
    True,
    False,
    Pi,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Box<Formula<A>>, Box<Formula<A>>),
    Or(Box<Formula<A>>, Box<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Know(AgentRef, Box<Formula<A>>),
    Common(Vec<AgentRef>, Box<Formula<A>>),
    Diamond(Modality, Box<Formula<A>>),
    Square(Modality, Box<Formula<A>>),
}

pub type FormulaPlus = Formula<String>;
pub type FormulaRe = Formula<Regex<Letter>>;

/// A modal operator heading a top-level subformula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalOp {
    Know(AgentRef),
    Common(Vec<AgentRef>),
    Diamond(Modality),
}

impl fmt::Display for ModalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalOp::Know(a) => write!(f, "K{{{a}}}"),
            ModalOp::Common(g) => {
                let parts: Vec<String> = g.iter().map(ToString::to_string).collect();
                write!(f, "C{{{}}}", parts.join(","))
            }
            ModalOp::Diamond(m) => write!(f, "<{m}>"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fragment {
    Bde,
    Abln,
    Full,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Bde => "BDE",
            Fragment::Abln => "ABLN",
            Fragment::Full => "full",
        })
    }
}

#[allow(clippy::should_implement_trait)]
impl<A> Formula<A> {
    pub fn not(f: Formula<A>) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula<A>, r: Formula<A>) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula<A>, r: Formula<A>) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula<A>, r: Formula<A>) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn know(agent: usize, f: Formula<A>) -> Self {
        Formula::Know(AgentRef::Index(agent), Box::new(f))
    }

    pub fn common(group: &[usize], f: Formula<A>) -> Self {
        Formula::Common(
            group.iter().map(|&i| AgentRef::Index(i)).collect(),
            Box::new(f),
        )
    }

    pub fn diamond(m: Modality, f: Formula<A>) -> Self {
        Formula::Diamond(m, Box::new(f))
    }

    pub fn square(m: Modality, f: Formula<A>) -> Self {
        Formula::Square(m, Box::new(f))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Pi | Formula::Atom(_) => 1,
            Formula::Not(f)
            | Formula::Know(_, f)
            | Formula::Common(_, f)
            | Formula::Diamond(_, f)
            | Formula::Square(_, f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    /// Nesting depth of modal operators (epistemic and temporal).
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Pi | Formula::Atom(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::Know(_, f)
            | Formula::Common(_, f)
            | Formula::Diamond(_, f)
            | Formula::Square(_, f) => 1 + f.modal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.modal_depth().max(r.modal_depth())
            }
        }
    }

    pub fn is_modal_free(&self) -> bool {
        self.modal_depth() == 0
    }

    /// Temporal modalities occurring anywhere, boxes counted by their diamond.
    pub fn temporal_modalities(&self) -> BTreeSet<Modality> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Diamond(m, _) | Formula::Square(m, _) = f {
                out.insert(*m);
            }
        });
        out
    }

    /// Visits every subformula, parents first.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula<A>)) {
        visit(self);
        match self {
            Formula::True | Formula::False | Formula::Pi | Formula::Atom(_) => {}
            Formula::Not(f)
            | Formula::Know(_, f)
            | Formula::Common(_, f)
            | Formula::Diamond(_, f)
            | Formula::Square(_, f) => f.walk(visit),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
        }
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    pub fn has_backward(&self) -> bool {
        self.temporal_modalities().iter().any(|m| m.is_backward())
    }

    pub fn fragment(&self) -> Fragment {
        let ms = self.temporal_modalities();
        if ms
            .iter()
            .all(|m| matches!(m, Modality::B | Modality::D | Modality::E))
        {
            Fragment::Bde
        } else if ms
            .iter()
            .all(|m| matches!(m, Modality::A | Modality::Bbar | Modality::L | Modality::N))
        {
            Fragment::Abln
        } else {
            Fragment::Full
        }
    }

    pub fn try_map_atoms<B, E>(
        &self,
        f: &mut impl FnMut(&A) -> Result<B, E>,
    ) -> Result<Formula<B>, E> {
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Pi => Formula::Pi,
            Formula::Atom(a) => Formula::Atom(f(a)?),
            Formula::Not(x) => Formula::not(x.try_map_atoms(f)?),
            Formula::And(l, r) => Formula::and(l.try_map_atoms(f)?, r.try_map_atoms(f)?),
            Formula::Or(l, r) => Formula::or(l.try_map_atoms(f)?, r.try_map_atoms(f)?),
            Formula::Implies(l, r) => Formula::implies(l.try_map_atoms(f)?, r.try_map_atoms(f)?),
            Formula::Know(a, x) => Formula::Know(a.clone(), Box::new(x.try_map_atoms(f)?)),
            Formula::Common(g, x) => Formula::Common(g.clone(), Box::new(x.try_map_atoms(f)?)),
            Formula::Diamond(m, x) => Formula::diamond(*m, x.try_map_atoms(f)?),
            Formula::Square(m, x) => Formula::square(*m, x.try_map_atoms(f)?),
        })
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Formula<B> {
        self.try_map_atoms(&mut |a| Ok::<B, std::convert::Infallible>(f(a)))
            .unwrap_or_else(|never| match never {})
    }

    /// Resolves agent names to indices and checks them against `sys`.
    pub fn resolve_agents(&self, sys: &InterpretedSystem) -> Result<Formula<A>, FormulaError>
    where
        A: Clone,
    {
        let rebuilt = |f: &Formula<A>| f.resolve_agents(sys);
        Ok(match self {
            Formula::Know(a, x) => {
                Formula::Know(AgentRef::Index(a.resolve(sys)?), Box::new(rebuilt(x)?))
            }
            Formula::Common(g, x) => {
                if g.is_empty() {
                    return Err(FormulaError::Fragment(
                        "common knowledge needs a non-empty group".into(),
                    ));
                }
                let idx = g
                    .iter()
                    .map(|a| a.resolve(sys).map(AgentRef::Index))
                    .collect::<Result<Vec<_>, _>>()?;
                Formula::Common(idx, Box::new(rebuilt(x)?))
            }
            Formula::Not(x) => Formula::not(rebuilt(x)?),
            Formula::And(l, r) => Formula::and(rebuilt(l)?, rebuilt(r)?),
            Formula::Or(l, r) => Formula::or(rebuilt(l)?, rebuilt(r)?),
            Formula::Implies(l, r) => Formula::implies(rebuilt(l)?, rebuilt(r)?),
            Formula::Diamond(m, x) => Formula::diamond(*m, rebuilt(x)?),
            Formula::Square(m, x) => Formula::square(*m, rebuilt(x)?),
            leaf => leaf.clone(),
        })
    }
}

impl<A: Clone> Formula<A> {
    /// Rewrites `<L>φ` as `<A>(!pi & <A>φ)` (and `[L]` dually) everywhere.
    pub fn eliminate_l(&self) -> Formula<A> {
        let later = |phi: Formula<A>| {
            Formula::diamond(
                Modality::A,
                Formula::and(
                    Formula::not(Formula::Pi),
                    Formula::diamond(Modality::A, phi),
                ),
            )
        };
        self.rewrite(&|f, rec| match f {
            Formula::Diamond(Modality::L, x) => Some(later(rec(x))),
            Formula::Square(Modality::L, x) => Some(Formula::not(later(Formula::not(rec(x))))),
            _ => None,
        })
    }

    /// Rewrites `<N>φ` as `<A>(!pi & [B][B]false & <A>φ)` (and `[N]` dually).
    ///
    /// `[B][B]false` pins the middle interval to exactly two configurations.
    pub fn expand_n(&self) -> Formula<A> {
        let next = |phi: Formula<A>| {
            Formula::diamond(
                Modality::A,
                Formula::and(
                    Formula::and(
                        Formula::not(Formula::Pi),
                        Formula::square(Modality::B, Formula::square(Modality::B, Formula::False)),
                    ),
                    Formula::diamond(Modality::A, phi),
                ),
            )
        };
        self.rewrite(&|f, rec| match f {
            Formula::Diamond(Modality::N, x) => Some(next(rec(x))),
            Formula::Square(Modality::N, x) => Some(Formula::not(next(Formula::not(rec(x))))),
            _ => None,
        })
    }

    /// Replaces `|`, `->`, `[X]`, `true` by `!`, `&`, `<X>`, `!false`.
    pub fn desugar(&self) -> Formula<A> {
        self.rewrite(&|f, rec| match f {
            Formula::True => Some(Formula::not(Formula::False)),
            Formula::Or(l, r) => Some(Formula::not(Formula::and(
                Formula::not(rec(l)),
                Formula::not(rec(r)),
            ))),
            Formula::Implies(l, r) => {
                Some(Formula::not(Formula::and(rec(l), Formula::not(rec(r)))))
            }
            Formula::Square(m, x) => Some(Formula::not(Formula::diamond(*m, Formula::not(rec(x))))),
            _ => None,
        })
    }

    // Bottom-up rewrite: `rule` may replace a node, receiving a recursion
    // handle for its children; otherwise the node is rebuilt structurally.
    fn rewrite<R>(&self, rule: &R) -> Formula<A>
    where
        R: Fn(&Formula<A>, &dyn Fn(&Formula<A>) -> Formula<A>) -> Option<Formula<A>>,
    {
        let rec = |x: &Formula<A>| x.rewrite(rule);
        if let Some(out) = rule(self, &rec) {
            return out;
        }
        match self {
            Formula::Not(x) => Formula::not(rec(x)),
            Formula::And(l, r) => Formula::and(rec(l), rec(r)),
            Formula::Or(l, r) => Formula::or(rec(l), rec(r)),
            Formula::Implies(l, r) => Formula::implies(rec(l), rec(r)),
            Formula::Know(a, x) => Formula::Know(a.clone(), Box::new(rec(x))),
            Formula::Common(g, x) => Formula::Common(g.clone(), Box::new(rec(x))),
            Formula::Diamond(m, x) => Formula::diamond(*m, rec(x)),
            Formula::Square(m, x) => Formula::square(*m, rec(x)),
            leaf => leaf.clone(),
        }
    }
}

impl<A: Clone + PartialEq> Formula<A> {
    /// Maximal modal subformulas reachable through Boolean connectives only,
    /// left to right, without repeats. `[X]φ` is listed as `<X>` over `!φ`.
    pub fn top_level_subformulas(&self) -> Vec<(ModalOp, Formula<A>)> {
        let mut out: Vec<(ModalOp, Formula<A>)> = Vec::new();
        self.collect_top(&mut out);
        out
    }

    fn collect_top(&self, out: &mut Vec<(ModalOp, Formula<A>)>) {
        let entry = match self {
            Formula::True | Formula::False | Formula::Pi | Formula::Atom(_) => return,
            Formula::Not(x) => return x.collect_top(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_top(out);
                return r.collect_top(out);
            }
            Formula::Know(a, x) => (ModalOp::Know(a.clone()), (**x).clone()),
            Formula::Common(g, x) => (ModalOp::Common(g.clone()), (**x).clone()),
            Formula::Diamond(m, x) => (ModalOp::Diamond(*m), (**x).clone()),
            Formula::Square(m, x) => (ModalOp::Diamond(*m), Formula::not((**x).clone())),
        };
        if !out.contains(&entry) {
            out.push(entry);
        }
    }
}

impl FormulaPlus {
    /// Resolves variables and agents against `sys`.
    pub fn bind(&self, sys: &InterpretedSystem) -> Result<Formula<usize>, FormulaError> {
        self.resolve_agents(sys)?.try_map_atoms(&mut |p: &String| {
            sys.var_index(p)
                .ok_or_else(|| FormulaError::UnknownVariable(p.clone()))
        })
    }
}

impl FormulaRe {
    /// Checks that every letter names a variable of `sys`; resolves agents.
    pub fn bind(&self, sys: &InterpretedSystem) -> Result<FormulaRe, FormulaError> {
        for atom in self.atoms() {
            for letter in atom.symbols() {
                for v in letter.variables() {
                    if sys.var_index(v).is_none() {
                        return Err(FormulaError::UnknownVariable(v.to_string()));
                    }
                }
            }
        }
        self.resolve_agents(sys)
    }
}

pub fn fragment_of<A>(f: &Formula<A>) -> Fragment {
    f.fragment()
}

// Binding strength for printing.
const P_IMPLIES: u8 = 0;
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_UNARY: u8 = 3;

fn write_formula<A>(
    f: &Formula<A>,
    min: u8,
    atom: &dyn Fn(&A, &mut fmt::Formatter<'_>) -> fmt::Result,
    out: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let prec = match f {
        Formula::Implies(..) => P_IMPLIES,
        Formula::Or(..) => P_OR,
        Formula::And(..) => P_AND,
        _ => P_UNARY,
    };
    if prec < min {
        out.write_str("(")?;
        write_formula(f, P_IMPLIES, atom, out)?;
        return out.write_str(")");
    }
    let unary = |prefix: String, x: &Formula<A>, out: &mut fmt::Formatter<'_>| {
        out.write_str(&prefix)?;
        write_formula(x, P_UNARY, atom, out)
    };
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Pi => out.write_str("pi"),
        Formula::Atom(a) => atom(a, out),
        Formula::Not(x) => unary("!".into(), x, out),
        Formula::Know(a, x) => unary(format!("K{{{a}}} "), x, out),
        Formula::Common(g, x) => unary(format!("{} ", ModalOp::Common(g.clone())), x, out),
        Formula::Diamond(m, x) => unary(format!("<{m}>"), x, out),
        Formula::Square(m, x) => unary(format!("[{m}]"), x, out),
        Formula::And(l, r) => {
            write_formula(l, P_AND, atom, out)?;
            out.write_str(" & ")?;
            write_formula(r, P_UNARY, atom, out)
        }
        Formula::Or(l, r) => {
            write_formula(l, P_OR, atom, out)?;
            out.write_str(" | ")?;
            write_formula(r, P_AND, atom, out)
        }
        Formula::Implies(l, r) => {
            write_formula(l, P_OR, atom, out)?;
            out.write_str(" -> ")?;
            write_formula(r, P_IMPLIES, atom, out)
        }
    }
}

impl fmt::Display for FormulaPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, P_IMPLIES, &|a: &String, out| out.write_str(a), f)
    }
}

impl fmt::Display for FormulaRe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(
            self,
            P_IMPLIES,
            &|r: &Regex<Letter>, out| write!(out, "{{{r}}}"),
            f,
        )
    }
}

impl fmt::Display for Formula<usize> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, P_IMPLIES, &|v: &usize, out| write!(out, "v{v}"), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> FormulaPlus {
        parse_plus(text).unwrap()
    }

    #[test]
    fn l_elimination() {
        assert_eq!(p("<L> p").eliminate_l(), p("<A>(!pi & <A> p)"));
        assert_eq!(p("[L] p").eliminate_l(), p("!<A>(!pi & <A> !p)"));
        assert_eq!(p("p").eliminate_l(), p("p"));
        assert_eq!(p("<L><L> p").eliminate_l().fragment(), Fragment::Abln);
        assert!(!p("<L><L> p")
            .eliminate_l()
            .temporal_modalities()
            .contains(&Modality::L));
    }

    #[test]
    fn n_expansion() {
        assert_eq!(p("<N> p").expand_n(), p("<A>(!pi & [B][B]false & <A> p)"));
        assert_eq!(p("p").expand_n(), p("p"));
        let twice = p("<N><N> p").expand_n();
        assert!(!twice.temporal_modalities().contains(&Modality::N));
        assert_eq!(twice.to_string().matches("[B][B]false").count(), 2);
    }

    #[test]
    fn fragments() {
        assert_eq!(p("K{0} pi & !<A> p").fragment(), Fragment::Abln);
        assert_eq!(p("<B><D> p").fragment(), Fragment::Bde);
        assert_eq!(p("<A><D> p").fragment(), Fragment::Full);
        assert_eq!(p("[Bbar] p").fragment(), Fragment::Abln);
        assert_eq!(p("<Abar> p").fragment(), Fragment::Full);
    }

    #[test]
    fn top_level() {
        let tops = p("K{0} pi & !<A> p").top_level_subformulas();
        assert_eq!(
            tops,
            vec![
                (ModalOp::Know(AgentRef::Index(0)), Formula::Pi),
                (ModalOp::Diamond(Modality::A), p("p")),
            ]
        );
        assert!(p("p & pi").top_level_subformulas().is_empty());
        assert_eq!(
            p("<A><A> p").top_level_subformulas(),
            vec![(ModalOp::Diamond(Modality::A), p("<A> p"))]
        );
        assert_eq!(p("<A> p | <A> p").top_level_subformulas().len(), 1);
        assert_eq!(
            p("[A] p").top_level_subformulas(),
            vec![(ModalOp::Diamond(Modality::A), p("!p"))]
        );
    }

    #[test]
    fn letters_match_valuations() {
        let vars = vec!["p".to_string(), "q".to_string()];
        let holds = |v: &str| v == "p";
        assert!(Letter::Var("p".into()).matches(holds, &vars));
        assert!(Letter::NotVar("q".into()).matches(holds, &vars));
        assert!(Letter::Any.matches(holds, &vars));
        assert!(Letter::Set(vec!["p".into()]).matches(holds, &vars));
        assert!(!Letter::Set(vec!["p".into(), "q".into()]).matches(holds, &vars));
    }

    #[test]
    fn desugar_removes_sugar() {
        let d = p("p | q -> [A] true").desugar();
        let mut sugar = false;
        d.walk(&mut |f| {
            sugar |= matches!(
                f,
                Formula::Or(..) | Formula::Implies(..) | Formula::Square(..) | Formula::True
            )
        });
        assert!(!sugar);
    }
}
