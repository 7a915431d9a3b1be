//! Regular expressions over finite alphabets.
//!
//! Expressions are generic over their letter type so the same AST serves
//! labellings (letters are global configurations) and regular atoms of
//! formulas (letters are predicates over variable valuations).
//!
//! Concrete syntax: identifiers are symbols, concatenation is juxtaposition
//! or `;`, union is `+` or `|`, `*` is the postfix Kleene star, parentheses
//! group, and `empty` / `eps` denote the empty language and the empty word.
//! Precedence is star > concatenation > union; both binary operators nest to
//! the right.

mod dfa;
mod parse;

use std::fmt;

pub use dfa::{compile, Dfa, LanguageShape};
pub use parse::{parse_regex, parse_regex_with, Token};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegexError {
    #[error("regex syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{token}` at {pos}")]
    UnknownSymbol { token: String, pos: usize },
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
}

/// An ordered, duplicate-free, non-empty set of symbol names.
///
/// Symbols are addressed by their position; expressions over an alphabet
/// use those positions as letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, RegexError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(RegexError::Alphabet("alphabet is empty".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(RegexError::Alphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.symbols[symbol]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex<L> {
    Empty,
    Epsilon,
    Symbol(L),
    Concat(Box<Regex<L>>, Box<Regex<L>>),
    Union(Box<Regex<L>>, Box<Regex<L>>),
    Star(Box<Regex<L>>),
}

impl<L> Regex<L> {
    pub fn concat(left: Regex<L>, right: Regex<L>) -> Self {
        Regex::Concat(Box::new(left), Box::new(right))
    }

    pub fn union(left: Regex<L>, right: Regex<L>) -> Self {
        Regex::Union(Box::new(left), Box::new(right))
    }

    pub fn star(inner: Regex<L>) -> Self {
        Regex::Star(Box::new(inner))
    }

    /// Right-nested union of the given alternatives; `Empty` when there are none.
    pub fn sum<I: IntoIterator<Item = Regex<L>>>(items: I) -> Self
    where
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .reduce(|acc, r| Regex::union(r, acc))
            .unwrap_or(Regex::Empty)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Regex::Empty | Regex::Epsilon | Regex::Symbol(_) => 1,
            Regex::Concat(l, r) | Regex::Union(l, r) => 1 + l.size() + r.size(),
            Regex::Star(e) => 1 + e.size(),
        }
    }

    pub fn map<M, F: FnMut(&L) -> Regex<M>>(&self, f: &mut F) -> Regex<M> {
        match self {
            Regex::Empty => Regex::Empty,
            Regex::Epsilon => Regex::Epsilon,
            Regex::Symbol(s) => f(s),
            Regex::Concat(l, r) => Regex::concat(l.map(f), r.map(f)),
            Regex::Union(l, r) => Regex::union(l.map(f), r.map(f)),
            Regex::Star(e) => Regex::star(e.map(f)),
        }
    }

    pub fn try_map<M, E, F: FnMut(&L) -> Result<Regex<M>, E>>(
        &self,
        f: &mut F,
    ) -> Result<Regex<M>, E> {
        Ok(match self {
            Regex::Empty => Regex::Empty,
            Regex::Epsilon => Regex::Epsilon,
            Regex::Symbol(s) => f(s)?,
            Regex::Concat(l, r) => Regex::concat(l.try_map(f)?, r.try_map(f)?),
            Regex::Union(l, r) => Regex::union(l.try_map(f)?, r.try_map(f)?),
            Regex::Star(e) => Regex::star(e.try_map(f)?),
        })
    }

    pub fn symbols(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols<'a>(&'a self, out: &mut Vec<&'a L>) {
        match self {
            Regex::Empty | Regex::Epsilon => {}
            Regex::Symbol(s) => out.push(s),
            Regex::Concat(l, r) | Regex::Union(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
            Regex::Star(e) => e.collect_symbols(out),
        }
    }

    /// Whether the empty word belongs to the language.
    pub fn nullable(&self) -> bool {
        match self {
            Regex::Empty | Regex::Symbol(_) => false,
            Regex::Epsilon | Regex::Star(_) => true,
            Regex::Concat(l, r) => l.nullable() && r.nullable(),
            Regex::Union(l, r) => l.nullable() || r.nullable(),
        }
    }

    /// Renders the expression, delegating letters to `letter`.
    pub fn display_with<'a, F>(&'a self, letter: F) -> RegexDisplay<'a, L, F>
    where
        F: Fn(&L, &mut fmt::Formatter<'_>) -> fmt::Result,
    {
        RegexDisplay { expr: self, letter }
    }
}

impl<L: Clone + PartialEq> Regex<L> {
    /// Brzozowski derivative with respect to one input item.
    ///
    /// `matches` decides whether a letter accepts the item; this lets the
    /// same routine serve plain symbols and letter predicates.
    pub fn derivative<W, M>(&self, item: &W, matches: &M) -> Regex<L>
    where
        M: Fn(&L, &W) -> bool,
    {
        match self {
            Regex::Empty | Regex::Epsilon => Regex::Empty,
            Regex::Symbol(s) => {
                if matches(s, item) {
                    Regex::Epsilon
                } else {
                    Regex::Empty
                }
            }
            Regex::Concat(l, r) => {
                let head = smart_concat(l.derivative(item, matches), (**r).clone());
                if l.nullable() {
                    smart_union(head, r.derivative(item, matches))
                } else {
                    head
                }
            }
            Regex::Union(l, r) => {
                smart_union(l.derivative(item, matches), r.derivative(item, matches))
            }
            Regex::Star(e) => smart_concat(e.derivative(item, matches), self.clone()),
        }
    }
}

fn smart_concat<L>(l: Regex<L>, r: Regex<L>) -> Regex<L> {
    match (l, r) {
        (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
        (Regex::Epsilon, r) => r,
        (l, Regex::Epsilon) => l,
        (l, r) => Regex::concat(l, r),
    }
}

fn smart_union<L: PartialEq>(l: Regex<L>, r: Regex<L>) -> Regex<L> {
    match (l, r) {
        (Regex::Empty, r) => r,
        (l, Regex::Empty) => l,
        (l, r) if l == r => l,
        (l, r) => Regex::union(l, r),
    }
}

/// Membership by repeated derivatives, with a caller-supplied letter test.
///
/// This never builds an automaton, so it can check the DFA pipeline.
pub fn denotes_by<L, W, M>(expr: &Regex<L>, word: &[W], matches: M) -> bool
where
    L: Clone + PartialEq,
    M: Fn(&L, &W) -> bool,
{
    let mut current = expr.clone();
    for item in word {
        current = current.derivative(item, &matches);
        if current == Regex::Empty {
            return false;
        }
    }
    current.nullable()
}

/// `word ∈ L(expr)` for expressions over alphabet positions.
pub fn denotes(expr: &Regex<usize>, word: &[usize]) -> bool {
    denotes_by(expr, word, |s, w| s == w)
}

pub struct RegexDisplay<'a, L, F> {
    expr: &'a Regex<L>,
    letter: F,
}

// Binding strength used to decide parenthesisation.
const PREC_UNION: u8 = 0;
const PREC_CONCAT: u8 = 1;
const PREC_STAR: u8 = 2;

impl<L, F> RegexDisplay<'_, L, F>
where
    F: Fn(&L, &mut fmt::Formatter<'_>) -> fmt::Result,
{
    fn write(&self, e: &Regex<L>, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = match e {
            Regex::Union(..) => PREC_UNION,
            Regex::Concat(..) => PREC_CONCAT,
            _ => PREC_STAR,
        };
        if prec < min {
            f.write_str("(")?;
            self.write(e, PREC_UNION, f)?;
            return f.write_str(")");
        }
        match e {
            Regex::Empty => f.write_str("empty"),
            Regex::Epsilon => f.write_str("eps"),
            Regex::Symbol(s) => (self.letter)(s, f),
            Regex::Union(l, r) => {
                // left operand must not itself be a union, or it would re-parse right-nested
                self.write(l, PREC_CONCAT, f)?;
                f.write_str(" + ")?;
                self.write(r, PREC_UNION, f)
            }
            Regex::Concat(l, r) => {
                self.write(l, PREC_STAR, f)?;
                f.write_str(" ")?;
                self.write(r, PREC_CONCAT, f)
            }
            Regex::Star(inner) => {
                self.write(inner, PREC_STAR, f)?;
                f.write_str("*")
            }
        }
    }
}

impl<L, F> fmt::Display for RegexDisplay<'_, L, F>
where
    F: Fn(&L, &mut fmt::Formatter<'_>) -> fmt::Result,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, PREC_UNION, f)
    }
}

impl<L: fmt::Display> fmt::Display for Regex<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(|l: &L, f: &mut fmt::Formatter<'_>| write!(f, "{l}"))
            .fmt(f)
    }
}
