use super::{AgentRef, Formula, FormulaError, FormulaPlus, FormulaRe, Letter, Modality};
use crate::regex::{parse_regex_with, Regex, RegexError, Token};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    RegexAtom(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Diamond(Modality),
    Square(Modality),
    Know(Vec<AgentRef>),
    Common(Vec<AgentRef>),
}

fn syntax(pos: usize, msg: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    // byte offset of the char index `k`, or the end of input
    let at = |k: usize| chars.get(k).map_or(text.len(), |&(p, _)| p);
    let close = |from: usize, delim: char| -> Result<usize, FormulaError> {
        (from..chars.len())
            .find(|&k| chars[k].1 == delim)
            .ok_or_else(|| syntax(at(from - 1), format!("missing `{delim}`")))
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '!' | '~' => {
                out.push((pos, Tok::Not));
                i += 1;
            }
            '&' => {
                out.push((pos, Tok::And));
                i += 1;
            }
            '|' => {
                out.push((pos, Tok::Or));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            '-' if chars.get(i + 1).map(|x| x.1) == Some('>') => {
                out.push((pos, Tok::Implies));
                i += 2;
            }
            '<' | '[' => {
                let delim = if c == '<' { '>' } else { ']' };
                let end = close(i + 1, delim)?;
                let name = text[at(i + 1)..at(end)].trim();
                let m = Modality::from_name(name).ok_or_else(|| FormulaError::UnknownModality {
                    pos,
                    name: name.to_string(),
                })?;
                out.push((
                    pos,
                    if c == '<' {
                        Tok::Diamond(m)
                    } else {
                        Tok::Square(m)
                    },
                ));
                i = end + 1;
            }
            '{' => {
                let end = close(i + 1, '}')?;
                out.push((
                    at(i + 1),
                    Tok::RegexAtom(text[at(i + 1)..at(end)].to_string()),
                ));
                i = end + 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i].1) {
                    i += 1;
                }
                let word = &text[pos..at(i)];
                // `K{..}` / `C{..}` are operators; a bare `K` is a variable
                let mut j = i;
                while j < chars.len() && chars[j].1.is_whitespace() {
                    j += 1;
                }
                if (word == "K" || word == "C") && chars.get(j).map(|x| x.1) == Some('{') {
                    let end = close(j + 1, '}')?;
                    let agents = text[at(j + 1)..at(end)]
                        .split(',')
                        .map(str::trim)
                        .map(|a| {
                            if let Ok(n) = a.parse::<usize>() {
                                Ok(AgentRef::Index(n))
                            } else if !a.is_empty() && a.chars().all(is_ident_char) {
                                Ok(AgentRef::Name(a.to_string()))
                            } else {
                                Err(syntax(at(j + 1), format!("bad agent `{a}`")))
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if word == "K" {
                        if agents.len() != 1 {
                            return Err(syntax(chars[start].0, "K takes exactly one agent"));
                        }
                        out.push((pos, Tok::Know(agents)));
                    } else {
                        out.push((pos, Tok::Common(agents)));
                    }
                    i = end + 1;
                } else {
                    out.push((pos, Tok::Ident(word.to_string())));
                }
            }
            other => return Err(syntax(pos, format!("unexpected `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a, A> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ident: &'a dyn Fn(&str) -> A,
    regex: &'a dyn Fn(usize, &str) -> Result<A, FormulaError>,
}

impl<A> Parser<'_, A> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn implies(&mut self) -> Result<Formula<A>, FormulaError> {
        let left = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.at += 1;
            let right = self.implies()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula<A>, FormulaError> {
        let mut left = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.at += 1;
            left = Formula::or(left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula<A>, FormulaError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula<A>, FormulaError> {
        let pos = self.pos();
        let Some((_, tok)) = self.toks.get(self.at).cloned() else {
            return Err(syntax(pos, "unexpected end of formula"));
        };
        self.at += 1;
        Ok(match tok {
            Tok::Not => Formula::not(self.unary()?),
            Tok::Diamond(m) => Formula::diamond(m, self.unary()?),
            Tok::Square(m) => Formula::square(m, self.unary()?),
            Tok::Know(mut a) => Formula::Know(a.remove(0), Box::new(self.unary()?)),
            Tok::Common(g) => Formula::Common(g, Box::new(self.unary()?)),
            Tok::Ident(w) => match w.as_str() {
                "pi" => Formula::Pi,
                "true" => Formula::True,
                "false" => Formula::False,
                _ => Formula::Atom((self.ident)(&w)),
            },
            Tok::RegexAtom(text) => Formula::Atom((self.regex)(pos, &text)?),
            Tok::LParen => {
                let inner = self.implies()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(syntax(self.pos(), "expected `)`"));
                }
                self.at += 1;
                inner
            }
            other => return Err(syntax(pos, format!("unexpected {other:?}"))),
        })
    }
}

fn parse_with<A>(
    text: &str,
    ident: &dyn Fn(&str) -> A,
    regex: &dyn Fn(usize, &str) -> Result<A, FormulaError>,
) -> Result<Formula<A>, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        ident,
        regex,
    };
    let f = p.implies()?;
    if p.at < p.toks.len() {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a formula whose atoms are variable names.
pub fn parse_plus(text: &str) -> Result<FormulaPlus, FormulaError> {
    parse_with(text, &|w| w.to_string(), &|pos, _| {
        Err(syntax(pos, "regular atoms `{...}` belong to the RE logic"))
    })
}

fn letter_regex(offset: usize, text: &str) -> Result<Regex<Letter>, FormulaError> {
    parse_regex_with(text, |tok: &Token| {
        Some(Regex::Symbol(match tok {
            Token::Ident(w) if w == "T" => Letter::Any,
            Token::Ident(w) => Letter::Var(w.clone()),
            Token::Negated(w) => Letter::NotVar(w.clone()),
            Token::Set(xs) => Letter::Set(xs.clone()),
            Token::Tuple(_) => return None,
        }))
    })
    .map_err(|source| {
        let pos = match &source {
            RegexError::Syntax { pos, .. } | RegexError::UnknownSymbol { pos, .. } => offset + pos,
            RegexError::Alphabet(_) => offset,
        };
        FormulaError::Regex { pos, source }
    })
}

/// Parses a formula whose atoms are `{regex}` over letter predicates; a bare
/// identifier `p` abbreviates `{p}`.
pub fn parse_re(text: &str) -> Result<FormulaRe, FormulaError> {
    parse_with(
        text,
        &|w| Regex::Symbol(Letter::Var(w.to_string())),
        &letter_regex,
    )
}
