use super::{Alphabet, Regex, RegexError};

/// A letter token as seen by the symbol resolver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    /// `name`
    Ident(String),
    /// `!name`
    Negated(String),
    /// `(a,b,...)` with at least one comma
    Tuple(Vec<String>),
    /// `[a,b,...]`, possibly empty
    Set(Vec<String>),
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Ident(s) => f.write_str(s),
            Token::Negated(s) => write!(f, "!{s}"),
            Token::Tuple(items) => write!(f, "({})", items.join(",")),
            Token::Set(items) => write!(f, "[{}]", items.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Lexeme {
    Letter(Token),
    Empty,
    Eps,
    Open,
    Close,
    Plus,
    Semi,
    Star,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek_char() {
            Some(c) if is_ident_start(c) => self.pos += 1,
            _ => return None,
        }
        while let Some(c) = self.peek_char() {
            if is_ident_char(c) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(self.src[start..self.pos].to_string())
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> RegexError {
        RegexError::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    // Comma-separated identifiers up to `close`. Cursor sits after the opener.
    fn ident_list(&mut self, close: char) -> Result<Vec<String>, RegexError> {
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek_char() == Some(close) {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            self.skip_ws();
            let at = self.pos;
            let Some(name) = self.ident() else {
                return Err(self.err(at, "expected identifier"));
            };
            items.push(name);
            self.skip_ws();
            match self.peek_char() {
                Some(',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                _ => return Err(self.err(self.pos, format!("expected `,` or `{close}`"))),
            }
        }
    }

    // `(` followed by `ident ,` starts a tuple; anything else is grouping.
    fn looks_like_tuple(&self) -> bool {
        let rest = &self.src[self.pos + 1..];
        let rest = rest.trim_start();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if is_ident_start(c) => {}
            _ => return false,
        }
        let end = rest
            .char_indices()
            .find(|&(_, c)| !is_ident_char(c))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        rest[end..].trim_start().starts_with(',')
    }

    fn next(&mut self) -> Result<Option<(usize, Lexeme)>, RegexError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok(None);
        };
        let lex = match c {
            '(' if self.looks_like_tuple() => {
                self.pos += 1;
                Lexeme::Letter(Token::Tuple(self.ident_list(')')?))
            }
            '(' => {
                self.pos += 1;
                Lexeme::Open
            }
            ')' => {
                self.pos += 1;
                Lexeme::Close
            }
            '+' | '|' => {
                self.pos += 1;
                Lexeme::Plus
            }
            ';' => {
                self.pos += 1;
                Lexeme::Semi
            }
            '*' => {
                self.pos += 1;
                Lexeme::Star
            }
            '[' => {
                self.pos += 1;
                Lexeme::Letter(Token::Set(self.ident_list(']')?))
            }
            '!' | '~' => {
                self.pos += 1;
                self.skip_ws();
                let at = self.pos;
                let Some(name) = self.ident() else {
                    return Err(self.err(at, "expected identifier after `!`"));
                };
                Lexeme::Letter(Token::Negated(name))
            }
            c if is_ident_start(c) => {
                let name = self.ident().expect("identifier start checked");
                match name.as_str() {
                    "empty" => Lexeme::Empty,
                    "eps" => Lexeme::Eps,
                    _ => Lexeme::Letter(Token::Ident(name)),
                }
            }
            other => return Err(self.err(start, format!("unexpected character `{other}`"))),
        };
        Ok(Some((start, lex)))
    }
}

struct Parser<F> {
    tokens: Vec<(usize, Lexeme)>,
    at: usize,
    end: usize,
    resolve: F,
}

impl<L, F> Parser<F>
where
    F: FnMut(&Token) -> Option<Regex<L>>,
{
    fn peek(&self) -> Option<&Lexeme> {
        self.tokens.get(self.at).map(|(_, l)| l)
    }

    fn pos(&self) -> usize {
        self.tokens
            .get(self.at)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn union(&mut self) -> Result<Regex<L>, RegexError> {
        let left = self.concat()?;
        if self.peek() == Some(&Lexeme::Plus) {
            self.at += 1;
            let right = self.union()?;
            return Ok(Regex::union(left, right));
        }
        Ok(left)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Lexeme::Letter(_) | Lexeme::Empty | Lexeme::Eps | Lexeme::Open)
        )
    }

    fn concat(&mut self) -> Result<Regex<L>, RegexError> {
        let left = self.starred()?;
        if self.peek() == Some(&Lexeme::Semi) {
            self.at += 1;
            let right = self.concat()?;
            return Ok(Regex::concat(left, right));
        }
        if self.starts_atom() {
            let right = self.concat()?;
            return Ok(Regex::concat(left, right));
        }
        Ok(left)
    }

    fn starred(&mut self) -> Result<Regex<L>, RegexError> {
        let mut e = self.atom()?;
        while self.peek() == Some(&Lexeme::Star) {
            self.at += 1;
            e = Regex::star(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Regex<L>, RegexError> {
        let pos = self.pos();
        let Some((_, lex)) = self.tokens.get(self.at).cloned() else {
            return Err(RegexError::Syntax {
                pos,
                msg: "unexpected end of expression".into(),
            });
        };
        self.at += 1;
        match lex {
            Lexeme::Empty => Ok(Regex::Empty),
            Lexeme::Eps => Ok(Regex::Epsilon),
            Lexeme::Letter(tok) => (self.resolve)(&tok).ok_or(RegexError::UnknownSymbol {
                token: tok.to_string(),
                pos,
            }),
            Lexeme::Open => {
                let inner = self.union()?;
                if self.peek() != Some(&Lexeme::Close) {
                    return Err(RegexError::Syntax {
                        pos: self.pos(),
                        msg: "expected `)`".into(),
                    });
                }
                self.at += 1;
                Ok(inner)
            }
            other => Err(RegexError::Syntax {
                pos,
                msg: format!("unexpected {}", describe(&other)),
            }),
        }
    }
}

fn describe(l: &Lexeme) -> &'static str {
    match l {
        Lexeme::Close => "`)`",
        Lexeme::Plus => "`+`",
        Lexeme::Semi => "`;`",
        Lexeme::Star => "`*`",
        _ => "token",
    }
}

/// Parses `text`, handing every letter token to `resolve`.
///
/// A resolver returning `None` produces an unknown-symbol error naming the
/// token. Positions in errors are byte offsets into `text`.
pub fn parse_regex_with<L, F>(text: &str, resolve: F) -> Result<Regex<L>, RegexError>
where
    F: FnMut(&Token) -> Option<Regex<L>>,
{
    let mut lexer = Lexer { src: text, pos: 0 };
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next()? {
        tokens.push(t);
    }
    let mut parser = Parser {
        tokens,
        at: 0,
        end: text.len(),
        resolve,
    };
    let expr = parser.union()?;
    if parser.at < parser.tokens.len() {
        let (pos, lex) = &parser.tokens[parser.at];
        return Err(RegexError::Syntax {
            pos: *pos,
            msg: format!("unexpected {}", describe(lex)),
        });
    }
    Ok(expr)
}

/// Parses an expression whose letters are members of `alphabet`.
///
/// Tuple tokens are looked up by their canonical `(a,b)` spelling.
pub fn parse_regex(text: &str, alphabet: &Alphabet) -> Result<Regex<usize>, RegexError> {
    parse_regex_with(text, |tok| match tok {
        Token::Ident(_) | Token::Tuple(_) => alphabet.index_of(&tok.to_string()).map(Regex::Symbol),
        _ => None,
    })
}
