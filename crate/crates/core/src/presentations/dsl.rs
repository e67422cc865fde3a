//! Text format for presentations:
//!
//! ```text
//! presentation := "<" genlist "|" relatorlist ">"
//! genlist      := ident ("," ident)*
//! relatorlist  := word ("," word)*
//! word         := syllable+
//! syllable     := ident ("^" signed-integer)?
//! ```
//!
//! `#` starts a comment running to the end of the line. An empty relator
//! list (`< x, y | >`) is accepted and denotes a free group.

use std::collections::HashMap;

use thiserror::Error;

use super::Presentation;
use crate::words::{free_reduce, Syllable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical(char),
    BadInteger(String),
    Expected { expected: &'static str, found: String },
    UnknownGenerator(String),
    DuplicateGenerator(String),
    EmptyRelator,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {}", describe(.kind))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Lexical(c) => format!("unexpected character `{c}`"),
        ParseErrorKind::BadInteger(s) => format!("bad integer `{s}`"),
        ParseErrorKind::Expected { expected, found } => {
            format!("expected {expected}, found {found}")
        }
        ParseErrorKind::UnknownGenerator(g) => format!("unknown generator `{g}`"),
        ParseErrorKind::DuplicateGenerator(g) => format!("generator `{g}` declared twice"),
        ParseErrorKind::EmptyRelator => "relator is empty after free reduction".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Bar,
    Comma,
    Caret,
    Ident(String),
    Int(i64),
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Open => "`<`".into(),
            Token::Close => "`>`".into(),
            Token::Bar => "`|`".into(),
            Token::Comma => "`,`".into(),
            Token::Caret => "`^`".into(),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Int(i) => format!("integer `{i}`"),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        let single = |token| Spanned {
            token,
            line: tline,
            column: tcol,
        };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '<' | '>' | '|' | ',' | '^' => {
                chars.next();
                column += 1;
                out.push(single(match c {
                    '<' => Token::Open,
                    '>' => Token::Close,
                    '|' => Token::Bar,
                    ',' => Token::Comma,
                    _ => Token::Caret,
                }));
            }
            c if c == '-' || c == '+' || c.is_ascii_digit() => {
                let mut s = String::new();
                s.push(c);
                chars.next();
                column += 1;
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    column += 1;
                }
                let value = s.parse::<i64>().map_err(|_| ParseError {
                    line: tline,
                    column: tcol,
                    kind: ParseErrorKind::BadInteger(s.clone()),
                })?;
                out.push(single(Token::Int(value)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !(d.is_alphanumeric() || d == '_' || d == '\'') {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    column += 1;
                }
                out.push(single(Token::Ident(s)));
            }
            other => {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::Lexical(other),
                })
            }
        }
    }
    out.push(Spanned {
        token: Token::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.column,
            kind,
        }
    }

    fn expect(&mut self, token: Token, expected: &'static str) -> Result<(), ParseError> {
        if self.peek().token == token {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(ParseErrorKind::Expected {
                expected,
                found: self.peek().token.describe(),
            }))
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<(String, usize, usize), ParseError> {
        let t = self.next();
        match t.token {
            Token::Ident(s) => Ok((s, t.line, t.column)),
            other => Err(ParseError {
                line: t.line,
                column: t.column,
                kind: ParseErrorKind::Expected {
                    expected,
                    found: other.describe(),
                },
            }),
        }
    }
}

/// Parses a presentation; generators are numbered in declaration order.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    p.expect(Token::Open, "`<`")?;

    let mut names = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    loop {
        let (name, line, column) = p.ident("generator name")?;
        if index.contains_key(&name) {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::DuplicateGenerator(name),
            });
        }
        index.insert(name.clone(), names.len());
        names.push(name);
        if p.peek().token == Token::Comma {
            p.next();
        } else {
            break;
        }
    }
    p.expect(Token::Bar, "`,` or `|`")?;

    let mut relators = Vec::new();
    if p.peek().token != Token::Close {
        loop {
            let start = p.peek().clone();
            let mut raw = Vec::new();
            while let Token::Ident(_) = p.peek().token {
                let (name, line, column) = p.ident("generator")?;
                let gen = *index.get(&name).ok_or(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::UnknownGenerator(name),
                })?;
                let mut exp = 1;
                if p.peek().token == Token::Caret {
                    p.next();
                    let t = p.next();
                    match t.token {
                        Token::Int(e) => exp = e,
                        other => {
                            return Err(ParseError {
                                line: t.line,
                                column: t.column,
                                kind: ParseErrorKind::Expected {
                                    expected: "integer exponent",
                                    found: other.describe(),
                                },
                            })
                        }
                    }
                }
                raw.push(Syllable::new(gen, exp));
            }
            if raw.is_empty() {
                return Err(p.error_here(ParseErrorKind::Expected {
                    expected: "relator",
                    found: p.peek().token.describe(),
                }));
            }
            let word = free_reduce(raw);
            if word.is_identity() {
                return Err(ParseError {
                    line: start.line,
                    column: start.column,
                    kind: ParseErrorKind::EmptyRelator,
                });
            }
            relators.push(word);
            if p.peek().token == Token::Comma {
                p.next();
            } else {
                break;
            }
        }
    }
    p.expect(Token::Close, "`,` or `>`")?;
    p.expect(Token::Eof, "end of input")?;
    Ok(Presentation::with_names(names, relators).expect("parser checks relators"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{build_fractional, build_shift_extension, FibParams};
    use crate::words::FreeWord;
    use proptest::prelude::*;

    #[test]
    fn parses_commutator() {
        let p = parse_presentation("< x0, x1 | x0 x1 x0^-1 x1^-1 >").unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.relators()[0], "x0 x1 x0^-1 x1^-1".parse::<FreeWord>().unwrap());
    }

    #[test]
    fn free_form_names_and_comments() {
        let text = "# quaternion group\n< a, b |\n  a^2 b^-2,  # first\n  a b a b^-1\n>\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(p.relators()[1], "x0 x1 x0 x1^-1".parse::<FreeWord>().unwrap());
        assert_eq!(p.to_string(), "< a, b | a^2 b^-2, a b a b^-1 >");
    }

    #[test]
    fn rejects_empty_relator() {
        let err = parse_presentation("< x | x^0 >").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyRelator);
        assert_eq!((err.line, err.column), (1, 7));
        let err = parse_presentation("< x, y |\n x y y^-1 x^-1 >").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyRelator);
        assert_eq!((err.line, err.column), (2, 2));
    }

    #[test]
    fn reports_positions() {
        let err = parse_presentation("< x, y |\n  x z >").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownGenerator("z".into()));
        assert_eq!((err.line, err.column), (2, 5));

        let err = parse_presentation("< x ; y | x >").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Lexical(';'));
        assert_eq!((err.line, err.column), (1, 5));

        let err = parse_presentation("< x, x | x >").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateGenerator("x".into()));

        let err = parse_presentation("< x | x^ >").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Expected { .. }));

        assert!(parse_presentation("< x | x > trailing").is_err());
        assert!(parse_presentation("< x | x,, x >").is_err());
    }

    #[test]
    fn free_group_has_no_relators() {
        let p = parse_presentation("< x, y | >").unwrap();
        assert_eq!(p.rank(), 2);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn builder_output_round_trips() {
        for p in [
            build_fractional(&FibParams::new(5, 2, 3, 6).unwrap()).unwrap(),
            build_shift_extension(&FibParams::new(3, 1, 1, 0).unwrap()).unwrap(),
        ] {
            assert_eq!(parse_presentation(&p.to_string()).unwrap(), p);
        }
    }

    fn presentation_strategy() -> impl Strategy<Value = Presentation> {
        (1usize..5).prop_flat_map(|rank| {
            let word = prop::collection::vec((0..rank, -4i64..=4), 1..8)
                .prop_map(|v| free_reduce(v.into_iter().map(|(g, e)| Syllable::new(g, e))))
                .prop_filter("nonempty", |w| !w.is_identity());
            prop::collection::vec(word, 0..5)
                .prop_map(move |rels| Presentation::new(rank, rels).unwrap())
        })
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(p in presentation_strategy()) {
            prop_assert_eq!(parse_presentation(&p.to_string()).unwrap(), p);
        }
    }
}
