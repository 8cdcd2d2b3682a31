//! Tokenizer for the document format.
//!
//! Names are runs of letters, digits, and underscores (a leading digit is
//! allowed). A fixed set of words is reserved as keywords. `//` starts a
//! comment running to the end of the line. Multi-character symbols are
//! matched longest first, so `|->` never lexes as `|-` followed by `>`.

use std::fmt;

use super::{ParseError, Position};

pub(crate) const KEYWORDS: &[&str] = &[
    "category",
    "sketch",
    "sequent",
    "structure",
    "extends",
    "in",
    "objects",
    "arrow",
    "compose",
    "commute",
    "limit",
    "colimit",
    "with",
    "over",
    "nodes",
    "edge",
    "map",
    "id",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Name(String),
    Keyword(&'static str),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Name(n) => write!(f, "name `{n}`"),
            TokenKind::Keyword(k) => write!(f, "`{k}`"),
            TokenKind::Punct(p) => write!(f, "`{p}`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Symbols, longest first.
const SYMBOLS: &[&str] = &[
    "|->", "|-", "->", "{", "}", "(", ")", ":", ";", ",", ".", "=",
];

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1usize;
    let mut col = 1usize;

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                let c = chars[i];
                advance(&mut i, &mut line, &mut col, c);
            }
            continue;
        }
        let pos = Position { line, column: col };
        if is_name_char(c) {
            let mut word = String::new();
            while i < chars.len() && is_name_char(chars[i]) {
                let c = chars[i];
                word.push(c);
                advance(&mut i, &mut line, &mut col, c);
            }
            let kind = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Name(word),
            };
            tokens.push(Token { kind, pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let sym = SYMBOLS.iter().find(|s| rest.starts_with(**s));
        match sym {
            Some(s) => {
                for _ in 0..s.chars().count() {
                    let c = chars[i];
                    advance(&mut i, &mut line, &mut col, c);
                }
                tokens.push(Token {
                    kind: TokenKind::Punct(s),
                    pos,
                });
            }
            None => {
                return Err(ParseError::Syntax {
                    position: pos,
                    expected: vec!["a name, keyword, or symbol".to_string()],
                    found: format!("`{c}`"),
                });
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        pos: Position { line, column: col },
    });
    Ok(tokens)
}
