use num_bigint::BigInt;

use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Nat(BigInt),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::And => "`&&`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Splits the input into tokens. Unknown characters are reported and skipped.
pub(super) fn lex(text: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let span = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        line,
        column: text[line_start..start].chars().count() + 1,
        start,
        end,
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let simple = match c {
            b'{' => Some((Tok::LBrace, 1)),
            b'}' => Some((Tok::RBrace, 1)),
            b'(' => Some((Tok::LParen, 1)),
            b')' => Some((Tok::RParen, 1)),
            b';' => Some((Tok::Semi, 1)),
            b'+' => Some((Tok::Plus, 1)),
            b'-' => Some((Tok::Minus, 1)),
            b'*' => Some((Tok::Star, 1)),
            b'/' => Some((Tok::Slash, 1)),
            b'<' if bytes.get(i + 1) == Some(&b'=') => Some((Tok::Le, 2)),
            b'<' => Some((Tok::Lt, 1)),
            b'>' if bytes.get(i + 1) == Some(&b'=') => Some((Tok::Ge, 2)),
            b'>' => Some((Tok::Gt, 1)),
            b'&' if bytes.get(i + 1) == Some(&b'&') => Some((Tok::And, 2)),
            _ => None,
        };
        if let Some((tok, len)) = simple {
            i += len;
            tokens.push(Token {
                tok,
                span: span(start, i, line, line_start),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let sp = span(start, i, line, line_start);
            if i < bytes.len() && bytes[i] == b'.' {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                errors.push(ParseError::new(
                    span(start, i, line, line_start),
                    ParseErrorKind::BadRational,
                    format!("decimal literal `{}`; write rationals as INT/NAT", &text[start..i]),
                ));
                tokens.push(Token {
                    tok: Tok::Nat(BigInt::from(0)),
                    span: sp,
                });
                continue;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            tokens.push(Token { tok: Tok::Nat(n), span: sp });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                span: span(start, i, line, line_start),
            });
            continue;
        }
        let ch = text[i..].chars().next().expect("in bounds");
        i += ch.len_utf8();
        errors.push(ParseError::new(
            span(start, i, line, line_start),
            ParseErrorKind::Syntax,
            format!("unexpected character `{ch}`"),
        ));
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: span(bytes.len(), bytes.len(), line, line_start),
    });
    (tokens, errors)
}
