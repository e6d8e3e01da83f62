//! Text format for models.
//!
//! ```text
//! location W { invariant x < 3; initial; }
//! edge p_W from W guard x > 1 && x < 3 {
//!   to S prob (3*x - 3)/8;
//!   to T prob (11 - 3*x)/16;
//! }
//! ```
//!
//! Probabilities are linear expressions over `x` built from natural literals,
//! `+ - * /` and parentheses; `#` starts a line comment.

mod lexer;
mod parser;

use std::fmt::{self, Write};

use crate::model::Cdpta;

/// A region of the input; `line` and `column` are 1-based, offsets are bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Syntax,
    NonlinearExpr,
    UnknownIdent,
    Duplicate,
    BadRational,
}

impl ParseErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "SYNTAX",
            ParseErrorKind::NonlinearExpr => "NONLINEAR_EXPR",
            ParseErrorKind::UnknownIdent => "UNKNOWN_IDENT",
            ParseErrorKind::Duplicate => "DUPLICATE",
            ParseErrorKind::BadRational => "BAD_RATIONAL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, kind: ParseErrorKind, message: String) -> Self {
        ParseError { span, kind, message }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.line,
            self.span.column,
            self.kind.as_str(),
            self.message
        )
    }
}

/// Parses a model. Every error found is reported, in source order.
pub fn parse(text: &str) -> Result<Cdpta, Vec<ParseError>> {
    parser::parse(text)
}

/// Canonical text: locations by name, edges by id, probabilities as `c + d*x`.
pub fn render(model: &Cdpta) -> String {
    let mut out = String::new();
    for (name, inv) in model.locations() {
        let op = if inv.strict { "<" } else { "<=" };
        let initial = if name == model.initial() { " initial;" } else { "" };
        let _ = writeln!(out, "location {name} {{ invariant x {op} {};{initial} }}", inv.bound);
    }
    for edge in model.edges() {
        let _ = writeln!(out, "\nedge {} from {} guard {} {{", edge.id, edge.source, edge.guard);
        for o in &edge.outcomes {
            let reset = if o.reset { " reset" } else { "" };
            let _ = writeln!(out, "  to {}{reset} prob {};", o.target, o.expr);
        }
        out.push_str("}\n");
    }
    out
}

/// One line per error with a caret under the offending span.
pub fn format_errors(text: &str, errors: &[ParseError]) -> String {
    let mut out = String::new();
    for e in errors {
        let _ = writeln!(out, "{e}");
        if let Some(line) = text.lines().nth(e.span.line.saturating_sub(1)) {
            let width = text[e.span.start..e.span.end.max(e.span.start)].chars().count().max(1);
            let _ = writeln!(out, "  | {line}");
            let _ = writeln!(out, "  | {}{}", " ".repeat(e.span.column - 1), "^".repeat(width));
        }
    }
    out
}
