use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::lexer::{lex, Tok, Token};
use super::{ParseError, ParseErrorKind, SourceSpan};
use crate::model::{AffineExpr, Atom, Cdpta, ClockConstraint, InvariantSpec, Outcome, ProbEdge, Relation};
use crate::rational::Rational;

/// `c + d·x` while parsing.
#[derive(Clone, Debug)]
struct Lin {
    c: Rational,
    d: Rational,
}

impl Lin {
    fn constant(c: Rational) -> Self {
        Lin { c, d: Rational::zero() }
    }
}

struct LocationDecl {
    name: String,
    span: SourceSpan,
    invariant: InvariantSpec,
    initial: Option<SourceSpan>,
}

struct OutcomeDecl {
    target: String,
    span: SourceSpan,
    reset: bool,
    expr: AffineExpr,
}

struct EdgeDecl {
    id: String,
    span: SourceSpan,
    source: String,
    source_span: SourceSpan,
    guard: ClockConstraint,
    outcomes: Vec<OutcomeDecl>,
}

/// Raised after an error has been recorded; the caller resynchronises.
struct Bail;

type PResult<T> = Result<T, Bail>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, span: SourceSpan, kind: ParseErrorKind, message: String) {
        self.errors.push(ParseError::new(span, kind, message));
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        self.error(self.span(), ParseErrorKind::Syntax, format!("expected {expected}, found {found}"));
        Err(Bail)
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<SourceSpan> {
        match self.peek() {
            Tok::Ident(s) if s == word => Ok(self.bump().span),
            _ => self.unexpected(&format!("`{word}`")),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => self.unexpected(what),
        }
    }

    fn nat_u64(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                let span = self.bump().span;
                match n.to_u64() {
                    Some(v) => Ok(v),
                    None => {
                        self.error(span, ParseErrorKind::BadRational, format!("constant {n} is too large"));
                        Ok(0)
                    }
                }
            }
            _ => self.unexpected("a natural number"),
        }
    }

    /// Skips to the next top-level item.
    fn sync_item(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Ident(s) if depth == 0 && (s == "location" || s == "edge") => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    if depth <= 1 {
                        self.bump();
                        return;
                    }
                    depth -= 1;
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Skips past the current outcome, stopping before `}`.
    fn sync_outcome(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof | Tok::RBrace => return,
                Tok::Semi => {
                    self.bump();
                    return;
                }
                Tok::Ident(s) if s == "to" || s == "location" || s == "edge" => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn location(&mut self) -> PResult<LocationDecl> {
        self.keyword("location")?;
        let (name, span) = self.ident("a location name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("invariant")?;
        self.keyword("x")?;
        let strict = match self.peek() {
            Tok::Lt => true,
            Tok::Le => false,
            _ => return self.unexpected("`<` or `<=`"),
        };
        self.bump();
        let bound = self.nat_u64()?;
        self.expect(Tok::Semi)?;
        let mut initial = None;
        if self.at_keyword("initial") {
            initial = Some(self.bump().span);
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(LocationDecl {
            name,
            span,
            invariant: InvariantSpec { strict, bound },
            initial,
        })
    }

    fn guard(&mut self) -> PResult<ClockConstraint> {
        if self.at_keyword("true") {
            self.bump();
            return Ok(ClockConstraint::truth());
        }
        let mut atoms = vec![self.atom()?];
        while *self.peek() == Tok::And {
            self.bump();
            atoms.push(self.atom()?);
        }
        Ok(ClockConstraint::new(atoms))
    }

    fn atom(&mut self) -> PResult<Atom> {
        self.keyword("x")?;
        let relation = match self.peek() {
            Tok::Lt => Relation::Lt,
            Tok::Le => Relation::Le,
            Tok::Gt => Relation::Gt,
            Tok::Ge => Relation::Ge,
            _ => return self.unexpected("a comparison"),
        };
        self.bump();
        Ok(Atom::new(relation, self.nat_u64()?))
    }

    fn edge(&mut self) -> PResult<EdgeDecl> {
        self.keyword("edge")?;
        let (id, span) = self.ident("an edge name")?;
        self.keyword("from")?;
        let (source, source_span) = self.ident("a location name")?;
        self.keyword("guard")?;
        let guard = self.guard()?;
        self.expect(Tok::LBrace)?;
        let mut outcomes = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => return self.unexpected("`}`"),
                Tok::Ident(s) if s == "location" || s == "edge" => return self.unexpected("`}`"),
                _ => match self.outcome() {
                    Ok(o) => outcomes.push(o),
                    Err(Bail) => self.sync_outcome(),
                },
            }
        }
        if outcomes.is_empty() {
            self.error(span, ParseErrorKind::Syntax, format!("edge `{id}` has no outcomes"));
        }
        Ok(EdgeDecl {
            id,
            span,
            source,
            source_span,
            guard,
            outcomes,
        })
    }

    fn outcome(&mut self) -> PResult<OutcomeDecl> {
        self.keyword("to")?;
        let (target, span) = self.ident("a location name")?;
        let reset = if self.at_keyword("reset") {
            self.bump();
            true
        } else {
            false
        };
        self.keyword("prob")?;
        let lin = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(OutcomeDecl {
            target,
            span,
            reset,
            expr: AffineExpr::new(lin.c, lin.d),
        })
    }

    fn expr(&mut self) -> PResult<Lin> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = Lin {
                        c: acc.c + t.c,
                        d: acc.d + t.d,
                    };
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = Lin {
                        c: acc.c - t.c,
                        d: acc.d - t.d,
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult<Lin> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let span = self.bump().span;
                    let f = self.unary()?;
                    acc = if acc.d.is_zero() {
                        Lin {
                            c: &acc.c * &f.c,
                            d: &acc.c * &f.d,
                        }
                    } else if f.d.is_zero() {
                        Lin {
                            c: &acc.c * &f.c,
                            d: &acc.d * &f.c,
                        }
                    } else {
                        self.error(span, ParseErrorKind::NonlinearExpr, "product of two clock terms".into());
                        Lin::constant(Rational::zero())
                    };
                }
                Tok::Slash => {
                    let span = self.bump().span;
                    let divisor = self.unary()?;
                    if !divisor.d.is_zero() {
                        self.error(span, ParseErrorKind::NonlinearExpr, "division by a clock term".into());
                        acc = Lin::constant(Rational::zero());
                    } else if divisor.c.is_zero() {
                        self.error(span, ParseErrorKind::BadRational, "division by zero".into());
                        acc = Lin::constant(Rational::zero());
                    } else {
                        acc = Lin {
                            c: &acc.c / &divisor.c,
                            d: &acc.d / &divisor.c,
                        };
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> PResult<Lin> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                let v = self.unary()?;
                Ok(Lin { c: -v.c, d: -v.d })
            }
            Tok::Nat(n) => {
                self.bump();
                Ok(Lin::constant(Rational::from_integer(n)))
            }
            Tok::Ident(s) if s == "x" => {
                self.bump();
                Ok(Lin {
                    c: Rational::zero(),
                    d: Rational::from_integer(BigInt::from(1)),
                })
            }
            Tok::LParen => {
                self.bump();
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            _ => self.unexpected("a number, `x` or `(`"),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Cdpta, Vec<ParseError>> {
    let (tokens, lex_errors) = lex(text);
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: lex_errors,
    };
    let mut locations = Vec::new();
    let mut edges = Vec::new();
    while *p.peek() != Tok::Eof {
        if p.at_keyword("location") {
            match p.location() {
                Ok(l) => locations.push(l),
                Err(Bail) => p.sync_item(),
            }
        } else if p.at_keyword("edge") {
            match p.edge() {
                Ok(e) => edges.push(e),
                Err(Bail) => p.sync_item(),
            }
        } else {
            let _ = p.unexpected::<()>("`location` or `edge`");
            p.bump();
            p.sync_item();
        }
    }
    let eof = p.span();
    let mut errors = p.errors;

    let mut declared: HashMap<&str, SourceSpan> = HashMap::new();
    let mut invariants = BTreeMap::new();
    let mut initial: Option<(&str, SourceSpan)> = None;
    for l in &locations {
        if let Some(first) = declared.get(l.name.as_str()) {
            errors.push(ParseError::new(
                l.span,
                ParseErrorKind::Duplicate,
                format!("location `{}` already declared at line {}", l.name, first.line),
            ));
            continue;
        }
        declared.insert(&l.name, l.span);
        invariants.insert(l.name.clone(), l.invariant);
        if let Some(span) = l.initial {
            match initial {
                Some((other, _)) => errors.push(ParseError::new(
                    span,
                    ParseErrorKind::Duplicate,
                    format!("location `{}` is marked initial, but so is `{other}`", l.name),
                )),
                None => initial = Some((&l.name, span)),
            }
        }
    }
    let mut edge_ids: HashMap<&str, SourceSpan> = HashMap::new();
    let mut built = Vec::new();
    for e in &edges {
        if let Some(first) = edge_ids.get(e.id.as_str()) {
            errors.push(ParseError::new(
                e.span,
                ParseErrorKind::Duplicate,
                format!("edge `{}` already declared at line {}", e.id, first.line),
            ));
            continue;
        }
        edge_ids.insert(&e.id, e.span);
        if !declared.contains_key(e.source.as_str()) {
            errors.push(ParseError::new(
                e.source_span,
                ParseErrorKind::UnknownIdent,
                format!("unknown location `{}`", e.source),
            ));
        }
        let mut seen = HashMap::new();
        let mut outcomes = Vec::new();
        for o in &e.outcomes {
            if !declared.contains_key(o.target.as_str()) {
                errors.push(ParseError::new(
                    o.span,
                    ParseErrorKind::UnknownIdent,
                    format!("unknown location `{}`", o.target),
                ));
            }
            if seen.insert((o.reset, o.target.as_str()), ()).is_some() {
                errors.push(ParseError::new(
                    o.span,
                    ParseErrorKind::Duplicate,
                    format!(
                        "edge `{}` already has an outcome to `{}`{}",
                        e.id,
                        o.target,
                        if o.reset { " with reset" } else { " without reset" }
                    ),
                ));
            }
            outcomes.push(Outcome::new(o.reset, o.target.clone(), o.expr.clone()));
        }
        built.push(ProbEdge::new(e.id.clone(), e.source.clone(), e.guard.clone(), outcomes));
    }
    if initial.is_none() && !locations.is_empty() {
        errors.push(ParseError::new(eof, ParseErrorKind::Syntax, "no location is marked `initial`".into()));
    }
    if locations.is_empty() {
        errors.push(ParseError::new(eof, ParseErrorKind::Syntax, "model declares no locations".into()));
    }
    if !errors.is_empty() {
        errors.sort_by_key(|e| e.span.start);
        return Err(errors);
    }
    let (initial, span) = initial.expect("checked above");
    Cdpta::new(invariants, built, initial)
        .map_err(|e| vec![ParseError::new(span, ParseErrorKind::Syntax, e.to_string())])
}
