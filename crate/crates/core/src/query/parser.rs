//! Recursive-descent parser for the query language.
//!
//! ```text
//! query  := clause+
//! clause := unit ("OR" unit)*
//! unit   := ["-"] (group | opcall | field | phrase | term)
//! group  := "(" query ")"
//! opcall := name "(" (query | STRING "," "input" | INT "," query ["," sort]) ")"
//! ```

use super::ast::*;
use crate::corpus::{is_valid_library_name, parse_date};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", .expected.join(" or "))]
    Syntax { expected: Vec<&'static str>, found: String },
    #[error("unterminated string")]
    UnterminatedString,
    #[error("unknown field: {0}")]
    UnknownField(String),
    #[error("unknown operator: {0}")]
    UnknownOperator(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("invalid value for {field}: {message}")]
    InvalidValue { field: String, message: String },
    #[error("topn count must be in 1..=1000, got {0}")]
    TopNOutOfRange(String),
}

/// A parse failure at byte `offset` of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at byte {})", self.kind, self.offset)
    }
}

impl std::error::Error for ParseError {}

const CLAUSE: &[&str] = &["term", "phrase", "field", "operator", "'('"];

pub fn parse(input: &str) -> Result<QueryAst, ParseError> {
    let mut p = Parser { src: input, pos: 0 };
    let q = p.query()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax(&["end of input"]));
    }
    Ok(q)
}

fn is_stop(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"' | '\u{201C}' | '\u{201D}')
}

fn closing_quote(c: char) -> Option<char> {
    match c {
        '"' => Some('"'),
        '\u{201C}' => Some('\u{201D}'),
        _ => None,
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(c) => format!("'{c}'"),
        }
    }

    fn err(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind }
    }

    fn syntax(&self, expected: &[&'static str]) -> ParseError {
        self.err(
            self.pos,
            ParseErrorKind::Syntax {
                expected: expected.to_vec(),
                found: self.found(),
            },
        )
    }

    fn expect(&mut self, c: char, label: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(&[label]))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    /// True if the next bare word is exactly `OR`.
    fn at_or(&self) -> bool {
        let r = self.rest();
        r.starts_with("OR") && r[2..].chars().next().is_none_or(is_stop)
    }

    fn query(&mut self) -> Result<QueryAst, ParseError> {
        let mut clauses = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')') | Some(',') => break,
                _ => clauses.push(self.clause()?),
            }
        }
        if clauses.is_empty() {
            return Err(self.syntax(CLAUSE));
        }
        Ok(combine(clauses))
    }

    fn clause(&mut self) -> Result<QueryAst, ParseError> {
        let mut items = vec![self.unit()?];
        loop {
            let save = self.pos;
            self.skip_ws();
            if !self.at_or() {
                self.pos = save;
                break;
            }
            self.pos += 2;
            self.skip_ws();
            items.push(self.unit()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            QueryAst::Or(items)
        })
    }

    fn unit(&mut self) -> Result<QueryAst, ParseError> {
        if self.peek() == Some('-') {
            self.bump();
            return Ok(QueryAst::negate(self.primary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<QueryAst, ParseError> {
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Err(self.syntax(CLAUSE));
        };
        if c == '(' {
            self.bump();
            let q = self.query()?;
            self.expect(')', "')'")?;
            return Ok(q);
        }
        if closing_quote(c).is_some() {
            return Ok(QueryAst::Phrase(self.string()?));
        }
        if is_stop(c) || c == '-' || self.at_or() {
            return Err(self.syntax(CLAUSE));
        }
        if is_ident_start(c) {
            let name = self.take_while(is_ident);
            match self.peek() {
                Some(':') => {
                    self.bump();
                    return self.field(name, start);
                }
                Some('(') => {
                    self.bump();
                    return self.opcall(name, start);
                }
                _ => {}
            }
        }
        self.pos = start;
        Ok(QueryAst::Term(self.take_while(|c| !is_stop(c)).to_string()))
    }

    /// Quoted string; `\` escapes the next character.
    fn string(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let close = self.peek().and_then(closing_quote).expect("at a quote");
        self.bump();
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err(start, ParseErrorKind::UnterminatedString)),
                Some(c) if c == close => {
                    self.bump();
                    return Ok(out);
                }
                Some('\\') => {
                    self.bump();
                    match self.peek() {
                        None => return Err(self.err(start, ParseErrorKind::UnterminatedString)),
                        Some(c) => {
                            out.push(c);
                            self.bump();
                        }
                    }
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn value(&mut self) -> Result<(usize, String), ParseError> {
        let start = self.pos;
        if self.peek().and_then(closing_quote).is_some() {
            return Ok((start, self.string()?));
        }
        let v = self.take_while(|c| !is_stop(c));
        if v.is_empty() {
            return Err(self.syntax(&["field value"]));
        }
        Ok((start, v.to_string()))
    }

    fn invalid(&self, offset: usize, field: &str, message: impl Into<String>) -> ParseError {
        self.err(
            offset,
            ParseErrorKind::InvalidValue {
                field: field.into(),
                message: message.into(),
            },
        )
    }

    fn field(&mut self, name: &str, start: usize) -> Result<QueryAst, ParseError> {
        match name {
            "object" => Err(self.err(start, ParseErrorKind::UnsupportedField(name.into()))),
            "year" => self.year(),
            "entdate" => self.entdate(),
            "docs" => {
                let (at, v) = self.value()?;
                self.library(at, &v)
            }
            _ => {
                let Some(field) = FieldName::from_name(name) else {
                    return Err(self.err(start, ParseErrorKind::UnknownField(name.into())));
                };
                let (at, mut value) = self.value()?;
                let mut anchored = false;
                if matches!(field, FieldName::Author | FieldName::Inst) {
                    if let Some(v) = value.strip_prefix('^') {
                        value = v.to_string();
                        anchored = true;
                    }
                }
                if value.trim().is_empty() {
                    return Err(self.invalid(at, name, "empty value"));
                }
                Ok(QueryAst::Field {
                    name: field,
                    value,
                    anchored,
                })
            }
        }
    }

    fn year(&mut self) -> Result<QueryAst, ParseError> {
        let (at, v) = self.value()?;
        let bad = || self.invalid(at, "year", format!("'{v}' is not YEAR or YEAR-YEAR"));
        let num = |s: &str| -> Option<i32> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            s.parse().ok()
        };
        let (lo, hi) = match v.split_once('-') {
            Some((a, b)) => (num(a).ok_or_else(bad)?, num(b).ok_or_else(bad)?),
            None => {
                let y = num(&v).ok_or_else(bad)?;
                (y, y)
            }
        };
        if lo > hi {
            return Err(self.invalid(at, "year", format!("empty range {lo}-{hi}")));
        }
        Ok(QueryAst::YearRange(lo, hi))
    }

    fn date_bound(&mut self) -> Result<DateBound, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let tok = self.take_while(|c| !c.is_whitespace() && c != ']' && c != ')');
        if tok.is_empty() {
            return Err(self.syntax(&["date", "NOW", "'*'"]));
        }
        let bad = || self.invalid(at, "entdate", format!("bad date bound '{tok}'"));
        if tok == "*" {
            return Ok(DateBound::Open);
        }
        if tok == "NOW" {
            return Ok(DateBound::NowMinusDays(0));
        }
        if let Some(rest) = tok.strip_prefix("NOW-") {
            let digits = rest
                .strip_suffix("DAYS")
                .or_else(|| rest.strip_suffix("DAY"))
                .ok_or_else(bad)?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            return digits.parse().map(DateBound::NowMinusDays).map_err(|_| bad());
        }
        parse_date(tok).map(DateBound::Date).ok_or_else(bad)
    }

    fn entdate(&mut self) -> Result<QueryAst, ParseError> {
        if self.peek() != Some('[') {
            let (at, v) = self.value()?;
            let d = parse_date(&v).ok_or_else(|| self.invalid(at, "entdate", format!("bad date '{v}'")))?;
            return Ok(QueryAst::DateRange(DateBound::Date(d), DateBound::Date(d)));
        }
        self.bump();
        let lo = self.date_bound()?;
        self.skip_ws();
        if !self.rest().starts_with("TO") {
            return Err(self.syntax(&["'TO'"]));
        }
        self.pos += 2;
        let hi = self.date_bound()?;
        self.expect(']', "']'")?;
        Ok(QueryAst::DateRange(lo, hi))
    }

    fn library(&self, at: usize, spec: &str) -> Result<QueryAst, ParseError> {
        let name = spec
            .strip_prefix("library/")
            .ok_or_else(|| self.invalid(at, "docs", "expected library/NAME"))?;
        if !is_valid_library_name(name) {
            return Err(self.invalid(at, "docs", format!("invalid library name '{name}'")));
        }
        Ok(QueryAst::Docs(name.to_string()))
    }

    fn opcall(&mut self, name: &str, start: usize) -> Result<QueryAst, ParseError> {
        match name {
            "topn" => return self.topn(),
            "docs" => {
                self.skip_ws();
                let at = self.pos;
                let spec = self.take_while(|c| c != ')' && !c.is_whitespace());
                let node = self.library(at, spec)?;
                self.expect(')', "')'")?;
                return Ok(node);
            }
            _ => {}
        }
        let Some(kind) = OpKind::from_name(name) else {
            return Err(self.err(start, ParseErrorKind::UnknownOperator(name.into())));
        };
        if kind == OpKind::Similar {
            if let Some(text) = self.raw_text()? {
                return Ok(QueryAst::OpCall {
                    kind,
                    arg: OpArg::RawText(text),
                });
            }
        }
        let child = self.query()?;
        self.expect(')', "')'")?;
        Ok(QueryAst::op(kind, child))
    }

    /// `"text", input)` after `similar(`; rewinds and yields `None` otherwise.
    fn raw_text(&mut self) -> Result<Option<String>, ParseError> {
        let save = self.pos;
        self.skip_ws();
        if self.peek().and_then(closing_quote).is_none() {
            self.pos = save;
            return Ok(None);
        }
        let at = self.pos;
        let text = self.string()?;
        self.skip_ws();
        if self.peek() != Some(',') {
            self.pos = save;
            return Ok(None);
        }
        self.bump();
        self.skip_ws();
        if !(self.rest().starts_with("input") && self.rest()[5..].chars().next().is_none_or(is_stop)) {
            return Err(self.syntax(&["'input'"]));
        }
        self.pos += 5;
        self.expect(')', "')'")?;
        if text.trim().is_empty() {
            return Err(self.invalid(at, "similar", "empty input text"));
        }
        Ok(Some(text))
    }

    fn topn(&mut self) -> Result<QueryAst, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.syntax(&["integer"]));
        }
        let n = match digits.parse::<u32>() {
            Ok(n) if (1..=TOPN_MAX).contains(&n) => n,
            _ => return Err(self.err(at, ParseErrorKind::TopNOutOfRange(digits.into()))),
        };
        self.expect(',', "','")?;
        let child = self.query()?;
        self.skip_ws();
        let mut sort = SortSpec::SCORE_DESC;
        if self.peek() == Some(',') {
            self.bump();
            sort = self.sort()?;
        }
        self.expect(')', "')'")?;
        Ok(QueryAst::TopN {
            n,
            child: Box::new(child),
            sort,
        })
    }

    fn sort(&mut self) -> Result<SortSpec, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let key = self.take_while(is_ident);
        let key = SortKey::from_name(key).ok_or_else(|| {
            if key.is_empty() {
                self.syntax(&["sort key"])
            } else {
                self.invalid(at, "sort", format!("unknown sort key '{key}'"))
            }
        })?;
        self.skip_ws();
        let direction = match self.take_while(is_ident) {
            "asc" => Direction::Asc,
            "desc" => Direction::Desc,
            _ => return Err(self.syntax(&["'asc'", "'desc'"])),
        };
        Ok(SortSpec::new(key, direction))
    }
}

/// Juxtaposed clauses form an `And`, except that positive `bibcode:`
/// clauses are gathered into one `Or` (a list of records, not a
/// conjunction of identities).
fn combine(mut clauses: Vec<QueryAst>) -> QueryAst {
    let is_bib = |q: &QueryAst| {
        matches!(
            q,
            QueryAst::Field {
                name: FieldName::Bibcode,
                ..
            }
        )
    };
    if clauses.iter().filter(|c| is_bib(c)).count() >= 2 {
        let first = clauses.iter().position(is_bib).unwrap();
        let (bibs, mut rest): (Vec<_>, Vec<_>) = clauses.into_iter().partition(is_bib);
        rest.insert(first, QueryAst::Or(bibs));
        clauses = rest;
    }
    if clauses.len() == 1 {
        clauses.pop().unwrap()
    } else {
        QueryAst::And(clauses)
    }
}
