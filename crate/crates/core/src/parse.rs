//! Shared lexing helpers and the constant-arithmetic sub-language.
//!
//! Constants are real-valued expressions over decimal literals, `pi`,
//! `+ - * /` and parentheses. They are folded to an `f64` as soon as they
//! are parsed, so no symbolic constant ever reaches the runtime types.

use std::fmt;

/// A parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: 1,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn on_line(mut self, line: usize) -> Self {
        self.line = line;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A sub-slice of some input together with the 0-based byte offset at
/// which it starts, so nested parsers can report absolute columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Span<'a> {
    pub text: &'a str,
    pub offset: usize,
}

impl<'a> Span<'a> {
    pub fn new(text: &'a str, offset: usize) -> Self {
        Span { text, offset }
    }

    pub fn trim(self) -> Self {
        let lead = self.text.len() - self.text.trim_start().len();
        Span {
            text: self.text.trim(),
            offset: self.offset + lead,
        }
    }

    pub fn slice(self, start: usize, end: usize) -> Self {
        Span {
            text: &self.text[start..end],
            offset: self.offset + start,
        }
    }

    pub fn error(&self, at: usize, message: impl Into<String>) -> ParseError {
        ParseError::new(self.offset + at + 1, message)
    }

    /// Splits on `sep` at bracket depth zero.
    pub fn split_top_level(self, sep: char) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in self.text.char_indices() {
            match ch {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth -= 1,
                c if c == sep && depth == 0 => {
                    out.push(self.slice(start, i));
                    start = i + c.len_utf8();
                }
                _ => {}
            }
        }
        out.push(self.slice(start, self.text.len()));
        out
    }

    /// Whitespace-separated tokens.
    pub fn tokens(self) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.text.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    out.push(self.slice(s, i));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            out.push(self.slice(s, self.text.len()));
        }
        out
    }
}

/// Parses and folds a constant expression spanning all of `text`.
pub fn parse_const(text: &str) -> Result<f64, ParseError> {
    parse_const_span(Span::new(text, 0))
}

pub(crate) fn parse_const_span(span: Span<'_>) -> Result<f64, ParseError> {
    let mut p = ConstParser {
        bytes: span.text.as_bytes(),
        pos: 0,
        span,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(span.error(0, "expected a number"));
    }
    let value = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(span.error(p.pos, format!("unexpected '{}'", p.peek_char())));
    }
    if !value.is_finite() {
        return Err(span.error(0, "constant is not finite"));
    }
    Ok(value)
}

struct ConstParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    span: Span<'a>,
}

impl ConstParser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        self.span.text[self.pos..].chars().next().unwrap_or(' ')
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<f64, ParseError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let divisor = self.unary()?;
                    if divisor == 0.0 {
                        return Err(self.span.error(at, "division by zero"));
                    }
                    acc /= divisor;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.span.error(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'p') if self.bytes[self.pos..].starts_with(b"pi") => {
                self.pos += 2;
                Ok(std::f64::consts::PI)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(start),
            Some(_) => Err(self
                .span
                .error(start, format!("unexpected '{}'", self.peek_char()))),
            None => Err(self.span.error(start, "unexpected end of constant")),
        }
    }

    fn number(&mut self, start: usize) -> Result<f64, ParseError> {
        let digits = |p: &mut Self| {
            while matches!(p.peek(), Some(b) if b.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = &self.span.text[start..self.pos];
        text.parse::<f64>()
            .map_err(|_| self.span.error(start, format!("malformed number '{text}'")))
    }
}

/// Formats a float so that parsing the text yields the same bits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 && x.is_sign_negative() {
        return "-0".to_string();
    }
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn folds_arithmetic() {
        assert_eq!(parse_const("1").unwrap(), 1.0);
        assert_eq!(parse_const("-4").unwrap(), -4.0);
        assert_eq!(parse_const(" 1 + 2 * 3 ").unwrap(), 7.0);
        assert_eq!(parse_const("(1+2)*3").unwrap(), 9.0);
        assert_eq!(parse_const("2/((4*3-1)*pi)").unwrap(), 2.0 / (11.0 * PI));
        assert_eq!(parse_const("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_const("--2").unwrap(), 2.0);
        assert_eq!(parse_const(".5").unwrap(), 0.5);
    }

    #[test]
    fn rejects_division_by_zero() {
        let err = parse_const("1/(2-2)").unwrap_err();
        assert!(err.message.contains("division by zero"));
        assert_eq!(err.column, 3);
    }

    #[test]
    fn reports_column_of_garbage() {
        let err = parse_const("1 + x").unwrap_err();
        assert_eq!(err.column, 5);
        assert!(parse_const("").is_err());
        assert!(parse_const("(1").is_err());
        assert!(parse_const("1 2").is_err());
    }

    #[test]
    fn top_level_split_respects_brackets() {
        let s = Span::new("0, 2/((4*3-1)*pi)", 0);
        let parts: Vec<_> = s.split_top_level(',').into_iter().map(|p| p.text).collect();
        assert_eq!(parts, vec!["0", " 2/((4*3-1)*pi)"]);
    }

    #[test]
    fn real_formatting_round_trips() {
        for x in [0.1, -0.0, 1.0 / 3.0, 2.0 / (11.0 * PI), 1e-300, -7.25e17] {
            let back = parse_const(&fmt_real(x)).unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
