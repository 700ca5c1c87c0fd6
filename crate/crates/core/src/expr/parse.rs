//! Recursive-descent parser for defining-function expressions.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := '-' factor | power
//! power    := atom ('^' exponent)?
//! exponent := ['-'] INT
//!           | ['-'] REAL
//!           | '(' ['-'] INT '/' INT ',' ('principal' | 'poscut') ')'
//! atom     := NUMBER | 'i' | 'z' DIGITS | FUNC '(' expr ')' | IDENT | '(' expr ')'
//! FUNC     := 'conj' | 're' | 'im' | 'abs' | 'abs2'
//! ```
//!
//! A `REAL` exponent must contain a decimal point; an `INT` exponent must
//! not. Rational exponents always carry an explicit branch name, so a parsed
//! tree never has an ambiguous power. Identifiers other than coordinates,
//! `i`, and the builtin functions become named parameters.

use super::{Branch, Expr};
use thiserror::Error;

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, text: String, is_real: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { text, .. } => format!("number `{text}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                toks.push(Token { tok: Tok::Plus, pos });
                i += 1;
            }
            '-' => {
                toks.push(Token { tok: Tok::Minus, pos });
                i += 1;
            }
            '*' => {
                toks.push(Token { tok: Tok::Star, pos });
                i += 1;
            }
            '/' => {
                toks.push(Token { tok: Tok::Slash, pos });
                i += 1;
            }
            '^' => {
                toks.push(Token { tok: Tok::Caret, pos });
                i += 1;
            }
            '(' => {
                toks.push(Token { tok: Tok::LParen, pos });
                i += 1;
            }
            ')' => {
                toks.push(Token { tok: Tok::RParen, pos });
                i += 1;
            }
            ',' => {
                toks.push(Token { tok: Tok::Comma, pos });
                i += 1;
            }
            '0'..='9' => {
                let mut j = i;
                let mut is_real = false;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    if j + 1 >= bytes.len() || !bytes[j + 1].is_ascii_digit() {
                        return err(j, "expected digits after decimal point");
                    }
                    is_real = true;
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                // Scientific notation is accepted on input even though the
                // printer only emits plain decimals.
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        is_real = true;
                        j = k;
                    }
                }
                let text = &src[i..j];
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError {
                        pos,
                        msg: format!("invalid number `{text}`"),
                    })?;
                toks.push(Token {
                    tok: Tok::Num {
                        value,
                        text: text.to_string(),
                        is_real,
                    },
                    pos,
                });
                i = j;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut j = i;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                toks.push(Token {
                    tok: Tok::Ident(src[i..j].to_string()),
                    pos,
                });
                i = j;
            }
            '.' => return err(pos, "numbers need a leading digit (write `0.5`, not `.5`)"),
            other => return err(pos, format!("unexpected character `{other}`")),
        }
    }
    Ok(toks)
}

const FUNCS: [&str; 5] = ["conj", "re", "im", "abs", "abs2"];

struct Parser {
    toks: Vec<Token>,
    idx: usize,
    end: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|t| t.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|t| t.tok.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            match self.peek() {
                Some(got) => err(self.pos(), format!("expected {what}, found {}", got.describe())),
                None => err(self.end, format!("expected {what}, found end of input")),
            }
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.parse_term()?;
                lhs = Expr::add(lhs, rhs);
            } else if self.eat(&Tok::Minus) {
                let rhs = self.parse_term()?;
                lhs = Expr::sub(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.parse_factor()?;
                lhs = Expr::mul(lhs, rhs);
            } else if self.eat(&Tok::Slash) {
                let rhs = self.parse_factor()?;
                lhs = Expr::div(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let inner = self.parse_factor()?;
            return Ok(match inner {
                Expr::Lit(c) => Expr::Lit(-c),
                other => Expr::sub(Expr::lit(0.0), other),
            });
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_atom()?;
        if self.eat(&Tok::Caret) {
            self.parse_exponent(base)
        } else {
            Ok(base)
        }
    }

    /// Signed integer token; rejects reals and out-of-range values.
    fn parse_int(&mut self, what: &str) -> Result<i32, ParseError> {
        let neg = self.eat(&Tok::Minus);
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num { text, is_real, .. }) => {
                if is_real {
                    return err(pos, format!("{what} must be an integer, found `{text}`"));
                }
                let v: i64 = text
                    .parse()
                    .map_err(|_| ParseError {
                        pos,
                        msg: format!("{what} `{text}` out of range"),
                    })?;
                let v = if neg { -v } else { v };
                i32::try_from(v).map_err(|_| ParseError {
                    pos,
                    msg: format!("{what} `{v}` out of range"),
                })
            }
            Some(got) => err(pos, format!("expected {what}, found {}", got.describe())),
            None => err(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn parse_exponent(&mut self, base: Expr) -> Result<Expr, ParseError> {
        if self.eat(&Tok::LParen) {
            let num = self.parse_int("exponent numerator")?;
            self.expect(Tok::Slash, "`/` in fractional exponent")?;
            let den_pos = self.pos();
            let den = self.parse_int("exponent denominator")?;
            if den <= 0 {
                return err(den_pos, "exponent denominator must be positive");
            }
            if self.eat(&Tok::RParen) {
                return err(
                    self.pos().saturating_sub(1),
                    "fractional power needs a branch: write `^(p/q, principal)` or `^(p/q, poscut)`",
                );
            }
            self.expect(Tok::Comma, "`,` before the branch name")?;
            let branch_pos = self.pos();
            let branch = match self.bump() {
                Some(Tok::Ident(name)) => match name.as_str() {
                    "principal" => Branch::Principal,
                    "poscut" => Branch::PosCut,
                    other => {
                        return err(
                            branch_pos,
                            format!("unknown branch `{other}` (use `principal` or `poscut`)"),
                        )
                    }
                },
                Some(got) => {
                    return err(
                        branch_pos,
                        format!("expected a branch name, found {}", got.describe()),
                    )
                }
                None => return err(self.end, "expected a branch name, found end of input"),
            };
            self.expect(Tok::RParen, "`)` closing the exponent")?;
            return Ok(Expr::frac_pow(base, num, den, branch));
        }

        let neg = self.eat(&Tok::Minus);
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num {
                value,
                text,
                is_real,
            }) => {
                if is_real {
                    let alpha = if neg { -value } else { value };
                    Ok(Expr::real_pow(base, alpha))
                } else {
                    let v: i64 = text.parse().map_err(|_| ParseError {
                        pos,
                        msg: format!("exponent `{text}` out of range"),
                    })?;
                    let v = if neg { -v } else { v };
                    let k = i32::try_from(v).map_err(|_| ParseError {
                        pos,
                        msg: format!("exponent `{v}` out of range"),
                    })?;
                    Ok(Expr::int_pow(base, k))
                }
            }
            Some(got) => err(
                pos,
                format!(
                    "expected an exponent (integer, real, or `(p/q, branch)`), found {}",
                    got.describe()
                ),
            ),
            None => err(self.end, "expected an exponent, found end of input"),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num { value, .. }) => Ok(Expr::lit(value)),
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.classify_ident(name, pos),
            Some(got) => err(pos, format!("expected a value, found {}", got.describe())),
            None => err(self.end, "expected a value, found end of input"),
        }
    }

    fn classify_ident(&mut self, name: String, pos: usize) -> Result<Expr, ParseError> {
        if name == "i" {
            return Ok(Expr::Lit(num_complex::Complex64::i()));
        }
        if name == "principal" || name == "poscut" {
            return err(
                pos,
                format!("`{name}` is a branch name and only valid inside `^(p/q, ...)`"),
            );
        }
        if FUNCS.contains(&name.as_str()) {
            self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
            let arg = self.parse_expr()?;
            self.expect(Tok::RParen, &format!("`)` closing `{name}(...)`"))?;
            return Ok(match name.as_str() {
                "conj" => Expr::conj(arg),
                "re" => Expr::re_of(arg),
                "im" => Expr::im_of(arg),
                "abs" => Expr::abs_of(arg),
                "abs2" => Expr::abs2_of(arg),
                _ => unreachable!(),
            });
        }
        if name.len() > 1 && name.starts_with('z') && name[1..].bytes().all(|b| b.is_ascii_digit())
        {
            let index: usize = name[1..].parse().map_err(|_| ParseError {
                pos,
                msg: format!("coordinate index in `{name}` out of range"),
            })?;
            if index == 0 {
                return err(pos, "coordinates are numbered from z1");
            }
            if index > self.n {
                return err(pos, format!("z{index} is out of range for C^{}", self.n));
            }
            return Ok(Expr::Var(index));
        }
        Ok(Expr::Param(name))
    }
}

impl Expr {
    /// Parses an expression over `z1..zn`; other identifiers become
    /// parameters.
    pub fn parse(src: &str, n: usize) -> Result<Expr, ParseError> {
        let toks = lex(src)?;
        let mut p = Parser {
            toks,
            idx: 0,
            end: src.len(),
            n,
        };
        let e = p.parse_expr()?;
        if let Some(got) = p.peek() {
            return err(p.pos(), format!("unexpected {} after expression", got.describe()));
        }
        Ok(e)
    }
}
