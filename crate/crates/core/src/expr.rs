//! Expression trees, the recursive-descent expression parser shared by model
//! files and candidate-combination files, and exact dual-number evaluation.
//!
//! Grammar:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := number | identifier | '(' expr ')'
//! ```

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::algebra::rational::parse_decimal;
use crate::algebra::{MPoly, Rational};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Var { name: String, line: usize, col: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>, Error> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, line, col });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let value = parse_decimal(&lit).ok_or_else(|| syntax(line, col, format!("malformed number `{lit}`")))?;
            out.push(Token {
                tok: Tok::Num(value),
                line,
                col,
            });
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_continue(chars[i]) {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
        } else {
            return Err(syntax(line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or((self.end_line, self.end_col), |t| (t.line, t.col))
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let (line, col) = self.here();
        match self.bump().map(|t| t.tok) {
            Some(Tok::Num(n)) if n.is_integer() => {
                let k: i32 = n
                    .to_integer()
                    .try_into()
                    .map_err(|_| syntax(line, col, "exponent too large"))?;
                Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
            }
            _ => Err(syntax(line, col, "expected an integer exponent after `^`")),
        }
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        let (line, col) = self.here();
        match self.bump() {
            Some(Token { tok: Tok::Num(n), .. }) => Ok(Expr::Const(n)),
            Some(Token {
                tok: Tok::Ident(name),
                line,
                col,
            }) => Ok(Expr::Var { name, line, col }),
            Some(Token { tok: Tok::LParen, .. }) => {
                let inner = self.expr()?;
                let (l, c) = self.here();
                match self.bump() {
                    Some(Token { tok: Tok::RParen, .. }) => Ok(inner),
                    _ => Err(syntax(l, c, "expected `)`")),
                }
            }
            Some(t) => Err(syntax(t.line, t.col, format!("unexpected {}", describe(&t.tok)))),
            None => Err(syntax(line, col, "unexpected end of expression")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".to_owned(),
        Tok::Minus => "`-`".to_owned(),
        Tok::Star => "`*`".to_owned(),
        Tok::Slash => "`/`".to_owned(),
        Tok::Caret => "`^`".to_owned(),
        Tok::LParen => "`(`".to_owned(),
        Tok::RParen => "`)`".to_owned(),
    }
}

impl Expr {
    /// Parses a standalone expression; positions are reported relative to
    /// line 1, column 1.
    pub fn parse(text: &str) -> Result<Expr, Error> {
        Self::parse_at(text, 1, 1)
    }

    /// Parses an expression that starts at `line`/`col` of a larger file.
    pub fn parse_at(text: &str, line: usize, col: usize) -> Result<Expr, Error> {
        let toks = lex(text, line, col)?;
        let mut p = Parser {
            toks,
            pos: 0,
            end_line: line,
            end_col: col + text.chars().count(),
        };
        let e = p.expr()?;
        if let Some(t) = p.toks.get(p.pos) {
            return Err(syntax(t.line, t.col, format!("unexpected {}", describe(&t.tok))));
        }
        Ok(e)
    }

    pub fn constant(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var {
            name: name.to_owned(),
            line: 0,
            col: 0,
        }
    }

    /// Names of all variables, in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_vars(&mut |name, _, _| {
            if !out.iter().any(|n| n == name) {
                out.push(name.to_owned());
            }
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&str, usize, usize)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var { name, line, col } => f(name, *line, *col),
            Expr::Neg(a) | Expr::Pow(a, _) => a.visit_vars(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// Checks every identifier against `names`.
    pub fn check_declared<S: AsRef<str>>(&self, names: &[S]) -> Result<(), Error> {
        let mut err = None;
        self.visit_vars(&mut |name, line, col| {
            if err.is_none() && !names.iter().any(|n| n.as_ref() == name) {
                err = Some(Error::UndeclaredIdentifier {
                    name: name.to_owned(),
                    line,
                    col,
                });
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Converts to a polynomial over `names`. Division is accepted only by
    /// nonzero constants and negative powers only of constants, so the
    /// result is always a polynomial.
    pub fn to_mpoly<S: AsRef<str>>(&self, names: &[S]) -> Result<MPoly, Error> {
        let n = names.len();
        Ok(match self {
            Expr::Const(c) => MPoly::constant(n, c.clone()),
            Expr::Var { name, line, col } => {
                let idx = names
                    .iter()
                    .position(|s| s.as_ref() == name)
                    .ok_or_else(|| Error::UndeclaredIdentifier {
                        name: name.clone(),
                        line: *line,
                        col: *col,
                    })?;
                MPoly::var(n, idx)
            }
            Expr::Neg(a) => -a.to_mpoly(names)?,
            Expr::Add(a, b) => a.to_mpoly(names)? + b.to_mpoly(names)?,
            Expr::Sub(a, b) => a.to_mpoly(names)? - b.to_mpoly(names)?,
            Expr::Mul(a, b) => a.to_mpoly(names)? * b.to_mpoly(names)?,
            Expr::Div(a, b) => {
                let den = b.to_mpoly(names)?;
                match den.constant_value() {
                    Some(c) if !c.is_zero() => a.to_mpoly(names)?.scale(&(Rational::one() / c)),
                    Some(_) => return Err(self.error_here("division by zero")),
                    None => {
                        return Err(self.error_here(
                            "division by a non-constant expression is only allowed in candidate combinations",
                        ))
                    }
                }
            }
            Expr::Pow(a, k) => {
                let base = a.to_mpoly(names)?;
                if *k >= 0 {
                    base.pow(*k as u32)
                } else {
                    match base.constant_value() {
                        Some(c) if !c.is_zero() => MPoly::constant(n, num_traits::pow::Pow::pow(c, *k)),
                        _ => return Err(self.error_here("negative powers need a nonzero constant base")),
                    }
                }
            }
        })
    }

    fn first_position(&self) -> (usize, usize) {
        let mut pos = None;
        self.visit_vars(&mut |_, l, c| {
            if pos.is_none() {
                pos = Some((l, c));
            }
        });
        pos.unwrap_or((0, 0))
    }

    fn error_here(&self, msg: &str) -> Error {
        let (line, col) = self.first_position();
        syntax(line, col, msg)
    }

    /// Exact value and gradient at `point` (indexed like `names`), with the
    /// gradient taken with respect to the variables listed in `wrt`.
    /// Returns `Err` on a division by zero at this point.
    pub fn eval_dual<S: AsRef<str>>(&self, names: &[S], point: &[Rational], wrt: &[usize]) -> Result<DualRat, Error> {
        let d = wrt.len();
        Ok(match self {
            Expr::Const(c) => DualRat::constant(c.clone(), d),
            Expr::Var { name, line, col } => {
                let idx = names
                    .iter()
                    .position(|s| s.as_ref() == name)
                    .ok_or_else(|| Error::UndeclaredIdentifier {
                        name: name.clone(),
                        line: *line,
                        col: *col,
                    })?;
                let mut v = DualRat::constant(point[idx].clone(), d);
                if let Some(slot) = wrt.iter().position(|&w| w == idx) {
                    v.grad[slot] = Rational::one();
                }
                v
            }
            Expr::Neg(a) => -a.eval_dual(names, point, wrt)?,
            Expr::Add(a, b) => a.eval_dual(names, point, wrt)? + b.eval_dual(names, point, wrt)?,
            Expr::Sub(a, b) => a.eval_dual(names, point, wrt)? - b.eval_dual(names, point, wrt)?,
            Expr::Mul(a, b) => a.eval_dual(names, point, wrt)? * b.eval_dual(names, point, wrt)?,
            Expr::Div(a, b) => {
                let num = a.eval_dual(names, point, wrt)?;
                let den = b.eval_dual(names, point, wrt)?;
                num.checked_div(&den)
                    .ok_or_else(|| Error::DivisionByZero("division by zero".to_string()))?
            }
            Expr::Pow(a, k) => {
                let base = a.eval_dual(names, point, wrt)?;
                base.checked_powi(*k)
                    .ok_or_else(|| Error::DivisionByZero("zero raised to a negative power".to_string()))?
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if !c.is_integer() || c < &Rational::zero() => 2,
            Expr::Const(_) | Expr::Var { .. } => 5,
        }
    }
}

fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, needed: bool) -> fmt::Result {
    if needed {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var { name, .. } => f.write_str(name),
            Expr::Neg(a) => {
                f.write_str("-")?;
                paren(f, a, a.precedence() < 3)
            }
            Expr::Add(a, b) => {
                paren(f, a, false)?;
                f.write_str(" + ")?;
                paren(f, b, b.precedence() < 2)
            }
            Expr::Sub(a, b) => {
                paren(f, a, false)?;
                f.write_str(" - ")?;
                paren(f, b, b.precedence() < 2)
            }
            Expr::Mul(a, b) => {
                paren(f, a, a.precedence() < 2)?;
                f.write_str("*")?;
                paren(f, b, b.precedence() < 3)
            }
            Expr::Div(a, b) => {
                paren(f, a, a.precedence() < 2)?;
                f.write_str("/")?;
                paren(f, b, b.precedence() < 4)
            }
            Expr::Pow(a, k) => {
                paren(f, a, a.precedence() < 5)?;
                write!(f, "^{k}")
            }
        }
    }
}

/// Exact forward-mode dual number over the rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct DualRat {
    pub value: Rational,
    pub grad: Vec<Rational>,
}

impl DualRat {
    pub fn constant(value: Rational, dims: usize) -> Self {
        DualRat {
            value,
            grad: vec![Rational::zero(); dims],
        }
    }

    pub fn checked_div(&self, rhs: &DualRat) -> Option<DualRat> {
        if rhs.value.is_zero() {
            return None;
        }
        let inv = Rational::one() / &rhs.value;
        let q = &self.value * &inv;
        let grad = self
            .grad
            .iter()
            .zip(&rhs.grad)
            .map(|(da, db)| (da - &q * db) * &inv)
            .collect();
        Some(DualRat { value: q, grad })
    }

    pub fn checked_powi(&self, k: i32) -> Option<DualRat> {
        if k == 0 {
            return Some(DualRat::constant(Rational::one(), self.grad.len()));
        }
        let mut acc = DualRat::constant(Rational::one(), self.grad.len());
        for _ in 0..k.unsigned_abs() {
            acc = acc * self.clone();
        }
        if k < 0 {
            DualRat::constant(Rational::one(), self.grad.len()).checked_div(&acc)
        } else {
            Some(acc)
        }
    }
}

impl Add for DualRat {
    type Output = DualRat;
    fn add(self, rhs: DualRat) -> DualRat {
        DualRat {
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for DualRat {
    type Output = DualRat;
    fn sub(self, rhs: DualRat) -> DualRat {
        DualRat {
            value: self.value - rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect(),
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for DualRat {
    type Output = DualRat;
    fn mul(self, rhs: DualRat) -> DualRat {
        DualRat {
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(da, db)| da * &rhs.value + &self.value * db)
                .collect(),
            value: self.value * rhs.value,
        }
    }
}

impl Neg for DualRat {
    type Output = DualRat;
    fn neg(self) -> DualRat {
        DualRat {
            value: -self.value,
            grad: self.grad.into_iter().map(|g| -g).collect(),
        }
    }
}
