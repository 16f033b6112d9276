//! Expression trees over the parameter vector and their concrete grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := "-" factor | atom
//! atom   := number | "p"INT | "abs(" expr ")"
//!         | "min(" expr "," expr ")" | "max(" expr "," expr ")"
//!         | "(" expr ")"
//! ```
//!
//! Numbers are plain decimals (digits with an optional fractional part); no
//! exponent notation. Unary minus binds tighter than multiplication, which
//! binds tighter than addition and subtraction; binary operators associate to
//! the left. Whitespace between tokens is ignored.
//!
//! The node set is deliberately closed under local Lipschitz continuity:
//! constants, coordinates, sums, products, negation, absolute value, min, and
//! max of locally Lipschitz functions are locally Lipschitz, so every
//! expressible right-hand side and normal component is too. Division and
//! roots are excluded for exactly that reason.

use crate::{Error, Result};
use std::fmt;

/// Parameter-dependent scalar expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// `p{index}`, the coordinate of the parameter vector.
    Param(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let e = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Expr(format!(
                "trailing input after expression: {:?}",
                parser.tokens[parser.pos]
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Param(j) => p[*j],
            Expr::Add(a, b) => a.eval(p) + b.eval(p),
            Expr::Sub(a, b) => a.eval(p) - b.eval(p),
            Expr::Mul(a, b) => a.eval(p) * b.eval(p),
            Expr::Neg(a) => -a.eval(p),
            Expr::Abs(a) => a.eval(p).abs(),
            Expr::Min(a, b) => a.eval(p).min(b.eval(p)),
            Expr::Max(a, b) => a.eval(p).max(b.eval(p)),
        }
    }

    /// Largest parameter index used, if any.
    pub fn max_param(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Param(j) => Some(*j),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                match (a.max_param(), b.max_param()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a) | Expr::Abs(a) => a.max_param(),
        }
    }

    /// Precedence level for printing: sums 0, products 1, negation 2, atoms 3.
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Mul(..) => 1,
            Expr::Neg(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.prec() < min_prec {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_decimal(*c)),
            Expr::Param(j) => write!(f, "p{j}"),
            Expr::Add(a, b) => {
                a.fmt_prec(f, 0)?;
                write!(f, "+")?;
                b.fmt_prec(f, 1)
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 0)?;
                write!(f, "-")?;
                b.fmt_prec(f, 1)
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "*")?;
                b.fmt_prec(f, 2)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 2)
            }
            Expr::Abs(a) => {
                write!(f, "abs(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")
            }
            Expr::Min(a, b) => {
                write!(f, "min(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ",")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")
            }
            Expr::Max(a, b) => {
                write!(f, "max(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ",")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    /// Prints a string that reparses to a structurally identical tree, as
    /// long as every `Const` is non-negative (the parser itself only builds
    /// non-negative constants; programmatic negative constants print through
    /// the sign and reparse as a negation node with the same value).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Decimal rendering without exponent notation that parses back to the same
/// `f64`. Plain `{}` formatting is used when it is already exponent-free.
fn fmt_decimal(v: f64) -> String {
    let s = format!("{v}");
    if !s.contains(['e', 'E']) {
        return s;
    }
    for prec in 1..=340usize {
        let t = format!("{v:.prec$}");
        if t.parse::<f64>() == Ok(v) {
            return t;
        }
    }
    format!("{v:.340}")
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Param(usize),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Comma,
    Abs,
    Min,
    Max,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            b'-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            b'*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            b'(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            b')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            b',' => {
                tokens.push(Token::Comma);
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == frac_start {
                        return Err(Error::Expr(format!(
                            "expected digits after decimal point at byte {}",
                            i.min(bytes.len())
                        )));
                    }
                }
                let lit = &text[start..i];
                if lit == "." {
                    return Err(Error::Expr(format!("stray '.' at byte {start}")));
                }
                let value: f64 = lit
                    .parse()
                    .map_err(|_| Error::Expr(format!("bad number literal {lit:?}")))?;
                tokens.push(Token::Number(value));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word = &text[start..i];
                match word {
                    "abs" => tokens.push(Token::Abs),
                    "min" => tokens.push(Token::Min),
                    "max" => tokens.push(Token::Max),
                    "p" => {
                        let digit_start = i;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        if i == digit_start {
                            return Err(Error::Expr(format!(
                                "parameter reference 'p' without index at byte {start}"
                            )));
                        }
                        let idx: usize = text[digit_start..i]
                            .parse()
                            .map_err(|_| Error::Expr("parameter index overflows".into()))?;
                        tokens.push(Token::Param(idx));
                    }
                    _ => {
                        return Err(Error::Expr(format!("unknown identifier {word:?}")));
                    }
                }
            }
            _ => {
                return Err(Error::Expr(format!(
                    "unexpected character {:?} at byte {i}",
                    c as char
                )));
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Expr("unexpected end of expression".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            Err(Error::Expr(format!("expected {want:?}, found {got:?}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::Add(Box::new(acc), Box::new(rhs));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next()? {
            Token::Number(v) => Ok(Expr::Const(v)),
            Token::Param(j) => Ok(Expr::Param(j)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Token::Abs => {
                self.expect(Token::LParen)?;
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Token::Min => {
                self.expect(Token::LParen)?;
                let a = self.expr()?;
                self.expect(Token::Comma)?;
                let b = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Expr::Min(Box::new(a), Box::new(b)))
            }
            Token::Max => {
                self.expect(Token::LParen)?;
                let a = self.expr()?;
                self.expect(Token::Comma)?;
                let b = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Expr::Max(Box::new(a), Box::new(b)))
            }
            t => Err(Error::Expr(format!("unexpected token {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(p("1+2*3").eval(&[]), 7.0);
        assert_eq!(p("(1+2)*3").eval(&[]), 9.0);
        assert_eq!(p("1-2-3").eval(&[]), -4.0);
        assert_eq!(p("2*3*4").eval(&[]), 24.0);
        // Unary minus binds tighter than multiplication.
        assert_eq!(
            p("-p0*p0"),
            Expr::Mul(
                Box::new(Expr::Neg(Box::new(Expr::Param(0)))),
                Box::new(Expr::Param(0))
            )
        );
    }

    #[test]
    fn builtin_style_strings() {
        let e = p("p0-p0*p0-p1*p1");
        assert!((e.eval(&[0.5, 0.25]) - 0.1875).abs() < 1e-15);
        assert_eq!(p("min(p0,0)").eval(&[-0.3]), -0.3);
        assert_eq!(p("min(p0,0)").eval(&[0.7]), 0.0);
        assert_eq!(p("abs(p0)").eval(&[-2.0]), 2.0);
        assert_eq!(p("max(p0,p1)").eval(&[1.0, 4.0]), 4.0);
        assert_eq!(p("-1+p0").eval(&[0.5]), -0.5);
    }

    #[test]
    fn numbers_are_plain_decimals() {
        assert_eq!(p("0.25").eval(&[]), 0.25);
        assert_eq!(p(".5").eval(&[]), 0.5);
        assert!(Expr::parse("1e3").is_err());
        assert!(Expr::parse("1.").is_err());
        assert!(Expr::parse("..1").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["p", "foo(1)", "p0+", "(1", "1)", "min(1)", "abs(1,2)", "1 2", "p-1"] {
            assert!(Expr::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn max_param_tracks_indices() {
        assert_eq!(p("1+2").max_param(), None);
        assert_eq!(p("p0*p3+p1").max_param(), Some(3));
    }

    #[test]
    fn display_round_trips_structurally() {
        let cases = [
            "p0-p0*p0-p1*p1",
            "min(p0,0)",
            "abs(p0)*max(p1,2)+0.5",
            "-(p0+p1)*p2",
            "1-(2-3)",
            "-(-p0)",
            "p0*-p1",
            "(p0+1)*(p1-2)",
        ];
        for s in cases {
            let e = p(s);
            let printed = e.to_string();
            assert_eq!(p(&printed), e, "{s} -> {printed}");
        }
    }

    #[test]
    fn display_emits_decimal_for_extreme_constants() {
        let tiny = Expr::Const(1e-7);
        let printed = tiny.to_string();
        assert!(!printed.contains('e'));
        assert_eq!(p(&printed), tiny);
    }
}
