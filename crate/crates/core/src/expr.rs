//! A small expression language for real functions of one variable.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 'n' | 'pi' | 'e' | name '(' args ')' | '(' expr ')'
//! ```
//!
//! Functions: `pow sqrt log ln exp cos sin abs step piecewise`. `log` is base
//! 10, `step(a)` is the indicator of `x >= a` and `piecewise(t, lo, hi)` is
//! `lo` for `x < t` and `hi` otherwise.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Pow,
    Sqrt,
    Log,
    Ln,
    Exp,
    Cos,
    Sin,
    Abs,
    Step,
    Piecewise,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "pow" => (Func::Pow, 2),
            "sqrt" => (Func::Sqrt, 1),
            "log" => (Func::Log, 1),
            "ln" => (Func::Ln, 1),
            "exp" => (Func::Exp, 1),
            "cos" => (Func::Cos, 1),
            "sin" => (Func::Sin, 1),
            "abs" => (Func::Abs, 1),
            "step" => (Func::Step, 1),
            "piecewise" => (Func::Piecewise, 3),
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Pow => "pow",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Abs => "abs",
            Func::Step => "step",
            Func::Piecewise => "piecewise",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected `{}` in expression `{src}`",
                p.tokens[p.pos]
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call(f, args) => {
                let a = |i: usize| args[i].eval(x);
                match f {
                    Func::Pow => pow(a(0), a(1)),
                    Func::Sqrt => a(0).sqrt(),
                    Func::Log => a(0).log10(),
                    Func::Ln => a(0).ln(),
                    Func::Exp => a(0).exp(),
                    Func::Cos => a(0).cos(),
                    Func::Sin => a(0).sin(),
                    Func::Abs => a(0).abs(),
                    Func::Step => f64::from(u8::from(x >= a(0))),
                    Func::Piecewise => {
                        if x < a(0) {
                            a(1)
                        } else {
                            a(2)
                        }
                    }
                }
            }
        }
    }
}

/// Integer exponents use repeated multiplication so that `x^2` is exact
/// wherever `x * x` is.
fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= 64.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => f.write_str("x"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Call(func, args) => {
                let a: Vec<String> = args.iter().map(|e| e.to_string()).collect();
                write!(f, "{}({})", func.name(), a.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(f, "{v}"),
            Token::Ident(s) => f.write_str(s),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
            Token::Comma => f.write_str(","),
        }
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
                out.push(Token::Num(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Token::Op(c));
                i += 1;
            }
            '−' => {
                out.push(Token::Op('-'));
                i += 1;
            }
            '×' => {
                out.push(Token::Op('*'));
                i += 1;
            }
            '÷' => {
                out.push(Token::Op('/'));
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            _ => return Err(Error::Parse(format!("unexpected character `{c}` in expression"))),
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op(&['+']).is_some() {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing `)`".into())),
                }
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "x" | "n" => Ok(Expr::Var),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "e" => Ok(Expr::Num(std::f64::consts::E)),
                _ => {
                    let (func, arity) = Func::lookup(&name)
                        .ok_or_else(|| Error::Parse(format!("unknown function `{name}`")))?;
                    if self.next() != Some(Token::LParen) {
                        return Err(Error::Parse(format!("`{name}` must be followed by `(`")));
                    }
                    let mut args = vec![self.expr()?];
                    loop {
                        match self.next() {
                            Some(Token::Comma) => args.push(self.expr()?),
                            Some(Token::RParen) => break,
                            _ => return Err(Error::Parse(format!("unterminated call to `{name}`"))),
                        }
                    }
                    if args.len() != arity {
                        return Err(Error::Parse(format!(
                            "`{name}` takes {arity} argument(s), got {}",
                            args.len()
                        )));
                    }
                    Ok(Expr::Call(func, args))
                }
            },
            Some(t) => Err(Error::Parse(format!("unexpected `{t}`"))),
            None => Err(Error::Parse("expression ended early".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("x − 1 × 2 ÷ 4", 1.0), 0.5);
        assert_eq!(ev("1e-3 * 1000", 0.0), 1.0);
        assert_eq!(ev("2*x + 5", 1.5), 8.0);
    }

    #[test]
    fn functions() {
        assert_eq!(ev("sqrt(x)", 9.0), 3.0);
        assert_eq!(ev("log(x)", 1000.0), 3.0);
        assert!((ev("ln(e)", 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(ev("cos(0)", 0.0), 1.0);
        assert_eq!(ev("abs(x)", -2.5), 2.5);
        assert_eq!(ev("pow(x, 2)", 3.0), 9.0);
        assert_eq!(ev("step(0)", 0.0), 1.0);
        assert_eq!(ev("step(0)", -1e-9), 0.0);
        assert_eq!(ev("piecewise(1, -1, 1)", 0.5), -1.0);
        assert_eq!(ev("piecewise(1, -1, 1)", 1.0), 1.0);
        assert!((ev("cos(pi * sqrt(n))", 4.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        for bad in ["", "1 +", "foo(1)", "sqrt 2", "pow(1)", "(1", "1 2", "x $ 2"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for src in ["x^2 + 1/x", "-step(0) * piecewise(0, 1, 2)", "pow(x, 0.5) - log(x)"] {
            let e = Expr::parse(src).unwrap();
            let again = Expr::parse(&e.to_string()).unwrap();
            for x in [0.5, 2.0, 7.0] {
                assert_eq!(e.eval(x).to_bits(), again.eval(x).to_bits());
            }
        }
    }
}
