//! Arithmetic expressions over `t`, `y` and `alpha` for user-defined problems.
//!
//! Supported: numbers, `+ - * /`, `^` (right associative, binds tighter than
//! unary minus), parentheses and `gamma(...)`.

use crate::error::{FracError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    T,
    Y,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(Variable),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Gamma(Box<Expr>),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings {
    pub t: f64,
    pub y: f64,
    pub alpha: f64,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(FracError::Parse(format!(
                "unexpected {:?} in '{src}'",
                parser.tokens[parser.pos]
            )));
        }
        Ok(expr)
    }

    pub fn eval(&self, b: &Bindings) -> f64 {
        match self {
            Expr::Number(v) => *v,
            Expr::Var(Variable::T) => b.t,
            Expr::Var(Variable::Y) => b.y,
            Expr::Var(Variable::Alpha) => b.alpha,
            Expr::Neg(e) => -e.eval(b),
            Expr::Gamma(e) => libm::tgamma(e.eval(b)),
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.eval(b), r.eval(b));
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => l / r,
                    BinaryOp::Pow => l.powf(r),
                }
            }
        }
    }

    pub fn uses(&self, var: Variable) -> bool {
        match self {
            Expr::Number(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Gamma(e) => e.uses(var),
            Expr::Binary(_, l, r) => l.uses(var) || r.uses(var),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Token::Op(ch));
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
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, e.g. 1e-3
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut k = i + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        i = k;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse()
                    .map_err(|_| FracError::Parse(format!("bad number '{text}'")))?;
                out.push(Token::Number(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(FracError::Parse(format!(
                    "unexpected character '{other}' in '{src}'"
                )))
            }
        }
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

    fn expect(&mut self, token: Token) -> Result<()> {
        match self.next() {
            Some(ref t) if *t == token => Ok(()),
            other => Err(FracError::Parse(format!("expected {token:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Number(v)) => Ok(Expr::Number(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "t" => Ok(Expr::Var(Variable::T)),
                "y" => Ok(Expr::Var(Variable::Y)),
                "alpha" => Ok(Expr::Var(Variable::Alpha)),
                "gamma" => {
                    self.expect(Token::LParen)?;
                    let e = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(Expr::Gamma(Box::new(e)))
                }
                other => Err(FracError::Parse(format!("unknown identifier '{other}'"))),
            },
            other => Err(FracError::Parse(format!("unexpected {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, t: f64, y: f64) -> f64 {
        Expr::parse(src).unwrap().eval(&Bindings { t, y, alpha: 0.5 })
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(eval("(1 + 2) * 3", 0.0, 0.0), 9.0);
        assert_eq!(eval("2 ^ 3 ^ 2", 0.0, 0.0), 512.0);
        assert_eq!(eval("-2 ^ 2", 0.0, 0.0), -4.0);
        assert_eq!(eval("2 ^ -1", 0.0, 0.0), 0.5);
        assert_eq!(eval("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(eval("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(eval("1.5e2 + 2.5E-1", 0.0, 0.0), 150.25);
    }

    #[test]
    fn variables_and_gamma() {
        assert_eq!(eval("t * y + alpha", 2.0, 3.0), 6.5);
        assert!((eval("gamma(alpha + 1)", 0.0, 0.0) - libm::tgamma(1.5)).abs() < 1e-16);
        assert_eq!(eval("gamma(5)", 0.0, 0.0), 24.0);
        let e = Expr::parse("t^2").unwrap();
        assert!(e.uses(Variable::T));
        assert!(!e.uses(Variable::Y));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1 +", "(1", "foo(2)", "sin(t)", "1 $ 2", "gamma 2", "1 2"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }
}
