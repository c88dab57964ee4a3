//! Arithmetic expressions in `z` and `mu` used for coefficients and data.
//!
//! ```text
//! expr    := cond
//! cond    := sum (("<" | "<=" | ">" | ">=") sum)?
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | "z" | "mu" | "pi" | "e"
//!          | name "(" expr ("," expr)* ")"
//!          | "(" expr ")"
//! ```
//!
//! Functions: `sin cos tan exp ln sqrt abs min max` and `if(c, a, b)`, which
//! yields `a` where `c` is nonzero and `b` elsewhere. Comparisons evaluate
//! to 1 or 0.

use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at column {}: {}", self.position + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Min,
    Max,
    If,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "tan" => (Func::Tan, 1),
            "exp" => (Func::Exp, 1),
            "ln" => (Func::Ln, 1),
            "sqrt" => (Func::Sqrt, 1),
            "abs" => (Func::Abs, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "if" => (Func::If, 3),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Z,
    Mu,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Cmp(Cmp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, z: f64, mu: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Z => z,
            Node::Mu => mu,
            Node::Neg(a) => -a.eval(z, mu),
            Node::Add(a, b) => a.eval(z, mu) + b.eval(z, mu),
            Node::Sub(a, b) => a.eval(z, mu) - b.eval(z, mu),
            Node::Mul(a, b) => a.eval(z, mu) * b.eval(z, mu),
            Node::Div(a, b) => a.eval(z, mu) / b.eval(z, mu),
            Node::Pow(a, b) => a.eval(z, mu).powf(b.eval(z, mu)),
            Node::Cmp(op, a, b) => {
                let (x, y) = (a.eval(z, mu), b.eval(z, mu));
                let t = match op {
                    Cmp::Lt => x < y,
                    Cmp::Le => x <= y,
                    Cmp::Gt => x > y,
                    Cmp::Ge => x >= y,
                };
                if t {
                    1.0
                } else {
                    0.0
                }
            }
            Node::Call(f, args) => {
                let x = args[0].eval(z, mu);
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                    Func::Min => x.min(args[1].eval(z, mu)),
                    Func::Max => x.max(args[1].eval(z, mu)),
                    Func::If => {
                        if x != 0.0 {
                            args[1].eval(z, mu)
                        } else {
                            args[2].eval(z, mu)
                        }
                    }
                }
            }
        }
    }

    fn uses(&self, var: &Node) -> bool {
        match self {
            Node::Z | Node::Mu => self == var,
            Node::Num(_) => false,
            Node::Neg(a) => a.uses(var),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b)
            | Node::Cmp(_, a, b) => a.uses(var) || b.uses(var),
            Node::Call(_, args) => args.iter().any(|a| a.uses(var)),
        }
    }
}

/// A parsed expression, cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct Expr {
    source: String,
    root: Arc<Node>,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(source)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            end: source.len(),
        };
        let root = p.cond()?;
        if let Some((at, tok)) = p.tokens.get(p.pos) {
            return Err(ParseError {
                position: *at,
                message: format!("unexpected {tok}"),
            });
        }
        Ok(Self {
            source: source.trim().to_string(),
            root: Arc::new(root),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, z: f64, mu: f64) -> f64 {
        self.root.eval(z, mu)
    }

    pub fn uses_z(&self) -> bool {
        self.root.uses(&Node::Z)
    }

    pub fn uses_mu(&self) -> bool {
        self.root.uses(&Node::Mu)
    }

    /// Value when the expression depends on neither variable.
    pub fn as_constant(&self) -> Option<f64> {
        (!self.uses_z() && !self.uses_mu()).then(|| self.eval(0.0, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Op(s) => write!(f, "'{s}'"),
        }
    }
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    const OPS: [&str; 12] = ["<=", ">=", "<", ">", "+", "-", "*", "/", "^", "(", ")", ","];
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    i = k;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &s[start..i];
            let v = text.parse::<f64>().map_err(|_| ParseError {
                position: start,
                message: format!("malformed number '{text}'"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if let Some(op) = OPS.iter().find(|op| s[i..].starts_with(**op)) {
            out.push((i, Tok::Op(op)));
            i += op.len();
        } else {
            return Err(ParseError {
                position: i,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<&'static str> {
        match self.tokens.get(self.pos) {
            Some((_, Tok::Op(op))) => Some(op),
            _ => None,
        }
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            message: message.into(),
        })
    }

    fn expect(&mut self, op: &str) -> Result<(), ParseError> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            match self.tokens.get(self.pos) {
                Some((_, t)) => self.fail(format!("expected '{op}', found {t}")),
                None => self.fail(format!("expected '{op}' before end of input")),
            }
        }
    }

    fn cond(&mut self) -> Result<Node, ParseError> {
        let lhs = self.sum()?;
        let op = match self.peek_op() {
            Some("<") => Cmp::Lt,
            Some("<=") => Cmp::Le,
            Some(">") => Cmp::Gt,
            Some(">=") => Cmp::Ge,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        Ok(Node::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.product()?;
        while let Some(op @ ("+" | "-")) = self.peek_op() {
            self.pos += 1;
            let rhs = Box::new(self.product()?);
            lhs = if op == "+" {
                Node::Add(Box::new(lhs), rhs)
            } else {
                Node::Sub(Box::new(lhs), rhs)
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ("*" | "/")) = self.peek_op() {
            self.pos += 1;
            let rhs = Box::new(self.unary()?);
            lhs = if op == "*" {
                Node::Mul(Box::new(lhs), rhs)
            } else {
                Node::Div(Box::new(lhs), rhs)
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.peek_op() == Some("-") {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek_op() == Some("^") {
            self.pos += 1;
            // Right associative, and `-2^2` parses as `-(2^2)`.
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let Some((at, tok)) = self.tokens.get(self.pos).cloned() else {
            return self.fail("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::Op("(") => {
                let inner = self.cond()?;
                self.expect(")")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(Node::Z),
                "mu" => Ok(Node::Mu),
                "pi" => Ok(Node::Num(std::f64::consts::PI)),
                "e" => Ok(Node::Num(std::f64::consts::E)),
                _ => {
                    let Some((func, arity)) = Func::lookup(&name) else {
                        return Err(ParseError {
                            position: at,
                            message: format!("unknown name '{name}'"),
                        });
                    };
                    self.expect("(")?;
                    let mut args = vec![self.cond()?];
                    while self.peek_op() == Some(",") {
                        self.pos += 1;
                        args.push(self.cond()?);
                    }
                    self.expect(")")?;
                    if args.len() != arity {
                        return Err(ParseError {
                            position: at,
                            message: format!(
                                "{name} takes {arity} argument(s), got {}",
                                args.len()
                            ),
                        });
                    }
                    Ok(Node::Call(func, args))
                }
            },
            other => Err(ParseError {
                position: at,
                message: format!("unexpected {other}"),
            }),
        }
    }
}
