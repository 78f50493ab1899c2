//! Recursive-descent parser and evaluator for potential expressions such as
//! `V0*(((x/a)^2-1)^2 - 1 - eta*(x/a))`.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary minus, `^` (right
//! associative; its exponent may itself carry a unary minus, so `2^-1`
//! parses). Identifiers other than `x` are parameters; function calls are
//! restricted to a fixed whitelist.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Num(f64),
    Var,
    /// Named parameter; `slot` indexes [`Expr::params`].
    Param {
        name: String,
        slot: usize,
    },
    Neg(Box<Spanned>),
    Binary(BinOp, Box<Spanned>, Box<Spanned>),
    Call(Func, Box<Spanned>),
}

/// A node together with its source span. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Spanned {
    pub node: Node,
    pub span: Span,
}

impl PartialEq for Spanned {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Node::Num(a), Node::Num(b)) => a.to_bits() == b.to_bits(),
            (Node::Var, Node::Var) => true,
            (Node::Param { name: a, .. }, Node::Param { name: b, .. }) => a == b,
            (Node::Neg(a), Node::Neg(b)) => a == b,
            (Node::Binary(o1, l1, r1), Node::Binary(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Node::Call(f1, a1), Node::Call(f2, a2)) => f1 == f2 && a1 == a2,
            _ => false,
        }
    }
}

/// Parsed expression with its declared parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Spanned,
    params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function `{name}` takes 1 argument, got {got} (at byte {offset})")]
    Arity { name: String, got: usize, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no binding for parameter `{0}`")]
    MissingBinding(String),
    #[error("domain error in {what} at bytes {}..{}", span.start, span.end)]
    Domain { what: &'static str, span: Span },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c as char), i, i + 1));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i, i + 1));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i, i + 1));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, i, i + 1));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{lit}`"),
                })?;
                out.push((Tok::Num(v), start, i));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start, i));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    out.push((Tok::End, text.len(), text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    /// `None` collects parameters as they appear; `Some` restricts to a declared set.
    declared: Option<&'a [String]>,
    params: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    /// Consume the current token, returning it with its byte range.
    fn bump(&mut self) -> (Tok, usize, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Spanned, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Spanned, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Spanned, ParseError> {
        match *self.peek() {
            Tok::Op('-') => {
                let (_, start, _) = self.bump();
                let inner = self.unary()?;
                let span = Span {
                    start,
                    end: inner.span.end,
                };
                Ok(Spanned {
                    node: Node::Neg(Box::new(inner)),
                    span,
                })
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Spanned, ParseError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Spanned, ParseError> {
        let (tok, start, end) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Spanned {
                node: Node::Num(v),
                span: Span { start, end },
            }),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Tok::LParen = self.peek() {
                    return self.call(name, start);
                }
                if name == "x" {
                    return Ok(Spanned {
                        node: Node::Var,
                        span: Span { start, end },
                    });
                }
                let slot = self.param_slot(&name, start)?;
                Ok(Spanned {
                    node: Node::Param { name, slot },
                    span: Span { start, end },
                })
            }
            Tok::End => Err(ParseError::Syntax {
                offset: start,
                message: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                offset: start,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn call(&mut self, name: String, start: usize) -> Result<Spanned, ParseError> {
        let func = Func::from_name(&name).ok_or_else(|| ParseError::UnknownIdentifier {
            name: name.clone(),
            offset: start,
        })?;
        self.bump(); // '('
        if let Tok::RParen = self.peek() {
            return Err(ParseError::Arity {
                name,
                got: 0,
                offset: start,
            });
        }
        let arg = self.expr()?;
        let mut extra = 0;
        while let Tok::Comma = self.peek() {
            self.bump();
            self.expr()?;
            extra += 1;
        }
        if extra > 0 {
            return Err(ParseError::Arity {
                name,
                got: 1 + extra,
                offset: start,
            });
        }
        let end = self.offset() + 1;
        self.expect_rparen()?;
        Ok(Spanned {
            node: Node::Call(func, Box::new(arg)),
            span: Span { start, end },
        })
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            _ => self.syntax("expected `)`"),
        }
    }

    fn param_slot(&mut self, name: &str, offset: usize) -> Result<usize, ParseError> {
        if let Some(i) = self.params.iter().position(|p| p == name) {
            return Ok(i);
        }
        if let Some(decl) = self.declared {
            if !decl.iter().any(|d| d == name) {
                return Err(ParseError::UnknownIdentifier {
                    name: name.to_string(),
                    offset,
                });
            }
        }
        self.params.push(name.to_string());
        Ok(self.params.len() - 1)
    }
}

fn binary(op: BinOp, lhs: Spanned, rhs: Spanned) -> Spanned {
    let span = Span {
        start: lhs.span.start,
        end: rhs.span.end,
    };
    Spanned {
        node: Node::Binary(op, Box::new(lhs), Box::new(rhs)),
        span,
    }
}

fn parse_impl(text: &str, declared: Option<&[String]>) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        declared,
        params: Vec::new(),
    };
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("trailing input");
    }
    let params = match declared {
        // Keep the declared order so slots line up with the caller's list.
        Some(decl) => {
            let mut root = root;
            let params: Vec<String> = decl.to_vec();
            reslot(&mut root, &params);
            return Ok(Expr { root, params });
        }
        None => p.params,
    };
    Ok(Expr { root, params })
}

fn reslot(s: &mut Spanned, params: &[String]) {
    match &mut s.node {
        Node::Param { name, slot } => {
            *slot = params.iter().position(|p| p == name).expect("declared parameter");
        }
        Node::Neg(a) | Node::Call(_, a) => reslot(a, params),
        Node::Binary(_, l, r) => {
            reslot(l, params);
            reslot(r, params);
        }
        Node::Num(_) | Node::Var => {}
    }
}

/// Parse an expression, treating every identifier other than `x` and the
/// whitelisted functions as a parameter.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_impl(text, None)
}

/// Parse an expression whose parameters must come from `declared`.
pub fn parse_with_params(text: &str, declared: &[String]) -> Result<Expr, ParseError> {
    parse_impl(text, Some(declared))
}

/// Evaluate `e` at `x` with parameters looked up in `bindings`.
pub fn eval_expr(e: &Expr, x: f64, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
    let values = e.bind(bindings)?;
    e.eval_bound(x, &values)
}

impl Expr {
    /// Parameter names in slot order.
    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn root(&self) -> &Spanned {
        &self.root
    }

    /// Resolve parameter values into slot order for [`Expr::eval_bound`].
    pub fn bind(&self, bindings: &HashMap<String, f64>) -> Result<Vec<f64>, EvalError> {
        self.params
            .iter()
            .map(|p| {
                bindings
                    .get(p)
                    .copied()
                    .ok_or_else(|| EvalError::MissingBinding(p.clone()))
            })
            .collect()
    }

    /// Evaluate with parameter values already in slot order.
    pub fn eval_bound(&self, x: f64, values: &[f64]) -> Result<f64, EvalError> {
        eval_node(&self.root, x, values)
    }
}

fn eval_node(s: &Spanned, x: f64, values: &[f64]) -> Result<f64, EvalError> {
    let domain = |what| EvalError::Domain { what, span: s.span };
    Ok(match &s.node {
        Node::Num(v) => *v,
        Node::Var => x,
        Node::Param { slot, name } => *values
            .get(*slot)
            .ok_or_else(|| EvalError::MissingBinding(name.clone()))?,
        Node::Neg(a) => -eval_node(a, x, values)?,
        Node::Binary(op, l, r) => {
            let a = eval_node(l, x, values)?;
            let b = eval_node(r, x, values)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(domain("division by zero"));
                    }
                    a / b
                }
                BinOp::Pow => {
                    let v = pow(a, b);
                    if v.is_nan() && !a.is_nan() && !b.is_nan() {
                        return Err(domain("power of negative base"));
                    }
                    v
                }
            }
        }
        Node::Call(f, arg) => {
            let a = eval_node(arg, x, values)?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Tanh => a.tanh(),
                Func::Abs => a.abs(),
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(domain("sqrt of negative argument"));
                    }
                    a.sqrt()
                }
                Func::Log => {
                    if a <= 0.0 {
                        return Err(domain("log of non-positive argument"));
                    }
                    a.ln()
                }
            }
        }
    })
}

/// Integer exponents go through `powi` so `(-2)^2` stays exact and defined.
fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}

/// Fully parenthesised rendering; re-parses to the same tree.
fn write_node(s: &Spanned, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match &s.node {
        Node::Num(v) => write!(f, "{v:?}"),
        Node::Var => write!(f, "x"),
        Node::Param { name, .. } => write!(f, "{name}"),
        Node::Neg(a) => {
            write!(f, "(-")?;
            write_node(a, f)?;
            write!(f, ")")
        }
        Node::Binary(op, l, r) => {
            write!(f, "(")?;
            write_node(l, f)?;
            write!(f, " {} ", op.symbol())?;
            write_node(r, f)?;
            write!(f, ")")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(a, f)?;
            write!(f, ")")
        }
    }
}
