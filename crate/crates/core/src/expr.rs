//! A small functional expression language over the classes of one model.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := number ['/' number] [atom] | atom
//! atom   := func '(' expr (',' expr)* ')'
//!         | MAP '^*' atom | MAP '_*' atom
//!         | name | '(' expr ')' | '·'
//! func   := cup | pair | triple | pullback | pushforward
//! ```
//!
//! Names are basis labels (`H`, `E0`, `H2`, `L0`, ...) or registered curve
//! names (`Sigma~_{0,1}`). Juxtaposition multiplies by a rational
//! coefficient (`2H - 3/2E0`). `*` between two classes is the cup product or
//! the pairing, depending on degrees. A `·` argument repeats the first
//! argument of the enclosing call, so `triple(x, ·, ·)` (or `triple(x)`) is
//! `x^3`.

use std::fmt;

use crate::error::Error;
use crate::map::PseudoIsoModel;
use crate::rat::Rat;
use crate::ring::{H11Class, H22Class, VarietyModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(Rat),
    Divisor(H11Class),
    Curve(H22Class),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Divisor(_) => "divisor class",
            Value::Curve(_) => "curve class",
        }
    }

    pub fn render(&self, model: &VarietyModel) -> String {
        match self {
            Value::Scalar(q) => q.to_string(),
            Value::Divisor(c) => model.format_h11(c),
            Value::Curve(c) => model.format_h22(c),
        }
    }
}

#[derive(Debug)]
pub enum ExprError {
    Parse(String),
    /// Degree or kind mismatch.
    Type(String),
    Eval(Error),
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Parse(m) => write!(f, "parse error: {m}"),
            ExprError::Type(m) => write!(f, "type error: {m}"),
            ExprError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ExprError {}

impl From<Error> for ExprError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => ExprError::Type(e.to_string()),
            e => ExprError::Eval(e),
        }
    }
}

type EResult<T> = std::result::Result<T, ExprError>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Dot,
    UpperStar,
    LowerStar,
}

fn tokenize(src: &str) -> EResult<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token::Num(chars[start..i].iter().collect()));
            }
            _ if c.is_alphabetic() => {
                let start = i;
                let mut depth = 0usize;
                while i < chars.len() {
                    let d = chars[i];
                    match d {
                        '{' => depth += 1,
                        '}' if depth > 0 => depth -= 1,
                        _ if depth > 0 => {}
                        '_' if chars.get(i + 1) == Some(&'*') => break,
                        _ if d.is_alphanumeric() || d == '_' || d == '~' => {}
                        _ => break,
                    }
                    i += 1;
                }
                if depth > 0 {
                    return Err(ExprError::Parse("unbalanced '{' in name".into()));
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            '^' | '_' if chars.get(i + 1) == Some(&'*') => {
                out.push(if c == '^' {
                    Token::UpperStar
                } else {
                    Token::LowerStar
                });
                i += 2;
            }
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
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
            '\u{00b7}' | '\u{22c5}' | '.' => {
                out.push(Token::Dot);
                i += 1;
            }
            _ => return Err(ExprError::Parse(format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

const FUNCTIONS: [&str; 5] = ["cup", "pair", "triple", "pullback", "pushforward"];

/// Evaluation context: a model and, optionally, a named self-map of it.
#[derive(Clone, Copy)]
pub struct Context<'a> {
    pub model: &'a VarietyModel,
    pub map: Option<(&'a str, &'a PseudoIsoModel)>,
}

struct Parser<'a> {
    ctx: Context<'a>,
    tokens: Vec<Token>,
    pos: usize,
    /// First arguments of the enclosing calls, for `·` placeholders.
    first_args: Vec<Option<Value>>,
}

pub fn evaluate(ctx: Context<'_>, src: &str) -> EResult<Value> {
    let mut p = Parser {
        ctx,
        tokens: tokenize(src)?,
        pos: 0,
        first_args: Vec::new(),
    };
    if p.tokens.is_empty() {
        return Err(ExprError::Parse("empty expression".into()));
    }
    let v = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(ExprError::Parse(format!(
            "unexpected {t:?} after expression"
        )));
    }
    Ok(v)
}

/// Parses a divisor class literal such as `2H-E0-E1-E2-E3`; `0` is the zero class.
pub fn parse_h11(model: &VarietyModel, src: &str) -> EResult<H11Class> {
    match evaluate(Context { model, map: None }, src)? {
        Value::Divisor(c) => Ok(c),
        Value::Scalar(q) if q.is_zero() => Ok(H11Class::zero(model.h11())),
        v => Err(ExprError::Type(format!(
            "expected a divisor class, found a {}",
            v.kind()
        ))),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> EResult<()> {
        match self.next() {
            Some(ref u) if *u == t => Ok(()),
            other => Err(ExprError::Parse(format!("expected {t:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> EResult<Value> {
        let mut negate = false;
        match self.peek() {
            Some(Token::Minus) => {
                negate = true;
                self.pos += 1;
            }
            Some(Token::Plus) => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = scale(&Rat::from(-1), acc);
        }
        loop {
            let sign = match self.peek() {
                Some(Token::Plus) => Rat::one(),
                Some(Token::Minus) => Rat::from(-1),
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = add(acc, scale(&sign, rhs))?;
        }
    }

    fn term(&mut self) -> EResult<Value> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = self.product(acc, rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> EResult<Value> {
        if let Some(Token::Num(_)) = self.peek() {
            let coeff = self.number()?;
            return if self.starts_atom() {
                Ok(scale(&coeff, self.atom()?))
            } else {
                Ok(Value::Scalar(coeff))
            };
        }
        self.atom()
    }

    fn number(&mut self) -> EResult<Rat> {
        let Some(Token::Num(n)) = self.next() else {
            unreachable!("checked by caller")
        };
        let mut text = n;
        if self.peek() == Some(&Token::Slash) {
            self.pos += 1;
            match self.next() {
                Some(Token::Num(d)) => {
                    text.push('/');
                    text.push_str(&d);
                }
                other => {
                    return Err(ExprError::Parse(format!(
                        "expected denominator, found {other:?}"
                    )))
                }
            }
        }
        text.parse::<Rat>()
            .map_err(|e| ExprError::Parse(e.to_string()))
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Token::Ident(_)) | Some(Token::LParen))
    }

    fn atom(&mut self) -> EResult<Value> {
        match self.next() {
            Some(Token::LParen) => {
                let v = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(v)
            }
            Some(Token::Dot) => self
                .first_args
                .last()
                .cloned()
                .flatten()
                .ok_or_else(|| ExprError::Parse("'·' outside a function argument list".into())),
            Some(Token::Ident(name)) => self.named(name),
            None => Err(ExprError::Parse("unexpected end of expression".into())),
            Some(t) => Err(ExprError::Parse(format!("unexpected {t:?}"))),
        }
    }

    fn named(&mut self, name: String) -> EResult<Value> {
        match self.peek() {
            Some(Token::UpperStar) | Some(Token::LowerStar) => {
                let pull = self.next() == Some(Token::UpperStar);
                let map = self.map_named(&name)?;
                let arg = self.atom()?;
                return transport(map, pull, arg);
            }
            Some(Token::LParen) if FUNCTIONS.contains(&name.as_str()) => {
                self.pos += 1;
                let args = self.args()?;
                return self.call(&name, args);
            }
            _ => {}
        }
        let m = self.ctx.model;
        if let Ok(c) = m.h11_basis_class(&name) {
            return Ok(Value::Divisor(c));
        }
        if let Ok(c) = m.h22_basis_class(&name) {
            return Ok(Value::Curve(c));
        }
        if let Ok(c) = m.curve(&name) {
            return Ok(Value::Curve(c.class.clone()));
        }
        Err(ExprError::Parse(format!("unknown name {name:?}")))
    }

    fn map_named(&self, name: &str) -> EResult<&'a PseudoIsoModel> {
        match self.ctx.map {
            Some((n, map)) if n == name => Ok(map),
            _ => Err(ExprError::Parse(format!("unknown map {name:?}"))),
        }
    }

    fn the_map(&self) -> EResult<&'a PseudoIsoModel> {
        self.ctx
            .map
            .map(|(_, m)| m)
            .ok_or_else(|| ExprError::Parse("no map loaded".into()))
    }

    fn args(&mut self) -> EResult<Vec<Value>> {
        self.first_args.push(None);
        let mut out = Vec::new();
        let result = loop {
            match self.expr() {
                Ok(v) => {
                    if out.is_empty() {
                        *self.first_args.last_mut().unwrap() = Some(v.clone());
                    }
                    out.push(v);
                }
                Err(e) => break Err(e),
            }
            match self.next() {
                Some(Token::Comma) => continue,
                Some(Token::RParen) => break Ok(out),
                other => {
                    break Err(ExprError::Parse(format!(
                        "expected ',' or ')', found {other:?}"
                    )))
                }
            }
        };
        self.first_args.pop();
        result
    }

    fn call(&self, name: &str, args: Vec<Value>) -> EResult<Value> {
        let m = self.ctx.model;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(ExprError::Type(format!(
                    "{name} takes {n} arguments, got {}",
                    args.len()
                )))
            }
        };
        match name {
            "cup" => {
                arity(2)?;
                let mut it = args.into_iter();
                self.product(it.next().unwrap(), it.next().unwrap())
            }
            "pair" => {
                arity(2)?;
                match (&args[0], &args[1]) {
                    (Value::Divisor(a), Value::Curve(c)) | (Value::Curve(c), Value::Divisor(a)) => {
                        Ok(Value::Scalar(m.pair(a, c)?))
                    }
                    (a, b) => Err(ExprError::Type(format!(
                        "pair needs a divisor and a curve class, got {} and {}",
                        a.kind(),
                        b.kind()
                    ))),
                }
            }
            "triple" => {
                let args = if args.len() == 1 {
                    vec![args[0].clone(), args[0].clone(), args[0].clone()]
                } else {
                    args
                };
                if args.len() != 3 {
                    return Err(ExprError::Type(format!(
                        "triple takes 1 or 3 arguments, got {}",
                        args.len()
                    )));
                }
                let divisors: Vec<&H11Class> = args
                    .iter()
                    .map(|v| match v {
                        Value::Divisor(c) => Ok(c),
                        v => Err(ExprError::Type(format!(
                            "triple needs divisor classes, got a {}",
                            v.kind()
                        ))),
                    })
                    .collect::<EResult<_>>()?;
                Ok(Value::Scalar(m.triple(
                    divisors[0],
                    divisors[1],
                    divisors[2],
                )?))
            }
            "pullback" | "pushforward" => {
                arity(1)?;
                transport(
                    self.the_map()?,
                    name == "pullback",
                    args.into_iter().next().unwrap(),
                )
            }
            _ => unreachable!("checked against FUNCTIONS"),
        }
    }

    /// Degree-additive product: scalar scaling, cup (1+1) or pairing (1+2).
    fn product(&self, a: Value, b: Value) -> EResult<Value> {
        let m = self.ctx.model;
        match (a, b) {
            (Value::Scalar(s), v) | (v, Value::Scalar(s)) => Ok(scale(&s, v)),
            (Value::Divisor(x), Value::Divisor(y)) => Ok(Value::Curve(m.cup(&x, &y)?)),
            (Value::Divisor(x), Value::Curve(c)) | (Value::Curve(c), Value::Divisor(x)) => {
                Ok(Value::Scalar(m.pair(&x, &c)?))
            }
            (Value::Curve(_), Value::Curve(_)) => Err(ExprError::Type(
                "product of two curve classes has degree 4".into(),
            )),
        }
    }
}

fn transport(map: &PseudoIsoModel, pull: bool, v: Value) -> EResult<Value> {
    match (v, pull) {
        (Value::Divisor(c), true) => Ok(Value::Divisor(map.pullback11(&c)?)),
        (Value::Divisor(c), false) => Ok(Value::Divisor(map.pushforward11(&c)?)),
        (Value::Curve(c), true) => Ok(Value::Curve(map.pullback22(&c)?)),
        (Value::Curve(c), false) => Ok(Value::Curve(map.pushforward22(&c)?)),
        (Value::Scalar(_), _) => Err(ExprError::Type(
            "cannot transport a scalar along a map".into(),
        )),
    }
}

fn scale(s: &Rat, v: Value) -> Value {
    match v {
        Value::Scalar(q) => Value::Scalar(s * &q),
        Value::Divisor(c) => Value::Divisor(c.scale(s)),
        Value::Curve(c) => Value::Curve(c.scale(s)),
    }
}

fn add(a: Value, b: Value) -> EResult<Value> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
        (Value::Divisor(x), Value::Divisor(y)) => Ok(Value::Divisor(&x + &y)),
        (Value::Curve(x), Value::Curve(y)) => Ok(Value::Curve(&x + &y)),
        // A literal 0 added to a class is the class.
        (Value::Scalar(z), v) | (v, Value::Scalar(z)) if z.is_zero() => Ok(v),
        (a, b) => Err(ExprError::Type(format!(
            "cannot add a {} and a {}",
            a.kind(),
            b.kind()
        ))),
    }
}
