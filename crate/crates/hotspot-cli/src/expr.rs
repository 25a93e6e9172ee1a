//! Arithmetic expressions for initial data.
//!
//! Scenario files describe φ as a formula over the coordinates `x1..xN`
//! and the radius `r = |x|`, e.g.
//!
//! ```text
//! exp(-((x1-1)^2 + (x2-0.4)^2)/4) + 0.85*exp(-((x1+0.8)^2 + (x2+0.2)^2)/4)
//! ```
//!
//! Grammar: `+ - * /` with the usual precedence, right-associative `^`,
//! unary minus, parentheses, the constants `pi` and `e`, and the functions
//! `exp`, `sqrt`, `sin`, `cos`, `log` (natural), `abs`, and `tanh`.

use std::fmt;

/// Parse error with a byte offset into the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Sqrt,
    Sin,
    Cos,
    Log,
    Abs,
    Tanh,
}

impl Func {
    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Log => v.ln(),
            Func::Abs => v.abs(),
            Func::Tanh => v.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    /// Coordinate x_{i+1}.
    Coord(usize),
    /// Radius |x|.
    Radius,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed scalar field over R^N.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    /// Highest coordinate index mentioned (1-based), 0 if none.
    pub max_coord: usize,
    /// Whether the formula mentions only `r` (and constants) — a radial field.
    pub is_radial: bool,
}

impl Expr {
    /// Parse a formula. `dimension` bounds the coordinate names `x1..xN`.
    pub fn parse(src: &str, dimension: u32) -> Result<Expr, ExprError> {
        let tokens = tokenize(src, dimension)?;
        let mut parser = Parser { tokens, pos: 0 };
        let root = parser.expression(0)?;
        if parser.pos != parser.tokens.len() {
            let tok = &parser.tokens[parser.pos];
            return Err(ExprError {
                position: tok.position,
                message: format!("unexpected `{}` after a complete expression", tok.text),
            });
        }
        let mut max_coord = 0usize;
        let mut uses_coord = false;
        walk(&root, &mut |n| {
            if let Node::Coord(i) = n {
                uses_coord = true;
                max_coord = max_coord.max(i + 1);
            }
        });
        Ok(Expr {
            root,
            max_coord,
            is_radial: !uses_coord,
        })
    }

    /// Evaluate at a point (length ≥ the highest coordinate used).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        eval_node(&self.root, x, r)
    }

    /// Evaluate a radial formula at radius r (coordinates all zero except
    /// the radius symbol; only meaningful when `is_radial`).
    pub fn eval_radial(&self, r: f64) -> f64 {
        eval_node(&self.root, &[], r)
    }
}

fn walk(node: &Node, f: &mut dyn FnMut(&Node)) {
    f(node);
    match node {
        Node::Neg(a) | Node::Call(_, a) => walk(a, f),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b)
        | Node::Pow(a, b) => {
            walk(a, f);
            walk(b, f);
        }
        Node::Num(_) | Node::Coord(_) | Node::Radius => {}
    }
}

fn eval_node(node: &Node, x: &[f64], r: f64) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Coord(i) => x.get(*i).copied().unwrap_or(0.0),
        Node::Radius => r,
        Node::Neg(a) => -eval_node(a, x, r),
        Node::Add(a, b) => eval_node(a, x, r) + eval_node(b, x, r),
        Node::Sub(a, b) => eval_node(a, x, r) - eval_node(b, x, r),
        Node::Mul(a, b) => eval_node(a, x, r) * eval_node(b, x, r),
        Node::Div(a, b) => eval_node(a, x, r) / eval_node(b, x, r),
        Node::Pow(a, b) => {
            let base = eval_node(a, x, r);
            let exp = eval_node(b, x, r);
            // Integer exponents stay exact (and defined for negative bases).
            if exp.fract() == 0.0 && exp.abs() < 64.0 {
                base.powi(exp as i32)
            } else {
                base.powf(exp)
            }
        }
        Node::Call(f, a) => f.apply(eval_node(a, x, r)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Coord(usize),
    Radius,
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokenKind,
    position: usize,
    text: String,
}

fn tokenize(src: &str, dimension: u32) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '/' => Some(TokenKind::Slash),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token {
                kind,
                position: i,
                text: c.to_string(),
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mark = i;
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    // `2exp(...)` style: the e belongs to the next token.
                    i = mark;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ExprError {
                position: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token {
                kind: TokenKind::Num(value),
                position: start,
                text: text.to_string(),
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            let word = &src[start..i];
            let kind = match word {
                "r" => TokenKind::Radius,
                "pi" => TokenKind::Num(std::f64::consts::PI),
                "e" => TokenKind::Num(std::f64::consts::E),
                "exp" => TokenKind::Func(Func::Exp),
                "sqrt" => TokenKind::Func(Func::Sqrt),
                "sin" => TokenKind::Func(Func::Sin),
                "cos" => TokenKind::Func(Func::Cos),
                "log" => TokenKind::Func(Func::Log),
                "abs" => TokenKind::Func(Func::Abs),
                "tanh" => TokenKind::Func(Func::Tanh),
                _ => {
                    if let Some(rest) = word.strip_prefix('x') {
                        let index: usize = rest.parse().map_err(|_| ExprError {
                            position: start,
                            message: format!(
                                "unknown name `{word}` (coordinates are x1..x{dimension})"
                            ),
                        })?;
                        if index == 0 || index > dimension as usize {
                            return Err(ExprError {
                                position: start,
                                message: format!(
                                    "coordinate `{word}` out of range for dimension {dimension}"
                                ),
                            });
                        }
                        TokenKind::Coord(index - 1)
                    } else {
                        return Err(ExprError {
                            position: start,
                            message: format!("unknown name `{word}`"),
                        });
                    }
                }
            };
            out.push(Token {
                kind,
                position: start,
                text: word.to_string(),
            });
            continue;
        }
        return Err(ExprError {
            position: i,
            message: format!("unexpected character `{c}`"),
        });
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

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_position(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.position + t.text.len())
            .unwrap_or(0)
    }

    /// Pratt loop: parse at or above `min_bp` binding power.
    fn expression(&mut self, min_bp: u8) -> Result<Node, ExprError> {
        let mut lhs = self.prefix()?;
        loop {
            let (bp, right_bp, make): (u8, u8, fn(Box<Node>, Box<Node>) -> Node) =
                match self.peek().map(|t| &t.kind) {
                    Some(TokenKind::Plus) => (1, 2, |a, b| Node::Add(a, b)),
                    Some(TokenKind::Minus) => (1, 2, |a, b| Node::Sub(a, b)),
                    Some(TokenKind::Star) => (3, 4, |a, b| Node::Mul(a, b)),
                    Some(TokenKind::Slash) => (3, 4, |a, b| Node::Div(a, b)),
                    // Right-associative: parse the right side at its own level.
                    Some(TokenKind::Caret) => (7, 7, |a, b| Node::Pow(a, b)),
                    _ => break,
                };
            if bp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expression(right_bp)?;
            lhs = make(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Node, ExprError> {
        let Some(tok) = self.bump() else {
            return Err(ExprError {
                position: self.end_position(),
                message: "expected a value, found end of input".into(),
            });
        };
        match tok.kind {
            TokenKind::Num(v) => Ok(Node::Num(v)),
            TokenKind::Coord(i) => Ok(Node::Coord(i)),
            TokenKind::Radius => Ok(Node::Radius),
            // Unary minus binds tighter than * but looser than ^ so that
            // -x^2 reads -(x^2).
            TokenKind::Minus => Ok(Node::Neg(Box::new(self.expression(5)?))),
            TokenKind::Plus => self.prefix(),
            TokenKind::LParen => {
                let inner = self.expression(0)?;
                match self.bump() {
                    Some(Token {
                        kind: TokenKind::RParen,
                        ..
                    }) => Ok(inner),
                    Some(t) => Err(ExprError {
                        position: t.position,
                        message: format!("expected `)`, found `{}`", t.text),
                    }),
                    None => Err(ExprError {
                        position: self.end_position(),
                        message: "unclosed parenthesis".into(),
                    }),
                }
            }
            TokenKind::Func(f) => match self.bump() {
                Some(Token {
                    kind: TokenKind::LParen,
                    ..
                }) => {
                    let arg = self.expression(0)?;
                    match self.bump() {
                        Some(Token {
                            kind: TokenKind::RParen,
                            ..
                        }) => Ok(Node::Call(f, Box::new(arg))),
                        Some(t) => Err(ExprError {
                            position: t.position,
                            message: format!("expected `)`, found `{}`", t.text),
                        }),
                        None => Err(ExprError {
                            position: self.end_position(),
                            message: format!("unclosed argument of `{}`", tok.text),
                        }),
                    }
                }
                other => Err(ExprError {
                    position: other.map(|t| t.position).unwrap_or(self.end_position()),
                    message: format!("`{}` needs a parenthesized argument", tok.text),
                }),
            },
            TokenKind::Star | TokenKind::Slash | TokenKind::Caret | TokenKind::RParen => {
                Err(ExprError {
                    position: tok.position,
                    message: format!("expected a value, found `{}`", tok.text),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, x: &[f64]) -> f64 {
        Expr::parse(src, x.len() as u32).unwrap().eval(x)
    }

    #[test]
    fn arithmetic_precedence() {
        assert_eq!(eval("1+2*3", &[0.0]), 7.0);
        assert_eq!(eval("(1+2)*3", &[0.0]), 9.0);
        assert_eq!(eval("2^3^2", &[0.0]), 512.0, "^ is right-associative");
        assert_eq!(eval("-2^2", &[0.0]), -4.0, "unary minus below ^");
        assert_eq!(eval("6/3/2", &[0.0]), 1.0, "/ is left-associative");
        assert_eq!(eval("2*-3", &[0.0]), -6.0);
    }

    #[test]
    fn coordinates_radius_and_constants() {
        assert!((eval("x1 + 2*x2", &[1.0, 3.0]) - 7.0).abs() < 1e-15);
        assert!((eval("r^2", &[3.0, 4.0]) - 25.0).abs() < 1e-12);
        assert!((eval("pi", &[0.0]) - std::f64::consts::PI).abs() < 1e-15);
        assert!((eval("e^2", &[0.0]) - std::f64::consts::E.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn functions_and_gaussian_shape() {
        let x = [1.0, 0.4];
        let expected = (-(0.0f64 + 0.0) / 4.0).exp();
        assert!((eval("exp(-((x1-1)^2 + (x2-0.4)^2)/4)", &x) - expected).abs() < 1e-15);
        assert!((eval("sqrt(abs(-9))", &[0.0]) - 3.0).abs() < 1e-15);
        assert!((eval("log(e)", &[0.0]) - 1.0).abs() < 1e-15);
        assert!((eval("sin(pi/2) + cos(0)", &[0.0]) - 2.0).abs() < 1e-15);
        assert!((eval("tanh(1e3)", &[0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scientific_numbers() {
        assert_eq!(eval("1e-4", &[0.0]), 1e-4);
        assert_eq!(eval("2.5E+3", &[0.0]), 2500.0);
        assert_eq!(eval("1.5e2", &[0.0]), 150.0);
    }

    #[test]
    fn radial_detection() {
        let radial = Expr::parse("exp(-r^2/4)", 3).unwrap();
        assert!(radial.is_radial);
        assert_eq!(radial.max_coord, 0);
        assert!((radial.eval_radial(2.0) - (-1.0f64).exp()).abs() < 1e-15);

        let planar = Expr::parse("x1*exp(-r^2)", 3).unwrap();
        assert!(!planar.is_radial);
        assert_eq!(planar.max_coord, 1);
    }

    #[test]
    fn errors_carry_positions() {
        let err = Expr::parse("exp(-r^2", 2).unwrap_err();
        assert!(err.message.contains("unclosed"), "{err}");

        let err = Expr::parse("x3 + 1", 2).unwrap_err();
        assert_eq!(err.position, 0);
        assert!(err.message.contains("out of range"), "{err}");

        let err = Expr::parse("foo(2)", 2).unwrap_err();
        assert!(err.message.contains("unknown name"), "{err}");

        let err = Expr::parse("1 + * 2", 2).unwrap_err();
        assert!(err.message.contains("expected a value"), "{err}");

        let err = Expr::parse("(1+2))", 2).unwrap_err();
        assert!(err.message.contains("unexpected"), "{err}");

        let err = Expr::parse("sqrt 4", 2).unwrap_err();
        assert!(err.message.contains("parenthesized"), "{err}");
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        assert_eq!(eval("(-2)^3", &[0.0]), -8.0);
        assert_eq!(eval("(x1-1)^2", &[3.0]), 4.0);
    }
}
