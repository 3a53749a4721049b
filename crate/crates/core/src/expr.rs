//! Expression language for user-defined scalar potentials.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'x' | 'pi' | param | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | tanh | cosh | sech
//! ```
//!
//! `-x^2` therefore parses as `-(x^2)` and `2^3^2` as `2^(3^2)`. Parameter
//! names must be declared up front; any other identifier is rejected with its
//! byte offset.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Tanh,
    Cosh,
    Sech,
}

impl UnaryOp {
    fn function(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "exp" => Self::Exp,
            "tanh" => Self::Tanh,
            "cosh" => Self::Cosh,
            "sech" => Self::Sech,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Neg => "-",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Exp => "exp",
            Self::Tanh => "tanh",
            Self::Cosh => "cosh",
            Self::Sech => "sech",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Self::Neg => -v,
            Self::Sin => libm::sin(v),
            Self::Cos => libm::cos(v),
            Self::Exp => libm::exp(v),
            Self::Tanh => libm::tanh(v),
            Self::Cosh => libm::cosh(v),
            Self::Sech => 1.0 / libm::cosh(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            Self::Add => '+',
            Self::Sub => '-',
            Self::Mul => '*',
            Self::Div => '/',
            Self::Pow => '^',
        }
    }
}

/// Parsed expression in the single free variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(f64),
    Var,
    Param(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    Expected {
        expected: &'static str,
        found: String,
    },
    UnknownFunction(String),
    UnknownIdentifier(String),
    UnbalancedParenthesis,
    InvalidNumber(String),
}

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("empty expression"),
            Self::Expected { expected, found } => write!(f, "expected {expected}, found {found}"),
            Self::UnknownFunction(name) => write!(f, "unknown function `{name}`"),
            Self::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            Self::UnbalancedParenthesis => f.write_str("unbalanced parenthesis"),
            Self::InvalidNumber(s) => write!(f, "invalid number `{s}`"),
        }
    }
}

/// Parses an expression with no parameters besides `x`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_with_params(src, &[])
}

/// Parses an expression that may reference the named parameters.
pub fn parse_with_params(src: &str, params: &[&str]) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: src.len(),
        params,
    };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some((Token::RParen, offset)) => Err(ParseError {
            offset,
            kind: ParseErrorKind::UnbalancedParenthesis,
        }),
        Some((tok, offset)) => Err(ParseError {
            offset,
            kind: ParseErrorKind::Expected {
                expected: "operator or end of input",
                found: tok.describe(),
            },
        }),
    }
}

impl Expr {
    pub fn eval(&self, x: f64, params: &[(String, f64)]) -> Result<f64, EvalError> {
        Ok(match self {
            Self::Literal(v) => *v,
            Self::Var => x,
            Self::Param(name) => params
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| EvalError::UnboundParameter(name.clone()))?,
            Self::Unary(op, e) => op.apply(e.eval(x, params)?),
            Self::Binary(op, l, r) => {
                let l = l.eval(x, params)?;
                let r = r.eval(x, params)?;
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                    BinaryOp::Pow => {
                        if l == 0.0 && r < 0.0 {
                            return Err(EvalError::ZeroToNegativePower);
                        }
                        libm::pow(l, r)
                    }
                }
            }
        })
    }

    /// Names of all parameters referenced by the expression, in first-use order.
    pub fn parameters(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Self::Param(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            Self::Unary(_, e) => e.collect_params(out),
            Self::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
            Self::Literal(_) | Self::Var => {}
        }
    }
}

// Fully parenthesized so that parse(to_string(e)) reproduces e.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Literal(v) => write!(f, "{v}"),
            Self::Var => f.write_str("x"),
            Self::Param(name) => f.write_str(name),
            Self::Unary(UnaryOp::Neg, e) => write!(f, "(-{e})"),
            Self::Unary(op, e) => write!(f, "{}({e})", op.name()),
            Self::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
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

impl Token {
    fn describe(&self) -> String {
        match self {
            Self::Number(v) => alloc::format!("number {v}"),
            Self::Ident(s) => alloc::format!("identifier `{s}`"),
            Self::Op(c) => alloc::format!("`{c}`"),
            Self::LParen => "`(`".to_string(),
            Self::RParen => "`)`".to_string(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Token::Op(c as char), start));
                i += 1;
            }
            b'(' => {
                out.push((Token::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Token::RParen, start));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when digits follow, so `2e` stays an error
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
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidNumber(text.to_string()),
                })?;
                out.push((Token::Number(value), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(src[start..i].to_string()), start));
            }
            _ => {
                let found = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Expected {
                        expected: "number, identifier, operator or parenthesis",
                        found: alloc::format!("`{found}`"),
                    },
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    params: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<(Token, usize)> {
        self.tokens.get(self.pos).cloned()
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((Token::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' {
                BinaryOp::Add
            } else {
                BinaryOp::Sub
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' {
                BinaryOp::Mul
            } else {
                BinaryOp::Div
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(
                BinaryOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some((tok, offset)) = self.peek() else {
            return Err(ParseError {
                offset: self.end,
                kind: ParseErrorKind::Expected {
                    expected: "operand",
                    found: "end of input".to_string(),
                },
            });
        };
        self.pos += 1;
        match tok {
            Token::Number(v) => Ok(Expr::Literal(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.close_paren(offset)?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if matches!(self.peek(), Some((Token::LParen, _))) {
                    let Some(op) = UnaryOp::function(&name) else {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownFunction(name),
                        });
                    };
                    let (_, open) = self.peek().unwrap();
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.close_paren(open)?;
                    return Ok(Expr::Unary(op, Box::new(arg)));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Literal(core::f64::consts::PI)),
                    _ if self.params.contains(&name.as_str()) => Ok(Expr::Param(name)),
                    _ if UnaryOp::function(&name).is_some() => Err(ParseError {
                        offset: self.tokens.get(self.pos).map_or(self.end, |t| t.1),
                        kind: ParseErrorKind::Expected {
                            expected: "`(` after function name",
                            found: name,
                        },
                    }),
                    _ => Err(ParseError {
                        offset,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    }),
                }
            }
            Token::RParen => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnbalancedParenthesis,
            }),
            Token::Op(c) => Err(ParseError {
                offset,
                kind: ParseErrorKind::Expected {
                    expected: "operand",
                    found: alloc::format!("`{c}`"),
                },
            }),
        }
    }

    fn close_paren(&mut self, open: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some((Token::RParen, _)) => {
                self.pos += 1;
                Ok(())
            }
            Some((tok, offset)) => Err(ParseError {
                offset,
                kind: ParseErrorKind::Expected {
                    expected: "`)`",
                    found: tok.describe(),
                },
            }),
            None => Err(ParseError {
                offset: open,
                kind: ParseErrorKind::UnbalancedParenthesis,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(src: &str, x: f64) -> f64 {
        parse(src).unwrap().eval(x, &[]).unwrap()
    }

    #[test]
    fn basic_examples() {
        assert_eq!(eval("2*x", 3.0), 6.0);
        assert_eq!(eval("-(x^2)", 2.0), -4.0);
        assert_eq!(eval("3*tanh(x)", 0.0), 0.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("-x^2", 3.0), -9.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("8/4/2", 0.0), 1.0);
        assert_eq!(eval("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(eval("2 + 3 * 4", 0.0), 14.0);
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval(" ( 1+x ) *\t2 ", 1.0), 4.0);
        assert_eq!(eval("1.5e2 + 2E-1", 0.0), 150.2);
        assert!((eval("sech(0) + cosh(0) + exp(0) + cos(0) + sin(pi)", 0.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn parameters_resolve() {
        let e = parse_with_params("a*x + b", &["a", "b"]).unwrap();
        let params = [("a".into(), 2.0), ("b".into(), 1.0)];
        assert_eq!(e.eval(3.0, &params).unwrap(), 7.0);
        assert_eq!(e.parameters(), ["a", "b"]);
        assert_eq!(
            e.eval(3.0, &[]),
            Err(EvalError::UnboundParameter("a".into()))
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = parse("2*y").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("y".into()));

        let err = parse("1 + foo(x)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("foo".into()));

        let err = parse("(1 + x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnbalancedParenthesis);
        assert_eq!(err.offset, 0);

        let err = parse("1 + x)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnbalancedParenthesis);
        assert_eq!(err.offset, 5);

        let err = parse("1 +").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Expected {
                expected: "operand",
                ..
            }
        ));

        assert_eq!(parse("   ").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(parse("2 $ 3").unwrap_err().offset, 2);
        assert!(matches!(
            parse("1..2").unwrap_err().kind,
            ParseErrorKind::InvalidNumber(_)
        ));
        assert!(parse("tanh x").is_err());
        assert!(parse("2 3").is_err());
    }

    #[test]
    fn evaluation_errors() {
        assert_eq!(
            parse("1/x").unwrap().eval(0.0, &[]),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(
            parse("x^-1").unwrap().eval(0.0, &[]),
            Err(EvalError::ZeroToNegativePower)
        );
        assert_eq!(parse("x^2").unwrap().eval(0.0, &[]), Ok(0.0));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Literal),
            Just(Expr::Var),
            Just(Expr::Param("a".into())),
        ];
        leaf.prop_recursive(6, 48, 2, |inner| {
            let unary = prop_oneof![
                Just(UnaryOp::Neg),
                Just(UnaryOp::Sin),
                Just(UnaryOp::Cos),
                Just(UnaryOp::Exp),
                Just(UnaryOp::Tanh),
                Just(UnaryOp::Cosh),
                Just(UnaryOp::Sech),
            ];
            let binary = prop_oneof![
                Just(BinaryOp::Add),
                Just(BinaryOp::Sub),
                Just(BinaryOp::Mul),
                Just(BinaryOp::Div),
                Just(BinaryOp::Pow),
            ];
            prop_oneof![
                (unary, inner.clone()).prop_map(|(op, e)| Expr::Unary(op, Box::new(e))),
                (binary, inner.clone(), inner).prop_map(|(op, l, r)| Expr::Binary(
                    op,
                    Box::new(l),
                    Box::new(r)
                )),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse_with_params(&printed, &["a"]).unwrap();
            prop_assert_eq!(reparsed, e);
        }
    }
}
