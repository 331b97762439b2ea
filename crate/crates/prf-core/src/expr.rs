//! A small expression language for user-supplied response functions.
//!
//! Grammar (whitespace insignificant, no implicit multiplication):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' factor)?          exponent must fold to a constant
//! atom   := number | 'phi' | 'eps' | 'pi'
//!         | func '(' expr ')' | '(' expr ')' | '-' atom
//! func   := sin | cos | tan | atan | sqrt | exp | log
//! ```
//!
//! Expressions evaluate over unrestricted real arguments; the PRF layer adds
//! domain checks. Differentiation is symbolic and exact, which is what lets
//! parsed response functions participate in derivative-based stability
//! classification without finite-difference noise.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use crate::error::Error;
use crate::math;

/// Variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    /// Oscillator phase.
    Phi,
    /// Pulse strength.
    Eps,
}

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Sqrt,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => math::sin(x),
            Func::Cos => math::cos(x),
            Func::Tan => math::tan(x),
            Func::Atan => math::atan(x),
            Func::Sqrt => math::sqrt(x),
            Func::Exp => math::exp(x),
            Func::Log => math::ln(x),
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

/// Parsed expression tree.
///
/// Exponents are stored as plain constants; the parser rejects anything else,
/// which keeps differentiation closed-form.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
}

/// Expression parse failure with byte position into the source.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    /// The token at `position` does not fit the grammar.
    Unexpected {
        position: usize,
        expected: &'static str,
        found: String,
    },
    /// An identifier that is neither a variable, `pi`, nor a function name.
    UnknownIdentifier { position: usize, name: String },
    /// `^` applied to an exponent that does not fold to a constant.
    NonConstantExponent { position: usize },
    /// A malformed numeric literal.
    BadNumber { position: usize },
}

impl ParseError {
    /// Byte offset into the source at which the error was detected.
    pub fn position(&self) -> usize {
        match self {
            ParseError::Unexpected { position, .. }
            | ParseError::UnknownIdentifier { position, .. }
            | ParseError::NonConstantExponent { position }
            | ParseError::BadNumber { position } => *position,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Unexpected {
                position,
                expected,
                found,
            } => write!(
                f,
                "parse error at byte {position}: expected {expected}, found {found}"
            ),
            ParseError::UnknownIdentifier { position, name } => {
                write!(
                    f,
                    "parse error at byte {position}: unknown identifier `{name}`"
                )
            }
            ParseError::NonConstantExponent { position } => write!(
                f,
                "parse error at byte {position}: `^` requires a constant exponent"
            ),
            ParseError::BadNumber { position } => {
                write!(f, "parse error at byte {position}: malformed number")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "'+'".to_string(),
            Tok::Minus => "'-'".to_string(),
            Tok::Star => "'*'".to_string(),
            Tok::Slash => "'/'".to_string(),
            Tok::Caret => "'^'".to_string(),
            Tok::LParen => "'('".to_string(),
            Tok::RParen => "')'".to_string(),
        }
    }
}

struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(src: &str) -> Result<alloc::vec::Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = alloc::vec::Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push(Token {
                    tok: Tok::Plus,
                    pos: i,
                });
                i += 1;
            }
            b'-' => {
                out.push(Token {
                    tok: Tok::Minus,
                    pos: i,
                });
                i += 1;
            }
            b'*' => {
                out.push(Token {
                    tok: Tok::Star,
                    pos: i,
                });
                i += 1;
            }
            b'/' => {
                out.push(Token {
                    tok: Tok::Slash,
                    pos: i,
                });
                i += 1;
            }
            b'^' => {
                out.push(Token {
                    tok: Tok::Caret,
                    pos: i,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token {
                    tok: Tok::LParen,
                    pos: i,
                });
                i += 1;
            }
            b')' => {
                out.push(Token {
                    tok: Tok::RParen,
                    pos: i,
                });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(ParseError::BadNumber { position: start });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                    // A bare trailing 'e' is left for the identifier path to
                    // reject as unexpected input rather than silently eaten.
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError::BadNumber { position: start })?;
                out.push(Token {
                    tok: Tok::Num(value),
                    pos: start,
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                return Err(ParseError::Unexpected {
                    position: i,
                    expected: "a token",
                    found: format!("'{}'", &src[i..i + 1]),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: alloc::vec::Vec<Token>,
    cursor: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor)
    }

    fn next_pos(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".to_string(), |t| t.tok.describe())
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(want) {
            self.cursor += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.factor()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.factor()?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        let caret_pos = self.next_pos();
        if self.eat(&Tok::Caret) {
            let exponent = self.factor()?;
            match fold_constant(&exponent) {
                Some(c) => Ok(Expr::Pow(Box::new(base), c)),
                None => Err(ParseError::NonConstantExponent {
                    position: caret_pos,
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let inner = self.atom()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        if self.eat(&Tok::LParen) {
            let inner = self.expr()?;
            if self.eat(&Tok::RParen) {
                return Ok(inner);
            }
            return Err(ParseError::Unexpected {
                position: self.next_pos(),
                expected: "')'",
                found: self.found(),
            });
        }
        let position = self.next_pos();
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Num(value)) => {
                self.cursor += 1;
                Ok(Expr::Const(value))
            }
            Some(Tok::Ident(name)) => {
                self.cursor += 1;
                match name.as_str() {
                    "phi" => Ok(Expr::Var(Var::Phi)),
                    "eps" => Ok(Expr::Var(Var::Eps)),
                    "pi" => Ok(Expr::Const(core::f64::consts::PI)),
                    other => {
                        if let Some(func) = Func::from_name(other) {
                            if !self.eat(&Tok::LParen) {
                                return Err(ParseError::Unexpected {
                                    position: self.next_pos(),
                                    expected: "'(' after function name",
                                    found: self.found(),
                                });
                            }
                            let arg = self.expr()?;
                            if !self.eat(&Tok::RParen) {
                                return Err(ParseError::Unexpected {
                                    position: self.next_pos(),
                                    expected: "')'",
                                    found: self.found(),
                                });
                            }
                            Ok(Expr::Call(func, Box::new(arg)))
                        } else {
                            Err(ParseError::UnknownIdentifier {
                                position,
                                name: other.to_string(),
                            })
                        }
                    }
                }
            }
            _ => Err(ParseError::Unexpected {
                position,
                expected: "an atom (number, variable, function call, or parenthesized expression)",
                found: self.found(),
            }),
        }
    }
}

/// Parses a source string into an expression tree.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end: src.len(),
    };
    let expr = parser.expr()?;
    if parser.cursor != parser.tokens.len() {
        return Err(ParseError::Unexpected {
            position: parser.next_pos(),
            expected: "an operator or end of input",
            found: parser.found(),
        });
    }
    Ok(expr)
}

/// Evaluates a variable-free subtree, returning `None` if it references a
/// variable or does not evaluate to a finite number.
fn fold_constant(e: &Expr) -> Option<f64> {
    if e.references_variable() {
        return None;
    }
    match e.eval_raw(0.0, 0.0) {
        Ok(v) if v.is_finite() => Some(v),
        _ => None,
    }
}

impl Expr {
    /// True if the tree mentions `phi` or `eps` anywhere.
    pub fn references_variable(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(u) | Expr::Call(_, u) | Expr::Pow(u, _) => u.references_variable(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.references_variable() || b.references_variable()
            }
        }
    }

    /// Evaluates the expression at unrestricted real arguments.
    ///
    /// The first non-finite intermediate aborts evaluation and is reported
    /// with a rendering of the offending subexpression.
    pub fn eval(&self, phi: f64, eps: f64) -> crate::Result<f64> {
        self.eval_raw(phi, eps)
            .map_err(|node| Error::ExprSingularity {
                subexpr: node.to_string(),
            })
    }

    fn eval_raw(&self, phi: f64, eps: f64) -> Result<f64, &Expr> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::Phi) => phi,
            Expr::Var(Var::Eps) => eps,
            Expr::Neg(u) => -u.eval_raw(phi, eps)?,
            Expr::Call(func, u) => func.apply(u.eval_raw(phi, eps)?),
            Expr::Add(a, b) => a.eval_raw(phi, eps)? + b.eval_raw(phi, eps)?,
            Expr::Sub(a, b) => a.eval_raw(phi, eps)? - b.eval_raw(phi, eps)?,
            Expr::Mul(a, b) => a.eval_raw(phi, eps)? * b.eval_raw(phi, eps)?,
            Expr::Div(a, b) => a.eval_raw(phi, eps)? / b.eval_raw(phi, eps)?,
            Expr::Pow(base, c) => math::powf(base.eval_raw(phi, eps)?, *c),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(self)
        }
    }

    /// Symbolic derivative with respect to `var`, returned in simplified
    /// form.
    pub fn diff(&self, var: Var) -> Expr {
        self.diff_raw(var).simplify()
    }

    fn diff_raw(&self, var: Var) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var(v) => Const(if *v == var { 1.0 } else { 0.0 }),
            Neg(u) => Neg(Box::new(u.diff_raw(var))),
            Call(func, u) => {
                let du = u.diff_raw(var);
                let u = u.clone();
                match func {
                    Func::Sin => Mul(Box::new(Call(Func::Cos, u)), Box::new(du)),
                    Func::Cos => Neg(Box::new(Mul(Box::new(Call(Func::Sin, u)), Box::new(du)))),
                    Func::Tan => Div(
                        Box::new(du),
                        Box::new(Pow(Box::new(Call(Func::Cos, u)), 2.0)),
                    ),
                    Func::Atan => Div(
                        Box::new(du),
                        Box::new(Add(Box::new(Const(1.0)), Box::new(Pow(u, 2.0)))),
                    ),
                    Func::Sqrt => Div(
                        Box::new(du),
                        Box::new(Mul(Box::new(Const(2.0)), Box::new(Call(Func::Sqrt, u)))),
                    ),
                    Func::Exp => Mul(Box::new(Call(Func::Exp, u)), Box::new(du)),
                    Func::Log => Div(Box::new(du), u),
                }
            }
            Add(a, b) => Add(Box::new(a.diff_raw(var)), Box::new(b.diff_raw(var))),
            Sub(a, b) => Sub(Box::new(a.diff_raw(var)), Box::new(b.diff_raw(var))),
            Mul(a, b) => Add(
                Box::new(Mul(Box::new(a.diff_raw(var)), b.clone())),
                Box::new(Mul(a.clone(), Box::new(b.diff_raw(var)))),
            ),
            Div(a, b) => Div(
                Box::new(Sub(
                    Box::new(Mul(Box::new(a.diff_raw(var)), b.clone())),
                    Box::new(Mul(a.clone(), Box::new(b.diff_raw(var)))),
                )),
                Box::new(Pow(b.clone(), 2.0)),
            ),
            Pow(base, c) => Mul(
                Box::new(Mul(
                    Box::new(Const(*c)),
                    Box::new(Pow(base.clone(), c - 1.0)),
                )),
                Box::new(base.diff_raw(var)),
            ),
        }
    }

    /// Algebraic cleanup: constant folding plus the identities
    /// `x*0 -> 0`, `x*1 -> x`, `x+0 -> x`, and `x^1 -> x`.
    ///
    /// The annihilation rule `x*0 -> 0` assumes `x` evaluates finite, the
    /// usual convention for symbolic simplifiers.
    pub fn simplify(&self) -> Expr {
        use Expr::*;
        let simplified = match self {
            Const(c) => Const(*c),
            Var(v) => Var(*v),
            Neg(u) => Neg(Box::new(u.simplify())),
            Call(f, u) => Call(*f, Box::new(u.simplify())),
            Add(a, b) => Add(Box::new(a.simplify()), Box::new(b.simplify())),
            Sub(a, b) => Sub(Box::new(a.simplify()), Box::new(b.simplify())),
            Mul(a, b) => Mul(Box::new(a.simplify()), Box::new(b.simplify())),
            Div(a, b) => Div(Box::new(a.simplify()), Box::new(b.simplify())),
            Pow(u, c) => Pow(Box::new(u.simplify()), *c),
        };
        if let Some(folded) = fold_constant(&simplified) {
            if !matches!(simplified, Const(_)) {
                return Const(folded);
            }
        }
        match simplified {
            Mul(a, b) => match (&*a, &*b) {
                (Const(c), _) if *c == 0.0 => Const(0.0),
                (_, Const(c)) if *c == 0.0 => Const(0.0),
                (Const(c), _) if *c == 1.0 => *b,
                (_, Const(c)) if *c == 1.0 => *a,
                _ => Mul(a, b),
            },
            Add(a, b) => match (&*a, &*b) {
                (Const(c), _) if *c == 0.0 => *b,
                (_, Const(c)) if *c == 0.0 => *a,
                _ => Add(a, b),
            },
            Pow(u, c) if c == 1.0 => *u,
            other => other,
        }
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Const(c) if *c < 0.0 => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(child) < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(Var::Phi) => write!(f, "phi"),
            Expr::Var(Var::Eps) => write!(f, "eps"),
            Expr::Neg(u) => {
                write!(f, "-")?;
                write_child(f, u, 5)
            }
            Expr::Call(func, u) => write!(f, "{}({u})", func.name()),
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, "+")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, "-")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 3)
            }
            Expr::Pow(base, c) => {
                write_child(f, base, 5)?;
                if *c < 0.0 {
                    write!(f, "^({c})")
                } else {
                    write!(f, "^{c}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn eval(src: &str, phi: f64, eps: f64) -> f64 {
        parse(src).unwrap().eval(phi, eps).unwrap()
    }

    #[test]
    fn evaluates_polynomial_prf_exactly() {
        assert_eq!(eval("phi*(1-phi)*eps", 0.5, 0.2), 0.05);
        assert_eq!(eval("phi*(1-phi)*eps", 0.0, 3.0), 0.0);
    }

    #[test]
    fn evaluates_neuron_response_formula() {
        let src = "(1/pi)*atan(tan((phi-0.5)*pi)+eps) - (phi-0.5)";
        let expr = parse(src).unwrap();
        for &(phi, eps) in &[(0.5, 1.0), (0.3, 0.7), (0.8, 2.5), (0.5, 0.0)] {
            let direct = (1.0 / PI) * (((phi - 0.5) * PI).tan() + eps).atan() - (phi - 0.5);
            let got = expr.eval(phi, eps).unwrap();
            assert!(
                (got - direct).abs() <= 1e-15,
                "mismatch at ({phi}, {eps}): {got} vs {direct}"
            );
        }
        assert!((expr.eval(0.5, 1.0).unwrap() - 0.25).abs() <= 1e-15);
    }

    #[test]
    fn pi_is_a_constant() {
        assert_eq!(eval("pi", 0.0, 0.0), PI);
        assert_eq!(eval("2*pi", 0.0, 0.0), 2.0 * PI);
    }

    #[test]
    fn exponent_is_right_associative_and_constant_folded() {
        // 2^3^2 = 2^(3^2) = 512 with a right-associative caret.
        assert_eq!(eval("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(eval("phi^(1+1)", 3.0, 0.0), 9.0);
    }

    #[test]
    fn unary_minus_binds_to_the_atom() {
        // Per the grammar `-phi^2` is `(-phi)^2`.
        assert_eq!(eval("-phi^2", 3.0, 0.0), 9.0);
        assert_eq!(eval("-(phi^2)", 3.0, 0.0), -9.0);
        assert_eq!(eval("-2*phi", 3.0, 0.0), -6.0);
    }

    #[test]
    fn reports_position_of_unexpected_token() {
        let err = parse("phi + * eps").unwrap_err();
        match err {
            ParseError::Unexpected {
                position, found, ..
            } => {
                assert_eq!(position, 6);
                assert_eq!(found, "'*'");
            }
            other => panic!("wrong error: {other:?}"),
        }
    }

    #[test]
    fn rejects_implicit_multiplication() {
        let err = parse("2phi").unwrap_err();
        assert_eq!(err.position(), 1);
    }

    #[test]
    fn rejects_non_constant_exponent() {
        let err = parse("phi^eps").unwrap_err();
        assert!(matches!(
            err,
            ParseError::NonConstantExponent { position: 3 }
        ));
    }

    #[test]
    fn rejects_unknown_identifier_and_unbalanced_parens() {
        assert!(matches!(
            parse("foo(phi)").unwrap_err(),
            ParseError::UnknownIdentifier { position: 0, .. }
        ));
        assert!(parse("(phi").is_err());
        assert!(parse("sin(phi").is_err());
        assert!(parse("").is_err());
        assert!(parse("1..2").is_err());
    }

    #[test]
    fn singular_evaluation_names_the_subexpression() {
        let expr = parse("1/(phi-phi)").unwrap();
        match expr.eval(0.3, 0.0).unwrap_err() {
            Error::ExprSingularity { subexpr } => {
                assert_eq!(subexpr, "1/(phi-phi)");
            }
            other => panic!("wrong error: {other:?}"),
        }
        let expr = parse("log(phi)").unwrap();
        assert!(expr.eval(-1.0, 0.0).is_err());
    }

    #[test]
    fn derivative_of_product_matches_hand_result() {
        let d = parse("phi*eps").unwrap().diff(Var::Phi);
        for &(phi, eps) in &[(0.2, 0.9), (0.7, 0.1), (0.0, 5.0)] {
            assert_eq!(d.eval(phi, eps).unwrap(), eps);
        }
        assert_eq!(d, Expr::Var(Var::Eps));
    }

    #[test]
    fn derivative_matches_chain_rule() {
        let d = parse("sin(phi*eps)").unwrap().diff(Var::Phi);
        for &(phi, eps) in &[(0.2f64, 0.9), (0.7, 1.3)] {
            let want = (phi * eps).cos() * eps;
            assert!((d.eval(phi, eps).unwrap() - want).abs() <= 1e-15);
        }
    }

    #[test]
    fn strength_derivative_of_neuron_formula_at_zero_strength() {
        let src = "(1/pi)*atan(tan((phi-0.5)*pi)+eps) - (phi-0.5)";
        let d = parse(src).unwrap().diff(Var::Eps);
        for &phi in &[0.2, 0.5, 0.8] {
            let want = (1.0 / PI) / (1.0 + ((phi - 0.5) * PI).tan().powi(2));
            let got = d.eval(phi, 0.0).unwrap();
            assert!(
                (got - want).abs() <= 1e-12,
                "deps mismatch at phi={phi}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn mixed_partial_of_quartic_vanishes_at_origin() {
        let src = "2*phi*(phi-1)^2*(2*phi-1)*eps^2";
        let mixed = parse(src).unwrap().diff(Var::Phi).diff(Var::Eps);
        assert_eq!(mixed.eval(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn simplify_collapses_to_reference_tree() {
        let d = parse("(2-1)*atan(eps)").unwrap().diff(Var::Eps);
        let want = parse("1/(1+eps^2)").unwrap();
        assert_eq!(d, want);
    }

    #[test]
    fn simplify_preserves_value() {
        let noisy = parse("(phi*1+0)*(eps^1)+0").unwrap();
        let clean = noisy.simplify();
        assert_eq!(clean, parse("phi*eps").unwrap());
        for &(phi, eps) in &[(0.3, 0.4), (0.9, 2.0)] {
            assert_eq!(noisy.eval(phi, eps).unwrap(), clean.eval(phi, eps).unwrap());
        }
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let sources = [
            "phi*(1-phi)*eps",
            "-eps*phi*(1-phi)^2",
            "(1/pi)*atan(tan((phi-0.5)*pi)+eps) - (phi-0.5)",
            "phi-(eps-1)-2",
            "phi/(eps*(1+phi))",
            "2^3^2 + sqrt(1+phi^2)",
            "exp(-(phi^2))*log(1+eps)",
        ];
        for src in sources {
            let tree = parse(src).unwrap();
            let rendered = alloc::string::ToString::to_string(&tree);
            let reparsed = parse(&rendered)
                .unwrap_or_else(|e| panic!("rendering `{rendered}` failed to parse: {e}"));
            for &(phi, eps) in &[(0.17, 0.83), (0.62, 0.31), (0.9, 1.7)] {
                let a = tree.eval(phi, eps).unwrap();
                let b = reparsed.eval(phi, eps).unwrap();
                assert_eq!(a, b, "round-trip of `{src}` via `{rendered}` changed value");
            }
        }
    }
}
