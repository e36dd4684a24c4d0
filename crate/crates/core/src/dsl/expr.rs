//! Real-valued angle/coupling expressions: decimal literals, `pi`, unary
//! minus, `+ - * /` and parentheses. A literal directly followed by `pi`
//! (`2pi`) multiplies.

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Nonnegative literal; negation is always an explicit [`Expr::Neg`].
    Num(f64),
    Pi,
    Neg(Box<Expr>),
    Bin(Box<Expr>, BinOp, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

impl Expr {
    pub fn num(x: f64) -> Self {
        Expr::Num(x)
    }

    pub fn eval(&self) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Pi => PI,
            Expr::Neg(e) => -e.eval(),
            Expr::Bin(a, op, b) => {
                let (a, b) = (a.eval(), b.eval());
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(_, op, _) => op.precedence(),
            _ => 3,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug gives the shortest representation that parses back exactly
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) if e.precedence() < 3 => write!(f, "-({e})"),
            Expr::Neg(e) => write!(f, "-{e}"),
            Expr::Bin(a, op, b) => {
                let p = op.precedence();
                if a.precedence() < p {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, "{}", op.symbol())?;
                if b.precedence() <= p {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

/// Where an expression failed to parse: 0-based char offset and what was
/// expected there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub expected: &'static str,
}

/// Recursive-descent parser over a char slice, used both standalone and from
/// the statement parser (which hands over its cursor).
pub(crate) struct ExprParser<'a> {
    chars: &'a [char],
    pub(crate) pos: usize,
}

impl<'a> ExprParser<'a> {
    pub(crate) fn new(chars: &'a [char], pos: usize) -> Self {
        Self { chars, pos }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    fn err(&self, expected: &'static str) -> ExprError {
        ExprError {
            offset: self.pos,
            expected,
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(Box::new(lhs), op, Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(Box::new(lhs), op, Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.factor()
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("`)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let n = self.number()?;
                if self.at_pi() {
                    self.pos += 2;
                    Ok(Expr::Bin(Box::new(n), BinOp::Mul, Box::new(Expr::Pi)))
                } else {
                    Ok(n)
                }
            }
            Some(_) if self.at_pi() => {
                self.pos += 2;
                Ok(Expr::Pi)
            }
            _ => Err(self.err("a number, `pi`, `-` or `(`")),
        }
    }

    fn at_pi(&self) -> bool {
        let rest = &self.chars[self.pos.min(self.chars.len())..];
        rest.starts_with(&['p', 'i'])
            && !matches!(rest.get(2), Some(c) if c.is_ascii_alphanumeric() || *c == '_')
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.peek(), Some(c) if c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.peek() == Some('.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.err("a digit"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(ExprError {
                    offset: mark + 1,
                    expected: "exponent digits",
                });
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map(Expr::Num).map_err(|_| ExprError {
            offset: start,
            expected: "a number",
        })
    }
}

/// Parse a complete expression such as `3*pi/4` or `2pi`.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = ExprParser::new(&chars, 0);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != chars.len() {
        return Err(p.err("end of expression"));
    }
    Ok(e)
}

/// Parse and evaluate; the result must be finite.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let e = parse_expr(text).map_err(|e| {
        format!(
            "invalid expression `{text}`: expected {} at column {}",
            e.expected,
            e.offset + 1
        )
    })?;
    let v = e.eval();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expression `{text}` is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_angles_are_exact() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle(" - pi / 3 ").unwrap(), -PI / 3.0);
        assert_eq!(parse_angle("(1+2)*3").unwrap(), 9.0);
        assert_eq!(parse_angle("8/2/2").unwrap(), 2.0);
        assert_eq!(parse_angle("1-2-3").unwrap(), -4.0);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_expr("pie").unwrap_err().offset, 0);
        assert_eq!(parse_expr("pi/").unwrap_err().offset, 3);
        assert_eq!(parse_expr("(pi").unwrap_err().expected, "`)`");
        assert_eq!(parse_expr("1e").unwrap_err().expected, "exponent digits");
        assert!(parse_expr("").is_err());
        assert!(parse_angle("1/0").is_err());
    }

    #[test]
    fn display_reparses() {
        for src in [
            "pi/2", "3*pi/4", "-(1+pi)", "2pi", "1-(2-3)", "8/(2/2)", "--pi", "(1+2)*3", "1e-7",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
