//! Expression front end for polynomials in the variable `j`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term { ("+"|"-") term }
//! term   := factor { ("*"|"/") factor }
//! factor := atom [ "^" uint ]
//! atom   := uint | "j" | "binomial" "(" expr "," expr ")" | "(" expr ")" | "-" atom
//! ```
//!
//! `/` requires a nonzero constant right operand, `^` a nonnegative integer
//! literal, and `binomial(e, k)` a constant nonnegative integer `k`; it
//! expands to e(e-1)...(e-k+1)/k!. Parsing never panics; every failure is a
//! [`ParseError`] carrying the byte offset of the offending token.

use crate::poly::{Polynomial, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Hard cap on the degree of any intermediate polynomial, and on `^`
/// exponents applied to constants. Keeps adversarial inputs (nested powers,
/// huge binomial indices) from exhausting memory or time; real inputs in
/// this domain have single-digit degrees.
pub const MAX_DEGREE: usize = 512;
const MAX_CONST_EXPONENT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnbalancedParen,
    NonConstantBinomialIndex,
    NonIntegerExponent,
    DivisionByZero,
    NonConstantDivisor,
    VariableNotJ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input, always within `[0, input.len()]`.
    pub position: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseError {
            position,
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Uint(BigInt),
    J,
    Binomial,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: BigInt = input[start..i].parse().expect("digits parse as BigInt");
                toks.push((start, Token::Uint(lit)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                match &input[start..i] {
                    "j" => toks.push((start, Token::J)),
                    "binomial" => toks.push((start, Token::Binomial)),
                    other => {
                        return Err(ParseError::new(
                            start,
                            ParseErrorKind::VariableNotJ,
                            format!("unknown name '{other}'; the only variable is 'j'"),
                        ))
                    }
                }
            }
            b'+' => {
                toks.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                toks.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                toks.push((i, Token::Star));
                i += 1;
            }
            b'/' => {
                toks.push((i, Token::Slash));
                i += 1;
            }
            b'^' => {
                toks.push((i, Token::Caret));
                i += 1;
            }
            b'(' => {
                toks.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Token::RParen));
                i += 1;
            }
            b',' => {
                toks.push((i, Token::Comma));
                i += 1;
            }
            _ => {
                return Err(ParseError::new(
                    i,
                    ParseErrorKind::UnexpectedToken,
                    format!("unexpected character {:?}", &input[i..].chars().next().unwrap()),
                ))
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Token)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    let op_pos = self.pos();
                    self.bump();
                    let rhs = self.factor()?;
                    acc = checked_mul(&acc, &rhs, op_pos, ParseErrorKind::UnexpectedToken)?;
                }
                Some(Token::Slash) => {
                    self.bump();
                    let div_pos = self.pos();
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(ParseError::new(
                            div_pos,
                            ParseErrorKind::DivisionByZero,
                            "division by zero",
                        ));
                    }
                    if rhs.degree() != Some(0) {
                        return Err(ParseError::new(
                            div_pos,
                            ParseErrorKind::NonConstantDivisor,
                            "divisor must be a nonzero constant",
                        ));
                    }
                    acc = acc.scale(&(Rat::one() / rhs.coeff(0)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.bump();
        let exp_pos = self.pos();
        let e = match self.bump() {
            Some((_, Token::Uint(e))) => e,
            _ => {
                return Err(ParseError::new(
                    exp_pos,
                    ParseErrorKind::NonIntegerExponent,
                    "exponent must be a nonnegative integer literal",
                ))
            }
        };
        let e = e.to_u64().filter(|&e| e <= MAX_CONST_EXPONENT).ok_or_else(|| {
            ParseError::new(
                exp_pos,
                ParseErrorKind::NonIntegerExponent,
                format!("exponent exceeds supported maximum {MAX_CONST_EXPONENT}"),
            )
        })?;
        match base.degree() {
            // constants: exact binary powering of the single coefficient
            None | Some(0) => {
                let c = base.coeff(0);
                Ok(Polynomial::constant(rat_pow(c, e)))
            }
            Some(d) => {
                if d as u64 * e > MAX_DEGREE as u64 {
                    return Err(ParseError::new(
                        exp_pos,
                        ParseErrorKind::NonIntegerExponent,
                        format!("result degree {} exceeds supported maximum {MAX_DEGREE}", d as u64 * e),
                    ));
                }
                Ok(base.pow(e as u32))
            }
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some((_, Token::Uint(n))) => Ok(Polynomial::constant(Rat::from_integer(n))),
            Some((_, Token::J)) => Ok(Polynomial::var()),
            Some((_, Token::Minus)) => Ok(self.atom()?.neg()),
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Token::RParen)) => Ok(inner),
                    other => Err(ParseError::new(
                        other.map_or(self.end, |(p, _)| p),
                        ParseErrorKind::UnbalancedParen,
                        "expected ')'",
                    )),
                }
            }
            Some((_, Token::Binomial)) => self.binomial(pos),
            Some((p, tok)) => Err(ParseError::new(
                p,
                ParseErrorKind::UnexpectedToken,
                format!("unexpected token {tok:?}"),
            )),
            None => Err(ParseError::new(
                self.end,
                ParseErrorKind::UnexpectedToken,
                "unexpected end of input",
            )),
        }
    }

    fn binomial(&mut self, kw_pos: usize) -> Result<Polynomial, ParseError> {
        match self.bump() {
            Some((_, Token::LParen)) => {}
            other => {
                return Err(ParseError::new(
                    other.map_or(self.end, |(p, _)| p),
                    ParseErrorKind::UnexpectedToken,
                    "expected '(' after binomial",
                ))
            }
        }
        let top = self.expr()?;
        match self.bump() {
            Some((_, Token::Comma)) => {}
            other => {
                return Err(ParseError::new(
                    other.map_or(self.end, |(p, _)| p),
                    ParseErrorKind::UnexpectedToken,
                    "expected ',' in binomial(e, k)",
                ))
            }
        }
        let k_pos = self.pos();
        let k_expr = self.expr()?;
        match self.bump() {
            Some((_, Token::RParen)) => {}
            other => {
                return Err(ParseError::new(
                    other.map_or(self.end, |(p, _)| p),
                    ParseErrorKind::UnbalancedParen,
                    "expected ')'",
                ))
            }
        }
        if k_expr.degree().map_or(false, |d| d > 0) {
            return Err(ParseError::new(
                k_pos,
                ParseErrorKind::NonConstantBinomialIndex,
                "binomial index must be a constant",
            ));
        }
        let k = k_expr.coeff(0);
        if !k.is_integer() || k.is_negative() {
            return Err(ParseError::new(
                k_pos,
                ParseErrorKind::NonConstantBinomialIndex,
                "binomial index must be a nonnegative integer",
            ));
        }
        let k = k.to_integer().to_u64().filter(|&k| k <= MAX_DEGREE as u64).ok_or_else(|| {
            ParseError::new(
                k_pos,
                ParseErrorKind::NonConstantBinomialIndex,
                format!("binomial index exceeds supported maximum {MAX_DEGREE}"),
            )
        })?;

        // e(e-1)...(e-k+1) / k!
        let mut acc = Polynomial::one();
        let mut fact = BigInt::one();
        for i in 0..k {
            let shifted = top.sub(&Polynomial::constant_int(i as i64));
            acc = checked_mul(&acc, &shifted, kw_pos, ParseErrorKind::NonConstantBinomialIndex)?;
            fact *= i + 1;
        }
        Ok(acc.scale(&Rat::new(BigInt::one(), fact)))
    }
}

fn checked_mul(
    a: &Polynomial,
    b: &Polynomial,
    pos: usize,
    kind: ParseErrorKind,
) -> Result<Polynomial, ParseError> {
    let da = a.degree().unwrap_or(0);
    let db = b.degree().unwrap_or(0);
    if da + db > MAX_DEGREE {
        return Err(ParseError::new(
            pos,
            kind,
            format!("product degree {} exceeds supported maximum {MAX_DEGREE}", da + db),
        ));
    }
    Ok(a.mul(b))
}

fn rat_pow(base: Rat, e: u64) -> Rat {
    let mut acc = Rat::one();
    let mut sq = base;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Parses an expression into an exact [`Polynomial`]. Never panics; every
/// malformed input yields a [`ParseError`] with a byte position.
pub fn parse_poly(text: &str) -> Result<Polynomial, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let poly = p.expr()?;
    match p.bump() {
        None => Ok(poly),
        Some((pos, Token::RParen)) => Err(ParseError::new(
            pos,
            ParseErrorKind::UnbalancedParen,
            "unmatched ')'",
        )),
        Some((pos, tok)) => Err(ParseError::new(
            pos,
            ParseErrorKind::UnexpectedToken,
            format!("trailing input starting with {tok:?}"),
        )),
    }
}

/// Canonical rendering in the variable `j`; inverse of [`parse_poly`] on
/// canonical strings: `parse_poly(render_poly(p)) == p` exactly.
pub fn render_poly(p: &Polynomial) -> String {
    p.render("j")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_simple_forms() {
        assert_eq!(parse_poly("j^2").unwrap(), Polynomial::from_int_coeffs(&[0, 0, 1]));
        assert_eq!(
            parse_poly("binomial(j+2,2)").unwrap(),
            Polynomial::from_coeffs(vec![rat(1, 1), rat(3, 2), rat(1, 2)])
        );
        let b3 = parse_poly("binomial(j+3,3)").unwrap();
        assert_eq!(b3.degree(), Some(3));
        assert_eq!(b3.coeff(3), rat(1, 6));
        assert_eq!(parse_poly(" ( j + 1 ) * ( j - 1 ) ").unwrap(), Polynomial::from_int_coeffs(&[-1, 0, 1]));
        assert_eq!(parse_poly("(j^2+3*j+2)/2").unwrap(), parse_poly("binomial(j+2,2)").unwrap());
        assert_eq!(parse_poly("2^3").unwrap(), Polynomial::constant_int(8));
        assert_eq!(parse_poly("j^0").unwrap(), Polynomial::one());
        assert_eq!(parse_poly("-j").unwrap(), Polynomial::from_int_coeffs(&[0, -1]));
        assert_eq!(parse_poly("--j").unwrap(), Polynomial::from_int_coeffs(&[0, 1]));
    }

    #[test]
    fn unary_minus_binds_inside_power() {
        // per the grammar, -j^2 is (-j)^2
        assert_eq!(parse_poly("-j^2").unwrap(), Polynomial::from_int_coeffs(&[0, 0, 1]));
        assert_eq!(parse_poly("-1*j^2").unwrap(), Polynomial::from_int_coeffs(&[0, 0, -1]));
    }

    #[test]
    fn error_kinds() {
        let e = parse_poly("j^j").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent);
        assert_eq!(e.position, 2);

        let e = parse_poly("binomial(j, j)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonConstantBinomialIndex);

        let e = parse_poly("binomial(j, 1/2)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonConstantBinomialIndex);

        let e = parse_poly("binomial(j, -1)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonConstantBinomialIndex);

        let e = parse_poly("x^2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::VariableNotJ);
        assert_eq!(e.position, 0);

        let e = parse_poly("j/0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DivisionByZero);

        let e = parse_poly("j/(2-2)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DivisionByZero);

        let e = parse_poly("j/j").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonConstantDivisor);

        let e = parse_poly("(j+1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnbalancedParen);
        assert_eq!(e.position, 4);

        let e = parse_poly("j+1)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnbalancedParen);

        let e = parse_poly("j + ").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedToken);
        assert_eq!(e.position, 4);

        let e = parse_poly("2 j").unwrap_err(); // implicit multiplication rejected
        assert_eq!(e.kind, ParseErrorKind::UnexpectedToken);

        let e = parse_poly("").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedToken);
        assert_eq!(e.position, 0);
    }

    #[test]
    fn resource_guards() {
        let e = parse_poly("j^4294967296").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent);
        let e = parse_poly("j^513").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent);
        let e = parse_poly("binomial(j, 100000)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonConstantBinomialIndex);
        let e = parse_poly("(j^400)*(j^400)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedToken);
        // within the caps everything still works
        assert_eq!(parse_poly("j^512").unwrap().degree(), Some(512));
        assert_eq!(parse_poly("2^4096").unwrap().coeff(0), Rat::from_integer(BigInt::from(2).pow(4096)));
    }

    #[test]
    fn render_round_trips_examples() {
        for src in [
            "1/2*j^2 + 3/2*j + 1",
            "j^2",
            "0",
            "6*j - 137",
            "j^2 - 14*j + 17",
            "-1*j^5 + 3/7*j - 2",
            "-5",
        ] {
            let p = parse_poly(src).unwrap();
            assert_eq!(render_poly(&p), src);
            assert_eq!(parse_poly(&render_poly(&p)).unwrap(), p);
        }
    }

    #[test]
    fn position_is_within_input() {
        for src in ["", ")", "j^", "binomial(", "éj", "j+é"] {
            if let Err(e) = parse_poly(src) {
                assert!(e.position <= src.len(), "{src:?} gave position {}", e.position);
            }
        }
    }
}
