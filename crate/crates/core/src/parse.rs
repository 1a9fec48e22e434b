//! Parser for the polynomial text grammar.
//!
//! Grammar: integers, rationals `a/b`, variables `x1`..`xn`, operators
//! `+ - * ^`, parentheses. Multiplication is always explicit (`2*x1`, never
//! `2x1`); exponents are non-negative integers; whitespace is insignificant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::PolyError;
use crate::poly::{MultiPoly, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize), // zero-based
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, offset: usize, message: &str) -> PolyError {
        PolyError::Syntax {
            offset,
            message: message.to_string(),
        }
    }

    fn tokens(&mut self) -> Result<Vec<(Tok, usize)>, PolyError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let b = self.bytes[self.pos];
            match b {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((Tok::Plus, start));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((Tok::Minus, start));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((Tok::Star, start));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((Tok::Caret, start));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((Tok::Slash, start));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((Tok::LParen, start));
                    self.pos += 1;
                }
                b')' => {
                    out.push((Tok::RParen, start));
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                    let n: BigInt = text.parse().unwrap();
                    out.push((Tok::Int(n), start));
                }
                b'x' => {
                    self.pos += 1;
                    let dstart = self.pos;
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == dstart {
                        return Err(self.err(start, "expected variable index after 'x'"));
                    }
                    let text = std::str::from_utf8(&self.bytes[dstart..self.pos]).unwrap();
                    let index: usize = text
                        .parse()
                        .map_err(|_| self.err(dstart, "variable index too large"))?;
                    if index == 0 || index > self.nvars {
                        return Err(PolyError::VarOutOfRange {
                            index,
                            nvars: self.nvars,
                            offset: start,
                        });
                    }
                    out.push((Tok::Var(index - 1), start));
                }
                _ => return Err(self.err(start, "unexpected character")),
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    nvars: usize,
    len: usize, // input byte length, for end-of-input offsets
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, o)| o).unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: &str) -> PolyError {
        PolyError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    // expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
            }
            Some(Tok::Minus) => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t, None)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t, None)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let f = self.factor()?;
            acc = acc.mul(&f, None)?;
        }
        Ok(acc)
    }

    // factor := primary ['^' INT]
    fn factor(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let exp = u32::try_from(&n)
                        .map_err(|_| self.err("exponent out of range"))?;
                    return Ok(base.pow(exp, None)?);
                }
                _ => return Err(self.err("expected integer exponent after '^'")),
            }
        }
        Ok(base)
    }

    // primary := INT ['/' INT] | VAR | '(' expr ')'
    fn primary(&mut self) -> Result<MultiPoly, PolyError> {
        match self.bump() {
            Some(Tok::Int(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Int(d)) => {
                            if d.is_zero() {
                                return Err(self.err("zero denominator"));
                            }
                            Ok(MultiPoly::constant(BigRational::new(n, d), self.nvars))
                        }
                        _ => Err(self.err("expected integer denominator after '/'")),
                    }
                } else {
                    Ok(MultiPoly::constant(Scalar::from_integer(n), self.nvars))
                }
            }
            Some(Tok::Var(i)) => Ok(MultiPoly::var(i, self.nvars)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(self.err("expected ')'")),
                }
            }
            _ => Err(self.err("expected number, variable, or '('")),
        }
    }
}

/// Parse `text` as a polynomial in `x1..x{nvars}`.
pub fn parse_poly(text: &str, nvars: usize) -> Result<MultiPoly, PolyError> {
    let mut lexer = Lexer {
        bytes: text.as_bytes(),
        pos: 0,
        nvars,
    };
    let toks = lexer.tokens()?;
    let mut parser = Parser {
        toks,
        pos: 0,
        nvars,
        len: text.len(),
    };
    let p = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn two_term_polynomial() {
        let p = parse_poly("x1^2 - 1/2*x2", 2).unwrap();
        assert_eq!(p.num_terms(), 2);
        let sq = crate::poly::Monomial(vec![2, 0]);
        let lin = crate::poly::Monomial(vec![0, 1]);
        assert!(p.coeff(&sq).is_one());
        assert_eq!(p.coeff(&lin), BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn zero_parses_to_empty_map() {
        let p = parse_poly("0", 3).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.nvars(), 3);
    }

    #[test]
    fn binomial_cube_expands() {
        let p = parse_poly("(x1+x2)^3", 2).unwrap();
        // oracle: expand by repeated multiplication
        let b = parse_poly("x1+x2", 2).unwrap();
        let expected = b.mul(&b, None).unwrap().mul(&b, None).unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.num_terms(), 4);
        let coeffs: Vec<String> = p.terms().map(|(_, c)| c.to_string()).collect();
        assert_eq!(coeffs.len(), 4);
        for (m, c) in p.terms() {
            let expect = match m.0[0] {
                0 | 3 => 1,
                1 | 2 => 3,
                _ => unreachable!(),
            };
            assert_eq!(*c, Scalar::from_integer(expect.into()));
        }
    }

    #[test]
    fn syntax_error_has_offset() {
        match parse_poly("x1 + ", 2) {
            Err(PolyError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_variable() {
        match parse_poly("x3", 2) {
            Err(PolyError::VarOutOfRange { index: 3, nvars: 2, offset: 0 }) => {}
            other => panic!("expected var-out-of-range, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_canonical_forms() {
        for s in [
            "x1^2 - 1/2*x2",
            "0",
            "-x1 + 3",
            "2/3*x1*x2^2 + x3 - 1",
            "x1^4 + 4*x1^3*x2 + 6*x1^2*x2^2 + 4*x1*x2^3 + x2^4",
        ] {
            let n = 3;
            let p = parse_poly(s, n).unwrap();
            let q = parse_poly(&p.to_string(), n).unwrap();
            assert_eq!(p, q, "round trip failed for {s}");
        }
    }
}
