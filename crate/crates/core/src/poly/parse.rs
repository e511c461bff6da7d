//! Recursive-descent parser for the polynomial expression grammar:
//!
//! ```text
//! expr   := ['-'|'+'] term (('+'|'-') term)*
//! term   := coeff ['*'] factor* | factor+
//! factor := var ('^' nat)? | '(' expr ')'
//! var    := 'x' nat
//! coeff  := int ('/' nat)?
//! ```
//!
//! `*` between factors is optional; whitespace may separate any two tokens.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{FreePoly, Scalar, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable x{index} at offset {offset} is outside x1..x{nvars}")]
    VariableOutOfRange {
        offset: usize,
        index: u64,
        nvars: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::VariableOutOfRange { offset, .. } => {
                *offset
            }
        }
    }
}

pub(super) fn parse(text: &str, nvars: usize) -> Result<FreePoly, ParseError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        nvars,
    };
    let poly = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FreePoly, ParseError> {
        let mut sign_negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = FreePoly::zero(self.nvars);
        loop {
            let term = self.term()?;
            acc = if sign_negative { acc - term } else { acc + term };
            match self.peek() {
                Some(b'+') => sign_negative = false,
                Some(b'-') => sign_negative = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<FreePoly, ParseError> {
        let mut acc = match self.peek() {
            Some(c) if c.is_ascii_digit() => FreePoly::constant(self.nvars, self.coeff()?),
            Some(b'x') | Some(b'(') => self.factor()?,
            _ => return Err(self.error("expected a term")),
        };
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(b'x') | Some(b'(') => {}
                        _ => return Err(self.error("expected a factor after '*'")),
                    }
                }
                Some(b'x') | Some(b'(') => {}
                _ => return Ok(acc),
            }
            let f = self.factor()?;
            acc = acc * f;
        }
    }

    fn factor(&mut self) -> Result<FreePoly, ParseError> {
        match self.peek() {
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return Err(self.error("expected a variable index after 'x'"));
                }
                let index = self.nat()?;
                if index == 0 {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: "variables are numbered from x1".into(),
                    });
                }
                if index > self.nvars as u64 {
                    return Err(ParseError::VariableOutOfRange {
                        offset: start,
                        index,
                        nvars: self.nvars,
                    });
                }
                let mut exp = 1u64;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(self.error("expected an exponent after '^'"));
                    }
                    exp = self.nat()?;
                }
                let exp = usize::try_from(exp)
                    .ok()
                    .filter(|&e| e <= 1 << 16)
                    .ok_or_else(|| self.error("exponent too large"))?;
                let word = Word::new(vec![index as u32; exp]);
                Ok(FreePoly::monomial(self.nvars, word, Scalar::one()))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("expected a variable or '('")),
        }
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let text = std::str::from_utf8(self.digits()).expect("ascii digits");
        text.parse::<u64>().map_err(|_| ParseError::Syntax {
            offset: start,
            message: "natural number out of range".into(),
        })
    }

    fn big(&mut self) -> BigInt {
        let text = std::str::from_utf8(self.digits()).expect("ascii digits");
        text.parse::<BigInt>().expect("nonempty digit run")
    }

    fn coeff(&mut self) -> Result<Scalar, ParseError> {
        let num = self.big();
        if self.peek() != Some(b'/') {
            return Ok(Scalar::from_integer(num));
        }
        self.pos += 1;
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(self.error("expected a denominator after '/'"));
        }
        let den_offset = self.pos;
        let den = self.big();
        if den.is_zero() {
            return Err(ParseError::Syntax {
                offset: den_offset,
                message: "zero denominator".into(),
            });
        }
        Ok(Scalar::new(num, den))
    }
}
