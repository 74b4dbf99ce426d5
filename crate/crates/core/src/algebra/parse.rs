//! Text grammar for polynomials:
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := coeff? ('*'? var ('^' uint)?)*
//! coeff := int ('/' uint)?
//! ```
//!
//! A leading sign is accepted. Whitespace is insignificant. Variable names
//! are matched against the declared list, longest name first, so `xy`
//! reads as `x*y` when only `x` and `y` are declared.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::rat::Rat;
use crate::error::{Error, Result};

pub fn poly_parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Poly> {
    let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut parser = Parser { chars: &chars, pos: 0, vars: &vars, end: text.len() };
    parser.expr()
}

struct Parser<'a> {
    chars: &'a [(usize, char)],
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(i, _)| i).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { pos: self.offset(), msg: msg.into() }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero(self.vars);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    Rat::one()
                }
                Some('-') => {
                    self.pos += 1;
                    -Rat::one()
                }
                _ if first => Rat::one(),
                None => break,
                Some(c) => return Err(self.err(format!("expected '+' or '-', found '{c}'"))),
            };
            first = false;
            let t = self.term()?;
            acc = &acc + &t.scale(&sign);
            if self.peek().is_none() {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let n = self.vars.len();
        let mut coeff = Rat::one();
        let mut exp = vec![0u32; n];
        let mut saw_anything = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.coeff()?;
            saw_anything = true;
        }
        loop {
            let star = self.peek() == Some('*');
            if star {
                if !saw_anything {
                    return Err(self.err("'*' without a preceding factor"));
                }
                self.pos += 1;
            }
            match self.peek() {
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let idx = self.var()?;
                    let mut k = 1u32;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        k = self.uint()?.try_into().map_err(|_| self.err("exponent too large"))?;
                    }
                    exp[idx] += k;
                    saw_anything = true;
                }
                _ if star => return Err(self.err("expected variable after '*'")),
                _ => break,
            }
        }
        if !saw_anything {
            return Err(match self.peek() {
                Some(c) => self.err(format!("unexpected '{c}'")),
                None => self.err("unexpected end of input"),
            });
        }
        Ok(Poly::monomial(self.vars, exp, coeff))
    }

    fn coeff(&mut self) -> Result<Rat> {
        let num = self.uint()?;
        if self.peek() == Some('/') {
            let at = self.offset();
            self.pos += 1;
            let den = self.uint()?;
            if den.is_zero() {
                return Err(Error::ZeroDenominator { pos: at });
            }
            return Ok(Rat::new(num, den));
        }
        Ok(Rat::from_integer(num))
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Ok(s.parse().expect("digits"))
    }

    fn var(&mut self) -> Result<usize> {
        let at = self.offset();
        let rest: String = self.chars[self.pos..].iter().map(|&(_, c)| c).collect();
        let best = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty() && rest.starts_with(v.as_str()))
            .max_by_key(|(_, v)| v.len());
        match best {
            Some((idx, v)) => {
                self.pos += v.chars().count();
                Ok(idx)
            }
            None => {
                let name: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
                Err(Error::UnknownVariable { name, pos: at })
            }
        }
    }
}
