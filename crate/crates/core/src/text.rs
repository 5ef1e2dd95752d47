//! Text grammar for polynomials in `t` and for Weierstrass equations.
//!
//! Expressions are sums of products over the atoms `0`, `1`, `t`, `x`, `y`
//! and parenthesised subexpressions, with `^` for powers. Products may be
//! written with `*` or by juxtaposition (`txy`, `t^5(1+t)`). Coefficients
//! live in F2, so `-` is accepted and means the same as `+`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::gf2arith::BitPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// Polynomial in x, y with coefficients in F2[t], keyed by (deg_x, deg_y).
pub(crate) type XyPoly = BTreeMap<(u32, u32), BitPoly>;

const MAX_T_DEGREE: u32 = 63;
const MAX_XY_DEGREE: u32 = 16;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    allow_xy: bool,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
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

    fn expr(&mut self) -> Result<XyPoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            if c == b'+' || c == b'-' {
                self.pos += 1;
                let rhs = self.term()?;
                add_into(&mut acc, &rhs);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<XyPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_digit() || c == b'(' || c == b't' || c == b'x' || c == b'y' => {}
                _ => break,
            }
            let start = self.pos;
            let rhs = self.factor()?;
            acc = mul(&acc, &rhs).ok_or(ParseError { pos: start, msg: "degree too large".into() })?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<XyPoly, ParseError> {
        let start = self.pos;
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.number()?;
            let e = u32::try_from(e).ok().filter(|&e| e <= MAX_T_DEGREE);
            let Some(e) = e else { return self.err("exponent too large") };
            let mut acc = one();
            for _ in 0..e {
                acc = mul(&acc, &base).ok_or(ParseError { pos: start, msg: "degree too large".into() })?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<u64>().map_err(|_| ParseError { pos: start, msg: "number out of range".into() })
    }

    fn atom(&mut self) -> Result<XyPoly, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(if n % 2 == 1 { one() } else { XyPoly::new() })
            }
            Some(b't') => {
                self.pos += 1;
                Ok(monomial(0, 0, BitPoly::T))
            }
            Some(c @ (b'x' | b'y')) if self.allow_xy => {
                self.pos += 1;
                Ok(if c == b'x' { monomial(1, 0, BitPoly::ONE) } else { monomial(0, 1, BitPoly::ONE) })
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn one() -> XyPoly {
    monomial(0, 0, BitPoly::ONE)
}

fn monomial(ex: u32, ey: u32, c: BitPoly) -> XyPoly {
    let mut m = XyPoly::new();
    m.insert((ex, ey), c);
    m
}

fn add_into(acc: &mut XyPoly, rhs: &XyPoly) {
    for (k, v) in rhs {
        let e = acc.entry(*k).or_insert(BitPoly::ZERO);
        *e += *v;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

fn mul(a: &XyPoly, b: &XyPoly) -> Option<XyPoly> {
    let mut out = XyPoly::new();
    for (&(ax, ay), &ca) in a {
        for (&(bx, by), &cb) in b {
            let key = (ax + bx, ay + by);
            if key.0 > MAX_XY_DEGREE || key.1 > MAX_XY_DEGREE {
                return None;
            }
            let c = ca.checked_mul(cb)?;
            add_into(&mut out, &monomial(key.0, key.1, c));
        }
    }
    Some(out)
}

fn finish(p: &mut Parser<'_>) -> Result<(), ParseError> {
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(())
}

pub fn parse_poly(s: &str) -> Result<BitPoly, ParseError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0, allow_xy: false };
    let e = p.expr()?;
    finish(&mut p)?;
    Ok(e.get(&(0, 0)).copied().unwrap_or(BitPoly::ZERO))
}

/// Parses `lhs = rhs` and returns lhs + rhs (= lhs − rhs over F2).
pub(crate) fn parse_equation(s: &str) -> Result<XyPoly, ParseError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0, allow_xy: true };
    let mut lhs = p.expr()?;
    if p.peek() != Some(b'=') {
        return p.err("expected '='");
    }
    p.pos += 1;
    let rhs = p.expr()?;
    finish(&mut p)?;
    add_into(&mut lhs, &rhs);
    Ok(lhs)
}
