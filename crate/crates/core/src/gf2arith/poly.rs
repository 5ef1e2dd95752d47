//! Dense polynomials over F2 packed into a single machine word.
//!
//! Bit `i` holds the coefficient of `t^i`. Every polynomial this crate deals
//! with has degree well below 64 (Weierstrass coefficients have degree at most
//! 6, discriminants at most 12), so one `u64` word is enough and keeps the hot
//! loops free of allocation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use super::ArithError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BitPoly(u64);

impl BitPoly {
    pub const ZERO: BitPoly = BitPoly(0);
    pub const ONE: BitPoly = BitPoly(1);
    /// The variable `t`.
    pub const T: BitPoly = BitPoly(2);

    pub const fn from_bits(bits: u64) -> Self {
        BitPoly(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `t^k`.
    pub fn monomial(k: u32) -> Self {
        assert!(k < 64, "monomial t^{k} does not fit in a word");
        BitPoly(1 << k)
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Degree, or `None` for the zero polynomial (degree −∞).
    pub const fn degree(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros())
        }
    }

    /// Degree with the convention deg 0 = −1, handy for comparisons.
    pub fn deg_i(self) -> i32 {
        self.degree().map_or(-1, |d| d as i32)
    }

    pub fn coeff(self, i: u32) -> bool {
        i < 64 && (self.0 >> i) & 1 == 1
    }

    /// Product over F2, or `None` if the result would not fit in a word.
    pub fn checked_mul(self, rhs: BitPoly) -> Option<BitPoly> {
        match (self.degree(), rhs.degree()) {
            (Some(a), Some(b)) if a + b >= 64 => None,
            (None, _) | (_, None) => Some(BitPoly::ZERO),
            _ => Some(BitPoly(clmul(self.0, rhs.0))),
        }
    }

    /// Square by spreading coefficients (Frobenius).
    pub fn square(self) -> BitPoly {
        assert!(self.deg_i() < 32, "square overflows a word");
        let mut out = 0u64;
        let mut x = self.0;
        let mut i = 0;
        while x != 0 {
            if x & 1 == 1 {
                out |= 1 << (2 * i);
            }
            x >>= 1;
            i += 1;
        }
        BitPoly(out)
    }

    pub fn pow(self, mut e: u32) -> BitPoly {
        let mut base = self;
        let mut acc = BitPoly::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }

    /// Euclidean division: `self = q·g + r` with `deg r < deg g`.
    pub fn divrem(self, g: BitPoly) -> Result<(BitPoly, BitPoly), ArithError> {
        let dg = g.degree().ok_or(ArithError::DivisionByZero)?;
        let mut r = self.0;
        let mut q = 0u64;
        while r != 0 {
            let dr = 63 - r.leading_zeros();
            if dr < dg {
                break;
            }
            let shift = dr - dg;
            q |= 1 << shift;
            r ^= g.0 << shift;
        }
        Ok((BitPoly(q), BitPoly(r)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn rem(self, g: BitPoly) -> Result<BitPoly, ArithError> {
        self.divrem(g).map(|(_, r)| r)
    }

    /// Exact quotient; `None` if `g` does not divide `self`.
    pub fn exact_div(self, g: BitPoly) -> Option<BitPoly> {
        match self.divrem(g) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn gcd(self, other: BitPoly) -> BitPoly {
        let (mut a, mut b) = (self, other);
        while !b.is_zero() {
            let r = a.rem(b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a
    }

    /// Multiplicity of `p` as a factor of `self` (`self` nonzero, `p` non-constant).
    pub fn valuation(self, p: BitPoly) -> u32 {
        debug_assert!(p.deg_i() >= 1);
        if self.is_zero() {
            return u32::MAX;
        }
        let mut v = 0;
        let mut f = self;
        while let Some(q) = f.exact_div(p) {
            f = q;
            v += 1;
        }
        v
    }

    /// Value at `t = 0` or `t = 1`.
    pub fn eval_f2(self, at: bool) -> bool {
        if at {
            self.0.count_ones() & 1 == 1
        } else {
            self.0 & 1 == 1
        }
    }

    /// Formal derivative.
    pub fn derivative(self) -> BitPoly {
        // d/dt t^i = i t^(i-1); only odd i survive in characteristic 2.
        BitPoly((self.0 >> 1) & 0x5555_5555_5555_5555)
    }

    /// Iterator over the exponents of nonzero terms, lowest first.
    pub fn terms(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (0..64u32).filter(move |i| (bits >> i) & 1 == 1)
    }

    /// Homogenised substitution `(c t + d)^weight · f((a t + b)/(c t + d))`.
    ///
    /// `f` must have degree at most `weight` for the result to be a polynomial.
    pub fn mobius(self, weight: u32, m: [[bool; 2]; 2]) -> BitPoly {
        debug_assert!(self.deg_i() <= weight as i32);
        let num = BitPoly((m[0][0] as u64) << 1 | m[0][1] as u64);
        let den = BitPoly((m[1][0] as u64) << 1 | m[1][1] as u64);
        let mut out = BitPoly::ZERO;
        for k in self.terms() {
            out += num.pow(k) * den.pow(weight - k);
        }
        out
    }
}

/// Carryless product of two words whose product degree fits in 64 bits.
#[inline]
pub(crate) fn clmul(a: u64, b: u64) -> u64 {
    let (mut small, big) = if a.count_ones() < b.count_ones() { (a, b) } else { (b, a) };
    let mut acc = 0u64;
    while small != 0 {
        let i = small.trailing_zeros();
        acc ^= big << i;
        small &= small - 1;
    }
    acc
}

// Addition in characteristic 2 is xor.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for BitPoly {
    type Output = BitPoly;
    fn add(self, rhs: BitPoly) -> BitPoly {
        BitPoly(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for BitPoly {
    fn add_assign(&mut self, rhs: BitPoly) {
        self.0 ^= rhs.0;
    }
}

impl Mul for BitPoly {
    type Output = BitPoly;
    /// Panics if the product does not fit in a word (degree ≥ 64).
    fn mul(self, rhs: BitPoly) -> BitPoly {
        self.checked_mul(rhs)
            .unwrap_or_else(|| panic!("product {self} * {rhs} exceeds degree 63"))
    }
}

impl fmt::Display for BitPoly {
    /// Ascending terms, e.g. `1+t+t^3`; the zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for k in self.terms() {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match k {
                0 => f.write_str("1")?,
                1 => f.write_str("t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly({self})")
    }
}

impl FromStr for BitPoly {
    type Err = crate::text::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::text::parse_poly(s)
    }
}
