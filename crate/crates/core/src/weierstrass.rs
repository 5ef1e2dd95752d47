//! Weierstrass equations `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6` over
//! F2[t] with `deg a_i ≤ i`, their invariants, and the action of coordinate
//! changes and of PGL2(F2) on the base line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2arith::BitPoly;
use crate::text::{self, ParseError};

/// Weights of a1, a2, a3, a4, a6.
pub const WEIGHTS: [u32; 5] = [1, 2, 3, 4, 6];
/// Bit offsets of a1, a2, a3, a4, a6 inside the 21-bit equation code.
const CODE_OFFSETS: [u32; 5] = [0, 2, 5, 9, 14];
pub const CODE_BITS: u32 = 21;
pub const SPACE_SIZE: u32 = 1 << CODE_BITS;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeierstrassError {
    #[error("coefficient a{index} = {poly} exceeds degree {index}")]
    DegreeBound { index: u32, poly: BitPoly },
    #[error("equation code {0} does not fit in 21 bits")]
    CodeRange(u32),
    #[error("not a Weierstrass equation: {0}")]
    Shape(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("discriminant vanishes: the generic fiber is singular")]
    SingularGenericFiber,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WeierstrassEq {
    a: [BitPoly; 5],
}

impl WeierstrassEq {
    pub fn new(a1: BitPoly, a2: BitPoly, a3: BitPoly, a4: BitPoly, a6: BitPoly) -> Result<Self, WeierstrassError> {
        Self::from_coeffs([a1, a2, a3, a4, a6])
    }

    pub fn from_coeffs(a: [BitPoly; 5]) -> Result<Self, WeierstrassError> {
        for (c, w) in a.iter().zip(WEIGHTS) {
            if c.deg_i() > w as i32 {
                return Err(WeierstrassError::DegreeBound { index: w, poly: *c });
            }
        }
        Ok(WeierstrassEq { a })
    }

    pub fn coeffs(&self) -> [BitPoly; 5] {
        self.a
    }
    pub fn a1(&self) -> BitPoly {
        self.a[0]
    }
    pub fn a2(&self) -> BitPoly {
        self.a[1]
    }
    pub fn a3(&self) -> BitPoly {
        self.a[2]
    }
    pub fn a4(&self) -> BitPoly {
        self.a[3]
    }
    pub fn a6(&self) -> BitPoly {
        self.a[4]
    }

    pub fn code(&self) -> u32 {
        self.a
            .iter()
            .zip(CODE_OFFSETS)
            .fold(0u32, |acc, (c, off)| acc | (c.bits() as u32) << off)
    }

    pub fn from_code(code: u32) -> Result<Self, WeierstrassError> {
        if code >= SPACE_SIZE {
            return Err(WeierstrassError::CodeRange(code));
        }
        let mut a = [BitPoly::ZERO; 5];
        for (i, (off, w)) in CODE_OFFSETS.iter().zip(WEIGHTS).enumerate() {
            let mask = (1u32 << (w + 1)) - 1;
            a[i] = BitPoly::from_bits(((code >> off) & mask) as u64);
        }
        Ok(WeierstrassEq { a })
    }

    pub fn b_invariants(&self) -> [BitPoly; 4] {
        b_invariants(&self.a)
    }

    pub fn discriminant(&self) -> BitPoly {
        discriminant(&self.a)
    }

    /// j = a1¹² / Δ in lowest terms.
    pub fn j_invariant(&self) -> Result<JInvariant, WeierstrassError> {
        let delta = self.discriminant();
        if delta.is_zero() {
            return Err(WeierstrassError::SingularGenericFiber);
        }
        Ok(JInvariant::reduced(self.a1().pow(12), delta))
    }

    /// The model in the chart s = 1/t: a_i'(s) = s^i · a_i(1/s).
    pub fn infinity_model(&self) -> WeierstrassEq {
        self.mobius(Mobius::INVERSION)
    }

    /// a_i ↦ (ct+d)^i · a_i((at+b)/(ct+d)).
    pub fn mobius(&self, m: Mobius) -> WeierstrassEq {
        let mut a = self.a;
        for (c, w) in a.iter_mut().zip(WEIGHTS) {
            *c = c.mobius(w, m.0);
        }
        WeierstrassEq { a }
    }

    /// Substitution x = x' + r, y = y' + s·x' + w.
    pub fn change_coordinates(&self, c: &CoordChange) -> WeierstrassEq {
        WeierstrassEq { a: change_coordinates(&self.a, c.r, c.s, c.w) }
    }

    pub fn apply_transform(&self, g: &IsoTransform) -> WeierstrassEq {
        self.mobius(g.mobius).change_coordinates(&g.coords)
    }

    /// All images under the 3072 group elements, as 21-bit codes.
    pub fn orbit_codes(&self) -> impl Iterator<Item = u32> + '_ {
        Mobius::all().into_iter().flat_map(move |m| {
            let base = self.mobius(m).a;
            CoordChange::all().map(move |c| encode_coeffs(&change_coordinates(&base, c.r, c.s, c.w)))
        })
    }

    /// Representative with the least 21-bit code in the orbit.
    pub fn canonical_form(&self) -> WeierstrassEq {
        let code = self.orbit_codes().min().expect("orbit is non-empty");
        WeierstrassEq::from_code(code).expect("orbit stays in the bounded space")
    }

    /// Reduction at the rational place t = 0, t = 1 or t = ∞: the constant
    /// equation over F2 (a1, a2, a3, a4, a6 as bits).
    pub fn reduce_at(&self, place: RationalPoint) -> [bool; 5] {
        let mut out = [false; 5];
        for (i, (c, w)) in self.a.iter().zip(WEIGHTS).enumerate() {
            out[i] = match place {
                RationalPoint::Zero => c.eval_f2(false),
                RationalPoint::One => c.eval_f2(true),
                RationalPoint::Infinity => c.coeff(w),
            };
        }
        out
    }
}

fn encode_coeffs(a: &[BitPoly; 5]) -> u32 {
    a.iter()
        .zip(CODE_OFFSETS)
        .fold(0u32, |acc, (c, off)| acc | (c.bits() as u32) << off)
}

/// b2, b4, b6, b8 in characteristic 2.
pub(crate) fn b_invariants(a: &[BitPoly; 5]) -> [BitPoly; 4] {
    let [a1, a2, a3, a4, a6] = *a;
    let b2 = a1.square();
    let b4 = a1 * a3;
    let b6 = a3.square();
    let b8 = b2 * a6 + b4 * a4 + a2 * b6 + a4.square();
    [b2, b4, b6, b8]
}

/// Δ = b2²·b8 + b6² + b2·b4·b6 in characteristic 2.
pub(crate) fn discriminant(a: &[BitPoly; 5]) -> BitPoly {
    let [b2, b4, b6, b8] = b_invariants(a);
    b2.square() * b8 + b6.square() + b2 * b4 * b6
}

pub(crate) fn change_coordinates(a: &[BitPoly; 5], r: BitPoly, s: BitPoly, w: BitPoly) -> [BitPoly; 5] {
    let [a1, a2, a3, a4, a6] = *a;
    let r2 = r.square();
    [
        a1,
        a2 + s * a1 + r + s.square(),
        a3 + r * a1,
        a4 + s * a3 + (w + r * s) * a1 + r2,
        a6 + r * a4 + r2 * a2 + r2 * r + w * a3 + w.square() + r * w * a1,
    ]
}

/// One of the three rational points of P¹ over F2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RationalPoint {
    Zero,
    One,
    Infinity,
}

impl RationalPoint {
    pub const ALL: [RationalPoint; 3] = [RationalPoint::Zero, RationalPoint::One, RationalPoint::Infinity];
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RationalPoint::Zero => "t=0",
            RationalPoint::One => "t=1",
            RationalPoint::Infinity => "t=inf",
        })
    }
}

/// A closed point of P¹ over F2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    /// The zero locus of a monic irreducible polynomial.
    Finite(BitPoly),
    Infinity,
}

impl Place {
    pub fn degree(&self) -> u32 {
        match self {
            Place::Finite(p) => p.degree().unwrap_or(0),
            Place::Infinity => 1,
        }
    }

    pub fn rational(&self) -> Option<RationalPoint> {
        match self {
            Place::Infinity => Some(RationalPoint::Infinity),
            Place::Finite(p) if *p == BitPoly::T => Some(RationalPoint::Zero),
            Place::Finite(p) if p.bits() == 0b11 => Some(RationalPoint::One),
            Place::Finite(_) => None,
        }
    }

    pub fn from_rational(p: RationalPoint) -> Place {
        match p {
            RationalPoint::Zero => Place::Finite(BitPoly::T),
            RationalPoint::One => Place::Finite(BitPoly::from_bits(0b11)),
            RationalPoint::Infinity => Place::Infinity,
        }
    }

    /// Order used in reports: t=0, t=1, t=inf, then by (degree, encoding).
    pub fn sort_key(&self) -> (u32, u64) {
        match (self.rational(), self) {
            (Some(RationalPoint::Zero), _) => (0, 0),
            (Some(RationalPoint::One), _) => (0, 1),
            (Some(RationalPoint::Infinity), _) => (0, 2),
            (None, Place::Finite(p)) => (p.degree().unwrap_or(0), p.bits()),
            (None, Place::Infinity) => unreachable!(),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rational() {
            Some(r) => r.fmt(f),
            None => match self {
                Place::Finite(p) => p.fmt(f),
                Place::Infinity => unreachable!(),
            },
        }
    }
}

/// An element of PGL2(F2) = GL2(F2), acting by t ↦ (at+b)/(ct+d).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mobius(pub [[bool; 2]; 2]);

impl Mobius {
    pub const IDENTITY: Mobius = Mobius([[true, false], [false, true]]);
    pub const INVERSION: Mobius = Mobius([[false, true], [true, false]]);
    pub const SHIFT: Mobius = Mobius([[true, true], [false, true]]);

    pub fn all() -> [Mobius; 6] {
        let mut out = [Mobius::IDENTITY; 6];
        let mut n = 0;
        for bits in 0..16u8 {
            let m = [[bits & 8 != 0, bits & 4 != 0], [bits & 2 != 0, bits & 1 != 0]];
            let det = (m[0][0] & m[1][1]) ^ (m[0][1] & m[1][0]);
            if det {
                out[n] = Mobius(m);
                n += 1;
            }
        }
        out
    }

    /// Matrix product `self · other`; substituting by the product equals
    /// substituting by `self` first and then by `other`.
    pub fn then(self, other: Mobius) -> Mobius {
        let (a, b) = (self.0, other.0);
        let mut m = [[false; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = (a[i][0] & b[0][j]) ^ (a[i][1] & b[1][j]);
            }
        }
        Mobius(m)
    }

    pub fn inverse(self) -> Mobius {
        // Over F2 the determinant is 1, so the inverse is the adjugate.
        let [[a, b], [c, d]] = self.0;
        Mobius([[d, b], [c, a]])
    }

    /// Image of a rational point under t ↦ (at+b)/(ct+d).
    pub fn map_point(self, p: RationalPoint) -> RationalPoint {
        let [[a, b], [c, d]] = self.0;
        // Homogeneous coordinates (t0 : t1) with t = t0/t1.
        let (t0, t1) = match p {
            RationalPoint::Zero => (false, true),
            RationalPoint::One => (true, true),
            RationalPoint::Infinity => (true, false),
        };
        let n = (a & t0) ^ (b & t1);
        let m = (c & t0) ^ (d & t1);
        match (n, m) {
            (false, true) => RationalPoint::Zero,
            (true, true) => RationalPoint::One,
            (true, false) => RationalPoint::Infinity,
            (false, false) => unreachable!("invertible matrix"),
        }
    }
}

/// x = x' + r, y = y' + s·x' + w with deg r ≤ 2, deg s ≤ 1, deg w ≤ 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoordChange {
    pub r: BitPoly,
    pub s: BitPoly,
    pub w: BitPoly,
}

impl CoordChange {
    pub fn new(r: BitPoly, s: BitPoly, w: BitPoly) -> Result<Self, WeierstrassError> {
        for (poly, bound) in [(r, 2u32), (s, 1), (w, 3)] {
            if poly.deg_i() > bound as i32 {
                return Err(WeierstrassError::DegreeBound { index: bound, poly });
            }
        }
        Ok(CoordChange { r, s, w })
    }

    /// The 512 chart-preserving changes, r varying slowest.
    pub fn all() -> impl Iterator<Item = CoordChange> {
        (0..512u64).map(|i| CoordChange {
            r: BitPoly::from_bits(i >> 6),
            s: BitPoly::from_bits((i >> 4) & 0b11),
            w: BitPoly::from_bits(i & 0b1111),
        })
    }

    /// First `self`, then `next`.
    pub fn then(&self, next: &CoordChange) -> CoordChange {
        CoordChange { r: self.r + next.r, s: self.s + next.s, w: self.w + next.w + self.s * next.r }
    }

    pub fn inverse(&self) -> CoordChange {
        CoordChange { r: self.r, s: self.s, w: self.w + self.s * self.r }
    }

    /// Transport along a Möbius substitution (weights 2, 1, 3).
    fn mobius(&self, m: Mobius) -> CoordChange {
        CoordChange { r: self.r.mobius(2, m.0), s: self.s.mobius(1, m.0), w: self.w.mobius(3, m.0) }
    }
}

/// Möbius substitution followed by a coordinate change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IsoTransform {
    pub mobius: Mobius,
    pub coords: CoordChange,
}

impl IsoTransform {
    pub const IDENTITY: IsoTransform =
        IsoTransform { mobius: Mobius::IDENTITY, coords: CoordChange { r: BitPoly::ZERO, s: BitPoly::ZERO, w: BitPoly::ZERO } };

    pub fn all() -> impl Iterator<Item = IsoTransform> {
        Mobius::all()
            .into_iter()
            .flat_map(|mobius| CoordChange::all().map(move |coords| IsoTransform { mobius, coords }))
    }

    /// The transform equal to applying `self` first and then `next`.
    pub fn then(&self, next: &IsoTransform) -> IsoTransform {
        IsoTransform {
            mobius: self.mobius.then(next.mobius),
            coords: self.coords.mobius(next.mobius).then(&next.coords),
        }
    }

    pub fn inverse(&self) -> IsoTransform {
        let mobius = self.mobius.inverse();
        IsoTransform { mobius, coords: self.coords.mobius(mobius).inverse() }
    }
}

/// A reduced fraction num/den of polynomials, den ≠ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JInvariant {
    pub num: BitPoly,
    pub den: BitPoly,
}

impl JInvariant {
    pub fn reduced(num: BitPoly, den: BitPoly) -> JInvariant {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return JInvariant { num, den: BitPoly::ONE };
        }
        let g = num.gcd(den);
        JInvariant { num: num.exact_div(g).unwrap(), den: den.exact_div(g).unwrap() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// j(M(t)) for a Möbius substitution M.
    pub fn substitute(&self, m: Mobius) -> JInvariant {
        let w = self.num.deg_i().max(self.den.deg_i()).max(0) as u32;
        JInvariant::reduced(self.num.mobius(w, m.0), self.den.mobius(w, m.0))
    }
}

impl fmt::Display for JInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: BitPoly| if p.bits().count_ones() > 1 { format!("({p})") } else { p.to_string() };
        if self.den == BitPoly::ONE {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap(self.num), wrap(self.den))
        }
    }
}

impl FromStr for JInvariant {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.split_once('/') {
            None => Ok(JInvariant::reduced(text::parse_poly(s)?, BitPoly::ONE)),
            Some((n, d)) => {
                let num = text::parse_poly(n)?;
                let den = text::parse_poly(d).map_err(|e| ParseError { pos: e.pos + n.len() + 1, msg: e.msg })?;
                if den.is_zero() {
                    return Err(ParseError { pos: n.len() + 1, msg: "zero denominator".into() });
                }
                Ok(JInvariant::reduced(num, den))
            }
        }
    }
}

impl fmt::Display for WeierstrassEq {
    /// `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6`, zero terms omitted and
    /// multi-term coefficients parenthesised.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn term(c: BitPoly, var: &str) -> Option<String> {
            if c.is_zero() {
                None
            } else if var.is_empty() {
                Some(c.to_string())
            } else if c == BitPoly::ONE {
                Some(var.to_string())
            } else if c.bits().count_ones() > 1 {
                Some(format!("({c}) {var}"))
            } else {
                Some(format!("{c} {var}"))
            }
        }
        let lhs: Vec<String> = ["y^2".to_string()]
            .into_iter()
            .chain(term(self.a1(), "x y"))
            .chain(term(self.a3(), "y"))
            .collect();
        let rhs: Vec<String> = ["x^3".to_string()]
            .into_iter()
            .chain(term(self.a2(), "x^2"))
            .chain(term(self.a4(), "x"))
            .chain(term(self.a6(), ""))
            .collect();
        write!(f, "{} = {}", lhs.join(" + "), rhs.join(" + "))
    }
}

impl fmt::Debug for WeierstrassEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeierstrassEq[{}]({})", self.code(), self)
    }
}

impl FromStr for WeierstrassEq {
    type Err = WeierstrassError;

    fn from_str(s: &str) -> Result<Self, WeierstrassError> {
        let mut poly = text::parse_equation(s)?;
        for (key, what) in [((0, 2), "y^2"), ((3, 0), "x^3")] {
            if poly.remove(&key) != Some(BitPoly::ONE) {
                return Err(WeierstrassError::Shape(format!("coefficient of {what} must be 1")));
            }
        }
        let mut take = |k: (u32, u32)| poly.remove(&k).unwrap_or(BitPoly::ZERO);
        let a = [take((1, 1)), take((2, 0)), take((0, 1)), take((1, 0)), take((0, 0))];
        if let Some(((ex, ey), _)) = poly.iter().next() {
            return Err(WeierstrassError::Shape(format!("unexpected monomial x^{ex} y^{ey}")));
        }
        WeierstrassEq::from_coeffs(a)
    }
}
