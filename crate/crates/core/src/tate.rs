//! Tate's algorithm in characteristic 2 at every place of P¹ over F2.
//!
//! At a finite place `π` of degree `d` the completion of F2[t] is identified
//! with F_{2^d}[[u]], u = t − θ, where θ is a fixed root of `π` in the Conway
//! field of degree `d`. The place at infinity is handled as the place s = 0 of
//! the model in the chart s = 1/t. Coefficients are u-adic expansions
//! truncated at [`PRECISION`]; asking for a coefficient beyond the precision
//! is an error, never a silent zero.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::census::{self, SmoothFiber};
use crate::gf2arith::{poly_factor, root_of_irreducible, ArithError, BitPoly, Gf2k};
use crate::weierstrass::{Place, RationalPoint, WeierstrassEq};

pub const PRECISION: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TateError {
    #[error("discriminant vanishes: the generic fiber is singular")]
    SingularGenericFiber,
    #[error("u-adic precision exhausted at {place}: coefficient u^{needed} requested, precision {precision}")]
    PrecisionExhausted { place: String, needed: usize, precision: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Kodaira symbol of a geometric fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaSymbol {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaSymbol {
    /// Number of irreducible components of the geometric fiber.
    pub fn component_count(&self) -> u32 {
        match *self {
            KodairaSymbol::I(0) => 1,
            KodairaSymbol::I(n) => n,
            KodairaSymbol::IStar(n) => n + 5,
            KodairaSymbol::II => 1,
            KodairaSymbol::III => 2,
            KodairaSymbol::IV => 3,
            KodairaSymbol::IVStar => 7,
            KodairaSymbol::IIIStar => 8,
            KodairaSymbol::IIStar => 9,
        }
    }

    pub fn is_smooth(&self) -> bool {
        *self == KodairaSymbol::I(0)
    }

    pub fn is_semistable(&self) -> bool {
        matches!(*self, KodairaSymbol::I(n) if n >= 1)
    }

    pub fn is_unstable(&self) -> bool {
        !matches!(self, KodairaSymbol::I(_))
    }
}

impl fmt::Display for KodairaSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaSymbol::I(n) => write!(f, "I{n}"),
            KodairaSymbol::IStar(n) => write!(f, "I{n}*"),
            KodairaSymbol::II => f.write_str("II"),
            KodairaSymbol::III => f.write_str("III"),
            KodairaSymbol::IV => f.write_str("IV"),
            KodairaSymbol::IVStar => f.write_str("IV*"),
            KodairaSymbol::IIIStar => f.write_str("III*"),
            KodairaSymbol::IIStar => f.write_str("II*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown Kodaira symbol '{0}'")]
pub struct SymbolParseError(pub String);

impl FromStr for KodairaSymbol {
    type Err = SymbolParseError;

    /// Accepts `I0`, `I4`, `I~2` (the twist marker is dropped), `I1*`, `II`,
    /// `III`, `IV`, `IV*`, `III*`, `II*`; `_n` is accepted for `n`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SymbolParseError(s.to_string());
        let t = s.trim().replace(['_', '~'], "");
        let (body, star) = match t.strip_suffix('*') {
            Some(b) => (b, true),
            None => (t.as_str(), false),
        };
        let sym = match (body, star) {
            ("II", false) => KodairaSymbol::II,
            ("III", false) => KodairaSymbol::III,
            ("IV", false) => KodairaSymbol::IV,
            ("IV", true) => KodairaSymbol::IVStar,
            ("III", true) => KodairaSymbol::IIIStar,
            ("II", true) => KodairaSymbol::IIStar,
            _ => {
                let n: u32 = body.strip_prefix('I').ok_or_else(err)?.parse().map_err(|_| err())?;
                if star { KodairaSymbol::IStar(n) } else { KodairaSymbol::I(n) }
            }
        };
        Ok(sym)
    }
}

impl Serialize for KodairaSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Result of Tate's algorithm at one place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalReduction {
    pub place: Place,
    pub symbol: KodairaSymbol,
    /// Valuation of the minimal discriminant.
    pub v_delta: u32,
    pub r_geom: u32,
    /// Components defined over the residue field.
    pub r_rational: u32,
    /// Split multiplicative reduction; `None` outside the multiplicative case.
    pub split: Option<bool>,
    /// Non-split I1 or I2 (the twisted forms).
    pub twisted: bool,
    /// The given equation is minimal at this place.
    pub minimal: bool,
    /// Coefficients of the reduced minimal model, for good reduction at a
    /// rational place.
    pub good_fiber: Option<[bool; 5]>,
}

impl LocalReduction {
    /// Symbol text with the twist marker, e.g. `I~2`.
    pub fn label(&self) -> String {
        match self.symbol {
            KodairaSymbol::I(n) if self.twisted => format!("I~{n}"),
            s => s.to_string(),
        }
    }
}

impl Serialize for LocalReduction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LocalReduction", 8)?;
        st.serialize_field("place", &self.place.to_string())?;
        st.serialize_field("degree", &self.place.degree())?;
        st.serialize_field("symbol", &self.label())?;
        st.serialize_field("v_delta", &self.v_delta)?;
        st.serialize_field("r_geom", &self.r_geom)?;
        st.serialize_field("r_rational", &self.r_rational)?;
        st.serialize_field("split", &self.split)?;
        st.serialize_field("minimal", &self.minimal)?;
        st.end()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Series([u16; PRECISION]);

impl Series {
    const ZERO: Series = Series([0; PRECISION]);

    fn constant(c: u16) -> Series {
        let mut s = Series::ZERO;
        s.0[0] = c;
        s
    }

    /// c·u^k
    fn monomial(c: u16, k: usize) -> Series {
        let mut s = Series::ZERO;
        if k < PRECISION {
            s.0[k] = c;
        }
        s
    }

    fn add(&self, o: &Series) -> Series {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(o.0.iter()) {
            *a ^= b;
        }
        out
    }
}

/// Arithmetic in F_{2^d}[[u]] / (u^PRECISION).
struct Ring {
    field: &'static Gf2k,
}

impl Ring {
    fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut out = Series::ZERO;
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0[..PRECISION - i].iter().enumerate() {
                if y != 0 {
                    out.0[i + j] ^= self.field.mul(x, y);
                }
            }
        }
        out
    }

    fn square(&self, a: &Series) -> Series {
        let mut out = Series::ZERO;
        for (i, &x) in a.0[..PRECISION.div_ceil(2)].iter().enumerate() {
            out.0[2 * i] = self.field.square(x);
        }
        out
    }

    /// Expansion of a(θ + u).
    fn expand(&self, a: BitPoly, theta: u16) -> Series {
        let mut acc = Series::ZERO;
        let Some(d) = a.degree() else { return acc };
        for i in (0..=d).rev() {
            // acc ← acc·(θ + u) + a_i
            let mut next = Series::ZERO;
            for k in 0..PRECISION {
                next.0[k] = self.field.mul(acc.0[k], theta);
                if k > 0 {
                    next.0[k] ^= acc.0[k - 1];
                }
            }
            next.0[0] ^= a.coeff(i) as u16;
            acc = next;
        }
        acc
    }
}

struct LocalModel<'p> {
    ring: Ring,
    a: [Series; 5],
    /// Coefficients of u^k with k ≥ prec are unknown.
    prec: usize,
    place: &'p Place,
}

const A1: usize = 0;
const A2: usize = 1;
const A3: usize = 2;
const A4: usize = 3;
const A6: usize = 4;

impl LocalModel<'_> {
    fn field(&self) -> &'static Gf2k {
        self.ring.field
    }

    /// Coefficient of u^k in a_i.
    fn coef(&self, i: usize, k: usize) -> Result<u16, TateError> {
        self.coef_of(&self.a[i], k)
    }

    fn coef_of(&self, s: &Series, k: usize) -> Result<u16, TateError> {
        if k >= self.prec {
            return Err(self.exhausted(k));
        }
        Ok(s.0[k])
    }

    fn exhausted(&self, needed: usize) -> TateError {
        TateError::PrecisionExhausted { place: self.place.to_string(), needed, precision: self.prec }
    }

    /// Is u^k a divisor of s?
    fn divisible(&self, s: &Series, k: usize) -> Result<bool, TateError> {
        if k > self.prec {
            return Err(self.exhausted(k - 1));
        }
        Ok(s.0[..k].iter().all(|&c| c == 0))
    }

    fn valuation(&self, s: &Series) -> Result<usize, TateError> {
        s.0[..self.prec].iter().position(|&c| c != 0).ok_or_else(|| self.exhausted(self.prec))
    }

    fn b8(&self) -> Series {
        let r = &self.ring;
        let [a1, a2, a3, a4, a6] = &self.a;
        let a1sq = r.square(a1);
        r.mul(&a1sq, a6)
            .add(&r.mul(&r.mul(a1, a3), a4))
            .add(&r.mul(a2, &r.square(a3)))
            .add(&r.square(a4))
    }

    fn discriminant(&self) -> Series {
        let r = &self.ring;
        let [a1, _, a3, _, _] = &self.a;
        let b2 = r.square(a1);
        let b4 = r.mul(a1, a3);
        let b6 = r.square(a3);
        let b8 = self.b8();
        r.mul(&r.square(&b2), &b8).add(&r.square(&b6)).add(&r.mul(&r.mul(&b2, &b4), &b6))
    }

    /// x = x' + r, y = y' + s·x' + t.
    fn change(&mut self, r: Series, s: Series, t: Series) {
        let ring = &self.ring;
        let [a1, a2, a3, a4, a6] = self.a;
        let r2 = ring.square(&r);
        let rs = ring.mul(&r, &s);
        self.a = [
            a1,
            a2.add(&ring.mul(&s, &a1)).add(&r).add(&ring.square(&s)),
            a3.add(&ring.mul(&r, &a1)),
            a4.add(&ring.mul(&s, &a3)).add(&ring.mul(&t.add(&rs), &a1)).add(&r2),
            a6.add(&ring.mul(&r, &a4))
                .add(&ring.mul(&r2, &a2))
                .add(&ring.mul(&r2, &r))
                .add(&ring.mul(&t, &a3))
                .add(&ring.square(&t))
                .add(&ring.mul(&ring.mul(&r, &t), &a1)),
        ];
    }

    /// a_i ↦ a_i / u^i after the algorithm detects a non-minimal model.
    fn descale(&mut self) {
        for (i, w) in [1usize, 2, 3, 4, 6].into_iter().enumerate() {
            let mut s = Series::ZERO;
            s.0[..PRECISION - w].copy_from_slice(&self.a[i].0[w..]);
            self.a[i] = s;
        }
        self.prec -= 6;
    }
}

struct Outcome {
    symbol: KodairaSymbol,
    r_rational: u32,
    split: Option<bool>,
    /// Constant terms of the final model.
    constants: Option<[u16; 5]>,
}

fn additive(symbol: KodairaSymbol, r_rational: u32) -> Outcome {
    Outcome { symbol, r_rational, split: None, constants: None }
}

/// Runs the algorithm on a local model; returns the outcome, v(Δ_min) and
/// the number of descaling steps.
fn run(m: &mut LocalModel<'_>) -> Result<(Outcome, u32, u32), TateError> {
    let f = m.field();
    let mut restarts = 0;
    loop {
        let delta = m.discriminant();
        let v_delta = m.valuation(&delta)? as u32;
        if v_delta == 0 {
            let mut o = additive(KodairaSymbol::I(0), 1);
            o.constants = Some(m.a.map(|s| s.0[0]));
            return Ok((o, 0, restarts));
        }

        // Move the singular point of the reduction to (0, 0).
        let (c1, c2, c3, c4, c6) = (m.coef(A1, 0)?, m.coef(A2, 0)?, m.coef(A3, 0)?, m.coef(A4, 0)?, m.coef(A6, 0)?);
        let (x0, y0) = if c1 != 0 {
            let x0 = f.div(c3, c1)?;
            (x0, f.div(f.square(x0) ^ c4, c1)?)
        } else {
            debug_assert_eq!(c3, 0);
            let x0 = f.sqrt(c4);
            let rhs = f.mul(f.square(x0), x0) ^ f.mul(c2, f.square(x0)) ^ f.mul(c4, x0) ^ c6;
            (x0, f.sqrt(rhs))
        };
        m.change(Series::constant(x0), Series::ZERO, Series::constant(y0));
        debug_assert!(m.a[A3].0[0] == 0 && m.a[A4].0[0] == 0 && m.a[A6].0[0] == 0);

        if c1 != 0 {
            // Multiplicative: tangents at the node are the roots of T² + a1·T + a2.
            let split = f.quadratic_root_count(m.coef(A1, 0)?, m.coef(A2, 0)?) == 2;
            let r_rational = if split { v_delta } else { 2 - v_delta % 2 };
            let o = Outcome { symbol: KodairaSymbol::I(v_delta), r_rational, split: Some(split), constants: None };
            return Ok((o, v_delta, restarts));
        }
        if !m.divisible(&m.a[A6], 2)? {
            return Ok((additive(KodairaSymbol::II, 1), v_delta, restarts));
        }
        if !m.divisible(&m.b8(), 3)? {
            return Ok((additive(KodairaSymbol::III, 2), v_delta, restarts));
        }
        // b6 = a3², so u³ ∤ b6 iff v(a3) = 1.
        if !m.divisible(&m.a[A3], 2)? {
            let roots = f.quadratic_root_count(m.coef(A3, 1)?, m.coef(A6, 2)?);
            return Ok((additive(KodairaSymbol::IV, if roots == 2 { 3 } else { 1 }), v_delta, restarts));
        }

        // Arrange u | a1, a2; u² | a3, a4; u³ | a6.
        let s = f.sqrt(m.coef(A2, 0)?);
        m.change(Series::ZERO, Series::constant(s), Series::ZERO);
        let tau = f.sqrt(m.coef(A6, 2)?);
        m.change(Series::ZERO, Series::ZERO, Series::monomial(tau, 1));
        debug_assert!(m.a[A2].0[0] == 0 && m.a[A4].0[..2] == [0, 0] && m.a[A6].0[..3] == [0, 0, 0]);

        // P(T) = T³ + α T² + β T + γ; a multiple root must be the root √β of P'.
        let (alpha, beta, gamma) = (m.coef(A2, 1)?, m.coef(A4, 2)?, m.coef(A6, 3)?);
        let t0 = f.sqrt(beta);
        let p_t0 = f.mul(f.square(t0), t0) ^ f.mul(alpha, f.square(t0)) ^ f.mul(beta, t0) ^ gamma;
        if p_t0 != 0 {
            let rational_roots = f
                .enumerate()
                .filter(|&x| f.mul(f.square(x), x) ^ f.mul(alpha, f.square(x)) ^ f.mul(beta, x) ^ gamma == 0)
                .count() as u32;
            return Ok((additive(KodairaSymbol::IStar(0), 2 + rational_roots), v_delta, restarts));
        }
        m.change(Series::monomial(t0, 1), Series::ZERO, Series::ZERO);

        if alpha != t0 {
            // Double root at 0: I_n^*, found by alternately splitting quadratics.
            let a21 = m.coef(A2, 1)?;
            debug_assert_ne!(a21, 0);
            let mut n = 1usize;
            loop {
                if n > v_delta as usize {
                    return Err(m.exhausted(n + 3));
                }
                if n % 2 == 1 {
                    let k = (n + 3) / 2;
                    let (b, c) = (m.coef(A3, k)?, m.coef(A6, n + 3)?);
                    if b != 0 {
                        let sym = KodairaSymbol::IStar(n as u32);
                        let r = sym.component_count() - if f.quadratic_root_count(b, c) == 2 { 0 } else { 2 };
                        return Ok((additive(sym, r), v_delta, restarts));
                    }
                    m.change(Series::ZERO, Series::ZERO, Series::monomial(f.sqrt(c), k));
                } else {
                    let k = n / 2 + 2;
                    let (b, c) = (m.coef(A4, k)?, m.coef(A6, n + 3)?);
                    if b != 0 {
                        // a21·X² + b·X + c: normalise to a monic quadratic.
                        let inv = f.inv(a21)?;
                        let sym = KodairaSymbol::IStar(n as u32);
                        let split = f.quadratic_root_count(f.mul(b, inv), f.mul(c, inv)) == 2;
                        let r = sym.component_count() - if split { 0 } else { 2 };
                        return Ok((additive(sym, r), v_delta, restarts));
                    }
                    let root = f.sqrt(f.div(c, a21)?);
                    m.change(Series::monomial(root, k - 1), Series::ZERO, Series::ZERO);
                }
                n += 1;
            }
        }

        // Triple root at 0.
        let (b, c) = (m.coef(A3, 2)?, m.coef(A6, 4)?);
        if b != 0 {
            let r = if f.quadratic_root_count(b, c) == 2 { 7 } else { 5 };
            return Ok((additive(KodairaSymbol::IVStar, r), v_delta, restarts));
        }
        m.change(Series::ZERO, Series::ZERO, Series::monomial(f.sqrt(c), 2));
        if !m.divisible(&m.a[A4], 4)? {
            return Ok((additive(KodairaSymbol::IIIStar, 8), v_delta, restarts));
        }
        if !m.divisible(&m.a[A6], 6)? {
            return Ok((additive(KodairaSymbol::IIStar, 9), v_delta, restarts));
        }
        m.descale();
        restarts += 1;
    }
}

/// Tate's algorithm for `e` at `place`.
pub fn tate_algorithm(e: &WeierstrassEq, place: Place) -> Result<LocalReduction, TateError> {
    if e.discriminant().is_zero() {
        return Err(TateError::SingularGenericFiber);
    }
    let (model, field, theta) = match place {
        Place::Infinity => (e.infinity_model(), Gf2k::get(1), 0),
        Place::Finite(pi) => {
            let d = pi.degree().unwrap_or(0);
            let theta = root_of_irreducible(pi)?;
            (*e, Gf2k::get(d), theta)
        }
    };
    let ring = Ring { field };
    let a = model.coeffs().map(|c| ring.expand(c, theta));
    let mut local = LocalModel { ring, a, prec: PRECISION, place: &place };
    let (outcome, v_delta, restarts) = run(&mut local)?;
    let good_fiber = match (place.degree(), outcome.constants) {
        (1, Some(c)) => Some(c.map(|x| x != 0)),
        _ => None,
    };
    let symbol = outcome.symbol;
    let twisted = outcome.split == Some(false) && matches!(symbol, KodairaSymbol::I(1) | KodairaSymbol::I(2));
    Ok(LocalReduction {
        place,
        symbol,
        v_delta,
        r_geom: symbol.component_count(),
        r_rational: outcome.r_rational,
        split: outcome.split,
        twisted,
        minimal: restarts == 0,
        good_fiber,
    })
}

/// Reduction data of one equation over all relevant places.
#[derive(Clone, Debug)]
pub struct FiberConfiguration {
    pub equation: WeierstrassEq,
    pub discriminant: BitPoly,
    /// Every place with v(Δ) > 0 plus the three rational places, in report order.
    pub reductions: Vec<LocalReduction>,
    /// Point-count class of each smooth fiber over a rational place.
    pub smooth_rational_fibers: BTreeMap<RationalPoint, SmoothFiber>,
}

impl FiberConfiguration {
    pub fn at(&self, p: RationalPoint) -> &LocalReduction {
        let place = Place::from_rational(p);
        self.reductions.iter().find(|r| r.place == place).expect("rational places are always present")
    }

    /// `E4` for a smooth fiber, the symbol label otherwise.
    pub fn fiber_label(&self, p: RationalPoint) -> String {
        match self.smooth_rational_fibers.get(&p) {
            Some(s) => format!("E{}", s.points),
            None => self.at(p).label(),
        }
    }

    /// Fibers over t = 0, 1, ∞ joined by `+`, e.g. `III*+E4+I~2`.
    pub fn rational_summary(&self) -> String {
        RationalPoint::ALL.map(|p| self.fiber_label(p)).join("+")
    }

    /// Bad places that are not rational.
    pub fn nonrational_bad(&self) -> impl Iterator<Item = &LocalReduction> {
        self.reductions.iter().filter(|r| r.place.rational().is_none())
    }

    pub fn is_globally_minimal(&self) -> bool {
        self.reductions.iter().all(|r| r.minimal)
    }

    /// Σ v(Δ)·deg over all places.
    pub fn euler_number(&self) -> u32 {
        self.reductions.iter().map(|r| r.v_delta * r.place.degree()).sum()
    }
}

/// Runs Tate's algorithm at every place dividing Δ, at infinity, and at the
/// rational places, and classifies the smooth rational fibers.
pub fn reduction_summary(e: &WeierstrassEq) -> Result<FiberConfiguration, TateError> {
    let delta = e.discriminant();
    if delta.is_zero() {
        return Err(TateError::SingularGenericFiber);
    }
    let mut places: Vec<Place> = RationalPoint::ALL.iter().map(|&p| Place::from_rational(p)).collect();
    for (pi, _) in poly_factor(delta)? {
        let place = Place::Finite(pi);
        if place.rational().is_none() {
            places.push(place);
        }
    }
    places.sort_by_key(|p| p.sort_key());
    let reductions = places.into_iter().map(|p| tate_algorithm(e, p)).collect::<Result<Vec<_>, _>>()?;
    let mut smooth = BTreeMap::new();
    for r in &reductions {
        if let (Some(p), Some(c)) = (r.place.rational(), r.good_fiber) {
            smooth.insert(p, census::classify_smooth(c).expect("good reduction gives a smooth fiber"));
        }
    }
    Ok(FiberConfiguration { equation: *e, discriminant: delta, reductions, smooth_rational_fibers: smooth })
}

/// True iff the equation is minimal at every place.
pub fn is_globally_minimal(e: &WeierstrassEq) -> Result<bool, TateError> {
    Ok(reduction_summary(e)?.is_globally_minimal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::weierstrass::Mobius;

    fn eq(s: &str) -> WeierstrassEq {
        s.parse().unwrap()
    }
    fn p(s: &str) -> BitPoly {
        s.parse().unwrap()
    }
    const ZERO: Place = Place::Finite(BitPoly::T);

    #[test]
    fn ii_star_with_wild_discriminant() {
        let r = tate_algorithm(&eq("y^2+txy=x^3+t^5"), ZERO).unwrap();
        assert_eq!(r.symbol, KodairaSymbol::IIStar);
        assert_eq!((r.r_geom, r.v_delta), (9, 11));
        assert!(r.minimal);
    }

    #[test]
    fn twisted_i2_at_infinity() {
        let r = tate_algorithm(&eq("y^2+txy=x^3+t^2x^2+t^3x"), Place::Infinity).unwrap();
        assert_eq!(r.symbol, KodairaSymbol::I(2));
        assert!(r.twisted);
        assert_eq!(r.split, Some(false));
        assert_eq!(r.r_rational, 2);
        assert_eq!(r.label(), "I~2");
    }

    #[test]
    fn i1_over_f4_place() {
        let r = tate_algorithm(&eq("y^2+txy=x^3+t^3x+t^5(1+t)"), Place::Finite(p("t^2+t+1"))).unwrap();
        assert_eq!(r.symbol, KodairaSymbol::I(1));
        assert_eq!(r.v_delta, 1);
    }

    #[test]
    fn good_reduction_everywhere() {
        let e = eq("y^2+y=x^3");
        for place in [ZERO, Place::Finite(p("1+t")), Place::Infinity, Place::Finite(p("1+t+t^2"))] {
            let r = tate_algorithm(&e, place).unwrap();
            assert_eq!(r.symbol, KodairaSymbol::I(0));
        }
        // In the chart at infinity the model is y² + s³y = x³, which is not minimal.
        let cfg = reduction_summary(&e).unwrap();
        assert!(!cfg.at(RationalPoint::Infinity).minimal);
        assert!(cfg.at(RationalPoint::Zero).minimal);
        assert_eq!(cfg.euler_number(), 0);
    }

    #[test]
    fn summaries_match_table_rows() {
        let cases = [
            ("y^2+txy=x^3+tx^2+t^4x", "I4*+E2+E4"),
            ("y^2+t^2y=x^3", "IV*+E3+IV"),
            ("y^2+txy+ty=x^3+tx^2+tx", "III+E4+I8"),
            ("y^2+txy+t^2y=x^3+tx^2+t^4x+t^5(1+t)", "I1*+E4+I4"),
            ("y^2+txy=x^3+t^3x+t^5(1+t)", "III*+E4+E4"),
            ("y^2+txy=x^3+t^3x", "III*+E4+I2"),
            ("y^2+txy=x^3+t^2x^2+t^3x", "III*+E2+I~2"),
            ("y^2+txy=x^3+t^5", "II*+E4+I1"),
            ("y^2+txy=x^3+t^2x^2+t^5", "II*+E2+I~1"),
            ("y^2+t^2y=x^3+tx^2", "I1*+E5+IV"),
            ("y^2+t^2y=x^3+t^3x", "IV*+E5+III"),
        ];
        for (text, want) in cases {
            let cfg = reduction_summary(&eq(text)).unwrap();
            assert_eq!(cfg.rational_summary(), want, "{text}");
            assert_eq!(cfg.euler_number(), 12, "{text}");
            assert!(cfg.is_globally_minimal());
        }
    }

    #[test]
    fn non_minimal_model_is_flagged() {
        // y² + y = x³ rescaled by x ↦ t²x, y ↦ t³y.
        let e = eq("y^2+t^3y=x^3");
        let r = tate_algorithm(&e, ZERO).unwrap();
        assert!(!r.minimal);
        assert_eq!(r.symbol, KodairaSymbol::I(0));
        assert_eq!(r.v_delta, 0);
        assert!(!is_globally_minimal(&e).unwrap());
    }

    #[test]
    fn singular_generic_fiber_is_an_error() {
        assert_eq!(tate_algorithm(&eq("y^2=x^3"), ZERO), Err(TateError::SingularGenericFiber));
    }

    #[test]
    fn symbol_text_round_trip() {
        for s in ["I0", "I7", "I0*", "I4*", "II", "III", "IV", "IV*", "III*", "II*"] {
            assert_eq!(s.parse::<KodairaSymbol>().unwrap().to_string(), s);
        }
        assert_eq!("I~2".parse::<KodairaSymbol>().unwrap(), KodairaSymbol::I(2));
        assert_eq!("I_1^*".replace('^', "").parse::<KodairaSymbol>().unwrap(), KodairaSymbol::IStar(1));
        assert!("V".parse::<KodairaSymbol>().is_err());
    }

    #[test]
    fn expansion_matches_evaluation() {
        // a(θ + u) at u = 0 must be a(θ).
        let pi = p("1+t+t^3");
        let field = Gf2k::get(3);
        let theta = root_of_irreducible(pi).unwrap();
        let ring = Ring { field };
        for bits in 0..128u64 {
            let a = BitPoly::from_bits(bits);
            assert_eq!(ring.expand(a, theta).0[0], field.eval_poly(a, theta));
            // The expansion of π itself has valuation exactly 1.
        }
        let s = ring.expand(pi, theta);
        assert_eq!(s.0[0], 0);
        assert_ne!(s.0[1], 0);
    }

    fn nonsingular() -> impl Strategy<Value = WeierstrassEq> {
        (0..crate::weierstrass::SPACE_SIZE)
            .prop_map(|c| WeierstrassEq::from_code(c).unwrap())
            .prop_filter("Δ ≠ 0", |e| !e.discriminant().is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn infinity_is_zero_of_flipped_model(e in nonsingular()) {
            let at_inf = tate_algorithm(&e, Place::Infinity).unwrap();
            let flipped = tate_algorithm(&e.infinity_model(), ZERO).unwrap();
            prop_assert_eq!(at_inf.label(), flipped.label());
            prop_assert_eq!(
                (at_inf.v_delta, at_inf.r_geom, at_inf.r_rational, at_inf.split, at_inf.minimal),
                (flipped.v_delta, flipped.r_geom, flipped.r_rational, flipped.split, flipped.minimal)
            );
        }

        #[test]
        fn mobius_relabels_fibers(e in nonsingular(), m in 0usize..6) {
            let m = Mobius::all()[m];
            let moved = e.mobius(m);
            for p in RationalPoint::ALL {
                let here = tate_algorithm(&moved, Place::from_rational(p)).unwrap();
                let there = tate_algorithm(&e, Place::from_rational(m.map_point(p))).unwrap();
                prop_assert_eq!(here.label(), there.label());
                prop_assert_eq!(here.r_rational, there.r_rational);
            }
        }

        #[test]
        fn local_invariants(e in nonsingular()) {
            let config = reduction_summary(&e).unwrap();
            if config.is_globally_minimal() {
                prop_assert_eq!(config.euler_number(), 12);
            }
            for r in &config.reductions {
                prop_assert_eq!(r.r_geom, r.symbol.component_count());
                prop_assert!(r.r_rational >= 1 && r.r_rational <= r.r_geom);
                match r.symbol {
                    KodairaSymbol::I(0) => prop_assert_eq!(r.v_delta, 0),
                    KodairaSymbol::I(n) => {
                        prop_assert_eq!(r.v_delta, n);
                        let split = r.split.expect("multiplicative");
                        // the twisted forms keep every component rational
                        prop_assert_eq!(split || n <= 2, r.r_rational == n);
                        prop_assert_eq!(r.twisted, !split && n <= 2);
                    }
                    // conductor exponent ≥ 2 for additive reduction
                    s => prop_assert!(r.v_delta > s.component_count(), "{} v={}", s, r.v_delta),
                }
                prop_assert_eq!(r.good_fiber.is_some(), r.symbol == KodairaSymbol::I(0) && r.place.degree() == 1);
            }
        }
    }
}
