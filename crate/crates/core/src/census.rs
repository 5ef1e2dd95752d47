//! Point counts of rational fibers and the survivor filters.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gf2arith::BitPoly;
use crate::tate::{reduction_summary, FiberConfiguration, KodairaSymbol, TateError};
use crate::weierstrass::{self, RationalPoint, WeierstrassEq};

/// Residue field size at a rational place.
pub const Q: u32 = 2;

/// Number of F2-points on a surface with the point count of an Enriques surface.
pub const TARGET_POINT_SUM: u32 = 1 + 10 * Q + Q * Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("the fiber at {0} is singular")]
    SingularFiber(RationalPoint),
    #[error("fiber configuration has no reduction data at {0}")]
    MissingPlace(RationalPoint),
}

/// A smooth fiber over a rational place: one of the five curves E1..E5 over F2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothFiber {
    /// Number of F2-points; curve class E_points.
    pub points: u32,
    pub supersingular: bool,
}

/// Counts points of the fiber at `at`, which must be smooth.
pub fn count_points_smooth(e: &WeierstrassEq, at: RationalPoint) -> Result<SmoothFiber, CensusError> {
    classify_smooth(e.reduce_at(at)).ok_or(CensusError::SingularFiber(at))
}

/// Point count of the constant equation with coefficient bits `a`, or `None`
/// if it is singular.
pub fn classify_smooth(a: [bool; 5]) -> Option<SmoothFiber> {
    let c = a.map(|b| if b { BitPoly::ONE } else { BitPoly::ZERO });
    if weierstrass::discriminant(&c).is_zero() {
        return None;
    }
    let [a1, a2, a3, a4, a6] = a.map(u8::from);
    let mut points = 1;
    for x in 0..2u8 {
        for y in 0..2u8 {
            let lhs = y ^ (a1 & x & y) ^ (a3 & y);
            let rhs = x ^ (a2 & x) ^ (a4 & x) ^ a6;
            if lhs == rhs {
                points += 1;
            }
        }
    }
    Some(SmoothFiber { points, supersingular: a1 == 0 })
}

/// Classification of the fiber over one rational place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RationalFiberClass {
    Smooth { points: u32, supersingular: bool },
    Semistable { r: u32, twisted: bool },
    Unstable { r: u32 },
}

impl RationalFiberClass {
    pub fn of(config: &FiberConfiguration, at: RationalPoint) -> RationalFiberClass {
        if let Some(s) = config.smooth_rational_fibers.get(&at) {
            return RationalFiberClass::Smooth { points: s.points, supersingular: s.supersingular };
        }
        let red = config.at(at);
        match red.symbol {
            KodairaSymbol::I(n) => RationalFiberClass::Semistable { r: n, twisted: red.twisted },
            s => RationalFiberClass::Unstable { r: s.component_count() },
        }
    }
}

impl fmt::Display for RationalFiberClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RationalFiberClass::Smooth { points, .. } => write!(f, "E{points}"),
            RationalFiberClass::Semistable { r, twisted: true } => write!(f, "I~{r}"),
            RationalFiberClass::Semistable { r, twisted: false } => write!(f, "I{r}"),
            RationalFiberClass::Unstable { r } => write!(f, "unstable({r})"),
        }
    }
}

/// Points of a singular fiber with `r` components over F_q.
///
/// Non-split semistable fibers other than the twisted forms are outside the
/// table and return `None`; so do smooth fibers.
pub fn fiber_points(c: RationalFiberClass, q: u32) -> Option<u32> {
    match c {
        RationalFiberClass::Smooth { .. } => None,
        RationalFiberClass::Semistable { r, twisted: false } => Some(r * q),
        RationalFiberClass::Semistable { r: 1, twisted: true } => Some(q + 2),
        RationalFiberClass::Semistable { r: 2, twisted: true } => Some(2 * q + 2),
        RationalFiberClass::Semistable { .. } => None,
        RationalFiberClass::Unstable { r } => Some(r * q + 1),
    }
}

/// Contribution of one rational fiber to the point count of the surface.
pub fn n_value(c: RationalFiberClass) -> u32 {
    match c {
        RationalFiberClass::Smooth { points, .. } => points,
        RationalFiberClass::Semistable { r, twisted: false } => 2 * r,
        RationalFiberClass::Semistable { r, twisted: true } => 2 * r + 2,
        RationalFiberClass::Unstable { r } => 2 * r + 1,
    }
}

/// Σ n over t = 0, 1, ∞.
pub fn total_points(config: &FiberConfiguration) -> Result<u32, CensusError> {
    let mut sum = 0;
    for p in RationalPoint::ALL {
        if !config.reductions.iter().any(|r| r.place.rational() == Some(p)) {
            return Err(CensusError::MissingPlace(p));
        }
        sum += n_value(RationalFiberClass::of(config, p));
    }
    Ok(sum)
}

/// Conditions a survivor must satisfy, in cache bit order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterTag {
    NonzeroDiscriminant,
    GloballyMinimal,
    NoI0Star,
    NonrationalFibersSmall,
    AtMostOneSs,
    SumPoints25,
    GaloisTrivialComponents,
}

impl FilterTag {
    pub const ALL: [FilterTag; 7] = [
        FilterTag::NonzeroDiscriminant,
        FilterTag::GloballyMinimal,
        FilterTag::NoI0Star,
        FilterTag::NonrationalFibersSmall,
        FilterTag::AtMostOneSs,
        FilterTag::SumPoints25,
        FilterTag::GaloisTrivialComponents,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FilterTag::NonzeroDiscriminant => "nonzero_discriminant",
            FilterTag::GloballyMinimal => "globally_minimal",
            FilterTag::NoI0Star => "no_I0star",
            FilterTag::NonrationalFibersSmall => "nonrational_fibers_small",
            FilterTag::AtMostOneSs => "at_most_one_ss",
            FilterTag::SumPoints25 => "sum_points_25",
            FilterTag::GaloisTrivialComponents => "galois_trivial_components",
        }
    }

    pub fn bit(&self) -> u8 {
        1 << (*self as u8)
    }
}

impl fmt::Display for FilterTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for FilterTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub code: u32,
    pub passed: bool,
    pub failures: Vec<FilterTag>,
}

impl FilterReport {
    fn from_failures(code: u32, failures: Vec<FilterTag>) -> FilterReport {
        FilterReport { code, passed: failures.is_empty(), failures }
    }

    /// Failed conditions as a bitmask, bit i for `FilterTag::ALL[i]`.
    pub fn failure_mask(&self) -> u8 {
        self.failures.iter().fold(0, |m, t| m | t.bit())
    }
}

/// Evaluates every condition on a configuration; the discriminant is nonzero here.
pub fn apply_filters(config: &FiberConfiguration) -> FilterReport {
    let mut failures = Vec::new();
    if !config.is_globally_minimal() {
        failures.push(FilterTag::GloballyMinimal);
    }
    if config.reductions.iter().any(|r| r.symbol == KodairaSymbol::IStar(0)) {
        failures.push(FilterTag::NoI0Star);
    }
    let small = [KodairaSymbol::I(0), KodairaSymbol::I(1), KodairaSymbol::II];
    if config.nonrational_bad().any(|r| !small.contains(&r.symbol)) {
        failures.push(FilterTag::NonrationalFibersSmall);
    }
    let ss_count = RationalPoint::ALL
        .iter()
        .filter(|&&p| match RationalFiberClass::of(config, p) {
            RationalFiberClass::Smooth { supersingular, .. } => supersingular,
            RationalFiberClass::Semistable { .. } => true,
            RationalFiberClass::Unstable { .. } => false,
        })
        .count();
    if ss_count > 1 {
        failures.push(FilterTag::AtMostOneSs);
    }
    if total_points(config).ok() != Some(TARGET_POINT_SUM) {
        failures.push(FilterTag::SumPoints25);
    }
    let galois_trivial = config.reductions.iter().all(|r| {
        if r.place.rational().is_some() {
            r.r_rational == r.r_geom
        } else {
            r.r_geom == 1
        }
    });
    if !galois_trivial {
        failures.push(FilterTag::GaloisTrivialComponents);
    }
    FilterReport::from_failures(config.equation.code(), failures)
}

/// Filters an arbitrary equation; a vanishing discriminant fails only the
/// first condition.
pub fn filter_equation(e: &WeierstrassEq) -> Result<(FilterReport, Option<FiberConfiguration>), TateError> {
    match reduction_summary(e) {
        Ok(config) => Ok((apply_filters(&config), Some(config))),
        Err(TateError::SingularGenericFiber) => {
            Ok((FilterReport::from_failures(e.code(), vec![FilterTag::NonzeroDiscriminant]), None))
        }
        Err(err) => Err(err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(s: &str) -> WeierstrassEq {
        s.parse().unwrap()
    }

    /// Affine count straight from the equation text, evaluated as polynomials.
    fn brute_force(e: &WeierstrassEq, at: RationalPoint) -> u32 {
        let a = e.reduce_at(at);
        let v = |b: bool| b as u8;
        1 + (0..2u8)
            .flat_map(|x| (0..2u8).map(move |y| (x, y)))
            .filter(|&(x, y)| {
                let lhs = (y * y + v(a[0]) * x * y + v(a[2]) * y) % 2;
                let rhs = (x * x * x + v(a[1]) * x * x + v(a[3]) * x + v(a[4])) % 2;
                lhs == rhs
            })
            .count() as u32
    }

    #[test]
    fn five_curves_over_f2() {
        let curves = [
            ("y^2+y=x^3+x^2+1", 1, true),
            ("y^2+xy=x^3+x^2+x", 2, false),
            ("y^2+y=x^3", 3, true),
            ("y^2+xy=x^3+x", 4, false),
            ("y^2+y=x^3+x^2", 5, true),
        ];
        for (text, points, ss) in curves {
            let e = eq(text);
            assert_eq!(e.j_invariant().unwrap().is_zero(), ss);
            for p in [RationalPoint::Zero, RationalPoint::One] {
                let f = count_points_smooth(&e, p).unwrap();
                assert_eq!(f, SmoothFiber { points, supersingular: ss }, "{text} at {p}");
                assert_eq!(f.points, brute_force(&e, p));
                assert_eq!(f.points % 2 == 1, f.supersingular);
            }
            // The model at infinity is not minimal; the Tate path recovers the curve.
            let cfg = reduction_summary(&e).unwrap();
            for p in RationalPoint::ALL {
                assert_eq!(cfg.smooth_rational_fibers[&p], SmoothFiber { points, supersingular: ss });
            }
        }
    }

    #[test]
    fn singular_fiber_rejected() {
        let e = eq("y^2+txy=x^3+t^5");
        assert_eq!(count_points_smooth(&e, RationalPoint::Zero), Err(CensusError::SingularFiber(RationalPoint::Zero)));
    }

    #[test]
    fn fiber_point_table() {
        assert_eq!(fiber_points(RationalFiberClass::Semistable { r: 2, twisted: false }, 2), Some(4));
        assert_eq!(fiber_points(RationalFiberClass::Semistable { r: 1, twisted: true }, 2), Some(4));
        assert_eq!(fiber_points(RationalFiberClass::Semistable { r: 2, twisted: true }, 2), Some(6));
        assert_eq!(fiber_points(RationalFiberClass::Unstable { r: 9 }, 2), Some(19));
        assert_eq!(fiber_points(RationalFiberClass::Smooth { points: 3, supersingular: true }, 2), None);
    }

    #[test]
    fn n_values() {
        assert_eq!(n_value(RationalFiberClass::Unstable { r: 6 }), 13);
        assert_eq!(n_value(RationalFiberClass::Smooth { points: 4, supersingular: false }), 4);
        assert_eq!(n_value(RationalFiberClass::Semistable { r: 2, twisted: true }), 6);
        assert_eq!(n_value(RationalFiberClass::Semistable { r: 8, twisted: false }), 16);
    }

    #[test]
    fn n_value_on_a_rational_place_matches_fiber_points() {
        for c in [
            RationalFiberClass::Semistable { r: 3, twisted: false },
            RationalFiberClass::Semistable { r: 1, twisted: true },
            RationalFiberClass::Semistable { r: 2, twisted: true },
            RationalFiberClass::Unstable { r: 7 },
        ] {
            assert_eq!(fiber_points(c, Q), Some(n_value(c)));
        }
    }

    #[test]
    fn totals_for_table_rows() {
        for (text, want) in [("y^2+txy=x^3+t^5", 25), ("y^2+t^2y=x^3+tx^2", 25), ("y^2+txy=x^3+t^2x^2+t^3x", 25), ("y^2+y=x^3", 9)] {
            let cfg = reduction_summary(&eq(text)).unwrap();
            assert_eq!(total_points(&cfg).unwrap(), want, "{text}");
        }
    }

    #[test]
    fn incomplete_configuration_is_an_error() {
        let mut cfg = reduction_summary(&eq("y^2+txy=x^3+t^5")).unwrap();
        cfg.reductions.retain(|r| r.place.rational() != Some(RationalPoint::One));
        assert_eq!(total_points(&cfg), Err(CensusError::MissingPlace(RationalPoint::One)));
    }

    #[test]
    fn filter_examples() {
        let (rep, _) = filter_equation(&eq("y^2+txy=x^3+t^5")).unwrap();
        assert!(rep.passed, "{rep:?}");
        let (rep, _) = filter_equation(&eq("y^2+y=x^3")).unwrap();
        assert!(rep.failures.contains(&FilterTag::SumPoints25));
        assert!(!rep.passed);
        let (rep, cfg) = filter_equation(&eq("y^2=x^3")).unwrap();
        assert_eq!(rep.failures, vec![FilterTag::NonzeroDiscriminant]);
        assert!(cfg.is_none());
    }

    #[test]
    fn i0_star_fails_its_filter() {
        // At t = 0 the cubic T³ + 1 has distinct roots.
        let e = eq("y^2+t^2y=x^3+t^3");
        let cfg = reduction_summary(&e).unwrap();
        assert_eq!(cfg.at(RationalPoint::Zero).symbol, KodairaSymbol::IStar(0));
        assert!(apply_filters(&cfg).failures.contains(&FilterTag::NoI0Star));
    }

    #[test]
    fn report_json_shape() {
        let (rep, _) = filter_equation(&eq("y^2+y=x^3")).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["passed"], false);
        assert!(v["failures"].as_array().unwrap().iter().any(|f| f == "sum_points_25"));
        assert_eq!(v["code"], rep.code);
    }
}
