//! The finite fields F_{2^k}, k ≤ 12, as residue fields of places of P^1.
//!
//! Elements are `u16` bit vectors in the polynomial basis of the fixed modulus.
//! Multiplication goes through log/antilog tables, which requires the modulus
//! to be primitive; the Conway polynomials below are.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::{factor, ArithError, BitPoly};

pub const MAX_EXTENSION_DEGREE: u32 = 12;

/// Conway polynomials for p = 2, indexed by degree (index 0 unused).
const CONWAY: [u64; 13] = [
    0,
    0b11,                   // 1 + u
    0b111,                  // 1 + u + u^2
    0b1011,                 // 1 + u + u^3
    0b10011,                // 1 + u + u^4
    0b100101,               // 1 + u^2 + u^5
    0b1011011,              // 1 + u + u^3 + u^4 + u^6
    0b10000011,             // 1 + u + u^7
    0b100011101,            // 1 + u^2 + u^3 + u^4 + u^8
    0b1000010001,           // 1 + u^4 + u^9
    0b10001101111,          // 1 + u + u^2 + u^3 + u^5 + u^6 + u^10
    0b100000000101,         // 1 + u^2 + u^11
    0b1000011101011,        // 1 + u + u^3 + u^5 + u^6 + u^7 + u^12
];

/// Extension degree together with its defining modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub k: u32,
    pub modulus: BitPoly,
}

impl FieldSpec {
    pub fn conway(k: u32) -> Result<FieldSpec, ArithError> {
        if k == 0 || k > MAX_EXTENSION_DEGREE {
            return Err(ArithError::UnsupportedDegree(k));
        }
        Ok(FieldSpec { k, modulus: BitPoly::from_bits(CONWAY[k as usize]) })
    }
}

/// Arithmetic context for one field F_{2^k}.
pub struct Gf2k {
    spec: FieldSpec,
    order: u32,
    // exp has length 2·(order−1) so a product index never needs a modulo.
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl Gf2k {
    pub fn new(spec: FieldSpec) -> Result<Gf2k, ArithError> {
        let k = spec.k;
        if k == 0 || k > MAX_EXTENSION_DEGREE || spec.modulus.degree() != Some(k) {
            return Err(ArithError::UnsupportedDegree(k));
        }
        if !factor::is_irreducible(spec.modulus) {
            return Err(ArithError::ReducibleModulus(spec.modulus));
        }
        let order = 1u32 << k;
        let units = (order - 1) as usize;
        let mut exp = vec![0u16; 2 * units.max(1)];
        let mut log = vec![0u16; order as usize];
        let modulus = spec.modulus.bits() as u32;
        // For k = 1 the only unit is 1 and u ≡ 1; start the walk from the generator u.
        let generator: u32 = if k == 1 { 1 } else { 2 };
        let mut x: u32 = 1;
        for i in 0..units {
            if i > 0 && x == 1 {
                return Err(ArithError::NonPrimitiveModulus(spec.modulus));
            }
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x = mulmod(x, generator, modulus, k);
        }
        for i in units..exp.len() {
            exp[i] = exp[i - units];
        }
        Ok(Gf2k { spec, order, exp, log })
    }

    /// Shared instance for the Conway field of degree `k`.
    pub fn get(k: u32) -> &'static Gf2k {
        static FIELDS: OnceLock<Vec<Gf2k>> = OnceLock::new();
        let fields = FIELDS.get_or_init(|| {
            (1..=MAX_EXTENSION_DEGREE)
                .map(|k| Gf2k::new(FieldSpec::conway(k).unwrap()).expect("Conway modulus is primitive"))
                .collect()
        });
        &fields[(k - 1) as usize]
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn degree(&self) -> u32 {
        self.spec.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: u16) -> Result<u16, ArithError> {
        if a == 0 {
            return Err(ArithError::InverseOfZero);
        }
        let units = self.order - 1;
        let l = self.log[a as usize] as u32;
        Ok(self.exp[((units - l) % units) as usize])
    }

    pub fn div(&self, a: u16, b: u16) -> Result<u16, ArithError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn square(&self, a: u16) -> u16 {
        self.mul(a, a)
    }

    /// The Frobenius automorphism x ↦ x².
    pub fn frobenius(&self, a: u16) -> u16 {
        self.square(a)
    }

    /// Inverse Frobenius; every element of a finite field of characteristic 2
    /// is a square.
    pub fn sqrt(&self, a: u16) -> u16 {
        if a == 0 {
            return 0;
        }
        let units = self.order - 1;
        let l = self.log[a as usize] as u32;
        // log(√a) = l / 2 mod (2^k − 1); 2 is invertible mod an odd number.
        let half = if l.is_multiple_of(2) { l / 2 } else { (l + units) / 2 };
        self.exp[(half % units) as usize]
    }

    /// Absolute trace to F2, returned as 0 or 1.
    pub fn trace(&self, a: u16) -> u16 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.spec.k {
            acc ^= x;
            x = self.square(x);
        }
        debug_assert!(acc <= 1);
        acc
    }

    pub fn pow(&self, a: u16, e: u32) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let units = (self.order - 1) as u64;
        let l = self.log[a as usize] as u64 * e as u64 % units;
        self.exp[l as usize]
    }

    pub fn enumerate(&self) -> impl Iterator<Item = u16> {
        0..self.order as u16
    }

    /// Evaluates a polynomial with F2 coefficients at `x`.
    pub fn eval_poly(&self, f: BitPoly, x: u16) -> u16 {
        let Some(d) = f.degree() else { return 0 };
        let mut acc = 0u16;
        for i in (0..=d).rev() {
            acc = self.mul(acc, x) ^ (f.coeff(i) as u16);
        }
        acc
    }

    /// Does `z² + z = c` have a solution in the field?
    pub fn artin_schreier_solvable(&self, c: u16) -> bool {
        self.trace(c) == 0
    }

    /// Number of roots in the field of a monic quadratic `z² + b z + c`.
    pub fn quadratic_root_count(&self, b: u16, c: u16) -> u32 {
        if b == 0 {
            // (z + √c)², one rational double root.
            1
        } else {
            let scaled = self.div(c, self.square(b)).unwrap();
            if self.artin_schreier_solvable(scaled) { 2 } else { 0 }
        }
    }
}

fn mulmod(a: u32, b: u32, modulus: u32, k: u32) -> u32 {
    let mut prod = super::poly::clmul(a as u64, b as u64) as u32;
    let top = 2 * k;
    for i in (k..top).rev() {
        if (prod >> i) & 1 == 1 {
            prod ^= modulus << (i - k);
        }
    }
    prod
}

/// A root in F_{2^d} of the monic irreducible `pi` of degree `d ≤ 12`,
/// i.e. the image of `t` under one embedding F2[t]/(pi) → F_{2^d}.
pub fn root_of_irreducible(pi: BitPoly) -> Result<u16, ArithError> {
    static ROOTS: OnceLock<Vec<OnceLock<HashMap<u64, u16>>>> = OnceLock::new();
    let d = pi.degree().filter(|&d| (1..=MAX_EXTENSION_DEGREE).contains(&d));
    let d = d.ok_or(ArithError::UnsupportedDegree(pi.deg_i().max(0) as u32))?;
    let slots = ROOTS.get_or_init(|| (0..=MAX_EXTENSION_DEGREE).map(|_| OnceLock::new()).collect());
    let map = slots[d as usize].get_or_init(|| {
        let field = Gf2k::get(d);
        let mut wanted: HashMap<u64, Option<u16>> =
            factor::irreducibles(d).into_iter().map(|g| (g.bits(), None)).collect();
        // Walk elements, compute each one's minimal polynomial via its conjugates.
        for x in field.enumerate() {
            let mp = minimal_polynomial(field, x);
            if mp.degree() == Some(d) {
                if let Some(slot) = wanted.get_mut(&mp.bits()) {
                    slot.get_or_insert(x);
                }
            }
        }
        wanted.into_iter().map(|(k, v)| (k, v.expect("every irreducible splits in F_{2^d}"))).collect()
    });
    map.get(&pi.bits()).copied().ok_or(ArithError::ReducibleModulus(pi))
}

/// Minimal polynomial over F2 of `x`, as the product of (z − x^{2^i}) over
/// the distinct conjugates.
fn minimal_polynomial(field: &Gf2k, x: u16) -> BitPoly {
    let mut conj = vec![x];
    let mut y = field.square(x);
    while y != x {
        conj.push(y);
        y = field.square(y);
    }
    // Coefficients in the big field, lowest first.
    let mut coeffs: Vec<u16> = vec![1];
    for &c in &conj {
        let mut next = vec![0u16; coeffs.len() + 1];
        for (i, &a) in coeffs.iter().enumerate() {
            next[i + 1] ^= a;
            next[i] ^= field.mul(a, c);
        }
        coeffs = next;
    }
    let mut bits = 0u64;
    for (i, &a) in coeffs.iter().enumerate() {
        debug_assert!(a <= 1);
        if a == 1 {
            bits |= 1 << i;
        }
    }
    BitPoly::from_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_identities() {
        let f4 = Gf2k::get(2);
        let u = 0b10;
        assert_eq!(f4.mul(u, u ^ 1), 1);
        for x in f4.enumerate() {
            assert_eq!(f4.frobenius(f4.frobenius(x)), x);
        }
    }

    #[test]
    fn f8_enumeration() {
        let f8 = Gf2k::get(3);
        assert_eq!(f8.enumerate().count(), 8);
        assert_eq!(f8.enumerate().filter(|&x| f8.inv(x).is_ok()).count(), 7);
        assert_eq!(f8.inv(0), Err(ArithError::InverseOfZero));
    }

    #[test]
    fn table_mul_matches_schoolbook_and_axioms() {
        for k in 1..=MAX_EXTENSION_DEGREE {
            let f = Gf2k::get(k);
            let m = f.spec().modulus.bits() as u32;
            let step = if k > 8 { 37 } else { 1 };
            for a in (0..f.order()).step_by(step) {
                for b in (0..f.order()).step_by(step) {
                    let (a, b) = (a as u16, b as u16);
                    assert_eq!(f.mul(a, b) as u32, mulmod(a as u32, b as u32, m, k));
                }
                let a = a as u16;
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                assert_eq!(f.square(f.sqrt(a)), a);
                assert!(f.trace(a) <= 1);
            }
        }
    }

    #[test]
    fn trace_is_balanced() {
        for k in 1..=8 {
            let f = Gf2k::get(k);
            let zeros = f.enumerate().filter(|&x| f.trace(x) == 0).count();
            assert_eq!(zeros as u32, f.order() / 2);
        }
    }

    #[test]
    fn roots_of_places() {
        for d in 1..=MAX_EXTENSION_DEGREE {
            let field = Gf2k::get(d);
            for pi in factor::irreducibles(d).into_iter().step_by(7) {
                let theta = root_of_irreducible(pi).unwrap();
                assert_eq!(field.eval_poly(pi, theta), 0);
            }
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        let reducible = FieldSpec { k: 2, modulus: BitPoly::from_bits(0b101) };
        assert!(matches!(Gf2k::new(reducible), Err(ArithError::ReducibleModulus(_))));
        // 1 + u + u^2 + u^3 + u^4 is irreducible but u has order 5.
        let nonprim = FieldSpec { k: 4, modulus: BitPoly::from_bits(0b11111) };
        assert!(matches!(Gf2k::new(nonprim), Err(ArithError::NonPrimitiveModulus(_))));
    }
}
