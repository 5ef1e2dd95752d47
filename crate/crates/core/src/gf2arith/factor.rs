use std::sync::OnceLock;

use super::{ArithError, BitPoly};

/// Largest degree for which irreducibles are tabulated on first use.
const TABLE_DEGREE: u32 = 12;

fn table() -> &'static [Vec<BitPoly>] {
    static TABLE: OnceLock<Vec<Vec<BitPoly>>> = OnceLock::new();
    TABLE.get_or_init(|| sieve(TABLE_DEGREE))
}

/// Irreducibles grouped by degree: a degree-`d` polynomial is irreducible iff
/// no irreducible of degree `1..=d/2` divides it.
fn sieve(max_degree: u32) -> Vec<Vec<BitPoly>> {
    let mut by_degree: Vec<Vec<BitPoly>> = vec![Vec::new(); max_degree as usize + 1];
    for d in 1..=max_degree {
        let mut found = Vec::new();
        for low in 0..(1u64 << d) {
            let f = BitPoly::from_bits((1 << d) | low);
            let reducible = by_degree[1..=(d / 2) as usize]
                .iter()
                .flatten()
                .any(|g| f.rem(*g).unwrap().is_zero());
            if !reducible {
                found.push(f);
            }
        }
        by_degree[d as usize] = found;
    }
    by_degree
}

/// All monic irreducible polynomials of exactly degree `d`, in increasing encoding.
pub fn irreducibles(d: u32) -> Vec<BitPoly> {
    if d <= TABLE_DEGREE {
        table()[d as usize].clone()
    } else {
        sieve(d).pop().unwrap()
    }
}

pub fn is_irreducible(f: BitPoly) -> bool {
    let Some(d) = f.degree() else { return false };
    if d == 0 {
        return false;
    }
    if d <= TABLE_DEGREE {
        return table()[d as usize].binary_search(&f).is_ok();
    }
    (1..=d / 2).all(|k| irreducibles(k).iter().all(|g| !f.rem(*g).unwrap().is_zero()))
}

/// Factorization into monic irreducibles with multiplicities, sorted by
/// (degree, encoding). The unit polynomial has the empty factorization.
///
/// Trial division by every irreducible of degree at most `deg f / 2`; the
/// remaining cofactor has no small factor and is therefore irreducible.
pub fn poly_factor(f: BitPoly) -> Result<Vec<(BitPoly, u32)>, ArithError> {
    let n = f.degree().ok_or(ArithError::FactorZero)?;
    let mut rest = f;
    let mut out = Vec::new();
    for d in 1..=n / 2 {
        if rest.deg_i() < 2 * d as i32 {
            break;
        }
        for g in irreducibles(d) {
            let mut m = 0;
            while let Some(q) = rest.exact_div(g) {
                rest = q;
                m += 1;
            }
            if m > 0 {
                out.push((g, m));
            }
        }
    }
    if rest.deg_i() >= 1 {
        out.push((rest, 1));
    }
    out.sort_by_key(|(g, _)| (g.degree(), g.bits()));
    Ok(out)
}
