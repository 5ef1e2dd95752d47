//! Configurations of (−2)-curves, Kodaira dual graphs, and height pairings.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tate::{FiberConfiguration, KodairaSymbol};

pub type Rational = Ratio<i64>;

/// Picard number of a rational elliptic or Enriques surface.
pub const PICARD_RANK: u32 = 10;
/// Largest graph accepted by [`canonical_type_subcurves`].
pub const MAX_CANONICAL_SEARCH_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("edge {0}-{1} is a loop")]
    Loop(usize, usize),
    #[error("edge label must be positive")]
    ZeroLabel,
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("{symbol} has {count} simple components, index {index} is out of range")]
    ComponentIndex { symbol: KodairaSymbol, index: usize, count: usize },
    #[error("graph has {0} vertices; the canonical-type search handles at most 16")]
    TooLarge(usize),
    #[error("trivial lattice '{0}' is not embedded")]
    NotEmbedded(String),
    #[error("bad lattice name '{0}'")]
    BadLatticeName(String),
    #[error("determinant overflow")]
    Overflow,
}

/// Graph of (−2)-curves: vertices are components, edge labels are
/// intersection numbers. Parallel edges add up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize, u32)>,
}

impl DualGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize, u32)>) -> Result<DualGraph, LatticeError> {
        for &(u, v, label) in &edges {
            if u == v {
                return Err(LatticeError::Loop(u, v));
            }
            if label == 0 {
                return Err(LatticeError::ZeroLabel);
            }
            for w in [u, v] {
                if w >= vertices.len() {
                    return Err(LatticeError::UnknownVertex(w.to_string()));
                }
            }
        }
        Ok(DualGraph { vertices, edges })
    }

    /// Builds a graph from vertex names and named edges.
    pub fn from_named(vertices: &[&str], edges: &[(&str, &str, u32)]) -> Result<DualGraph, LatticeError> {
        let index = |n: &str| vertices.iter().position(|v| *v == n).ok_or_else(|| LatticeError::UnknownVertex(n.into()));
        let edges = edges.iter().map(|&(u, v, l)| Ok((index(u)?, index(v)?, l))).collect::<Result<Vec<_>, _>>()?;
        DualGraph::new(vertices.iter().map(|s| s.to_string()).collect(), edges)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// −2 on the diagonal, summed edge labels off it.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = -2;
        }
        for &(u, v, l) in &self.edges {
            m[u][v] += l as i64;
            m[v][u] += l as i64;
        }
        m
    }

    /// The induced subgraph on `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> DualGraph {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v, l)| Some((*pos.get(&u)?, *pos.get(&v)?, l)))
            .collect();
        DualGraph { vertices: keep.iter().map(|&v| self.vertices[v].clone()).collect(), edges }
    }

    /// Graph with the named vertex removed.
    pub fn without(&self, name: &str) -> Result<DualGraph, LatticeError> {
        let gone = self.vertices.iter().position(|v| v == name).ok_or_else(|| LatticeError::UnknownVertex(name.into()))?;
        let keep: Vec<usize> = (0..self.len()).filter(|&v| v != gone).collect();
        Ok(self.induced(&keep))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Index(usize),
    Name(String),
}

#[derive(Deserialize)]
struct RawGraph {
    vertices: Vec<String>,
    edges: Vec<(Endpoint, Endpoint, u32)>,
}

impl<'de> Deserialize<'de> for DualGraph {
    /// `{"vertices": [names], "edges": [[u, v, label]]}` with endpoints given
    /// by name or by index.
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawGraph::deserialize(d)?;
        let resolve = |e: &Endpoint| match e {
            Endpoint::Index(i) => Ok(*i),
            Endpoint::Name(n) => raw.vertices.iter().position(|v| v == n).ok_or_else(|| LatticeError::UnknownVertex(n.clone())),
        };
        let edges = raw
            .edges
            .iter()
            .map(|(u, v, l)| Ok((resolve(u)?, resolve(v)?, *l)))
            .collect::<Result<Vec<_>, LatticeError>>()
            .map_err(de::Error::custom)?;
        DualGraph::new(raw.vertices.clone(), edges).map_err(de::Error::custom)
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i64>]) -> Result<i128, LatticeError> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return Ok(0) };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .zip(a[i][k].checked_mul(a[k][j]))
                    .and_then(|(x, y)| x.checked_sub(y))
                    .ok_or(LatticeError::Overflow)?;
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

pub fn gram_det(g: &DualGraph) -> Result<i128, LatticeError> {
    determinant(&g.intersection_matrix())
}

/// Kernel of an integer matrix over Q, as primitive integer vectors.
fn kernel(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Ratio<i128>>> = m.iter().map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&i| a[i][col] != Ratio::from_integer(0)) else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != row && a[i][col] != Ratio::from_integer(0) {
                let f = a[i][col];
                for j in 0..cols {
                    let d = f * a[row][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Ratio::from_integer(0i128); cols];
            v[f] = Ratio::from_integer(1);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f];
            }
            let lcm = v.iter().fold(1i128, |l, x| l.lcm(x.denom()));
            let ints: Vec<i128> = v.iter().map(|x| (x * lcm).to_integer()).collect();
            let g = ints.iter().fold(0i128, |g, &x| g.gcd(&x));
            ints.iter().map(|&x| (x / g) as i64).collect()
        })
        .collect()
}

/// Dual graph and multiplicities of a Kodaira fiber. Vertex 0 is the
/// component meeting the zero section; the simple components are listed in
/// the order used by [`local_contribution`].
pub fn kodaira_graph(s: KodairaSymbol) -> (DualGraph, Vec<u32>) {
    let named = |n: usize| (0..n).map(|i| format!("C{i}")).collect::<Vec<_>>();
    let chain = |range: std::ops::Range<usize>| range.clone().zip(range.skip(1)).map(|(u, v)| (u, v, 1)).collect::<Vec<_>>();
    let (n, edges, mult): (usize, Vec<(usize, usize, u32)>, Vec<u32>) = match s {
        KodairaSymbol::I(0) | KodairaSymbol::I(1) | KodairaSymbol::II => (1, vec![], vec![1]),
        KodairaSymbol::I(2) | KodairaSymbol::III => (2, vec![(0, 1, 2)], vec![1, 1]),
        KodairaSymbol::IV => (3, vec![(0, 1, 1), (1, 2, 1), (2, 0, 1)], vec![1, 1, 1]),
        KodairaSymbol::I(k) => {
            let k = k as usize;
            let mut e = chain(0..k);
            e.push((k - 1, 0, 1));
            (k, e, vec![1; k])
        }
        KodairaSymbol::IStar(k) => {
            // C0, C1 near; C2, C3 far; chain C4..C(k+4) of double components.
            let k = k as usize;
            let first = 4;
            let last = k + 4;
            let mut e = chain(first..last + 1);
            e.extend([(0, first, 1), (1, first, 1), (2, last, 1), (3, last, 1)]);
            let mut m = vec![1, 1, 1, 1];
            m.extend(vec![2; k + 1]);
            (k + 5, e, m)
        }
        KodairaSymbol::IVStar => {
            // Simple ends C0, C1, C2; their neighbours C3, C4, C5; centre C6.
            let e = vec![(0, 3, 1), (1, 4, 1), (2, 5, 1), (3, 6, 1), (4, 6, 1), (5, 6, 1)];
            (7, e, vec![1, 1, 1, 2, 2, 2, 3])
        }
        KodairaSymbol::IIIStar => {
            // Simple ends C0, C1; chain C0-C2-C3-C4-C5-C6-C1 with C7 on the centre C4.
            let e = vec![(0, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 6, 1), (6, 1, 1), (4, 7, 1)];
            (8, e, vec![1, 1, 2, 3, 4, 3, 2, 2])
        }
        KodairaSymbol::IIStar => {
            // C0-C1-…-C7 with multiplicities 1..6, 4, 2 and C8 (3) on C6.
            let e = vec![(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 6, 1), (6, 7, 1), (5, 8, 1)];
            (9, e, vec![1, 2, 3, 4, 5, 6, 4, 2, 3])
        }
    };
    (DualGraph::new(named(n), edges).expect("catalogue graphs are valid"), mult)
}

/// Kodaira type of a connected fiber-type configuration from its size and
/// largest multiplicity. Graphs shared by two types (I2/III, I3/IV) are
/// reported as I_n.
fn identify(vertices: usize, max_mult: u32) -> Option<KodairaSymbol> {
    match max_mult {
        1 => Some(KodairaSymbol::I(vertices as u32)),
        2 if vertices >= 5 => Some(KodairaSymbol::IStar(vertices as u32 - 5)),
        3 if vertices == 7 => Some(KodairaSymbol::IVStar),
        4 if vertices == 8 => Some(KodairaSymbol::IIIStar),
        6 if vertices == 9 => Some(KodairaSymbol::IIStar),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalSubcurve {
    pub vertices: Vec<String>,
    pub multiplicities: Vec<u32>,
    pub symbol: Option<KodairaSymbol>,
}

fn connected(g: &DualGraph, mask: u32) -> bool {
    let start = mask.trailing_zeros() as usize;
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &(a, b, _) in &g.edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == u && mask >> y & 1 == 1 && seen >> y & 1 == 0 {
                    seen |= 1 << y;
                    stack.push(y);
                }
            }
        }
    }
    seen == mask
}

/// Connected vertex subsets supporting a curve of canonical type: the
/// restricted form has a one-dimensional radical spanned by a positive
/// vector (which makes it negative semidefinite).
pub fn canonical_type_subcurves(g: &DualGraph) -> Result<Vec<CanonicalSubcurve>, LatticeError> {
    let n = g.len();
    if n > MAX_CANONICAL_SEARCH_VERTICES {
        return Err(LatticeError::TooLarge(n));
    }
    let full = g.intersection_matrix();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if !connected(g, mask) {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let sub: Vec<Vec<i64>> = keep.iter().map(|&i| keep.iter().map(|&j| full[i][j]).collect()).collect();
        let ker = kernel(&sub);
        let [v] = ker.as_slice() else { continue };
        let sign = v[0].signum();
        if sign == 0 || v.iter().any(|x| x.signum() != sign) {
            continue;
        }
        let mult: Vec<u32> = v.iter().map(|x| x.unsigned_abs() as u32).collect();
        let max = *mult.iter().max().unwrap();
        out.push(CanonicalSubcurve {
            vertices: keep.iter().map(|&i| g.vertices[i].clone()).collect(),
            multiplicities: mult,
            symbol: identify(keep.len(), max),
        });
    }
    Ok(out)
}

/// Contributions of the simple components, identity first.
pub fn contributions(s: KodairaSymbol) -> Vec<Rational> {
    let r = Rational::new;
    match s {
        KodairaSymbol::I(0) | KodairaSymbol::I(1) | KodairaSymbol::II | KodairaSymbol::IIStar => vec![r(0, 1)],
        KodairaSymbol::I(n) => (0..n as i64).map(|i| r(i * (n as i64 - i), n as i64)).collect(),
        KodairaSymbol::IStar(n) => {
            let far = r(n as i64 + 4, 4);
            vec![r(0, 1), r(1, 1), far, far]
        }
        KodairaSymbol::III => vec![r(0, 1), r(1, 2)],
        KodairaSymbol::IV => vec![r(0, 1), r(2, 3), r(2, 3)],
        KodairaSymbol::IVStar => vec![r(0, 1), r(4, 3), r(4, 3)],
        KodairaSymbol::IIIStar => vec![r(0, 1), r(3, 2)],
    }
}

/// Local height correction for a section meeting simple component `index`
/// (0 = identity component).
pub fn local_contribution(s: KodairaSymbol, index: usize) -> Result<Rational, LatticeError> {
    let all = contributions(s);
    all.get(index).copied().ok_or(LatticeError::ComponentIndex { symbol: s, index, count: all.len() })
}

/// Distinct contribution values, ascending.
pub fn contribution_set(s: KodairaSymbol) -> Vec<Rational> {
    let mut v = contributions(s);
    v.sort();
    v.dedup();
    v
}

/// ⟨P,P⟩ = 2 + 2(P·O) − Σ contr, solved for (P·O) and the contributions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProblem {
    pub target: Rational,
    pub fibers: Vec<(KodairaSymbol, Vec<Rational>)>,
    /// Candidate values of (P·O).
    pub po_range: std::ops::RangeInclusive<u32>,
    /// Contribution tuples ruled out by other arguments.
    pub excluded: Vec<Vec<Rational>>,
}

impl HeightProblem {
    /// Problem with every contribution allowed and (P·O) in 0..=`max_po`.
    pub fn new(target: Rational, symbols: &[KodairaSymbol], max_po: u32) -> HeightProblem {
        HeightProblem {
            target,
            fibers: symbols.iter().map(|&s| (s, contribution_set(s))).collect(),
            po_range: 0..=max_po,
            excluded: Vec::new(),
        }
    }

    pub fn excluding(mut self, tuple: Vec<Rational>) -> HeightProblem {
        self.excluded.push(tuple);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HeightSolution {
    pub po: u32,
    pub contributions: Vec<Rational>,
}

impl fmt::Display for HeightSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.contributions.iter().map(|x| x.to_string()).collect();
        write!(f, "(P.O)={} contr=({})", self.po, c.join(", "))
    }
}

/// All solutions, found by depth-first search with bounds on the remaining sum.
pub fn height_solve(p: &HeightProblem) -> Vec<HeightSolution> {
    let sets: Vec<Vec<Rational>> = p.fibers.iter().map(|(_, s)| s.clone()).collect();
    // suffix_min[i], suffix_max[i]: range of Σ over fibers i..
    let mut suffix_min = vec![Rational::from_integer(0); sets.len() + 1];
    let mut suffix_max = suffix_min.clone();
    for i in (0..sets.len()).rev() {
        let lo = sets[i].iter().min().copied();
        let hi = sets[i].iter().max().copied();
        let (Some(lo), Some(hi)) = (lo, hi) else { return Vec::new() };
        suffix_min[i] = suffix_min[i + 1] + lo;
        suffix_max[i] = suffix_max[i + 1] + hi;
    }
    let mut out = Vec::new();
    for po in p.po_range.clone() {
        let need = Rational::from_integer(2 + 2 * po as i64) - p.target;
        if need < suffix_min[0] || need > suffix_max[0] {
            continue;
        }
        let mut chosen = Vec::new();
        search(&sets, &suffix_min, &suffix_max, need, &mut chosen, &mut |c| {
            if !p.excluded.iter().any(|e| e == c) {
                out.push(HeightSolution { po, contributions: c.to_vec() });
            }
        });
    }
    out.sort();
    out
}

fn search(
    sets: &[Vec<Rational>],
    lo: &[Rational],
    hi: &[Rational],
    need: Rational,
    chosen: &mut Vec<Rational>,
    emit: &mut dyn FnMut(&[Rational]),
) {
    let i = chosen.len();
    if i == sets.len() {
        if need == Rational::from_integer(0) {
            emit(chosen);
        }
        return;
    }
    for &c in &sets[i] {
        let rest = need - c;
        if rest < lo[i + 1] || rest > hi[i + 1] {
            continue;
        }
        chosen.push(c);
        search(sets, lo, hi, rest, chosen, emit);
        chosen.pop();
    }
}

/// rank + 2 + Σ deg·(components − 1) = 10 over the given fibers.
pub fn shioda_tate_holds(fibers: &[(KodairaSymbol, u32)], mw_rank: u32) -> bool {
    let vertical: u32 = fibers.iter().map(|&(s, deg)| deg * (s.component_count() - 1)).sum();
    mw_rank + 2 + vertical == PICARD_RANK
}

pub fn shioda_tate_check(config: &FiberConfiguration, mw_rank: u32) -> bool {
    let fibers: Vec<(KodairaSymbol, u32)> = config.reductions.iter().map(|r| (r.symbol, r.place.degree())).collect();
    shioda_tate_holds(&fibers, mw_rank)
}

/// Root lattice of a reducible fiber, e.g. `D5`; `None` for irreducible fibers.
pub fn root_lattice(s: KodairaSymbol) -> Option<String> {
    match s {
        KodairaSymbol::I(n) if n >= 2 => Some(format!("A{}", n - 1)),
        KodairaSymbol::IStar(n) => Some(format!("D{}", n + 4)),
        KodairaSymbol::III => Some("A1".into()),
        KodairaSymbol::IV => Some("A2".into()),
        KodairaSymbol::IVStar => Some("E6".into()),
        KodairaSymbol::IIIStar => Some("E7".into()),
        KodairaSymbol::IIStar => Some("E8".into()),
        _ => None,
    }
}

/// Sum of the root lattices of the geometric fibers, in normal form.
pub fn trivial_lattice(fibers: &[(KodairaSymbol, u32)]) -> String {
    let mut parts = Vec::new();
    for &(s, deg) in fibers {
        if let Some(r) = root_lattice(s) {
            parts.extend(std::iter::repeat_n(r, deg as usize));
        }
    }
    normalize_parts(parts)
}

fn normalize_parts(mut parts: Vec<String>) -> String {
    parts.sort_by_key(|p| (p.chars().next(), p[1..].parse::<u32>().unwrap_or(0)));
    parts.join("+")
}

/// Accepts `A2+D5`, `A2⊕D5`, `A_2 + D_5` in any order.
fn normalize_lattice_name(name: &str) -> Result<String, LatticeError> {
    let bad = || LatticeError::BadLatticeName(name.into());
    let cleaned: String = name.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
    let parts: Vec<String> = cleaned.split(['+', '⊕']).map(str::to_string).collect();
    for p in &parts {
        let mut chars = p.chars();
        let family = chars.next().ok_or_else(bad)?;
        let rank: u32 = chars.as_str().parse().map_err(|_| bad())?;
        if !"ADE".contains(family) || rank == 0 {
            return Err(bad());
        }
    }
    Ok(normalize_parts(parts))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MWTableRow {
    pub trivial_lattice: String,
    pub mw: &'static str,
}

const MW_ROWS: [(&str, &str); 7] = [
    ("A2+D5", "<1/12>"),
    ("A2+E6", "Z/3"),
    ("A1+E6", "<1/6>"),
    ("A3+D5", "Z/4"),
    ("A1+D6", "A1*+Z/2"),
    ("D7", "<1/4>"),
    ("D8", "Z/2"),
];

/// Mordell–Weil group for the embedded rows of the classification table.
pub fn mw_lookup(trivial_lattice: &str) -> Result<MWTableRow, LatticeError> {
    let key = normalize_lattice_name(trivial_lattice)?;
    MW_ROWS
        .iter()
        .find(|(t, _)| *t == key)
        .map(|&(t, mw)| MWTableRow { trivial_lattice: t.into(), mw })
        .ok_or(LatticeError::NotEmbedded(key))
}

/// The ten-curve configuration of an I4* fiber plus a curve meeting the middle component.
pub fn i4star_plus_r() -> DualGraph {
    DualGraph::from_named(
        &["C0", "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "R"],
        &[
            ("C2", "C3", 1),
            ("C3", "C4", 1),
            ("C4", "C5", 1),
            ("C5", "C6", 1),
            ("C0", "C2", 1),
            ("C1", "C2", 1),
            ("C7", "C6", 1),
            ("C8", "C6", 1),
            ("C4", "R", 1),
        ],
    )
    .expect("valid graph")
}

/// The eleven-curve configuration of an I4* fiber plus C0' and C1'.
pub fn i4star_plus_c0_c0prime() -> DualGraph {
    DualGraph::from_named(
        &["C0", "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C0'", "C1'"],
        &[
            ("C2", "C3", 1),
            ("C3", "C4", 1),
            ("C4", "C5", 1),
            ("C5", "C6", 1),
            ("C0", "C2", 1),
            ("C1", "C2", 1),
            ("C7", "C6", 1),
            ("C8", "C6", 1),
            ("C0", "C0'", 2),
            ("C1'", "C1", 2),
            ("C2", "C0'", 1),
            ("C2", "C1'", 1),
        ],
    )
    .expect("valid graph")
}
