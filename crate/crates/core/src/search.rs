//! Exhaustive classification over all 2²¹ bounded Weierstrass equations.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::census::{self, apply_filters, n_value, FilterReport, FilterTag, RationalFiberClass};
use crate::tate::{reduction_summary, FiberConfiguration, TateError};
use crate::text::ParseError;
use crate::weierstrass::{JInvariant, Mobius, RationalPoint, WeierstrassEq, WeierstrassError, SPACE_SIZE};

/// Codes per work unit; blocks are merged in index order.
const BLOCK_SIZE: u32 = 1 << 13;
const CACHE_RECORD_BYTES: usize = 8;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("equation code {code}: {source}")]
    Tate { code: u32, source: TateError },
    #[error("thread pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SearchError + '_ {
    move |source| SearchError::Io { path: path.to_path_buf(), source }
}

/// All equations in ascending code order.
pub fn enumerate_space() -> impl Iterator<Item = WeierstrassEq> {
    (0..SPACE_SIZE).map(|c| WeierstrassEq::from_code(c).expect("code below the space size"))
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub worker_count: usize,
    pub output_path: Option<PathBuf>,
    /// Include every survivor, not only class representatives, in the output.
    pub emit_trace: bool,
    pub cache_path: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { worker_count: 1, output_path: None, emit_trace: false, cache_path: None }
    }
}

/// Per-code screening result, as stored in the cache.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Screen {
    /// Failed filters, bit i for `FilterTag::ALL[i]`.
    pub failures: u8,
    /// Largest component count over all places; 0 when Δ = 0.
    pub worst_fiber: u8,
}

impl Screen {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Filters one equation.
pub fn screen(e: &WeierstrassEq) -> Result<Screen, TateError> {
    match reduction_summary(e) {
        Ok(cfg) => {
            let report = apply_filters(&cfg);
            let worst = cfg.reductions.iter().map(|r| r.r_geom).max().unwrap_or(1);
            Ok(Screen { failures: report.failure_mask(), worst_fiber: worst as u8 })
        }
        Err(TateError::SingularGenericFiber) => Ok(Screen { failures: FilterTag::NonzeroDiscriminant.bit(), worst_fiber: 0 }),
        Err(err) => Err(err),
    }
}

fn screen_block(start: u32) -> Result<Vec<Screen>, SearchError> {
    let end = (start + BLOCK_SIZE).min(SPACE_SIZE);
    (start..end)
        .map(|code| {
            let e = WeierstrassEq::from_code(code).expect("code in range");
            screen(&e).map_err(|source| SearchError::Tate { code, source })
        })
        .collect()
}

/// Screens the whole space with `workers` threads. The result is indexed by code.
pub fn screen_space(workers: usize) -> Result<Vec<Screen>, SearchError> {
    if workers == 0 {
        return Err(SearchError::NoWorkers);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SearchError::Pool(e.to_string()))?;
    let starts: Vec<u32> = (0..SPACE_SIZE).step_by(BLOCK_SIZE as usize).collect();
    let blocks: Vec<Vec<Screen>> = pool.install(|| starts.par_iter().map(|&s| screen_block(s)).collect::<Result<_, _>>())?;
    Ok(blocks.into_iter().flatten().collect())
}

fn encode_cache(screens: &[Screen]) -> Vec<u8> {
    let mut out = Vec::with_capacity(screens.len() * CACHE_RECORD_BYTES);
    for (code, s) in screens.iter().enumerate() {
        out.extend_from_slice(&(code as u32).to_le_bytes());
        out.extend_from_slice(&[s.failures, s.worst_fiber, 0, 0]);
    }
    out
}

/// Decodes a cache file; `None` unless it covers the whole space in order.
fn decode_cache(bytes: &[u8]) -> Option<Vec<Screen>> {
    if bytes.len() != SPACE_SIZE as usize * CACHE_RECORD_BYTES {
        return None;
    }
    bytes
        .chunks_exact(CACHE_RECORD_BYTES)
        .enumerate()
        .map(|(i, rec)| {
            let code = u32::from_le_bytes(rec[..4].try_into().unwrap());
            (code == i as u32 && rec[4] < 1 << FilterTag::ALL.len()).then_some(Screen { failures: rec[4], worst_fiber: rec[5] })
        })
        .collect()
}

/// Screening with an optional on-disk cache: a valid cache is reused, an
/// absent or invalid one is (re)written.
pub fn screen_space_cached(workers: usize, cache: Option<&Path>) -> Result<Vec<Screen>, SearchError> {
    let Some(path) = cache else { return screen_space(workers) };
    if let Ok(bytes) = fs::read(path) {
        if let Some(screens) = decode_cache(&bytes) {
            return Ok(screens);
        }
    }
    let screens = screen_space(workers)?;
    fs::write(path, encode_cache(&screens)).map_err(io_err(path))?;
    Ok(screens)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ExtraFiber {
    pub place: String,
    pub degree: u32,
    pub symbol: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SurvivorRecord {
    pub code: u32,
    pub canonical_code: u32,
    pub equation: String,
    /// Fibers over t = 0, 1, ∞, e.g. `III*+E4+I2`.
    pub fibers: String,
    pub j: String,
    /// Bad fibers over places of degree > 1.
    pub extra_fibers: Vec<ExtraFiber>,
    /// n-values over t = 0, 1, ∞.
    pub n_values: [u32; 3],
    /// Size of the isomorphism class inside the space; set on representatives.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_size: Option<u32>,
}

impl SurvivorRecord {
    fn build(e: &WeierstrassEq, canonical_code: u32, cfg: &FiberConfiguration) -> SurvivorRecord {
        SurvivorRecord {
            code: e.code(),
            canonical_code,
            equation: e.to_string(),
            fibers: cfg.rational_summary(),
            j: e.j_invariant().expect("Δ ≠ 0").to_string(),
            extra_fibers: cfg
                .nonrational_bad()
                .filter(|r| r.v_delta > 0)
                .map(|r| ExtraFiber { place: r.place.to_string(), degree: r.place.degree(), symbol: r.label() })
                .collect(),
            n_values: RationalPoint::ALL.map(|p| n_value(RationalFiberClass::of(cfg, p))),
            orbit_size: None,
        }
    }

    pub fn fiber_labels(&self) -> Vec<&str> {
        self.fibers.split('+').collect()
    }

    pub fn j_invariant(&self) -> JInvariant {
        self.j.parse().expect("j text written by this module")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationMeta {
    pub space_size: u32,
    pub survivor_count: usize,
    pub class_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub meta: ClassificationMeta,
    /// One record per isomorphism class, ordered by canonical code.
    pub classes: Vec<SurvivorRecord>,
    /// Every survivor in code order; emitted only with tracing.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub survivors: Vec<SurvivorRecord>,
    /// Survivor set is a union of full group orbits.
    #[serde(skip)]
    pub orbit_closed: bool,
}

impl Classification {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Table layout: equation, fibers over t = 0, 1, ∞, j.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("equation,t=0,t=1,t=inf,j\n");
        for c in &self.classes {
            let f = c.fiber_labels();
            out.push_str(&format!("\"{}\",{},{},{},\"{}\"\n", c.equation, f[0], f[1], f[2], c.j));
        }
        out
    }
}

/// Groups survivor codes into orbits. Scanning in ascending order, the first
/// unseen survivor is the least code of its orbit when the set is closed.
fn group_orbits(survivors: &[u32]) -> (Vec<(u32, u32)>, Vec<u32>, bool) {
    let set: HashSet<u32> = survivors.iter().copied().collect();
    let mut canonical = vec![u32::MAX; survivors.len()];
    let index = |code: u32| survivors.binary_search(&code).ok();
    let mut classes = Vec::new();
    let mut closed = true;
    for i in 0..survivors.len() {
        if canonical[i] != u32::MAX {
            continue;
        }
        let rep = survivors[i];
        let orbit: HashSet<u32> = WeierstrassEq::from_code(rep).unwrap().orbit_codes().collect();
        let mut least = rep;
        for &code in &orbit {
            match index(code) {
                Some(j) => canonical[j] = rep,
                None => closed = false,
            }
            least = least.min(code);
        }
        closed &= least == rep && orbit.iter().all(|c| set.contains(c));
        classes.push((rep, orbit.len() as u32));
    }
    (classes, canonical, closed)
}

/// Screens the space, groups survivors into isomorphism classes, and writes
/// the JSON report when an output path is configured.
pub fn run_classification(cfg: &SearchConfig) -> Result<Classification, SearchError> {
    let screens = screen_space_cached(cfg.worker_count, cfg.cache_path.as_deref())?;
    classify_screens(&screens, cfg)
}

pub fn classify_screens(screens: &[Screen], cfg: &SearchConfig) -> Result<Classification, SearchError> {
    let survivors: Vec<u32> = (0..screens.len() as u32).filter(|&c| screens[c as usize].passed()).collect();
    let (classes, canonical, orbit_closed) = group_orbits(&survivors);
    let record = |code: u32, canon: u32| -> Result<SurvivorRecord, SearchError> {
        let e = WeierstrassEq::from_code(code).expect("code in range");
        let summary = reduction_summary(&e).map_err(|source| SearchError::Tate { code, source })?;
        Ok(SurvivorRecord::build(&e, canon, &summary))
    };
    let class_records = classes
        .iter()
        .map(|&(rep, size)| record(rep, rep).map(|r| SurvivorRecord { orbit_size: Some(size), ..r }))
        .collect::<Result<Vec<_>, _>>()?;
    let survivor_records = if cfg.emit_trace {
        survivors.iter().zip(&canonical).map(|(&c, &k)| record(c, k)).collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let out = Classification {
        meta: ClassificationMeta { space_size: screens.len() as u32, survivor_count: survivors.len(), class_count: class_records.len() },
        classes: class_records,
        survivors: survivor_records,
        orbit_closed,
    };
    if let Some(path) = &cfg.output_path {
        let mut f = fs::File::create(path).map_err(io_err(path))?;
        f.write_all(out.to_json().as_bytes()).and_then(|_| f.write_all(b"\n")).map_err(io_err(path))?;
    }
    Ok(out)
}

/// One row of the classification tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenRow {
    pub equation: String,
    pub fibers: String,
    pub j: String,
}

const GOLDEN: [(&str, &str, &str); 11] = [
    ("y^2+txy+t^2y=x^3+tx^2+t^4x+t^5(1+t)", "I1*+E4+I4", "t^4"),
    ("y^2+txy=x^3+t^3x+t^5(1+t)", "III*+E4+E4", "t^2/(t^2+t+1)"),
    ("y^2+txy=x^3+t^3x", "III*+E4+I2", "t^2"),
    ("y^2+txy=x^3+t^2x^2+t^3x", "III*+E2+I~2", "t^2"),
    ("y^2+txy=x^3+t^5", "II*+E4+I1", "t"),
    ("y^2+txy=x^3+t^2x^2+t^5", "II*+E2+I~1", "t"),
    ("y^2+txy=x^3+tx^2+t^4", "I4*+E4+E2", "1"),
    ("y^2+txy=x^3+tx^2+tx", "III+E4+I8", "t^8"),
    ("y^2+t^2y=x^3+tx^2", "I1*+E5+IV", "0"),
    ("y^2+t^2y=x^3+t^3x+t^5", "IV*+E5+III", "0"),
    ("y^2+t^2y=x^3", "IV*+E3+IV", "0"),
];

/// The eleven reference rows: equation as listed, fibers over t = 0, 1, ∞, j.
pub fn golden_rows() -> Vec<GoldenRow> {
    GOLDEN.iter().map(|&(e, f, j)| GoldenRow { equation: e.into(), fibers: f.into(), j: j.into() }).collect()
}

/// Does the class match the row after relabeling {0, 1, ∞} by some Möbius map?
/// The fiber of the class at p must be the row's fiber at M(p), with j = j_row ∘ M.
pub fn matches_row(class: &SurvivorRecord, row: &GoldenRow) -> bool {
    let Ok(row_j) = row.j.parse::<JInvariant>() else { return false };
    let row_fibers: Vec<&str> = row.fibers.split('+').collect();
    if row_fibers.len() != 3 {
        return false;
    }
    let labels = class.fiber_labels();
    let class_j = class.j_invariant();
    let slot = |p: RationalPoint| RationalPoint::ALL.iter().position(|&q| q == p).unwrap();
    Mobius::all().into_iter().any(|m| {
        RationalPoint::ALL.iter().all(|&p| labels[slot(p)] == row_fibers[slot(m.map_point(p))])
            && class_j == row_j.substitute(m)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RowMatch {
    pub row: usize,
    pub canonical_code: u32,
    /// The listed equation of the row lies in the matched class.
    pub equation_in_class: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenReport {
    pub matches: Vec<RowMatch>,
    /// Rows matching no class or several classes.
    pub unmatched_rows: Vec<usize>,
    /// Classes matching no row or several rows.
    pub unmatched_classes: Vec<u32>,
}

impl GoldenReport {
    /// The matching is a bijection.
    pub fn is_bijection(&self) -> bool {
        self.unmatched_rows.is_empty() && self.unmatched_classes.is_empty()
    }
}

fn canonical_code_of(text: &str) -> Option<u32> {
    let e: WeierstrassEq = text.parse().ok()?;
    Some(e.canonical_form().code())
}

/// Matches computed classes against table rows.
pub fn verify_against_golden(classes: &[SurvivorRecord], rows: &[GoldenRow]) -> GoldenReport {
    let hits: Vec<Vec<usize>> = rows.iter().map(|row| (0..classes.len()).filter(|&c| matches_row(&classes[c], row)).collect()).collect();
    let mut matches = Vec::new();
    let mut unmatched_rows = Vec::new();
    for (i, h) in hits.iter().enumerate() {
        match h.as_slice() {
            [c] => matches.push(RowMatch {
                row: i,
                canonical_code: classes[*c].canonical_code,
                equation_in_class: canonical_code_of(&rows[i].equation) == Some(classes[*c].canonical_code),
            }),
            _ => unmatched_rows.push(i),
        }
    }
    let unmatched_classes = (0..classes.len())
        .filter(|&c| hits.iter().filter(|h| h.contains(&c)).count() != 1)
        .map(|c| classes[c].canonical_code)
        .collect();
    GoldenReport { matches, unmatched_rows, unmatched_classes }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberCensus {
    pub place: String,
    pub fiber: String,
    pub n: u32,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Analysis {
    /// Δ = 0.
    Singular { code: u32, equation: String },
    Analyzed {
        code: u32,
        equation: String,
        discriminant: String,
        j: String,
        fibers: String,
        places: Vec<crate::tate::LocalReduction>,
        census: Vec<FiberCensus>,
        point_sum: u32,
        filters: FilterReport,
    },
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Equation(WeierstrassError),
    #[error(transparent)]
    Tate(#[from] TateError),
}

/// Full report for one equation given as text.
pub fn analyze_one(text: &str) -> Result<Analysis, AnalyzeError> {
    let e: WeierstrassEq = text.parse().map_err(|err| match err {
        WeierstrassError::Parse(p) => AnalyzeError::Parse(p),
        other => AnalyzeError::Equation(other),
    })?;
    let config = match reduction_summary(&e) {
        Ok(c) => c,
        Err(TateError::SingularGenericFiber) => return Ok(Analysis::Singular { code: e.code(), equation: e.to_string() }),
        Err(err) => return Err(err.into()),
    };
    let census = RationalPoint::ALL
        .iter()
        .map(|&p| FiberCensus { place: p.to_string(), fiber: config.fiber_label(p), n: n_value(RationalFiberClass::of(&config, p)) })
        .collect();
    Ok(Analysis::Analyzed {
        code: e.code(),
        equation: e.to_string(),
        discriminant: config.discriminant.to_string(),
        j: e.j_invariant().expect("Δ ≠ 0").to_string(),
        fibers: config.rational_summary(),
        places: config.reductions.clone(),
        census,
        point_sum: census::total_points(&config).expect("rational places present"),
        filters: apply_filters(&config),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(text: &str) -> SurvivorRecord {
        let e: WeierstrassEq = text.parse().unwrap();
        let cfg = reduction_summary(&e).unwrap();
        SurvivorRecord::build(&e, e.canonical_form().code(), &cfg)
    }

    #[test]
    fn space_enumeration() {
        let mut it = enumerate_space();
        assert_eq!(it.next().unwrap().coeffs(), [crate::BitPoly::ZERO; 5]);
        assert_eq!(enumerate_space().count(), 2_097_152);
    }

    #[test]
    fn screen_examples() {
        let pass = screen(&"y^2+txy=x^3+t^5".parse().unwrap()).unwrap();
        assert!(pass.passed());
        assert_eq!(pass.worst_fiber, 9);
        let sing = screen(&WeierstrassEq::from_code(0).unwrap()).unwrap();
        assert_eq!(sing, Screen { failures: 1, worst_fiber: 0 });
    }

    #[test]
    fn cache_round_trip_and_rejection() {
        let screens: Vec<Screen> = (0..SPACE_SIZE).map(|c| Screen { failures: (c % 128) as u8, worst_fiber: (c % 10) as u8 }).collect();
        let bytes = encode_cache(&screens);
        assert_eq!(bytes.len(), 8 * SPACE_SIZE as usize);
        assert_eq!(decode_cache(&bytes).unwrap(), screens);
        let mut bad = bytes.clone();
        bad[8] = 7;
        assert!(decode_cache(&bad).is_none());
        assert!(decode_cache(&bytes[..16]).is_none());
    }

    #[test]
    fn golden_row_matching_up_to_relabeling() {
        let rows = golden_rows();
        let r = record("y^2+txy=x^3+t^5");
        assert!(matches_row(&r, &rows[4]));
        assert!(!matches_row(&r, &rows[5]));
        // Moving the fibers around the line keeps the match.
        for m in Mobius::all() {
            let e: WeierstrassEq = "y^2+txy=x^3+t^3x+t^5(1+t)".parse().unwrap();
            let moved = e.mobius(m);
            let cfg = reduction_summary(&moved).unwrap();
            let rec = SurvivorRecord::build(&moved, 0, &cfg);
            assert!(matches_row(&rec, &rows[1]), "{m:?}: {} j={}", rec.fibers, rec.j);
            assert_eq!(rec.extra_fibers.len(), 1);
        }
    }

    #[test]
    fn j_must_move_with_the_fibers() {
        // Same fibers, j transported by the wrong map: no match.
        let rows = golden_rows();
        let mut r = record("y^2+txy=x^3+t^5");
        r.j = "1+t".into();
        assert!(!matches_row(&r, &rows[4]));
    }

    #[test]
    fn analysis_outcomes() {
        match analyze_one("y^2+txy+ty=x^3+tx^2+tx").unwrap() {
            Analysis::Analyzed { fibers, filters, point_sum, .. } => {
                assert_eq!(fibers, "III+E4+I8");
                assert!(filters.passed);
                assert_eq!(point_sum, 25);
            }
            other => panic!("{other:?}"),
        }
        match analyze_one("y^2+y=x^3").unwrap() {
            Analysis::Analyzed { discriminant, filters, .. } => {
                assert_eq!(discriminant, "1");
                assert!(filters.failures.contains(&FilterTag::SumPoints25));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(analyze_one("y^2=x^3").unwrap(), Analysis::Singular { code: 0, .. }));
        assert!(matches!(analyze_one("y^2=x^3+q"), Err(AnalyzeError::Parse(_))));
        assert!(matches!(analyze_one("y^2=x^3+t^7"), Err(AnalyzeError::Equation(_))));
    }

    #[test]
    fn analysis_json_has_place_records() {
        let a = analyze_one("y^2+txy=x^3+t^2x^2+t^3x").unwrap();
        let v = serde_json::to_value(&a).unwrap();
        assert_eq!(v["outcome"], "analyzed");
        let places = v["places"].as_array().unwrap();
        let inf = places.iter().find(|p| p["place"] == "t=inf").unwrap();
        assert_eq!(inf["symbol"], "I~2");
        assert_eq!(inf["split"], false);
        assert_eq!(v["j"], "t^2");
    }
}
