//! Census records as a JSON collection: export, validated import, lookup by
//! triangulation and simple field queries.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::curvegeom::{find_motif_c, is_nongeneric_triangulation};
use crate::patchwork::PatchworkTable;
use crate::survey::{representative_key, with_jobs, SweepRecord, TopologyClass, SIGN_CLASSES};
use crate::triangulation::{Cell, Triangulation, Violation};
use crate::twist::SignDistribution;

pub const COLLECTION: &str = "tropical_quartics";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ovals {
    /// Sign classes with 1, 2, 3 and 4 ovals, nested pairs excluded.
    #[serde(rename = "COUNT")]
    pub count: [u32; 4],
    #[serde(rename = "SIGNS")]
    pub signs: [Option<Vec<i32>>; 4],
    #[serde(rename = "COUNT_NESTED")]
    pub count_nested: u32,
    #[serde(rename = "SIGNS_NESTED")]
    pub signs_nested: Option<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifEntry {
    pub orientation: usize,
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarticRecord {
    pub id: u64,
    #[serde(rename = "MAXIMAL_CELLS")]
    pub maximal_cells: Vec<Cell>,
    pub orbit_size: usize,
    pub aut_order: usize,
    pub is_nongeneric: bool,
    #[serde(rename = "PLUECKER_NUMBERS")]
    pub pluecker_numbers: Vec<u32>,
    /// One sign vector per entry of `PLUECKER_NUMBERS`.
    #[serde(rename = "SIGN_REPRESENTATIVES")]
    pub sign_representatives: Vec<Vec<i32>>,
    #[serde(rename = "OVALS")]
    pub ovals: Ovals,
    /// Orientations and indices of the shape-(C) motif, when present.
    #[serde(rename = "SHAPE_C", default, skip_serializing_if = "Vec::is_empty")]
    pub shape_c: Vec<MotifEntry>,
}

impl QuarticRecord {
    pub fn from_sweep(id: u64, r: &SweepRecord, is_nongeneric: bool) -> Self {
        let rep_of = |c: TopologyClass| r.representatives[c.index()];
        let rep = |c: TopologyClass| rep_of(c).as_ref().map(SignDistribution::signs);
        let ovals = Ovals {
            count: [
                r.count(TopologyClass::OneOval),
                r.count(TopologyClass::TwoOvals),
                r.count(TopologyClass::ThreeOvals),
                r.count(TopologyClass::FourOvals),
            ],
            signs: [
                rep(TopologyClass::OneOval),
                rep(TopologyClass::TwoOvals),
                rep(TopologyClass::ThreeOvals),
                rep(TopologyClass::FourOvals),
            ],
            count_nested: r.count(TopologyClass::TwoNested),
            signs_nested: rep(TopologyClass::TwoNested),
        };
        let pluecker_numbers = r.bitangent_numbers();
        let sign_representatives = pluecker_numbers
            .iter()
            .map(|&n| {
                TopologyClass::ALL
                    .iter()
                    .filter(|c| c.bitangents() == n)
                    .filter_map(|&c| rep_of(c))
                    .min_by_key(|d| representative_key(d.bits()))
                    .expect("achieved number has a representative")
                    .signs()
            })
            .collect();
        let shape_c = find_motif_c(&r.triangulation)
            .into_iter()
            .map(|m| MotifEntry { orientation: m.orientation.code(), i: m.i, j: m.j, k: m.k })
            .collect();
        Self {
            id,
            maximal_cells: r.triangulation.cells().to_vec(),
            orbit_size: r.orbit_size,
            aut_order: r.aut_order,
            is_nongeneric,
            pluecker_numbers,
            sign_representatives,
            ovals,
            shape_c,
        }
    }

    pub fn triangulation(&self) -> Result<Triangulation, Violation> {
        Triangulation::new(4, self.maximal_cells.iter().copied())
    }

    /// Checks the record invariants, returning the offending field.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let t = self.triangulation().map_err(|e| ("MAXIMAL_CELLS", e.to_string()))?;
        let total: u32 = self.ovals.count.iter().sum::<u32>() + self.ovals.count_nested;
        if total != SIGN_CLASSES {
            return Err(("OVALS.COUNT", format!("counts sum to {total}, expected {SIGN_CLASSES}")));
        }
        if self.pluecker_numbers.iter().any(|n| ![4, 8, 16, 28].contains(n)) {
            return Err(("PLUECKER_NUMBERS", format!("{:?} is not a subset of {{4,8,16,28}}", self.pluecker_numbers)));
        }
        if !self.pluecker_numbers.contains(&28) {
            return Err(("PLUECKER_NUMBERS", "28 is missing".into()));
        }
        if self.sign_representatives.len() != self.pluecker_numbers.len() {
            return Err(("SIGN_REPRESENTATIVES", "one representative per Pluecker number expected".into()));
        }
        let mut achieved: Vec<u32> = [(0, 4), (1, 8), (2, 16), (3, 28)]
            .iter()
            .filter(|(i, _)| self.ovals.count[*i] > 0)
            .map(|&(_, n)| n)
            .chain((self.ovals.count_nested > 0).then_some(4))
            .collect();
        achieved.sort_unstable();
        achieved.dedup();
        if achieved != self.pluecker_numbers {
            return Err(("PLUECKER_NUMBERS", format!("{:?} disagrees with OVALS counts", self.pluecker_numbers)));
        }
        let table = PatchworkTable::new(&t);
        let classes = [
            (TopologyClass::OneOval, self.ovals.count[0], &self.ovals.signs[0], "OVALS.SIGNS"),
            (TopologyClass::TwoOvals, self.ovals.count[1], &self.ovals.signs[1], "OVALS.SIGNS"),
            (TopologyClass::ThreeOvals, self.ovals.count[2], &self.ovals.signs[2], "OVALS.SIGNS"),
            (TopologyClass::FourOvals, self.ovals.count[3], &self.ovals.signs[3], "OVALS.SIGNS"),
            (TopologyClass::TwoNested, self.ovals.count_nested, &self.ovals.signs_nested, "OVALS.SIGNS_NESTED"),
        ];
        for (class, count, signs, field) in classes {
            match (count, signs) {
                (0, None) => {}
                (0, Some(_)) => return Err((field, format!("representative given for empty class {class}"))),
                (_, None) => return Err((field, format!("missing representative for {class}"))),
                (_, Some(s)) => {
                    let d = SignDistribution::from_signs(s).map_err(|e| (field, e.to_string()))?;
                    if d.len() != t.num_points() {
                        return Err((field, format!("sign vector has {} entries", d.len())));
                    }
                    if TopologyClass::of(table.topology(d.bits())) != Some(class) {
                        return Err((field, format!("representative does not realise {class}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Archive {
    pub collection: String,
    pub degree: u32,
    pub records: Vec<QuarticRecord>,
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("cannot read archive: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed archive: {0}")]
    Json(#[from] serde_json::Error),
    #[error("record {id}: field {field}: {message}")]
    Record { id: u64, field: &'static str, message: String },
    #[error("record id {0} appears twice")]
    DuplicateId(u64),
    #[error("records {0} and {1} describe the same triangulation")]
    DuplicateTriangulation(u64, u64),
}

/// Builds the records of a completed census, computing non-genericity in
/// parallel. Ids follow the order of `sweeps`.
pub fn build_records(sweeps: &[SweepRecord], jobs: Option<usize>) -> Vec<QuarticRecord> {
    with_jobs(jobs, || {
        sweeps
            .par_iter()
            .enumerate()
            .map(|(i, r)| QuarticRecord::from_sweep(i as u64, r, is_nongeneric_triangulation(&r.triangulation)))
            .collect()
    })
}

/// Serializes the records, sorted by id, as a pretty-printed JSON document.
pub fn export(records: &[QuarticRecord]) -> String {
    let mut records = records.to_vec();
    records.sort_by_key(|r| r.id);
    let archive = Archive { collection: COLLECTION.into(), degree: 4, records };
    let mut out = serde_json::to_string_pretty(&archive).expect("serializable");
    out.push('\n');
    out
}

pub fn import(text: &str) -> Result<Vec<QuarticRecord>, ImportError> {
    let archive: Archive = serde_json::from_str(text)?;
    let mut seen_ids = HashMap::new();
    let mut seen_t: HashMap<Triangulation, u64> = HashMap::new();
    for r in &archive.records {
        r.validate().map_err(|(field, message)| ImportError::Record { id: r.id, field, message })?;
        if seen_ids.insert(r.id, ()).is_some() {
            return Err(ImportError::DuplicateId(r.id));
        }
        let canon = r.triangulation().expect("validated").canonical_form().triangulation;
        if let Some(other) = seen_t.insert(canon, r.id) {
            return Err(ImportError::DuplicateTriangulation(other, r.id));
        }
    }
    Ok(archive.records)
}

pub fn load(path: &Path) -> Result<Vec<QuarticRecord>, ImportError> {
    import(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FindError {
    #[error("not a valid quartic triangulation: {0}")]
    Invalid(Violation),
    #[error("triangulation has degree {0}, the collection holds quartics")]
    Degree(u32),
    #[error("triangulation not in the collection")]
    NotFound,
}

/// Loaded records indexed by canonical triangulation.
#[derive(Debug, Clone)]
pub struct Database {
    records: Vec<QuarticRecord>,
    by_canonical: HashMap<Triangulation, usize>,
    values: Vec<Value>,
}

impl Database {
    pub fn new(records: Vec<QuarticRecord>) -> Self {
        let by_canonical = records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.triangulation().ok().map(|t| (t.canonical_form().triangulation, i)))
            .collect();
        let values = records.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect();
        Self { records, by_canonical, values }
    }

    pub fn records(&self) -> &[QuarticRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn find(&self, t: &Triangulation) -> Result<&QuarticRecord, FindError> {
        if t.degree() != 4 {
            return Err(FindError::Degree(t.degree()));
        }
        t.validate().map_err(FindError::Invalid)?;
        let canon = t.canonical_form().triangulation;
        self.by_canonical.get(&canon).map(|&i| &self.records[i]).ok_or(FindError::NotFound)
    }

    pub fn count(&self, predicate: &Predicate) -> usize {
        self.count_all(std::slice::from_ref(predicate))
    }

    /// Records satisfying every predicate.
    pub fn count_all(&self, predicates: &[Predicate]) -> usize {
        self.values.iter().filter(|v| predicates.iter().all(|p| p.matches(v))).count()
    }
}

pub fn find_in_database(db: &Database, t: &Triangulation) -> Result<u64, FindError> {
    db.find(t).map(|r| r.id)
}

pub fn query_count(db: &Database, predicate: &Predicate) -> usize {
    db.count(predicate)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Equals,
    Contains,
}

/// A test on one field addressed by a dotted path such as `OVALS.COUNT.3`;
/// numeric segments index arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub path: Vec<String>,
    pub op: Op,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredicateError {
    #[error("expected `PATH=VALUE` or `PATH~VALUE`, got `{0}`")]
    Syntax(String),
}

impl FromStr for Predicate {
    type Err = PredicateError;

    /// `PATH=VALUE` tests equality, `PATH~VALUE` tests array membership.
    /// `VALUE` is JSON, or a bare string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (path, op, value) = match (s.find('='), s.find('~')) {
            (Some(i), _) => (&s[..i], Op::Equals, &s[i + 1..]),
            (None, Some(i)) => (&s[..i], Op::Contains, &s[i + 1..]),
            (None, None) => return Err(PredicateError::Syntax(s.to_string())),
        };
        let path = path.trim();
        if path.is_empty() || path.split('.').any(str::is_empty) {
            return Err(PredicateError::Syntax(s.to_string()));
        }
        let value = value.trim();
        let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        Ok(Predicate { path: path.split('.').map(String::from).collect(), op, value })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.op == Op::Equals { "=" } else { "~" };
        write!(f, "{}{op}{}", self.path.join("."), self.value)
    }
}

impl Predicate {
    pub fn equals(path: &str, value: Value) -> Self {
        Self { path: path.split('.').map(String::from).collect(), op: Op::Equals, value }
    }

    pub fn contains(path: &str, value: Value) -> Self {
        Self { path: path.split('.').map(String::from).collect(), op: Op::Contains, value }
    }

    fn lookup<'a>(&self, mut v: &'a Value) -> Option<&'a Value> {
        for seg in &self.path {
            v = match v {
                Value::Object(map) => map.get(seg)?,
                Value::Array(items) => items.get(seg.parse::<usize>().ok()?)?,
                _ => return None,
            };
        }
        Some(v)
    }

    pub fn matches(&self, record: &Value) -> bool {
        match (self.lookup(record), &self.op) {
            (Some(v), Op::Equals) => *v == self.value,
            (Some(Value::Array(items)), Op::Contains) => items.contains(&self.value),
            _ => false,
        }
    }
}
