//! Real lifting of the bitangent class of shape (C).
//!
//! For generic curves the class lifts according to a closed sign formula in
//! the motif indices. For triangulations where no dual curve is generic, the
//! lifting is recovered by subtracting the real bitangents of the other six
//! classes (given as external sign conditions) from the count forced by the
//! real topology.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvegeom::{find_motif_c, is_nongeneric_triangulation, MotifC};
use crate::lattice::{PointIndex, S3Element};
use crate::patchwork::{real_bitangent_count, PatchworkTable};
use crate::triangulation::{Cell, Triangulation, Violation};
use crate::twist::SignDistribution;

/// Whether the shape-(C) class of a generic curve lifts to four real
/// bitangents:
/// `(−δ₁₁)^{i+j} δ₁₂^i δ₂₁^j δ₀ᵢ δⱼ₀ > 0` and
/// `(−δ₂₁)^{k+j} δ₁₂^k δ₁₁^j δ_{k,4−k} δⱼ₀ > 0`, read through the motif's
/// orientation.
pub fn shape_c_lifts(delta: &SignDistribution, m: &MotifC) -> bool {
    let s = |x: u32, y: u32| delta.sign(m.point(x, y));
    let pow = |base: i32, e: u32| base.pow(e);
    let (i, j, k) = (m.i, m.j, m.k);
    let first = pow(-s(1, 1), i + j) * pow(s(1, 2), i) * pow(s(2, 1), j) * s(0, i) * s(j, 0);
    let second = pow(-s(2, 1), k + j) * pow(s(1, 2), k) * pow(s(1, 1), j) * s(k, 4 - k) * s(j, 0);
    first > 0 && second > 0
}

/// A conjunction of sign products: holds iff the product of `δ` over every
/// listed set is `+1`. `never` marks a class that does not lift at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignCondition {
    sets: Vec<Vec<PointIndex>>,
    never: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("index set {0:?} has odd size, so the condition would depend on the global sign")]
    OddSet(Vec<PointIndex>),
    #[error("index {index} out of range for {len} lattice points")]
    Index { index: PointIndex, len: usize },
}

impl SignCondition {
    pub fn new(sets: Vec<Vec<PointIndex>>) -> Result<Self, ConditionError> {
        if let Some(s) = sets.iter().find(|s| s.len() % 2 == 1) {
            return Err(ConditionError::OddSet(s.clone()));
        }
        Ok(Self { sets, never: false })
    }

    pub fn always() -> Self {
        Self { sets: Vec::new(), never: false }
    }

    pub fn never() -> Self {
        Self { sets: Vec::new(), never: true }
    }

    pub fn sets(&self) -> &[Vec<PointIndex>] {
        &self.sets
    }

    pub fn is_never(&self) -> bool {
        self.never
    }

    fn check_range(&self, len: usize) -> Result<(), ConditionError> {
        match self.sets.iter().flatten().find(|&&i| i >= len) {
            Some(&index) => Err(ConditionError::Index { index, len }),
            None => Ok(()),
        }
    }

    fn relabeled(&self, map: &[PointIndex]) -> Self {
        Self { sets: self.sets.iter().map(|s| s.iter().map(|&i| map[i]).collect()).collect(), never: self.never }
    }

    /// Packed form: one mask per set; the condition holds iff every masked
    /// popcount of the negative-sign bits is even.
    fn masks(&self) -> Vec<u32> {
        self.sets
            .iter()
            .map(|s| s.iter().fold(0u32, |m, &i| m ^ (1 << i)))
            .collect()
    }
}

pub fn evaluate_condition(c: &SignCondition, delta: &SignDistribution) -> bool {
    !c.never && c.sets.iter().all(|s| s.iter().map(|&i| delta.sign(i)).product::<i32>() > 0)
}

impl fmt::Display for SignCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.never {
            return f.write_str("never");
        }
        let parts: Vec<String> = self
            .sets
            .iter()
            .map(|s| format!("{{{}}}", s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")))
            .collect();
        if parts.is_empty() {
            f.write_str("{}")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ConditionJson {
    Never(bool),
    Sets(Vec<Vec<PointIndex>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClassJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    condition: ConditionJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RecordJson {
    cells: Vec<Cell>,
    classes: Vec<ClassJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DataJson {
    triangulations: Vec<RecordJson>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCondition {
    pub label: Option<String>,
    pub condition: SignCondition,
}

/// Lifting conditions of the six bitangent classes other than (C), per
/// triangulation, stored in the labelling of the canonical form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExternalClassData {
    records: HashMap<Triangulation, Vec<ClassCondition>>,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read class data: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed class data: {0}")]
    Json(#[from] serde_json::Error),
    #[error("record {record}: invalid triangulation: {source}")]
    Triangulation { record: usize, source: Violation },
    #[error("record {record}, class {class}: {source}")]
    Condition { record: usize, class: usize, source: ConditionError },
    #[error("record {record}: {count} classes given, at most 6 allowed")]
    TooManyClasses { record: usize, count: usize },
    #[error("record {record}: `false` is the only boolean allowed as a condition")]
    TrueCondition { record: usize },
    #[error("record {record} repeats a triangulation already listed")]
    Duplicate { record: usize },
}

/// Index map sending labels of `t` to labels of its canonical form.
fn to_canonical(t: &Triangulation) -> (Triangulation, Vec<PointIndex>) {
    let canon = t.canonical_form().triangulation;
    let lattice = t.lattice();
    let g = S3Element::all()
        .into_iter()
        .find(|&g| t.relabel(g) == canon)
        .expect("canonical form is an S3 image");
    (canon, lattice.permutation(g).to_vec())
}

impl ExternalClassData {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds conditions given in the labelling of `t`.
    pub fn insert(&mut self, t: &Triangulation, classes: Vec<ClassCondition>) -> Option<Vec<ClassCondition>> {
        let (canon, map) = to_canonical(t);
        let classes =
            classes.into_iter().map(|c| ClassCondition { label: c.label, condition: c.condition.relabeled(&map) }).collect();
        self.records.insert(canon, classes)
    }

    /// Conditions in the labelling of `t`.
    pub fn classes_for(&self, t: &Triangulation) -> Option<Vec<ClassCondition>> {
        let (canon, map) = to_canonical(t);
        let mut inverse = vec![0; map.len()];
        for (i, &j) in map.iter().enumerate() {
            inverse[j] = i;
        }
        self.records.get(&canon).map(|cs| {
            cs.iter().map(|c| ClassCondition { label: c.label.clone(), condition: c.condition.relabeled(&inverse) }).collect()
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let raw: DataJson = serde_json::from_str(text)?;
        let mut data = Self::new();
        for (record, r) in raw.triangulations.into_iter().enumerate() {
            let t = Triangulation::new(4, r.cells).map_err(|source| DataError::Triangulation { record, source })?;
            if r.classes.len() > 6 {
                return Err(DataError::TooManyClasses { record, count: r.classes.len() });
            }
            let mut classes = Vec::new();
            for (class, c) in r.classes.into_iter().enumerate() {
                let condition = match c.condition {
                    ConditionJson::Never(false) => SignCondition::never(),
                    ConditionJson::Never(true) => return Err(DataError::TrueCondition { record }),
                    ConditionJson::Sets(sets) => {
                        let cond = SignCondition::new(sets)
                            .map_err(|source| DataError::Condition { record, class, source })?;
                        cond.check_range(t.num_points())
                            .map_err(|source| DataError::Condition { record, class, source })?;
                        cond
                    }
                };
                classes.push(ClassCondition { label: c.label, condition });
            }
            if data.insert(&t, classes).is_some() {
                return Err(DataError::Duplicate { record });
            }
        }
        Ok(data)
    }

    pub fn load(path: &Path) -> Result<Self, DataError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut entries: Vec<_> = self.records.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let raw = DataJson {
            triangulations: entries
                .into_iter()
                .map(|(t, cs)| RecordJson {
                    cells: t.cells().to_vec(),
                    classes: cs
                        .iter()
                        .map(|c| ClassJson {
                            label: c.label.clone(),
                            condition: if c.condition.never {
                                ConditionJson::Never(false)
                            } else {
                                ConditionJson::Sets(c.condition.sets.clone())
                            },
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }
}

/// A sign vector whose bitangent counts do not fit the seven-class picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anomaly {
    pub signs: SignDistribution,
    /// Real bitangents contributed by the six known classes.
    pub known: u32,
    /// Real bitangents forced by the topology.
    pub total: u32,
}

impl fmt::Display for Anomaly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "signs [{}]: topology gives {} real bitangents, known classes give {}", self.signs, self.total, self.known)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algorithm1Output {
    /// Normalized sign vectors where the shape-(C) class lifts, sorted by bits.
    pub collected: Vec<SignDistribution>,
    /// Sign vectors where the difference is neither 0 nor 4.
    pub anomalies: Vec<Anomaly>,
}

#[derive(Debug, Error)]
pub enum Algorithm1Error {
    #[error("triangulation admits generic curves; the closed sign formula applies")]
    Generic,
    #[error("no class data for this triangulation")]
    MissingData,
    #[error("class data has {0} classes; six are needed")]
    IncompleteData(usize),
    #[error("class data inconsistent with the real topology at {} sign vectors, first: {}", .0.len(), .0[0])]
    Integrity(Vec<Anomaly>),
}

/// Runs the subtraction over all normalized sign vectors and collects those
/// where the topology forces more real bitangents than the six known classes
/// provide. Anomalies are reported, not raised.
pub fn algorithm1_collect(t: &Triangulation, data: &ExternalClassData) -> Result<Algorithm1Output, Algorithm1Error> {
    if !is_nongeneric_triangulation(t) {
        return Err(Algorithm1Error::Generic);
    }
    let classes = data.classes_for(t).ok_or(Algorithm1Error::MissingData)?;
    if classes.len() != 6 {
        return Err(Algorithm1Error::IncompleteData(classes.len()));
    }
    let conditions: Vec<Option<Vec<u32>>> =
        classes.iter().map(|c| (!c.condition.is_never()).then(|| c.condition.masks())).collect();
    let len = t.num_points();
    let table = PatchworkTable::new(t);
    let mut collected = Vec::new();
    let mut anomalies = Vec::new();
    for m in 0..1u32 << (len - 1) {
        let bits = m << 1;
        let known = 4 * conditions
            .iter()
            .filter(|c| c.as_ref().is_some_and(|masks| masks.iter().all(|&mk| (bits & mk).count_ones() % 2 == 0)))
            .count() as u32;
        let total = real_bitangent_count(table.topology(bits)).expect("quartic topology");
        let signs = SignDistribution::from_bits(len, bits);
        if total != known {
            collected.push(signs);
        }
        if total != known && total != known + 4 {
            anomalies.push(Anomaly { signs, known, total });
        }
    }
    Ok(Algorithm1Output { collected, anomalies })
}

/// Like [`algorithm1_collect`] but fails on any anomaly.
pub fn algorithm1(t: &Triangulation, data: &ExternalClassData) -> Result<Vec<SignDistribution>, Algorithm1Error> {
    let out = algorithm1_collect(t, data)?;
    if out.anomalies.is_empty() {
        Ok(out.collected)
    } else {
        Err(Algorithm1Error::Integrity(out.anomalies))
    }
}

/// Comparison of the subtraction result with the closed formula for one
/// motif orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremCheck {
    pub motif: MotifC,
    pub collected: usize,
    pub predicted: usize,
    /// Sign vectors in exactly one of the two sets.
    pub mismatches: Vec<SignDistribution>,
}

impl TheoremCheck {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks the closed formula against the subtraction for each given motif,
/// or for every motif orientation found in `t` when `motifs` is empty.
pub fn verify_theorem_a(
    t: &Triangulation,
    data: &ExternalClassData,
    motifs: &[MotifC],
) -> Result<Vec<TheoremCheck>, Algorithm1Error> {
    let collected = algorithm1(t, data)?;
    let motifs = if motifs.is_empty() { find_motif_c(t) } else { motifs.to_vec() };
    let len = t.num_points();
    Ok(motifs
        .into_iter()
        .map(|m| {
            let predicted: Vec<SignDistribution> = (0..1u32 << (len - 1))
                .map(|r| SignDistribution::normalized_from_rank(len, r))
                .filter(|d| shape_c_lifts(d, &m))
                .collect();
            let mismatches = symmetric_difference(&collected, &predicted);
            TheoremCheck { motif: m, collected: collected.len(), predicted: predicted.len(), mismatches }
        })
        .collect())
}

fn symmetric_difference(a: &[SignDistribution], b: &[SignDistribution]) -> Vec<SignDistribution> {
    let key = |d: &SignDistribution| d.bits();
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if key(x) == key(y) => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if key(x) < key(y) => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}
