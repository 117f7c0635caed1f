//! Sweeps over all sign classes of a triangulation and the census tables
//! built from them.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::patchwork::{real_bitangent_count, PatchworkTable, RealTopology};
use crate::triangulation::{enumerate_all, Canonical, Triangulation};
use crate::twist::SignDistribution;

/// Number of normalized sign vectors for quartics.
pub const SIGN_CLASSES: u32 = 1 << 14;

/// Real topology classes in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopologyClass {
    OneOval,
    TwoNested,
    TwoOvals,
    ThreeOvals,
    FourOvals,
}

impl TopologyClass {
    pub const ALL: [TopologyClass; 5] = [
        TopologyClass::OneOval,
        TopologyClass::TwoNested,
        TopologyClass::TwoOvals,
        TopologyClass::ThreeOvals,
        TopologyClass::FourOvals,
    ];

    pub fn of(rt: RealTopology) -> Option<Self> {
        match (rt.ovals, rt.nested) {
            (1, _) => Some(Self::OneOval),
            (2, true) => Some(Self::TwoNested),
            (2, false) => Some(Self::TwoOvals),
            (3, _) => Some(Self::ThreeOvals),
            (4, _) => Some(Self::FourOvals),
            _ => None,
        }
    }

    pub fn topology(self) -> RealTopology {
        match self {
            Self::OneOval => RealTopology::new(1, false),
            Self::TwoNested => RealTopology::new(2, true),
            Self::TwoOvals => RealTopology::new(2, false),
            Self::ThreeOvals => RealTopology::new(3, false),
            Self::FourOvals => RealTopology::new(4, false),
        }
    }

    pub fn bitangents(self) -> u32 {
        real_bitangent_count(self.topology()).expect("valid topology")
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TopologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.topology().fmt(f)
    }
}

/// Order in which representatives are preferred: fewest `−1` entries
/// first, then smallest packed value (bit `i` = sign at index `i`).
pub fn representative_key(bits: u32) -> (u32, u32) {
    (bits.count_ones(), bits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRecord {
    pub triangulation: Triangulation,
    pub orbit_size: usize,
    pub aut_order: usize,
    /// Indexed by [`TopologyClass::index`].
    pub counts: [u32; 5],
    /// Preferred sign vector of each nonempty class, see [`representative_key`].
    pub representatives: [Option<SignDistribution>; 5],
}

impl SweepRecord {
    pub fn count(&self, class: TopologyClass) -> u32 {
        self.counts[class.index()]
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// The achieved real bitangent numbers, ascending.
    pub fn bitangent_numbers(&self) -> Vec<u32> {
        let mut out: Vec<u32> =
            TopologyClass::ALL.iter().filter(|c| self.count(**c) > 0).map(|c| c.bitangents()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("sign vector {0} produced {1} ovals, outside 1..=4")]
    Topology(String, usize),
}

/// Classifies every normalized sign vector of a quartic triangulation.
pub fn sweep(t: &Triangulation) -> Result<SweepRecord, SweepError> {
    let c = t.canonical_form();
    sweep_with(t, c.orbit_size, c.aut_order)
}

fn sweep_with(t: &Triangulation, orbit_size: usize, aut_order: usize) -> Result<SweepRecord, SweepError> {
    let len = t.num_points();
    let table = PatchworkTable::new(t);
    let mut counts = [0u32; 5];
    let mut best: [Option<u32>; 5] = [None; 5];
    let classes = 1u32 << (len - 1);
    for m in 0..classes {
        let bits = m << 1;
        let rt = table.topology(bits);
        let class = TopologyClass::of(rt)
            .ok_or_else(|| SweepError::Topology(SignDistribution::from_bits(len, bits).to_string(), rt.ovals))?;
        let i = class.index();
        counts[i] += 1;
        if best[i].is_none_or(|b| representative_key(bits) < representative_key(b)) {
            best[i] = Some(bits);
        }
    }
    Ok(SweepRecord {
        triangulation: t.clone(),
        orbit_size,
        aut_order,
        counts,
        representatives: best.map(|b| b.map(|bits| SignDistribution::from_bits(len, bits))),
    })
}

pub fn sweep_canonical(c: &Canonical) -> Result<SweepRecord, SweepError> {
    sweep_with(&c.triangulation, c.orbit_size, c.aut_order)
}

/// Runs `f` on a pool with `jobs` workers, or on the global pool.
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Sweeps every class in parallel; the result keeps the input order.
/// `progress` is called with the number of finished sweeps.
pub fn census_of(
    classes: &[Canonical],
    jobs: Option<usize>,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<Vec<SweepRecord>, SweepError> {
    let done = AtomicUsize::new(0);
    with_jobs(jobs, || {
        classes
            .par_iter()
            .map(|c| {
                let r = sweep_canonical(c);
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(p) = progress {
                    p(n, classes.len());
                }
                r
            })
            .collect()
    })
}

/// Enumerates the quartic triangulations and sweeps each.
pub fn census(jobs: Option<usize>, progress: Option<&(dyn Fn(usize, usize) + Sync)>) -> Result<Vec<SweepRecord>, SweepError> {
    let classes = with_jobs(jobs, || enumerate_all(4));
    census_of(&classes, jobs, progress)
}

/// The seven bitangent-number sets of the census, in table order.
pub const TABLE3_SETS: [&[u32]; 7] =
    [&[4, 8, 16, 28], &[4, 8, 28], &[4, 16, 28], &[8, 16, 28], &[4, 28], &[8, 28], &[16, 28]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table3 {
    pub counts: [usize; 7],
    /// Triangulations whose achieved set is none of the seven.
    pub other: Vec<(Vec<u32>, usize)>,
}

pub fn table3(records: &[SweepRecord]) -> Table3 {
    let mut counts = [0; 7];
    let mut other: Vec<(Vec<u32>, usize)> = Vec::new();
    for r in records {
        let set = r.bitangent_numbers();
        match TABLE3_SETS.iter().position(|s| *s == set.as_slice()) {
            Some(i) => counts[i] += 1,
            None => match other.iter_mut().find(|(s, _)| *s == set) {
                Some(entry) => entry.1 += 1,
                None => other.push((set, 1)),
            },
        }
    }
    other.sort();
    Table3 { counts, other }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusTables {
    /// Per topology class, summed over one representative per symmetry class.
    pub mod_s3: [u64; 5],
    /// Per topology class, weighted by orbit size.
    pub total: [u64; 5],
}

impl CensusTables {
    pub fn mod_s3_sum(&self) -> u64 {
        self.mod_s3.iter().sum()
    }

    pub fn total_sum(&self) -> u64 {
        self.total.iter().sum()
    }

    /// Share of each class in the total row, in percent.
    pub fn percentages(&self) -> [f64; 5] {
        let s = self.total_sum() as f64;
        self.total.map(|c| 100.0 * c as f64 / s)
    }
}

pub fn table1(records: &[SweepRecord]) -> CensusTables {
    let mut mod_s3 = [0u64; 5];
    let mut total = [0u64; 5];
    for r in records {
        for i in 0..5 {
            mod_s3[i] += u64::from(r.counts[i]);
            total[i] += u64::from(r.counts[i]) * r.orbit_size as u64;
        }
    }
    CensusTables { mod_s3, total }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_sweep_is_consistent() {
        let t = Triangulation::staircase(4).canonical_form().triangulation;
        let r = sweep(&t).unwrap();
        assert_eq!(r.total(), SIGN_CLASSES);
        assert!(r.count(TopologyClass::FourOvals) >= 1);
        let table = PatchworkTable::new(&t);
        for class in TopologyClass::ALL {
            match &r.representatives[class.index()] {
                Some(d) => assert_eq!(TopologyClass::of(table.topology(d.bits())), Some(class)),
                None => assert_eq!(r.count(class), 0),
            }
        }
        assert_eq!(r.bitangent_numbers().last(), Some(&28));
    }

    #[test]
    fn representatives_prefer_few_negative_signs() {
        assert!(representative_key(1 << 10) < representative_key(0b110));
        assert!(representative_key(1 << 2) < representative_key(1 << 4));
        assert!(representative_key(0) < representative_key(1 << 1));
    }

    #[test]
    fn tables_of_a_single_record() {
        let t = Triangulation::staircase(4).canonical_form();
        let r = sweep_canonical(&t).unwrap();
        let tables = table1(std::slice::from_ref(&r));
        assert_eq!(tables.mod_s3_sum(), 16384);
        assert_eq!(tables.total_sum(), 16384 * t.orbit_size as u64);
        let t3 = table3(std::slice::from_ref(&r));
        assert_eq!(t3.counts.iter().sum::<usize>() + t3.other.len(), 1);
    }
}
