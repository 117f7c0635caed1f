//! Sign distributions, twisted edges and the dividing test.

use std::fmt;

use thiserror::Error;

use crate::lattice::{num_points, Lattice, LatticePoint, Parity, PointIndex};
use crate::triangulation::{EdgeTable, Triangulation};

/// One sign per lattice point, packed as a bit mask: bit `i` is set iff the
/// sign at point index `i` is `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignDistribution {
    bits: u32,
    len: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignError {
    #[error("sign entry {index} is {value}, expected 1 or -1")]
    NotASign { index: usize, value: String },
    #[error("expected {expected} signs, found {found}")]
    Length { expected: usize, found: usize },
}

impl SignDistribution {
    pub fn all_positive(len: usize) -> Self {
        assert!(len <= 32);
        Self { bits: 0, len: len as u8 }
    }

    pub fn from_bits(len: usize, bits: u32) -> Self {
        assert!(len <= 32);
        let mask = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
        Self { bits: bits & mask, len: len as u8 }
    }

    /// The `m`-th normalized sign vector (`δ₀ = +1`): bit `i−1` of `m` gives
    /// the sign at index `i`.
    pub fn normalized_from_rank(len: usize, m: u32) -> Self {
        Self::from_bits(len, m << 1)
    }

    pub fn from_signs(signs: &[i32]) -> Result<Self, SignError> {
        if signs.len() > 32 {
            return Err(SignError::Length { expected: 32, found: signs.len() });
        }
        let mut bits = 0;
        for (index, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => bits |= 1 << index,
                _ => return Err(SignError::NotASign { index, value: s.to_string() }),
            }
        }
        Ok(Self { bits, len: signs.len() as u8 })
    }

    /// Comma- or space-separated `1`/`-1` (also `+`/`-`).
    pub fn parse(text: &str) -> Result<Self, SignError> {
        let trimmed = text.trim().trim_start_matches(['[', '<']).trim_end_matches([']', '>']);
        let mut signs = Vec::new();
        for (index, tok) in trimmed.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).enumerate() {
            let v = match tok {
                "1" | "+1" | "+" => 1,
                "-1" | "-" => -1,
                other => return Err(SignError::NotASign { index, value: other.to_string() }),
            };
            signs.push(v);
        }
        Self::from_signs(&signs)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn sign(&self, idx: PointIndex) -> i32 {
        if self.bits >> idx & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> Vec<i32> {
        (0..self.len()).map(|i| self.sign(i)).collect()
    }

    pub fn negated(&self) -> Self {
        Self::from_bits(self.len(), !self.bits)
    }

    /// The representative with `δ₀ = +1`.
    pub fn normalized(&self) -> Self {
        if self.bits & 1 == 1 {
            self.negated()
        } else {
            *self
        }
    }

    /// The distribution `δ ∘ perm⁻¹`, i.e. the sign at `perm[i]` is `δ(i)`.
    pub fn permuted(&self, perm: &[PointIndex]) -> Self {
        let mut bits = 0;
        for (i, &j) in perm.iter().enumerate() {
            bits |= (self.bits >> i & 1) << j;
        }
        Self { bits, len: self.len }
    }

    pub fn expect_len(self, degree: u32) -> Result<Self, SignError> {
        let expected = num_points(degree);
        if self.len() == expected {
            Ok(self)
        } else {
            Err(SignError::Length { expected, found: self.len() })
        }
    }
}

impl fmt::Display for SignDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.signs().iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `δ(ε(v)) = (−1)^{ε₁v₁+ε₂v₂} δ(v)`
pub fn extended_sign(delta: &SignDistribution, eps: Parity, v: LatticePoint) -> i32 {
    let s = delta.sign(v.index());
    if eps.pairing(v) == 1 {
        -s
    } else {
        s
    }
}

/// A set of interior edges, as a bit mask over edge-table ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistedEdgeSet {
    pub mask: u64,
    pub edges: Vec<[PointIndex; 2]>,
}

impl TwistedEdgeSet {
    pub fn from_mask(table: &EdgeTable, mask: u64) -> Self {
        let edges = table
            .interior
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e.endpoints)
            .collect();
        Self { mask, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl fmt::Display for TwistedEdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.edges.iter().map(|[a, b]| format!("({a} {b})")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// The twist criterion of one interior edge as an affine function over
/// `GF(2)` of the sign bits: twisted iff `popcount(bits & mask) + constant`
/// is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistRule {
    pub mask: u32,
    pub constant: u32,
}

impl TwistRule {
    #[inline]
    pub fn is_twisted(self, bits: u32) -> bool {
        ((bits & self.mask).count_ones() + self.constant) & 1 == 1
    }
}

/// Per-triangulation tables for twisted edges and the dividing test.
#[derive(Debug, Clone)]
pub struct TwistTable {
    pub edges: EdgeTable,
    pub rules: Vec<TwistRule>,
    pub cycles: Vec<u64>,
    /// One rule per basis cycle: the parity of `|γ ∩ T|`.
    cycle_rules: Vec<TwistRule>,
}

impl TwistTable {
    pub fn new(t: &Triangulation) -> Self {
        Self::with_cycles(t, t.curve_graph().cycle_basis())
    }

    /// Uses the given cycle basis (bit masks over interior-edge ids).
    pub fn with_cycles(t: &Triangulation, cycles: Vec<u64>) -> Self {
        let lattice = t.lattice();
        let edges = t.edge_table();
        let rules: Vec<TwistRule> = edges
            .interior
            .iter()
            .map(|e| {
                let [v1, v2] = e.endpoints;
                let [a1, a2] = e.apexes;
                if lattice.point(a1).parity() != lattice.point(a2).parity() {
                    // twisted iff δ(v₁)δ(v₂)δ(a₁)δ(a₂) = +1
                    TwistRule { mask: (1 << v1) ^ (1 << v2) ^ (1 << a1) ^ (1 << a2), constant: 1 }
                } else {
                    // twisted iff δ(a₁)δ(a₂) = −1
                    TwistRule { mask: (1 << a1) ^ (1 << a2), constant: 0 }
                }
            })
            .collect();
        let cycle_rules = cycles
            .iter()
            .map(|&c| {
                rules
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| c >> i & 1 == 1)
                    .fold(TwistRule { mask: 0, constant: 0 }, |acc, (_, r)| TwistRule {
                        mask: acc.mask ^ r.mask,
                        constant: acc.constant ^ r.constant,
                    })
            })
            .collect();
        Self { edges, rules, cycles, cycle_rules }
    }

    pub fn twisted_mask(&self, bits: u32) -> u64 {
        self.rules
            .iter()
            .enumerate()
            .fold(0, |acc, (i, r)| if r.is_twisted(bits) { acc | 1 << i } else { acc })
    }

    #[inline]
    pub fn is_dividing(&self, bits: u32) -> bool {
        self.cycle_rules.iter().all(|r| !r.is_twisted(bits))
    }
}

pub fn twisted_edges(t: &Triangulation, delta: &SignDistribution) -> TwistedEdgeSet {
    let table = TwistTable::new(t);
    let mask = table.twisted_mask(delta.bits());
    TwistedEdgeSet::from_mask(&table.edges, mask)
}

/// Mod-2 sum of the curve-edge directions of `twisted ∩ γ` vanishes for
/// every basis cycle `γ`.
pub fn is_admissible(t: &Triangulation, twisted: &TwistedEdgeSet) -> bool {
    let lattice = t.lattice();
    let table = t.edge_table();
    // the curve edge is the dual edge rotated by 90°, which mod 2 swaps coordinates
    let dirs: Vec<(u32, u32)> = table
        .interior
        .iter()
        .map(|e| {
            let (p, q) = (lattice.point(e.endpoints[0]), lattice.point(e.endpoints[1]));
            (p.y.abs_diff(q.y) & 1, p.x.abs_diff(q.x) & 1)
        })
        .collect();
    t.curve_graph().cycle_basis().iter().all(|&c| {
        let sum = dirs
            .iter()
            .enumerate()
            .filter(|(i, _)| (c & twisted.mask) >> i & 1 == 1)
            .fold((0, 0), |(a, b), (_, &(u, v))| (a ^ u, b ^ v));
        sum == (0, 0)
    })
}

/// Every basis cycle meets the twisted edges an even number of times.
pub fn is_dividing(t: &Triangulation, delta: &SignDistribution) -> bool {
    TwistTable::new(t).is_dividing(delta.bits())
}

/// Whether two sign vectors on the same lattice agree up to negation.
pub fn same_class(a: &SignDistribution, b: &SignDistribution) -> bool {
    a.normalized() == b.normalized()
}

/// Twisted edges re-expressed after relabeling by an `S3` permutation.
pub fn relabel_edges(edges: &[[PointIndex; 2]], perm: &[PointIndex]) -> Vec<[PointIndex; 2]> {
    let mut out: Vec<[PointIndex; 2]> = edges
        .iter()
        .map(|&[a, b]| {
            let (x, y) = (perm[a], perm[b]);
            if x <= y {
                [x, y]
            } else {
                [y, x]
            }
        })
        .collect();
    out.sort_unstable();
    out
}

/// Convenience: the lattice of a sign distribution's degree.
pub fn lattice_for(delta: &SignDistribution) -> Option<Lattice> {
    (1..8).find(|&d| num_points(d) == delta.len()).map(Lattice::new)
}
