//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use tropical_quartics::lattice::{Lattice, S3Element};
use tropical_quartics::triangulation::{Cell, Triangulation};
use tropical_quartics::twist::SignDistribution;

/// The sixteen cells of the fan-shaped example triangulation.
pub const FAN_CELLS: [Cell; 16] = [
    [0, 1, 2],
    [1, 2, 4],
    [2, 4, 12],
    [4, 7, 12],
    [2, 8, 12],
    [2, 8, 13],
    [8, 12, 13],
    [2, 5, 13],
    [5, 9, 13],
    [9, 13, 14],
    [7, 11, 12],
    [7, 10, 11],
    [4, 7, 10],
    [4, 6, 10],
    [3, 4, 6],
    [1, 3, 4],
];

/// Coefficient valuations of the worked three-oval example.
pub const THREE_OVAL_WEIGHTS: [i64; 15] = [5, 1, 2, 2, 0, 0, 4, 0, 1, 16, 7, 9, 12, 16, 33];

/// Weights of a published database record.
pub const RECORD_WEIGHTS: [i64; 15] = [6, 3, 1, 1, 0, 0, 3, 0, 1, 3, 14, 10, 8, 7, 7];

/// A unimodular triangulation reached by a random walk of flips from the
/// staircase, under a random symmetry.
pub fn random_triangulation<R: Rng>(rng: &mut R, degree: u32, steps: usize) -> Triangulation {
    let mut t = Triangulation::staircase(degree);
    for _ in 0..steps {
        let edges: Vec<[usize; 2]> = t.edge_table().interior.iter().map(|e| e.endpoints).collect();
        if let Some(e) = edges.choose(rng) {
            if let Ok(next) = t.flip(*e) {
                t = next;
            }
        }
    }
    let g = *S3Element::all().choose(rng).unwrap();
    t.relabel(g)
}

pub fn random_signs<R: Rng>(rng: &mut R, len: usize) -> SignDistribution {
    SignDistribution::from_bits(len, rng.gen::<u32>())
}

/// Complement of the patchworked curve in the real projective plane, built
/// from scratch: the four reflected copies of the triangulation tile the
/// square `|x| + |y| ≤ d`, whose boundary is glued antipodally. Each region
/// of the complement retracts onto the full subcomplex spanned by the
/// vertices of one sign, so its Euler characteristic is that of the
/// subcomplex.
pub struct ComplementRegions {
    /// Euler characteristic of every region.
    pub euler: Vec<i64>,
    /// Euler characteristic of the whole surface.
    pub total_euler: i64,
}

impl ComplementRegions {
    pub fn new(t: &Triangulation, delta: &SignDistribution) -> Self {
        let d = t.degree() as i64;
        let lattice = Lattice::new(t.degree());
        let on_rim = |(a, b): (i64, i64)| a.abs() + b.abs() == d;
        let canon = |p: (i64, i64)| if on_rim(p) { p.min((-p.0, -p.1)) } else { p };
        let sign_at = |(a, b): (i64, i64)| {
            let (x, y) = (a.abs(), b.abs());
            let idx = lattice.index_of(tropical_quartics::lattice::LatticePoint::new(x as u32, y as u32)).unwrap();
            let flip = (if a < 0 { x } else { 0 }) + (if b < 0 { y } else { 0 });
            delta.sign(idx) * if flip % 2 == 1 { -1 } else { 1 }
        };
        let quadrants = [(1, 1), (-1, 1), (1, -1), (-1, -1)];
        let mut vertex_id: HashMap<(i64, i64), usize> = HashMap::new();
        let mut vertex_sign: Vec<i32> = Vec::new();
        let mut edges: HashMap<((i64, i64), (i64, i64)), (usize, usize)> = HashMap::new();
        let mut faces: Vec<[usize; 3]> = Vec::new();
        for &(sx, sy) in &quadrants {
            for cell in t.cells() {
                let pts: Vec<(i64, i64)> = cell
                    .iter()
                    .map(|&i| {
                        let p = lattice.point(i);
                        (sx * p.x as i64, sy * p.y as i64)
                    })
                    .collect();
                let ids: Vec<usize> = pts
                    .iter()
                    .map(|&p| {
                        let c = canon(p);
                        let s = sign_at(p);
                        let next = vertex_id.len();
                        let id = *vertex_id.entry(c).or_insert(next);
                        if id == vertex_sign.len() {
                            vertex_sign.push(s);
                        }
                        assert_eq!(vertex_sign[id], s, "antipodal signs disagree at {p:?}");
                        id
                    })
                    .collect();
                for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                    let (p, q) = (pts[a], pts[b]);
                    let key = if on_rim(p) && on_rim(q) {
                        let k1 = (p.min(q), p.max(q));
                        let (np, nq) = ((-p.0, -p.1), (-q.0, -q.1));
                        k1.min((np.min(nq), np.max(nq)))
                    } else {
                        (p.min(q), p.max(q))
                    };
                    edges.insert(key, (ids[a], ids[b]));
                }
                faces.push([ids[0], ids[1], ids[2]]);
            }
        }
        let n = vertex_sign.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                x = parent[x];
            }
            x
        }
        for &(a, b) in edges.values() {
            if vertex_sign[a] == vertex_sign[b] {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut chi: HashMap<usize, i64> = HashMap::new();
        for v in 0..n {
            *chi.entry(root(&mut parent, v)).or_default() += 1;
        }
        for &(a, b) in edges.values() {
            if vertex_sign[a] == vertex_sign[b] {
                *chi.get_mut(&root(&mut parent, a)).unwrap() -= 1;
            }
        }
        for f in &faces {
            if vertex_sign[f[0]] == vertex_sign[f[1]] && vertex_sign[f[1]] == vertex_sign[f[2]] {
                *chi.get_mut(&root(&mut parent, f[0])).unwrap() += 1;
            }
        }
        let total_euler = n as i64 - edges.len() as i64 + faces.len() as i64;
        let mut euler: Vec<i64> = chi.into_values().collect();
        euler.sort_unstable();
        Self { euler, total_euler }
    }

    /// For even degree every oval bounds a disk, adding one region.
    pub fn ovals(&self) -> usize {
        self.euler.len() - 1
    }

    /// Two ovals are nested iff only the innermost region is a disk.
    pub fn nested(&self) -> bool {
        self.ovals() == 2 && self.euler.iter().filter(|&&c| c == 1).count() == 1
    }
}
