//! Lattice points of the dilated standard triangle `dΔ₂`, their indexing and
//! the `S3` symmetry action.
//!
//! Points are indexed in the coefficient order of a bivariate polynomial of
//! degree `d`: by total degree, and within a degree level by descending power
//! of `x`. For `d = 4` this is `a00, a10, a01, a20, a11, a02, a30, …, a04`.

use std::fmt;

/// Index of a lattice point in the graded order.
pub type PointIndex = usize;

/// Number of lattice points of `dΔ₂`.
pub const fn num_points(degree: u32) -> usize {
    let d = degree as usize;
    (d + 1) * (d + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub x: u32,
    pub y: u32,
}

impl LatticePoint {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn parity(self) -> Parity {
        Parity::new(self.x % 2, self.y % 2)
    }

    /// Position in the graded order.
    pub fn index(self) -> PointIndex {
        let k = (self.x + self.y) as usize;
        k * (k + 1) / 2 + self.y as usize
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// An element of `Z₂ × Z₂`. Used both for coordinate parities and for the
/// four sign-flip reflections (quadrants) of the real plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Parity(u8);

impl Parity {
    pub const ALL: [Parity; 4] = [Parity(0), Parity(1), Parity(2), Parity(3)];

    pub fn new(first: u32, second: u32) -> Self {
        Parity(((first & 1) | ((second & 1) << 1)) as u8)
    }

    pub fn first(self) -> u32 {
        u32::from(self.0 & 1)
    }

    pub fn second(self) -> u32 {
        u32::from((self.0 >> 1) & 1)
    }

    /// Dense code in `0..4`.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Parity((code & 3) as u8)
    }

    /// Group operation of `Z₂²`.
    pub fn add(self, other: Parity) -> Parity {
        Parity(self.0 ^ other.0)
    }

    /// `ε₁v₁ + ε₂v₂ mod 2`, the exponent of the sign change of `v` under the
    /// reflection `ε`.
    pub fn pairing(self, p: LatticePoint) -> u32 {
        (self.first() * p.x + self.second() * p.y) & 1
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first(), self.second())
    }
}

/// One of the six permutations of the barycentric triple `(x, y, d−x−y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct S3Element(u8);

impl S3Element {
    pub const IDENTITY: S3Element = S3Element(0);

    /// All six elements; index 0 is the identity.
    pub fn all() -> [S3Element; 6] {
        [0, 1, 2, 3, 4, 5].map(S3Element)
    }

    /// The identity and the two rotations (the cyclic subgroup).
    pub fn rotations() -> [S3Element; 3] {
        [S3Element(0), S3Element(4), S3Element(5)]
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        (code < 6).then_some(S3Element(code as u8))
    }

    pub fn apply(self, degree: u32, p: LatticePoint) -> LatticePoint {
        let (x, y) = (p.x, p.y);
        let z = degree - x - y;
        let (nx, ny) = match self.0 {
            0 => (x, y),
            1 => (y, x),
            2 => (x, z),
            3 => (z, y),
            4 => (y, z),
            _ => (z, x),
        };
        LatticePoint::new(nx, ny)
    }
}

impl fmt::Display for S3Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = ["id", "(x,y)->(y,x)", "(x,y)->(x,z)", "(x,y)->(z,y)", "(x,y)->(y,z)", "(x,y)->(z,x)"];
        f.write_str(name[self.0 as usize])
    }
}

/// The lattice points of `dΔ₂` together with the index permutations induced
/// by the `S3` action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    degree: u32,
    points: Vec<LatticePoint>,
    perms: Vec<Vec<PointIndex>>,
}

impl Lattice {
    pub fn new(degree: u32) -> Self {
        assert!(degree >= 1, "degree must be positive");
        let points = lattice_points(degree);
        let perms = S3Element::all()
            .iter()
            .map(|g| points.iter().map(|&p| g.apply(degree, p).index()).collect())
            .collect();
        Self { degree, points, perms }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn point(&self, idx: PointIndex) -> LatticePoint {
        self.points[idx]
    }

    pub fn index_of(&self, p: LatticePoint) -> Option<PointIndex> {
        (p.x + p.y <= self.degree).then(|| p.index())
    }

    /// Index permutation of the group element `g`.
    pub fn permutation(&self, g: S3Element) -> &[PointIndex] {
        &self.perms[g.code()]
    }

    pub fn is_interior(&self, idx: PointIndex) -> bool {
        let p = self.points[idx];
        p.x > 0 && p.y > 0 && p.x + p.y < self.degree
    }

    pub fn interior_points(&self) -> Vec<PointIndex> {
        (0..self.len()).filter(|&i| self.is_interior(i)).collect()
    }
}

/// Lattice points of `dΔ₂` in the graded order.
pub fn lattice_points(degree: u32) -> Vec<LatticePoint> {
    (0..=degree)
        .flat_map(|k| (0..=k).map(move |y| LatticePoint::new(k - y, y)))
        .collect()
}

/// The six `S3` point maps as index permutations.
pub fn s3_elements(degree: u32) -> Vec<Vec<PointIndex>> {
    Lattice::new(degree).perms
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(u32, u32)]) -> Vec<LatticePoint> {
        v.iter().map(|&(x, y)| LatticePoint::new(x, y)).collect()
    }

    #[test]
    fn graded_order_small_degrees() {
        assert_eq!(lattice_points(1), pts(&[(0, 0), (1, 0), (0, 1)]));
        assert_eq!(
            lattice_points(2),
            pts(&[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
        );
    }

    #[test]
    fn quartic_order_and_interior() {
        let l = Lattice::new(4);
        let expect = pts(&[
            (0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1),
            (1, 2), (0, 3), (4, 0), (3, 1), (2, 2), (1, 3), (0, 4),
        ]);
        assert_eq!(l.points(), &expect[..]);
        assert_eq!(l.interior_points(), vec![4, 7, 8]);
        for (i, p) in l.points().iter().enumerate() {
            assert_eq!(p.index(), i);
        }
    }

    #[test]
    fn s3_point_examples() {
        let id = S3Element::IDENTITY;
        assert_eq!(id.apply(4, LatticePoint::new(3, 1)), LatticePoint::new(3, 1));
        let swap = S3Element::all()[1];
        assert_eq!(swap.apply(4, LatticePoint::new(2, 1)), LatticePoint::new(1, 2));
        let g = S3Element::all()[3];
        assert_eq!(g.apply(4, LatticePoint::new(0, 0)), LatticePoint::new(4, 0));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(LatticePoint::new(0, 0).parity(), Parity::new(0, 0));
        assert_eq!(LatticePoint::new(2, 1).parity(), Parity::new(0, 1));
        assert_eq!(LatticePoint::new(1, 3).parity(), Parity::new(1, 1));
    }

    #[test]
    fn s3_is_a_group_of_bijections() {
        for d in 1..=4 {
            let perms = s3_elements(d);
            let n = num_points(d);
            for p in &perms {
                let mut seen = vec![false; n];
                for &q in p {
                    assert!(!seen[q]);
                    seen[q] = true;
                }
            }
            let compose = |a: &Vec<usize>, b: &Vec<usize>| -> Vec<usize> { (0..n).map(|i| a[b[i]]).collect() };
            for a in &perms {
                assert!(perms.iter().any(|b| compose(a, b) == perms[0]), "inverse missing");
                for b in &perms {
                    assert!(perms.contains(&compose(a, b)), "not closed");
                }
            }
            let distinct: std::collections::HashSet<_> = perms.iter().collect();
            assert_eq!(distinct.len(), 6);
        }
    }
}
