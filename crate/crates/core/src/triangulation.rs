//! Unimodular triangulations of `dΔ₂`.
//!
//! A triangulation is stored as its sorted list of cells, each cell a sorted
//! triple of point indices. Two triangulations are equal iff their cell lists
//! are equal.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::lattice::{num_points, Lattice, LatticePoint, PointIndex, S3Element};

pub type Cell = [PointIndex; 3];

/// The side of `dΔ₂` a boundary edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// `y = 0`
    Bottom,
    /// `x = 0`
    Left,
    /// `x + y = d`
    Hypotenuse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Interior,
    Boundary(Side),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub endpoints: [PointIndex; 2],
    pub kind: EdgeKind,
}

/// An interior edge with its two incident cells and their apexes (the cell
/// vertices not on the edge). `apexes[i]` belongs to `cells[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteriorEdge {
    pub endpoints: [PointIndex; 2],
    pub cells: [usize; 2],
    pub apexes: [PointIndex; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub endpoints: [PointIndex; 2],
    pub side: Side,
    pub cell: usize,
    pub apex: PointIndex,
}

/// Edge incidence data of a valid triangulation. Both lists are sorted by
/// endpoints; the position of an interior edge in `interior` is its edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTable {
    pub interior: Vec<InteriorEdge>,
    pub boundary: Vec<BoundaryEdge>,
}

impl EdgeTable {
    pub fn interior_index(&self, endpoints: [PointIndex; 2]) -> Option<usize> {
        let key = sorted_pair(endpoints);
        self.interior.binary_search_by(|e| e.endpoints.cmp(&key)).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("cell {cell:?} has a point index outside 0..{len}")]
    IndexOutOfRange { cell: Cell, len: usize },
    #[error("cell {cell:?} repeats a vertex")]
    DegenerateCell { cell: Cell },
    #[error("cell {cell:?} appears twice")]
    DuplicateCell { cell: Cell },
    #[error("cell {cell:?} is not unimodular (|det| = {det})")]
    NotUnimodular { cell: Cell, det: i64 },
    #[error("expected {expected} cells, found {found}")]
    CellCount { expected: usize, found: usize },
    #[error("interior edge {edge:?} lies in {count} cells, expected 2")]
    InteriorEdgeIncidence { edge: [PointIndex; 2], count: usize },
    #[error("boundary edge {edge:?} lies in {count} cells, expected 1")]
    BoundaryEdgeIncidence { edge: [PointIndex; 2], count: usize },
    #[error("cells on edge {edge:?} lie on the same side of it")]
    FoldedEdge { edge: [PointIndex; 2] },
    #[error("lattice point {point} is not a vertex of any cell")]
    MissingPoint { point: PointIndex },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("{0:?} is not an interior edge")]
    NotInteriorEdge([PointIndex; 2]),
    #[error("the two cells on {0:?} do not form a strictly convex quadrilateral")]
    NotConvex([PointIndex; 2]),
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed cell list: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("cell {0:?} does not have three vertices")]
    Arity(Vec<usize>),
    #[error(transparent)]
    Invalid(#[from] Violation),
}

fn sorted_pair([a, b]: [PointIndex; 2]) -> [PointIndex; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

fn sorted_cell(mut c: Cell) -> Cell {
    c.sort_unstable();
    c
}

/// Twice the signed area of the triangle `pqr`.
pub(crate) fn orient(p: LatticePoint, q: LatticePoint, r: LatticePoint) -> i64 {
    let (px, py) = (i64::from(p.x), i64::from(p.y));
    (i64::from(q.x) - px) * (i64::from(r.y) - py) - (i64::from(q.y) - py) * (i64::from(r.x) - px)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangulation {
    degree: u32,
    cells: Vec<Cell>,
}

impl Triangulation {
    /// Builds a triangulation after normalizing the cell order, without
    /// validating it.
    pub fn new_unchecked(degree: u32, cells: impl IntoIterator<Item = Cell>) -> Self {
        let mut cells: Vec<Cell> = cells.into_iter().map(sorted_cell).collect();
        cells.sort_unstable();
        Self { degree, cells }
    }

    pub fn new(degree: u32, cells: impl IntoIterator<Item = Cell>) -> Result<Self, Violation> {
        let t = Self::new_unchecked(degree, cells);
        t.validate()?;
        Ok(t)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn num_points(&self) -> usize {
        num_points(self.degree)
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.degree)
    }

    pub fn contains_cell(&self, cell: Cell) -> bool {
        self.cells.binary_search(&sorted_cell(cell)).is_ok()
    }

    /// The triangulation made of unit squares cut along their anti-diagonal.
    pub fn staircase(degree: u32) -> Self {
        let idx = |x: u32, y: u32| LatticePoint::new(x, y).index();
        let mut cells = Vec::new();
        for x in 0..degree {
            for y in 0..degree - x {
                cells.push([idx(x, y), idx(x + 1, y), idx(x, y + 1)]);
                if x + y + 2 <= degree {
                    cells.push([idx(x + 1, y), idx(x, y + 1), idx(x + 1, y + 1)]);
                }
            }
        }
        Self::new_unchecked(degree, cells)
    }

    /// Checks every structural invariant; the error names the first
    /// violated one.
    pub fn validate(&self) -> Result<(), Violation> {
        let lattice = self.lattice();
        let n = lattice.len();
        for (i, &cell) in self.cells.iter().enumerate() {
            if cell.iter().any(|&v| v >= n) {
                return Err(Violation::IndexOutOfRange { cell, len: n });
            }
            if cell[0] == cell[1] || cell[1] == cell[2] {
                return Err(Violation::DegenerateCell { cell });
            }
            if i > 0 && self.cells[i - 1] == cell {
                return Err(Violation::DuplicateCell { cell });
            }
            let det = orient(lattice.point(cell[0]), lattice.point(cell[1]), lattice.point(cell[2]));
            if det.abs() != 1 {
                return Err(Violation::NotUnimodular { cell, det: det.abs() });
            }
        }
        let expected = (self.degree * self.degree) as usize;
        if self.cells.len() != expected {
            return Err(Violation::CellCount { expected, found: self.cells.len() });
        }
        let mut incidence: HashMap<[PointIndex; 2], Vec<PointIndex>> = HashMap::new();
        for cell in &self.cells {
            for (a, b, apex) in cell_edges(*cell) {
                incidence.entry([a, b]).or_default().push(apex);
            }
        }
        let mut edges: Vec<_> = incidence.into_iter().collect();
        edges.sort_unstable();
        // overlapping cells first: an edge in too many cells usually explains
        // the under-covered edges elsewhere
        for (edge, apexes) in &edges {
            let (p, q) = (lattice.point(edge[0]), lattice.point(edge[1]));
            let limit = if boundary_side(self.degree, p, q).is_some() { 1 } else { 2 };
            if apexes.len() > limit {
                return Err(match limit {
                    1 => Violation::BoundaryEdgeIncidence { edge: *edge, count: apexes.len() },
                    _ => Violation::InteriorEdgeIncidence { edge: *edge, count: apexes.len() },
                });
            }
        }
        for (edge, apexes) in &edges {
            let (p, q) = (lattice.point(edge[0]), lattice.point(edge[1]));
            match boundary_side(self.degree, p, q) {
                Some(_) => {
                    if apexes.len() != 1 {
                        return Err(Violation::BoundaryEdgeIncidence { edge: *edge, count: apexes.len() });
                    }
                }
                None => {
                    if apexes.len() != 2 {
                        return Err(Violation::InteriorEdgeIncidence { edge: *edge, count: apexes.len() });
                    }
                    let s0 = orient(p, q, lattice.point(apexes[0]));
                    let s1 = orient(p, q, lattice.point(apexes[1]));
                    if s0.signum() == s1.signum() {
                        return Err(Violation::FoldedEdge { edge: *edge });
                    }
                }
            }
        }
        let mut used = vec![false; n];
        for cell in &self.cells {
            for &v in cell {
                used[v] = true;
            }
        }
        if let Some(point) = used.iter().position(|&u| !u) {
            return Err(Violation::MissingPoint { point });
        }
        Ok(())
    }

    /// Edge incidence table. Assumes `self` is valid.
    pub fn edge_table(&self) -> EdgeTable {
        let lattice = self.lattice();
        let mut incidence: HashMap<[PointIndex; 2], Vec<(usize, PointIndex)>> = HashMap::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            for (a, b, apex) in cell_edges(*cell) {
                incidence.entry([a, b]).or_default().push((ci, apex));
            }
        }
        let mut all: Vec<_> = incidence.into_iter().collect();
        all.sort_unstable();
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for (endpoints, inc) in all {
            let (p, q) = (lattice.point(endpoints[0]), lattice.point(endpoints[1]));
            match boundary_side(self.degree, p, q) {
                Some(side) => boundary.push(BoundaryEdge { endpoints, side, cell: inc[0].0, apex: inc[0].1 }),
                None => {
                    debug_assert_eq!(inc.len(), 2);
                    interior.push(InteriorEdge {
                        endpoints,
                        cells: [inc[0].0, inc[1].0],
                        apexes: [inc[0].1, inc[1].1],
                    })
                }
            }
        }
        EdgeTable { interior, boundary }
    }

    /// All edges, interior first then boundary, each group sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let table = self.edge_table();
        table
            .interior
            .iter()
            .map(|e| Edge { endpoints: e.endpoints, kind: EdgeKind::Interior })
            .chain(table.boundary.iter().map(|e| Edge { endpoints: e.endpoints, kind: EdgeKind::Boundary(e.side) }))
            .collect()
    }

    pub fn curve_graph(&self) -> CurveGraph {
        let table = self.edge_table();
        CurveGraph {
            nodes: self.cells.len(),
            bounded_edges: table.interior.iter().map(|e| (e.cells[0], e.cells[1])).collect(),
            rays: table.boundary.iter().map(|e| (e.cell, e.side)).collect(),
        }
    }

    /// Bistellar flip of an interior edge.
    pub fn flip(&self, edge: [PointIndex; 2]) -> Result<Triangulation, FlipError> {
        let edge = sorted_pair(edge);
        let table = self.edge_table();
        let e = table
            .interior_index(edge)
            .map(|i| table.interior[i])
            .ok_or(FlipError::NotInteriorEdge(edge))?;
        let lattice = self.lattice();
        let [a1, a2] = e.apexes;
        let [v1, v2] = e.endpoints;
        let s1 = orient(lattice.point(a1), lattice.point(a2), lattice.point(v1));
        let s2 = orient(lattice.point(a1), lattice.point(a2), lattice.point(v2));
        if s1 == 0 || s2 == 0 || s1.signum() == s2.signum() {
            return Err(FlipError::NotConvex(edge));
        }
        let cells = self
            .cells
            .iter()
            .enumerate()
            .filter(|(i, _)| !e.cells.contains(i))
            .map(|(_, c)| *c)
            .chain([[a1, a2, v1], [a1, a2, v2]]);
        Ok(Triangulation::new_unchecked(self.degree, cells))
    }

    /// The image of `self` under an `S3` element.
    pub fn relabel(&self, g: S3Element) -> Triangulation {
        let lattice = self.lattice();
        let perm = lattice.permutation(g);
        Triangulation::new_unchecked(self.degree, self.cells.iter().map(|c| c.map(|v| perm[v])))
    }

    /// Lexicographically least `S3` image, with orbit size and order of the
    /// stabilizer.
    pub fn canonical_form(&self) -> Canonical {
        let lattice = self.lattice();
        let mut best: Option<Vec<Cell>> = None;
        let mut aut_order = 0;
        let mut buf: Vec<Cell> = Vec::with_capacity(self.cells.len());
        for g in S3Element::all() {
            let perm = lattice.permutation(g);
            buf.clear();
            buf.extend(self.cells.iter().map(|c| sorted_cell(c.map(|v| perm[v]))));
            buf.sort_unstable();
            if buf == self.cells {
                aut_order += 1;
            }
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        Canonical {
            triangulation: Triangulation { degree: self.degree, cells: best.expect("S3 is nonempty") },
            orbit_size: 6 / aut_order,
            aut_order,
        }
    }

    /// `[[0,1,2],[1,2,4],...]`
    pub fn to_cell_list(&self) -> String {
        let cells: Vec<String> = self.cells.iter().map(|c| format!("[{},{},{}]", c[0], c[1], c[2])).collect();
        format!("[{}]", cells.join(","))
    }

    pub fn parse_cell_list(degree: u32, text: &str) -> Result<Self, ParseError> {
        let raw: Vec<Vec<usize>> = serde_json::from_str(text.trim())?;
        let mut cells = Vec::with_capacity(raw.len());
        for c in raw {
            match c.as_slice() {
                &[a, b, d] => cells.push([a, b, d]),
                _ => return Err(ParseError::Arity(c)),
            }
        }
        Ok(Triangulation::new(degree, cells)?)
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cell_list())
    }
}

fn cell_edges([a, b, c]: Cell) -> [(PointIndex, PointIndex, PointIndex); 3] {
    // cells are sorted, so every pair is already ordered
    [(a, b, c), (a, c, b), (b, c, a)]
}

fn boundary_side(degree: u32, p: LatticePoint, q: LatticePoint) -> Option<Side> {
    if p.y == 0 && q.y == 0 {
        Some(Side::Bottom)
    } else if p.x == 0 && q.x == 0 {
        Some(Side::Left)
    } else if p.x + p.y == degree && q.x + q.y == degree {
        Some(Side::Hypotenuse)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Canonical {
    pub triangulation: Triangulation,
    pub orbit_size: usize,
    pub aut_order: usize,
}

/// The abstract graph of the dual tropical curve: one node per cell, one
/// bounded edge per interior edge of the triangulation (same ids as
/// [`EdgeTable::interior`]) and one ray per boundary edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveGraph {
    pub nodes: usize,
    pub bounded_edges: Vec<(usize, usize)>,
    pub rays: Vec<(usize, Side)>,
}

impl CurveGraph {
    pub fn is_connected(&self) -> bool {
        if self.nodes == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(w, _) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// First Betti number of the bounded part (the graph is connected).
    pub fn betti(&self) -> usize {
        self.bounded_edges.len() + 1 - self.nodes
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for (id, &(a, b)) in self.bounded_edges.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        adj
    }

    /// Fundamental cycles of a breadth-first spanning tree rooted at node 0,
    /// as bit masks over bounded-edge ids.
    pub fn cycle_basis(&self) -> Vec<u64> {
        self.cycle_basis_with(0, &(0..self.bounded_edges.len()).collect::<Vec<_>>())
    }

    /// Fundamental cycles of the breadth-first spanning tree rooted at `root`
    /// that explores edges in the order given by `edge_order`.
    pub fn cycle_basis_with(&self, root: usize, edge_order: &[usize]) -> Vec<u64> {
        assert!(self.bounded_edges.len() <= 64, "edge masks are 64 bits wide");
        let mut rank = vec![0; self.bounded_edges.len()];
        for (r, &e) in edge_order.iter().enumerate() {
            rank[e] = r;
        }
        let mut adj = self.adjacency();
        for list in &mut adj {
            list.sort_by_key(|&(_, id)| rank[id]);
        }
        // path_to_root[v] = tree edges between v and the root
        let mut path = vec![0u64; self.nodes];
        let mut seen = vec![false; self.nodes];
        let mut tree = 0u64;
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            for &(w, id) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    tree |= 1 << id;
                    path[w] = path[u] | (1 << id);
                    queue.push_back(w);
                }
            }
        }
        self.bounded_edges
            .iter()
            .enumerate()
            .filter(|(id, _)| tree & (1 << id) == 0)
            .map(|(id, &(a, b))| (path[a] ^ path[b]) | (1 << id))
            .collect()
    }
}

/// All unimodular triangulations of `dΔ₂` up to `S3`, regular or not, in
/// breadth-first discovery order of the flip graph from the staircase.
pub fn enumerate_unimodular(degree: u32) -> Vec<Canonical> {
    let start = Triangulation::staircase(degree).canonical_form();
    let mut seen: HashSet<Triangulation> = HashSet::from([start.triangulation.clone()]);
    let mut order = vec![start];
    let mut head = 0;
    while head < order.len() {
        let t = order[head].triangulation.clone();
        head += 1;
        for e in t.edge_table().interior {
            if let Ok(next) = t.flip(e.endpoints) {
                let canon = next.canonical_form();
                if seen.insert(canon.triangulation.clone()) {
                    order.push(canon);
                }
            }
        }
    }
    order
}

/// Regular unimodular triangulations of `dΔ₂` up to `S3`, in discovery
/// order.
pub fn enumerate_all(degree: u32) -> Vec<Canonical> {
    use rayon::prelude::*;
    // order-preserving, so ids stay deterministic for any pool size
    enumerate_unimodular(degree)
        .into_par_iter()
        .filter(|c| crate::heights::is_regular(&c.triangulation).is_some())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn staircase2() -> Triangulation {
        Triangulation::new(2, [[0, 1, 2], [1, 2, 4], [2, 4, 5], [1, 3, 4]]).unwrap()
    }

    #[test]
    fn staircase_matches_hand_listing() {
        assert_eq!(Triangulation::staircase(2), staircase2());
        for d in 1..=5 {
            Triangulation::staircase(d).validate().unwrap();
        }
    }

    #[test]
    fn listing_with_overlapping_cells_is_rejected() {
        let t = Triangulation::new_unchecked(2, [[0, 1, 2], [1, 2, 4], [2, 4, 5], [2, 3, 4]]);
        assert_eq!(t.validate(), Err(Violation::InteriorEdgeIncidence { edge: [2, 4], count: 3 }));
    }

    #[test]
    fn single_cell() {
        let t = Triangulation::new(1, [[0, 1, 2]]).unwrap();
        let edges = t.edges();
        assert_eq!(edges.len(), 3);
        assert!(edges.iter().all(|e| matches!(e.kind, EdgeKind::Boundary(_))));
        let g = t.curve_graph();
        assert_eq!((g.nodes, g.bounded_edges.len(), g.rays.len(), g.betti()), (1, 0, 3, 0));
        let c = t.canonical_form();
        assert_eq!((c.aut_order, c.orbit_size), (6, 1));
    }

    #[test]
    fn other_violations() {
        let t = Triangulation::new_unchecked(2, [[0, 1, 2], [1, 2, 4], [2, 4, 5]]);
        assert_eq!(t.validate(), Err(Violation::CellCount { expected: 4, found: 3 }));
        let t = Triangulation::new_unchecked(2, [[0, 3, 5], [1, 2, 4], [2, 4, 5], [1, 3, 4]]);
        assert!(matches!(t.validate(), Err(Violation::NotUnimodular { det: 4, .. })));
        let t = Triangulation::new_unchecked(1, [[0, 1, 7]]);
        assert!(matches!(t.validate(), Err(Violation::IndexOutOfRange { .. })));
    }

    #[test]
    fn staircase2_edges_and_graph() {
        let t = staircase2();
        let interior: Vec<_> = t.edge_table().interior.iter().map(|e| e.endpoints).collect();
        assert_eq!(interior, vec![[1, 2], [1, 4], [2, 4]]);
        let g = t.curve_graph();
        assert!(g.is_connected());
        assert_eq!((g.nodes, g.bounded_edges.len(), g.rays.len(), g.betti()), (4, 3, 6, 0));
        assert!(g.cycle_basis().is_empty());
    }

    #[test]
    fn flip_is_an_involution() {
        let t = staircase2();
        let f = t.flip([1, 4]).unwrap();
        assert_ne!(f, t);
        f.validate().unwrap();
        assert!(f.contains_cell([2, 3, 4]) || f.contains_cell([1, 2, 3]));
        let back_edge = {
            let e = f.edge_table();
            e.interior.iter().map(|e| e.endpoints).find(|p| !t.edge_table().interior.iter().any(|q| q.endpoints == *p)).unwrap()
        };
        assert_eq!(f.flip(back_edge).unwrap(), t);
        assert_eq!(t.flip([0, 1]), Err(FlipError::NotInteriorEdge([0, 1])));
    }

    #[test]
    fn quartic_staircase_counts() {
        let t = Triangulation::staircase(4);
        let table = t.edge_table();
        assert_eq!((t.cells().len(), table.interior.len(), table.boundary.len()), (16, 18, 12));
        let g = t.curve_graph();
        assert!(g.is_connected());
        assert_eq!(g.betti(), 3);
        assert_eq!(g.cycle_basis().len(), 3);
    }

    #[test]
    fn cell_list_round_trip() {
        let t = Triangulation::staircase(4);
        assert_eq!(Triangulation::parse_cell_list(4, &t.to_cell_list()).unwrap(), t);
        assert!(Triangulation::parse_cell_list(2, "[[0,1]]").is_err());
        assert!(Triangulation::parse_cell_list(2, "[[0,1,2],[1,2,4],[2,4,5],[2,3,4]]").is_err());
    }

    #[test]
    fn small_degree_enumeration() {
        assert_eq!(enumerate_unimodular(1).len(), 1);
        let all2 = enumerate_unimodular(2);
        for c in &all2 {
            c.triangulation.validate().unwrap();
            assert_eq!(c.triangulation.canonical_form().triangulation, c.triangulation);
            assert_eq!(6 % c.orbit_size, 0);
        }
    }
}
