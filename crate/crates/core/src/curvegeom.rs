//! Geometry of the tropical curve dual to a regular triangulation: vertex
//! positions, edge lengths, the shape-(C) motif and its length functionals.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::heights::{
    induced_subdivision, lp_forced_equality, lp_forced_nonnegative, rat, secondary_cone, Convention, HeightVector,
    LinearFunctional, Rational,
};
use crate::lattice::{Lattice, LatticePoint, PointIndex, S3Element};
use crate::triangulation::{Cell, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("height vector has {found} entries, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("heights do not induce the given triangulation under the {0:?} convention")]
    NotInduced(Convention),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotifError {
    #[error("the shape-(C) motif requires degree 4, got {0}")]
    Degree(u32),
    #[error("the oriented motif cell {0:?} is not a cell of the triangulation")]
    MissingCell(Cell),
    #[error("heights are not in the open secondary cone of the triangulation")]
    OutsideCone,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedEdge {
    /// The two cells whose vertices this edge joins.
    pub cells: [usize; 2],
    pub dual: [PointIndex; 2],
    /// Primitive direction from the vertex of `cells[0]` to that of `cells[1]`.
    pub direction: (i64, i64),
    pub length: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub cell: usize,
    pub dual: [PointIndex; 2],
    pub direction: (i64, i64),
}

/// Concrete tropical curve; vertices are indexed like the cells of the
/// triangulation, bounded edges like its interior edges and rays like its
/// boundary edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedCurve {
    pub vertices: Vec<(Rational, Rational)>,
    pub bounded: Vec<BoundedEdge>,
    pub rays: Vec<Ray>,
    /// Largest absolute vertex coordinate (at least 1), for drawing.
    pub scale: f64,
}

impl EmbeddedCurve {
    pub fn vertex_f64(&self, cell: usize) -> (f64, f64) {
        let (x, y) = &self.vertices[cell];
        (x.to_f64().unwrap_or(0.0), y.to_f64().unwrap_or(0.0))
    }

    /// Outgoing primitive directions at the vertex of `cell`.
    pub fn directions_at(&self, cell: usize) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for e in &self.bounded {
            if e.cells[0] == cell {
                out.push(e.direction);
            } else if e.cells[1] == cell {
                out.push((-e.direction.0, -e.direction.1));
            }
        }
        out.extend(self.rays.iter().filter(|r| r.cell == cell).map(|r| r.direction));
        out
    }
}

fn diff(p: LatticePoint, q: LatticePoint) -> (i64, i64) {
    (i64::from(p.x) - i64::from(q.x), i64::from(p.y) - i64::from(q.y))
}

/// The vertex dual to a unimodular cell, as a pair of linear functionals of
/// the heights. Solves `⟨x, q−p⟩ = h(p) − h(q)` and `⟨x, r−p⟩ = h(p) − h(r)`.
pub fn vertex_functionals(lattice: &Lattice, cell: Cell) -> [LinearFunctional; 2] {
    let [p, q, r] = cell;
    let (a, b) = diff(lattice.point(q), lattice.point(p));
    let (c, d) = diff(lattice.point(r), lattice.point(p));
    let det = a * d - b * c;
    assert_eq!(det.abs(), 1, "cell {cell:?} is not unimodular");
    // inverse of [[a, b], [c, d]] is [[d, −b], [−c, a]] / det
    let n = lattice.len();
    let mut fx = LinearFunctional::zero(n);
    let mut fy = LinearFunctional::zero(n);
    // right-hand sides: e1 = h(p) − h(q), e2 = h(p) − h(r)
    let rhs = [(p, 1), (q, -1), (p, 1), (r, -1)];
    for (slot, &(idx, s)) in rhs.iter().enumerate() {
        let (cx, cy) = if slot < 2 { (d, -c) } else { (-b, a) };
        fx.add_term(idx, &rat(s * cx * det));
        fy.add_term(idx, &rat(s * cy * det));
    }
    [fx, fy]
}

/// Primitive direction perpendicular to the dual edge `{v1, v2}` pointing
/// away from the vertex of a cell whose third point is `apex`.
fn outward_direction(lattice: &Lattice, v1: PointIndex, v2: PointIndex, apex: PointIndex, conv: Convention) -> (i64, i64) {
    let (ex, ey) = diff(lattice.point(v2), lattice.point(v1));
    let w = (-ey, ex);
    let (ax, ay) = diff(lattice.point(apex), lattice.point(v1));
    let s = w.0 * ax + w.1 * ay;
    // min: the apex term must stop being minimal along the edge; max: maximal
    let flip = match conv {
        Convention::Min => s < 0,
        Convention::Max => s > 0,
    };
    if flip {
        (-w.0, -w.1)
    } else {
        w
    }
}

/// Lattice length of the bounded edge dual to interior edge `edge`, as a
/// linear functional of the heights.
pub fn edge_length_functional(t: &Triangulation, edge: usize, conv: Convention) -> LinearFunctional {
    let lattice = t.lattice();
    let table = t.edge_table();
    let e = &table.interior[edge];
    let cells = t.cells();
    let [ax, ay] = vertex_functionals(&lattice, cells[e.cells[0]]);
    let [bx, by] = vertex_functionals(&lattice, cells[e.cells[1]]);
    let w = outward_direction(&lattice, e.endpoints[0], e.endpoints[1], e.apexes[0], conv);
    let norm = rat(w.0 * w.0 + w.1 * w.1);
    let (dx, dy) = (bx.sub(&ax), by.sub(&ay));
    let mut out = LinearFunctional::zero(lattice.len());
    for i in 0..lattice.len() {
        out.coefficients[i] = (&dx.coefficients[i] * rat(w.0) + &dy.coefficients[i] * rat(w.1)) / &norm;
    }
    out.constant = (&dx.constant * rat(w.0) + &dy.constant * rat(w.1)) / &norm;
    out
}

/// Embeds the curve dual to `t` for heights `h` that induce `t`.
pub fn embed_curve(t: &Triangulation, h: &HeightVector, conv: Convention) -> Result<EmbeddedCurve, EmbedError> {
    let lattice = t.lattice();
    if h.len() != lattice.len() {
        return Err(EmbedError::Length { expected: lattice.len(), found: h.len() });
    }
    match induced_subdivision(t.degree(), h, conv) {
        Ok(s) if s == *t => {}
        _ => return Err(EmbedError::NotInduced(conv)),
    }
    Ok(embed_unchecked(t, h, conv))
}

pub(crate) fn embed_unchecked(t: &Triangulation, h: &HeightVector, conv: Convention) -> EmbeddedCurve {
    let lattice = t.lattice();
    let table = t.edge_table();
    let vertices: Vec<(Rational, Rational)> = t
        .cells()
        .iter()
        .map(|&c| {
            let [fx, fy] = vertex_functionals(&lattice, c);
            (fx.eval(h), fy.eval(h))
        })
        .collect();
    let bounded = table
        .interior
        .iter()
        .map(|e| {
            let w = outward_direction(&lattice, e.endpoints[0], e.endpoints[1], e.apexes[0], conv);
            let (a, b) = (&vertices[e.cells[0]], &vertices[e.cells[1]]);
            let length = ((&b.0 - &a.0) * rat(w.0) + (&b.1 - &a.1) * rat(w.1)) / rat(w.0 * w.0 + w.1 * w.1);
            BoundedEdge { cells: e.cells, dual: e.endpoints, direction: w, length }
        })
        .collect();
    let rays = table
        .boundary
        .iter()
        .map(|e| Ray {
            cell: e.cell,
            dual: e.endpoints,
            direction: outward_direction(&lattice, e.endpoints[0], e.endpoints[1], e.apex, conv),
        })
        .collect();
    let scale = vertices
        .iter()
        .flat_map(|(x, y)| [x.abs(), y.abs()])
        .map(|v| v.to_f64().unwrap_or(0.0))
        .fold(1.0, f64::max);
    EmbeddedCurve { vertices, bounded, rays, scale }
}

/// The cell `{(1,1), (2,1), (1,2)}`, dual to the vertex of the shape-(C)
/// bitangent, as points in standard position.
pub const MOTIF_CELL: [LatticePoint; 3] = [LatticePoint::new(1, 1), LatticePoint::new(2, 1), LatticePoint::new(1, 2)];

/// How the indices of a motif were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSource {
    /// Read off the apexes of the three cells adjacent to the motif cell.
    Adjacent,
    /// Supplied by the caller.
    Explicit,
}

/// An oriented occurrence of the shape-(C) motif.
///
/// `orientation` maps standard positions to actual lattice points; `i`, `j`,
/// `k` name the boundary points `(0,i)`, `(j,0)`, `(k,4−k)` in standard
/// position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MotifC {
    pub orientation: S3Element,
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub source: IndexSource,
}

impl MotifC {
    pub fn with_indices(self, i: u32, j: u32, k: u32) -> Self {
        Self { i, j, k, source: IndexSource::Explicit, ..self }
    }

    /// Actual lattice point at standard position `(x, y)`.
    pub fn point(&self, x: u32, y: u32) -> PointIndex {
        self.orientation.apply(4, LatticePoint::new(x, y)).index()
    }

    /// The three edges of the motif cell, in the order of `μ₁, μ₂, μ₃`:
    /// `{(1,1),(1,2)}`, `{(1,1),(2,1)}`, `{(2,1),(1,2)}`.
    pub fn edges(&self) -> [[PointIndex; 2]; 3] {
        let sorted = |a: PointIndex, b: PointIndex| if a < b { [a, b] } else { [b, a] };
        let (p11, p21, p12) = (self.point(1, 1), self.point(2, 1), self.point(1, 2));
        [sorted(p11, p12), sorted(p11, p21), sorted(p21, p12)]
    }
}

impl fmt::Display for MotifC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src = match self.source {
            IndexSource::Adjacent => "adjacent cells",
            IndexSource::Explicit => "explicit",
        };
        write!(f, "orientation {} i={} j={} k={} ({src})", self.orientation, self.i, self.j, self.k)
    }
}

fn motif_cell_indices() -> Cell {
    let mut c = MOTIF_CELL.map(LatticePoint::index);
    c.sort_unstable();
    c
}

/// Occurrences of the shape-(C) motif, one per rotation of the standard
/// position, with indices taken from the adjacent cells. Empty for degrees
/// other than 4 and when the motif cell is absent.
pub fn find_motif_c(t: &Triangulation) -> Vec<MotifC> {
    if t.degree() != 4 || !t.contains_cell(motif_cell_indices()) {
        return Vec::new();
    }
    let table = t.edge_table();
    let cells = t.cells();
    let lattice = t.lattice();
    let center = motif_cell_indices();
    let apex_across = |edge: [PointIndex; 2]| -> LatticePoint {
        let e = table.interior_index(edge).map(|id| &table.interior[id]).expect("motif cell edges are interior");
        let side = if cells[e.cells[0]] == center { 1 } else { 0 };
        lattice.point(e.apexes[side])
    };
    S3Element::rotations()
        .into_iter()
        .map(|g| {
            let inverse = S3Element::all()
                .into_iter()
                .find(|h| {
                    lattice.points().iter().all(|&p| h.apply(4, g.apply(4, p)) == p)
                })
                .expect("group has inverses");
            let m = MotifC { orientation: g, i: 0, j: 0, k: 0, source: IndexSource::Adjacent };
            let [e1, e2, e3] = m.edges();
            let (a1, a2, a3) =
                (inverse.apply(4, apex_across(e1)), inverse.apply(4, apex_across(e2)), inverse.apply(4, apex_across(e3)));
            debug_assert!(a1.x == 0 && a2.y == 0 && a3.x + a3.y == 4);
            MotifC { i: a1.y, j: a2.x, k: a3.x, ..m }
        })
        .collect()
}

/// The lattice lengths `μ₁, μ₂, μ₃` of the bounded edges at the motif vertex
/// in directions `−e₁`, `−e₂`, `e₁+e₂` (standard position), as functionals of
/// the heights.
pub fn mu_functionals(t: &Triangulation, m: &MotifC, conv: Convention) -> Result<[LinearFunctional; 3], MotifError> {
    if t.degree() != 4 {
        return Err(MotifError::Degree(t.degree()));
    }
    let mut cell = [m.point(1, 1), m.point(2, 1), m.point(1, 2)];
    cell.sort_unstable();
    if !t.contains_cell(cell) {
        return Err(MotifError::MissingCell(cell));
    }
    let table = t.edge_table();
    Ok(m.edges().map(|e| {
        let id = table.interior_index(e).expect("motif cell edges are interior");
        edge_length_functional(t, id, conv)
    }))
}

/// Where a curve sits relative to genericity condition (i) at the motif.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NongenericLocus {
    /// The shortest edge at the motif vertex is unique.
    Generic,
    /// Two shortest edges of equal length; `equal` are the indices (0-based)
    /// of the equal functionals and `larger` the remaining one.
    TwoEqual { equal: [usize; 2], larger: usize },
    AllEqual,
}

impl fmt::Display for NongenericLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NongenericLocus::Generic => f.write_str("generic"),
            NongenericLocus::TwoEqual { equal, larger } => {
                write!(f, "mu{} > mu{} = mu{}", larger + 1, equal[0] + 1, equal[1] + 1)
            }
            NongenericLocus::AllEqual => f.write_str("mu1 = mu2 = mu3"),
        }
    }
}

pub fn nongeneric_locus(
    t: &Triangulation,
    m: &MotifC,
    h: &HeightVector,
    conv: Convention,
) -> Result<NongenericLocus, MotifError> {
    let mu = mu_functionals(t, m, conv)?;
    let cone = secondary_cone(t, conv);
    if cone.iter().any(|f| !f.eval(h).is_positive()) {
        return Err(MotifError::OutsideCone);
    }
    let v: Vec<Rational> = mu.iter().map(|f| f.eval(h)).collect();
    let min = v.iter().min().expect("three values").clone();
    let at_min: Vec<usize> = (0..3).filter(|&i| v[i] == min).collect();
    Ok(match at_min.as_slice() {
        [_] => NongenericLocus::Generic,
        [a, b] => NongenericLocus::TwoEqual { equal: [*a, *b], larger: 3 - a - b },
        _ => NongenericLocus::AllEqual,
    })
}

/// Whether no curve dual to `t` satisfies genericity condition (i): two of
/// the motif lengths agree on the whole open cone and the third is never
/// shorter.
pub fn is_nongeneric_triangulation(t: &Triangulation) -> bool {
    let Some(m) = find_motif_c(t).into_iter().next() else {
        return false;
    };
    let mu = mu_functionals(t, &m, Convention::Min).expect("motif was found");
    let cone = secondary_cone(t, Convention::Min);
    [(0, 1, 2), (0, 2, 1), (1, 2, 0)].into_iter().any(|(a, b, c)| {
        lp_forced_equality(&cone, &mu[a].sub(&mu[b])) && lp_forced_nonnegative(&cone, &mu[c].sub(&mu[a]))
    })
}

/// Whether the embedding is balanced at every vertex and every bounded edge
/// is perpendicular to its dual edge.
pub fn check_duality(t: &Triangulation, curve: &EmbeddedCurve) -> bool {
    let lattice = t.lattice();
    let balanced = (0..t.cells().len()).all(|c| {
        let dirs = curve.directions_at(c);
        dirs.len() == 3 && dirs.iter().fold((0, 0), |acc, d| (acc.0 + d.0, acc.1 + d.1)) == (0, 0)
    });
    let perpendicular = curve.bounded.iter().all(|e| {
        let (ex, ey) = diff(lattice.point(e.dual[1]), lattice.point(e.dual[0]));
        let (a, b) = (&curve.vertices[e.cells[0]], &curve.vertices[e.cells[1]]);
        let along = (&b.0 - &a.0) * rat(ex) + (&b.1 - &a.1) * rat(ey);
        e.direction.0 * ex + e.direction.1 * ey == 0 && along.is_zero()
    });
    balanced && perpendicular
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::staircase_heights;

    #[test]
    fn line_vertex_and_rays() {
        let t = Triangulation::new(1, [[0, 1, 2]]).unwrap();
        let curve = embed_curve(&t, &HeightVector::zeros(1), Convention::Max).unwrap();
        assert_eq!(curve.vertices[0], (rat(0), rat(0)));
        let mut dirs: Vec<_> = curve.rays.iter().map(|r| r.direction).collect();
        dirs.sort_unstable();
        assert_eq!(dirs, vec![(-1, 0), (0, -1), (1, 1)]);
    }

    #[test]
    fn staircase_embedding_is_dual() {
        for d in 1..=4 {
            let t = Triangulation::staircase(d);
            let h = staircase_heights(d);
            for conv in [Convention::Min, Convention::Max] {
                let h = if conv == Convention::Min { h.clone() } else { -&h };
                let curve = embed_curve(&t, &h, conv).unwrap();
                assert!(check_duality(&t, &curve));
                assert!(curve.bounded.iter().all(|e| e.length.is_positive()));
                for (id, e) in curve.bounded.iter().enumerate() {
                    assert_eq!(edge_length_functional(&t, id, conv).eval(&h), e.length);
                }
            }
        }
    }

    #[test]
    fn wrong_heights_rejected() {
        let t = Triangulation::staircase(2);
        let err = embed_curve(&t, &-&staircase_heights(2), Convention::Min).unwrap_err();
        assert_eq!(err, EmbedError::NotInduced(Convention::Min));
    }

    #[test]
    fn staircase_has_motif() {
        let t = Triangulation::staircase(4);
        let motifs = find_motif_c(&t);
        assert_eq!(motifs.len(), 3);
        assert_eq!(motifs[0].orientation, S3Element::IDENTITY);
        assert!(find_motif_c(&Triangulation::staircase(2)).is_empty());
        assert!(!is_nongeneric_triangulation(&Triangulation::staircase(3)));
    }

    /// With `λ` the min-convention heights, `μ₁ = λ21 − 2λ11 + λ0i −
    /// (i−1)(λ12 − λ11)`.
    #[test]
    fn mu_one_closed_form() {
        let t = Triangulation::staircase(4);
        let m = find_motif_c(&t)[0];
        let mu = mu_functionals(&t, &m, Convention::Min).unwrap();
        let idx = |x, y| LatticePoint::new(x, y).index();
        let i = i64::from(m.i);
        let mut expected = LinearFunctional::zero(15);
        expected.add_term(idx(2, 1), &rat(1));
        expected.add_term(idx(1, 1), &rat(-2 + (i - 1)));
        expected.add_term(idx(0, m.i), &rat(1));
        expected.add_term(idx(1, 2), &rat(-(i - 1)));
        assert_eq!(mu[0], expected);
    }
}
