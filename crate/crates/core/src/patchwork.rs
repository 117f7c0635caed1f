//! Combinatorial patchworking: the real part of a real tropical curve, its
//! ovals and nesting, and the resulting number of real bitangents.
//!
//! The real part lives in four reflected copies of the curve, one per
//! quadrant `ε ∈ Z₂²`. A copy of the edge dual to `{v₁, v₂}` is present in
//! quadrant `ε` iff the extended signs of `v₁` and `v₂` differ there. Each
//! cell copy meets either zero or two present edge copies, so the real part is
//! a disjoint union of cycles. Rays leave the quadrant and re-enter in the
//! quadrant glued along the corresponding side of the triangle.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::curvegeom::{embed_curve, EmbedError};
use crate::heights::{Convention, HeightVector};
use crate::lattice::{Parity, PointIndex};
use crate::triangulation::{Side, Triangulation};
use crate::twist::{SignDistribution, TwistTable};
use crate::unionfind::UnionFind;

/// Quadrant offset under which a ray on `side` is glued.
pub fn gluing_offset(side: Side) -> Parity {
    match side {
        Side::Bottom => Parity::new(0, 1),
        Side::Left => Parity::new(1, 0),
        Side::Hypotenuse => Parity::new(1, 1),
    }
}

pub type RealNode = (usize, Parity);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealPartGraph {
    /// `(cell, quadrant)` pairs carrying a piece of the real part, sorted.
    pub nodes: Vec<RealNode>,
    /// One link per present copy of an interior edge, `(edge id, quadrant)`.
    pub bounded_links: Vec<(RealNode, RealNode)>,
    /// One link per present copy of a boundary edge; the second node is in
    /// the glued quadrant.
    pub ray_links: Vec<(RealNode, RealNode)>,
}

impl RealPartGraph {
    fn node_id(&self, node: RealNode) -> usize {
        self.nodes.binary_search(&node).expect("link endpoint is a node")
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(a, b) in self.bounded_links.iter().chain(&self.ray_links) {
            deg[self.node_id(a)] += 1;
            deg[self.node_id(b)] += 1;
        }
        deg
    }

    /// Component label of every node.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.nodes.len());
        for &(a, b) in self.bounded_links.iter().chain(&self.ray_links) {
            uf.union(self.node_id(a), self.node_id(b));
        }
        let mut labels = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        let mut out = Vec::with_capacity(self.nodes.len());
        for i in 0..self.nodes.len() {
            let r = uf.find(i);
            if labels[r] == usize::MAX {
                labels[r] = next;
                next += 1;
            }
            out.push(labels[r]);
        }
        out
    }

    pub fn num_components(&self) -> usize {
        self.components().iter().copied().max().map_or(0, |m| m + 1)
    }
}

/// Builds the real part of `(t, δ)` for any degree.
pub fn real_part(t: &Triangulation, delta: &SignDistribution) -> RealPartGraph {
    let lattice = t.lattice();
    let table = t.edge_table();
    let present = |v1: PointIndex, v2: PointIndex, eps: Parity| {
        let p = (delta.sign(v1) < 0) as u32 ^ eps.pairing(lattice.point(v1));
        let q = (delta.sign(v2) < 0) as u32 ^ eps.pairing(lattice.point(v2));
        p != q
    };
    let mut bounded_links = Vec::new();
    let mut ray_links = Vec::new();
    for eps in Parity::ALL {
        for e in &table.interior {
            if present(e.endpoints[0], e.endpoints[1], eps) {
                bounded_links.push(((e.cells[0], eps), (e.cells[1], eps)));
            }
        }
        for e in &table.boundary {
            let glued = eps.add(gluing_offset(e.side));
            // each glued pair once
            if eps < glued && present(e.endpoints[0], e.endpoints[1], eps) {
                debug_assert!(present(e.endpoints[0], e.endpoints[1], glued));
                ray_links.push(((e.cell, eps), (e.cell, glued)));
            }
        }
    }
    let mut nodes: Vec<RealNode> = bounded_links.iter().chain(&ray_links).flat_map(|&(a, b)| [a, b]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    RealPartGraph { nodes, bounded_links, ray_links }
}

/// Number of connected components of the real part.
pub fn count_ovals(t: &Triangulation, delta: &SignDistribution) -> usize {
    real_part(t, delta).num_components()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RealTopology {
    pub ovals: usize,
    /// Only ever true when `ovals == 2`.
    pub nested: bool,
}

impl RealTopology {
    pub fn new(ovals: usize, dividing: bool) -> Self {
        Self { ovals, nested: ovals == 2 && dividing }
    }
}

impl fmt::Display for RealTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.ovals, self.nested) {
            (1, _) => f.write_str("1 oval"),
            (n, true) => write!(f, "{n} nested ovals"),
            (n, false) => write!(f, "{n} ovals"),
        }
    }
}

pub fn topology(t: &Triangulation, delta: &SignDistribution) -> RealTopology {
    let ovals = count_ovals(t, delta);
    let dividing = ovals == 2 && TwistTable::new(t).is_dividing(delta.bits());
    RealTopology::new(ovals, dividing)
}

/// Number of real bitangents of a smooth real plane quartic with the given
/// topology: 4, 4, 8, 16, 28 for one oval, two nested ovals, two, three and
/// four ovals.
pub fn real_bitangent_count(rt: RealTopology) -> Option<u32> {
    match (rt.ovals, rt.nested) {
        (1, _) => Some(4),
        (2, true) => Some(4),
        (2, false) => Some(8),
        (3, _) => Some(16),
        (4, _) => Some(28),
        _ => None,
    }
}

/// Each lifting bitangent class contributes four real bitangents.
pub fn lifting_class_count(rt: RealTopology) -> Option<u32> {
    real_bitangent_count(rt).map(|n| n / 4)
}

/// Precomputed per-triangulation data for evaluating many sign vectors.
#[derive(Debug, Clone)]
pub struct PatchworkTable {
    /// `(endpoint bit mask, quadrant parity constant, node a, node b)`;
    /// nodes are `cell * 4 + quadrant`.
    links: Vec<(u32, u32, u8, u8)>,
    nodes: usize,
    twist: TwistTable,
}

impl PatchworkTable {
    pub fn new(t: &Triangulation) -> Self {
        let lattice = t.lattice();
        let table = t.edge_table();
        let node = |cell: usize, eps: Parity| (cell * 4 + eps.code()) as u8;
        assert!(t.cells().len() * 4 <= 256);
        let mut links = Vec::new();
        for eps in Parity::ALL {
            for e in &table.interior {
                let [v1, v2] = e.endpoints;
                let c = eps.pairing(lattice.point(v1)) ^ eps.pairing(lattice.point(v2));
                links.push(((1 << v1) | (1 << v2), c, node(e.cells[0], eps), node(e.cells[1], eps)));
            }
            for e in &table.boundary {
                let glued = eps.add(gluing_offset(e.side));
                if eps < glued {
                    let [v1, v2] = e.endpoints;
                    let c = eps.pairing(lattice.point(v1)) ^ eps.pairing(lattice.point(v2));
                    links.push(((1 << v1) | (1 << v2), c, node(e.cell, eps), node(e.cell, glued)));
                }
            }
        }
        Self { links, nodes: t.cells().len() * 4, twist: TwistTable::new(t) }
    }

    pub fn twist(&self) -> &TwistTable {
        &self.twist
    }

    #[inline]
    pub fn count_ovals(&self, bits: u32) -> usize {
        let mut parent = [0u8; 256];
        for (i, p) in parent.iter_mut().enumerate().take(self.nodes) {
            *p = i as u8;
        }
        fn find(parent: &mut [u8; 256], mut x: u8) -> u8 {
            while parent[x as usize] != x {
                let up = parent[parent[x as usize] as usize];
                parent[x as usize] = up;
                x = up;
            }
            x
        }
        // in a 2-regular graph #nodes = #links, so #cycles = #links − #merges
        let mut links = 0;
        let mut merges = 0;
        for &(mask, c, a, b) in &self.links {
            if ((bits & mask).count_ones() + c) & 1 == 1 {
                links += 1;
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra as usize] = rb;
                    merges += 1;
                }
            }
        }
        links - merges
    }

    #[inline]
    pub fn topology(&self, bits: u32) -> RealTopology {
        let ovals = self.count_ovals(bits);
        let dividing = ovals == 2 && self.twist.is_dividing(bits);
        RealTopology::new(ovals, dividing)
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

type Pt = (f64, f64);

/// SVG drawing of the real part in the four reflected triangle charts.
///
/// With heights, the real part is drawn from the embedded tropical curve
/// pushed into the charts by the moment map; without, every piece of a cell
/// copy joins the midpoints of its two sign-changing edges. Each oval is one
/// `<path class="oval">` element.
pub fn render_svg(
    t: &Triangulation,
    delta: &SignDistribution,
    heights: Option<(&HeightVector, Convention)>,
) -> Result<String, RenderError> {
    let lattice = t.lattice();
    let d = f64::from(t.degree());
    let graph = real_part(t, delta);
    let comps = graph.components();
    let num = comps.iter().copied().max().map_or(0, |m| m + 1);
    let table = t.edge_table();

    let reflect = |(x, y): Pt, eps: Parity| -> Pt {
        (if eps.first() == 1 { -x } else { x }, if eps.second() == 1 { -y } else { y })
    };
    let lp = |i: PointIndex| {
        let p = lattice.point(i);
        (f64::from(p.x), f64::from(p.y))
    };
    let mid = |a: PointIndex, b: PointIndex| {
        let (p, q) = (lp(a), lp(b));
        ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0)
    };

    // polylines per link, in chart coordinates
    let mut pieces: Vec<Vec<Vec<Pt>>> = vec![Vec::new(); num];
    match heights {
        None => {
            // node piece: midpoint of one sign-changing edge to the other
            let mut ends: Vec<Vec<Pt>> = vec![Vec::new(); graph.nodes.len()];
            for (eid, e) in table.interior.iter().enumerate() {
                let _ = eid;
                for eps in Parity::ALL {
                    let key = ((e.cells[0], eps), (e.cells[1], eps));
                    if graph.bounded_links.contains(&key) {
                        let m = reflect(mid(e.endpoints[0], e.endpoints[1]), eps);
                        ends[graph.node_id(key.0)].push(m);
                        ends[graph.node_id(key.1)].push(m);
                    }
                }
            }
            for e in &table.boundary {
                for eps in Parity::ALL {
                    let glued = eps.add(gluing_offset(e.side));
                    let key = if eps < glued { ((e.cell, eps), (e.cell, glued)) } else { ((e.cell, glued), (e.cell, eps)) };
                    if graph.ray_links.contains(&key) {
                        let m = reflect(mid(e.endpoints[0], e.endpoints[1]), eps);
                        ends[graph.node_id((e.cell, eps))].push(m);
                    }
                }
            }
            for (i, pts) in ends.into_iter().enumerate() {
                pieces[comps[i]].push(pts);
            }
        }
        Some((h, convention)) => {
            let curve = embed_curve(t, h, convention)?;
            let moment = |(x, y): (f64, f64)| -> Pt {
                // scale so that the curve fills the chart
                let (x, y) = (x / curve.scale, y / curve.scale);
                let m = x.max(y).max(0.0);
                let (ex, ey, e0) = ((x - m).exp(), (y - m).exp(), (-m).exp());
                let s = ex + ey + e0;
                (d * ex / s, d * ey / s)
            };
            let sample = |a: Pt, b: Pt, eps: Parity| -> Vec<Pt> {
                (0..=24)
                    .map(|k| {
                        let s = f64::from(k) / 24.0;
                        reflect(moment((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1))), eps)
                    })
                    .collect()
            };
            for (eid, e) in table.interior.iter().enumerate() {
                for eps in Parity::ALL {
                    let key = ((e.cells[0], eps), (e.cells[1], eps));
                    if graph.bounded_links.contains(&key) {
                        let (a, b) = (curve.vertex_f64(e.cells[0]), curve.vertex_f64(e.cells[1]));
                        let _ = eid;
                        pieces[comps[graph.node_id(key.0)]].push(sample(a, b, eps));
                    }
                }
            }
            for (bid, e) in table.boundary.iter().enumerate() {
                for eps in Parity::ALL {
                    let glued = eps.add(gluing_offset(e.side));
                    let key = if eps < glued { ((e.cell, eps), (e.cell, glued)) } else { ((e.cell, glued), (e.cell, eps)) };
                    if graph.ray_links.contains(&key) {
                        let a = curve.vertex_f64(e.cell);
                        let (dx, dy) = curve.rays[bid].direction;
                        let far = 60.0 * curve.scale;
                        let b = (a.0 + far * dx as f64, a.1 + far * dy as f64);
                        pieces[comps[graph.node_id((e.cell, eps))]].push(sample(a, b, eps));
                    }
                }
            }
        }
    }

    let size = 400.0;
    let scale = size / (2.0 * d + 1.0);
    let to_svg = |(x, y): Pt| (size / 2.0 + x * scale, size / 2.0 - y * scale);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    // charts: the triangulation reflected into each quadrant
    let _ = writeln!(out, r#"<g class="charts" stroke="rgb(200,200,200)" stroke-width="1" fill="none">"#);
    for eps in Parity::ALL {
        for cell in t.cells() {
            let pts: Vec<String> = cell
                .iter()
                .map(|&v| {
                    let (x, y) = to_svg(reflect(lp(v), eps));
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(out, r#"<polygon points="{}"/>"#, pts.join(" "));
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="signs">"#);
    for eps in Parity::ALL {
        for (i, p) in lattice.points().iter().enumerate() {
            let (x, y) = to_svg(reflect(lp(i), eps));
            let negative = (delta.sign(i) < 0) as u32 ^ eps.pairing(*p) == 1;
            let fill = if negative { "white" } else { "black" };
            let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" stroke="black" fill="{fill}"/>"#);
        }
    }
    let _ = writeln!(out, "</g>");
    let palette = ["rgb(200,30,30)", "rgb(30,90,200)", "rgb(20,150,60)", "rgb(200,120,0)", "rgb(140,40,160)"];
    for (k, comp) in pieces.iter().enumerate() {
        let mut data = String::new();
        for poly in comp {
            for (j, &p) in poly.iter().enumerate() {
                let (x, y) = to_svg(p);
                let _ = write!(data, "{}{x:.3},{y:.3} ", if j == 0 { "M" } else { "L" });
            }
        }
        let _ = writeln!(
            out,
            r#"<path class="oval" stroke="{}" stroke-width="2.5" fill="none" d="{}"/>"#,
            palette[k % palette.len()],
            data.trim_end()
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
