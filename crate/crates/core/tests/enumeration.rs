use std::collections::HashSet;

use tropical_quartics::heights::{induced_subdivision, is_regular, Convention};
use tropical_quartics::lattice::Lattice;
use tropical_quartics::triangulation::{enumerate_all, enumerate_unimodular, Cell, Triangulation};

/// Every unimodular triangulation of `dΔ₂` by trying all `d²`-subsets of
/// unimodular lattice triangles.
fn brute_force_triangulations(degree: u32) -> HashSet<Triangulation> {
    let lattice = Lattice::new(degree);
    let pts = lattice.points();
    let n = pts.len();
    let mut triangles: Vec<Cell> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (p, q, r) = (pts[a], pts[b], pts[c]);
                let det = (q.x as i64 - p.x as i64) * (r.y as i64 - p.y as i64)
                    - (q.y as i64 - p.y as i64) * (r.x as i64 - p.x as i64);
                if det.abs() == 1 {
                    triangles.push([a, b, c]);
                }
            }
        }
    }
    let k = (degree * degree) as usize;
    let mut found = HashSet::new();
    let mut chosen = Vec::new();
    fn rec(
        start: usize,
        k: usize,
        degree: u32,
        triangles: &[Cell],
        chosen: &mut Vec<Cell>,
        found: &mut HashSet<Triangulation>,
    ) {
        if chosen.len() == k {
            if let Ok(t) = Triangulation::new(degree, chosen.iter().copied()) {
                found.insert(t);
            }
            return;
        }
        for i in start..triangles.len() {
            chosen.push(triangles[i]);
            rec(i + 1, k, degree, triangles, chosen, found);
            chosen.pop();
        }
    }
    rec(0, k, degree, &triangles, &mut chosen, &mut found);
    found
}

#[test]
fn degree_two_matches_brute_force() {
    let oracle = brute_force_triangulations(2);
    let classes: HashSet<Triangulation> = oracle.iter().map(|t| t.canonical_form().triangulation).collect();
    let enumerated = enumerate_all(2);
    let orbit_total: usize = enumerated.iter().map(|c| c.orbit_size).sum();
    assert_eq!(orbit_total, oracle.len());
    assert_eq!(enumerated.len(), classes.len());
    for c in &enumerated {
        assert!(classes.contains(&c.triangulation));
    }
}

#[test]
fn degree_one() {
    let all = enumerate_all(1);
    assert_eq!(all.len(), 1);
    assert_eq!((all[0].aut_order, all[0].orbit_size), (6, 1));
}

#[test]
fn quartic_census_of_triangulations() {
    let unimodular = enumerate_unimodular(4);
    let regular = enumerate_all(4);
    assert_eq!(regular.len(), 1278);
    assert_eq!(regular.iter().map(|c| c.orbit_size).sum::<usize>(), 7422);
    println!("unimodular classes: {}, regular: {}", unimodular.len(), regular.len());
    for c in &regular {
        let t = &c.triangulation;
        t.validate().unwrap();
        assert_eq!(t.canonical_form().triangulation, *t);
        let table = t.edge_table();
        assert_eq!((t.cells().len(), table.interior.len(), table.boundary.len()), (16, 18, 12));
        assert_eq!(t.curve_graph().betti(), 3);
        let h = is_regular(t).unwrap();
        assert_eq!(&induced_subdivision(4, &h, Convention::Min).unwrap(), t);
    }
}
