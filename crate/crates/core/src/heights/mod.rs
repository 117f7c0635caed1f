//! Exact-rational height vectors and the regular subdivisions they induce.
//!
//! Everything in here is exact. A height vector assigns a rational number to
//! every lattice point of `dΔ₂`; lifting the points to these heights and
//! projecting the lower (min convention) or upper (max convention) hull gives
//! the induced subdivision. The set of heights inducing a fixed unimodular
//! triangulation is an open cone cut out by one strict inequality per
//! interior edge.

pub mod simplex;

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{num_points, Lattice, LatticePoint};
use crate::triangulation::{orient, Triangulation, Violation};
use simplex::{LinearProgram, LpOutcome};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// Lower hull; the tropical polynomial is a minimum.
    #[default]
    Min,
    /// Upper hull; the tropical polynomial is a maximum.
    Max,
}

impl FromStr for Convention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Convention::Min),
            "max" => Ok(Convention::Max),
            other => Err(format!("unknown convention {other:?} (expected min or max)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeightVector(pub Vec<Rational>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeightParseError {
    #[error("entry {index} ({text:?}) is not a rational number")]
    Entry { index: usize, text: String },
}

impl HeightVector {
    pub fn zeros(degree: u32) -> Self {
        HeightVector(vec![Rational::zero(); num_points(degree)])
    }

    pub fn from_fn(degree: u32, f: impl Fn(LatticePoint) -> Rational) -> Self {
        HeightVector(Lattice::new(degree).points().iter().map(|&p| f(p)).collect())
    }

    pub fn from_integers(values: &[i64]) -> Self {
        HeightVector(values.iter().map(|&v| rat(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The degree `d` with `len = (d+1)(d+2)/2`, if any.
    pub fn degree(&self) -> Option<u32> {
        (1..64).find(|&d| num_points(d) == self.len())
    }

    /// Comma-separated rationals, e.g. `6,3,1` or `5/2,-1,0`.
    pub fn parse(text: &str) -> Result<Self, HeightParseError> {
        text.trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .enumerate()
            .map(|(index, s)| {
                Rational::from_str(s.trim()).map_err(|_| HeightParseError::Entry { index, text: s.trim().to_string() })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(HeightVector)
    }

    /// Positive multiple with integer entries.
    pub fn to_integral(&self) -> HeightVector {
        let mut lcm = BigInt::one();
        for v in &self.0 {
            let d = v.denom();
            lcm = num_integer_lcm(&lcm, d);
        }
        HeightVector(self.0.iter().map(|v| v * Rational::from_integer(lcm.clone())).collect())
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x = a.abs();
    let mut y = b.abs();
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    (a * b).abs() / x
}

impl Neg for &HeightVector {
    type Output = HeightVector;
    fn neg(self) -> HeightVector {
        HeightVector(self.0.iter().map(|v| -v).collect())
    }
}

impl fmt::Display for HeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// `coefficients · h + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearFunctional {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl LinearFunctional {
    pub fn zero(len: usize) -> Self {
        Self { coefficients: vec![Rational::zero(); len], constant: Rational::zero() }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn eval(&self, h: &HeightVector) -> Rational {
        assert_eq!(h.len(), self.len(), "height vector length mismatch");
        self.coefficients.iter().zip(&h.0).fold(self.constant.clone(), |acc, (c, v)| {
            if c.is_zero() {
                acc
            } else {
                acc + c * v
            }
        })
    }

    pub fn add_term(&mut self, index: usize, coefficient: &Rational) {
        self.coefficients[index] += coefficient;
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coefficients.iter().all(Zero::is_zero)
    }

    pub fn sub(&self, other: &LinearFunctional) -> LinearFunctional {
        LinearFunctional {
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect(),
            constant: &self.constant - &other.constant,
        }
    }

    pub fn negated(&self) -> LinearFunctional {
        LinearFunctional {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            constant: -&self.constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubdivisionError {
    #[error("height vector has {found} entries, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("heights are not generic: points {points:?} lie on one lifted face")]
    NonGeneric { points: Vec<usize> },
    #[error("induced subdivision is not a unimodular triangulation: {0}")]
    NotTriangulation(Violation),
}

/// The regular subdivision of `dΔ₂` induced by `h`, provided it is a
/// unimodular triangulation.
pub fn induced_subdivision(
    degree: u32,
    h: &HeightVector,
    convention: Convention,
) -> Result<Triangulation, SubdivisionError> {
    let lattice = Lattice::new(degree);
    let n = lattice.len();
    if h.len() != n {
        return Err(SubdivisionError::Length { expected: n, found: h.len() });
    }
    let heights: Vec<Rational> = match convention {
        Convention::Min => h.0.clone(),
        Convention::Max => h.0.iter().map(|v| -v).collect(),
    };
    let pts = lattice.points();
    let mut cells = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let det = orient(pts[a], pts[b], pts[c]);
                if det.abs() != 1 {
                    continue;
                }
                let mut on_face = Vec::new();
                let mut is_face = true;
                for w in 0..n {
                    if w == a || w == b || w == c {
                        continue;
                    }
                    // integer barycentric coordinates since det = ±1
                    let lb = orient(pts[a], pts[w], pts[c]) * det;
                    let lc = orient(pts[a], pts[b], pts[w]) * det;
                    let la = 1 - lb - lc;
                    let interp = &heights[a] * rat(la) + &heights[b] * rat(lb) + &heights[c] * rat(lc);
                    if heights[w] < interp {
                        is_face = false;
                        break;
                    }
                    if heights[w] == interp {
                        on_face.push(w);
                    }
                }
                if !is_face {
                    continue;
                }
                if !on_face.is_empty() {
                    let mut points = vec![a, b, c];
                    points.extend(on_face);
                    points.sort_unstable();
                    return Err(SubdivisionError::NonGeneric { points });
                }
                cells.push([a, b, c]);
            }
        }
    }
    Triangulation::new(degree, cells).map_err(SubdivisionError::NotTriangulation)
}

/// One strict inequality `f(h) > 0` per interior edge (in edge-table order)
/// whose conjunction defines the open secondary cone of `t`.
///
/// For an interior edge `{v₁, v₂}` with apexes `a₁, a₂` the four points
/// satisfy `a₁ + a₂ = α v₁ + β v₂` with `α + β = 2`; under the min
/// convention the fold across the edge is convex iff
/// `h(a₁) + h(a₂) − α h(v₁) − β h(v₂) > 0`.
pub fn secondary_cone(t: &Triangulation, convention: Convention) -> Vec<LinearFunctional> {
    let lattice = t.lattice();
    let n = lattice.len();
    t.edge_table()
        .interior
        .iter()
        .map(|e| {
            let [v1, v2] = e.endpoints;
            let [a1, a2] = e.apexes;
            let (p1, p2) = (lattice.point(v1), lattice.point(v2));
            let (q1, q2) = (lattice.point(a1), lattice.point(a2));
            let sx = i64::from(q1.x + q2.x) - 2 * i64::from(p1.x);
            let sy = i64::from(q1.y + q2.y) - 2 * i64::from(p1.y);
            let dx = i64::from(p2.x) - i64::from(p1.x);
            let dy = i64::from(p2.y) - i64::from(p1.y);
            let beta = if dx != 0 { sx / dx } else { sy / dy };
            debug_assert_eq!((sx, sy), (beta * dx, beta * dy));
            let alpha = 2 - beta;
            let mut f = LinearFunctional::zero(n);
            f.add_term(a1, &rat(1));
            f.add_term(a2, &rat(1));
            f.add_term(v1, &rat(-alpha));
            f.add_term(v2, &rat(-beta));
            match convention {
                Convention::Min => f,
                Convention::Max => f.negated(),
            }
        })
        .collect()
}

/// Looks for `h` with `f(h) > 0` for every `f` in `system`, by maximizing a
/// slack `s ≤ 1` subject to `f(h) ≥ s`. Returns a witness on success.
pub fn strictly_feasible(system: &[LinearFunctional]) -> Option<HeightVector> {
    let Some(first) = system.first() else {
        return Some(HeightVector(Vec::new()));
    };
    let n = first.len();
    // variables: h⁺ (n), h⁻ (n), s
    let mut lp = LinearProgram::new(2 * n + 1);
    lp.objective[2 * n] = rat(1);
    for f in system {
        let mut row = Vec::with_capacity(2 * n + 1);
        row.extend(f.coefficients.iter().map(|c| -c));
        row.extend(f.coefficients.iter().cloned());
        row.push(rat(1));
        lp.add_le(row, f.constant.clone());
    }
    let mut bound = vec![Rational::zero(); 2 * n + 1];
    bound[2 * n] = rat(1);
    lp.add_le(bound, rat(1));
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            let h = (0..n).map(|i| &x[i] - &x[n + i]).collect();
            Some(HeightVector(h))
        }
        _ => None,
    }
}

/// Regularity test; the certificate induces `t` under the min convention.
pub fn is_regular(t: &Triangulation) -> Option<HeightVector> {
    let cone = secondary_cone(t, Convention::Min);
    if cone.is_empty() {
        return Some(HeightVector::zeros(t.degree()));
    }
    let h = strictly_feasible(&cone)?.to_integral();
    debug_assert_eq!(induced_subdivision(t.degree(), &h, Convention::Min).as_ref(), Ok(t));
    Some(h)
}

/// Whether `g` vanishes identically on the open cone `{f > 0 : f ∈ cone}`.
pub fn lp_forced_equality(cone: &[LinearFunctional], g: &LinearFunctional) -> bool {
    let with = |extra: LinearFunctional| {
        let mut system = cone.to_vec();
        system.push(extra);
        strictly_feasible(&system).is_some()
    };
    !with(g.clone()) && !with(g.negated())
}

/// Whether `g ≥ 0` on the whole cone, i.e. `{cone, g < 0}` is infeasible.
pub fn lp_forced_nonnegative(cone: &[LinearFunctional], g: &LinearFunctional) -> bool {
    let mut system = cone.to_vec();
    system.push(g.negated());
    strictly_feasible(&system).is_none()
}

/// `x² + xy + y²`, which induces the staircase triangulation.
pub fn staircase_heights(degree: u32) -> HeightVector {
    HeightVector::from_fn(degree, |p| {
        let (x, y) = (i64::from(p.x), i64::from(p.y));
        rat(x * x + x * y + y * y)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_heights_induce_staircase() {
        for d in 1..=4 {
            let t = induced_subdivision(d, &staircase_heights(d), Convention::Min).unwrap();
            assert_eq!(t, Triangulation::staircase(d));
        }
    }

    #[test]
    fn paraboloid_heights_are_degenerate_on_the_square_grid() {
        let h = HeightVector::from_fn(4, |p| rat(i64::from(p.x * p.x + p.y * p.y)));
        assert!(matches!(induced_subdivision(4, &h, Convention::Min), Err(SubdivisionError::NonGeneric { .. })));
    }

    #[test]
    fn zero_heights_are_not_a_triangulation() {
        assert!(induced_subdivision(4, &HeightVector::zeros(4), Convention::Min).is_err());
        assert!(induced_subdivision(1, &HeightVector::zeros(1), Convention::Min).is_ok());
    }

    #[test]
    fn listed_weights_induce_a_triangulation() {
        let h = HeightVector::from_integers(&[6, 3, 1, 1, 0, 0, 3, 0, 1, 3, 14, 10, 8, 7, 7]);
        let t = induced_subdivision(4, &h, Convention::Min).unwrap();
        t.validate().unwrap();
        assert_eq!(t.cells().len(), 16);
    }

    #[test]
    fn min_max_duality() {
        let h = HeightVector::from_integers(&[5, 1, 2, 2, 0, 0, 4, 0, 1, 16, 7, 9, 12, 16, 33]);
        assert_eq!(induced_subdivision(4, &h, Convention::Min), induced_subdivision(4, &-&h, Convention::Max));
    }

    #[test]
    fn cone_functional_count_and_sign() {
        let t = Triangulation::staircase(4);
        let cone = secondary_cone(&t, Convention::Min);
        assert_eq!(cone.len(), 18);
        let h = staircase_heights(4);
        assert!(cone.iter().all(|f| f.eval(&h).is_positive()));
        assert!(secondary_cone(&Triangulation::staircase(1), Convention::Min).is_empty());
    }

    #[test]
    fn regularity_certificates() {
        for d in 1..=4 {
            let t = Triangulation::staircase(d);
            let h = is_regular(&t).unwrap();
            assert_eq!(induced_subdivision(d, &h, Convention::Min).unwrap(), t);
        }
    }

    #[test]
    fn forced_equality_trivial_cases() {
        let t = Triangulation::staircase(4);
        let cone = secondary_cone(&t, Convention::Min);
        assert!(lp_forced_equality(&cone, &LinearFunctional::zero(15)));
        assert!(!lp_forced_equality(&cone, &cone[0]));
        assert!(lp_forced_nonnegative(&cone, &cone[3]));
    }

    #[test]
    fn parse_heights() {
        let h = HeightVector::parse("6, 5/2,-1").unwrap();
        assert_eq!(h.0, vec![rat(6), Rational::new(5.into(), 2.into()), rat(-1)]);
        assert!(HeightVector::parse("1,x").is_err());
        assert_eq!(HeightVector::parse("[1,2,3]").unwrap().degree(), Some(1));
    }
}
