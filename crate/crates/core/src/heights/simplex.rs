//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `maximize c·x subject to A x ≤ b, x ≥ 0`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Q = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Q>,
    pub rows: Vec<Vec<Q>>,
    pub rhs: Vec<Q>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self { objective: vec![Q::zero(); num_vars], rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `row·x ≤ rhs`.
    pub fn add_le(&mut self, row: Vec<Q>, rhs: Q) {
        assert_eq!(row.len(), self.num_vars());
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// Each row holds the coefficients of all columns followed by the rhs.
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    num_vars: usize,
    /// Columns `first_artificial..` are artificial.
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let needs_artificial: Vec<bool> = lp.rhs.iter().map(|b| b.is_negative()).collect();
        let num_art = needs_artificial.iter().filter(|&&a| a).count();
        let first_artificial = n + m;
        let width = n + m + num_art + 1;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_art = first_artificial;
        for i in 0..m {
            let mut row = vec![Q::zero(); width];
            let negate = needs_artificial[i];
            let sign = if negate { -Q::one() } else { Q::one() };
            for j in 0..n {
                row[j] = &lp.rows[i][j] * &sign;
            }
            row[n + i] = sign.clone();
            row[width - 1] = &lp.rhs[i] * &sign;
            if negate {
                row[next_art] = Q::one();
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(n + i);
            }
            rows.push(row);
        }
        Self { rows, basis, num_vars: n, first_artificial }
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(self.first_artificial + 1, Vec::len)
    }

    fn pivot(&mut self, cost: &mut [Q], r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !cost[c].is_zero() {
            let f = cost[c].clone();
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the reduced-cost row `cost` (entering
    /// columns have negative reduced cost). Columns `>= limit` never enter.
    /// Returns false when unbounded.
    fn iterate(&mut self, cost: &mut [Q], limit: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let Some(enter) = (0..limit).find(|&j| cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[rhs] / &row[enter];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(cost, r, enter),
                None => return false,
            }
        }
    }

    fn run(mut self, objective: &[Q]) -> LpOutcome {
        let width = self.width();
        let rhs = width - 1;
        if self.first_artificial < rhs {
            // phase 1: maximize -sum(artificials)
            let mut cost = vec![Q::zero(); width];
            for v in &mut cost[self.first_artificial..rhs] {
                *v = Q::one();
            }
            for i in 0..self.rows.len() {
                if self.basis[i] >= self.first_artificial {
                    for j in 0..width {
                        let v = self.rows[i][j].clone();
                        cost[j] -= v;
                    }
                }
            }
            self.iterate(&mut cost, rhs);
            if cost[rhs].is_negative() {
                return LpOutcome::Infeasible;
            }
            // drive remaining (zero-valued) artificials out of the basis
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                        Some(c) => {
                            self.pivot(&mut cost, r, c);
                            r += 1;
                        }
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
            let keep = self.first_artificial;
            for row in &mut self.rows {
                let b = row[rhs].clone();
                row.truncate(keep);
                row.push(b);
            }
        }
        let width = self.width();
        let rhs = width - 1;
        let mut cost = vec![Q::zero(); width];
        for (j, c) in objective.iter().enumerate() {
            cost[j] = -c.clone();
        }
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if !cost[b].is_zero() {
                let f = cost[b].clone();
                for j in 0..width {
                    let v = &f * &self.rows[i][j];
                    cost[j] -= v;
                }
            }
        }
        if !self.iterate(&mut cost, rhs) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); self.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_vars {
                x[b] = self.rows[i][rhs].clone();
            }
        }
        LpOutcome::Optimal { x, value: cost[rhs].clone() }
    }
}
