//! Exact two-phase simplex over rationals with Bland's rule.
//!
//! Small dense problems only: every system solved here has at most a few
//! dozen rows.

use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `maximize c·x` subject to `a_r·x (rel) b_r`, with `x_j ≥ 0` unless
/// `free[j]`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<(Vec<Rational>, Relation, Rational)>,
    pub free: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            free: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, row: Vec<Rational>, rel: Relation, rhs: Rational) {
        assert_eq!(row.len(), self.num_vars());
        self.constraints.push((row, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// rows × (cols + 1); the last column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    artificial_start: usize,
    /// For each original variable, its column(s): (plus, minus) for free ones.
    var_cols: Vec<(usize, Option<usize>)>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut var_cols = Vec::with_capacity(lp.num_vars());
        let mut cols = 0;
        for &f in &lp.free {
            if f {
                var_cols.push((cols, Some(cols + 1)));
                cols += 2;
            } else {
                var_cols.push((cols, None));
                cols += 1;
            }
        }
        // Normalize to b ≥ 0.
        let rows_in: Vec<(Vec<Rational>, Relation, Rational)> = lp
            .constraints
            .iter()
            .map(|(a, rel, b)| {
                if b.is_negative() {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, b.clone())
                }
            })
            .collect();
        let slack_count = rows_in.iter().filter(|r| r.1 != Relation::Eq).count();
        let art_count = rows_in.iter().filter(|r| r.1 != Relation::Le).count();
        let artificial_start = cols + slack_count;
        let total = artificial_start + art_count;
        let mut rows = Vec::with_capacity(rows_in.len());
        let mut basis = Vec::with_capacity(rows_in.len());
        let (mut slack, mut art) = (cols, artificial_start);
        for (a, rel, b) in rows_in {
            let mut row = vec![Rational::zero(); total + 1];
            for (j, v) in a.iter().enumerate() {
                let (p, m) = var_cols[j];
                row[p] = v.clone();
                if let Some(m) = m {
                    row[m] = -v;
                }
            }
            match rel {
                Relation::Le => {
                    row[slack] = Rational::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
            }
            row[total] = b;
            rows.push(row);
        }
        Self {
            rows,
            basis,
            cols: total,
            artificial_start,
            var_cols,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximize `cost·x` over columns `< limit`; returns false if unbounded.
    fn optimize(&mut self, cost: &[Rational], limit: usize) -> bool {
        loop {
            // reduced cost d_j = c_j − Σ_r c_{B_r} a_rj
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (r, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        d -= &cost[self.basis[r]] * &row[j];
                    }
                }
                d.is_positive()
            });
            let Some(c) = entering else { return true };
            let rhs = self.cols;
            let mut best: Option<(Rational, usize, usize)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((br, _, bb)) => ratio < *br || (ratio == *br && self.basis[r] < *bb),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let rhs = self.cols;
        // Phase 1: maximize −Σ artificials.
        let mut cost1 = vec![Rational::zero(); self.cols];
        for v in cost1.iter_mut().skip(self.artificial_start) {
            *v = -Rational::one();
        }
        self.optimize(&cost1, self.cols);
        let infeasible = self
            .rows
            .iter()
            .zip(&self.basis)
            .any(|(row, &b)| b >= self.artificial_start && !row[rhs].is_zero());
        if infeasible {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis, dropping redundant rows.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.artificial_start {
                match (0..self.artificial_start).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => {
                        self.pivot(r, j);
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
        // Phase 2.
        let mut cost2 = vec![Rational::zero(); self.cols];
        for (j, (p, m)) in self.var_cols.iter().enumerate() {
            cost2[*p] = lp.objective[j].clone();
            if let Some(m) = m {
                cost2[*m] = -lp.objective[j].clone();
            }
        }
        if !self.optimize(&cost2, self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut col_values = vec![Rational::zero(); self.cols];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            col_values[b] = row[rhs].clone();
        }
        let x: Vec<Rational> = self
            .var_cols
            .iter()
            .map(|(p, m)| match m {
                Some(m) => &col_values[*p] - &col_values[*m],
                None => col_values[*p].clone(),
            })
            .collect();
        let value = x
            .iter()
            .zip(&lp.objective)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![q(3), q(5)];
        lp.constrain(vec![q(1), q(0)], Relation::Le, q(4));
        lp.constrain(vec![q(0), q(2)], Relation::Le, q(12));
        lp.constrain(vec![q(3), q(2)], Relation::Le, q(18));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![q(2), q(6)],
                value: q(36)
            }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![q(1)], Relation::Ge, q(2));
        lp.constrain(vec![q(1)], Relation::Le, q(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.objective = vec![q(1), q(0)];
        lp.constrain(vec![q(1), q(-1)], Relation::Eq, q(0));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_redundant_rows() {
        // max −x, x free, x = −3 stated twice
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![q(-1)];
        lp.free = vec![true];
        lp.constrain(vec![q(1)], Relation::Eq, q(-3));
        lp.constrain(vec![q(2)], Relation::Eq, q(-6));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![q(-3)],
                value: q(3)
            }
        );
    }
}
