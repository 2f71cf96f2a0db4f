//! Dense two-phase tableau simplex over exact rationals.
//!
//! Pivoting follows Bland's rule throughout: the entering column is the
//! lowest-indexed one with a negative reduced cost, and ratio-test ties go to
//! the row whose basic column has the lowest index. Row updates skip zero
//! entries, which keeps the highly structured models here cheap to pivot.

use indexmap::IndexMap;
use num_traits::{One, Signed, Zero};

use super::model::{LowerBound, LpModel, LpSolution, LpStatus, Relation, Sense};
use crate::arith::Rational;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    /// Structural variable, or its positive part when free.
    Plus(usize),
    /// Negative part of a free structural variable.
    Minus(usize),
    Slack(usize),
    Artificial(usize),
}

struct Tableau {
    /// Each row holds `ncols` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs followed by the negated objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rational {
        &self.rows[row][self.ncols]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        self.pivots += 1;
        let inv = self.rows[r][s].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..=self.ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[s].is_zero() {
                return;
            }
            let factor = row[s].clone();
            for &j in &nonzero {
                row[j] -= &factor * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = pivot_row;
        self.basis[r] = s;
    }

    /// Minimises the current cost row. Columns with `allowed[j] == false`
    /// never enter.
    fn run(&mut self, allowed: &[bool]) -> Outcome {
        loop {
            let Some(s) = (0..self.ncols).find(|&j| allowed[j] && self.cost[j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][s];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, s),
                None => return Outcome::Unbounded,
            }
        }
    }

    /// Sets the cost row to `c - c_B B^-1 A` for column costs `c`.
    fn price(&mut self, costs: &[Rational]) {
        let mut cost = costs.to_vec();
        cost.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= cb * v;
                }
            }
        }
        self.cost = cost;
    }
}

/// Solves `model` exactly. Free variables are split into two nonnegative
/// parts and every row gets a slack and/or artificial column.
pub fn solve(model: &LpModel) -> Result<LpSolution> {
    model.check()?;
    let n = model.num_vars();

    let mut kinds = Vec::new();
    for (j, v) in model.variables.iter().enumerate() {
        kinds.push(ColumnKind::Plus(j));
        if v.lower == LowerBound::Free {
            kinds.push(ColumnKind::Minus(j));
        }
    }
    let structural = kinds.clone();

    // Normalise every row to a nonnegative right-hand side.
    let mut oriented = Vec::with_capacity(model.constraints.len());
    for c in &model.constraints {
        let flip = c.rhs.is_negative();
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        oriented.push((flip, relation));
    }
    for (i, (_, rel)) in oriented.iter().enumerate() {
        if *rel != Relation::Eq {
            kinds.push(ColumnKind::Slack(i));
        }
    }
    for (i, (_, rel)) in oriented.iter().enumerate() {
        if *rel != Relation::Le {
            kinds.push(ColumnKind::Artificial(i));
        }
    }
    let ncols = kinds.len();

    let mut rows = Vec::with_capacity(model.constraints.len());
    let mut basis = Vec::with_capacity(model.constraints.len());
    for (i, c) in model.constraints.iter().enumerate() {
        let (flip, rel) = oriented[i];
        let sgn = |v: &Rational| if flip { -v } else { v.clone() };
        let mut row = vec![Rational::zero(); ncols + 1];
        for (col, kind) in kinds.iter().enumerate() {
            row[col] = match *kind {
                ColumnKind::Plus(j) => sgn(&c.coeffs[j]),
                ColumnKind::Minus(j) => -sgn(&c.coeffs[j]),
                ColumnKind::Slack(r) if r == i => {
                    if rel == Relation::Le {
                        Rational::one()
                    } else {
                        -Rational::one()
                    }
                }
                ColumnKind::Artificial(r) if r == i => {
                    basis.push(col);
                    Rational::one()
                }
                _ => continue,
            };
            if rel == Relation::Le && kind == &ColumnKind::Slack(i) {
                basis.push(col);
            }
        }
        row[ncols] = sgn(&c.rhs);
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        cost: Vec::new(),
        basis,
        ncols,
        pivots: 0,
    };

    // Phase 1: minimise the sum of artificials.
    let is_artificial: Vec<bool> = kinds.iter().map(|k| matches!(k, ColumnKind::Artificial(_))).collect();
    let phase1_costs: Vec<Rational> = is_artificial
        .iter()
        .map(|&a| if a { Rational::one() } else { Rational::zero() })
        .collect();
    tab.price(&phase1_costs);
    let all = vec![true; ncols];
    if let Outcome::Unbounded = tab.run(&all) {
        unreachable!("phase 1 objective is bounded below by zero");
    }
    if !tab.cost[ncols].is_zero() {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective_value: None,
            primal: IndexMap::new(),
            basis: Vec::new(),
            pivots: tab.pivots,
        });
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if is_artificial[tab.basis[i]] {
            match (0..ncols).find(|&j| !is_artificial[j] && !tab.rows[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2 on the real objective, as a minimisation.
    let allowed: Vec<bool> = is_artificial.iter().map(|a| !a).collect();
    let phase2_costs: Vec<Rational> = kinds
        .iter()
        .map(|k| {
            let c = match *k {
                ColumnKind::Plus(j) => model.objective.coeffs[j].clone(),
                ColumnKind::Minus(j) => -&model.objective.coeffs[j],
                _ => return Rational::zero(),
            };
            match model.objective.sense {
                Sense::Min => c,
                Sense::Max => -c,
            }
        })
        .collect();
    tab.price(&phase2_costs);
    if let Outcome::Unbounded = tab.run(&allowed) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective_value: None,
            primal: IndexMap::new(),
            basis: Vec::new(),
            pivots: tab.pivots,
        });
    }

    let mut column_value = vec![Rational::zero(); ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        column_value[b] = tab.rhs(i).clone();
    }
    let mut x = vec![Rational::zero(); n];
    for (col, kind) in structural.iter().enumerate() {
        match *kind {
            ColumnKind::Plus(j) => x[j] += &column_value[col],
            ColumnKind::Minus(j) => x[j] -= &column_value[col],
            _ => {}
        }
    }
    debug_assert!(model.is_feasible(&x), "simplex returned an infeasible point");

    let column_name = |col: usize| -> String {
        match kinds[col] {
            ColumnKind::Plus(j) if model.variables[j].lower == LowerBound::Free => {
                format!("{}+", model.variables[j].name)
            }
            ColumnKind::Plus(j) => model.variables[j].name.clone(),
            ColumnKind::Minus(j) => format!("{}-", model.variables[j].name),
            ColumnKind::Slack(i) => format!("slack[{}]", model.constraints[i].name),
            ColumnKind::Artificial(i) => format!("artificial[{}]", model.constraints[i].name),
        }
    };

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: Some(model.objective_value(&x)),
        primal: model.variables.iter().map(|v| v.name.clone()).zip(x).collect(),
        basis: tab.basis.iter().map(|&b| column_name(b)).collect(),
        pivots: tab.pivots,
    })
}
