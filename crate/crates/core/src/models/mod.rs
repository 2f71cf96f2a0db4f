//! Builders for the chain of linear programs behind the extreme volumes.
//!
//! Variable and constraint orders are fixed so dumps are deterministic:
//!
//! | family | variables | constraints |
//! |---|---|---|
//! | `FullLp` | `a1..ad, b1..bd, q[I]` (I by mask) | `order*, cap*, mono[I,l], lip[I,l], lower[I], upper[I,k]` |
//! | `SymmetricLp` | `a, b, q0..qd` | `order, cap, mono1, lip1, .., lower0, upper0, ..` |
//! | `ReducedLp` | `a, b, q0, delta1..deltad` | `y1, l1..ld, y2, y3` |
//! | `DualReduced` | `y1, l1..ld, y2, y3` | `a, b, q0, delta1..deltad` |
//! | `SimplifiedDualBranch` | `l1..ld, y3` | `sum, cover1..cover(d-1)`, then the branch rows |
//! | `FinalDual` | `l1..l(d-1), w` | `sum, cover1..cover(d-1)` |
//!
//! `ReducedLp` names its rows after the dual variables and `DualReduced`
//! names its rows after the primal variables, matching what `dualize`
//! produces.

pub mod small_dims;

use std::fmt;

use num_traits::Signed;

use crate::arith::{binomial, int, Rational};
use crate::closed_form::{dual_rhs, AuxiliaryInstance, VolumeSign};
use crate::error::{Error, Result};
use crate::grid::MultiIndex;
use crate::lp::{dot, solve, LowerBound, LpModel, LpSolution, Relation, Sense};

pub use small_dims::{small_min_candidates, solve_small_min, SmallDimCandidate, SmallDimSolution};

/// Largest dimension `FullLp` is built for.
pub const FULL_LP_MAX_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpFamily {
    /// Vertex-grid program over the `2^d` values `q_I` and the box edges.
    FullLp,
    /// The grid program restricted to permutation-invariant solutions.
    SymmetricLp,
    /// `SymmetricLp` with redundant rows removed, in the level increments
    /// `delta_i = q_i - q_{i-1}`.
    ReducedLp,
    /// Dual of `ReducedLp`.
    DualReduced,
    /// `DualReduced` with `y1 = 0`, `y2 = d y3` and one branch of
    /// `l_d = max(0, y3 - 1)`: `l_d = 0, y3 <= 1` when `l_d_zero`, otherwise
    /// `l_d - y3 = -1` (`+1` for the positive extreme).
    SimplifiedDualBranch { l_d_zero: bool },
    /// The branch `l_d != 0` in the variable `w = (d - 1) y3`.
    FinalDual,
}

impl fmt::Display for LpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpFamily::FullLp => f.write_str("full"),
            LpFamily::SymmetricLp => f.write_str("symmetric"),
            LpFamily::ReducedLp => f.write_str("reduced"),
            LpFamily::DualReduced => f.write_str("dual-reduced"),
            LpFamily::SimplifiedDualBranch { l_d_zero: true } => f.write_str("dual-branch(l_d=0)"),
            LpFamily::SimplifiedDualBranch { l_d_zero: false } => f.write_str("dual-branch(l_d>0)"),
            LpFamily::FinalDual => f.write_str("final-dual"),
        }
    }
}

fn rat(n: crate::arith::Integer) -> Rational {
    Rational::from_integer(n)
}

fn primal_sense(sign: VolumeSign) -> Sense {
    match sign {
        VolumeSign::Negative => Sense::Min,
        VolumeSign::Positive => Sense::Max,
    }
}

/// `(-1)^(d+j) C(d-1, j-1)`: the `ReducedLp` objective weight of `delta_j`.
pub fn reduced_weight(d: usize, j: usize) -> Rational {
    rat(dual_rhs(d, VolumeSign::Positive, j))
}

fn dual_objective(sign: VolumeSign, model: LpModel) -> LpModel {
    match sign {
        VolumeSign::Negative => model.negated(),
        VolumeSign::Positive => model,
    }
}

pub fn build(family: LpFamily, d: usize, sign: VolumeSign) -> Result<LpModel> {
    if d < 2 {
        return Err(Error::Domain(format!("{family} LP needs d >= 2, got {d}")));
    }
    match family {
        LpFamily::FullLp => build_full(d, sign),
        LpFamily::SymmetricLp => Ok(build_symmetric(d, sign)),
        LpFamily::ReducedLp => Ok(build_reduced(d, sign)),
        LpFamily::DualReduced => Ok(build_dual_reduced(d, sign)),
        LpFamily::SimplifiedDualBranch { l_d_zero } => build_branch(d, sign, l_d_zero),
        LpFamily::FinalDual => build_final_dual(d, sign),
    }
}

fn build_full(d: usize, sign: VolumeSign) -> Result<LpModel> {
    if d > FULL_LP_MAX_DIM {
        return Err(Error::Domain(format!(
            "full LP has 2^d grid variables and is built only for d <= {FULL_LP_MAX_DIM}, got {d}"
        )));
    }
    let mut m = LpModel::new(primal_sense(sign));
    let a = m.add_vars("a", d);
    let b = m.add_vars("b", d);
    let q: Vec<usize> = MultiIndex::all(d)
        .map(|idx| m.add_var(format!("q[{idx}]"), LowerBound::Zero))
        .collect();
    let coord = |idx: MultiIndex, k: usize| if idx.get(k) { b[k - 1] } else { a[k - 1] };

    for k in 1..=d {
        m.add_constraint(format!("order{k}"), &[(a[k - 1], int(1)), (b[k - 1], int(-1))], Relation::Le, int(0));
    }
    for k in 1..=d {
        m.add_constraint(format!("cap{k}"), &[(b[k - 1], int(1))], Relation::Le, int(1));
    }
    for idx in MultiIndex::all(d) {
        for l in 1..=d {
            let Some(up) = idx.raise(l) else { continue };
            let (qi, qj) = (q[idx.bits as usize], q[up.bits as usize]);
            m.add_constraint(format!("mono[{idx},{l}]"), &[(qj, int(1)), (qi, int(-1))], Relation::Ge, int(0));
            m.add_constraint(
                format!("lip[{idx},{l}]"),
                &[(qj, int(1)), (qi, int(-1)), (b[l - 1], int(-1)), (a[l - 1], int(1))],
                Relation::Le,
                int(0),
            );
        }
    }
    for idx in MultiIndex::all(d) {
        let qi = q[idx.bits as usize];
        let mut terms = vec![(qi, int(1))];
        terms.extend((1..=d).map(|k| (coord(idx, k), int(-1))));
        m.add_constraint(format!("lower[{idx}]"), &terms, Relation::Ge, int(1 - d as i64));
        for k in 1..=d {
            m.add_constraint(
                format!("upper[{idx},{k}]"),
                &[(qi, int(1)), (coord(idx, k), int(-1))],
                Relation::Le,
                int(0),
            );
        }
    }
    let objective: Vec<_> = MultiIndex::all(d)
        .map(|idx| (q[idx.bits as usize], int(i64::from(idx.sign()))))
        .collect();
    m.set_objective(&objective);
    Ok(m)
}

fn build_symmetric(d: usize, sign: VolumeSign) -> LpModel {
    let mut m = LpModel::new(primal_sense(sign));
    let a = m.add_var("a", LowerBound::Zero);
    let b = m.add_var("b", LowerBound::Zero);
    let q: Vec<usize> = (0..=d).map(|i| m.add_var(format!("q{i}"), LowerBound::Zero)).collect();
    let di = d as i64;

    m.add_constraint("order", &[(a, int(1)), (b, int(-1))], Relation::Le, int(0));
    m.add_constraint("cap", &[(b, int(1))], Relation::Le, int(1));
    for i in 1..=d {
        m.add_constraint(format!("mono{i}"), &[(q[i], int(1)), (q[i - 1], int(-1))], Relation::Ge, int(0));
        m.add_constraint(
            format!("lip{i}"),
            &[(q[i], int(1)), (q[i - 1], int(-1)), (b, int(-1)), (a, int(1))],
            Relation::Le,
            int(0),
        );
    }
    for i in 0..=d {
        let ii = i as i64;
        m.add_constraint(
            format!("lower{i}"),
            &[(q[i], int(1)), (a, int(ii - di)), (b, int(-ii))],
            Relation::Ge,
            int(1 - di),
        );
        let cap = if i < d { a } else { b };
        m.add_constraint(format!("upper{i}"), &[(q[i], int(1)), (cap, int(-1))], Relation::Le, int(0));
    }
    let objective: Vec<_> = (0..=d)
        .map(|i| {
            let c = rat(binomial(d as u64, i as u64).expect("i <= d"));
            (q[i], if (d - i) % 2 == 0 { c } else { -c })
        })
        .collect();
    m.set_objective(&objective);
    m
}

fn build_reduced(d: usize, sign: VolumeSign) -> LpModel {
    let mut m = LpModel::new(primal_sense(sign));
    let a = m.add_var("a", LowerBound::Zero);
    let b = m.add_var("b", LowerBound::Zero);
    let q0 = m.add_var("q0", LowerBound::Zero);
    let delta = m.add_vars("delta", d);

    m.add_constraint("y1", &[(b, int(1))], Relation::Le, int(1));
    for i in 1..=d {
        m.add_constraint(
            format!("l{i}"),
            &[(delta[i - 1], int(1)), (b, int(-1)), (a, int(1))],
            Relation::Le,
            int(0),
        );
    }
    let mut terms = vec![(q0, int(1))];
    terms.extend(delta[..d - 1].iter().map(|&x| (x, int(1))));
    terms.push((a, int(-1)));
    m.add_constraint("y2", &terms, Relation::Le, int(0));
    let mut terms = vec![(q0, int(1))];
    terms.extend(delta.iter().map(|&x| (x, int(1))));
    terms.push((b, int(-(d as i64))));
    m.add_constraint("y3", &terms, Relation::Ge, int(1 - d as i64));

    let objective: Vec<_> = (1..=d).map(|j| (delta[j - 1], reduced_weight(d, j))).collect();
    m.set_objective(&objective);
    m
}

fn build_dual_reduced(d: usize, sign: VolumeSign) -> LpModel {
    let mut m = LpModel::new(Sense::Min);
    let y1 = m.add_var("y1", LowerBound::Zero);
    let l = m.add_vars("l", d);
    let y2 = m.add_var("y2", LowerBound::Zero);
    let y3 = m.add_var("y3", LowerBound::Zero);

    let mut terms: Vec<_> = l.iter().map(|&x| (x, int(1))).collect();
    terms.push((y2, int(-1)));
    m.add_constraint("a", &terms, Relation::Ge, int(0));
    let mut terms = vec![(y1, int(1))];
    terms.extend(l.iter().map(|&x| (x, int(-1))));
    terms.push((y3, int(d as i64)));
    m.add_constraint("b", &terms, Relation::Ge, int(0));
    m.add_constraint("q0", &[(y2, int(1)), (y3, int(-1))], Relation::Ge, int(0));
    for j in 1..d {
        m.add_constraint(
            format!("delta{j}"),
            &[(l[j - 1], int(1)), (y2, int(1)), (y3, int(-1))],
            Relation::Ge,
            rat(dual_rhs(d, sign, j)),
        );
    }
    m.add_constraint(
        format!("delta{d}"),
        &[(l[d - 1], int(1)), (y3, int(-1))],
        Relation::Ge,
        rat(dual_rhs(d, sign, d)),
    );
    m.set_objective(&[(y1, int(1)), (y3, int(d as i64 - 1))]);
    dual_objective(sign, m)
}

fn build_branch(d: usize, sign: VolumeSign, l_d_zero: bool) -> Result<LpModel> {
    if l_d_zero && sign == VolumeSign::Positive {
        return Err(Error::Domain(
            "the l_d = 0 branch exists only for the negative extreme".into(),
        ));
    }
    let mut m = LpModel::new(Sense::Min);
    let l = m.add_vars("l", d);
    let y3 = m.add_var("y3", LowerBound::Zero);
    let di = d as i64;

    let mut terms: Vec<_> = l.iter().map(|&x| (x, int(-1))).collect();
    terms.push((y3, int(di)));
    m.add_constraint("sum", &terms, Relation::Eq, int(0));
    for j in 1..d {
        m.add_constraint(
            format!("cover{j}"),
            &[(l[j - 1], int(1)), (y3, int(di - 1))],
            Relation::Ge,
            rat(dual_rhs(d, sign, j)),
        );
    }
    if l_d_zero {
        m.add_constraint("ld_zero", &[(l[d - 1], int(1))], Relation::Eq, int(0));
        m.add_constraint("y3_cap", &[(y3, int(1))], Relation::Le, int(1));
    } else {
        let link = match sign {
            VolumeSign::Negative => int(-1),
            VolumeSign::Positive => int(1),
        };
        m.add_constraint("ld_link", &[(l[d - 1], int(1)), (y3, int(-1))], Relation::Eq, link);
    }
    m.set_objective(&[(y3, int(di - 1))]);
    Ok(dual_objective(sign, m))
}

fn build_final_dual(d: usize, sign: VolumeSign) -> Result<LpModel> {
    if d < sign.min_closed_form_dim() {
        return Err(Error::Domain(format!(
            "the final dual form needs d >= {} for the {sign} extreme, got {d}",
            sign.min_closed_form_dim()
        )));
    }
    let mut m = LpModel::new(Sense::Min);
    let l = m.add_vars("l", d - 1);
    let w = m.add_var("w", LowerBound::Zero);

    let mut terms: Vec<_> = l.iter().map(|&x| (x, int(-1))).collect();
    terms.push((w, int(1)));
    m.add_constraint("sum", &terms, Relation::Eq, -sign.alpha());
    for j in 1..d {
        m.add_constraint(
            format!("cover{j}"),
            &[(l[j - 1], int(1)), (w, int(1))],
            Relation::Ge,
            rat(dual_rhs(d, sign, j)),
        );
    }
    m.set_objective(&[(w, int(1))]);
    Ok(dual_objective(sign, m))
}

/// `min w` subject to `sum y + sum z = w + alpha`, `y_i + w >= c_i`,
/// `z_i + w >= e_i`, all variables nonnegative. Variables are ordered
/// `w, y1..yk, z1..zr`.
pub fn build_auxiliary_lp(inst: &AuxiliaryInstance) -> LpModel {
    let mut m = LpModel::new(Sense::Min);
    let w = m.add_var("w", LowerBound::Zero);
    let y = m.add_vars("y", inst.c().len());
    let z = m.add_vars("z", inst.e().len());

    let mut terms: Vec<_> = y.iter().chain(&z).map(|&x| (x, int(1))).collect();
    terms.push((w, int(-1)));
    m.add_constraint("sum", &terms, Relation::Eq, inst.alpha().clone());
    for (i, ci) in inst.c().iter().enumerate() {
        m.add_constraint(format!("cover_y{}", i + 1), &[(y[i], int(1)), (w, int(1))], Relation::Ge, ci.clone());
    }
    for (i, ei) in inst.e().iter().enumerate() {
        m.add_constraint(format!("cover_z{}", i + 1), &[(z[i], int(1)), (w, int(1))], Relation::Ge, ei.clone());
    }
    m.set_objective(&[(w, int(1))]);
    m
}

/// A feasible point of `ReducedLp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedPrimal {
    pub a: Rational,
    pub b: Rational,
    pub q0: Rational,
    pub delta: Vec<Rational>,
    pub objective: Rational,
}

impl ReducedPrimal {
    /// `q_0..q_d`.
    pub fn q_levels(&self) -> Vec<Rational> {
        let mut levels = vec![self.q0.clone()];
        for step in &self.delta {
            let next = levels.last().expect("nonempty") + step;
            levels.push(next);
        }
        levels
    }
}

/// Recovers a `ReducedLp` optimum from a `DualReduced` optimum.
///
/// Rows with a positive dual value become equalities and variables whose
/// dual row is slack are fixed at zero. Every feasible point of the
/// restricted program is optimal. The face is a single point except for the
/// positive extreme at `d = 3`, where any `a` in `[0, 1/2]` works; ties are
/// broken toward the largest `a`, which is the closed-form box.
pub fn recover_primal_by_slackness(d: usize, sign: VolumeSign, dual_sol: &LpSolution) -> Result<ReducedPrimal> {
    let dual = build(LpFamily::DualReduced, d, sign)?;
    let value = dual_sol.optimum()?.clone();
    let y: Vec<Rational> = dual
        .variables
        .iter()
        .map(|v| {
            dual_sol
                .value(&v.name)
                .cloned()
                .ok_or_else(|| Error::Structural(format!("dual solution has no value for {:?}", v.name)))
        })
        .collect::<Result<_>>()?;
    if !dual.is_feasible(&y) || dual.objective_value(&y) != value {
        return Err(Error::Precondition(
            "dual values are infeasible or do not reproduce the stated objective".into(),
        ));
    }

    let mut restricted = build(LpFamily::ReducedLp, d, sign)?;
    for (row, yi) in restricted.constraints.iter_mut().zip(&y) {
        if yi.is_positive() {
            row.relation = Relation::Eq;
        }
    }
    for (j, dual_row) in dual.constraints.iter().enumerate() {
        if dot(&dual_row.coeffs, &y) != dual_row.rhs {
            restricted.add_constraint(format!("fix_{}", dual_row.name), &[(j, int(1))], Relation::Eq, int(0));
        }
    }
    let a = restricted.var_index("a").expect("box variable");
    restricted.objective.sense = Sense::Max;
    restricted.set_objective(&[(a, int(1))]);
    let sol = solve(&restricted)?;
    if sol.objective_value.is_none() {
        return Err(Error::Precondition(format!(
            "no primal point is complementary to the given dual values ({:?}); they are not optimal",
            sol.status
        )));
    }
    let objective = build(LpFamily::ReducedLp, d, sign)?.objective_value(&sol.values());
    debug_assert_eq!(objective, value);
    let get = |name: &str| sol.value(name).cloned().expect("model variable");
    Ok(ReducedPrimal {
        a: get("a"),
        b: get("b"),
        q0: get("q0"),
        delta: (1..=d).map(|j| get(&format!("delta{j}"))).collect(),
        objective,
    })
}

/// Optimal value of a model, as an error when it is not optimal.
pub fn optimum(model: &LpModel) -> Result<Rational> {
    solve(model)?.optimum().cloned()
}

/// Checks `a < b` on a `ReducedLp` or `SymmetricLp` solution.
pub fn assert_strict_box(sol: &LpSolution) -> Result<()> {
    let (Some(a), Some(b)) = (sol.value("a"), sol.value("b")) else {
        return Err(Error::Structural("solution has no box variables".into()));
    };
    if a < b {
        Ok(())
    } else {
        Err(Error::Precondition(format!("optimal box is degenerate: a = {a}, b = {b}")))
    }
}
