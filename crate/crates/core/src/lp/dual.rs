//! Canonical forms and LP duality.
//!
//! The canonical pair is
//!
//! ```text
//! max { c^T x : A x <= b, x >= 0 }   <->   min { b^T y : A^T y >= c, y >= 0 }
//! ```
//!
//! with dual variable `i` named after primal constraint `i` and dual
//! constraint `j` named after primal variable `j`, so `dualize` is an exact
//! involution on canonical models.

use num_traits::{Signed, Zero};

use super::model::{dot, Constraint, LowerBound, LpModel, LpSolution, Objective, Relation, Sense, Variable};
use crate::arith::Rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalForm {
    /// `max, <=, x >= 0`
    MaxLe,
    /// `min, >=, y >= 0`
    MinGe,
}

pub fn canonical_form(model: &LpModel) -> Option<CanonicalForm> {
    if model.variables.iter().any(|v| v.lower != LowerBound::Zero) {
        return None;
    }
    let all = |rel| model.constraints.iter().all(|c| c.relation == rel);
    match model.objective.sense {
        Sense::Max if all(Relation::Le) => Some(CanonicalForm::MaxLe),
        Sense::Min if all(Relation::Ge) => Some(CanonicalForm::MinGe),
        _ => None,
    }
}

/// Rewrites `model` as `max { c^T x : A x <= b, x >= 0 }` with the same
/// reported value.
///
/// A minimisation becomes `-(max (-c)^T x)`, `>=` rows are negated, each
/// equality becomes the rows `name[le]` and `name[ge]`, and a free variable
/// `x` becomes `x+ - x-`. Models already in this form are returned unchanged.
pub fn standardize(model: &LpModel) -> Result<LpModel> {
    model.check()?;
    let mut variables = Vec::new();
    let mut expand: Vec<Vec<(usize, bool)>> = Vec::new();
    for v in &model.variables {
        match v.lower {
            LowerBound::Zero => {
                expand.push(vec![(variables.len(), false)]);
                variables.push(v.clone());
            }
            LowerBound::Free => {
                let base = variables.len();
                expand.push(vec![(base, false), (base + 1, true)]);
                for suffix in ["+", "-"] {
                    variables.push(Variable {
                        name: format!("{}{suffix}", v.name),
                        lower: LowerBound::Zero,
                    });
                }
            }
        }
    }
    let widen = |coeffs: &[Rational], scale: bool| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); variables.len()];
        for (j, c) in coeffs.iter().enumerate() {
            let c = if scale { -c } else { c.clone() };
            for &(col, neg) in &expand[j] {
                out[col] = if neg { -&c } else { c.clone() };
            }
        }
        out
    };

    let mut constraints = Vec::new();
    for c in &model.constraints {
        let row = |name: String, negate: bool| Constraint {
            name,
            coeffs: widen(&c.coeffs, negate),
            relation: Relation::Le,
            rhs: if negate { -&c.rhs } else { c.rhs.clone() },
        };
        match c.relation {
            Relation::Le => constraints.push(row(c.name.clone(), false)),
            Relation::Ge => constraints.push(row(c.name.clone(), true)),
            Relation::Eq => {
                constraints.push(row(format!("{}[le]", c.name), false));
                constraints.push(row(format!("{}[ge]", c.name), true));
            }
        }
    }

    let minimise = model.objective.sense == Sense::Min;
    let objective = Objective {
        sense: Sense::Max,
        coeffs: widen(&model.objective.coeffs, minimise),
        negated: model.objective.negated ^ minimise,
    };
    let out = LpModel {
        variables,
        constraints,
        objective,
    };
    out.check()?;
    Ok(out)
}

/// Mechanical dual of a canonical model (either orientation).
pub fn dualize(model: &LpModel) -> Result<LpModel> {
    model.check()?;
    let form = canonical_form(model).ok_or_else(|| {
        Error::Structural(
            "dualize needs max/<=/x>=0 or min/>=/y>=0 form; standardize the model first".into(),
        )
    })?;
    let (sense, relation) = match form {
        CanonicalForm::MaxLe => (Sense::Min, Relation::Ge),
        CanonicalForm::MinGe => (Sense::Max, Relation::Le),
    };
    let variables = model
        .constraints
        .iter()
        .map(|c| Variable {
            name: c.name.clone(),
            lower: LowerBound::Zero,
        })
        .collect();
    let constraints = model
        .variables
        .iter()
        .enumerate()
        .map(|(j, v)| Constraint {
            name: v.name.clone(),
            coeffs: model.constraints.iter().map(|c| c.coeffs[j].clone()).collect(),
            relation,
            rhs: model.objective.coeffs[j].clone(),
        })
        .collect();
    let objective = Objective {
        sense,
        coeffs: model.constraints.iter().map(|c| c.rhs.clone()).collect(),
        negated: model.objective.negated,
    };
    Ok(LpModel {
        variables,
        constraints,
        objective,
    })
}

fn values_in_order(names: impl Iterator<Item = String>, sol: &LpSolution, what: &str) -> Result<Vec<Rational>> {
    let values: Vec<Rational> = names
        .map(|name| {
            sol.value(&name)
                .cloned()
                .ok_or_else(|| Error::Structural(format!("{what} solution has no value for {name:?}")))
        })
        .collect::<Result<_>>()?;
    if values.len() != sol.primal.len() {
        return Err(Error::Structural(format!(
            "{what} solution has {} values, expected {}",
            sol.primal.len(),
            values.len()
        )));
    }
    Ok(values)
}

/// Exact complementary slackness for a canonical primal and its dual.
///
/// Dual values are looked up by primal constraint name. Returns `Ok(true)`
/// iff every constraint with a positive dual value is tight and every
/// positive primal variable has a tight dual constraint. Non-optimal inputs
/// or a nonzero duality gap are reported as a precondition error.
pub fn check_complementary_slackness(
    primal: &LpModel,
    primal_sol: &LpSolution,
    dual_sol: &LpSolution,
) -> Result<bool> {
    primal.check()?;
    if canonical_form(primal).is_none() {
        return Err(Error::Structural("primal model is not in canonical form".into()));
    }
    let p_val = primal_sol.optimum()?;
    let d_val = dual_sol.optimum()?;
    if p_val != d_val {
        return Err(Error::Precondition(format!(
            "objective values differ: primal {p_val}, dual {d_val}"
        )));
    }
    let x = values_in_order(primal.variables.iter().map(|v| v.name.clone()), primal_sol, "primal")?;
    let y = values_in_order(primal.constraints.iter().map(|c| c.name.clone()), dual_sol, "dual")?;

    let rows_ok = primal
        .constraints
        .iter()
        .zip(&y)
        .all(|(c, yi)| !yi.is_positive() || dot(&c.coeffs, &x) == c.rhs);
    let cols_ok = (0..primal.num_vars()).all(|j| {
        if !x[j].is_positive() {
            return true;
        }
        let column_activity: Rational = primal
            .constraints
            .iter()
            .zip(&y)
            .filter(|(c, _)| !c.coeffs[j].is_zero())
            .map(|(c, yi)| &c.coeffs[j] * yi)
            .sum();
        column_activity == primal.objective.coeffs[j]
    });
    Ok(rows_ok && cols_ok)
}
