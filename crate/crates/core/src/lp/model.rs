use std::collections::HashSet;
use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use num_traits::{One, Signed, Zero};

use crate::arith::{render_rational, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LowerBound {
    Zero,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: LowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// One entry per model variable.
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub coeffs: Vec<Rational>,
    /// The reported value is `-(sense c^T x)`. Dual programs of minimisation
    /// problems are naturally written this way.
    pub negated: bool,
}

/// A linear program over exact rationals with dense coefficient rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
}

impl LpModel {
    pub fn new(sense: Sense) -> Self {
        LpModel {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective {
                sense,
                coeffs: Vec::new(),
                negated: false,
            },
        }
    }

    pub fn negated(mut self) -> Self {
        self.objective.negated = !self.objective.negated;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: LowerBound) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
        });
        self.objective.coeffs.push(Rational::zero());
        for c in &mut self.constraints {
            c.coeffs.push(Rational::zero());
        }
        self.variables.len() - 1
    }

    /// Adds nonnegative variables `prefix1..prefixN` and returns their indices.
    pub fn add_vars(&mut self, prefix: &str, count: usize) -> Vec<usize> {
        (1..=count)
            .map(|i| self.add_var(format!("{prefix}{i}"), LowerBound::Zero))
            .collect()
    }

    /// Repeated indices accumulate.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: &[(usize, Rational)],
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        let mut coeffs = vec![Rational::zero(); self.num_vars()];
        for (idx, coeff) in terms {
            coeffs[*idx] += coeff;
        }
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, terms: &[(usize, Rational)]) {
        self.objective.coeffs = vec![Rational::zero(); self.num_vars()];
        for (idx, coeff) in terms {
            self.objective.coeffs[*idx] += coeff;
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn constraint_index(&self, name: &str) -> Option<usize> {
        self.constraints.iter().position(|c| c.name == name)
    }

    /// Checks row lengths and name uniqueness.
    pub fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.coeffs.len() != n {
            return Err(Error::Structural(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.coeffs.len()
            )));
        }
        if let Some(c) = self.constraints.iter().find(|c| c.coeffs.len() != n) {
            return Err(Error::Structural(format!(
                "constraint {:?} has {} coefficients for {n} variables",
                c.name,
                c.coeffs.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(v) = self.variables.iter().find(|v| !seen.insert(v.name.as_str())) {
            return Err(Error::Structural(format!("duplicate variable name {:?}", v.name)));
        }
        let mut seen = HashSet::new();
        if let Some(c) = self.constraints.iter().find(|c| !seen.insert(c.name.as_str())) {
            return Err(Error::Structural(format!("duplicate constraint name {:?}", c.name)));
        }
        Ok(())
    }

    pub fn activity(&self, row: usize, x: &[Rational]) -> Rational {
        dot(&self.constraints[row].coeffs, x)
    }

    /// The reported objective value at `x`, including the outer negation.
    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        let v = dot(&self.objective.coeffs, x);
        if self.objective.negated {
            -v
        } else {
            v
        }
    }

    /// Exact feasibility of `x`, bounds included.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self
                .variables
                .iter()
                .zip(x)
                .all(|(v, xi)| v.lower == LowerBound::Free || !xi.is_negative())
            && (0..self.constraints.len()).all(|i| {
                let c = &self.constraints[i];
                c.relation.holds(&self.activity(i, x), &c.rhs)
            })
    }

    /// Human-readable listing with a fixed layout, used for golden files.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let sense = match self.objective.sense {
            Sense::Min => "minimize",
            Sense::Max => "maximize",
        };
        let body = format!("{sense} {}", self.linear_form(&self.objective.coeffs));
        if self.objective.negated {
            writeln!(out, "objective: -({body})").unwrap();
        } else {
            writeln!(out, "objective: {body}").unwrap();
        }
        writeln!(out, "subject to:").unwrap();
        for c in &self.constraints {
            writeln!(
                out,
                "  {}: {} {} {}",
                c.name,
                self.linear_form(&c.coeffs),
                c.relation.symbol(),
                render_rational(&c.rhs)
            )
            .unwrap();
        }
        writeln!(out, "bounds:").unwrap();
        for v in &self.variables {
            match v.lower {
                LowerBound::Zero => writeln!(out, "  {} >= 0", v.name).unwrap(),
                LowerBound::Free => writeln!(out, "  {} free", v.name).unwrap(),
            }
        }
        out
    }

    fn linear_form(&self, coeffs: &[Rational]) -> String {
        let mut out = String::new();
        for (v, c) in self.variables.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                write!(out, " {sign} ").unwrap();
            }
            if !magnitude.is_one() {
                write!(out, "{} ", render_rational(&magnitude)).unwrap();
            }
            out.push_str(&v.name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for LpModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

pub(crate) fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter()
        .zip(x)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, v)| c * v)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Reported value (outer negation applied); set only when optimal.
    pub objective_value: Option<Rational>,
    /// Variable values in model order; empty unless optimal.
    pub primal: IndexMap<String, Rational>,
    pub basis: Vec<String>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, name: &str) -> Option<&Rational> {
        self.primal.get(name)
    }

    pub fn values(&self) -> Vec<Rational> {
        self.primal.values().cloned().collect()
    }

    pub fn optimum(&self) -> Result<&Rational> {
        self.objective_value
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("LP is {:?}, not optimal", self.status)))
    }
}
