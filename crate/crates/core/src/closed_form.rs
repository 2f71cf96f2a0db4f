//! Closed-form extreme volumes.
//!
//! Both extremes reduce to the same one-parameter search: given a
//! nondecreasing coefficient vector `c_1..c_k` (with `c_0 = 0`) and an offset
//! `alpha`, the values
//!
//! ```text
//! w_i = (c_k + c_{k-1} + ... + c_{k-i+1} - alpha) / (i + 1),   i = 1..k
//! ```
//!
//! are scanned for the first `i0` with `w_{i0} >= c_{k-i0}`. The maximal
//! negative volume uses `alpha = 1` and the odd-position binomials of row
//! `d - 1`; the maximal positive volume uses `alpha = -1` and the even ones.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, int, pow2, Integer, Rational};
use crate::error::{Error, Result};
use crate::models::small_dims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeSign {
    Negative,
    Positive,
}

impl VolumeSign {
    pub const ALL: [VolumeSign; 2] = [VolumeSign::Negative, VolumeSign::Positive];

    /// The `alpha` of the final dual program: `+1` for the negative extreme,
    /// `-1` for the positive one.
    pub fn alpha(self) -> Rational {
        match self {
            VolumeSign::Negative => int(1),
            VolumeSign::Positive => int(-1),
        }
    }

    /// Smallest dimension the closed form covers.
    pub fn min_closed_form_dim(self) -> usize {
        match self {
            VolumeSign::Negative => 7,
            VolumeSign::Positive => 3,
        }
    }
}

impl fmt::Display for VolumeSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VolumeSign::Negative => "negative",
            VolumeSign::Positive => "positive",
        })
    }
}

impl FromStr for VolumeSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" | "min" => Ok(VolumeSign::Negative),
            "positive" | "max" => Ok(VolumeSign::Positive),
            other => Err(Error::Domain(format!(
                "unknown sign {other:?}; expected \"negative\" or \"positive\""
            ))),
        }
    }
}

pub(crate) const RULE_NEGATIVE: &str =
    "negative requires d >= 7 for the closed form; d = 3..6 are served analytically; d = 2 is unsupported";
pub(crate) const RULE_POSITIVE: &str = "positive requires d >= 3; d = 2 is unsupported";

fn unsupported(d: usize, sign: VolumeSign) -> Error {
    Error::UnsupportedDimension {
        d,
        sign,
        rule: match sign {
            VolumeSign::Negative => RULE_NEGATIVE,
            VolumeSign::Positive => RULE_POSITIVE,
        },
    }
}

fn check_closed_form_dim(d: usize, sign: VolumeSign) -> Result<()> {
    if d < sign.min_closed_form_dim() {
        Err(unsupported(d, sign))
    } else {
        Ok(())
    }
}

fn row(d: usize, j: usize) -> Integer {
    binomial(d as u64 - 1, j as u64).expect("j <= d - 1")
}

/// Right-hand side of the `j`-th covering constraint `l_j + w >= r_j` of the
/// final dual program, `j = 1..d`: `(-1)^(d+j+1) C(d-1, j-1)` for the
/// negative extreme and `(-1)^(d+j) C(d-1, j-1)` for the positive one.
pub fn dual_rhs(d: usize, sign: VolumeSign, j: usize) -> Integer {
    let magnitude = row(d, j - 1);
    let exponent = d + j + usize::from(sign == VolumeSign::Negative);
    if exponent % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

/// The coefficient vector `(c_1, ..., c_k)`, transcribed from the three-way
/// (even, `d = 1 mod 4`, `d = 3 mod 4`) binomial patterns.
pub fn coeffs(d: usize, sign: VolumeSign) -> Result<Vec<Integer>> {
    check_closed_form_dim(d, sign)?;
    let half = d / 2;
    let mut c = Vec::with_capacity(half);
    let push_pairs = |c: &mut Vec<Integer>, from: usize, to: usize| {
        for j in (from..=to).step_by(2) {
            let b = row(d, j);
            c.push(b.clone());
            c.push(b);
        }
    };
    match sign {
        VolumeSign::Negative => {
            if d % 2 == 0 {
                c.extend((0..half).map(|j| row(d, j)));
            } else if d % 4 == 1 {
                push_pairs(&mut c, 1, half - 1);
            } else {
                push_pairs(&mut c, 1, half - 2);
                c.push(row(d, half));
            }
        }
        VolumeSign::Positive => {
            if d % 2 == 0 {
                c.extend((1..half).map(|j| row(d, j)));
            } else {
                c.push(row(d, 0));
                if d % 4 == 1 {
                    if half >= 2 {
                        push_pairs(&mut c, 2, half - 2);
                    }
                    c.push(row(d, half));
                } else if half >= 1 {
                    push_pairs(&mut c, 2, half - 1);
                }
            }
        }
    }
    Ok(c)
}

/// `w_1..w_k` for coefficients `c` and offset `alpha`, via a running sum of
/// the top coefficients.
pub fn w_sequence(c: &[Rational], alpha: &Rational) -> Vec<Rational> {
    let mut top_sum = Rational::zero();
    c.iter()
        .rev()
        .enumerate()
        .map(|(idx, ck)| {
            top_sum += ck;
            (&top_sum - alpha) / int(idx as i64 + 2)
        })
        .collect()
}

/// `c_i` with `c_0 = 0`; `i` is 1-based.
fn c_at(c: &[Rational], i: usize) -> Rational {
    if i == 0 {
        Rational::zero()
    } else {
        c[i - 1].clone()
    }
}

/// Smallest `i` in `1..=k` with `w_i >= c_{k-i}`. Always exists when
/// `w_k >= 0`.
fn first_crossing(c: &[Rational], w: &[Rational]) -> Option<usize> {
    let k = c.len();
    (1..=k).find(|&i| w[i - 1] >= c_at(c, k - i))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryInstance {
    c: Vec<Rational>,
    e: Vec<Rational>,
    alpha: Rational,
}

impl AuxiliaryInstance {
    /// Checks `0 < c_1 <= ... <= c_k`, `e_i < 0` and `-c_k < alpha <= c_k`.
    ///
    /// `c_1 = c_k` is accepted; the single-coefficient case depends on it.
    pub fn new(c: Vec<Rational>, e: Vec<Rational>, alpha: Rational) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        let Some(ck) = c.last() else {
            return bad("c must have at least one entry".into());
        };
        if !c[0].is_positive() {
            return bad(format!("c_1 = {} is not positive", c[0]));
        }
        if let Some(i) = c.windows(2).position(|w| w[0] > w[1]) {
            return bad(format!("c is not nondecreasing at index {}", i + 1));
        }
        if let Some(i) = e.iter().position(|x| !x.is_negative()) {
            return bad(format!("e_{} = {} is not negative", i + 1, e[i]));
        }
        if !(-ck < alpha && &alpha <= ck) {
            return bad(format!("alpha = {alpha} outside (-c_k, c_k] with c_k = {ck}"));
        }
        Ok(AuxiliaryInstance { c, e, alpha })
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn e(&self) -> &[Rational] {
        &self.e
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn w_sequence(&self) -> Vec<Rational> {
        w_sequence(&self.c, &self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliarySolution {
    pub i0: usize,
    pub w: Rational,
    pub y: Vec<Rational>,
    pub z: Vec<Rational>,
}

pub fn solve_auxiliary(inst: &AuxiliaryInstance) -> AuxiliarySolution {
    let k = inst.c.len();
    let ws = inst.w_sequence();
    let i0 = first_crossing(&inst.c, &ws).expect("w_k >= 0 = c_0 whenever alpha <= c_k");
    let w = ws[i0 - 1].clone();
    let y = inst
        .c
        .iter()
        .enumerate()
        .map(|(idx, ci)| {
            if idx < k - i0 {
                Rational::zero()
            } else {
                ci - &w
            }
        })
        .collect();
    AuxiliarySolution {
        i0,
        w,
        y,
        z: vec![Rational::zero(); inst.e.len()],
    }
}

/// Where the solution's numbers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionSource {
    /// The `i0` search over the binomial coefficient vector; the box is
    /// `[i0/(i0+1), 1]^d`.
    ClosedForm,
    /// Negative extreme for `d = 3..6`; the box has `b < 1` and there is no
    /// coefficient vector or `i0`.
    SmallDimension,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSolution {
    pub d: usize,
    pub sign: VolumeSign,
    pub source: SolutionSource,
    pub coeffs: Vec<Integer>,
    pub w_sequence: Vec<Rational>,
    pub i0: Option<usize>,
    /// Signed: negative for [`VolumeSign::Negative`].
    pub volume: Rational,
    pub box_edge_a: Rational,
    pub box_edge_b: Rational,
    /// `delta_1..delta_d`.
    pub delta: Vec<Rational>,
    /// `q_0..q_d`, the grid value on vertices with `|I|_1 = i`.
    pub q_levels: Vec<Rational>,
}

pub fn extreme_volume(d: usize, sign: VolumeSign) -> Result<ClosedFormSolution> {
    if d < 3 {
        return Err(unsupported(d, sign));
    }
    if sign == VolumeSign::Negative && d < 7 {
        let small = small_dims::solve_small_min(d)?;
        let delta = small.q_levels.windows(2).map(|p| &p[1] - &p[0]).collect();
        return Ok(ClosedFormSolution {
            d,
            sign,
            source: SolutionSource::SmallDimension,
            coeffs: Vec::new(),
            w_sequence: Vec::new(),
            i0: None,
            volume: small.volume,
            box_edge_a: small.a,
            box_edge_b: small.b,
            delta,
            q_levels: small.q_levels,
        });
    }

    let coeffs = coeffs(d, sign)?;
    let c: Vec<Rational> = coeffs.iter().cloned().map(Rational::from_integer).collect();
    let k = c.len();
    let ws = w_sequence(&c, &sign.alpha());
    let i0 = first_crossing(&c, &ws).expect("terminal w is nonnegative");
    let w = ws[i0 - 1].clone();
    let threshold = c_at(&c, k - i0);
    let step = Rational::new(Integer::one(), Integer::from(i0 + 1));

    let delta: Vec<Rational> = (1..=d)
        .map(|j| {
            let active = j == d || {
                let rhs = Rational::from_integer(dual_rhs(d, sign, j));
                rhs.is_positive() && rhs > threshold
            };
            if active {
                step.clone()
            } else {
                Rational::zero()
            }
        })
        .collect();

    Ok(ClosedFormSolution {
        d,
        sign,
        source: SolutionSource::ClosedForm,
        coeffs,
        w_sequence: ws,
        i0: Some(i0),
        volume: match sign {
            VolumeSign::Negative => -w,
            VolumeSign::Positive => w,
        },
        box_edge_a: Rational::new(Integer::from(i0), Integer::from(i0 + 1)),
        box_edge_b: Rational::one(),
        q_levels: q_levels(&delta),
        delta,
    })
}

/// Prefix sums `q_0 = 0, q_j = q_{j-1} + delta_j`.
pub fn q_levels(delta: &[Rational]) -> Vec<Rational> {
    let mut levels = Vec::with_capacity(delta.len() + 1);
    let mut acc = Rational::zero();
    levels.push(acc.clone());
    for step in delta {
        acc += step;
        levels.push(acc.clone());
    }
    levels
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxComparison {
    /// `i0` of the negative extreme minus `i0` of the positive one.
    pub i0_diff: i64,
    /// `w_+ - w_-` when both searches stop at the same index.
    pub volume_gap: Option<Rational>,
}

/// Relation between the two searches in even dimensions `d >= 8`.
pub fn compare_min_max(d: usize) -> Result<MinMaxComparison> {
    if d % 2 != 0 || d < 8 {
        return Err(Error::Domain(format!(
            "compare_min_max requires an even dimension d >= 8, got {d}"
        )));
    }
    let min = extreme_volume(d, VolumeSign::Negative)?;
    let max = extreme_volume(d, VolumeSign::Positive)?;
    let (i_min, i_max) = (min.i0.expect("closed form"), max.i0.expect("closed form"));
    let i0_diff = i_min as i64 - i_max as i64;
    let volume_gap = (i0_diff == 0).then(|| &max.volume + &min.volume);
    Ok(MinMaxComparison { i0_diff, volume_gap })
}

/// `w_k`, the value the search reaches if it runs to the last index, from the
/// power-of-two identities for the binomial half-sums.
pub fn terminal_w(d: usize, sign: VolumeSign) -> Result<Rational> {
    check_closed_form_dim(d, sign)?;
    let half = d / 2;
    let (num, den) = match (sign, d % 2 == 0) {
        (VolumeSign::Negative, true) => (pow2(d as u32 - 2) - 1, half + 1),
        (VolumeSign::Positive, true) => (pow2(d as u32 - 1), d),
        (VolumeSign::Negative, false) => (pow2(d as u32 - 2) - 1, half + 1),
        (VolumeSign::Positive, false) => (pow2(d as u32 - 2), (d + 1) / 2),
    };
    Ok(Rational::new(num, Integer::from(den)))
}
