//! Negative extreme for `d = 3..6`, where the optimal dual has `l_d = 0`.
//!
//! On that branch the dual reads
//!
//! ```text
//! min (d-1) y3  s.t.  sum l = d y3,  l_j + (d-1) y3 >= r_j (j < d),  y3 <= 1
//! ```
//!
//! An optimum makes the covering rows of some set `T` of the positive `r_j`
//! tight, with `l_j = 0` elsewhere, so `y3 = sum_T r_j / (d + |T|(d-1))`.
//! The candidates are the top-`t` sets of positive right-hand sides; a
//! candidate survives if every `l_j` is nonnegative, every other positive row
//! is covered and `y3 <= 1`. The smallest surviving `y3` wins, and the primal
//! box and levels come from complementary slackness.

use indexmap::IndexMap;
use num_traits::{Signed, Zero};

use super::{recover_primal_by_slackness, LpFamily};
use crate::arith::{int, Rational};
use crate::closed_form::{dual_rhs, VolumeSign};
use crate::error::{Error, Result};
use crate::lp::{LpSolution, LpStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct SmallDimCandidate {
    /// 1-based indices `j` of the tight covering rows.
    pub tight: Vec<usize>,
    pub y3: Rational,
    /// `l_j` for the tight rows, in the order of `tight`.
    pub l: Vec<Rational>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallDimSolution {
    pub d: usize,
    pub a: Rational,
    pub b: Rational,
    /// `q_0..q_d`.
    pub q_levels: Vec<Rational>,
    pub volume: Rational,
    pub candidates: Vec<SmallDimCandidate>,
    /// The `DualReduced` optimum the primal was recovered from.
    pub dual: LpSolution,
}

fn check_dim(d: usize) -> Result<()> {
    if (3..=6).contains(&d) {
        Ok(())
    } else {
        Err(Error::Domain(format!("the small-dimension solver covers d = 3..6, got {d}")))
    }
}

pub fn small_min_candidates(d: usize) -> Result<Vec<SmallDimCandidate>> {
    check_dim(d)?;
    let rhs: Vec<(usize, Rational)> = (1..d)
        .map(|j| (j, Rational::from_integer(dual_rhs(d, VolumeSign::Negative, j))))
        .collect();
    let mut positive: Vec<(usize, Rational)> = rhs.iter().filter(|(_, r)| r.is_positive()).cloned().collect();
    positive.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));

    let dm1 = int(d as i64 - 1);
    let mut out = Vec::new();
    for t in 1..=positive.len() {
        let (top, rest) = positive.split_at(t);
        let sum: Rational = top.iter().map(|(_, r)| r).sum();
        let y3 = sum / int((d + t * (d - 1)) as i64);
        let cover = &dm1 * &y3;
        let l: Vec<Rational> = top.iter().map(|(_, r)| r - &cover).collect();
        let feasible = l.iter().all(|x| !x.is_negative())
            && rest.iter().all(|(_, r)| &cover >= r)
            && y3 <= int(1);
        let mut tight: Vec<usize> = top.iter().map(|(j, _)| *j).collect();
        let mut l_sorted: Vec<(usize, Rational)> = tight.iter().cloned().zip(l).collect();
        l_sorted.sort_by_key(|(j, _)| *j);
        tight.sort_unstable();
        out.push(SmallDimCandidate {
            tight,
            y3,
            l: l_sorted.into_iter().map(|(_, v)| v).collect(),
            feasible,
        });
    }
    Ok(out)
}

pub fn solve_small_min(d: usize) -> Result<SmallDimSolution> {
    let candidates = small_min_candidates(d)?;
    let best = candidates
        .iter()
        .filter(|c| c.feasible)
        .min_by(|x, y| x.y3.cmp(&y.y3))
        .ok_or_else(|| Error::Domain(format!("no feasible l_d = 0 candidate for d = {d}")))?
        .clone();

    // Lift to DualReduced: y1 = 0, y2 = d y3, l_d = 0.
    let mut primal = IndexMap::new();
    primal.insert("y1".to_string(), Rational::zero());
    for j in 1..=d {
        let lj = best
            .tight
            .iter()
            .position(|&t| t == j)
            .map_or_else(Rational::zero, |pos| best.l[pos].clone());
        primal.insert(format!("l{j}"), lj);
    }
    primal.insert("y2".to_string(), int(d as i64) * &best.y3);
    primal.insert("y3".to_string(), best.y3.clone());
    let volume = -(int(d as i64 - 1) * &best.y3);
    let dual = LpSolution {
        status: LpStatus::Optimal,
        objective_value: Some(volume.clone()),
        primal,
        basis: Vec::new(),
        pivots: 0,
    };

    let rec = recover_primal_by_slackness(d, VolumeSign::Negative, &dual)?;
    if rec.objective != volume {
        return Err(Error::Precondition(format!(
            "{} value {} differs from the dual value {volume}",
            LpFamily::ReducedLp,
            rec.objective
        )));
    }
    Ok(SmallDimSolution {
        d,
        q_levels: rec.q_levels(),
        a: rec.a,
        b: rec.b,
        volume,
        candidates,
        dual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn r(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| ratio(n, d)).collect()
    }

    #[test]
    fn printed_solutions() {
        let cases = [
            (3, (-4, 5), (2, 5), (4, 5), r(&[(0, 1), (0, 1), (2, 5), (2, 5)])),
            (4, (-9, 7), (3, 7), (6, 7), r(&[(0, 1), (0, 1), (0, 1), (3, 7), (3, 7)])),
            (
                5,
                (-32, 13),
                (8, 13),
                (12, 13),
                r(&[(0, 1), (0, 1), (4, 13), (4, 13), (8, 13), (8, 13)]),
            ),
            (
                6,
                (-75, 16),
                (5, 8),
                (15, 16),
                r(&[(0, 1), (0, 1), (0, 1), (5, 16), (5, 16), (5, 8), (5, 8)]),
            ),
        ];
        for (d, vol, a, b, q) in cases {
            let s = solve_small_min(d).unwrap();
            assert_eq!(s.volume, ratio(vol.0, vol.1), "d={d}");
            assert_eq!((s.a.clone(), s.b.clone()), (ratio(a.0, a.1), ratio(b.0, b.1)), "d={d}");
            assert_eq!(s.q_levels, q, "d={d}");
            assert!(s.b < int(1));
        }
    }

    #[test]
    fn rejected_candidates() {
        // d = 4: making both positive rows tight forces l_1 = -1/5.
        let c = small_min_candidates(4).unwrap();
        let both = c.iter().find(|c| c.tight == [1, 3]).unwrap();
        assert_eq!(both.y3, ratio(2, 5));
        assert_eq!(both.l[0], ratio(-1, 5));
        assert!(!both.feasible);

        // d = 6: y3 = 16/21 (l_1 < 0) and 10/11 (row 5 uncovered) both fail.
        let c = small_min_candidates(6).unwrap();
        let ys: Vec<(Rational, bool)> = c.iter().map(|c| (c.y3.clone(), c.feasible)).collect();
        assert_eq!(
            ys,
            vec![(ratio(10, 11), false), (ratio(15, 16), true), (ratio(16, 21), false)]
        );
        assert_eq!(c[2].l[0], ratio(-59, 21));
    }

    #[test]
    fn dual_tuples() {
        let s = solve_small_min(6).unwrap();
        let vals: Vec<Rational> = s.dual.primal.values().cloned().collect();
        assert_eq!(
            vals,
            r(&[(0, 1), (0, 1), (0, 1), (85, 16), (0, 1), (5, 16), (0, 1), (90, 16), (15, 16)])
        );
        let s = solve_small_min(3).unwrap();
        let vals: Vec<Rational> = s.dual.primal.values().cloned().collect();
        assert_eq!(vals, r(&[(0, 1), (0, 1), (6, 5), (0, 1), (6, 5), (2, 5)]));
    }

    #[test]
    fn outside_range() {
        for d in [0, 2, 7, 20] {
            assert!(matches!(solve_small_min(d), Err(Error::Domain(_))));
        }
    }
}
