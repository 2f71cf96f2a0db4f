//! Quasi-copula values on the `2^d` vertices of a box.
//!
//! Vertex `I` of the box `[a, b]` has coordinate `a_k` where `I_k = 0` and
//! `b_k` where `I_k = 1`. Multi-indices are stored as bit masks, bit `k - 1`
//! for coordinate `k`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, parse_rational, render_rational, Rational};
use crate::closed_form::ClosedFormSolution;
use crate::error::{Error, Result};

/// Largest dimension for which a full grid is materialised.
pub const MAX_GRID_DIM: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub d: usize,
    pub bits: u64,
}

impl MultiIndex {
    pub fn new(d: usize, bits: u64) -> Self {
        debug_assert!(d < 64 && bits >> d == 0);
        MultiIndex { d, bits }
    }

    /// `I_k` for 1-based `k`.
    pub fn get(self, k: usize) -> bool {
        self.bits >> (k - 1) & 1 == 1
    }

    pub fn norm(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// `(-1)^(d - |I|_1)`.
    pub fn sign(self) -> i32 {
        if (self.d - self.norm()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `I + E^(k)`; `None` if `I_k` is already set.
    pub fn raise(self, k: usize) -> Option<MultiIndex> {
        (!self.get(k)).then(|| MultiIndex::new(self.d, self.bits | 1 << (k - 1)))
    }

    /// Coordinate 1 first.
    pub fn to_bitstring(self) -> String {
        (1..=self.d).map(|k| if self.get(k) { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        let d = s.len();
        if d == 0 || d >= 64 {
            return Err(Error::Structural(format!("multi-index {s:?} has unsupported length {d}")));
        }
        let mut bits = 0u64;
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << k,
                _ => return Err(Error::Structural(format!("multi-index {s:?} is not a 0/1 string"))),
            }
        }
        Ok(MultiIndex { d, bits })
    }

    pub fn all(d: usize) -> impl Iterator<Item = MultiIndex> {
        (0..1u64 << d).map(move |bits| MultiIndex { d, bits })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridBox {
    a: Vec<Rational>,
    b: Vec<Rational>,
}

impl GridBox {
    /// Requires `0 <= a_i < b_i <= 1` for every coordinate.
    pub fn new(a: Vec<Rational>, b: Vec<Rational>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::Structural(format!(
                "box edges have lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        let one = Rational::from_integer(1.into());
        for (i, (ai, bi)) in a.iter().zip(&b).enumerate() {
            if ai.is_negative() || ai >= bi || bi > &one {
                return Err(Error::Domain(format!(
                    "coordinate {}: need 0 <= a < b <= 1, got a = {ai}, b = {bi}",
                    i + 1
                )));
            }
        }
        Ok(GridBox { a, b })
    }

    pub fn cube(d: usize, a: Rational, b: Rational) -> Result<Self> {
        GridBox::new(vec![a; d], vec![b; d])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn vertex(&self, idx: MultiIndex) -> Vec<Rational> {
        (1..=self.dim())
            .map(|k| if idx.get(k) { self.b[k - 1].clone() } else { self.a[k - 1].clone() })
            .collect()
    }
}

/// `sum x_i - d + 1`.
pub fn g_lower(x: &[Rational]) -> Rational {
    let d = Rational::from_integer((x.len() as i64).into());
    x.iter().sum::<Rational>() - d + Rational::from_integer(1.into())
}

/// `min x_i`. Panics on an empty slice.
pub fn h_upper(x: &[Rational]) -> Rational {
    x.iter().min().expect("nonempty point").clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `q_J - q_I >= 0` fails along an edge.
    Monotonicity,
    /// `q_J - q_I <= b_l - a_l` fails along an edge.
    Lipschitz,
    /// `max(0, G_d(x_I)) <= q_I` fails.
    LowerBound,
    /// `q_I <= H_d(x_I)` fails.
    UpperBound,
}

/// A failed inequality `lhs <= rhs`. Edge constraints carry the lower end
/// `I` of the edge as `vertex` and its direction as `axis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertex: MultiIndex,
    pub axis: Option<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}", self.kind, self.vertex)?;
        if let Some(axis) = self.axis {
            write!(f, " along axis {axis}")?;
        }
        write!(
            f,
            ": {} <= {} fails",
            render_rational(&self.lhs),
            render_rational(&self.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridQuasiCopula {
    bbox: GridBox,
    /// Indexed by `MultiIndex::bits`.
    q: Vec<Rational>,
}

impl GridQuasiCopula {
    pub fn new(bbox: GridBox, q: Vec<Rational>) -> Result<Self> {
        let d = bbox.dim();
        if d > MAX_GRID_DIM {
            return Err(Error::Domain(format!("grid dimension {d} exceeds {MAX_GRID_DIM}")));
        }
        if q.len() != 1 << d {
            return Err(Error::Structural(format!(
                "grid over d = {d} needs {} values, got {}",
                1u64 << d,
                q.len()
            )));
        }
        Ok(GridQuasiCopula { bbox, q })
    }

    /// Builds from an explicit vertex map; every vertex must be present.
    pub fn from_map(bbox: GridBox, values: &BTreeMap<MultiIndex, Rational>) -> Result<Self> {
        let d = bbox.dim();
        if d > MAX_GRID_DIM {
            return Err(Error::Domain(format!("grid dimension {d} exceeds {MAX_GRID_DIM}")));
        }
        if let Some(bad) = values.keys().find(|idx| idx.d != d) {
            return Err(Error::Structural(format!("multi-index {bad} has the wrong length for d = {d}")));
        }
        let q = MultiIndex::all(d)
            .map(|idx| {
                values
                    .get(&idx)
                    .cloned()
                    .ok_or_else(|| Error::Structural(format!("missing grid value at vertex {idx}")))
            })
            .collect::<Result<_>>()?;
        GridQuasiCopula::new(bbox, q)
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn bbox(&self) -> &GridBox {
        &self.bbox
    }

    pub fn value(&self, idx: MultiIndex) -> &Rational {
        &self.q[idx.bits as usize]
    }

    pub fn set_value(&mut self, idx: MultiIndex, value: Rational) {
        self.q[idx.bits as usize] = value;
    }

    /// `sum_I sign(I) q_I`.
    pub fn volume(&self) -> Rational {
        let d = self.dim();
        let mut total = Rational::zero();
        for idx in MultiIndex::all(d) {
            let v = self.value(idx);
            if idx.sign() > 0 {
                total += v;
            } else {
                total -= v;
            }
        }
        total
    }

    /// Checks every edge and vertex constraint and returns all failures.
    pub fn validate(&self) -> Vec<Violation> {
        let d = self.dim();
        let mut out = Vec::new();
        let zero = Rational::zero();
        for idx in MultiIndex::all(d) {
            let q = self.value(idx);
            let x = self.bbox.vertex(idx);
            let lower = g_lower(&x).max(zero.clone());
            if q < &lower {
                out.push(Violation {
                    kind: ViolationKind::LowerBound,
                    vertex: idx,
                    axis: None,
                    lhs: lower,
                    rhs: q.clone(),
                });
            }
            let upper = h_upper(&x);
            if q > &upper {
                out.push(Violation {
                    kind: ViolationKind::UpperBound,
                    vertex: idx,
                    axis: None,
                    lhs: q.clone(),
                    rhs: upper,
                });
            }
            for axis in 1..=d {
                let Some(upper_end) = idx.raise(axis) else {
                    continue;
                };
                let step = self.value(upper_end) - q;
                let width = &self.bbox.b[axis - 1] - &self.bbox.a[axis - 1];
                if step.is_negative() {
                    out.push(Violation {
                        kind: ViolationKind::Monotonicity,
                        vertex: idx,
                        axis: Some(axis),
                        lhs: zero.clone(),
                        rhs: step,
                    });
                } else if step > width {
                    out.push(Violation {
                        kind: ViolationKind::Lipschitz,
                        vertex: idx,
                        axis: Some(axis),
                        lhs: step,
                        rhs: width,
                    });
                }
            }
        }
        out
    }

    /// Relabels coordinates: new coordinate `k` is old coordinate `perm[k-1]`
    /// (both 1-based).
    pub fn permute(&self, perm: &[usize]) -> Result<GridQuasiCopula> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || !perm.iter().all(|&p| p >= 1 && p <= d && !std::mem::replace(&mut seen[p - 1], true)) {
            return Err(Error::Structural(format!("{perm:?} is not a permutation of 1..={d}")));
        }
        let pick = |v: &[Rational]| perm.iter().map(|&p| v[p - 1].clone()).collect();
        let bbox = GridBox::new(pick(&self.bbox.a), pick(&self.bbox.b))?;
        let q = MultiIndex::all(d)
            .map(|new| self.value(permute_index(new, perm)).clone())
            .collect();
        GridQuasiCopula::new(bbox, q)
    }

    pub fn to_json(&self) -> String {
        let d = self.dim();
        let doc = GridJson {
            d,
            a: self.bbox.a.iter().map(render_rational).collect(),
            b: self.bbox.b.iter().map(render_rational).collect(),
            q: MultiIndex::all(d)
                .map(|idx| (idx.to_bitstring(), render_rational(self.value(idx))))
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("grid serialises");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GridJson =
            serde_json::from_str(text).map_err(|e| Error::Structural(format!("grid JSON: {e}")))?;
        if doc.a.len() != doc.d || doc.b.len() != doc.d {
            return Err(Error::Structural(format!("box edges do not have length d = {}", doc.d)));
        }
        let parse_all = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>();
        let bbox = GridBox::new(parse_all(&doc.a)?, parse_all(&doc.b)?)?;
        let mut values = BTreeMap::new();
        for (key, value) in &doc.q {
            values.insert(MultiIndex::from_bitstring(key)?, parse_rational(value)?);
        }
        GridQuasiCopula::from_map(bbox, &values)
    }
}

/// The old multi-index whose value lands at `new` under `perm`.
fn permute_index(new: MultiIndex, perm: &[usize]) -> MultiIndex {
    let mut bits = 0u64;
    for (k, &p) in perm.iter().enumerate() {
        if new.get(k + 1) {
            bits |= 1 << (p - 1);
        }
    }
    MultiIndex::new(new.d, bits)
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    d: usize,
    a: Vec<String>,
    b: Vec<String>,
    q: BTreeMap<String, String>,
}

/// `sum_i (-1)^(d-i) C(d, i) q_i` for level values `q_0..q_d`.
pub fn level_volume(q_levels: &[Rational]) -> Rational {
    let d = q_levels.len() - 1;
    q_levels
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let term = Rational::from_integer(binomial(d as u64, i as u64).expect("i <= d")) * q;
            if (d - i) % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// The grid `q_I = q_levels[|I|_1]` on the solution's cube.
pub fn symmetric_grid(sol: &ClosedFormSolution) -> Result<GridQuasiCopula> {
    let d = sol.d;
    if sol.q_levels.len() != d + 1 {
        return Err(Error::Structural(format!(
            "expected {} q levels, got {}",
            d + 1,
            sol.q_levels.len()
        )));
    }
    if d > MAX_GRID_DIM {
        return Err(Error::Domain(format!("grid dimension {d} exceeds {MAX_GRID_DIM}")));
    }
    let bbox = GridBox::cube(d, sol.box_edge_a.clone(), sol.box_edge_b.clone())?;
    let q = MultiIndex::all(d).map(|idx| sol.q_levels[idx.norm()].clone()).collect();
    GridQuasiCopula::new(bbox, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::closed_form::{extreme_volume, VolumeSign};
    use proptest::prelude::*;

    #[test]
    fn g_and_h_examples() {
        let ones = vec![int(1); 5];
        assert_eq!((g_lower(&ones), h_upper(&ones)), (int(1), int(1)));
        let x = vec![int(0), ratio(1, 3), ratio(3, 4)];
        assert_eq!(h_upper(&x), int(0));
        let halves = vec![ratio(1, 2); 7];
        assert_eq!((g_lower(&halves), h_upper(&halves)), (ratio(-5, 2), ratio(1, 2)));
    }

    #[test]
    fn sign_sums_vanish() {
        for d in 1..=16 {
            let s: i64 = MultiIndex::all(d).map(|i| i64::from(i.sign())).sum();
            assert_eq!(s, 0, "d={d}");
        }
    }

    #[test]
    fn bitstrings_put_coordinate_one_first() {
        let idx = MultiIndex::new(4, 0b0011);
        assert_eq!(idx.to_bitstring(), "1100");
        assert_eq!(MultiIndex::from_bitstring("1100").unwrap(), idx);
        assert_eq!(idx.sign(), 1);
        assert_eq!(MultiIndex::new(3, 0b001).sign(), 1);
        assert_eq!(MultiIndex::new(3, 0b011).sign(), -1);
        assert!(MultiIndex::from_bitstring("10a").is_err());
    }

    #[test]
    fn box_rejects_bad_edges() {
        assert!(GridBox::cube(2, ratio(1, 2), ratio(1, 2)).is_err());
        assert!(GridBox::cube(2, int(-1), int(1)).is_err());
        assert!(GridBox::cube(2, int(0), ratio(3, 2)).is_err());
        assert!(GridBox::new(vec![int(0)], vec![]).is_err());
        assert!(GridBox::cube(2, int(0), int(1)).is_ok());
    }

    #[test]
    fn worked_realizations() {
        let s7 = extreme_volume(7, VolumeSign::Negative).unwrap();
        let g7 = symmetric_grid(&s7).unwrap();
        assert_eq!(g7.bbox().a(), vec![ratio(1, 2); 7].as_slice());
        assert_eq!(g7.bbox().b(), vec![int(1); 7].as_slice());
        assert_eq!(g7.volume(), ratio(-19, 2));
        assert!(g7.validate().is_empty());

        let s8 = extreme_volume(8, VolumeSign::Positive).unwrap();
        let g8 = symmetric_grid(&s8).unwrap();
        assert_eq!(g8.bbox().a()[0], ratio(2, 3));
        assert_eq!(g8.volume(), int(19));
        assert!(g8.validate().is_empty());

        let s3 = extreme_volume(3, VolumeSign::Negative).unwrap();
        let g3 = symmetric_grid(&s3).unwrap();
        assert_eq!((g3.bbox().a()[0].clone(), g3.bbox().b()[0].clone()), (ratio(2, 5), ratio(4, 5)));
        assert_eq!(g3.volume(), ratio(-4, 5));
        assert!(g3.validate().is_empty());
    }

    #[test]
    fn extreme_grids_validate_and_match_level_volume() {
        for d in 3..=14 {
            for sign in VolumeSign::ALL {
                let s = extreme_volume(d, sign).unwrap();
                let g = symmetric_grid(&s).unwrap();
                assert_eq!(g.validate(), vec![], "d={d} {sign}");
                assert_eq!(g.volume(), level_volume(&s.q_levels), "d={d} {sign}");
                assert_eq!(g.volume(), s.volume, "d={d} {sign}");
            }
        }
    }

    #[test]
    fn constant_grid_has_zero_volume() {
        let bbox = GridBox::cube(4, int(0), int(1)).unwrap();
        let g = GridQuasiCopula::new(bbox, vec![ratio(1, 7); 16]).unwrap();
        assert!(g.volume().is_zero());
    }

    #[test]
    fn seeded_violations() {
        // q = 0 at the top vertex of the unit cube breaks G_d = 1.
        let d = 3;
        let bbox = GridBox::cube(d, int(0), int(1)).unwrap();
        let mut q: Vec<Rational> = MultiIndex::all(d)
            .map(|i| g_lower(&bbox.vertex(i)).max(int(0)))
            .collect();
        let g = GridQuasiCopula::new(bbox.clone(), q.clone()).unwrap();
        assert!(g.validate().is_empty());
        q[7] = int(0);
        let v = GridQuasiCopula::new(bbox.clone(), q).unwrap().validate();
        assert!(v.iter().any(|v| v.kind == ViolationKind::LowerBound && v.vertex.bits == 7 && v.lhs == int(1)));

        // q drops from 1/2 to 1/4 along axis 1 at vertex (0, 1).
        let bbox = GridBox::cube(2, ratio(1, 2), int(1)).unwrap();
        let q = vec![int(0), int(0), ratio(1, 2), ratio(1, 4)];
        let v = GridQuasiCopula::new(bbox, q).unwrap().validate();
        assert!(v.iter().any(|v| v.kind == ViolationKind::Monotonicity
            && v.vertex.bits == 0b10
            && v.axis == Some(1)
            && v.rhs == ratio(-1, 4)));
    }

    #[test]
    fn missing_vertex_is_structural() {
        let bbox = GridBox::cube(2, int(0), int(1)).unwrap();
        let mut values = BTreeMap::new();
        for bits in 0..3 {
            values.insert(MultiIndex::new(2, bits), int(0));
        }
        assert!(matches!(
            GridQuasiCopula::from_map(bbox, &values),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = symmetric_grid(&extreme_volume(3, VolumeSign::Negative).unwrap()).unwrap();
        let text = g.to_json();
        assert!(text.contains("\"110\": \"2/5\""));
        assert_eq!(GridQuasiCopula::from_json(&text).unwrap(), g);
        let broken = text.replace("\"111\": \"2/5\"", "\"11\": \"2/5\"");
        assert!(GridQuasiCopula::from_json(&broken).is_err());
    }

    fn arbitrary_grid() -> impl Strategy<Value = (GridQuasiCopula, Vec<usize>)> {
        (2usize..=5).prop_flat_map(|d| {
            let edges = proptest::collection::vec((0i64..4, 1i64..=4), d);
            let values = proptest::collection::vec(0i64..=8, 1 << d);
            let perm = Just((1..=d).collect::<Vec<_>>()).prop_shuffle();
            (edges, values, perm).prop_map(move |(edges, values, perm)| {
                let a = edges.iter().map(|&(lo, _)| ratio(lo, 8)).collect();
                let b = edges.iter().map(|&(lo, w)| ratio((lo + w).min(8), 8)).collect();
                let bbox = GridBox::new(a, b).unwrap();
                let q = values.into_iter().map(|v| ratio(v, 8)).collect();
                (GridQuasiCopula::new(bbox, q).unwrap(), perm)
            })
        })
    }

    proptest! {
        #[test]
        fn permutation_invariance((grid, perm) in arbitrary_grid()) {
            let moved = grid.permute(&perm).unwrap();
            prop_assert_eq!(moved.volume(), grid.volume());
            let original = grid.validate();
            let relabelled = moved.validate();
            prop_assert_eq!(original.len(), relabelled.len());
            // Map each violation of the permuted grid back to the original.
            let mut back: Vec<_> = relabelled
                .into_iter()
                .map(|v| Violation {
                    vertex: permute_index(v.vertex, &perm),
                    axis: v.axis.map(|k| perm[k - 1]),
                    ..v
                })
                .collect();
            let key = |v: &Violation| (v.kind, v.vertex, v.axis);
            back.sort_by_key(key);
            let mut original = original;
            original.sort_by_key(key);
            prop_assert_eq!(back, original);
        }
    }
}
