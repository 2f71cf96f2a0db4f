//! Tables, plot records and the oracle verification run.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{render_rational, Integer, Rational};
use crate::closed_form::{extreme_volume, ClosedFormSolution, VolumeSign, RULE_NEGATIVE, RULE_POSITIVE};
use crate::error::{Error, Result};
use crate::lp::{dualize, solve, standardize};
use crate::models::{build, LpFamily, FULL_LP_MAX_DIM};

/// Significant digits of the logarithms in tables and plot records.
pub const LOG2_DIGITS: usize = 20;

/// Fractional bits of the logarithm before decimal rounding.
const LOG_FRAC_BITS: u64 = 96;
/// Working precision of the fixed-point squaring loop.
const WORK_BITS: u64 = 256;

/// `log2(x)` rounded to `digits` significant decimal digits, for `x > 0`.
///
/// `x` is scaled by a power of two into `[1, 2)` using bit lengths, and the
/// fractional bits come from repeated squaring in fixed point, so no step
/// goes through a machine float.
pub fn log2_decimal(x: &Rational, digits: usize) -> Result<String> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("log2 of a nonpositive value {x}")));
    }
    let (p, q) = (x.numer(), x.denom());
    let mut exp = p.bits() as i64 - q.bits() as i64;
    // y = x / 2^exp lies in (1/2, 2); bring it into [1, 2).
    let scaled = |e: i64| -> Integer {
        let shift = WORK_BITS as i64 - e;
        if shift >= 0 {
            (p << shift as u64) / q
        } else {
            (p >> (-shift) as u64) / q
        }
    };
    let one = Integer::one() << WORK_BITS;
    let mut y = scaled(exp);
    if y < one {
        exp -= 1;
        y = scaled(exp);
    }
    let two = &one << 1u32;
    let mut frac = Integer::zero();
    for _ in 0..LOG_FRAC_BITS {
        y = (&y * &y) >> WORK_BITS;
        frac <<= 1u32;
        if y >= two {
            y >>= 1u32;
            frac += 1u32;
        }
    }
    let value = Rational::new((Integer::from(exp) << LOG_FRAC_BITS) + frac, Integer::one() << LOG_FRAC_BITS);
    Ok(format_significant(&value, digits))
}

/// Decimal text of `v` with `digits` significant digits, rounding half away
/// from zero. Zero renders as `0`.
pub fn format_significant(v: &Rational, digits: usize) -> String {
    assert!(digits > 0);
    if v.is_zero() {
        return "0".to_string();
    }
    let negative = v.is_negative();
    let v = v.abs();
    // Decimal exponent e with 10^e <= v < 10^(e+1).
    let ten = Rational::from_integer(10.into());
    let mut e: i64 = v.to_integer().to_string().len() as i64 - 1;
    if v < Rational::one() {
        e = -1;
        let mut probe = &v * &ten;
        while probe < Rational::one() {
            probe *= &ten;
            e -= 1;
        }
    }
    let shift = digits as i64 - 1 - e;
    let scale = Rational::from_integer(Integer::from(10).pow(shift.unsigned_abs() as u32));
    let scaled = if shift >= 0 { &v * &scale } else { &v / &scale };
    let half = Rational::new(1.into(), 2.into());
    let mut n = (scaled + half).floor().to_integer();
    let mut point = e;
    if n.to_string().len() > digits {
        // Rounding carried into a new leading digit.
        n /= 10;
        point += 1;
    }
    let body = n.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-point - 1) as usize));
        out.push_str(&body);
    } else if point as usize + 1 >= body.len() {
        out.push_str(&body);
        out.extend(std::iter::repeat('0').take(point as usize + 1 - body.len()));
    } else {
        let (int_part, frac_part) = body.split_at(point as usize + 1);
        write!(out, "{int_part}.{frac_part}").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub d: usize,
    pub i0: usize,
    pub volume: Rational,
    pub volume_log2_abs: String,
}

fn check_range(from: usize, to: usize, sign: VolumeSign) -> Result<()> {
    let min = sign.min_closed_form_dim();
    let offenders: Vec<String> = (from..=to.min(min.saturating_sub(1))).map(|d| d.to_string()).collect();
    if offenders.is_empty() {
        return Ok(());
    }
    let rule = match sign {
        VolumeSign::Negative => RULE_NEGATIVE,
        VolumeSign::Positive => RULE_POSITIVE,
    };
    Err(Error::Domain(format!(
        "unsupported dimensions for {sign}: {} ({rule}; tables report i0 and need the closed form)",
        offenders.join(", ")
    )))
}

pub fn table(from: usize, to: usize, sign: VolumeSign) -> Result<Vec<TableRow>> {
    if from > to {
        return Err(Error::Domain(format!("empty range {from}..{to}: need from <= to")));
    }
    check_range(from, to, sign)?;
    (from..=to)
        .map(|d| {
            let s = extreme_volume(d, sign)?;
            Ok(TableRow {
                d,
                i0: s.i0.expect("closed-form dimension"),
                volume_log2_abs: log2_decimal(&s.volume.abs(), LOG2_DIGITS)?,
                volume: s.volume,
            })
        })
        .collect()
}

/// `d,i0,volume` with LF line endings.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("d,i0,volume\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.d, r.i0, render_rational(&r.volume)).unwrap();
    }
    out
}

#[derive(Serialize)]
struct TableRowJson<'a> {
    d: usize,
    i0: usize,
    volume: String,
    volume_log2_abs: &'a str,
}

pub fn table_json(rows: &[TableRow]) -> String {
    let doc: Vec<TableRowJson> = rows
        .iter()
        .map(|r| TableRowJson {
            d: r.d,
            i0: r.i0,
            volume: render_rational(&r.volume),
            volume_log2_abs: &r.volume_log2_abs,
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&doc).expect("rows serialise");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlotRecord {
    pub d: usize,
    pub i0_min: usize,
    pub i0_max: usize,
    pub log2_abs_min: String,
    pub log2_abs_max: String,
    /// `i0_min - i0_max`.
    pub i0_diff: i64,
}

/// One record per dimension; an empty range gives no records.
pub fn plotdata(from: usize, to: usize) -> Result<Vec<PlotRecord>> {
    if from > to {
        return Ok(Vec::new());
    }
    check_range(from, to, VolumeSign::Negative)?;
    (from..=to)
        .map(|d| {
            let min = extreme_volume(d, VolumeSign::Negative)?;
            let max = extreme_volume(d, VolumeSign::Positive)?;
            let (i0_min, i0_max) = (min.i0.expect("closed form"), max.i0.expect("closed form"));
            Ok(PlotRecord {
                d,
                i0_min,
                i0_max,
                log2_abs_min: log2_decimal(&min.volume.abs(), LOG2_DIGITS)?,
                log2_abs_max: log2_decimal(&max.volume.abs(), LOG2_DIGITS)?,
                i0_diff: i0_min as i64 - i0_max as i64,
            })
        })
        .collect()
}

pub fn plotdata_csv(records: &[PlotRecord]) -> String {
    let mut out = String::from("d,i0_min,i0_max,log2_abs_min,log2_abs_max,i0_diff\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.d, r.i0_min, r.i0_max, r.log2_abs_min, r.log2_abs_max, r.i0_diff
        )
        .unwrap();
    }
    out
}

pub fn plotdata_json(records: &[PlotRecord]) -> String {
    let mut text = serde_json::to_string_pretty(records).expect("records serialise");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCheck {
    /// What was compared, e.g. `reduced = closed form`.
    pub what: String,
    pub d: usize,
    pub sign: VolumeSign,
    pub expected: Rational,
    pub actual: Option<Rational>,
}

impl VerifyCheck {
    pub fn passed(&self) -> bool {
        self.actual.as_ref() == Some(&self.expected)
    }

    pub fn line(&self) -> String {
        let actual = self
            .actual
            .as_ref()
            .map_or_else(|| "not optimal".to_string(), render_rational);
        if self.passed() {
            format!("PASS {} d={} {}: {}", self.what, self.d, self.sign, actual)
        } else {
            format!(
                "FAIL {} d={} {}: expected {}, got {}",
                self.what,
                self.d,
                self.sign,
                render_rational(&self.expected),
                actual
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(VerifyCheck::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }
}

/// Compares the closed form with the simplex on `ReducedLp` and on its
/// mechanical dual for `d = 3..=reduced_max`, and the three primal forms
/// against each other for `d = 3..=full_max`.
///
/// `closed` supplies the closed-form solution; production callers pass
/// [`extreme_volume`].
pub fn verify<F>(reduced_max: usize, full_max: usize, closed: F) -> Result<VerifyReport>
where
    F: Fn(usize, VolumeSign) -> Result<ClosedFormSolution>,
{
    if full_max > FULL_LP_MAX_DIM {
        return Err(Error::Domain(format!(
            "full LP checks are limited to d <= {FULL_LP_MAX_DIM}, got {full_max}"
        )));
    }
    let mut report = VerifyReport::default();
    for sign in VolumeSign::ALL {
        for d in 3..=reduced_max {
            let expected = closed(d, sign)?.volume;
            let reduced = build(LpFamily::ReducedLp, d, sign)?;
            let primal = solve(&reduced)?.objective_value;
            let dual = solve(&dualize(&standardize(&reduced)?)?)?.objective_value;
            report.checks.push(VerifyCheck {
                what: "reduced LP = closed form".into(),
                d,
                sign,
                expected: expected.clone(),
                actual: primal,
            });
            report.checks.push(VerifyCheck {
                what: "dual of reduced LP = closed form".into(),
                d,
                sign,
                expected,
                actual: dual,
            });
        }
        for d in 3..=full_max {
            let reduced = solve(&build(LpFamily::ReducedLp, d, sign)?)?.optimum()?.clone();
            for family in [LpFamily::SymmetricLp, LpFamily::FullLp] {
                report.checks.push(VerifyCheck {
                    what: format!("{family} LP = reduced LP"),
                    d,
                    sign,
                    expected: reduced.clone(),
                    actual: solve(&build(family, d, sign)?)?.objective_value,
                });
            }
        }
    }
    Ok(report)
}

/// [`verify`] against the real closed form.
pub fn verify_closed_form(reduced_max: usize, full_max: usize) -> Result<VerifyReport> {
    verify(reduced_max, full_max, extreme_volume)
}
