//! Scalar arithmetic back-ends for the divided-difference evaluators.
//!
//! Both closed-form paths are written once against [`Arithmetic`] and run in
//! either hardware doubles or binary floating point of a chosen width.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;

/// Decimal digits below which extended evaluation never goes.
pub const MIN_EXTENDED_DIGITS: usize = 50;

pub trait Arithmetic {
    type Num: Clone
        + Debug
        + Add<Output = Self::Num>
        + Sub<Output = Self::Num>
        + Mul<Output = Self::Num>
        + Div<Output = Self::Num>
        + Neg<Output = Self::Num>;

    /// Exact conversion of a double (extended back-ends never round here).
    fn num(&self, x: f64) -> Self::Num;
    fn int(&self, k: u64) -> Self::Num;
    fn ln(&self, x: &Self::Num) -> Self::Num;
    fn to_f64(&self, x: &Self::Num) -> f64;

    fn zero(&self) -> Self::Num {
        self.int(0)
    }

    fn one(&self) -> Self::Num {
        self.int(1)
    }

    fn powi(&self, x: &Self::Num, k: u32) -> Self::Num {
        let mut acc = self.one();
        let mut base = x.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Double;

impl Arithmetic for Double {
    type Num = f64;

    fn num(&self, x: f64) -> f64 {
        x
    }

    fn int(&self, k: u64) -> f64 {
        k as f64
    }

    fn ln(&self, x: &f64) -> f64 {
        x.ln()
    }

    fn to_f64(&self, x: &f64) -> f64 {
        *x
    }
}

pub type BigFloat = FBig<HalfEven, 2>;

/// Binary floating point with a fixed mantissa width in bits.
#[derive(Debug, Clone, Copy)]
pub struct Extended {
    bits: usize,
}

impl Extended {
    pub fn with_bits(bits: usize) -> Self {
        Self { bits: bits.max(digits_to_bits(MIN_EXTENDED_DIGITS)) }
    }

    pub fn with_digits(digits: usize) -> Self {
        Self::with_bits(digits_to_bits(digits))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }
}

fn digits_to_bits(digits: usize) -> usize {
    // log2(10) ~ 3.3219
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
}

impl Arithmetic for Extended {
    type Num = BigFloat;

    fn num(&self, x: f64) -> BigFloat {
        BigFloat::try_from(x)
            .expect("finite input")
            .with_precision(self.bits)
            .value()
    }

    fn int(&self, k: u64) -> BigFloat {
        BigFloat::from(k).with_precision(self.bits).value()
    }

    fn ln(&self, x: &BigFloat) -> BigFloat {
        fast_ln(x, self.bits)
    }

    fn to_f64(&self, x: &BigFloat) -> f64 {
        x.to_f64().value()
    }
}

/// Entries per octave of the logarithm table.
const LN_TABLE_STEPS: i64 = 64;

/// Per-width constants: `ln(1 + k / LN_TABLE_STEPS)` for
/// `k = 0 ..= LN_TABLE_STEPS`, and the series coefficients `1 / (2j + 1)`.
struct LnTable {
    logs: Vec<BigFloat>,
    odd_inverses: Vec<BigFloat>,
}

fn ln_table(width: usize) -> Arc<LnTable> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<LnTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    if let Some(t) = tables.lock().expect("ln table lock").get(&width) {
        return t.clone();
    }
    let logs = (0..=LN_TABLE_STEPS)
        .map(|k| {
            let c = BigFloat::from_parts(IBig::from(LN_TABLE_STEPS + k), -6).with_precision(width + 16).value();
            c.ln().with_precision(width).value()
        })
        .collect();
    // |z|^(2j+1) <= 2^-(8 (2j+1)) must fall below 2^-width
    let odd_inverses = (0..width / 16 + 2)
        .map(|j| BigFloat::ONE.with_precision(width).value() / BigFloat::from(2 * j as u64 + 1))
        .collect();
    let table = Arc::new(LnTable { logs, odd_inverses });
    tables.lock().expect("ln table lock").entry(width).or_insert(table).clone()
}

/// Natural logarithm to `bits` bits. dashu's own `ln` is accurate but slow at
/// these widths; here the argument is reduced to `m` in `[1, 2)` and then to
/// within `1/128` of a tabulated point `c`, leaving
/// `ln(m / c) = 2 atanh((m - c) / (m + c))` with `|z| <= 2^-8`.
fn fast_ln(x: &BigFloat, bits: usize) -> BigFloat {
    let approx = x.to_f64().value();
    if !(approx > 0.0 && approx.is_finite()) {
        return x.ln();
    }
    // working width: guard bits, rounded up so tables are shared
    let width = (bits + 32).div_ceil(64) * 64;
    let table = ln_table(width);
    let ln2 = &table.logs[LN_TABLE_STEPS as usize];
    let mut e = approx.log2().floor() as isize;
    let mut m = x.clone().with_precision(width).value() * BigFloat::from_parts(IBig::ONE, -e);
    let one = BigFloat::ONE;
    let two = BigFloat::from(2u8);
    // the double estimate of the exponent can be off by one near powers of two
    if m < one {
        m *= two.clone();
        e -= 1;
    } else if m >= two {
        m /= two.clone();
        e += 1;
    }
    let mf = m.to_f64().value();
    let k = (((mf - 1.0) * LN_TABLE_STEPS as f64).round() as i64).clamp(0, LN_TABLE_STEPS);
    let c = BigFloat::from_parts(IBig::from(LN_TABLE_STEPS + k), -6);
    let z = (m.clone() - c.clone()) / (m + c);
    let z2 = z.clone() * z.clone();
    // atanh(z) / z = sum_j z^(2j) / (2j + 1), by Horner in z^2
    let mut series = BigFloat::ZERO.with_precision(width).value();
    for inv in table.odd_inverses.iter().rev() {
        series = series * z2.clone() + inv.clone();
    }
    let result = BigFloat::from(e as i64) * ln2.clone() + table.logs[k as usize].clone() + two * z * series;
    result.with_precision(bits).value()
}

/// How the closed-form evaluators pick a back-end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Doubles for well-conditioned node sets, extended otherwise.
    #[default]
    Auto,
    Double,
    /// Extended with at least this many significant decimal digits.
    Extended(usize),
}

/// Base-2 logarithm of the worst-case rounding amplification of a Newton
/// divided-difference table over `nodes`: at level `k` an error is divided by
/// the smallest non-zero span `z[i + k] - z[i]`. Coincident (confluent) spans
/// are seeded analytically and contribute nothing.
pub fn amplification_log2(nodes: &[f64]) -> f64 {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let scale = sorted.first().map_or(1.0, |x| x.abs()).max(f64::MIN_POSITIVE);
    let n = sorted.len();
    let mut total = 0.0;
    for k in 1..n {
        let mut min_span = f64::INFINITY;
        for i in 0..n - k {
            let span = (sorted[i] - sorted[i + k]).abs();
            if span > 0.0 {
                min_span = min_span.min(span);
            }
        }
        if min_span.is_finite() && min_span < scale {
            total += (scale / min_span).log2();
        }
    }
    total
}
