//! Truncated formal Laurent series over Q in a local uniformizer `t`.
//!
//! A series is a finite map exponent -> nonzero coefficient together with a
//! `precision` bound: every exponent below `precision` is known exactly
//! (absent means zero), everything from `precision` up is unknown. The zero
//! window is the empty map; its conventional valuation is `precision`, so
//! structural equality of windows is plain map-and-bound equality.
//!
//! Series produced by expanding a rational function carry their source and
//! re-expand lazily when an operation needs coefficients beyond the stored
//! window. Purely windowed series never guess: a request past the window is
//! a `PrecisionExhausted` error, not a silent truncation.

use crate::error::{CoreError, Result};
use crate::point::Point;
use crate::rational::RationalFunction;
use crate::scalar::Rat;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Default window length: acceptance workloads need at most half of this.
pub const DEFAULT_PRECISION: i64 = 24;

/// Exact provenance of a window: the expansion of `func` at `point`.
#[derive(Debug, Clone)]
pub struct ExactSource {
    pub func: RationalFunction,
    pub point: Point,
}

#[derive(Debug, Clone)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Rat>,
    precision: i64,
    source: Option<ExactSource>,
}

impl PartialEq for LaurentSeries {
    /// Window equality; provenance does not participate.
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.precision == other.precision
    }
}

impl Eq for LaurentSeries {}

impl LaurentSeries {
    pub fn zero(precision: i64) -> Self {
        LaurentSeries { coeffs: BTreeMap::new(), precision, source: None }
    }

    pub fn constant(c: Rat, precision: i64) -> Self {
        Self::from_coeffs([(0, c)], precision)
    }

    pub fn one(precision: i64) -> Self {
        Self::constant(Rat::one(), precision)
    }

    pub fn monomial(exp: i64, c: Rat, precision: i64) -> Self {
        Self::from_coeffs([(exp, c)], precision)
    }

    /// Build from (exponent, coefficient) pairs; zero coefficients and
    /// entries at or beyond the precision bound are dropped.
    pub fn from_coeffs<I: IntoIterator<Item = (i64, Rat)>>(pairs: I, precision: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in pairs {
            if e >= precision || c.is_zero() {
                continue;
            }
            let entry = coeffs.entry(e).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&e);
            }
        }
        LaurentSeries { coeffs, precision, source: None }
    }

    pub fn with_source(mut self, func: RationalFunction, point: Point) -> Self {
        self.source = Some(ExactSource { func, point });
        self
    }

    pub fn source(&self) -> Option<&ExactSource> {
        self.source.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.source.is_some()
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Valuation of the window; the empty window reports its precision.
    pub fn valuation(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.precision)
    }

    pub fn is_zero_window(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when the series is known to be identically zero (exact source
    /// that is the zero function).
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty()
            && self.source.as_ref().map(|s| s.func.is_zero()).unwrap_or(false)
    }

    /// Coefficient at `n`, which must lie inside the known window.
    pub fn coeff(&self, n: i64) -> Rat {
        assert!(n < self.precision, "coefficient t^{n} requested beyond window");
        self.coeffs.get(&n).cloned().unwrap_or_else(Rat::zero)
    }

    /// Coefficient at `n`, re-expanding from the exact source if the window
    /// is too short; windowed series fail instead of guessing.
    pub fn coeff_checked(&self, n: i64) -> Result<Rat> {
        if n < self.precision {
            return Ok(self.coeff(n));
        }
        match &self.source {
            Some(src) => Ok(src.func.expand_at(&src.point, n + 1)?.coeff(n)),
            None => Err(CoreError::PrecisionExhausted { needed: n, available: self.precision }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    /// Leading (valuation, coefficient) of the window, if any is visible.
    pub fn leading(&self) -> Option<(i64, Rat)> {
        self.coeffs.iter().next().map(|(&e, c)| (e, c.clone()))
    }

    /// Decompose as `lead * t^val * unit` with `unit(0) = 1`. Empty windows
    /// re-expand through their source when possible.
    pub fn unit_part(&self) -> Result<(i64, Rat, LaurentSeries)> {
        if let Some((v, lead)) = self.leading() {
            let len = self.precision - v;
            let mut unit = BTreeMap::new();
            for (e, c) in self.coeffs.iter() {
                unit.insert(e - v, c / &lead);
            }
            let unit =
                LaurentSeries { coeffs: unit, precision: len, source: None };
            return Ok((v, lead, unit));
        }
        match &self.source {
            Some(src) if !src.func.is_zero() => {
                let (v, _) = src.func.leading_at(&src.point);
                let len = (self.precision - self.valuation()).max(2);
                src.func.expand_at(&src.point, v + len)?.unit_part()
            }
            _ => Err(CoreError::ZeroInversion),
        }
    }

    /// Make the leading term visible: an exact series whose stored window is
    /// empty (precision below the true valuation) is re-expanded far enough
    /// to show it. Windowed series and true zeros are returned unchanged.
    pub fn resolve_leading(&self) -> LaurentSeries {
        if !self.coeffs.is_empty() {
            return self.clone();
        }
        match &self.source {
            Some(src) if !src.func.is_zero() => {
                let (v, _) = src.func.leading_at(&src.point);
                src.func
                    .expand_at(&src.point, v + 1)
                    .expect("exact re-expansion")
            }
            _ => self.clone(),
        }
    }

    /// Restrict the window to a smaller bound.
    pub fn truncate(&self, precision: i64) -> LaurentSeries {
        if precision >= self.precision {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&e, _)| e < precision)
            .map(|(&e, c)| (e, c.clone()))
            .collect();
        LaurentSeries { coeffs, precision, source: self.source.clone() }
    }

    /// Widen the window, which needs an exact source.
    pub fn extend_to(&self, precision: i64) -> Result<LaurentSeries> {
        if precision <= self.precision {
            return Ok(self.clone());
        }
        match &self.source {
            Some(src) => src.func.expand_at(&src.point, precision),
            None => Err(CoreError::PrecisionExhausted {
                needed: precision - 1,
                available: self.precision,
            }),
        }
    }

    fn merged_source_mul(&self, other: &Self) -> Option<ExactSource> {
        match (&self.source, &other.source) {
            (Some(a), Some(b)) if a.point == b.point => Some(ExactSource {
                func: a.func.mul(&b.func),
                point: a.point.clone(),
            }),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> LaurentSeries {
        // A known-zero operand keeps the other side's provenance alive.
        if self.is_exact_zero() {
            return other.truncate(self.precision.min(other.precision));
        }
        if other.is_exact_zero() {
            return self.truncate(self.precision.min(other.precision));
        }
        let precision = self.precision.min(other.precision);
        let mut out = LaurentSeries::from_coeffs(
            self.coeffs.iter().map(|(&e, c)| (e, c.clone())),
            precision,
        );
        for (&e, c) in other.coeffs.iter() {
            if e >= precision {
                continue;
            }
            let entry = out.coeffs.entry(e).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                out.coeffs.remove(&e);
            }
        }
        out
    }

    pub fn neg(&self) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|(&e, c)| (e, -c)).collect();
        let source = self.source.as_ref().map(|s| ExactSource {
            func: s.func.neg(),
            point: s.point.clone(),
        });
        LaurentSeries { coeffs, precision: self.precision, source }
    }

    pub fn sub(&self, other: &Self) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rat) -> LaurentSeries {
        if r.is_zero() {
            let source = self.source.as_ref().map(|s| ExactSource {
                func: RationalFunction::zero(),
                point: s.point.clone(),
            });
            return LaurentSeries {
                coeffs: BTreeMap::new(),
                precision: self.precision,
                source,
            };
        }
        let coeffs = self.coeffs.iter().map(|(&e, c)| (e, c * r)).collect();
        let source = self.source.as_ref().map(|s| ExactSource {
            func: s.func.scale(r),
            point: s.point.clone(),
        });
        LaurentSeries { coeffs, precision: self.precision, source }
    }

    /// Product window: min(v_a + N_b, v_b + N_a), the exact information
    /// content of multiplying two windows.
    pub fn mul(&self, other: &Self) -> LaurentSeries {
        let precision =
            (self.valuation() + other.precision).min(other.valuation() + self.precision);
        let mut acc: BTreeMap<i64, Rat> = BTreeMap::new();
        for (&i, a) in self.coeffs.iter() {
            for (&j, b) in other.coeffs.iter() {
                let e = i + j;
                if e >= precision {
                    continue;
                }
                let entry = acc.entry(e).or_insert_with(Rat::zero);
                *entry += a * b;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentSeries { coeffs: acc, precision, source: self.merged_source_mul(other) }
    }

    /// Multiply by `t^k`, shifting window and provenance alike.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect();
        let source = self.source.as_ref().map(|s| ExactSource {
            func: s.func.mul(&RationalFunction::uniformizer_power(&s.point, k)),
            point: s.point.clone(),
        });
        LaurentSeries { coeffs, precision: self.precision + k, source }
    }

    /// Multiplicative inverse. The window length is preserved:
    /// a window [v, N) inverts to [-v, N - 2v).
    pub fn inv(&self) -> Result<LaurentSeries> {
        let (v, lead, unit) = self.unit_part()?;
        // unit = 1 + w with w of valuation >= 1 and precision = window length.
        let len = unit.precision();
        let mut inv_coeffs: BTreeMap<i64, Rat> = BTreeMap::new();
        inv_coeffs.insert(0, Rat::one());
        for k in 1..len {
            // b_k = -sum_{j=1..k} u_j b_{k-j}
            let mut bk = Rat::zero();
            for (j, u) in unit.coeffs.range(1..=k) {
                if let Some(b) = inv_coeffs.get(&(k - j)) {
                    bk -= u * b;
                }
            }
            if !bk.is_zero() {
                inv_coeffs.insert(k, bk);
            }
        }
        let inv_lead = lead.recip();
        let coeffs = inv_coeffs
            .into_iter()
            .map(|(e, c)| (e - v, c * &inv_lead))
            .collect();
        let source = match &self.source {
            Some(s) => Some(ExactSource { func: s.func.inv()?, point: s.point.clone() }),
            None => None,
        };
        Ok(LaurentSeries { coeffs, precision: len - v, source })
    }

    pub fn div(&self, other: &Self) -> Result<LaurentSeries> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<LaurentSeries> {
        if k == 0 {
            return Ok(LaurentSeries::one(
                self.precision - self.valuation().min(self.precision),
            ));
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = base.clone();
        for _ in 1..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Termwise derivative d/dt; the constant term dies, so one order of
    /// precision is lost.
    pub fn derivative(&self) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&e, _)| e != 0)
            .map(|(&e, c)| (e - 1, c * Rat::from_integer(e.into())))
            .collect();
        LaurentSeries { coeffs, precision: self.precision - 1, source: None }
    }

    /// The local differential d(self) = (d self/dt) dt.
    pub fn d(&self) -> LocalDifferential {
        LocalDifferential { body: self.derivative() }
    }

    /// d(self)/self as a local differential.
    pub fn dlog(&self) -> Result<LocalDifferential> {
        let body = self.derivative().mul(&self.inv()?);
        Ok(LocalDifferential { body })
    }

    /// Exponential, defined for valuation >= 1. Precision is preserved.
    pub fn exp(&self) -> Result<LaurentSeries> {
        let v = self.valuation();
        if v < 1 {
            return Err(CoreError::ExpValuation(v));
        }
        let n = self.precision;
        let mut out = LaurentSeries::one(n);
        let mut term = LaurentSeries::one(n);
        let mut k: i64 = 0;
        loop {
            k += 1;
            if k.checked_mul(v).map(|kv| kv >= n).unwrap_or(true) {
                break;
            }
            term = term.mul(self).scale(&Rat::new(1.into(), k.into()));
            term = term.truncate(n);
            if term.is_zero_window() {
                break;
            }
            out = out.add(&term);
        }
        out.precision = n;
        out.source = None;
        Ok(out)
    }

    /// Logarithm of a unit normalised to constant term 1.
    pub fn log_unit(&self) -> Result<LaurentSeries> {
        if self.valuation() != 0 || !self.coeff(0).is_one() {
            return Err(CoreError::LogArgument);
        }
        let n = self.precision;
        let w = self.sub(&LaurentSeries::one(n));
        let v = w.valuation();
        if w.is_zero_window() {
            return Ok(LaurentSeries::zero(n));
        }
        let mut out = LaurentSeries::zero(n);
        let mut power = LaurentSeries::one(n);
        let mut k: i64 = 0;
        loop {
            k += 1;
            if k.checked_mul(v).map(|kv| kv >= n).unwrap_or(true) {
                break;
            }
            power = power.mul(&w).truncate(n);
            if power.is_zero_window() {
                break;
            }
            let sign = if k % 2 == 1 { Rat::one() } else { -Rat::one() };
            out = out.add(&power.scale(&(sign / Rat::from_integer(k.into()))));
        }
        out.precision = n;
        Ok(out)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&e, c) in self.coeffs.iter() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let power = match e {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{e}"),
            };
            if power.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{power}")?;
            } else {
                write!(f, "{mag}*{power}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.precision)
    }
}

/// A differential `s dt` in the local uniformizer; the residue is the
/// coefficient of t^-1 of the body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDifferential {
    body: LaurentSeries,
}

impl LocalDifferential {
    pub fn new(body: LaurentSeries) -> Self {
        LocalDifferential { body }
    }

    pub fn body(&self) -> &LaurentSeries {
        &self.body
    }

    pub fn residue(&self) -> Result<Rat> {
        self.body.coeff_checked(-1)
    }

    pub fn mul_series(&self, s: &LaurentSeries) -> LocalDifferential {
        LocalDifferential { body: self.body.mul(s) }
    }
}
