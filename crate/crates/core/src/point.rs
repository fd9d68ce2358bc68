//! Points of the projective line over Q, and divisors supported on them.
//!
//! A point is either a finite rational or the point at infinity. The derived
//! order (finite points by value, infinity last) is the canonical order used
//! everywhere results are listed.

use crate::error::{CoreError, Result};
use crate::scalar::{parse_rat, rat_to_string, Rat};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    Finite(Rat),
    Infinity,
}

impl Point {
    pub fn finite(r: Rat) -> Self {
        Point::Finite(r)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn parse(s: &str) -> Result<Point> {
        let t = s.trim();
        if t == "inf" || t == "oo" {
            return Ok(Point::Infinity);
        }
        Ok(Point::Finite(parse_rat(t)?))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(r) => write!(f, "{}", rat_to_string(r)),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

/// Formal Z-linear combination of points, stored without zero entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Divisor {
    coeffs: BTreeMap<Point, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor { coeffs: BTreeMap::new() }
    }

    pub fn single(p: Point, n: i64) -> Self {
        let mut d = Divisor::zero();
        d.add_point(p, n);
        d
    }

    pub fn from_pairs<I: IntoIterator<Item = (Point, i64)>>(pairs: I) -> Self {
        let mut d = Divisor::zero();
        for (p, n) in pairs {
            d.add_point(p, n);
        }
        d
    }

    pub fn add_point(&mut self, p: Point, n: i64) {
        if n == 0 {
            return;
        }
        let entry = self.coeffs.entry(p).or_insert(0);
        *entry += n;
        if *entry == 0 {
            let key = self
                .coeffs
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, p: &Point) -> i64 {
        self.coeffs.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.coeffs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, i64)> {
        self.coeffs.iter().map(|(p, &n)| (p, n))
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, n) in other.iter() {
            out.add_point(p.clone(), n);
        }
        out
    }

    pub fn neg(&self) -> Divisor {
        Divisor { coeffs: self.coeffs.iter().map(|(p, &n)| (p.clone(), -n)).collect() }
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.neg())
    }

    /// Require degree zero, as charge divisors and idele shifts must be.
    pub fn require_degree_zero(&self) -> Result<()> {
        let d = self.degree();
        if d != 0 {
            return Err(CoreError::NonZeroDegree(d));
        }
        Ok(())
    }
}

impl fmt::Display for Divisor {
    /// Canonical form `-(0)+2(1)+(inf)`, terms sorted by point with the
    /// sign folded into the separator; the zero divisor prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, n) in self.coeffs.iter() {
            let mag = n.abs();
            if *n < 0 {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "({p})")?;
            first = false;
        }
        Ok(())
    }
}
