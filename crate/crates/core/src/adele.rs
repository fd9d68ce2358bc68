//! Restricted products of local fields over the rational points: adeles and
//! ideles carried as finitely many explicit local windows over a global
//! rational tail, together with the residue cocycle c_X and the additive
//! residue pairing against ideles.
//!
//! The component at an unlisted point is the localization of the tail, so a
//! finite amount of data describes a family over all points. Global sums run
//! over the joint singular support; they are exact because every unlisted,
//! unsingular component contributes a regular integrand whose residue
//! vanishes.

use crate::error::{CoreError, Result};
use crate::laurent::LaurentSeries;
use crate::point::{Divisor, Point};
use crate::rational::RationalFunction;
use crate::scalar::{rat_to_string, Rat};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Default window width when a component has to be materialized without
/// further context; exact components re-expand on demand past it.
const PROBE_PRECISION: i64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Adele {
    parts: BTreeMap<Point, LaurentSeries>,
    tail: RationalFunction,
}

impl Adele {
    pub fn zero() -> Self {
        Adele { parts: BTreeMap::new(), tail: RationalFunction::zero() }
    }

    /// Diagonal embedding of a rational function.
    pub fn diagonal(f: RationalFunction) -> Self {
        Adele { parts: BTreeMap::new(), tail: f }
    }

    pub fn from_parts<I: IntoIterator<Item = (Point, LaurentSeries)>>(parts: I) -> Self {
        Adele { parts: parts.into_iter().collect(), tail: RationalFunction::zero() }
    }

    pub fn new<I: IntoIterator<Item = (Point, LaurentSeries)>>(
        tail: RationalFunction,
        parts: I,
    ) -> Self {
        Adele { parts: parts.into_iter().collect(), tail }
    }

    pub fn with_part(mut self, p: Point, s: LaurentSeries) -> Self {
        self.parts.insert(p, s);
        self
    }

    pub fn tail(&self) -> &RationalFunction {
        &self.tail
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Point, &LaurentSeries)> {
        self.parts.iter()
    }

    /// The local component at `p`: the listed window if present, otherwise
    /// the tail localized there. Exact components widen to `precision`.
    pub fn component(&self, p: &Point, precision: i64) -> Result<LaurentSeries> {
        match self.parts.get(p) {
            Some(s) => {
                if s.precision() >= precision || !s.is_exact() {
                    Ok(s.clone())
                } else {
                    s.extend_to(precision)
                }
            }
            None => self.tail.expand_at(p, precision),
        }
    }

    /// Points whose component can carry a pole: listed points plus the poles
    /// of the tail. Everywhere else the component is regular.
    pub fn singular_support(&self) -> BTreeSet<Point> {
        let mut support: BTreeSet<Point> = self.parts.keys().cloned().collect();
        if !self.tail.is_zero() {
            for (root, mult) in self.tail.factors() {
                if mult < 0 {
                    support.insert(Point::Finite(root.clone()));
                }
            }
            if self.tail.valuation_at(&Point::Infinity) < 0 {
                support.insert(Point::Infinity);
            }
        }
        support
    }

    /// Pointwise sum. Listed windows add by the window rules; tails add in
    /// factored form and may fail on numerators that do not split over Q.
    pub fn add(&self, other: &Self) -> Result<Adele> {
        let tail = self.tail.try_add(&other.tail)?;
        let mut parts = BTreeMap::new();
        let keys: BTreeSet<&Point> =
            self.parts.keys().chain(other.parts.keys()).collect();
        for p in keys {
            let width = self
                .parts
                .get(p)
                .map(|s| s.precision())
                .into_iter()
                .chain(other.parts.get(p).map(|s| s.precision()))
                .min()
                .unwrap_or(PROBE_PRECISION);
            let a = self.component(p, width)?;
            let b = other.component(p, width)?;
            parts.insert(p.clone(), a.add(&b));
        }
        Ok(Adele { parts, tail })
    }

    pub fn scale(&self, c: &Rat) -> Adele {
        Adele {
            parts: self.parts.iter().map(|(p, s)| (p.clone(), s.scale(c))).collect(),
            tail: self.tail.scale(c),
        }
    }

    pub fn neg(&self) -> Adele {
        self.scale(&-<Rat as num::One>::one())
    }

    /// Structured text form: one `tail` line and one `at` line per listed
    /// point, windows as `exp:coeff` pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("tail {}\n", self.tail);
        for (p, s) in self.parts.iter() {
            out.push_str(&part_line(p, s));
        }
        out
    }
}

impl fmt::Display for Adele {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text().trim_end())
    }
}

fn part_line(p: &Point, s: &LaurentSeries) -> String {
    if let Some(src) = s.source() {
        return format!("at {p} exact {}\n", src.func);
    }
    let window: Vec<String> =
        s.iter().map(|(e, c)| format!("{e}:{}", rat_to_string(c))).collect();
    format!("at {p} window prec={} {}\n", s.precision(), window.join(" "))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Idele {
    parts: BTreeMap<Point, LaurentSeries>,
    tail: RationalFunction,
}

impl Idele {
    pub fn one() -> Self {
        Idele { parts: BTreeMap::new(), tail: RationalFunction::one() }
    }

    /// Diagonal embedding of a nonzero rational function.
    pub fn diagonal(f: RationalFunction) -> Result<Self> {
        if f.is_zero() {
            return Err(CoreError::ZeroInput("idele from the zero function".into()));
        }
        Ok(Idele { parts: BTreeMap::new(), tail: f })
    }

    /// Idele with explicit unit-group components at finitely many points over
    /// a rational tail. Every listed window must be visibly nonzero.
    pub fn new<I: IntoIterator<Item = (Point, LaurentSeries)>>(
        tail: RationalFunction,
        parts: I,
    ) -> Result<Self> {
        if tail.is_zero() {
            return Err(CoreError::ZeroInput("idele tail".into()));
        }
        let mut map = BTreeMap::new();
        for (p, s) in parts {
            let s = s.resolve_leading();
            if s.is_zero_window() {
                return Err(CoreError::ZeroInput(format!("idele component at {p}")));
            }
            map.insert(p, s);
        }
        Ok(Idele { parts: map, tail })
    }

    pub fn tail(&self) -> &RationalFunction {
        &self.tail
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Point, &LaurentSeries)> {
        self.parts.iter()
    }

    pub fn component(&self, p: &Point, precision: i64) -> Result<LaurentSeries> {
        match self.parts.get(p) {
            Some(s) => {
                if s.precision() >= precision || !s.is_exact() {
                    Ok(s.clone())
                } else {
                    s.extend_to(precision)
                }
            }
            None => self.tail.expand_at(p, precision),
        }
    }

    /// Points where the component can have nonzero valuation or a listed
    /// window: zeros and poles of the tail plus the listed points.
    pub fn singular_support(&self) -> BTreeSet<Point> {
        let mut support: BTreeSet<Point> = self.parts.keys().cloned().collect();
        for (p, _) in self.divisor().expect("idele valuations").iter() {
            support.insert(p.clone());
        }
        support
    }

    /// Valuation divisor D_a = sum of v_P(a_P) P over all points.
    pub fn divisor(&self) -> Result<Divisor> {
        let mut d = self.tail.divisor()?;
        for (p, s) in self.parts.iter() {
            // listed components override the tail's valuation at their point
            d.add_point(p.clone(), -d.coeff(p));
            let s = s.resolve_leading();
            match s.leading() {
                Some((v, _)) => d.add_point(p.clone(), v),
                None => {
                    return Err(CoreError::ZeroInput(format!(
                        "idele component at {p} has an empty window"
                    )))
                }
            }
        }
        Ok(d)
    }

    pub fn mul(&self, other: &Self) -> Result<Idele> {
        let tail = self.tail.mul(&other.tail);
        let mut parts = BTreeMap::new();
        let keys: BTreeSet<&Point> =
            self.parts.keys().chain(other.parts.keys()).collect();
        for p in keys {
            let width = self
                .parts
                .get(p)
                .iter()
                .chain(other.parts.get(p).iter())
                .map(|s| s.precision())
                .max()
                .unwrap_or(PROBE_PRECISION);
            let a = self.component(p, width)?.resolve_leading();
            let b = other.component(p, width)?.resolve_leading();
            parts.insert(p.clone(), a.mul(&b));
        }
        Idele::new(tail, parts)
    }

    pub fn inv(&self) -> Result<Idele> {
        let tail = self.tail.inv()?;
        let mut parts = BTreeMap::new();
        for (p, s) in self.parts.iter() {
            parts.insert(p.clone(), s.inv()?);
        }
        Idele::new(tail, parts)
    }

    pub fn scale(&self, c: &Rat) -> Result<Idele> {
        if c.is_zero() {
            return Err(CoreError::ZeroInput("scaling an idele by zero".into()));
        }
        Ok(Idele {
            parts: self.parts.iter().map(|(p, s)| (p.clone(), s.scale(c))).collect(),
            tail: self.tail.scale(c),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("tail {}\n", self.tail);
        for (p, s) in self.parts.iter() {
            out.push_str(&part_line(p, s));
        }
        out
    }
}

impl fmt::Display for Idele {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text().trim_end())
    }
}

/// Widen an exact series to the requested bound; windowed series pass
/// through and later coefficient reads guard exactness.
fn widen(s: &LaurentSeries, precision: i64) -> LaurentSeries {
    if s.precision() >= precision || !s.is_exact() {
        s.clone()
    } else {
        s.extend_to(precision).expect("exact re-expansion")
    }
}

/// Res(x dy) for two local series in the same uniformizer. Widths are chosen
/// from the window valuations so the t^-1 coefficient of the product is
/// determined; insufficient windows surface as precision errors.
pub fn residue_product(x: &LaurentSeries, y: &LaurentSeries) -> Result<Rat> {
    let x = x.resolve_leading();
    let y = y.resolve_leading();
    if x.is_zero_window() && x.is_exact() {
        return Ok(Rat::zero());
    }
    if y.is_zero_window() && y.is_exact() {
        return Ok(Rat::zero());
    }
    let vx = x.valuation();
    let vy = y.valuation();
    let x = widen(&x, (2 - vy).max(vx + 1));
    let y = widen(&y, (1 - vx).max(vy + 1));
    x.mul(&y.derivative()).coeff_checked(-1)
}

/// The local cocycle c_P(x, y) = -Res_P(x dy).
pub fn c_local(x: &LaurentSeries, y: &LaurentSeries) -> Result<Rat> {
    Ok(-residue_product(x, y)?)
}

/// Res(x dlog a) for local series; a must have a visible leading term.
pub fn residue_dlog(x: &LaurentSeries, a: &LaurentSeries) -> Result<Rat> {
    let x = x.resolve_leading();
    let a = a.resolve_leading();
    if x.is_zero_window() && x.is_exact() {
        return Ok(Rat::zero());
    }
    let vx = x.valuation();
    let va = a.valuation();
    let x = widen(&x, 1.max(vx + 1));
    let a = widen(&a, va + 1 + (-vx).max(0));
    a.dlog()?.mul_series(&x).residue()
}

/// Global cocycle c_X(x, y) = sum over points of -Res_P(x_P dy_P), with the
/// per-point values reported; the sum runs over the joint singular support.
pub fn c_x_locals(x: &Adele, y: &Adele) -> Result<Vec<(Point, Rat)>> {
    let mut support = x.singular_support();
    support.extend(y.singular_support());
    let mut out = Vec::new();
    for p in support {
        let xp = x.component(&p, PROBE_PRECISION)?;
        let yp = y.component(&p, PROBE_PRECISION)?;
        let c = c_local(&xp, &yp)?;
        out.push((p, c));
    }
    Ok(out)
}

pub fn c_x(x: &Adele, y: &Adele) -> Result<Rat> {
    Ok(c_x_locals(x, y)?.into_iter().fold(Rat::zero(), |acc, (_, c)| acc + c))
}

/// Residue pairing Res_X(x, a) = sum over points of Res_P(x_P dlog a_P),
/// with per-point values.
pub fn res_x_locals(x: &Adele, a: &Idele) -> Result<Vec<(Point, Rat)>> {
    let mut support = x.singular_support();
    support.extend(a.singular_support());
    let mut out = Vec::new();
    for p in support {
        let xp = x.component(&p, PROBE_PRECISION)?;
        let ap = a.component(&p, PROBE_PRECISION)?;
        let r = residue_dlog(&xp, &ap)?;
        out.push((p, r));
    }
    Ok(out)
}

pub fn res_x_pairing(x: &Adele, a: &Idele) -> Result<Rat> {
    Ok(res_x_locals(x, a)?.into_iter().fold(Rat::zero(), |acc, (_, r)| acc + r))
}
