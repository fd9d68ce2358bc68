//! Pluggable provider of curve-dependent data: genus, the second-kind
//! generators eta_P^(n) with their expansions and constant terms, the dual
//! u_P^(n) basis, prime-form constants and expansions, and the non-special
//! divisor. The built-in genus-0 model answers from closed forms; a
//! tabulated model answers from validated tables loaded from text, which
//! makes every downstream computation testable against externally supplied
//! curve data.

use crate::adele::residue_product;
use crate::error::{CoreError, Result};
use crate::laurent::LaurentSeries;
use crate::point::{Divisor, Point};
use crate::rational::{eta, u_gen};
use crate::scalar::{parse_rat, rat_to_string, Rat};
use crate::symbols;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub trait CurveModel {
    fn genus(&self) -> u32;

    /// The non-special divisor (empty at genus 0).
    fn special_divisor(&self) -> Divisor;

    /// Expansion of eta_P^(n) at the point Q, window bounded by `order`.
    fn eta_expansion(&self, p: &Point, n: u32, q: &Point, order: i64)
        -> Result<LaurentSeries>;

    /// Constant term of eta_P^(n) at Q; zero on the diagonal by convention.
    fn eta_const(&self, p: &Point, n: u32, q: &Point) -> Result<Rat>;

    /// Expansion of the dual generator u_P^(n) at its own point P.
    fn u_expansion(&self, p: &Point, n: u32, order: i64) -> Result<LaurentSeries>;

    /// Prime-form constant c(P,Q).
    fn prime_const(&self, p: &Point, q: &Point) -> Result<Rat>;

    /// Expansion of the prime-form component of e_P at Q.
    fn e_expansion(&self, p: &Point, q: &Point, order: i64) -> Result<LaurentSeries>;
}

/// The projective line over Q: every capability answered by closed form.
#[derive(Debug, Clone, Copy, Default)]
pub struct P1Model;

pub fn p1_model() -> P1Model {
    P1Model
}

impl CurveModel for P1Model {
    fn genus(&self) -> u32 {
        0
    }

    fn special_divisor(&self) -> Divisor {
        Divisor::zero()
    }

    fn eta_expansion(
        &self,
        p: &Point,
        n: u32,
        q: &Point,
        order: i64,
    ) -> Result<LaurentSeries> {
        eta(p, n).expand_at(q, order)
    }

    fn eta_const(&self, p: &Point, n: u32, q: &Point) -> Result<Rat> {
        if p == q {
            return Ok(Rat::zero());
        }
        eta(p, n).eval_at(q)
    }

    fn u_expansion(&self, p: &Point, n: u32, order: i64) -> Result<LaurentSeries> {
        u_gen(p, n).expand_at(p, order)
    }

    fn prime_const(&self, p: &Point, q: &Point) -> Result<Rat> {
        Ok(symbols::prime_const(p, q))
    }

    fn e_expansion(&self, p: &Point, q: &Point, order: i64) -> Result<LaurentSeries> {
        symbols::e_component(p, q).expand_at(q, order)
    }
}

/// A curve model backed entirely by tables: point panel, constants, and
/// truncated expansions. Construction validates the interface invariants and
/// rejects inconsistent data.
#[derive(Debug, Clone)]
pub struct TabulatedModel {
    genus: u32,
    precision: i64,
    max_order: u32,
    points: Vec<Point>,
    special: Divisor,
    c: BTreeMap<(Point, Point), Rat>,
    eta_const: BTreeMap<(Point, u32, Point), Rat>,
    eta: BTreeMap<(Point, u32, Point), LaurentSeries>,
    u: BTreeMap<(Point, u32), LaurentSeries>,
    e: BTreeMap<(Point, Point), LaurentSeries>,
}

impl TabulatedModel {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    fn lookup<'a, K: Ord + std::fmt::Debug, V>(
        table: &'a BTreeMap<K, V>,
        key: &K,
        what: &str,
    ) -> Result<&'a V> {
        table
            .get(key)
            .ok_or_else(|| CoreError::MissingEntry(format!("{what} {key:?}")))
    }

    fn window(&self, s: &LaurentSeries, order: i64) -> Result<LaurentSeries> {
        if order > self.precision {
            return Err(CoreError::PrecisionExhausted {
                needed: order - 1,
                available: self.precision,
            });
        }
        Ok(s.truncate(order))
    }

    /// Snapshot any model into tables over the given panel.
    pub fn tabulate(
        model: &dyn CurveModel,
        points: &[Point],
        max_order: u32,
        precision: i64,
    ) -> Result<TabulatedModel> {
        let mut c = BTreeMap::new();
        let mut eta_const = BTreeMap::new();
        let mut eta = BTreeMap::new();
        let mut u = BTreeMap::new();
        let mut e = BTreeMap::new();
        for p in points {
            for q in points {
                c.insert((p.clone(), q.clone()), model.prime_const(p, q)?);
                e.insert(
                    (p.clone(), q.clone()),
                    model.e_expansion(p, q, precision)?.truncate(precision),
                );
                for n in 1..=max_order {
                    eta_const.insert(
                        (p.clone(), n, q.clone()),
                        model.eta_const(p, n, q)?,
                    );
                    eta.insert(
                        (p.clone(), n, q.clone()),
                        model.eta_expansion(p, n, q, precision)?.truncate(precision),
                    );
                }
            }
            for n in 1..=max_order {
                u.insert(
                    (p.clone(), n),
                    model.u_expansion(p, n, precision)?.truncate(precision),
                );
            }
        }
        let table = TabulatedModel {
            genus: model.genus(),
            precision,
            max_order,
            points: points.to_vec(),
            special: model.special_divisor(),
            c,
            eta_const,
            eta,
            u,
            e,
        };
        table.validate()?;
        Ok(table)
    }

    /// Interface invariants, checked over the whole table. Every downstream
    /// theorem silently depends on these, so violations reject the model.
    pub fn validate(&self) -> Result<()> {
        // prime-form antisymmetry off the diagonal
        for p in &self.points {
            for q in &self.points {
                if p == q {
                    continue;
                }
                let cpq = Self::lookup(&self.c, &(p.clone(), q.clone()), "c")?;
                let cqp = Self::lookup(&self.c, &(q.clone(), p.clone()), "c")?;
                if *cpq != -cqp.clone() {
                    return Err(CoreError::ModelInvariant(format!(
                        "antisymmetry c({p},{q}) = -c({q},{p}) violated: {} vs {}",
                        rat_to_string(cpq),
                        rat_to_string(&-cqp.clone())
                    )));
                }
                if cpq.is_zero() {
                    return Err(CoreError::ModelInvariant(format!(
                        "c({p},{q}) must be nonzero"
                    )));
                }
            }
        }
        for p in &self.points {
            for n in 1..=self.max_order {
                // zero-constant convention on the diagonal
                let diag =
                    Self::lookup(&self.eta_const, &(p.clone(), n, p.clone()), "eta-const")?;
                if !diag.is_zero() {
                    return Err(CoreError::ModelInvariant(format!(
                        "eta_const({p},{n},{p}) = {} violates the zero-constant convention",
                        rat_to_string(diag)
                    )));
                }
                // stored constants agree with the stored windows
                for q in &self.points {
                    let c0 = Self::lookup(&self.eta_const, &(p.clone(), n, q.clone()), "eta-const")?;
                    let w = Self::lookup(&self.eta, &(p.clone(), n, q.clone()), "eta")?;
                    if w.coeff(0) != *c0 {
                        return Err(CoreError::ModelInvariant(format!(
                            "eta_const({p},{n},{q}) = {} disagrees with the eta window constant term {}",
                            rat_to_string(c0),
                            rat_to_string(&w.coeff(0))
                        )));
                    }
                }
            }
        }
        // duality: -Res_P(u_P^(m) d eta_P^(n)|_P) = delta_mn
        for p in &self.points {
            for m in 1..=self.max_order {
                let um = Self::lookup(&self.u, &(p.clone(), m), "u")?;
                for n in 1..=self.max_order {
                    let en = Self::lookup(&self.eta, &(p.clone(), n, p.clone()), "eta")?;
                    let pairing = -residue_product(um, en)?;
                    let expected = if m == n { Rat::one() } else { Rat::zero() };
                    if pairing != expected {
                        return Err(CoreError::ModelInvariant(format!(
                            "duality -Res_{p}(u^({m}) d eta^({n})) = {} (expected {})",
                            rat_to_string(&pairing),
                            rat_to_string(&expected)
                        )));
                    }
                }
            }
        }
        // reciprocity: Res_Q(eta_P^(m) d eta_Q^(n)) = Res_P(eta_Q^(n) d eta_P^(m))
        for p in &self.points {
            for q in &self.points {
                for m in 1..=self.max_order {
                    for n in 1..=self.max_order {
                        let lhs = residue_product(
                            Self::lookup(&self.eta, &(p.clone(), m, q.clone()), "eta")?,
                            Self::lookup(&self.eta, &(q.clone(), n, q.clone()), "eta")?,
                        )?;
                        let rhs = residue_product(
                            Self::lookup(&self.eta, &(q.clone(), n, p.clone()), "eta")?,
                            Self::lookup(&self.eta, &(p.clone(), m, p.clone()), "eta")?,
                        )?;
                        if lhs != rhs {
                            return Err(CoreError::ModelInvariant(format!(
                                "reciprocity Res_{q}(eta_{p}^({m}) d eta_{q}^({n})) = {} \
                                 but Res_{p}(eta_{q}^({n}) d eta_{p}^({m})) = {}",
                                rat_to_string(&lhs),
                                rat_to_string(&rhs)
                            )));
                        }
                    }
                }
            }
        }
        // prime-form windows: valuation delta_PQ, leading value c(P,Q)
        for p in &self.points {
            for q in &self.points {
                let w = Self::lookup(&self.e, &(p.clone(), q.clone()), "e")?;
                let expected_val = if p == q { 1 } else { 0 };
                match w.leading() {
                    Some((v, lead)) => {
                        let cpq = Self::lookup(&self.c, &(p.clone(), q.clone()), "c")?;
                        if v != expected_val || lead != *cpq {
                            return Err(CoreError::ModelInvariant(format!(
                                "prime form e_{p} at {q}: valuation {v} lead {} \
                                 (expected valuation {expected_val} lead {})",
                                rat_to_string(&lead),
                                rat_to_string(cpq)
                            )));
                        }
                    }
                    None => {
                        return Err(CoreError::ModelInvariant(format!(
                            "prime form e_{p} at {q} has an empty window"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical text form (the inverse of `from_text`).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "genus {}", self.genus);
        let _ = writeln!(out, "precision {}", self.precision);
        let _ = writeln!(out, "max-order {}", self.max_order);
        let points: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "points {}", points.join(" "));
        if !self.special.is_zero() {
            let entries: Vec<String> = self
                .special
                .iter()
                .map(|(p, m)| format!("{m}@{p}"))
                .collect();
            let _ = writeln!(out, "special {}", entries.join(" "));
        }
        for ((p, q), v) in &self.c {
            let _ = writeln!(out, "c {p} {q} {}", rat_to_string(v));
        }
        for ((p, n, q), v) in &self.eta_const {
            let _ = writeln!(out, "eta-const {p} {n} {q} {}", rat_to_string(v));
        }
        for ((p, n, q), s) in &self.eta {
            let _ = writeln!(out, "eta {p} {n} {q} {}", window_text(s));
        }
        for ((p, n), s) in &self.u {
            let _ = writeln!(out, "u {p} {n} {}", window_text(s));
        }
        for ((p, q), s) in &self.e {
            let _ = writeln!(out, "e {p} {q} {}", window_text(s));
        }
        out
    }

    /// Parse and validate a tabulated model from its text form.
    pub fn from_text(text: &str) -> Result<TabulatedModel> {
        let mut genus: Option<u32> = None;
        let mut precision: Option<i64> = None;
        let mut max_order: Option<u32> = None;
        let mut points: Vec<Point> = Vec::new();
        let mut special = Divisor::zero();
        let mut c = BTreeMap::new();
        let mut eta_const = BTreeMap::new();
        let mut eta = BTreeMap::new();
        let mut u = BTreeMap::new();
        let mut e = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let key = fields.next().unwrap();
            fn next<'a>(
                fields: &mut std::str::SplitWhitespace<'a>,
                lineno: usize,
                what: &str,
            ) -> Result<&'a str> {
                fields.next().ok_or_else(|| CoreError::Parse {
                    pos: lineno + 1,
                    msg: format!("missing {what}"),
                })
            }
            let bad = |msg: String| CoreError::Parse { pos: lineno + 1, msg };
            match key {
                "genus" => {
                    genus = Some(
                        next(&mut fields, lineno, "genus")?
                            .parse::<u32>()
                            .map_err(|e| bad(format!("genus: {e}")))?,
                    );
                }
                "precision" => {
                    precision = Some(
                        next(&mut fields, lineno, "precision")?
                            .parse::<i64>()
                            .map_err(|e| bad(format!("precision: {e}")))?,
                    );
                }
                "max-order" => {
                    max_order = Some(
                        next(&mut fields, lineno, "max-order")?
                            .parse::<u32>()
                            .map_err(|e| bad(format!("max-order: {e}")))?,
                    );
                }
                "points" => {
                    for f in fields.by_ref() {
                        points.push(Point::parse(f)?);
                    }
                }
                "special" => {
                    for f in fields.by_ref() {
                        let (m, p) = f.split_once('@').ok_or_else(|| {
                            bad(format!("special entry `{f}` is not mult@point"))
                        })?;
                        let mult: i64 =
                            m.parse().map_err(|e| bad(format!("multiplicity: {e}")))?;
                        special.add_point(Point::parse(p)?, mult);
                    }
                }
                "c" => {
                    let p = Point::parse(next(&mut fields, lineno, "P")?)?;
                    let q = Point::parse(next(&mut fields, lineno, "Q")?)?;
                    let v = parse_rat(next(&mut fields, lineno, "value")?)?;
                    c.insert((p, q), v);
                }
                "eta-const" => {
                    let p = Point::parse(next(&mut fields, lineno, "P")?)?;
                    let n: u32 = next(&mut fields, lineno, "n")?
                        .parse()
                        .map_err(|e| bad(format!("order: {e}")))?;
                    let q = Point::parse(next(&mut fields, lineno, "Q")?)?;
                    let v = parse_rat(next(&mut fields, lineno, "value")?)?;
                    eta_const.insert((p, n, q), v);
                }
                "eta" => {
                    let p = Point::parse(next(&mut fields, lineno, "P")?)?;
                    let n: u32 = next(&mut fields, lineno, "n")?
                        .parse()
                        .map_err(|e| bad(format!("order: {e}")))?;
                    let q = Point::parse(next(&mut fields, lineno, "Q")?)?;
                    let prec = precision.ok_or_else(|| {
                        bad("eta line before precision".to_string())
                    })?;
                    eta.insert((p, n, q), parse_window(fields, prec, lineno + 1)?);
                }
                "u" => {
                    let p = Point::parse(next(&mut fields, lineno, "P")?)?;
                    let n: u32 = next(&mut fields, lineno, "n")?
                        .parse()
                        .map_err(|e| bad(format!("order: {e}")))?;
                    let prec = precision
                        .ok_or_else(|| bad("u line before precision".to_string()))?;
                    u.insert((p, n), parse_window(fields, prec, lineno + 1)?);
                }
                "e" => {
                    let p = Point::parse(next(&mut fields, lineno, "P")?)?;
                    let q = Point::parse(next(&mut fields, lineno, "Q")?)?;
                    let prec = precision
                        .ok_or_else(|| bad("e line before precision".to_string()))?;
                    e.insert((p, q), parse_window(fields, prec, lineno + 1)?);
                }
                other => {
                    return Err(bad(format!("unknown field `{other}`")));
                }
            }
        }

        let table = TabulatedModel {
            genus: genus.ok_or(CoreError::MissingEntry("genus".into()))?,
            precision: precision.ok_or(CoreError::MissingEntry("precision".into()))?,
            max_order: max_order.ok_or(CoreError::MissingEntry("max-order".into()))?,
            points,
            special,
            c,
            eta_const,
            eta,
            u,
            e,
        };
        if table.points.is_empty() {
            return Err(CoreError::MissingEntry("points".into()));
        }
        table.validate()?;
        Ok(table)
    }
}

fn window_text(s: &LaurentSeries) -> String {
    let pairs: Vec<String> =
        s.iter().map(|(e, c)| format!("{e}:{}", rat_to_string(c))).collect();
    if pairs.is_empty() {
        "-".to_string()
    } else {
        pairs.join(" ")
    }
}

fn parse_window<'a, I: Iterator<Item = &'a str>>(
    fields: I,
    precision: i64,
    lineno: usize,
) -> Result<LaurentSeries> {
    let mut pairs = Vec::new();
    for f in fields {
        if f == "-" {
            continue;
        }
        let (e, c) = f.split_once(':').ok_or_else(|| CoreError::Parse {
            pos: lineno,
            msg: format!("window entry `{f}` is not exp:coeff"),
        })?;
        let exp: i64 = e.parse().map_err(|err| CoreError::Parse {
            pos: lineno,
            msg: format!("exponent: {err}"),
        })?;
        pairs.push((exp, parse_rat(c)?));
    }
    Ok(LaurentSeries::from_coeffs(pairs, precision))
}

impl CurveModel for TabulatedModel {
    fn genus(&self) -> u32 {
        self.genus
    }

    fn special_divisor(&self) -> Divisor {
        self.special.clone()
    }

    fn eta_expansion(
        &self,
        p: &Point,
        n: u32,
        q: &Point,
        order: i64,
    ) -> Result<LaurentSeries> {
        let s = Self::lookup(&self.eta, &(p.clone(), n, q.clone()), "eta")?;
        self.window(s, order)
    }

    fn eta_const(&self, p: &Point, n: u32, q: &Point) -> Result<Rat> {
        Self::lookup(&self.eta_const, &(p.clone(), n, q.clone()), "eta-const").cloned()
    }

    fn u_expansion(&self, p: &Point, n: u32, order: i64) -> Result<LaurentSeries> {
        let s = Self::lookup(&self.u, &(p.clone(), n), "u")?;
        self.window(s, order)
    }

    fn prime_const(&self, p: &Point, q: &Point) -> Result<Rat> {
        Self::lookup(&self.c, &(p.clone(), q.clone()), "c").cloned()
    }

    fn e_expansion(&self, p: &Point, q: &Point, order: i64) -> Result<LaurentSeries> {
        let s = Self::lookup(&self.e, &(p.clone(), q.clone()), "e")?;
        self.window(s, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    fn panel() -> Vec<Point> {
        vec![
            Point::finite(rat(-2)),
            Point::finite(rat(-1)),
            Point::finite(rat(0)),
            Point::finite(rat(1)),
            Point::finite(rat(2)),
            Point::Infinity,
        ]
    }

    #[test]
    fn p1_closed_form_values() {
        let m = p1_model();
        // eta_2^(1)(1) = -1/(1-2) = 1
        assert_eq!(
            m.eta_const(&Point::finite(rat(2)), 1, &Point::finite(rat(1))).unwrap(),
            rat(1)
        );
        assert_eq!(
            m.prime_const(&Point::finite(rat(0)), &Point::finite(rat(1))).unwrap(),
            rat(1)
        );
        assert_eq!(
            m.prime_const(&Point::finite(rat(1)), &Point::finite(rat(0))).unwrap(),
            rat(-1)
        );
        // eta_0^(1) = -1/z expands to -t at infinity: constant term 0
        assert_eq!(
            m.eta_const(&Point::finite(rat(0)), 1, &Point::Infinity).unwrap(),
            rat(0)
        );
    }

    #[test]
    fn p1_interface_invariants_on_panel() {
        let m = p1_model();
        let points = panel();
        for p in &points {
            for mm in 1..=4u32 {
                let um = m.u_expansion(p, mm, 12).unwrap();
                for n in 1..=4u32 {
                    let en = m.eta_expansion(p, n, p, 12).unwrap();
                    let pairing = -residue_product(&um, &en).unwrap();
                    assert_eq!(
                        pairing,
                        if mm == n { rat(1) } else { rat(0) },
                        "duality at {p}, m={mm}, n={n}"
                    );
                }
            }
        }
        for p in &points {
            for q in &points {
                for mm in 1..=4u32 {
                    for n in 1..=4u32 {
                        let lhs = residue_product(
                            &m.eta_expansion(p, mm, q, 12).unwrap(),
                            &m.eta_expansion(q, n, q, 12).unwrap(),
                        )
                        .unwrap();
                        let rhs = residue_product(
                            &m.eta_expansion(q, n, p, 12).unwrap(),
                            &m.eta_expansion(p, mm, p, 12).unwrap(),
                        )
                        .unwrap();
                        assert_eq!(lhs, rhs, "reciprocity {p},{q},m={mm},n={n}");
                        if p == q {
                            assert_eq!(lhs, rat(0), "same-point residues vanish");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tabulated_round_trip_matches_p1() {
        let points = panel();
        let table = TabulatedModel::tabulate(&p1_model(), &points, 4, 12).unwrap();
        let text = table.to_text();
        let reloaded = TabulatedModel::from_text(&text).unwrap();
        let m = p1_model();
        for p in &points {
            for q in &points {
                assert_eq!(
                    reloaded.prime_const(p, q).unwrap(),
                    m.prime_const(p, q).unwrap()
                );
                for n in 1..=4u32 {
                    assert_eq!(
                        reloaded.eta_const(p, n, q).unwrap(),
                        m.eta_const(p, n, q).unwrap()
                    );
                    let a = reloaded.eta_expansion(p, n, q, 9).unwrap();
                    let b = m.eta_expansion(p, n, q, 9).unwrap();
                    assert_eq!(a, b.truncate(9), "eta window {p},{n},{q}");
                }
            }
        }
        // canonical text is stable
        assert_eq!(reloaded.to_text(), text);
    }

    #[test]
    fn tabulated_rejects_corruptions() {
        let points = vec![
            Point::finite(rat(0)),
            Point::finite(rat(1)),
            Point::Infinity,
        ];
        let table = TabulatedModel::tabulate(&p1_model(), &points, 3, 10).unwrap();
        let text = table.to_text();

        // antisymmetry violation: c(0,1) = c(1,0) = 1
        let broken = text.replace("c 1 0 -1", "c 1 0 1");
        let err = TabulatedModel::from_text(&broken).unwrap_err();
        assert!(
            matches!(&err, CoreError::ModelInvariant(m) if m.contains("antisymmetry")),
            "got {err}"
        );

        // duality violation: scale u_0^(1)'s leading coefficient
        let broken = text.replace("u 0 1 1:-1", "u 0 1 1:-1/2");
        let err = TabulatedModel::from_text(&broken).unwrap_err();
        assert!(
            matches!(&err, CoreError::ModelInvariant(m) if m.contains("duality")),
            "got {err}"
        );

        // reciprocity violation: corrupt a non-constant cross-expansion
        // coefficient (the constant term stays consistent with eta-const)
        assert!(text.contains("eta 0 1 1 0:-1 1:1"));
        let broken = text.replace("eta 0 1 1 0:-1 1:1", "eta 0 1 1 0:-1 1:2");
        let err = TabulatedModel::from_text(&broken).unwrap_err();
        assert!(
            matches!(&err, CoreError::ModelInvariant(m) if m.contains("reciprocity")),
            "got {err}"
        );
    }

    #[test]
    fn tabulated_precision_guard() {
        let points = vec![Point::finite(rat(0)), Point::Infinity];
        let table = TabulatedModel::tabulate(&p1_model(), &points, 2, 8).unwrap();
        let err = table
            .eta_expansion(&Point::finite(rat(0)), 1, &Point::Infinity, 9)
            .unwrap_err();
        assert!(matches!(err, CoreError::PrecisionExhausted { .. }));
        let err = table
            .eta_expansion(&Point::finite(rat(0)), 5, &Point::Infinity, 6)
            .unwrap_err();
        assert!(matches!(err, CoreError::MissingEntry(_)));
    }

    #[test]
    fn p1_u_expansion_is_minus_t_power() {
        let m = p1_model();
        for p in [Point::finite(ratio(1, 2)), Point::Infinity] {
            for n in 1..=3u32 {
                let s = m.u_expansion(&p, n, 8).unwrap();
                assert_eq!(s.coeff(n as i64), rat(-1));
                for e in (n as i64 + 1)..8 {
                    assert_eq!(s.coeff(e), rat(0));
                }
            }
        }
    }
}
