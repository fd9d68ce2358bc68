//! Multiplicative local–global structure: tame symbols and Weil reciprocity,
//! the prime-form ideles e_P on the projective line, the elementary
//! functions f_PQ = e_P/e_Q, factorization of rational functions into
//! elementary parts, third-kind exponentials with the exchange law, and the
//! local Taylor data (constant, valuation, exponent coefficients) of f_PQ.

use crate::adele::Idele;
use crate::error::{CoreError, Result};
use crate::laurent::LaurentSeries;
use crate::point::Point;
use crate::rational::RationalFunction;
use crate::scalar::{pow_rat, sign_pow, Rat};
use num::{One, Zero};
use std::collections::BTreeSet;

/// Tame symbol of two nonzero local series in the same uniformizer:
/// (-1)^{v(f)v(g)} f^{v(g)}/g^{v(f)} evaluated at the point, which reduces
/// to a ratio of powers of the leading coefficients.
pub fn tame_local(f: &LaurentSeries, g: &LaurentSeries) -> Result<Rat> {
    let (m, a, _) = f.unit_part()?;
    let (n, b, _) = g.unit_part()?;
    Ok(sign_pow(m * n) * pow_rat(&a, n)? / pow_rat(&b, m)?)
}

/// Tame symbol of two rational functions at one point, by closed form.
pub fn tame_at(f: &RationalFunction, g: &RationalFunction, p: &Point) -> Result<Rat> {
    if f.is_zero() || g.is_zero() {
        return Err(CoreError::ZeroInput("tame symbol of zero".into()));
    }
    let (m, a) = f.leading_at(p);
    let (n, b) = g.leading_at(p);
    Ok(sign_pow(m * n) * pow_rat(&a, n)? / pow_rat(&b, m)?)
}

/// Weil reciprocity: local tame symbols of f and g over the union of their
/// divisor supports, and the global product (identically 1).
pub fn weil_global(
    f: &RationalFunction,
    g: &RationalFunction,
) -> Result<(Vec<(Point, Rat)>, Rat)> {
    if f.is_zero() || g.is_zero() {
        return Err(CoreError::ZeroInput("Weil symbol of zero".into()));
    }
    let mut support: BTreeSet<Point> = BTreeSet::new();
    for h in [f, g] {
        if !h.is_constant() {
            for (p, _) in h.divisor()?.iter() {
                support.insert(p.clone());
            }
        }
    }
    let mut locals = Vec::new();
    let mut product = Rat::one();
    for p in support {
        let v = tame_at(f, g, &p)?;
        product *= &v;
        locals.push((p, v));
    }
    Ok((locals, product))
}

/// Tame symbol of two ideles: product of local symbols over the joint
/// support (valuations elsewhere are 0 on both sides, giving factor 1).
pub fn tame_ideles(a: &Idele, b: &Idele) -> Result<(Vec<(Point, Rat)>, Rat)> {
    let mut support = a.singular_support();
    support.extend(b.singular_support());
    let mut locals = Vec::new();
    let mut product = Rat::one();
    for p in support {
        let ap = a.component(&p, 2)?;
        let bp = b.component(&p, 2)?;
        let v = tame_local(&ap, &bp)?;
        product *= &v;
        locals.push((p, v));
    }
    Ok((locals, product))
}

/// The normalization constant c(P,Q): the value of the prime form e_P at Q,
/// with the leading coefficient (dotted value) taken on the diagonal.
/// Genus-0 table: Q-P for distinct finite points, c(inf,P) = 1 = -c(P,inf),
/// c(P,P) = 1 finite, c(inf,inf) = -1.
pub fn prime_const(p: &Point, q: &Point) -> Rat {
    match (p, q) {
        (Point::Finite(a), Point::Finite(b)) => {
            if a == b {
                Rat::one()
            } else {
                b - a
            }
        }
        (Point::Infinity, Point::Finite(_)) => Rat::one(),
        (Point::Finite(_), Point::Infinity) => -Rat::one(),
        (Point::Infinity, Point::Infinity) => -Rat::one(),
    }
}

/// The component of the prime-form idele e_P at the point `r`, as a rational
/// function. For finite P the component is z-P away from infinity and
/// P/z - 1 at infinity; for P = infinity it is 1 away from infinity and
/// -1/z there. These choices make every quotient e_P/e_Q diagonal.
pub fn e_component(p: &Point, r: &Point) -> RationalFunction {
    match (p, r) {
        (Point::Finite(a), Point::Finite(_)) => {
            RationalFunction::from_factors(Rat::one(), [(a.clone(), 1)])
        }
        (Point::Finite(a), Point::Infinity) => {
            // P/z - 1 = -(z-P)/z
            RationalFunction::from_factors(-Rat::one(), [(a.clone(), 1), (Rat::zero(), -1)])
        }
        (Point::Infinity, Point::Finite(_)) => RationalFunction::one(),
        (Point::Infinity, Point::Infinity) => {
            RationalFunction::from_factors(-Rat::one(), [(Rat::zero(), -1)])
        }
    }
}

/// The prime-form idele e_P: valuation 1 at P, 0 elsewhere; its values and
/// leading coefficients reproduce `prime_const`.
pub fn prime_form_idele(p: &Point) -> Idele {
    let tail = e_component(p, &Point::finite(Rat::zero()));
    let at_inf = e_component(p, &Point::Infinity)
        .expand_at(&Point::Infinity, 2)
        .expect("closed-form expansion");
    Idele::new(tail, [(Point::Infinity, at_inf)]).expect("prime form components are nonzero")
}

/// The elementary multiplicative function f_PQ = e_P/e_Q as a rational
/// function: (z-P)/(z-Q), degenerating to z-P for Q = infinity and
/// 1/(z-Q) for P = infinity.
pub fn f_pq(p: &Point, q: &Point) -> Result<RationalFunction> {
    if p == q {
        return Err(CoreError::CoincidentPoints(format!("f_PQ with P = Q = {p}")));
    }
    let num = match p {
        Point::Finite(a) => RationalFunction::from_factors(Rat::one(), [(a.clone(), 1)]),
        Point::Infinity => RationalFunction::one(),
    };
    let den = match q {
        Point::Finite(b) => RationalFunction::from_factors(Rat::one(), [(b.clone(), 1)]),
        Point::Infinity => RationalFunction::one(),
    };
    num.div(&den)
}

pub fn f_pq_idele(p: &Point, q: &Point) -> Result<Idele> {
    Idele::diagonal(f_pq(p, q)?)
}

/// Factor f = c * prod f_{Q_i R_i}: zeros and poles (with multiplicity, in
/// canonical point order) are paired off and the exact constant extracted.
/// Multiplying the factors back reproduces f identically.
pub fn factorize(f: &RationalFunction) -> Result<(Rat, Vec<(Point, Point)>)> {
    if f.is_zero() {
        return Err(CoreError::ZeroInput("factorization of zero".into()));
    }
    let mut zeros: Vec<Point> = Vec::new();
    let mut poles: Vec<Point> = Vec::new();
    for (p, m) in f.divisor()?.iter() {
        let bucket = if m > 0 { &mut zeros } else { &mut poles };
        for _ in 0..m.unsigned_abs() {
            bucket.push(p.clone());
        }
    }
    debug_assert_eq!(zeros.len(), poles.len(), "principal divisors have degree 0");
    let pairs: Vec<(Point, Point)> = zeros.into_iter().zip(poles).collect();
    let mut product = RationalFunction::one();
    for (zero, pole) in pairs.iter() {
        product = product.mul(&f_pq(zero, pole)?);
    }
    let constant = f.div(&product)?;
    debug_assert!(constant.is_constant());
    Ok((constant.scale_value().clone(), pairs))
}

/// exp of the integral from P to Q of the third-kind differential
/// omega_RS = dlog f_RS: the value f_RS(Q)/f_RS(P).
pub fn exp_integral_3rd(p: &Point, q: &Point, r: &Point, s: &Point) -> Result<Rat> {
    for (a, b) in [(p, r), (p, s), (q, r), (q, s), (p, q), (r, s)] {
        if a == b {
            return Err(CoreError::CoincidentPoints(format!(
                "integration data collides at {a}"
            )));
        }
    }
    let f = f_pq(r, s)?;
    let num = f.eval_at(q)?;
    let den = f.eval_at(p)?;
    if den.is_zero() || num.is_zero() {
        return Err(CoreError::ValueUndefined("endpoint on the divisor".into()));
    }
    Ok(num / den)
}

/// Exchange law of variable and parameter:
/// exp int_R^S omega_PQ = exp int_P^Q omega_RS. Returns both sides.
pub fn exchange_law_check(
    p: &Point,
    q: &Point,
    r: &Point,
    s: &Point,
) -> Result<(Rat, Rat)> {
    let lhs = exp_integral_3rd(r, s, p, q)?;
    let rhs = exp_integral_3rd(p, q, r, s)?;
    Ok((lhs, rhs))
}

/// Local Taylor data of f_PQ at R: the constant alpha (value of e_P/e_Q at
/// R, dotted on the diagonal), the valuation (1 at R=P, -1 at R=Q, else 0),
/// and the exponent coefficients a_1..a_order of the unit part written as
/// exp(-sum a_n t^n).
pub fn prime_taylor(
    p: &Point,
    q: &Point,
    r: &Point,
    order: i64,
) -> Result<(Rat, i64, Vec<Rat>)> {
    if order < 1 {
        return Err(CoreError::Invalid(format!("order {order} < 1")));
    }
    let f = f_pq(p, q)?;
    let (val, _) = f.leading_at(r);
    let s = f.expand_at(r, val + order + 1)?;
    let (v, alpha, unit) = s.unit_part()?;
    debug_assert_eq!(v, val);
    let log = unit.log_unit()?;
    let coeffs = (1..=order).map(|n| -log.coeff(n)).collect();
    Ok((alpha, val, coeffs))
}

/// A multiplicative function in factored form: a nonzero constant times a
/// product of elementary factors f_{P_i Q_i}. This is the admitted input of
/// the multiplicative-system action and the generalized reciprocity checks;
/// its local data at any point is assembled from prime-form expansions
/// supplied by a curve model, so the whole flow stays model-generic.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeFunction {
    constant: Rat,
    pairs: Vec<(Point, Point)>,
}

impl MultiplicativeFunction {
    pub fn new<I: IntoIterator<Item = (Point, Point)>>(
        constant: Rat,
        pairs: I,
    ) -> Result<Self> {
        if constant.is_zero() {
            return Err(CoreError::ZeroInput("multiplicative constant".into()));
        }
        let pairs: Vec<(Point, Point)> = pairs.into_iter().collect();
        for (p, q) in &pairs {
            if p == q {
                return Err(CoreError::CoincidentPoints(format!(
                    "factor f_PQ with P = Q = {p}"
                )));
            }
        }
        Ok(MultiplicativeFunction { constant, pairs })
    }

    pub fn constant(c: Rat) -> Result<Self> {
        Self::new(c, [])
    }

    pub fn one() -> Self {
        MultiplicativeFunction { constant: Rat::one(), pairs: Vec::new() }
    }

    /// Factor a rational function into elementary parts.
    pub fn from_rational(f: &RationalFunction) -> Result<Self> {
        let (c, pairs) = factorize(f)?;
        Self::new(c, pairs)
    }

    pub fn constant_part(&self) -> &Rat {
        &self.constant
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    /// The function as a rational function (the tail of its diagonal idele).
    pub fn as_rational(&self) -> Result<RationalFunction> {
        let mut f = RationalFunction::constant(self.constant.clone());
        for (p, q) in &self.pairs {
            f = f.mul(&f_pq(p, q)?);
        }
        Ok(f)
    }

    pub fn as_idele(&self) -> Result<Idele> {
        Idele::diagonal(self.as_rational()?)
    }

    /// The divisor sum of (P_i) - (Q_i); degree zero by construction.
    pub fn divisor(&self) -> crate::point::Divisor {
        let mut d = crate::point::Divisor::zero();
        for (p, q) in &self.pairs {
            d.add_point(p.clone(), 1);
            d.add_point(q.clone(), -1);
        }
        d
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().cloned());
        MultiplicativeFunction { constant: &self.constant * &other.constant, pairs }
    }

    pub fn inv(&self) -> Self {
        MultiplicativeFunction {
            constant: self.constant.clone().recip(),
            pairs: self.pairs.iter().map(|(p, q)| (q.clone(), p.clone())).collect(),
        }
    }

    /// Local expansion at `r` from model prime-form data, precision `order`.
    pub fn local_series(
        &self,
        model: &dyn crate::model::CurveModel,
        r: &Point,
        order: i64,
    ) -> Result<LaurentSeries> {
        // margin for the valuation-1 factors lost to inversion and products
        let fetch = order + 2 * self.pairs.len() as i64 + 2;
        let mut out = LaurentSeries::constant(self.constant.clone(), fetch);
        for (p, q) in &self.pairs {
            let num = model.e_expansion(p, r, fetch)?;
            let den = model.e_expansion(q, r, fetch)?;
            out = out.mul(&num).mul(&den.inv()?);
        }
        Ok(out.truncate(order))
    }

    /// (alpha, valuation, phi) at `r`: the decomposition a = alpha t^v exp(phi)
    /// with phi of positive valuation, truncated at `order`.
    pub fn local_data(
        &self,
        model: &dyn crate::model::CurveModel,
        r: &Point,
        order: i64,
    ) -> Result<(Rat, i64, LaurentSeries)> {
        // the valuation at r is at most the number of factors, so fetch that
        // much extra or a high-order zero would empty the window before the
        // lead coefficient is seen
        let margin = self.pairs.len() as i64;
        let s = self.local_series(model, r, order + 1 + margin)?;
        let (v, alpha, unit) = s.unit_part()?;
        let phi = unit.log_unit()?.truncate((order + 1 - v).max(1));
        Ok((alpha, v, phi))
    }
}

impl std::fmt::Display for MultiplicativeFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut pieces = Vec::new();
        if !self.constant.is_one() || self.pairs.is_empty() {
            pieces.push(crate::scalar::rat_to_string(&self.constant));
        }
        for (p, q) in &self.pairs {
            pieces.push(format!("f[{p},{q}]"));
        }
        write!(f, "{}", pieces.join("*"))
    }
}
