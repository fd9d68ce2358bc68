//! Rational functions on the projective line over Q, kept in factored form
//! `scale * prod (z - root)^mult`. The representation is closed under
//! multiplication, inversion, and scaling, which is all the calculus here
//! needs; sums are never formed symbolically.
//!
//! The valuation at infinity is -(sum of multiplicities), so the divisor of
//! a nonzero function always has degree zero on the nose.

use crate::error::{CoreError, Result};
use crate::laurent::LaurentSeries;
use crate::point::{Divisor, Point};
use crate::scalar::{divisors, rat_to_string, Rat};
use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    scale: Rat,
    factors: BTreeMap<Rat, i64>,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { scale: Rat::zero(), factors: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { scale: c, factors: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    /// `scale * prod (z - root)^mult`; zero multiplicities are dropped and a
    /// zero scale collapses to the zero function.
    pub fn from_factors<I: IntoIterator<Item = (Rat, i64)>>(scale: Rat, factors: I) -> Self {
        if scale.is_zero() {
            return Self::zero();
        }
        let mut map: BTreeMap<Rat, i64> = BTreeMap::new();
        for (root, mult) in factors {
            if mult == 0 {
                continue;
            }
            let merged = map.entry(root.clone()).or_insert(0);
            *merged += mult;
            if *merged == 0 {
                map.remove(&root);
            }
        }
        RationalFunction { scale, factors: map }
    }

    /// `z - p` for finite p; `1/z` at infinity; in both cases the local
    /// uniformizer of the point, raised to the k-th power.
    pub fn uniformizer_power(p: &Point, k: i64) -> Self {
        match p {
            Point::Finite(r) => Self::from_factors(Rat::one(), [(r.clone(), k)]),
            Point::Infinity => Self::from_factors(Rat::one(), [(Rat::zero(), -k)]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn scale_value(&self) -> &Rat {
        &self.scale
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Rat, i64)> {
        self.factors.iter().map(|(r, &m)| (r, m))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() || self.is_zero() {
            return Self::zero();
        }
        RationalFunction { scale: &self.scale * c, factors: self.factors.clone() }
    }

    pub fn neg(&self) -> Self {
        RationalFunction { scale: -self.scale.clone(), factors: self.factors.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        out.scale *= &other.scale;
        for (root, &mult) in other.factors.iter() {
            let e = out.factors.entry(root.clone()).or_insert(0);
            *e += mult;
            if *e == 0 {
                out.factors.remove(root);
            }
        }
        out
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(CoreError::ZeroInput("inverse of the zero function".into()));
        }
        Ok(RationalFunction {
            scale: self.scale.clone().recip(),
            factors: self.factors.iter().map(|(r, &m)| (r.clone(), -m)).collect(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if self.is_zero() {
            if k > 0 {
                return Ok(Self::zero());
            }
            return Err(CoreError::ZeroInput(format!("0^{k}")));
        }
        Ok(RationalFunction {
            scale: crate::scalar::pow_rat(&self.scale, k)?,
            factors: self.factors.iter().map(|(r, &m)| (r.clone(), m * k)).collect(),
        })
    }

    /// Valuation at `p`: multiplicity of the root, or minus the total degree
    /// at infinity.
    pub fn valuation_at(&self, p: &Point) -> i64 {
        assert!(!self.is_zero(), "valuation of the zero function");
        match p {
            Point::Finite(r) => self.factors.get(r).copied().unwrap_or(0),
            Point::Infinity => -self.factors.values().sum::<i64>(),
        }
    }

    /// (valuation, leading coefficient) of the expansion at `p`, by closed
    /// form rather than series arithmetic.
    pub fn leading_at(&self, p: &Point) -> (i64, Rat) {
        assert!(!self.is_zero(), "leading coefficient of the zero function");
        match p {
            Point::Finite(at) => {
                let v = self.valuation_at(p);
                let mut lead = self.scale.clone();
                for (root, &mult) in self.factors.iter() {
                    if root == at {
                        continue;
                    }
                    let base = at - root;
                    lead *= crate::scalar::pow_rat(&base, mult).expect("nonzero base");
                }
                (v, lead)
            }
            Point::Infinity => (self.valuation_at(p), self.scale.clone()),
        }
    }

    /// Value at a point: 0 at a zero, defined everywhere except poles.
    pub fn eval_at(&self, p: &Point) -> Result<Rat> {
        if self.is_zero() {
            return Ok(Rat::zero());
        }
        let (v, lead) = self.leading_at(p);
        if v < 0 {
            return Err(CoreError::ValueUndefined(p.to_string()));
        }
        if v > 0 {
            return Ok(Rat::zero());
        }
        Ok(lead)
    }

    /// Divisor of zeros and poles; degree zero by construction.
    pub fn divisor(&self) -> Result<Divisor> {
        if self.is_zero() {
            return Err(CoreError::ZeroInput("divisor of the zero function".into()));
        }
        let mut d = Divisor::zero();
        for (root, &mult) in self.factors.iter() {
            d.add_point(Point::Finite(root.clone()), mult);
        }
        d.add_point(Point::Infinity, self.valuation_at(&Point::Infinity));
        Ok(d)
    }

    /// Expansion in the local uniformizer at `p` as a window bounded by
    /// `precision`. The result carries its exact source and re-expands on
    /// demand.
    pub fn expand_at(&self, p: &Point, precision: i64) -> Result<LaurentSeries> {
        if self.is_zero() {
            return Ok(LaurentSeries::zero(precision)
                .with_source(RationalFunction::zero(), p.clone()));
        }
        let v = self.valuation_at(p);
        let len = precision - v;
        if len <= 0 {
            return Ok(LaurentSeries::zero(precision).with_source(self.clone(), p.clone()));
        }
        let len = len as usize;
        // Split the factors away from p into a numerator and denominator
        // polynomial in t with nonzero constant terms.
        let mut num: Vec<Rat> = vec![Rat::one()];
        let mut den: Vec<Rat> = vec![Rat::one()];
        for (root, &mult) in self.factors.iter() {
            let base: Vec<Rat> = match p {
                Point::Finite(at) => {
                    if root == at {
                        continue;
                    }
                    // z - root = (at - root) + t
                    vec![at - root, Rat::one()]
                }
                // z - root = t^-1 (1 - root t); the t^-1 is part of t^v.
                Point::Infinity => vec![Rat::one(), -root.clone()],
            };
            let target = if mult > 0 { &mut num } else { &mut den };
            for _ in 0..mult.unsigned_abs() {
                *target = mul_poly(target, &base, len);
            }
        }
        let unit = mul_poly(&num, &inv_unit_poly(&den, len), len);
        let series = LaurentSeries::from_coeffs(
            unit.into_iter()
                .enumerate()
                .map(|(i, c)| (v + i as i64, c * &self.scale)),
            precision,
        );
        Ok(series.with_source(self.clone(), p.clone()))
    }

    /// Numerator and denominator as coefficient vectors (constant first):
    /// numerator carries the scale and the positive-multiplicity factors.
    pub fn poly_parts(&self) -> (Vec<Rat>, Vec<Rat>) {
        let mut num = vec![self.scale.clone()];
        let mut den = vec![Rat::one()];
        for (root, &mult) in self.factors.iter() {
            let base = [-root.clone(), Rat::one()];
            let target = if mult > 0 { &mut num } else { &mut den };
            for _ in 0..mult.unsigned_abs() {
                *target = mul_poly(target, &base, usize::MAX);
            }
        }
        (num, den)
    }

    /// Sum, staying in factored form. Fails with `IrreducibleFactor` when the
    /// resulting numerator does not split into linear factors over Q.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let (num_a, den_a) = self.poly_parts();
        let (num_b, den_b) = other.poly_parts();
        let num = add_poly(
            &mul_poly(&num_a, &den_b, usize::MAX),
            &mul_poly(&num_b, &den_a, usize::MAX),
        );
        let numerator = Self::from_poly_coeffs(&num)?;
        let mut den_factors: Vec<(Rat, i64)> = Vec::new();
        for f in [self, other] {
            for (root, mult) in f.factors() {
                if mult < 0 {
                    den_factors.push((root.clone(), mult));
                }
            }
        }
        Ok(numerator.mul(&Self::from_factors(Rat::one(), den_factors)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Factor a polynomial given by coefficients (constant first) into
    /// linear factors over Q; rejects irreducible quadratic-or-higher parts.
    pub fn from_poly_coeffs(coeffs: &[Rat]) -> Result<Self> {
        let mut poly: Vec<Rat> = coeffs.to_vec();
        while poly.last().map(|c| c.is_zero()).unwrap_or(false) {
            poly.pop();
        }
        if poly.is_empty() {
            return Ok(Self::zero());
        }
        let mut factors: Vec<(Rat, i64)> = Vec::new();
        let zero_mult = poly.iter().take_while(|c| c.is_zero()).count();
        if zero_mult > 0 {
            factors.push((Rat::zero(), zero_mult as i64));
            poly.drain(..zero_mult);
        }
        while poly.len() > 1 {
            let root = rational_root(&poly)?.ok_or(CoreError::IrreducibleFactor)?;
            let mut mult = 0i64;
            while poly.len() > 1 && eval_poly(&poly, &root).is_zero() {
                poly = divide_linear(&poly, &root);
                mult += 1;
            }
            factors.push((root, mult));
        }
        Ok(Self::from_factors(poly[0].clone(), factors))
    }
}

impl fmt::Display for RationalFunction {
    /// Canonical factored form, e.g. `3*(z-1)^2*(z+3)^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut pieces: Vec<String> = Vec::new();
        if !self.scale.is_one() || self.factors.is_empty() {
            pieces.push(rat_to_string(&self.scale));
        }
        // zeros first, then poles, each in root order
        let ordered = self
            .factors
            .iter()
            .filter(|(_, &m)| m > 0)
            .chain(self.factors.iter().filter(|(_, &m)| m < 0));
        for (root, &mult) in ordered {
            let inner = if root.is_zero() {
                "z".to_string()
            } else if root.is_negative() {
                format!("z+{}", rat_to_string(&-root.clone()))
            } else {
                format!("z-{}", rat_to_string(root))
            };
            if mult == 1 {
                pieces.push(format!("({inner})"));
            } else {
                pieces.push(format!("({inner})^{mult}"));
            }
        }
        write!(f, "{}", pieces.join("*"))
    }
}

fn add_poly(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn mul_poly(a: &[Rat], b: &[Rat], len: usize) -> Vec<Rat> {
    let n = (a.len() + b.len() - 1).min(len);
    let mut out = vec![Rat::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() || i >= len {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Series inverse of a polynomial with nonzero constant term, to `len` terms.
fn inv_unit_poly(den: &[Rat], len: usize) -> Vec<Rat> {
    let d0 = den[0].clone();
    assert!(!d0.is_zero(), "unit polynomial required");
    let mut out = vec![Rat::zero(); len];
    out[0] = d0.clone().recip();
    for k in 1..len {
        let mut acc = Rat::zero();
        for j in 1..=k.min(den.len() - 1) {
            acc += &den[j] * &out[k - j];
        }
        if !acc.is_zero() {
            out[k] = -acc / &d0;
        }
    }
    out
}

fn eval_poly(poly: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in poly.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Divide by (z - root), assuming the root is exact.
fn divide_linear(poly: &[Rat], root: &Rat) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); poly.len() - 1];
    let mut carry = Rat::zero();
    for i in (0..poly.len() - 1).rev() {
        carry = &poly[i + 1] + &carry * root;
        out[i] = carry.clone();
    }
    debug_assert!((&poly[0] + &carry * root).is_zero());
    out
}

/// One rational root of a polynomial with nonzero constant term, if any.
fn rational_root(poly: &[Rat]) -> Result<Option<Rat>> {
    // Clear denominators and content to get a primitive integer polynomial.
    let mut lcm = BigInt::one();
    for c in poly {
        lcm = num::integer::lcm(lcm, c.denom().clone());
    }
    let ints: Vec<BigInt> = poly.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = num::integer::gcd(content, c.clone());
    }
    let ints: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
    let a0 = ints.first().unwrap().clone();
    let an = ints.last().unwrap().clone();
    for p in divisors(&a0)? {
        for q in divisors(&an)? {
            for sign in [1i64, -1] {
                let cand = Rat::new(&p * BigInt::from(sign), q.clone());
                if eval_poly(poly, &cand).is_zero() {
                    return Ok(Some(cand));
                }
            }
        }
    }
    Ok(None)
}

/// Residue at `p` of the differential `f dz`. At infinity the substitution
/// z = 1/t gives dz = -t^-2 dt, so the residue is minus the t^1 coefficient
/// of the expansion of f there.
pub fn residue_at(f: &RationalFunction, p: &Point) -> Result<Rat> {
    match p {
        Point::Finite(_) => Ok(f.expand_at(p, 1)?.coeff(-1)),
        Point::Infinity => Ok(-f.expand_at(p, 2)?.coeff(1)),
    }
}

/// All local residues of `f dz` (finite poles of f, plus infinity where dz
/// itself is singular) and their sum, which vanishes identically.
pub fn residue_theorem_check(f: &RationalFunction) -> Result<(Vec<(Point, Rat)>, Rat)> {
    let mut locals: Vec<(Point, Rat)> = Vec::new();
    if !f.is_zero() {
        for (root, mult) in f.factors() {
            if mult < 0 {
                let p = Point::Finite(root.clone());
                let r = residue_at(f, &p)?;
                locals.push((p, r));
            }
        }
    }
    locals.push((Point::Infinity, residue_at(f, &Point::Infinity)?));
    let sum = locals.iter().fold(Rat::zero(), |acc, (_, r)| acc + r);
    Ok((locals, sum))
}

/// Generator of the pole filtration at `p`: the function with a single pole
/// of order `n` at `p`, normalised so its exterior derivative is the basic
/// second-kind differential there. Finite p: -1/(n (z-p)^n); at infinity:
/// -z^n/n.
pub fn eta(p: &Point, n: u32) -> RationalFunction {
    assert!(n >= 1, "pole order must be positive");
    let ninv = -Rat::new(BigInt::one(), BigInt::from(n));
    match p {
        Point::Finite(r) => {
            RationalFunction::from_factors(ninv, [(r.clone(), -(n as i64))])
        }
        Point::Infinity => RationalFunction::from_factors(ninv, [(Rat::zero(), n as i64)]),
    }
}

/// Dual generator: -(z-p)^n at finite p, -z^-n at infinity. Its expansion at
/// p is -t^n, dual to `eta` under the local residue pairing.
pub fn u_gen(p: &Point, n: u32) -> RationalFunction {
    assert!(n >= 1, "order must be positive");
    match p {
        Point::Finite(r) => {
            RationalFunction::from_factors(-Rat::one(), [(r.clone(), n as i64)])
        }
        Point::Infinity => {
            RationalFunction::from_factors(-Rat::one(), [(Rat::zero(), -(n as i64))])
        }
    }
}

/// Decompose `f` as sum of `eta` generators over its poles plus a constant:
/// the coefficient map is supported exactly on the polar divisor.
pub fn partial_fractions(
    f: &RationalFunction,
) -> Result<(BTreeMap<(Point, u32), Rat>, Rat)> {
    let mut coeffs: BTreeMap<(Point, u32), Rat> = BTreeMap::new();
    if f.is_zero() {
        return Ok((coeffs, Rat::zero()));
    }
    for (root, mult) in f.factors() {
        if mult >= 0 {
            continue;
        }
        let p = Point::Finite(root.clone());
        let depth = -mult;
        let s = f.expand_at(&p, 1)?;
        for j in 1..=depth {
            // principal coefficient b at t^-j rides on eta^(j) = -t^-j/j
            let b = s.coeff(-j);
            if !b.is_zero() {
                coeffs.insert((p.clone(), j as u32), -Rat::from_integer(j.into()) * b);
            }
        }
    }
    let s_inf = f.expand_at(&Point::Infinity, 1)?;
    let v_inf = f.valuation_at(&Point::Infinity);
    if v_inf < 0 {
        for j in 1..=(-v_inf) {
            let b = s_inf.coeff(-j);
            if !b.is_zero() {
                coeffs.insert(
                    (Point::Infinity, j as u32),
                    -Rat::from_integer(j.into()) * b,
                );
            }
        }
    }
    Ok((coeffs, s_inf.coeff(0)))
}
