//! Vacuum expectation functionals on the state spaces: the additive
//! functional on Fock vectors (perfect matchings of two-point
//! coefficients), its charged extension (partial matchings with one-point
//! weights from the charge), and the multiplicative functional (the charged
//! one rescaled by the pairwise charge constant). The Ward checks and the
//! recurrence for the charge constants live here too.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num::{One, Zero};

use crate::adele::{residue_product, Adele};
use crate::error::{CoreError, Result};
use crate::fock::{
    charged_act, heisenberg_act, rx_act, ChargedFockVector, FockVector,
};
use crate::model::CurveModel;
use crate::point::{Divisor, Point};
use crate::scalar::{pow_rat, Rat};
use crate::symbols::MultiplicativeFunction;

pub const DEFAULT_DEGREE_CAP: usize = 12;

/// Evaluates vacuum expectations against one curve model, memoizing the
/// two-point, one-point, and charge-constant tables.
pub struct Correlator<'m> {
    model: &'m dyn CurveModel,
    degree_cap: usize,
    two_point: RefCell<BTreeMap<(Point, u32, Point, u32), Rat>>,
    one_point: RefCell<BTreeMap<(Point, u32, Divisor), Rat>>,
    charge_const: RefCell<BTreeMap<Divisor, Rat>>,
}

impl<'m> Correlator<'m> {
    pub fn new(model: &'m dyn CurveModel) -> Self {
        Correlator {
            model,
            degree_cap: DEFAULT_DEGREE_CAP,
            two_point: RefCell::new(BTreeMap::new()),
            one_point: RefCell::new(BTreeMap::new()),
            charge_const: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn model(&self) -> &dyn CurveModel {
        self.model
    }

    /// Two-point coefficient c^{mn}_{PQ} = -Res_Q(eta_P^(m) d eta_Q^(n)).
    /// Symmetric under (P,m) <-> (Q,n); zero on coincident points, where
    /// the generators are normally ordered.
    pub fn pair_coeff(&self, p: &Point, m: u32, q: &Point, n: u32) -> Result<Rat> {
        if p == q {
            return Ok(Rat::zero());
        }
        let key = if (p, m) <= (q, n) {
            (p.clone(), m, q.clone(), n)
        } else {
            (q.clone(), n, p.clone(), m)
        };
        if let Some(v) = self.two_point.borrow().get(&key) {
            return Ok(v.clone());
        }
        let x = self.model.eta_expansion(p, m, q, n as i64 + 2)?;
        let y = self.model.eta_expansion(q, n, q, m as i64 + 2)?;
        let v = -residue_product(&x, &y)?;
        self.two_point.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// One-point weight of a generator against a charge divisor:
    /// eta_P^(n)(D) = sum_Q v_Q(D) * eta_P^(n)(Q).
    pub fn charge_weight(&self, p: &Point, n: u32, d: &Divisor) -> Result<Rat> {
        let key = (p.clone(), n, d.clone());
        if let Some(v) = self.one_point.borrow().get(&key) {
            return Ok(v.clone());
        }
        let mut total = Rat::zero();
        for (q, mult) in d.iter() {
            let c = self.model.eta_const(p, n, q)?;
            total += Rat::from_integer(mult.into()) * c;
        }
        self.one_point.borrow_mut().insert(key, total.clone());
        Ok(total)
    }

    /// Charge constant c(D) = prod over ordered support pairs (P,Q),
    /// diagonal included, of c(P,Q)^{v_P(D) v_Q(D)}.
    pub fn charge_constant(&self, d: &Divisor) -> Result<Rat> {
        if let Some(v) = self.charge_const.borrow().get(d) {
            return Ok(v.clone());
        }
        let mut total = Rat::one();
        for (p, vp) in d.iter() {
            for (q, vq) in d.iter() {
                let c = self.model.prime_const(p, q)?;
                total *= pow_rat(&c, vp * vq)?;
            }
        }
        self.charge_const.borrow_mut().insert(d.clone(), total.clone());
        Ok(total)
    }

    fn check_cap(&self, degree: usize) -> Result<()> {
        if degree > self.degree_cap {
            return Err(CoreError::DegreeCap { degree, cap: self.degree_cap });
        }
        Ok(())
    }

    /// Sum over perfect matchings of the generators, each pair weighted by
    /// minus the two-point coefficient. Odd words vanish.
    fn matching_sum(&self, gens: &[(Point, u32)]) -> Result<Rat> {
        if gens.is_empty() {
            return Ok(Rat::one());
        }
        if gens.len() % 2 == 1 {
            return Ok(Rat::zero());
        }
        let (p, m) = &gens[0];
        let rest = &gens[1..];
        let mut total = Rat::zero();
        for (i, (q, n)) in rest.iter().enumerate() {
            let c = self.pair_coeff(p, *m, q, *n)?;
            if c.is_zero() {
                continue;
            }
            let mut others = rest.to_vec();
            others.remove(i);
            total += -c * self.matching_sum(&others)?;
        }
        Ok(total)
    }

    /// Sum over partial matchings: unmatched generators carry their
    /// one-point weight against the charge divisor.
    fn charged_sum(&self, d: &Divisor, gens: &[(Point, u32)]) -> Result<Rat> {
        if gens.is_empty() {
            return Ok(Rat::one());
        }
        let (p, m) = &gens[0];
        let rest = &gens[1..];
        let mut total = self.charge_weight(p, *m, d)? * self.charged_sum(d, rest)?;
        for (i, (q, n)) in rest.iter().enumerate() {
            let c = self.pair_coeff(p, *m, q, *n)?;
            if c.is_zero() {
                continue;
            }
            let mut others = rest.to_vec();
            others.remove(i);
            total += -c * self.charged_sum(d, &others)?;
        }
        Ok(total)
    }

    /// Vacuum expectation of an uncharged Fock vector.
    pub fn corr_additive(&self, v: &FockVector) -> Result<Rat> {
        let mut total = Rat::zero();
        for (mono, kappa) in v.iter() {
            self.check_cap(mono.degree())?;
            total += kappa * self.matching_sum(mono.gens())?;
        }
        Ok(total)
    }

    /// Vacuum expectation of a charged vector under the charged-but-
    /// unrescaled functional: partial matchings with charge weights.
    pub fn corr_charged(&self, w: &ChargedFockVector) -> Result<Rat> {
        let mut total = Rat::zero();
        for ((d, mono), kappa) in w.iter() {
            self.check_cap(mono.degree())?;
            total += kappa * self.charged_sum(d, mono.gens())?;
        }
        Ok(total)
    }

    /// Vacuum expectation under the multiplicative normalization: each
    /// sector additionally carries its charge constant c(D).
    pub fn corr_multiplicative(&self, w: &ChargedFockVector) -> Result<Rat> {
        let mut total = Rat::zero();
        for ((d, mono), kappa) in w.iter() {
            self.check_cap(mono.degree())?;
            let cd = self.charge_constant(d)?;
            total += kappa * cd * self.charged_sum(d, mono.gens())?;
        }
        Ok(total)
    }

    /// Expectation of the additive action on an uncharged vector; the
    /// invariance statement is that this vanishes for every adele whose
    /// components come from one global function.
    pub fn ward_additive(&self, x: &Adele, v: &FockVector) -> Result<Rat> {
        self.corr_additive(&heisenberg_act(self.model, x, v)?)
    }

    /// Expectation of the additive action on a charged vector.
    pub fn ward_charged(&self, x: &Adele, w: &ChargedFockVector) -> Result<Rat> {
        self.corr_charged(&charged_act(self.model, x, w)?)
    }

    /// Both sides of the multiplicative invariance: the expectation of the
    /// transported vector and of the vector itself.
    pub fn ward_multiplicative(
        &self,
        a: &MultiplicativeFunction,
        w: &ChargedFockVector,
    ) -> Result<(Rat, Rat)> {
        let lhs = self.corr_multiplicative(&rx_act(self.model, a, w)?);
        let rhs = self.corr_multiplicative(w);
        Ok((lhs?, rhs?))
    }

    /// One-step factor of the charge-constant recurrence:
    /// c(D + (Q) - (P)) = h(P,Q;D) c(D) with
    /// h = prod_R (c(R,Q)/c(R,P))^{v_R(D)} * prod_S (c(Q,S)/c(P,S))^{v_S(D)}
    ///     * c(Q,Q) c(P,P) / (c(Q,P) c(P,Q)).
    pub fn recurrence_factor(&self, p: &Point, q: &Point, d: &Divisor) -> Result<Rat> {
        let mut h = Rat::one();
        for (r, vr) in d.iter() {
            let left = self.model.prime_const(r, q)? / self.model.prime_const(r, p)?;
            let right = self.model.prime_const(q, r)? / self.model.prime_const(p, r)?;
            h *= pow_rat(&left, vr)?;
            h *= pow_rat(&right, vr)?;
        }
        h *= self.model.prime_const(q, q)? * self.model.prime_const(p, p)?;
        h /= self.model.prime_const(q, p)? * self.model.prime_const(p, q)?;
        Ok(h)
    }
}
