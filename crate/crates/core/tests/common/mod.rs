//! Shared helpers for the integration suites: the point panel, seeded
//! random generators, and the model-generic verification suites. Each
//! suite returns a transcript of every exact value it computed, so a rerun
//! against a different model implementation can be compared byte for byte.

#![allow(dead_code)]

use std::fmt::Write as _;

use adelic_core::adele::{c_x, Adele};
use adelic_core::expectation::Correlator;
use adelic_core::fock::{heisenberg_act, ChargedFockVector, FockMonomial, FockVector};
use adelic_core::laurent::LaurentSeries;
use adelic_core::model::CurveModel;
use adelic_core::point::{Divisor, Point};
use adelic_core::rational::{partial_fractions, residue_theorem_check, RationalFunction};
use adelic_core::scalar::{pow_rat, rat, rat_to_string, ratio, sign_pow, Rat};
use adelic_core::symbols::{weil_global, MultiplicativeFunction};
use adelic_core::{CoreError, Result};
use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The fixed point panel every model-generic suite draws from; a tabulated
/// model built over exactly these points covers every request the suites
/// make.
pub fn panel() -> Vec<Point> {
    let mut pts: Vec<Point> = finite_panel().into_iter().map(Point::finite).collect();
    pts.push(Point::Infinity);
    pts
}

pub fn finite_panel() -> Vec<Rat> {
    vec![
        rat(-3),
        rat(-2),
        rat(-1),
        rat(0),
        rat(1),
        rat(2),
        rat(3),
        ratio(1, 2),
    ]
}

/// Integer panel values, used as pole/zero locations so that the fraction
/// 1/2 always remains available as an evaluation point.
pub fn integer_panel() -> Vec<Rat> {
    vec![rat(-3), rat(-2), rat(-1), rat(0), rat(1), rat(2), rat(3)]
}

pub fn scales() -> Vec<Rat> {
    vec![
        rat(1),
        rat(2),
        rat(3),
        rat(-1),
        rat(-2),
        ratio(1, 2),
        ratio(5, 3),
        ratio(-3, 4),
    ]
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fail(msg: String) -> CoreError {
    CoreError::Invalid(msg)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg()))
    }
}

/// A random factored rational function with roots on the integer panel.
pub fn random_rational_panel(
    rng: &mut ChaCha8Rng,
    max_factors: usize,
    max_mult: i64,
) -> RationalFunction {
    let roots = integer_panel();
    let scales = scales();
    let k = rng.gen_range(1..=max_factors);
    let mut factors = Vec::new();
    for _ in 0..k {
        let root = roots[rng.gen_range(0..roots.len())].clone();
        let mag = rng.gen_range(1..=max_mult);
        let mult = if rng.gen_bool(0.5) { mag } else { -mag };
        factors.push((root, mult));
    }
    let scale = scales[rng.gen_range(0..scales.len())].clone();
    RationalFunction::from_factors(scale, factors)
}

/// A random factored rational function over a wider root pool, for the
/// model-free global identities.
pub fn random_rational_free(
    rng: &mut ChaCha8Rng,
    max_factors: usize,
    max_mult: i64,
) -> RationalFunction {
    let scales = scales();
    let k = rng.gen_range(1..=max_factors);
    let mut factors = Vec::new();
    for _ in 0..k {
        let num = rng.gen_range(-6i64..=6);
        let den = rng.gen_range(1i64..=3);
        let mag = rng.gen_range(1..=max_mult);
        let mult = if rng.gen_bool(0.5) { mag } else { -mag };
        factors.push((ratio(num, den), mult));
    }
    let scale = scales[rng.gen_range(0..scales.len())].clone();
    RationalFunction::from_factors(scale, factors)
}

pub fn random_point(rng: &mut ChaCha8Rng) -> Point {
    let p = panel();
    p[rng.gen_range(0..p.len())].clone()
}

pub fn random_fock_monomial(
    rng: &mut ChaCha8Rng,
    max_degree: usize,
    max_order: u32,
) -> FockMonomial {
    let d = rng.gen_range(0..=max_degree);
    let mut gens = Vec::new();
    for _ in 0..d {
        gens.push((random_point(rng), rng.gen_range(1..=max_order)));
    }
    FockMonomial::new(gens).expect("orders are positive")
}

/// A random degree-zero divisor supported on at most `max_support` panel
/// points.
pub fn random_charge(rng: &mut ChaCha8Rng, max_support: usize) -> Divisor {
    let pts = panel();
    let k = rng.gen_range(1..=max_support);
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    for i in 0..k {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
    }
    let mut d = Divisor::zero();
    let mut sum = 0i64;
    for (step, &i) in idx.iter().take(k).enumerate() {
        if step + 1 == k {
            d.add_point(pts[i].clone(), -sum);
        } else {
            let mag = rng.gen_range(1..=2i64);
            let m = if rng.gen_bool(0.5) { mag } else { -mag };
            d.add_point(pts[i].clone(), m);
            sum += m;
        }
    }
    d
}

/// A random product of elementary factors over distinct panel points.
pub fn random_multiplicative(
    rng: &mut ChaCha8Rng,
    max_pairs: usize,
) -> MultiplicativeFunction {
    let pts = panel();
    let scales = scales();
    let k = rng.gen_range(1..=max_pairs);
    let mut pairs = Vec::new();
    for _ in 0..k {
        let i = rng.gen_range(0..pts.len());
        let mut j = rng.gen_range(0..pts.len());
        while j == i {
            j = rng.gen_range(0..pts.len());
        }
        pairs.push((pts[i].clone(), pts[j].clone()));
    }
    let c = scales[rng.gen_range(0..scales.len())].clone();
    MultiplicativeFunction::new(c, pairs).expect("pairs are distinct")
}

// ---------------------------------------------------------------------
// Global identities (model-free)
// ---------------------------------------------------------------------

/// Residue theorem: the local residues of f dz sum to zero, infinity
/// included.
pub fn suite_residue_theorem(seed: u64, cases: usize) -> Result<String> {
    let mut rng = seeded(seed);
    let mut out = String::new();
    for i in 0..cases {
        let f = random_rational_free(&mut rng, 8, 3);
        let (locals, total) = residue_theorem_check(&f)?;
        writeln!(
            out,
            "case {i}: f = {f}; residues at {} points; sum = {}",
            locals.len(),
            rat_to_string(&total)
        )
        .unwrap();
        ensure(total.is_zero(), || {
            format!("case {i}: residues of {f} sum to {total}, not 0")
        })?;
    }
    Ok(out)
}

/// Weil reciprocity for pairs of rational functions, plus the worked
/// instance f = z, g = z - 1 with local symbols (-1, 1, -1).
pub fn suite_weil(seed: u64, cases: usize) -> Result<String> {
    let mut out = String::new();
    let f = RationalFunction::from_factors(Rat::one(), [(rat(0), 1)]);
    let g = RationalFunction::from_factors(Rat::one(), [(rat(1), 1)]);
    let (locals, product) = weil_global(&f, &g)?;
    let shown: Vec<String> = locals
        .iter()
        .map(|(p, v)| format!("{p}:{}", rat_to_string(v)))
        .collect();
    writeln!(out, "worked: tame(z, z-1) locals [{}] product = {}", shown.join(", "), rat_to_string(&product)).unwrap();
    let values: Vec<Rat> = locals.into_iter().map(|(_, v)| v).collect();
    ensure(values == vec![rat(-1), rat(1), rat(-1)], || {
        format!("worked weil locals were {values:?}")
    })?;
    ensure(product.is_one(), || "worked weil product differs from 1".into())?;

    let mut rng = seeded(seed);
    for i in 0..cases {
        let f = random_rational_free(&mut rng, 4, 3);
        let g = random_rational_free(&mut rng, 4, 3);
        let (locals, product) = weil_global(&f, &g)?;
        writeln!(
            out,
            "case {i}: {} local symbols; product = {}",
            locals.len(),
            rat_to_string(&product)
        )
        .unwrap();
        ensure(product.is_one(), || {
            format!("case {i}: weil product of ({f}, {g}) is {product}")
        })?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Model-generic suites
// ---------------------------------------------------------------------

/// Residue of x dy from model windows, with enough width requested that
/// the result is always determined.
fn model_residue(
    model: &dyn CurveModel,
    p: &Point,
    m: u32,
    q: &Point,
    n: u32,
) -> Result<Rat> {
    let x = model.eta_expansion(p, m, q, n as i64 + 2)?;
    let y = model.eta_expansion(q, n, q, m as i64 + 2)?;
    adelic_core::adele::residue_product(&x, &y)
}

/// Suite 3 — reciprocity of the second-kind generators:
/// Res_Q(eta_P^(m) d eta_Q^(n)) = Res_P(eta_Q^(n) d eta_P^(m)) over the
/// six-point panel, orders up to 4; same-point residues vanish.
pub fn suite_reciprocity(model: &dyn CurveModel) -> Result<String> {
    let pts: Vec<Point> = vec![
        Point::finite(rat(-2)),
        Point::finite(rat(-1)),
        Point::finite(rat(0)),
        Point::finite(rat(1)),
        Point::finite(rat(2)),
        Point::Infinity,
    ];
    let mut out = String::new();
    for p in &pts {
        for q in &pts {
            for m in 1..=4u32 {
                for n in 1..=4u32 {
                    let a = model_residue(model, p, m, q, n)?;
                    if p == q {
                        writeln!(out, "res {p} {m} {q} {n} = {}", rat_to_string(&a)).unwrap();
                        ensure(a.is_zero(), || {
                            format!("same-point residue at {p} orders ({m},{n}) is {a}")
                        })?;
                    } else {
                        let b = model_residue(model, q, n, p, m)?;
                        writeln!(out, "res {p} {m} {q} {n} = {}", rat_to_string(&a)).unwrap();
                        ensure(a == b, || {
                            format!(
                                "reciprocity fails at ({p},{q}) orders ({m},{n}): {a} vs {b}"
                            )
                        })?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Suite 4 — partial fractions: the coefficients produced against the
/// second-kind basis reconstruct the function at random panel points,
/// with the basis values taken from the model.
pub fn suite_partial_fractions(
    model: &dyn CurveModel,
    seed: u64,
    cases: usize,
) -> Result<String> {
    let mut rng = seeded(seed);
    let mut out = String::new();
    let eval_pool = finite_panel();
    for i in 0..cases {
        let f = random_rational_panel(&mut rng, 6, 3);
        let (coeffs, constant) = partial_fractions(&f)?;
        write!(out, "case {i}: f = {f}; const = {}", rat_to_string(&constant)).unwrap();
        let candidates: Vec<Rat> = eval_pool
            .iter()
            .filter(|r| f.valuation_at(&Point::finite((*r).clone())) >= 0)
            .cloned()
            .collect();
        ensure(!candidates.is_empty(), || {
            format!("case {i}: no regular evaluation points for {f}")
        })?;
        for _ in 0..10 {
            let r = candidates[rng.gen_range(0..candidates.len())].clone();
            let q = Point::finite(r);
            let mut value = constant.clone();
            for ((p, j), a) in &coeffs {
                value += a * model.eta_const(p, *j, &q)?;
            }
            let direct = f.eval_at(&q)?;
            write!(out, " [{q}:{}]", rat_to_string(&value)).unwrap();
            ensure(value == direct, || {
                format!("case {i}: reconstruction of {f} at {q} gave {value}, expected {direct}")
            })?;
        }
        writeln!(out).unwrap();
    }
    Ok(out)
}

/// Local tame symbol of two factored functions at a point, from model
/// leading data.
fn model_tame(
    model: &dyn CurveModel,
    a: &MultiplicativeFunction,
    b: &MultiplicativeFunction,
    r: &Point,
) -> Result<Rat> {
    let (lead_a, va, _) = a.local_data(model, r, 2)?;
    let (lead_b, vb, _) = b.local_data(model, r, 2)?;
    Ok(sign_pow(va * vb) * pow_rat(&lead_a, vb)? / pow_rat(&lead_b, va)?)
}

/// Global tame product of two factored functions over their joint support.
fn model_weil(
    model: &dyn CurveModel,
    a: &MultiplicativeFunction,
    b: &MultiplicativeFunction,
) -> Result<Rat> {
    let mut support: Vec<Point> = Vec::new();
    for d in [a.divisor(), b.divisor()] {
        for p in d.support() {
            if !support.contains(p) {
                support.push(p.clone());
            }
        }
    }
    support.sort();
    let mut product = Rat::one();
    for r in &support {
        product *= model_tame(model, a, b, r)?;
    }
    Ok(product)
}

/// Suite 5 — the exchange law for third-kind integrals on the five-point
/// panel, and the generalized reciprocity (tame product = 1) for panel
/// pairs and random factored products.
pub fn suite_exchange(model: &dyn CurveModel, seed: u64, cases: usize) -> Result<String> {
    let pts: Vec<Point> = vec![
        Point::finite(rat(0)),
        Point::finite(rat(1)),
        Point::finite(rat(2)),
        Point::finite(rat(3)),
        Point::Infinity,
    ];
    let mut out = String::new();

    // exchange law on ordered 4-tuples of distinct panel points:
    // f_RS(Q)/f_RS(P) = f_PQ(S)/f_PQ(R), all values via prime constants
    for p in &pts {
        for q in &pts {
            for r in &pts {
                for s in &pts {
                    let four = [p, q, r, s];
                    let distinct = four
                        .iter()
                        .enumerate()
                        .all(|(i, a)| four.iter().skip(i + 1).all(|b| a != b));
                    if !distinct {
                        continue;
                    }
                    let value = |x: &Point, y: &Point, at: &Point| -> Result<Rat> {
                        Ok(model.prime_const(x, at)? / model.prime_const(y, at)?)
                    };
                    let lhs = value(r, s, q)? / value(r, s, p)?;
                    let rhs = value(p, q, s)? / value(p, q, r)?;
                    writeln!(
                        out,
                        "exchange {p} {q} {r} {s} = {}",
                        rat_to_string(&lhs)
                    )
                    .unwrap();
                    ensure(lhs == rhs, || {
                        format!("exchange law fails at ({p},{q},{r},{s}): {lhs} vs {rhs}")
                    })?;
                }
            }
        }
    }

    // generalized reciprocity on all ordered pairs of elementary factors
    for p in &pts {
        for q in &pts {
            if p == q {
                continue;
            }
            for r in &pts {
                for s in &pts {
                    if r == s {
                        continue;
                    }
                    let a = MultiplicativeFunction::new(
                        Rat::one(),
                        [(p.clone(), q.clone())],
                    )
                    .expect("distinct");
                    let b = MultiplicativeFunction::new(
                        Rat::one(),
                        [(r.clone(), s.clone())],
                    )
                    .expect("distinct");
                    let tau = model_weil(model, &a, &b)?;
                    writeln!(out, "tau f[{p},{q}] f[{r},{s}] = {}", rat_to_string(&tau))
                        .unwrap();
                    ensure(tau.is_one(), || {
                        format!("generalized reciprocity fails for f[{p},{q}], f[{r},{s}]: {tau}")
                    })?;
                }
            }
        }
    }

    // random factored products
    let mut rng = seeded(seed);
    for i in 0..cases {
        let a = random_multiplicative(&mut rng, 3);
        let b = random_multiplicative(&mut rng, 3);
        let tau = model_weil(model, &a, &b)?;
        writeln!(out, "case {i}: tau({a}; {b}) = {}", rat_to_string(&tau)).unwrap();
        ensure(tau.is_one(), || {
            format!("case {i}: generalized reciprocity fails for {a}, {b}: {tau}")
        })?;
    }
    Ok(out)
}

/// Log-expansion coefficients of the elementary function f_PQ at R, from
/// model prime-form windows: returns (leading constant, a_1..a_order).
fn model_prime_taylor(
    model: &dyn CurveModel,
    p: &Point,
    q: &Point,
    r: &Point,
    order: u32,
) -> Result<(Rat, Vec<Rat>)> {
    let a = MultiplicativeFunction::new(Rat::one(), [(p.clone(), q.clone())])
        .expect("distinct points");
    let (alpha, _, phi) = a.local_data(model, r, order as i64 + 1)?;
    let mut coeffs = Vec::new();
    for n in 1..=order {
        coeffs.push(-phi.coeff(n as i64));
    }
    Ok((alpha, coeffs))
}

/// Suite 6 — local Taylor data of elementary functions: the worked
/// instance f_01 at R = 2 with (a_1, a_2) = (1/2, -3/8), and panel-wide
/// agreement of the log coefficients with differences of basis constants.
pub fn suite_prime_taylor(model: &dyn CurveModel) -> Result<String> {
    let mut out = String::new();
    let p0 = Point::finite(rat(0));
    let p1 = Point::finite(rat(1));
    let p2 = Point::finite(rat(2));

    let (alpha, coeffs) = model_prime_taylor(model, &p0, &p1, &p2, 6)?;
    let shown: Vec<String> = coeffs.iter().map(rat_to_string).collect();
    writeln!(
        out,
        "worked: f[0,1] at 2: alpha = {}; a = [{}]",
        rat_to_string(&alpha),
        shown.join(", ")
    )
    .unwrap();
    ensure(coeffs[0] == ratio(1, 2) && coeffs[1] == ratio(-3, 8), || {
        format!("worked taylor data differs: a1 = {}, a2 = {}", coeffs[0], coeffs[1])
    })?;
    let expected_alpha = model.prime_const(&p0, &p2)? / model.prime_const(&p1, &p2)?;
    ensure(alpha == expected_alpha, || {
        format!("worked leading constant {alpha} differs from {expected_alpha}")
    })?;

    let pts: Vec<Point> = vec![
        Point::finite(rat(-2)),
        Point::finite(rat(0)),
        Point::finite(rat(1)),
        Point::finite(rat(2)),
        Point::Infinity,
    ];
    for p in &pts {
        for q in &pts {
            for r in &pts {
                if p == q || p == r || q == r {
                    continue;
                }
                let (alpha, coeffs) = model_prime_taylor(model, p, q, r, 6)?;
                let expected_alpha =
                    model.prime_const(p, r)? / model.prime_const(q, r)?;
                ensure(alpha == expected_alpha, || {
                    format!("leading constant of f[{p},{q}] at {r} is {alpha}, expected {expected_alpha}")
                })?;
                let shown: Vec<String> = coeffs.iter().map(rat_to_string).collect();
                writeln!(out, "taylor {p} {q} {r}: alpha = {}; a = [{}]",
                    rat_to_string(&alpha), shown.join(", ")).unwrap();
                for (k, a) in coeffs.iter().enumerate() {
                    let n = (k + 1) as u32;
                    let diff =
                        model.eta_const(r, n, q)? - model.eta_const(r, n, p)?;
                    ensure(*a == diff, || {
                        format!(
                            "taylor coefficient a_{n} of f[{p},{q}] at {r} is {a}, expected {diff}"
                        )
                    })?;
                }
            }
        }
    }
    Ok(out)
}

pub fn random_adele(rng: &mut ChaCha8Rng) -> Adele {
    match rng.gen_range(0..3) {
        0 => Adele::diagonal(random_rational_panel(rng, 3, 2)),
        1 => {
            // a purely local window at one panel point
            let p = random_point(rng);
            let mut s = LaurentSeries::zero(12);
            let terms = rng.gen_range(1..=3);
            for _ in 0..terms {
                let e = rng.gen_range(-3i64..=3);
                let c = rng.gen_range(-4i64..=4);
                if c != 0 {
                    s = s.add(&LaurentSeries::monomial(e, rat(c), 12));
                }
            }
            Adele::from_parts([(p, s)])
        }
        _ => {
            let tail = random_rational_panel(rng, 2, 2);
            let p = random_point(rng);
            let e = rng.gen_range(-2i64..=2);
            let part = LaurentSeries::monomial(e, rat(rng.gen_range(1..=3)), 12);
            Adele::new(tail, [(p, part)])
        }
    }
}

/// Suite 7 — the oscillator relations: fixed ladder instances
/// [rho(t^m), rho(t^-m)] = m, and the residue-pairing cocycle
/// [rho(x), rho(y)] = c_X(x,y) on random adeles and states.
pub fn suite_oscillator(model: &dyn CurveModel, seed: u64, cases: usize) -> Result<String> {
    let mut out = String::new();
    let ladder_points = [Point::finite(rat(0)), Point::finite(rat(2)), Point::Infinity];
    for p in &ladder_points {
        for m in 1..=4i64 {
            let up = Adele::from_parts([(p.clone(), LaurentSeries::monomial(m, Rat::one(), m + 9))]);
            let dn = Adele::from_parts([(p.clone(), LaurentSeries::monomial(-m, Rat::one(), m + 9))]);
            let v = FockVector::monomial(
                FockMonomial::new([(p.clone(), 1)]).expect("positive order"),
            );
            let ab = heisenberg_act(model, &up, &heisenberg_act(model, &dn, &v)?)?;
            let ba = heisenberg_act(model, &dn, &heisenberg_act(model, &up, &v)?)?;
            let diff = ab.sub(&ba);
            writeln!(out, "ladder {p} {m}: [a_{m}, a_-{m}] v = {diff}").unwrap();
            ensure(diff == v.scale(&rat(m)), || {
                format!("ladder relation fails at {p} order {m}")
            })?;
        }
    }

    let mut rng = seeded(seed);
    for i in 0..cases {
        let x = random_adele(&mut rng);
        let y = random_adele(&mut rng);
        let v = FockVector::monomial(random_fock_monomial(&mut rng, 3, 3));
        let c = c_x(&x, &y)?;
        let ab = heisenberg_act(model, &x, &heisenberg_act(model, &y, &v)?)?;
        let ba = heisenberg_act(model, &y, &heisenberg_act(model, &x, &v)?)?;
        let diff = ab.sub(&ba);
        writeln!(out, "case {i}: c = {}; state degree {}", rat_to_string(&c), v.degree()).unwrap();
        ensure(diff == v.scale(&c), || {
            format!("case {i}: commutator differs from pairing {c}")
        })?;
    }
    Ok(out)
}

/// Suite 8 — additive invariance: expectations of global-function actions
/// vanish, on plain and charged states, plus the worked instance
/// f = 1/z acting on v_1^(1).
pub fn suite_ward_additive(
    model: &dyn CurveModel,
    seed: u64,
    cases: usize,
) -> Result<String> {
    let corr = Correlator::new(model);
    let mut out = String::new();

    let f = RationalFunction::from_factors(Rat::one(), [(rat(0), -1)]);
    let v = FockVector::monomial(
        FockMonomial::new([(Point::finite(rat(1)), 1)]).expect("positive order"),
    );
    let acted = heisenberg_act(model, &Adele::diagonal(f.clone()), &v)?;
    let value = corr.corr_additive(&acted)?;
    writeln!(out, "worked: (1/z) . v[1,1] = {acted}; expectation = {}", rat_to_string(&value)).unwrap();
    ensure(value.is_zero(), || {
        format!("worked additive invariance gave {value}")
    })?;

    let mut rng = seeded(seed);
    for i in 0..cases {
        let f = random_rational_panel(&mut rng, 3, 2);
        let x = Adele::diagonal(f.clone());
        if i % 2 == 0 {
            let v = FockVector::monomial(random_fock_monomial(&mut rng, 4, 2));
            let value = corr.ward_additive(&x, &v)?;
            writeln!(out, "case {i}: f = {f}; state = {v}; value = {}", rat_to_string(&value)).unwrap();
            ensure(value.is_zero(), || {
                format!("case {i}: additive invariance fails for {f} on {v}: {value}")
            })?;
        } else {
            let d = random_charge(&mut rng, 3);
            let m = random_fock_monomial(&mut rng, 4, 2);
            let w = ChargedFockVector::from_fock(d, &FockVector::monomial(m))
                .expect("charge has degree zero");
            let value = corr.ward_charged(&x, &w)?;
            writeln!(out, "case {i}: f = {f}; state = {w}; value = {}", rat_to_string(&value)).unwrap();
            ensure(value.is_zero(), || {
                format!("case {i}: charged additive invariance fails for {f} on {w}: {value}")
            })?;
        }
    }
    Ok(out)
}

/// Independent matching oracle: the permutation-sum form of the matching
/// count, sum over all orderings divided by k! 2^k.
fn matching_oracle(corr: &Correlator, gens: &[(Point, u32)]) -> Result<Rat> {
    let n = gens.len();
    if n % 2 == 1 {
        return Ok(Rat::zero());
    }
    let k = n / 2;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut total = Rat::zero();
    permute(&mut idx, 0, &mut |perm| -> Result<()> {
        let mut prod = Rat::one();
        for t in 0..k {
            let (pa, ma) = &gens[perm[2 * t]];
            let (pb, mb) = &gens[perm[2 * t + 1]];
            prod *= -corr.pair_coeff(pa, *ma, pb, *mb)?;
            if prod.is_zero() {
                break;
            }
        }
        total += prod;
        Ok(())
    })?;
    let mut norm = Rat::one();
    for t in 1..=k {
        norm *= rat(t as i64);
    }
    norm *= pow_rat(&rat(2), k as i64)?;
    Ok(total / norm)
}

fn permute(
    idx: &mut Vec<usize>,
    at: usize,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if at == idx.len() {
        return visit(idx);
    }
    for i in at..idx.len() {
        idx.swap(at, i);
        permute(idx, at + 1, visit)?;
        idx.swap(at, i);
    }
    Ok(())
}

/// Suite 9 — the two-point function and brute-force agreement of higher
/// correlators with the permutation-sum oracle up to degree 6.
pub fn suite_two_point(model: &dyn CurveModel, seed: u64) -> Result<String> {
    let corr = Correlator::new(model);
    let mut out = String::new();

    let p0 = Point::finite(rat(0));
    let p1 = Point::finite(rat(1));
    let two = FockVector::monomial(
        FockMonomial::new([(p0.clone(), 1), (p1.clone(), 1)]).expect("positive orders"),
    );
    let value = corr.corr_additive(&two)?;
    let c = corr.pair_coeff(&p0, 1, &p1, 1)?;
    writeln!(out, "worked: <v[0,1] v[1,1]> = {}; pair coefficient = {}",
        rat_to_string(&value), rat_to_string(&c)).unwrap();
    ensure(value.is_one(), || format!("two-point value is {value}"))?;
    ensure(value == -c.clone(), || {
        format!("two-point value {value} differs from -({c})")
    })?;

    let mut rng = seeded(seed);
    for i in 0..40 {
        let degree = [2usize, 4, 6][rng.gen_range(0..3)];
        let mut gens = Vec::new();
        for _ in 0..degree {
            gens.push((random_point(&mut rng), rng.gen_range(1..=3u32)));
        }
        let mono = FockMonomial::new(gens.clone()).expect("positive orders");
        let fast = corr.corr_additive(&FockVector::monomial(mono.clone()))?;
        let slow = matching_oracle(&corr, mono.gens())?;
        writeln!(out, "case {i}: degree {degree}; value = {}", rat_to_string(&fast)).unwrap();
        ensure(fast == slow, || {
            format!("case {i}: matching sum {fast} differs from oracle {slow} on {mono}")
        })?;
    }
    Ok(out)
}

/// Suite 10 — multiplicative invariance on charged states, the worked
/// instance, and the charge-constant recurrence.
pub fn suite_ward_multiplicative(
    model: &dyn CurveModel,
    seed: u64,
    cases: usize,
) -> Result<String> {
    let corr = Correlator::new(model);
    let mut out = String::new();

    let a = MultiplicativeFunction::new(
        Rat::one(),
        [(Point::finite(rat(0)), Point::finite(rat(1)))],
    )
    .expect("distinct points");
    let d = Divisor::from_pairs([(Point::finite(rat(1)), 1), (Point::finite(rat(0)), -1)]);
    let w = ChargedFockVector::from_fock(d, &FockVector::vacuum()).expect("degree zero");
    let (lhs, rhs) = corr.ward_multiplicative(&a, &w)?;
    writeln!(out, "worked: f[0,1] on e[-(0)+(1)]: lhs = {}, rhs = {}",
        rat_to_string(&lhs), rat_to_string(&rhs)).unwrap();
    ensure(lhs == rat(-1) && rhs == rat(-1), || {
        format!("worked multiplicative invariance gave ({lhs}, {rhs})")
    })?;

    let mut rng = seeded(seed);
    for i in 0..cases {
        let a = random_multiplicative(&mut rng, 2);
        let d = random_charge(&mut rng, 3);
        let m = random_fock_monomial(&mut rng, 2, 2);
        let w = ChargedFockVector::from_fock(d, &FockVector::monomial(m))
            .expect("charge has degree zero");
        let (lhs, rhs) = corr.ward_multiplicative(&a, &w)?;
        writeln!(out, "case {i}: a = {a}; state = {w}; lhs = {}, rhs = {}",
            rat_to_string(&lhs), rat_to_string(&rhs)).unwrap();
        ensure(lhs == rhs, || {
            format!("case {i}: multiplicative invariance fails for {a} on {w}: {lhs} vs {rhs}")
        })?;
    }

    // recurrence for the charge constants
    for i in 0..cases {
        let pts = panel();
        let pi = rng.gen_range(0..pts.len());
        let mut qi = rng.gen_range(0..pts.len());
        while qi == pi {
            qi = rng.gen_range(0..pts.len());
        }
        let (p, q) = (pts[pi].clone(), pts[qi].clone());
        let d = random_charge(&mut rng, 3);
        let h = corr.recurrence_factor(&p, &q, &d)?;
        let step = Divisor::from_pairs([(q.clone(), 1), (p.clone(), -1)]);
        let lhs = corr.charge_constant(&d.add(&step))?;
        let rhs = h.clone() * corr.charge_constant(&d)?;
        writeln!(out, "rec {i}: P = {p}, Q = {q}, D = {d}; h = {}", rat_to_string(&h)).unwrap();
        ensure(lhs == rhs, || {
            format!("rec {i}: recurrence fails for ({p},{q},{d}): {lhs} vs {rhs}")
        })?;
    }
    Ok(out)
}
