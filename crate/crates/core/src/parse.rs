//! Text grammar for the command-line surface: rational functions in
//! factored form over the variable `z`, points (rationals, decimals, or
//! `inf`), divisors, Fock and charged states built from `v[P,n]` and
//! `e[DIVISOR]` words, and factored multiplicative functions built from
//! `f[P,Q]` words. All parsers report positioned syntax errors, and
//! parsing a canonical printout returns the original value.

use num::{BigInt, One, Zero};

use crate::error::{CoreError, Result};
use crate::fock::{ChargedFockVector, FockMonomial, FockVector};
use crate::point::{Divisor, Point};
use crate::rational::RationalFunction;
use crate::scalar::Rat;
use crate::symbols::MultiplicativeFunction;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Caret,
    Star,
    Slash,
    Plus,
    Minus,
    Comma,
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    pos: usize,
}

fn err(pos: usize, msg: impl Into<String>) -> CoreError {
    CoreError::Parse { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Lexeme>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let pos = i;
        let tok = match c {
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '[' => {
                i += 1;
                Tok::LBracket
            }
            ']' => {
                i += 1;
                Tok::RBracket
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let mut value: Rat = Rat::from_integer(
                    text[start..i]
                        .parse::<BigInt>()
                        .map_err(|e| err(start, format!("bad integer: {e}")))?,
                );
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fs = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    if fs == i {
                        return Err(err(i, "expected digits after decimal point"));
                    }
                    let frac = text[fs..i]
                        .parse::<BigInt>()
                        .map_err(|e| err(fs, format!("bad decimal: {e}")))?;
                    let den = BigInt::from(10u32).pow((i - fs) as u32);
                    value += Rat::new(frac, den);
                }
                Tok::Num(value)
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => return Err(err(i, format!("unexpected character '{c}'"))),
        };
        out.push(Lexeme { tok, pos });
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Lexeme>,
    at: usize,
    end: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Cursor> {
        let toks = lex(text)?;
        let end = text.len();
        Ok(Cursor { toks, at: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|l| &l.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|l| l.pos).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|l| l.tok.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.at += 1;
                Ok(())
            }
            _ => Err(err(self.pos(), format!("expected {what}"))),
        }
    }

    fn take_if(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn done(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn expect_done(&self) -> Result<()> {
        if self.done() {
            Ok(())
        } else {
            Err(err(self.pos(), "unexpected trailing input"))
        }
    }

    /// A number, optionally written as a fraction `a/b`. The slash only
    /// binds as a fraction bar when a number follows, so `1/z` stays a
    /// division of factors.
    fn number(&mut self) -> Result<Rat> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Num(n)) => {
                let fraction = self.peek() == Some(&Tok::Slash)
                    && matches!(
                        self.toks.get(self.at + 1).map(|l| &l.tok),
                        Some(Tok::Num(_))
                    );
                if fraction {
                    self.next();
                    let dpos = self.pos();
                    match self.next() {
                        Some(Tok::Num(d)) => {
                            if d.is_zero() {
                                return Err(err(dpos, "zero denominator"));
                            }
                            Ok(n / d)
                        }
                        _ => unreachable!("lookahead guaranteed a number"),
                    }
                } else {
                    Ok(n)
                }
            }
            _ => Err(err(pos, "expected a number")),
        }
    }

    /// A number with optional leading sign.
    fn signed_number(&mut self) -> Result<Rat> {
        let neg = self.take_if(&Tok::Minus);
        if !neg {
            self.take_if(&Tok::Plus);
        }
        let n = self.number()?;
        Ok(if neg { -n } else { n })
    }

    /// An integer exponent with optional leading sign.
    fn signed_integer(&mut self) -> Result<i64> {
        let pos = self.pos();
        let n = self.signed_number()?;
        if !n.is_integer() {
            return Err(err(pos, "expected an integer"));
        }
        i64::try_from(n.to_integer()).map_err(|_| err(pos, "integer out of range"))
    }

    /// A point: a rational number, a decimal, or `inf`.
    fn point(&mut self) -> Result<Point> {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == "inf" {
                self.next();
                return Ok(Point::Infinity);
            }
        }
        Ok(Point::finite(self.signed_number()?))
    }

    /// A divisor in the form `2(1)-(0)+(inf)`, or `0` for the zero divisor.
    fn divisor(&mut self) -> Result<Divisor> {
        if let Some(Tok::Num(n)) = self.peek() {
            if n.is_zero() {
                // the zero divisor, as printed
                let save = self.at;
                self.next();
                if self.peek() != Some(&Tok::LParen) {
                    return Ok(Divisor::zero());
                }
                self.at = save;
            }
        }
        let mut d = Divisor::zero();
        let mut first = true;
        loop {
            let neg = if self.take_if(&Tok::Minus) {
                true
            } else if self.take_if(&Tok::Plus) {
                false
            } else if first {
                false
            } else {
                break;
            };
            let mult = if let Some(Tok::Num(_)) = self.peek() {
                let pos = self.pos();
                let n = self.number()?;
                if !n.is_integer() {
                    return Err(err(pos, "multiplicity must be an integer"));
                }
                i64::try_from(n.to_integer())
                    .map_err(|_| err(pos, "multiplicity out of range"))?
            } else {
                1
            };
            self.eat(&Tok::LParen, "'(' before a point")?;
            let p = self.point()?;
            self.eat(&Tok::RParen, "')' after a point")?;
            d.add_point(p, if neg { -mult } else { mult });
            first = false;
            if !matches!(self.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
                break;
            }
        }
        Ok(d)
    }

    /// A linear polynomial a*z + b inside parentheses; returns (a, b).
    fn linear(&mut self) -> Result<(Rat, Rat)> {
        let mut a = Rat::zero();
        let mut b = Rat::zero();
        let mut first = true;
        loop {
            let neg = if self.take_if(&Tok::Minus) {
                true
            } else if self.take_if(&Tok::Plus) {
                false
            } else if first {
                false
            } else {
                break;
            };
            first = false;
            let sign = if neg { -Rat::one() } else { Rat::one() };
            match self.peek() {
                Some(Tok::Ident(s)) if s == "z" => {
                    self.next();
                    a += sign;
                }
                Some(Tok::Num(_)) => {
                    let n = self.number()?;
                    let star = self.take_if(&Tok::Star);
                    match self.peek() {
                        Some(Tok::Ident(s)) if s == "z" => {
                            self.next();
                            a += sign * n;
                        }
                        _ if star => {
                            return Err(err(self.pos(), "expected 'z' after '*'"))
                        }
                        _ => b += sign * n,
                    }
                }
                _ => return Err(err(self.pos(), "expected 'z' or a number")),
            }
            if !matches!(self.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
                break;
            }
        }
        Ok((a, b))
    }

    /// One multiplicative factor of a rational function, already signed.
    fn rational_factor(&mut self) -> Result<RationalFunction> {
        let base = match self.peek() {
            Some(Tok::Ident(s)) if s == "z" => {
                self.next();
                RationalFunction::from_factors(Rat::one(), [(Rat::zero(), 1)])
            }
            Some(Tok::Num(_)) => RationalFunction::constant(self.number()?),
            Some(Tok::LParen) => {
                self.next();
                let (a, b) = self.linear()?;
                self.eat(&Tok::RParen, "')'")?;
                if a.is_zero() {
                    RationalFunction::constant(b)
                } else {
                    // a*z + b = a * (z - (-b/a))
                    RationalFunction::from_factors(a.clone(), [(-(b / a), 1)])
                }
            }
            _ => return Err(err(self.pos(), "expected a factor")),
        };
        if self.take_if(&Tok::Caret) {
            base.pow(self.signed_integer()?)
        } else {
            Ok(base)
        }
    }

    fn rational(&mut self) -> Result<RationalFunction> {
        let neg = self.take_if(&Tok::Minus);
        let mut f = self.rational_factor()?;
        loop {
            if self.take_if(&Tok::Star) {
                f = f.mul(&self.rational_factor()?);
            } else if self.take_if(&Tok::Slash) {
                f = f.div(&self.rational_factor()?)?;
            } else {
                break;
            }
        }
        if neg {
            f = f.neg();
        }
        Ok(f)
    }

    /// A `v[P,n]` generator.
    fn v_generator(&mut self) -> Result<(Point, u32)> {
        self.eat(&Tok::LBracket, "'['")?;
        let p = self.point()?;
        self.eat(&Tok::Comma, "','")?;
        let pos = self.pos();
        let n = self.signed_integer()?;
        if n < 1 {
            return Err(err(pos, "generator order must be >= 1"));
        }
        let n = u32::try_from(n).map_err(|_| err(pos, "generator order out of range"))?;
        self.eat(&Tok::RBracket, "']'")?;
        Ok((p, n))
    }

    /// One state term: optional coefficient, then `v[..]`/`e[..]` words.
    fn state_term(&mut self) -> Result<(Divisor, FockMonomial, Rat)> {
        let mut coeff = Rat::one();
        let mut gens: Vec<(Point, u32)> = Vec::new();
        let mut charge = Divisor::zero();
        if let Some(Tok::Num(_)) = self.peek() {
            coeff = self.number()?;
            if !self.take_if(&Tok::Star) {
                return Ok((charge, FockMonomial::vacuum(), coeff));
            }
        }
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(s)) if s == "v" => {
                    self.next();
                    gens.push(self.v_generator()?);
                }
                Some(Tok::Ident(s)) if s == "e" => {
                    self.next();
                    self.eat(&Tok::LBracket, "'['")?;
                    charge = charge.add(&self.divisor()?);
                    self.eat(&Tok::RBracket, "']'")?;
                }
                _ => return Err(err(self.pos(), "expected 'v[..]' or 'e[..]'")),
            }
            if !self.take_if(&Tok::Star) {
                break;
            }
        }
        Ok((charge, FockMonomial::new(gens)?, coeff))
    }
}

/// A parsed state: uncharged vectors stay plain Fock vectors so the caller
/// can pick the matching action and functional.
#[derive(Debug, Clone, PartialEq)]
pub enum StateExpr {
    Fock(FockVector),
    Charged(ChargedFockVector),
}

impl StateExpr {
    /// View any state as charged, placing plain vectors in the zero sector.
    pub fn into_charged(self) -> ChargedFockVector {
        match self {
            StateExpr::Charged(w) => w,
            StateExpr::Fock(v) => ChargedFockVector::from_fock(Divisor::zero(), &v)
                .expect("zero divisor has degree zero"),
        }
    }
}

/// Parse a rational function in factored form, e.g. `3*(z-1)^2*(z+3)^-1`.
pub fn parse_rational(text: &str) -> Result<RationalFunction> {
    let mut c = Cursor::new(text)?;
    let f = c.rational()?;
    c.expect_done()?;
    Ok(f)
}

/// Parse a point: a rational number, a decimal, or `inf`.
pub fn parse_point(text: &str) -> Result<Point> {
    let mut c = Cursor::new(text)?;
    let p = c.point()?;
    c.expect_done()?;
    Ok(p)
}

/// Parse a divisor, e.g. `2(1)-(0)+(inf)` or `0`.
pub fn parse_divisor(text: &str) -> Result<Divisor> {
    let mut c = Cursor::new(text)?;
    let d = c.divisor()?;
    c.expect_done()?;
    Ok(d)
}

/// Parse a state: sums of terms like `v[0,1]*v[1,1]`, `e[(1)-(0)]*v[2,1]`,
/// or bare rational constants (multiples of the vacuum).
pub fn parse_state(text: &str) -> Result<StateExpr> {
    let mut c = Cursor::new(text)?;
    let mut terms: Vec<(Divisor, FockMonomial, Rat)> = Vec::new();
    let mut any_charge = false;
    let mut first = true;
    loop {
        let neg = if c.take_if(&Tok::Minus) {
            true
        } else if c.take_if(&Tok::Plus) {
            false
        } else if first {
            false
        } else {
            break;
        };
        first = false;
        let (d, m, mut coeff) = c.state_term()?;
        if neg {
            coeff = -coeff;
        }
        if !d.is_zero() {
            any_charge = true;
        }
        terms.push((d, m, coeff));
        if !matches!(c.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
            break;
        }
    }
    c.expect_done()?;
    if any_charge {
        let mut w = ChargedFockVector::zero();
        for (d, m, coeff) in terms {
            w.add_term(d, m, coeff)?;
        }
        Ok(StateExpr::Charged(w))
    } else {
        let mut v = FockVector::zero();
        for (_, m, coeff) in terms {
            v.add_term(m, coeff);
        }
        Ok(StateExpr::Fock(v))
    }
}

/// Parse a factored multiplicative function: an optional rational constant
/// times `f[P,Q]` words with optional integer powers, e.g. `3*f[0,1]^-1`.
pub fn parse_multiplicative(text: &str) -> Result<MultiplicativeFunction> {
    let mut c = Cursor::new(text)?;
    let neg = c.take_if(&Tok::Minus);
    let mut constant = if neg { -Rat::one() } else { Rat::one() };
    let mut pairs: Vec<(Point, Point)> = Vec::new();
    let mut first = true;
    loop {
        match c.peek().cloned() {
            Some(Tok::Num(_)) => {
                constant *= c.number()?;
            }
            Some(Tok::Ident(s)) if s == "f" => {
                c.next();
                c.eat(&Tok::LBracket, "'['")?;
                let p = c.point()?;
                c.eat(&Tok::Comma, "','")?;
                let q = c.point()?;
                c.eat(&Tok::RBracket, "']'")?;
                let mut power: i64 = 1;
                if c.take_if(&Tok::Caret) {
                    power = c.signed_integer()?;
                }
                let (p, q, count) = if power < 0 {
                    (q, p, (-power) as usize)
                } else {
                    (p, q, power as usize)
                };
                for _ in 0..count {
                    pairs.push((p.clone(), q.clone()));
                }
            }
            _ if first => return Err(err(c.pos(), "expected a constant or 'f[..]'")),
            _ => return Err(err(c.pos(), "expected a factor after '*'")),
        }
        first = false;
        if !c.take_if(&Tok::Star) {
            break;
        }
    }
    c.expect_done()?;
    MultiplicativeFunction::new(constant, pairs)
}
