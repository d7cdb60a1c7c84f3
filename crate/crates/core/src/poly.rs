//! Sparse multivariate polynomials with exact rational coefficients in the
//! edge weights `λ_kl` and the inverse error variance `s`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// A parameter of the precision-matrix parameterization. The derived order
/// (all `Lambda` by `(k, l)`, then `S`) is the global variable order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    /// Weight of edge `k -> l`.
    Lambda(usize, usize),
    /// Inverse error variance `1/ω`.
    S,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Lambda(k, l) => write!(f, "l_{k}_{l}"),
            Variable::S => f.write_str("s"),
        }
    }
}

/// A power product of variables: sorted `(variable, exponent)` pairs with
/// positive exponents. Ordered graded-lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Variable, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Variable) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Variable, u32)>) -> Self {
        let mut m = Monomial::one();
        for (v, e) in powers {
            if e > 0 {
                m = &m * &Monomial(vec![(v, e)]);
            }
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Variable) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn powers(&self) -> &[(Variable, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// `self / other` if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut rest = other.0.iter().peekable();
        for &(v, e) in &self.0 {
            match rest.peek() {
                Some(&&(w, f)) if w == v => {
                    rest.next();
                    match e.cmp(&f) {
                        Ordering::Less => return None,
                        Ordering::Equal => {}
                        Ordering::Greater => out.push((v, e - f)),
                    }
                }
                Some(&&(w, _)) if w < v => return None,
                _ => out.push((v, e)),
            }
        }
        if rest.next().is_some() {
            return None;
        }
        Some(Monomial(out))
    }
}

impl Mul for &Monomial {
    type Output = Monomial;

    fn mul(self, rhs: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + rhs.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), rhs.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(v, e)), Some(&&(w, f))) => match v.cmp(&w) {
                    Ordering::Less => {
                        out.push((v, e));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((w, f));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((v, e + f));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&x)) => {
                    out.push(x);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            // Lex: the first variable (in variable order) whose exponents differ
            // decides, larger exponent is greater.
            let (mut a, mut b) = (self.0.iter(), other.0.iter());
            loop {
                match (a.next(), b.next()) {
                    (Some(&(v, e)), Some(&(w, f))) => {
                        if v != w {
                            return if v < w { Ordering::Greater } else { Ordering::Less };
                        }
                        if e != f {
                            return e.cmp(&f);
                        }
                    }
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (None, None) => return Ordering::Equal,
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact coefficient fields a polynomial can be evaluated in.
pub trait Scalar: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn vanishes(&self) -> bool;

    fn power(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            e >>= 1;
        }
        acc
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn vanishes(&self) -> bool {
        *self == 0.0
    }
}

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A polynomial over ℚ. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(rat(1))
    }

    pub fn constant(c: BigRational) -> Self {
        Polynomial::term(c, Monomial::one())
    }

    pub fn var(v: Variable) -> Self {
        Polynomial::term(rat(1), Monomial::var(v))
    }

    pub fn lambda(k: usize, l: usize) -> Self {
        Polynomial::var(Variable::Lambda(k, l))
    }

    pub fn s() -> Self {
        Polynomial::var(Variable::S)
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(Zero::zero)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(n, a)| (n * m, a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        (0..e).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    /// `∂self/∂v`.
    pub fn derivative(&self, v: Variable) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let lowered = m.checked_div(&Monomial::var(v)).expect("exponent is positive");
            out.add_term(lowered, c * rat(e as i64));
        }
        out
    }

    /// The exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder (or `divisor` is zero).
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lead_m, lead_c) = divisor.leading_term()?;
        let (lead_m, lead_c) = (lead_m.clone(), lead_c.clone());
        let mut rest = self.clone();
        let mut quotient = Polynomial::zero();
        while let Some((m, c)) = rest.leading_term() {
            let qm = m.checked_div(&lead_m)?;
            let qc = c / &lead_c;
            rest -= &divisor.mul_term(&qm, &qc);
            quotient.add_term(qm, qc);
        }
        Some(quotient)
    }

    /// Evaluate with `lookup` supplying each variable's value. Returns the first
    /// variable `lookup` cannot supply as the error.
    pub fn eval<T: Scalar>(&self, lookup: impl Fn(Variable) -> Option<T>) -> Result<T, Variable> {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut value = T::from_rational(c);
            for &(v, e) in m.powers() {
                value = value.times(&lookup(v).ok_or(v)?.power(e));
            }
            acc = acc.plus(&value);
        }
        Ok(acc)
    }

    /// Variables that occur with a nonzero coefficient, in variable order.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> =
            self.terms.keys().flat_map(|m| m.powers().iter().map(|&(v, _)| v)).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

impl Scalar for Polynomial {
    fn zero() -> Self {
        Polynomial::zero()
    }
    fn one() -> Self {
        Polynomial::one()
    }
    fn from_rational(q: &BigRational) -> Self {
        Polynomial::constant(q.clone())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn vanishes(&self) -> bool {
        Polynomial::is_zero(self)
    }
}

impl From<BigRational> for Polynomial {
    fn from(c: BigRational) -> Self {
        Polynomial::constant(c)
    }
}

impl From<i64> for Polynomial {
    fn from(c: i64) -> Self {
        Polynomial::constant(rat(c))
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, a) in &self.terms {
            for (n, b) in &rhs.terms {
                out.add_term(m * n, a * b);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Canonical rendering: terms from the largest monomial down, `s` first inside
/// a term, e.g. `2*s*l_1_2`, `l_1_2^2 + l_1_3^2 + 1`, `-l_2_3 + l_2_4*l_3_4`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let magnitude = c.abs();
            match (k, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            let s_exp = m.exponent(Variable::S);
            if s_exp > 0 {
                factors.push(power("s", s_exp));
            }
            for &(v, e) in m.powers() {
                if v != Variable::S {
                    factors.push(power(&v.to_string(), e));
                }
            }
            if factors.is_empty() {
                write_coefficient(f, &magnitude)?;
            } else {
                if !magnitude.is_one() {
                    write_coefficient(f, &magnitude)?;
                    f.write_str("*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

fn power(name: &str, e: u32) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse polynomial `{input}`: {reason}")]
pub struct PolyParseError {
    pub input: String,
    pub reason: String,
}

/// Parses the rendering produced by `Display` (and any reordering of it).
impl FromStr for Polynomial {
    type Err = PolyParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| PolyParseError { input: input.to_string(), reason: reason.to_string() };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(fail("empty"));
        }
        // Split into signed terms.
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !(current.is_empty() || current.ends_with('^')) {
                pieces.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && current.is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
        }
        pieces.push((negative, current));

        let mut out = Polynomial::zero();
        for (negative, body) in pieces {
            if body.is_empty() {
                return Err(fail("dangling sign"));
            }
            let mut coef = rat(1);
            let mut mono = Monomial::one();
            for factor in body.split('*') {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| fail("bad exponent"))?),
                    None => (factor, 1),
                };
                if base == "s" {
                    mono = &mono * &Monomial::from_powers([(Variable::S, exp)]);
                } else if let Some(rest) = base.strip_prefix("l_") {
                    let (k, l) = rest.split_once('_').ok_or_else(|| fail("bad lambda"))?;
                    let k = k.parse().map_err(|_| fail("bad lambda index"))?;
                    let l = l.parse().map_err(|_| fail("bad lambda index"))?;
                    mono = &mono * &Monomial::from_powers([(Variable::Lambda(k, l), exp)]);
                } else {
                    let value = match base.split_once('/') {
                        Some((n, d)) => {
                            let n: BigInt = n.parse().map_err(|_| fail("bad number"))?;
                            let d: BigInt = d.parse().map_err(|_| fail("bad number"))?;
                            if d.is_zero() {
                                return Err(fail("zero denominator"));
                            }
                            BigRational::new(n, d)
                        }
                        None => BigRational::from_integer(base.parse().map_err(|_| fail("bad factor"))?),
                    };
                    coef *= value.power(exp);
                }
            }
            if negative {
                coef = -coef;
            }
            out.add_term(mono, coef);
        }
        Ok(out)
    }
}
