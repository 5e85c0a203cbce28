//! Exact coefficient rings.
//!
//! * [`SPoly`] — Laurent polynomials in `s = Q^{1/2} = e^{u/2}`, exact.
//! * [`USeries`] — truncated Laurent series in `u`, with an absolute
//!   truncation order (`x = Σ_{j ≤ order} c_j u^j + O(u^{order+1})`).
//! * [`Scalar`] — Laurent polynomials in the equivariant parameter `t` whose
//!   coefficients are either exact or expanded ([`Coef`]).
//! * [`QSeries`] — `q`-generating functions over any [`Ring`], with `exp`/`log`.
//!
//! Nothing here is approximate: "truncated" always means "known exactly up to
//! a stated order".

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Order used by exact (untruncated) series. Arithmetic saturates to it.
pub const EXACT: i64 = i64::MAX / 4;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_big(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Always `"num/den"`, including integers.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"n/d"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Json(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn sat(x: i64) -> i64 {
    if x >= EXACT / 2 {
        EXACT
    } else {
        x
    }
}

fn add_ord(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        sat(a + b)
    }
}

/// Commutative ring operations shared by all coefficient types.
pub trait Ring: Clone + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }

    fn pow_u(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.times(self);
        }
        acc
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

macro_rules! forward_ops {
    ($t:ty) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                self.plus(o)
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                self.minus(o)
            }
        }
        impl Mul for &$t {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                self.times(o)
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.negate()
            }
        }
    };
}

// ---------------------------------------------------------------------------
// SPoly

/// Exact Laurent polynomial in `s`; keys are `s`-exponents.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SPoly {
    terms: BTreeMap<i64, Rational>,
}

impl SPoly {
    pub fn constant(c: Rational) -> SPoly {
        SPoly::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: Rational) -> SPoly {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(exp, c);
        }
        SPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(it: I) -> SPoly {
        let mut p = SPoly::default();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: i64, c: Rational) {
        if Zero::is_zero(&c) {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Zero::zero);
        *entry += c;
        if Zero::is_zero(entry) {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rational> {
        &self.terms
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Zero::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// `s ↦ s^{-1}`.
    pub fn invert_s(&self) -> SPoly {
        SPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Exact inverse, available only for monomials.
    pub fn inverse(&self) -> Result<SPoly> {
        match self.terms.iter().next() {
            Some((e, c)) if self.is_monomial() => Ok(SPoly::monomial(-e, c.recip())),
            _ => Err(Error::NotInvertible(format!(
                "{self} is not a monomial in s; expand in u first"
            ))),
        }
    }

    pub fn pow(&self, n: i64) -> Result<SPoly> {
        if n >= 0 {
            Ok(self.pow_u(n as u32))
        } else {
            Ok(self.inverse()?.pow_u((-n) as u32))
        }
    }

    /// Lowest power of `u` after `s = e^{u/2}`; `None` for zero.
    ///
    /// The j-th Taylor coefficient is `Σ c_m (m/2)^j / j!`, and a nonzero
    /// polynomial with n terms has some j < n where it is nonzero.
    pub fn u_valuation(&self) -> Option<i64> {
        if self.terms.is_empty() {
            return None;
        }
        for j in 0..self.terms.len() as u32 {
            let s: Rational = self
                .terms
                .iter()
                .map(|(m, c)| c * rat(*m).pow(j as i32))
                .fold(Zero::zero(), |a: Rational, b| a + b);
            if !Zero::is_zero(&s) {
                return Some(j as i64);
            }
        }
        unreachable!("Vandermonde argument bounds the valuation")
    }

    /// Expansion in `u` through `u^order` (absolute).
    pub fn to_u_series(&self, order: i64) -> USeries {
        let mut coeffs = BTreeMap::new();
        if order >= 0 {
            // (m/2)^j / j! accumulated incrementally per term.
            let mut powers: Vec<(Rational, Rational)> = self
                .terms
                .iter()
                .map(|(m, c)| (ratio(*m, 2), c.clone()))
                .collect();
            for j in 0..=order {
                let s: Rational = powers.iter().fold(Zero::zero(), |a: Rational, (_, w)| a + w);
                if !Zero::is_zero(&s) {
                    coeffs.insert(j, s);
                }
                for (half, w) in powers.iter_mut() {
                    *w = &*w * &*half / rat(j + 1);
                }
            }
        }
        USeries { coeffs, order }
    }
}

/// `s^k − s^{−k}`, the exact form of `2 sinh(ku/2)`.
pub fn sinh_factor(k: i64) -> SPoly {
    SPoly::from_terms([(k, rat(1)), (-k, rat(-1))])
}

impl Ring for SPoly {
    fn zero() -> Self {
        SPoly::default()
    }
    fn one() -> Self {
        SPoly::constant(rat(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = SPoly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
    fn negate(&self) -> Self {
        SPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
    fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return SPoly::default();
        }
        SPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * r)).collect(),
        }
    }
}

forward_ops!(SPoly);

fn write_coeff_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    c: &Rational,
    var: &str,
    e: i64,
) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {} ", if neg { "-" } else { "+" })?;
    }
    let unit = a.is_one();
    if e == 0 {
        return write!(f, "{a}");
    }
    if !unit {
        write!(f, "{a}*")?;
    }
    if e == 1 {
        write!(f, "{var}")
    } else {
        write!(f, "{var}^{e}")
    }
}

impl fmt::Display for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            write_coeff_term(f, i == 0, c, "s", *e)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SPoly({self})")
    }
}

// ---------------------------------------------------------------------------
// USeries

/// Laurent series in `u`, known exactly through `u^order`.
#[derive(Clone, PartialEq, Eq)]
pub struct USeries {
    coeffs: BTreeMap<i64, Rational>,
    order: i64,
}

impl USeries {
    /// Zero known through `u^order`.
    pub fn zero_to(order: i64) -> USeries {
        USeries { coeffs: BTreeMap::new(), order }
    }

    pub fn monomial(exp: i64, c: Rational, order: i64) -> USeries {
        USeries::from_coeffs([(exp, c)], order)
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i64, Rational)>>(it: I, order: i64) -> USeries {
        let mut coeffs = BTreeMap::new();
        for (e, c) in it {
            if e <= order && !Zero::is_zero(&c) {
                *coeffs.entry(e).or_insert_with(<Rational as Zero>::zero) += c;
            }
        }
        coeffs.retain(|_, c| !Zero::is_zero(c));
        USeries { coeffs, order }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order >= EXACT
    }

    /// Lowest exponent with a nonzero coefficient; for a truncated zero,
    /// the first unknown position.
    pub fn valuation(&self) -> i64 {
        match self.coeffs.keys().next() {
            Some(&e) => e,
            None => sat(self.order.saturating_add(1)),
        }
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Zero::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Rational> {
        &self.coeffs
    }

    /// Coarsen to a lower order (no-op if already at or below it).
    pub fn truncate(&self, order: i64) -> USeries {
        if order >= self.order {
            return self.clone();
        }
        USeries {
            coeffs: self.coeffs.range(..=order).map(|(e, c)| (*e, c.clone())).collect(),
            order,
        }
    }

    /// Equality on the common range of validity.
    pub fn agrees(&self, other: &USeries) -> bool {
        let o = self.order.min(other.order);
        self.truncate(o) == other.truncate(o)
    }

    /// Multiplicative inverse, computed to the precision the input allows.
    pub fn inverse(&self) -> Result<USeries> {
        self.inverse_to(EXACT)
    }

    /// Inverse, stopping at absolute order `target` (or earlier if the
    /// input precision runs out). An exact non-monomial input needs a
    /// finite target.
    pub fn inverse_to(&self, target: i64) -> Result<USeries> {
        let (&v, c0) = self
            .coeffs
            .iter()
            .next()
            .ok_or_else(|| Error::NotInvertible("zero leading coefficient".into()))?;
        if self.coeffs.len() == 1 && self.is_exact() && target >= EXACT {
            return Ok(USeries::monomial(-v, c0.recip(), EXACT));
        }
        let avail = if self.is_exact() { EXACT } else { self.order - v };
        let want = if target >= EXACT { EXACT } else { target + v };
        let rel = avail.min(want);
        if rel >= EXACT {
            return Err(Error::Truncation(
                "inverting an exact non-monomial series needs a target order".into(),
            ));
        }
        let inv0 = c0.recip();
        let mut b: Vec<Rational> = Vec::with_capacity(rel.max(0) as usize + 1);
        for j in 0..=rel {
            if j == 0 {
                b.push(inv0.clone());
                continue;
            }
            let mut acc = <Rational as Zero>::zero();
            for i in 1..=j {
                let ci = self.coeff(v + i);
                if !Zero::is_zero(&ci) {
                    acc += ci * &b[(j - i) as usize];
                }
            }
            b.push(-acc * &inv0);
        }
        Ok(USeries::from_coeffs(
            b.into_iter().enumerate().map(|(j, c)| (j as i64 - v, c)),
            rel - v,
        ))
    }

    pub fn pow(&self, n: i64) -> Result<USeries> {
        if n >= 0 {
            Ok(self.pow_u(n as u32))
        } else {
            Ok(self.inverse()?.pow_u((-n) as u32))
        }
    }

    /// `u ↦ −u`.
    pub fn reflect(&self) -> USeries {
        USeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e, if e % 2 == 0 { c.clone() } else { -c }))
                .collect(),
            order: self.order,
        }
    }

    /// `u ↦ k·u`.
    pub fn dilate(&self, k: i64) -> USeries {
        USeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e, c * rat(k).pow(*e as i32)))
                .collect(),
            order: self.order,
        }
    }

    pub fn to_json(&self) -> Value {
        let u_min = self.valuation();
        let top = if self.is_exact() {
            self.coeffs.keys().next_back().copied().unwrap_or(-1)
        } else {
            self.order
        };
        let coeffs: Vec<Value> = if self.coeffs.is_empty() && !self.is_exact() {
            Vec::new()
        } else {
            (u_min..=top)
                .map(|e| Value::String(rational_to_string(&self.coeff(e))))
                .collect()
        };
        let mut m = Map::new();
        m.insert("u_min".into(), json!(if self.coeffs.is_empty() && self.is_exact() { 0 } else { u_min }));
        m.insert("coeffs".into(), Value::Array(coeffs));
        if self.is_exact() {
            m.insert("exact".into(), Value::Bool(true));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<USeries> {
        let u_min = v["u_min"]
            .as_i64()
            .ok_or_else(|| Error::Json("USeries needs integer u_min".into()))?;
        let coeffs = v["coeffs"]
            .as_array()
            .ok_or_else(|| Error::Json("USeries needs coeffs array".into()))?
            .iter()
            .map(|c| {
                c.as_str()
                    .ok_or_else(|| Error::Json("coefficient must be a string".into()))
                    .and_then(parse_rational)
            })
            .collect::<Result<Vec<_>>>()?;
        let exact = v["exact"].as_bool().unwrap_or(false);
        let order = if exact { EXACT } else { u_min + coeffs.len() as i64 - 1 };
        Ok(USeries::from_coeffs(
            coeffs.into_iter().enumerate().map(|(j, c)| (u_min + j as i64, c)),
            order,
        ))
    }
}

impl Ring for USeries {
    fn zero() -> Self {
        USeries::zero_to(EXACT)
    }
    fn one() -> Self {
        USeries::monomial(0, rat(1), EXACT)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        USeries::from_coeffs(
            self.coeffs.iter().chain(o.coeffs.iter()).map(|(e, c)| (*e, c.clone())),
            order,
        )
    }
    fn times(&self, o: &Self) -> Self {
        let order = add_ord(self.order, o.valuation()).min(add_ord(o.order, self.valuation()));
        let mut coeffs: BTreeMap<i64, Rational> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in o.coeffs.range(..=(order.saturating_sub(*e1))) {
                *coeffs.entry(e1 + e2).or_insert_with(<Rational as Zero>::zero) += c1 * c2;
            }
        }
        coeffs.retain(|_, c| !Zero::is_zero(c));
        USeries { coeffs, order }
    }
    fn negate(&self) -> Self {
        USeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            order: self.order,
        }
    }
    fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return USeries::zero_to(self.order);
        }
        USeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * r)).collect(),
            order: self.order,
        }
    }
}

forward_ops!(USeries);

impl fmt::Display for USeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            write_coeff_term(f, i == 0, c, "u", *e)?;
        }
        if self.is_exact() {
            if self.coeffs.is_empty() {
                write!(f, "0")?;
            }
            Ok(())
        } else if self.coeffs.is_empty() {
            write!(f, "O(u^{})", self.order + 1)
        } else {
            write!(f, " + O(u^{})", self.order + 1)
        }
    }
}

impl fmt::Debug for USeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "USeries({self})")
    }
}

/// Inverse of an exact polynomial, expanded far enough that the result is
/// valid through `u^order`.
pub fn invert_to_order(p: &SPoly, order: i64) -> Result<USeries> {
    let v = p
        .u_valuation()
        .ok_or_else(|| Error::NotInvertible("zero".into()))?;
    p.to_u_series(order + 2 * v).inverse_to(order)
}

/// Series inversion; thin wrapper kept for symmetry with the exact side.
pub fn invert_u(x: &USeries) -> Result<USeries> {
    x.inverse()
}

// ---------------------------------------------------------------------------
// Coef / Scalar

/// Coefficient of a power of `t`: exact in `s`, or expanded in `u`.
#[derive(Clone, PartialEq, Eq)]
pub enum Coef {
    Exact(SPoly),
    Series(USeries),
}

impl Coef {
    pub fn is_exact(&self) -> bool {
        matches!(self, Coef::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&SPoly> {
        match self {
            Coef::Exact(p) => Some(p),
            Coef::Series(_) => None,
        }
    }

    /// `u`-valuation, independent of representation.
    pub fn valuation(&self) -> i64 {
        match self {
            Coef::Exact(p) => p.u_valuation().unwrap_or(EXACT),
            Coef::Series(x) => x.valuation(),
        }
    }

    /// Expansion through `u^order`; series are coarsened if needed, never refined.
    pub fn to_series(&self, order: i64) -> USeries {
        match self {
            Coef::Exact(p) => p.to_u_series(order),
            Coef::Series(x) => x.truncate(order),
        }
    }

    fn promote_pair(a: &Coef, b: &Coef, for_product: bool) -> (USeries, USeries) {
        match (a, b) {
            (Coef::Series(x), Coef::Series(y)) => (x.clone(), y.clone()),
            (Coef::Exact(p), Coef::Series(x)) => (Self::expand_against(p, x, for_product), x.clone()),
            (Coef::Series(x), Coef::Exact(p)) => (x.clone(), Self::expand_against(p, x, for_product)),
            (Coef::Exact(_), Coef::Exact(_)) => unreachable!(),
        }
    }

    // Expand p just far enough not to be the precision bottleneck.
    fn expand_against(p: &SPoly, x: &USeries, for_product: bool) -> USeries {
        if !for_product {
            return p.to_u_series(x.order());
        }
        let vp = p.u_valuation().unwrap_or(0);
        let o = if x.is_zero() { x.order() } else { x.order() - x.valuation() + vp };
        p.to_u_series(o)
    }

    pub fn inverse(&self, order: i64) -> Result<Coef> {
        match self {
            Coef::Exact(p) if p.is_monomial() => Ok(Coef::Exact(p.inverse()?)),
            Coef::Exact(p) => Ok(Coef::Series(invert_to_order(p, order)?)),
            Coef::Series(x) => Ok(Coef::Series(x.inverse()?)),
        }
    }

    pub fn agrees(&self, other: &Coef) -> bool {
        match (self, other) {
            (Coef::Exact(a), Coef::Exact(b)) => a == b,
            _ => {
                let o = match (self, other) {
                    (Coef::Series(x), Coef::Series(y)) => x.order().min(y.order()),
                    (Coef::Series(x), _) | (_, Coef::Series(x)) => x.order(),
                    _ => unreachable!(),
                };
                self.to_series(o) == other.to_series(o)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Coef::Exact(p) => spoly_to_json(p),
            Coef::Series(x) => x.to_json(),
        }
    }

    pub fn from_json(v: &Value) -> Result<Coef> {
        if v.get("s").is_some() {
            Ok(Coef::Exact(spoly_from_json(v)?))
        } else {
            Ok(Coef::Series(USeries::from_json(v)?))
        }
    }
}

impl Ring for Coef {
    fn zero() -> Self {
        Coef::Exact(SPoly::zero())
    }
    fn one() -> Self {
        Coef::Exact(SPoly::one())
    }
    fn is_zero(&self) -> bool {
        match self {
            Coef::Exact(p) => p.is_zero(),
            Coef::Series(x) => x.is_zero(),
        }
    }
    fn plus(&self, o: &Self) -> Self {
        if let (Coef::Exact(a), Coef::Exact(b)) = (self, o) {
            return Coef::Exact(a.plus(b));
        }
        let (x, y) = Coef::promote_pair(self, o, false);
        Coef::Series(x.plus(&y))
    }
    fn times(&self, o: &Self) -> Self {
        if let (Coef::Exact(a), Coef::Exact(b)) = (self, o) {
            return Coef::Exact(a.times(b));
        }
        let (x, y) = Coef::promote_pair(self, o, true);
        Coef::Series(x.times(&y))
    }
    fn negate(&self) -> Self {
        match self {
            Coef::Exact(p) => Coef::Exact(p.negate()),
            Coef::Series(x) => Coef::Series(x.negate()),
        }
    }
    fn scale(&self, r: &Rational) -> Self {
        match self {
            Coef::Exact(p) => Coef::Exact(p.scale(r)),
            Coef::Series(x) => Coef::Series(x.scale(r)),
        }
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Exact(p) => write!(f, "{p}"),
            Coef::Series(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Debug for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Laurent polynomial in `t` with [`Coef`] coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Scalar {
    terms: BTreeMap<i64, Coef>,
}

impl Scalar {
    pub fn term(t_exp: i64, c: Coef) -> Scalar {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(t_exp, c);
        }
        Scalar { terms }
    }

    pub fn rational(r: Rational) -> Scalar {
        Scalar::term(0, Coef::Exact(SPoly::constant(r)))
    }

    pub fn integer(n: i64) -> Scalar {
        Scalar::rational(rat(n))
    }

    /// `c · t^e`.
    pub fn t_monomial(e: i64, c: Rational) -> Scalar {
        Scalar::term(e, Coef::Exact(SPoly::constant(c)))
    }

    pub fn exact(t_exp: i64, p: SPoly) -> Scalar {
        Scalar::term(t_exp, Coef::Exact(p))
    }

    pub fn series(t_exp: i64, x: USeries) -> Scalar {
        Scalar::term(t_exp, Coef::Series(x))
    }

    pub fn terms(&self) -> &BTreeMap<i64, Coef> {
        &self.terms
    }

    pub fn t_exponents(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn coeff(&self, t_exp: i64) -> Coef {
        self.terms.get(&t_exp).cloned().unwrap_or_else(Coef::zero)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coef::is_exact)
    }

    /// The coefficient of `t^0`, provided nothing else is present.
    pub fn t_free(&self) -> Option<Coef> {
        match self.terms.len() {
            0 => Some(Coef::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// Inverse of a single `t`-monomial; non-monomial `s`-coefficients are
    /// expanded through `u^order`.
    pub fn inverse(&self, order: i64) -> Result<Scalar> {
        if self.terms.len() != 1 {
            return Err(Error::NotInvertible(format!(
                "{self} is not a monomial in t"
            )));
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Ok(Scalar::term(-e, c.inverse(order)?))
    }

    pub fn pow(&self, n: i64, order: i64) -> Result<Scalar> {
        if n >= 0 {
            Ok(self.pow_u(n as u32))
        } else {
            Ok(self.inverse(order)?.pow_u((-n) as u32))
        }
    }

    pub fn mul_t(&self, k: i64) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Semantic equality: exact parts exactly, expanded parts on their
    /// common range of validity.
    pub fn agrees(&self, other: &Scalar) -> bool {
        let keys: std::collections::BTreeSet<i64> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter()
            .all(|e| self.coeff(e).agrees(&other.coeff(e)))
    }

    /// Forces every coefficient into the expanded view.
    pub fn to_series(&self, order: i64) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, Coef::Series(c.to_series(order))))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let t: Map<String, Value> = self
            .terms
            .iter()
            .map(|(e, c)| (e.to_string(), c.to_json()))
            .collect();
        json!({ "t": t })
    }

    pub fn from_json(v: &Value) -> Result<Scalar> {
        let t = v["t"]
            .as_object()
            .ok_or_else(|| Error::Json("Scalar needs a \"t\" object".into()))?;
        let mut out = Scalar::default();
        for (k, c) in t {
            let e: i64 = k
                .parse()
                .map_err(|_| Error::Json(format!("bad t-exponent {k:?}")))?;
            out = out.plus(&Scalar::term(e, Coef::from_json(c)?));
        }
        Ok(out)
    }
}

impl Ring for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn one() -> Self {
        Scalar::integer(1)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let sum = match terms.get(e) {
                Some(a) => a.plus(c),
                None => c.clone(),
            };
            if sum.is_zero() {
                terms.remove(e);
            } else {
                terms.insert(*e, sum);
            }
        }
        Scalar { terms }
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = Scalar::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out = out.plus(&Scalar::term(e1 + e2, c1.times(c2)));
            }
        }
        out
    }
    fn negate(&self) -> Self {
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (*e, c.negate())).collect(),
        }
    }
    fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return Scalar::default();
        }
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (*e, c.scale(r))).collect(),
        }
    }
}

forward_ops!(Scalar);

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match *e {
                0 => write!(f, "({c})")?,
                1 => write!(f, "t*({c})")?,
                e => write!(f, "t^{e}*({c})")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

pub fn spoly_to_json(p: &SPoly) -> Value {
    let s: Map<String, Value> = p
        .terms
        .iter()
        .map(|(e, c)| (e.to_string(), Value::String(rational_to_string(c))))
        .collect();
    json!({ "s": s })
}

pub fn spoly_from_json(v: &Value) -> Result<SPoly> {
    let s = v["s"]
        .as_object()
        .ok_or_else(|| Error::Json("SPoly needs an \"s\" object".into()))?;
    let mut out = SPoly::default();
    for (k, c) in s {
        let e: i64 = k
            .parse()
            .map_err(|_| Error::Json(format!("bad s-exponent {k:?}")))?;
        let c = c
            .as_str()
            .ok_or_else(|| Error::Json("coefficient must be a string".into()))?;
        out.add_term(e, parse_rational(c)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// QSeries

/// `Σ_{n=0}^{dmax} c_n q^n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Ring> QSeries<C> {
    pub fn zero(dmax: usize) -> QSeries<C> {
        QSeries { coeffs: vec![C::zero(); dmax + 1] }
    }

    pub fn one(dmax: usize) -> QSeries<C> {
        let mut q = Self::zero(dmax);
        q.coeffs[0] = C::one();
        q
    }

    /// Builds from `(degree, coefficient)` pairs; degrees above `dmax` are dropped.
    pub fn from_terms<I: IntoIterator<Item = (usize, C)>>(dmax: usize, it: I) -> QSeries<C> {
        let mut q = Self::zero(dmax);
        for (n, c) in it {
            if n <= dmax {
                q.coeffs[n] = q.coeffs[n].plus(&c);
            }
        }
        q
    }

    pub fn dmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set(&mut self, n: usize, c: C) {
        if n <= self.dmax() {
            self.coeffs[n] = c;
        }
    }

    pub fn has_constant_term(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        QSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn plus(&self, o: &QSeries<C>) -> QSeries<C> {
        let n = self.dmax().min(o.dmax());
        QSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].plus(&o.coeffs[i])).collect(),
        }
    }

    pub fn minus(&self, o: &QSeries<C>) -> QSeries<C> {
        self.plus(&o.map(C::negate))
    }

    pub fn times(&self, o: &QSeries<C>) -> QSeries<C> {
        let n = self.dmax().min(o.dmax());
        let mut out = Self::zero(n);
        for i in 0..=n {
            for j in 0..=(n - i) {
                if self.coeffs[i].is_zero() || o.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].plus(&self.coeffs[i].times(&o.coeffs[j]));
            }
        }
        out
    }

    /// `q ↦ q^k`, keeping the same truncation.
    pub fn substitute_power(&self, k: usize) -> QSeries<C> {
        let mut out = Self::zero(self.dmax());
        for (n, c) in self.coeffs.iter().enumerate() {
            if n * k <= self.dmax() {
                out.coeffs[n * k] = c.clone();
            }
        }
        out
    }

    /// `exp(f)` for `f(0) = 0`, via `n g_n = Σ_{k=1}^n k f_k g_{n−k}`.
    pub fn exp_q(&self) -> Result<QSeries<C>> {
        if self.has_constant_term() {
            return Err(Error::Argument("exp_q needs zero constant term".into()));
        }
        let n = self.dmax();
        let mut g: Vec<C> = vec![C::one()];
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc.plus(&self.coeffs[k].times(&g[m - k]).scale(&rat(k as i64)));
            }
            g.push(acc.scale(&ratio(1, m as i64)));
        }
        Ok(QSeries { coeffs: g })
    }

    /// `log(g)` for `g(0) = 1`.
    pub fn log_q(&self) -> Result<QSeries<C>> {
        let c0 = &self.coeffs[0];
        if !c0.minus(&C::one()).is_zero() {
            return Err(Error::Argument("log_q needs constant term 1".into()));
        }
        let n = self.dmax();
        let mut f: Vec<C> = vec![C::zero()];
        for m in 1..=n {
            let mut acc = self.coeffs[m].clone();
            for k in 1..m {
                if f[k].is_zero() || self.coeffs[m - k].is_zero() {
                    continue;
                }
                acc = acc.minus(&f[k].times(&self.coeffs[m - k]).scale(&ratio(k as i64, m as i64)));
            }
            f.push(acc);
        }
        Ok(QSeries { coeffs: f })
    }
}

impl QSeries<Scalar> {
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| json!({ "d": n, "coeff": c.to_json() }))
            .collect();
        json!({ "dmax": self.dmax(), "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<QSeries<Scalar>> {
        let dmax = v["dmax"]
            .as_u64()
            .ok_or_else(|| Error::Json("QSeries needs dmax".into()))? as usize;
        let mut out = QSeries::zero(dmax);
        for t in v["terms"]
            .as_array()
            .ok_or_else(|| Error::Json("QSeries needs terms".into()))?
        {
            let n = t["d"]
                .as_u64()
                .ok_or_else(|| Error::Json("term needs d".into()))? as usize;
            if n > dmax {
                return Err(Error::Json(format!("term degree {n} above dmax {dmax}")));
            }
            out.coeffs[n] = Scalar::from_json(&t["coeff"])?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn useries(order: i64, cs: &[(i64, Rational)]) -> USeries {
        USeries::from_coeffs(cs.iter().cloned(), order)
    }

    #[test]
    fn sinh_expansions() {
        assert_eq!(sinh_factor(1).to_string(), "s - s^-1");
        assert_eq!(sinh_factor(3).to_string(), "s^3 - s^-3");
        let x = sinh_factor(1).to_u_series(5);
        assert_eq!(x, useries(5, &[(1, rat(1)), (3, ratio(1, 24)), (5, ratio(1, 1920))]));
        assert_eq!(SPoly::one().to_u_series(4), USeries::monomial(0, rat(1), 4));
        let prod = &sinh_factor(1) * &SPoly::from_terms([(1, rat(1)), (-1, rat(1))]);
        assert_eq!(prod, sinh_factor(2));
        let y = prod.to_u_series(5);
        assert_eq!(y, useries(5, &[(1, rat(2)), (3, ratio(8, 24)), (5, ratio(32, 1920))]));
        let h = &(&sinh_factor(3) * &sinh_factor(1)) * &sinh_factor(1);
        assert_eq!(h.u_valuation(), Some(3));
    }

    #[test]
    fn inversions() {
        let x = sinh_factor(1).to_u_series(8);
        let y = x.inverse().unwrap();
        assert_eq!(y.valuation(), -1);
        assert_eq!(y.coeff(-1), rat(1));
        assert_eq!(y.coeff(1), ratio(-1, 24));
        assert_eq!(y.coeff(3), ratio(7, 5760));
        assert_eq!(y.order(), 8 - 2);
        let one = (&x * &y).truncate(6);
        assert_eq!(one, USeries::monomial(0, rat(1), 6));
        assert_eq!(
            USeries::one().inverse().unwrap(),
            USeries::one()
        );
        let z = sinh_factor(2).to_u_series(6).inverse().unwrap();
        assert_eq!(z.coeff(-1), ratio(1, 2));
        assert!(USeries::zero_to(5).inverse().is_err());
        let w = invert_to_order(&sinh_factor(1), 9).unwrap();
        assert_eq!(w.order(), 9);
        assert!(w.agrees(&y));
        assert!(sinh_factor(1).inverse().is_err());
        assert_eq!(
            SPoly::monomial(3, rat(2)).inverse().unwrap(),
            SPoly::monomial(-3, ratio(1, 2))
        );
    }

    #[test]
    fn product_order_tracks_valuations() {
        // u^{-2}(1 + O(u^3)) · u^5(1 + O(u^3)): relative precision 3 survives.
        let a = useries(1, &[(-2, rat(1))]);
        let b = useries(8, &[(5, rat(1))]);
        let c = &a * &b;
        assert_eq!(c.order(), 6);
        assert_eq!(c.coeff(3), rat(1));
    }

    #[test]
    fn antisymmetry() {
        for k in 1..6 {
            assert_eq!(sinh_factor(k).invert_s(), -&sinh_factor(k));
        }
        let p = &(&sinh_factor(1) * &sinh_factor(2)) * &sinh_factor(5);
        assert_eq!(p.invert_s(), -&p);
    }

    #[test]
    fn qseries_exp_log() {
        let f: QSeries<USeries> = QSeries::from_terms(6, [(1, USeries::monomial(-1, rat(1), 10))]);
        let g = f.exp_q().unwrap();
        let back = g.log_q().unwrap();
        for n in 0..=6 {
            assert!(back.coeff(n).agrees(f.coeff(n)));
        }
        let z: QSeries<Rational> = QSeries::zero(5);
        assert_eq!(z.exp_q().unwrap(), QSeries::one(5));
        let e = QSeries::from_terms(6, [(1, rat(1))]).exp_q().unwrap();
        for n in 0..=6 {
            let fact: i64 = (1..=n as i64).product();
            assert_eq!(e.coeff(n), &ratio(1, fact));
        }
        assert!(QSeries::<Rational>::one(3).exp_q().is_err());
        assert!(QSeries::<Rational>::zero(3).log_q().is_err());
    }

    #[test]
    fn scalar_mixing_and_inverse() {
        let eta_inv = Scalar::exact(-1, sinh_factor(1));
        let eta = eta_inv.inverse(10).unwrap();
        assert!(!eta.is_exact());
        let one = &eta * &eta_inv;
        assert!(one.agrees(&Scalar::one()));
        let lam = Scalar::t_monomial(2, rat(9));
        assert_eq!(lam.inverse(0).unwrap(), Scalar::t_monomial(-2, ratio(1, 9)));
        let mixed = &Scalar::exact(0, sinh_factor(1)) + &Scalar::t_monomial(1, rat(1));
        assert!(mixed.inverse(5).is_err());
    }

    #[test]
    fn json_roundtrips() {
        let s = &Scalar::exact(3, sinh_factor(2)) + &Scalar::series(-1, sinh_factor(1).to_u_series(7).inverse().unwrap());
        let back = Scalar::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let z = Scalar::series(0, USeries::zero_to(4));
        assert_eq!(Scalar::from_json(&z.to_json()).unwrap(), z);
        let q = QSeries::from_terms(4, [(2, s.clone()), (4, Scalar::integer(3))]);
        assert_eq!(QSeries::from_json(&q.to_json()).unwrap(), q);
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(rational_to_string(&rat(5)), "5/1");
    }
}
