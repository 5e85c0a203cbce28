//! The degree-d Klein TQFT: the Frobenius algebra `H_d` with its involution
//! Ω and crosscap element U, and the evaluation of closed, relative and
//! doublet invariants.
//!
//! Everything is diagonal in the idempotent basis `v_ρ`; the standard basis
//! `e_α` (conjugacy classes) is reached through dense transport matrices.
//!
//! Conventions: `λ_ρ = t^{2d}(d!/dim ρ)²`, `η_ρ^{-1} = t^{-d} s^{-c_ρ} (dim ρ/d!) ∏_□ (s^h − s^{-h})`,
//! `η̄_ρ` the same with `s^{c_ρ}`, and `U_ρ = (−1)^{(d−r)/2} t^d d!/dim ρ` on
//! self-conjugate ρ.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::characters::CharacterTable;
use crate::combinatorics::{factorial, Partition, DEFAULT_MAX_DEGREE};
use crate::error::{Error, Result};
use crate::powersum::level0_cap_coefficients;
use crate::ring::{invert_to_order, rat, rat_big, sinh_factor, Rational, Ring, SPoly, Scalar};

/// Default absolute `u`-truncation for expanded quantities.
pub const DEFAULT_ORDER: i64 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Standard,
    Idempotent,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Standard => "standard",
            Basis::Idempotent => "idempotent",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Basis> {
        match s {
            "standard" | "e" => Ok(Basis::Standard),
            "idempotent" | "v" => Ok(Basis::Idempotent),
            _ => Err(Error::Argument(format!("unknown basis {s:?}"))),
        }
    }
}

/// Elementary cobordisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Cap,
    Cup,
    /// One circle splitting into two (the coproduct).
    Pants,
    /// Two circles merging into one (the product).
    Copants,
    Tube,
    Twist,
    Omega,
    Xcap,
    G,
    K,
    A,
    Abar,
}

impl Generator {
    pub const ALL: [Generator; 12] = [
        Generator::Cap,
        Generator::Cup,
        Generator::Pants,
        Generator::Copants,
        Generator::Tube,
        Generator::Twist,
        Generator::Omega,
        Generator::Xcap,
        Generator::G,
        Generator::K,
        Generator::A,
        Generator::Abar,
    ];

    /// `(inputs, outputs)`.
    pub fn arity(self) -> (usize, usize) {
        use Generator::*;
        match self {
            Cap | Xcap => (0, 1),
            Cup => (1, 0),
            Pants => (1, 2),
            Copants => (2, 1),
            Twist => (2, 2),
            Tube | Omega | G | K | A | Abar => (1, 1),
        }
    }

    pub fn name(self) -> &'static str {
        use Generator::*;
        match self {
            Cap => "cap",
            Cup => "cup",
            Pants => "pants",
            Copants => "copants",
            Tube => "tube",
            Twist => "twist",
            Omega => "omega",
            Xcap => "xcap",
            G => "G",
            K => "K",
            A => "A",
            Abar => "Abar",
        }
    }

    pub fn accepts_level(self) -> bool {
        matches!(self, Generator::Cap | Generator::Tube)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Generator> {
        Generator::ALL
            .iter()
            .copied()
            .find(|g| g.name() == s || (s == "Omega" && *g == Generator::Omega) || (s == "Xcap" && *g == Generator::Xcap))
            .ok_or_else(|| Error::Argument(format!("unknown generator {s:?}")))
    }
}

// ---------------------------------------------------------------------------

/// Element of `H_d`.
#[derive(Clone, PartialEq, Eq)]
pub struct TqftVector {
    d: usize,
    basis: Basis,
    coords: BTreeMap<Partition, Scalar>,
}

impl TqftVector {
    pub fn zero(d: usize, basis: Basis) -> TqftVector {
        TqftVector { d, basis, coords: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coords(&self) -> &BTreeMap<Partition, Scalar> {
        &self.coords
    }

    pub fn coeff(&self, p: &Partition) -> Scalar {
        self.coords.get(p).cloned().unwrap_or_default()
    }

    pub fn add_coeff(&mut self, p: &Partition, c: &Scalar) {
        let next = self.coeff(p).plus(c);
        if next.is_zero() {
            self.coords.remove(p);
        } else {
            self.coords.insert(p.clone(), next);
        }
    }

    pub fn plus(&self, o: &TqftVector) -> TqftVector {
        assert_eq!((self.d, self.basis), (o.d, o.basis), "incompatible vectors");
        let mut out = self.clone();
        for (p, c) in &o.coords {
            out.add_coeff(p, c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> TqftVector {
        let mut out = TqftVector::zero(self.d, self.basis);
        for (p, x) in &self.coords {
            out.add_coeff(p, &x.times(c));
        }
        out
    }

    /// Same basis and coordinates agreeing (exactly, or on the common
    /// range of validity for expanded coefficients).
    pub fn agrees(&self, o: &TqftVector) -> bool {
        self.d == o.d
            && self.basis == o.basis
            && self
                .coords
                .keys()
                .chain(o.coords.keys())
                .all(|p| self.coeff(p).agrees(&o.coeff(p)))
    }
}

impl fmt::Debug for TqftVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.basis {
            Basis::Standard => "e",
            Basis::Idempotent => "v",
        };
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]·{name}{p}")?;
        }
        Ok(())
    }
}

/// Linear map `H^{⊗n} → H^{⊗m}`; `entries[(ins, outs)]` is the coefficient
/// of the output basis tuple `outs` in the image of the input tuple `ins`.
/// Tuples are indices into the canonical partition list.
#[derive(Clone, PartialEq, Eq)]
pub struct TqftOperator {
    d: usize,
    n_in: usize,
    n_out: usize,
    basis: Basis,
    entries: BTreeMap<(Vec<usize>, Vec<usize>), Scalar>,
}

type Entries = BTreeMap<(Vec<usize>, Vec<usize>), Scalar>;

fn add_entry(entries: &mut Entries, key: (Vec<usize>, Vec<usize>), c: Scalar) {
    if c.is_zero() {
        return;
    }
    let next = match entries.get(&key) {
        Some(x) => x.plus(&c),
        None => c,
    };
    if next.is_zero() {
        entries.remove(&key);
    } else {
        entries.insert(key, next);
    }
}

fn tuples(p: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..p).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

impl TqftOperator {
    pub fn new(d: usize, n_in: usize, n_out: usize, basis: Basis) -> TqftOperator {
        TqftOperator { d, n_in, n_out, basis, entries: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.n_in, self.n_out)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn insert(&mut self, ins: Vec<usize>, outs: Vec<usize>, c: Scalar) {
        assert_eq!((ins.len(), outs.len()), (self.n_in, self.n_out));
        add_entry(&mut self.entries, (ins, outs), c);
    }

    pub fn entry(&self, ins: &[usize], outs: &[usize]) -> Scalar {
        self.entries
            .get(&(ins.to_vec(), outs.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Value of a `0 → 0` operator.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.arity() != (0, 0) {
            return None;
        }
        Some(self.entry(&[], &[]))
    }

    pub fn from_scalar(d: usize, basis: Basis, c: Scalar) -> TqftOperator {
        let mut op = TqftOperator::new(d, 0, 0, basis);
        op.insert(vec![], vec![], c);
        op
    }

    /// `self ∘ inner` (inner applied first).
    pub fn compose(&self, inner: &TqftOperator) -> Result<TqftOperator> {
        if self.d != inner.d || self.basis != inner.basis {
            return Err(Error::Argument("composing operators of different degree or basis".into()));
        }
        self.compose_raw(inner)
    }

    fn compose_raw(&self, inner: &TqftOperator) -> Result<TqftOperator> {
        if inner.n_out != self.n_in {
            return Err(Error::Argument(format!(
                "cannot compose {}→{} after {}→{}",
                self.n_in, self.n_out, inner.n_in, inner.n_out
            )));
        }
        let mut by_input: BTreeMap<&Vec<usize>, Vec<(&Vec<usize>, &Scalar)>> = BTreeMap::new();
        for ((i, o), c) in &self.entries {
            by_input.entry(i).or_default().push((o, c));
        }
        let mut out = TqftOperator::new(self.d, inner.n_in, self.n_out, self.basis);
        for ((i, j), c1) in &inner.entries {
            if let Some(list) = by_input.get(j) {
                for (k, c2) in list {
                    add_entry(&mut out.entries, (i.clone(), (*k).clone()), c1.times(c2));
                }
            }
        }
        Ok(out)
    }

    /// Blockwise tensor product; `self` acts on the leading factors.
    pub fn tensor(&self, other: &TqftOperator) -> Result<TqftOperator> {
        if self.d != other.d || self.basis != other.basis {
            return Err(Error::Argument("tensoring operators of different degree or basis".into()));
        }
        let mut out = TqftOperator::new(self.d, self.n_in + other.n_in, self.n_out + other.n_out, self.basis);
        for ((i1, o1), c1) in &self.entries {
            for ((i2, o2), c2) in &other.entries {
                let ins = i1.iter().chain(i2).copied().collect();
                let outs = o1.iter().chain(o2).copied().collect();
                add_entry(&mut out.entries, (ins, outs), c1.times(c2));
            }
        }
        Ok(out)
    }

    pub fn agrees(&self, o: &TqftOperator) -> bool {
        self.d == o.d
            && self.basis == o.basis
            && self.arity() == o.arity()
            && self
                .entries
                .keys()
                .chain(o.entries.keys())
                .all(|k| {
                    let a = self.entries.get(k).cloned().unwrap_or_default();
                    let b = o.entries.get(k).cloned().unwrap_or_default();
                    a.agrees(&b)
                })
    }
}

impl fmt::Debug for TqftOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TqftOperator(d={}, {}→{}, {}) {{", self.d, self.n_in, self.n_out, self.basis)?;
        for ((i, o), c) in &self.entries {
            write!(f, " {i:?}→{o:?}: {c};")?;
        }
        write!(f, " }}")
    }
}

// ---------------------------------------------------------------------------

/// How a closed surface is cut along a pair of conjugate circles.
///
/// Genus always means the genus of the symmetric double; a real piece with
/// one boundary pair of genus `g'` closes up to `RGW(g'|·)`, a doublet piece
/// of genus `h` is a pair of conjugate genus-`h` surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// Two real pieces: `g = g1 + g2 + 1`, `k = k1 + k2`.
    Separating { g1: u32, k1: i64, g2: u32, k2: i64 },
    /// Real piece plus doublet piece at levels `(a, b)`: `g = g1 + 2h`, `k = k1 + a + b`.
    SeparatingDoublet { g1: u32, k1: i64, h: u32, a: i64, b: i64 },
    /// Non-separating, leaving a real surface of genus `g − 2` with two boundary pairs.
    NonSeparating,
    /// Non-separating with the two new boundaries glued through Ω.
    NonSeparatingTwisted,
    /// Non-separating, leaving a doublet of genus `h` (so `g = 2h + 1`) glued through Ω.
    NonSeparatingDoublet { h: u32, a: i64, b: i64 },
}

#[derive(Clone, Debug)]
pub struct SplitReport {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub pass: bool,
    /// First offending boundary label, if the two sides differ termwise.
    pub detail: String,
}

/// Degree-d context: character table plus all structure scalars.
#[derive(Clone)]
pub struct Context {
    d: usize,
    order: i64,
    flip: bool,
    table: Arc<CharacterTable>,
    fact: BigInt,
    conj: Vec<usize>,
    lambda: Vec<Scalar>,
    eta_inv: Vec<Scalar>,
    etabar_inv: Vec<Scalar>,
    // Expanded (η, η̄), built on first use.
    expanded: OnceLock<(Vec<Scalar>, Vec<Scalar>)>,
    crosscap: Vec<Scalar>,
    // e_α = Σ_ρ to_v[α][ρ] v_ρ ;  v_ρ = Σ_α to_e[ρ][α] e_α
    to_v: Vec<Vec<Scalar>>,
    to_e: Vec<Vec<Scalar>>,
}

/// `(−1)^{(d−r)/2}` for self-conjugate ρ.
pub fn crosscap_sign(rho: &Partition) -> i64 {
    if ((rho.degree() - rho.rank()) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `∏_□ (s^{h(□)} − s^{−h(□)})`.
pub fn hook_sinh_product(rho: &Partition) -> SPoly {
    rho.hooks()
        .into_iter()
        .fold(SPoly::one(), |acc, h| acc.times(&sinh_factor(h as i64)))
}

impl Context {
    pub fn new(d: usize) -> Result<Context> {
        Context::with_order(d, DEFAULT_ORDER)
    }

    pub fn with_order(d: usize, order: i64) -> Result<Context> {
        let table = CharacterTable::build(d, DEFAULT_MAX_DEGREE)?;
        Ok(Context::from_table(Arc::new(table), order))
    }

    pub fn from_table(table: Arc<CharacterTable>, order: i64) -> Context {
        let d = table.degree();
        let parts = table.partitions().to_vec();
        let n = parts.len();
        let fact = factorial(d);
        let di = d as i64;
        let dims: Vec<BigInt> = (0..n).map(|r| BigInt::from(table.dim(r))).collect();
        let conj = parts
            .iter()
            .map(|p| table.index_of(&p.conjugate()).expect("conjugate present"))
            .collect();
        let mut lambda = Vec::new();
        let mut eta_inv = Vec::new();
        let mut etabar_inv = Vec::new();
        let mut crosscap = Vec::new();
        for (r, rho) in parts.iter().enumerate() {
            let ratio_ = Rational::new(fact.clone(), dims[r].clone());
            lambda.push(Scalar::t_monomial(2 * di, &ratio_ * &ratio_));
            let c = rho.content_sum();
            let base = hook_sinh_product(rho).scale(&ratio_.recip());
            let ei = Scalar::exact(-di, base.times(&SPoly::monomial(-c, rat(1))));
            let ebi = Scalar::exact(-di, base.times(&SPoly::monomial(c, rat(1))));
            eta_inv.push(ei);
            etabar_inv.push(ebi);
            crosscap.push(if rho.is_self_conjugate() {
                Scalar::t_monomial(di, rat(crosscap_sign(rho)) * &ratio_)
            } else {
                Scalar::zero()
            });
        }
        let mut to_v = vec![vec![Scalar::zero(); n]; n];
        let mut to_e = vec![vec![Scalar::zero(); n]; n];
        for (a, alpha) in parts.iter().enumerate() {
            let l = alpha.len() as i64;
            let sgn = if (di - l) % 2 == 0 { 1 } else { -1 };
            let zeta = rat_big(&alpha.zeta());
            for r in 0..n {
                let chi = rat(table.value(r, a));
                if Zero::is_zero(&chi) {
                    continue;
                }
                let dr = Rational::new(dims[r].clone(), fact.clone());
                to_e[r][a] = Scalar::t_monomial(l - di, &dr * &chi * rat(sgn));
                to_v[a][r] = Scalar::t_monomial(di - l, dr.recip() * &chi * rat(sgn) / &zeta);
            }
        }
        Context {
            d,
            order,
            flip: false,
            table,
            fact,
            conj,
            lambda,
            eta_inv,
            etabar_inv,
            expanded: OnceLock::new(),
            crosscap,
            to_v,
            to_e,
        }
    }

    /// Multiplies real (closed and relative) outputs by `(−1)^d`; doublets are unaffected.
    pub fn with_flipped_orientation(mut self, flip: bool) -> Context {
        self.flip = flip;
        self
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn partitions(&self) -> &[Partition] {
        self.table.partitions()
    }

    pub fn index_of(&self, p: &Partition) -> Result<usize> {
        self.table
            .index_of(p)
            .ok_or_else(|| Error::Argument(format!("{p} is not a partition of {}", self.d)))
    }

    /// Expanded η's carry extra precision so that a few products of them
    /// still reach `order`.
    fn expanded(&self) -> &(Vec<Scalar>, Vec<Scalar>) {
        self.expanded.get_or_init(|| {
            let inner = self.order + 2 * self.d as i64;
            let inv = |v: &Vec<Scalar>| -> Vec<Scalar> {
                v.iter().map(|x| x.inverse(inner).expect("η invertible")).collect()
            };
            (inv(&self.eta_inv), inv(&self.etabar_inv))
        })
    }

    fn eta(&self, r: usize) -> &Scalar {
        &self.expanded().0[r]
    }

    fn etabar(&self, r: usize) -> &Scalar {
        &self.expanded().1[r]
    }

    fn n(&self) -> usize {
        self.partitions().len()
    }

    fn orient(&self, x: Scalar) -> Scalar {
        if self.flip && self.d % 2 == 1 {
            x.negate()
        } else {
            x
        }
    }

    fn self_conjugate(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&r| self.conj[r] == r)
    }

    /// `(λ_ρ, η_ρ, η̄_ρ)`; the η's are expanded in `u`.
    pub fn structure_scalars(&self, rho: &Partition) -> Result<(Scalar, Scalar, Scalar)> {
        let r = self.index_of(rho)?;
        Ok((self.lambda[r].clone(), self.eta(r).clone(), self.etabar(r).clone()))
    }

    /// Exact `η_ρ^{-1}` and `η̄_ρ^{-1}`.
    pub fn inverse_tubes(&self, rho: &Partition) -> Result<(Scalar, Scalar)> {
        let r = self.index_of(rho)?;
        Ok((self.eta_inv[r].clone(), self.etabar_inv[r].clone()))
    }

    /// `η_ρ^{-a} η̄_ρ^{-b}`: exact when `a, b ≥ 0`.
    pub fn level_eigenvalue(&self, r: usize, a: i64, b: i64) -> Scalar {
        let pow = |pos: &Scalar, neg: &Scalar, n: i64| {
            if n >= 0 {
                pos.pow_u(n as u32)
            } else {
                neg.pow_u((-n) as u32)
            }
        };
        if a >= 0 && b >= 0 {
            // Stay exact without touching the expansions.
            return self.eta_inv[r].pow_u(a as u32).times(&self.etabar_inv[r].pow_u(b as u32));
        }
        pow(&self.eta_inv[r], self.eta(r), a).times(&pow(&self.etabar_inv[r], self.etabar(r), b))
    }

    // ---- vectors ----------------------------------------------------------

    pub fn e(&self, alpha: &Partition) -> Result<TqftVector> {
        self.index_of(alpha)?;
        let mut x = TqftVector::zero(self.d, Basis::Standard);
        x.add_coeff(alpha, &Scalar::one());
        Ok(x)
    }

    pub fn v(&self, rho: &Partition) -> Result<TqftVector> {
        self.index_of(rho)?;
        let mut x = TqftVector::zero(self.d, Basis::Idempotent);
        x.add_coeff(rho, &Scalar::one());
        Ok(x)
    }

    /// Multiplicative identity `e_{(1^d)}`, in the requested basis.
    pub fn unit(&self, basis: Basis) -> TqftVector {
        self.in_basis(&self.e(&Partition::ones(self.d)).unwrap(), basis)
    }

    fn check(&self, x: &TqftVector) {
        assert_eq!(x.d, self.d, "vector of degree {} in degree-{} context", x.d, self.d);
    }

    pub fn e_to_v(&self, x: &TqftVector) -> TqftVector {
        self.check(x);
        if x.basis == Basis::Idempotent {
            return x.clone();
        }
        let ps = self.partitions();
        let mut out = TqftVector::zero(self.d, Basis::Idempotent);
        for (alpha, c) in &x.coords {
            let a = self.table.index_of(alpha).unwrap();
            for (r, m) in self.to_v[a].iter().enumerate() {
                if !m.is_zero() {
                    out.add_coeff(&ps[r], &c.times(m));
                }
            }
        }
        out
    }

    pub fn v_to_e(&self, x: &TqftVector) -> TqftVector {
        self.check(x);
        if x.basis == Basis::Standard {
            return x.clone();
        }
        let ps = self.partitions();
        let mut out = TqftVector::zero(self.d, Basis::Standard);
        for (rho, c) in &x.coords {
            let r = self.table.index_of(rho).unwrap();
            for (a, m) in self.to_e[r].iter().enumerate() {
                if !m.is_zero() {
                    out.add_coeff(&ps[a], &c.times(m));
                }
            }
        }
        out
    }

    pub fn in_basis(&self, x: &TqftVector, basis: Basis) -> TqftVector {
        match basis {
            Basis::Standard => self.v_to_e(x),
            Basis::Idempotent => self.e_to_v(x),
        }
    }

    /// Pair-of-pants product: diagonal on the `v_ρ`, transported back to
    /// the basis of `x`.
    pub fn multiply(&self, x: &TqftVector, y: &TqftVector) -> TqftVector {
        let (xv, yv) = (self.e_to_v(x), self.e_to_v(y));
        let mut out = TqftVector::zero(self.d, Basis::Idempotent);
        for (rho, c) in &xv.coords {
            if let Some(c2) = yv.coords.get(rho) {
                out.add_coeff(rho, &c.times(c2));
            }
        }
        self.in_basis(&out, x.basis)
    }

    /// Ω, computed natively in whichever basis `x` is given.
    pub fn omega(&self, x: &TqftVector) -> TqftVector {
        self.check(x);
        let mut out = TqftVector::zero(self.d, x.basis);
        for (p, c) in &x.coords {
            match x.basis {
                Basis::Standard => out.add_coeff(p, &c.scale(&rat(p.sign()))),
                Basis::Idempotent => out.add_coeff(&p.conjugate(), c),
            }
        }
        out
    }

    /// Counit `C(v_ρ) = λ_ρ^{-1}`.
    pub fn counit(&self, x: &TqftVector) -> Scalar {
        let xv = self.e_to_v(x);
        xv.coords.iter().fold(Scalar::zero(), |acc, (rho, c)| {
            let r = self.table.index_of(rho).unwrap();
            acc.plus(&c.times(&self.lambda[r].inverse(0).unwrap()))
        })
    }

    /// `⟨x, y⟩ = C(x·y)`.
    pub fn pairing(&self, x: &TqftVector, y: &TqftVector) -> Scalar {
        self.counit(&self.multiply(x, y))
    }

    /// Closed-form standard-basis metric `⟨e_α, e_β⟩ = δ_{αβ} / (ζ(α) t^{2ℓ(α)})`.
    pub fn metric(&self, alpha: &Partition, beta: &Partition) -> Scalar {
        if alpha != beta {
            return Scalar::zero();
        }
        Scalar::t_monomial(-2 * alpha.len() as i64, rat_big(&alpha.zeta()).recip())
    }

    /// Index-raising weight `ζ(λ) t^{2ℓ(λ)}`.
    pub fn raising_weight(lambda: &Partition) -> Scalar {
        Scalar::t_monomial(2 * lambda.len() as i64, rat_big(&lambda.zeta()))
    }

    /// Crosscap element in the idempotent basis.
    pub fn crosscap_u(&self) -> TqftVector {
        let mut out = TqftVector::zero(self.d, Basis::Idempotent);
        for r in self.self_conjugate() {
            out.add_coeff(&self.partitions()[r], &self.crosscap[r]);
        }
        out
    }

    /// Crosscap element assembled in the standard basis from the level-0
    /// cap series, `U = Σ_α r_α ζ(α) t^{ℓ(α)} e_α`.
    pub fn crosscap_standard_basis(&self) -> TqftVector {
        let mut out = TqftVector::zero(self.d, Basis::Standard);
        for (alpha, r) in level0_cap_coefficients(self.d) {
            let c = Scalar::t_monomial(alpha.len() as i64, r * rat_big(&alpha.zeta()));
            out.add_coeff(&alpha, &c);
        }
        out
    }

    // ---- operators --------------------------------------------------------

    fn diagonal(&self, f: impl Fn(usize) -> Scalar) -> TqftOperator {
        let mut op = TqftOperator::new(self.d, 1, 1, Basis::Idempotent);
        for r in 0..self.n() {
            op.insert(vec![r], vec![r], f(r));
        }
        op
    }

    pub fn identity(&self, n: usize) -> TqftOperator {
        let mut op = TqftOperator::new(self.d, n, n, Basis::Idempotent);
        for t in tuples(self.n(), n) {
            op.insert(t.clone(), t, Scalar::one());
        }
        op
    }

    /// Operator `0 → 1` producing `x`.
    pub fn vector_operator(&self, x: &TqftVector) -> TqftOperator {
        let xv = self.e_to_v(x);
        let mut op = TqftOperator::new(self.d, 0, 1, Basis::Idempotent);
        for (rho, c) in &xv.coords {
            op.insert(vec![], vec![self.table.index_of(rho).unwrap()], c.clone());
        }
        op
    }

    /// Elementary cobordism in the idempotent basis; `level` only for cap/tube.
    pub fn elementary(&self, g: Generator, level: Option<(i64, i64)>) -> Result<TqftOperator> {
        if level.is_some() && !g.accepts_level() {
            return Err(Error::Argument(format!("{g} does not take a level")));
        }
        let (a, b) = level.unwrap_or((0, 0));
        let n = self.n();
        let op = match g {
            Generator::Cap => {
                let mut op = TqftOperator::new(self.d, 0, 1, Basis::Idempotent);
                for r in 0..n {
                    op.insert(vec![], vec![r], self.level_eigenvalue(r, a, b));
                }
                op
            }
            Generator::Cup => {
                let mut op = TqftOperator::new(self.d, 1, 0, Basis::Idempotent);
                for r in 0..n {
                    op.insert(vec![r], vec![], self.lambda[r].inverse(0)?);
                }
                op
            }
            Generator::Pants => {
                let mut op = TqftOperator::new(self.d, 1, 2, Basis::Idempotent);
                for r in 0..n {
                    op.insert(vec![r], vec![r, r], self.lambda[r].clone());
                }
                op
            }
            Generator::Copants => {
                let mut op = TqftOperator::new(self.d, 2, 1, Basis::Idempotent);
                for r in 0..n {
                    op.insert(vec![r, r], vec![r], Scalar::one());
                }
                op
            }
            Generator::Twist => {
                let mut op = TqftOperator::new(self.d, 2, 2, Basis::Idempotent);
                for i in 0..n {
                    for j in 0..n {
                        op.insert(vec![i, j], vec![j, i], Scalar::one());
                    }
                }
                op
            }
            Generator::Omega => {
                let mut op = TqftOperator::new(self.d, 1, 1, Basis::Idempotent);
                for r in 0..n {
                    op.insert(vec![r], vec![self.conj[r]], Scalar::one());
                }
                op
            }
            Generator::Xcap => self.vector_operator(&self.crosscap_u()),
            Generator::Tube => self.diagonal(|r| self.level_eigenvalue(r, a, b)),
            Generator::G => self.diagonal(|r| self.lambda[r].clone()),
            Generator::K => self.diagonal(|r| self.crosscap[r].clone()),
            Generator::A => self.diagonal(|r| self.eta(r).clone()),
            Generator::Abar => self.diagonal(|r| self.etabar(r).clone()),
        };
        Ok(op)
    }

    /// Dense transport `H → H` as an operator from `from`-indices to `to`-indices.
    fn transport(&self, from: Basis, to: Basis) -> TqftOperator {
        let n = self.n();
        let mut op = TqftOperator::new(self.d, 1, 1, to);
        for i in 0..n {
            for j in 0..n {
                let c = match (from, to) {
                    (Basis::Standard, Basis::Idempotent) => self.to_v[i][j].clone(),
                    (Basis::Idempotent, Basis::Standard) => self.to_e[i][j].clone(),
                    _ => if i == j { Scalar::one() } else { Scalar::zero() },
                };
                op.insert(vec![i], vec![j], c);
            }
        }
        op
    }

    fn transport_power(&self, from: Basis, to: Basis, n: usize) -> TqftOperator {
        let one = self.transport(from, to);
        let mut op = TqftOperator::from_scalar(self.d, to, Scalar::one());
        for _ in 0..n {
            op = op.tensor(&one).unwrap();
        }
        op
    }

    /// Re-expresses an operator in the other basis.
    pub fn operator_in_basis(&self, op: &TqftOperator, basis: Basis) -> TqftOperator {
        if op.basis == basis {
            return op.clone();
        }
        let (n_in, n_out) = op.arity();
        let pre = self.transport_power(basis, op.basis, n_in);
        let post = self.transport_power(op.basis, basis, n_out);
        let mut mid = op.clone();
        mid.basis = basis;
        let mut pre = pre;
        pre.basis = basis;
        let mut post = post;
        post.basis = basis;
        post.compose_raw(&mid.compose_raw(&pre).unwrap()).unwrap()
    }

    // ---- invariants -------------------------------------------------------

    /// `RGW_d(g|k) = Σ_{ρ=ρ′} U_ρ^{g−1} η_ρ^{−k}`, straight from partition data.
    pub fn closed_invariant(&self, g: u32, k: i64) -> Result<Scalar> {
        let d = self.d as i64;
        let mut total = Scalar::zero();
        for rho in self.partitions().iter().filter(|p| p.is_self_conjugate()) {
            let q = Rational::new(self.fact.clone(), rho.dim_rep());
            let u = Scalar::t_monomial(d, rat(crosscap_sign(rho)) * &q);
            let up = u.pow(g as i64 - 1, self.order)?;
            let prod = hook_sinh_product(rho);
            let level = if k >= 0 {
                Scalar::exact(-d * k, prod.pow_u(k as u32).scale(&q.recip().pow(k as i32)))
            } else {
                let m = (-k) as u32;
                let inv = invert_to_order(&prod.pow_u(m), self.order)?;
                Scalar::series(d * -k, inv.scale(&q.pow(m as i32)))
            };
            total = total.plus(&up.times(&level));
        }
        Ok(self.orient(total))
    }

    /// Same invariant as the composite `C ∘ A^{−k} ∘ K^g ∘ Xcap`.
    pub fn closed_invariant_composition(&self, g: u32, k: i64) -> Result<Scalar> {
        let mut op = self.elementary(Generator::Xcap, None)?;
        let kk = self.elementary(Generator::K, None)?;
        for _ in 0..g {
            op = kk.compose(&op)?;
        }
        op = self.elementary(Generator::Tube, Some((k, 0)))?.compose(&op)?;
        op = self.elementary(Generator::Cup, None)?.compose(&op)?;
        Ok(self.orient(op.as_scalar().unwrap()))
    }

    /// `Σ_ρ λ_ρ^{g−1} η_ρ^{−k1} η̄_ρ^{−k2}` over all ρ ⊢ d.
    pub fn doublet_invariant(&self, g: u32, k1: i64, k2: i64) -> Result<Scalar> {
        let mut total = Scalar::zero();
        for r in 0..self.n() {
            let lp = self.lambda[r].pow(g as i64 - 1, self.order)?;
            total = total.plus(&lp.times(&self.level_eigenvalue(r, k1, k2)));
        }
        Ok(total)
    }

    /// Doublet invariant as `C ∘ tube(k1,k2) ∘ G^g ∘ cap`.
    pub fn doublet_invariant_composition(&self, g: u32, k1: i64, k2: i64) -> Result<Scalar> {
        let mut op = self.elementary(Generator::Cap, None)?;
        let gg = self.elementary(Generator::G, None)?;
        for _ in 0..g {
            op = gg.compose(&op)?;
        }
        op = self.elementary(Generator::Tube, Some((k1, k2)))?.compose(&op)?;
        op = self.elementary(Generator::Cup, None)?.compose(&op)?;
        Ok(op.as_scalar().unwrap())
    }

    /// Lowered standard-basis coefficients of `Σ_ρ w_ρ v_ρ^{⊗r}`.
    fn lower_diagonal(&self, w: &[(usize, Scalar)], r: usize) -> BTreeMap<Vec<Partition>, Scalar> {
        let ps = self.partitions();
        let weights: Vec<Scalar> = ps
            .iter()
            .map(|a| Context::raising_weight(a).inverse(0).unwrap())
            .collect();
        let mut out = BTreeMap::new();
        for t in tuples(self.n(), r) {
            let mut total = Scalar::zero();
            for (rho, c) in w {
                let mut term = c.clone();
                for &a in &t {
                    term = term.times(&self.to_e[*rho][a]);
                    if term.is_zero() {
                        break;
                    }
                }
                total = total.plus(&term);
            }
            if total.is_zero() {
                continue;
            }
            for &a in &t {
                total = total.times(&weights[a]);
            }
            out.insert(t.iter().map(|&a| ps[a].clone()).collect(), total);
        }
        out
    }

    /// All lowered relative invariants `RGW_d(g|k)_{λ¹…λʳ}` with `r ≥ 1`
    /// boundary pairs; zero entries are omitted.
    pub fn relative_invariants(&self, g: u32, k: i64, r: usize) -> Result<BTreeMap<Vec<Partition>, Scalar>> {
        if r == 0 {
            return Err(Error::Argument("relative invariants need at least one boundary".into()));
        }
        let mut w = Vec::new();
        for rho in self.self_conjugate() {
            let c = self.crosscap[rho]
                .pow(g as i64 - 1, self.order)?
                .times(&self.lambda[rho].pow_u(r as u32))
                .times(&self.level_eigenvalue(rho, k, 0));
            w.push((rho, c));
        }
        Ok(self
            .lower_diagonal(&w, r)
            .into_iter()
            .map(|(t, c)| (t, self.orient(c)))
            .collect())
    }

    /// A single lowered relative invariant.
    pub fn relative_invariant(&self, g: u32, k: i64, boundary: &[Partition]) -> Result<Scalar> {
        for l in boundary {
            if l.degree() != self.d {
                return Err(Error::Argument(format!("boundary {l} is not a partition of {}", self.d)));
            }
        }
        let all = self.relative_invariants(g, k, boundary.len())?;
        Ok(all.get(boundary).cloned().unwrap_or_default())
    }

    /// Lowered invariants of a doublet of genus `h` with `r` boundary pairs
    /// at levels `(a, b)`: `Σ_ρ λ_ρ^{h−1+r} η_ρ^{−a} η̄_ρ^{−b} v_ρ^{⊗r}`.
    pub fn doublet_relative(&self, h: u32, a: i64, b: i64, r: usize) -> Result<BTreeMap<Vec<Partition>, Scalar>> {
        if r == 0 {
            return Err(Error::Argument("relative invariants need at least one boundary".into()));
        }
        let mut w = Vec::new();
        for rho in 0..self.n() {
            let c = self.lambda[rho]
                .pow(h as i64 - 1 + r as i64, self.order)?
                .times(&self.level_eigenvalue(rho, a, b));
            w.push((rho, c));
        }
        Ok(self.lower_diagonal(&w, r))
    }

    /// Checks a gluing formula: the closed invariant against the
    /// `ζ(λ)t^{2ℓ(λ)}`-weighted pairing of the pieces' lowered invariants.
    pub fn split_check(&self, g: u32, k: i64, split: Split) -> Result<SplitReport> {
        let lhs = self.closed_invariant(g, k)?;
        let ps = self.partitions().to_vec();
        let get = |m: &BTreeMap<Vec<Partition>, Scalar>, key: Vec<Partition>| {
            m.get(&key).cloned().unwrap_or_default()
        };
        // The optional (−1)^d orientation factor sits on real pieces only;
        // fix up the count so both sides carry it once.
        let mut extra_flip = false;
        let mut terms: Vec<(Partition, Scalar)> = Vec::new();
        match split {
            Split::Separating { g1, k1, g2, k2 } => {
                if g1 + g2 + 1 != g || k1 + k2 != k {
                    return Err(Error::Argument(format!(
                        "({g1},{k1})+({g2},{k2}) does not split ({g},{k})"
                    )));
                }
                let r1 = self.relative_invariants(g1, k1, 1)?;
                let r2 = self.relative_invariants(g2, k2, 1)?;
                extra_flip = true;
                for l in &ps {
                    let c = get(&r1, vec![l.clone()])
                        .times(&Context::raising_weight(l))
                        .times(&get(&r2, vec![l.clone()]));
                    terms.push((l.clone(), c));
                }
            }
            Split::SeparatingDoublet { g1, k1, h, a, b } => {
                if g1 + 2 * h != g || k1 + a + b != k {
                    return Err(Error::Argument(format!(
                        "({g1},{k1}) + doublet ({h},{a},{b}) does not split ({g},{k})"
                    )));
                }
                let r1 = self.relative_invariants(g1, k1, 1)?;
                let dd = self.doublet_relative(h, a, b, 1)?;
                for l in &ps {
                    let c = get(&r1, vec![l.clone()])
                        .times(&Context::raising_weight(l))
                        .times(&get(&dd, vec![l.clone()]));
                    terms.push((l.clone(), c));
                }
            }
            Split::NonSeparating | Split::NonSeparatingTwisted => {
                if g < 2 {
                    return Err(Error::Argument(format!("genus {g} has no real non-separating split")));
                }
                let twisted = split == Split::NonSeparatingTwisted;
                let rr = self.relative_invariants(g - 2, k, 2)?;
                for l in &ps {
                    let mut c = get(&rr, vec![l.clone(), l.clone()]).times(&Context::raising_weight(l));
                    if twisted {
                        c = c.scale(&rat(l.sign()));
                    }
                    terms.push((l.clone(), c));
                }
            }
            Split::NonSeparatingDoublet { h, a, b } => {
                if 2 * h + 1 != g || a + b != k {
                    return Err(Error::Argument(format!(
                        "doublet ({h},{a},{b}) glued through Ω does not give ({g},{k})"
                    )));
                }
                let dd = self.doublet_relative(h, a, b, 2)?;
                extra_flip = true;
                for l in &ps {
                    let c = get(&dd, vec![l.clone(), l.clone()])
                        .times(&Context::raising_weight(l))
                        .scale(&rat(l.sign()));
                    terms.push((l.clone(), c));
                }
            }
        }
        let mut rhs = terms.iter().fold(Scalar::zero(), |acc, (_, c)| acc.plus(c));
        if extra_flip {
            rhs = self.orient(rhs);
        }
        let pass = lhs.agrees(&rhs);
        let detail = if pass {
            String::new()
        } else {
            let top = terms
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(l, c)| format!("{l}: {c}"))
                .collect::<Vec<_>>()
                .join("; ");
            format!("lhs {lhs} vs rhs {rhs}; terms {top}")
        };
        Ok(SplitReport { lhs, rhs, pass, detail })
    }

    /// Every split of `(g, k)` with pieces' levels bounded by `kmax` in absolute value.
    pub fn enumerate_splits(g: u32, k: i64, kmax: i64) -> Vec<Split> {
        let mut out = Vec::new();
        if g >= 1 {
            for g1 in 0..g {
                let g2 = g - 1 - g1;
                for k1 in -kmax..=kmax {
                    let k2 = k - k1;
                    if k2.abs() <= kmax {
                        out.push(Split::Separating { g1, k1, g2, k2 });
                    }
                }
            }
        }
        for h in 0..=g / 2 {
            let g1 = g - 2 * h;
            for a in -1..=1 {
                for b in -1..=1 {
                    let k1 = k - a - b;
                    if k1.abs() <= kmax {
                        out.push(Split::SeparatingDoublet { g1, k1, h, a, b });
                    }
                }
            }
        }
        if g >= 2 {
            out.push(Split::NonSeparating);
            out.push(Split::NonSeparatingTwisted);
        }
        if g % 2 == 1 {
            let h = (g - 1) / 2;
            for a in -1..=1 {
                out.push(Split::NonSeparatingDoublet { h, a, b: k - a });
            }
        }
        out
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context(d={}, order={})", self.d, self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ratio;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn basis_change_examples() {
        let c = Context::new(2).unwrap();
        let v2 = c.v_to_e(&c.v(&p(&[2])).unwrap());
        assert_eq!(v2.coeff(&p(&[2])), Scalar::t_monomial(-1, ratio(-1, 2)));
        assert_eq!(v2.coeff(&p(&[1, 1])), Scalar::t_monomial(0, ratio(1, 2)));
        for d in 1..=6 {
            let c = Context::new(d).unwrap();
            let unit = c.e_to_v(&c.e(&Partition::ones(d)).unwrap());
            for rho in c.partitions() {
                assert_eq!(unit.coeff(rho), Scalar::one());
                let v = c.v(rho).unwrap();
                assert_eq!(c.e_to_v(&c.v_to_e(&v)), v);
                let e = c.e(rho).unwrap();
                assert_eq!(c.v_to_e(&c.e_to_v(&e)), e);
            }
        }
    }

    #[test]
    fn product_examples() {
        let c = Context::new(2).unwrap();
        let e2 = c.e(&p(&[2])).unwrap();
        let sq = c.multiply(&e2, &e2);
        let mut want = TqftVector::zero(2, Basis::Standard);
        want.add_coeff(&p(&[1, 1]), &Scalar::t_monomial(2, rat(1)));
        assert_eq!(sq, want);
        let c = Context::new(4).unwrap();
        let unit = c.unit(Basis::Standard);
        for a in c.partitions() {
            let x = c.e(a).unwrap();
            assert_eq!(c.multiply(&unit, &x), x);
            let v = c.v(a).unwrap();
            assert_eq!(c.multiply(&v, &v), v);
        }
    }

    #[test]
    fn structure_scalar_examples() {
        let c = Context::new(3).unwrap();
        let (lam, _, _) = c.structure_scalars(&p(&[2, 1])).unwrap();
        assert_eq!(lam, Scalar::t_monomial(6, rat(9)));
        let (ei, ebi) = c.inverse_tubes(&p(&[2, 1])).unwrap();
        assert_eq!(ei, ebi);
        let c1 = Context::new(1).unwrap();
        let (lam, eta, _) = c1.structure_scalars(&p(&[1])).unwrap();
        assert_eq!(lam, Scalar::t_monomial(2, rat(1)));
        let want = Scalar::series(1, sinh_factor(1).to_u_series(20).inverse().unwrap());
        assert!(eta.agrees(&want));
    }

    #[test]
    fn omega_examples() {
        let c = Context::new(3).unwrap();
        let unit = c.unit(Basis::Standard);
        assert_eq!(c.omega(&unit), unit);
        let c2 = Context::new(2).unwrap();
        let e2 = c2.e(&p(&[2])).unwrap();
        assert_eq!(c2.omega(&e2), e2.scale(&Scalar::integer(-1)));
        assert_eq!(c.omega(&c.v(&p(&[3])).unwrap()), c.v(&p(&[1, 1, 1])).unwrap());
    }

    #[test]
    fn crosscap_examples() {
        let c1 = Context::new(1).unwrap();
        assert_eq!(c1.crosscap_u().coeff(&p(&[1])), Scalar::t_monomial(1, rat(1)));
        assert!(Context::new(2).unwrap().crosscap_u().coords().is_empty());
        let c3 = Context::new(3).unwrap();
        let u = c3.crosscap_u();
        assert_eq!(u.coords().len(), 1);
        assert_eq!(u.coeff(&p(&[2, 1])), Scalar::t_monomial(3, rat(-3)));
        for d in 1..=6 {
            let c = Context::new(d).unwrap();
            assert_eq!(c.crosscap_standard_basis(), c.v_to_e(&c.crosscap_u()));
        }
    }

    #[test]
    fn elementary_examples() {
        let c = Context::new(2).unwrap();
        let cup = c.elementary(Generator::Cup, None).unwrap();
        let cap = c.elementary(Generator::Cap, None).unwrap();
        let v = cup.compose(&cap).unwrap().as_scalar().unwrap();
        assert_eq!(v, Scalar::t_monomial(-4, ratio(1, 2)));
        let c = Context::new(3).unwrap();
        let k = c.elementary(Generator::K, None).unwrap();
        let g = c.elementary(Generator::G, None).unwrap();
        let kk = k.compose(&k).unwrap();
        let r = c.index_of(&p(&[2, 1])).unwrap();
        assert_eq!(kk.entry(&[r], &[r]), g.entry(&[r], &[r]));
        let tw = c.elementary(Generator::Twist, None).unwrap();
        assert!(tw.compose(&tw).unwrap().agrees(&c.identity(2)));
        assert!(c.elementary(Generator::K, Some((1, 0))).is_err());
        assert!("foo".parse::<Generator>().is_err());
        let a = c.elementary(Generator::A, None).unwrap();
        let a2 = c.elementary(Generator::Tube, Some((-1, 0))).unwrap();
        assert!(a.agrees(&a2));
    }

    #[test]
    fn closed_examples() {
        let c3 = Context::new(3).unwrap();
        assert_eq!(c3.closed_invariant(1, 0).unwrap(), Scalar::one());
        assert_eq!(Context::new(2).unwrap().closed_invariant(1, 0).unwrap(), Scalar::zero());
        let want = hook_sinh_product(&p(&[2, 1])).negate();
        assert_eq!(c3.closed_invariant(2, 1).unwrap(), Scalar::exact(0, want));
        for d in 1..=4 {
            let c = Context::new(d).unwrap();
            for g in 0..=3 {
                for k in -2..=2 {
                    let a = c.closed_invariant(g, k).unwrap();
                    let b = c.closed_invariant_composition(g, k).unwrap();
                    assert!(a.agrees(&b), "d={d} g={g} k={k}: {a} vs {b}");
                    let te = a.t_exponents();
                    assert!(te.is_empty() || te == vec![d as i64 * (g as i64 - 1 - k)]);
                }
            }
        }
    }

    #[test]
    fn doublet_examples() {
        for d in 1..=5 {
            let c = Context::new(d).unwrap();
            assert_eq!(c.doublet_invariant(1, 0, 0).unwrap(), Scalar::integer(c.partitions().len() as i64));
        }
        let c1 = Context::new(1).unwrap();
        assert_eq!(c1.doublet_invariant(0, 0, 0).unwrap(), Scalar::t_monomial(-2, rat(1)));
        let c2 = Context::new(2).unwrap();
        let want = c2
            .partitions()
            .iter()
            .fold(SPoly::zero(), |acc, r| acc.plus(&hook_sinh_product(r).pow_u(2)));
        assert_eq!(c2.doublet_invariant(2, 1, 1).unwrap(), Scalar::exact(0, want));
        for d in 1..=3 {
            let c = Context::new(d).unwrap();
            for g in 0..=2 {
                for (k1, k2) in [(0, 0), (1, 0), (0, 1), (-1, 0), (1, -1)] {
                    let a = c.doublet_invariant(g, k1, k2).unwrap();
                    let b = c.doublet_invariant_composition(g, k1, k2).unwrap();
                    assert!(a.agrees(&b));
                }
            }
        }
    }

    #[test]
    fn relative_examples() {
        let c1 = Context::new(1).unwrap();
        assert_eq!(
            c1.relative_invariant(0, 0, &[p(&[1])]).unwrap(),
            Scalar::t_monomial(-1, rat(1))
        );
        let c2 = Context::new(2).unwrap();
        assert_eq!(c2.relative_invariant(0, 0, &[p(&[2])]).unwrap(), Scalar::zero());
        assert!(c2.relative_invariant(0, 0, &[p(&[3])]).is_err());
        for d in 1..=4 {
            let c = Context::new(d).unwrap();
            for (alpha, r) in level0_cap_coefficients(d) {
                let want = Scalar::t_monomial(-(alpha.len() as i64), r);
                assert_eq!(c.relative_invariant(0, 0, &[alpha]).unwrap(), want);
            }
            for g in 0..=2 {
                for k in -1..=1 {
                    let unram = c.relative_invariant(g, k, &[Partition::ones(d)]).unwrap();
                    assert!(unram.agrees(&c.closed_invariant(g, k).unwrap()));
                    for (t, x) in c.relative_invariants(g, k, 2).unwrap() {
                        let want = d as i64 * (g as i64 - 1 - k)
                            + t.iter().map(|l| (d - l.len()) as i64).sum::<i64>();
                        assert_eq!(x.t_exponents(), vec![want]);
                    }
                }
            }
        }
    }

    #[test]
    fn split_examples() {
        let c2 = Context::new(2).unwrap();
        let r = c2.split_check(3, 1, Split::Separating { g1: 1, k1: 1, g2: 1, k2: 0 }).unwrap();
        assert!(r.pass, "{}", r.detail);
        let c3 = Context::new(3).unwrap();
        let r = c3.split_check(1, 0, Split::NonSeparatingDoublet { h: 0, a: 0, b: 0 }).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, Scalar::one());
        let r = c3.split_check(0, 0, Split::SeparatingDoublet { g1: 0, k1: 0, h: 0, a: 0, b: 0 }).unwrap();
        assert!(r.pass);
        assert!(c3.split_check(2, 0, Split::Separating { g1: 1, k1: 0, g2: 1, k2: 0 }).is_err());
        for g in 0..=3 {
            for k in -1..=1 {
                for s in Context::enumerate_splits(g, k, 1) {
                    let r = c3.split_check(g, k, s).unwrap();
                    assert!(r.pass, "{s:?}: {}", r.detail);
                }
            }
        }
    }

    #[test]
    fn orientation_flag() {
        let c = Context::new(3).unwrap().with_flipped_orientation(true);
        assert_eq!(c.closed_invariant(1, 0).unwrap(), Scalar::integer(-1));
        assert!(c.closed_invariant_composition(1, 0).unwrap().agrees(&Scalar::integer(-1)));
        for s in Context::enumerate_splits(2, 0, 1) {
            assert!(c.split_check(2, 0, s).unwrap().pass);
        }
    }

    #[test]
    fn operator_basis_roundtrip() {
        let c = Context::new(3).unwrap();
        for g in Generator::ALL {
            let op = c.elementary(g, None).unwrap();
            let e = c.operator_in_basis(&op, Basis::Standard);
            assert!(c.operator_in_basis(&e, Basis::Idempotent).agrees(&op), "{g}");
        }
        let product = c.operator_in_basis(&c.elementary(Generator::Copants, None).unwrap(), Basis::Standard);
        let ps = c.partitions().to_vec();
        for (i, a) in ps.iter().enumerate() {
            for (j, b) in ps.iter().enumerate() {
                let prod = c.multiply(&c.e(a).unwrap(), &c.e(b).unwrap());
                for (k, gmm) in ps.iter().enumerate() {
                    assert_eq!(product.entry(&[i, j], &[k]), prod.coeff(gmm));
                }
            }
        }
    }
}
