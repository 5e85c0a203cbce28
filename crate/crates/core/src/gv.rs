//! Real and complex BPS states of the local theory.
//!
//! The real connected series is `C_g = log Z^R_g − D_g` with
//! `Z^R_g = 1 + Σ_d RGW_d(g|g−1) q^d` and `D_g(q) = ½ log Z^C_g(q²)`, where
//! `Z^C_g` is the complex partition function already rotated `u ↦ iu`, i.e.
//! `1 + Σ_d (−1)^{d(g−1)} DRGW_d(g|g−1,g−1) q^d`. Everything stays in the
//! real `sinh` ring: `(2 sin(k·iu/2))^{2h−2} = (−1)^{h−1}(2 sinh(ku/2))^{2h−2}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::combinatorics::check_degree;
use crate::error::{Error, Result};
use crate::ring::{invert_to_order, parse_rational, rat, ratio, rational_to_string, sinh_factor, Coef, QSeries, Rational, Ring, SPoly, USeries};
use crate::tqft::Context;

pub const MAX_GV_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Real,
    Complex,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Real => "real",
            Side::Complex => "complex",
        })
    }
}

/// Failures are recorded as `(d, h)` positions; nothing is ever rounded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BpsReport {
    pub non_integer: Vec<(usize, i64)>,
    pub parity: Vec<(usize, i64)>,
    pub vanishing: Vec<(usize, i64)>,
    /// Entries below `h = g`, or off `δ_{h,g}` in degree one.
    pub support: Vec<(usize, i64)>,
    pub resynthesis: Option<bool>,
    pub max_h: BTreeMap<usize, i64>,
}

impl BpsReport {
    pub fn pass(&self) -> bool {
        self.non_integer.is_empty()
            && self.parity.is_empty()
            && self.vanishing.is_empty()
            && self.support.is_empty()
            && self.resynthesis != Some(false)
    }

    fn to_json(&self) -> Value {
        let pairs = |v: &[(usize, i64)]| v.iter().map(|(d, h)| json!([d, h])).collect::<Vec<_>>();
        json!({
            "non_integer": pairs(&self.non_integer),
            "parity": pairs(&self.parity),
            "vanishing": pairs(&self.vanishing),
            "support": pairs(&self.support),
            "resynthesis": self.resynthesis,
            "max_h": self.max_h.iter().map(|(d, h)| (d.to_string(), json!(h))).collect::<serde_json::Map<_, _>>(),
            "pass": self.pass(),
        })
    }

    fn from_json(v: &Value) -> Result<BpsReport> {
        let bad = || Error::Json("malformed BPS report".into());
        let pairs = |key: &str| -> Result<Vec<(usize, i64)>> {
            v[key]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|p| Ok((p[0].as_u64().ok_or_else(bad)? as usize, p[1].as_i64().ok_or_else(bad)?)))
                .collect()
        };
        let max_h = v["max_h"]
            .as_object()
            .ok_or_else(bad)?
            .iter()
            .map(|(d, h)| Ok((d.parse().map_err(|_| bad())?, h.as_i64().ok_or_else(bad)?)))
            .collect::<Result<_>>()?;
        Ok(BpsReport {
            non_integer: pairs("non_integer")?,
            parity: pairs("parity")?,
            vanishing: pairs("vanishing")?,
            support: pairs("support")?,
            resynthesis: v["resynthesis"].as_bool(),
            max_h,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpsTable {
    pub genus: u32,
    pub side: Side,
    pub dmax: usize,
    pub hmax: i64,
    /// Nonzero `n_{d,h}` only.
    pub entries: BTreeMap<(usize, i64), Rational>,
    pub report: BpsReport,
}

impl BpsTable {
    fn new(genus: u32, side: Side, dmax: usize, hmax: i64) -> BpsTable {
        BpsTable { genus, side, dmax, hmax, entries: BTreeMap::new(), report: BpsReport::default() }
    }

    pub fn get(&self, d: usize, h: i64) -> Rational {
        self.entries.get(&(d, h)).cloned().unwrap_or_else(<Rational as Zero>::zero)
    }

    /// Entries of degree `d`, as `h ↦ n`.
    pub fn degree(&self, d: usize) -> BTreeMap<i64, Rational> {
        self.entries
            .range((d, i64::MIN)..=(d, i64::MAX))
            .map(|((_, h), n)| (*h, n.clone()))
            .collect()
    }

    fn insert(&mut self, d: usize, h: i64, n: Rational) {
        if Zero::is_zero(&n) {
            return;
        }
        if !n.is_integer() {
            self.report.non_integer.push((d, h));
        }
        let m = self.report.max_h.entry(d).or_insert(h);
        *m = (*m).max(h);
        self.entries.insert((d, h), n);
    }

    /// Rebuilds the generating function the table was extracted from,
    /// each coefficient through `u^order`.
    pub fn resynthesize(&self, order: i64) -> Result<QSeries<USeries>> {
        let mut basis = BasisCache::default();
        let mut out = QSeries::<USeries>::zero(self.dmax);
        for ((d, h), n) in &self.entries {
            for k in 1..=self.dmax / d {
                if self.side == Side::Real && k % 2 == 0 {
                    continue;
                }
                let term = basis.get(self.side, k as i64, *h, order)?.scale(&(n * ratio(1, k as i64)));
                out.set(k * d, out.coeff(k * d).plus(&term));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((d, h), n)| json!({ "d": d, "h": h, "n": rational_to_string(n) }))
            .collect();
        json!({
            "genus": self.genus,
            "side": self.side.to_string(),
            "dmax": self.dmax,
            "hmax": self.hmax,
            "entries": entries,
            "report": self.report.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<BpsTable> {
        let bad = |m: &str| Error::Json(format!("BPS table: {m}"));
        let side = match v["side"].as_str() {
            Some("real") => Side::Real,
            Some("complex") => Side::Complex,
            _ => return Err(bad("side must be real or complex")),
        };
        let mut entries = BTreeMap::new();
        for e in v["entries"].as_array().ok_or_else(|| bad("missing entries"))? {
            let d = e["d"].as_u64().ok_or_else(|| bad("entry needs d"))? as usize;
            let h = e["h"].as_i64().ok_or_else(|| bad("entry needs h"))?;
            let n = parse_rational(e["n"].as_str().ok_or_else(|| bad("entry needs n"))?)?;
            entries.insert((d, h), n);
        }
        Ok(BpsTable {
            genus: v["genus"].as_u64().ok_or_else(|| bad("missing genus"))? as u32,
            side,
            dmax: v["dmax"].as_u64().ok_or_else(|| bad("missing dmax"))? as usize,
            hmax: v["hmax"].as_i64().ok_or_else(|| bad("missing hmax"))?,
            entries,
            report: BpsReport::from_json(&v["report"])?,
        })
    }
}

/// `(2 sinh(ku/2))^{h−1}` (real) or `(−1)^{h−1}(2 sinh(ku/2))^{2h−2}` (complex).
#[derive(Default)]
struct BasisCache {
    map: HashMap<(Side, i64, i64, i64), USeries>,
}

impl BasisCache {
    fn get(&mut self, side: Side, k: i64, h: i64, order: i64) -> Result<&USeries> {
        let key = (side, k, h, order);
        if !self.map.contains_key(&key) {
            let (m, sign) = match side {
                Side::Real => (h - 1, 1),
                Side::Complex => (2 * h - 2, if (h - 1).rem_euclid(2) == 0 { 1 } else { -1 }),
            };
            let s = sinh_factor(k);
            let b = if m >= 0 {
                s.pow_u(m as u32).to_u_series(order)
            } else {
                invert_to_order(&s.pow_u((-m) as u32), order)?
            };
            self.map.insert(key, b.scale(&rat(sign)));
        }
        Ok(&self.map[&key])
    }
}

/// An `h` bound large enough for every genus-`g` BPS state of degree ≤ `dmax`:
/// the top `u`-power of a degree-`d` term is `(g−1)` times a hook-length sum,
/// and hook sums never exceed `d(d+1)/2`.
pub fn default_hmax(g: u32, dmax: usize) -> i64 {
    let d = dmax as i64;
    let base = g as i64 + 2 * d;
    if g == 0 {
        return base;
    }
    base.max(1 + (g as i64 - 1) * d * (d + 1) / 2)
}

/// `u`-order at which an extraction up to `hmax` is fully determined.
pub fn required_order(side: Side, hmax: i64) -> i64 {
    match side {
        Side::Real => hmax + 2,
        Side::Complex => 2 * hmax,
    }
}

fn slack(g: u32, dmax: usize) -> i64 {
    if g == 0 {
        2 * dmax as i64 + 4
    } else {
        0
    }
}

fn to_series(q: &QSeries<Coef>, order: i64) -> Result<QSeries<USeries>> {
    let out = q.map(|c| c.to_series(order));
    for (d, c) in out.coeffs().iter().enumerate().skip(1) {
        if c.order() < order {
            return Err(Error::Truncation(format!(
                "degree {d} coefficient only known through u^{}, need u^{order}",
                c.order()
            )));
        }
    }
    Ok(out)
}

fn t_free(s: &crate::ring::Scalar, what: &str) -> Result<Coef> {
    s.t_free()
        .ok_or_else(|| Error::Check(format!("{what} is not t-free at the Calabi–Yau level")))
}

/// `1 + Σ_d RGW_d(g|g−1) q^d`, coefficients exact when `g ≥ 1`.
pub fn real_partition_function(g: u32, dmax: usize, order: i64) -> Result<QSeries<Coef>> {
    check_degree(dmax, MAX_GV_DEGREE)?;
    let mut z = QSeries::one(dmax);
    for d in 1..=dmax {
        let ctx = Context::with_order(d, order + slack(g, dmax))?;
        z.set(d, t_free(&ctx.closed_invariant(g, g as i64 - 1)?, "real invariant")?);
    }
    Ok(z)
}

/// `Z^C_g` after `u ↦ iu`: `1 + Σ_d (−1)^{d(g−1)} DRGW_d(g|g−1,g−1) q^d`.
pub fn complex_partition_function(g: u32, dmax: usize, order: i64) -> Result<QSeries<Coef>> {
    check_degree(dmax, MAX_GV_DEGREE)?;
    let mut z = QSeries::one(dmax);
    let k = g as i64 - 1;
    for d in 1..=dmax {
        let ctx = Context::with_order(d, order + slack(g, dmax))?;
        let c = t_free(&ctx.doublet_invariant(g, k, k)?, "doublet invariant")?;
        let odd = (d as i64 * k).rem_euclid(2) == 1;
        z.set(d, if odd { c.negate() } else { c });
    }
    Ok(z)
}

/// `D_g(q) = ½ log Z^C_g(q²)` through `q^dmax`.
pub fn doublet_series(g: u32, dmax: usize, order: i64) -> Result<QSeries<USeries>> {
    let half = complex_partition_function(g, dmax / 2, order)?.log_q()?;
    let mut out = QSeries::<Coef>::zero(dmax);
    for (d, c) in half.coeffs().iter().enumerate().skip(1) {
        out.set(2 * d, c.scale(&ratio(1, 2)));
    }
    to_series(&out, order)
}

/// The same `D_g`, rebuilt from complex BPS states.
pub fn doublet_series_from_bps(complex: &BpsTable, dmax: usize, order: i64) -> Result<QSeries<USeries>> {
    let mut basis = BasisCache::default();
    let mut out = QSeries::<USeries>::zero(dmax);
    for ((d, h), n) in &complex.entries {
        for k in 1.. {
            let deg = 2 * k * d;
            if deg > dmax {
                break;
            }
            let term = basis
                .get(Side::Complex, k as i64, *h, order)?
                .scale(&(n * ratio(1, 2 * k as i64)));
            out.set(deg, out.coeff(deg).plus(&term));
        }
    }
    Ok(out)
}

/// `C_g = log Z^R_g − D_g`, every coefficient through `u^order`.
pub fn connected_real_series(g: u32, dmax: usize, order: i64) -> Result<QSeries<USeries>> {
    let log_r = to_series(&real_partition_function(g, dmax, order)?.log_q()?, order)?;
    Ok(log_r.minus(&doublet_series(g, dmax, order)?))
}

/// `log Z^C_g` (rotated), every coefficient through `u^order`.
pub fn connected_complex_series(g: u32, dmax: usize, order: i64) -> Result<QSeries<USeries>> {
    to_series(&complex_partition_function(g, dmax, order)?.log_q()?, order)
}

fn extract(series: &QSeries<USeries>, g: u32, hmax: i64, side: Side) -> Result<BpsTable> {
    let dmax = series.dmax();
    let mut table = BpsTable::new(g, side, dmax, hmax);
    let mut basis = BasisCache::default();
    let need = required_order(side, hmax) - 2;
    for d in 1..=dmax {
        let mut res = series.coeff(d).clone();
        let order = res.order();
        if order < need {
            return Err(Error::Truncation(format!(
                "degree {d} known through u^{order}; h ≤ {hmax} needs u^{need}"
            )));
        }
        // Multiple covers of lower degrees.
        for k in 2..=d {
            if d % k != 0 || (side == Side::Real && k % 2 == 0) {
                continue;
            }
            for (h, n) in table.degree(d / k) {
                let b = basis.get(side, k as i64, h, order)?;
                res = res.minus(&b.scale(&(n * ratio(1, k as i64))));
            }
        }
        while !res.is_zero() {
            let v = res.valuation();
            let h = match side {
                Side::Real => v + 1,
                Side::Complex if v.is_even() => v / 2 + 1,
                Side::Complex => {
                    return Err(Error::Extraction(format!(
                        "degree {d}: odd power u^{v} in a complex residual {res}"
                    )))
                }
            };
            if h < 0 {
                return Err(Error::Extraction(format!("degree {d}: residual {res} below the basis")));
            }
            if h > hmax {
                return Err(Error::Truncation(format!(
                    "degree {d}: BPS support reaches h = {h} > hmax = {hmax}"
                )));
            }
            let b = basis.get(side, 1, h, order)?;
            let lead = b.coeff(v);
            if b.valuation() != v || !lead.abs().is_one() {
                return Err(Error::Extraction(format!("basis element h={h} is not unitriangular")));
            }
            let n = res.coeff(v) / &lead;
            res = res.minus(&b.scale(&n));
            table.insert(d, h, n);
        }
    }
    Ok(table)
}

/// Triangular solve of `series = Σ n_{d,h} Σ_{k odd} (1/k)(2 sinh(ku/2))^{h−1} q^{kd}`.
pub fn extract_real_bps(series: &QSeries<USeries>, g: u32, hmax: i64) -> Result<BpsTable> {
    extract(series, g, hmax, Side::Real)
}

/// Same, for `Σ n^C_{d,h} (−1)^{h−1} Σ_k (1/k)(2 sinh(ku/2))^{2h−2} q^{kd}`.
pub fn extract_complex_from(series: &QSeries<USeries>, g: u32, hmax: i64) -> Result<BpsTable> {
    extract(series, g, hmax, Side::Complex)
}

pub fn extract_complex_bps(g: u32, dmax: usize, hmax: i64) -> Result<BpsTable> {
    let order = required_order(Side::Complex, hmax);
    extract_complex_from(&connected_complex_series(g, dmax, order)?, g, hmax)
}

fn resynthesis_agrees(table: &BpsTable, series: &QSeries<USeries>) -> Result<bool> {
    let order = series.coeffs().iter().skip(1).map(USeries::order).min().unwrap_or(0);
    let back = table.resynthesize(order)?;
    Ok((1..=series.dmax()).all(|d| back.coeff(d).agrees(series.coeff(d))))
}

/// Everything `gv_verify` computes.
#[derive(Clone, Debug)]
pub struct GvOutcome {
    pub genus: u32,
    pub real: BpsTable,
    pub complex: BpsTable,
    /// `½ log Z^C(q²)` against its rebuild from `n^C`.
    pub doublet_consistent: bool,
    /// Comparison with the known tables, for `g ≤ 1` only.
    pub closed_form: Option<bool>,
}

impl GvOutcome {
    pub fn pass(&self) -> bool {
        self.real.report.pass()
            && self.complex.report.pass()
            && self.doublet_consistent
            && self.closed_form != Some(false)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "genus": self.genus,
            "real": self.real.to_json(),
            "complex": self.complex.to_json(),
            "doublet_consistent": self.doublet_consistent,
            "closed_form": self.closed_form,
            "pass": self.pass(),
        })
    }
}

fn closed_form_matches(t: &BpsTable) -> Option<bool> {
    let want: BTreeMap<(usize, i64), Rational> = match (t.genus, t.side) {
        (0, _) => [((1, 0), rat(1))].into_iter().collect(),
        (1, Side::Real) => (1..=t.dmax)
            .map(|d| ((d, 1), rat(if d % 2 == 1 { 1 } else { -1 })))
            .collect(),
        (1, Side::Complex) => (1..=t.dmax).map(|d| ((d, 1), rat(1))).collect(),
        _ => return None,
    };
    Some(t.entries == want)
}

/// Extracts both tables and runs integrality, parity, vanishing, support
/// and re-synthesis checks. `order` is raised to what `hmax` requires.
pub fn gv_verify(g: u32, dmax: usize, hmax: i64, order: i64) -> Result<GvOutcome> {
    let r_order = order.max(required_order(Side::Real, hmax));
    let c_order = order.max(required_order(Side::Complex, hmax));
    let real_series = connected_real_series(g, dmax, r_order)?;
    let mut real = extract_real_bps(&real_series, g, hmax)?;
    let complex_series = connected_complex_series(g, dmax, c_order)?;
    let mut complex = extract_complex_from(&complex_series, g, hmax)?;

    real.report.resynthesis = Some(resynthesis_agrees(&real, &real_series)?);
    complex.report.resynthesis = Some(resynthesis_agrees(&complex, &complex_series)?);

    let two = rat(2);
    for d in 1..=dmax {
        for h in 0..=hmax {
            let nr = real.get(d, h);
            let diff = &nr - complex.get(d, h);
            if diff.is_integer() && !(diff / &two).is_integer() {
                real.report.parity.push((d, h));
            }
            let odd = (d as i64 * (g as i64 - 1) + h - 1).rem_euclid(2) == 1;
            if odd && !Zero::is_zero(&nr) {
                real.report.vanishing.push((d, h));
            }
            if g >= 1 && h < g as i64 && !Zero::is_zero(&nr) {
                real.report.support.push((d, h));
            }
            if d == 1 && nr != rat((h == g as i64) as i64) {
                real.report.support.push((d, h));
            }
        }
    }

    let direct = doublet_series(g, dmax, r_order)?;
    let rebuilt = doublet_series_from_bps(&complex, dmax, r_order)?;
    let doublet_consistent = (1..=dmax).all(|d| direct.coeff(d).agrees(rebuilt.coeff(d)));

    let closed_form = match (closed_form_matches(&real), closed_form_matches(&complex)) {
        (Some(a), Some(b)) => Some(a && b),
        _ => None,
    };
    Ok(GvOutcome { genus: g, real, complex, doublet_consistent, closed_form })
}

/// `f(Q) = Q − Q^{−1}` and `F(Q) = 2 − Q − Q^{−1}`: for `s ≤ smax` the
/// coefficients of `f^s` and `F^s` are integers, agree mod 2, and the
/// extreme ones are `±1`.
pub fn f_parity_check(smax: u32) -> Result<bool> {
    let f = sinh_factor(1);
    let big_f = SPoly::from_terms([(0, rat(2)), (1, rat(-1)), (-1, rat(-1))]);
    for s in 0..=smax {
        let (a, b) = (f.pow_u(s), big_f.pow_u(s));
        let si = s as i64;
        for l in -si..=si {
            let (x, y) = (a.coeff(l), b.coeff(l));
            if !x.is_integer() || !y.is_integer() || !((x - y) / rat(2)).is_integer() {
                return Err(Error::Check(format!("f^{s} and F^{s} differ mod 2 at Q^{l}")));
            }
        }
        for l in [-si, si] {
            if !a.coeff(l).abs().is_one() || !b.coeff(l).abs().is_one() {
                return Err(Error::Check(format!("leading coefficient of f^{s} or F^{s} is not ±1")));
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: &BpsTable, d: usize) -> Vec<(i64, i64)> {
        t.degree(d)
            .into_iter()
            .map(|(h, n)| (h, n.to_integer().try_into().unwrap()))
            .collect()
    }

    #[test]
    fn genus_zero_and_one_closed_forms() {
        for g in [0, 1] {
            let out = gv_verify(g, 5, default_hmax(g, 5), 12).unwrap();
            assert!(out.pass(), "{:?}", out.real.report);
            assert_eq!(out.closed_form, Some(true));
        }
    }

    #[test]
    fn genus_two_small_degrees() {
        let out = gv_verify(2, 4, default_hmax(2, 4), 0).unwrap();
        assert!(out.pass(), "{:?} {:?}", out.real.report, out.complex.report);
        assert_eq!(row(&out.real, 1), vec![(2, 1)]);
        assert_eq!(row(&out.real, 2), vec![]);
        assert_eq!(row(&out.real, 3), vec![(2, -1), (4, -3), (6, -1)]);
        assert_eq!(row(&out.real, 4), vec![(5, -13), (7, -7), (9, -1)]);
        assert_eq!(row(&out.complex, 2), vec![(2, -2), (3, 8), (4, -2)]);
    }

    #[test]
    fn too_small_hmax_is_a_truncation() {
        let s = connected_real_series(2, 4, 10).unwrap();
        assert!(matches!(extract_real_bps(&s, 2, 6), Err(Error::Truncation(_))));
        let s = connected_real_series(2, 2, 3).unwrap();
        assert!(matches!(extract_real_bps(&s, 2, 6), Err(Error::Truncation(_))));
    }

    #[test]
    fn f_and_big_f_agree_mod_two() {
        assert!(f_parity_check(12).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let out = gv_verify(1, 3, default_hmax(1, 3), 0).unwrap();
        let back = BpsTable::from_json(&out.real.to_json()).unwrap();
        assert_eq!(back, out.real);
    }
}
