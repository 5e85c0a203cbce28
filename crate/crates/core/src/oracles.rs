//! Brute-force computations that validate the representation-theoretic
//! inputs independently of the closed formulas used by [`crate::tqft`].

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::characters::CharacterTable;
use crate::combinatorics::{check_degree, enumerate, factorial, Partition, DEFAULT_MAX_DEGREE};
use crate::error::{Error, Result};
use crate::powersum::level0_cap_coefficients;
use crate::ring::{rat, rat_big, ratio, Rational, USeries};
use crate::tqft::crosscap_sign;

/// Largest degree for element-by-element iteration over S_d.
pub const MAX_ELEMENT_DEGREE: usize = 7;
pub const MAX_SFS_DEGREE: usize = 8;

// ---- permutations ----------------------------------------------------------

/// All permutations of `0..n`, lexicographic.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

pub fn cycle_type(perm: &[usize]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts)
}

/// `(a∘b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

pub fn inverse(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x] = i;
    }
    out
}

/// A permutation with the given cycle type.
pub fn representative(p: &Partition) -> Vec<usize> {
    let mut perm = Vec::with_capacity(p.degree());
    let mut base = 0;
    for &len in p.parts() {
        for i in 0..len {
            perm.push(base + (i + 1) % len);
        }
        base += len;
    }
    perm
}

// ---- characters by the Frobenius formula ------------------------------------

/// Number of ways to place the parts of `alpha` into boxes with sums `target`.
fn placements(alpha: &[usize], target: &mut [i64]) -> i64 {
    let Some((&first, rest)) = alpha.split_first() else {
        return target.iter().all(|&x| x == 0) as i64;
    };
    let mut total = 0;
    for j in 0..target.len() {
        if target[j] >= first as i64 {
            target[j] -= first as i64;
            total += placements(rest, target);
            target[j] += first as i64;
        }
    }
    total
}

/// `χ_λ(α)` as the coefficient of `x^{λ+δ}` in `a_δ · p_α`, in ℓ(λ) variables.
/// Shares nothing with the border-strip recursion.
pub fn character_frobenius(lambda: &Partition, alpha: &Partition) -> i64 {
    let n = lambda.len();
    let shifted: Vec<i64> = (0..n).map(|i| (lambda.parts()[i] + n - 1 - i) as i64).collect();
    let mut total = 0;
    for sigma in permutations(n) {
        // a_δ = Σ_σ sign(σ) x^{σ(δ)}; δ_j = n−1−j.
        let sign = cycle_type(&sigma).sign();
        let mut target: Vec<i64> = (0..n).map(|j| shifted[j] - (n - 1 - sigma[j]) as i64).collect();
        if target.iter().any(|&x| x < 0) {
            continue;
        }
        total += sign * placements(alpha.parts(), &mut target);
    }
    total
}

/// Brute-force class-algebra structure constants: `C_α C_β = Σ_γ N^γ_{αβ} C_γ`
/// for class sums in `Q[S_d]`, keyed by canonical indices.
pub fn class_algebra_constants(d: usize) -> Result<BTreeMap<(usize, usize, usize), i64>> {
    check_degree(d, 6)?;
    let parts = enumerate(d);
    let index: BTreeMap<Partition, usize> =
        parts.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let perms = permutations(d);
    let types: Vec<usize> = perms.iter().map(|p| index[&cycle_type(p)]).collect();
    let mut out = BTreeMap::new();
    for (c, gamma) in parts.iter().enumerate() {
        let z = representative(gamma);
        for (x, &a) in perms.iter().zip(&types) {
            let b = index[&cycle_type(&compose(&inverse(x), &z))];
            *out.entry((a, b, c)).or_insert(0) += 1;
        }
    }
    Ok(out)
}

// ---- signed Frobenius–Schur indicator ---------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfsRow {
    pub rho: Partition,
    /// Element-by-element value; `None` above [`MAX_ELEMENT_DEGREE`].
    pub element_sum: Option<Rational>,
    pub class_sum: Rational,
    /// `(−1)^{(d−r)/2}` if self-conjugate, else 0.
    pub formula: i64,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfsReport {
    pub d: usize,
    pub rows: Vec<SfsRow>,
}

impl SfsReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

/// `(1/d!) Σ_{g∈S_d} χ_ρ(g²) sign(g)` by iterating over the group.
pub fn sfs_bruteforce(table: &CharacterTable, rho: &Partition) -> Result<Rational> {
    let d = rho.degree();
    check_degree(d, MAX_ELEMENT_DEGREE)?;
    let r = row(table, rho)?;
    let mut total = 0i64;
    for g in permutations(d) {
        let ty = cycle_type(&g);
        let sq = cycle_type(&compose(&g, &g));
        total += ty.sign() * table.value(r, table.index_of(&sq).unwrap());
    }
    Ok(Rational::new(total.into(), factorial(d)))
}

/// Class-sum form `Σ_α sign(α) χ_ρ(sq α)/ζ(α)`.
pub fn sfs_class_sum(table: &CharacterTable, rho: &Partition) -> Result<Rational> {
    let r = row(table, rho)?;
    Ok(table
        .partitions()
        .iter()
        .map(|a| {
            let chi = table.value(r, table.index_of(&a.sq()).unwrap());
            rat(a.sign() * chi) / rat_big(&a.zeta())
        })
        .fold(Rational::zero(), |x, y| x + y))
}

fn row(table: &CharacterTable, rho: &Partition) -> Result<usize> {
    table
        .index_of(rho)
        .ok_or_else(|| Error::Argument(format!("{rho} not in the degree-{} table", table.degree())))
}

pub fn sfs_report(table: &CharacterTable) -> Result<SfsReport> {
    let d = table.degree();
    check_degree(d, MAX_SFS_DEGREE)?;
    let mut rows = Vec::new();
    for rho in table.partitions() {
        let element_sum = if d <= MAX_ELEMENT_DEGREE {
            Some(sfs_bruteforce(table, rho)?)
        } else {
            None
        };
        let class_sum = sfs_class_sum(table, rho)?;
        let formula = if rho.is_self_conjugate() { crosscap_sign(rho) } else { 0 };
        let matches = class_sum == rat(formula)
            && element_sum.as_ref().map_or(true, |e| *e == class_sum);
        rows.push(SfsRow { rho: rho.clone(), element_sum, class_sum, formula, matches });
    }
    Ok(SfsReport { d, rows })
}

/// `o(ρ) = Σ_{β odd} χ_ρ(sq β)/ζ(β)`.
pub fn odd_square_indicator(table: &CharacterTable, rho: &Partition) -> Result<Rational> {
    let r = row(table, rho)?;
    Ok(table
        .partitions()
        .iter()
        .filter(|b| b.sign() == -1)
        .map(|b| rat(table.value(r, table.index_of(&b.sq()).unwrap())) / rat_big(&b.zeta()))
        .fold(Rational::zero(), |x, y| x + y))
}

/// Both sides of `Σ_{sq β=α} sign(β) ζ(α)/ζ(β) = Σ_{ρ=ρ′} ε_ρ χ_ρ(α)`.
pub fn sfs_identity_sides(table: &CharacterTable, alpha: &Partition) -> Result<(Rational, Rational)> {
    let a = row(table, alpha)?;
    let za = rat_big(&alpha.zeta());
    let lhs = table
        .partitions()
        .iter()
        .filter(|b| b.sq() == *alpha)
        .map(|b| rat(b.sign()) * &za / rat_big(&b.zeta()))
        .fold(Rational::zero(), |x, y| x + y);
    let rhs = table
        .partitions()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_self_conjugate())
        .map(|(r, rho)| rat(crosscap_sign(rho) * table.value(r, a)))
        .fold(Rational::zero(), |x, y| x + y);
    Ok((lhs, rhs))
}

pub fn sfs_identity_check(table: &CharacterTable, alpha: &Partition) -> Result<bool> {
    check_degree(alpha.degree(), 10)?;
    let (l, r) = sfs_identity_sides(table, alpha)?;
    if l != r {
        return Err(Error::Check(format!("identity fails at {alpha}: {l} vs {r}")));
    }
    Ok(true)
}

// ---- level-0 cap coefficients -----------------------------------------------

/// `r_α = Σ_{sq λ = α} (−1)^{d−ℓ(λ)}/ζ(λ)`.
pub fn r_alpha_sq_fiber(d: usize) -> BTreeMap<Partition, Rational> {
    let mut out: BTreeMap<Partition, Rational> = BTreeMap::new();
    for l in enumerate(d) {
        *out.entry(l.sq()).or_insert_with(Rational::zero) += rat(l.sign()) / rat_big(&l.zeta());
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Compares the exponential expansion with the sq-fiber sum for every α ⊢ d
/// and checks the even-parts vanishing rule.
pub fn r_alpha_crosscheck(d: usize) -> Result<bool> {
    check_degree(d, 10.min(DEFAULT_MAX_DEGREE))?;
    let a = level0_cap_coefficients(d);
    let b = r_alpha_sq_fiber(d);
    for alpha in enumerate(d) {
        let x = a.get(&alpha).cloned().unwrap_or_else(Rational::zero);
        let y = b.get(&alpha).cloned().unwrap_or_else(Rational::zero);
        if x != y {
            return Err(Error::Check(format!("r_{alpha}: expansion {x} vs fiber {y}")));
        }
        if alpha.num_even_parts() % 2 == 1 && !x.is_zero() {
            return Err(Error::Check(format!("r_{alpha} = {x} despite an odd number of even parts")));
        }
    }
    Ok(true)
}

// ---- complex side -----------------------------------------------------------

/// `2 sin(hu/2)` from its Taylor series, through `u^order`.
pub fn two_sin(h: i64, order: i64) -> USeries {
    let half = ratio(h, 2);
    let mut terms = Vec::new();
    let mut j = 0i64;
    while 2 * j + 1 <= order {
        let n = 2 * j + 1;
        let c = rat(2 * if j % 2 == 0 { 1 } else { -1 }) * half.pow(n as i32) / rat_big(&factorial(n as usize));
        terms.push((n, c));
        j += 1;
    }
    USeries::from_coeffs(terms, order)
}

/// `(−1)^{d(g−1)} Σ_{ρ⊢d} (∏_□ 2 sin(h(□)u/2))^{2g−2}` evaluated at `iu`,
/// through `u^order`: the value a genus-`g` doublet at levels `(g−1, g−1)` must take.
pub fn rotated_complex_cy(d: usize, g: u32, order: i64) -> Result<USeries> {
    check_degree(d, DEFAULT_MAX_DEGREE)?;
    let m = 2 * g as i64 - 2;
    let work = order + 4 * d as i64 + 4;
    let mut total = USeries::zero_to(work);
    for rho in enumerate(d) {
        let prod = rho
            .hooks()
            .iter()
            .fold(<USeries as crate::ring::Ring>::one(), |acc, &h| crate::ring::Ring::times(&acc, &two_sin(h as i64, work)));
        let p = if m >= 0 {
            crate::ring::Ring::pow_u(&prod, m as u32)
        } else {
            crate::ring::Ring::pow_u(&prod.inverse_to(work)?, (-m) as u32)
        };
        total = crate::ring::Ring::plus(&total, &p);
    }
    if total.order() < order {
        return Err(Error::Truncation(format!("rotated complex series known through u^{}", total.order())));
    }
    let mut rotated = Vec::new();
    for (&n, c) in total.truncate(order).coeffs() {
        if n % 2 != 0 {
            return Err(Error::Check(format!("odd power u^{n} in an even function")));
        }
        rotated.push((n, if (n / 2).rem_euclid(2) == 0 { c.clone() } else { -c }));
    }
    let sign = if (d as i64 * (g as i64 - 1)).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(crate::ring::Ring::scale(&USeries::from_coeffs(rotated, order), &rat(sign)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character_table;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn permutation_basics() {
        assert_eq!(permutations(4).len(), 24);
        for l in enumerate(6) {
            assert_eq!(cycle_type(&representative(&l)), l);
        }
        let g = representative(&p(&[4, 3, 3, 2, 1]));
        assert_eq!(cycle_type(&compose(&g, &g)), p(&[4, 3, 3, 2, 1]).sq());
    }

    #[test]
    fn frobenius_matches_border_strips() {
        for d in 1..=6 {
            let t = character_table(d).unwrap();
            for (r, rho) in t.partitions().iter().enumerate() {
                for (a, alpha) in t.partitions().iter().enumerate() {
                    assert_eq!(character_frobenius(rho, alpha), t.value(r, a), "{rho} on {alpha}");
                }
            }
        }
    }

    #[test]
    fn regular_representation_decomposes() {
        // Σ_ρ dim ρ · χ_ρ is the regular character: d! at the identity, 0 elsewhere.
        for d in 1..=4 {
            let t = character_table(d).unwrap();
            for (a, alpha) in t.partitions().iter().enumerate() {
                let reg: i64 = (0..t.len()).map(|r| t.dim(r) * t.value(r, a)).sum();
                let want = if *alpha == Partition::ones(d) {
                    (1..=d as i64).product()
                } else {
                    0
                };
                assert_eq!(reg, want);
            }
            // Brute-force trace of the regular representation.
            for alpha in t.partitions() {
                let g = representative(alpha);
                let fixed = permutations(d).iter().filter(|x| compose(&g, x) == **x).count();
                let a = t.index_of(alpha).unwrap();
                let reg: i64 = (0..t.len()).map(|r| t.dim(r) * t.value(r, a)).sum();
                assert_eq!(reg, fixed as i64);
            }
        }
    }

    #[test]
    fn sfs_examples() {
        let t3 = character_table(3).unwrap();
        assert_eq!(sfs_bruteforce(&t3, &p(&[2, 1])).unwrap(), rat(-1));
        assert_eq!(sfs_bruteforce(&t3, &p(&[3])).unwrap(), rat(0));
        let t1 = character_table(1).unwrap();
        assert_eq!(sfs_bruteforce(&t1, &p(&[1])).unwrap(), rat(1));
        assert!(sfs_bruteforce(&character_table(8).unwrap(), &p(&[8])).is_err());
        for d in 1..=6 {
            assert!(sfs_report(&character_table(d).unwrap()).unwrap().pass());
        }
    }

    #[test]
    fn identity_and_r_alpha_examples() {
        let t1 = character_table(1).unwrap();
        assert_eq!(sfs_identity_sides(&t1, &p(&[1])).unwrap(), (rat(1), rat(1)));
        let t2 = character_table(2).unwrap();
        for a in [p(&[2]), p(&[1, 1])] {
            let (l, r) = sfs_identity_sides(&t2, &a).unwrap();
            assert_eq!(l, r);
        }
        let f = r_alpha_sq_fiber(4);
        // Only λ=(4) squares to (2,2).
        assert_eq!(f.get(&p(&[2, 2])), Some(&ratio(-1, 4)));
        assert_eq!(level0_cap_coefficients(4).get(&p(&[2, 2])), Some(&ratio(-1, 4)));
        assert_eq!(f.get(&p(&[2])), None);
        for d in 1..=6 {
            assert!(r_alpha_crosscheck(d).unwrap());
        }
    }

    #[test]
    fn class_algebra_matches_transported_product() {
        use crate::ring::{Ring, Scalar};
        use crate::tqft::Context;
        for d in 1..=5 {
            let c = Context::new(d).unwrap();
            let n = class_algebra_constants(d).unwrap();
            let ps = c.partitions().to_vec();
            for (i, a) in ps.iter().enumerate() {
                for (j, b) in ps.iter().enumerate() {
                    let prod = c.multiply(&c.e(a).unwrap(), &c.e(b).unwrap());
                    for (k, g) in ps.iter().enumerate() {
                        let nn = n.get(&(i, j, k)).copied().unwrap_or(0);
                        let e = d as i64 - a.len() as i64 - b.len() as i64 + g.len() as i64;
                        let want = if nn == 0 { Scalar::zero() } else { Scalar::t_monomial(e, rat(nn)) };
                        assert_eq!(prod.coeff(g), want, "d={d} {a}·{b} at {g}");
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_independent_pants_display_is_not_the_product() {
        // t^{d−ℓα−ℓβ+ℓγ} Σ_ρ (d!/dim ρ) χ_ρ(α)χ_ρ(β)/(ζ(α)ζ(β)) has no χ_ρ(γ);
        // at d=2 it already disagrees with the algebra's e_(2)·e_(2) = t² e_(1,1).
        let t = character_table(2).unwrap();
        let a = t.index_of(&p(&[2])).unwrap();
        let s: Rational = (0..t.len())
            .map(|r| ratio(2, t.dim(r)) * rat(t.value(r, a) * t.value(r, a)) / rat(4))
            .fold(Rational::zero(), |x, y| x + y);
        // Coefficient it predicts on e_(2) is nonzero, the true one is zero.
        assert_ne!(s, rat(0));
    }

    #[test]
    fn rotated_complex_matches_doublet() {
        use crate::tqft::Context;
        let c = Context::new(2).unwrap();
        let x = rotated_complex_cy(2, 2, 12).unwrap();
        let y = c.doublet_invariant(2, 1, 1).unwrap().t_free().unwrap().to_series(12);
        assert_eq!(x, y);
        let c = Context::with_order(1, 30).unwrap();
        let x = rotated_complex_cy(1, 0, 10).unwrap();
        let y = c.doublet_invariant(0, -1, -1).unwrap().t_free().unwrap().to_series(10);
        assert_eq!(x, y);
    }
}
