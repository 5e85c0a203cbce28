//! Integer partitions and the combinatorial quantities attached to them.
//!
//! A [`Partition`] doubles as a Young diagram (representations of S_d) and
//! as a cycle type (conjugacy classes of S_d).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};

/// Default upper bound on the degree accepted by table-building entry points.
pub const DEFAULT_MAX_DEGREE: usize = 12;
/// Hard ceiling: beyond this, `d!` no longer fits the `i64` character arithmetic.
pub const HARD_MAX_DEGREE: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<usize>) -> Partition {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// `(1^d)`.
    pub fn ones(d: usize) -> Partition {
        Partition { parts: vec![1; d] }
    }

    /// The one-row partition `(d)`.
    pub fn row(d: usize) -> Partition {
        Partition::new(vec![d])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Multiplicity `m_k` of the part `k`.
    pub fn multiplicity(&self, k: usize) -> usize {
        self.parts.iter().filter(|&&p| p == k).count()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (0..width)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count())
            .collect();
        Partition { parts }
    }

    pub fn is_self_conjugate(&self) -> bool {
        *self == self.conjugate()
    }

    /// Length of the main diagonal.
    pub fn rank(&self) -> usize {
        self.parts
            .iter()
            .enumerate()
            .filter(|(i, &p)| p > *i)
            .count()
    }

    /// Hook lengths, row by row.
    pub fn hooks(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.degree());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                out.push((row - j - 1) + (conj.parts[j] - i - 1) + 1);
            }
        }
        out
    }

    /// Σ over cells of (column − row).
    pub fn content_sum(&self) -> i64 {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &row)| (0..row).map(|j| j as i64 - i as i64).sum::<i64>())
            .sum()
    }

    /// dim ρ = d! / ∏ hooks.
    pub fn dim_rep(&self) -> BigInt {
        let prod: BigInt = self.hooks().into_iter().map(BigInt::from).product();
        factorial(self.degree()) / prod
    }

    /// ζ(λ) = ∏ m_k! k^{m_k}, the order of the centralizer.
    pub fn zeta(&self) -> BigInt {
        let mut z = BigInt::one();
        let mut i = 0;
        while i < self.parts.len() {
            let k = self.parts[i];
            let m = self.parts[i..].iter().take_while(|&&p| p == k).count();
            z *= factorial(m) * BigInt::from(k).pow(m as u32);
            i += m;
        }
        z
    }

    /// Cycle type of g² when g has cycle type λ: each even part splits in two.
    pub fn sq(&self) -> Partition {
        let mut parts = Vec::with_capacity(2 * self.parts.len());
        for &p in &self.parts {
            if p % 2 == 0 {
                parts.push(p / 2);
                parts.push(p / 2);
            } else {
                parts.push(p);
            }
        }
        Partition::new(parts)
    }

    /// (−1)^{d−ℓ}.
    pub fn sign(&self) -> i64 {
        if (self.degree() - self.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even_class(&self) -> bool {
        self.sign() == 1
    }

    pub fn num_even_parts(&self) -> usize {
        self.parts.iter().filter(|&&p| p % 2 == 0).count()
    }
}

/// Reverse lexicographic: `(3) < (2,1) < (1,1,1)`.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        other.parts.cmp(&self.parts)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Accepts `"2,1,1"`, `"(2,1,1)"` or `"2 1 1"`.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Partition> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut parts = Vec::new();
        for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let p: usize = tok
                .parse()
                .map_err(|_| Error::Argument(format!("bad partition part {tok:?} in {s:?}")))?;
            if p == 0 {
                return Err(Error::Argument(format!("zero part in partition {s:?}")));
            }
            parts.push(p);
        }
        if parts.is_empty() {
            return Err(Error::Argument(format!("empty partition {s:?}")));
        }
        Ok(Partition::new(parts))
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

pub fn check_degree(d: usize, max: usize) -> Result<()> {
    if d == 0 || d > max.min(HARD_MAX_DEGREE) {
        return Err(Error::Bounds(format!(
            "degree {d} outside 1..={}",
            max.min(HARD_MAX_DEGREE)
        )));
    }
    Ok(())
}

/// All partitions of `d`, reverse-lexicographic, with the default bound.
pub fn partitions_of(d: usize) -> Result<Vec<Partition>> {
    partitions_of_bounded(d, DEFAULT_MAX_DEGREE)
}

pub fn partitions_of_bounded(d: usize, max: usize) -> Result<Vec<Partition>> {
    check_degree(d, max)?;
    Ok(enumerate(d))
}

/// Unchecked enumeration; `enumerate(0)` is `[()]`.
pub(crate) fn enumerate(d: usize) -> Vec<Partition> {
    fn go(rest: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=cap.min(rest)).rev() {
            cur.push(p);
            go(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    // Counting compositions-with-nonincreasing-parts by a generating-function
    // recurrence, independently of the enumerator.
    fn partition_count(n: usize) -> usize {
        let mut ways = vec![0usize; n + 1];
        ways[0] = 1;
        for k in 1..=n {
            for m in k..=n {
                ways[m] += ways[m - k];
            }
        }
        ways[n]
    }

    #[test]
    fn counts() {
        assert_eq!(partitions_of(1).unwrap(), vec![p(&[1])]);
        assert_eq!(partitions_of(4).unwrap().len(), 5);
        assert_eq!(partitions_of(10).unwrap().len(), 42);
        for d in 1..=12 {
            assert_eq!(partitions_of(d).unwrap().len(), partition_count(d));
        }
        assert!(partitions_of(0).is_err());
        assert!(partitions_of(13).is_err());
        assert_eq!(partitions_of_bounded(13, 14).unwrap().len(), 101);
    }

    #[test]
    fn ordering_is_reverse_lex() {
        let ps = partitions_of(4).unwrap();
        let want = vec![p(&[4]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])];
        assert_eq!(ps, want);
        let mut sorted = ps.clone();
        sorted.sort();
        assert_eq!(sorted, ps);
    }

    #[test]
    fn examples() {
        assert_eq!(p(&[2, 1, 1]).conjugate(), p(&[3, 1]));
        assert_eq!(p(&[2, 2]).conjugate(), p(&[2, 2]));
        assert_eq!(p(&[4, 3, 3, 2, 1]).conjugate(), p(&[5, 4, 3, 1]));

        assert_eq!(p(&[1]).rank(), 1);
        assert_eq!(p(&[2, 2]).rank(), 2);
        assert_eq!(p(&[5, 1, 1, 1, 1]).rank(), 1);

        let mut h = p(&[2, 2]).hooks();
        h.sort();
        assert_eq!(h, vec![1, 2, 2, 3]);
        let mut h = p(&[2, 1]).hooks();
        h.sort();
        assert_eq!(h, vec![1, 1, 3]);

        assert_eq!(p(&[5]).dim_rep(), BigInt::from(1));
        assert_eq!(p(&[2, 1]).dim_rep(), BigInt::from(2));
        assert_eq!(p(&[2, 2]).dim_rep(), BigInt::from(2));

        assert_eq!(p(&[2, 1]).content_sum(), 0);
        assert_eq!(p(&[2]).content_sum(), 1);
        assert_eq!(p(&[3]).content_sum(), 3);

        assert_eq!(p(&[1]).zeta(), BigInt::from(1));
        assert_eq!(p(&[2, 2]).zeta(), BigInt::from(8));
        assert_eq!(p(&[3, 1, 1]).zeta(), BigInt::from(6));

        assert_eq!(p(&[4, 3, 3, 2, 1]).sq(), p(&[2, 2, 3, 3, 1, 1, 1]));
        assert_eq!(Partition::ones(5).sq(), Partition::ones(5));
        assert_eq!(p(&[2]).sq(), p(&[1, 1]));

        assert_eq!(p(&[1, 1, 1]).sign(), 1);
        assert_eq!(p(&[2]).sign(), -1);
        assert_eq!(p(&[3, 2]).sign(), -1);
    }

    #[test]
    fn parse_and_display() {
        let q: Partition = "(3,1,1)".parse().unwrap();
        assert_eq!(q, p(&[3, 1, 1]));
        assert_eq!(q.to_string(), "(3,1,1)");
        assert_eq!("1 3 1".parse::<Partition>().unwrap(), q);
        assert!("2,0".parse::<Partition>().is_err());
        assert!("".parse::<Partition>().is_err());
        assert!("a".parse::<Partition>().is_err());
    }

    #[test]
    fn global_identities() {
        for d in 1..=12 {
            let ps = partitions_of(d).unwrap();
            let fact = factorial(d);
            let mut dim_sq = BigInt::from(0);
            let mut class_total = BigInt::from(0);
            for l in &ps {
                assert_eq!(l.conjugate().conjugate(), *l);
                assert_eq!(l.rank(), l.conjugate().rank());
                assert_eq!(l.content_sum(), -l.conjugate().content_sum());
                let hp: BigInt = l.hooks().into_iter().map(BigInt::from).product();
                assert_eq!(l.dim_rep() * hp, fact);
                dim_sq += l.dim_rep() * l.dim_rep();
                class_total += &fact / l.zeta();
                assert_eq!(l.sq().sign(), 1);
                assert_eq!(l.sq().degree(), d);
                assert_eq!((d - l.len()) % 2, l.num_even_parts() % 2);
                if l.is_self_conjugate() {
                    assert_eq!(l.content_sum(), 0);
                }
            }
            assert_eq!(dim_sq, fact);
            assert_eq!(class_total, fact);
        }
    }
}
