//! Irreducible characters of S_d by the Murnaghan–Nakayama rule.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::combinatorics::{check_degree, enumerate, Partition, DEFAULT_MAX_DEGREE};
use crate::error::{Error, Result};

/// Bumped whenever the serialized layout changes; stale cache files are ignored.
pub const TABLE_FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    d: usize,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// `values[ρ][α]`.
    values: Vec<Vec<i64>>,
}

/// Beta-set (first-column hook lengths) of a partition padded to `len` rows.
fn beta_set(rho: &Partition, len: usize) -> Vec<usize> {
    (0..len)
        .map(|i| rho.parts().get(i).copied().unwrap_or(0) + len - 1 - i)
        .collect()
}

fn from_beta(mut beta: Vec<usize>) -> Partition {
    beta.sort_unstable_by(|a, b| b.cmp(a));
    let len = beta.len();
    Partition::new(beta.iter().enumerate().map(|(i, &b)| b - (len - 1 - i)).collect())
}

struct Mn {
    memo: HashMap<(Partition, Partition), i64>,
}

impl Mn {
    fn chi(&mut self, rho: &Partition, alpha: &Partition) -> i64 {
        if alpha.is_empty() {
            return 1;
        }
        let key = (rho.clone(), alpha.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let k = alpha.parts()[0];
        let rest = Partition::new(alpha.parts()[1..].to_vec());
        let beta = beta_set(rho, rho.len());
        let mut total = 0i64;
        for (i, &b) in beta.iter().enumerate() {
            if b < k || beta.contains(&(b - k)) {
                continue;
            }
            // Height of the removed border strip = beads jumped over.
            let height = beta.iter().filter(|&&c| c > b - k && c < b).count();
            let mut next = beta.clone();
            next[i] = b - k;
            let v = self.chi(&from_beta(next), &rest);
            total += if height % 2 == 0 { v } else { -v };
        }
        self.memo.insert(key, total);
        total
    }
}

/// Single character value; `|ρ| = |α|` required.
pub fn character(rho: &Partition, alpha: &Partition) -> Result<i64> {
    if rho.degree() != alpha.degree() {
        return Err(Error::Argument(format!(
            "character of {rho} on {alpha}: sizes differ"
        )));
    }
    Ok(Mn { memo: HashMap::new() }.chi(rho, alpha))
}

pub fn character_table(d: usize) -> Result<CharacterTable> {
    CharacterTable::build(d, DEFAULT_MAX_DEGREE)
}

impl CharacterTable {
    pub fn build(d: usize, max: usize) -> Result<CharacterTable> {
        check_degree(d, max)?;
        let partitions = enumerate(d);
        let mut mn = Mn { memo: HashMap::new() };
        let values = partitions
            .iter()
            .map(|rho| partitions.iter().map(|a| mn.chi(rho, a)).collect())
            .collect();
        Ok(Self::assemble(d, partitions, values))
    }

    fn assemble(d: usize, partitions: Vec<Partition>, values: Vec<Vec<i64>>) -> CharacterTable {
        let index = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        CharacterTable { d, partitions, index, values }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Row and column labels, in canonical order.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn value(&self, rho: usize, alpha: usize) -> i64 {
        self.values[rho][alpha]
    }

    pub fn get(&self, rho: &Partition, alpha: &Partition) -> Option<i64> {
        Some(self.values[self.index_of(rho)?][self.index_of(alpha)?])
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.values
    }

    pub fn dim(&self, rho: usize) -> i64 {
        self.values[rho][self.len() - 1]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "format_version": TABLE_FORMAT_VERSION,
            "d": self.d,
            "partitions": self.partitions.iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>(),
            "values": self.values,
        })
    }

    /// Inverse of [`to_json`](Self::to_json); rejects other format versions
    /// and any table whose labels are not the canonical ones.
    pub fn from_json(v: &Value) -> Result<CharacterTable> {
        let bad = |m: &str| Error::Json(format!("character table: {m}"));
        if v["format_version"].as_u64() != Some(TABLE_FORMAT_VERSION) {
            return Err(bad("format version mismatch"));
        }
        let d = v["d"].as_u64().ok_or_else(|| bad("missing d"))? as usize;
        let partitions: Vec<Partition> = v["partitions"]
            .as_array()
            .ok_or_else(|| bad("missing partitions"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("partition not an array"))?
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad("bad part")))
                    .collect::<Result<Vec<_>>>()
                    .map(Partition::new)
            })
            .collect::<Result<_>>()?;
        if partitions != enumerate(d) {
            return Err(bad("partition labels are not canonical"));
        }
        let values: Vec<Vec<i64>> = v["values"]
            .as_array()
            .ok_or_else(|| bad("missing values"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("row not an array"))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| bad("bad entry")))
                    .collect()
            })
            .collect::<Result<_>>()?;
        if values.len() != partitions.len() || values.iter().any(|r| r.len() != partitions.len()) {
            return Err(bad("shape mismatch"));
        }
        Ok(Self::assemble(d, partitions, values))
    }
}

#[cfg(test)]
pub(crate) fn to_i64(x: &num_bigint::BigInt) -> i64 {
    num_traits::ToPrimitive::to_i64(x).expect("value exceeds i64 range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn small_values() {
        assert_eq!(character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert_eq!(character(&p(&[3, 2]), &p(&[2, 2, 1])).unwrap(), 1);
        assert!(character(&p(&[2]), &p(&[1])).is_err());
        let t1 = character_table(1).unwrap();
        assert_eq!(t1.rows(), &[vec![1]]);
        let t2 = character_table(2).unwrap();
        assert_eq!(t2.get(&p(&[1, 1]), &p(&[2])), Some(-1));
    }

    #[test]
    fn trivial_sign_and_dimension_rows() {
        for d in 1..=9 {
            let t = character_table(d).unwrap();
            for alpha in t.partitions() {
                assert_eq!(t.get(&Partition::row(d), alpha), Some(1));
                assert_eq!(t.get(&Partition::ones(d), alpha), Some(alpha.sign()));
            }
            for (r, rho) in t.partitions().iter().enumerate() {
                assert_eq!(t.dim(r), to_i64(&rho.dim_rep()));
            }
        }
    }

    #[test]
    fn orthogonality_and_conjugation() {
        for d in 1..=12 {
            let t = character_table(d).unwrap();
            let ps = t.partitions();
            let zeta: Vec<i64> = ps.iter().map(|a| to_i64(&a.zeta())).collect();
            let n = ps.len();
            for a in 0..n {
                for b in 0..n {
                    let s: i64 = (0..n).map(|r| t.value(r, a) * t.value(r, b)).sum();
                    assert_eq!(s, if a == b { zeta[a] } else { 0 }, "columns d={d}");
                }
            }
            // Row orthogonality with denominators cleared by d!.
            let fact = to_i64(&crate::combinatorics::factorial(d));
            for r in 0..n {
                for m in r..n {
                    let s: i128 = (0..n)
                        .map(|a| {
                            (t.value(r, a) as i128) * (t.value(m, a) as i128) * (fact / zeta[a]) as i128
                        })
                        .sum();
                    assert_eq!(s, if r == m { fact as i128 } else { 0 }, "rows d={d}");
                }
            }
            for (r, rho) in ps.iter().enumerate() {
                let rc = t.index_of(&rho.conjugate()).unwrap();
                for (a, alpha) in ps.iter().enumerate() {
                    assert_eq!(t.value(rc, a), alpha.sign() * t.value(r, a));
                }
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let t = character_table(6).unwrap();
        let back = CharacterTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let mut v = t.to_json();
        v["format_version"] = json!(0);
        assert!(CharacterTable::from_json(&v).is_err());
    }
}
