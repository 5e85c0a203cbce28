//! Exact polynomial algebra in abstract power sums `p_1, p_2, …`.
//!
//! A monomial `p_{α_1}⋯p_{α_ℓ}` is keyed by the partition `α`; its weight is `|α|`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::combinatorics::Partition;
use crate::ring::{ratio, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PPoly {
    terms: BTreeMap<Partition, Rational>,
    max_weight: usize,
}

impl PPoly {
    pub fn new(max_weight: usize) -> PPoly {
        PPoly { terms: BTreeMap::new(), max_weight }
    }

    pub fn add_term(&mut self, mono: Partition, c: Rational) {
        if mono.degree() > self.max_weight || c.is_zero() {
            return;
        }
        let e = self.terms.entry(mono.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn coeff(&self, mono: &Partition) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> &BTreeMap<Partition, Rational> {
        &self.terms
    }

    pub fn mul(&self, o: &PPoly) -> PPoly {
        let mut out = PPoly::new(self.max_weight.min(o.max_weight));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                if m1.degree() + m2.degree() > out.max_weight {
                    continue;
                }
                let mut parts = m1.parts().to_vec();
                parts.extend_from_slice(m2.parts());
                out.add_term(Partition::new(parts), c1 * c2);
            }
        }
        out
    }

    /// `exp(self)`; requires no constant term, so at most `max_weight` powers contribute.
    pub fn exp(&self) -> PPoly {
        assert!(self.coeff(&Partition::new(vec![])).is_zero());
        let mut out = PPoly::new(self.max_weight);
        out.add_term(Partition::new(vec![]), ratio(1, 1));
        let mut power = out.clone();
        for n in 1..=self.max_weight {
            power = power.mul(self);
            for (m, c) in &power.terms {
                out.add_term(m.clone(), c * ratio(1, factorial_i64(n)));
            }
        }
        out
    }
}

fn factorial_i64(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Coefficients `r_α`, `α ⊢ d`, of `exp(Σ_{k odd} p_k/k − ½ Σ_m p_m²/m)`.
pub fn level0_cap_coefficients(d: usize) -> BTreeMap<Partition, Rational> {
    let mut f = PPoly::new(d);
    for k in (1..=d).step_by(2) {
        f.add_term(Partition::new(vec![k]), ratio(1, k as i64));
    }
    for m in 1..=d / 2 {
        f.add_term(Partition::new(vec![m, m]), ratio(-1, 2 * m as i64));
    }
    f.exp()
        .terms
        .into_iter()
        .filter(|(m, _)| m.degree() == d)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn small_degrees() {
        let r1 = level0_cap_coefficients(1);
        assert_eq!(r1.get(&p(&[1])), Some(&ratio(1, 1)));
        let r2 = level0_cap_coefficients(2);
        // 1/2 from (p_1)^2/2, −1/2 from −p_1²/2.
        assert_eq!(r2.get(&p(&[1, 1])), None);
        assert_eq!(r2.get(&p(&[2])), None);
        let r3 = level0_cap_coefficients(3);
        assert_eq!(r3.get(&p(&[3])), Some(&ratio(1, 3)));
        assert_eq!(r3.get(&p(&[1, 1, 1])), Some(&ratio(-1, 3)));
    }

    #[test]
    fn exp_of_single_variable() {
        let mut f = PPoly::new(4);
        f.add_term(p(&[1]), ratio(1, 1));
        let e = f.exp();
        assert_eq!(e.coeff(&p(&[1, 1, 1, 1])), ratio(1, 24));
    }
}
