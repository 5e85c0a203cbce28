use num_traits::Zero;
use proptest::prelude::*;

use klein_tqft::combinatorics::{factorial, partitions_of};
use klein_tqft::dsl;
use klein_tqft::ring::{rat, ratio, QSeries, Rational, Ring, SPoly, Scalar, USeries};
use klein_tqft::tqft::{Basis, Context};
use klein_tqft::Partition;

fn spoly() -> impl Strategy<Value = SPoly> {
    prop::collection::vec((-4i64..=4, -5i64..=5, 1i64..=3), 0..4)
        .prop_map(|ts| SPoly::from_terms(ts.into_iter().map(|(e, n, d)| (e, ratio(n, d)))))
}

fn partition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1usize..=5, 1..5).prop_map(Partition::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_expansion_is_a_ring_map(a in spoly(), b in spoly()) {
        let n = 8;
        let sum = a.plus(&b).to_u_series(n);
        prop_assert_eq!(sum, a.to_u_series(n).plus(&b.to_u_series(n)));
        let prod = a.times(&b).to_u_series(n);
        prop_assert_eq!(prod, a.to_u_series(n).times(&b.to_u_series(n)).truncate(n));
    }

    #[test]
    fn u_inverse_is_an_inverse(a in spoly().prop_filter("nonzero", |p| !p.is_zero())) {
        let x = a.to_u_series(10);
        let inv = x.inverse().unwrap();
        let one = x.times(&inv);
        let top = one.order();
        prop_assert!(top >= 10 - 2 * x.valuation().abs());
        prop_assert_eq!(one.truncate(top), USeries::one().truncate(top));
    }

    #[test]
    fn exp_log_roundtrip(cs in prop::collection::vec((-6i64..=6, 1i64..=4), 6)) {
        let mut x = QSeries::<Rational>::zero(6);
        for (i, (n, d)) in cs.into_iter().enumerate() {
            x.set(i + 1, ratio(n, d));
        }
        let e = x.exp_q().unwrap();
        prop_assert_eq!(e.coeff(0).clone(), rat(1));
        prop_assert_eq!(e.log_q().unwrap(), x);
    }

    #[test]
    fn partition_identities(p in partition()) {
        let c = p.conjugate();
        prop_assert_eq!(c.conjugate(), p.clone());
        prop_assert_eq!(c.degree(), p.degree());
        prop_assert_eq!(p.rank(), c.rank());
        prop_assert_eq!(p.content_sum(), -c.content_sum());
        let hooks: Vec<usize> = p.hooks();
        prop_assert_eq!(hooks.len(), p.degree());
        let prod: num_bigint::BigInt = hooks.iter().map(|&h| num_bigint::BigInt::from(h)).product();
        prop_assert_eq!(p.dim_rep() * prod, factorial(p.degree()));
        prop_assert_eq!(p.sq().degree(), p.degree());
        if p.is_self_conjugate() {
            prop_assert_eq!(p.content_sum(), 0);
        }
    }

    #[test]
    fn scalar_json_roundtrip(a in spoly(), b in spoly(), e in -3i64..=3) {
        let s = Scalar::exact(e, a).plus(&Scalar::series(e + 1, b.to_u_series(5)));
        prop_assert_eq!(Scalar::from_json(&s.to_json()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basis_change_roundtrip(d in 1usize..=5, seed in prop::collection::vec(-3i64..=3, 7)) {
        let ctx = Context::new(d).unwrap();
        let mut x = klein_tqft::tqft::TqftVector::zero(d, Basis::Standard);
        for (p, c) in partitions_of(d).unwrap().iter().zip(seed.iter().cycle()) {
            if !c.is_zero() {
                x.add_coeff(p, &Scalar::t_monomial(*c, rat(*c)));
            }
        }
        prop_assert_eq!(ctx.v_to_e(&ctx.e_to_v(&x)), x.clone());
        prop_assert_eq!(ctx.omega(&ctx.omega(&x)), x);
    }

    #[test]
    fn dsl_print_parse_roundtrip(seed in any::<u64>(), n in 0usize..=2) {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let e = dsl::random_expr(&mut rng, n, 4, 3);
        let text = e.to_string();
        let back = dsl::parse(&text).unwrap();
        prop_assert_eq!(dsl::typecheck(&back).unwrap(), dsl::typecheck(&e).unwrap());
        prop_assert_eq!(back, e);
    }
}
