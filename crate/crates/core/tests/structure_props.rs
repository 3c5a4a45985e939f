mod common;

use std::collections::BTreeSet;

use common::{brute_force_factors, build, numbered};
use fsing_core::poly::{Monomial, Poly};
use fsing_core::structure::{
    degree_one_irreducibility, disjoint_factorization, extension_stability_check, is_irreducible_sqfree,
    is_squarefree_supported,
};
use fsing_core::suite::random_sqfree_factors;
use proptest::prelude::*;

type Terms = Vec<(Vec<u16>, i64)>;

fn sqfree_terms(n: usize, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(0u16..=1, n), 1i64..50), 1..=max_terms)
}

fn as_set(fs: &[Poly]) -> BTreeSet<String> {
    fs.iter().map(|f| f.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn heuristic_agrees_with_brute_force(
        p in prop::sample::select(vec![2u64, 3, 5]),
        n in 2usize..=6,
        t in sqfree_terms(6, 5),
    ) {
        let (field, vars) = numbered(p, n);
        let t: Terms = t.into_iter().map(|(e, c)| (e[..n].to_vec(), c)).collect();
        let f = build(&field, &vars, &t);
        if f.is_zero() || f.is_constant() { return Ok(()) }
        let ci = disjoint_factorization(&f).unwrap();
        prop_assert_eq!(as_set(ci.factors()), as_set(&brute_force_factors(&f)));
        prop_assert_eq!(ci.product().unwrap().scale(&ci.scalar()), f);
    }

    #[test]
    fn planted_products_are_recovered(
        p in prop::sample::select(vec![2u64, 3, 5]),
        n in 1usize..=10,
        t in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let t = t.min(n);
        let (field, vars) = numbered(p, n);
        let planted = random_sqfree_factors(&field, &vars, 8, t, seed).unwrap();
        let mut f = Poly::one(field.clone(), vars.clone());
        for g in &planted { f = f.mul(g).unwrap(); }
        let ci = disjoint_factorization(&f).unwrap();
        prop_assert_eq!(ci.len(), t);
        prop_assert_eq!(ci.product().unwrap().scale(&ci.scalar()), f);
        let planted_monic: Vec<Poly> = planted.iter().map(|g| g.monic().unwrap().1).collect();
        prop_assert_eq!(as_set(ci.factors()), as_set(&planted_monic));
        for (i, g) in ci.factors().iter().enumerate() {
            prop_assert!(is_squarefree_supported(g));
            for j in 0..i {
                prop_assert!(ci.varsets()[i].is_disjoint(&ci.varsets()[j]));
            }
        }
    }

    #[test]
    fn degree_one_test_agrees_with_factorization(
        p in prop::sample::select(vec![2u64, 3]),
        g in sqfree_terms(4, 3),
        h in sqfree_terms(4, 3),
    ) {
        // variable 0 plays x; g and h live in the other four
        let (field, vars) = numbered(p, 5);
        let lift = |t: &Terms| -> Terms { t.iter().map(|(e, c)| ([vec![0], e.clone()].concat(), *c)).collect() };
        let gp = build(&field, &vars, &lift(&g));
        let hp = build(&field, &vars, &lift(&h));
        if gp.is_zero() { return Ok(()) }
        let x = Poly::var(field.clone(), vars.clone(), 0).unwrap();
        let f = gp.mul(&x).unwrap().add(&hp).unwrap();
        prop_assert_eq!(degree_one_irreducibility(&gp, &hp).unwrap(), is_irreducible_sqfree(&f).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn factor_counts_survive_extension(
        p in prop::sample::select(vec![2u64, 3]),
        s in 2usize..=3,
        t in sqfree_terms(4, 5),
    ) {
        let (field, vars) = numbered(p, 4);
        let f = build(&field, &vars, &t);
        if f.is_zero() || f.is_constant() { return Ok(()) }
        prop_assert!(extension_stability_check(&f, s).unwrap());
    }
}

#[test]
fn factors_are_monic_and_sorted() {
    let (field, vars) = numbered(3, 4);
    let f = build(
        &field,
        &vars,
        &[
            (vec![1, 0, 1, 0], 2),
            (vec![1, 0, 0, 1], 2),
            (vec![0, 1, 1, 0], 2),
            (vec![0, 1, 0, 1], 2),
        ],
    );
    let ci = disjoint_factorization(&f).unwrap();
    for g in ci.factors() {
        assert!(g.leading().unwrap().1.is_one());
    }
    assert_eq!(ci.scalar(), field.from_int(2));
    assert_eq!(ci.factors()[0].terms()[0].0, Monomial::from_exps(vec![1, 0, 0, 0]));
}
