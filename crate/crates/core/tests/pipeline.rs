mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{exponent_sums, gcd_all, random_word};
use solvkit::closure::{analyze, cyclic_retract, Rule, Subgroup, Verdict};
use solvkit::lattice::{is_direct_factor, IntMatrix};
use solvkit::magnus::{derived_depth, embed, DerivedDepth, GroupContext};
use solvkit::nilq5::NilQuotient;
use solvkit::words::{free_reduce, parse_word, substitute, Symbol, Word};

fn w(s: &str) -> Word {
    parse_word(s, None).unwrap()
}

fn ctx(r: usize, d: usize) -> GroupContext {
    GroupContext::new(r, d).unwrap()
}

#[test]
fn intro_element_is_a_retract() {
    // g = z1 z2^-1 z1^-1 z2 z1 has abelian image (1, 0).
    let c = ctx(2, 3);
    let g = w("z1*z2^-1*z1^-1*z2*z1");
    let rho = cyclic_retract(&g, c).unwrap();
    assert_eq!(rho.images()[0], embed(&g, c).unwrap());
    assert!(rho.images()[1].is_identity());
    assert_eq!(rho.apply(&g).unwrap(), embed(&g, c).unwrap());
}

#[test]
fn analyze_agrees_with_lattice_on_direct_factors() {
    let c = ctx(2, 2);
    for (gens, direct) in [(vec!["z1^2"], false), (vec!["z1*z2^2"], true), (vec!["z1^2*z2^4", "z1*z2^2"], true)] {
        let words: Vec<Word> = gens.iter().map(|s| w(s)).collect();
        let rows: Vec<Vec<i64>> = words.iter().map(|x| exponent_sums(x, 2)).collect();
        let m = IntMatrix::from_i64(&rows.iter().map(Vec::as_slice).collect::<Vec<_>>());
        assert_eq!(is_direct_factor(&m), direct);
        let report = analyze(&Subgroup::new(c, words).unwrap(), None).unwrap();
        assert_eq!(report.rule == Rule::Lemma3, !direct, "{gens:?}");
    }
}

#[test]
fn derived_depth_through_embedding() {
    let c = ctx(2, 3);
    assert_eq!(derived_depth(&embed(&w("z1"), c).unwrap()), DerivedDepth::Depth(0));
    assert_eq!(derived_depth(&embed(&w("[z1,z2]"), c).unwrap()), DerivedDepth::Depth(1));
    assert_eq!(derived_depth(&embed(&w("[[z1,z2],[z1,z2^2]]"), c).unwrap()), DerivedDepth::Depth(2));
    assert_eq!(derived_depth(&embed(&w("[z1,z2]*[z2,z1]"), c).unwrap()), DerivedDepth::Identity);
}

#[test]
fn nil_quotient_matches_metabelian_equality() {
    // Two words equal in M_2 have equal class-5 images; weight-5 commutators vanish there.
    let q = NilQuotient::new(2);
    let m2 = ctx(2, 2);
    let a = w("[[z1,z2],[z1*z2,z2*z1]]*[z1,z2]");
    let b = w("[z1,z2]");
    assert_eq!(embed(&a, m2).unwrap(), embed(&b, m2).unwrap());
    assert_eq!(q.embed(&a).unwrap(), q.embed(&b).unwrap());
    let five = w("[z2,z1,z1,z1,z2]");
    assert!(!embed(&five, m2).unwrap().is_identity());
    assert!(q.is_identity(&q.embed(&five).unwrap()));
}

#[test]
fn primitive_words_analyze_as_retracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c = ctx(2, 2);
    let mut seen = 0;
    while seen < 20 {
        let h = random_word(&mut rng, 2, 7);
        let e = exponent_sums(&h, 2);
        if e.iter().all(|&x| x == 0) {
            continue;
        }
        let report = analyze(&Subgroup::new(c, vec![h.clone()]).unwrap(), None).unwrap();
        if gcd_all(&e) == 1 {
            assert_eq!(report.verdict, Verdict::RetractConstructed, "{h}");
            assert!(report.retraction.is_some());
        } else {
            assert_eq!(report.verdict, Verdict::NotVerballyClosed, "{h}");
        }
        seen += 1;
    }
}

fn arb_word(rank: usize, len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=rank, prop_oneof![Just(-1i64), Just(1i64)]), 0..=len).prop_map(|letters| {
        letters.into_iter().fold(Word::identity(), |acc, (g, e)| acc.mul(&Word::letter(Symbol::gen(g), e)))
    })
}

proptest! {
    #[test]
    fn embedding_is_a_homomorphism(u in arb_word(3, 8), v in arb_word(3, 8), d in 1usize..=3) {
        let c = ctx(3, d);
        let lhs = embed(&u.mul(&v), c).unwrap();
        let rhs = embed(&u, c).unwrap().mul(&embed(&v, c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn free_reduction_preserves_normal_form(u in arb_word(2, 12)) {
        let c = ctx(2, 3);
        prop_assert_eq!(embed(&u, c).unwrap(), embed(&free_reduce(&u), c).unwrap());
    }

    #[test]
    fn inverse_word_gives_inverse_element(u in arb_word(2, 10), d in 1usize..=3) {
        let c = ctx(2, d);
        let a = embed(&u, c).unwrap();
        prop_assert_eq!(embed(&u.inverse(), c).unwrap(), a.inv());
        prop_assert!(a.mul(&a.inv()).unwrap().is_identity());
    }

    #[test]
    fn substitution_matches_evaluation(u in arb_word(2, 6), v in arb_word(2, 6)) {
        let c = ctx(2, 2);
        let law = w("[x1,x2,x2,x1]");
        let sub: BTreeMap<usize, Word> = [(1, u.clone()), (2, v.clone())].into_iter().collect();
        let by_words = embed(&substitute(&law, &sub).unwrap(), c).unwrap();
        let values = [embed(&u, c).unwrap(), embed(&v, c).unwrap()];
        prop_assert_eq!(by_words, solvkit::magnus::evaluate(&law, &values).unwrap());
    }
}
