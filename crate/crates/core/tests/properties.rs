use cliffordcs::circuit::CircuitWord;
use cliffordcs::normalizer::{almost_normalize, NormalizeConfig};
use cliffordcs::subgroups::{
    factor, factor_k0cd, word_of, GroupId, K0CDNormal, Monomial, NormalWord,
};
use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MONOMIAL_GROUPS: [GroupId; 9] = [
    GroupId::W,
    GroupId::Q,
    GroupId::C,
    GroupId::CQ,
    GroupId::P,
    GroupId::D,
    GroupId::QD,
    GroupId::CQD,
    GroupId::PD,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomial_product_is_matrix_product(seed in 0u64..10_000, la in 0usize..15, lb in 0usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = GroupId::PD.generators();
        let u = CircuitWord::random_over(&mut rng, &gens, la);
        let v = CircuitWord::random_over(&mut rng, &gens, lb);
        let (mu, mv) = (Monomial::of_word(&u).unwrap(), Monomial::of_word(&v).unwrap());
        prop_assert_eq!(mu.mul(&mv).to_matrix(), u.concat(&v).eval());
        prop_assert_eq!(mu.inverse().to_matrix(), u.invert().eval());
    }

    #[test]
    fn factor_is_stable_on_group_words(seed in 0u64..10_000, g in 0usize..9, len in 0usize..25) {
        let group = MONOMIAL_GROUPS[g];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CircuitWord::random_over(&mut rng, &group.generators(), len).eval();
        let t = factor(group, &m).unwrap();
        prop_assert_eq!(word_of(&t).eval(), m.clone());
        prop_assert_eq!(factor(group, &word_of(&t).eval()).unwrap(), t);
    }

    #[test]
    fn k0cd_tuples_round_trip(seed in 0u64..100_000) {
        let t = K0CDNormal::random(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(factor_k0cd(&t.word().eval()).unwrap(), t);
    }

    #[test]
    fn normalizer_preserves_operator(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = rng.gen_range(0..=30);
        let word = CircuitWord::random_base(&mut rng, len);
        let (nf, stats) = almost_normalize(&word, &NormalizeConfig::default()).unwrap();
        prop_assert_eq!(nf.eval(), word.eval());
        prop_assert!(!stats.exhausted);
        prop_assert!(word.is_empty() || nf.is_processed());
    }

    #[test]
    fn central_conjugation_gives_same_form(seed in 0u64..10_000) {
        // i is central, so conjugating by it only moves scalars between
        // segments
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = rng.gen_range(1..=20);
        let word = CircuitWord::random_base(&mut rng, len);
        let conj = cliffordcs::circuit::w("i").concat(&word).concat(&cliffordcs::circuit::w("i i i"));
        let config = NormalizeConfig::default();
        let (a, _) = almost_normalize(&word, &config).unwrap();
        let (b, _) = almost_normalize(&conj, &config).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn non_members_are_rejected() {
    let k = cliffordcs::circuit::w("K0").eval();
    for g in MONOMIAL_GROUPS {
        assert!(factor(g, &k).is_err(), "{g}");
    }
    let cx01 = cliffordcs::circuit::w("CX01").eval();
    assert!(factor(GroupId::CQ, &cx01).is_err());
    assert!(factor(GroupId::K0CD, &cx01).is_err());
    assert!(factor(GroupId::P, &cx01).is_ok());
}
