//! Property tests for the structural invariants.

use proptest::collection::btree_set;
use proptest::prelude::*;

use addcomb::gf2::{setfile, F2Set, F2Vector, SpanBasis};
use addcomb::rat;
use addcomb::stats::{
    self, lemma6_check, mass_identity_check, mean_identity_check, symmetry_profile, ProfileMethod,
};
use addcomb::structured::level_set;

fn arb_set(max_dim: u32) -> impl Strategy<Value = F2Set> {
    (1..=max_dim).prop_flat_map(move |dim| {
        let space = 1u64 << dim;
        btree_set(0..space, 1..=(space.min(24) as usize))
            .prop_map(move |elems| F2Set::from_bits(dim, elems).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_and_mean_identities(a in arb_set(8)) {
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        prop_assert!(mass_identity_check(&p).passed());
        prop_assert!(mean_identity_check(&p).passed());
        prop_assert!(stats::markov_half_check(&p).passed());
    }

    #[test]
    fn fibers_have_even_size_off_zero(a in arb_set(8)) {
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        for &(s, c) in p.fibers() {
            if s != 0 {
                prop_assert_eq!(c % 2, 0, "elements pair up as {{a, a+s}}");
            }
        }
        // s in 2A iff fiber >= 1
        let double = a.sumset(&a).unwrap();
        prop_assert_eq!(p.support_set(), double);
    }

    #[test]
    fn profile_methods_bit_identical(a in arb_set(10)) {
        let naive = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        let wht = symmetry_profile(&a, ProfileMethod::Wht).unwrap();
        prop_assert_eq!(naive, wht);
    }

    #[test]
    fn sumset_commutative_and_monotone(a in arb_set(7), b in arb_set(7)) {
        prop_assume!(a.dim() == b.dim());
        let ab = a.sumset(&b).unwrap();
        let ba = b.sumset(&a).unwrap();
        prop_assert_eq!(&ab, &ba);
        // restrict a to a subset: sumset shrinks or stays
        let half: Vec<u64> = a.bits().iter().copied().step_by(2).collect();
        if !half.is_empty() {
            let sub = F2Set::from_bits(a.dim(), half).unwrap();
            let sub_sum = sub.sumset(&b).unwrap();
            prop_assert!(sub_sum.is_subset_of(&ab));
        }
    }

    #[test]
    fn translate_is_a_bijection(a in arb_set(8), x in 0u64..256) {
        let x = F2Vector::new(x % (1 << a.dim()), a.dim()).unwrap();
        let t = a.translate(&x).unwrap();
        prop_assert_eq!(t.len(), a.len());
        let back = t.translate(&x).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn span_contains_generators_and_sumset(a in arb_set(8)) {
        let basis = SpanBasis::from_set(&a).unwrap();
        for &x in a.bits() {
            prop_assert!(basis.contains_bits(x));
        }
        let double = a.sumset(&a).unwrap();
        for &s in double.bits() {
            prop_assert!(basis.contains_bits(s), "2A must lie in span(A)");
        }
        prop_assert!(double.len() as u128 <= 1u128 << basis.rank());
        // re-running on rows ∪ A is stable
        let rerun = SpanBasis::from_bits(
            a.dim(),
            basis.row_bits().iter().copied().chain(a.bits().iter().copied()),
        );
        prop_assert_eq!(rerun.rank(), basis.rank());
    }

    #[test]
    fn setfile_round_trip(a in arb_set(12)) {
        let text = setfile::to_string(&a);
        let parsed = setfile::parse(&text).unwrap();
        prop_assert_eq!(parsed, a);
    }

    #[test]
    fn conversion_inequality(a in arb_set(7), ln in 1u64..6, ld in 1u64..4) {
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        let l = rat::ratio_u(ln, ld);
        let pair = stats::large_fiber_probability(&p, &l);
        let uniform = stats::uniform_fiber_probability(&p, &l);
        prop_assert!(pair <= p.doubling() * uniform);
    }

    #[test]
    fn second_moment_chain(a in arb_set(5)) {
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        let report = stats::pr_z_positive(&a, &p, None).unwrap();
        // Paley–Zygmund chain, exactly
        prop_assert!(report.pr_z_positive >= report.paley_zygmund_lower);
        // Lemma 6 lower bound holds unconditionally
        prop_assert!(lemma6_check(&p, &report.e_z).passed());
        // E[Z] <= E[Y^2] is not generally true; but Z <= Y pointwise gives
        // E[Z]^2 <= E[Y^2] * Pr[Z>0] <= E[Y^2]
        prop_assert!(&report.e_z * &report.e_z <= report.e_y2.clone());
    }

    #[test]
    fn level_sets_monotone(a in arb_set(7), num in 1u64..8) {
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        let d1 = rat::ratio_u(num, 8);
        let d2 = rat::ratio_u(num.min(4) * 2, 8);
        let s1 = level_set(&p, &d1).unwrap().set;
        let s2 = level_set(&p, &(d1.clone().max(d2.clone()))).unwrap().set;
        prop_assert!(s1.is_subset_of(&s2));
        // S(1) = 2A
        let full = level_set(&p, &rat::from_u64(1)).unwrap().set;
        prop_assert_eq!(full, a.sumset(&a).unwrap());
    }
}
