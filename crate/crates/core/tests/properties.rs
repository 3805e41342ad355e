use proptest::prelude::*;
use sijections::acceptance::brute_multiplicity;
use sijections::gt::{beta, beta_normal_statistic, gt, gt_size_formula, pi};
use sijections::sijection::{compose, verify};
use sijections::statistics::check_compatibility;
use sijections::triangles::m_multiplicity;

fn seq(n: std::ops::RangeInclusive<usize>, lo: i64, hi: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(lo..=hi, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gt_size_matches_product(k in seq(1..=4, -2, 6)) {
        prop_assert_eq!(gt(&k).unwrap().size(), gt_size_formula(&k));
    }

    #[test]
    fn beta_is_valid_and_compatible(
        (a, b) in (1usize..=2).prop_flat_map(|n| (seq(n..=n, 0, 4), seq(n..=n, 0, 4))),
        x in -1i64..=6,
    ) {
        let f = beta(&a, &b, x).unwrap();
        prop_assert!(verify(&f).valid());
        prop_assert!(check_compatibility(&f, &beta_normal_statistic(a.len())).compatible());
    }

    #[test]
    fn pi_is_valid_in_both_directions(k in seq(2..=3, 0, 4), i in 1usize..=2) {
        prop_assume!(i < k.len());
        let mut kp = k.clone();
        kp.swap(i - 1, i);
        let f = pi(&k, i).unwrap();
        let g = pi(&kp, i).unwrap();
        prop_assert_eq!(f.dom().size(), f.cod().size());
        prop_assert!(verify(&f).valid());
        prop_assert!(verify(&g).valid());
    }

    #[test]
    fn transfer_matches_brute_force(k in seq(2..=3, 0, 4), l in seq(2..=2, -1, 5)) {
        let l = &l[..k.len() - 1];
        prop_assert_eq!(m_multiplicity(&k, l).unwrap(), brute_multiplicity(&k, l).unwrap());
    }
}

#[test]
fn compose_checks_shared_middle() {
    let f = pi(&[0, 2], 1).unwrap();
    let g = pi(&[0, 3], 1).unwrap();
    assert!(compose(&f, &g).is_err());
    assert!(compose(&f, &f).is_ok());
}
