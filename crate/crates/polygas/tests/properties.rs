//! Property tests over random systems: structural identities that must hold
//! exactly, plus the float-side relations with pinned tolerances.

use num::{One, Signed, Zero};
use proptest::prelude::*;

use polygas::criteria::{dobrushin_radius, fp_denominator, fp_radii, fp_radius, MuVector};
use polygas::mayer::{abs_increment_ratio, log_z_increment, telescope_log_z, ursell};
use polygas::model::{build_subset_gas, SubsetGasSpec};
use polygas::numeric::{ln_rational, rational_to_f64, ratio};
use polygas::partition::{
    check_fundamental_identity, correlation, log_subadditivity_holds, z_brute, z_negated,
    z_recursive, z_recursive_seeded,
};
use polygas::sampling::{pair_count, system_with_edge_bits};
use polygas::{ActivityVector, PolymerSubset, PolymerSystem, Rational};

fn arb_system(max_n: usize) -> impl Strategy<Value = PolymerSystem> {
    (1..=max_n).prop_flat_map(|n| {
        let np = pair_count(n) as u32;
        (Just(n), 0u64..(1u64 << np))
            .prop_map(|(n, bits)| system_with_edge_bits(n, bits).expect("small system"))
    })
}

fn arb_weights(n: usize) -> impl Strategy<Value = ActivityVector> {
    proptest::collection::vec((-8i64..=8, 1i64..=8), n).prop_map(|raw| {
        ActivityVector::from_values(raw.into_iter().map(|(a, b)| ratio(a, b)).collect())
    })
}

fn arb_mu(n: usize) -> impl Strategy<Value = MuVector> {
    proptest::collection::vec((1i64..=8, 1i64..=8), n).prop_map(|raw| {
        MuVector::from_values(raw.into_iter().map(|(a, b)| ratio(a, b)).collect())
            .expect("positive")
    })
}

fn nonneg_from_raw(n: usize, raw: &[(i64, i64)]) -> ActivityVector {
    ActivityVector::from_values((0..n).map(|i| ratio(raw[i].0, raw[i].1)).collect())
}

/// Scales every coordinate of the fixed-point radius vector at `mu = 1` by
/// `raw[x]/8 < 1`, so the result sits strictly inside the positivity region.
fn subradius_point(sys: &PolymerSystem, raw: &[(i64, i64)]) -> ActivityVector {
    let mu = MuVector::uniform(sys.len(), Rational::one()).unwrap();
    let radii = fp_radii(sys, &mu, 24).unwrap();
    ActivityVector::from_values(
        (0..sys.len()).map(|x| ratio(raw[x].0, raw[x].1) * radii.get(x)).collect(),
    )
}

fn mask_subset(volume: &PolymerSubset, mask: u64) -> PolymerSubset {
    volume
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask >> (i as u32) & 1 == 1)
        .map(|(_, &id)| id)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn computation_methods_agree(pair in arb_system(6).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), arb_weights(n))
    }), seed in any::<u64>()) {
        let (sys, w) = pair;
        let vol = sys.full_volume();
        let brute = z_brute(&sys, &vol, &w, 24).unwrap();
        prop_assert_eq!(&brute, &z_recursive(&sys, &vol, &w).unwrap());
        prop_assert_eq!(&brute, &z_recursive_seeded(&sys, &vol, &w, seed).unwrap());
    }

    #[test]
    fn deletion_identity_holds_for_every_pivot(pair in arb_system(6).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), arb_weights(n))
    }), mask in any::<u64>()) {
        let (sys, w) = pair;
        let vol = mask_subset(&sys.full_volume(), mask | 1);
        for &x in &vol {
            prop_assert!(check_fundamental_identity(&sys, &vol, x, &w).unwrap());
        }
    }

    #[test]
    fn zero_activities_give_unit_z(sys in arb_system(6)) {
        let w = ActivityVector::uniform(sys.len(), Rational::zero());
        prop_assert_eq!(z_recursive(&sys, &sys.full_volume(), &w).unwrap(), Rational::one());
    }

    #[test]
    fn z_is_monotone_in_volume_for_nonneg(
        sys in arb_system(6),
        mask in any::<u64>(),
        raw in proptest::collection::vec((0i64..=8, 1i64..=8), 6),
    ) {
        let w = nonneg_from_raw(sys.len(), &raw);
        let full = sys.full_volume();
        let sub = mask_subset(&full, mask);
        let z_full = z_recursive(&sys, &full, &w).unwrap();
        let z_sub = z_recursive(&sys, &sub, &w).unwrap();
        prop_assert!(z_sub >= Rational::one());
        prop_assert!(z_full >= z_sub);
    }

    #[test]
    fn log_subadditivity_over_random_splits(
        sys in arb_system(6),
        mask_s in any::<u64>(),
        mask_t in any::<u64>(),
        raw in proptest::collection::vec((0i64..=8, 1i64..=8), 6),
    ) {
        let mu = nonneg_from_raw(sys.len(), &raw);
        let full = sys.full_volume();
        let s = mask_subset(&full, mask_s);
        let t: PolymerSubset = mask_subset(&full, mask_t).difference(&s).copied().collect();
        prop_assert!(log_subadditivity_holds(&sys, &s, &t, &mu).unwrap());
    }

    #[test]
    fn correlation_satisfies_its_definition(
        sys in arb_system(6),
        mask in any::<u64>(),
        raw in proptest::collection::vec((0i64..=8, 1i64..=8), 6),
    ) {
        let w = nonneg_from_raw(sys.len(), &raw);
        let vol = sys.full_volume();
        let s = mask_subset(&vol, mask);
        let phi = correlation(&sys, &vol, &s, &w).unwrap();
        if s.is_empty() {
            prop_assert_eq!(&phi, &Rational::one());
        }
        if sys.is_independent(&s) {
            let rest: PolymerSubset = vol.difference(&s).copied().collect();
            let prod = s.iter().fold(Rational::one(), |acc, &x| acc * w.get(x));
            let z = z_recursive(&sys, &vol, &w).unwrap();
            let z_rest = z_recursive(&sys, &rest, &w).unwrap();
            prop_assert_eq!(phi * z, prod * z_rest);
        } else {
            prop_assert!(phi.is_zero());
        }
    }

    #[test]
    fn neighborhoods_are_closed_and_symmetric(sys in arb_system(6)) {
        for x in 0..sys.len() {
            prop_assert!(sys.closed_neighborhood(x).contains(&x));
            for y in 0..sys.len() {
                prop_assert_eq!(sys.incompatible(x, y), sys.incompatible(y, x));
                prop_assert_eq!(sys.incompatible(x, y), sys.closed_neighborhood(x).contains(&y));
            }
        }
    }

    #[test]
    fn restriction_preserves_the_relation(sys in arb_system(6), mask in any::<u64>()) {
        let vol = mask_subset(&sys.full_volume(), mask);
        let r = sys.restrict(&vol).unwrap();
        prop_assert_eq!(r.system.len(), vol.len());
        for i in 0..r.system.len() {
            for j in 0..r.system.len() {
                prop_assert_eq!(
                    r.system.incompatible(i, j),
                    sys.incompatible(r.back[i], r.back[j])
                );
            }
        }
    }

    #[test]
    fn subset_gas_conflicts_are_intersections(
        sites in 1usize..=5,
        bits in any::<u64>(),
        max_size in 1usize..=3,
    ) {
        let mut spec = SubsetGasSpec::new(sites, max_size).unwrap();
        for (i, (u, v)) in (0..sites)
            .flat_map(|u| (u + 1..sites).map(move |v| (u, v)))
            .enumerate()
        {
            if bits >> (i as u32) & 1 == 1 {
                spec.add_edge(u, v).unwrap();
            }
        }
        let gas = build_subset_gas(&spec).unwrap();
        for i in 0..gas.system.len() {
            prop_assert!(gas.members[i].len() <= max_size);
            for j in 0..gas.system.len() {
                let meets = gas.members[i].intersection(&gas.members[j]).next().is_some();
                prop_assert_eq!(gas.system.incompatible(i, j), meets);
            }
        }
    }

    #[test]
    fn cluster_coefficients_alternate_in_sign(pair in arb_system(5).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), proptest::collection::vec(0..n, 1..=4))
    })) {
        let (sys, tuple) = pair;
        let phi = ursell(&sys, &tuple, 7).unwrap();
        let signed = if tuple.len() % 2 == 0 { -phi } else { phi };
        prop_assert!(!signed.is_negative());
    }

    #[test]
    fn cluster_coefficients_ignore_tuple_order(pair in arb_system(5).prop_flat_map(|s| {
        let n = s.len();
        (
            Just(s),
            proptest::collection::vec(0..n, 1..=5)
                .prop_flat_map(|t| (Just(t.clone()), Just(t).prop_shuffle())),
        )
    })) {
        let (sys, (tuple, shuffled)) = pair;
        prop_assert_eq!(ursell(&sys, &tuple, 7).unwrap(), ursell(&sys, &shuffled, 7).unwrap());
    }

    #[test]
    fn increment_majorant_is_increment_at_negated_point(
        sys in arb_system(5),
        raw in proptest::collection::vec((1i64..=7, 8i64..=8), 5),
    ) {
        let p = subradius_point(&sys, &raw);
        let vol = sys.full_volume();
        for &x in &vol {
            let exact = abs_increment_ratio(&sys, &vol, x, &p).unwrap();
            let via_theta = log_z_increment(&sys, &vol, x, &p.negated()).unwrap();
            prop_assert!((ln_rational(&exact) + via_theta).abs() <= 1e-12);
        }
    }

    #[test]
    fn sharp_radius_dominates_product_radius(pair in arb_system(6).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), arb_mu(n))
    })) {
        let (sys, mu) = pair;
        for x in 0..sys.len() {
            let fp = fp_radius(&sys, x, &mu, 24).unwrap();
            let dob = dobrushin_radius(&sys, x, &mu, 24).unwrap();
            prop_assert!(fp >= dob);
        }
    }

    #[test]
    fn sharp_denominator_beats_exponential_bound(pair in arb_system(6).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), arb_mu(n))
    })) {
        let (sys, mu) = pair;
        for x in 0..sys.len() {
            let denom = rational_to_f64(&fp_denominator(&sys, x, &mu, 24).unwrap());
            let exponent: f64 = sys
                .closed_neighborhood(x)
                .iter()
                .map(|&y| rational_to_f64(mu.get(y)))
                .sum();
            prop_assert!(denom < exponent.exp() + 1e-9);
        }
    }

    #[test]
    fn radii_are_permutation_equivariant(triple in arb_system(6).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), arb_mu(n), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    })) {
        let (sys, mu, perm) = triple;
        let n = sys.len();
        let mut permuted = PolymerSystem::new(n);
        for x in 0..n {
            for y in x + 1..n {
                if sys.incompatible(x, y) {
                    permuted.add_incompatibility(perm[x], perm[y]).unwrap();
                }
            }
        }
        let mut mu_values = vec![Rational::zero(); n];
        for x in 0..n {
            mu_values[perm[x]] = mu.get(x).clone();
        }
        let mu_permuted = MuVector::from_values(mu_values).unwrap();
        let radii = fp_radii(&sys, &mu, 24).unwrap();
        let radii_permuted = fp_radii(&permuted, &mu_permuted, 24).unwrap();
        for x in 0..n {
            prop_assert_eq!(radii.get(x), radii_permuted.get(perm[x]));
        }
    }

    #[test]
    fn telescoped_log_z_is_ordering_independent(
        sys in arb_system(4),
        raw in proptest::collection::vec((1i64..=7, 8i64..=8), 4),
    ) {
        let p = subradius_point(&sys, &raw);
        let vol = sys.full_volume();
        let reference = ln_rational(&z_recursive(&sys, &vol, &p).unwrap());
        let ids: Vec<usize> = vol.iter().copied().collect();
        for ordering in permutations(&ids) {
            let tele = telescope_log_z(&sys, &vol, &p, &ordering).unwrap();
            prop_assert!((tele - reference).abs() <= 1e-12, "{} vs {}", tele, reference);
        }
    }

    #[test]
    fn negated_evaluation_matches_sign_flip(
        sys in arb_system(6),
        raw in proptest::collection::vec((0i64..=8, 9i64..=9), 6),
    ) {
        let p = nonneg_from_raw(sys.len(), &raw);
        let vol = sys.full_volume();
        prop_assert_eq!(
            z_negated(&sys, &vol, &p).unwrap(),
            z_recursive(&sys, &vol, &p.negated()).unwrap()
        );
    }
}

fn permutations(ids: &[usize]) -> Vec<Vec<usize>> {
    if ids.len() <= 1 {
        return vec![ids.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &head) in ids.iter().enumerate() {
        let rest: Vec<usize> = ids
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}
