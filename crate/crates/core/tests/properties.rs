use std::collections::BTreeSet;

use proptest::prelude::*;
use twistlab::algebra::{FiniteField, FqPoly};
use twistlab::covers::CoverCurve;
use twistlab::family::{density_experiment, ratio_f64, TwistFamily};
use twistlab::lfunc::{l_polynomial, orbits_of_q, root_number, weil_check, LocalConditions};
use twistlab::places::Place;
use twistlab::reps::{PowerCharacter, RepDescriptor};

fn poly(q: u64, coeffs: &[u32]) -> FqPoly {
    let k = FiniteField::of_order(q).unwrap();
    let v = coeffs.iter().map(|&c| c % q as u32).collect();
    FqPoly::new(k, v)
}

fn monic(q: u64, deg: usize, index: u64) -> FqPoly {
    let k = FiniteField::of_order(q).unwrap();
    FqPoly::monic_from_index(&k, deg, index % q.pow(deg as u32))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_division(q in prop::sample::select(vec![5u64, 7, 9]), a in prop::collection::vec(0u32..9, 0..7), b in prop::collection::vec(0u32..9, 1..5)) {
        let a = poly(q, &a);
        let b = poly(q, &b);
        prop_assume!(!b.is_zero());
        prop_assert_eq!(a.mul(&b).div_exact(&b).unwrap(), a.clone());
        let (quo, rem) = a.divrem(&b).unwrap();
        prop_assert_eq!(quo.mul(&b).add(&rem), a.clone());
        prop_assert!(rem.deg_i64() < b.deg_i64());
        let g = a.gcd(&b);
        prop_assert!(g.divides(&a) && g.divides(&b));
        let k = FiniteField::of_order(q).unwrap();
        prop_assert_eq!(FqPoly::parse(&k, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn squarefree_counts(q in prop::sample::select(vec![2u64, 3, 4, 5, 7]), k in 1usize..=4) {
        prop_assume!(q.pow(k as u32) <= 2401);
        let field = FiniteField::of_order(q).unwrap();
        let all = FqPoly::monic_squarefree(&field, k);
        let expected = if k == 1 { q } else { q.pow(k as u32) - q.pow(k as u32 - 1) };
        prop_assert_eq!(all.len() as u64, expected);
        prop_assert!(all.iter().all(|f| f.is_monic() && f.is_squarefree() && f.degree() == Some(k)));
    }

    #[test]
    fn orbits_partition(d in 2u32..=12, q in prop::sample::select(vec![5u64, 7, 11, 13, 25]), n in 1u32..=3) {
        prop_assume!(num_integer::gcd(d as u64, q) == 1);
        let qn = q.pow(n);
        let orbits = orbits_of_q(d, n, q).unwrap();
        let mut seen = BTreeSet::new();
        for o in &orbits {
            prop_assert_eq!(o.a_o as usize, o.members.len());
            for &i in &o.members {
                prop_assert!(seen.insert(i));
                prop_assert!(o.contains(((i as u64 * qn) % d as u64) as u32));
            }
            let neg_closed = o.members.iter().all(|&i| o.contains((d - i) % d));
            prop_assert_eq!(o.symmetric, neg_closed);
        }
        prop_assert_eq!(seen, (0..d).collect::<BTreeSet<_>>());
    }

    #[test]
    fn quadratic_character_degree_and_sign(deg in 1usize..=4, index in any::<u64>(), n in 1u32..=2) {
        let g = monic(5, deg, index);
        prop_assume!(g.is_squarefree() && !(n == 2 && deg == 4));
        let rep = RepDescriptor::Char(PowerCharacter::from_poly(g, 2, 1).unwrap());
        let expected = rep.base_change(n).unwrap().expected_degree().unwrap();
        let l = l_polynomial(&rep, n).unwrap();
        prop_assert_eq!(l.degree(), expected);
        let w = root_number(&l).unwrap().sign();
        prop_assert!(matches!(w, Some(1) | Some(-1)), "{:?}", w);
        prop_assert!(weil_check(&l).is_ok());
    }

    #[test]
    fn cubic_character_degree(deg in 1usize..=3, index in any::<u64>()) {
        let g = monic(7, deg, index);
        prop_assume!(g.is_squarefree());
        let rep = RepDescriptor::Char(PowerCharacter::from_poly(g, 3, 1).unwrap());
        let l = l_polynomial(&rep, 1).unwrap();
        prop_assert_eq!(l.degree(), rep.expected_degree().unwrap());
        prop_assert!(weil_check(&l).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn density_is_a_fraction(split in 0u32..5, inert in 0u32..5, degree in 2u32..=3) {
        prop_assume!(split != inert);
        let k = FiniteField::of_order(5).unwrap();
        let conds = LocalConditions {
            d: 2,
            split: vec![Place::linear(&k, split)],
            inert: vec![Place::linear(&k, inert)],
            ramified: vec![],
        };
        let fam = TwistFamily::new(RepDescriptor::Trivial(k), 2, 1, degree, conds).unwrap();
        let r = density_experiment(&fam, 1 << 16, 0).unwrap();
        prop_assert!(r.exhaustive);
        prop_assert!(r.good <= r.carrier);
        let x = ratio_f64(&r.empirical);
        prop_assert!((0.0..=1.0).contains(&x));
    }

    #[test]
    fn cubic_covers_factor_over_orbits(deg in 3usize..=4, index in any::<u64>()) {
        let f = monic(5, deg, index);
        prop_assume!(f.is_squarefree());
        let cover = CoverCurve::new(f, 3, 1).unwrap();
        prop_assert!(cover.check_orbit_factorization().unwrap());
        let z = cover.zeta_numerator().unwrap();
        prop_assert_eq!(z.degree(), 2 * cover.genus());
        prop_assert!(weil_check(&z).is_ok());
    }
}
