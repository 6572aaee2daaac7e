use num_bigint::BigUint;
use proptest::prelude::*;

use syntomic_core::assembly::unit_torsionfree_audit;
use syntomic_core::bigraded::{Element, Window};
use syntomic_core::gfp::{binom_mod_p, Fp, FpMatrix};
use syntomic_core::hochschild::{closed_form_span, image_fn_closed_form, ThhFp};
use syntomic_core::syntomic::{can_phi_assemble, syntomic_closed_form};

const PRIMES: [u32; 5] = [2, 3, 5, 7, 11];

fn factorial_binomial(j: u64, k: u64) -> BigUint {
    if k > j {
        return BigUint::from(0u32);
    }
    let fact = |m: u64| (1..=m).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i));
    fact(j) / (fact(k) * fact(j - k))
}

/// A random homogeneous element of THH(F_p) with generators up to ε_top, in
/// either the ε or the ε̄ basis.
fn random_element(thh: &ThhFp, barred: bool, stem: i64, weight: i64, coeffs: &[u32]) -> Option<Element> {
    let alg = if barred { &thh.bar } else { &thh.eps };
    let basis = alg.enumerate_window(&Window::point(stem, weight)).unwrap();
    if basis.is_empty() {
        return None;
    }
    let v: Vec<u32> = (0..basis.len()).map(|i| coeffs[i % coeffs.len()] % thh.p).collect();
    Some(Element::from_vector(alg, &basis, &v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lucas_agrees_with_factorials(pi in 0..PRIMES.len(), j in 0u64..=64, k in 0u64..=64) {
        let p = PRIMES[pi];
        let expected = factorial_binomial(j, k) % BigUint::from(p);
        let got = binom_mod_p(j, k, p).unwrap().value;
        prop_assert_eq!(BigUint::from(got), expected);
    }

    #[test]
    fn rank_plus_nullity_is_width(
        pi in 0..3usize,
        rows in 1usize..8,
        cols in 1usize..8,
        seed in prop::collection::vec(0u32..1000, 64),
    ) {
        let field = Fp::new(PRIMES[pi]).unwrap();
        let data: Vec<Vec<u32>> = (0..rows)
            .map(|i| (0..cols).map(|j| seed[(i * 8 + j) % 64] % field.p()).collect())
            .collect();
        let m = FpMatrix::from_rows(field, cols, &data).unwrap();
        let ker = m.kernel();
        prop_assert_eq!(m.rank() + ker.dim(), cols);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in ker.basis() {
            prop_assert!(m.apply(v).unwrap().iter().all(|&x| x == 0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_squares_to_zero(
        pi in 0..3usize,
        top in 1usize..3,
        barred in any::<bool>(),
        stem in 0i64..60,
        weight in -3i64..=0,
        coeffs in prop::collection::vec(0u32..11, 1..6),
    ) {
        let thh = ThhFp::new(PRIMES[pi], top).unwrap();
        if let Some(x) = random_element(&thh, barred, stem, weight, &coeffs) {
            let s2 = thh.sigma(&thh.sigma(&x).unwrap()).unwrap();
            prop_assert!(s2.is_zero(), "σ²({}) = {}", x.label(), s2.label());
        }
    }

    #[test]
    fn cap_products_compose_by_binomials(
        pi in 0..3usize,
        barred in any::<bool>(),
        stem in 0i64..80,
        weight in -2i64..=0,
        a in 0u64..12,
        b in 0u64..12,
        coeffs in prop::collection::vec(0u32..11, 1..6),
    ) {
        let p = PRIMES[pi];
        let thh = ThhFp::new(p, 2).unwrap();
        if let Some(x) = random_element(&thh, barred, stem, weight, &coeffs) {
            let lhs = thh.cap(&thh.cap(&x, a).unwrap(), b).unwrap();
            let c = binom_mod_p(a + b, a, p).unwrap().value;
            let rhs = thh.cap(&x, a + b).unwrap().scale(c);
            prop_assert_eq!(thh.to_eps(&lhs).unwrap(), thh.to_eps(&rhs).unwrap());
        }
    }

    #[test]
    fn image_is_closed_under_sigma_and_caps(case in 0..4usize, pick in 0usize..1000, j in 1u64..20) {
        let (p, n) = [(2, 1), (2, 2), (3, 1), (5, 1)][case];
        let top = 2 * (p as i64).pow(n as u32 + 2);
        let image = image_fn_closed_form(p, n, &Window::new((-1, top + 1), (-(n as i64) - 2, 2))).unwrap();
        let thh = &image.thh;
        let inside: Vec<_> = image.monomials.iter().filter(|m| thh.bar.tri(m).0 < top).collect();
        let m = inside[pick % inside.len()];
        let x = Element::monomial(&thh.bar, m.clone());
        for y in [thh.sigma(&x).unwrap(), thh.cap(&x, j).unwrap()] {
            let y = thh.to_eps(&y).unwrap();
            let Some((s, w, _)) = y.tri() else { continue };
            let coords = thh.basis(&Window::point(s, w)).unwrap();
            let index = coords.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let span = closed_form_span(&image, &coords, s, w).unwrap();
            prop_assert!(span.contains(&y.to_vector(&index).unwrap()), "{} leaves the image", y.label());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn syntomic_weights_and_bottom_class(case in 0..6usize) {
        let (p, n) = [(2, 1), (2, 2), (3, 1), (5, 1), (7, 1), (3, 2)][case];
        let table = can_phi_assemble(p, n).unwrap().table();
        prop_assert_eq!(table.label_multiset(), syntomic_closed_form(p, n).unwrap().label_multiset());
        let lowest = -(n as i64);
        prop_assert!(table.entries.iter().all(|e| (lowest..=2).contains(&e.weight)));
        let bottom: Vec<_> = table.entries.iter().filter(|e| e.weight == lowest).collect();
        let expected: String = (1..=n).map(|i| format!("ε̄{}", char::from_u32(0x2080 + i as u32).unwrap())).collect();
        prop_assert_eq!(bottom.len(), 1);
        prop_assert_eq!(&bottom[0].label, &expected);
    }
}

#[test]
fn unit_audit_is_clean() {
    for (p, n) in [(2, 1), (2, 2), (3, 1)] {
        let audit = unit_torsionfree_audit(p, n).unwrap();
        assert!(audit.is_clean(), "({p}, {n}): {:?}", audit.open());
    }
}
