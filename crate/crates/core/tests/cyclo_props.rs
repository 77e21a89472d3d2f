use num_rational::BigRational;
use proptest::prelude::*;

use weilinv::CycloNumber;

fn element(order: u64, terms: &[(i64, i64, i64)]) -> CycloNumber {
    let terms: Vec<(i64, BigRational)> = terms
        .iter()
        .map(|&(k, a, b)| (k, BigRational::new(a.into(), b.into())))
        .collect();
    CycloNumber::from_powers(order, &terms).unwrap()
}

fn terms() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((-50i64..50, -9i64..10, 1i64..6), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_laws(m in prop::sample::select(vec![1u64, 3, 4, 8, 12, 15, 24, 40]), n in prop::sample::select(vec![1u64, 2, 5, 9]),
                  a in terms(), b in terms(), c in terms()) {
        let x = element(m, &a);
        let y = element(n, &b);
        let z = element(m * n, &c);
        let xy = x.checked_mul(&y).unwrap();
        prop_assert_eq!(&xy, &y.checked_mul(&x).unwrap());
        let lhs = x.checked_mul(&y.checked_add(&z).unwrap()).unwrap();
        let rhs = xy.checked_add(&x.checked_mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        if !x.is_zero() {
            let inv = x.inverse().unwrap();
            prop_assert_eq!(x.checked_mul(&inv).unwrap(), CycloNumber::one());
        }
    }

    #[test]
    fn conjugation_and_embedding(m in prop::sample::select(vec![3u64, 5, 8, 12, 20]), a in terms()) {
        let x = element(m, &a);
        let (re, im) = x.embed_complex();
        let (cre, cim) = x.conj().embed_complex();
        prop_assert!((re - cre).abs() < 1e-9 && (im + cim).abs() < 1e-9);
        let n = x.checked_mul(&x.conj()).unwrap();
        let (nre, nim) = n.embed_complex();
        prop_assert!((nre - (re * re + im * im)).abs() < 1e-6 && nim.abs() < 1e-6);
    }

    #[test]
    fn roots_of_unity(m in 1u64..60, k in -200i64..200) {
        let z = CycloNumber::zeta(m, k).unwrap();
        let mut p = CycloNumber::one();
        for _ in 0..m {
            p = p.checked_mul(&z).unwrap();
        }
        prop_assert_eq!(p, CycloNumber::one());
    }
}
