use super::*;
use crate::weil::dim_invariants;

fn form(s: &str) -> DiscriminantForm {
    JordanSymbol::parse(s).unwrap().to_form().unwrap()
}

fn all_descriptors(primes: &[u64]) -> Vec<FundamentalDescriptor> {
    let mut out = Vec::new();
    for &p in primes {
        for x in [SquareClass::Square, SquareClass::NonSquare] {
            for s in (0..8).step_by(2) {
                if let Ok(d) = fundamental_form(p, x, s) {
                    out.push(d);
                }
            }
        }
    }
    out
}

#[test]
fn table_rows() {
    let sym = |p, x, s| fundamental_form(p, x, s).unwrap().symbol.to_string();
    assert_eq!(sym(3, SquareClass::Square, 0), "1");
    assert_eq!(sym(5, SquareClass::Square, 4), "5^-4");
    assert_eq!(sym(2, SquareClass::Square, 4), "2_II^-4");
    assert_eq!(sym(2, SquareClass::Square, 6), "2_6^+2.4_II^+2");
    assert_eq!(sym(2, SquareClass::NonSquare, 0), "2_1^+1.4_7^+1.8_II^+2");
    assert_eq!(sym(2, SquareClass::NonSquare, 4), "2_1^+1.4_3^-1.8_II^+2");
    // p^{ε3} signatures.
    for (p, s, text) in [
        (3, 2, "3^+3"),
        (3, 6, "3^-3"),
        (5, 4, "5^+3"),
        (5, 0, "5^-3"),
        (7, 6, "7^+3"),
        (7, 2, "7^-3"),
    ] {
        assert_eq!(sym(p, SquareClass::NonSquare, s), text);
    }
    let err = fundamental_form(3, SquareClass::Square, 2).unwrap_err();
    assert_eq!(err.code(), "no_fundamental_form");
    assert!(fundamental_form(5, SquareClass::NonSquare, 2).is_err());
    assert!(fundamental_form(2, SquareClass::Square, 3).is_err());
    assert!(fundamental_form(9, SquareClass::Square, 0).is_err());
    let levels: Vec<i64> = [
        (3, SquareClass::Square, 0),
        (3, SquareClass::Square, 4),
        (3, SquareClass::NonSquare, 2),
        (2, SquareClass::Square, 4),
        (2, SquareClass::Square, 2),
        (2, SquareClass::NonSquare, 2),
    ]
    .into_iter()
    .map(|(p, x, s)| fundamental_form(p, x, s).unwrap().level())
    .collect();
    assert_eq!(levels, vec![1, 3, 3, 2, 4, 8]);
}

#[test]
fn fundamental_invariants_are_invariant_and_match_explicit_sets() {
    let descs = all_descriptors(&[2, 3, 5, 7]);
    assert_eq!(descs.len(), 8 + 3 * 4);
    for desc in descs {
        let fi = fundamental_invariant(&desc).unwrap();
        let w = Weil::new(&desc.form).unwrap();
        assert_eq!(w.rho_s(&fi.vector).unwrap(), fi.vector, "{}", desc.symbol);
        assert_eq!(w.rho_t(&fi.vector).unwrap(), fi.vector, "{}", desc.symbol);
        let expected = match desc.kind {
            FundamentalKind::Cube { .. } => (desc.p * desc.p - 1) as usize / 2,
            FundamentalKind::TwoFour { .. } => 6,
            FundamentalKind::Eight { .. } => 24,
            _ => 0,
        };
        assert_eq!(fi.plus_set.len(), expected, "{}", desc.symbol);
        assert_eq!(fi.minus_set.len(), expected, "{}", desc.symbol);
        if expected > 0 {
            // M+ and M- partition the isotropic elements of top order.
            let mut all = fi.plus_set.clone();
            all.extend(&fi.minus_set);
            all.sort_unstable();
            assert_eq!(all, top_isotropic(&desc.form));
        }
    }
}

#[test]
fn minus_four_examples() {
    let desc = fundamental_form(3, SquareClass::Square, 4).unwrap();
    let fi = fundamental_invariant(&desc).unwrap();
    let d = &desc.form;
    let mut c = vec![0i64; d.order()];
    c[0] = 3;
    for g in isotropic_elements(d) {
        c[g] -= 1;
    }
    assert_eq!(fi.vector, GroupAlgebraVector::from_integers(&c));
    let desc = fundamental_form(2, SquareClass::Square, 4).unwrap();
    assert_eq!(top_isotropic(&desc.form).len(), 5);
    let fi = fundamental_invariant(&desc).unwrap();
    assert_eq!(fi.vector.support().len(), 6);
}

#[test]
fn level_eight_coordinates() {
    for s in [0, 2, 4, 6] {
        let desc = fundamental_form(2, SquareClass::NonSquare, s).unwrap();
        let d = &desc.form;
        assert_eq!(d.orders(), &[2, 4, 8, 8]);
        assert_eq!(isotropic_elements(d).len(), 64);
    }
}

#[test]
fn quotient_recognition() {
    let trivial = fundamental_form(3, SquareClass::Square, 0).unwrap();
    assert!(is_fundamental_quotient(&DiscriminantForm::trivial(), &trivial));
    let cube = fundamental_form(3, SquareClass::NonSquare, 2).unwrap();
    assert!(is_fundamental_quotient(&form("3^+3"), &cube));
    assert!(!is_fundamental_quotient(&form("3^-3"), &cube));
    let nine = form("9^+1.3^+1");
    for desc in all_descriptors(&[3]) {
        assert!(!is_fundamental_quotient(&nine, &desc));
    }
}

#[test]
fn fundamental_forms_are_not_induced() {
    for desc in all_descriptors(&[2, 3, 5]) {
        let set = induced_generating_set(&desc.form).unwrap();
        assert_eq!(set.entries.len(), 1, "{}", desc.symbol);
        assert_eq!(set.entries[0].subgroup.order(), 1);
        let fi = fundamental_invariant(&desc).unwrap();
        assert_eq!(set.entries[0].vector, fi.vector);
    }
}

#[test]
fn maximal_isotropic_characteristic_functions() {
    for s in ["3^-2", "5^+2", "7^-2"] {
        let d = form(s);
        let set = induced_generating_set(&d).unwrap();
        assert_eq!(set.entries.len(), 2);
        assert_eq!(set.rank, 2);
        for e in &set.entries {
            assert_eq!(e.vector, GroupAlgebraVector::indicator(d.order(), &e.subgroup.elements));
        }
    }
    let d = form("2_0^+2");
    let set = induced_generating_set(&d).unwrap();
    assert_eq!(set.entries.len(), 1);
    assert_eq!(set.entries[0].vector.support().len(), 2);
    let inv = Weil::new(&d).unwrap().inv_basis(0);
    assert_eq!(set.entries[0].vector, normalized(&inv).unwrap());
}

#[test]
fn generating_set_spans_invariants() {
    let battery = [
        "1",
        "3^+3",
        "3^-4",
        "3^+5",
        "5^+2",
        "5^-2",
        "2_II^+2",
        "2_II^-2",
        "2_II^-4",
        "2_0^+2",
        "2_2^+2.4_II^+2",
        "2_6^+2.4_II^+2",
        "2_1^+1.4_1^+1.8_II^+2",
        "4_II^+2",
        "2_II^+2.3^-2",
        "3^+1",
        "2_2^+2",
    ];
    for s in battery {
        let d = form(s);
        let set = generating_set(&d).unwrap();
        let dim = dim_invariants(&d).unwrap() as usize;
        assert_eq!(set.rank, dim, "{s}");
        let w = if d.signature() % 2 == 0 {
            Some(Weil::new(&d).unwrap())
        } else {
            None
        };
        for e in &set.entries {
            let w = w.as_ref().unwrap();
            assert_eq!(w.inv(&e.vector).unwrap(), e.vector, "{s}");
        }
    }
}

#[test]
fn tensor_products() {
    let d = form("2_II^+2.3^-2");
    let parts = d.p_parts();
    let bases: Vec<(PPart, Vec<GroupAlgebraVector>)> = parts
        .into_iter()
        .map(|p| {
            let v = induced_generating_set(&p.form).unwrap().vectors();
            (p, v)
        })
        .collect();
    assert_eq!(bases.iter().map(|b| b.1.len()).collect::<Vec<_>>(), vec![2, 2]);
    let combined = tensor_combine(&d, &bases);
    assert_eq!(combined.len(), 4);
    assert_eq!(rank(&combined).unwrap(), 4);
    assert_eq!(dim_invariants(&d).unwrap(), 4);

    let single = form("3^-2");
    let part = single.p_parts().remove(0);
    let basis = induced_generating_set(&part.form).unwrap().vectors();
    let out = tensor_combine(&single, &[(part, basis.clone())]);
    assert_eq!(out, basis);

    let d = form("2_2^+2.3^-2");
    let parts: Vec<(PPart, Vec<GroupAlgebraVector>)> = d
        .p_parts()
        .into_iter()
        .map(|p| {
            let v = induced_generating_set(&p.form).unwrap().vectors();
            (p, v)
        })
        .collect();
    assert!(tensor_combine(&d, &parts).is_empty());
    assert_eq!(dim_invariants(&d).unwrap(), 0);
}
