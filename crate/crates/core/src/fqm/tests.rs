use super::*;

fn form(s: &str) -> DiscriminantForm {
    JordanSymbol::parse(s).unwrap().to_form().unwrap()
}

fn r(a: i64, b: i64) -> Ratio<i64> {
    Ratio::new(a, b)
}

#[test]
fn parse_and_display() {
    let s = JordanSymbol::parse("2_1^+1.4_5^-1.8_II^+2").unwrap();
    assert_eq!(s.to_string(), "2_1^+1.4_5^-1.8_II^+2");
    assert_eq!(s.order(), Some(2 * 4 * 64));
    assert_eq!(s.level(), 8);
    assert_eq!(JordanSymbol::parse("3^−4").unwrap().to_string(), "3^-4");
    assert!(JordanSymbol::parse("").unwrap().is_trivial());
    for bad in [
        "bogus^^", "6^+1", "3^+0", "3_II^+2", "2_II^+3", "2_1^-1", "2_2^+1", "2_4^+2", "5^*2",
    ] {
        assert!(JordanSymbol::parse(bad).is_err(), "{bad} should be rejected");
    }
    let e = JordanSymbol::parse("bogus^^").unwrap_err();
    assert_eq!(e.code(), "parse_error");
    assert_eq!(JordanSymbol::parse("2_1^-1").unwrap_err().code(), "inconsistent_symbol");
}

#[test]
fn odd_rank_one_realization() {
    let d = form("5^+1");
    assert_eq!(d.order(), 5);
    let a = *d.q_gen()[0].numer();
    assert_eq!(crate::arith::legendre(2 * a, 5), 1);
    assert_eq!(d.q_gen()[0], r(2, 5));
    let d = form("5^-1");
    assert_eq!(crate::arith::legendre(2 * *d.q_gen()[0].numer(), 5), -1);
}

#[test]
fn even_block_realization() {
    let d = form("2_II^+2");
    assert_eq!(d.orders(), &[2, 2]);
    assert_eq!(d.q_gen(), vec![r(0, 1), r(0, 1)]);
    let g = Element(vec![1, 0]);
    let h = Element(vec![0, 1]);
    assert_eq!(d.b_val(&g, &h), r(1, 2));
    assert_eq!(d.q_val(&Element(vec![1, 1])), r(1, 2));
    assert_eq!(d.level(), 2);
    let d = form("2_II^-2");
    assert_eq!(d.q_gen(), vec![r(1, 2), r(1, 2)]);
}

#[test]
fn trivial_form() {
    let d = form("");
    assert_eq!(d.order(), 1);
    assert_eq!(d.level(), 1);
    assert_eq!(d.signature(), 0);
    assert_eq!(d.q_val(&Element(vec![])), r(0, 1));
}

#[test]
fn levels_and_signatures() {
    assert_eq!(form("2_II^+2").level(), 2);
    assert_eq!(form("2_1^+1").level(), 4);
    assert_eq!(form("2_II^-4").signature(), 4);
    assert_eq!(form("3^+3").signature(), 2);
    assert_eq!(form("3^-3").signature(), 6);
    assert_eq!(form("5^+3").signature(), 4);
    assert_eq!(form("5^-3").signature(), 0);
    assert_eq!(form("7^+3").signature(), 6);
    assert_eq!(form("7^-3").signature(), 2);
    assert_eq!(form("2_1^+1").signature(), 1);
    assert_eq!(form("2_2^+2").signature(), 2);
}

#[test]
fn gram_examples() {
    let a1 = from_gram(&[vec![2]]).unwrap().form;
    assert_eq!(a1.order(), 2);
    assert_eq!(a1.q_gen(), vec![r(1, 4)]);
    assert_eq!(a1.signature(), 1);

    let a2 = from_gram(&[vec![2, -1], vec![-1, 2]]).unwrap().form;
    assert_eq!(a2.order(), 3);
    assert_eq!(a2.q_gen(), vec![r(1, 3)]);
    assert_eq!(a2.signature(), 2);
    assert!(a2.milgram_holds());

    let a1a1 = from_gram(&[vec![2, 0], vec![0, 2]]).unwrap().form;
    assert_eq!(a1a1.order(), 4);
    assert_eq!(a1a1.signature(), 2);
    assert_eq!(a1a1.oddity(), 2);
    assert_eq!(a1a1.invariants(), form("2_2^+2").invariants());

    let d4 = vec![
        vec![2, -1, 0, 0],
        vec![-1, 2, -1, -1],
        vec![0, -1, 2, 0],
        vec![0, -1, 0, 2],
    ];
    let d4f = from_gram(&d4).unwrap().form;
    assert_eq!(d4f.order(), 4);
    assert_eq!(d4f.level(), 2);
    assert_eq!(d4f.signature(), 4);
    assert_eq!(d4f.invariants(), form("2_II^-2").invariants());

    assert!(from_gram(&[vec![1]]).is_err());
    assert!(from_gram(&[vec![2, 2], vec![2, 2]]).is_err());
    assert!(from_gram(&[vec![2, 1], vec![0, 2]]).is_err());
}

#[test]
fn gram_coset_map_respects_norms() {
    let g = from_gram(&[vec![2, -1], vec![-1, 2]]).unwrap();
    for y0 in -3i64..=3 {
        for y1 in -3i64..=3 {
            let c = g.coset_of(&[y0, y1]);
            let two_q = g.inner_dual(&[y0, y1]);
            let q = Ratio::new(*two_q.numer() as i64, 2 * *two_q.denom() as i64);
            let q = q - q.floor();
            assert_eq!(frac(g.form.q_num(c), g.form.level()), q);
        }
    }
}

#[test]
fn polarization_identity() {
    for s in ["2_II^+2", "3^-2", "2_1^+1.4_3^-1.8_II^+2", "2_3^+3", "4_II^-2.3^+1"] {
        let d = form(s);
        let n = d.level();
        for i in 0..d.order() {
            assert_eq!(d.b_num(i, i), modp(2 * d.q_num(i), n));
            for j in 0..d.order() {
                let lhs = modp(d.q_num(d.add(i, j)) - d.q_num(i) - d.q_num(j), n);
                assert_eq!(lhs, d.b_num(i, j));
            }
        }
    }
}

#[test]
fn milgram_battery() {
    for s in [
        "2_II^+2",
        "2_II^-2",
        "2_II^-4",
        "2_1^+1",
        "2_7^+1",
        "2_3^-1",
        "2_0^+2",
        "2_4^-2",
        "2_5^-3",
        "3^+1",
        "3^-3",
        "5^+2",
        "7^-3",
        "9^+1",
        "9^-2",
        "4_II^+2",
        "4_1^+1",
        "8_5^-1",
        "2_1^+1.4_5^-1.8_II^+2",
        "2_II^+2.3^-2",
        "2_6^+2.4_II^+2",
        "27^-1",
        "2_II^+8",
    ] {
        let d = form(s);
        assert!(d.milgram_holds(), "{s}");
    }
}

#[test]
fn chi_values() {
    let d = form("5^+1");
    assert_eq!(d.chi(1).unwrap(), 1);
    assert!(d.chi(5).is_err());
    let d2 = form("5^+2");
    assert_eq!(d2.chi(2).unwrap(), 1);
    let d = form("5^+1.5^+1");
    assert_eq!(d.chi(2).unwrap(), 1);
    assert_eq!(form("2_1^+1").chi(3).unwrap_err().code(), "odd_signature");
    for s in [
        "3^-2",
        "2_II^+2.3^-2",
        "2_6^+2.4_II^+2",
        "2_1^+1.4_3^-1.8_II^+2",
        "7^+2",
        "5^-2.3^+2",
    ] {
        let d = form(s);
        let n = d.level();
        let units: Vec<i64> = (1..n.max(2)).filter(|&a| gcd(a, n) == 1).collect();
        for &a in &units {
            for &b in &units {
                let ab = modp(a * b, n);
                assert_eq!(d.chi(a).unwrap() * d.chi(b).unwrap(), d.chi(ab).unwrap(), "{s}");
            }
            assert_eq!(d.chi(a).unwrap(), d.chi(a + n).unwrap());
        }
    }
}

#[test]
fn chi_of_odd_rank_one_uses_the_kronecker_symbol() {
    // 5-excess is 4, so the signature is 4 and chi is defined.
    let d = form("5^+1");
    assert_eq!(d.signature(), 4);
    assert_eq!(d.chi(2).unwrap(), -1);
}

#[test]
fn subquotients() {
    let d = form("3^+2");
    let s1 = d.subquotients(1);
    assert_eq!(s1.kernel, vec![0]);
    assert_eq!(s1.image.len(), 9);
    assert_eq!(s1.star.len(), 9);
    let s0 = d.subquotients(0);
    assert_eq!(s0.kernel.len(), 9);
    assert_eq!(s0.star, vec![0]);
    let d = form("2_1^+1");
    let s2 = d.subquotients(2);
    assert_eq!(s2.kernel.len(), 2);
    assert_eq!(s2.star.len(), 1);
    let x2 = d.x_c(2).unwrap();
    assert_eq!(s2.star, vec![x2]);
    assert_eq!(x2, 1);
}

#[test]
fn q_c_is_well_defined() {
    let d = form("3^+2");
    let x = d.x_c(9).unwrap();
    assert_eq!(x, 0);
    assert_eq!(d.q_c(9, 0, 0).unwrap(), r(0, 1));
    let x3 = d.x_c(2).unwrap();
    for g in d.subquotients(2).star {
        let mu = d.mul(5, g);
        assert_eq!(d.q_c(2, g, x3).unwrap(), frac(2 * d.q_num(mu), 3));
    }
    let d = form("2_1^+1");
    let x2 = d.x_c(2).unwrap();
    assert!(d.q_c(2, x2, x2).is_ok());
    for s in ["2_1^+1.4_3^-1.8_II^+2", "2_6^+2.4_II^+2", "2_3^+3"] {
        let d = form(s);
        for c in 0..=d.level() {
            let sq = d.subquotients(c);
            assert_eq!(sq.star.len(), sq.image.len());
            let x = d.x_c(c).expect("2-torsion representative exists");
            for &g in &sq.star {
                d.q_c(c, g, x).unwrap();
            }
        }
    }
}

#[test]
fn count_norm_examples() {
    let s = JordanSymbol::parse("5^+2").unwrap();
    assert_eq!(count_norm(&s, 0).unwrap(), 9);
    assert_eq!(count_norm(&JordanSymbol::parse("2_II^+2").unwrap(), 0).unwrap(), 3);
    assert_eq!(count_norm(&JordanSymbol::parse("2_1^+1").unwrap(), 0).unwrap(), 1);
    assert_eq!(count_norm(&JordanSymbol::parse("2_II^-4").unwrap(), 0).unwrap(), 6);
    assert!(count_norm(&JordanSymbol::parse("9^+1").unwrap(), 0).is_err());
    assert!(count_norm(&JordanSymbol::parse("3^+1.5^+1").unwrap(), 0).is_err());
}

#[test]
fn count_norm_matches_enumeration() {
    for p in [3i64, 5, 7] {
        for n in 1..=4 {
            for sign in ['+', '-'] {
                let s = JordanSymbol::parse(&format!("{p}^{sign}{n}")).unwrap();
                let d = s.to_form().unwrap();
                for j in 0..p {
                    assert_eq!(count_norm(&s, j).unwrap(), count_norm_brute(&d, j, p), "{s} j={j}");
                }
            }
        }
    }
    for n in [2, 4, 6] {
        for sign in ['+', '-'] {
            let s = JordanSymbol::parse(&format!("2_II^{sign}{n}")).unwrap();
            let d = s.to_form().unwrap();
            for j in 0..2 {
                assert_eq!(count_norm(&s, j).unwrap(), count_norm_brute(&d, j, 2), "{s} j={j}");
            }
        }
    }
    for n in 1..=6u32 {
        for t in 0..8 {
            for sign in ['+', '-'] {
                let Ok(s) = JordanSymbol::parse(&format!("2_{t}^{sign}{n}")) else {
                    continue;
                };
                let d = s.to_form().unwrap();
                for j in 0..4 {
                    assert_eq!(count_norm(&s, j).unwrap(), count_norm_brute(&d, j, 4), "{s} j={j}");
                }
            }
        }
    }
}

#[test]
fn p_part_decomposition() {
    let d = form("2_II^+2.3^-1");
    assert_eq!(d.level(), 6);
    let parts = d.p_parts();
    assert_eq!(parts.len(), 2);
    assert_eq!((parts[0].p, parts[0].form.order()), (2, 4));
    assert_eq!((parts[1].p, parts[1].form.order()), (3, 3));
    let mut seen = std::collections::HashSet::new();
    for a in 0..4 {
        for b in 0..3 {
            let x = parts[0].embed(&d, a);
            let y = parts[1].embed(&d, b);
            let s = d.add(x, y);
            seen.insert(s);
            let qa = frac(parts[0].form.q_num(a), parts[0].form.level());
            let qb = frac(parts[1].form.q_num(b), parts[1].form.level());
            let q = qa + qb;
            assert_eq!(frac(d.q_num(s), d.level()), q - q.floor());
        }
    }
    assert_eq!(seen.len(), 12);
    assert_eq!(form("9^+2").p_parts().len(), 1);
    assert!(form("").p_parts().is_empty());
    // A form built from a composite-order generator splits correctly.
    let z6 = DiscriminantForm::new(vec![6], &[r(1, 12)], &[vec![r(0, 1)]]).unwrap();
    let parts = z6.p_parts();
    assert_eq!(parts.iter().map(|p| p.form.order()).collect::<Vec<_>>(), vec![2, 3]);
}

#[test]
fn direct_sum_of_grams_matches_sum_of_forms() {
    let a2 = vec![vec![2, -1], vec![-1, 2]];
    let a1 = vec![vec![2]];
    let mut g = vec![vec![0i64; 3]; 3];
    g[0][0] = 2;
    g[1][1] = 2;
    g[2][2] = 2;
    g[1][2] = -1;
    g[2][1] = -1;
    let sum = from_gram(&g).unwrap().form;
    let parts = from_gram(&a1)
        .unwrap()
        .form
        .direct_sum(&from_gram(&a2).unwrap().form)
        .unwrap();
    assert_eq!(sum.invariants(), parts.invariants());
    assert!(sum.milgram_holds());
}

#[test]
fn invalid_forms_are_rejected() {
    assert!(DiscriminantForm::new(vec![2], &[r(1, 2)], &[vec![r(0, 1)]]).is_err());
    assert!(DiscriminantForm::new(vec![3], &[r(1, 2)], &[vec![r(0, 1)]]).is_err());
    assert!(DiscriminantForm::new(
        vec![2, 2],
        &[r(0, 1), r(0, 1)],
        &[vec![r(0, 1), r(0, 1)], vec![r(0, 1), r(0, 1)]]
    )
    .is_err());
}
