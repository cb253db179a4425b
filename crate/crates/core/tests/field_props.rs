use gwcone_core::exactfield::{cyclotomic_poly, parse_expr, ConstDecl, Cyc, FieldElem};
use num_rational::BigRational;
use proptest::prelude::*;

fn decls() -> Vec<ConstDecl> {
    ["a", "b", "c"].iter().map(|n| ConstDecl::transcendental(n)).collect()
}

// Small random expressions over a, b, c, zeta_4 and zeta_6.
fn arb_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (-4i64..5).prop_map(|k| format!("({k})")),
        (1i64..4, 1i64..4).prop_map(|(p, q)| format!("({p}/{q})")),
        Just("a".to_string()),
        Just("b".to_string()),
        Just("c".to_string()),
        Just("zeta_4".to_string()),
        Just("zeta_6".to_string()),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x} + {y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x} - {y})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x} * {y})")),
        ]
    })
}

fn arb_elem() -> impl Strategy<Value = FieldElem> {
    (arb_expr(), arb_expr()).prop_map(|(n, d)| {
        let ds = decls();
        let num = parse_expr(&n, &ds).unwrap();
        let den = parse_expr(&d, &ds).unwrap();
        num.checked_div(&den).unwrap_or(num)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn associativity(x in arb_elem(), y in arb_elem(), z in arb_elem()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn distributivity(x in arb_elem(), y in arb_elem(), z in arb_elem()) {
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    #[test]
    fn inverses(x in arb_elem()) {
        prop_assert!((&x - &x).is_zero());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn normal_form_idempotent(x in arb_elem()) {
        let once = x.normalize();
        prop_assert_eq!(&once, &x);
        prop_assert_eq!(once.normalize(), once);
    }

    #[test]
    fn printed_form_reparses(x in arb_elem()) {
        let s = x.to_string();
        prop_assert_eq!(parse_expr(&s, &decls()).unwrap(), x);
    }

    #[test]
    fn roots_of_unity_relations(n in 1u32..30) {
        let z = Cyc::zeta(n);
        prop_assert!(z.pow(n as i64).unwrap().is_one());
        let mut acc = Cyc::zero();
        for (k, a) in cyclotomic_poly(n).iter().enumerate() {
            let t = Cyc::zeta_pow(n, k as i64).scale(&BigRational::from_integer(a.clone()));
            acc = acc.add(&t);
        }
        prop_assert!(acc.is_zero());
    }
}
