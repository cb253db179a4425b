use gwcone_core::exactfield::FieldElem;
use gwcone_core::fps::{Exp, OrderSpec, Series};
use proptest::prelude::*;

fn order() -> OrderSpec {
    OrderSpec::new(Some(3), vec![true, false], Some(3))
}

fn series() -> impl Strategy<Value = Series> {
    prop::collection::vec(((0i64..3, 0i64..2), (0u32..3, 0u32..2), -2i64..2, -3i64..4), 0..6).prop_map(|terms| {
        let mut s = Series::zero(2, 2, order());
        for ((q1, q2), (t1, t2), z, c) in terms {
            s.add_term(Exp { z, q: vec![q1, q2], t: vec![t1, t2] }, FieldElem::from_int(c));
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mul_commutative_and_associative(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn distributive(a in series(), b in series(), c in series()) {
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn leibniz(a in series(), b in series()) {
        let l = a.mul(&b).unwrap().derivative(0);
        let r = a.derivative(0).mul(&b).unwrap().add(&a.mul(&b.derivative(0)).unwrap()).unwrap();
        // both sides are known to coordinate degree 2
        let o = OrderSpec::new(Some(3), vec![true, false], Some(2));
        prop_assert_eq!(l.with_order(o.clone()), r.with_order(o));
    }

    #[test]
    fn additive_inverse(a in series()) {
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }
}
