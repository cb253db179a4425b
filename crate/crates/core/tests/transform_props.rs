mod common;

use std::sync::Arc;

use gwcone_core::cohring::Ring;
use gwcone_core::datasets;
use gwcone_core::exactfield::{Cyc, FieldElem};
use gwcone_core::fps::{Exp, OrderSpec, Series};
use gwcone_core::fps::HVector;
use gwcone_core::giventalspace::omega;
use gwcone_core::transform::{birkhoff, birkhoff_with_order, check_conditions, cup_exponential, extract_c, gerbe_shift, reconstruct, LaurentMatrix};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// U applied to φ_a z^k.
fn apply(u: &LaurentMatrix, a: usize, k: i64) -> HVector {
    let nv = u.y.novikov.len();
    (0..u.size())
        .map(|i| {
            let mut s = Series::zero(nv, 0, OrderSpec::exact(nv));
            for (m, c) in u.entry(i, a) {
                s.add_term(Exp { z: m + k, q: vec![0; nv], t: vec![] }, c.clone());
            }
            s
        })
        .collect()
}

fn assert_symplectic(u: &LaurentMatrix) {
    let id = LaurentMatrix::identity(u.x.clone(), u.x.clone());
    let n = u.size();
    for a in 0..n {
        for b in 0..n {
            for k in -2..=1 {
                for l in -2..=1 {
                    let lhs = omega(&u.y, &apply(u, a, k), &apply(u, b, l)).unwrap();
                    let rhs = omega(&u.x, &apply(&id, a, k), &apply(&id, b, l)).unwrap();
                    assert_eq!(lhs.first_difference(&rhs).unwrap(), None, "phi_{a} z^{k}, phi_{b} z^{l}");
                }
            }
        }
    }
}

#[test]
fn cup_exponential_is_symplectic_by_residue_pairing() {
    let p1 = Arc::new(Ring::parse(datasets::P1_RING, "p1.ring").unwrap());
    for k in [-3, 1, 5] {
        assert_symplectic(&cup_exponential(p1.clone(), &[FieldElem::zero(), FieldElem::frac(k, 2)], 1).unwrap());
    }
    let y = Arc::new(Ring::parse(datasets::SYN_Y_RING, "y.ring").unwrap());
    let i = FieldElem::from_cyc(Cyc::zeta(4));
    let rho = vec![FieldElem::zero(), FieldElem::from_int(2), i.scale_int(3), FieldElem::zero(), FieldElem::zero(), FieldElem::zero()];
    assert_symplectic(&cup_exponential(y, &rho, -1).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gerbe_shift_preserves_conditions(num in -7i64..=7, den in prop::sample::select(vec![1i64, 2, 4])) {
        let (_, _, _, u, _, rm) = datasets::synthetic().unwrap();
        let q = FieldElem::from_cyc(Cyc::zeta(4)).scale_rat(&BigRational::new(num.into(), den.into()));
        let mut rho = vec![FieldElem::zero(); 6];
        rho[2] = q.clone();
        let shifted = gerbe_shift(&u, &rho).unwrap();
        let before = check_conditions(&u, Some(&rm));
        let after = check_conditions(&shifted, Some(&rm));
        let st = |r: &gwcone_core::report::Report| r.lines.iter().map(|l| (l.id.clone(), l.status)).collect::<Vec<_>>();
        prop_assert_eq!(st(&before), st(&after));
        let c0 = extract_c(&u).unwrap().c;
        let c1 = extract_c(&shifted).unwrap().c;
        prop_assert_eq!(&c0[2] - &c1[2], q);
    }

    #[test]
    fn birkhoff_round_trip(seed in 0u64..1000, n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = common::random_factored(&mut rng, n);
        let b = birkhoff(&u).unwrap();
        prop_assert_eq!(reconstruct(&b), u.clone());
        let rev: Vec<usize> = (0..n).rev().collect();
        let b2 = birkhoff_with_order(&u, &rev).unwrap();
        prop_assert_eq!(b.minus, b2.minus);
        prop_assert_eq!(b.zero, b2.zero);
        prop_assert_eq!(b.plus, b2.plus);
    }
}
