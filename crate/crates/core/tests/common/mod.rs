#![allow(dead_code)]

use std::sync::Arc;

use gwcone_core::cohring::Ring;
use gwcone_core::exactfield::FieldElem;
use gwcone_core::transform::LaurentMatrix;
use rand::Rng;

/// Degrees (real) of a ring of rank `n` with trivial classical products below the top class.
fn degrees(n: usize) -> (u32, Vec<u32>) {
    match n {
        2 => (1, vec![0, 2]),
        3 => (2, vec![0, 2, 4]),
        4 => (3, vec![0, 2, 4, 6]),
        5 => (2, vec![0, 2, 2, 2, 4]),
        6 => (3, vec![0, 2, 2, 4, 4, 6]),
        7 => (2, vec![0, 2, 2, 2, 2, 2, 4]),
        8 => (3, vec![0, 2, 2, 2, 4, 4, 4, 6]),
        _ => panic!("rank {n} not provided"),
    }
}

pub fn graded_ring(n: usize) -> Arc<Ring> {
    let (dimc, deg) = degrees(n);
    let top = 2 * dimc;
    let mut text = format!("ring G{n}\ndimc {dimc}\nbasis {n}\n");
    for (i, d) in deg.iter().enumerate() {
        text.push_str(&format!("{i} {} {d}\n", if i == 0 { "1".to_string() } else { format!("e{i}") }));
    }
    // pair the k-th class of degree d with the k-th class of degree top − d
    let mut pairs = Vec::new();
    for i in 0..n {
        let partners: Vec<usize> = (0..n).filter(|&j| deg[j] == top - deg[i]).collect();
        let rank = (0..i).filter(|&j| deg[j] == deg[i]).count();
        pairs.push((i, partners[rank]));
    }
    text.push_str("pairing\n");
    for &(i, j) in &pairs {
        if i <= j {
            text.push_str(&format!("{i} {j} 1\n"));
        }
    }
    text.push_str("classical\n");
    let pt = n - 1;
    for &(i, j) in &pairs {
        if i != 0 && j != 0 && i <= j {
            text.push_str(&format!("{i} {j} : {pt}:1\n"));
        }
    }
    text.push_str("end\n");
    Arc::new(Ring::parse(&text, "graded.ring").unwrap())
}

fn small(rng: &mut impl Rng) -> FieldElem {
    FieldElem::frac(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// U₋·U₀·U₊ with homogeneous entries of z-degree (deg_j − deg_i)/2.
pub fn random_factored(rng: &mut impl Rng, n: usize) -> LaurentMatrix {
    let ring = graded_ring(n);
    let deg: Vec<i64> = (0..n).map(|i| ring.deg(i) as i64).collect();
    let mut minus = LaurentMatrix::identity(ring.clone(), ring.clone());
    let mut zero = LaurentMatrix::zero(ring.clone(), ring.clone());
    let mut plus = LaurentMatrix::identity(ring.clone(), ring.clone());
    for i in 0..n {
        for j in 0..n {
            let k = (deg[j] - deg[i]) / 2;
            if k < 0 && rng.gen_bool(0.6) {
                minus.add_term(i, j, k, &small(rng));
            } else if k > 0 && rng.gen_bool(0.6) {
                plus.add_term(i, j, k, &small(rng));
            } else if k == 0 {
                if i == j {
                    zero.add_term(i, j, 0, &FieldElem::from_int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }));
                } else if i > j && rng.gen_bool(0.5) {
                    zero.add_term(i, j, 0, &small(rng));
                }
            }
        }
    }
    minus.mul(&zero).mul(&plus)
}
