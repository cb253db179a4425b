//! Synthetic crepant pairs that satisfy the correspondence by construction.
//!
//! Y is a Calabi–Yau threefold with two curve classes: Q1 pulled back from the
//! base and Q2 exceptional.  X is the orbifold side with one untwisted divisor
//! D and one twisted class T of age 1.  X's invariants are produced from Y's
//! through the substitution Q1 = U1·e^{f}, Q2 = e^{c}, so every pipeline
//! should pass on the generated data.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cohring::{ResolutionMap, Ring};
use crate::error::Result;
use crate::exactfield::{Cyc, FieldElem};
use crate::fps::phase;
use crate::gwstore::{Bound, Ins, Key, Table};
use crate::transform::{cup_exponential, load_matrix, LaurentMatrix};

#[derive(Clone, Debug)]
pub struct GenParams {
    /// D·D = a·H on both sides.
    pub a: i64,
    /// E·E = e·F on Y.
    pub e: i64,
    /// c = p·ζ₄·E.
    pub p: BigRational,
    /// The z¹ entry of U₊ from S to E.
    pub b: i64,
    /// Genus-zero degree-d invariants of Y, d = (d1, d2) with d1 ≤ 1.
    pub n: BTreeMap<(i64, i64), i64>,
}

impl GenParams {
    pub fn random(seed: u64) -> GenParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let nz = |rng: &mut ChaCha8Rng| -> i64 { loop {
                let v = rng.gen_range(-5..=5);
                if v != 0 {
                    return v;
                }
            } };
            let p = if rng.gen_bool(0.5) { BigRational::new(1.into(), 2.into()) } else { BigRational::new(1.into(), 4.into()) };
            let mut n = BTreeMap::new();
            n.insert((0, 1), nz(&mut rng));
            n.insert((1, 1), nz(&mut rng));
            for d in [(0, 2), (1, 0), (1, 2)] {
                let v = rng.gen_range(-5..=5);
                if v != 0 {
                    n.insert(d, v);
                }
            }
            let params = GenParams { a: rng.gen_range(-3..=3), e: rng.gen_range(-3..=3), p, b: nz(&mut rng).signum() * rng.gen_range(1..=3), n };
            if params.nondegenerate() {
                return params;
            }
        }
    }

    fn omega(&self, d2: i64) -> FieldElem {
        phase(&(&self.p * BigRational::from_integer(BigInt::from(d2))))
    }

    /// Σ_{d2} N_{(k,d2)} d2^b ω^{d2}.
    fn moment(&self, k: i64, b: u32) -> FieldElem {
        let mut s = FieldElem::zero();
        for (&(d1, d2), &v) in &self.n {
            if d1 == k {
                s = &s + &self.omega(d2).scale_int(v * d2.pow(b));
            }
        }
        s
    }

    /// f and the uncorrected control must differ, so the moments that feed them
    /// have to be nonzero.
    fn nondegenerate(&self) -> bool {
        !self.moment(1, 1).is_zero() && !self.moment(0, 4).is_zero() && !self.moment(0, 1).is_zero()
    }

    /// E·E on X: the classical constant corrected by the exceptional curves.
    pub fn e_orbifold(&self) -> FieldElem {
        &FieldElem::from_int(self.e) + &self.moment(0, 3)
    }
}

pub const Y_NAME: &str = "Ysyn";
pub const X_NAME: &str = "Xsyn";

pub fn ring_y_text(p: &GenParams) -> String {
    format!(
        "ring {Y_NAME}\ndimc 3\nconsts i:root4\nnovikov 2 Q1 Q2 denom 1\nc1 0 0\nbasis 6\n0 1 0\n1 D 2\n2 E 2\n3 H 4\n4 F 4\n5 pt 6\n\
pairing\n0 5 1\n1 3 1\n2 4 1\nclassical\n1 1 : 3:{}\n2 2 : 4:{}\n1 3 : 5:1\n2 4 : 5:1\nend\n",
        p.a, p.e
    )
}

pub fn ring_x_text(p: &GenParams) -> String {
    format!(
        "ring {X_NAME}\ndimc 3\nconsts i:root4\nnovikov 1 U1 denom 1\nc1 0\nbasis 6\n0 1 0\n1 D 2\n2 T 2 twisted\n3 H 4\n4 S 4 twisted\n5 pt 6\n\
pairing\n0 5 1\n1 3 1\n2 4 1\nclassical\n1 1 : 3:{}\n2 2 : 4:{}\n1 3 : 5:1\n2 4 : 5:1\nend\n",
        p.a,
        p.e_orbifold().to_string().replace(' ', "")
    )
}

pub fn resmap_text() -> String {
    format!("resmap X={X_NAME} Y={Y_NAME} s=1 r=2\nend\n")
}

/// Truncated polynomials in U1.
type Poly1 = Vec<FieldElem>;

fn pmul(a: &Poly1, b: &Poly1) -> Poly1 {
    let m = a.len();
    let mut out = vec![FieldElem::zero(); m];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(m - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// exp(k·f) for f without constant term.
fn pexp(f: &Poly1, k: i64) -> Poly1 {
    let m = f.len();
    let x: Poly1 = f.iter().map(|c| c.scale_int(k)).collect();
    let mut out = vec![FieldElem::zero(); m];
    out[0] = FieldElem::one();
    let mut term = out.clone();
    for j in 1..m as i64 {
        term = pmul(&term, &x).iter().map(|c| c.scale_rat(&BigRational::new(1.into(), j.into()))).collect();
        for (o, t) in out.iter_mut().zip(&term) {
            *o = &*o + t;
        }
    }
    out
}

/// [U1^k] of S_b for b = 0..=3 and the correction f (coefficient of E).
fn ruan_moments(p: &GenParams, nov_max: i64) -> (Vec<Poly1>, Poly1) {
    let m = nov_max as usize + 1;
    let mut f = vec![FieldElem::zero(); m];
    let mut s = vec![vec![FieldElem::zero(); m]; 4];
    for _ in 0..m {
        for (b, sb) in s.iter_mut().enumerate() {
            *sb = vec![FieldElem::zero(); m];
            for (&(d1, d2), &v) in &p.n {
                if d1 as usize >= m {
                    continue;
                }
                let w = d1.pow(3 - b as u32) * d2.pow(b as u32);
                if w == 0 {
                    continue;
                }
                let mut mono = vec![FieldElem::zero(); m];
                mono[d1 as usize] = p.omega(d2).scale_int(v * w);
                let e = pexp(&f, d2);
                for (o, t) in sb.iter_mut().zip(pmul(&mono, &e)) {
                    *o = &*o + &t;
                }
            }
        }
        f = (0..m)
            .map(|k| if k == 0 { FieldElem::zero() } else { s[1][k].scale_rat(&BigRational::new((-p.b).into(), ((k * k) as i64).into())) })
            .collect();
    }
    (s, f)
}

pub fn y_table(ring: Arc<Ring>, p: &GenParams) -> Result<Table> {
    let records = p.n.iter().map(|(&(d1, d2), &v)| (Key::new(0, vec![d1, d2], vec![]), FieldElem::from_int(v))).collect();
    let m2 = p.n.keys().map(|d| d.1).max().unwrap_or(0);
    Table::new(ring, records, Some(vec![Bound::Finite(1), Bound::Finite(m2)]))
}

/// X's data for the small-product statement, complete in U1 up to `nov_max`.
pub fn x_table(ring: Arc<Ring>, p: &GenParams, nov_max: i64) -> Result<Table> {
    let (s, _) = ruan_moments(p, nov_max);
    let mut records = Vec::new();
    for k in 1..=nov_max {
        for b in 0..=3u32 {
            let v = s[b as usize][k as usize].scale_rat(&BigRational::new(1.into(), k.pow(3 - b).into()));
            if !v.is_zero() {
                records.push((Key::new(0, vec![k], vec![Ins::new(2, 0); b as usize]), v));
            }
        }
    }
    Table::new(ring, records, Some(vec![Bound::Open(nov_max)]))
}

/// X's data for the big-product statement with n ≤ `coord_max` + 3 twisted insertions.
pub fn x_table_hl(ring: Arc<Ring>, p: &GenParams, nov_max: i64, coord_max: u32) -> Result<Table> {
    let mut records = Vec::new();
    for k in 0..=nov_max {
        for b in 0..=coord_max + 3 {
            if k == 0 && b <= 3 {
                continue;
            }
            let v = p.moment(k, b);
            if !v.is_zero() {
                records.push((Key::new(0, vec![k], vec![Ins::new(2, 0); b as usize]), v));
            }
        }
    }
    Table::new(ring, records, Some(vec![Bound::Open(nov_max)]))
}

fn c_vector(p: &GenParams) -> Vec<FieldElem> {
    let mut c = vec![FieldElem::zero(); 6];
    c[2] = FieldElem::from_cyc(Cyc::zeta(4)).scale_rat(&p.p);
    c
}

/// U = e^{−c/z}, no positive powers.
pub fn u_hard_lefschetz(x: Arc<Ring>, y: Arc<Ring>, p: &GenParams) -> Result<LaurentMatrix> {
    Ok(cup_exponential(y.clone(), &c_vector(p), -1)?.with_rings(x, y))
}

/// U = e^{−c/z}(I + b·z·E_{E,S}).
pub fn u_ruan(x: Arc<Ring>, y: Arc<Ring>, p: &GenParams) -> Result<LaurentMatrix> {
    let mut plus = LaurentMatrix::identity(x.clone(), y.clone());
    plus.add_term(2, 4, 1, &FieldElem::from_int(p.b));
    Ok(cup_exponential(y, &c_vector(p), -1)?.mul(&plus))
}

pub struct PairTexts {
    pub ring_x: String,
    pub ring_y: String,
    pub x_gw: String,
    pub x_hl_gw: String,
    pub y_gw: String,
    pub u: String,
    pub u_hl: String,
    pub resmap: String,
}

impl PairTexts {
    /// (file name, contents).
    pub fn files(&self) -> Vec<(&'static str, &str)> {
        vec![
            ("x.ring", &self.ring_x),
            ("y.ring", &self.ring_y),
            ("x.gw", &self.x_gw),
            ("x_hl.gw", &self.x_hl_gw),
            ("y.gw", &self.y_gw),
            ("u.umat", &self.u),
            ("u_hl.umat", &self.u_hl),
            ("m.res", &self.resmap),
        ]
    }
}

pub struct Pair {
    pub x: Arc<Ring>,
    pub y: Arc<Ring>,
    pub tx: Table,
    pub tx_hl: Table,
    pub ty: Table,
    pub u: LaurentMatrix,
    pub u_hl: LaurentMatrix,
    pub resmap: ResolutionMap,
    pub nov_max: i64,
    pub coord_max: u32,
}

/// Builds the pair as text and reloads it through the parsers.
pub fn generate_pair(p: &GenParams, nov_max: i64, coord_max: u32) -> Result<(PairTexts, Pair)> {
    let x = Arc::new(Ring::parse(&ring_x_text(p), "x.ring")?);
    let y = Arc::new(Ring::parse(&ring_y_text(p), "y.ring")?);
    let texts = PairTexts {
        ring_x: ring_x_text(p),
        ring_y: ring_y_text(p),
        x_gw: x_table(x.clone(), p, nov_max)?.to_gw_string(),
        x_hl_gw: x_table_hl(x.clone(), p, nov_max, coord_max)?.to_gw_string(),
        y_gw: y_table(y.clone(), p)?.to_gw_string(),
        u: u_ruan(x.clone(), y.clone(), p)?.to_umat_string(&[]),
        u_hl: u_hard_lefschetz(x.clone(), y.clone(), p)?.to_umat_string(&[]),
        resmap: resmap_text(),
    };
    let pair = Pair {
        tx: Table::parse(&texts.x_gw, "x.gw", x.clone())?,
        tx_hl: Table::parse(&texts.x_hl_gw, "x_hl.gw", x.clone())?,
        ty: Table::parse(&texts.y_gw, "y.gw", y.clone())?,
        u: load_matrix(&texts.u, "u.umat", x.clone(), y.clone())?,
        u_hl: load_matrix(&texts.u_hl, "u_hl.umat", x.clone(), y.clone())?,
        resmap: ResolutionMap::parse(&texts.resmap, "m.res")?,
        x,
        y,
        nov_max,
        coord_max,
    };
    Ok((texts, pair))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crc::{bg_check, ccrc_check, quantum_corrections_f, ruan_check, ruan_check_with};
    use crate::transform::{check_conditions, gerbe_shift};

    fn perturbed_ring_y(p: &GenParams) -> Arc<Ring> {
        let mut q = p.clone();
        q.e += 1;
        Arc::new(Ring::parse(&ring_y_text(&q), "y.ring").unwrap())
    }

    fn half_shift(u: &LaurentMatrix) -> LaurentMatrix {
        let mut rho = vec![FieldElem::zero(); 6];
        rho[2] = FieldElem::from_cyc(Cyc::zeta(4)).scale_rat(&BigRational::new(1.into(), 2.into()));
        gerbe_shift(u, &rho).unwrap()
    }

    #[test]
    fn generated_matrices_satisfy_conditions() {
        let (_, pair) = generate_pair(&GenParams::random(1), 1, 1).unwrap();
        for u in [&pair.u, &pair.u_hl] {
            let rep = check_conditions(u, Some(&pair.resmap));
            assert!(rep.ok(), "{}", rep.render());
        }
    }

    #[test]
    fn f_is_single_term() {
        let p = GenParams::random(2);
        let (_, pair) = generate_pair(&p, 1, 1).unwrap();
        let f = quantum_corrections_f(&pair.tx, Some(&pair.u), &pair.resmap, 1).unwrap();
        assert_eq!(f[2].terms().len(), 1);
        assert!((0..6).filter(|i| *i != 2).all(|i| f[i].is_zero()));
        assert_eq!(f[2].terms().values().next().unwrap(), &ruan_moments(&p, 1).1[1]);
    }

    #[test]
    fn pipelines_pass_and_detect_perturbations() {
        for seed in 0..3 {
            let (_, pair) = generate_pair(&GenParams::random(seed), 1, 1).unwrap();
            let ccrc = ccrc_check(&pair.tx, &pair.ty, &pair.u, &pair.resmap, Some(1)).unwrap();
            assert!(ccrc.ok(), "{}", ccrc.render());
            let ruan = ruan_check(&pair.tx, &pair.ty, &pair.u, &pair.resmap, 1).unwrap();
            assert!(ruan.ok(), "{}", ruan.render());
            let control = ruan_check_with(&pair.tx, &pair.ty, &pair.u, &pair.resmap, 1, false).unwrap();
            assert!(!control.ok(), "{}", control.render());
            let bg = bg_check(&pair.tx_hl, &pair.ty, &pair.u_hl, &pair.resmap, 1, 1).unwrap();
            assert!(bg.ok(), "{}", bg.render());

            let shifted = half_shift(&pair.u);
            assert!(!ccrc_check(&pair.tx, &pair.ty, &shifted, &pair.resmap, Some(1)).unwrap().ok());
            assert!(!ruan_check(&pair.tx, &pair.ty, &shifted, &pair.resmap, 1).unwrap().ok());
            assert!(!bg_check(&pair.tx_hl, &pair.ty, &half_shift(&pair.u_hl), &pair.resmap, 1, 1).unwrap().ok());

            let y2 = perturbed_ring_y(&GenParams::random(seed));
            let ty2 = Table::parse(&pair.ty.to_gw_string(), "y.gw", y2.clone()).unwrap();
            let u2 = pair.u.with_rings(pair.x.clone(), y2.clone());
            let u2_hl = pair.u_hl.with_rings(pair.x.clone(), y2);
            assert!(!ccrc_check(&pair.tx, &ty2, &u2, &pair.resmap, Some(1)).unwrap().ok());
            assert!(!ruan_check(&pair.tx, &ty2, &u2, &pair.resmap, 1).unwrap().ok());
            assert!(!bg_check(&pair.tx_hl, &ty2, &u2_hl, &pair.resmap, 1, 1).unwrap().ok());
        }
    }

    #[test]
    fn modified_pipelines_agree() {
        let (_, pair) = generate_pair(&GenParams::random(5), 1, 1).unwrap();
        let rep = crate::crc::modified_pipelines(&pair.tx, &pair.ty, &pair.u, &pair.resmap, 1).unwrap();
        assert!(rep.ok(), "{}", rep.render());
        assert_eq!(rep.count(crate::report::Status::Pass), 5);
    }
}
