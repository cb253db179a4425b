//! Acceptance gate: one PASS/FAIL line per criterion with wall time.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use gwcone_core::cohring::Ring;
use gwcone_core::crc::{bg_check, ccrc_check, modified_pipelines, quantum_corrections_f, ruan_check, semipositive};
use gwcone_core::datasets;
use gwcone_core::exactfield::{parse_expr, ConstDecl, Cyc, FieldElem};
use gwcone_core::fps::{Exp, HVector, OrderSpec, Series};
use gwcone_core::genpair::{generate_pair, ring_y_text, GenParams};
use gwcone_core::giventalspace::{cone_audit, frobenius_from_frame, j_function, omega};
use gwcone_core::gwstore::{close_table, dimension_audit, twist, CloseBounds, Ins, Key, Table};
use gwcone_core::potentials::{
    big_quantum_product, divisor_form_product, genus0_potential, graded_order, small_quantum_product, third_derivative, wdvv_audit,
};
use gwcone_core::report::{Report, Status};
use gwcone_core::transform::{
    birkhoff, birkhoff_with_order, check_conditions, cup_exponential, extract_c, gerbe_shift, nilpotency_certificates, reconstruct,
    LaurentMatrix,
};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn load(ring: &str, gw: &str) -> Table {
    let r = Arc::new(Ring::parse(ring, "ring").unwrap());
    Table::parse(gw, "gw", r).unwrap()
}

fn require(rep: &Report, ids: &[&str], want: Status) -> std::result::Result<(), String> {
    for id in ids {
        ensure!(rep.status_of(id) == Some(want), "{id} is {:?}, expected {want:?}\n{}", rep.status_of(id), rep.render());
    }
    Ok(())
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// ⟨τ_{k_1}⋯τ_{k_n}⟩ on the point is the multinomial (n−3)!/∏k_i!.
fn point_oracle(key: &Key) -> FieldElem {
    let n = key.n() as u64;
    let den: u64 = key.ins.iter().map(|i| factorial(i.psi as u64)).product();
    FieldElem::frac(factorial(n - 3) as i64, den as i64)
}

fn criterion_1() -> Outcome {
    let t = load(datasets::POINT_RING, datasets::POINT_GW);
    let closed = ok(close_table(&t, &CloseBounds { max_n: 7, max_psi: 4, degree: vec![] }))?;
    let mut single = 0;
    for (k, e) in closed.entries() {
        ensure!(e.value == point_oracle(k), "{} = {} but the multinomial oracle gives {}", k.render(closed.ring()), e.value, point_oracle(k));
        if k.ins.iter().filter(|i| i.psi > 0).count() <= 1 {
            ensure!(e.value.is_one(), "{} = {}, expected 1", k.render(closed.ring()), e.value);
            single += 1;
        }
    }
    ensure!(single == 5, "expected the 5 keys <psi^(n-3) 1, 1, ..., 1> for n = 3..7, found {single}");
    let audit = dimension_audit(&closed);
    ensure!(audit.ok(), "{}", audit.render());
    Ok(format!("{} entries, {single} of the form psi^(n-3) all equal 1", closed.len()))
}

fn criterion_2() -> Outcome {
    let t = load(datasets::P1_RING, datasets::P1_GW);
    let closed = ok(close_table(&t, &CloseBounds { max_n: 4, max_psi: 2, degree: vec![3] }))?;
    ensure!(dimension_audit(&closed).ok(), "{}", dimension_audit(&closed).render());
    let o = graded_order(&t, 3, 4);
    let f = ok(genus0_potential(&t, &o))?;
    let ring = t.ring();
    for a in 0..2 {
        for b in 0..2 {
            let p = ok(big_quantum_product(ring, &f, a, b))?;
            let q = ok(divisor_form_product(&t, &o, a, b))?;
            for (c, (x, y)) in p.iter().zip(&q).enumerate() {
                ensure!(ok(x.first_difference(y))?.is_none(), "divisor form differs at {a}*{b}->{c}");
            }
        }
    }
    let w = ok(wdvv_audit(&t, &o))?;
    ensure!(w.ok(), "{}", w.render());
    let hh = ok(small_quantum_product(ring, &f, 1, 1))?;
    let q = Series::monomial(1, hh[0].nc(), hh[0].order().clone(), Exp { z: 0, q: vec![1], t: vec![0; hh[0].nc()] }, FieldElem::one());
    ensure!(ok(hh[0].first_difference(&q))?.is_none() && hh[1].is_zero(), "h*h = {:?}", hh);
    Ok(format!("closure {} entries; divisor form, wdvv, h*h = Q", closed.len()))
}

fn criterion_3() -> Outcome {
    let items = ["(i)", "(ii)", "(iii)", "(iv)", "(v)"];
    let pt = load(datasets::POINT_RING, datasets::POINT_GW);
    require(&ok(cone_audit(&pt, 0, 3, -5, &[]))?, &items, Status::Pass)?;
    let p1 = load(datasets::P1_RING, datasets::P1_GW);
    let sample = vec![FieldElem::one(), FieldElem::from_int(2)];
    require(&ok(cone_audit(&p1, 2, 3, -5, &[sample]))?, &items, Status::Pass)?;
    let bad = Key::new(0, vec![1], vec![Ins::new(1, 0), Ins::new(1, 0), Ins::new(0, 1)]);
    let mut recs: Vec<(Key, FieldElem)> = p1.entries().iter().map(|(k, e)| (k.clone(), e.value.clone())).collect();
    recs.push((bad, FieldElem::from_int(5)));
    let perturbed = ok(Table::new(Arc::new(p1.ring().clone()), recs, None))?;
    require(&ok(cone_audit(&perturbed, 2, 3, -5, &[]))?, &["(ii)"], Status::Fail)?;
    Ok("point and P1 pass (i)-(v); perturbed descendant fails (ii)".into())
}

fn criterion_4() -> Outcome {
    let mut names = Vec::new();
    for d in datasets::single_space() {
        let t = ok(d.load())?;
        let ring = t.ring();
        let nov = if ring.novikov.is_empty() { 0 } else { 1 };
        let frame = ok(j_function(&t, nov, 3, -5))?;
        let fd = ok(frobenius_from_frame(&frame, ring))?;
        let f = ok(genus0_potential(&t, &graded_order(&t, nov, 5)))?;
        let n = ring.n();
        for a in 0..n {
            for b in 0..n {
                let g = Series::constant(ring.novikov.len(), n, fd.g[a][b].order().clone(), ring.pairing[a][b].clone());
                ensure!(ok(fd.g[a][b].first_difference(&g))?.is_none(), "{}: g[{a}][{b}] = {:?}", d.name, fd.g[a][b]);
                for c in 0..n {
                    let want = third_derivative(&f, a, b, c);
                    ensure!(ok(fd.c[a][b][c].first_difference(&want))?.is_none(), "{}: c[{a}][{b}][{c}] differs from d3F", d.name);
                }
            }
        }
        names.push(d.name);
    }
    Ok(format!("{} datasets: {}", names.len(), names.join(", ")))
}

fn criterion_5() -> Outcome {
    let u = ok(datasets::p1113())?;
    let rep = check_conditions(&u, None);
    require(&rep, &["(a)", "(d)", "degree"], Status::Pass)?;
    let c = ok(extract_c(&u))?;
    ensure!(c.c.iter().all(|x| x.is_zero()), "c = {:?}", c.c);
    let b = ok(birkhoff(&u))?;
    let decls: Vec<ConstDecl> = ["g13", "g23"].iter().map(|s| ConstDecl::transcendental(s)).collect();
    let mut want = LaurentMatrix::identity(u.x.clone(), u.x.clone());
    want.add_term(5, 4, 1, &ok(parse_expr("-g23/g13", &decls))?);
    ensure!(b.plus == want, "U+ =\n{}", b.plus.render());
    ensure!(reconstruct(&b) == u, "reconstruction differs");
    let certs = nilpotency_certificates(&b);
    ensure!(certs.len() == 1 && certs[0].i == 1 && certs[0].order == Some(2), "{:?}", certs);
    Ok("U+ = I - (g23/g13) z E_{5,4}; A1^2 = 0".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..20 {
        let n = rng.gen_range(2..=8);
        let u = common::random_factored(&mut rng, n);
        if let Some((lo, hi)) = u.z_range() {
            ensure!(lo >= -3 && hi <= 3, "case {case}: z-support [{lo}, {hi}]");
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let a = ok(birkhoff(&u))?;
        let b = ok(birkhoff_with_order(&u, &order))?;
        ensure!(a.minus == b.minus && a.zero == b.zero && a.plus == b.plus, "case {case}: factors depend on the column order");
        ensure!(reconstruct(&a) == u && reconstruct(&b) == u, "case {case}: reconstruction differs");
    }
    Ok("20 matrices".into())
}

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

fn criterion_7() -> Outcome {
    let half = BigRational::new(1.into(), 2.into());
    let quarter = BigRational::new(1.into(), 4.into());
    let p1 = load(datasets::P1_RING, datasets::P1_GW);
    let (_, _, ty, _, _, _) = ok(datasets::synthetic())?;
    for (t, x) in [(&p1, vec![half.clone()]), (&ty, vec![quarter.clone(), half.clone()])] {
        let neg: Vec<BigRational> = x.iter().map(|q| -q).collect();
        let back = ok(twist(&ok(twist(t, &x))?, &neg))?;
        ensure!(back.to_gw_string() == t.to_gw_string(), "twist round trip differs on {}", t.ring().name);
    }
    let i = FieldElem::from_cyc(Cyc::zeta(4));
    let rhos = [
        (Arc::new(p1.ring().clone()), vec![FieldElem::zero(), FieldElem::frac(3, 2)]),
        (Arc::new(ty.ring().clone()), vec![FieldElem::zero(), FieldElem::from_int(2), i.scale_int(3), FieldElem::zero(), FieldElem::zero(), FieldElem::zero()]),
    ];
    for (ring, rho) in rhos {
        let u = ok(cup_exponential(ring.clone(), &rho, 1))?;
        let id = LaurentMatrix::identity(ring.clone(), ring.clone());
        for a in 0..ring.n() {
            for b in 0..ring.n() {
                for k in -2..=1 {
                    for l in -2..=1 {
                        let lhs = ok(omega(&ring, &apply(&u, a, k), &apply(&u, b, l)))?;
                        let rhs = ok(omega(&ring, &apply(&id, a, k), &apply(&id, b, l)))?;
                        ensure!(ok(lhs.first_difference(&rhs))?.is_none(), "{}: Omega not preserved on phi_{a} z^{k}, phi_{b} z^{l}", ring.name);
                    }
                }
            }
        }
    }
    let mut params = GenParams::random(7);
    params.p = half;
    let (_, pair) = ok(generate_pair(&params, 1, 1))?;
    let rep = ok(modified_pipelines(&pair.tx, &pair.ty, &pair.u, &pair.resmap, 1))?;
    require(&rep, &["ccrc-equivalence", "ruan-equivalence", "ccrc-outcome", "ruan-outcome"], Status::Pass)?;
    Ok("twist inverse, e^(rho/z) symplectic, modified pipelines at c = 1/2 zeta_4".into())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for seed in 0..4u64 {
        let params = GenParams::random(seed);
        let (_, pair) = ok(generate_pair(&params, 1, 1))?;
        let rank = pair.x.n();
        ensure!((3..=6).contains(&rank) && pair.resmap.r - pair.resmap.s == 1, "shape N+1 = {rank}, r - s = {}", pair.resmap.r - pair.resmap.s);
        let f = ok(quantum_corrections_f(&pair.tx, Some(&pair.u), &pair.resmap, 1))?;
        let nonzero: Vec<usize> = (0..f.len()).filter(|i| !f[*i].is_zero()).collect();
        ensure!(nonzero.len() == 1 && f[nonzero[0]].len() == 1, "f is not single-term: {:?}", f);

        let run = |tx: &Table, ty: &Table, u: &LaurentMatrix, u_hl: &LaurentMatrix, txh: &Table| -> std::result::Result<[bool; 3], String> {
            Ok([
                ok(ccrc_check(tx, ty, u, &pair.resmap, Some(1)))?.ok(),
                ok(ruan_check(tx, ty, u, &pair.resmap, 1))?.ok(),
                ok(bg_check(txh, ty, u_hl, &pair.resmap, 1, 1))?.ok(),
            ])
        };
        let base = run(&pair.tx, &pair.ty, &pair.u, &pair.u_hl, &pair.tx_hl)?;
        ensure!(base == [true; 3], "seed {seed}: unperturbed verdicts {base:?}");

        // one structure constant of Y
        let mut q = params.clone();
        let delta = rng.gen_range(1..=3);
        if rng.gen_bool(0.5) {
            q.a += delta;
        } else {
            q.e += delta;
        }
        let y2 = Arc::new(ok(Ring::parse(&ring_y_text(&q), "y.ring"))?);
        let ty2 = ok(Table::parse(&pair.ty.to_gw_string(), "y.gw", y2.clone()))?;
        let got = run(&pair.tx, &ty2, &pair.u.with_rings(pair.x.clone(), y2.clone()), &pair.u_hl.with_rings(pair.x.clone(), y2), &pair.tx_hl)?;
        ensure!(got == [false; 3], "seed {seed}: structure-constant perturbation verdicts {got:?}");

        // c
        let shift = BigRational::new(1.into(), if rng.gen_bool(0.5) { 2.into() } else { 4.into() });
        let mut rho = vec![FieldElem::zero(); rank];
        rho[2] = FieldElem::from_cyc(Cyc::zeta(4)).scale_rat(&shift);
        let got = run(&pair.tx, &pair.ty, &ok(gerbe_shift(&pair.u, &rho))?, &ok(gerbe_shift(&pair.u_hl, &rho))?, &pair.tx_hl)?;
        ensure!(got == [false; 3], "seed {seed}: c perturbation by {shift} verdicts {got:?}");
        checked += 1;
    }
    Ok(format!("{checked} generated pairs pass; every perturbation fails all three"))
}

fn criterion_9() -> Outcome {
    let p1 = load(datasets::P1_RING, datasets::P1_GW);
    let sp = ok(semipositive(&p1))?;
    ensure!(sp.semipositive && sp.witness.is_none(), "{}", sp.report.render());
    let neg4 = load(datasets::NEG4_RING, datasets::NEG4_GW);
    let sp = ok(semipositive(&neg4))?;
    ensure!(!sp.semipositive && sp.witness == Some(vec![1]), "{}", sp.report.render());
    ensure!(sp.contradictions.len() == 1 && sp.report.status_of("vanishing") == Some(Status::Warn), "{}", sp.report.render());
    // semi-positive threefold carrying a nonzero invariant with c1.d < 0
    let ring = "ring Neg3\ndimc 3\nnovikov 1 Q denom 1\nc1 -1\nbasis 4\n0 1 0\n1 h 2\n2 h2 4\n3 pt 6\npairing\n0 3 1\n1 2 1\nclassical\n1 1 : 2:1\n1 2 : 3:1\nend\n";
    let t = load(ring, "gw Neg3\ninv g=0 d=1 ins=(1:0) val=2\nend\n");
    let sp = ok(semipositive(&t))?;
    ensure!(sp.semipositive && sp.report.status_of("vanishing") == Some(Status::Fail), "{}", sp.report.render());
    Ok("P1 true; dim 4 false with witness d=(1); vanishing audit flags c1.d < 0".into())
}

type Criterion = (&'static str, fn() -> Outcome, u64);

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("point closure", criterion_1, 5),
        ("P1 suite", criterion_2, 10),
        ("cone audit", criterion_3, 30),
        ("Frobenius extraction", criterion_4, 10),
        ("transformation matrix", criterion_5, 2),
        ("Birkhoff determinism", criterion_6, 60),
        ("twist coherence", criterion_7, 10),
        ("CRC pipelines", criterion_8, 60),
        ("semi-positivity", criterion_9, 1),
    ];
    let mut failed = Vec::new();
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let dt = start.elapsed();
        let verdict = match &out {
            Ok(_) if dt > Duration::from_secs(*limit) => Err(format!("took {:.2}s, limit {limit}s", dt.as_secs_f64())),
            Ok(m) => Ok(m.clone()),
            Err(e) => Err(e.clone()),
        };
        match verdict {
            Ok(m) => println!("PASS criterion {} {name} ({:.2}s < {limit}s): {m}", k + 1, dt.as_secs_f64()),
            Err(e) => {
                println!("FAIL criterion {} {name} ({:.2}s, limit {limit}s): {e}", k + 1, dt.as_secs_f64());
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
