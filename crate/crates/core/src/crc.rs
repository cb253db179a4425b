//! Crepant-resolution pipelines: the cohomological statement, the small
//! quantum statement with quantum corrections, the Hard-Lefschetz (big
//! quantum) statement, semi-positivity, and the gerbe-twisted variants.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::cohring::{ResolutionMap, Ring};
use crate::error::{Error, Result};
use crate::exactfield::FieldElem;
use crate::fps::{fmt_exp, phase, Exp, Names, OrderSpec, Series};
use crate::gwstore::{twist, Evaluator, Ins, Key, RuleOrder, Table};
use crate::linalg::{self, Mat};
use crate::potentials::{degrees, genus0_potential, graded_order, small_quantum_product, third_derivative};
use crate::report::{Report, Status, SURROGATE_BANNER};
use crate::transform::{birkhoff, extract_c, render_vec, CExtraction, LaurentMatrix};

fn fmt_degree(d: &[i64], denom: i64) -> String {
    format!("({})", d.iter().map(|x| fmt_exp(*x, denom)).collect::<Vec<_>>().join(","))
}

pub struct Semipositivity {
    pub semipositive: bool,
    /// A class with 3 − dim ≤ c₁·d < 0.
    pub witness: Option<Vec<i64>>,
    /// Nonzero invariants with c₁·d < 0.
    pub contradictions: Vec<Key>,
    pub report: Report,
}

/// Decides semi-positivity over the classes declared by the table's records.
pub fn semipositive(table: &Table) -> Result<Semipositivity> {
    let ring = table.ring();
    if !ring.novikov.is_empty() && !ring.c1_declared {
        return Err(Error::Precondition(format!("ring {} declares no c1 data", ring.name)));
    }
    let lower = BigRational::from_integer(BigInt::from(3 - ring.dim_c as i64));
    let classes: BTreeSet<Vec<i64>> =
        table.entries().keys().map(|k| k.degree.clone()).filter(|d| d.iter().any(|x| *x != 0)).collect();
    let witness = classes
        .iter()
        .find(|d| {
            let c = ring.c1_dot(d);
            c >= lower && c < BigRational::zero()
        })
        .cloned();
    let contradictions: Vec<Key> = table
        .entries()
        .iter()
        .filter(|(k, e)| !e.value.is_zero() && ring.c1_dot(&k.degree) < BigRational::zero())
        .map(|(k, _)| k.clone())
        .collect();
    let mut report = Report::new("semipositive");
    match &witness {
        None => report.pass(
            "semipositive",
            format!("no class among {} declared has {} <= c1.d < 0", classes.len(), lower),
        ),
        Some(d) => report.fail(
            "semipositive",
            format!("class d={} has c1.d = {} in [{}, 0)", fmt_degree(d, ring.denom), ring.c1_dot(d), lower),
        ),
    }
    if contradictions.is_empty() {
        report.pass("vanishing", "no nonzero invariant has c1.d < 0");
    }
    for k in &contradictions {
        let detail = format!(
            "{} = {} is nonzero with c1.d = {}",
            k.render(ring),
            table.get(k).expect("listed key"),
            ring.c1_dot(&k.degree)
        );
        if witness.is_none() {
            report.fail("vanishing", detail);
        } else {
            report.warn("vanishing", format!("{detail} (X is not semi-positive, so no vanishing is predicted)"));
        }
    }
    Ok(Semipositivity { semipositive: witness.is_none(), witness, contradictions, report })
}

/// How e^{c_i} enters a substitution.
#[derive(Clone, Debug)]
pub enum CValues {
    /// c_i = p_i·ζ₄ and e^{c_i} is read as exp(2π√−1·p_i).
    Exact(Vec<BigRational>),
    /// e^{c_i} is a free unit `e_c<i>`.
    Symbolic,
}

impl CValues {
    /// One value per Novikov variable of Y.
    pub fn from_extraction(ex: &CExtraction, ring_y: &Ring) -> CValues {
        if ex.verdict != Status::Pass {
            return CValues::Symbolic;
        }
        match ex.phases() {
            Some(p) => CValues::Exact((1..=ring_y.novikov.len()).map(|i| p[i].clone()).collect()),
            None => CValues::Symbolic,
        }
    }

    /// e^{c_i · x/denom}.
    fn unit(&self, i: usize, x: i64, denom: i64) -> Result<FieldElem> {
        if x == 0 {
            return Ok(FieldElem::one());
        }
        match self {
            CValues::Exact(p) => Ok(phase(&(&p[i] * BigRational::new(BigInt::from(x), BigInt::from(denom))))),
            CValues::Symbolic => {
                if x % denom != 0 {
                    return Err(Error::Invalid("fractional power of a symbolic e^c".into()));
                }
                FieldElem::var(&format!("e_c{}", i + 1))
                    .pow(x / denom)
                    .ok_or_else(|| Error::Invalid("symbolic unit".into()))
            }
        }
    }

    fn is_symbolic(&self) -> bool {
        matches!(self, CValues::Symbolic)
    }
}

/// exp(k·f) for a series without constant term.
fn exp_scaled(f: &Series, k: &BigRational) -> Result<Series> {
    let x = f.scale(&FieldElem::from_rat(k.clone()));
    let mut out = Series::constant(f.nv(), f.nc(), f.order().clone(), FieldElem::one());
    let mut term = out.clone();
    for j in 1..=64i64 {
        term = term.mul(&x)?.scale(&FieldElem::frac(1, j));
        if term.is_zero() {
            return Ok(out);
        }
        out = out.add(&term)?;
    }
    Err(Error::Invalid("exp(f) does not terminate at this order".into()))
}

fn drop_coords(s: &Series) -> Series {
    let mut order = s.order().clone();
    order.coord_max = None;
    let mut out = Series::zero(s.nv(), 0, order);
    for (e, c) in s.terms() {
        if e.t.iter().all(|x| *x == 0) {
            out.add_term(Exp { z: e.z, q: e.q.clone(), t: vec![] }, c.clone());
        }
    }
    out
}

type Products = Vec<Vec<Vec<Series>>>;

/// φ_a ★ φ_b at τ = 0 as coordinate-free series, `[a][b][c]` the coefficient of φ_c.
fn small_products(table: &Table, order: &OrderSpec) -> Result<Products> {
    let ring = table.ring();
    let mut o = order.clone();
    o.coord_max = Some(3);
    let f = genus0_potential(table, &o)?;
    (0..ring.n())
        .map(|a| {
            (0..ring.n())
                .map(|b| Ok(small_quantum_product(ring, &f, a, b)?.iter().map(drop_coords).collect()))
                .collect()
        })
        .collect()
}

enum Mode<'a> {
    /// Keep only degrees in ker π_*, exceptional Q_i = e^{c_i}.
    Limit,
    /// Q_i = e^{c_i + f_i}·U_i (i < s), Q_i = e^{c_i + f_i} (i ≥ s).
    Substitute(Option<&'a [Series]>),
}

fn specialize(s: &Series, ring_y: &Ring, rm: &ResolutionMap, cv: &CValues, mode: &Mode, target: &OrderSpec) -> Result<Series> {
    let specialized: Vec<usize> = rm.exceptional().collect();
    let nt = target.graded.len();
    let nc = s.nc();
    let denom = ring_y.denom;
    let mut factor = |d: &[i64]| -> Result<Series> {
        match mode {
            Mode::Limit => {
                if d[..rm.s].iter().any(|x| *x != 0) {
                    return Ok(Series::zero(nt, nc, target.clone()));
                }
                let mut k = FieldElem::one();
                for i in rm.exceptional() {
                    k = &k * &cv.unit(i, d[i], denom)?;
                }
                Ok(Series::constant(nt, nc, target.clone(), k))
            }
            Mode::Substitute(f) => {
                let mut k = FieldElem::one();
                for (i, x) in d.iter().enumerate() {
                    k = &k * &cv.unit(i, *x, denom)?;
                }
                let q: Vec<i64> = d[..rm.s].to_vec();
                let mut m = Series::monomial(nt, nc, target.clone(), Exp { z: 0, q, t: vec![0; nc] }, k);
                if let Some(f) = f {
                    for (i, x) in d.iter().enumerate() {
                        if *x != 0 && !f[i].is_zero() {
                            let fi = widen(&f[i], nc, target);
                            m = m.mul(&exp_scaled(&fi, &BigRational::new(BigInt::from(*x), BigInt::from(denom)))?)?;
                        }
                    }
                }
                Ok(m)
            }
        }
    };
    s.substitute_novikov(&specialized, &ring_y.novikov, target.clone(), &mut factor)
}

/// Re-embeds a coordinate-free series among `nc` coordinates.
fn widen(s: &Series, nc: usize, order: &OrderSpec) -> Series {
    let mut out = Series::zero(s.nv(), nc, order.clone());
    for (e, c) in s.terms() {
        out.add_term(Exp { z: e.z, q: e.q.clone(), t: vec![0; nc] }, c.clone());
    }
    out
}

/// X-side products U₀⁻¹(U₀φ_a ★_Y U₀φ_b).
fn transport(u0: &Mat, u0inv: &Mat, py: &Products) -> Result<Products> {
    let n = u0.len();
    let zero = py[0][0][0].zero_like();
    let mut out = vec![vec![vec![zero.clone(); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut w = vec![zero.clone(); n];
            for i in 0..n {
                if u0[i][a].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let k = &u0[i][a] * &u0[j][b];
                    if k.is_zero() {
                        continue;
                    }
                    for (c, s) in py[i][j].iter().enumerate() {
                        if !s.is_zero() {
                            w[c] = w[c].add(&s.scale(&k))?;
                        }
                    }
                }
            }
            for c in 0..n {
                for (k, s) in w.iter().enumerate() {
                    if !u0inv[c][k].is_zero() && !s.is_zero() {
                        out[a][b][c] = out[a][b][c].add(&s.scale(&u0inv[c][k]))?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn monomial_name(e: &Exp, names: &Names) -> String {
    let parts: Vec<String> = e
        .q
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != 0)
        .map(|(i, x)| {
            let n = names.novikov.get(i).cloned().unwrap_or_else(|| format!("Q{}", i + 1));
            if *x == names.denom {
                n
            } else {
                format!("{n}^{}", fmt_exp(*x, names.denom))
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn x_names(ring: &Ring) -> Names {
    Names { novikov: ring.novikov.clone(), coords: vec![], denom: ring.denom }
}

/// Compares products entrywise; the FAIL line names the first differing coefficient.
fn compare_products(rep: &mut Report, id: &str, ring: &Ring, x: &Products, y: &Products, symbolic: bool) -> Result<bool> {
    let n = ring.n();
    let names = x_names(ring);
    let mut count = 0;
    for a in 0..n {
        for b in a..n {
            for c in 0..n {
                if let Some((e, vx, vy)) = x[a][b][c].first_difference(&y[a][b][c])? {
                    rep.fail(
                        id,
                        format!(
                            "{} * {} -> {} at {}: X gives {}, Y gives {}",
                            ring.basis[a].name,
                            ring.basis[b].name,
                            ring.basis[c].name,
                            monomial_name(&e, &names),
                            vx,
                            vy
                        ),
                    );
                    return Ok(false);
                }
                count += 1;
            }
        }
    }
    if symbolic {
        rep.warn(id, format!("{count} structure constants agree with e^c kept as free units (conditional)"));
    } else {
        rep.pass(id, format!("{count} structure constants agree"));
    }
    Ok(true)
}

struct Prep {
    u0: Mat,
    u0inv: Mat,
    cv: CValues,
}

fn prepare(tx: &Table, ty: &Table, u: &LaurentMatrix, rm: &ResolutionMap, rep: &mut Report) -> Result<Prep> {
    rm.validate(tx.ring(), ty.ring())?;
    if u.x.name != tx.ring().name || u.y.name != ty.ring().name {
        return Err(Error::Invalid(format!(
            "U maps {} -> {} but the tables are over {} and {}",
            u.x.name,
            u.y.name,
            tx.ring().name,
            ty.ring().name
        )));
    }
    let b = birkhoff(u)?;
    let u0inv = linalg::invert(&b.zero).ok_or_else(|| Error::Invalid("U0 is singular".into()))?;
    let c = extract_c(u)?;
    rep.push(c.verdict, "c", c.detail.clone());
    let cv = CValues::from_extraction(&c, ty.ring());
    isometry_line(rep, "U0-isometry", &b.zero, tx.ring(), ty.ring());
    Ok(Prep { u0: b.zero, u0inv, cv })
}

fn isometry_line(rep: &mut Report, id: &str, u0: &Mat, x: &Ring, y: &Ring) {
    let g = linalg::mul(&linalg::mul(&linalg::transpose(u0), &y.pairing), u0);
    if g == x.pairing {
        rep.pass(id, "U0 is an isometry of the pairings");
    } else {
        let (a, b) = (0..x.n())
            .flat_map(|a| (0..x.n()).map(move |b| (a, b)))
            .find(|&(a, b)| g[a][b] != x.pairing[a][b])
            .expect("some entry differs");
        rep.fail(id, format!("(U0 phi_{a}, U0 phi_{b})_Y = {} but (phi_{a}, phi_{b})_X = {}", g[a][b], x.pairing[a][b]));
    }
}

fn ccrc_products(tx: &Table, ty: &Table, rm: &ResolutionMap, prep: &Prep, nov_max: Option<i64>) -> Result<(Products, Products)> {
    let ry = ty.ring();
    let py = small_products(ty, &OrderSpec::new(nov_max, ty.support().graded(), Some(3)))?;
    let target = OrderSpec::exact(0);
    let lim: Products = py
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.iter().map(|s| specialize(s, ry, rm, &prep.cv, &Mode::Limit, &target)).collect())
                .collect()
        })
        .collect::<Result<_>>()?;
    let pred = transport(&prep.u0, &prep.u0inv, &lim)?;
    let rx = tx.ring();
    let n = rx.n();
    let cr: Products = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).map(|c| Series::constant(0, 0, target.clone(), rx.classical[a][b][c].clone())).collect())
                .collect()
        })
        .collect();
    Ok((cr, pred))
}

fn ccrc_inner(
    tx: &Table,
    ty: &Table,
    u: &LaurentMatrix,
    rm: &ResolutionMap,
    nov_max: Option<i64>,
    cv_override: Option<CValues>,
) -> Result<(Report, Products)> {
    let mut rep = Report::new("crc cohomological");
    rep.banner(SURROGATE_BANNER);
    let mut prep = prepare(tx, ty, u, rm, &mut rep)?;
    if let Some(cv) = cv_override {
        prep.cv = cv;
    }
    let (cr, pred) = ccrc_products(tx, ty, rm, &prep, nov_max)?;
    compare_products(&mut rep, "cup-CR", tx.ring(), &cr, &pred, prep.cv.is_symbolic())?;
    Ok((rep, pred))
}

/// Chen–Ruan product of X against the limit of Y's small product at Q_exc = e^c.
pub fn ccrc_check(tx: &Table, ty: &Table, u: &LaurentMatrix, rm: &ResolutionMap, nov_max: Option<i64>) -> Result<Report> {
    Ok(ccrc_inner(tx, ty, u, rm, nov_max, None)?.0)
}

/// f as one series per basis element of Y, in the Novikov variables of X.
pub fn quantum_corrections_f(tx: &Table, u: Option<&LaurentMatrix>, rm: &ResolutionMap, nov_max: i64) -> Result<Vec<Series>> {
    let u = u.ok_or_else(|| Error::Precondition("quantum corrections need the transformation U".into()))?;
    let rx = tx.ring();
    if u.x.name != rx.name {
        return Err(Error::Invalid(format!("U is defined on {} but the table is over {}", u.x.name, rx.name)));
    }
    let s = rx.novikov.len();
    let order = OrderSpec::new(Some(nov_max), vec![true; s], None);
    let n = u.y.n();
    let mut f: Vec<Series> = (0..n).map(|_| Series::zero(s, 0, order.clone())).collect();
    let mut ev = Evaluator::new(tx, RuleOrder::First);
    let b: Vec<Option<Vec<FieldElem>>> = (0..rx.n())
        .map(|e| {
            let w = rx.deg(e) as i64;
            if w % 2 == 1 || w < 4 {
                return None;
            }
            let v = u.column_coeff(e, w / 2 - 1);
            if v.iter().all(|x| x.is_zero()) {
                None
            } else {
                Some(v)
            }
        })
        .collect();
    for d in degrees(tx, &graded_order(tx, nov_max, 0))? {
        if d.iter().all(|x| *x == 0) || !rx.c1_dot(&d).is_zero() {
            continue;
        }
        for (e, be) in b.iter().enumerate() {
            let Some(be) = be else { continue };
            let w = rx.deg(e) as i64;
            let psi = (w / 2 - 2) as u32;
            let mut val = FieldElem::zero();
            for (a, k) in rx.dual[e].iter().enumerate() {
                if k.is_zero() {
                    continue;
                }
                let key = Key::new(0, d.clone(), vec![Ins::new(a, psi)]);
                let v = ev.value(&key).map_err(|err| {
                    Error::Precondition(format!("missing one-point descendant {}: {err}", key.render(rx)))
                })?;
                val = &val + &(k * &v);
            }
            if val.is_zero() {
                continue;
            }
            let sign = if (w / 2 + 1) % 2 == 0 { 1 } else { -1 };
            let coef = val.scale_int(sign);
            for (i, bi) in be.iter().enumerate() {
                if !bi.is_zero() {
                    f[i].add_term(Exp { z: 0, q: d.clone(), t: vec![] }, &coef * bi);
                }
            }
        }
    }
    let exceptional = rm.s + 1..=rm.r;
    if let Some(i) = (0..n).find(|i| !f[*i].is_zero() && !exceptional.contains(i)) {
        return Err(Error::Invalid(format!(
            "f has a component on the non-exceptional class {}; U is inconsistent with f being exceptional",
            u.y.basis[i].name
        )));
    }
    Ok(f)
}

fn render_f(f: &[Series], ring_x: &Ring, ring_y: &Ring) -> String {
    let names = x_names(ring_x);
    let parts: Vec<String> = f
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(i, s)| format!("({})*{}", s.render(&names), ring_y.basis[i].name))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn ruan_products(
    tx: &Table,
    ty: &Table,
    rm: &ResolutionMap,
    prep: &Prep,
    f: Option<&[Series]>,
    nov_max: i64,
) -> Result<(Products, Products)> {
    let rx = tx.ring();
    let ry = ty.ring();
    let px = small_products(tx, &graded_order(tx, nov_max, 3))?;
    let py = small_products(ty, &OrderSpec::new(Some(nov_max), ty.support().graded(), Some(3)))?;
    let target = OrderSpec::new(Some(nov_max), vec![true; rx.novikov.len()], None);
    let f_nov: Option<Vec<Series>> = f.map(|f| (1..=ry.novikov.len()).map(|i| f[i].clone()).collect());
    let mode = Mode::Substitute(f_nov.as_deref());
    let sub: Products = py
        .iter()
        .map(|row| row.iter().map(|v| v.iter().map(|s| specialize(s, ry, rm, &prep.cv, &mode, &target)).collect()).collect())
        .collect::<Result<_>>()?;
    let pred = transport(&prep.u0, &prep.u0inv, &sub)?;
    let px = px.iter().map(|row| row.iter().map(|v| v.iter().map(|s| s.with_order(target.clone())).collect()).collect()).collect();
    Ok((px, pred))
}

fn ruan_inner(
    tx: &Table,
    ty: &Table,
    u: &LaurentMatrix,
    rm: &ResolutionMap,
    nov_max: i64,
    apply_f: bool,
    cv_override: Option<CValues>,
) -> Result<(Report, Products)> {
    let mut rep = Report::new("crc ruan");
    rep.banner(SURROGATE_BANNER);
    let sp = semipositive(tx)?;
    if let Some(d) = &sp.witness {
        return Err(Error::Precondition(format!(
            "X is not semi-positive: class {} violates the bound",
            fmt_degree(d, tx.ring().denom)
        )));
    }
    rep.pass("semipositive", "X is semi-positive on its declared classes");
    let mut prep = prepare(tx, ty, u, rm, &mut rep)?;
    if let Some(cv) = cv_override {
        prep.cv = cv;
    }
    let f = quantum_corrections_f(tx, Some(u), rm, nov_max)?;
    rep.pass("f", format!("f = {} (exceptional support)", render_f(&f, tx.ring(), ty.ring())));
    if !apply_f {
        rep.warn("f-applied", "quantum corrections disabled: Q_i = e^{c_i} U_i only");
    }
    let (px, pred) = ruan_products(tx, ty, rm, &prep, if apply_f { Some(&f) } else { None }, nov_max)?;
    compare_products(&mut rep, "small-product", tx.ring(), &px, &pred, prep.cv.is_symbolic())?;
    Ok((rep, pred))
}

/// Small quantum product of X against Y after Q_i = e^{c_i+f_i}U_i, Q_exc = e^{c_i+f_i}.
pub fn ruan_check(tx: &Table, ty: &Table, u: &LaurentMatrix, rm: &ResolutionMap, nov_max: i64) -> Result<Report> {
    Ok(ruan_inner(tx, ty, u, rm, nov_max, true, None)?.0)
}

/// As `ruan_check`; `apply_f = false` gives the uncorrected substitution.
pub fn ruan_check_with(
    tx: &Table,
    ty: &Table,
    u: &LaurentMatrix,
    rm: &ResolutionMap,
    nov_max: i64,
    apply_f: bool,
) -> Result<Report> {
    Ok(ruan_inner(tx, ty, u, rm, nov_max, apply_f, None)?.0)
}

/// Big quantum products of X at τ against Y's at t = U₀τ with Q_i = e^{c_i}U_i.
pub fn bg_check(
    tx: &Table,
    ty: &Table,
    u: &LaurentMatrix,
    rm: &ResolutionMap,
    nov_max: i64,
    coord_max: u32,
) -> Result<Report> {
    let mut rep = Report::new("crc bg");
    rep.banner(SURROGATE_BANNER);
    let n = u.size();
    for i in 0..n {
        for j in 0..n {
            if let Some((&k, _)) = u.entry(i, j).iter().next_back().filter(|(k, _)| **k > 0) {
                rep.fail(
                    "hard-lefschetz",
                    format!("positive power z^{k} at ({i},{j}); U does not send H-_X into H-_Y"),
                );
                return Ok(rep);
            }
        }
    }
    rep.pass("hard-lefschetz", "U has no positive powers of z");
    rm.validate(tx.ring(), ty.ring())?;
    let (rx, ry) = (tx.ring(), ty.ring());
    if u.x.name != rx.name || u.y.name != ry.name {
        return Err(Error::Invalid("U does not map between the given rings".into()));
    }
    let u0 = u.coeff(0);
    let graded = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !u0[i][j].is_zero() && ry.deg(i) != rx.deg(j));
    match graded {
        None => rep.pass("U0-(i)", "U0 preserves degree"),
        Some((i, j)) => rep.fail("U0-(i)", format!("U0 entry ({i},{j}) joins degrees {} and {}", rx.deg(j), ry.deg(i))),
    }
    let col = |j: usize| -> Vec<FieldElem> { (0..n).map(|i| u0[i][j].clone()).collect() };
    rep.check(col(0) == ry.unit_vec(0), "U0-(ii)", format!("U0(1) = {}", render_vec(ry, &col(0))));
    let bad = (1..=rm.s).find(|&i| col(i) != ry.unit_vec(i));
    match bad {
        None => rep.pass("U0-(iii)", format!("U0 fixes the {} pulled-back divisor(s)", rm.s)),
        Some(i) => rep.fail("U0-(iii)", format!("U0({}) = {}", rx.basis[i].name, render_vec(ry, &col(i)))),
    }
    isometry_line(&mut rep, "U0-(iv)", &u0, rx, ry);
    let c = extract_c(u)?;
    rep.push(c.verdict, "c", c.detail.clone());
    let cv = CValues::from_extraction(&c, ry);
    let depth = coord_max + 3;
    let fx = genus0_potential(tx, &graded_order(tx, nov_max, depth))?;
    let fy = genus0_potential(ty, &OrderSpec::new(Some(nov_max), ty.support().graded(), Some(depth)))?;
    let target = OrderSpec::new(Some(nov_max), vec![true; rm.s], Some(depth));
    let g = specialize(&fy, ry, rm, &cv, &Mode::Substitute(None), &target)?.linear_coord_change(&u0)?;
    let fx = fx.with_order(target);
    let names = x_names(rx);
    for a in 0..n {
        for b in a..n {
            for k in b..n {
                let lx = third_derivative(&fx, a, b, k);
                let ly = third_derivative(&g, a, b, k);
                if let Some((e, vx, vy)) = lx.first_difference(&ly)? {
                    let coords: Vec<String> =
                        e.t.iter().enumerate().filter(|(_, p)| **p > 0).map(|(i, p)| format!("tau_{i}^{p}")).collect();
                    rep.fail(
                        "big-product",
                        format!(
                            "d3F/dtau_{a} dtau_{b} dtau_{k} at {}{}: X gives {}, Y gives {}",
                            monomial_name(&e, &names),
                            if coords.is_empty() { String::new() } else { format!("*{}", coords.join("*")) },
                            vx,
                            vy
                        ),
                    );
                    return Ok(rep);
                }
            }
        }
    }
    if cv.is_symbolic() {
        rep.warn("big-product", format!("third derivatives agree to coordinate order {coord_max} with e^c kept symbolic"));
    } else {
        rep.pass("big-product", format!("third derivatives agree to coordinate order {coord_max}"));
    }
    Ok(rep)
}

/// Runs the cohomological and small-quantum pipelines against the θ_c-twisted
/// Y table with trivial exceptional substitution and checks they reproduce the
/// untwisted pipelines.
pub fn modified_pipelines(tx: &Table, ty: &Table, u: &LaurentMatrix, rm: &ResolutionMap, nov_max: i64) -> Result<Report> {
    let mut rep = Report::new("crc modified");
    rep.banner(SURROGATE_BANNER);
    let c = extract_c(u)?;
    let phases = match (c.verdict, c.phases()) {
        (Status::Pass, Some(p)) => p,
        _ => {
            rep.warn("modified", format!("skipped: {}", c.detail));
            return Ok(rep);
        }
    };
    let ry = ty.ring();
    let p: Vec<BigRational> = (1..=ry.novikov.len()).map(|i| phases[i].clone()).collect();
    let ty_tw = twist(ty, &p)?;
    rep.pass("theta", format!("twisted Y by theta(d) = exp(2 pi i p.d) with p = ({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")));
    let trivial = CValues::Exact(vec![BigRational::zero(); p.len()]);
    let (r0, p0) = ccrc_inner(tx, ty, u, rm, Some(nov_max), None)?;
    let (r1, p1) = ccrc_inner(tx, &ty_tw, u, rm, Some(nov_max), Some(trivial.clone()))?;
    equivalence_lines(&mut rep, "ccrc", &r0, &r1, &p0, &p1)?;
    if semipositive(tx)?.semipositive {
        let (r0, p0) = ruan_inner(tx, ty, u, rm, nov_max, true, None)?;
        let (r1, p1) = ruan_inner(tx, &ty_tw, u, rm, nov_max, true, Some(trivial))?;
        equivalence_lines(&mut rep, "ruan", &r0, &r1, &p0, &p1)?;
    } else {
        rep.warn("ruan-equivalence", "skipped: X is not semi-positive");
    }
    Ok(rep)
}

fn equivalence_lines(rep: &mut Report, id: &str, r0: &Report, r1: &Report, p0: &Products, p1: &Products) -> Result<()> {
    let n = p0.len();
    let mut diff = None;
    'outer: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if p0[a][b][c].first_difference(&p1[a][b][c])?.is_some() {
                    diff = Some((a, b, c));
                    break 'outer;
                }
            }
        }
    }
    match diff {
        None => rep.pass(format!("{id}-equivalence"), "twisted pipeline with Q_exc = 1 reproduces the untwisted products"),
        Some((a, b, c)) => rep.fail(format!("{id}-equivalence"), format!("products differ at phi_{a} * phi_{b} -> phi_{c}")),
    }
    let verdict = |r: &Report| if r.ok() { "PASS" } else { "FAIL" };
    rep.check(
        r0.ok() == r1.ok(),
        format!("{id}-outcome"),
        format!("untwisted {}, twisted {}", verdict(r0), verdict(r1)),
    );
    Ok(())
}
