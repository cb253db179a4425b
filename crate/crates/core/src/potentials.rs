//! Genus-zero potentials, quantum products and their audits.

use crate::cohring::{ResolutionMap, Ring};
use crate::error::{Error, Result};
use crate::exactfield::FieldElem;
use crate::fps::{Exp, NovBinding, OrderSpec, Series};
use crate::gwstore::{dimension_ok, Bound, Evaluator, Ins, Key, RuleOrder, Table};
use crate::report::{Report, SURROGATE_BANNER};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Truncation for a potential in the coordinates τ_0..τ_N: variables with
/// finite declared support are exact, the rest are cut at `nov_max`.
pub fn order_for(table: &Table, nov_max: Option<i64>, coord_max: u32) -> OrderSpec {
    OrderSpec::new(nov_max, table.support().graded(), Some(coord_max))
}

/// Truncation treating every Novikov variable as graded (descendant data is
/// never polynomial in Q).
pub fn graded_order(table: &Table, nov_max: i64, coord_max: u32) -> OrderSpec {
    OrderSpec::new(Some(nov_max), vec![true; table.ring().novikov.len()], Some(coord_max))
}

pub(crate) fn require_even(ring: &Ring) -> Result<()> {
    if let Some(b) = ring.basis.iter().find(|b| b.deg % 2 == 1) {
        return Err(Error::Precondition(format!("odd-degree class '{}' needs a sign convention for potentials", b.name)));
    }
    Ok(())
}

/// Novikov degrees (numerators) with nonzero possible contribution under `order`.
pub(crate) fn degrees(table: &Table, order: &OrderSpec) -> Result<Vec<Vec<i64>>> {
    let ring = table.ring();
    let mut hi = Vec::new();
    for (i, b) in table.support().nov.iter().enumerate() {
        let h = if order.graded[i] {
            let m = order.nov_max.ok_or_else(|| Error::Precondition("a Novikov order is required".into()))?;
            match b {
                Bound::Finite(x) => m.min(*x),
                Bound::Open(_) => m,
            }
        } else {
            match b {
                Bound::Finite(x) => *x,
                Bound::Open(_) => {
                    return Err(Error::Precondition(format!(
                        "variable {} has unbounded support; give a Novikov order",
                        ring.novikov[i]
                    )))
                }
            }
        };
        hi.push(h);
    }
    let mut out: Vec<Vec<i64>> = crate::gwstore::degree_box(&hi);
    out.retain(|d| {
        order.nov_max.is_none_or(|m| d.iter().zip(&order.graded).filter(|(_, g)| **g).map(|(x, _)| *x).sum::<i64>() <= m)
    });
    Ok(out)
}

/// Nondecreasing index sequences of length 0..=max_len over 0..n.
pub(crate) fn multisets(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut all = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &layer {
            for i in m.last().copied().unwrap_or(0)..n {
                let mut w = m.clone();
                w.push(i);
                next.push(w);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// 1/∏ m_i! for the multiplicities of a sorted sequence.
pub(crate) fn inv_symmetry<T: PartialEq>(seq: &[T]) -> FieldElem {
    let mut denom = BigInt::one();
    let mut run = 0i64;
    for (k, x) in seq.iter().enumerate() {
        run = if k > 0 && seq[k - 1] == *x { run + 1 } else { 1 };
        denom *= BigInt::from(run);
    }
    FieldElem::from_rat(BigRational::new(BigInt::one(), denom))
}

/// F = Σ ⟨φ_{ε₁},…,φ_{ε_n}⟩_d Q^d τ_{ε₁}⋯τ_{ε_n}/n!.
pub fn genus0_potential(table: &Table, order: &OrderSpec) -> Result<Series> {
    let ring = table.ring();
    require_even(ring)?;
    let nb = ring.n();
    let nv = ring.novikov.len();
    let cmax = order.coord_max.ok_or_else(|| Error::Precondition("a coordinate order is required".into()))? as usize;
    let mut f = Series::zero(nv, nb, order.clone());
    let mut ev = Evaluator::new(table, RuleOrder::First);
    let sets = multisets(nb, cmax);
    for d in degrees(table, order)? {
        let d0 = d.iter().all(|x| *x == 0);
        for s in &sets {
            if d0 && s.len() < 3 {
                continue;
            }
            let key = Key::primary(d.clone(), s);
            if !dimension_ok(ring, &key) {
                continue;
            }
            let v = ev.value(&key)?;
            if v.is_zero() {
                continue;
            }
            let mut t = vec![0u32; nb];
            for &i in s {
                t[i] += 1;
            }
            f.add_term(Exp { z: 0, q: d.clone(), t }, &v * &inv_symmetry(s));
        }
    }
    Ok(f)
}

/// ℱ⁰ in the variables τ_{a,ε} (coordinate index a·N + ε), a ≤ psi_max.
pub fn descendant_potential(table: &Table, order: &OrderSpec, psi_max: u32) -> Result<Series> {
    let ring = table.ring();
    require_even(ring)?;
    let nb = ring.n();
    let nv = ring.novikov.len();
    let nc = nb * (psi_max as usize + 1);
    let cmax = order.coord_max.ok_or_else(|| Error::Precondition("a coordinate order is required".into()))? as usize;
    let mut f = Series::zero(nv, nc, order.clone());
    let mut ev = Evaluator::new(table, RuleOrder::First);
    let sets = multisets(nc, cmax);
    for d in degrees(table, order)? {
        let d0 = d.iter().all(|x| *x == 0);
        for s in &sets {
            if d0 && s.len() < 3 {
                continue;
            }
            let ins: Vec<Ins> = s.iter().map(|&c| Ins::new(c % nb, (c / nb) as u32)).collect();
            let key = Key::new(0, d.clone(), ins);
            if !dimension_ok(ring, &key) {
                continue;
            }
            let v = ev.value(&key)?;
            if v.is_zero() {
                continue;
            }
            let mut t = vec![0u32; nc];
            for &i in s {
                t[i] += 1;
            }
            f.add_term(Exp { z: 0, q: d.clone(), t }, &v * &inv_symmetry(s));
        }
    }
    Ok(f)
}

/// ∂³F/∂τ_α∂τ_β∂τ_γ.
pub fn third_derivative(f: &Series, a: usize, b: usize, c: usize) -> Series {
    f.derivative(a).derivative(b).derivative(c)
}

/// φ_α ★_τ φ_β as coefficients on φ_0..φ_N: Σ_γ F_{αβγ} φ^γ.
pub fn big_quantum_product(ring: &Ring, f: &Series, a: usize, b: usize) -> Result<Vec<Series>> {
    let fab = f.derivative(a).derivative(b);
    let mut out: Vec<Series> = (0..ring.n()).map(|_| fab.derivative(0).zero_like()).collect();
    for g in 0..ring.n() {
        let fabg = fab.derivative(g);
        if fabg.is_zero() {
            continue;
        }
        for (c, x) in ring.dual[g].iter().enumerate() {
            if !x.is_zero() {
                out[c] = out[c].add(&fabg.scale(x))?;
            }
        }
    }
    Ok(out)
}

/// The big product at τ = 0.
pub fn small_quantum_product(ring: &Ring, f: &Series, a: usize, b: usize) -> Result<Vec<Series>> {
    let all: Vec<usize> = (0..f.nc()).collect();
    Ok(big_quantum_product(ring, f, a, b)?.iter().map(|s| s.restrict_coords_zero(&all)).collect())
}

/// Table of all products φ_α ★ φ_β.
pub fn product_table(ring: &Ring, f: &Series) -> Result<Vec<Vec<Vec<Series>>>> {
    (0..ring.n()).map(|a| (0..ring.n()).map(|b| big_quantum_product(ring, f, a, b)).collect()).collect()
}

/// Independent assembly of φ_α ★_τ φ_β from correlators with the divisor
/// coordinates resummed: Σ ⟨φ_α, φ_β, τ_rest,…, τ_rest, φ_ε⟩_d Q^d e^{τ_two·d} φ^ε/n!.
pub fn divisor_form_product(table: &Table, order: &OrderSpec, a: usize, b: usize) -> Result<Vec<Series>> {
    let ring = table.ring();
    require_even(ring)?;
    let nb = ring.n();
    let nv = ring.novikov.len();
    let cmax = order.coord_max.ok_or_else(|| Error::Precondition("a coordinate order is required".into()))?;
    let cm = cmax.saturating_sub(3);
    let mut sub = order.clone();
    sub.coord_max = Some(cm);
    let two: Vec<usize> = (0..nb).filter(|&i| ring.divisor_index(i).is_some()).collect();
    let rest: Vec<usize> = (0..nb).filter(|i| !two.contains(i)).collect();
    let mut ev = Evaluator::new(table, RuleOrder::Second);
    let mut out: Vec<Series> = (0..nb).map(|_| Series::zero(nv, nb, sub.clone())).collect();
    let sets = multisets(rest.len(), cm as usize);
    for d in degrees(table, order)? {
        // e^{τ_two·d}
        let mut lin = Series::zero(nv, nb, sub.clone());
        for &i in &two {
            let v = ring.divisor_index(i).unwrap();
            let mut t = vec![0u32; nb];
            t[i] = 1;
            lin.add_term(Exp { z: 0, q: vec![0; nv], t }, FieldElem::frac(d[v], ring.denom));
        }
        let mut expo = Series::constant(nv, nb, sub.clone(), FieldElem::one());
        let mut power = expo.clone();
        for k in 1..=cm as i64 {
            power = power.mul(&lin)?.scale(&FieldElem::frac(1, k));
            expo = expo.add(&power)?;
        }
        let qd = Series::monomial(nv, nb, sub.clone(), Exp { z: 0, q: d.clone(), t: vec![0; nb] }, FieldElem::one());
        let prefactor = expo.mul(&qd)?;
        for s in &sets {
            let idx: Vec<usize> = s.iter().map(|&k| rest[k]).collect();
            let mut t = vec![0u32; nb];
            for &i in &idx {
                t[i] += 1;
            }
            let mono = Series::monomial(nv, nb, sub.clone(), Exp { z: 0, q: vec![0; nv], t }, inv_symmetry(s));
            let term = mono.mul(&prefactor)?;
            for eps in 0..nb {
                let mut ins = vec![a, b, eps];
                ins.extend(&idx);
                let key = Key::primary(d.clone(), &ins);
                if !dimension_ok(ring, &key) {
                    continue;
                }
                if d.iter().all(|x| *x == 0) && ins.len() < 3 {
                    continue;
                }
                let v = ev.value(&key)?;
                if v.is_zero() {
                    continue;
                }
                for (c, x) in ring.dual[eps].iter().enumerate() {
                    if !x.is_zero() {
                        out[c] = out[c].add(&term.scale(&(&v * x)))?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn vec_add(a: &[Series], b: &[Series]) -> Result<Vec<Series>> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

/// Σ_c u_c (φ_c ★ v) for a coefficient vector u.
fn mult_vec(prod: &[Vec<Vec<Series>>], u: &[Series], g: usize) -> Result<Vec<Series>> {
    let mut acc: Option<Vec<Series>> = None;
    for (c, uc) in u.iter().enumerate() {
        let term: Vec<Series> = prod[c][g].iter().map(|s| uc.mul(s)).collect::<Result<_>>()?;
        acc = Some(match acc {
            None => term,
            Some(a) => vec_add(&a, &term)?,
        });
    }
    Ok(acc.unwrap_or_default())
}

/// WDVV (associativity), Frobenius property, ∂³F symmetry and the unit axiom.
pub fn wdvv_audit(table: &Table, order: &OrderSpec) -> Result<Report> {
    let ring = table.ring();
    let f = genus0_potential(table, order)?;
    let mut r = Report::new("wdvv");
    let nb = ring.n();
    let prod = product_table(ring, &f)?;
    let names = |i: usize| ring.basis[i].name.clone();

    let mut sym_bad = None;
    'sym: for a in 0..nb {
        for b in a..nb {
            for c in b..nb {
                let base = third_derivative(&f, a, b, c);
                for p in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                    if third_derivative(&f, p.0, p.1, p.2) != base {
                        sym_bad = Some((a, b, c));
                        break 'sym;
                    }
                }
            }
        }
    }
    match sym_bad {
        None => r.pass("d3f-symmetry", "third derivatives symmetric in all indices"),
        Some((a, b, c)) => r.fail("d3f-symmetry", format!("F_({},{},{}) not symmetric", names(a), names(b), names(c))),
    }

    let mut unit_bad = None;
    for x in 0..nb {
        let p = &prod[0][x];
        for (c, s) in p.iter().enumerate() {
            let want = if c == x { Series::constant(s.nv(), s.nc(), s.order().clone(), FieldElem::one()) } else { s.zero_like() };
            if let Some((e, got, w)) = s.first_difference(&want)? {
                unit_bad = Some(format!("1*{} coefficient on {} at {:?}: {} vs {}", names(x), names(c), e, got, w));
            }
        }
    }
    match unit_bad {
        None => r.pass("unit", "1 * x = x for every basis element"),
        Some(m) => r.fail("unit", m),
    }

    let mut assoc_bad = None;
    let mut frob_bad = None;
    'outer: for a in 0..nb {
        for b in 0..nb {
            for c in 0..nb {
                let left = mult_vec(&prod, &prod[a][b], c)?;
                let bc = &prod[b][c];
                // α ★ (β ★ γ) = Σ_e (β★γ)_e (φ_α ★ φ_e)
                let mut right: Option<Vec<Series>> = None;
                for (e, s) in bc.iter().enumerate() {
                    let term: Vec<Series> = prod[a][e].iter().map(|x| s.mul(x)).collect::<Result<_>>()?;
                    right = Some(match right {
                        None => term,
                        Some(acc) => vec_add(&acc, &term)?,
                    });
                }
                let right = right.unwrap();
                for k in 0..nb {
                    if let Some((e, x, y)) = left[k].first_difference(&right[k])? {
                        assoc_bad = Some(format!(
                            "({}*{})*{} vs {}*({}*{}) differ on {} at {:?}: {} vs {}",
                            names(a), names(b), names(c), names(a), names(b), names(c), names(k), e, x, y
                        ));
                        break 'outer;
                    }
                }
                if frob_bad.is_none() {
                    let lhs = pair_vec(ring, &prod[a][b], c)?;
                    let rhs = pair_vec_left(ring, a, &prod[b][c])?;
                    if let Some((e, x, y)) = lhs.first_difference(&rhs)? {
                        frob_bad = Some(format!(
                            "({}*{}, {}) vs ({}, {}*{}) at {:?}: {} vs {}",
                            names(a), names(b), names(c), names(a), names(b), names(c), e, x, y
                        ));
                    }
                }
            }
        }
    }
    match assoc_bad {
        None => r.pass("wdvv", format!("associativity holds for all {} triples within order", nb * nb * nb)),
        Some(m) => r.fail("wdvv", m),
    }
    match frob_bad {
        None => r.pass("frobenius", "(u*v, w) = (u, v*w) for all basis triples"),
        Some(m) => r.fail("frobenius", m),
    }
    Ok(r)
}

fn pair_vec(ring: &Ring, u: &[Series], c: usize) -> Result<Series> {
    let mut acc = u[0].zero_like();
    for (k, s) in u.iter().enumerate() {
        let g = &ring.pairing[k][c];
        if !g.is_zero() {
            acc = acc.add(&s.scale(g))?;
        }
    }
    Ok(acc)
}

fn pair_vec_left(ring: &Ring, a: usize, u: &[Series]) -> Result<Series> {
    let mut acc = u[0].zero_like();
    for (k, s) in u.iter().enumerate() {
        let g = &ring.pairing[a][k];
        if !g.is_zero() {
            acc = acc.add(&s.scale(g))?;
        }
    }
    Ok(acc)
}

/// F^⊛: the Y potential with Q_i = U_i (non-exceptional) and the exceptional
/// variables specialized by `exceptional` (defaults to Q_i = 1).
pub struct ModifiedPotential {
    pub series: Series,
    /// Largest exponent of each exceptional variable that entered the substitution.
    pub exceptional_max: Vec<(String, i64)>,
    pub report: Report,
}

pub fn modified_potential(table_y: &Table, resmap: &ResolutionMap, order: &OrderSpec) -> Result<ModifiedPotential> {
    let ex: Vec<NovBinding> = resmap.exceptional().map(|_| NovBinding::Value(FieldElem::one())).collect();
    modified_potential_with(table_y, resmap, order, &ex)
}

/// As `modified_potential` with explicit bindings for the exceptional variables.
pub fn modified_potential_with(
    table_y: &Table,
    resmap: &ResolutionMap,
    order: &OrderSpec,
    exceptional: &[NovBinding],
) -> Result<ModifiedPotential> {
    let ring = table_y.ring();
    let f = genus0_potential(table_y, order)?;
    let s = resmap.s;
    let mut bindings: Vec<NovBinding> = (0..s).map(NovBinding::Keep).collect();
    bindings.extend(exceptional.iter().cloned());
    let target = OrderSpec::new(order.nov_max, order.graded[..s].to_vec(), order.coord_max);
    let series = f.substitute(&bindings, ring.denom, &ring.novikov, target)?;
    let exceptional_max: Vec<(String, i64)> = resmap
        .exceptional()
        .map(|i| (ring.novikov[i].clone(), f.terms().keys().map(|e| e.q[i]).max().unwrap_or(0)))
        .collect();
    let mut report = Report::new("modified potential");
    report.banner(SURROGATE_BANNER);
    for (name, m) in &exceptional_max {
        report.pass("termination", format!("{name} specialized; largest exponent {}", crate::fps::fmt_exp(*m, ring.denom)));
    }
    Ok(ModifiedPotential { series, exceptional_max, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohring::Ring;
    use std::sync::Arc;

    const PT: &str = "ring pt\ndimc 0\nbasis 1\n0 1 0\npairing\n0 0 1\nclassical\nend\n";
    const P1: &str = "ring P1\ndimc 1\nnovikov 1 Q denom 1\nc1 2\nbasis 2\n0 1 0\n1 h 2\npairing\n0 1 1\nclassical\nend\n";

    fn pt() -> Table {
        let ring = Arc::new(Ring::parse(PT, "pt").unwrap());
        Table::new(ring, vec![(Key::primary(vec![], &[0, 0, 0]), FieldElem::one())], None).unwrap()
    }

    fn p1() -> Table {
        let ring = Arc::new(Ring::parse(P1, "p1").unwrap());
        Table::new(ring, vec![(Key::primary(vec![1], &[1, 1, 1]), FieldElem::one())], None).unwrap()
    }

    fn e(q: &[i64], t: &[u32]) -> Exp {
        Exp { z: 0, q: q.to_vec(), t: t.to_vec() }
    }

    #[test]
    fn point_potential() {
        let t = pt();
        let f = genus0_potential(&t, &order_for(&t, None, 3)).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.coeff(&e(&[], &[3])), FieldElem::frac(1, 6));
        let d = third_derivative(&f, 0, 0, 0);
        assert!(d.coeff(&e(&[], &[0])).is_one());
    }

    #[test]
    fn p1_potential_and_products() {
        let t = p1();
        let o = order_for(&t, Some(3), 4);
        let f = genus0_potential(&t, &o).unwrap();
        assert_eq!(f.coeff(&e(&[1], &[0, 3])), FieldElem::frac(1, 6));
        let ring = t.ring();
        let hh = small_quantum_product(ring, &f, 1, 1).unwrap();
        assert_eq!(hh[0].coeff(&e(&[1], &[0, 0])), FieldElem::one());
        assert!(hh[1].is_zero());
        // Q = 0 recovers h∪h = 0
        assert!(hh[0].terms().keys().all(|k| k.q[0] > 0));
        for a in 0..2 {
            for b in 0..2 {
                let p = big_quantum_product(ring, &f, a, b).unwrap();
                let q = divisor_form_product(&t, &o, a, b).unwrap();
                assert_eq!(p, q, "{a} {b}");
            }
        }
        assert!(wdvv_audit(&t, &o).unwrap().ok());
    }

    #[test]
    fn empty_table_potential_is_zero() {
        let ring = Arc::new(Ring::parse(P1, "p1").unwrap());
        let t = Table::new(ring, vec![], Some(vec![Bound::Finite(0)])).unwrap();
        let f = genus0_potential(&t, &order_for(&t, Some(2), 3)).unwrap();
        // only the classical ⟨1,1,h⟩ term survives
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn point_descendants() {
        let t = pt();
        let f = descendant_potential(&t, &OrderSpec::new(None, vec![], Some(4)), 1).unwrap();
        // ⟨ψ·1, 1, 1, 1⟩ = 1 contributes τ_{1,0} τ_{0,0}³/3!
        assert_eq!(f.coeff(&e(&[], &[3, 1])), FieldElem::frac(1, 6));
        let g = descendant_potential(&t, &OrderSpec::new(None, vec![], Some(4)), 0).unwrap();
        assert_eq!(g, genus0_potential(&t, &OrderSpec::new(None, vec![], Some(4))).unwrap());
    }
}
