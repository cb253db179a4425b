//! Axiom engine: string, dilaton, divisor and genus-zero TRR reductions over a
//! correlator table, with memoization and provenance.
//!
//! TRR convention: with γ₁ carrying the ψ-power drop and γ₂, γ₃ two further
//! insertions,
//! ⟨τ_{a+1}γ₁, γ₂, γ₃, S⟩_d = Σ_{S₁⊔S₂, d₁+d₂=d} Σ_ε ⟨τ_aγ₁, S₁, φ_ε⟩_{d₁} ⟨φ^ε, γ₂, γ₃, S₂⟩_{d₂},
//! the left factor omitted when it is unstable (d₁ = 0, S₁ = ∅).

use super::{dimension_ok, strip_divisors, Coverage, Ins, Key, Table};
use crate::error::{Error, Result};
use crate::exactfield::FieldElem;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::{HashMap, HashSet};

/// Which of the applicable reductions to prefer. Closing a table with both
/// orders and comparing gives the confluence check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleOrder {
    /// String before dilaton; TRR on the first ψ-insertion with the next two
    /// insertions as γ₂, γ₃; lowest available divisor.
    First,
    /// Dilaton before string; forward divisor before TRR when n ≥ 4; TRR on
    /// the last ψ-insertion with the last two insertions; highest divisor.
    Second,
}

#[derive(Clone, Debug)]
struct Derivation {
    value: FieldElem,
    rule: &'static str,
    deps: Vec<Key>,
}

pub struct Evaluator<'a> {
    table: &'a Table,
    order: RuleOrder,
    exclude: Option<Key>,
    memo: HashMap<Key, Derivation>,
    active: HashSet<Key>,
}

type Derived = (FieldElem, &'static str, Vec<Key>);

impl<'a> Evaluator<'a> {
    pub fn new(table: &'a Table, order: RuleOrder) -> Evaluator<'a> {
        Evaluator { table, order, exclude: None, memo: HashMap::new(), active: HashSet::new() }
    }

    /// Audit mode: the stored value of `key` is hidden, so the result is an
    /// independent derivation.
    pub fn excluding(table: &'a Table, order: RuleOrder, key: &Key) -> Evaluator<'a> {
        let mut e = Evaluator::new(table, order);
        e.exclude = Some(Key::new(key.genus, key.degree.clone(), key.ins.clone()));
        e
    }

    pub fn table(&self) -> &Table {
        self.table
    }

    pub fn value(&mut self, key: &Key) -> Result<FieldElem> {
        let key = Key::new(key.genus, key.degree.clone(), key.ins.clone());
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.value.clone());
        }
        if !self.active.insert(key.clone()) {
            return Err(Error::Invalid(format!("cyclic derivation at {}", key.render(&self.table.ring))));
        }
        let r = self.derive(&key);
        self.active.remove(&key);
        let (value, rule, deps) = r?;
        self.memo.insert(key, Derivation { value: value.clone(), rule, deps });
        Ok(value)
    }

    pub fn rule_of(&self, key: &Key) -> Option<&'static str> {
        self.memo.get(key).map(|d| d.rule)
    }

    /// The derivation of `key` followed through its first nonzero dependency.
    pub fn chain(&self, key: &Key, depth: usize) -> String {
        let ring = &self.table.ring;
        let mut out = Vec::new();
        let mut cur = Some(key.clone());
        for _ in 0..depth {
            let Some(k) = cur.take() else { break };
            match self.memo.get(&k) {
                Some(d) => {
                    out.push(format!("{} = {} [{}]", k.render(ring), d.value, d.rule));
                    cur = d
                        .deps
                        .iter()
                        .find(|x| self.memo.get(*x).is_some_and(|y| !y.value.is_zero()))
                        .or(d.deps.first())
                        .cloned();
                }
                None => out.push(k.render(ring)),
            }
        }
        out.join(" <- ")
    }

    fn get(&mut self, key: Key, deps: &mut Vec<Key>) -> Result<FieldElem> {
        let v = self.value(&key)?;
        deps.push(key);
        Ok(v)
    }

    fn underdetermined(&self, key: &Key, why: &str) -> Error {
        Error::Underdetermined(format!("{} ({why})", key.render(&self.table.ring)))
    }

    fn derive(&mut self, key: &Key) -> Result<Derived> {
        let ring = self.table.ring.clone();
        if let Some(i) = key.ins.iter().find(|i| i.idx >= ring.n()) {
            return Err(Error::Invalid(format!("insertion index {} out of range", i.idx)));
        }
        if self.exclude.as_ref() != Some(key) {
            if let Some(v) = self.table.get(key) {
                return Ok((v.clone(), "stored", vec![]));
            }
        }
        if !dimension_ok(&ring, key) {
            return Ok((FieldElem::zero(), "dimension", vec![]));
        }
        if key.genus > 0 {
            return Err(self.underdetermined(key, "higher-genus records are not reduced"));
        }
        let n = key.n();
        let d0 = key.degree_is_zero();
        let psi = key.total_psi();
        if d0 && n < 3 {
            return Ok((FieldElem::zero(), "unstable", vec![]));
        }
        if d0 && n == 3 && psi == 0 {
            return Ok((classical_triple(&ring, key), "classical", vec![]));
        }
        if d0 && n >= 4 && psi == 0 && key.ins.iter().all(|i| !ring.basis[i.idx].twisted) {
            return Ok((FieldElem::zero(), "degree-0", vec![]));
        }
        let stable_after = !d0 || n >= 4;
        if stable_after {
            let rules: [&str; 2] = match self.order {
                RuleOrder::First => ["string", "dilaton"],
                RuleOrder::Second => ["dilaton", "string"],
            };
            for r in rules {
                let want = if r == "string" { Ins::new(0, 0) } else { Ins::new(0, 1) };
                if let Some(pos) = key.ins.iter().position(|i| *i == want) {
                    let mut deps = Vec::new();
                    let v = if r == "string" { self.string_rhs(key, pos, &mut deps)? } else { self.dilaton_rhs(key, pos, &mut deps)? };
                    return Ok((v, if r == "string" { "string" } else { "dilaton" }, deps));
                }
            }
        }
        if psi > 0 {
            if self.order == RuleOrder::Second && n >= 4 {
                if let Some(pos) = self.divisor_position(key) {
                    let mut deps = Vec::new();
                    let v = self.divisor_rhs(key, pos, &mut deps)?;
                    return Ok((v, "divisor", deps));
                }
            }
            if n >= 3 {
                let mut deps = Vec::new();
                let v = self.trr_rhs(key, &mut deps)?;
                return Ok((v, "trr", deps));
            }
            if !d0 {
                let mut deps = Vec::new();
                if let Some(v) = self.inverse_divisor(key, &mut deps)? {
                    return Ok((v, "inverse-divisor", deps));
                }
            }
            return Err(self.underdetermined(key, "descendant with no applicable reduction"));
        }
        self.primary(key)
    }

    fn divisor_position(&self, key: &Key) -> Option<usize> {
        let ring = &self.table.ring;
        let mut it = key.ins.iter().enumerate().filter(|(_, i)| i.psi == 0 && ring.divisor_index(i.idx).is_some());
        match self.order {
            RuleOrder::First => it.next().map(|x| x.0),
            RuleOrder::Second => it.next_back().map(|x| x.0),
        }
    }

    fn string_rhs(&mut self, key: &Key, pos: usize, deps: &mut Vec<Key>) -> Result<FieldElem> {
        let rest = key.without(pos);
        let mut acc = FieldElem::zero();
        for j in 0..rest.n() {
            let i = rest.ins[j];
            if i.psi >= 1 {
                acc = &acc + &self.get(rest.replaced(j, Ins::new(i.idx, i.psi - 1)), deps)?;
            }
        }
        Ok(acc)
    }

    fn dilaton_rhs(&mut self, key: &Key, pos: usize, deps: &mut Vec<Key>) -> Result<FieldElem> {
        let rest = key.without(pos);
        let k = 2 * key.genus as i64 - 2 + rest.n() as i64;
        Ok(self.get(rest, deps)?.scale_int(k))
    }

    /// ⟨D, rest⟩_d = (D·d)⟨rest⟩_d + Σ_j ⟨…, (D∪γ_j)ψ^{a_j−1}, …⟩_d.
    fn divisor_rhs(&mut self, key: &Key, pos: usize, deps: &mut Vec<Key>) -> Result<FieldElem> {
        let ring = self.table.ring.clone();
        let dv = key.ins[pos].idx;
        let v = ring.divisor_index(dv).expect("divisor insertion");
        let rest = key.without(pos);
        let dd = BigRational::new(BigInt::from(key.degree[v]), BigInt::from(ring.denom));
        let mut acc = if dd.is_zero() { FieldElem::zero() } else { self.get(rest.clone(), deps)?.scale_rat(&dd) };
        acc = &acc + &self.divisor_corrections(&rest, dv, deps)?;
        Ok(acc)
    }

    fn divisor_corrections(&mut self, rest: &Key, dv: usize, deps: &mut Vec<Key>) -> Result<FieldElem> {
        let ring = self.table.ring.clone();
        let mut acc = FieldElem::zero();
        for j in 0..rest.n() {
            let i = rest.ins[j];
            if i.psi == 0 {
                continue;
            }
            for (c, x) in ring.classical[dv][i.idx].iter().enumerate() {
                if !x.is_zero() {
                    acc = &acc + &(x * &self.get(rest.replaced(j, Ins::new(c, i.psi - 1)), deps)?);
                }
            }
        }
        Ok(acc)
    }

    /// Solves the divisor equation for ⟨S⟩_d with a divisor D, D·d ≠ 0.
    fn inverse_divisor(&mut self, key: &Key, deps: &mut Vec<Key>) -> Result<Option<FieldElem>> {
        let ring = self.table.ring.clone();
        let mut cands = (0..ring.n()).filter(|&j| ring.divisor_index(j).is_some_and(|v| key.degree[v] != 0));
        let dv = match self.order {
            RuleOrder::First => cands.next(),
            RuleOrder::Second => cands.next_back(),
        };
        let Some(dv) = dv else { return Ok(None) };
        let v = ring.divisor_index(dv).unwrap();
        let dd = BigRational::new(BigInt::from(key.degree[v]), BigInt::from(ring.denom));
        let big = self.get(key.with(Ins::new(dv, 0)), deps)?;
        let corr = self.divisor_corrections(key, dv, deps)?;
        Ok(Some((&big - &corr).scale_rat(&dd.recip())))
    }

    fn trr_rhs(&mut self, key: &Key, deps: &mut Vec<Key>) -> Result<FieldElem> {
        let ring = self.table.ring.clone();
        let n = key.n();
        let psi_pos: Vec<usize> = (0..n).filter(|&p| key.ins[p].psi > 0).collect();
        let p1 = match self.order {
            RuleOrder::First => psi_pos[0],
            RuleOrder::Second => *psi_pos.last().unwrap(),
        };
        let mut others: Vec<Ins> = (0..n).filter(|&p| p != p1).map(|p| key.ins[p]).collect();
        if self.order == RuleOrder::Second {
            others.reverse();
        }
        let g1 = Ins::new(key.ins[p1].idx, key.ins[p1].psi - 1);
        let (g2, g3) = (others[0], others[1]);
        let s: Vec<Ins> = others[2..].to_vec();
        let nb = ring.n();
        let mut acc = FieldElem::zero();
        for d1 in degree_box(&key.degree) {
            let d2: Vec<i64> = key.degree.iter().zip(&d1).map(|(a, b)| a - b).collect();
            let d1_zero = d1.iter().all(|x| *x == 0);
            for mask in 0u64..(1u64 << s.len()) {
                if d1_zero && mask == 0 {
                    continue;
                }
                let mut left = vec![g1];
                let mut right = vec![g2, g3];
                for (k, x) in s.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        left.push(*x);
                    } else {
                        right.push(*x);
                    }
                }
                for eps in 0..nb {
                    let mut lk = left.clone();
                    lk.push(Ins::new(eps, 0));
                    let lkey = Key::new(0, d1.clone(), lk);
                    if !dimension_ok(&ring, &lkey) {
                        continue;
                    }
                    let l = self.get(lkey, deps)?;
                    if l.is_zero() {
                        continue;
                    }
                    let mut r = FieldElem::zero();
                    for (b, coef) in ring.dual[eps].iter().enumerate() {
                        if coef.is_zero() {
                            continue;
                        }
                        let mut rk = right.clone();
                        rk.push(Ins::new(b, 0));
                        let rkey = Key::new(0, d2.clone(), rk);
                        if !dimension_ok(&ring, &rkey) {
                            continue;
                        }
                        r = &r + &(coef * &self.get(rkey, deps)?);
                    }
                    acc = &acc + &(&l * &r);
                }
            }
        }
        Ok(acc)
    }

    fn primary(&mut self, key: &Key) -> Result<Derived> {
        let ring = self.table.ring.clone();
        let d0 = key.degree_is_zero();
        if d0 && key.n() >= 4 && key.ins.iter().any(|i| ring.divisor_index(i.idx).is_some()) {
            return Ok((FieldElem::zero(), "divisor", vec![]));
        }
        let (core, scale) = strip_divisors(&ring, key);
        if scale.is_zero() {
            return Ok((FieldElem::zero(), "divisor", vec![]));
        }
        let recs: Vec<(Key, FieldElem)> = self
            .table
            .core_records(&key.degree, &core)
            .iter()
            .filter(|(k, _)| self.exclude.as_ref() != Some(k))
            .cloned()
            .collect();
        if let Some((k0, v0)) = recs.first() {
            if let Some((k1, v1)) = recs.iter().find(|(_, v)| v != v0) {
                return Err(Error::Inconsistent(format!(
                    "divisor equation: {} and {} give core values {} and {}",
                    k0.render(&ring),
                    k1.render(&ring),
                    v0,
                    v1
                )));
            }
            return Ok((v0.scale_rat(&scale), "divisor-core", vec![k0.clone()]));
        }
        if let Some(ex) = &self.exclude {
            if ex.genus == 0 && ex.total_psi() == 0 && ex.degree == key.degree && strip_divisors(&ring, ex).0 == core {
                return Err(self.underdetermined(key, "primitive datum"));
            }
        }
        match self.table.support().covers(&key.degree) {
            Coverage::Known | Coverage::Zero => Ok((FieldElem::zero(), "support", vec![])),
            Coverage::Unknown => Err(self.underdetermined(key, "degree outside the table's support")),
        }
    }
}

fn classical_triple(ring: &crate::cohring::Ring, key: &Key) -> FieldElem {
    let (a, b, c) = (key.ins[0].idx, key.ins[1].idx, key.ins[2].idx);
    ring.pair(&ring.classical[a][b], &ring.unit_vec(c))
}

/// All vectors 0 ≤ v ≤ d componentwise.
pub fn degree_box(d: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &m in d {
        let mut next = Vec::new();
        for v in &out {
            for x in 0..=m {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn precondition(msg: String) -> Error {
    Error::Precondition(msg)
}

fn normalized(key: &Key) -> Key {
    Key::new(key.genus, key.degree.clone(), key.ins.clone())
}

/// String equation: the value of a key with a 𝟏ψ⁰ insertion from keys with one fewer point.
pub fn reduce_string(table: &Table, key: &Key) -> Result<FieldElem> {
    let key = normalized(key);
    let pos = key
        .ins
        .iter()
        .position(|i| *i == Ins::new(0, 0))
        .ok_or_else(|| precondition("no unit insertion without psi".into()))?;
    if key.degree_is_zero() && key.n() < 4 {
        return Err(precondition("string equation needs n >= 4 or d != 0".into()));
    }
    let mut ev = Evaluator::new(table, RuleOrder::First);
    ev.string_rhs(&key, pos, &mut Vec::new())
}

pub fn reduce_dilaton(table: &Table, key: &Key) -> Result<FieldElem> {
    let key = normalized(key);
    let pos = key
        .ins
        .iter()
        .position(|i| *i == Ins::new(0, 1))
        .ok_or_else(|| precondition("no unit insertion with psi^1".into()))?;
    if key.degree_is_zero() && (key.n() as i64 - 1) < 3 - 2 * key.genus as i64 {
        return Err(precondition("dilaton equation needs a stable key after forgetting".into()));
    }
    let mut ev = Evaluator::new(table, RuleOrder::First);
    ev.dilaton_rhs(&key, pos, &mut Vec::new())
}

/// Divisor equation for the basis element `div`.
pub fn reduce_divisor(table: &Table, key: &Key, div: usize) -> Result<FieldElem> {
    let key = normalized(key);
    let ring = table.ring();
    if div >= ring.n() || ring.deg(div) != 2 || ring.divisor_index(div).is_none() {
        return Err(precondition(format!("basis element {div} is not an untwisted degree-2 divisor")));
    }
    let pos = key
        .ins
        .iter()
        .position(|i| *i == Ins::new(div, 0))
        .ok_or_else(|| precondition(format!("no insertion of basis element {div} without psi")))?;
    if key.degree_is_zero() && key.n() == 3 && key.total_psi() == 0 {
        return Ok(classical_triple(ring, &key));
    }
    if key.degree_is_zero() && key.n() < 4 {
        return Err(precondition("divisor equation needs n >= 4 or d != 0".into()));
    }
    let mut ev = Evaluator::new(table, RuleOrder::First);
    ev.divisor_rhs(&key, pos, &mut Vec::new())
}

pub fn trr_reduce(table: &Table, key: &Key) -> Result<FieldElem> {
    let key = normalized(key);
    if key.genus != 0 || key.n() < 3 || key.total_psi() == 0 {
        return Err(precondition("TRR needs genus 0, n >= 3 and a psi insertion".into()));
    }
    let mut ev = Evaluator::new(table, RuleOrder::First);
    ev.trr_rhs(&key, &mut Vec::new())
}

/// Target of `close_table`: all genus-0 keys with at most `max_n` points,
/// ψ-powers at most `max_psi` and degree componentwise ≤ `degree`.
#[derive(Clone, Debug)]
pub struct CloseBounds {
    pub max_n: usize,
    pub max_psi: u32,
    pub degree: Vec<i64>,
}

pub(crate) fn enumerate_keys(table: &Table, b: &CloseBounds) -> Vec<Key> {
    let ring = table.ring();
    let items: Vec<Ins> = (0..ring.n()).flat_map(|i| (0..=b.max_psi).map(move |p| Ins::new(i, p))).collect();
    let mut multisets: Vec<Vec<Ins>> = vec![vec![]];
    let mut all = vec![vec![]];
    for _ in 0..b.max_n {
        let mut next = Vec::new();
        for m in &multisets {
            let start = m.last().map_or(0, |l| items.iter().position(|x| x == l).unwrap());
            for it in &items[start..] {
                let mut w = m.clone();
                w.push(*it);
                next.push(w);
            }
        }
        all.extend(next.iter().cloned());
        multisets = next;
    }
    let mut keys = Vec::new();
    for d in degree_box(&b.degree) {
        let d0 = d.iter().all(|x| *x == 0);
        for ins in &all {
            if d0 && ins.len() < 3 {
                continue;
            }
            let k = Key::new(0, d.clone(), ins.clone());
            if dimension_ok(ring, &k) {
                keys.push(k);
            }
        }
    }
    keys
}

/// Extends the table by every key within `bounds` derivable from it. Stored
/// genus-0 values are re-derived with themselves hidden, and every target is
/// derived under both rule orders; any disagreement is reported with both
/// derivation chains.
pub fn close_table(table: &Table, bounds: &CloseBounds) -> Result<Table> {
    let ring = table.ring.clone();
    for (k, e) in table.entries() {
        if k.genus != 0 {
            continue;
        }
        let mut ev = Evaluator::excluding(table, RuleOrder::First, k);
        match ev.value(k) {
            Ok(v) if v != e.value => {
                return Err(Error::Inconsistent(format!(
                    "stored {} = {}; derived {}",
                    k.render(&ring),
                    e.value,
                    ev.chain(k, 6)
                )))
            }
            Ok(_) | Err(Error::Underdetermined(_)) => {}
            Err(err) => return Err(err),
        }
    }
    let mut ev1 = Evaluator::new(table, RuleOrder::First);
    let mut ev2 = Evaluator::new(table, RuleOrder::Second);
    let mut extra = Vec::new();
    for k in enumerate_keys(table, bounds) {
        let v1 = ev1.value(&k)?;
        let v2 = ev2.value(&k)?;
        if v1 != v2 {
            return Err(Error::Inconsistent(format!(
                "two derivations disagree: {} | {}",
                ev1.chain(&k, 6),
                ev2.chain(&k, 6)
            )));
        }
        if !v1.is_zero() && table.get(&k).is_none() {
            let tag = format!("{}/{}", ev1.rule_of(&k).unwrap_or("?"), ev2.rule_of(&k).unwrap_or("?"));
            extra.push((k, v1, tag));
        }
    }
    table.extended(extra)
}

#[cfg(test)]
mod tests {
    use super::super::tests::P1_RING;
    use super::*;
    use crate::cohring::Ring;
    use std::sync::Arc;

    const PT_RING: &str = "ring pt\ndimc 0\nbasis 1\n0 1 0\npairing\n0 0 1\nclassical\nend\n";

    fn pt_table(extra: &[(Key, i64)]) -> Table {
        let ring = Arc::new(Ring::parse(PT_RING, "pt.ring").unwrap());
        let mut recs = vec![(Key::primary(vec![], &[0, 0, 0]), FieldElem::one())];
        recs.extend(extra.iter().map(|(k, v)| (k.clone(), FieldElem::from_int(*v))));
        Table::new(ring, recs, None).unwrap()
    }

    fn pt_key(psi: &[u32]) -> Key {
        Key::new(0, vec![], psi.iter().map(|&p| Ins::new(0, p)).collect())
    }

    fn p1_table(text: &str) -> Table {
        let ring = Arc::new(Ring::parse(P1_RING, "p1.ring").unwrap());
        Table::parse(text, "p1.gw", ring).unwrap()
    }

    const P1_GW: &str = "gw P1\ninv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1\nend\n";

    #[test]
    fn string_examples() {
        let t = pt_table(&[]);
        assert_eq!(reduce_string(&t, &pt_key(&[0, 0, 0, 1])).unwrap(), FieldElem::one());
        let p = p1_table(P1_GW);
        assert!(reduce_string(&p, &Key::primary(vec![1], &[1, 1])).is_err());
        assert!(reduce_string(&p, &Key::primary(vec![1], &[0, 1, 1])).unwrap().is_zero());
    }

    #[test]
    fn dilaton_examples() {
        let t = pt_table(&[]);
        assert_eq!(reduce_dilaton(&t, &pt_key(&[1, 0, 0, 0])).unwrap(), FieldElem::one());
        assert!(reduce_dilaton(&t, &pt_key(&[0, 0, 0, 0])).is_err());
    }

    #[test]
    fn divisor_examples() {
        let p = p1_table(P1_GW);
        assert_eq!(reduce_divisor(&p, &Key::primary(vec![1], &[1, 1, 1, 1]), 1).unwrap(), FieldElem::one());
        assert_eq!(reduce_divisor(&p, &Key::primary(vec![0], &[1, 0, 0]), 1).unwrap(), FieldElem::one());
        assert_eq!(reduce_divisor(&p, &Key::primary(vec![0], &[1, 1, 0]), 1).unwrap(), FieldElem::zero());
        assert!(reduce_divisor(&p, &Key::primary(vec![1], &[0, 1, 1]), 0).is_err());
    }

    #[test]
    fn trr_examples() {
        let t = pt_table(&[]);
        assert_eq!(trr_reduce(&t, &pt_key(&[2, 0, 0, 0, 0])).unwrap(), FieldElem::one());
        assert!(trr_reduce(&t, &pt_key(&[0, 0, 0])).is_err());
        // no data at all in degree 1: the two-point descendants are unknown
        let ring = Arc::new(Ring::parse(P1_RING, "p1.ring").unwrap());
        let empty = Table::new(ring, vec![], None).unwrap();
        let e = trr_reduce(&empty, &Key::new(0, vec![1], vec![Ins::new(1, 1), Ins::new(1, 0), Ins::new(1, 0)])).unwrap_err();
        assert!(matches!(e, Error::Underdetermined(_)), "{e}");
    }

    #[test]
    fn closure_of_the_point() {
        let t = pt_table(&[]);
        let c = close_table(&t, &CloseBounds { max_n: 6, max_psi: 3, degree: vec![] }).unwrap();
        assert_eq!(c.get(&pt_key(&[3, 0, 0, 0, 0, 0])), Some(&FieldElem::one()));
        let again = close_table(&c, &CloseBounds { max_n: 6, max_psi: 3, degree: vec![] }).unwrap();
        assert_eq!(again.len(), c.len());
    }

    #[test]
    fn closure_failures() {
        let ring = Arc::new(Ring::parse(P1_RING, "p1.ring").unwrap());
        let empty = Table::new(ring, vec![], None).unwrap();
        let e = close_table(&empty, &CloseBounds { max_n: 3, max_psi: 1, degree: vec![1] }).unwrap_err();
        assert!(matches!(e, Error::Underdetermined(_)), "{e}");
        let bad = pt_table(&[(pt_key(&[1, 0, 0, 0]), 2)]);
        let e = close_table(&bad, &CloseBounds { max_n: 5, max_psi: 2, degree: vec![] }).unwrap_err();
        match e {
            Error::Inconsistent(msg) => assert!(msg.contains("stored") && msg.contains("derived"), "{msg}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn p1_descendants_agree_across_orders() {
        let p = p1_table(P1_GW);
        let c = close_table(&p, &CloseBounds { max_n: 4, max_psi: 3, degree: vec![2] }).unwrap();
        // one-point descendants ⟨τ_{2d−2}(pt)⟩_d = 1/(d!)²
        assert_eq!(c.get(&Key::new(0, vec![1], vec![Ins::new(1, 0)])), Some(&FieldElem::one()));
        assert_eq!(c.get(&Key::new(0, vec![2], vec![Ins::new(1, 2)])), Some(&FieldElem::frac(1, 4)));
    }

    #[test]
    fn audit_mode_hides_the_stored_value() {
        let t = pt_table(&[(pt_key(&[1, 0, 0, 0]), 1)]);
        let k = pt_key(&[1, 0, 0, 0]);
        let mut ev = Evaluator::excluding(&t, RuleOrder::First, &k);
        assert_eq!(ev.value(&k).unwrap(), FieldElem::one());
        assert_eq!(ev.rule_of(&k), Some("string"));
    }
}
