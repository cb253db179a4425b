//! Truncated series in Novikov variables (rational exponents over a common
//! denominator), coordinate variables and z.
//!
//! Every series carries its truncation: terms beyond `nov_max` in the graded
//! Novikov variables or beyond `coord_max` in the coordinates are unknown, and
//! when `zlo` is set, coefficients of z^k with k < zlo are unknown. Ungraded
//! Novikov variables are exact polynomials.

use crate::error::{Error, Result};
use crate::exactfield::FieldElem;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exp {
    pub z: i64,
    pub q: Vec<i64>,
    pub t: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderSpec {
    /// Bound on the total graded Novikov degree, in units of 1/denom.
    pub nov_max: Option<i64>,
    /// Which Novikov variables are truncated by `nov_max`.
    pub graded: Vec<bool>,
    pub coord_max: Option<u32>,
    /// Lowest z exponent known exactly.
    pub zlo: Option<i64>,
}

impl OrderSpec {
    pub fn exact(nv: usize) -> OrderSpec {
        OrderSpec { nov_max: None, graded: vec![false; nv], coord_max: None, zlo: None }
    }

    pub fn new(nov_max: Option<i64>, graded: Vec<bool>, coord_max: Option<u32>) -> OrderSpec {
        OrderSpec { nov_max, graded, coord_max, zlo: None }
    }

    fn admits(&self, e: &Exp) -> bool {
        if let Some(m) = self.nov_max {
            let g: i64 = e.q.iter().zip(&self.graded).filter(|(_, g)| **g).map(|(x, _)| *x).sum();
            if g > m {
                return false;
            }
        }
        if let Some(c) = self.coord_max {
            if e.t.iter().sum::<u32>() > c {
                return false;
            }
        }
        if let Some(lo) = self.zlo {
            if e.z < lo {
                return false;
            }
        }
        true
    }

    /// Truncation of a sum.
    pub fn meet(&self, other: &OrderSpec) -> OrderSpec {
        let min_opt = |a: Option<i64>, b: Option<i64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        OrderSpec {
            nov_max: min_opt(self.nov_max, other.nov_max),
            graded: self.graded.iter().zip(&other.graded).map(|(a, b)| *a || *b).collect(),
            coord_max: min_opt(self.coord_max.map(i64::from), other.coord_max.map(i64::from)).map(|x| x as u32),
            zlo: match (self.zlo, other.zlo) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, None) => x,
                (None, y) => y,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    nv: usize,
    nc: usize,
    terms: BTreeMap<Exp, FieldElem>,
    order: OrderSpec,
}

/// An element of the truncated symplectic space: one series per basis index.
pub type HVector = Vec<Series>;

/// Names used when printing series.
#[derive(Clone, Debug)]
pub struct Names {
    pub novikov: Vec<String>,
    pub coords: Vec<String>,
    pub denom: i64,
}

impl Series {
    pub fn zero(nv: usize, nc: usize, order: OrderSpec) -> Series {
        assert_eq!(order.graded.len(), nv);
        Series { nv, nc, terms: BTreeMap::new(), order }
    }

    pub fn constant(nv: usize, nc: usize, order: OrderSpec, c: FieldElem) -> Series {
        let mut s = Series::zero(nv, nc, order);
        s.add_term(Exp { z: 0, q: vec![0; nv], t: vec![0; nc] }, c);
        s
    }

    pub fn monomial(nv: usize, nc: usize, order: OrderSpec, e: Exp, c: FieldElem) -> Series {
        let mut s = Series::zero(nv, nc, order);
        s.add_term(e, c);
        s
    }

    pub fn coord(nv: usize, nc: usize, order: OrderSpec, i: usize) -> Series {
        let mut t = vec![0; nc];
        t[i] = 1;
        Series::monomial(nv, nc, order, Exp { z: 0, q: vec![0; nv], t }, FieldElem::one())
    }

    pub fn zero_like(&self) -> Series {
        Series::zero(self.nv, self.nc, self.order.clone())
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn nc(&self) -> usize {
        self.nc
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn terms(&self) -> &BTreeMap<Exp, FieldElem> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exp) -> FieldElem {
        self.terms.get(e).cloned().unwrap_or_else(FieldElem::zero)
    }

    pub fn z_range(&self) -> Option<(i64, i64)> {
        let lo = self.terms.keys().map(|e| e.z).min()?;
        let hi = self.terms.keys().map(|e| e.z).max()?;
        Some((lo, hi))
    }

    /// Inserts a term, dropping it if it lies outside the truncation.
    pub fn add_term(&mut self, e: Exp, c: FieldElem) {
        if c.is_zero() || !self.order.admits(&e) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn with_order(&self, order: OrderSpec) -> Series {
        let mut s = Series::zero(self.nv, self.nc, order);
        for (e, c) in &self.terms {
            s.add_term(e.clone(), c.clone());
        }
        s
    }

    fn check_space(&self, other: &Series) -> Result<()> {
        if self.nv != other.nv || self.nc != other.nc {
            return Err(Error::Invalid(format!(
                "series variable mismatch: ({}, {}) vs ({}, {})",
                self.nv, self.nc, other.nv, other.nc
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_space(other)?;
        let mut s = self.with_order(self.order.meet(&other.order));
        for (e, c) in &other.terms {
            s.add_term(e.clone(), c.clone());
        }
        Ok(s)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = -&*c;
        }
        s
    }

    pub fn scale(&self, k: &FieldElem) -> Series {
        if k.is_zero() {
            return self.zero_like();
        }
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = &*c * k;
        }
        s
    }

    /// Multiplies by z^k, shifting the known window.
    pub fn shift_z(&self, k: i64) -> Series {
        let mut order = self.order.clone();
        order.zlo = order.zlo.map(|x| x + k);
        let mut s = Series::zero(self.nv, self.nc, order);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.z += k;
            s.terms.insert(e, c.clone());
        }
        s
    }

    fn z_top(&self) -> Option<i64> {
        let top = self.terms.keys().map(|e| e.z).max();
        match (top, self.order.zlo) {
            (Some(t), Some(lo)) => Some(t.max(lo - 1)),
            (Some(t), None) => Some(t),
            (None, Some(lo)) => Some(lo - 1),
            (None, None) => None,
        }
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_space(other)?;
        let mut order = self.order.meet(&other.order);
        order.zlo = match (self.order.zlo, other.order.zlo) {
            (None, None) => None,
            (Some(la), None) => other.z_top().map(|tb| la + tb),
            (None, Some(lb)) => self.z_top().map(|ta| ta + lb),
            (Some(la), Some(lb)) => {
                let ta = self.z_top().unwrap();
                let tb = other.z_top().unwrap();
                Some((la + tb).max(ta + lb))
            }
        };
        if (self.is_zero() && self.order.zlo.is_none()) || (other.is_zero() && other.order.zlo.is_none()) {
            order.zlo = None;
        }
        let mut s = Series::zero(self.nv, self.nc, order);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = Exp {
                    z: ea.z + eb.z,
                    q: ea.q.iter().zip(&eb.q).map(|(x, y)| x + y).collect(),
                    t: ea.t.iter().zip(&eb.t).map(|(x, y)| x + y).collect(),
                };
                if s.order.admits(&e) {
                    s.add_term(e, ca * cb);
                }
            }
        }
        Ok(s)
    }

    /// f(z) ↦ f(−z).
    pub fn flip_z(&self) -> Series {
        let mut s = self.clone();
        for (e, c) in s.terms.iter_mut() {
            if e.z % 2 != 0 {
                *c = -&*c;
            }
        }
        s
    }

    /// The coefficient of z^k, as a z-free series. Fails when z^k lies below
    /// the known window.
    pub fn z_coefficient(&self, k: i64) -> Result<Series> {
        if let Some(lo) = self.order.zlo {
            if k < lo {
                return Err(Error::Window(format!("coefficient of z^{k} requested but only z^{lo} and above are known")));
            }
        }
        let mut order = self.order.clone();
        order.zlo = None;
        let mut s = Series::zero(self.nv, self.nc, order);
        for (e, c) in &self.terms {
            if e.z == k {
                let mut e = e.clone();
                e.z = 0;
                s.terms.insert(e, c.clone());
            }
        }
        Ok(s)
    }

    /// Terms with z exponent ≥ k (exact part above a cut).
    pub fn z_at_least(&self, k: i64) -> Series {
        let mut s = self.clone();
        s.terms.retain(|e, _| e.z >= k);
        s.order.zlo = Some(s.order.zlo.map_or(k, |lo| lo.max(k)));
        s
    }

    /// ∂/∂t_i; the coordinate bound drops by one.
    pub fn derivative(&self, i: usize) -> Series {
        let mut order = self.order.clone();
        order.coord_max = order.coord_max.map(|c| c.saturating_sub(1));
        let mut s = Series::zero(self.nv, self.nc, order);
        for (e, c) in &self.terms {
            if e.t[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.t[i] -= 1;
            s.add_term(e2, c.scale_int(e.t[i] as i64));
        }
        s
    }

    /// Sets the listed coordinates to zero.
    pub fn restrict_coords_zero(&self, zero: &[usize]) -> Series {
        let mut s = self.zero_like();
        for (e, c) in &self.terms {
            if zero.iter().all(|&i| e.t[i] == 0) {
                s.terms.insert(e.clone(), c.clone());
            }
        }
        s
    }

    /// Replaces each coordinate t_i by the linear form Σ_j a_ij t_j.
    pub fn linear_coord_change(&self, a: &[Vec<FieldElem>]) -> Result<Series> {
        let nc = self.nc;
        let lin: Vec<Series> = (0..nc)
            .map(|i| {
                let mut s = Series::zero(self.nv, nc, self.order.clone());
                for (j, x) in a[i].iter().enumerate() {
                    let mut t = vec![0; nc];
                    t[j] = 1;
                    s.add_term(Exp { z: 0, q: vec![0; self.nv], t }, x.clone());
                }
                s
            })
            .collect();
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            let mut base = Exp { z: e.z, q: e.q.clone(), t: vec![0; nc] };
            base.t.iter_mut().for_each(|x| *x = 0);
            let mut term = Series::monomial(self.nv, nc, self.order.clone(), base, c.clone());
            for (i, k) in e.t.iter().enumerate() {
                for _ in 0..*k {
                    term = term.mul(&lin[i])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Generic Novikov substitution: each term Q^d is replaced by
    /// `factor(d)`, a series in the target space (with `nv_new` Novikov
    /// variables). Variables listed in `specialized` must be ungraded.
    pub fn substitute_novikov(
        &self,
        specialized: &[usize],
        names: &[String],
        target_order: OrderSpec,
        factor: &mut dyn FnMut(&[i64]) -> Result<Series>,
    ) -> Result<Series> {
        for &i in specialized {
            if self.order.graded[i] && self.order.nov_max.is_some() {
                let max = self.terms.keys().map(|e| e.q[i]).max().unwrap_or(0);
                return Err(Error::NonTerminating {
                    var: names.get(i).cloned().unwrap_or_else(|| format!("Q{}", i + 1)),
                    max_exp: fmt_exp(max, 1),
                });
            }
        }
        let nv_new = target_order.graded.len();
        let mut out = Series::zero(nv_new, self.nc, target_order.clone());
        let mut by_q: BTreeMap<Vec<i64>, Vec<(&Exp, &FieldElem)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            by_q.entry(e.q.clone()).or_default().push((e, c));
        }
        for (q, group) in by_q {
            let f = factor(&q)?;
            if f.nv != nv_new || f.nc != self.nc {
                return Err(Error::Invalid("substitution factor has the wrong variable space".into()));
            }
            let mut rest = Series::zero(nv_new, self.nc, target_order.clone());
            rest.order.zlo = self.order.zlo;
            for (e, c) in group {
                rest.add_term(Exp { z: e.z, q: vec![0; nv_new], t: e.t.clone() }, c.clone());
            }
            out = out.add(&rest.mul(&f)?)?;
        }
        Ok(out)
    }

    /// Renames/specializes Novikov variables: `Keep(j)` maps Q_i to the target
    /// variable j, `Value(v)` sets Q_i = v (integer exponents only),
    /// `Phase(x)` sets Q_i^d = exp(2π√−1·x·d).
    pub fn substitute(
        &self,
        bindings: &[NovBinding],
        denom: i64,
        names: &[String],
        target_order: OrderSpec,
    ) -> Result<Series> {
        let specialized: Vec<usize> = bindings
            .iter()
            .enumerate()
            .filter(|(_, b)| !matches!(b, NovBinding::Keep(_)))
            .map(|(i, _)| i)
            .collect();
        let nv_new = target_order.graded.len();
        let nc = self.nc;
        let graded = target_order.graded.clone();
        let mut f = |d: &[i64]| -> Result<Series> {
            let mut q = vec![0; nv_new];
            let mut k = FieldElem::one();
            for (i, b) in bindings.iter().enumerate() {
                match b {
                    NovBinding::Keep(j) => q[*j] += d[i],
                    NovBinding::Value(v) => {
                        if d[i] % denom != 0 {
                            return Err(Error::Invalid("fractional exponent specialized to a value".into()));
                        }
                        k = &k * &v.pow(d[i] / denom).ok_or(Error::Invalid("zero to a negative power".into()))?;
                    }
                    NovBinding::Phase(x) => {
                        let p = x * BigRational::new(BigInt::from(d[i]), BigInt::from(denom));
                        k = &k * &phase(&p);
                    }
                }
            }
            let mut one = OrderSpec::exact(nv_new);
            one.graded = graded.clone();
            Ok(Series::monomial(nv_new, nc, one, Exp { z: 0, q, t: vec![0; nc] }, k))
        };
        self.substitute_novikov(&specialized, names, target_order, &mut f)
    }

    pub fn render(&self, names: &Names) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, x) in e.q.iter().enumerate() {
                if *x != 0 {
                    let n = names.novikov.get(i).cloned().unwrap_or_else(|| format!("Q{}", i + 1));
                    factors.push(if *x == names.denom { n } else { format!("{n}^{}", fmt_exp(*x, names.denom)) });
                }
            }
            for (i, x) in e.t.iter().enumerate() {
                if *x != 0 {
                    let n = names.coords.get(i).cloned().unwrap_or_else(|| format!("t{i}"));
                    factors.push(if *x == 1 { n } else { format!("{n}^{x}") });
                }
            }
            if e.z != 0 {
                factors.push(if e.z == 1 { "z".into() } else { format!("z^{}", e.z) });
            }
            let _ = write!(out, "({c})");
            for f in factors {
                let _ = write!(out, "*{f}");
            }
        }
        out
    }

    /// A nonzero term of `self - other`, if any, within the common truncation.
    pub fn first_difference(&self, other: &Series) -> Result<Option<(Exp, FieldElem, FieldElem)>> {
        let d = self.sub(other)?;
        Ok(d.terms.iter().next().map(|(e, _)| (e.clone(), self.coeff(e), other.coeff(e))))
    }
}

pub fn fmt_exp(x: i64, denom: i64) -> String {
    let q = BigRational::new(BigInt::from(x), BigInt::from(denom));
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// exp(2π√−1·p) for rational p, as an exact root of unity.
pub fn phase(p: &BigRational) -> FieldElem {
    use num_traits::ToPrimitive;
    let n = p.denom().to_u32().expect("phase denominator fits u32");
    let k = (p.numer() % p.denom()).to_i64().unwrap();
    FieldElem::from_cyc(crate::exactfield::Cyc::zeta_pow(n, k))
}

#[derive(Clone, Debug)]
pub enum NovBinding {
    Keep(usize),
    Value(FieldElem),
    Phase(BigRational),
}

/// e^{sign·ρ/z}·v = Σ_k (ρ∪)^k v · sign^k z^{−k}/k!, a finite sum because cup
/// product by a degree-2 class is nilpotent. `rho[a]` is the coefficient of
/// φ_a (a series, possibly in the coordinates). Fails if a nonzero term would
/// fall below `zmin`.
pub fn exp_z_factor(
    v: &HVector,
    rho: &[Series],
    sign: i64,
    classical: &[Vec<Vec<FieldElem>>],
    zmin: Option<i64>,
) -> Result<HVector> {
    let n = v.len();
    let mut out: HVector = v.clone();
    let mut cur: HVector = v.clone();
    let mut k: i64 = 0;
    let mut fact = BigRational::from_integer(BigInt::from(1));
    loop {
        k += 1;
        // cur <- ρ ∪ cur
        let mut next: HVector = cur.iter().map(|s| s.zero_like()).collect();
        let mut any = false;
        for (a, ra) in rho.iter().enumerate() {
            if ra.is_zero() {
                continue;
            }
            for (b, vb) in cur.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let prod = ra.mul(vb)?;
                for (c, x) in classical[a][b].iter().enumerate() {
                    if !x.is_zero() {
                        next[c] = next[c].add(&prod.scale(x))?;
                        any = true;
                    }
                }
            }
        }
        if !any || next.iter().all(|s| s.is_zero()) {
            break;
        }
        if k as usize > n + 64 {
            return Err(Error::Invalid("cup product by ρ is not nilpotent within the truncation".into()));
        }
        fact *= BigRational::from_integer(BigInt::from(k));
        let coef = FieldElem::from_rat(BigRational::from_integer(BigInt::from(sign.pow(k as u32))) / &fact);
        for (c, s) in next.iter().enumerate() {
            let term = s.shift_z(-k).scale(&coef);
            if let (Some(zm), Some((lo, _))) = (zmin, term.z_range()) {
                if lo < zm {
                    return Err(Error::Window(format!(
                        "e^(ρ/z) expansion reaches z^{lo} below the window minimum {zm}; need z_min ≤ {lo}"
                    )));
                }
            }
            let mut term = term;
            term.order.zlo = out[c].order.zlo;
            out[c] = out[c].add(&term)?;
        }
        cur = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_series(coeffs: &[(i64, i64)], nov_max: i64) -> Series {
        let o = OrderSpec::new(Some(nov_max), vec![true], None);
        let mut s = Series::zero(1, 0, o);
        for (d, c) in coeffs {
            s.add_term(Exp { z: 0, q: vec![*d], t: vec![] }, FieldElem::from_int(*c));
        }
        s
    }

    #[test]
    fn one_plus_q_times_one_minus_q() {
        let a = q_series(&[(0, 1), (1, 1)], 2);
        let b = q_series(&[(0, 1), (1, -1)], 2);
        assert_eq!(a.mul(&b).unwrap(), q_series(&[(0, 1), (2, -1)], 2));
    }

    #[test]
    fn truncated_exponentials_cancel() {
        let o = OrderSpec::new(None, vec![], Some(4));
        let mut e = Series::zero(0, 1, o.clone());
        let mut f = Series::zero(0, 1, o);
        let mut fact = 1i64;
        for k in 0..=4u32 {
            if k > 0 {
                fact *= k as i64;
            }
            e.add_term(Exp { z: 0, q: vec![], t: vec![k] }, FieldElem::frac(1, fact));
            f.add_term(Exp { z: 0, q: vec![], t: vec![k] }, FieldElem::frac(if k % 2 == 0 { 1 } else { -1 }, fact));
        }
        let p = e.mul(&f).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.coeff(&Exp { z: 0, q: vec![], t: vec![0] }).is_one());
    }

    #[test]
    fn z_window_bookkeeping() {
        let mut o = OrderSpec::exact(0);
        o.zlo = Some(-3);
        let mut a = Series::zero(0, 0, o.clone());
        a.add_term(Exp { z: 1, q: vec![], t: vec![] }, FieldElem::one());
        let mut b = Series::zero(0, 0, o);
        b.add_term(Exp { z: -1, q: vec![], t: vec![] }, FieldElem::one());
        let p = a.mul(&b).unwrap();
        assert!(p.coeff(&Exp { z: 0, q: vec![], t: vec![] }).is_one());
        // a is known for z ≥ -3 with top 1; b likewise with top -1
        assert_eq!(p.order().zlo, Some(-2));
    }

    #[test]
    fn substitution_examples() {
        let o = OrderSpec::new(Some(10), vec![true, false], None);
        let mut s = Series::zero(2, 0, o);
        s.add_term(Exp { z: 0, q: vec![1, 2], t: vec![] }, FieldElem::one());
        s.add_term(Exp { z: 0, q: vec![0, 1], t: vec![] }, FieldElem::one());
        let names = vec!["Q1".to_string(), "Q2".to_string()];
        let target = OrderSpec::new(Some(10), vec![true], None);
        let r = s.substitute(&[NovBinding::Keep(0), NovBinding::Value(FieldElem::one())], 1, &names, target.clone()).unwrap();
        let mut expect = Series::zero(1, 0, target.clone());
        expect.add_term(Exp { z: 0, q: vec![1], t: vec![] }, FieldElem::one());
        expect.add_term(Exp { z: 0, q: vec![0], t: vec![] }, FieldElem::one());
        assert_eq!(r, expect);
        let e = s.substitute(&[NovBinding::Value(FieldElem::one()), NovBinding::Keep(0)], 1, &names, target).unwrap_err();
        assert!(matches!(e, Error::NonTerminating { .. }), "{e}");
    }

    #[test]
    fn coordinate_restriction() {
        let o = OrderSpec::new(None, vec![], Some(3));
        let mut s = Series::zero(0, 2, o);
        s.add_term(Exp { z: 0, q: vec![], t: vec![1, 0] }, FieldElem::one());
        s.add_term(Exp { z: 0, q: vec![], t: vec![1, 1] }, FieldElem::one());
        let r = s.restrict_coords_zero(&[1]);
        assert_eq!(r.len(), 1);
        let d = s.derivative(1);
        assert_eq!(d.coeff(&Exp { z: 0, q: vec![], t: vec![1, 0] }), FieldElem::one());
        assert_eq!(d.order().coord_max, Some(2));
    }

    #[test]
    fn phases_are_roots_of_unity() {
        assert_eq!(phase(&BigRational::new(1.into(), 2.into())), FieldElem::from_int(-1));
        assert_eq!(phase(&BigRational::new(3.into(), 1.into())), FieldElem::one());
    }
}
