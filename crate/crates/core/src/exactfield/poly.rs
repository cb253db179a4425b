//! Sparse multivariate polynomials over ℚ(ζ_N) in named generators.

use super::cyclo::Cyc;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A monomial: generator names with positive exponents, sorted by name.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Mono(pub Vec<(Arc<str>, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(name: &Arc<str>, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(name.clone(), e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree_in(&self, v: &str) -> u32 {
        self.0.iter().find(|(n, _)| &**n == v).map_or(0, |(_, e)| *e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (n, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *n {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *n {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((n.clone(), e - f)),
                }
            } else {
                out.push((n.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Componentwise minimum (monomial gcd).
    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut out = Vec::new();
        for (n, e) in &self.0 {
            let f = other.degree_in(n);
            if f > 0 {
                out.push((n.clone(), (*e).min(f)));
            }
        }
        Mono(out)
    }

    /// Removes `v` from the monomial, returning its exponent.
    fn split_var(&self, v: &str) -> (u32, Mono) {
        let mut e = 0;
        let mut rest = Vec::with_capacity(self.0.len());
        for (n, k) in &self.0 {
            if &**n == v {
                e = *k;
            } else {
                rest.push((n.clone(), *k));
            }
        }
        (e, Mono(rest))
    }
}

impl Ord for Mono {
    /// Lexicographic, with alphabetically smaller generator names more significant.
    fn cmp(&self, other: &Mono) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((na, ea)), Some((nb, eb))) => match na.cmp(nb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Mono) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, e) in &self.0 {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{n}")?;
            } else {
                write!(f, "{n}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Cyc>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Cyc) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn one() -> Poly {
        Poly::constant(Cyc::one())
    }

    pub fn monomial(m: Mono, c: Cyc) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(name: &Arc<str>) -> Poly {
        Poly::monomial(Mono::var(name, 1), Cyc::one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Cyc)> {
        self.terms.iter()
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

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Cyc> {
        match self.terms.len() {
            0 => Some(Cyc::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Leading term under the lexicographic order.
    pub fn leading(&self) -> Option<(&Mono, &Cyc)> {
        self.terms.iter().next_back()
    }

    pub fn vars(&self) -> Vec<Arc<str>> {
        let mut v: Vec<Arc<str>> = Vec::new();
        for m in self.terms.keys() {
            for (n, _) in &m.0 {
                if !v.contains(n) {
                    v.push(n.clone());
                }
            }
        }
        v.sort();
        v
    }

    pub fn degree_in(&self, v: &str) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Mono, c: Cyc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, k: &Cyc) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect() }
    }

    pub fn mul_term(&self, m: &Mono, k: &Cyc) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(a, c)| (a.mul(m), c.mul(k))).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient, or `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.as_constant() {
            return Some(self.scale(&c.inv()?));
        }
        let (lm, lc) = other.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let lc_inv = lc.inv()?;
        if other.len() == 1 {
            let mut out = Poly::zero();
            for (m, c) in &self.terms {
                out.terms.insert(m.div(&lm)?, c.mul(&lc_inv));
            }
            return Some(out);
        }
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let tm = rm.div(&lm)?;
            let tc = rc.mul(&lc_inv);
            r = r.sub(&other.mul_term(&tm, &tc));
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.inv().expect("nonzero")),
            _ => self.clone(),
        }
    }

    /// Coefficients with respect to the variable `v`, keyed by exponent.
    fn coeffs_in(&self, v: &str) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            out.entry(e).or_default().terms.insert(rest, c.clone());
        }
        out
    }

    fn from_coeffs_in(v: &Arc<str>, cs: &BTreeMap<u32, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (e, p) in cs {
            let xm = Mono::var(v, *e);
            for (m, c) in &p.terms {
                out.add_term(m.mul(&xm), c.clone());
            }
        }
        out
    }

    /// Greatest common divisor, normalized to be monic.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self.len() == 1 || other.len() == 1 {
            let (mono, poly) = if self.len() == 1 { (self, other) } else { (other, self) };
            let mut g = mono.leading().unwrap().0.clone();
            for m in poly.terms.keys() {
                g = g.gcd(m);
                if g.is_one() {
                    break;
                }
            }
            return Poly::monomial(g, Cyc::one());
        }
        let va = self.vars();
        let vb = other.vars();
        if !va.iter().any(|v| vb.contains(v)) {
            // no shared generator: only a monomial content can be common
            let ca = self.mono_content();
            let cb = other.mono_content();
            return Poly::monomial(ca.gcd(&cb), Cyc::one());
        }
        let shared: Vec<Arc<str>> = va.iter().filter(|v| vb.contains(v)).cloned().collect();
        if self.coprime_by_evaluation(other, &shared) {
            return Poly::one();
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if big.div_exact(small).is_some() {
            return small.monic();
        }
        let x = shared[0].clone();
        let (ca, pa) = self.content_pp(&x);
        let (cb, pb) = other.content_pp(&x);
        let c = ca.gcd(&cb);
        let (mut a, mut b) = if pa.degree_in(&x) >= pb.degree_in(&x) { (pa, pb) } else { (pb, pa) };
        let g = loop {
            if b.degree_in(&x) == 0 {
                break if b.is_zero() { a } else { Poly::one() };
            }
            let r = a.prem(&b, &x);
            if r.is_zero() {
                break b;
            }
            a = b;
            b = r.content_pp(&x).1;
        };
        let g = if g.degree_in(&x) == 0 { Poly::one() } else { g.content_pp(&x).1 };
        c.mul(&g).monic()
    }

    /// Sufficient test for `gcd = 1`: for each shared generator x, specialize
    /// the others at integer points where both x-leading coefficients survive
    /// and check that the univariate gcd is constant.
    fn coprime_by_evaluation(&self, other: &Poly, shared: &[Arc<str>]) -> bool {
        let mut all = self.vars();
        for v in other.vars() {
            if !all.contains(&v) {
                all.push(v);
            }
        }
        'vars: for x in shared {
            for attempt in 0..3i64 {
                let point = |n: &str| -> Option<Cyc> {
                    let i = all.iter().position(|v| &**v == n).unwrap() as i64;
                    Some(Cyc::from_int(2 + 3 * i + 7 * attempt + i * i * attempt))
                };
                let (ua, la) = self.specialize(x, &point);
                let (ub, lb) = other.specialize(x, &point);
                if !la || !lb {
                    continue;
                }
                if upoly_gcd_degree(ua, ub) == 0 {
                    continue 'vars;
                }
                return false;
            }
            return false;
        }
        true
    }

    /// Univariate coefficients in `x` after evaluating every other generator;
    /// the flag reports whether the x-degree is preserved.
    fn specialize(&self, x: &str, point: &dyn Fn(&str) -> Option<Cyc>) -> (Vec<Cyc>, bool) {
        let deg = self.degree_in(x) as usize;
        let mut out = vec![Cyc::zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut v = c.clone();
            let mut e = 0usize;
            for (n, k) in &m.0 {
                if &**n == x {
                    e = *k as usize;
                } else {
                    v = v.mul(&point(n).unwrap().pow(*k as i64).unwrap());
                }
            }
            out[e] = out[e].add(&v);
        }
        let ok = !out[deg].is_zero();
        (out, ok)
    }

    fn mono_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let mut g = match it.next() {
            Some(m) => m.clone(),
            None => return Mono::one(),
        };
        for m in it {
            g = g.gcd(m);
        }
        g
    }

    /// Content and primitive part with respect to `x`.
    fn content_pp(&self, x: &Arc<str>) -> (Poly, Poly) {
        let cs = self.coeffs_in(x);
        let mut g = Poly::zero();
        for p in cs.values() {
            g = g.gcd(p);
            if g.is_one() {
                break;
            }
        }
        if g.is_one() {
            return (g, self.clone());
        }
        let pp: BTreeMap<u32, Poly> = cs.iter().map(|(e, p)| (*e, p.div_exact(&g).expect("content divides"))).collect();
        (g, Poly::from_coeffs_in(x, &pp))
    }

    /// Pseudo-remainder of `self` by `b` as polynomials in `x`.
    fn prem(&self, b: &Poly, x: &Arc<str>) -> Poly {
        let db = b.degree_in(x);
        let bc = b.coeffs_in(x);
        let lb = bc.get(&db).cloned().unwrap_or_default();
        let mut r = self.clone();
        loop {
            if r.is_zero() {
                return r;
            }
            let dr = r.degree_in(x);
            if dr < db {
                return r;
            }
            let lr = r.coeffs_in(x).remove(&dr).unwrap_or_default();
            let shift = Poly::monomial(Mono::var(x, dr - db), Cyc::one());
            r = lb.mul(&r).sub(&lr.mul(&shift).mul(b));
        }
    }

    /// Substitutes polynomials for generators.
    pub fn eval_with<F: Fn(&str) -> Option<Poly>>(&self, f: &F) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (n, e) in &m.0 {
                let base = f(n).unwrap_or_else(|| Poly::var(n));
                t = t.mul(&base.pow(*e));
            }
            out = out.add(&t);
        }
        out
    }
}

fn utrim(a: &mut Vec<Cyc>) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

/// Degree of the gcd of two univariate polynomials over ℚ(ζ).
fn upoly_gcd_degree(mut a: Vec<Cyc>, mut b: Vec<Cyc>) -> usize {
    utrim(&mut a);
    utrim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let lb = b.last().unwrap().inv().unwrap();
        while a.len() >= b.len() {
            let k = a.len() - b.len();
            let q = a.last().unwrap().mul(&lb);
            for (j, bj) in b.iter().enumerate() {
                a[k + j] = a[k + j].sub(&q.mul(bj));
            }
            a.pop();
            utrim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let single = c.coeffs().iter().filter(|q| !num_traits::Zero::is_zero(*q)).count() == 1;
            let neg = single && c.lead_sign_negative();
            let mag = if neg { c.neg() } else { c.clone() };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let cs = if single { mag.render() } else { format!("({})", mag.render()) };
            if m.is_one() {
                f.write_str(&cs)?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{cs}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Poly {
        Poly::var(&Arc::from(n))
    }

    fn k(x: i64) -> Poly {
        Poly::constant(Cyc::from_int(x))
    }

    #[test]
    fn lex_order_prefers_smaller_names() {
        let a = Mono::var(&Arc::from("a"), 1);
        let b2 = Mono::var(&Arc::from("b"), 2);
        assert!(a > b2);
        assert!(b2 > Mono::one());
    }

    #[test]
    fn exact_division() {
        let p = v("x").add(&v("y")).mul(&v("x").sub(&v("y")));
        let q = p.div_exact(&v("x").add(&v("y"))).unwrap();
        assert_eq!(q, v("x").sub(&v("y")));
        assert!(v("x").div_exact(&v("y")).is_none());
    }

    #[test]
    fn gcd_of_products() {
        let f = v("x").add(&k(1));
        let g = v("x").mul(&v("y")).sub(&k(2));
        let h = v("y").add(&v("z"));
        let a = f.mul(&g).mul(&k(3));
        let b = f.mul(&h).mul(&k(-5));
        assert_eq!(a.gcd(&b), f);
        assert_eq!(g.gcd(&h), Poly::one());
        let m = v("x").mul(&v("x")).mul(&v("y"));
        assert_eq!(m.gcd(&v("x").mul(&v("z")).add(&v("x"))), v("x"));
    }
}
