//! Elements of a cyclotomic field ℚ(ζ_n), stored as polynomial residues
//! modulo the n-th cyclotomic polynomial Φ_n.
//!
//! Invariants:
//! - `c` has no trailing zeros and `c.len() < φ(n)`;
//! - an element with at most one coefficient is rational and carries `n = 1`,
//!   so rationals compare equal regardless of which field produced them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Integer coefficients of Φ_n, low degree first.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d of n.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_poly(d);
            num = int_poly_div_exact(&num, &phi_d);
        }
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

fn int_poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    // b is monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let coef = r[i + db].clone();
        if coef.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &coef * bj;
        }
        q[i] = coef;
    }
    while q.len() > 1 && q.last().is_some_and(|c| c.is_zero()) {
        q.pop();
    }
    q
}

/// Euler's totient, i.e. the degree of Φ_n.
pub fn totient(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

#[derive(Clone, Debug)]
pub struct Cyc {
    n: u32,
    c: Vec<BigRational>,
}

fn trim(c: &mut Vec<BigRational>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

fn reduce_mod_phi(mut c: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    trim(&mut c);
    if c.len() <= 1 {
        return c;
    }
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    while c.len() > d {
        let top = c.len() - 1;
        let coef = c[top].clone();
        let shift = top - d;
        for (j, pj) in phi.iter().enumerate() {
            if !pj.is_zero() {
                c[shift + j] -= &coef * BigRational::from_integer(pj.clone());
            }
        }
        trim(&mut c);
    }
    c
}

impl Cyc {
    fn build(n: u32, c: Vec<BigRational>) -> Cyc {
        let c = reduce_mod_phi(c, n.max(1));
        let n = if c.len() <= 1 { 1 } else { n };
        Cyc { n, c }
    }

    pub fn zero() -> Cyc {
        Cyc { n: 1, c: Vec::new() }
    }

    pub fn one() -> Cyc {
        Cyc::from_rat(BigRational::one())
    }

    pub fn from_rat(q: BigRational) -> Cyc {
        if q.is_zero() {
            Cyc::zero()
        } else {
            Cyc { n: 1, c: vec![q] }
        }
    }

    pub fn from_int(k: i64) -> Cyc {
        Cyc::from_rat(BigRational::from_integer(BigInt::from(k)))
    }

    /// The primitive n-th root of unity ζ_n = exp(2πi/n).
    pub fn zeta(n: u32) -> Cyc {
        assert!(n >= 1, "root of unity order must be positive");
        Cyc::build(n, vec![BigRational::zero(), BigRational::one()])
    }

    /// ζ_n^k for any integer k.
    pub fn zeta_pow(n: u32, k: i64) -> Cyc {
        let e = k.rem_euclid(n as i64) as usize;
        let mut c = vec![BigRational::zero(); e + 1];
        c[e] = BigRational::one();
        Cyc::build(n, c)
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.c.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.c[0].clone()),
            _ => None,
        }
    }

    /// Rewrites `self` as a residue modulo Φ_m, where n divides m.
    fn lift(&self, m: u32) -> Vec<BigRational> {
        if self.n == m || self.c.len() <= 1 {
            return self.c.clone();
        }
        let step = (m / self.n) as usize;
        let mut out = vec![BigRational::zero(); (self.c.len() - 1) * step + 1];
        for (i, ci) in self.c.iter().enumerate() {
            out[i * step] = ci.clone();
        }
        reduce_mod_phi(out, m)
    }

    fn common(&self, other: &Cyc) -> u32 {
        if self.n == other.n {
            self.n
        } else {
            (self.n as u64).lcm(&(other.n as u64)) as u32
        }
    }

    pub fn add(&self, other: &Cyc) -> Cyc {
        let m = self.common(other);
        let a = self.lift(m);
        let b = other.lift(m);
        let len = a.len().max(b.len());
        let mut c = Vec::with_capacity(len);
        for i in 0..len {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            c.push(x + y);
        }
        Cyc::build(m, c)
    }

    pub fn neg(&self) -> Cyc {
        Cyc { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, other: &Cyc) -> Cyc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Cyc) -> Cyc {
        if self.is_zero() || other.is_zero() {
            return Cyc::zero();
        }
        if self.c.len() == 1 {
            return Cyc { n: other.n, c: other.c.iter().map(|x| x * &self.c[0]).collect() };
        }
        if other.c.len() == 1 {
            return Cyc { n: self.n, c: self.c.iter().map(|x| x * &other.c[0]).collect() };
        }
        let m = self.common(other);
        let a = self.lift(m);
        let b = other.lift(m);
        let mut c = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Cyc::build(m, c)
    }

    pub fn scale(&self, q: &BigRational) -> Cyc {
        if q.is_zero() {
            return Cyc::zero();
        }
        Cyc { n: self.n, c: self.c.iter().map(|x| x * q).collect() }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in ℚ[x].
    pub fn inv(&self) -> Option<Cyc> {
        if self.is_zero() {
            return None;
        }
        if self.c.len() == 1 {
            return Some(Cyc::from_rat(self.c[0].recip()));
        }
        let phi: Vec<BigRational> = cyclotomic_poly(self.n)
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        // invariant: s * self ≡ r (mod Φ)
        let (mut r0, mut r1) = (phi, self.c.clone());
        let (mut s0, mut s1): (Vec<BigRational>, Vec<BigRational>) =
            (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = qpoly_divrem(&r0, &r1);
            let s2 = qpoly_sub(&s0, &qpoly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r1.is_empty() {
            return None;
        }
        let k = r1[0].recip();
        let s: Vec<BigRational> = s1.iter().map(|x| x * &k).collect();
        Some(Cyc::build(self.n, s))
    }

    pub fn pow(&self, e: i64) -> Option<Cyc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Cyc::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Some(acc)
    }

    /// Whether the value is a rational multiple of ζ₄ = √−1, returning that multiple.
    pub fn imaginary_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if !self.n.is_multiple_of(4) {
            return None;
        }
        let i = Cyc::zeta(4);
        let q = self.mul(&i.neg());
        q.as_rational()
    }

    pub(crate) fn lead_sign_negative(&self) -> bool {
        match self.c.iter().rev().find(|x| !x.is_zero()) {
            Some(x) => x.is_negative(),
            None => false,
        }
    }
}

fn qpoly_trim(mut a: Vec<BigRational>) -> Vec<BigRational> {
    trim(&mut a);
    a
}

fn qpoly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
        out.push(x - y);
    }
    qpoly_trim(out)
}

fn qpoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    qpoly_trim(out)
}

fn qpoly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = qpoly_trim(a.to_vec());
    let db = b.len() - 1;
    let lb = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let k = r.len() - 1 - db;
        let coef = &r[r.len() - 1] / &lb;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &coef * bj;
        }
        q[k] = coef;
        r = qpoly_trim(r);
    }
    (qpoly_trim(q), r)
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Cyc) -> bool {
        if self.n == other.n || (self.c.len() <= 1 && other.c.len() <= 1) {
            return self.c == other.c;
        }
        let m = self.common(other);
        self.lift(m) == other.lift(m)
    }
}

impl Eq for Cyc {}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Cyc {
    /// Name used when printing ζ_n.
    pub fn root_name(n: u32) -> String {
        format!("zeta_{n}")
    }

    /// Renders the value as a sum of terms `q*zeta_n^k`, highest power first.
    pub fn render(&self) -> String {
        if self.c.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, q) in self.c.iter().enumerate().rev() {
            if q.is_zero() {
                continue;
            }
            let neg = q.is_negative();
            let mag = q.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let root = match k {
                0 => String::new(),
                1 => Cyc::root_name(self.n),
                _ => format!("{}^{}", Cyc::root_name(self.n), k),
            };
            if root.is_empty() {
                out.push_str(&fmt_rat(&mag));
            } else if mag.is_one() {
                out.push_str(&root);
            } else {
                out.push_str(&format!("{}*{}", fmt_rat(&mag), root));
            }
        }
        out
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), coeffs(&[-1, 1]));
        assert_eq!(*cyclotomic_poly(2), coeffs(&[1, 1]));
        assert_eq!(*cyclotomic_poly(4), coeffs(&[1, 0, 1]));
        assert_eq!(*cyclotomic_poly(6), coeffs(&[1, -1, 1]));
        assert_eq!(*cyclotomic_poly(12), coeffs(&[1, 0, -1, 0, 1]));
        assert_eq!(totient(9), 6);
    }

    #[test]
    fn zeta_relations() {
        for n in 1..=12u32 {
            let z = Cyc::zeta(n);
            assert!(z.pow(n as i64).unwrap().is_one(), "zeta_{n}^{n}");
            // Φ_n(ζ) = 0
            let phi = cyclotomic_poly(n);
            let mut acc = Cyc::zero();
            for (k, a) in phi.iter().enumerate() {
                let term = Cyc::zeta_pow(n, k as i64).scale(&BigRational::from_integer(a.clone()));
                acc = acc.add(&term);
            }
            assert!(acc.is_zero(), "Phi_{n}(zeta) != 0");
        }
        assert_eq!(Cyc::zeta(4).mul(&Cyc::zeta(4)), Cyc::from_int(-1));
        assert_eq!(Cyc::zeta(2), Cyc::from_int(-1));
    }

    #[test]
    fn inverse_and_mixed_orders() {
        let a = Cyc::from_int(2).add(&Cyc::zeta(5));
        let b = a.inv().unwrap();
        assert!(a.mul(&b).is_one());
        // ζ_4 · ζ_6 lives in ℚ(ζ_12)
        let p = Cyc::zeta(4).mul(&Cyc::zeta(6));
        assert_eq!(p.order(), 12);
        assert_eq!(p, Cyc::zeta_pow(12, 5));
        assert_eq!(Cyc::zeta(3), Cyc::zeta_pow(6, 2));
    }

    #[test]
    fn imaginary_detection() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let c = Cyc::zeta(4).scale(&half);
        assert_eq!(c.imaginary_rational(), Some(half));
        assert_eq!(Cyc::zeta(3).imaginary_rational(), None);
        assert_eq!(Cyc::from_int(1).imaginary_rational(), None);
    }
}
