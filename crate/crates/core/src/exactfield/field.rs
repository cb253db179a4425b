//! Rational functions over ℚ(ζ_N) in free generators, kept in normal form.

use super::cyclo::Cyc;
use super::poly::{Mono, Poly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

/// `num / den` with `gcd(num, den) = 1` and `den` monic; zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElem {
    num: Poly,
    den: Poly,
}

impl Default for FieldElem {
    fn default() -> Self {
        FieldElem::zero()
    }
}

impl FieldElem {
    pub fn zero() -> FieldElem {
        FieldElem { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> FieldElem {
        FieldElem { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(k: i64) -> FieldElem {
        FieldElem::from_cyc(Cyc::from_int(k))
    }

    pub fn from_rat(q: BigRational) -> FieldElem {
        FieldElem::from_cyc(Cyc::from_rat(q))
    }

    pub fn frac(a: i64, b: i64) -> FieldElem {
        FieldElem::from_rat(BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    pub fn from_cyc(c: Cyc) -> FieldElem {
        FieldElem { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> FieldElem {
        FieldElem { num: p, den: Poly::one() }
    }

    pub fn var(name: &str) -> FieldElem {
        FieldElem::from_poly(Poly::var(&Arc::from(name)))
    }

    /// Builds and normalizes `num / den`; `None` if `den` is zero.
    pub fn from_parts(num: Poly, den: Poly) -> Option<FieldElem> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(FieldElem::zero());
        }
        if let Some(c) = den.as_constant() {
            return Some(FieldElem { num: num.scale(&c.inv()?), den: Poly::one() });
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading().unwrap().1.inv()?;
        Some(FieldElem { num: num.scale(&lc), den: den.scale(&lc) })
    }

    /// Re-normalizes; a no-op on values already in normal form.
    pub fn normalize(&self) -> FieldElem {
        FieldElem::from_parts(self.num.clone(), self.den.clone()).expect("nonzero denominator")
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value if it involves no transcendental generator.
    pub fn as_cyc(&self) -> Option<Cyc> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_cyc()?.as_rational()
    }

    pub fn as_integer(&self) -> Option<i64> {
        let q = self.as_rational()?;
        if q.is_integer() {
            num_traits::ToPrimitive::to_i64(q.numer())
        } else {
            None
        }
    }

    pub fn is_transcendental_free(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn generators(&self) -> Vec<Arc<str>> {
        let mut v = self.num.vars();
        for g in self.den.vars() {
            if !v.contains(&g) {
                v.push(g);
            }
        }
        v.sort();
        v
    }

    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        Some(FieldElem { num: self.den.clone(), den: self.num.clone() }.normalize_light())
    }

    pub fn checked_div(&self, other: &FieldElem) -> Option<FieldElem> {
        if other.is_zero() {
            return None;
        }
        Some(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Option<FieldElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let n = e.unsigned_abs() as u32;
        Some(FieldElem { num: base.num.pow(n), den: base.den.pow(n) }.normalize_light())
    }

    pub fn scale_rat(&self, q: &BigRational) -> FieldElem {
        if q.is_zero() {
            return FieldElem::zero();
        }
        FieldElem { num: self.num.scale(&Cyc::from_rat(q.clone())), den: self.den.clone() }
    }

    pub fn scale_int(&self, k: i64) -> FieldElem {
        self.scale_rat(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Rescales a coprime pair so the denominator is monic.
    fn normalize_light(self) -> FieldElem {
        if self.num.is_zero() {
            return FieldElem::zero();
        }
        if let Some(c) = self.den.as_constant() {
            return FieldElem { num: self.num.scale(&c.inv().unwrap()), den: Poly::one() };
        }
        let lc = self.den.leading().map(|(_, c)| c.clone()).unwrap_or_else(Cyc::one);
        if lc.is_one() {
            self
        } else {
            let k = lc.inv().unwrap();
            FieldElem { num: self.num.scale(&k), den: self.den.scale(&k) }
        }
    }

    fn add_impl(&self, other: &FieldElem) -> FieldElem {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return FieldElem { num: self.num.add(&other.num), den: Poly::one() };
            }
            return FieldElem::from_parts(self.num.add(&other.num), self.den.clone()).unwrap();
        }
        // Any common factor of the new numerator and denominator divides
        // g = gcd(d1, d2), so only g needs to be tested.
        let g = self.den.gcd(&other.den);
        if g.is_one() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            return FieldElem { num, den: self.den.mul(&other.den) }.normalize_light();
        }
        let d1 = self.den.div_exact(&g).unwrap();
        let d2 = other.den.div_exact(&g).unwrap();
        let mut num = self.num.mul(&d2).add(&other.num.mul(&d1));
        let mut den = self.den.mul(&d2);
        if num.is_zero() {
            return FieldElem::zero();
        }
        loop {
            let h = num.gcd(&g);
            if h.is_one() {
                break;
            }
            num = num.div_exact(&h).unwrap();
            den = den.div_exact(&h).unwrap();
        }
        FieldElem { num, den }.normalize_light()
    }

    fn mul_impl(&self, other: &FieldElem) -> FieldElem {
        if self.is_zero() || other.is_zero() {
            return FieldElem::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return FieldElem { num: self.num.mul(&other.num), den: Poly::one() };
        }
        if let Some(c) = other.as_cyc() {
            return FieldElem { num: self.num.scale(&c), den: self.den.clone() };
        }
        if let Some(c) = self.as_cyc() {
            return FieldElem { num: other.num.scale(&c), den: other.den.clone() };
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let cut = |p: &Poly, g: &Poly| if g.is_one() { p.clone() } else { p.div_exact(g).unwrap() };
        let num = cut(&self.num, &g1).mul(&cut(&other.num, &g2));
        let den = cut(&self.den, &g2).mul(&cut(&other.den, &g1));
        FieldElem { num, den }.normalize_light()
    }

    /// Substitutes field elements for generators.
    pub fn substitute(&self, f: &dyn Fn(&str) -> Option<FieldElem>) -> Option<FieldElem> {
        let eval = |p: &Poly| -> FieldElem {
            let mut acc = FieldElem::zero();
            for (m, c) in p.terms() {
                let mut t = FieldElem::from_cyc(c.clone());
                for (n, e) in &m.0 {
                    let b = f(n).unwrap_or_else(|| FieldElem::var(n));
                    t = &t * &b.pow(*e as i64).unwrap_or_else(FieldElem::zero);
                }
                acc = &acc + &t;
            }
            acc
        };
        eval(&self.num).checked_div(&eval(&self.den))
    }

    /// Splits off the power of a generator: `self = g^k * rest` with `rest`
    /// free of `g`. Fails if `g` occurs in any non-monomial way.
    pub fn split_generator(&self, g: &str) -> Option<Vec<(i64, FieldElem)>> {
        let dk = self.den.degree_in(g);
        let den_rest = {
            let gm = Mono::var(&Arc::from(g), dk);
            let d = self.den.div_exact(&Poly::monomial(gm, Cyc::one()))?;
            if d.degree_in(g) != 0 {
                return None;
            }
            d
        };
        let mut by_exp: std::collections::BTreeMap<i64, Poly> = std::collections::BTreeMap::new();
        for (m, c) in self.num.terms() {
            let e = m.degree_in(g);
            let rest = m.div(&Mono::var(&Arc::from(g), e)).unwrap();
            let entry = by_exp.entry(e as i64 - dk as i64).or_default();
            *entry = entry.add(&Poly::monomial(rest, c.clone()));
        }
        Some(
            by_exp
                .into_iter()
                .map(|(k, p)| (k, FieldElem::from_parts(p, den_rest.clone()).unwrap()))
                .collect(),
        )
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let n = if self.num.len() == 1 { format!("{}", self.num) } else { format!("({})", self.num) };
        let simple = self.den.len() == 1 && {
            let (m, c) = self.den.leading().unwrap();
            c.is_one() && m.0.len() == 1
        };
        let d = if simple {
            format!("{}", self.den)
        } else {
            format!("({})", self.den)
        };
        write!(f, "{n}/{d}")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &'b FieldElem) -> FieldElem {
                let f: fn(&FieldElem, &FieldElem) -> FieldElem = $body;
                f(self, rhs)
            }
        }
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'b> $tr<&'b FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &'b FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b));
binop!(Sub, sub, |a, b| a.add_impl(&-b));
binop!(Mul, mul, |a, b| a.mul_impl(b));
binop!(Div, div, |a, b| a.checked_div(b).expect("division by zero"));

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl From<i64> for FieldElem {
    fn from(k: i64) -> Self {
        FieldElem::from_int(k)
    }
}

impl Zero for FieldElem {
    fn zero() -> Self {
        FieldElem::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for FieldElem {
    fn one() -> Self {
        FieldElem::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cancels() {
        let a = FieldElem::var("a") + FieldElem::from_int(2);
        let b = FieldElem::var("b") * FieldElem::var("c");
        let x = a.checked_div(&b).unwrap();
        let y = b.checked_div(&a).unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn free_generators_do_not_combine() {
        let p = FieldElem::var("g13") * FieldElem::var("g23");
        assert_eq!(p.numer().len(), 1);
        assert!(p.denom().is_one());
    }

    #[test]
    fn cancellation_of_common_factor() {
        let x = FieldElem::var("x");
        let y = FieldElem::var("y");
        let num = (&x * &x) - (&y * &y);
        let den = &x - &y;
        let q = num.checked_div(&den).unwrap();
        assert_eq!(q, &x + &y);
        assert!(q.denom().is_one());
    }

    #[test]
    fn split_generator_by_power() {
        let z = FieldElem::var("z");
        let a = FieldElem::var("a");
        let e = &(&a * &z) + &FieldElem::from_int(3).checked_div(&(&z * &z)).unwrap();
        let parts = e.split_generator("z").unwrap();
        assert_eq!(parts, vec![(-2, FieldElem::from_int(3)), (1, a)]);
    }
}
