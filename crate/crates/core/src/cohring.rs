//! Graded cohomology rings with Poincaré pairing and classical product.

use crate::error::{parse_err, Error, Result};
use crate::exactfield::{parse_expr, validate_decls, ConstDecl, FieldElem};
use crate::linalg::{self, Mat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub struct BasisElem {
    pub name: String,
    /// Real (age-shifted) degree.
    pub deg: u32,
    /// Lies in a twisted sector; string and divisor reductions skip such insertions.
    pub twisted: bool,
}

#[derive(Clone, Debug)]
pub struct Ring {
    pub name: String,
    pub dim_c: u32,
    pub consts: Vec<ConstDecl>,
    pub novikov: Vec<String>,
    /// Common denominator m of Novikov exponents.
    pub denom: i64,
    /// c₁ · β_i for each Novikov variable.
    pub c1: Vec<BigRational>,
    /// False when the ring file had no `c1` line (c₁ then defaults to zero).
    pub c1_declared: bool,
    pub basis: Vec<BasisElem>,
    pub pairing: Mat,
    /// `classical[a][b]` is the coefficient vector of φ_a ∪ φ_b.
    pub classical: Vec<Vec<Vec<FieldElem>>>,
    /// `dual[a]` holds the coefficients of φ^a in the basis.
    pub dual: Mat,
}

/// Strips comments and blank lines, keeping 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                None
            } else {
                Some((i + 1, l.to_string()))
            }
        })
        .collect()
}

pub(crate) fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() || b < BigInt::zero() {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
    }
}

fn sign(a: u32, b: u32) -> i64 {
    if (a % 2 == 1) && (b % 2 == 1) {
        -1
    } else {
        1
    }
}

impl Ring {
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn deg(&self, i: usize) -> u32 {
        self.basis[i].deg
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// Basis indices that act through the divisor equation: untwisted degree-2
    /// classes φ_i with i ≤ k, dual to the Novikov generators β_i.
    pub fn divisor_index(&self, i: usize) -> Option<usize> {
        if i >= 1 && i <= self.novikov.len() && !self.basis[i].twisted && self.basis[i].deg == 2 {
            Some(i - 1)
        } else {
            None
        }
    }

    pub fn classical_product(&self, a: usize, b: usize) -> Result<&[FieldElem]> {
        if a >= self.n() || b >= self.n() {
            return Err(Error::Ring(format!("basis index out of range: ({a}, {b})")));
        }
        Ok(&self.classical[a][b])
    }

    pub fn cup(&self, u: &[FieldElem], v: &[FieldElem]) -> Vec<FieldElem> {
        let n = self.n();
        let mut out = vec![FieldElem::zero(); n];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let k = ua * vb;
                for (c, x) in self.classical[a][b].iter().enumerate() {
                    if !x.is_zero() {
                        out[c] = &out[c] + &(&k * x);
                    }
                }
            }
        }
        out
    }

    pub fn pair(&self, u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
        let mut acc = FieldElem::zero();
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if !vb.is_zero() && !self.pairing[a][b].is_zero() {
                    acc = &acc + &(&(ua * vb) * &self.pairing[a][b]);
                }
            }
        }
        acc
    }

    pub fn unit_vec(&self, i: usize) -> Vec<FieldElem> {
        let mut v = vec![FieldElem::zero(); self.n()];
        v[i] = FieldElem::one();
        v
    }

    /// c₁ · d for an exponent vector of numerators over `denom`.
    pub fn c1_dot(&self, d: &[i64]) -> BigRational {
        let mut acc = BigRational::zero();
        for (c, x) in self.c1.iter().zip(d) {
            acc += c * BigRational::new(BigInt::from(*x), BigInt::from(self.denom));
        }
        acc
    }

    pub fn dual_basis(&self) -> &Mat {
        &self.dual
    }

    pub fn parse(text: &str, file: &str) -> Result<Ring> {
        let lines = content_lines(text);
        let mut it = lines.iter().peekable();
        let mut name = None;
        let mut dim_c = None;
        let mut consts = Vec::new();
        let mut novikov: Option<(Vec<String>, i64)> = None;
        let mut c1: Option<Vec<BigRational>> = None;
        let mut basis: Vec<BasisElem> = Vec::new();
        let mut pairing_lines = Vec::new();
        let mut classical_lines = Vec::new();
        let mut section = "";
        let mut ended = false;
        while let Some((ln, l)) = it.next() {
            let ln = *ln;
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks[0] {
                "ring" if toks.len() == 2 => name = Some(toks[1].to_string()),
                "dimc" => {
                    dim_c = Some(toks.get(1).and_then(|s| s.parse::<u32>().ok()).ok_or_else(|| parse_err(file, ln, "bad dimc"))?)
                }
                "consts" => {
                    for t in &toks[1..] {
                        consts.push(ConstDecl::parse(t).map_err(|e| parse_err(file, ln, e.to_string()))?);
                    }
                }
                "novikov" => {
                    let k: usize = toks.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(file, ln, "bad novikov count"))?;
                    if toks.len() != k + 4 || toks[k + 2] != "denom" {
                        return Err(parse_err(file, ln, "expected: novikov <k> <v1> ... <vk> denom <m>"));
                    }
                    let m: i64 = toks[k + 3].parse().ok().filter(|&m| m >= 1).ok_or_else(|| parse_err(file, ln, "bad denom"))?;
                    novikov = Some((toks[2..2 + k].iter().map(|s| s.to_string()).collect(), m));
                }
                "c1" => {
                    let v: Option<Vec<BigRational>> = toks[1..].iter().map(|s| parse_rat(s)).collect();
                    c1 = Some(v.ok_or_else(|| parse_err(file, ln, "bad c1 entry"))?);
                }
                "basis" => {
                    let count: usize = toks.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(file, ln, "bad basis count"))?;
                    for expect in 0..count {
                        let (bl, b) = it.next().ok_or_else(|| parse_err(file, ln, "basis list truncated"))?;
                        let bt: Vec<&str> = b.split_whitespace().collect();
                        if bt.len() < 3 || bt.len() > 4 {
                            return Err(parse_err(file, *bl, "expected: <idx> <name> <degree> [twisted]"));
                        }
                        let idx: usize = bt[0].parse().map_err(|_| parse_err(file, *bl, "bad index"))?;
                        if idx != expect {
                            return Err(parse_err(file, *bl, format!("basis index {idx} out of order (expected {expect})")));
                        }
                        let deg: u32 = bt[2].parse().map_err(|_| parse_err(file, *bl, "degree must be a non-negative integer"))?;
                        let twisted = match bt.get(3) {
                            None => false,
                            Some(&"twisted") => true,
                            Some(&"untwisted") => false,
                            Some(t) => return Err(parse_err(file, *bl, format!("unknown basis flag '{t}'"))),
                        };
                        basis.push(BasisElem { name: bt[1].to_string(), deg, twisted });
                    }
                }
                "pairing" if toks.len() == 1 => section = "pairing",
                "classical" if toks.len() == 1 => section = "classical",
                "end" => {
                    ended = true;
                    break;
                }
                _ => match section {
                    "pairing" => pairing_lines.push((ln, l.clone())),
                    "classical" => classical_lines.push((ln, l.clone())),
                    _ => return Err(parse_err(file, ln, format!("unexpected line '{l}'"))),
                },
            }
        }
        if !ended {
            return Err(parse_err(file, lines.last().map_or(0, |x| x.0), "missing 'end'"));
        }
        let name = name.ok_or_else(|| parse_err(file, 1, "missing 'ring <name>'"))?;
        let dim_c = dim_c.ok_or_else(|| parse_err(file, 1, "missing dimc"))?;
        let (novikov, denom) = novikov.unwrap_or((Vec::new(), 1));
        let c1_declared = c1.is_some();
        let c1 = c1.unwrap_or_else(|| vec![BigRational::zero(); novikov.len()]);
        if c1.len() != novikov.len() {
            return Err(Error::Ring(format!("c1 has {} entries but there are {} Novikov variables", c1.len(), novikov.len())));
        }
        validate_decls(&consts)?;
        let n = basis.len();
        if n == 0 {
            return Err(Error::Ring("empty basis".into()));
        }
        let mut pairing = linalg::zeros(n, n);
        let mut pairing_set = vec![vec![false; n]; n];
        for (ln, l) in &pairing_lines {
            let mut parts = l.splitn(3, char::is_whitespace);
            let i: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(file, *ln, "bad pairing row"))?;
            let j: usize = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(|| parse_err(file, *ln, "bad pairing column"))?;
            let e = parts.next().ok_or_else(|| parse_err(file, *ln, "missing pairing value"))?;
            if i >= n || j >= n {
                return Err(parse_err(file, *ln, "pairing index out of range"));
            }
            let v = parse_expr(e, &consts).map_err(|er| parse_err(file, *ln, er.to_string()))?;
            let vt = v.scale_int(sign(basis[i].deg, basis[j].deg));
            for (a, b, x) in [(i, j, v.clone()), (j, i, vt)] {
                if pairing_set[a][b] && pairing[a][b] != x {
                    return Err(parse_err(file, *ln, format!("conflicting pairing entry ({a}, {b})")));
                }
                pairing[a][b] = x;
                pairing_set[a][b] = true;
            }
        }
        let mut classical = vec![vec![vec![FieldElem::zero(); n]; n]; n];
        let mut classical_set = vec![vec![false; n]; n];
        for (ln, l) in &classical_lines {
            let (head, tail) = l.split_once(':').ok_or_else(|| parse_err(file, *ln, "expected '<i> <j> : <k>:<expr> ...'"))?;
            let ht: Vec<&str> = head.split_whitespace().collect();
            if ht.len() != 2 {
                return Err(parse_err(file, *ln, "expected two indices before ':'"));
            }
            let i: usize = ht[0].parse().map_err(|_| parse_err(file, *ln, "bad index"))?;
            let j: usize = ht[1].parse().map_err(|_| parse_err(file, *ln, "bad index"))?;
            if i >= n || j >= n {
                return Err(parse_err(file, *ln, "classical index out of range"));
            }
            let mut v = vec![FieldElem::zero(); n];
            for t in tail.split_whitespace() {
                let (k, e) = t.split_once(':').ok_or_else(|| parse_err(file, *ln, format!("bad term '{t}'")))?;
                let k: usize = k.parse().map_err(|_| parse_err(file, *ln, "bad target index"))?;
                if k >= n {
                    return Err(parse_err(file, *ln, "classical target index out of range"));
                }
                let x = parse_expr(e, &consts).map_err(|er| parse_err(file, *ln, er.to_string()))?;
                v[k] = &v[k] + &x;
            }
            let s = sign(basis[i].deg, basis[j].deg);
            let vt: Vec<FieldElem> = v.iter().map(|x| x.scale_int(s)).collect();
            for (a, b, x) in [(i, j, v.clone()), (j, i, vt)] {
                if classical_set[a][b] && classical[a][b] != x {
                    return Err(parse_err(file, *ln, format!("conflicting classical entry ({a}, {b})")));
                }
                classical[a][b] = x;
                classical_set[a][b] = true;
            }
        }
        for x in 0..n {
            let e = {
                let mut e = vec![FieldElem::zero(); n];
                e[x] = FieldElem::one();
                e
            };
            for (a, b) in [(0, x), (x, 0)] {
                if classical_set[a][b] && classical[a][b] != e {
                    return Err(Error::Ring(format!("unit axiom fails: 1 ∪ φ_{x} ≠ φ_{x}")));
                }
                classical[a][b] = e.clone();
            }
        }
        let mut ring = Ring::build(name, dim_c, consts, novikov, denom, c1, basis, pairing, classical)?;
        ring.c1_declared = c1_declared;
        Ok(ring)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn build(
        name: String,
        dim_c: u32,
        consts: Vec<ConstDecl>,
        novikov: Vec<String>,
        denom: i64,
        c1: Vec<BigRational>,
        basis: Vec<BasisElem>,
        pairing: Mat,
        classical: Vec<Vec<Vec<FieldElem>>>,
    ) -> Result<Ring> {
        let n = basis.len();
        if basis[0].deg != 0 || basis[0].name != "1" || basis[0].twisted {
            return Err(Error::Ring("basis index 0 must be the untwisted class '1' of degree 0".into()));
        }
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].iter().any(|c| c.name == b.name) {
                return Err(Error::Ring(format!("duplicate basis name '{}'", b.name)));
            }
            if b.deg > 2 * dim_c {
                return Err(Error::Ring(format!("degree of '{}' exceeds 2·dimc", b.name)));
            }
        }
        for i in 1..=novikov.len() {
            if i >= n || basis[i].deg != 2 || basis[i].twisted {
                return Err(Error::Ring(format!(
                    "basis index {i} must be an untwisted degree-2 class dual to Novikov variable {}",
                    novikov.get(i - 1).map(String::as_str).unwrap_or("?")
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !pairing[a][b].is_zero() && basis[a].deg + basis[b].deg != 2 * dim_c {
                    return Err(Error::Ring(format!(
                        "degree mismatch: pairing({a},{b}) ≠ 0 but {} + {} ≠ {}",
                        basis[a].deg,
                        basis[b].deg,
                        2 * dim_c
                    )));
                }
            }
        }
        let dual = linalg::invert(&pairing).ok_or_else(|| Error::Ring("degenerate pairing".into()))?;
        let ring = Ring { name, dim_c, consts, novikov, denom, c1, c1_declared: true, basis, pairing, classical, dual };
        ring.check_classical()?;
        Ok(ring)
    }

    fn check_classical(&self) -> Result<()> {
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                for (c, x) in self.classical[a][b].iter().enumerate() {
                    if !x.is_zero() && self.deg(c) != self.deg(a) + self.deg(b) {
                        return Err(Error::Ring(format!("classical product not graded: φ_{a} ∪ φ_{b} has a φ_{c} term")));
                    }
                }
                let s = sign(self.deg(a), self.deg(b));
                for c in 0..n {
                    if self.classical[a][b][c] != self.classical[b][a][c].scale_int(s) {
                        return Err(Error::Ring(format!("classical product not supercommutative at ({a}, {b})")));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = &self.classical[a][b];
                for c in 0..n {
                    let left = self.cup(ab, &self.unit_vec(c));
                    let right = self.cup(&self.unit_vec(a), &self.classical[b][c]);
                    if left != right {
                        return Err(Error::Ring(format!("non-associative classical product at (φ_{a} ∪ φ_{b}) ∪ φ_{c}")));
                    }
                    let f1 = self.pair(ab, &self.unit_vec(c));
                    let f2 = self.pair(&self.unit_vec(a), &self.classical[b][c]);
                    if f1 != f2 {
                        return Err(Error::Ring(format!("non-Frobenius classical product: (φ_{a}∪φ_{b}, φ_{c}) ≠ (φ_{a}, φ_{b}∪φ_{c})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The data relating an orbifold X to a crepant resolution Y.
#[derive(Clone, Debug)]
pub struct ResolutionMap {
    pub x_name: String,
    pub y_name: String,
    pub s: usize,
    pub r: usize,
}

impl ResolutionMap {
    pub fn parse(text: &str, file: &str) -> Result<ResolutionMap> {
        let lines = content_lines(text);
        let (ln, head) = lines.first().ok_or_else(|| parse_err(file, 1, "empty resmap file"))?;
        let toks: Vec<&str> = head.split_whitespace().collect();
        if toks.first() != Some(&"resmap") {
            return Err(parse_err(file, *ln, "expected 'resmap X=<ring> Y=<ring> s=<s> r=<r>'"));
        }
        let mut x = None;
        let mut y = None;
        let mut s = None;
        let mut r = None;
        for t in &toks[1..] {
            match t.split_once('=') {
                Some(("X", v)) => x = Some(v.to_string()),
                Some(("Y", v)) => y = Some(v.to_string()),
                Some(("s", v)) => s = v.parse().ok(),
                Some(("r", v)) => r = v.parse().ok(),
                _ => return Err(parse_err(file, *ln, format!("unknown field '{t}'"))),
            }
        }
        if lines.last().map(|l| l.1.as_str()) != Some("end") {
            return Err(parse_err(file, *ln, "missing 'end'"));
        }
        match (x, y, s, r) {
            (Some(x_name), Some(y_name), Some(s), Some(r)) if s <= r => Ok(ResolutionMap { x_name, y_name, s, r }),
            _ => Err(parse_err(file, *ln, "resmap needs X=, Y=, s=, r= with s ≤ r")),
        }
    }

    /// Cross-checks against both rings.
    pub fn validate(&self, x: &Ring, y: &Ring) -> Result<()> {
        if x.name != self.x_name || y.name != self.y_name {
            return Err(Error::Ring(format!(
                "resmap names ({}, {}) do not match rings ({}, {})",
                self.x_name, self.y_name, x.name, y.name
            )));
        }
        if x.novikov.len() != self.s || y.novikov.len() != self.r {
            return Err(Error::Ring(format!(
                "resmap expects {} Novikov variables on X and {} on Y, found {} and {}",
                self.s,
                self.r,
                x.novikov.len(),
                y.novikov.len()
            )));
        }
        if x.n() != y.n() || x.dim_c != y.dim_c {
            return Err(Error::Ring("X and Y must have equal rank and dimension".into()));
        }
        for i in 1..=self.r {
            if i >= x.n() || x.deg(i) != 2 || y.deg(i) != 2 {
                return Err(Error::Ring(format!("basis index {i} must have degree 2 on both sides")));
            }
        }
        Ok(())
    }

    /// Exceptional Novikov variables of Y (0-based).
    pub fn exceptional(&self) -> std::ops::Range<usize> {
        self.s..self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: &str = "ring P1\ndimc 1\nnovikov 1 Q denom 1\nc1 2\nbasis 2\n0 1 0\n1 h 2\npairing\n0 1 1\nclassical\nend\n";

    #[test]
    fn p1_loads() {
        let r = Ring::parse(P1, "p1.ring").unwrap();
        assert_eq!(r.n(), 2);
        assert_eq!(r.dual[0], vec![FieldElem::zero(), FieldElem::one()]);
        assert_eq!(r.dual[1], vec![FieldElem::one(), FieldElem::zero()]);
        assert!(r.classical_product(1, 1).unwrap().iter().all(|x| x.is_zero()));
        assert_eq!(r.classical_product(0, 1).unwrap(), &r.unit_vec(1)[..]);
        assert!(r.classical_product(2, 0).is_err());
    }

    #[test]
    fn degenerate_pairing_rejected() {
        let t = P1.replace("0 1 1\n", "");
        let e = Ring::parse(&t, "x").unwrap_err();
        assert!(e.to_string().contains("degenerate pairing"), "{e}");
    }

    #[test]
    fn degree_mismatch_rejected() {
        let t = P1.replace("0 1 1\n", "0 1 1\n0 0 1\n");
        let e = Ring::parse(&t, "x").unwrap_err();
        assert!(e.to_string().contains("degree mismatch"), "{e}");
    }

    #[test]
    fn point_and_identity_pairing() {
        let pt = Ring::parse("ring pt\ndimc 0\nbasis 1\n0 1 0\npairing\n0 0 1\nend\n", "pt").unwrap();
        assert_eq!(pt.dual, vec![vec![FieldElem::one()]]);
        let t = "ring T\ndimc 1\nbasis 4\n0 1 0\n1 a 1\n2 b 1\n3 p 2\npairing\n0 3 1\n1 2 1\nclassical\n1 2 : 3:1\nend\n";
        let r = Ring::parse(t, "t").unwrap();
        assert_eq!(r.pairing[2][1], FieldElem::from_int(-1));
        assert_eq!(r.classical[2][1][3], FieldElem::from_int(-1));
    }

    #[test]
    fn non_frobenius_rejected() {
        let t = "ring B\ndimc 2\nbasis 3\n0 1 0\n1 a 2\n2 p 4\npairing\n0 2 1\n1 1 1\nclassical\n1 1 : 2:2\nend\n";
        let e = Ring::parse(t, "b").unwrap_err();
        assert!(e.to_string().contains("Frobenius"), "{e}");
    }
}
