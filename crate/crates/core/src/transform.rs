//! Laurent-polynomial matrices U: H_X → H_Y, the conditions on them, Birkhoff
//! factorization and gerbe shifts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::cohring::{content_lines, Ring};
use crate::cohring::ResolutionMap;
use crate::error::{parse_err, Error, Result};
use crate::exactfield::{parse_expr, ConstDecl, FieldElem, FieldError};
use crate::linalg::{self, Mat};
use crate::report::{Report, Status};

/// Laurent polynomial in z: exponent → coefficient, zero coefficients never stored.
pub type LPoly = BTreeMap<i64, FieldElem>;

fn lp_add(p: &mut LPoly, k: i64, c: &FieldElem) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(k).or_insert_with(FieldElem::zero);
    *e = &*e + c;
    if e.is_zero() {
        p.remove(&k);
    }
}

fn term_string(c: &FieldElem, k: i64) -> String {
    let cs = c.to_string();
    if k == 0 {
        return cs;
    }
    let simple = !cs.chars().skip(1).any(|ch| ch == ' ' || ch == '+' || ch == '-' || ch == '/');
    let body = if simple { cs } else { format!("({cs})") };
    if k == 1 {
        format!("{body}*z")
    } else {
        format!("{body}*z^{k}")
    }
}

pub fn render_lpoly(p: &LPoly) -> String {
    if p.is_empty() {
        return "0".into();
    }
    p.iter().rev().map(|(k, c)| term_string(c, *k)).collect::<Vec<_>>().join(" + ")
}

/// Renders a coefficient vector as a combination of basis names.
pub fn render_vec(ring: &Ring, v: &[FieldElem]) -> String {
    let parts: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let name = &ring.basis[i].name;
            if c.is_one() {
                name.clone()
            } else {
                let cs = c.to_string();
                if cs.contains(' ') {
                    format!("({cs})*{name}")
                } else {
                    format!("{cs}*{name}")
                }
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Square matrix with rows indexed by the basis of `y` and columns by the basis of `x`.
#[derive(Clone, Debug)]
pub struct LaurentMatrix {
    pub x: Arc<Ring>,
    pub y: Arc<Ring>,
    entries: Vec<Vec<LPoly>>,
}

impl PartialEq for LaurentMatrix {
    fn eq(&self, other: &LaurentMatrix) -> bool {
        self.entries == other.entries
    }
}

impl LaurentMatrix {
    pub fn zero(x: Arc<Ring>, y: Arc<Ring>) -> LaurentMatrix {
        let n = x.n();
        LaurentMatrix { x, y, entries: vec![vec![LPoly::new(); n]; n] }
    }

    pub fn identity(x: Arc<Ring>, y: Arc<Ring>) -> LaurentMatrix {
        let mut m = LaurentMatrix::zero(x, y);
        for i in 0..m.size() {
            m.add_term(i, i, 0, &FieldElem::one());
        }
        m
    }

    pub fn constant(x: Arc<Ring>, y: Arc<Ring>, a: &Mat) -> LaurentMatrix {
        let mut m = LaurentMatrix::zero(x, y);
        for (i, row) in a.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                m.add_term(i, j, 0, c);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LPoly {
        &self.entries[i][j]
    }

    pub fn add_term(&mut self, i: usize, j: usize, k: i64, c: &FieldElem) {
        lp_add(&mut self.entries[i][j], k, c);
    }

    pub fn with_rings(&self, x: Arc<Ring>, y: Arc<Ring>) -> LaurentMatrix {
        LaurentMatrix { x, y, entries: self.entries.clone() }
    }

    /// Coefficient matrix of z^k.
    pub fn coeff(&self, k: i64) -> Mat {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.get(&k).cloned().unwrap_or_else(FieldElem::zero)).collect())
            .collect()
    }

    pub fn column_coeff(&self, j: usize, k: i64) -> Vec<FieldElem> {
        self.entries.iter().map(|row| row[j].get(&k).cloned().unwrap_or_else(FieldElem::zero)).collect()
    }

    pub fn z_range(&self) -> Option<(i64, i64)> {
        let mut lo = None;
        let mut hi = None;
        for p in self.entries.iter().flatten() {
            if let (Some((a, _)), Some((b, _))) = (p.first_key_value(), p.last_key_value()) {
                lo = Some(lo.map_or(*a, |l: i64| l.min(*a)));
                hi = Some(hi.map_or(*b, |h: i64| h.max(*b)));
            }
        }
        lo.zip(hi)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_empty())
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, p)| {
                if i == j {
                    p.len() == 1 && p.get(&0).is_some_and(|c| c.is_one())
                } else {
                    p.is_empty()
                }
            })
        })
    }

    /// `self ∘ rhs`; source ring of `rhs`, target ring of `self`.
    pub fn mul(&self, rhs: &LaurentMatrix) -> LaurentMatrix {
        let n = self.size();
        let mut out = LaurentMatrix::zero(rhs.x.clone(), self.y.clone());
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i][k];
                if a.is_empty() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k][j];
                    for (ea, ca) in a {
                        for (eb, cb) in b {
                            lp_add(&mut out.entries[i][j], ea + eb, &(ca * cb));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &LaurentMatrix) -> LaurentMatrix {
        let mut out = self.clone();
        for (i, row) in rhs.entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                for (k, c) in p {
                    out.add_term(i, j, *k, c);
                }
            }
        }
        out
    }

    pub fn neg(&self) -> LaurentMatrix {
        let mut out = self.clone();
        for p in out.entries.iter_mut().flatten() {
            for c in p.values_mut() {
                *c = -&*c;
            }
        }
        out
    }

    pub fn sub(&self, rhs: &LaurentMatrix) -> LaurentMatrix {
        self.add(&rhs.neg())
    }

    /// Transpose with the roles of the rings exchanged.
    pub fn transpose(&self) -> LaurentMatrix {
        let n = self.size();
        let mut out = LaurentMatrix::zero(self.y.clone(), self.x.clone());
        for i in 0..n {
            for j in 0..n {
                out.entries[j][i] = self.entries[i][j].clone();
            }
        }
        out
    }

    /// z ↦ −z.
    pub fn flip_z(&self) -> LaurentMatrix {
        let mut out = self.clone();
        for p in out.entries.iter_mut().flatten() {
            for (k, c) in p.iter_mut() {
                if k.rem_euclid(2) == 1 {
                    *c = -&*c;
                }
            }
        }
        out
    }

    /// Multiplies by z^k.
    pub fn shift_z(&self, k: i64) -> LaurentMatrix {
        let mut out = self.clone();
        for p in out.entries.iter_mut().flatten() {
            *p = p.iter().map(|(e, c)| (e + k, c.clone())).collect();
        }
        out
    }

    /// First entry and exponent where two matrices differ.
    pub fn first_difference(&self, other: &LaurentMatrix) -> Option<(usize, usize, i64, FieldElem, FieldElem)> {
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                let a = &self.entries[i][j];
                let b = &other.entries[i][j];
                if a == b {
                    continue;
                }
                let mut ks: Vec<i64> = a.keys().chain(b.keys()).copied().collect();
                ks.sort_unstable();
                ks.dedup();
                for k in ks.into_iter().rev() {
                    let ca = a.get(&k).cloned().unwrap_or_else(FieldElem::zero);
                    let cb = b.get(&k).cloned().unwrap_or_else(FieldElem::zero);
                    if ca != cb {
                        return Some((i, j, k, ca, cb));
                    }
                }
            }
        }
        None
    }

    /// One `(i,j) poly` line per nonzero entry.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if !p.is_empty() {
                    let _ = writeln!(s, "  ({i},{j}) {}", render_lpoly(p));
                }
            }
        }
        if s.is_empty() {
            s.push_str("  0\n");
        }
        s
    }

    /// umat text that loads back to the same matrix.
    pub fn to_umat_string(&self, consts: &[ConstDecl]) -> String {
        let mut s = format!("umat n={} ringX={} ringY={}", self.size(), self.x.name, self.y.name);
        if !consts.is_empty() {
            s.push_str(" consts");
            for c in consts {
                match c.kind {
                    crate::exactfield::ConstKind::Transcendental => {
                        let _ = write!(s, " {}", c.name);
                    }
                    crate::exactfield::ConstKind::RootOfUnity(n) => {
                        let _ = write!(s, " {}:root{n}", c.name);
                    }
                }
            }
        }
        s.push('\n');
        for (i, row) in self.entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if !p.is_empty() {
                    let terms: Vec<String> = p.iter().map(|(k, c)| format!("({c})*z^{k}")).collect();
                    let _ = writeln!(s, "entry {i} {j} : {}", terms.join(" + "));
                }
            }
        }
        s.push_str("end\n");
        s
    }
}

/// Cup-by-basis-element matrix: column b holds φ_i ∪ φ_b.
pub fn cup_matrix(ring: &Ring, v: &[FieldElem]) -> Mat {
    let n = ring.n();
    let mut m = linalg::zeros(n, n);
    for b in 0..n {
        let col = ring.cup(v, &ring.unit_vec(b));
        for (c, x) in col.into_iter().enumerate() {
            m[c][b] = x;
        }
    }
    m
}

/// e^{sign·ρ/z} acting on H_Y, as a finite Laurent matrix.
pub fn cup_exponential(ring: Arc<Ring>, rho: &[FieldElem], sign: i64) -> Result<LaurentMatrix> {
    let n = ring.n();
    let c = cup_matrix(&ring, rho);
    let mut out = LaurentMatrix::identity(ring.clone(), ring.clone());
    let mut power = linalg::identity(n);
    let mut fact = FieldElem::one();
    for k in 1..=(n as i64 + 1) {
        power = linalg::mul(&power, &c);
        if power.iter().flatten().all(|x| x.is_zero()) {
            return Ok(out);
        }
        fact = fact.scale_int(k);
        let f = FieldElem::from_int(sign.pow(k as u32)).checked_div(&fact).expect("nonzero factorial");
        for (i, row) in power.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out.add_term(i, j, -k, &(x * &f));
            }
        }
    }
    Err(Error::Invalid("cup product by rho is not nilpotent".into()))
}

fn merge_decls(into: &mut Vec<ConstDecl>, more: &[ConstDecl]) -> Result<()> {
    for d in more {
        match into.iter().find(|e| e.name == d.name) {
            Some(e) if e.kind != d.kind => {
                return Err(Error::Ring(format!("constant '{}' declared with conflicting kinds", d.name)))
            }
            Some(_) => {}
            None => into.push(d.clone()),
        }
    }
    Ok(())
}

/// Constants usable in a umat file over the given rings (header constants plus both rings').
pub fn umat_decls(header: &[ConstDecl], x: &Ring, y: &Ring) -> Result<Vec<ConstDecl>> {
    let mut decls = Vec::new();
    merge_decls(&mut decls, header)?;
    merge_decls(&mut decls, &x.consts)?;
    merge_decls(&mut decls, &y.consts)?;
    Ok(decls)
}

pub fn load_matrix(text: &str, file: &str, x: Arc<Ring>, y: Arc<Ring>) -> Result<LaurentMatrix> {
    let lines = content_lines(text);
    let (hl, head) = lines.first().ok_or_else(|| parse_err(file, 1, "empty umat file"))?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.first() != Some(&"umat") {
        return Err(parse_err(file, *hl, "expected 'umat n=<N+1> ringX=<name> ringY=<name> [consts ...]'"));
    }
    let mut n = None;
    let mut rx = None;
    let mut ry = None;
    let mut header = Vec::new();
    let mut in_consts = false;
    for t in &toks[1..] {
        if in_consts {
            header.push(ConstDecl::parse(t).map_err(|e| parse_err(file, *hl, e.to_string()))?);
            continue;
        }
        match t.split_once('=') {
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("ringX", v)) => rx = Some(v),
            Some(("ringY", v)) => ry = Some(v),
            None if *t == "consts" => in_consts = true,
            _ => return Err(parse_err(file, *hl, format!("unknown header field '{t}'"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(file, *hl, "missing n="))?;
    if rx != Some(x.name.as_str()) || ry != Some(y.name.as_str()) {
        return Err(parse_err(
            file,
            *hl,
            format!("header names rings ({}, {}) but loaded rings are ({}, {})", rx.unwrap_or("?"), ry.unwrap_or("?"), x.name, y.name),
        ));
    }
    if n != x.n() || n != y.n() {
        return Err(parse_err(file, *hl, format!("size mismatch: n={n}, ring ranks {} and {}", x.n(), y.n())));
    }
    if header.iter().any(|d| d.name == "z") {
        return Err(parse_err(file, *hl, "'z' is reserved for the loop variable"));
    }
    let mut decls = umat_decls(&header, &x, &y)?;
    decls.push(ConstDecl::transcendental("z"));
    let novikov: Vec<&String> = x.novikov.iter().chain(y.novikov.iter()).collect();
    let mut m = LaurentMatrix::zero(x.clone(), y.clone());
    let mut seen = vec![vec![false; n]; n];
    let mut ended = false;
    for (ln, l) in &lines[1..] {
        if l == "end" {
            ended = true;
            break;
        }
        let rest = l.strip_prefix("entry").ok_or_else(|| parse_err(file, *ln, "expected 'entry <i> <j> : <expr>'"))?;
        let (idx, expr) = rest.split_once(':').ok_or_else(|| parse_err(file, *ln, "missing ':'"))?;
        let it: Vec<&str> = idx.split_whitespace().collect();
        let (i, j) = match it.as_slice() {
            [a, b] => (
                a.parse::<usize>().map_err(|_| parse_err(file, *ln, "bad row index"))?,
                b.parse::<usize>().map_err(|_| parse_err(file, *ln, "bad column index"))?,
            ),
            _ => return Err(parse_err(file, *ln, "expected two indices")),
        };
        if i >= n || j >= n {
            return Err(parse_err(file, *ln, format!("entry ({i}, {j}) out of range")));
        }
        if seen[i][j] {
            return Err(parse_err(file, *ln, format!("duplicate entry ({i}, {j})")));
        }
        seen[i][j] = true;
        let v = parse_expr(expr, &decls).map_err(|e| match e {
            FieldError::Undeclared(name) if novikov.iter().any(|q| **q == name) => {
                parse_err(file, *ln, format!("Novikov variable '{name}' in entry ({i}, {j}); U must not depend on Novikov variables"))
            }
            e => parse_err(file, *ln, e.to_string()),
        })?;
        let parts = v
            .split_generator("z")
            .ok_or_else(|| parse_err(file, *ln, format!("entry ({i}, {j}) is not a Laurent polynomial in z")))?;
        for (k, c) in parts {
            m.add_term(i, j, k, &c);
        }
    }
    if !ended {
        return Err(parse_err(file, lines.last().map_or(1, |l| l.0), "missing 'end'"));
    }
    Ok(m)
}

/// Required z-power of entry (i, j): (deg φ_j^X − deg φ_i^Y)/2, or `None` when odd.
fn expected_power(u: &LaurentMatrix, i: usize, j: usize) -> Option<i64> {
    let d = u.x.deg(j) as i64 - u.y.deg(i) as i64;
    if d % 2 == 0 {
        Some(d / 2)
    } else {
        None
    }
}

pub fn degree_violation(u: &LaurentMatrix) -> Option<(usize, usize, i64)> {
    let n = u.size();
    for i in 0..n {
        for j in 0..n {
            let want = expected_power(u, i, j);
            if let Some(k) = u.entry(i, j).keys().find(|k| Some(**k) != want) {
                return Some((i, j, *k));
            }
        }
    }
    None
}

/// U(−z)ᵀ G_Y U(z) − G_X; zero iff Ω_Y(Uf, Ug) = Ω_X(f, g) for all f, g.
pub fn symplectic_residual(u: &LaurentMatrix) -> LaurentMatrix {
    let gy = LaurentMatrix::constant(u.y.clone(), u.y.clone(), &u.y.pairing);
    let gx = LaurentMatrix::constant(u.x.clone(), u.x.clone(), &u.x.pairing);
    u.flip_z().transpose().mul(&gy).mul(u).sub(&gx)
}

fn symplectic_line(u: &LaurentMatrix, rep: &mut Report) {
    let res = symplectic_residual(u);
    let n = res.size();
    let mut soft = None;
    for i in 0..n {
        for j in 0..n {
            for (k, c) in res.entry(i, j) {
                if c.is_transcendental_free() {
                    rep.fail("symplectic", format!("Omega residual at (phi_{i}, phi_{j}) coefficient z^{k}: {c}"));
                    return;
                }
                if soft.is_none() {
                    soft = Some((i, j, *k, c.clone()));
                }
            }
        }
    }
    match soft {
        None => rep.pass("symplectic", "U(-z)^T G_Y U(z) = G_X"),
        Some((i, j, k, c)) => rep.warn(
            "symplectic",
            format!(
                "residual at (phi_{i}, phi_{j}) coefficient z^{k} is {c}; it involves free constants, so vanishing depends on relations among them"
            ),
        ),
    }
}

fn condition_a(u: &LaurentMatrix) -> std::result::Result<(), String> {
    let col = (0..u.size()).map(|i| (i, u.entry(i, 0)));
    for (i, p) in col {
        for (k, c) in p {
            if *k > 0 {
                return Err(format!("U(1) has z^{k} term {c} on {}", u.y.basis[i].name));
            }
            if *k == 0 && (i == 0) != c.is_one() {
                return Err(format!("U(1) constant term on {} is {c}", u.y.basis[i].name));
            }
        }
        if i == 0 && !p.contains_key(&0) {
            return Err("U(1) has no constant unit term".into());
        }
    }
    Ok(())
}

/// Checks U ∘ (φ_i ∪) = (π*φ_i ∪) ∘ U for the untwisted divisors i = 1..=s.
fn condition_b(u: &LaurentMatrix, s: usize) -> std::result::Result<(), String> {
    for i in 1..=s {
        let cx = LaurentMatrix::constant(u.x.clone(), u.x.clone(), &cup_matrix(&u.x, &u.x.unit_vec(i)));
        let cy = LaurentMatrix::constant(u.y.clone(), u.y.clone(), &cup_matrix(&u.y, &u.y.unit_vec(i)));
        let lhs = u.mul(&cx);
        let rhs = cy.mul(u);
        if let Some((r, c, k, a, b)) = lhs.first_difference(&rhs) {
            return Err(format!(
                "divisor {}: (U o cup) entry ({r},{c}) z^{k} is {a}, (cup o U) gives {b}",
                u.x.basis[i].name
            ));
        }
    }
    Ok(())
}

fn is_diagonal(a: &Mat) -> bool {
    a.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, x)| i == j || x.is_zero()))
}

pub fn check_conditions(u: &LaurentMatrix, resmap: Option<&ResolutionMap>) -> Report {
    let mut rep = Report::new("umat-check");
    match degree_violation(u) {
        None => rep.pass("degree", "every entry (i,j) is homogeneous of z-degree (deg phi_j^X - deg phi_i^Y)/2"),
        Some((i, j, k)) => rep.fail(
            "degree",
            format!(
                "entry ({i},{j}) has a z^{k} term; degrees {} and {} require {}",
                u.x.deg(j),
                u.y.deg(i),
                expected_power(u, i, j).map_or("no term (odd difference)".to_string(), |e| format!("z^{e}"))
            ),
        ),
    }
    symplectic_line(u, &mut rep);
    match condition_a(u) {
        Ok(()) => rep.pass("(a)", "U(1) = 1 + O(z^-1)"),
        Err(e) => rep.fail("(a)", e),
    }
    match resmap {
        None => rep.warn("(b)", "skipped: no resolution map supplied"),
        Some(rm) if rm.s >= u.size() => rep.fail("(b)", format!("resmap s={} exceeds the basis", rm.s)),
        Some(rm) => match condition_b(u, rm.s) {
            Ok(()) => rep.pass("(b)", format!("U o (rho cup) = (pi* rho cup) o U for {} divisor(s)", rm.s)),
            Err(e) => rep.fail("(b)", e),
        },
    }
    match birkhoff(u) {
        Ok(b) => {
            rep.pass("(c)", "Birkhoff factorization exists with invertible U0");
            if is_diagonal(&b.zero) {
                rep.pass("U0-shape", "U0 is diagonal");
            } else {
                rep.warn("U0-shape", "U0 is constant and invertible but not diagonal in these bases");
            }
        }
        Err(e) => rep.fail("(c)", e.to_string()),
    }
    let range = u.z_range().map_or("empty".to_string(), |(a, b)| format!("[{a}, {b}]"));
    rep.pass("(d)", format!("entries are Novikov-free Laurent polynomials in z, z-support {range}"));
    for j in 0..u.size() {
        if u.x.deg(j) > 2 {
            continue;
        }
        let name = &u.x.basis[j].name;
        let top = (0..u.size()).filter_map(|i| u.entry(i, j).keys().next_back().copied()).max();
        let lead = render_vec(&u.y, &u.column_coeff(j, 0));
        let detail = format!("U({name}) = {lead} + O(z^-1)");
        match top {
            Some(k) if k > 0 => rep.warn(format!("lowdeg-{name}"), format!("U({name}) has a z^{k} term")),
            _ => rep.pass(format!("lowdeg-{name}"), detail),
        }
    }
    rep
}

/// c read off U(1) = 1 − c z^{-1} + O(z^{-2}).
#[derive(Clone, Debug)]
pub struct CExtraction {
    pub c: Vec<FieldElem>,
    pub verdict: Status,
    pub detail: String,
}

impl CExtraction {
    /// Rational phases p_i with c_i = p_i ζ₄, so that e^{c_i} stands for exp(2πi p_i).
    pub fn phases(&self) -> Option<Vec<num_rational::BigRational>> {
        self.c.iter().map(|x| x.as_cyc().and_then(|c| c.imaginary_rational())).collect()
    }
}

pub fn extract_c(u: &LaurentMatrix) -> Result<CExtraction> {
    condition_a(u).map_err(|e| Error::Precondition(format!("condition (a) fails: {e}")))?;
    let c: Vec<FieldElem> = u.column_coeff(0, -1).iter().map(|x| -x).collect();
    let bad = c.iter().enumerate().find(|(_, x)| x.as_cyc().and_then(|k| k.imaginary_rational()).is_none());
    let (verdict, detail) = match bad {
        None => (Status::Pass, format!("c = {} is a rational multiple of zeta_4 or zero", render_vec(&u.y, &c))),
        Some((i, x)) => (
            Status::Warn,
            format!("c_{i} = {x} is not a rational multiple of zeta_4; e^c is kept symbolic"),
        ),
    };
    Ok(CExtraction { c, verdict, detail })
}

pub fn gerbe_shift(u: &LaurentMatrix, rho: &[FieldElem]) -> Result<LaurentMatrix> {
    Ok(cup_exponential(u.y.clone(), rho, 1)?.mul(u))
}

/// U = U₋ U₀ U₊ with U₋ ∈ I + z⁻¹(...), U₀ constant, U₊ ∈ I + z(...).
#[derive(Clone, Debug)]
pub struct Birkhoff {
    pub minus: LaurentMatrix,
    pub zero: Mat,
    pub plus: LaurentMatrix,
    pub plus_inv: LaurentMatrix,
}

pub fn birkhoff(u: &LaurentMatrix) -> Result<Birkhoff> {
    let order: Vec<usize> = (0..u.size()).collect();
    birkhoff_with_order(u, &order)
}

/// Column j of P = U₊⁻¹ of degree ≤ h solving [z^p](U·P)_j = 0 for p ≥ 1, with
/// unknowns eliminated in the order given by `order`.
fn plus_inverse_column(u: &LaurentMatrix, j: usize, h: i64, hi: i64, order: &[usize]) -> Option<Vec<Vec<FieldElem>>> {
    let n = u.size();
    let coeffs: Vec<Mat> = (0..=h + hi).map(|q| u.coeff(q)).collect();
    let neg: Vec<Mat> = (1..=h).map(|q| u.coeff(-q)).collect();
    let at = |q: i64| -> &Mat { if q >= 0 { &coeffs[q as usize] } else { &neg[(-q - 1) as usize] } };
    let var = |i: i64, pos: usize| (i - 1) as usize * n + pos;
    let mut a = linalg::zeros(n * (h + hi) as usize, n * h as usize);
    let mut b = vec![FieldElem::zero(); n * (h + hi) as usize];
    for p in 1..=h + hi {
        for r in 0..n {
            let row = (p - 1) as usize * n + r;
            b[row] = -&at(p)[r][j];
            for i in 1..=h {
                let c = at(p - i);
                for (pos, &m) in order.iter().enumerate() {
                    a[row][var(i, pos)] = c[r][m].clone();
                }
            }
        }
    }
    let x = linalg::solve(&a, &b)?;
    Some((1..=h).map(|i| {
        let mut col = vec![FieldElem::zero(); n];
        for (pos, &m) in order.iter().enumerate() {
            col[m] = x[var(i, pos)].clone();
        }
        col
    }).collect())
}

/// Solves for P = U₊⁻¹ = I + Σ A_i z^i column by column in `order` such that
/// U·P has no positive powers; P is unique when a factorization exists, so
/// the result does not depend on the order.
pub fn birkhoff_with_order(u: &LaurentMatrix, order: &[usize]) -> Result<Birkhoff> {
    let n = u.size();
    let mut seen = order.to_vec();
    seen.sort_unstable();
    if seen != (0..n).collect::<Vec<_>>() {
        return Err(Error::Invalid("column order must be a permutation".into()));
    }
    let hi = u.z_range().map_or(0, |r| r.1).max(0);
    let mut p = LaurentMatrix::identity(u.x.clone(), u.x.clone());
    if hi > 0 {
        // U₊ has degree ≤ hi and is unipotent, so its inverse has degree ≤ (n−1)·hi.
        let cap = hi * (n as i64 - 1).max(1);
        for &j in order {
            let mut h = hi;
            let cols = loop {
                if let Some(c) = plus_inverse_column(u, j, h, hi, order) {
                    break c;
                }
                if h >= cap {
                    return Err(Error::Invalid(format!(
                        "elimination stuck: positive powers in column {j} are not removed by any U+ of degree <= {cap}"
                    )));
                }
                h = (2 * h).min(cap);
            };
            for (i, col) in cols.iter().enumerate() {
                for (r, c) in col.iter().enumerate() {
                    if !c.is_zero() {
                        p.add_term(r, j, i as i64 + 1, c);
                    }
                }
            }
        }
    }
    let v = u.mul(&p);
    let zero = v.coeff(0);
    let zinv = linalg::invert(&zero).ok_or_else(|| Error::Invalid("U0 is singular".into()))?;
    let minus = v.mul(&LaurentMatrix::constant(u.y.clone(), u.y.clone(), &zinv)).with_rings(u.y.clone(), u.y.clone());
    let plus = invert_unipotent(&p)?;
    Ok(Birkhoff { minus, zero, plus, plus_inv: p })
}

/// Inverse of I + N with N nilpotent, by the terminating Neumann series.
fn invert_unipotent(p: &LaurentMatrix) -> Result<LaurentMatrix> {
    let id = LaurentMatrix::identity(p.x.clone(), p.y.clone());
    let minus_n = id.sub(p);
    let mut out = id.clone();
    let mut term = id;
    for _ in 0..=p.size() + 1 {
        term = term.mul(&minus_n);
        if term.is_zero() {
            return Ok(out);
        }
        out = out.add(&term);
    }
    Err(Error::Invalid("U+ is not polynomial: positive-power part is not nilpotent".into()))
}

pub fn reconstruct(b: &Birkhoff) -> LaurentMatrix {
    let y = b.minus.y.clone();
    let x = b.plus.x.clone();
    b.minus.mul(&LaurentMatrix::constant(x.clone(), y, &b.zero)).mul(&b.plus)
}

/// Certificate for A_i in U₊⁻¹ = I + Σ A_i z^i.
#[derive(Clone, Debug, PartialEq)]
pub struct NilCert {
    pub i: i64,
    /// Least k with A_i^k = 0.
    pub order: Option<usize>,
    /// Every nonzero (r, c) entry has deg φ_r = deg φ_c − 2i.
    pub lowers_degree: bool,
}

pub fn nilpotency_certificates(b: &Birkhoff) -> Vec<NilCert> {
    let ring = &b.plus_inv.x;
    let n = b.plus_inv.size();
    let hi = b.plus_inv.z_range().map_or(0, |r| r.1);
    let mut out = Vec::new();
    for i in 1..=hi {
        let a = b.plus_inv.coeff(i);
        if a.iter().flatten().all(|x| x.is_zero()) {
            continue;
        }
        let lowers_degree = a.iter().enumerate().all(|(r, row)| {
            row.iter()
                .enumerate()
                .all(|(c, x)| x.is_zero() || ring.deg(r) as i64 == ring.deg(c) as i64 - 2 * i)
        });
        let mut pw = a.clone();
        let mut order = None;
        for k in 2..=n + 1 {
            pw = linalg::mul(&pw, &a);
            if pw.iter().flatten().all(|x| x.is_zero()) {
                order = Some(k);
                break;
            }
        }
        out.push(NilCert { i, order, lowers_degree });
    }
    out
}

/// Verifies reconstruction and the nilpotency certificates.
pub fn birkhoff_report(u: &LaurentMatrix, b: &Birkhoff) -> Report {
    let mut rep = Report::new("birkhoff");
    let certs = nilpotency_certificates(b);
    let nil: Vec<String> = certs
        .iter()
        .map(|c| match c.order {
            Some(k) => format!("A{} nilpotent order {k}", c.i),
            None => format!("A{} not nilpotent", c.i),
        })
        .collect();
    let rec = reconstruct(b);
    match rec.first_difference(u) {
        None => {
            let tail = if nil.is_empty() { "U+ = I".to_string() } else { nil.join("; ") };
            rep.pass("reconstruction;", tail);
        }
        Some((i, j, k, a, c)) => rep.fail("reconstruction;", format!("entry ({i},{j}) z^{k}: U- U0 U+ gives {a}, U has {c}")),
    }
    for c in &certs {
        rep.check(c.order.is_some(), format!("A{}-nilpotent", c.i), nil_detail(c));
        rep.check(c.lowers_degree, format!("A{}-degree", c.i), format!("A{} lowers degree by {}", c.i, 2 * c.i));
    }
    if is_diagonal(&b.zero) {
        rep.pass("U0-shape", "U0 is diagonal");
    } else {
        rep.warn("U0-shape", "U0 is constant and invertible but not diagonal in these bases");
    }
    rep
}

fn nil_detail(c: &NilCert) -> String {
    match c.order {
        Some(k) => format!("A{}^{k} = 0", c.i),
        None => format!("A{} has no vanishing power up to the rank", c.i),
    }
}

/// (T₋, T₊) = (U₋, U₀ U₊ U₀⁻¹), both over ring Y.
pub fn assemble_t(b: &Birkhoff) -> Result<(LaurentMatrix, LaurentMatrix)> {
    let y = b.minus.y.clone();
    let x = b.plus.x.clone();
    let zinv = linalg::invert(&b.zero).ok_or_else(|| Error::Invalid("U0 is singular".into()))?;
    let u0 = LaurentMatrix::constant(x.clone(), y.clone(), &b.zero);
    let u0inv = LaurentMatrix::constant(y.clone(), x, &zinv);
    let tplus = u0.mul(&b.plus).mul(&u0inv);
    Ok((b.minus.clone(), tplus))
}

pub fn render_mat(a: &Mat) -> String {
    let mut s = String::new();
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                let _ = writeln!(s, "  ({i},{j}) {x}");
            }
        }
    }
    if s.is_empty() {
        s.push_str("  0\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const P1113_X: &str = include_str!("../data/p1113_f3.ring");
    pub(crate) const P1113_Y: &str = include_str!("../data/f3.ring");
    pub(crate) const P1113_U: &str = include_str!("../data/p1113_f3.umat");

    fn p1113() -> LaurentMatrix {
        let x = Arc::new(Ring::parse(P1113_X, "x.ring").unwrap());
        let y = Arc::new(Ring::parse(P1113_Y, "y.ring").unwrap());
        load_matrix(P1113_U, "u.umat", x, y).unwrap()
    }

    fn e(s: &str) -> FieldElem {
        parse_expr(s, &[ConstDecl::transcendental("g13"), ConstDecl::transcendental("g23"), ConstDecl::transcendental("pi"), ConstDecl::transcendental("sqrt3")]).unwrap()
    }

    #[test]
    fn loads_with_support() {
        let u = p1113();
        assert_eq!(u.z_range(), Some((-3, 1)));
    }

    #[test]
    fn novikov_entry_rejected() {
        let p1 = Arc::new(Ring::parse("ring P1\ndimc 1\nnovikov 1 Q denom 1\nc1 2\nbasis 2\n0 1 0\n1 h 2\npairing\n0 1 1\nclassical\nend\n", "p").unwrap());
        let err = load_matrix("umat n=2 ringX=P1 ringY=P1\nentry 0 0 : Q\nend\n", "u", p1.clone(), p1).unwrap_err();
        assert!(err.to_string().contains("Novikov variable 'Q'"), "{err}");
    }

    #[test]
    fn identity_conditions_pass() {
        let p1 = Arc::new(Ring::parse("ring P1\ndimc 1\nnovikov 1 Q denom 1\nc1 2\nbasis 2\n0 1 0\n1 h 2\npairing\n0 1 1\nclassical\nend\n", "p").unwrap());
        let u = load_matrix("umat n=2 ringX=P1 ringY=P1\nentry 0 0 : 1\nentry 1 1 : 1\nend\n", "u", p1.clone(), p1).unwrap();
        assert!(u.is_identity());
        let rm = ResolutionMap { x_name: "P1".into(), y_name: "P1".into(), s: 1, r: 1 };
        let rep = check_conditions(&u, Some(&rm));
        assert_eq!(rep.count(Status::Pass), rep.lines.len(), "{}", rep.render());
        let b = birkhoff(&u).unwrap();
        assert!(b.minus.is_identity() && b.plus.is_identity() && linalg::is_identity(&b.zero));
        let (tm, tp) = assemble_t(&b).unwrap();
        assert!(tm.is_identity() && tp.is_identity());
    }

    #[test]
    fn p1113_conditions() {
        let u = p1113();
        let rep = check_conditions(&u, None);
        assert_eq!(rep.status_of("degree"), Some(Status::Pass), "{}", rep.render());
        assert_eq!(rep.status_of("(a)"), Some(Status::Pass));
        assert_eq!(rep.status_of("(c)"), Some(Status::Pass));
        assert_eq!(rep.status_of("(d)"), Some(Status::Pass));
        assert_eq!(rep.status_of("symplectic"), Some(Status::Warn));
        let c = extract_c(&u).unwrap();
        assert!(c.c.iter().all(|x| x.is_zero()));
        assert_eq!(c.verdict, Status::Pass);
    }

    #[test]
    fn p1113_birkhoff() {
        let u = p1113();
        let b = birkhoff(&u).unwrap();
        let mut want = LaurentMatrix::identity(u.x.clone(), u.x.clone());
        want.add_term(5, 4, 1, &-&e("g23/g13"));
        assert_eq!(b.plus, want, "{}", b.plus.render());
        assert_eq!(reconstruct(&b), u);
        assert_eq!(b.zero[4][4], e("4*pi^2/(3*g13)"));
        assert_eq!(b.zero[3][5], e("2*sqrt3*pi/(3*g23)"));
        assert!(b.zero[5][3].is_one());
        let certs = nilpotency_certificates(&b);
        assert_eq!(certs, vec![NilCert { i: 1, order: Some(2), lowers_degree: true }]);
        let rep = birkhoff_report(&u, &b);
        assert!(rep.render().contains("PASS reconstruction; A1 nilpotent order 2"), "{}", rep.render());
        let rev: Vec<usize> = (0..6).rev().collect();
        let b2 = birkhoff_with_order(&u, &rev).unwrap();
        assert_eq!(b2.plus, b.plus);
        assert_eq!(b2.minus, b.minus);
        assert_eq!(b2.zero, b.zero);
    }

    #[test]
    fn degree_violation_named() {
        let mut u = p1113();
        u.add_term(2, 1, 1, &FieldElem::one());
        let rep = check_conditions(&u, None);
        assert_eq!(rep.status_of("degree"), Some(Status::Fail));
        assert!(rep.render().contains("entry (2,1)"));
    }

    #[test]
    fn gerbe_shift_and_extract() {
        let ring = Arc::new(
            Ring::parse("ring P1\ndimc 1\nconsts i:root4\nnovikov 1 Q denom 1\nc1 2\nbasis 2\n0 1 0\n1 h 2\npairing\n0 1 1\nclassical\nend\n", "p").unwrap(),
        );
        let c = vec![FieldElem::zero(), parse_expr("i/2", &ring.consts).unwrap()];
        let u = cup_exponential(ring.clone(), &c, -1).unwrap();
        let got = extract_c(&u).unwrap();
        assert_eq!(got.c, c);
        assert_eq!(got.verdict, Status::Pass);
        let shifted = gerbe_shift(&u, &got.c).unwrap();
        assert!(extract_c(&shifted).unwrap().c.iter().all(|x| x.is_zero()));
        assert!(shifted.is_identity());
        let rm = ResolutionMap { x_name: "P1".into(), y_name: "P1".into(), s: 1, r: 1 };
        assert!(check_conditions(&u, Some(&rm)).ok());
        let pi = vec![FieldElem::zero(), FieldElem::var("pi")];
        let w = cup_exponential(ring, &pi, -1).unwrap();
        assert_eq!(extract_c(&w).unwrap().verdict, Status::Warn);
    }
}
