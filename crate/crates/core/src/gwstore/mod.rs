//! Genus-zero correlator tables and the axiom engine acting on them.

mod eval;

pub use eval::{close_table, degree_box, reduce_dilaton, reduce_divisor, reduce_string, trr_reduce, CloseBounds, Evaluator, RuleOrder};

use crate::cohring::{content_lines, parse_rat, Ring};
use crate::error::{parse_err, Error, Result};
use crate::exactfield::{cyclotomic_order, parse_expr, FieldElem};
use crate::fps::phase;
use crate::report::Report;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ins {
    pub idx: usize,
    pub psi: u32,
}

impl Ins {
    pub fn new(idx: usize, psi: u32) -> Ins {
        Ins { idx, psi }
    }
}

/// A correlator ⟨δ₁ψ^{a₁},…,δ_nψ^{a_n}⟩_{g,n,d}. Degrees are numerators over
/// the ring's denominator; insertions are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub genus: u32,
    pub degree: Vec<i64>,
    pub ins: Vec<Ins>,
}

impl Key {
    pub fn new(genus: u32, degree: Vec<i64>, mut ins: Vec<Ins>) -> Key {
        ins.sort();
        Key { genus, degree, ins }
    }

    pub fn primary(degree: Vec<i64>, idx: &[usize]) -> Key {
        Key::new(0, degree, idx.iter().map(|&i| Ins::new(i, 0)).collect())
    }

    pub fn n(&self) -> usize {
        self.ins.len()
    }

    pub fn total_psi(&self) -> u32 {
        self.ins.iter().map(|i| i.psi).sum()
    }

    pub fn degree_is_zero(&self) -> bool {
        self.degree.iter().all(|x| *x == 0)
    }

    /// The key with insertion at position `pos` removed.
    pub fn without(&self, pos: usize) -> Key {
        let mut ins = self.ins.clone();
        ins.remove(pos);
        Key { genus: self.genus, degree: self.degree.clone(), ins }
    }

    /// The key with insertion at position `pos` replaced.
    pub fn replaced(&self, pos: usize, new: Ins) -> Key {
        let mut ins = self.ins.clone();
        ins[pos] = new;
        Key::new(self.genus, self.degree.clone(), ins)
    }

    pub fn with(&self, extra: Ins) -> Key {
        let mut ins = self.ins.clone();
        ins.push(extra);
        Key::new(self.genus, self.degree.clone(), ins)
    }

    pub fn render(&self, ring: &Ring) -> String {
        let mut s = String::from("<");
        for (k, i) in self.ins.iter().enumerate() {
            if k > 0 {
                s.push_str(", ");
            }
            let name = ring.basis.get(i.idx).map_or_else(|| format!("#{}", i.idx), |b| b.name.clone());
            match i.psi {
                0 => s.push_str(&name),
                1 => {
                    let _ = write!(s, "psi*{name}");
                }
                p => {
                    let _ = write!(s, "psi^{p}*{name}");
                }
            }
        }
        let d: Vec<String> = self.degree.iter().map(|x| crate::fps::fmt_exp(*x, ring.denom)).collect();
        let _ = write!(s, ">_(g={},n={},d=({}))", self.genus, self.n(), d.join(","));
        s
    }
}

/// Virtual dimension bookkeeping: (Σ deg/2 + ψ, (1−g)(dim−3) + c₁·d + n).
pub fn dimension_sides(ring: &Ring, key: &Key) -> (BigRational, BigRational) {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut lhs = BigRational::zero();
    for i in &key.ins {
        lhs += BigRational::from_integer(BigInt::from(ring.deg(i.idx))) * &half + BigRational::from_integer(BigInt::from(i.psi));
    }
    let rhs = BigRational::from_integer(BigInt::from((1 - key.genus as i64) * (ring.dim_c as i64 - 3) + key.n() as i64))
        + ring.c1_dot(&key.degree);
    (lhs, rhs)
}

pub fn dimension_ok(ring: &Ring, key: &Key) -> bool {
    let (l, r) = dimension_sides(ring, key);
    l == r
}

/// Support of the data in one Novikov variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Data complete up to this numerator and zero beyond it (ungraded variable).
    Finite(i64),
    /// Data complete up to this numerator and unknown beyond it (graded variable).
    Open(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Known,
    Zero,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub nov: Vec<Bound>,
    pub max_n: usize,
    pub max_psi: u32,
    pub max_genus: u32,
}

impl Support {
    pub fn covers(&self, d: &[i64]) -> Coverage {
        let mut zero = false;
        for (b, x) in self.nov.iter().zip(d) {
            match b {
                Bound::Open(m) if x > m => return Coverage::Unknown,
                Bound::Finite(m) if x > m => zero = true,
                _ => {}
            }
        }
        if zero {
            Coverage::Zero
        } else {
            Coverage::Known
        }
    }

    pub fn graded(&self) -> Vec<bool> {
        self.nov.iter().map(|b| matches!(b, Bound::Open(_))).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Stored,
    Derived(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: FieldElem,
    pub provenance: Provenance,
}

type CoreKey = (Vec<i64>, Vec<Ins>);

#[derive(Clone, Debug)]
pub struct Table {
    pub ring: Arc<Ring>,
    entries: BTreeMap<Key, Entry>,
    support: Support,
    /// Genus-zero primaries with untwisted divisors stripped: (d, core) → (record, core value).
    core_index: BTreeMap<CoreKey, Vec<(Key, FieldElem)>>,
}

impl Table {
    /// Builds a table from records. `support` overrides the inferred Novikov
    /// bounds; without it every variable is `Finite(max seen)`, and an empty
    /// table covers no degree at all.
    pub fn new(ring: Arc<Ring>, records: Vec<(Key, FieldElem)>, support: Option<Vec<Bound>>) -> Result<Table> {
        let k = ring.novikov.len();
        let mut entries: BTreeMap<Key, Entry> = BTreeMap::new();
        for (key, v) in records {
            let key = Key::new(key.genus, key.degree, key.ins);
            validate_key(&ring, &key)?;
            if let Some(old) = entries.get(&key) {
                if old.value != v {
                    return Err(Error::Inconsistent(format!(
                        "duplicate key {} with conflicting values {} and {}",
                        key.render(&ring),
                        old.value,
                        v
                    )));
                }
                continue;
            }
            entries.insert(key, Entry { value: v, provenance: Provenance::Stored });
        }
        let nov = match support {
            Some(s) => {
                if s.len() != k {
                    return Err(Error::Invalid(format!("support has {} entries, ring has {k} Novikov variables", s.len())));
                }
                s
            }
            None => (0..k)
                .map(|i| match entries.keys().map(|e| e.degree[i]).max() {
                    Some(m) => Bound::Finite(m),
                    None => Bound::Open(-1),
                })
                .collect(),
        };
        let support = Support {
            nov,
            max_n: entries.keys().map(|e| e.n()).max().unwrap_or(0),
            max_psi: entries.keys().flat_map(|e| e.ins.iter().map(|i| i.psi)).max().unwrap_or(0),
            max_genus: entries.keys().map(|e| e.genus).max().unwrap_or(0),
        };
        Table::assemble(ring, entries, support)
    }

    fn assemble(ring: Arc<Ring>, entries: BTreeMap<Key, Entry>, support: Support) -> Result<Table> {
        let mut core_index: BTreeMap<CoreKey, Vec<(Key, FieldElem)>> = BTreeMap::new();
        for (key, e) in &entries {
            if key.genus != 0 || key.total_psi() != 0 {
                continue;
            }
            let (core, scale) = strip_divisors(&ring, key);
            if scale.is_zero() {
                continue;
            }
            let cv = e.value.scale_rat(&scale.recip());
            core_index.entry((key.degree.clone(), core)).or_default().push((key.clone(), cv));
        }
        Ok(Table { ring, entries, support, core_index })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn entries(&self) -> &BTreeMap<Key, Entry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &Key) -> Option<&FieldElem> {
        self.entries.get(key).map(|e| &e.value)
    }

    pub(crate) fn core_records(&self, d: &[i64], core: &[Ins]) -> &[(Key, FieldElem)] {
        self.core_index.get(&(d.to_vec(), core.to_vec())).map_or(&[], |v| v.as_slice())
    }

    /// Returns a copy with extra derived entries (support unchanged).
    pub fn extended(&self, extra: Vec<(Key, FieldElem, String)>) -> Result<Table> {
        let mut entries = self.entries.clone();
        for (k, v, tag) in extra {
            entries.entry(k).or_insert(Entry { value: v, provenance: Provenance::Derived(tag) });
        }
        let mut support = self.support.clone();
        support.max_n = entries.keys().map(|e| e.n()).max().unwrap_or(0);
        support.max_psi = entries.keys().flat_map(|e| e.ins.iter().map(|i| i.psi)).max().unwrap_or(0);
        Table::assemble(self.ring.clone(), entries, support)
    }

    pub fn parse(text: &str, file: &str, ring: Arc<Ring>) -> Result<Table> {
        let lines = content_lines(text);
        let k = ring.novikov.len();
        let m = ring.denom;
        let mut header = false;
        let mut ended = false;
        let mut records = Vec::new();
        let mut support = None;
        for (ln, l) in &lines {
            let ln = *ln;
            if ended {
                return Err(parse_err(file, ln, "content after 'end'"));
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks[0] {
                "gw" => {
                    if toks.len() != 2 {
                        return Err(parse_err(file, ln, "expected: gw <ring-name>"));
                    }
                    if toks[1] != ring.name {
                        return Err(parse_err(file, ln, format!("table is for ring '{}', loaded ring is '{}'", toks[1], ring.name)));
                    }
                    header = true;
                }
                "support" => {
                    let bounds_text = toks[1..].join("");
                    let mut b = Vec::new();
                    for part in bounds_text.split(',').filter(|s| !s.is_empty()) {
                        if part == "*" {
                            b.push(None);
                        } else {
                            b.push(Some(degree_numerator(part, m).ok_or_else(|| parse_err(file, ln, format!("bad support bound '{part}'")))?));
                        }
                    }
                    if b.len() != k {
                        return Err(parse_err(file, ln, format!("support needs {k} entries")));
                    }
                    support = Some(b);
                }
                "inv" => {
                    if !header {
                        return Err(parse_err(file, ln, "missing 'gw <ring-name>' header"));
                    }
                    records.push(parse_inv(l, file, ln, &ring)?);
                }
                "end" => ended = true,
                _ => return Err(parse_err(file, ln, format!("unexpected line '{l}'"))),
            }
        }
        if !header {
            return Err(parse_err(file, 1, "missing 'gw <ring-name>' header"));
        }
        if !ended {
            return Err(parse_err(file, lines.last().map_or(0, |x| x.0), "missing 'end'"));
        }
        let bounds = support.map(|b: Vec<Option<i64>>| {
            b.iter()
                .enumerate()
                .map(|(i, x)| match x {
                    Some(v) => Bound::Finite(*v),
                    None => Bound::Open(records.iter().map(|(r, _): &(Key, FieldElem)| r.degree[i]).max().unwrap_or(-1)),
                })
                .collect()
        });
        Table::new(ring, records, bounds)
    }

    pub fn to_gw_string(&self) -> String {
        let ring = &self.ring;
        let mut s = format!("gw {}\n", ring.name);
        if !self.support.nov.is_empty() {
            let parts: Vec<String> = self
                .support
                .nov
                .iter()
                .map(|b| match b {
                    Bound::Finite(x) => crate::fps::fmt_exp(*x, ring.denom),
                    Bound::Open(_) => "*".into(),
                })
                .collect();
            let _ = writeln!(s, "support {}", parts.join(","));
        }
        for (k, e) in &self.entries {
            let d: Vec<String> = k.degree.iter().map(|x| crate::fps::fmt_exp(*x, ring.denom)).collect();
            let ins: String = k.ins.iter().map(|i| format!("({}:{})", i.idx, i.psi)).collect();
            let _ = writeln!(s, "inv g={} d={} ins={} val={}", k.genus, d.join(","), ins, e.value);
        }
        s.push_str("end\n");
        s
    }
}

fn degree_numerator(s: &str, m: i64) -> Option<i64> {
    let q = parse_rat(s)? * BigRational::from_integer(BigInt::from(m));
    if !q.is_integer() {
        return None;
    }
    use num_traits::ToPrimitive;
    q.to_integer().to_i64()
}

fn validate_key(ring: &Ring, key: &Key) -> Result<()> {
    if key.degree.len() != ring.novikov.len() {
        return Err(Error::Invalid(format!(
            "degree has {} entries, ring has {} Novikov variables",
            key.degree.len(),
            ring.novikov.len()
        )));
    }
    if key.degree.iter().any(|x| *x < 0) {
        return Err(Error::Invalid("negative degree".into()));
    }
    if let Some(i) = key.ins.iter().find(|i| i.idx >= ring.n()) {
        return Err(Error::Invalid(format!("insertion index {} out of range for a {}-element basis", i.idx, ring.n())));
    }
    Ok(())
}

fn parse_inv(l: &str, file: &str, ln: usize, ring: &Ring) -> Result<(Key, FieldElem)> {
    let err = |msg: String| parse_err(file, ln, msg);
    let (head, val) = l.split_once("val=").ok_or_else(|| err("missing val=".into()))?;
    let (head, ins_txt) = head.split_once("ins=").ok_or_else(|| err("missing ins=".into()))?;
    let mut genus = None;
    let mut degree = None;
    for t in head.split_whitespace().skip(1) {
        if let Some(g) = t.strip_prefix("g=") {
            genus = Some(g.parse::<u32>().map_err(|_| err(format!("bad genus '{g}'")))?);
        } else if let Some(d) = t.strip_prefix("d=") {
            let mut v = Vec::new();
            for part in d.split(',').filter(|s| !s.is_empty()) {
                let q = parse_rat(part).ok_or_else(|| err(format!("bad degree '{part}'")))?;
                if q < BigRational::zero() {
                    return Err(err("negative degree".into()));
                }
                v.push(degree_numerator(part, ring.denom).ok_or_else(|| err(format!("degree '{part}' is not a multiple of 1/{}", ring.denom)))?);
            }
            degree = Some(v);
        } else {
            return Err(err(format!("unexpected field '{t}'")));
        }
    }
    let genus = genus.ok_or_else(|| err("missing g=".into()))?;
    let mut degree = degree.unwrap_or_default();
    if ring.novikov.is_empty() && degree.iter().all(|x| *x == 0) {
        degree.clear();
    }
    if degree.len() != ring.novikov.len() {
        return Err(err(format!("degree needs {} entries", ring.novikov.len())));
    }
    let mut ins = Vec::new();
    let compact: String = ins_txt.chars().filter(|c| !c.is_whitespace()).collect();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').and_then(|r| r.split_once(')')).ok_or_else(|| err(format!("bad insertion list '{compact}'")))?;
        let (a, b) = inner.0.split_once(':').ok_or_else(|| err(format!("bad insertion '({})'", inner.0)))?;
        let idx: usize = a.parse().map_err(|_| err(format!("bad insertion index '{a}'")))?;
        let psi: u32 = b.parse().map_err(|_| err(format!("bad psi power '{b}'")))?;
        if idx >= ring.n() {
            return Err(err(format!("insertion index {idx} out of range for a {}-element basis", ring.n())));
        }
        ins.push(Ins::new(idx, psi));
        rest = inner.1;
    }
    let v = parse_expr(val.trim(), &ring.consts).map_err(|e| err(e.to_string()))?;
    Ok((Key::new(genus, degree, ins), v))
}

/// Strips untwisted ψ-free divisor insertions, returning the core and the
/// product of the pairings D·d (zero when some D·d vanishes or d = 0).
pub(crate) fn strip_divisors(ring: &Ring, key: &Key) -> (Vec<Ins>, BigRational) {
    let mut scale = BigRational::one();
    let mut core = Vec::new();
    if key.degree_is_zero() {
        return (key.ins.clone(), scale);
    }
    for i in &key.ins {
        match ring.divisor_index(i.idx) {
            Some(v) if i.psi == 0 => {
                scale *= BigRational::new(BigInt::from(key.degree[v]), BigInt::from(ring.denom));
            }
            _ => core.push(*i),
        }
    }
    (core, scale)
}

/// Checks the virtual-dimension constraint on every stored genus-zero key.
pub fn dimension_audit(table: &Table) -> Report {
    let ring = table.ring();
    let mut r = Report::new("dimension audit");
    let mut bad = 0;
    let mut zero_off = 0;
    for (k, e) in table.entries() {
        if k.genus != 0 {
            continue;
        }
        let (l, rhs) = dimension_sides(ring, k);
        if l != rhs {
            if e.value.is_zero() {
                zero_off += 1;
            } else {
                bad += 1;
                r.fail("dimension", format!("{} = {} but {} != {}", k.render(ring), e.value, l, rhs));
            }
        }
    }
    if bad == 0 {
        r.pass(
            "dimension",
            format!("{} genus-0 records satisfy the dimension constraint ({} zero records off-dimension)", table.len(), zero_off),
        );
    }
    r
}

/// Multiplies every value by exp(2π√−1·x·d).
pub fn twist(table: &Table, x: &[BigRational]) -> Result<Table> {
    let ring = table.ring();
    if x.len() != ring.novikov.len() {
        return Err(Error::Invalid(format!("phase vector has {} entries, ring has {}", x.len(), ring.novikov.len())));
    }
    let n = cyclotomic_order(&ring.consts);
    for q in x {
        if (BigInt::from(n) % q.denom()) != BigInt::zero() {
            return Err(Error::Precondition(format!("phase denominator {} does not divide the cyclotomic order {n}", q.denom())));
        }
    }
    let mut entries = BTreeMap::new();
    for (k, e) in table.entries() {
        let mut p = BigRational::zero();
        for (q, d) in x.iter().zip(&k.degree) {
            p += q * BigRational::new(BigInt::from(*d), BigInt::from(ring.denom));
        }
        if (BigInt::from(n) % p.denom()) != BigInt::zero() {
            return Err(Error::Precondition(format!(
                "phase {p} at degree {:?} has denominator not dividing {n}",
                k.degree
            )));
        }
        entries.insert(k.clone(), Entry { value: &e.value * &phase(&p), provenance: e.provenance.clone() });
    }
    Table::assemble(table.ring.clone(), entries, table.support.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const P1_RING: &str = "ring P1\ndimc 1\nconsts w:root2\nnovikov 1 Q denom 1\nc1 2\nbasis 2\n0 1 0\n1 h 2\npairing\n0 1 1\nclassical\nend\n";

    fn p1() -> Arc<Ring> {
        Arc::new(Ring::parse(P1_RING, "p1.ring").unwrap())
    }

    #[test]
    fn ingest_p1() {
        let t = Table::parse("gw P1\ninv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1\nend\n", "p1.gw", p1()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.support().nov, vec![Bound::Finite(1)]);
    }

    #[test]
    fn ingest_errors() {
        let dup = "gw P1\ninv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1\ninv g=0 d=1 ins=(1:0)(1:0)(1:0) val=2\nend\n";
        assert!(Table::parse(dup, "x", p1()).is_err());
        let range = "gw P1\ninv g=0 d=1 ins=(7:0)(1:0)(1:0) val=1\nend\n";
        assert!(Table::parse(range, "x", p1()).unwrap_err().to_string().contains("out of range"));
        let neg = "gw P1\ninv g=0 d=-1 ins=(1:0) val=1\nend\n";
        assert!(Table::parse(neg, "x", p1()).is_err());
    }

    #[test]
    fn audit_dimension() {
        let good = Table::parse("gw P1\ninv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1\nend\n", "x", p1()).unwrap();
        assert!(dimension_audit(&good).ok());
        let bad = Table::parse("gw P1\ninv g=0 d=1 ins=(1:0)(1:0)(0:0) val=1\nend\n", "x", p1()).unwrap();
        assert!(!dimension_audit(&bad).ok());
        let empty = Table::new(p1(), vec![], None).unwrap();
        assert!(dimension_audit(&empty).ok());
    }

    #[test]
    fn twist_examples() {
        let t = Table::parse("gw P1\ninv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1\nend\n", "x", p1()).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let tw = twist(&t, std::slice::from_ref(&half)).unwrap();
        assert_eq!(tw.get(&Key::primary(vec![1], &[1, 1, 1])).unwrap(), &FieldElem::from_int(-1));
        let back = twist(&tw, &[-half]).unwrap();
        assert_eq!(back.entries(), t.entries());
        assert!(twist(&t, &[BigRational::new(1.into(), 3.into())]).is_err());
        assert_eq!(twist(&t, &[BigRational::zero()]).unwrap().entries(), t.entries());
    }

    #[test]
    fn round_trip_text() {
        let t = Table::parse("gw P1\ninv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1\nend\n", "x", p1()).unwrap();
        let again = Table::parse(&t.to_gw_string(), "y", p1()).unwrap();
        assert_eq!(again.entries(), t.entries());
    }
}
