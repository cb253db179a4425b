use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use gwcone_core::cohring::{ResolutionMap, Ring};
use gwcone_core::crc::{bg_check, ccrc_check, modified_pipelines, ruan_check_with, semipositive};
use gwcone_core::datasets::{bundled, bundled_ring};
use gwcone_core::exactfield::{parse_expr, FieldElem};
use gwcone_core::fps::{Exp, Names, Series};
use gwcone_core::genpair::{generate_pair, GenParams};
use gwcone_core::giventalspace::{cone_audit, j_function};
use gwcone_core::gwstore::{close_table, dimension_audit, twist, CloseBounds, Table};
use gwcone_core::potentials::{big_quantum_product, genus0_potential, order_for, wdvv_audit};
use gwcone_core::report::Report;
use gwcone_core::transform::{birkhoff, birkhoff_report, check_conditions, load_matrix, render_mat, LaurentMatrix};
use gwcone_core::{Error, Result};

#[derive(Parser)]
#[command(name = "gwcone", version, about = "Exact genus-zero Gromov-Witten toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Truncation order in the Novikov variables.
    #[arg(long, global = true)]
    order_novikov: Option<i64>,
    /// Truncation order in the coordinates tau.
    #[arg(long, global = true)]
    order_coord: Option<u32>,
    /// z-window MIN:MAX.
    #[arg(long, global = true, allow_hyphen_values = true)]
    z_window: Option<String>,
    /// "<idx>=<expr>,..."; several samples separated by ';'.
    #[arg(long, global = true)]
    tau: Option<String>,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    gw: String,
    /// Ring file; by default found by name next to the table.
    #[arg(long)]
    ring: Option<PathBuf>,
}

#[derive(Args)]
struct UmatArgs {
    #[arg(long)]
    umat: String,
    #[arg(long)]
    ring_x: Option<PathBuf>,
    #[arg(long)]
    ring_y: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CrcMode {
    Cohomological,
    Ruan,
    Bg,
    Modified,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a ring file.
    RingCheck {
        #[arg(long)]
        ring: String,
    },
    /// Ingest a table, audit dimensions and optionally close it under the axioms.
    GwCheck {
        #[command(flatten)]
        t: TableArgs,
        /// Close to at most this many insertions.
        #[arg(long)]
        close_n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        close_psi: u32,
    },
    /// Print the genus-zero potential.
    Potential {
        #[command(flatten)]
        t: TableArgs,
    },
    /// Print the big quantum product of two basis elements.
    Product {
        #[command(flatten)]
        t: TableArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Audit associativity of the big quantum product.
    Wdvv {
        #[command(flatten)]
        t: TableArgs,
    },
    /// Print J(tau, -z).
    Jfun {
        #[command(flatten)]
        t: TableArgs,
    },
    /// Audit the Lagrangian cone properties of the table's J-function.
    ConeAudit {
        #[command(flatten)]
        t: TableArgs,
    },
    /// Check the conditions on a transformation matrix.
    UmatCheck {
        #[command(flatten)]
        u: UmatArgs,
        #[arg(long)]
        res: Option<String>,
    },
    /// Factor U = U- U0 U+.
    Birkhoff {
        #[command(flatten)]
        u: UmatArgs,
    },
    /// Multiply every invariant by exp(2 pi i x.d).
    Twist {
        #[command(flatten)]
        t: TableArgs,
        /// Comma-separated rational phases, one per Novikov variable.
        #[arg(long, allow_hyphen_values = true)]
        phase: String,
    },
    /// Semi-positivity and the vanishing audit.
    Semipositive {
        #[command(flatten)]
        t: TableArgs,
    },
    /// Crepant resolution checks.
    Crc {
        #[arg(value_enum)]
        mode: CrcMode,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        u: UmatArgs,
        #[arg(long)]
        res: String,
        /// Ruan mode: leave out the quantum corrections f.
        #[arg(long)]
        no_f: bool,
    },
    /// Write a synthetic pair satisfying the correspondence.
    GenPair {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A file's text and the directory it came from (None for bundled data).
fn read_input(path: &str) -> Result<(String, Option<PathBuf>)> {
    let p = Path::new(path);
    if p.exists() {
        let text = fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
        let dir = p.parent().map(|d| if d.as_os_str().is_empty() { PathBuf::from(".") } else { d.to_path_buf() });
        return Ok((text, dir));
    }
    let name = p.file_name().and_then(|s| s.to_str()).unwrap_or(path);
    bundled(path)
        .or_else(|| bundled(name))
        .map(|t| (t.to_string(), None))
        .ok_or_else(|| Error::Invalid(format!("{path}: no such file or bundled dataset")))
}

fn header_word(text: &str, key: &str) -> Option<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())?
        .split_whitespace()
        .find_map(|w| w.strip_prefix(key).map(str::to_string))
}

fn declares_ring(text: &str, name: &str) -> bool {
    text.lines().any(|l| l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>() == ["ring", name])
}

fn load_ring(name: &str, dir: Option<&Path>, explicit: Option<&PathBuf>) -> Result<Arc<Ring>> {
    if let Some(p) = explicit {
        let (text, _) = read_input(&p.to_string_lossy())?;
        return Ok(Arc::new(Ring::parse(&text, &p.to_string_lossy())?));
    }
    if let Some(dir) = dir {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "ring")).collect())
            .unwrap_or_default();
        files.sort();
        for f in files {
            if let Ok(text) = fs::read_to_string(&f) {
                if declares_ring(&text, name) {
                    return Ok(Arc::new(Ring::parse(&text, &f.to_string_lossy())?));
                }
            }
        }
    }
    let text = bundled_ring(name).ok_or_else(|| Error::Invalid(format!("no ring file declares 'ring {name}' (use --ring)")))?;
    Ok(Arc::new(Ring::parse(text, &format!("{name}.ring"))?))
}

fn load_table(path: &str, ring: Option<&PathBuf>) -> Result<Table> {
    let (text, dir) = read_input(path)?;
    let name = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.strip_prefix("gw "))
        .map(|s| s.trim().to_string())
        .ok_or_else(|| Error::Invalid(format!("{path}: missing 'gw <ring>' header")))?;
    let ring = load_ring(&name, dir.as_deref(), ring)?;
    Table::parse(&text, path, ring)
}

fn load_umat(a: &UmatArgs) -> Result<LaurentMatrix> {
    let (text, dir) = read_input(&a.umat)?;
    let rx = header_word(&text, "ringX=").ok_or_else(|| Error::Invalid("umat header lacks ringX=".into()))?;
    let ry = header_word(&text, "ringY=").ok_or_else(|| Error::Invalid("umat header lacks ringY=".into()))?;
    let x = load_ring(&rx, dir.as_deref(), a.ring_x.as_ref())?;
    let y = if a.ring_y.is_none() && ry == rx { x.clone() } else { load_ring(&ry, dir.as_deref(), a.ring_y.as_ref())? };
    load_matrix(&text, &a.umat, x, y)
}

fn load_resmap(path: &str) -> Result<ResolutionMap> {
    let (text, _) = read_input(path)?;
    ResolutionMap::parse(&text, path)
}

fn z_window(c: &Common, default: i64) -> Result<i64> {
    let Some(w) = &c.z_window else { return Ok(default) };
    let (lo, hi) = w.split_once(':').ok_or_else(|| Error::Window(format!("expected MIN:MAX, got '{w}'")))?;
    let lo: i64 = lo.trim().parse().map_err(|_| Error::Window(format!("bad z-window minimum '{lo}'")))?;
    let hi: i64 = hi.trim().parse().map_err(|_| Error::Window(format!("bad z-window maximum '{hi}'")))?;
    if hi < 1 {
        return Err(Error::Window(format!("J has a z^1 term; the window needs MAX >= 1 (got {hi})")));
    }
    if lo > hi {
        return Err(Error::Window(format!("empty z-window {lo}:{hi}")));
    }
    Ok(lo)
}

fn basis_index(ring: &Ring, s: &str) -> Result<usize> {
    if let Ok(i) = s.parse::<usize>() {
        if i < ring.n() {
            return Ok(i);
        }
        return Err(Error::Invalid(format!("basis index {i} out of range")));
    }
    ring.index_of(s).ok_or_else(|| Error::Invalid(format!("no basis element named '{s}'")))
}

fn parse_tau(ring: &Ring, text: &str) -> Result<Vec<Vec<FieldElem>>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|sample| {
            let mut v = vec![FieldElem::zero(); ring.n()];
            for part in sample.split(',') {
                let (i, e) = part.split_once('=').ok_or_else(|| Error::Invalid(format!("expected <idx>=<expr>, got '{part}'")))?;
                v[basis_index(ring, i.trim())?] = parse_expr(e.trim(), &ring.consts)?;
            }
            Ok(v)
        })
        .collect()
}

fn names(ring: &Ring) -> Names {
    Names { novikov: ring.novikov.clone(), coords: (0..ring.n()).map(|i| format!("t{i}")).collect(), denom: ring.denom }
}

/// The polynomial truncation of `s` evaluated at τ.
fn at_tau(s: &Series, tau: &[FieldElem]) -> Result<Series> {
    let mut order = s.order().clone();
    order.coord_max = None;
    let mut out = Series::zero(s.nv(), 0, order);
    for (e, c) in s.terms() {
        let mut k = c.clone();
        for (t, v) in e.t.iter().zip(tau) {
            if *t > 0 {
                k = &k * &v.pow(*t as i64).ok_or_else(|| Error::Invalid("power of tau".into()))?;
            }
        }
        out.add_term(Exp { z: e.z, q: e.q.clone(), t: vec![] }, k);
    }
    Ok(out)
}

fn write_out(c: &Common, text: &str) -> Result<()> {
    match &c.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(rep: &Report) -> ExitCode {
    print!("{}", rep.render());
    if rep.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let c = &cli.common;
    match cli.cmd {
        Cmd::RingCheck { ring } => {
            let (text, _) = read_input(&ring)?;
            let r = Ring::parse(&text, &ring)?;
            let mut rep = Report::new("ring-check");
            rep.pass(
                "ring",
                format!("{}: dim_c {}, N+1 = {}, {} Novikov variable(s)", r.name, r.dim_c, r.n(), r.novikov.len()),
            );
            rep.pass("frobenius", "pairing nondegenerate; product graded, unital, associative and Frobenius");
            Ok(finish(&rep))
        }
        Cmd::GwCheck { t, close_n, close_psi } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            let mut rep = dimension_audit(&table);
            if let Some(n) = close_n {
                let nv = table.ring().novikov.len();
                let bounds = CloseBounds { max_n: n, max_psi: close_psi, degree: vec![c.order_novikov.unwrap_or(1); nv] };
                match close_table(&table, &bounds) {
                    Ok(closed) => {
                        rep.pass("closure", format!("{} entries ({} derived), both rule orders agree", closed.len(), closed.len() - table.len()));
                        rep.extend(dimension_audit(&closed));
                        if c.out.is_some() {
                            write_out(c, &closed.to_gw_string())?;
                        }
                    }
                    Err(e @ (Error::Inconsistent(_) | Error::Underdetermined(_))) => rep.fail("closure", e.to_string()),
                    Err(e) => return Err(e),
                }
            }
            Ok(finish(&rep))
        }
        Cmd::Potential { t } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            let f = genus0_potential(&table, &order_for(&table, c.order_novikov, c.order_coord.unwrap_or(3)))?;
            write_out(c, &format!("F = {}\n", f.render(&names(table.ring()))))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Product { t, a, b } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            let ring = table.ring();
            let (ia, ib) = (basis_index(ring, &a)?, basis_index(ring, &b)?);
            let f = genus0_potential(&table, &order_for(&table, c.order_novikov, c.order_coord.unwrap_or(3)))?;
            let mut prod = big_quantum_product(ring, &f, ia, ib)?;
            let mut nm = names(ring);
            if let Some(text) = &c.tau {
                let taus = parse_tau(ring, text)?;
                let tau = taus.first().ok_or_else(|| Error::Invalid("empty --tau".into()))?;
                prod = prod.iter().map(|s| at_tau(s, tau)).collect::<Result<_>>()?;
                nm.coords.clear();
            }
            let mut out = String::new();
            for (k, s) in prod.iter().enumerate() {
                if !s.is_zero() {
                    out.push_str(&format!("{} * {} -> {}: {}\n", ring.basis[ia].name, ring.basis[ib].name, ring.basis[k].name, s.render(&nm)));
                }
            }
            if out.is_empty() {
                out.push_str("0\n");
            }
            write_out(c, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Wdvv { t } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            Ok(finish(&wdvv_audit(&table, &order_for(&table, c.order_novikov, c.order_coord.unwrap_or(3)))?))
        }
        Cmd::Jfun { t } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            let fr = j_function(&table, c.order_novikov.unwrap_or(2), c.order_coord.unwrap_or(2), z_window(c, -4)?)?;
            let ring = table.ring();
            let mut out = String::new();
            for (b, s) in fr.j.iter().enumerate() {
                out.push_str(&format!("J[{}] = {}\n", ring.basis[b].name, s.render(&names(ring))));
            }
            write_out(c, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ConeAudit { t } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            let samples = match &c.tau {
                Some(s) => parse_tau(table.ring(), s)?,
                None => vec![],
            };
            let rep = cone_audit(&table, c.order_novikov.unwrap_or(2), c.order_coord.unwrap_or(3), z_window(c, -5)?, &samples)?;
            Ok(finish(&rep))
        }
        Cmd::UmatCheck { u, res } => {
            let m = load_umat(&u)?;
            let rm = res.as_deref().map(load_resmap).transpose()?;
            Ok(finish(&check_conditions(&m, rm.as_ref())))
        }
        Cmd::Birkhoff { u } => {
            let m = load_umat(&u)?;
            let b = birkhoff(&m)?;
            print!("U- =\n{}U0 =\n{}U+ =\n{}", b.minus.render(), render_mat(&b.zero), b.plus.render());
            Ok(finish(&birkhoff_report(&m, &b)))
        }
        Cmd::Twist { t, phase } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            let x: Vec<BigRational> = phase
                .split(',')
                .map(|s| s.trim().parse::<BigRational>().map_err(|_| Error::Invalid(format!("bad phase '{s}'"))))
                .collect::<Result<_>>()?;
            let tw = twist(&table, &x)?;
            write_out(c, &tw.to_gw_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Semipositive { t } => {
            let table = load_table(&t.gw, t.ring.as_ref())?;
            Ok(finish(&semipositive(&table)?.report))
        }
        Cmd::Crc { mode, x, y, u, res, no_f } => {
            let tx = load_table(&x, None)?;
            let ty = load_table(&y, None)?;
            let m = load_umat(&u)?;
            let rm = load_resmap(&res)?;
            let nov = c.order_novikov.unwrap_or(1);
            let rep = match mode {
                CrcMode::Cohomological => ccrc_check(&tx, &ty, &m, &rm, c.order_novikov)?,
                CrcMode::Ruan => ruan_check_with(&tx, &ty, &m, &rm, nov, !no_f)?,
                CrcMode::Bg => bg_check(&tx, &ty, &m, &rm, nov, c.order_coord.unwrap_or(1))?,
                CrcMode::Modified => modified_pipelines(&tx, &ty, &m, &rm, nov)?,
            };
            Ok(finish(&rep))
        }
        Cmd::GenPair { seed } => {
            let dir = c.out.clone().ok_or_else(|| Error::Invalid("gen-pair needs --out <dir>".into()))?;
            fs::create_dir_all(&dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
            let params = GenParams::random(seed);
            let (texts, pair) = generate_pair(&params, c.order_novikov.unwrap_or(1), c.order_coord.unwrap_or(1))?;
            let mut rep = Report::new("gen-pair");
            for (name, text) in texts.files() {
                let p = dir.join(name);
                fs::write(&p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
            }
            rep.pass(
                "shape",
                format!("N+1 = {}, s = {}, r = {}, seed {seed}", pair.x.n(), pair.resmap.s, pair.resmap.r),
            );
            rep.pass("files", format!("wrote {} files to {}", texts.files().len(), dir.display()));
            Ok(finish(&rep))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
