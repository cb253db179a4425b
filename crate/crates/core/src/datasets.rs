//! Data shipped with the crate.

use std::sync::Arc;

use crate::cohring::{ResolutionMap, Ring};
use crate::error::Result;
use crate::gwstore::Table;
use crate::transform::{load_matrix, LaurentMatrix};

pub const POINT_RING: &str = include_str!("../data/point.ring");
pub const POINT_GW: &str = include_str!("../data/point.gw");
pub const P1_RING: &str = include_str!("../data/p1.ring");
pub const P1_GW: &str = include_str!("../data/p1.gw");
pub const P1_IDENTITY_UMAT: &str = include_str!("../data/p1_identity.umat");
pub const NEG4_RING: &str = include_str!("../data/neg4.ring");
pub const NEG4_GW: &str = include_str!("../data/neg4.gw");
pub const P1113_RING: &str = include_str!("../data/p1113_f3.ring");
pub const F3_RING: &str = include_str!("../data/f3.ring");
pub const P1113_UMAT: &str = include_str!("../data/p1113_f3.umat");
pub const SYN_X_RING: &str = include_str!("../data/synthetic/x.ring");
pub const SYN_Y_RING: &str = include_str!("../data/synthetic/y.ring");
pub const SYN_X_GW: &str = include_str!("../data/synthetic/x.gw");
pub const SYN_X_HL_GW: &str = include_str!("../data/synthetic/x_hl.gw");
pub const SYN_Y_GW: &str = include_str!("../data/synthetic/y.gw");
pub const SYN_UMAT: &str = include_str!("../data/synthetic/u.umat");
pub const SYN_UMAT_HL: &str = include_str!("../data/synthetic/u_hl.umat");
pub const SYN_RES: &str = include_str!("../data/synthetic/m.res");

/// Bundled files by path relative to the data directory.
pub const FILES: &[(&str, &str)] = &[
    ("point.ring", POINT_RING),
    ("point.gw", POINT_GW),
    ("p1.ring", P1_RING),
    ("p1.gw", P1_GW),
    ("p1_identity.umat", P1_IDENTITY_UMAT),
    ("neg4.ring", NEG4_RING),
    ("neg4.gw", NEG4_GW),
    ("p1113_f3.ring", P1113_RING),
    ("f3.ring", F3_RING),
    ("p1113_f3.umat", P1113_UMAT),
    ("synthetic/x.ring", SYN_X_RING),
    ("synthetic/y.ring", SYN_Y_RING),
    ("synthetic/x.gw", SYN_X_GW),
    ("synthetic/x_hl.gw", SYN_X_HL_GW),
    ("synthetic/y.gw", SYN_Y_GW),
    ("synthetic/u.umat", SYN_UMAT),
    ("synthetic/u_hl.umat", SYN_UMAT_HL),
    ("synthetic/m.res", SYN_RES),
];

pub fn bundled(path: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == path).map(|(_, t)| *t)
}

/// The bundled ring file declaring `ring <name>`.
pub fn bundled_ring(name: &str) -> Option<&'static str> {
    FILES
        .iter()
        .filter(|(n, _)| n.ends_with(".ring"))
        .map(|(_, t)| *t)
        .find(|t| t.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["ring", name]))
}

/// A table over one ring.
pub struct Dataset {
    pub name: &'static str,
    pub ring: &'static str,
    pub gw: &'static str,
}

impl Dataset {
    pub fn load(&self) -> Result<Table> {
        let ring = Arc::new(Ring::parse(self.ring, &format!("{}.ring", self.name))?);
        Table::parse(self.gw, &format!("{}.gw", self.name), ring)
    }
}

pub fn single_space() -> Vec<Dataset> {
    vec![
        Dataset { name: "point", ring: POINT_RING, gw: POINT_GW },
        Dataset { name: "p1", ring: P1_RING, gw: P1_GW },
        Dataset { name: "neg4", ring: NEG4_RING, gw: NEG4_GW },
        Dataset { name: "p1113_f3", ring: P1113_RING, gw: "gw P1113_F3\nend\n" },
        Dataset { name: "f3", ring: F3_RING, gw: "gw F3\nend\n" },
        Dataset { name: "syn_x", ring: SYN_X_RING, gw: SYN_X_GW },
        Dataset { name: "syn_x_hl", ring: SYN_X_RING, gw: SYN_X_HL_GW },
        Dataset { name: "syn_y", ring: SYN_Y_RING, gw: SYN_Y_GW },
    ]
}

pub fn p1113() -> Result<LaurentMatrix> {
    let x = Arc::new(Ring::parse(P1113_RING, "p1113_f3.ring")?);
    let y = Arc::new(Ring::parse(F3_RING, "f3.ring")?);
    load_matrix(P1113_UMAT, "p1113_f3.umat", x, y)
}

/// The bundled synthetic pair: (X small, X big, Y, U, U constant, resolution map).
pub fn synthetic() -> Result<(Table, Table, Table, LaurentMatrix, LaurentMatrix, ResolutionMap)> {
    let x = Arc::new(Ring::parse(SYN_X_RING, "x.ring")?);
    let y = Arc::new(Ring::parse(SYN_Y_RING, "y.ring")?);
    Ok((
        Table::parse(SYN_X_GW, "x.gw", x.clone())?,
        Table::parse(SYN_X_HL_GW, "x_hl.gw", x.clone())?,
        Table::parse(SYN_Y_GW, "y.gw", y.clone())?,
        load_matrix(SYN_UMAT, "u.umat", x.clone(), y.clone())?,
        load_matrix(SYN_UMAT_HL, "u_hl.umat", x, y)?,
        ResolutionMap::parse(SYN_RES, "m.res")?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_loads() {
        for d in single_space() {
            d.load().unwrap_or_else(|e| panic!("{}: {e}", d.name));
        }
        p1113().unwrap();
        synthetic().unwrap();
    }
}
