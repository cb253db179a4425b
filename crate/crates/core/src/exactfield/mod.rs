//! Exact scalars: the field ℚ(ζ_N)(g₁,…,g_m) with free generators g_i.

mod cyclo;
mod field;
mod parse;
mod poly;

pub use cyclo::{cyclotomic_poly, totient, Cyc};
pub use field::FieldElem;
pub use parse::parse_expr;
pub use poly::{Mono, Poly};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstKind {
    Transcendental,
    RootOfUnity(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    pub name: String,
    pub kind: ConstKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared identifier '{0}'")]
    Undeclared(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid constant declaration: {0}")]
    BadDecl(String),
}

impl ConstDecl {
    pub fn transcendental(name: &str) -> ConstDecl {
        ConstDecl { name: name.to_string(), kind: ConstKind::Transcendental }
    }

    /// Parses `name` or `name:rootN`.
    pub fn parse(tok: &str) -> Result<ConstDecl, FieldError> {
        let (name, kind) = match tok.split_once(':') {
            None => (tok, ConstKind::Transcendental),
            Some((n, k)) => {
                let order = k
                    .strip_prefix("root")
                    .and_then(|s| s.parse::<u32>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| FieldError::BadDecl(tok.to_string()))?;
                (n, ConstKind::RootOfUnity(order))
            }
        };
        let ok = !name.is_empty()
            && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !name.starts_with("zeta_");
        if !ok {
            return Err(FieldError::BadDecl(tok.to_string()));
        }
        Ok(ConstDecl { name: name.to_string(), kind })
    }
}

/// Checks uniqueness of names and that at most one root of unity is declared.
pub fn validate_decls(decls: &[ConstDecl]) -> Result<(), FieldError> {
    for (i, d) in decls.iter().enumerate() {
        if decls[..i].iter().any(|e| e.name == d.name) {
            return Err(FieldError::BadDecl(format!("duplicate constant '{}'", d.name)));
        }
    }
    let roots = decls.iter().filter(|d| matches!(d.kind, ConstKind::RootOfUnity(_))).count();
    if roots > 1 {
        return Err(FieldError::BadDecl("more than one root-of-unity generator".into()));
    }
    Ok(())
}

/// The declared root-of-unity order, or 1.
pub fn cyclotomic_order(decls: &[ConstDecl]) -> u32 {
    decls
        .iter()
        .find_map(|d| match d.kind {
            ConstKind::RootOfUnity(n) => Some(n),
            _ => None,
        })
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decls(names: &[&str]) -> Vec<ConstDecl> {
        names.iter().map(|n| ConstDecl::parse(n).unwrap()).collect()
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_expr("1/2 + 1/3", &[]).unwrap(), FieldElem::frac(5, 6));
        assert!(parse_expr("pi - pi", &decls(&["pi"])).unwrap().is_zero());
        assert_eq!(parse_expr(" -(3) * -2 ", &[]).unwrap(), FieldElem::from_int(6));
    }

    #[test]
    fn parse_transcendental_entry() {
        let d = decls(&["sqrt3", "pi", "g13"]);
        let v = parse_expr("-2*sqrt3*pi/(3*g13)", &d).unwrap();
        let num = FieldElem::var("sqrt3") * FieldElem::var("pi") * FieldElem::from_int(-2);
        let den = FieldElem::var("g13");
        assert_eq!(v.numer(), (&num * &FieldElem::frac(1, 3)).numer());
        assert_eq!(v.denom(), den.numer());
        assert_eq!(v, num.checked_div(&(FieldElem::from_int(3) * den)).unwrap());
    }

    #[test]
    fn parse_roots_of_unity() {
        let d = decls(&["i:root4"]);
        assert_eq!(parse_expr("i*i", &d).unwrap(), FieldElem::from_int(-1));
        assert_eq!(parse_expr("zeta_3^3", &[]).unwrap(), FieldElem::one());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_expr("x+1", &[]), Err(FieldError::Undeclared(_))));
        assert!(matches!(parse_expr("1/(2-2)", &[]), Err(FieldError::DivisionByZero)));
        assert!(matches!(parse_expr("1 +", &[]), Err(FieldError::Syntax { .. })));
        assert!(matches!(parse_expr("(1", &[]), Err(FieldError::Syntax { .. })));
    }

    #[test]
    fn negative_exponent() {
        let d = decls(&["g"]);
        let v = parse_expr("g^-2 * g^3", &d).unwrap();
        assert_eq!(v, FieldElem::var("g"));
    }

    #[test]
    fn display_round_trip() {
        let d = decls(&["pi", "sqrt3", "g13", "g23"]);
        for s in [
            "-2*sqrt3*pi/(3*g13)",
            "(pi + 1)/(g13 - 2*g23)",
            "1/2 - zeta_4/3",
            "(2 + zeta_5)*pi^2",
            "g23/g13",
        ] {
            let v = parse_expr(s, &d).unwrap();
            let printed = v.to_string();
            assert_eq!(parse_expr(&printed, &d).unwrap(), v, "{s} -> {printed}");
        }
    }

    #[test]
    fn decl_validation() {
        assert!(ConstDecl::parse("w:root0").is_err());
        assert!(validate_decls(&decls(&["a", "a"])).is_err());
        assert!(validate_decls(&decls(&["a:root3", "b:root4"])).is_err());
        assert_eq!(cyclotomic_order(&decls(&["pi", "w:root6"])), 6);
    }
}
