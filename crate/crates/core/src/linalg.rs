//! Dense matrices over the exact field.

use crate::exactfield::FieldElem;

pub type Mat = Vec<Vec<FieldElem>>;

pub fn zeros(n: usize, m: usize) -> Mat {
    vec![vec![FieldElem::zero(); m]; n]
}

pub fn identity(n: usize) -> Mat {
    let mut a = zeros(n, n);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = FieldElem::one();
    }
    a
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut c = zeros(n, m);
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    c[i][j] = &c[i][j] + &(aik * &b[k][j]);
                }
            }
        }
    }
    c
}

pub fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn mat_vec(a: &Mat, v: &[FieldElem]) -> Vec<FieldElem> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).fold(FieldElem::zero(), |acc, (x, y)| {
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    &acc + &(x * y)
                }
            })
        })
        .collect()
}

/// Gauss–Jordan inverse; `None` when singular.
pub fn invert(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].inv()?;
        for j in 0..n {
            m[col][j] = &m[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                if !m[col][j].is_zero() {
                    m[r][j] = &m[r][j] - &(&f * &m[col][j]);
                }
                if !inv[col][j].is_zero() {
                    inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
                }
            }
        }
    }
    Some(inv)
}

/// One solution of `a x = b` (free variables set to zero); `None` when inconsistent.
pub fn solve(a: &Mat, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<FieldElem>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..m {
        let Some(piv) = (top..n).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(top, piv);
        let p = rows[top][col].inv()?;
        for j in col..=m {
            rows[top][j] = &rows[top][j] * &p;
        }
        for r in 0..n {
            if r == top || rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            for j in col..=m {
                if !rows[top][j].is_zero() {
                    rows[r][j] = &rows[r][j] - &(&f * &rows[top][j]);
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    if rows[top..].iter().any(|r| !r[m].is_zero()) {
        return None;
    }
    let mut x = vec![FieldElem::zero(); m];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][m].clone();
    }
    Some(x)
}

pub fn is_identity(a: &Mat) -> bool {
    a.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_small() {
        let a: Mat = vec![
            vec![FieldElem::from_int(2), FieldElem::from_int(1)],
            vec![FieldElem::from_int(1), FieldElem::var("x")],
        ];
        let b = invert(&a).unwrap();
        assert!(is_identity(&mul(&a, &b)));
        let s: Mat = vec![vec![FieldElem::one(), FieldElem::one()], vec![FieldElem::one(), FieldElem::one()]];
        assert!(invert(&s).is_none());
        let x = solve(&s, &[FieldElem::from_int(2), FieldElem::from_int(2)]).unwrap();
        assert_eq!(mat_vec(&s, &x), vec![FieldElem::from_int(2), FieldElem::from_int(2)]);
        assert!(solve(&s, &[FieldElem::one(), FieldElem::zero()]).is_none());
    }
}
