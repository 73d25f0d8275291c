//! Exact linear algebra: reduced row echelon over the rationals (kernel
//! bases for the Laplacian, Fischer rank checks, structure-constant
//! solves) and elimination / fraction-free determinants over the scalar
//! ring for coordinate solves and Gram matrices.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::scalar::{ExactScalar, Rat};

/// Reduced row echelon form in place; returns the pivot column list.
pub fn rref_rat(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // prefer a simple pivot: the entry with the smallest magnitude
        let pivot_row = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by(|&i, &j| {
                let a = m[i][c].numer().magnitude() * m[j][c].denom().magnitude();
                let b = m[j][c].numer().magnitude() * m[i][c].denom().magnitude();
                a.cmp(&b)
            });
        let Some(pr) = pivot_row else { continue };
        m.swap(r, pr);
        let inv = m[r][c].clone();
        for cc in c..cols {
            let v = &m[r][cc] / &inv;
            m[r][cc] = v;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for cc in c..cols {
                    let v = &m[i][cc] - &(&f * &m[r][cc]);
                    m[i][cc] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_rat(mut m: Vec<Vec<Rat>>) -> usize {
    rref_rat(&mut m).len()
}

/// Basis of the kernel of the linear map given by `rows` (each row one
/// equation over `cols` unknowns), in reduced echelon order.
pub fn kernel_rat(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let pivots = rref_rat(&mut m);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Clear denominators and common content so a kernel vector prints nicely.
pub fn normalize_primitive(v: &mut [Rat]) {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for x in v.iter() {
        lcm = lcm.lcm(x.denom());
    }
    for x in v.iter_mut() {
        *x = &*x * Rat::from_integer(lcm.clone());
    }
    let mut gcd = BigInt::zero();
    for x in v.iter() {
        gcd = gcd.gcd(x.numer());
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for x in v.iter_mut() {
            *x = &*x / Rat::from_integer(gcd.clone());
        }
    }
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Solve `Σ_i c_i · col_i = target` over the rationals; `None` when the
/// target is outside the span or the solution is not unique.
pub fn solve_rat(cols: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let ncols = cols.len();
    let nrows = target.len();
    let mut m: Vec<Vec<Rat>> = (0..nrows)
        .map(|r| {
            let mut row: Vec<Rat> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let pivots = rref_rat(&mut m);
    if pivots.contains(&ncols) {
        return None; // inconsistent
    }
    if pivots.len() != ncols {
        return None; // underdetermined
    }
    let mut sol = vec![Rat::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = m[r][ncols].clone();
    }
    Some(sol)
}

/// Solve `Σ_i c_i · col_i = target` exactly over the unknowns `c_i`.
///
/// The columns are expected to be linearly independent; a unique exact
/// solution is returned, or an error naming the obstruction.  Pivots must
/// be single-term scalars (the coordinate matrices built from harmonic ×
/// Laguerre data satisfy this); a non-monomial pivot fails loudly rather
/// than silently losing exactness.
pub fn solve_columns(
    cols: &[Vec<ExactScalar>],
    target: &[ExactScalar],
) -> Result<Vec<ExactScalar>, String> {
    let ncols = cols.len();
    let nrows = target.len();
    for col in cols {
        if col.len() != nrows {
            return Err(String::from("column/target length mismatch"));
        }
    }
    // augmented rows
    let mut m: Vec<Vec<ExactScalar>> = (0..nrows)
        .map(|r| {
            let mut row: Vec<ExactScalar> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut used = vec![false; nrows];
    for c in 0..ncols {
        let Some(pr) = (0..nrows).find(|&r| !used[r] && m[r][c].as_monomial().is_some()) else {
            if (0..nrows).any(|r| !used[r] && !m[r][c].is_zero()) {
                return Err(alloc::format!("non-monomial pivot in column {c}"));
            }
            continue;
        };
        used[pr] = true;
        pivot_of_col[c] = Some(pr);
        let inv = m[pr][c].clone();
        for cc in 0..=ncols {
            m[pr][cc] = m[pr][cc].div_monomial(&inv).expect("monomial pivot");
        }
        for r in 0..nrows {
            if r != pr && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for cc in 0..=ncols {
                    let sub = &f * &m[pr][cc];
                    m[r][cc] = &m[r][cc] - &sub;
                }
            }
        }
    }
    // consistency: rows without pivots must have zero RHS
    for r in 0..nrows {
        if !used[r] && !m[r][ncols].is_zero() {
            return Err(String::from("inconsistent system: nonzero residual"));
        }
    }
    let mut sol = Vec::with_capacity(ncols);
    for c in 0..ncols {
        match pivot_of_col[c] {
            Some(pr) => sol.push(m[pr][ncols].clone()),
            None => return Err(alloc::format!("underdetermined column {c}")),
        }
    }
    Ok(sol)
}

/// Rank over the scalar ring via monomial-pivot elimination.
pub fn rank_scalar(mut m: Vec<Vec<ExactScalar>>) -> Result<usize, String> {
    let rows = m.len();
    if rows == 0 {
        return Ok(0);
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut used = vec![false; rows];
    for c in 0..cols {
        let Some(pr) = (0..rows).find(|&r| !used[r] && m[r][c].as_monomial().is_some()) else {
            if (0..rows).any(|r| !used[r] && !m[r][c].is_zero()) {
                return Err(alloc::format!("non-monomial pivot in column {c}"));
            }
            continue;
        };
        used[pr] = true;
        rank += 1;
        let inv = m[pr][c].clone();
        for cc in 0..cols {
            m[pr][cc] = m[pr][cc].div_monomial(&inv).expect("monomial pivot");
        }
        for r in 0..rows {
            if r != pr && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for cc in 0..cols {
                    let sub = &f * &m[pr][cc];
                    m[r][cc] = &m[r][cc] - &sub;
                }
            }
        }
    }
    Ok(rank)
}

/// Fraction-free (Bareiss) determinant over the scalar ring; every interior
/// division is exact by the Bareiss identity.
pub fn bareiss_det(mut m: Vec<Vec<ExactScalar>>) -> ExactScalar {
    let n = m.len();
    if n == 0 {
        return ExactScalar::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut sign = 1i64;
    let mut prev = ExactScalar::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(sw) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return ExactScalar::zero();
            };
            m.swap(k, sw);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = &m[k][k] * &m[i][j];
                let b = &m[i][k] * &m[k][j];
                let num = &a - &b;
                m[i][j] = num.div_exact(&prev).expect("Bareiss divisibility");
            }
        }
        for i in k + 1..n {
            m[i][k] = ExactScalar::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratq};

    fn r(n: i64) -> Rat {
        rat(n)
    }

    #[test]
    fn kernel_of_simple_map() {
        // x + y + z = 0, x - z = 0  =>  kernel spanned by (1, -2, 1)
        let rows = vec![vec![r(1), r(1), r(1)], vec![r(1), r(0), r(-1)]];
        let k = kernel_rat(&rows, 3);
        assert_eq!(k.len(), 1);
        let mut v = k[0].clone();
        normalize_primitive(&mut v);
        assert_eq!(v, vec![r(1), r(-2), r(1)]);
    }

    #[test]
    fn rank_and_rref() {
        let rows = vec![
            vec![ratq(1, 2), r(1)],
            vec![r(1), r(2)],
            vec![r(0), r(1)],
        ];
        assert_eq!(rank_rat(rows), 2);
    }

    #[test]
    fn scalar_solve_round_trip() {
        let s = |n: i64| ExactScalar::from_int(n);
        let cols = vec![
            vec![s(1), s(0), s(2)],
            vec![s(1), s(1), s(0)],
        ];
        let target = vec![s(5), s(3), s(4)];
        let sol = solve_columns(&cols, &target).unwrap();
        assert_eq!(sol, vec![s(2), s(3)]);
        let bad = vec![s(1), s(0), s(0)];
        assert!(solve_columns(&cols, &bad).is_err());
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let s = |n: i64| ExactScalar::from_int(n);
        let m = vec![
            vec![s(2), s(1), s(0)],
            vec![s(1), s(3), s(4)],
            vec![s(0), s(4), s(5)],
        ];
        // det = 2(15-16) - 1(5-0) = -7
        assert_eq!(bareiss_det(m), s(-7));
        let sp = ExactScalar::sqrt_pi();
        let m2 = vec![
            vec![sp.clone(), s(1)],
            vec![s(1), sp.clone()],
        ];
        assert_eq!(bareiss_det(m2), &(&sp * &sp) - &s(1));
    }
}
