//! Sylvester resultants with polynomial entries, evaluated by fraction-free
//! (Bareiss) elimination.

use num_traits::Zero;

use super::poly::Poly;
use crate::error::{Error, Result};

/// Sylvester matrix of `p`, `q` with respect to variable `idx`. Entries are
/// polynomials over the full variable list (the eliminated variable does not
/// occur in them).
pub fn sylvester_matrix(p: &Poly, q: &Poly, idx: usize) -> Vec<Vec<Poly>> {
    let pc = p.coeffs_in(idx);
    let qc = q.coeffs_in(idx);
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    let size = m + n;
    let zero = Poly::zero(p.vars());
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in pc.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in qc.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant by Bareiss elimination; every division is exact.
pub fn determinant(mut m: Vec<Vec<Poly>>, vars: &[String]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::constant(vars, num_traits::One::one());
    }
    let mut negate = false;
    let mut prev: Option<Poly> = None;
    for k in 0..n - 1 {
        // Sparsest nonzero pivot keeps intermediate minors small.
        let pivot = (k..n).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| m[i][k].len());
        let Some(pr) = pivot else {
            return Poly::zero(vars);
        };
        if pr != k {
            m.swap(pr, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = match &prev {
                    Some(d) => num.div_exact(d).expect("Bareiss division is exact"),
                    None => num,
                };
            }
            m[i][k] = Poly::zero(vars);
        }
        prev = Some(m[k][k].clone());
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Resultant of `p` and `q` with respect to `var`, as a polynomial in the
/// remaining variables. Not sign-normalized.
pub fn resultant_in(p: &Poly, q: &Poly, var: &str) -> Result<Poly> {
    p.check_same_vars(q)?;
    let idx = p.var_index(var).ok_or_else(|| Error::EliminationVar(var.into()))?;
    let positive = |f: &Poly| f.degree_in(idx).is_some_and(|d| d > 0);
    if !positive(p) || !positive(q) {
        return Err(Error::EliminationVar(var.into()));
    }
    let det = determinant(sylvester_matrix(p, q, idx), p.vars());
    debug_assert!(det.terms().all(|(e, c)| e[idx] == 0 && !c.is_zero()));
    Ok(det.drop_var(idx))
}
