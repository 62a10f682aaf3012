//! Exact dense linear algebra over a coefficient field.

use std::cmp::Ordering;

use crate::scalar::Coefficient;

/// Inverse of a square matrix by Gauss-Jordan elimination, `None` if singular.
pub fn invert<C: Coefficient>(matrix: &[Vec<C>]) -> Option<Vec<Vec<C>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<C>> = matrix.to_vec();
    let mut inv: Vec<Vec<C>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { C::one() } else { C::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inverse();
        for j in 0..n {
            a[col][j] *= &p;
            inv[col][j] *= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = C::product(&f, &a[col][j]);
                a[r][j] -= &t;
                let t = C::product(&f, &inv[col][j]);
                inv[r][j] -= &t;
            }
        }
    }
    Some(inv)
}

pub fn determinant<C: Coefficient>(matrix: &[Vec<C>]) -> C {
    let n = matrix.len();
    let mut a: Vec<Vec<C>> = matrix.to_vec();
    let mut det = C::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return C::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        let p = a[col][col].inverse();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = C::product(&a[r][col], &p);
            for j in col..n {
                let t = C::product(&f, &a[col][j]);
                a[r][j] -= &t;
            }
        }
    }
    det
}

/// Inertia `(positives, negatives, zeros)` of a Hermitian matrix.
///
/// Symmetric elimination `H ↦ P* H P` over the field; no eigenvalues are
/// computed. When every remaining diagonal entry vanishes, a pivot is
/// manufactured from an off-diagonal entry with `e_k + e_j` or `e_k + i e_j`.
pub fn hermitian_inertia<C: Coefficient>(matrix: &[Vec<C>]) -> (usize, usize, usize) {
    let n = matrix.len();
    let mut h: Vec<Vec<C>> = matrix.to_vec();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if h[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !h[j][j].is_zero()) {
                h.swap(k, j);
                for row in h.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !h[k][j].is_zero()) {
                // v = e_k + c e_j has v* H v = 2 Re(c H_kj)
                let two_re = h[k][j].clone() + h[k][j].conj();
                let c = if !two_re.is_zero() {
                    C::one()
                } else {
                    C::imaginary_unit().expect("Hermitian matrix with imaginary entries")
                };
                add_congruent(&mut h, k, j, &c);
            }
        }
        if h[k][k].is_zero() {
            continue;
        }
        match h[k][k].real_sign() {
            Ordering::Greater => pos += 1,
            Ordering::Less => neg += 1,
            Ordering::Equal => unreachable!("Hermitian diagonal is real"),
        }
        let p = h[k][k].inverse();
        for r in k + 1..n {
            if h[r][k].is_zero() {
                continue;
            }
            // row_r -= f row_k ; col_r -= conj(f) col_k
            let f = C::product(&h[r][k], &p);
            let fc = f.conj();
            for j in 0..n {
                let t = C::product(&f, &h[k][j]);
                h[r][j] -= &t;
            }
            for i in 0..n {
                let t = C::product(&fc, &h[i][k]);
                h[i][r] -= &t;
            }
        }
    }
    (pos, neg, n - pos - neg)
}

/// `H ↦ P* H P` with `P = I + c E_{jk}` (column k += c column j).
fn add_congruent<C: Coefficient>(h: &mut [Vec<C>], k: usize, j: usize, c: &C) {
    let n = h.len();
    for row in h.iter_mut() {
        let t = C::product(c, &row[j]);
        row[k] += &t;
    }
    let cc = c.conj();
    for col in 0..n {
        let t = C::product(&cc, &h[j][col]);
        h[k][col] += &t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;
    use num_traits::{One, Zero};

    fn m(rows: &[&[i64]]) -> Vec<Vec<G>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| G::from(v)).collect())
            .collect()
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = invert(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = G::zero();
                for k in 0..3 {
                    s += &(&a[i][k] * &inv[k][j]);
                }
                assert_eq!(s, if i == j { G::one() } else { G::zero() });
            }
        }
        assert!(invert(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn determinant_matches_cofactor() {
        let a = m(&[&[0, 1, 2], &[3, 0, 1], &[1, 1, 0]]);
        // 0*(0-1) - 1*(0-1) + 2*(3-0) = 7
        assert_eq!(determinant(&a), G::from(7));
    }

    #[test]
    fn inertia_of_diagonal_and_hyperbolic() {
        assert_eq!(hermitian_inertia(&m(&[&[1, 0], &[0, -1]])), (1, 1, 0));
        assert_eq!(hermitian_inertia(&m(&[&[0, 1], &[1, 0]])), (1, 1, 0));
        assert_eq!(hermitian_inertia(&m(&[&[1, 0], &[0, 0]])), (1, 0, 1));
        let i = G::i();
        let h = vec![vec![G::zero(), i.clone()], vec![-i, G::zero()]];
        assert_eq!(hermitian_inertia(&h), (1, 1, 0));
    }
}
