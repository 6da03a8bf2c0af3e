//! Thin wrappers over nalgebra's dense factorizations.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative threshold for numerical rank decisions: `σ ≥ RANK_TOL · σ_max`.
pub const RANK_TOL: f64 = 1e-8;

/// Thin SVD `A = U diag(s) Vᵀ` with singular values in nonincreasing order.
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v_t: DMatrix<f64>,
}

pub fn svd(a: &DMatrix<f64>) -> Svd {
    // nalgebra's SVD is more robust on tall matrices
    if a.nrows() < a.ncols() {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v_t.transpose(),
            s: t.s,
            v_t: t.u.transpose(),
        };
    }
    let dec = a.clone().svd(true, true);
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested Vᵀ");
    let mut order: Vec<usize> = (0..dec.singular_values.len()).collect();
    order.sort_by(|&x, &y| dec.singular_values[y].total_cmp(&dec.singular_values[x]));
    Svd {
        u: DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]),
        s: order.iter().map(|&j| dec.singular_values[j]).collect(),
        v_t: DMatrix::from_fn(order.len(), v_t.ncols(), |i, j| v_t[(order[i], j)]),
    }
}

/// Number of singular values at or above `RANK_TOL · σ_max`.
pub fn numerical_rank(s: &[f64]) -> usize {
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x >= RANK_TOL * smax).count()
}

/// Flips column signs so the largest-magnitude entry of each column is
/// positive. Returns the applied signs.
pub fn canonicalize_columns(m: &mut DMatrix<f64>) -> Vec<f64> {
    (0..m.ncols())
        .map(|j| {
            let s = column_sign(m.column(j).iter().copied());
            if s < 0.0 {
                m.column_mut(j).neg_mut();
            }
            s
        })
        .collect()
}

/// Sign of the largest-magnitude entry (first one on ties); `1` for a zero vector.
pub fn column_sign(values: impl Iterator<Item = f64>) -> f64 {
    let mut best = 0.0f64;
    for v in values {
        if v.abs() > best.abs() {
            best = v;
        }
    }
    if best < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Least-squares solution of `X · G = R` for symmetric positive
/// semidefinite `G`, via the pseudo-inverse.
pub fn solve_right_psd(r: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(g.clone());
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let inv = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| if l > 1e-14 * lmax { 1.0 / l } else { 0.0 }),
    );
    let q = &eig.eigenvectors;
    let g_pinv = q * DMatrix::from_diagonal(&inv) * q.transpose();
    r * g_pinv
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix, sorted by
/// nonincreasing eigenvalue.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let q = &eig.eigenvectors;
    (
        order.iter().map(|&j| eig.eigenvalues[j]).collect(),
        DMatrix::from_fn(q.nrows(), order.len(), |i, j| q[(i, order[j])]),
    )
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_is_sorted_and_reconstructs() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0]);
        let d = svd(&a);
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        let back = &d.u * DMatrix::from_diagonal(&DVector::from_vec(d.s.clone())) * &d.v_t;
        assert!(max_abs(&(back - a)) < 1e-12);
    }

    #[test]
    fn rank_threshold() {
        assert_eq!(numerical_rank(&[1.0, 1e-7, 1e-9]), 2);
        assert_eq!(numerical_rank(&[0.0, 0.0]), 0);
    }

    #[test]
    fn canonical_signs() {
        let mut m = DMatrix::from_row_slice(2, 2, &[0.1, 1.0, -0.9, 0.2]);
        let s = canonicalize_columns(&mut m);
        assert_eq!(s, vec![-1.0, 1.0]);
        assert_eq!(m[(1, 0)], 0.9);
    }
}
