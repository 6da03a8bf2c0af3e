//! Random tensor generators and the worked example systems.

use nalgebra::DMatrix;
use rand::Rng;

use crate::tensor::DenseTensor;

pub fn uniform<R: Rng + ?Sized>(dims: &[usize], lo: f64, hi: f64, rng: &mut R) -> DenseTensor {
    DenseTensor::from_fn(dims, |_| rng.gen_range(lo..hi))
}

/// Uniform(-1, 1) cubical tensor averaged over index permutations.
pub fn supersymmetric<R: Rng + ?Sized>(n: usize, order: usize, rng: &mut R) -> DenseTensor {
    uniform(&vec![n; order], -1.0, 1.0, rng)
        .symmetrize()
        .expect("cubical by construction")
}

/// Uniform(0, 1) cubical tensor averaged over index permutations.
pub fn nonnegative_supersymmetric<R: Rng + ?Sized>(n: usize, order: usize, rng: &mut R) -> DenseTensor {
    uniform(&vec![n; order], 0.0, 1.0, rng)
        .symmetrize()
        .expect("cubical by construction")
}

pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = crate::tensor::norm2(&v);
        if norm > 1e-3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random `n × n` orthogonal matrix (QR of a Gaussian-ish matrix).
pub fn orthogonal_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

/// `Σ_j λ_j u_j^{∘k}` where `u_j` are the columns of `u`.
pub fn odeco_tensor(values: &[f64], u: &DMatrix<f64>, order: usize) -> DenseTensor {
    let n = u.nrows();
    let mut t = DenseTensor::zeros(&vec![n; order]);
    for (j, &lambda) in values.iter().enumerate() {
        let col: Vec<f64> = u.column(j).iter().copied().collect();
        t.axpy(lambda, &DenseTensor::symmetric_rank_one(&col, order))
            .expect("same shape");
    }
    t
}

/// The order-4, two-dimensional cubic system
///
/// ```text
/// ẋ₁ = -1.2593 x₁³ + 1.6630 x₁²x₂ - 1.5554 x₁x₂² - 0.1386 x₂³
/// ẋ₂ =  0.5543 x₁³ - 1.5554 x₁²x₂ - 0.4158 x₁x₂² - 0.7036 x₂³
/// ```
///
/// in exact form: `-u^{∘4} - 2 v^{∘4}` with `u = (√2, √7)/3`,
/// `v = (-√7, √2)/3`. Its entries round to the 4-decimal tensor of
/// [`cubic_system_tensor_rounded`], from which the coefficients above are
/// formed. The rounded tensor is only odeco to about 2e-5, so the exact
/// generator is the one the stability classifiers are run on.
pub fn cubic_system_tensor() -> DenseTensor {
    let (values, basis) = cubic_system_odeco();
    odeco_tensor(&values, &basis, 4)
}

/// Planted odeco factors `(λ, U)` of [`cubic_system_tensor`].
pub fn cubic_system_odeco() -> (Vec<f64>, DMatrix<f64>) {
    let (c, s) = (2f64.sqrt() / 3.0, 7f64.sqrt() / 3.0);
    let basis = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    (vec![-1.0, -2.0], basis)
}

/// The same system with every entry rounded to four decimals, as printed.
/// Entries depend only on how many indices equal 1.
pub fn cubic_system_tensor_rounded() -> DenseTensor {
    const BY_COUNT: [f64; 5] = [-1.2593, 0.5543, -0.5185, -0.1386, -0.7037];
    DenseTensor::from_fn(&[2, 2, 2, 2], |ix| BY_COUNT[ix.iter().sum::<usize>()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::StructureKind;

    #[test]
    fn exact_cubic_system_rounds_to_printed_coefficients() {
        let exact = cubic_system_tensor();
        let rounded = cubic_system_tensor_rounded();
        for (a, b) in exact.data().iter().zip(rounded.data()) {
            assert_eq!((a * 1e4).round() / 1e4, *b);
        }
        assert!(exact.structure_check(StructureKind::Supersymmetric, 1e-14).unwrap());

        // polynomial coefficients of ẋ₁ and ẋ₂
        let c: Vec<f64> = (0..5).map(|m| {
            let mut ix = [0usize; 4];
            ix.iter_mut().take(m).for_each(|i| *i = 1);
            exact.at(&ix)
        }).collect();
        // printed coefficients are three times the rounded entries
        let close = |v: f64, printed: f64| (v - printed).abs() < 2e-4;
        assert!(close(3.0 * c[1], 1.6630));
        assert!(close(3.0 * c[2], -1.5554));
        assert!(close(3.0 * c[3], -0.4158));
        assert!(close(c[0], -1.2593));
        assert!(close(c[4], -0.7036));
    }

    #[test]
    fn polynomial_at_first_basis_vector() {
        let y = cubic_system_tensor().apply_polynomial(&[1.0, 0.0]).unwrap();
        assert!((y[0] + 1.2593).abs() < 5e-5);
        assert!((y[1] - 0.5543).abs() < 5e-5);
    }
}
