//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest `n + m` (or state count) handled by the dense routines.
pub const DENSE_CAP: usize = 2000;

/// Residual above which one step of iterative refinement is applied.
pub const REFINE_THRESHOLD: f64 = 1e-9;

pub fn guard_size(size: usize) -> Result<()> {
    if size > DENSE_CAP {
        return Err(Error::TooLarge {
            size,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

/// Solves `a x = b` by LU with partial pivoting, refining once when the
/// infinity-norm residual exceeds [`REFINE_THRESHOLD`]. Returns the solution
/// and its final residual.
pub fn solve_refined(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let lu = a.clone().lu();
    let mut x = lu
        .solve(b)
        .ok_or_else(|| Error::Singular(format!("{}x{} system", a.nrows(), a.ncols())))?;
    let mut r = b - a * &x;
    let mut res = r.amax();
    if res > REFINE_THRESHOLD {
        if let Some(dx) = lu.solve(&r) {
            x += dx;
            r = b - a * &x;
            res = r.amax();
        }
    }
    if !res.is_finite() {
        return Err(Error::Singular("non-finite solution".into()));
    }
    Ok((x, res))
}

/// `m^k` by repeated squaring.
pub fn power(m: &DMatrix<f64>, mut k: usize) -> DMatrix<f64> {
    let mut result = DMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Largest deviation of a row sum from 1.
pub fn row_stochastic_error(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| (r.sum() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Divides each row by its sum. Rows summing to zero are left untouched.
pub fn normalize_rows(m: &mut DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        let s = row.sum();
        if s > 0.0 {
            row /= s;
        }
    }
}

/// Stationary law of an irreducible row-stochastic matrix: solves
/// `π (P - I) = 0` with one equation replaced by `Σ π = 1`.
pub fn stationary_distribution(p: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let (pi, _) = solve_refined(&a, &b)?;
    Ok(pi)
}

/// Pairwise (cascade) summation; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Sample mean and unbiased variance via two pairwise passes.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, pairwise_sum(&sq) / (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![3.0, 5.0]);
        let (x, res) = solve_refined(&a, &b).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!(res < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(solve_refined(&a, &DVector::from_vec(vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn stationary_of_two_state_chain() {
        let p = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.3, 0.7]);
        let pi = stationary_distribution(&p).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn moments() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        let (m, v) = mean_variance(&xs);
        assert_eq!(m, 50.5);
        assert!((v - 841.6666666666666).abs() < 1e-9);
        assert!(guard_size(DENSE_CAP + 1).is_err());
    }
}
