//! Small dense complex linear algebra: LU with partial pivoting, and a
//! Householder least-squares solve. Sizes here are at most a few hundred.

use crate::error::{Error, Result};
use crate::real::{cabs, Real, C};
use num_traits::Zero;

/// Row-major square matrix.
#[derive(Debug, Clone)]
pub struct Dense<T: Real> {
    pub n: usize,
    pub a: Vec<C<T>>,
}

impl<T: Real> Dense<T> {
    pub fn zeros(n: usize) -> Self {
        Dense { n, a: vec![C::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &C<T> {
        &self.a[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut C<T> {
        &mut self.a[i * self.n + j]
    }

    pub fn mul(&self, o: &Dense<T>) -> Dense<T> {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.clone() * o.at(k, j).clone();
                    *out.at_mut(i, j) = out.at(i, j).clone() + v;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| cabs(z).to_f64()).fold(0.0, f64::max)
    }
}

pub struct Lu<T: Real> {
    lu: Dense<T>,
    perm: Vec<usize>,
    /// `max |u_ii| / min |u_ii|`, a cheap conditioning indicator.
    pub pivot_ratio: f64,
}

impl<T: Real> Lu<T> {
    pub fn factor(mut m: Dense<T>) -> Result<Lu<T>> {
        let n = m.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pmax = 0.0f64;
        let mut pmin = f64::INFINITY;
        for k in 0..n {
            let mut best = k;
            let mut best_abs = cabs(m.at(k, k)).to_f64();
            for i in k + 1..n {
                let v = cabs(m.at(i, k)).to_f64();
                if v > best_abs {
                    best = i;
                    best_abs = v;
                }
            }
            if best_abs == 0.0 {
                return Err(Error::Singular { cond: f64::INFINITY });
            }
            if best != k {
                for j in 0..n {
                    m.a.swap(k * n + j, best * n + j);
                }
                perm.swap(k, best);
            }
            pmax = pmax.max(best_abs);
            pmin = pmin.min(best_abs);
            let piv = m.at(k, k).clone();
            for i in k + 1..n {
                let f = m.at(i, k).clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = f.clone() * m.at(k, j).clone();
                    *m.at_mut(i, j) = m.at(i, j).clone() - v;
                }
                *m.at_mut(i, k) = f;
            }
        }
        let pivot_ratio = if n == 0 { 1.0 } else { pmax / pmin };
        if !pivot_ratio.is_finite() || pivot_ratio * T::epsilon().to_f64() > 1.0 {
            return Err(Error::Singular { cond: pivot_ratio });
        }
        Ok(Lu { lu: m, perm, pivot_ratio })
    }

    pub fn solve_vec(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.lu.n;
        let mut x: Vec<C<T>> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let v = self.lu.at(i, k).clone() * x[k].clone();
                x[i] = x[i].clone() - v;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = self.lu.at(i, k).clone() * x[k].clone();
                x[i] = x[i].clone() - v;
            }
            x[i] = x[i].clone() / self.lu.at(i, i).clone();
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &Dense<T>) -> Dense<T> {
        let n = b.n;
        let mut out = Dense::zeros(n);
        for j in 0..n {
            let col: Vec<C<T>> = (0..n).map(|i| b.at(i, j).clone()).collect();
            let x = self.solve_vec(&col);
            for (i, v) in x.into_iter().enumerate() {
                *out.at_mut(i, j) = v;
            }
        }
        out
    }
}

/// Least squares `min ‖A x − b‖₂` for a tall real matrix via Householder QR.
/// Returns the solution and the ratio of extreme diagonal entries of `R`.
pub fn least_squares<T: Real>(rows: usize, cols: usize, a: &[T], b: &[C<T>]) -> Result<(Vec<C<T>>, f64)> {
    assert!(rows >= cols && a.len() == rows * cols && b.len() == rows);
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let idx = |i: usize, j: usize| i * cols + j;
    let mut diag = Vec::with_capacity(cols);
    for k in 0..cols {
        let mut norm = T::zero();
        for i in k..rows {
            norm = norm + a[idx(i, k)].clone() * a[idx(i, k)].clone();
        }
        let norm = norm.sqrt();
        if norm.is_zero() {
            return Err(Error::Singular { cond: f64::INFINITY });
        }
        let alpha = if a[idx(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|i| a[idx(i, k)].clone()).collect();
        v[0] = v[0].clone() - alpha.clone();
        let vnorm2 = v.iter().fold(T::zero(), |s, x| s + x.clone() * x.clone());
        if !vnorm2.is_zero() {
            for j in k..cols {
                let dot = (k..rows).fold(T::zero(), |s, i| s + v[i - k].clone() * a[idx(i, j)].clone());
                let f = T::from_i64(2) * dot / vnorm2.clone();
                for i in k..rows {
                    a[idx(i, j)] = a[idx(i, j)].clone() - f.clone() * v[i - k].clone();
                }
            }
            let dot = (k..rows).fold(C::zero(), |s: C<T>, i| s + b[i].clone() * v[i - k].clone());
            let f = dot * (T::from_i64(2) / vnorm2);
            for i in k..rows {
                b[i] = b[i].clone() - f.clone() * v[i - k].clone();
            }
        }
        diag.push(a[idx(k, k)].abs().to_f64());
    }
    let mut x: Vec<C<T>> = vec![C::zero(); cols];
    for i in (0..cols).rev() {
        let mut s = b[i].clone();
        for j in i + 1..cols {
            s = s - x[j].clone() * a[idx(i, j)].clone();
        }
        x[i] = s / a[idx(i, i)].clone();
    }
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((x, dmax / dmin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn lu_solves_a_complex_system() {
        let mut m = Dense::<f64>::zeros(3);
        let vals = [(1.0, 1.0), (2.0, 0.0), (0.0, -1.0), (0.5, 0.0), (0.0, 3.0), (1.0, 1.0), (4.0, 0.0), (1.0, 0.0), (2.0, 2.0)];
        for (k, &(re, im)) in vals.iter().enumerate() {
            m.a[k] = Complex64::new(re, im);
        }
        let x_true = vec![Complex64::new(1.0, -1.0), Complex64::new(0.5, 2.0), Complex64::new(-3.0, 0.0)];
        let b: Vec<Complex64> = (0..3).map(|i| (0..3).map(|j| m.at(i, j) * x_true[j]).sum()).collect();
        let lu = Lu::factor(m).unwrap();
        let x = lu.solve_vec(&b);
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = Dense::<f64>::zeros(2);
        assert!(matches!(Lu::factor(m), Err(Error::Singular { .. })));
    }

    #[test]
    fn least_squares_recovers_consistent_data() {
        let a = [1.0, 1.0, 1.0, 2.0, 1.0, 3.0, 1.0, 4.0];
        let b: Vec<Complex64> = (1..=4).map(|t| Complex64::new(2.0 + 0.5 * t as f64, -1.0)).collect();
        let (x, cond) = least_squares(4, 2, &a, &b).unwrap();
        assert!((x[0] - Complex64::new(2.0, -1.0)).norm() < 1e-13);
        assert!((x[1] - Complex64::new(0.5, 0.0)).norm() < 1e-13);
        assert!(cond > 1.0);
    }
}
