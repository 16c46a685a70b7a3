//! Thomas algorithm with a reusable factorization.

use crate::error::{Error, Result};

/// LU factorization of a tridiagonal matrix with sub-diagonal `a`,
/// diagonal `b` and super-diagonal `c` (`a[0]` and `c[n-1]` unused).
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    a: Vec<f64>,
    c_prime: Vec<f64>,
    inv_denom: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(a: &[f64], b: &[f64], c: &[f64]) -> Result<Self> {
        let n = b.len();
        if a.len() != n || c.len() != n || n == 0 {
            return Err(Error::InvalidParameter("tridiagonal bands must have equal nonzero length".into()));
        }
        let mut c_prime = vec![0.0; n];
        let mut inv_denom = vec![0.0; n];
        let mut prev_c = 0.0;
        for i in 0..n {
            let denom = if i == 0 { b[0] } else { b[i] - a[i] * prev_c };
            if denom.abs() < 1e-300 {
                return Err(Error::SolverFailure("singular tridiagonal system".into()));
            }
            inv_denom[i] = 1.0 / denom;
            c_prime[i] = if i + 1 < n { c[i] * inv_denom[i] } else { 0.0 };
            prev_c = c_prime[i];
        }
        Ok(Self { a: a.to_vec(), c_prime, inv_denom })
    }

    pub fn len(&self) -> usize {
        self.inv_denom.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_denom.is_empty()
    }

    /// Solves in place: on return `d` holds the solution.
    pub fn solve_in_place(&self, d: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(d.len(), n);
        d[0] *= self.inv_denom[0];
        for i in 1..n {
            d[i] = (d[i] - self.a[i] * d[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            d[i] -= self.c_prime[i] * d[i + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_against_multiplication() {
        let n = 7;
        let a: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { -1.0 - 0.1 * i as f64 }).collect();
        let b: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let c: Vec<f64> = (0..n).map(|i| if i + 1 == n { 0.0 } else { -0.5 }).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.0).collect();
        let mut d = vec![0.0; n];
        for i in 0..n {
            d[i] = b[i] * x[i];
            if i > 0 {
                d[i] += a[i] * x[i - 1];
            }
            if i + 1 < n {
                d[i] += c[i] * x[i + 1];
            }
        }
        let t = Tridiagonal::new(&a, &b, &c).unwrap();
        t.solve_in_place(&mut d);
        for i in 0..n {
            assert!((d[i] - x[i]).abs() < 1e-13);
        }
    }
}
