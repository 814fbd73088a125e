//! Cyclic tridiagonal systems.
//!
//! Row `i` reads `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`
//! with indices taken mod `n`, so `lower[0]` is the top-right corner and
//! `upper[n-1]` the bottom-left one. The solver factors the tridiagonal part
//! once and removes the corners with a Sherman–Morrison rank-one update.

use crate::error::{Error, Result};

/// Relative residual accepted by [`CyclicTridiag::solve`].
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Factorisation reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct CyclicFactor<'a> {
    system: &'a CyclicTridiag,
    gamma: f64,
    // Modified Thomas coefficients of the corner-free matrix.
    upper_mod: Vec<f64>,
    pivot: Vec<f64>,
    // Solution of the auxiliary system for the rank-one correction.
    z: Vec<f64>,
    vz: f64,
}

impl CyclicTridiag {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Self {
        assert!(lower.len() == diag.len() && diag.len() == upper.len());
        CyclicTridiag { lower, diag, upper }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `min_i (|diag_i| − |lower_i| − |upper_i|)`; positive iff strictly
    /// diagonally dominant by rows.
    pub fn dominance_margin(&self) -> f64 {
        (0..self.len())
            .map(|i| self.diag[i].abs() - self.lower[i].abs() - self.upper[i].abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                self.lower[i] * x[(i + n - 1) % n]
                    + self.diag[i] * x[i]
                    + self.upper[i] * x[(i + 1) % n]
            })
            .collect()
    }

    /// `‖M x − rhs‖∞`.
    pub fn residual(&self, x: &[f64], rhs: &[f64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn factor(&self) -> Result<CyclicFactor<'_>> {
        let n = self.len();
        if n < 3 {
            return Err(Error::SolveFailure(format!(
                "cyclic system needs n >= 3, got {n}"
            )));
        }
        let margin = self.dominance_margin();
        if !(margin > 0.0) {
            return Err(Error::SolveFailure(format!(
                "matrix is not strictly diagonally dominant (margin {margin:e})"
            )));
        }
        let top_right = self.lower[0];
        let bottom_left = self.upper[n - 1];
        let gamma = -self.diag[0];
        let mut diag = self.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= bottom_left * top_right / gamma;

        let mut upper_mod = vec![0.0; n];
        let mut pivot = vec![0.0; n];
        pivot[0] = diag[0];
        upper_mod[0] = self.upper[0] / pivot[0];
        for i in 1..n {
            pivot[i] = diag[i] - self.lower[i] * upper_mod[i - 1];
            if pivot[i] == 0.0 || !pivot[i].is_finite() {
                return Err(Error::SolveFailure(format!("zero pivot at row {i}")));
            }
            upper_mod[i] = self.upper[i] / pivot[i];
        }

        let mut factor = CyclicFactor {
            system: self,
            gamma,
            upper_mod,
            pivot,
            z: Vec::new(),
            vz: 0.0,
        };
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = bottom_left;
        let z = factor.thomas(&u);
        factor.vz = z[0] + top_right / gamma * z[n - 1];
        factor.z = z;
        Ok(factor)
    }

    /// Solves `M x = rhs`, checking dominance and the residual.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.factor()?.solve(rhs)
    }
}

impl CyclicFactor<'_> {
    fn thomas(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let lower = &self.system.lower;
        let mut y = vec![0.0; n];
        y[0] = rhs[0] / self.pivot[0];
        for i in 1..n {
            y[i] = (rhs[i] - lower[i] * y[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= self.upper_mod[i] * y[i + 1];
        }
        y
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.system.len();
        if rhs.len() != n {
            return Err(Error::SolveFailure(format!(
                "rhs has length {}, expected {n}",
                rhs.len()
            )));
        }
        let mut x = self.thomas(rhs);
        let top_right = self.system.lower[0];
        let vy = x[0] + top_right / self.gamma * x[n - 1];
        let k = vy / (1.0 + self.vz);
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= k * zi;
        }
        let scale = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let res = self.system.residual(&x, rhs);
        if !(res <= RESIDUAL_TOL * scale) {
            return Err(Error::SolveFailure(format!(
                "residual {res:e} exceeds {RESIDUAL_TOL:e}·{scale:e}"
            )));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let n = 5;
        let m = CyclicTridiag::new(vec![0.0; n], vec![1.0; n], vec![0.0; n]);
        let rhs = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(m.solve(&rhs).unwrap(), rhs);
    }

    #[test]
    fn small_hand_system() {
        // 4 on the diagonal, 1 everywhere cyclically adjacent: the all-ones
        // vector maps to 6.
        let n = 6;
        let m = CyclicTridiag::new(vec![1.0; n], vec![4.0; n], vec![1.0; n]);
        let x = m.solve(&vec![6.0; n]).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_non_dominant() {
        let m = CyclicTridiag::new(vec![1.0; 4], vec![2.0; 4], vec![1.0; 4]);
        assert!(matches!(m.solve(&[1.0; 4]), Err(Error::SolveFailure(_))));
    }

    #[test]
    fn factor_reuse_matches_direct() {
        let m = CyclicTridiag::new(
            vec![0.3, -0.2, 0.1, 0.4, -0.5],
            vec![2.0, 1.5, -1.8, 2.2, 1.9],
            vec![-0.7, 0.6, 0.9, -0.3, 0.2],
        );
        let f = m.factor().unwrap();
        for rhs in [[1.0, 2.0, 3.0, 4.0, 5.0], [0.0, -1.0, 0.5, 0.0, 2.0]] {
            assert_eq!(f.solve(&rhs).unwrap(), m.solve(&rhs).unwrap());
        }
    }
}
