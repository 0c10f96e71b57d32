//! Nonnegative least squares via the Lawson-Hanson active-set method.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Optimality is declared when no inactive column has a dual value above
/// `KKT_REL_TOL * ||A^T b||_inf`.
pub const KKT_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    pub residual_sq_norm: f64,
    /// Active-set iterations spent (entering plus restricting steps).
    pub iterations: usize,
}

/// Minimize `||A x - b||` subject to `x >= 0`.
///
/// Deterministic: the entering column is the lowest-index maximal dual, and
/// every step is direct dense arithmetic, so identical inputs give
/// bit-identical solutions. Caps at `3 n` active-set iterations and returns
/// the best iterate inside the error on overrun.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<NnlsSolution> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("empty system".into()));
    }
    if b.len() != m {
        return Err(Error::InvalidParameter(format!(
            "right-hand side has {} rows, matrix has {m}",
            b.len()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite input".into()));
    }

    let tol = KKT_REL_TOL * (a.transpose() * b).amax();
    let max_iter = 3 * n;
    let mut x = DVector::<f64>::zeros(n);
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = vec![false; n];
    // Columns that produced a nonpositive coefficient on entry; cleared on
    // any successful pivot. Guards against floating-point cycling.
    let mut rejected = vec![false; n];
    let mut iterations = 0usize;

    loop {
        let w = a.transpose() * (b - a * &x);
        let mut enter: Option<(usize, f64)> = None;
        for j in 0..n {
            if !in_passive[j] && !rejected[j] && w[j] > tol {
                if enter.map_or(true, |(_, best)| w[j] > best) {
                    enter = Some((j, w[j]));
                }
            }
        }
        let Some((j_enter, _)) = enter else {
            break;
        };

        passive.push(j_enter);
        in_passive[j_enter] = true;

        loop {
            iterations += 1;
            if iterations > max_iter {
                let residual_sq_norm = (b - a * &x).norm_squared();
                return Err(Error::SolverFailure {
                    iterations: max_iter,
                    residual_sq_norm,
                    best: Box::new(NnlsSolution {
                        x: x.iter().copied().collect(),
                        residual_sq_norm,
                        iterations: max_iter,
                    }),
                });
            }

            let z = match passive_lsq(a, b, &passive) {
                Some(z) => z,
                None => {
                    // singular passive set: retract the newest column
                    let j = passive.pop().expect("passive set is nonempty");
                    in_passive[j] = false;
                    rejected[j] = true;
                    break;
                }
            };

            if passive.last() == Some(&j_enter) && passive.len() == z.len() {
                // freshly entered column failed to go positive: reject it
                // rather than cycle on a zero-length step
                if z[z.len() - 1] <= 0.0 && x[j_enter] == 0.0 {
                    let j = passive.pop().expect("nonempty");
                    in_passive[j] = false;
                    rejected[j] = true;
                    break;
                }
            }

            if z.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (idx, &j) in passive.iter().enumerate() {
                    x[j] = z[idx];
                }
                rejected.fill(false);
                break;
            }

            // restrict: step from x toward z until the first coefficient
            // hits zero, then drop every zeroed column
            let mut alpha = f64::INFINITY;
            for (idx, &j) in passive.iter().enumerate() {
                if z[idx] <= 0.0 {
                    let ratio = x[j] / (x[j] - z[idx]);
                    if ratio < alpha {
                        alpha = ratio;
                    }
                }
            }
            for (idx, &j) in passive.iter().enumerate() {
                x[j] += alpha * (z[idx] - x[j]);
            }
            let mut kept = Vec::with_capacity(passive.len());
            for &j in &passive {
                if x[j] > 0.0 {
                    kept.push(j);
                } else {
                    x[j] = 0.0;
                    in_passive[j] = false;
                }
            }
            passive = kept;
            if passive.is_empty() {
                break;
            }
        }
    }

    let residual_sq_norm = (b - a * &x).norm_squared();
    Ok(NnlsSolution {
        x: x.iter().copied().collect(),
        residual_sq_norm,
        iterations,
    })
}

/// Unconstrained least squares restricted to the given columns, via
/// Householder QR. `None` if the restricted matrix is numerically singular.
fn passive_lsq(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> Option<DVector<f64>> {
    let m = a.nrows();
    let p = cols.len();
    let sub = DMatrix::from_fn(m, p, |i, c| a[(i, cols[c])]);
    let qr = sub.qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if scale == 0.0 || r.diagonal().iter().any(|d| d.abs() < 1e-13 * scale) {
        return None;
    }
    let rhs = qr.q().transpose() * b;
    r.solve_upper_triangular(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_stream;
    use rand::RngExt;

    fn kkt_holds(a: &DMatrix<f64>, b: &DVector<f64>, x: &[f64]) -> bool {
        let xv = DVector::from_column_slice(x);
        let g = a.transpose() * (a * &xv - b);
        let tol = KKT_REL_TOL * (a.transpose() * b).amax().max(1e-30);
        x.iter()
            .zip(g.iter())
            .all(|(&xi, &gi)| if xi > 0.0 { gi.abs() <= tol.max(1e-7) } else { gi >= -tol })
    }

    #[test]
    fn identity_clamps_negative_components() {
        let a = DMatrix::identity(3, 3);
        let b = DVector::from_column_slice(&[1.0, -2.0, 3.0]);
        let sol = nnls(&a, &b).unwrap();
        for (got, want) in sol.x.iter().zip([1.0, 0.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{:?}", sol.x);
        }
        assert!((sol.residual_sq_norm - 4.0).abs() < 1e-12);
    }

    #[test]
    fn identity_with_nonnegative_rhs_is_exact() {
        let a = DMatrix::identity(4, 4);
        let b = DVector::from_column_slice(&[0.5, 0.0, 2.0, 1.0]);
        let sol = nnls(&a, &b).unwrap();
        for (got, want) in sol.x.iter().zip([0.5, 0.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{:?}", sol.x);
        }
        assert!(sol.residual_sq_norm < 1e-24);
    }

    #[test]
    fn anticorrelated_rhs_yields_zero_solution() {
        // every column has nonpositive correlation with b
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_column_slice(&[-1.0, -2.0]);
        let sol = nnls(&a, &b).unwrap();
        assert_eq!(sol.x, vec![0.0, 0.0]);
        assert!((sol.residual_sq_norm - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_shape_mismatch_and_nonfinite() {
        let a = DMatrix::identity(3, 3);
        let b = DVector::from_column_slice(&[1.0, 2.0]);
        assert!(nnls(&a, &b).is_err());
        let bad = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        let b1 = DVector::from_column_slice(&[1.0]);
        assert!(nnls(&bad, &b1).is_err());
    }

    #[test]
    fn duplicate_columns_stay_solvable() {
        // two identical columns: any split between them is optimal; the
        // solver must still satisfy KKT and the residual optimum
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 0.0, 0.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 1.0]);
        let sol = nnls(&a, &b).unwrap();
        assert!(sol.x.iter().all(|&v| v >= 0.0));
        assert!((sol.residual_sq_norm - 1.0).abs() < 1e-10);
    }

    /// Reference solution by exhaustive active-set enumeration: solve the
    /// unconstrained least squares on every column subset, keep the feasible
    /// ones, take the best objective.
    fn brute_force(a: &DMatrix<f64>, b: &DVector<f64>) -> (Vec<f64>, f64) {
        let n = a.ncols();
        let mut best_x = vec![0.0; n];
        let mut best_obj = b.norm_squared();
        for mask in 1u32..1 << n {
            let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, c| a[(i, cols[c])]);
            let svd = sub.clone().svd(true, true);
            let Ok(z) = svd.solve(b, 1e-12) else { continue };
            if z.iter().any(|&v| v < -1e-9) {
                continue;
            }
            let obj = (sub * &z - b).norm_squared();
            if obj < best_obj {
                best_obj = obj;
                best_x = vec![0.0; n];
                for (idx, &j) in cols.iter().enumerate() {
                    best_x[j] = z[idx].max(0.0);
                }
            }
        }
        (best_x, best_obj)
    }

    #[test]
    fn matches_exhaustive_enumeration_on_random_instances() {
        let mut rng = master_stream(0x1251);
        for instance in 0..10 {
            let (m, n) = (20, 12);
            let a = DMatrix::from_fn(m, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            // half the instances have a planted sparse nonnegative solution
            let b = if instance % 2 == 0 {
                let x0 = DVector::from_fn(n, |j, _| {
                    if j % 3 == 0 {
                        rng.random::<f64>() * 2.0
                    } else {
                        0.0
                    }
                });
                &a * x0 + DVector::from_fn(m, |_, _| (rng.random::<f64>() - 0.5) * 0.1)
            } else {
                DVector::from_fn(m, |_, _| rng.random::<f64>() * 2.0 - 1.0)
            };
            let sol = nnls(&a, &b).unwrap();
            let (bx, bobj) = brute_force(&a, &b);
            assert!(
                (sol.residual_sq_norm - bobj).abs() <= 1e-8 * bobj.max(1.0),
                "instance {instance}: solver {} vs brute {}",
                sol.residual_sq_norm,
                bobj
            );
            for j in 0..n {
                assert!(
                    (sol.x[j] - bx[j]).abs() < 1e-6,
                    "instance {instance}, x[{j}]: {} vs {}",
                    sol.x[j],
                    bx[j]
                );
            }
            assert!(kkt_holds(&a, &b, &sol.x), "instance {instance} violates KKT");
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let mut rng = master_stream(0xBEEF);
        let a = DMatrix::from_fn(30, 15, |_, _| rng.random::<f64>());
        let b = DVector::from_fn(30, |_, _| rng.random::<f64>());
        let s1 = nnls(&a, &b).unwrap();
        let s2 = nnls(&a, &b).unwrap();
        assert_eq!(s1.x, s2.x);
        assert_eq!(s1.residual_sq_norm, s2.residual_sq_norm);
    }
}
