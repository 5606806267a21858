use crate::linalg::Matrix;
use crate::real::Real;

/// Optional stabilisation of adapted covariances and log-scales.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Stability<F> {
    #[default]
    Off,
    /// Floor eigenvalues at `epsilon` and clamp `delta` to
    /// `[log epsilon, -log epsilon]`.
    Project { epsilon: F },
    /// Keep the previous state whenever the update leaves that set.
    Reject { epsilon: F },
}

/// Floors the eigenvalues of `cov` at `epsilon` and clamps `delta`.
///
/// Inputs already satisfying the constraints are returned unchanged.
pub fn project_stability<F: Real>(cov: &Matrix<F>, delta: F, epsilon: F) -> (Matrix<F>, F) {
    let (vals, vecs) = cov.symmetric_eigen();
    let lo = epsilon.ln();
    let delta = delta.max(lo).min(-lo);
    if vals.iter().all(|&v| v >= epsilon) {
        return (cov.clone(), delta);
    }
    let d = cov.rows();
    let mut out = Matrix::zeros(d, d);
    for (k, &v) in vals.iter().enumerate() {
        let lam = v.max(epsilon);
        for r in 0..d {
            for c in 0..d {
                out[(r, c)] += lam * vecs[(r, k)] * vecs[(c, k)];
            }
        }
    }
    out.symmetrize();
    // rounding in the reconstruction can dip just below the floor
    let (new_vals, _) = out.symmetric_eigen();
    let min = new_vals.iter().copied().fold(F::infinity(), F::min);
    if min < epsilon {
        let bump = epsilon - min;
        for i in 0..d {
            out[(i, i)] += bump;
        }
    }
    (out, delta)
}

/// Whether `(cov, delta)` lies in the stability set.
pub fn is_stable<F: Real>(cov: &Matrix<F>, delta: F, epsilon: F) -> bool {
    let lo = epsilon.ln();
    let (vals, _) = cov.symmetric_eigen();
    delta >= lo && delta <= -lo && vals.iter().all(|&v| v >= epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;

    #[test]
    fn floor_applied() {
        let cov = Matrix::from_diag(&[1e-12f64, 1.0]);
        let (p, _) = project_stability(&cov, 0.0, 1e-6);
        let (vals, _) = p.symmetric_eigen();
        assert_relative_eq!(vals[0], 1e-6, max_relative = 1e-9);
        assert_relative_eq!(vals[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn stable_input_unchanged() {
        let cov = Matrix::from_rows(&[vec![2.0f64, 0.3], vec![0.3, 1.0]]);
        let (p, delta) = project_stability(&cov, 0.7, 1e-6);
        assert_eq!(p, cov);
        assert_eq!(delta, 0.7);
    }

    #[test]
    fn delta_clamped() {
        let cov = Matrix::identity(1);
        let (_, delta) = project_stability(&cov, 100.0f64, 1e-6);
        assert_relative_eq!(delta, -(1e-6f64.ln()));
        let (_, delta) = project_stability(&cov, -100.0f64, 1e-6);
        assert_relative_eq!(delta, 1e-6f64.ln());
    }

    #[test]
    fn random_symmetric_matrices_are_floored() {
        let mut rng = RngStream::new(8, 0);
        let eps = 1e-3;
        for _ in 0..1000 {
            let d = 3;
            let mut m = Matrix::zeros(d, d);
            for r in 0..d {
                for c in 0..=r {
                    let v = f64::std_normal(&mut rng);
                    m[(r, c)] = v;
                    m[(c, r)] = v;
                }
            }
            let (p, _) = project_stability(&m, 0.0, eps);
            let na = nalgebra::DMatrix::from_row_slice(d, d, p.as_slice());
            let min = na.symmetric_eigen().eigenvalues.min();
            assert!(min >= eps * (1.0 - 1e-9), "{min}");
        }
    }
}
