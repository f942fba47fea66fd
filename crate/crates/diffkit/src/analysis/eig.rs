//! Dependency-free symmetric eigenvalue solvers for the 2x2 and 3x3
//! certificate matrices.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EigError {
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {delta}")]
    AsymmetricInput { i: usize, j: usize, delta: f64 },
}

fn check_sym3(m: &[[f64; 3]; 3]) -> Result<(), EigError> {
    let scale = 1.0 + m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    for i in 0..3 {
        for j in (i + 1)..3 {
            let delta = (m[i][j] - m[j][i]).abs();
            if delta > 1e-12 * scale {
                return Err(EigError::AsymmetricInput { i, j, delta });
            }
        }
    }
    Ok(())
}

fn check_sym2(m: &[[f64; 2]; 2]) -> Result<(), EigError> {
    let scale = 1.0 + m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let delta = (m[0][1] - m[1][0]).abs();
    if delta > 1e-12 * scale {
        return Err(EigError::AsymmetricInput { i: 0, j: 1, delta });
    }
    Ok(())
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending (quadratic formula).
pub fn sym2_eigenvalues(m: &[[f64; 2]; 2]) -> Result<[f64; 2], EigError> {
    check_sym2(m)?;
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (half_tr * half_tr - det).max(0.0).sqrt();
    Ok([half_tr - disc, half_tr + disc])
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending.
///
/// Closed-form trigonometric solution, with a cyclic-Jacobi fallback when
/// the characteristic discriminant is near-degenerate.
pub fn sym3_eigenvalues(m: &[[f64; 3]; 3]) -> Result<[f64; 3], EigError> {
    check_sym3(m)?;
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if p1 <= 1e-30 * (1.0 + scale * scale) {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return Ok(d);
    }
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (m[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    // near r = +-1 the acos branch is ill-conditioned (repeated roots)
    if r.abs() > 1.0 - 1e-10 {
        return Ok(jacobi3(*m));
    }
    let phi = r.acos() / 3.0;
    let e_hi = q + 2.0 * p * phi.cos();
    let e_lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let e_mid = 3.0 * q - e_hi - e_lo;
    Ok([e_lo, e_mid, e_hi])
}

/// Cyclic Jacobi for a symmetric 3x3 matrix; ascending eigenvalues.
fn jacobi3(mut a: [[f64; 3]; 3]) -> [f64; 3] {
    for _sweep in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if off <= (1e-15 * (1.0 + scale)).powi(2) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() <= 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut g = [[0.0f64; 3]; 3];
            for i in 0..3 {
                g[i][i] = 1.0;
            }
            g[p][p] = c;
            g[q][q] = c;
            g[p][q] = s;
            g[q][p] = -s;
            // a = g^T a g
            let mut tmp = [[0.0f64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    tmp[i][j] = (0..3).map(|k| g[k][i] * a[k][j]).sum();
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    a[i][j] = (0..3).map(|k| tmp[i][k] * g[k][j]).sum();
                }
            }
        }
    }
    let mut d = [a[0][0], a[1][1], a[2][2]];
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    d
}

/// Smallest eigenvalue of a symmetric 3x3 matrix.
pub fn lambda_min_sym3(m: &[[f64; 3]; 3]) -> Result<f64, EigError> {
    Ok(sym3_eigenvalues(m)?[0])
}

/// Largest eigenvalue of a symmetric 3x3 matrix.
pub fn lambda_max_sym3(m: &[[f64; 3]; 3]) -> Result<f64, EigError> {
    Ok(sym3_eigenvalues(m)?[2])
}

/// Smallest eigenvalue of a symmetric 2x2 matrix.
pub fn lambda_min_sym2(m: &[[f64; 2]; 2]) -> Result<f64, EigError> {
    Ok(sym2_eigenvalues(m)?[0])
}

/// Largest eigenvalue of a symmetric 2x2 matrix.
pub fn lambda_max_sym2(m: &[[f64; 2]; 2]) -> Result<f64, EigError> {
    Ok(sym2_eigenvalues(m)?[1])
}
