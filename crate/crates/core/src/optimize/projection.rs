//! Euclidean projections onto the probability simplex and the set of density
//! matrices, and the real coordinate system used for Hermitian matrices.

use std::f64::consts::SQRT_2;

use crate::linalg::{eigh, CMatrix, C64};

/// Projection onto `{q : q_i >= 0, Σ q_i = 1}` by the sorted-threshold rule.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Real coordinates whose Euclidean norm equals the Frobenius norm:
/// diagonal entries first, then `√2 Re`, `√2 Im` of the strict upper triangle.
pub fn coords_from_hermitian(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let mut x = Vec::with_capacity(d * d);
    for i in 0..d {
        x.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            x.push(SQRT_2 * m[(i, j)].re);
            x.push(SQRT_2 * m[(i, j)].im);
        }
    }
    x
}

pub fn hermitian_from_coords(x: &[f64], d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(x[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            let z = C64::new(x[k], x[k + 1]) / SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Projection onto the density matrices in Frobenius distance: the
/// eigenvalues are projected onto the simplex, eigenvectors kept.
pub fn project_density(x: &[f64], d: usize) -> Vec<f64> {
    let m = hermitian_from_coords(x, d);
    let Ok(e) = eigh(&m) else {
        return coords_from_hermitian(&(CMatrix::identity(d, d) / C64::new(d as f64, 0.0)));
    };
    let p = project_simplex(&e.values);
    let u = &e.vectors;
    let mut out = CMatrix::zeros(d, d);
    for (k, &pk) in p.iter().enumerate() {
        if pk > 0.0 {
            let v = u.column(k);
            out += (v * v.adjoint()) * C64::new(pk, 0.0);
        }
    }
    coords_from_hermitian(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simplex_projection_cases() {
        assert_eq!(project_simplex(&[0.3, 0.7]), vec![0.3, 0.7]);
        let p = project_simplex(&[2.0, 0.0]);
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        for v in p {
            assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-15);
        }
        // invariant under constant shifts
        let a = project_simplex(&[0.1, -0.4, 0.9]);
        let b = project_simplex(&[5.1, 4.6, 5.9]);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn coordinates_are_isometric() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.2, 0.0), C64::new(0.3, -0.1), C64::new(0.3, 0.1), C64::new(-1.0, 0.0)],
        );
        let x = coords_from_hermitian(&m);
        let n2: f64 = x.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(n2.sqrt(), m.norm(), epsilon = 1e-14);
        assert_abs_diff_eq!((hermitian_from_coords(&x, 2) - m).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn density_projection_fixes_states() {
        let rho = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.6, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.4, 0.0)],
        );
        let x = coords_from_hermitian(&rho);
        let y = project_density(&x, 2);
        for (a, b) in x.iter().zip(&y) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let z = hermitian_from_coords(&project_density(&[3.0, -1.0, 0.0, 0.0], 2), 2);
        assert_abs_diff_eq!(z[(0, 0)].re, 1.0, epsilon = 1e-12);
    }
}
