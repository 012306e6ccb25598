//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation annihilates one off-diagonal pair `(p, q)`. The phase of
//! `a_pq` is first absorbed into a diagonal unitary so the remaining 2x2
//! problem is real symmetric, then the classical Jacobi angle is applied.
//! Only rows `p` and `q` are updated in place; the matching columns are
//! restored from Hermiticity, so every inner loop runs over contiguous memory.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to `‖M‖_F`.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-13;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column_vec(i)
    }

    /// `Σ f(λ_i) v_i v_i†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        // scaled = V · diag(f(λ)), then scaled · V†
        let mut scaled = self.vectors.clone();
        for r in 0..n {
            for c in 0..n {
                scaled[(r, c)] *= f(self.values[c]);
            }
        }
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += scaled[(i, k)] * self.vectors[(j, k)].conj();
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Full spectral decomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(M + M†)/2` when its Hermiticity defect is
/// within `1e-9·max(1, ‖M‖_F)`; larger defects are rejected.
pub fn eigh(m: &ComplexMatrix) -> Result<Spectrum> {
    let a = m.symmetrized()?;
    jacobi(a)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigh(m)?.min())
}

/// Frobenius-nearest positive semidefinite matrix: negative eigenvalues clipped to zero.
pub fn psd_project(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = eigh(m)?;
    if spec.min() >= 0.0 {
        return Ok(m.hermitian_part());
    }
    Ok(spec.reconstruct_with(|x| x.max(0.0)))
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += a[i * n + j].norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}

fn jacobi(a: ComplexMatrix) -> Result<Spectrum> {
    let n = a.rows();
    let scale = a.frobenius_norm();
    let threshold = OFF_DIAGONAL_THRESHOLD * scale;
    let mut a = a.into_vec();
    // Rows of `u` hold the conjugated eigenvectors (u = V†), so that
    // rotations update contiguous rows.
    let mut u = ComplexMatrix::identity(n).into_vec();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold || n < 2 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut u, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));

    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| u[order[c] * n + r].conj());
    Ok(Spectrum { values, vectors })
}

#[inline]
fn rotate(a: &mut [Complex64], u: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // Negligible against both diagonal entries: drop it instead of rotating.
    if app.abs() + 1e3 * b == app.abs() && aqq.abs() + 1e3 * b == aqq.abs() {
        a[p * n + q] = ZERO;
        a[q * n + p] = ZERO;
        return;
    }
    let phase = apq / b;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    // signum(0) is +1 for f64, so equal diagonals rotate by π/4.
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let s_phase = phase * s; // s·e^{iφ}
    let s_phase_conj = s_phase.conj(); // s·e^{-iφ}

    // Rows p and q of G†A; entries k ≠ p,q are final.
    let (row_p, row_q) = two_rows(a, n, p, q);
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let x = row_p[k];
        let y = row_q[k];
        row_p[k] = x * c - s_phase * y;
        row_q[k] = s_phase_conj * x + y * c;
    }
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        a[k * n + p] = a[p * n + k].conj();
        a[k * n + q] = a[q * n + k].conj();
    }
    a[p * n + p] = Complex64::new(app - t * b, 0.0);
    a[q * n + q] = Complex64::new(aqq + t * b, 0.0);
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;

    let (u_p, u_q) = two_rows(u, n, p, q);
    for k in 0..n {
        let x = u_p[k];
        let y = u_q[k];
        u_p[k] = x * c - s_phase * y;
        u_q[k] = s_phase_conj * x + y * c;
    }
}

#[inline]
fn two_rows(
    buf: &mut [Complex64],
    n: usize,
    p: usize,
    q: usize,
) -> (&mut [Complex64], &mut [Complex64]) {
    debug_assert!(p < q);
    let (head, tail) = buf.split_at_mut(q * n);
    (&mut head[p * n..(p + 1) * n], &mut tail[..n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_hermitian, rng_from_seed};

    fn unitary_defect(v: &ComplexMatrix) -> f64 {
        let n = v.rows();
        (&v.adjoint_mul(v) - &ComplexMatrix::identity(n)).frobenius_norm()
    }

    #[test]
    fn diagonal_input() {
        let s = eigh(&ComplexMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert_eq!(s.values, vec![1.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = eigh(&x).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-15);
        assert!((s.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_seed_7() {
        let m = random_hermitian(10, &mut rng_from_seed(7));
        let s = eigh(&m).unwrap();
        let err = (&s.reconstruct() - &m).frobenius_norm();
        assert!(err < 1e-10, "reconstruction error {err}");
        assert!(unitary_defect(&s.vectors) < 1e-10);
        for i in 0..10 {
            let v = s.vector(i);
            let mv = m.matvec(&v);
            let resid: f64 = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * s.values[i]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-10 * m.frobenius_norm());
        }
    }

    #[test]
    fn complex_phases_are_handled() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let mut m = ComplexMatrix::identity(2).scale(2.0);
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        m[(1, 0)] = Complex64::new(0.0, -1.0);
        let s = eigh(&m).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14 && (s.values[1] - 3.0).abs() < 1e-14);
        assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            eigh(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn degenerate_and_trivial_sizes() {
        let s = eigh(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert_eq!(s.values, vec![0.0; 4]);
        let s = eigh(&ComplexMatrix::identity(1).scale(5.0)).unwrap();
        assert_eq!(s.values, vec![5.0]);
        let s = eigh(&ComplexMatrix::zeros(0, 0)).unwrap();
        assert!(s.values.is_empty());
    }

    #[test]
    fn psd_project_clips() {
        let p = psd_project(&ComplexMatrix::diag_real(&[2.0, -1.0])).unwrap();
        assert!(p.approx_eq(&ComplexMatrix::diag_real(&[2.0, 0.0]), 1e-15));
    }

    #[test]
    fn psd_project_fixes_psd_input() {
        let mut rng = rng_from_seed(3);
        let g = random_hermitian(5, &mut rng);
        let p = g.matmul(&g);
        assert!(psd_project(&p).unwrap().approx_eq(&p, 1e-10));
    }
}
