//! Dense complex linear-algebra kernels shared by every carrier type.
//!
//! Everything here operates on small `DMatrix<Complex64>` values (at most
//! 2n x 2n for the doubled picture); eigendecompositions go through
//! nalgebra's Hermitian solver, the matrix exponential is a Padé(13)
//! scaling-and-squaring implementation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Smallest singular value.
pub fn min_singular(m: &CMat) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    op_norm(&(m - m.adjoint()))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Applies `f` on the spectrum of a Hermitian matrix: V f(Λ) V*.
///
/// The input is symmetrized first; callers are responsible for checking the
/// Hermitian defect beforehand.
pub fn hermitian_map(m: &CMat, f: impl Fn(f64) -> Result<f64>) -> Result<CMat> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut diag = CMat::zeros(m.nrows(), m.ncols());
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        diag[(i, i)] = Complex64::new(f(lambda)?, 0.0);
    }
    Ok(&eig.eigenvectors * diag * eig.eigenvectors.adjoint())
}

/// Real power of a Hermitian positive matrix.
pub fn hermitian_power(m: &CMat, p: f64, floor: f64) -> Result<CMat> {
    hermitian_map(m, |lambda| {
        if lambda < floor {
            Err(Error::SingularSpectrum { min: lambda })
        } else {
            Ok(lambda.powf(p))
        }
    })
}

pub fn try_inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularSpectrum { min: 0.0 })
}

fn one_norm(m: &CMat) -> f64 {
    let mut best = 0.0_f64;
    for j in 0..m.ncols() {
        let s: f64 = m.column(j).iter().map(|c| c.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Matrix exponential by Padé(13) scaling-and-squaring.
///
/// Fixed order keeps the code small; the scaling step brings the norm under
/// the Padé(13) radius so accuracy is near machine precision for the matrix
/// sizes used here.
pub fn expm(m: &CMat) -> CMat {
    const THETA_13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let n = m.nrows();
    let norm = one_norm(m);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale(0.5_f64.powi(s));

    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (a6.scale(B[13]) + a4.scale(B[11]) + a2.scale(B[9]))
        + a6.scale(B[7])
        + a4.scale(B[5])
        + a2.scale(B[3])
        + id.scale(B[1]);
    let u = &a * u_inner;
    let v = &a6 * (a6.scale(B[12]) + a4.scale(B[10]) + a2.scale(B[8]))
        + a6.scale(B[6])
        + a4.scale(B[4])
        + a2.scale(B[2])
        + id.scale(B[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut f = q.lu().solve(&p).expect("Padé denominator is invertible");
    for _ in 0..s {
        f = &f * &f;
    }
    f
}
