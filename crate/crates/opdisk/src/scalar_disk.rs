//! Closed-form quantities of the classical Poincaré disk over C, used as
//! independent references for the operator machinery at the scalar algebra
//! and, componentwise, at commutative algebras.

use crate::algebra::{Algebra, AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// ⟨a, b⟩_z = conj(a)·b / (1 − |z|²)².
pub fn poincare_metric(z: C64, a: C64, b: C64) -> Result<C64> {
    if z.norm() >= 1.0 {
        return Err(Error::NotInDisk);
    }
    let d = 1.0 - z.norm_sqr();
    Ok(a.conj() * b / (d * d))
}

/// Moment value at z for the Lie data (iα, iβ on the diagonal, w off it):
/// (1/(1 − |z|²))·(½(α − β|z|²) + (1/2i)(w z − conj(w) conj(z))).
pub fn scalar_moment(z: C64, alpha: f64, beta: f64, w: C64) -> Result<C64> {
    if z.norm() >= 1.0 {
        return Err(Error::NotInDisk);
    }
    let zsq = z.norm_sqr();
    let diag = 0.5 * (alpha - beta * zsq);
    let off = (w * z - w.conj() * z.conj()) * C64::new(0.0, -0.5);
    Ok((C64::new(diag, 0.0) + off) / (1.0 - zsq))
}

/// A polynomial field in (z, conj z) with complex coefficients; exact
/// evaluation and directional differentiation.
#[derive(Clone, Debug)]
pub struct PolyField {
    /// `coeffs[j][k]` multiplies z^j · conj(z)^k.
    pub coeffs: Vec<Vec<C64>>,
}

impl PolyField {
    pub fn constant(c: C64) -> Self {
        PolyField {
            coeffs: vec![vec![c]],
        }
    }

    /// The linear field a(z) = z.
    pub fn identity() -> Self {
        PolyField {
            coeffs: vec![vec![C64::new(0.0, 0.0)], vec![C64::new(1.0, 0.0)]],
        }
    }

    pub fn random(deg: usize, rng: &mut Rng) -> Self {
        let coeffs = (0..=deg)
            .map(|_| (0..=deg).map(|_| rng.next_complex_gauss()).collect())
            .collect();
        PolyField { coeffs }
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                acc += c * z.powu(j as u32) * z.conj().powu(k as u32);
            }
        }
        acc
    }

    /// Exact directional derivative at 0 along b: `c[1][0]·b + c[0][1]·conj(b)`.
    pub fn directional_derivative_at_zero(&self, b: C64) -> C64 {
        let c10 = self
            .coeffs
            .get(1)
            .and_then(|row| row.first())
            .cloned()
            .unwrap_or_default();
        let c01 = self
            .coeffs
            .first()
            .and_then(|row| row.get(1))
            .cloned()
            .unwrap_or_default();
        c10 * b + c01 * b.conj()
    }
}

/// ∇_b a at the origin: the plain directional derivative of the field.
pub fn scalar_connection(field: &PolyField, b: C64) -> C64 {
    field.directional_derivative_at_zero(b)
}

/// Componentwise view of a commutative or scalar element.
pub fn components_of(a: &AlgebraElement) -> Result<Vec<C64>> {
    a.components().ok_or(Error::AlgebraMismatch)
}

/// Applies the Poincaré metric componentwise over a commutative carrier.
pub fn poincare_metric_elementwise(
    z: &AlgebraElement,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<AlgebraElement> {
    let zs = components_of(z)?;
    let av = components_of(a)?;
    let bv = components_of(b)?;
    let out: Result<Vec<C64>> = zs
        .iter()
        .zip(av.iter().zip(bv.iter()))
        .map(|(z, (a, b))| poincare_metric(*z, *a, *b))
        .collect();
    pack(z.algebra(), out?)
}

/// Componentwise scalar moment over a commutative carrier.
pub fn scalar_moment_elementwise(
    z: &AlgebraElement,
    alpha: &AlgebraElement,
    beta: &AlgebraElement,
    w: &AlgebraElement,
) -> Result<AlgebraElement> {
    let zs = components_of(z)?;
    let al = components_of(alpha)?;
    let be = components_of(beta)?;
    let ws = components_of(w)?;
    let mut out = Vec::with_capacity(zs.len());
    for i in 0..zs.len() {
        out.push(scalar_moment(zs[i], al[i].im, be[i].im, ws[i])?);
    }
    pack(z.algebra(), out)
}

fn pack(algebra: Algebra, v: Vec<C64>) -> Result<AlgebraElement> {
    Ok(match algebra {
        Algebra::Scalar => AlgebraElement::scalar(v[0]),
        Algebra::Commutative(_) => AlgebraElement::from_components(v),
        Algebra::Matrix(_) => return Err(Error::AlgebraMismatch),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn metric_fixed_values() {
        assert!((poincare_metric(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap() - c(1.0, 0.0))
            .norm()
            < 1e-15);
        assert!(
            (poincare_metric(c(0.5, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap()
                - c(16.0 / 9.0, 0.0))
            .norm()
                < 1e-15
        );
    }

    #[test]
    fn metric_conjugate_symmetry() {
        let mut rng = Rng::new(119);
        for _ in 0..50 {
            let g = rng.next_complex_gauss();
            let z = g * (0.9 / (1.0 + g.norm()));
            let a = rng.next_complex_gauss();
            let b = rng.next_complex_gauss();
            let ab = poincare_metric(z, a, b).unwrap();
            let ba = poincare_metric(z, b, a).unwrap();
            assert!((ab - ba.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn metric_rejects_boundary() {
        assert!(matches!(
            poincare_metric(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::NotInDisk)
        ));
    }

    #[test]
    fn connection_examples() {
        let constant = PolyField::constant(c(2.0, -1.0));
        assert!(scalar_connection(&constant, c(1.0, 0.0)).norm() < 1e-15);

        let linear = PolyField::identity();
        assert!((scalar_connection(&linear, c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn moment_fixed_values() {
        // At z = 0 only the first diagonal entry contributes: α/2.
        let v = scalar_moment(c(0.0, 0.0), 0.7, -0.4, c(0.3, 0.2)).unwrap();
        assert!((v - c(0.35, 0.0)).norm() < 1e-15);

        // α = β = 0, w = 1, z = i/2: value 2/3.
        let v = scalar_moment(c(0.0, 0.5), 0.0, 0.0, c(1.0, 0.0)).unwrap();
        assert!((v - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn field_evaluation_is_exact() {
        let mut rng = Rng::new(121);
        let f = PolyField::random(2, &mut rng);
        let z = c(0.3, -0.2);
        let direct = f.eval(z);
        let mut acc = c(0.0, 0.0);
        for (j, row) in f.coeffs.iter().enumerate() {
            for (k, co) in row.iter().enumerate() {
                acc += co * z.powu(j as u32) * z.conj().powu(k as u32);
            }
        }
        assert!((direct - acc).norm() < 1e-15);
    }
}
