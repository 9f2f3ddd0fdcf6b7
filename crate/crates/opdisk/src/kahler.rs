//! Complex structure, Hilbertian product, symplectic form, Finsler norm,
//! and the manifold linear connection.
//!
//! The product ⟨X, Y⟩_q = −θ(κ_x X, κ_x Y) takes values in the coefficient
//! bundle; its Hermitian part is the Riemannian form, its anti-Hermitian
//! part over i the symplectic form ω. The complex structure i_q Z =
//! i·Z·(2q−1) is compatible: ⟨i_q X, Y⟩ = −⟨X, i_q Y⟩.

use crate::algebra::{AlgebraElement, I};
use crate::bundles::FiberEndomorphism;
use crate::disk::{lift, section, TangentVector, VALIDATION_TOL};
use crate::doubled::theta;
use crate::error::{Error, Result};
use crate::fd;

/// i_q X = i·X·(2q − 1); squares to minus the identity on tangents.
pub fn complex_structure(x_t: &TangentVector) -> TangentVector {
    let refl = x_t.base().reflection();
    TangentVector::trusted(x_t.base().clone(), x_t.matrix().mul(&refl).scale(I))
}

/// The C-valued Hilbertian product with its Hermitian/anti-Hermitian split.
#[derive(Clone, Debug)]
pub struct HermitianForm {
    /// The product as an endomorphism in the canonical basis.
    pub value: FiberEndomorphism,
    /// Hermitian (Riemannian) component of the matrix.
    pub real: AlgebraElement,
    /// Hermitian matrix with real + i·imaginary = value.matrix.
    pub imaginary: AlgebraElement,
}

/// ⟨X, Y⟩_q = −θ(X·x, Y·x) in the canonical basis x = sr(q).
pub fn hilbertian_product(x_t: &TangentVector, y_t: &TangentVector) -> Result<HermitianForm> {
    if x_t.base().norm_diff(y_t.base()) > VALIDATION_TOL {
        return Err(Error::BasePointMismatch);
    }
    let x = section(x_t.base())?;
    let xv = lift(x_t, &x)?;
    let yv = lift(y_t, &x)?;
    let matrix = theta(&xv, &yv)?.neg();
    Ok(HermitianForm {
        real: matrix.hermitian_part(),
        imaginary: matrix.imaginary_part(),
        value: FiberEndomorphism::new(x, matrix),
    })
}

/// ω(X, Y) = Im ⟨X, Y⟩, matrix-wise (c − c*)/(2i).
pub fn symplectic_form(x_t: &TangentVector, y_t: &TangentVector) -> Result<FiberEndomorphism> {
    let form = hilbertian_product(x_t, y_t)?;
    Ok(FiberEndomorphism::new(form.value.basis, form.imaginary))
}

/// The invariant Finsler norm: the plain operator norm of the tangent
/// transported to the base point by the canonical conjugator,
/// ‖λ_q⁻¹ X λ_q‖ = ‖|2q−1|^{1/2} X |2q−1|^{−1/2}‖.
///
/// The transport λ_q carries p to q and the isotropy of p consists of
/// diagonal unitaries, so the value does not depend on the choice and the
/// norm distribution is invariant under the full group.
pub fn finsler_norm(x_t: &TangentVector) -> Result<f64> {
    let lam = crate::disk::lambda_of(x_t.base())?;
    let lam_inv = crate::doubled::sharp(&lam);
    Ok(lam_inv.mul(x_t.matrix()).mul(&lam).op_norm())
}

/// Covariant derivative of a tangent field along a curve through the base
/// of `y_t` with velocity `y_t`:
/// ∇_Y X = d/dt X(t)|_{t0} + [X(t0), [Y, q]].
///
/// The field is supplied as a map from the curve parameter to tangent
/// vectors at the moving base point; its t-derivative is taken by central
/// differences.
pub fn manifold_connection(
    field: impl Fn(f64) -> TangentVector,
    y_t: &TangentVector,
    t0: f64,
    h: f64,
) -> Result<TangentVector> {
    let at_t0 = field(t0);
    if at_t0.base().norm_diff(y_t.base()) > VALIDATION_TOL {
        return Err(Error::BasePointMismatch);
    }
    let ambient = fd::derivative(|t| field(t).matrix().clone(), t0, h);
    let q = y_t.base().matrix();
    let inner = y_t.matrix().mul(q).sub(&q.mul(y_t.matrix()));
    let corrector = at_t0.matrix().commutator(&inner);
    Ok(TangentVector::trusted(
        y_t.base().clone(),
        ambient.add(&corrector),
    ))
}
