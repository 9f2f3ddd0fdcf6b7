//! The half-space model H = {x + iy : x Hermitian, y positive invertible},
//! Möbius-equivalent to the disk, with the form θ_H, the hyperboloid K_H,
//! the Liouville 1-form, and the bracket on the positive cone.
//!
//! θ_H(x, y) = −i(x1*·y2 − x2*·y1) is the form of ρ_H = [[0, −i], [i, 0]];
//! the unitary U = (1/√2)[[1, 1], [i, −i]] intertwines it with θ exactly.

use crate::algebra::{fun_calc, AlgebraElement, SpectralFn, Valuation, C64, I};
use crate::doubled::{DoubledMatrix, DoubledVector};
use crate::error::{Error, Result};
use crate::fd;

const MEMBERSHIP_TOL: f64 = 1e-8;

/// A point ζ = x + iy of the half-space.
#[derive(Clone, Debug)]
pub struct HalfSpacePoint {
    x: AlgebraElement,
    y: AlgebraElement,
}

impl HalfSpacePoint {
    pub fn new(x: AlgebraElement, y: AlgebraElement) -> Result<Self> {
        let scale = x.op_norm().max(y.op_norm()).max(1.0);
        if x.hermitian_defect() > MEMBERSHIP_TOL * scale
            || y.hermitian_defect() > MEMBERSHIP_TOL * scale
        {
            return Err(Error::NotInHalfSpace);
        }
        let low = y.hermitian_eigenvalues().first().cloned().unwrap_or(0.0);
        if low <= MEMBERSHIP_TOL * scale {
            return Err(Error::NotInHalfSpace);
        }
        Ok(HalfSpacePoint { x, y })
    }

    pub fn from_element(zeta: &AlgebraElement) -> Result<Self> {
        HalfSpacePoint::new(zeta.hermitian_part(), zeta.imaginary_part())
    }

    /// i·1, the center of the half-space.
    pub fn center(algebra: crate::algebra::Algebra) -> Self {
        HalfSpacePoint {
            x: AlgebraElement::zero(algebra),
            y: AlgebraElement::one(algebra),
        }
    }

    pub fn real_part(&self) -> &AlgebraElement {
        &self.x
    }

    pub fn imag_part(&self) -> &AlgebraElement {
        &self.y
    }

    pub fn element(&self) -> AlgebraElement {
        self.x.add(&self.y.scale(I))
    }

    pub fn algebra(&self) -> crate::algebra::Algebra {
        self.x.algebra()
    }

    pub fn min_imag_eigenvalue(&self) -> f64 {
        self.y.hermitian_eigenvalues().first().cloned().unwrap_or(0.0)
    }
}

/// A tangent vector of H at a point; the velocity is unconstrained in A.
#[derive(Clone, Debug)]
pub struct HalfTangent {
    pub at: HalfSpacePoint,
    pub v: AlgebraElement,
}

impl HalfTangent {
    pub fn new(at: HalfSpacePoint, v: AlgebraElement) -> Self {
        assert_eq!(at.algebra(), v.algebra());
        HalfTangent { at, v }
    }

    /// Cartesian split v = ẋ + i ẏ.
    pub fn parts(&self) -> (AlgebraElement, AlgebraElement) {
        (self.v.hermitian_part(), self.v.imaginary_part())
    }
}

fn same_base(a: &HalfTangent, b: &HalfTangent) -> Result<()> {
    let d = a.at.x.norm_diff(&b.at.x).max(a.at.y.norm_diff(&b.at.y));
    if d > 1e-9 * a.at.element().op_norm().max(1.0) {
        return Err(Error::BasePointMismatch);
    }
    Ok(())
}

/// Γ(ζ) = (1 + iζ)(1 − iζ)⁻¹, from the half-space onto the disk.
pub fn mobius_to_disk(h: &HalfSpacePoint) -> Result<AlgebraElement> {
    let zeta = h.element();
    let one = AlgebraElement::one(zeta.algebra());
    let num = one.add(&zeta.scale(I));
    let den = one.sub(&zeta.scale(I));
    let z = num.mul(&den.try_inverse()?);
    if z.op_norm() >= 1.0 {
        return Err(Error::NotInDisk);
    }
    Ok(z)
}

/// Γ⁻¹(z) = i(1 − z)(1 + z)⁻¹, from the disk onto the half-space.
pub fn mobius_to_halfspace(z: &AlgebraElement) -> Result<HalfSpacePoint> {
    if z.op_norm() >= 1.0 {
        return Err(Error::NotInDisk);
    }
    let one = AlgebraElement::one(z.algebra());
    let h = one
        .sub(z)
        .mul(&one.add(z).try_inverse()?)
        .scale(I);
    HalfSpacePoint::from_element(&h)
}

/// Differential of Γ: dΓ_ζ(v) = (1 + Γ(ζ))·i·v·(1 − iζ)⁻¹.
pub fn mobius_pushforward(h: &HalfSpacePoint, v: &AlgebraElement) -> Result<AlgebraElement> {
    let zeta = h.element();
    let one = AlgebraElement::one(zeta.algebra());
    let gamma = mobius_to_disk(h)?;
    let den_inv = one.sub(&zeta.scale(I)).try_inverse()?;
    Ok(one.add(&gamma).mul(&v.scale(I)).mul(&den_inv))
}

/// θ_H(x, y) = −i(x1*·y2 − x2*·y1).
pub fn theta_h(x: &DoubledVector, y: &DoubledVector) -> Result<AlgebraElement> {
    if x.algebra() != y.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let cross = x
        .x1
        .adjoint()
        .mul(&y.x2)
        .sub(&x.x2.adjoint().mul(&y.x1));
    Ok(cross.scale(I.conj()))
}

/// The intertwining unitary U = (1/√2)[[1, 1], [i, −i]]: θ_H(Ux, Uy) = θ(x, y).
pub fn intertwiner(algebra: crate::algebra::Algebra) -> DoubledMatrix {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let one = AlgebraElement::one(algebra);
    DoubledMatrix::new(
        one.scale(s),
        one.scale(s),
        one.scale(I * s),
        one.scale(-I * s),
    )
}

fn k_h_defect(x: &DoubledVector) -> f64 {
    let one = AlgebraElement::one(x.algebra());
    let unit = theta_h(x, x)
        .expect("components share an algebra")
        .norm_diff(&one);
    let smin = x.x1.min_singular();
    let floor = crate::disk::INVERTIBILITY_TOL * x.x1.op_norm().max(1e-300);
    unit.max(if smin >= floor { 0.0 } else { floor - smin })
}

/// The θ_H-orthogonal complement vector x⊥ = (i x1, (x1*)⁻¹ + i x2); it
/// spans the nullspace of the θ_H-projection of x, with θ_H(x⊥, x⊥) = −1.
pub fn x_perp(x: &DoubledVector) -> Result<DoubledVector> {
    let defect = k_h_defect(x);
    if defect > MEMBERSHIP_TOL {
        return Err(Error::NotOnSphere { defect });
    }
    let inv_adj = x.x1.adjoint().try_inverse()?;
    Ok(DoubledVector::new(
        x.x1.scale(I),
        inv_adj.add(&x.x2.scale(I)),
    ))
}

/// The θ_H-projection p_x = x x* ρ_H.
pub fn projection_h(x: &DoubledVector) -> DoubledMatrix {
    // x* ρ_H is the row (i x2*, −i x1*).
    let r1 = x.x2.adjoint().scale(I);
    let r2 = x.x1.adjoint().scale(-I);
    DoubledMatrix::new(
        x.x1.mul(&r1),
        x.x1.mul(&r2),
        x.x2.mul(&r1),
        x.x2.mul(&r2),
    )
}

/// The global section ζ ↦ (1, ζ)·(2y)^{−1/2} of the fibration K_H → H.
pub fn halfspace_section(h: &HalfSpacePoint) -> DoubledVector {
    let two_y = h.y.scale(C64::new(2.0, 0.0));
    let s = fun_calc(&two_y, SpectralFn::InvSqrt).expect("2y is positive invertible");
    DoubledVector::new(s.clone(), h.element().mul(&s))
}

/// Horizontal lift κ_H(v̇) = ((2y)⁻¹, ζ(2y)⁻¹ − i)·i·v̇·(2y)^{−1/2} at the
/// section point.
pub fn halfspace_lift(h: &HalfSpacePoint, tangent: &HalfTangent) -> DoubledVector {
    let two_y = h.y.scale(C64::new(2.0, 0.0));
    let inv = fun_calc(&two_y, SpectralFn::Inverse).expect("2y is positive invertible");
    let inv_sqrt = fun_calc(&two_y, SpectralFn::InvSqrt).expect("2y is positive invertible");
    let one = AlgebraElement::one(h.algebra());
    let factor = tangent.v.scale(I).mul(&inv_sqrt);
    DoubledVector::new(
        inv.mul(&factor),
        h.element().mul(&inv).sub(&one.scale(I)).mul(&factor),
    )
}

/// ν of the Hilbertian product of the half-space:
/// −ν((2y)⁻¹ v̇* (2y)⁻¹ ẇ).
pub fn trace_product(
    nu: &Valuation,
    v: &HalfTangent,
    w: &HalfTangent,
) -> Result<AlgebraElement> {
    same_base(v, w)?;
    let two_y_inv = fun_calc(
        &v.at.y.scale(C64::new(2.0, 0.0)),
        SpectralFn::Inverse,
    )
    .map_err(|_| Error::NotInHalfSpace)?;
    let prod = two_y_inv
        .mul(&v.v.adjoint())
        .mul(&two_y_inv)
        .mul(&w.v)
        .neg();
    nu.apply(&prod)
}

/// The Liouville pairing α_ζ(v̇) = ν(y⁻¹ x y⁻¹ v̇).
pub fn liouville(nu: &Valuation, h: &HalfSpacePoint, v: &AlgebraElement) -> Result<AlgebraElement> {
    let y_inv = fun_calc(&h.y, SpectralFn::Inverse).map_err(|_| Error::NotInHalfSpace)?;
    nu.apply(&y_inv.mul(&h.x).mul(&y_inv).mul(v))
}

/// Closed-form exterior derivative of the Liouville form:
/// dα(v̇, ẇ) = ν(y⁻¹ ẋ_v y⁻¹ ẏ_w − y⁻¹ ẋ_w y⁻¹ ẏ_v).
pub fn d_liouville(nu: &Valuation, v: &HalfTangent, w: &HalfTangent) -> Result<AlgebraElement> {
    same_base(v, w)?;
    let y_inv = fun_calc(&v.at.y, SpectralFn::Inverse).map_err(|_| Error::NotInHalfSpace)?;
    let (xv, yv) = v.parts();
    let (xw, yw) = w.parts();
    let first = y_inv.mul(&xv).mul(&y_inv).mul(&yw);
    let second = y_inv.mul(&xw).mul(&y_inv).mul(&yv);
    nu.apply(&first.sub(&second))
}

/// dα by central differences of the Liouville pairing along the affine
/// family ζ(t, s) = ζ + t·v̇ + s·ẇ, against the base-directed components:
/// dα(v̇, ẇ) = ∂_t α_{ζ(t,0)}(ẏ_w) − ∂_s α_{ζ(0,s)}(ẏ_v). Returns the
/// closed form together with the finite-difference value.
pub fn d_liouville_fd(
    nu: &Valuation,
    v: &HalfTangent,
    w: &HalfTangent,
    h: f64,
) -> Result<(AlgebraElement, AlgebraElement)> {
    same_base(v, w)?;
    let base = &v.at;
    let (_, yv) = v.parts();
    let (_, yw) = w.parts();

    // The family must stay inside H over the stencil.
    let reach = h * (yv.op_norm() + yw.op_norm());
    if base.min_imag_eigenvalue() <= 2.0 * reach {
        return Err(Error::StepOutOfHalfSpace);
    }

    let alpha_at = |t: f64, dir: &HalfTangent, arg: &AlgebraElement| -> AlgebraElement {
        let (dx, dy) = dir.parts();
        let x_t = base.x.add(&dx.scale(C64::new(t, 0.0)));
        let y_t = base.y.add(&dy.scale(C64::new(t, 0.0)));
        let y_inv = fun_calc(&y_t, SpectralFn::Inverse).expect("family stays in H");
        nu.apply(&y_inv.mul(&x_t).mul(&y_inv).mul(arg))
            .expect("valuation applies")
    };

    let dt = fd::derivative(|t| alpha_at(t, v, &yw), 0.0, h);
    let ds = fd::derivative(|s| alpha_at(s, w, &yv), 0.0, h);
    let fd_value = dt.sub(&ds);
    Ok((d_liouville(nu, v, w)?, fd_value))
}

/// The bracket [x1, x2]_y = ν(y⁻¹ x1 y⁻¹ x2) on tangents of the positive
/// cone; symmetric, positive semidefinite, and invariant under
/// y ↦ (g⁻¹)* y g⁻¹.
pub fn spd_bracket(
    nu: &Valuation,
    y: &AlgebraElement,
    x1: &AlgebraElement,
    x2: &AlgebraElement,
) -> Result<AlgebraElement> {
    if !crate::algebra::is_positive(y, 1e-10 * y.op_norm().max(1.0))
        || y.hermitian_eigenvalues()[0] <= 0.0
    {
        return Err(Error::NotPositive);
    }
    let scale = x1.op_norm().max(x2.op_norm()).max(1.0);
    if x1.hermitian_defect() > MEMBERSHIP_TOL * scale
        || x2.hermitian_defect() > MEMBERSHIP_TOL * scale
    {
        return Err(Error::NotHermitian {
            defect: x1.hermitian_defect().max(x2.hermitian_defect()),
        });
    }
    let y_inv = fun_calc(y, SpectralFn::Inverse)?;
    nu.apply(&y_inv.mul(x1).mul(&y_inv).mul(x2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        sample_positive, sample_with, Algebra, SampleStyle,
    };
    use crate::doubled::theta;
    use crate::rng::Rng;

    const MAT3: Algebra = Algebra::Matrix(3);

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_point(alg: Algebra, rng: &mut Rng) -> HalfSpacePoint {
        let x = sample_with(alg, rng, SampleStyle::Hermitian);
        let y = sample_positive(alg, rng);
        HalfSpacePoint::new(x, y).unwrap()
    }

    #[test]
    fn center_maps_to_zero_and_back() {
        let h = HalfSpacePoint::center(MAT3);
        let z = mobius_to_disk(&h).unwrap();
        assert!(z.op_norm() < 1e-14);
        let back = mobius_to_halfspace(&AlgebraElement::zero(MAT3)).unwrap();
        assert!(back.element().norm_diff(&h.element()) < 1e-14);
    }

    #[test]
    fn mobius_roundtrip() {
        let mut rng = Rng::new(99);
        for _ in 0..20 {
            let h = sample_point(MAT3, &mut rng);
            let z = mobius_to_disk(&h).unwrap();
            assert!(z.op_norm() < 1.0);
            let back = mobius_to_halfspace(&z).unwrap();
            assert!(back.element().norm_diff(&h.element()) < 1e-9);
            assert!(back.min_imag_eigenvalue() > 0.0);
        }
    }

    #[test]
    fn mobius_rejects_outside_disk()  {
        let z = AlgebraElement::scalar(c(1.2, 0.0));
        assert!(matches!(mobius_to_halfspace(&z), Err(Error::NotInDisk)));
    }

    #[test]
    fn theta_h_of_the_reference_point() {
        // x = (1, i/2) has θ_H(x, x) = 2·Im(x1* x2) = 1.
        let x = DoubledVector::new(
            AlgebraElement::scalar(c(1.0, 0.0)),
            AlgebraElement::scalar(c(0.0, 0.5)),
        );
        let one = AlgebraElement::one(Algebra::Scalar);
        assert!(theta_h(&x, &x).unwrap().norm_diff(&one) < 1e-14);
    }

    #[test]
    fn intertwiner_carries_theta_to_theta_h() {
        let mut rng = Rng::new(101);
        let u = intertwiner(MAT3);
        for _ in 0..20 {
            let x = DoubledVector::new(
                sample_with(MAT3, &mut rng, SampleStyle::General),
                sample_with(MAT3, &mut rng, SampleStyle::General),
            );
            let y = DoubledVector::new(
                sample_with(MAT3, &mut rng, SampleStyle::General),
                sample_with(MAT3, &mut rng, SampleStyle::General),
            );
            let lhs = theta_h(&u.mul_vec(&x), &u.mul_vec(&y)).unwrap();
            let rhs = theta(&x, &y).unwrap();
            assert!(lhs.norm_diff(&rhs) < 1e-12);
        }

        // U maps the θ-sphere into K_H.
        for _ in 0..10 {
            let x = crate::disk::sample_sphere(MAT3, &mut rng);
            let moved = u.mul_vec(x.vector());
            assert!(k_h_defect(&moved) < 1e-9);
        }
    }

    #[test]
    fn perp_examples_and_relations() {
        // x = (1, i/2): x⊥ = (i, 1/2).
        let x = DoubledVector::new(
            AlgebraElement::scalar(c(1.0, 0.0)),
            AlgebraElement::scalar(c(0.0, 0.5)),
        );
        let perp = x_perp(&x).unwrap();
        assert!((perp.x1.as_scalar().unwrap() - c(0.0, 1.0)).norm() < 1e-14);
        assert!((perp.x2.as_scalar().unwrap() - c(0.5, 0.0)).norm() < 1e-14);
        let minus_one = AlgebraElement::one(Algebra::Scalar).neg();
        assert!(theta_h(&perp, &perp).unwrap().norm_diff(&minus_one) < 1e-14);

        let mut rng = Rng::new(103);
        let minus_one = AlgebraElement::one(MAT3).neg();
        for _ in 0..20 {
            let h = sample_point(MAT3, &mut rng);
            let x = halfspace_section(&h);
            let perp = x_perp(&x).unwrap();
            assert!(theta_h(&perp, &perp).unwrap().norm_diff(&minus_one) < 1e-10);
            assert!(theta_h(&x, &perp).unwrap().op_norm() < 1e-10);
            // x⊥ spans the nullspace of the projection.
            let p = projection_h(&x);
            assert!(p.mul_vec(&perp).norm() < 1e-9);
        }
    }

    #[test]
    fn section_lies_on_k_h_and_fibers_back() {
        let mut rng = Rng::new(105);
        for _ in 0..20 {
            let h = sample_point(MAT3, &mut rng);
            let x = halfspace_section(&h);
            assert!(k_h_defect(&x) < 1e-10);
            let back = x.x2.mul(&x.x1.try_inverse().unwrap());
            assert!(back.norm_diff(&h.element()) < 1e-10);
        }

        // ζ = i over the scalars lifts to (1/√2, i/√2).
        let h = HalfSpacePoint::center(Algebra::Scalar);
        let x = halfspace_section(&h);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x.x1.as_scalar().unwrap() - c(r, 0.0)).norm() < 1e-14);
        assert!((x.x2.as_scalar().unwrap() - c(0.0, r)).norm() < 1e-14);
    }

    #[test]
    fn lift_is_horizontal() {
        let mut rng = Rng::new(107);
        for _ in 0..20 {
            let h = sample_point(MAT3, &mut rng);
            let v = HalfTangent::new(
                h.clone(),
                sample_with(MAT3, &mut rng, SampleStyle::General),
            );
            let x = halfspace_section(&h);
            let lifted = halfspace_lift(&h, &v);
            let p = projection_h(&x);
            assert!(p.mul_vec(&lifted).norm() < 1e-9 * lifted.norm().max(1.0));
        }

        // Zero velocity lifts to zero; the scalar example at ζ = i.
        let h = HalfSpacePoint::center(Algebra::Scalar);
        let zero = HalfTangent::new(h.clone(), AlgebraElement::zero(Algebra::Scalar));
        assert!(halfspace_lift(&h, &zero).norm() < 1e-15);

        let one_t = HalfTangent::new(h.clone(), AlgebraElement::one(Algebra::Scalar));
        let k = halfspace_lift(&h, &one_t);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((k.x1.as_scalar().unwrap() - c(0.0, 0.5 * r)).norm() < 1e-14);
        assert!((k.x2.as_scalar().unwrap() - c(0.5 * r, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn trace_product_values_and_split() {
        let nu = Valuation::canonical(Algebra::Scalar);
        let h = HalfSpacePoint::center(Algebra::Scalar);
        let one_t = HalfTangent::new(h.clone(), AlgebraElement::one(Algebra::Scalar));
        let val = trace_product(&nu, &one_t, &one_t).unwrap();
        assert!((val.as_scalar().unwrap() - c(-0.25, 0.0)).norm() < 1e-14);

        // Real part of ⟨v, v⟩ is nonpositive; the Cartesian split identity.
        let mut rng = Rng::new(109);
        let nu = Valuation::canonical(MAT3);
        for _ in 0..20 {
            let h = sample_point(MAT3, &mut rng);
            let v = HalfTangent::new(h.clone(), sample_with(MAT3, &mut rng, SampleStyle::General));
            let w = HalfTangent::new(h.clone(), sample_with(MAT3, &mut rng, SampleStyle::General));
            let vv = trace_product(&nu, &v, &v).unwrap().as_scalar().unwrap();
            assert!(vv.re <= 1e-12);
            assert!(vv.im.abs() < 1e-12);

            // −¼{ν(ẋξ̇ + ẏη̇) + i·ν(ẋη̇ − ẏξ̇)} in translated coordinates.
            let y_is = fun_calc(&h.y, SpectralFn::InvSqrt).unwrap();
            let tv = y_is.mul(&v.v).mul(&y_is);
            let tw = y_is.mul(&w.v).mul(&y_is);
            let (xd, yd) = (tv.hermitian_part(), tv.imaginary_part());
            let (xi, eta) = (tw.hermitian_part(), tw.imaginary_part());
            let re = nu.apply(&xd.mul(&xi).add(&yd.mul(&eta))).unwrap();
            let im = nu.apply(&xd.mul(&eta).sub(&yd.mul(&xi))).unwrap();
            let split = re.add(&im.scale(I)).scale(c(-0.25, 0.0));
            let direct = trace_product(&nu, &v, &w).unwrap();
            assert!(direct.norm_diff(&split) < 1e-10);
        }
    }

    #[test]
    fn liouville_examples_and_linearity() {
        let nu = Valuation::canonical(Algebra::Scalar);
        // Pure imaginary point: the form vanishes.
        let h = HalfSpacePoint::center(Algebra::Scalar);
        let v = AlgebraElement::one(Algebra::Scalar);
        assert!(liouville(&nu, &h, &v).unwrap().op_norm() < 1e-15);

        // ζ = 1 + i, v̇ = 1: value 1.
        let h = HalfSpacePoint::new(
            AlgebraElement::scalar(c(1.0, 0.0)),
            AlgebraElement::scalar(c(1.0, 0.0)),
        )
        .unwrap();
        let val = liouville(&nu, &h, &v).unwrap();
        assert!((val.as_scalar().unwrap() - c(1.0, 0.0)).norm() < 1e-14);

        // Linearity.
        let mut rng = Rng::new(111);
        let nu = Valuation::canonical(MAT3);
        let hm = sample_point(MAT3, &mut rng);
        let a = sample_with(MAT3, &mut rng, SampleStyle::General);
        let b = sample_with(MAT3, &mut rng, SampleStyle::General);
        let lam = c(0.3, -1.7);
        let lhs = liouville(&nu, &hm, &a.scale(lam).add(&b)).unwrap();
        let rhs = liouville(&nu, &hm, &a).unwrap().scale(lam).add(&liouville(&nu, &hm, &b).unwrap());
        assert!(lhs.norm_diff(&rhs) < 1e-12);
    }

    #[test]
    fn d_liouville_scalar_example() {
        // ζ = i, v̇ = 1, ẇ = i: closed form 1.
        let nu = Valuation::canonical(Algebra::Scalar);
        let h = HalfSpacePoint::center(Algebra::Scalar);
        let v = HalfTangent::new(h.clone(), AlgebraElement::one(Algebra::Scalar));
        let w = HalfTangent::new(h.clone(), AlgebraElement::scalar(c(0.0, 1.0)));
        let d = d_liouville(&nu, &v, &w).unwrap();
        assert!((d.as_scalar().unwrap() - c(1.0, 0.0)).norm() < 1e-14);

        // Antisymmetry.
        let dw = d_liouville(&nu, &w, &v).unwrap();
        assert!((dw.as_scalar().unwrap() + d.as_scalar().unwrap()).norm() < 1e-14);
        assert!(d_liouville(&nu, &v, &v).unwrap().op_norm() < 1e-15);
    }

    #[test]
    fn d_liouville_closed_matches_finite_differences() {
        let mut rng = Rng::new(113);
        let nu = Valuation::canonical(MAT3);
        for _ in 0..15 {
            let h = sample_point(MAT3, &mut rng);
            let floor = h.min_imag_eigenvalue();
            let precondition = |g: AlgebraElement| {
                let (_, gy) = HalfTangent::new(h.clone(), g.clone()).parts();
                let bound = gy.op_norm();
                if bound * 10.0 > floor {
                    g.scale(c(floor / (10.0 * bound), 0.0))
                } else {
                    g
                }
            };
            let v = HalfTangent::new(
                h.clone(),
                precondition(sample_with(MAT3, &mut rng, SampleStyle::General)),
            );
            let w = HalfTangent::new(
                h.clone(),
                precondition(sample_with(MAT3, &mut rng, SampleStyle::General)),
            );
            let (closed, fd_val) = d_liouville_fd(&nu, &v, &w, fd::FD_STEP).unwrap();
            assert!(closed.norm_diff(&fd_val) < 1e-5 * closed.op_norm().max(1.0));
        }
    }

    #[test]
    fn d_liouville_is_minus_four_times_the_product_imaginary_part() {
        let mut rng = Rng::new(115);
        let nu = Valuation::canonical(MAT3);
        for _ in 0..20 {
            let h = sample_point(MAT3, &mut rng);
            let v = HalfTangent::new(h.clone(), sample_with(MAT3, &mut rng, SampleStyle::General));
            let w = HalfTangent::new(h.clone(), sample_with(MAT3, &mut rng, SampleStyle::General));
            let d = d_liouville(&nu, &v, &w).unwrap();
            let im = trace_product(&nu, &v, &w).unwrap().imaginary_part();
            assert!(d.norm_diff(&im.scale(c(-4.0, 0.0))) < 1e-10 * d.op_norm().max(1.0));
        }
    }

    #[test]
    fn spd_bracket_properties() {
        let nu = Valuation::canonical(MAT3);
        let one = AlgebraElement::one(MAT3);
        assert!(
            (spd_bracket(&nu, &one, &one, &one)
                .unwrap()
                .as_scalar()
                .unwrap()
                - c(1.0, 0.0))
            .norm()
                < 1e-14
        );

        let mut rng = Rng::new(117);
        for _ in 0..15 {
            let y = sample_positive(MAT3, &mut rng);
            let x1 = sample_with(MAT3, &mut rng, SampleStyle::Hermitian);
            let x2 = sample_with(MAT3, &mut rng, SampleStyle::Hermitian);

            // Symmetry and positive semidefiniteness.
            let ab = spd_bracket(&nu, &y, &x1, &x2).unwrap();
            let ba = spd_bracket(&nu, &y, &x2, &x1).unwrap();
            assert!(ab.norm_diff(&ba) < 1e-12);
            let aa = spd_bracket(&nu, &y, &x1, &x1).unwrap().as_scalar().unwrap();
            assert!(aa.re >= -1e-12 && aa.im.abs() < 1e-12);

            // Invariance under the cone action.
            let g = sample_with(MAT3, &mut rng, SampleStyle::General)
                .add(&one.scale(c(2.5, 0.0)));
            let g_inv = g.try_inverse().unwrap();
            let move_pt = |a: &AlgebraElement| g_inv.adjoint().mul(a).mul(&g_inv);
            let moved = spd_bracket(&nu, &move_pt(&y), &move_pt(&x1), &move_pt(&x2)).unwrap();
            assert!(moved.norm_diff(&ab) < 1e-9 * ab.op_norm().max(1.0));

            // The −¼ relation against the trace product on the imaginary axis.
            let hy = HalfSpacePoint::new(AlgebraElement::zero(MAT3), y.clone()).unwrap();
            let vi = HalfTangent::new(hy.clone(), x1.scale(I));
            let wi = HalfTangent::new(hy.clone(), x2.scale(I));
            let tp = trace_product(&nu, &vi, &wi).unwrap();
            assert!(tp.norm_diff(&ab.scale(c(-0.25, 0.0))) < 1e-10 * ab.op_norm().max(1.0));
        }
    }

    #[test]
    fn half_space_membership_is_enforced() {
        let x = AlgebraElement::one(MAT3);
        let y = AlgebraElement::one(MAT3).neg();
        assert!(matches!(
            HalfSpacePoint::new(x.clone(), y),
            Err(Error::NotInHalfSpace)
        ));
        let skew = AlgebraElement::one(MAT3).scale(I);
        assert!(matches!(
            HalfSpacePoint::new(skew, AlgebraElement::one(MAT3)),
            Err(Error::NotInHalfSpace)
        ));
    }

    #[test]
    fn d_liouville_fd_guards_the_family() {
        let nu = Valuation::canonical(MAT3);
        let h = HalfSpacePoint::center(MAT3);
        // An imaginary-direction velocity far larger than the step budget.
        let big = AlgebraElement::one(MAT3).scale(I).scale(c(1e5, 0.0));
        let v = HalfTangent::new(h.clone(), big);
        let w = HalfTangent::new(h.clone(), AlgebraElement::one(MAT3));
        assert!(matches!(
            d_liouville_fd(&nu, &v, &w, 1e-4),
            Err(Error::StepOutOfHalfSpace)
        ));
    }

    #[test]
    fn spd_bracket_rejects_non_positive_metric() {
        let nu = Valuation::canonical(MAT3);
        let one = AlgebraElement::one(MAT3);
        assert!(matches!(
            spd_bracket(&nu, &one.neg(), &one, &one),
            Err(Error::NotPositive)
        ));
    }
}
