//! The moment map of the isometry-group action: infinitesimal action,
//! C-valued moment map, symplectic-gradient identity, Poisson relation,
//! valuated moment, and the restricted-action convexity picture.

use crate::algebra::{
    fun_calc, AlgebraElement, SpectralFn, Valuation, C64,
};
use crate::bundles::FiberEndomorphism;
use crate::disk::{
    disk_coords, disk_point, section, ProjectionPoint, SpherePoint, TangentVector,
};
use crate::doubled::{exp_to_group, theta, LieElement};
use crate::error::{Error, Result};
use crate::fd;
use crate::kahler::symplectic_form;

/// Half the divisor of the moment normalization: 1/(2i).
fn half_over_i() -> C64 {
    C64::new(0.0, -0.5)
}

/// The fundamental vector field X_a(q) = a·q − q·a of a Lie element.
pub fn inf_action(a: &LieElement, q: &ProjectionPoint) -> TangentVector {
    let m = a.to_matrix();
    let x = m.mul(q.matrix()).sub(&q.matrix().mul(&m));
    TangentVector::trusted(q.clone(), x)
}

/// A moment value: the endomorphism with matrix (1/2i)·θ(x, a·x).
#[derive(Clone, Debug)]
pub struct MomentValue {
    pub value: FiberEndomorphism,
}

/// Moment map in a caller-chosen basis.
pub fn moment_map_in_basis(a: &LieElement, x: &SpherePoint) -> FiberEndomorphism {
    let ax = a.to_matrix().mul_vec(x.vector());
    let matrix = theta(x.vector(), &ax)
        .expect("same algebra")
        .scale(half_over_i());
    FiberEndomorphism::new(x.clone(), matrix)
}

/// Moment map in the canonical basis sr(q).
pub fn moment_map(a: &LieElement, q: &ProjectionPoint) -> Result<MomentValue> {
    let x = section(q)?;
    Ok(MomentValue {
        value: moment_map_in_basis(a, &x),
    })
}

/// Both sides of the symplectic-gradient identity D_Y f_a = ω(X_a, Y),
/// in the common canonical basis: the left side by central differences of
/// the moment coefficient along the orbit curve of Y, the right side in
/// closed form.
pub fn moment_gradient_check(
    a: &LieElement,
    y_t: &TangentVector,
    h: f64,
) -> Result<(FiberEndomorphism, FiberEndomorphism)> {
    let q = y_t.base();
    let x = section(q)?;
    let gen = crate::disk::horizontal_generator(y_t);

    let coeff = |t: f64| -> AlgebraElement {
        let g = exp_to_group(&gen, t);
        let xt = g.matrix().mul_vec(x.vector());
        let ax = a.to_matrix().mul_vec(&xt);
        theta(&xt, &ax).expect("same algebra").scale(half_over_i())
    };
    let lam_dot = fd::derivative(coeff, 0.0, h);
    // The orbit lift is horizontal at t = 0, so the connection twist
    // θ(x, ẋ) vanishes there; include it anyway for honesty.
    let x_dot = gen.to_matrix().mul_vec(x.vector());
    let twist = theta(x.vector(), &x_dot)?;
    let lam0 = coeff(0.0);
    let bracket = twist.mul(&lam0).sub(&lam0.mul(&twist));
    let lhs = FiberEndomorphism::new(x.clone(), lam_dot.add(&bracket));

    let rhs = symplectic_form(&inf_action(a, q), y_t)?;
    Ok((lhs, rhs))
}

/// The Poisson defect `ω(X_a, X_b) − f_[a,b] + 2i·[f_a, f_b]` in the
/// canonical basis; vanishing is the content of the bracket relation
/// `{f_a, f_b} = f_[a,b] − 2i·[f_a, f_b]`.
pub fn poisson_defect(
    a: &LieElement,
    b: &LieElement,
    q: &ProjectionPoint,
) -> Result<FiberEndomorphism> {
    let x = section(q)?;
    let omega = symplectic_form(&inf_action(a, q), &inf_action(b, q))?;
    let f_bracket = moment_map_in_basis(&a.bracket(b), &x);
    let fa = moment_map_in_basis(a, &x).matrix;
    let fb = moment_map_in_basis(b, &x).matrix;
    let comm = fa.mul(&fb).sub(&fb.mul(&fa)).scale(C64::new(0.0, 2.0));
    let defect = omega
        .matrix
        .sub(&f_bracket.matrix)
        .add(&comm);
    Ok(FiberEndomorphism::new(x, defect))
}

/// τ on doubled matrices: half the valuation of the diagonal sum.
pub fn tau(nu: &Valuation, m: &crate::doubled::DoubledMatrix) -> Result<AlgebraElement> {
    let s = m.m11.add(&m.m22);
    Ok(nu.apply(&s)?.scale(C64::new(0.5, 0.0)))
}

/// The valuated moment ν∘f_a alongside the density pairing τ(q·a); the two
/// are proportional with a fixed constant, which the suites measure.
#[derive(Clone, Debug)]
pub struct ValuatedMoment {
    pub value: AlgebraElement,
    pub tau_pairing: AlgebraElement,
}

pub fn valuated_moment(
    nu: &Valuation,
    a: &LieElement,
    q: &ProjectionPoint,
) -> Result<ValuatedMoment> {
    let f = moment_map(a, q)?;
    let value = nu.apply(&f.value.matrix)?;
    let qa = q.matrix().mul(&a.to_matrix());
    let tau_pairing = tau(nu, &qa)?;
    Ok(ValuatedMoment { value, tau_pairing })
}

/// Image point of the moment map restricted to the diagonal subgroup,
/// presented through disk coordinates: c1 = (1 − z z*)⁻¹, c2 = −c1·z z*.
#[derive(Clone, Debug)]
pub struct RestrictedImagePoint {
    pub c1: AlgebraElement,
    pub c2: AlgebraElement,
}

pub fn restricted_image(q: &ProjectionPoint) -> Result<RestrictedImagePoint> {
    let z = disk_coords(q)?;
    let one = AlgebraElement::one(z.algebra());
    let zz = z.mul(&z.adjoint());
    let c1 = fun_calc(&one.sub(&zz), SpectralFn::Inverse).map_err(|_| Error::NotInDisk)?;
    let c2 = c1.mul(&zz).neg();
    Ok(RestrictedImagePoint { c1, c2 })
}

/// Evaluates the restricted moment functional at a diagonal Lie element.
pub fn restricted_pairing(
    nu: &Valuation,
    point: &RestrictedImagePoint,
    a1: &AlgebraElement,
    a2: &AlgebraElement,
) -> Result<AlgebraElement> {
    nu.apply(&point.c1.mul(a1).add(&point.c2.mul(a2)))
}

/// Constructive convexity certificate: interpolates c1 between two image
/// points, produces the Hermitian positive disk point z = (1 − c1⁻¹)^{1/2},
/// and re-derives the image point from it. The reconstruction must agree
/// with the interpolant.
pub fn convexity_witness(
    pa: &RestrictedImagePoint,
    pb: &RestrictedImagePoint,
    t: f64,
) -> Result<(AlgebraElement, RestrictedImagePoint)> {
    assert!((0.0..=1.0).contains(&t), "interpolation parameter in [0,1]");
    let c1 = pa
        .c1
        .scale(C64::new(t, 0.0))
        .add(&pb.c1.scale(C64::new(1.0 - t, 0.0)));
    let one = AlgebraElement::one(c1.algebra());
    let inv = fun_calc(&c1, SpectralFn::Inverse).map_err(|_| Error::NotRepresentable)?;
    let m = one.sub(&inv);
    // c1 ⪰ 1 forces 0 ⪯ m ≺ 1; anything else is not representable.
    if m.hermitian_eigenvalues().first().cloned().unwrap_or(0.0) < -1e-10 {
        return Err(Error::NotRepresentable);
    }
    let z = fun_calc(&m, SpectralFn::Sqrt).map_err(|_| Error::NotRepresentable)?;
    let check = restricted_image(&disk_point(&z)?)?;
    Ok((z, check))
}
