//! The tautological bundle over Q_ρ and its endomorphism (coefficient)
//! bundle, with both covariant derivatives and the curvature.
//!
//! A fiber endomorphism is a pair (basis, matrix): the endomorphism of the
//! range module R(p_x) sending x·b to x·(matrix·b). Two pairs represent the
//! same endomorphism when (x, a) ~ (x·u, u*·a·u) for a unitary u, so
//! equality is always decided after rebasing to the canonical section.

use crate::algebra::{AlgebraElement, C64};
use crate::disk::{
    fiber_unitary, lift, project, section, tangent_defect, ProjectionPoint, SpherePoint,
    TangentVector, VALIDATION_TOL,
};
use crate::doubled::{exp_to_group, theta, DoubledVector, LieElement};
use crate::error::{Error, Result};
use crate::fd;

/// An endomorphism of the range module at one sphere point.
#[derive(Clone, Debug)]
pub struct FiberEndomorphism {
    pub basis: SpherePoint,
    pub matrix: AlgebraElement,
}

impl FiberEndomorphism {
    pub fn new(basis: SpherePoint, matrix: AlgebraElement) -> Self {
        assert_eq!(basis.algebra(), matrix.algebra());
        FiberEndomorphism { basis, matrix }
    }

    pub fn identity_at(basis: SpherePoint) -> Self {
        let one = AlgebraElement::one(basis.algebra());
        FiberEndomorphism::new(basis, one)
    }

    pub fn base_point(&self) -> ProjectionPoint {
        project(&self.basis)
    }
}

/// Applies φ to a vector of R(p_x): v ↦ x·(a·θ(x, v)).
pub fn endo_apply(phi: &FiberEndomorphism, v: &DoubledVector) -> Result<DoubledVector> {
    let q = phi.base_point();
    if q.matrix().mul_vec(v).norm_diff(v) > VALIDATION_TOL * v.norm().max(1.0) {
        return Err(Error::NotInRange);
    }
    let coeff = theta(phi.basis.vector(), v)?;
    Ok(phi.basis.vector().mul_right(&phi.matrix.mul(&coeff)))
}

/// Rebases to the canonical section sr(p_x); idempotent, and constant on
/// equivalence classes, so canonical forms are directly comparable.
pub fn canonical_form(phi: &FiberEndomorphism) -> Result<FiberEndomorphism> {
    let q = phi.base_point();
    let target = section(&q)?;
    let u = fiber_unitary(&phi.basis, &target, VALIDATION_TOL)?;
    let matrix = u.adjoint().mul(&phi.matrix).mul(&u);
    Ok(FiberEndomorphism::new(target, matrix))
}

/// Endomorphism norm sup ‖θ(φy, φy)‖^{1/2}/‖θ(y, y)‖^{1/2}; equals the
/// operator norm of any of its matrices.
pub fn endo_norm(phi: &FiberEndomorphism) -> f64 {
    phi.matrix.op_norm()
}

/// A polynomial in t with algebra coefficients; exact evaluation and
/// differentiation for curve data.
#[derive(Clone, Debug)]
pub struct Poly {
    pub coeffs: Vec<AlgebraElement>,
}

impl Poly {
    pub fn constant(a: AlgebraElement) -> Self {
        Poly { coeffs: vec![a] }
    }

    pub fn eval(&self, t: f64) -> AlgebraElement {
        let mut acc = AlgebraElement::zero(self.coeffs[0].algebra());
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(C64::new(t, 0.0)).add(c);
        }
        acc
    }

    pub fn derivative_eval(&self, t: f64) -> AlgebraElement {
        let mut acc = AlgebraElement::zero(self.coeffs[0].algebra());
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc
                .scale(C64::new(t, 0.0))
                .add(&c.scale(C64::new(k as f64, 0.0)));
        }
        acc
    }

    /// Noncommutative product, self(t)·rhs(t).
    pub fn mul(&self, rhs: &Poly) -> Poly {
        let alg = self.coeffs[0].algebra();
        let mut coeffs = vec![AlgebraElement::zero(alg); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Poly { coeffs }
    }
}

/// A group-orbit curve through a base sphere point together with a
/// polynomial coefficient: x(t) = exp(t·gen)·x0, q(t) = p_{x(t)},
/// σ(t) = x(t)·coeff(t).
#[derive(Clone, Debug)]
pub struct CurveData {
    pub generator: LieElement,
    pub base_x: SpherePoint,
    pub coefficient: Poly,
}

impl CurveData {
    pub fn new(generator: LieElement, base_x: SpherePoint, coefficient: Poly) -> Self {
        assert_eq!(generator.algebra(), base_x.algebra());
        CurveData {
            generator,
            base_x,
            coefficient,
        }
    }

    /// The orbit curve adapted to a tangent vector, with the section as the
    /// base lift.
    pub fn along_tangent(tangent: &TangentVector, coefficient: Poly) -> Result<Self> {
        let gen = crate::disk::horizontal_generator(tangent);
        let x = section(tangent.base())?;
        Ok(CurveData::new(gen, x, coefficient))
    }

    pub fn x_at(&self, t: f64) -> SpherePoint {
        let g = exp_to_group(&self.generator, t);
        crate::disk::act_sphere(&g, &self.base_x)
    }

    pub fn q_at(&self, t: f64) -> ProjectionPoint {
        project(&self.x_at(t))
    }

    /// Exact velocity of the lift: ẋ(t) = gen · x(t).
    pub fn x_dot_at(&self, t: f64) -> DoubledVector {
        self.generator.to_matrix().mul_vec(self.x_at(t).vector())
    }

    pub fn section_at(&self, t: f64) -> DoubledVector {
        self.x_at(t).vector().mul_right(&self.coefficient.eval(t))
    }
}

/// Covariant derivative of the section σ(t) = x(t)·a(t) in the tautological
/// bundle: x·(ȧ + θ(x, ẋ)·a).
pub fn taut_derivative(curve: &CurveData, t0: f64) -> DoubledVector {
    let x = curve.x_at(t0);
    let x_dot = curve.x_dot_at(t0);
    let a = curve.coefficient.eval(t0);
    let a_dot = curve.coefficient.derivative_eval(t0);
    let twist = theta(x.vector(), &x_dot).expect("same algebra");
    x.vector().mul_right(&a_dot.add(&twist.mul(&a)))
}

/// The same derivative by projecting a finite difference of the ambient
/// curve; the independent route for tests.
pub fn taut_derivative_fd(curve: &CurveData, t0: f64, h: f64) -> DoubledVector {
    let raw = fd::derivative(|t| curve.section_at(t), t0, h);
    curve.q_at(t0).matrix().mul_vec(&raw)
}

/// Covariant derivative in the coefficient bundle along the same curve,
/// with the polynomial read as an endomorphism coefficient λ(t):
/// (x, λ̇ + [θ(x, ẋ), λ]).
pub fn coeff_derivative(curve: &CurveData, t0: f64) -> FiberEndomorphism {
    let x = curve.x_at(t0);
    let x_dot = curve.x_dot_at(t0);
    let lam = curve.coefficient.eval(t0);
    let lam_dot = curve.coefficient.derivative_eval(t0);
    let twist = theta(x.vector(), &x_dot).expect("same algebra");
    let bracket = twist.mul(&lam).sub(&lam.mul(&twist));
    FiberEndomorphism::new(x, lam_dot.add(&bracket))
}

/// Curvature of the tautological connection as a fiber endomorphism in the
/// canonical basis: matrix θ(x, [X, Y]·x).
pub fn curvature(x_t: &TangentVector, y_t: &TangentVector) -> Result<FiberEndomorphism> {
    if x_t.base().norm_diff(y_t.base()) > VALIDATION_TOL {
        return Err(Error::BasePointMismatch);
    }
    let x = section(x_t.base())?;
    let comm = x_t.matrix().commutator(y_t.matrix());
    let matrix = theta(x.vector(), &comm.mul_vec(x.vector()))?;
    Ok(FiberEndomorphism::new(x, matrix))
}

/// Curvature measured as D_X D_Y σ − D_Y D_X σ on the two-parameter orbit
/// family q(t, s) = e^{ta} e^{sb} q e^{−sb} e^{−ta} with a, b the
/// horizontal generators of X and Y, entirely by nested central
/// differences. Serves as the independent route against [`curvature`].
pub fn curvature_fd(
    x_t: &TangentVector,
    y_t: &TangentVector,
    sigma0: &AlgebraElement,
    h: f64,
) -> Result<FiberEndomorphism> {
    if x_t.base().norm_diff(y_t.base()) > VALIDATION_TOL {
        return Err(Error::BasePointMismatch);
    }
    let gen_a = crate::disk::horizontal_generator(x_t);
    let gen_b = crate::disk::horizontal_generator(y_t);
    let x0 = section(x_t.base())?;

    let x_at = |t: f64, s: f64| -> DoubledVector {
        let gt = exp_to_group(&gen_a, t);
        let gs = exp_to_group(&gen_b, s);
        gt.matrix().mul_vec(&gs.matrix().mul_vec(x0.vector()))
    };
    let sigma = |t: f64, s: f64| -> DoubledVector { x_at(t, s).mul_right(sigma0) };
    let q_at = |t: f64, s: f64| project(&SpherePoint::trusted(x_at(t, s)));

    // D_X D_Y σ: inner covariant s-derivative along each t, then the outer
    // covariant t-derivative at 0.
    let inner_s = |t: f64| -> DoubledVector {
        let raw = fd::derivative(|s| sigma(t, s), 0.0, h);
        q_at(t, 0.0).matrix().mul_vec(&raw)
    };
    let dxdy = {
        let raw = fd::derivative(inner_s, 0.0, h);
        q_at(0.0, 0.0).matrix().mul_vec(&raw)
    };

    let inner_t = |s: f64| -> DoubledVector {
        let raw = fd::derivative(|t| sigma(t, s), 0.0, h);
        q_at(0.0, s).matrix().mul_vec(&raw)
    };
    let dydx = {
        let raw = fd::derivative(inner_t, 0.0, h);
        q_at(0.0, 0.0).matrix().mul_vec(&raw)
    };

    let w = dxdy.sub(&dydx);
    let coeff = theta(x0.vector(), &w)?;
    let matrix = coeff.mul(&sigma0.try_inverse()?);
    Ok(FiberEndomorphism::new(x0, matrix))
}

/// The tangent-module action X·φ = [(x, v·a)] for v the lift of X.
pub fn module_action(tangent: &TangentVector, phi: &FiberEndomorphism) -> Result<TangentVector> {
    let x = section(tangent.base())?;
    let v = lift(tangent, &x)?;
    let phi_c = canonical_form(phi)?;
    if phi_c.base_point().norm_diff(tangent.base()) > VALIDATION_TOL {
        return Err(Error::BasePointMismatch);
    }
    crate::disk::tangent_from_lift(&x, &v.mul_right(&phi_c.matrix), VALIDATION_TOL)
}

/// Tangent validity defect of a derived vector, for the test suites.
pub fn result_tangent_defect(t: &TangentVector) -> f64 {
    tangent_defect(t.base(), t.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sample_unitary, sample_with, Algebra, SampleStyle};
    use crate::disk::{sample_projection, sample_tangent};
    use crate::rng::Rng;

    const MAT3: Algebra = Algebra::Matrix(3);

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_poly(alg: Algebra, deg: usize, rng: &mut Rng) -> Poly {
        Poly {
            coeffs: (0..=deg)
                .map(|_| sample_with(alg, rng, SampleStyle::General))
                .collect(),
        }
    }

    #[test]
    fn identity_endomorphism_acts_trivially() {
        let mut rng = Rng::new(31);
        let x = crate::disk::sample_sphere(MAT3, &mut rng);
        let phi = FiberEndomorphism::identity_at(x.clone());
        let b = sample_with(MAT3, &mut rng, SampleStyle::General);
        let v = x.vector().mul_right(&b);
        let out = endo_apply(&phi, &v).unwrap();
        assert!(out.norm_diff(&v) < 1e-10);
    }

    #[test]
    fn endo_apply_at_e1() {
        let e1 = SpherePoint::e1(MAT3);
        let a = sample_with(MAT3, &mut Rng::new(33), SampleStyle::General);
        let phi = FiberEndomorphism::new(e1.clone(), a.clone());
        let out = endo_apply(&phi, e1.vector()).unwrap();
        assert!(out.x1.norm_diff(&a) < 1e-14);
        assert!(out.x2.op_norm() < 1e-14);
    }

    #[test]
    fn endo_apply_rejects_out_of_range() {
        let e1 = SpherePoint::e1(MAT3);
        let phi = FiberEndomorphism::identity_at(e1);
        let e2 = crate::doubled::DoubledVector::e2(MAT3);
        assert!(matches!(endo_apply(&phi, &e2), Err(Error::NotInRange)));
    }

    #[test]
    fn endo_apply_is_basis_independent() {
        let mut rng = Rng::new(35);
        for _ in 0..10 {
            let x = crate::disk::sample_sphere(MAT3, &mut rng);
            let a = sample_with(MAT3, &mut rng, SampleStyle::General);
            let u = sample_unitary(MAT3, &mut rng);
            let phi = FiberEndomorphism::new(x.clone(), a.clone());
            let phi_u = FiberEndomorphism::new(x.mul_unitary(&u), u.adjoint().mul(&a).mul(&u));
            let v = x
                .vector()
                .mul_right(&sample_with(MAT3, &mut rng, SampleStyle::General));
            let lhs = endo_apply(&phi, &v).unwrap();
            let rhs = endo_apply(&phi_u, &v).unwrap();
            assert!(lhs.norm_diff(&rhs) < 1e-9);
        }
    }

    #[test]
    fn canonical_form_collapses_equivalence() {
        let mut rng = Rng::new(37);
        for _ in 0..10 {
            let x = crate::disk::sample_sphere(MAT3, &mut rng);
            let a = sample_with(MAT3, &mut rng, SampleStyle::General);
            let u = sample_unitary(MAT3, &mut rng);
            let phi = FiberEndomorphism::new(x.clone(), a.clone());
            let phi_u = FiberEndomorphism::new(x.mul_unitary(&u), u.adjoint().mul(&a).mul(&u));
            let ca = canonical_form(&phi).unwrap();
            let cb = canonical_form(&phi_u).unwrap();
            assert!(ca.matrix.norm_diff(&cb.matrix) < 1e-9);

            // Idempotency.
            let cc = canonical_form(&ca).unwrap();
            assert!(cc.matrix.norm_diff(&ca.matrix) < 1e-11);

            // Central matrices are untouched.
            let z = AlgebraElement::from_scalar(MAT3, c(0.3, -1.2));
            let central = FiberEndomorphism::new(x.clone(), z.clone());
            assert!(canonical_form(&central).unwrap().matrix.norm_diff(&z) < 1e-11);
        }
    }

    #[test]
    fn endo_norm_examples_and_bound() {
        let mut rng = Rng::new(39);
        let x = crate::disk::sample_sphere(MAT3, &mut rng);
        assert!((endo_norm(&FiberEndomorphism::identity_at(x.clone())) - 1.0).abs() < 1e-14);
        let phi = FiberEndomorphism::new(x.clone(), AlgebraElement::from_scalar(MAT3, c(0.0, 3.0)));
        assert!((endo_norm(&phi) - 3.0).abs() < 1e-14);

        // The sup over range vectors is attained at the basis itself.
        let a = sample_with(MAT3, &mut rng, SampleStyle::General);
        let phi = FiberEndomorphism::new(x.clone(), a);
        let mut sup: f64 = 0.0;
        for _ in 0..100 {
            let b = sample_with(MAT3, &mut rng, SampleStyle::General);
            let v = x.vector().mul_right(&b);
            let out = endo_apply(&phi, &v).unwrap();
            let num = theta(&out, &out).unwrap().op_norm().sqrt();
            let den = theta(&v, &v).unwrap().op_norm().sqrt();
            sup = sup.max(num / den);
        }
        let n = endo_norm(&phi);
        assert!(sup <= n * (1.0 + 1e-9));
        let at_basis = {
            let out = endo_apply(&phi, x.vector()).unwrap();
            theta(&out, &out).unwrap().op_norm().sqrt()
        };
        assert!((at_basis - n).abs() < 1e-9 * n.max(1.0));
    }

    #[test]
    fn taut_derivative_stationary_and_linear_cases() {
        let mut rng = Rng::new(41);
        let q = sample_projection(MAT3, &mut rng);
        let x = section(&q).unwrap();

        // Stationary curve, constant coefficient: derivative vanishes.
        let constant = Poly::constant(sample_with(MAT3, &mut rng, SampleStyle::General));
        let still = CurveData::new(LieElement::zero(MAT3), x.clone(), constant);
        assert!(taut_derivative(&still, 0.0).norm() < 1e-12);

        // Stationary curve, linear coefficient t·c: derivative is x·c.
        let cmat = sample_with(MAT3, &mut rng, SampleStyle::General);
        let linear = Poly {
            coeffs: vec![AlgebraElement::zero(MAT3), cmat.clone()],
        };
        let curve = CurveData::new(LieElement::zero(MAT3), x.clone(), linear);
        let d = taut_derivative(&curve, 0.0);
        assert!(d.norm_diff(&x.vector().mul_right(&cmat)) < 1e-12);
    }

    #[test]
    fn taut_derivative_matches_finite_differences() {
        let mut rng = Rng::new(43);
        for _ in 0..10 {
            let q = sample_projection(MAT3, &mut rng);
            let t = sample_tangent(&q, &mut rng);
            let curve = CurveData::along_tangent(&t, random_poly(MAT3, 2, &mut rng)).unwrap();
            for t0 in [0.0, 0.3] {
                let exact = taut_derivative(&curve, t0);
                let approx = taut_derivative_fd(&curve, t0, fd::FD_STEP);
                assert!(exact.norm_diff(&approx) < 1e-6);
            }
        }
    }

    #[test]
    fn coeff_derivative_special_cases() {
        let mut rng = Rng::new(45);
        let q = sample_projection(MAT3, &mut rng);
        let t = sample_tangent(&q, &mut rng);

        // Constant central coefficient: commutator term vanishes.
        let central = Poly::constant(AlgebraElement::from_scalar(MAT3, c(0.7, 0.4)));
        let curve = CurveData::along_tangent(&t, central).unwrap();
        assert!(coeff_derivative(&curve, 0.0).matrix.op_norm() < 1e-11);

        // Stationary curve: plain derivative of the coefficient.
        let poly = random_poly(MAT3, 2, &mut rng);
        let x = section(&q).unwrap();
        let still = CurveData::new(LieElement::zero(MAT3), x, poly.clone());
        let d = coeff_derivative(&still, 0.2);
        assert!(d.matrix.norm_diff(&poly.derivative_eval(0.2)) < 1e-12);
    }

    #[test]
    fn leibnitz_rule_links_the_connections() {
        let mut rng = Rng::new(47);
        for _ in 0..5 {
            let q = sample_projection(MAT3, &mut rng);
            let tan = sample_tangent(&q, &mut rng);
            let a_poly = random_poly(MAT3, 2, &mut rng);
            let l_poly = random_poly(MAT3, 2, &mut rng);

            let sigma_curve = CurveData::along_tangent(&tan, a_poly.clone()).unwrap();
            let phi_curve = CurveData::along_tangent(&tan, l_poly.clone()).unwrap();
            let prod_curve = CurveData::along_tangent(&tan, l_poly.mul(&a_poly)).unwrap();

            // D_X(φσ) via finite differences of the product section.
            let lhs = taut_derivative_fd(&prod_curve, 0.0, fd::FD_STEP);

            // φ(D_X σ) at t = 0.
            let x0 = sigma_curve.x_at(0.0);
            let phi0 = FiberEndomorphism::new(x0.clone(), l_poly.eval(0.0));
            let dsigma = taut_derivative(&sigma_curve, 0.0);
            let mid = endo_apply(&phi0, &dsigma).unwrap();

            // (D_X φ)σ at t = 0.
            let dphi = coeff_derivative(&phi_curve, 0.0);
            let sigma0 = sigma_curve.section_at(0.0);
            let rhs = endo_apply(&dphi, &sigma0).unwrap();

            let defect = lhs.sub(&mid).norm_diff(&rhs);
            assert!(defect < 1e-6, "leibnitz defect {defect:.3e}");
        }
    }

    #[test]
    fn curvature_antisymmetry_and_base_check() {
        let mut rng = Rng::new(49);
        let q = sample_projection(MAT3, &mut rng);
        let x_t = sample_tangent(&q, &mut rng);
        let y_t = sample_tangent(&q, &mut rng);
        let rxy = curvature(&x_t, &y_t).unwrap();
        let ryx = curvature(&y_t, &x_t).unwrap();
        assert!(rxy.matrix.add(&ryx.matrix).op_norm() < 1e-12);
        assert!(curvature(&x_t, &x_t).unwrap().matrix.op_norm() < 1e-12);

        let other = sample_projection(MAT3, &mut rng);
        let z_t = sample_tangent(&other, &mut rng);
        assert!(matches!(
            curvature(&x_t, &z_t),
            Err(Error::BasePointMismatch)
        ));
    }

    #[test]
    fn curvature_block_value_at_base_point() {
        // At q = p with codiagonal entries α, β the matrix is βα* − αβ*.
        let p = ProjectionPoint::base(Algebra::Scalar);
        let alpha = c(1.0, 0.0);
        let beta = c(0.0, 1.0);
        let mk = |v: C64| {
            let m = crate::doubled::DoubledMatrix::new(
                AlgebraElement::zero(Algebra::Scalar),
                AlgebraElement::scalar(v),
                AlgebraElement::scalar(-v.conj()),
                AlgebraElement::zero(Algebra::Scalar),
            );
            TangentVector::new(p.clone(), m, 1e-12).unwrap()
        };
        let r = curvature(&mk(alpha), &mk(beta)).unwrap();
        let expected = beta * alpha.conj() - alpha * beta.conj();
        assert!((r.matrix.as_scalar().unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn curvature_matches_finite_difference_route() {
        let mut rng = Rng::new(51);
        for trial in 0..6 {
            let q = sample_projection(MAT3, &mut rng);
            let x_t = sample_tangent(&q, &mut rng);
            let y_t = sample_tangent(&q, &mut rng);
            let x_t = x_t.scale(c(1.0 / x_t.norm().max(1e-9), 0.0));
            let y_t = y_t.scale(c(1.0 / y_t.norm().max(1e-9), 0.0));

            let sigma0 = if trial % 2 == 0 {
                AlgebraElement::one(MAT3)
            } else {
                sample_unitary(MAT3, &mut rng)
            };
            let closed = curvature(&x_t, &y_t).unwrap();
            let fd_route = curvature_fd(&x_t, &y_t, &sigma0, fd::FD_STEP).unwrap();
            let err = closed.matrix.norm_diff(&fd_route.matrix);
            assert!(err < 1e-4, "curvature fd mismatch {err:.3e}");

            let same = curvature_fd(&x_t, &x_t, &sigma0, fd::FD_STEP).unwrap();
            assert!(same.matrix.op_norm() < 1e-6);
        }
    }

    #[test]
    fn curvature_fd_scalar_case_at_base_point() {
        let p = ProjectionPoint::base(Algebra::Scalar);
        let mut rng = Rng::new(53);
        for _ in 0..5 {
            let x_t = sample_tangent(&p, &mut rng);
            let y_t = sample_tangent(&p, &mut rng);
            let one = AlgebraElement::one(Algebra::Scalar);
            let closed = curvature(&x_t, &y_t).unwrap();
            let fd_route = curvature_fd(&x_t, &y_t, &one, fd::FD_STEP).unwrap();
            assert!(closed.matrix.norm_diff(&fd_route.matrix) < 1e-5);
        }
    }
}
