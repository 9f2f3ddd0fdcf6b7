//! The projection space Q_ρ, the θ-unit sphere K, and the principal
//! fibration pr : K → Q_ρ with its global section and lifting form.
//!
//! Points of Q_ρ are θ-symmetric idempotents q with ρ(2q − 1) ≥ 0. Every
//! such q is q_b = [[1 + b*b, −(1+b*b)^{1/2} b*], [b (1+b*b)^{1/2}, −b b*]]
//! for exactly one b in A, and λ_q = |2q − 1|^{−1/2} conjugates the base
//! projection p = diag(1, 0) to q. The map pr(x) = x x* ρ fibers K over
//! Q_ρ with the unitary group of A acting on fibers by x ↦ x·u.

use crate::algebra::{
    fun_calc, hermitian_power, Algebra, AlgebraElement, SampleStyle, SpectralFn, C64,
};
use crate::doubled::{sharp, theta, DoubledMatrix, DoubledVector, GroupElement, LieElement};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Default tolerance for structural validation of constructed points.
pub const VALIDATION_TOL: f64 = 1e-6;
/// Relative lower bound on the smallest singular value of x1.
pub const INVERTIBILITY_TOL: f64 = 1e-8;

/// A point of Q_ρ.
#[derive(Clone, Debug)]
pub struct ProjectionPoint {
    q: DoubledMatrix,
}

impl ProjectionPoint {
    /// Validating constructor.
    pub fn new(q: DoubledMatrix, tol: f64) -> Result<Self> {
        let defect = projection_defect(&q);
        if defect > tol {
            return Err(Error::DegenerateProjection { defect });
        }
        Ok(ProjectionPoint { q })
    }

    pub fn matrix(&self) -> &DoubledMatrix {
        &self.q
    }

    pub fn algebra(&self) -> Algebra {
        self.q.algebra()
    }

    /// The base point p = diag(1, 0).
    pub fn base(algebra: Algebra) -> Self {
        ProjectionPoint {
            q: DoubledMatrix::base_projection(algebra),
        }
    }

    /// 2q − 1, the associated reflection.
    pub fn reflection(&self) -> DoubledMatrix {
        self.q
            .scale(C64::new(2.0, 0.0))
            .sub(&DoubledMatrix::identity(self.algebra()))
    }

    pub fn norm_diff(&self, other: &Self) -> f64 {
        self.q.norm_diff(&other.q)
    }
}

/// Max over the three defining defects: ‖q² − q‖, ‖q♯ − q‖, and the amount
/// by which ρ(2q − 1) fails to be positive.
pub fn projection_defect(q: &DoubledMatrix) -> f64 {
    let idem = q.mul(q).norm_diff(q);
    let symm = sharp(q).norm_diff(q);
    let alg = q.algebra();
    let rho = DoubledMatrix::rho(alg);
    let two_q_minus_one = q
        .scale(C64::new(2.0, 0.0))
        .sub(&DoubledMatrix::identity(alg));
    let pos_part = rho.mul(&two_q_minus_one);
    let herm = pos_part.sub(&pos_part.adjoint()).op_norm() * 0.5;
    let min_eig = crate::linalg::hermitian_eigenvalues(&pos_part.to_dense())
        .first()
        .cloned()
        .unwrap_or(0.0);
    idem.max(symm).max(herm).max((-min_eig).max(0.0))
}

/// A point of the sphere K: θ(x, x) = 1 with x1 invertible.
#[derive(Clone, Debug)]
pub struct SpherePoint {
    x: DoubledVector,
}

impl SpherePoint {
    pub fn new(x: DoubledVector, tol: f64) -> Result<Self> {
        let defect = sphere_defect(&x);
        if defect > tol {
            return Err(Error::NotOnSphere { defect });
        }
        Ok(SpherePoint { x })
    }

    pub(crate) fn trusted(x: DoubledVector) -> Self {
        SpherePoint { x }
    }

    pub fn vector(&self) -> &DoubledVector {
        &self.x
    }

    pub fn algebra(&self) -> Algebra {
        self.x.algebra()
    }

    pub fn e1(algebra: Algebra) -> Self {
        SpherePoint {
            x: DoubledVector::e1(algebra),
        }
    }

    /// Moves along the fiber: x ↦ x·u.
    pub fn mul_unitary(&self, u: &AlgebraElement) -> Self {
        SpherePoint {
            x: self.x.mul_right(u),
        }
    }
}

/// Max of ‖θ(x,x) − 1‖ and the x1-invertibility defect.
pub fn sphere_defect(x: &DoubledVector) -> f64 {
    let one = AlgebraElement::one(x.algebra());
    let unit = theta(x, x)
        .expect("components share an algebra")
        .norm_diff(&one);
    let smin = x.x1.min_singular();
    let floor = INVERTIBILITY_TOL * x.x1.op_norm().max(1e-300);
    let inv = if smin >= floor { 0.0 } else { floor - smin };
    unit.max(inv)
}

/// A tangent vector of Q_ρ at a given base point: ρX*ρ = X and Xq + qX = X.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: ProjectionPoint,
    x: DoubledMatrix,
}

impl TangentVector {
    pub fn new(base: ProjectionPoint, x: DoubledMatrix, tol: f64) -> Result<Self> {
        let defect = tangent_defect(&base, &x);
        if defect > tol {
            return Err(Error::InvalidTangent { defect });
        }
        Ok(TangentVector { base, x })
    }

    pub(crate) fn trusted(base: ProjectionPoint, x: DoubledMatrix) -> Self {
        TangentVector { base, x }
    }

    pub fn zero(base: ProjectionPoint) -> Self {
        let z = DoubledMatrix::zero(base.algebra());
        TangentVector { base, x: z }
    }

    pub fn base(&self) -> &ProjectionPoint {
        &self.base
    }

    pub fn matrix(&self) -> &DoubledMatrix {
        &self.x
    }

    pub fn algebra(&self) -> Algebra {
        self.base.algebra()
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentVector {
            base: self.base.clone(),
            x: self.x.add(&other.x),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        TangentVector {
            base: self.base.clone(),
            x: self.x.scale(c),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.op_norm()
    }
}

pub fn tangent_defect(base: &ProjectionPoint, x: &DoubledMatrix) -> f64 {
    let symm = sharp(x).norm_diff(x);
    let q = base.matrix();
    let anchored = x.mul(q).add(&q.mul(x)).norm_diff(x);
    symm.max(anchored)
}

/// The parametrization b ↦ q_b of Q_ρ by the whole algebra.
pub fn q_from_b(b: &AlgebraElement) -> ProjectionPoint {
    let alg = b.algebra();
    let one = AlgebraElement::one(alg);
    let bsb = one.add(&b.adjoint().mul(b));
    let s = fun_calc(&bsb, SpectralFn::Sqrt).expect("1 + b*b is positive");
    ProjectionPoint {
        q: DoubledMatrix::new(
            bsb,
            s.mul(&b.adjoint()).neg(),
            b.mul(&s),
            b.mul(&b.adjoint()).neg(),
        ),
    }
}

/// λ_q = |2q − 1|^{−1/2}, the positive conjugator with λ p λ⁻¹ = q and
/// λ ρ λ = ρ.
///
/// Computed through the block closed form [[(1+b*b)^{1/2}, b*],
/// [b, (1+bb*)^{1/2}]] with b recovered from the (2,1) block of q; the
/// de-doubled square roots act on spectra bounded below by one, which is
/// far better conditioned than the −1/4 power of the squared reflection.
pub fn lambda_of(q: &ProjectionPoint) -> Result<DoubledMatrix> {
    let degenerate = |_| Error::DegenerateProjection { defect: f64::NAN };
    let m11 = q.matrix().m11.hermitian_part();
    let s = fun_calc(&m11, SpectralFn::Sqrt).map_err(degenerate)?;
    let s_inv = fun_calc(&m11, SpectralFn::InvSqrt).map_err(degenerate)?;
    let b = q.matrix().m21.mul(&s_inv);
    let one = AlgebraElement::one(q.algebra());
    let t = fun_calc(&one.add(&b.mul(&b.adjoint())), SpectralFn::Sqrt).map_err(degenerate)?;
    Ok(DoubledMatrix::new(s, b.adjoint(), b, t))
}

/// pr(x) = x x* ρ.
pub fn project(x: &SpherePoint) -> ProjectionPoint {
    let v = x.vector();
    ProjectionPoint {
        q: DoubledMatrix::new(
            v.x1.mul(&v.x1.adjoint()),
            v.x1.mul(&v.x2.adjoint()).neg(),
            v.x2.mul(&v.x1.adjoint()),
            v.x2.mul(&v.x2.adjoint()).neg(),
        ),
    }
}

/// The global section sr(q) = λ_q e1, with positive invertible first
/// coordinate.
pub fn section(q: &ProjectionPoint) -> Result<SpherePoint> {
    let lam = lambda_of(q)?;
    Ok(SpherePoint {
        x: DoubledVector::new(lam.m11, lam.m21),
    })
}

/// The unitary u = θ(x, y) carrying x to y inside one fiber.
pub fn fiber_unitary(x: &SpherePoint, y: &SpherePoint, tol: f64) -> Result<AlgebraElement> {
    if project(x).norm_diff(&project(y)) > tol {
        return Err(Error::DifferentFibers);
    }
    theta(x.vector(), y.vector())
}

/// The lifting form κ_x(X) = X·x, valued in the nullspace of the base.
pub fn lift(tangent: &TangentVector, x: &SpherePoint) -> Result<DoubledVector> {
    if project(x).norm_diff(tangent.base()) > VALIDATION_TOL {
        return Err(Error::BasePointMismatch);
    }
    Ok(tangent.matrix().mul_vec(x.vector()))
}

/// Inverse of the lifting form: X = v x* ρ + x v* ρ for horizontal v.
pub fn tangent_from_lift(x: &SpherePoint, v: &DoubledVector, tol: f64) -> Result<TangentVector> {
    let base = project(x);
    if base.matrix().mul_vec(v).norm() > tol * v.norm().max(1.0) {
        return Err(Error::NotHorizontal);
    }
    let xv = x.vector();
    // v x* ρ + x v* ρ, written blockwise.
    let m = DoubledMatrix::new(
        v.x1.mul(&xv.x1.adjoint()).add(&xv.x1.mul(&v.x1.adjoint())),
        v.x1.mul(&xv.x2.adjoint()).add(&xv.x1.mul(&v.x2.adjoint())).neg(),
        v.x2.mul(&xv.x1.adjoint()).add(&xv.x2.mul(&v.x1.adjoint())),
        v.x2.mul(&xv.x2.adjoint()).add(&xv.x2.mul(&v.x2.adjoint())).neg(),
    );
    Ok(TangentVector { base, x: m })
}

/// The θ-antisymmetric generator a = Xq − qX; it satisfies [a, q] = X.
pub fn horizontal_generator(tangent: &TangentVector) -> LieElement {
    let q = tangent.base().matrix();
    let x = tangent.matrix();
    LieElement::project(&x.mul(q).sub(&q.mul(x)))
}

/// The action m · q · m⁻¹ of U(θ) on Q_ρ.
pub fn act(m: &GroupElement, q: &ProjectionPoint) -> ProjectionPoint {
    ProjectionPoint {
        q: m.conjugate(q.matrix()),
    }
}

/// The linear action on the sphere.
pub fn act_sphere(m: &GroupElement, x: &SpherePoint) -> SpherePoint {
    SpherePoint {
        x: m.matrix().mul_vec(x.vector()),
    }
}

/// The induced action on tangent vectors: X ↦ m X m⁻¹ at m·q.
pub fn act_tangent(m: &GroupElement, tangent: &TangentVector) -> TangentVector {
    TangentVector {
        base: act(m, tangent.base()),
        x: m.conjugate(tangent.matrix()),
    }
}

/// θ-orthonormal completion of x: y spans R(p_x) with first coordinate
/// positive invertible, z spans N(p_x) with θ(z, z) = −1 and second
/// coordinate positive invertible (z is the second column of λ_{p_x}).
pub fn basis_completion(x: &SpherePoint) -> Result<(DoubledVector, DoubledVector)> {
    let v = x.vector();
    let x1x1 = v.x1.mul(&v.x1.adjoint());
    let u = v.x1.adjoint().mul(&hermitian_power(&x1x1, -0.5)?);
    let y = v.mul_right(&u);

    let lam = lambda_of(&project(x))?;
    let z = DoubledVector::new(lam.m12, lam.m22);
    Ok((y, z))
}

/// Coordinates on the disk: q ↦ x2 x1⁻¹ along the section.
pub fn disk_coords(q: &ProjectionPoint) -> Result<AlgebraElement> {
    let x = section(q)?;
    let v = x.vector();
    Ok(v.x2.mul(&v.x1.try_inverse()?))
}

/// The point of Q_ρ over a disk element ‖z‖ < 1, through the section
/// x = ((1 − z*z)^{−1/2}, z (1 − z*z)^{−1/2}).
pub fn disk_point(z: &AlgebraElement) -> Result<ProjectionPoint> {
    Ok(project(&disk_section(z)?))
}

/// The canonical sphere lift of a disk element.
pub fn disk_section(z: &AlgebraElement) -> Result<SpherePoint> {
    if z.op_norm() >= 1.0 {
        return Err(Error::NotInDisk);
    }
    let one = AlgebraElement::one(z.algebra());
    let s = fun_calc(&one.sub(&z.adjoint().mul(z)), SpectralFn::InvSqrt)
        .map_err(|_| Error::NotInDisk)?;
    Ok(SpherePoint {
        x: DoubledVector::new(s.clone(), z.mul(&s)),
    })
}

/// Exact pushforward of a disk velocity `a` at `z` to a tangent vector of
/// Q_ρ at the point over z.
pub fn disk_pushforward(z: &AlgebraElement, a: &AlgebraElement) -> Result<TangentVector> {
    let x = disk_section(z)?;
    let one = AlgebraElement::one(z.algebra());
    let zs = z.adjoint();
    let inv = fun_calc(&one.sub(&z.mul(&zs)), SpectralFn::Inverse).map_err(|_| Error::NotInDisk)?;
    let s = fun_calc(&one.sub(&zs.mul(z)), SpectralFn::InvSqrt).map_err(|_| Error::NotInDisk)?;
    // Horizontal lift of the velocity: v = (z* c, c), c = (1 − z z*)⁻¹ a (1 − z*z)^{−1/2}.
    let c = inv.mul(a).mul(&s);
    let v = DoubledVector::new(zs.mul(&c), c);
    tangent_from_lift(&x, &v, VALIDATION_TOL)
}

/// The disk velocity of a tangent vector: dπ̂ of its horizontal lift.
pub fn disk_velocity(tangent: &TangentVector) -> Result<AlgebraElement> {
    let x = section(tangent.base())?;
    let v = lift(tangent, &x)?;
    let x1_inv = x.vector().x1.try_inverse()?;
    let z = x.vector().x2.mul(&x1_inv);
    // dπ̂_x(v) = v2 x1⁻¹ − z v1 x1⁻¹.
    Ok(v.x2.mul(&x1_inv).sub(&z.mul(&v.x1).mul(&x1_inv)))
}

/// Random projection point through the global parametrization.
pub fn sample_projection(algebra: Algebra, rng: &mut Rng) -> ProjectionPoint {
    let b = crate::algebra::sample_with(algebra, rng, SampleStyle::General);
    q_from_b(&b)
}

/// Random sphere point: the section over a random q, moved by a random
/// fiber unitary.
pub fn sample_sphere(algebra: Algebra, rng: &mut Rng) -> SpherePoint {
    let q = sample_projection(algebra, rng);
    let u = crate::algebra::sample_unitary(algebra, rng);
    section(&q).expect("sampled projections are nondegenerate").mul_unitary(&u)
}

/// Random tangent vector at q: projects a codiagonal θ-symmetric seed
/// V = [[0, v], [−v*, 0]] onto the tangent space by V ↦ Vq + qV − 2qVq.
pub fn sample_tangent(q: &ProjectionPoint, rng: &mut Rng) -> TangentVector {
    let alg = q.algebra();
    let v = crate::algebra::sample_with(alg, rng, SampleStyle::General);
    let seed = DoubledMatrix::new(
        AlgebraElement::zero(alg),
        v.clone(),
        v.adjoint().neg(),
        AlgebraElement::zero(alg),
    );
    let qm = q.matrix();
    let x = seed
        .mul(qm)
        .add(&qm.mul(&seed))
        .sub(&qm.mul(&seed).mul(qm).scale(C64::new(2.0, 0.0)));
    TangentVector {
        base: q.clone(),
        x,
    }
}
