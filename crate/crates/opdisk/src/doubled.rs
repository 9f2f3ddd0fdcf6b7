//! The doubled picture: vectors in A², 2x2 matrices over A, the form θ,
//! the ♯-adjoint, and the isometry group of θ with its Lie algebra.
//!
//! θ(x, y) = x1*·y1 − x2*·y2 is the A-valued sesquilinear form induced by
//! the symmetry ρ = diag(1, −1); the group U(θ) consists of the invertible
//! doubled matrices with m♯ = m⁻¹, where m♯ = ρ m* ρ.

use crate::algebra::{Algebra, AlgebraElement, C64};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::rng::Rng;

/// An element of A².
#[derive(Clone, Debug)]
pub struct DoubledVector {
    pub x1: AlgebraElement,
    pub x2: AlgebraElement,
}

impl DoubledVector {
    pub fn new(x1: AlgebraElement, x2: AlgebraElement) -> Self {
        assert_eq!(x1.algebra(), x2.algebra(), "components from one algebra");
        DoubledVector { x1, x2 }
    }

    pub fn algebra(&self) -> Algebra {
        self.x1.algebra()
    }

    /// First basis vector (1, 0).
    pub fn e1(algebra: Algebra) -> Self {
        DoubledVector::new(AlgebraElement::one(algebra), AlgebraElement::zero(algebra))
    }

    /// Second basis vector (0, 1).
    pub fn e2(algebra: Algebra) -> Self {
        DoubledVector::new(AlgebraElement::zero(algebra), AlgebraElement::one(algebra))
    }

    pub fn zero(algebra: Algebra) -> Self {
        DoubledVector::new(AlgebraElement::zero(algebra), AlgebraElement::zero(algebra))
    }

    pub fn add(&self, other: &Self) -> Self {
        DoubledVector::new(self.x1.add(&other.x1), self.x2.add(&other.x2))
    }

    pub fn sub(&self, other: &Self) -> Self {
        DoubledVector::new(self.x1.sub(&other.x1), self.x2.sub(&other.x2))
    }

    pub fn scale(&self, c: C64) -> Self {
        DoubledVector::new(self.x1.scale(c), self.x2.scale(c))
    }

    /// Right module action x · a.
    pub fn mul_right(&self, a: &AlgebraElement) -> Self {
        DoubledVector::new(self.x1.mul(a), self.x2.mul(a))
    }

    /// Module norm ‖x1*x1 + x2*x2‖^{1/2}.
    pub fn norm(&self) -> f64 {
        let g = self
            .x1
            .adjoint()
            .mul(&self.x1)
            .add(&self.x2.adjoint().mul(&self.x2));
        g.op_norm().sqrt()
    }

    pub fn norm_diff(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }
}

/// θ(x, y) = x1*·y1 − x2*·y2.
pub fn theta(x: &DoubledVector, y: &DoubledVector) -> Result<AlgebraElement> {
    if x.algebra() != y.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    Ok(x.x1
        .adjoint()
        .mul(&y.x1)
        .sub(&x.x2.adjoint().mul(&y.x2)))
}

/// An element of M₂(A).
#[derive(Clone, Debug)]
pub struct DoubledMatrix {
    pub m11: AlgebraElement,
    pub m12: AlgebraElement,
    pub m21: AlgebraElement,
    pub m22: AlgebraElement,
}

impl DoubledMatrix {
    pub fn new(
        m11: AlgebraElement,
        m12: AlgebraElement,
        m21: AlgebraElement,
        m22: AlgebraElement,
    ) -> Self {
        let a = m11.algebra();
        assert!(
            m12.algebra() == a && m21.algebra() == a && m22.algebra() == a,
            "blocks from one algebra"
        );
        DoubledMatrix { m11, m12, m21, m22 }
    }

    pub fn algebra(&self) -> Algebra {
        self.m11.algebra()
    }

    pub fn identity(algebra: Algebra) -> Self {
        DoubledMatrix::new(
            AlgebraElement::one(algebra),
            AlgebraElement::zero(algebra),
            AlgebraElement::zero(algebra),
            AlgebraElement::one(algebra),
        )
    }

    pub fn zero(algebra: Algebra) -> Self {
        let z = AlgebraElement::zero(algebra);
        DoubledMatrix::new(z.clone(), z.clone(), z.clone(), z)
    }

    /// The fixed symmetry ρ = diag(1, −1).
    pub fn rho(algebra: Algebra) -> Self {
        DoubledMatrix::new(
            AlgebraElement::one(algebra),
            AlgebraElement::zero(algebra),
            AlgebraElement::zero(algebra),
            AlgebraElement::one(algebra).neg(),
        )
    }

    /// The base projection p = diag(1, 0).
    pub fn base_projection(algebra: Algebra) -> Self {
        DoubledMatrix::new(
            AlgebraElement::one(algebra),
            AlgebraElement::zero(algebra),
            AlgebraElement::zero(algebra),
            AlgebraElement::zero(algebra),
        )
    }

    pub fn diagonal(d1: AlgebraElement, d2: AlgebraElement) -> Self {
        let z = AlgebraElement::zero(d1.algebra());
        DoubledMatrix::new(d1, z.clone(), z, d2)
    }

    pub fn add(&self, other: &Self) -> Self {
        DoubledMatrix::new(
            self.m11.add(&other.m11),
            self.m12.add(&other.m12),
            self.m21.add(&other.m21),
            self.m22.add(&other.m22),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        DoubledMatrix::new(
            self.m11.sub(&other.m11),
            self.m12.sub(&other.m12),
            self.m21.sub(&other.m21),
            self.m22.sub(&other.m22),
        )
    }

    pub fn scale(&self, c: C64) -> Self {
        DoubledMatrix::new(
            self.m11.scale(c),
            self.m12.scale(c),
            self.m21.scale(c),
            self.m22.scale(c),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        DoubledMatrix::new(
            self.m11.mul(&other.m11).add(&self.m12.mul(&other.m21)),
            self.m11.mul(&other.m12).add(&self.m12.mul(&other.m22)),
            self.m21.mul(&other.m11).add(&self.m22.mul(&other.m21)),
            self.m21.mul(&other.m12).add(&self.m22.mul(&other.m22)),
        )
    }

    pub fn mul_vec(&self, v: &DoubledVector) -> DoubledVector {
        DoubledVector::new(
            self.m11.mul(&v.x1).add(&self.m12.mul(&v.x2)),
            self.m21.mul(&v.x1).add(&self.m22.mul(&v.x2)),
        )
    }

    /// Blockwise adjoint m*.
    pub fn adjoint(&self) -> Self {
        DoubledMatrix::new(
            self.m11.adjoint(),
            self.m21.adjoint(),
            self.m12.adjoint(),
            self.m22.adjoint(),
        )
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Flatten to the dense 2d x 2d carrier.
    pub fn to_dense(&self) -> CMat {
        let d = self.algebra().dense_dim();
        let mut out = CMat::zeros(2 * d, 2 * d);
        let blocks = [
            (0, 0, self.m11.to_dense()),
            (0, d, self.m12.to_dense()),
            (d, 0, self.m21.to_dense()),
            (d, d, self.m22.to_dense()),
        ];
        for (r, c, b) in blocks {
            for i in 0..d {
                for j in 0..d {
                    out[(r + i, c + j)] = b[(i, j)];
                }
            }
        }
        out
    }

    pub fn from_dense(algebra: Algebra, m: &CMat) -> Self {
        let d = algebra.dense_dim();
        let block = |r: usize, c: usize| {
            AlgebraElement::from_dense_for(algebra, &CMat::from_fn(d, d, |i, j| m[(r + i, c + j)]))
        };
        DoubledMatrix::new(block(0, 0), block(0, d), block(d, 0), block(d, d))
    }

    /// Operator norm of the flattened matrix.
    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(&self.to_dense())
    }

    pub fn norm_diff(&self, other: &Self) -> f64 {
        self.sub(other).op_norm()
    }
}

/// ♯-adjoint m♯ = ρ m* ρ, the adjoint with respect to θ.
pub fn sharp(m: &DoubledMatrix) -> DoubledMatrix {
    let a = m.adjoint();
    DoubledMatrix::new(a.m11, a.m12.neg(), a.m21.neg(), a.m22)
}

/// True iff ‖m♯m − 1‖ ≤ tol and ‖mm♯ − 1‖ ≤ tol.
pub fn is_group_member(m: &DoubledMatrix, tol: f64) -> bool {
    let id = DoubledMatrix::identity(m.algebra());
    let s = sharp(m);
    s.mul(m).norm_diff(&id) <= tol && m.mul(&s).norm_diff(&id) <= tol
}

/// Default U(θ) membership tolerance (accumulated exponential error budget).
pub const GROUP_TOL: f64 = 1e-8;

/// An element of the Lie algebra of U(θ).
///
/// Stored as (a11, a22, a21) with a11, a22 anti-Hermitian and the upper
/// off-diagonal block implicit as a21*, so membership is exact by
/// construction.
#[derive(Clone, Debug)]
pub struct LieElement {
    a11: AlgebraElement,
    a22: AlgebraElement,
    a21: AlgebraElement,
}

impl LieElement {
    /// Builds from raw blocks, antisymmetrizing the diagonal ones.
    pub fn new(d1: &AlgebraElement, d2: &AlgebraElement, lower: &AlgebraElement) -> Self {
        let half = C64::new(0.5, 0.0);
        LieElement {
            a11: d1.sub(&d1.adjoint()).scale(half),
            a22: d2.sub(&d2.adjoint()).scale(half),
            a21: lower.clone(),
        }
    }

    /// θ-antisymmetric projection of a general doubled matrix.
    pub fn project(m: &DoubledMatrix) -> Self {
        let half = C64::new(0.5, 0.0);
        LieElement {
            a11: m.m11.sub(&m.m11.adjoint()).scale(half),
            a22: m.m22.sub(&m.m22.adjoint()).scale(half),
            a21: m.m21.add(&m.m12.adjoint()).scale(half),
        }
    }

    pub fn zero(algebra: Algebra) -> Self {
        let z = AlgebraElement::zero(algebra);
        LieElement {
            a11: z.clone(),
            a22: z.clone(),
            a21: z,
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.a11.algebra()
    }

    pub fn to_matrix(&self) -> DoubledMatrix {
        DoubledMatrix::new(
            self.a11.clone(),
            self.a21.adjoint(),
            self.a21.clone(),
            self.a22.clone(),
        )
    }

    pub fn diagonal_blocks(&self) -> (&AlgebraElement, &AlgebraElement) {
        (&self.a11, &self.a22)
    }

    pub fn lower_block(&self) -> &AlgebraElement {
        &self.a21
    }

    pub fn add(&self, other: &Self) -> Self {
        LieElement {
            a11: self.a11.add(&other.a11),
            a22: self.a22.add(&other.a22),
            a21: self.a21.add(&other.a21),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        let c = C64::new(t, 0.0);
        LieElement {
            a11: self.a11.scale(c),
            a22: self.a22.scale(c),
            a21: self.a21.scale(c),
        }
    }

    /// The bracket [a, b] = ab − ba, again in the Lie algebra.
    pub fn bracket(&self, other: &Self) -> Self {
        LieElement::project(&self.to_matrix().commutator(&other.to_matrix()))
    }

    pub fn norm(&self) -> f64 {
        self.to_matrix().op_norm()
    }
}

/// Splits into the diagonal and codiagonal summands.
pub fn lie_split(a: &LieElement) -> (LieElement, LieElement) {
    let z = AlgebraElement::zero(a.algebra());
    (
        LieElement {
            a11: a.a11.clone(),
            a22: a.a22.clone(),
            a21: z.clone(),
        },
        LieElement {
            a11: z.clone(),
            a22: z,
            a21: a.a21.clone(),
        },
    )
}

/// A member of U(θ). The inverse is m♯, exactly.
#[derive(Clone, Debug)]
pub struct GroupElement {
    m: DoubledMatrix,
}

impl GroupElement {
    pub fn try_new(m: DoubledMatrix, tol: f64) -> Result<Self> {
        if is_group_member(&m, tol) {
            Ok(GroupElement { m })
        } else {
            Err(Error::NotInGroup)
        }
    }

    pub fn identity(algebra: Algebra) -> Self {
        GroupElement {
            m: DoubledMatrix::identity(algebra),
        }
    }

    /// diag(u1, u2) for unitaries u1, u2 of A.
    pub fn diagonal_unitary(u1: AlgebraElement, u2: AlgebraElement) -> Result<Self> {
        GroupElement::try_new(DoubledMatrix::diagonal(u1, u2), GROUP_TOL)
    }

    pub fn matrix(&self) -> &DoubledMatrix {
        &self.m
    }

    pub fn inverse(&self) -> DoubledMatrix {
        sharp(&self.m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        GroupElement {
            m: self.m.mul(&other.m),
        }
    }

    /// Conjugation m · a · m⁻¹.
    pub fn conjugate(&self, a: &DoubledMatrix) -> DoubledMatrix {
        self.m.mul(a).mul(&self.inverse())
    }
}

/// exp(t·a) through the flattened carrier; lands in U(θ) because a♯ = −a.
pub fn exp_to_group(a: &LieElement, t: f64) -> GroupElement {
    let dense = a.to_matrix().to_dense().map(|c| c * C64::new(t, 0.0));
    let e = linalg::expm(&dense);
    GroupElement {
        m: DoubledMatrix::from_dense(a.algebra(), &e),
    }
}

/// Random Lie element with norm of order one.
pub fn sample_lie(algebra: Algebra, rng: &mut Rng) -> LieElement {
    let d1 = crate::algebra::sample_with(algebra, rng, crate::algebra::SampleStyle::AntiHermitian);
    let d2 = crate::algebra::sample_with(algebra, rng, crate::algebra::SampleStyle::AntiHermitian);
    let lower = crate::algebra::sample_with(algebra, rng, crate::algebra::SampleStyle::General);
    LieElement::new(&d1, &d2, &lower)
}

/// Random group element exp(a) on a bounded orbit.
pub fn sample_group(algebra: Algebra, rng: &mut Rng) -> GroupElement {
    let a = sample_lie(algebra, rng);
    let n = a.norm().max(1e-12);
    exp_to_group(&a.scale_real(rng.uniform(0.2, 1.2) / n), 1.0)
}
