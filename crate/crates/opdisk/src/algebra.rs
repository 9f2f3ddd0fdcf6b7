//! Concrete finite-dimensional C*-algebras.
//!
//! Three carriers are supported: full matrix algebras M_n(C), commutative
//! algebras C^k with componentwise operations, and the scalars C. Elements
//! carry their algebra tag so mixed-algebra arithmetic is rejected instead
//! of silently broadcast.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::rng::Rng;

pub type C64 = Complex64;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algebra {
    /// n x n complex matrices.
    Matrix(usize),
    /// k-tuples of complex numbers, componentwise product.
    Commutative(usize),
    /// The complex numbers.
    Scalar,
}

impl Algebra {
    /// Dimension of the dense carrier used for flattened computations.
    pub fn dense_dim(&self) -> usize {
        match self {
            Algebra::Matrix(n) => *n,
            Algebra::Commutative(k) => *k,
            Algebra::Scalar => 1,
        }
    }

    pub fn is_commutative(&self) -> bool {
        !matches!(self, Algebra::Matrix(n) if *n > 1)
    }
}

impl std::fmt::Display for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algebra::Matrix(n) => write!(f, "matrix:{n}"),
            Algebra::Commutative(k) => write!(f, "commutative:{k}"),
            Algebra::Scalar => write!(f, "scalar"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Carrier {
    Dense(CMat),
    Diag(Vec<C64>),
    Scalar(C64),
}

/// An element of a concrete C*-algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    algebra: Algebra,
    data: Carrier,
}

impl AlgebraElement {
    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn zero(algebra: Algebra) -> Self {
        Self::from_scalar(algebra, C64::new(0.0, 0.0))
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::from_scalar(algebra, ONE)
    }

    /// The central element c·1.
    pub fn from_scalar(algebra: Algebra, c: C64) -> Self {
        let data = match algebra {
            Algebra::Matrix(n) => Carrier::Dense(CMat::identity(n, n).scale_c(c)),
            Algebra::Commutative(k) => Carrier::Diag(vec![c; k]),
            Algebra::Scalar => Carrier::Scalar(c),
        };
        AlgebraElement { algebra, data }
    }

    pub fn from_dense(n: usize, m: CMat) -> Self {
        assert_eq!(m.nrows(), n);
        assert_eq!(m.ncols(), n);
        AlgebraElement {
            algebra: Algebra::Matrix(n),
            data: Carrier::Dense(m),
        }
    }

    pub fn from_components(components: Vec<C64>) -> Self {
        AlgebraElement {
            algebra: Algebra::Commutative(components.len()),
            data: Carrier::Diag(components),
        }
    }

    pub fn scalar(c: C64) -> Self {
        AlgebraElement {
            algebra: Algebra::Scalar,
            data: Carrier::Scalar(c),
        }
    }

    /// Scalar or per-component view; matrix algebras return `None`.
    pub fn components(&self) -> Option<Vec<C64>> {
        match &self.data {
            Carrier::Dense(_) => None,
            Carrier::Diag(v) => Some(v.clone()),
            Carrier::Scalar(c) => Some(vec![*c]),
        }
    }

    pub fn as_scalar(&self) -> Option<C64> {
        match &self.data {
            Carrier::Scalar(c) => Some(*c),
            _ => None,
        }
    }

    /// Dense carrier (commutative elements become diagonal matrices).
    pub fn to_dense(&self) -> CMat {
        match &self.data {
            Carrier::Dense(m) => m.clone(),
            Carrier::Diag(v) => {
                let k = v.len();
                let mut m = CMat::zeros(k, k);
                for (i, c) in v.iter().enumerate() {
                    m[(i, i)] = *c;
                }
                m
            }
            Carrier::Scalar(c) => CMat::from_element(1, 1, *c),
        }
    }

    /// Inverse of `to_dense` for the given algebra; off-diagonal entries are
    /// discarded for commutative carriers.
    pub fn from_dense_for(algebra: Algebra, m: &CMat) -> Self {
        match algebra {
            Algebra::Matrix(_) => AlgebraElement {
                algebra,
                data: Carrier::Dense(m.clone()),
            },
            Algebra::Commutative(k) => {
                AlgebraElement {
                    algebra,
                    data: Carrier::Diag((0..k).map(|i| m[(i, i)]).collect()),
                }
            }
            Algebra::Scalar => AlgebraElement {
                algebra,
                data: Carrier::Scalar(m[(0, 0)]),
            },
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other).expect("algebra mismatch in add");
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other).expect("algebra mismatch in sub");
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|a| a * c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other).expect("algebra mismatch in mul");
        match (&self.data, &other.data) {
            (Carrier::Dense(a), Carrier::Dense(b)) => AlgebraElement {
                algebra: self.algebra,
                data: Carrier::Dense(a * b),
            },
            _ => self.zip(other, |a, b| a * b),
        }
    }

    pub fn adjoint(&self) -> Self {
        match &self.data {
            Carrier::Dense(m) => AlgebraElement {
                algebra: self.algebra,
                data: Carrier::Dense(m.adjoint()),
            },
            _ => self.map(|a| a.conj()),
        }
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let data = match &self.data {
            Carrier::Dense(m) => Carrier::Dense(m.map(&f)),
            Carrier::Diag(v) => Carrier::Diag(v.iter().map(|c| f(*c)).collect()),
            Carrier::Scalar(c) => Carrier::Scalar(f(*c)),
        };
        AlgebraElement {
            algebra: self.algebra,
            data,
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        let data = match (&self.data, &other.data) {
            (Carrier::Dense(a), Carrier::Dense(b)) => {
                Carrier::Dense(CMat::from_fn(a.nrows(), a.ncols(), |i, j| {
                    f(a[(i, j)], b[(i, j)])
                }))
            }
            (Carrier::Diag(a), Carrier::Diag(b)) => {
                Carrier::Diag(a.iter().zip(b.iter()).map(|(x, y)| f(*x, *y)).collect())
            }
            (Carrier::Scalar(a), Carrier::Scalar(b)) => Carrier::Scalar(f(*a, *b)),
            _ => unreachable!("carriers agree when algebras agree"),
        };
        AlgebraElement {
            algebra: self.algebra,
            data,
        }
    }

    /// Hermitian part (a + a*)/2.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// Anti-Hermitian part divided by i, i.e. the "imaginary part"
    /// (a - a*)/(2i); Hermitian by construction.
    pub fn imaginary_part(&self) -> Self {
        self.sub(&self.adjoint()).scale(C64::new(0.0, -0.5))
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).op_norm()
    }
}

/// Operator norm: largest singular value for matrices, max modulus for
/// commutative and scalar carriers.
pub fn op_norm(a: &AlgebraElement) -> f64 {
    a.op_norm()
}

impl AlgebraElement {
    pub fn op_norm(&self) -> f64 {
        match &self.data {
            Carrier::Dense(m) => linalg::op_norm(m),
            Carrier::Diag(v) => v.iter().map(|c| c.norm()).fold(0.0, f64::max),
            Carrier::Scalar(c) => c.norm(),
        }
    }

    pub fn norm_diff(&self, other: &Self) -> f64 {
        self.sub(other).op_norm()
    }

    pub fn min_singular(&self) -> f64 {
        match &self.data {
            Carrier::Dense(m) => linalg::min_singular(m),
            Carrier::Diag(v) => v.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min),
            Carrier::Scalar(c) => c.norm(),
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        match &self.data {
            Carrier::Dense(m) => linalg::hermitian_eigenvalues(m),
            _ => {
                let mut v: Vec<f64> = self
                    .components()
                    .expect("componentwise carrier")
                    .iter()
                    .map(|c| c.re)
                    .collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            }
        }
    }

    /// General (not necessarily Hermitian) inverse.
    pub fn try_inverse(&self) -> Result<Self> {
        match &self.data {
            Carrier::Dense(m) => Ok(AlgebraElement {
                algebra: self.algebra,
                data: Carrier::Dense(linalg::try_inverse(m)?),
            }),
            _ => {
                let comps = self.components().expect("componentwise carrier");
                let mut out = Vec::with_capacity(comps.len());
                for c in comps {
                    if c.norm() < 1e-300 {
                        return Err(Error::SingularSpectrum { min: c.norm() });
                    }
                    out.push(c.inv());
                }
                Ok(AlgebraElement::from_dense_for(
                    self.algebra,
                    &AlgebraElement {
                        algebra: self.algebra,
                        data: match self.algebra {
                            Algebra::Scalar => Carrier::Scalar(out[0]),
                            _ => Carrier::Diag(out),
                        },
                    }
                    .to_dense(),
                ))
            }
        }
    }
}

/// Functions admitted by the Hermitian functional calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralFn {
    Sqrt,
    InvSqrt,
    Abs,
    Inverse,
}

/// Relative Hermitian-symmetrization tolerance.
const HERM_TOL: f64 = 1e-8;
/// Relative spectral floor below which inversion is refused.
const SPECTRUM_FLOOR: f64 = 1e-10;

/// Hermitian functional calculus via full eigendecomposition.
///
/// The input is symmetrized when its Hermitian defect is within tolerance
/// and rejected otherwise. `Sqrt` clamps roundoff-negative eigenvalues to
/// zero; `InvSqrt` and `Inverse` refuse spectra within the floor of zero.
pub fn fun_calc(a: &AlgebraElement, f: SpectralFn) -> Result<AlgebraElement> {
    let scale = a.op_norm().max(1.0);
    let defect = a.hermitian_defect();
    if defect > HERM_TOL * scale {
        return Err(Error::NotHermitian { defect });
    }
    let floor = SPECTRUM_FLOOR * scale;
    let apply = |lambda: f64| -> Result<f64> {
        match f {
            SpectralFn::Sqrt => {
                if lambda < -floor {
                    Err(Error::SingularSpectrum { min: lambda })
                } else {
                    Ok(lambda.max(0.0).sqrt())
                }
            }
            SpectralFn::InvSqrt => {
                if lambda < floor {
                    Err(Error::SingularSpectrum { min: lambda })
                } else {
                    Ok(1.0 / lambda.sqrt())
                }
            }
            SpectralFn::Abs => Ok(lambda.abs()),
            SpectralFn::Inverse => {
                if lambda.abs() < floor {
                    Err(Error::SingularSpectrum { min: lambda })
                } else {
                    Ok(1.0 / lambda)
                }
            }
        }
    };
    match &a.data {
        Carrier::Dense(m) => Ok(AlgebraElement {
            algebra: a.algebra,
            data: Carrier::Dense(linalg::hermitian_map(m, apply)?),
        }),
        _ => {
            let comps = a.components().expect("componentwise carrier");
            let mut out = Vec::with_capacity(comps.len());
            for c in comps {
                out.push(C64::new(apply(c.re)?, 0.0));
            }
            Ok(match a.algebra {
                Algebra::Scalar => AlgebraElement::scalar(out[0]),
                _ => AlgebraElement::from_components(out),
            })
        }
    }
}

/// Real power of a Hermitian positive element; shares the calculus plumbing.
pub fn hermitian_power(a: &AlgebraElement, p: f64) -> Result<AlgebraElement> {
    let scale = a.op_norm().max(1.0);
    let defect = a.hermitian_defect();
    if defect > HERM_TOL * scale {
        return Err(Error::NotHermitian { defect });
    }
    let floor = if p < 0.0 { SPECTRUM_FLOOR * scale } else { 0.0 };
    match &a.data {
        Carrier::Dense(m) => Ok(AlgebraElement {
            algebra: a.algebra,
            data: Carrier::Dense(linalg::hermitian_power(m, p, floor)?),
        }),
        _ => {
            let comps = a.components().expect("componentwise carrier");
            let mut out = Vec::with_capacity(comps.len());
            for c in comps {
                if c.re < floor {
                    return Err(Error::SingularSpectrum { min: c.re });
                }
                out.push(C64::new(c.re.max(0.0).powf(p), 0.0));
            }
            Ok(match a.algebra {
                Algebra::Scalar => AlgebraElement::scalar(out[0]),
                _ => AlgebraElement::from_components(out),
            })
        }
    }
}

/// True iff a = a* to `tol` and the spectrum is bounded below by -`tol`.
pub fn is_positive(a: &AlgebraElement, tol: f64) -> bool {
    if a.hermitian_defect() > tol {
        return false;
    }
    a.hermitian_eigenvalues()
        .first()
        .map(|&lo| lo >= -tol)
        .unwrap_or(true)
}

/// A positive tracial linear map onto a commutative algebra.
///
/// Matrix algebras map to the scalars by the normalized trace; commutative
/// and scalar algebras map to themselves by the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Valuation {
    source: Algebra,
    target: Algebra,
}

impl Valuation {
    pub fn canonical(source: Algebra) -> Self {
        let target = match source {
            Algebra::Matrix(_) => Algebra::Scalar,
            other => other,
        };
        Valuation { source, target }
    }

    pub fn source(&self) -> Algebra {
        self.source
    }

    pub fn target(&self) -> Algebra {
        self.target
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.algebra != self.source {
            return Err(Error::AlgebraMismatch);
        }
        match (&a.data, self.source) {
            (Carrier::Dense(m), Algebra::Matrix(n)) => {
                let tr: C64 = (0..n).map(|i| m[(i, i)]).sum();
                Ok(AlgebraElement::scalar(tr / n as f64))
            }
            _ => Ok(a.clone()),
        }
    }
}

/// Shapes of random elements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleStyle {
    General,
    Hermitian,
    AntiHermitian,
    /// General element rescaled to operator norm r (0 < r < 1).
    Contraction(f64),
}

fn raw_sample(algebra: Algebra, rng: &mut Rng) -> AlgebraElement {
    match algebra {
        Algebra::Matrix(n) => {
            let s = 1.0 / (n as f64).sqrt();
            AlgebraElement::from_dense(
                n,
                CMat::from_fn(n, n, |_, _| rng.next_complex_gauss() * s),
            )
        }
        Algebra::Commutative(k) => {
            AlgebraElement::from_components((0..k).map(|_| rng.next_complex_gauss()).collect())
        }
        Algebra::Scalar => AlgebraElement::scalar(rng.next_complex_gauss()),
    }
}

/// Deterministic sampling: the result depends only on (algebra, seed, style).
pub fn sample(algebra: Algebra, seed: u64, style: SampleStyle) -> AlgebraElement {
    let tag = match style {
        SampleStyle::General => 0x67656e65,
        SampleStyle::Hermitian => 0x6865726d,
        SampleStyle::AntiHermitian => 0x616e7469,
        SampleStyle::Contraction(_) => 0x636f6e74,
    };
    let mut rng = Rng::new(seed ^ tag);
    sample_with(algebra, &mut rng, style)
}

/// Sampling from a caller-owned stream.
pub fn sample_with(algebra: Algebra, rng: &mut Rng, style: SampleStyle) -> AlgebraElement {
    let g = raw_sample(algebra, rng);
    match style {
        SampleStyle::General => g,
        SampleStyle::Hermitian => g.add(&g.adjoint()).scale(C64::new(0.5, 0.0)),
        SampleStyle::AntiHermitian => g.sub(&g.adjoint()).scale(C64::new(0.5, 0.0)),
        SampleStyle::Contraction(r) => {
            assert!(r > 0.0 && r < 1.0, "contraction radius must lie in (0, 1)");
            let nrm = g.op_norm();
            if nrm == 0.0 {
                g
            } else {
                // Slight inward bias keeps the recomputed norm at or below r.
                g.scale(C64::new(r / (nrm * (1.0 + 1e-13)), 0.0))
            }
        }
    }
}

/// Random unitary: exp of an anti-Hermitian sample.
pub fn sample_unitary(algebra: Algebra, rng: &mut Rng) -> AlgebraElement {
    let a = sample_with(algebra, rng, SampleStyle::AntiHermitian);
    AlgebraElement::from_dense_for(algebra, &linalg::expm(&a.to_dense()))
}

/// Random positive invertible element with spectrum bounded away from zero.
pub fn sample_positive(algebra: Algebra, rng: &mut Rng) -> AlgebraElement {
    let g = sample_with(algebra, rng, SampleStyle::General);
    let scale = rng.uniform(0.5, 1.5);
    AlgebraElement::one(algebra)
        .add(&g.mul(&g.adjoint()))
        .scale(C64::new(scale, 0.0))
}

trait ScaleC {
    fn scale_c(self, c: C64) -> Self;
}

impl ScaleC for CMat {
    fn scale_c(self, c: C64) -> Self {
        self.map(|x| x * c)
    }
}
